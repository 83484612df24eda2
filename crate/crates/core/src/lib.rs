//! Numerical logarithmic potential theory on finite unions of closed discs
//! and axis-parallel squares in the plane.
//!
//! The crate is organized around one object: the equilibrium measure of a
//! compact scene, computed by a boundary-collocation solver. Everything else
//! is built on top of it — the Robin constant and capacity, the Green
//! function with pole at infinity and its critical structure, harmonic
//! measure at infinity, the disc/annulus domain-modification pipeline, and a
//! verification layer that checks the quantitative identities the pipeline
//! is designed around.

pub mod error;
pub mod geometry;
pub mod green;
pub mod harmonic;
pub mod pipeline;
pub mod potential;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{
    clip, dilate, dyadic_grid, relation, sublattice, BoundaryPiece, Clipped, ClippedRegion,
    CompactScene, Component, ComponentFile, ComponentId, Disc, DiscFile, Dyadic, DyadicSquare,
    Point, Rect, Relation, SceneFile, Shape, SquareFile,
};
pub use green::{
    contour_flux, count_critical_by_argument, find_critical_points, find_level_seed,
    log_grad_flux, normal_log_grad_flux, trace_level_curve, Contour, CriticalPoint, GreenField,
    LevelCurve,
};
pub use harmonic::{harmonic_measure, measure_ball, BoundarySelector};
pub use pipeline::{
    alpha_and_curve, disc_construction, exceptional_set, modify_domain, select_next_square,
    AlphaDecision, ExceptionalCover, ModificationStep, ModificationTrace, PipelineParams,
    SigmaCurve, TraceFile,
};
pub use potential::{
    assemble_kernel, discretize_boundary, solve_equilibrium, BoundaryMesh, EquilibriumSolution,
    SolverConfig,
};
pub use verify::{
    check_content_bound, check_contour_sum, check_flux_normalization, check_gradient_bound,
    check_level_log_identity, greedy_content, separating_curves, Check, VerificationReport,
};
