//! Plane geometry with exact dyadic bookkeeping.
//!
//! Grid squares, their dilations, and every containment predicate that
//! steers the modification pipeline are evaluated in exact dyadic-rational
//! arithmetic, so a square is never misclassified by floating-point drift.
//! Discs carry `f64` data (their radii come out of a solver) and meet the
//! exact world through closed-form distance comparisons.

mod clip;
mod dyadic;
mod point;
mod rect;
mod relation;
mod scene;

pub use clip::{clip, BoundaryPiece, Clipped, ClippedRegion};
pub use dyadic::Dyadic;
pub use point::Point;
pub use rect::{dilate, dyadic_grid, sublattice, DyadicSquare, Rect};
pub use relation::{relation, Relation};
pub use scene::{
    CompactScene, Component, ComponentFile, ComponentId, Disc, DiscFile, SceneFile, Shape,
    SquareFile,
};
