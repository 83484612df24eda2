//! Domain modification: turning an arbitrary compact scene into a union of
//! pairwise-disjoint closed discs, square by square, while tracking the
//! equilibrium measure. The submodules cover the two primitive scene edits
//! (`construct`), square selection (`select`), the full driver loop and its
//! trace (`run`), the per-disc separating curves (`alpha`), and the
//! exceptional-set bookkeeping of the survivors (`exceptional`).

mod alpha;
mod construct;
mod exceptional;
mod params;
mod run;
mod select;

pub use alpha::{alpha_and_curve, boundary_gradient_samples, AlphaDecision, SigmaCurve};
pub use construct::{annulus_construction, disc_construction, AnnulusOutcome, DiscConstruction};
pub use exceptional::{
    exceptional_set, split_survivors, ExceptionalCover, ExceptionalRegion, RegionSource,
    SurvivorSplit,
};
pub use params::PipelineParams;
pub use run::{
    modify_domain, CoverageReport, FirstStageDisc, FirstStageFile, ModificationStep,
    ModificationTrace, ParamsFile, SolutionSummary, StepFile, TraceFile,
};
pub use select::select_next_square;
