use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the crate, with enough context to
/// act on (which input, which tolerance, how far a solve got).
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("scene is empty")]
    EmptyScene,
    #[error("component id {0:?} appears more than once")]
    DuplicateComponentId(String),
    #[error("component {id:?} is degenerate: {reason}")]
    DegenerateComponent { id: String, reason: String },
    #[error("non-finite coordinate in {context}")]
    NonFinite { context: &'static str },
    #[error("dyadic grid scale must be non-negative")]
    NegativeGridScale,
    #[error("mesh needs at least 2 nodes, got {0}")]
    MeshTooSmall(usize),
    #[error("nodes {a} and {b} coincide (distance {dist:.3e})")]
    CoincidentNodes { a: usize, b: usize, dist: f64 },
    #[error("equilibrium solve did not converge: projected-gradient residual {residual:.3e} after {iterations} iterations (tolerance {tolerance:.1e})")]
    SolverDiverged {
        residual: f64,
        iterations: usize,
        tolerance: f64,
    },
    #[error("kernel matrix is singular and the fallback could not recover")]
    SingularKernel,
    #[error("evaluation point ({x}, {y}) is within {dist:.3e} of a mesh node")]
    TooCloseToNode { x: f64, y: f64, dist: f64 },
    #[error("evaluation point ({x}, {y}) lies inside component {id:?}")]
    InsideComponent { x: f64, y: f64, id: String },
    #[error("level {level} runs into a critical point of the field (gradient collapsed to {grad_norm:.3e} while tracing)")]
    CriticalLevelCollision { level: f64, grad_norm: f64 },
    #[error("level-curve trace did not close after {steps} steps")]
    TraceDidNotClose { steps: usize },
    #[error("no level-{level} crossing bracketed from the given seed")]
    SeedNotBracketing { level: f64 },
    #[error("|grad g| = {value:.3e} on the contour is below the safe floor {floor:.1e}")]
    GradientTooSmall { value: f64, floor: f64 },
    #[error("contour winding pass hit a near-zero of the field derivative (|dg| = {value:.3e})")]
    DerivativeNearZero { value: f64 },
    #[error("evaluation radius {radius} is outside the annulus [{inner}, {outer}]")]
    OutsideAnnulus { radius: f64, inner: f64, outer: f64 },
    #[error("reference evaluation point coincides with the pole")]
    PoleCollision,
    #[error("reference point must lie strictly inside the disc of radius {radius}")]
    OutsideReferenceDisc { radius: f64 },
    #[error("square {context} produced an empty clip: nothing to replace")]
    EmptyClip { context: String },
    #[error("scene is not contained in the open disc of radius 1/2 about the origin")]
    SceneOutOfBounds,
    #[error("sublattice ({p}, {q}) mod {r} meets no part of the scene")]
    EmptySublattice { p: u32, q: u32, r: u32 },
    #[error("invalid pipeline parameters: {0}")]
    BadParams(String),
    #[error("modification loop still finds qualifying squares after {0} steps")]
    TooManySteps(usize),
    #[error("invalid selector: {0}")]
    BadSelector(String),
    #[error("verification precondition failed: {0}")]
    BadVerificationInput(String),
}
