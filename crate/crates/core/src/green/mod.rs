//! The Green function with pole at infinity and its differential structure.
//!
//! From an equilibrium solution, `g(z) = sum_a w_a log|z - z_a| + robin` is
//! harmonic off the nodes, vanishes on the scene boundary (up to the
//! discretization error), and grows like `log|z|` at infinity. The complex
//! derivative `dg = (1/2) sum_a w_a / (z - z_a)` is rational, which makes
//! critical points (zeros of `dg`), their winding counts, level-curve
//! tracing, and contour quadrature all cheap and robust.

mod contour;
mod critical;
mod field;
mod level;

pub use contour::{contour_flux, log_grad_flux, normal_log_grad_flux, Contour};
pub use critical::{count_critical_by_argument, find_critical_points, CriticalPoint};
pub use field::GreenField;
pub use level::{find_level_seed, trace_level_curve, LevelCurve};
