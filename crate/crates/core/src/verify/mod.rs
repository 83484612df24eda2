//! Numerical verification suite: each check recomputes a conserved or
//! bounded quantity along an independent route (flux integrals, saddle
//! sums, explicit covers, boundary sampling) and records the comparison in
//! a serializable report.

mod content;
mod contour;
mod gradient;
mod identity;
mod report;

pub use content::{check_content_bound, greedy_content};
pub use contour::{check_contour_sum, check_flux_normalization};
pub use gradient::check_gradient_bound;
pub use identity::{check_level_log_identity, separating_curves};
pub use report::{Check, VerificationReport};
