//! Greedy selection of the next lattice square to process: the coarsest
//! dyadic square (side between `rho` and `1/m`) whose closed-square
//! equilibrium mass reaches `m * side`, excluding squares contained in an
//! already-processed one.

use crate::error::Result;
use crate::geometry::DyadicSquare;
use crate::pipeline::params::PipelineParams;
use crate::potential::EquilibriumSolution;

/// Absolute slack on the mass threshold, absorbing simplex renormalization
/// rounding so that "all of the measure" qualifies at an exact threshold.
const MASS_SLACK: f64 = 1e-12;

/// Next square to process, or `None` when no admissible square carries
/// enough mass. Scans scales coarse to fine and, within the first
/// qualifying scale, picks the smallest `(i, j)` — deterministic for a
/// deterministic solution.
pub fn select_next_square(
    solution: &EquilibriumSolution,
    params: &PipelineParams,
    previous: &[DyadicSquare],
) -> Result<Option<DyadicSquare>> {
    params.validate()?;
    let (lo, hi) = node_bounds(solution);
    for scale in params.coarsest_scale()..=params.grid_scale() {
        let side = 2f64.powi(-(scale as i32));
        let threshold = params.m * side - MASS_SLACK;
        let sc = 2f64.powi(scale as i32);
        // one square of margin around the node bounding box
        let (i0, i1) = ((lo.0 * sc).floor() as i64 - 1, (hi.0 * sc).floor() as i64 + 1);
        let (j0, j1) = ((lo.1 * sc).floor() as i64 - 1, (hi.1 * sc).floor() as i64 + 1);
        let mut best: Option<DyadicSquare> = None;
        for i in i0..=i1 {
            for j in j0..=j1 {
                let sq = DyadicSquare { scale, i, j };
                if previous.iter().any(|p| sq.contained_in(p)) {
                    continue;
                }
                if solution.mass_in_rect(&sq.rect()) >= threshold {
                    best = Some(sq);
                    break; // smallest j for this i; i loop breaks below
                }
            }
            if best.is_some() {
                break;
            }
        }
        if best.is_some() {
            return Ok(best);
        }
    }
    Ok(None)
}

fn node_bounds(solution: &EquilibriumSolution) -> ((f64, f64), (f64, f64)) {
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for n in &solution.mesh.nodes {
        lo.0 = lo.0.min(n.position.x);
        lo.1 = lo.1.min(n.position.y);
        hi.0 = hi.0.max(n.position.x);
        hi.1 = hi.1.max(n.position.y);
    }
    (lo, hi)
}
