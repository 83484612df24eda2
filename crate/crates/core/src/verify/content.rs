//! Upper bounds on the `s`-dimensional size of a clipped set, by the
//! cheapest of several explicit ball covers, and the report comparing that
//! content against the set's capacity.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::Result;
use crate::geometry::{Clipped, ClippedRegion, CompactScene, Shape};
use crate::potential::{solve_equilibrium, SolverConfig};
use crate::verify::report::{Check, VerificationReport};

/// Upper bound on the `s`-content `inf sum r_i^s` over ball covers, taking
/// the best of: one ball per component, one ball around everything, and a
/// dyadic-square cover at each of `depth + 1` successively finer scales
/// (each occupied square contributing its circumscribed ball).
///
/// Deeper `depth` only adds candidate covers, so the value is
/// non-increasing in `depth`. Empty input has content zero.
pub fn greedy_content(clipped: &Clipped, s: f64, depth: u32) -> f64 {
    if clipped.is_empty() || !(s > 0.0) {
        return 0.0;
    }
    let mut direct = 0.0;
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (_, region) in &clipped.components {
        let bb = region_bbox(region);
        lo.0 = lo.0.min(bb.0);
        lo.1 = lo.1.min(bb.1);
        hi.0 = hi.0.max(bb.2);
        hi.1 = hi.1.max(bb.3);
        direct += circumscribed_radius(region, bb).powf(s);
    }
    let mut best = direct;

    // one ball around the whole set
    let diag = (hi.0 - lo.0).hypot(hi.1 - lo.1);
    best = best.min((0.5 * diag).powf(s));

    // dyadic covers, coarsest scale sized to the bounding box
    let extent = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-300);
    let s0 = -extent.log2().floor() as i32;
    for t in 0..=depth as i32 {
        let side = 2f64.powi(-(s0 + t));
        let sc = 1.0 / side;
        let (i0, i1) = ((lo.0 * sc).floor() as i64, (hi.0 * sc).floor() as i64);
        let (j0, j1) = ((lo.1 * sc).floor() as i64, (hi.1 * sc).floor() as i64);
        let cells = (i1 - i0 + 1) * (j1 - j0 + 1);
        if cells > 1 << 22 {
            break;
        }
        let mut occupied = 0usize;
        for j in j0..=j1 {
            for i in i0..=i1 {
                let cell = (
                    i as f64 * side,
                    j as f64 * side,
                    (i + 1) as f64 * side,
                    (j + 1) as f64 * side,
                );
                if clipped
                    .components
                    .iter()
                    .any(|(_, r)| region_meets_box(r, cell))
                {
                    occupied += 1;
                }
            }
        }
        best = best.min(occupied as f64 * (side * FRAC_1_SQRT_2).powf(s));
    }
    best
}

/// Bounding box of one clipped region (base shape cut by its window).
fn region_bbox(region: &ClippedRegion) -> (f64, f64, f64, f64) {
    let (lo, hi) = region.base.bounding();
    match &region.window {
        None => (lo.x, lo.y, hi.x, hi.y),
        Some(w) => (
            lo.x.max(w.fx0()),
            lo.y.max(w.fy0()),
            hi.x.min(w.fx1()),
            hi.y.min(w.fy1()),
        ),
    }
}

/// Radius of a ball certainly containing the region: the exact radius for
/// an uncut disc, else half the bounding-box diagonal.
fn circumscribed_radius(region: &ClippedRegion, bb: (f64, f64, f64, f64)) -> f64 {
    if let (Shape::Disc(d), None) = (&region.base, &region.window) {
        return d.radius;
    }
    if let Shape::Disc(d) = &region.base {
        // window may leave the disc whole
        if bb.0 <= d.center.x - d.radius
            && bb.1 <= d.center.y - d.radius
            && bb.2 >= d.center.x + d.radius
            && bb.3 >= d.center.y + d.radius
        {
            return d.radius;
        }
    }
    0.5 * (bb.2 - bb.0).hypot(bb.3 - bb.1)
}

/// Does `base ∩ window` meet the closed box?
fn region_meets_box(region: &ClippedRegion, cell: (f64, f64, f64, f64)) -> bool {
    let cell = match &region.window {
        None => cell,
        Some(w) => {
            let x0 = cell.0.max(w.fx0());
            let y0 = cell.1.max(w.fy0());
            let x1 = cell.2.min(w.fx1());
            let y1 = cell.3.min(w.fy1());
            if x0 > x1 || y0 > y1 {
                return false;
            }
            (x0, y0, x1, y1)
        }
    };
    match &region.base {
        Shape::Rect(r) => {
            r.fx0() <= cell.2 && cell.0 <= r.fx1() && r.fy0() <= cell.3 && cell.1 <= r.fy1()
        }
        Shape::Disc(d) => {
            let dx = (cell.0 - d.center.x).max(d.center.x - cell.2).max(0.0);
            let dy = (cell.1 - d.center.y).max(d.center.y - cell.3).max(0.0);
            dx * dx + dy * dy <= d.radius * d.radius
        }
    }
}

/// Default and refined dyadic depths used by the content report.
const DEPTH: u32 = 6;

/// Compare the greedy `s`-content of a scene against its capacity to the
/// power `s`, and make sure one more level of dyadic refinement does not
/// change the content by more than a factor of two.
pub fn check_content_bound(
    scene: &CompactScene,
    s: f64,
    config: &SolverConfig,
) -> Result<VerificationReport> {
    let clipped = Clipped::from_scene(scene);
    let content = greedy_content(&clipped, s, DEPTH);
    let refined = greedy_content(&clipped, s, DEPTH + 1);
    let solution = solve_equilibrium(&clipped, config)?;
    let ratio = content / solution.capacity.powf(s);

    let mut report = VerificationReport::new("content_bound");
    report
        .input("s", format!("{s}"))
        .quantity("content", content)
        .quantity("content_refined", refined)
        .quantity("capacity", solution.capacity)
        .quantity("content_to_capacity_ratio", ratio)
        .check(Check::lt("content_is_finite", content, f64::INFINITY))
        .check(Check::gt("content_is_positive", content, 0.0))
        .check(Check::le(
            "refinement_within_factor_two",
            content,
            2.0 * refined,
        ))
        .check(Check::le("refinement_monotone", refined, content))
        .check(Check::lt("ratio_is_finite", ratio, f64::INFINITY));
    Ok(report)
}
