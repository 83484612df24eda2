//! The flux identity tying the boundary integral of `log |grad g|` to the
//! saddle values, the curve levels, and the Robin constant.
//!
//! With one low level curve around each component (low enough that each
//! curve encloses exactly its own component), the argument principle applied
//! to `log |grad g|` in the domain outside the curves gives
//!
//! ```text
//! (1/2pi) int_Gamma log|grad g| (dg/dn) ds
//!     = sum_saddles g(xi) - sum_curves level_j + robin
//! ```
//!
//! where the saddle sum runs over critical points outside every curve,
//! counted with multiplicity, and there are exactly `N - 1` of them for `N`
//! non-nested curves.

use std::f64::consts::{LN_2, TAU};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::green::{
    find_critical_points, find_level_seed, trace_level_curve, GreenField, LevelCurve,
};
use crate::verify::report::{Check, VerificationReport};

const MAX_HALVINGS: usize = 60;

/// One level curve around each scene component, each enclosing exactly its
/// own component, pairwise non-nested.
///
/// The level for component `j` starts at the field value midway to the
/// nearest other component and is halved until the traced curve separates
/// `j` from everything else.
pub fn separating_curves(field: &GreenField) -> Result<Vec<LevelCurve>> {
    let ncomp = field.solution().mesh.components.len();
    let mut curves = Vec::with_capacity(ncomp);
    for j in 0..ncomp {
        curves.push(separating_curve(field, j)?);
    }
    for (a, ca) in curves.iter().enumerate() {
        for cb in &curves[a + 1..] {
            if ca.encloses(cb.points[0]) || cb.encloses(ca.points[0]) {
                return Err(Error::BadVerificationInput(
                    "separating level curves are nested".into(),
                ));
            }
        }
    }
    Ok(curves)
}

fn separating_curve(field: &GreenField, j: usize) -> Result<LevelCurve> {
    let sol = field.solution();
    let nodes = sol.mesh.component_nodes(j);
    let inv = 1.0 / nodes.len() as f64;
    let anchor = nodes
        .iter()
        .fold(Point::new(0.0, 0.0), |acc, n| acc + n.position * inv);

    // starting level: field value midway to the nearest foreign boundary
    // point; ray direction: away from that point
    let mut nearest: Option<(f64, Point, Point)> = None;
    for a in nodes {
        for b in sol.mesh.nodes.iter().filter(|b| b.component != j) {
            let d = a.position.dist(b.position);
            if nearest.map_or(true, |(best, _, _)| d < best) {
                nearest = Some((d, a.position, b.position));
            }
        }
    }
    let (mut level, dir) = match nearest {
        Some((_, a, b)) => {
            let mid = (a + b) * 0.5;
            let away = anchor - b;
            let dir = if away.norm() > 0.0 {
                away
            } else {
                Point::new(1.0, 0.0)
            };
            (field.green_at(mid).unwrap_or(1.0), dir)
        }
        None => {
            let probe = anchor + Point::new(2.0 * field.scale(), 0.0);
            (field.green_at(probe).unwrap_or(1.0), Point::new(1.0, 0.0))
        }
    };
    for _ in 0..MAX_HALVINGS {
        let attempt = find_level_seed(field, level, anchor, dir)
            .and_then(|seed| trace_level_curve(field, level, seed));
        match attempt {
            Ok(curve) if curve.enclosed == [j] => return Ok(curve),
            _ => level *= 0.5,
        }
    }
    Err(Error::BadVerificationInput(format!(
        "no level curve separates component {j} from the rest of the scene"
    )))
}

/// Gauss-Legendre nodes and weights, 5 points on `[-1, 1]`.
const GAUSS: [(f64, f64); 5] = [
    (-0.906179845938664, 0.23692688505618908),
    (-0.5384693101056831, 0.47862867049936647),
    (0.0, 0.5688888888888889),
    (0.5384693101056831, 0.47862867049936647),
    (0.906179845938664, 0.23692688505618908),
];

/// `(1/2pi) \oint log|grad g| (dg/dn) ds` along the level set the polygon
/// approximates.
///
/// The chords of the traced polygon sag inside the true level curve by
/// `O(h^2)`, which shifts `log |grad g|` systematically; the integrand
/// therefore carries the first-order transplant correction
/// `-(g - level) (grad log|grad g| . grad g) / |grad g|`, which cancels the
/// sag and leaves an `O(h^4)`-accurate level-set integral.
fn level_log_flux(field: &GreenField, curve: &LevelCurve) -> Result<f64> {
    let pts = &curve.points;
    let n = pts.len();
    let mut total = 0.0;
    for k in 0..n {
        let a = pts[k];
        let b = pts[(k + 1) % n];
        let e = b - a;
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        // outward normal of a counterclockwise polygon
        let nrm = Point::new(e.y / len, -e.x / len);
        let mid = (a + b) * 0.5;
        let mut seg = 0.0;
        for (t, w) in GAUSS {
            let p = mid + e * (0.5 * t);
            let grad = field.grad(p)?;
            let gn = grad.norm();
            let du = field.grad_log_grad(p)?;
            let sag = field.green_at(p)? - curve.level;
            let flux = grad.x * nrm.x + grad.y * nrm.y;
            seg += w * (gn.ln() * flux - sag * (du.x * grad.x + du.y * grad.y) / gn);
        }
        total += seg * 0.5 * len;
    }
    Ok(total / TAU)
}

/// Check the flux identity on a field: trace separating curves, integrate
/// `log |grad g|` against the harmonic flux along them, and compare with the
/// saddle values minus the levels plus the Robin constant.
///
/// The identity holds exactly for the discretized field, so the residual
/// tolerance reflects curve tracing and quadrature, not mesh resolution:
/// `1e-6` for a single component, `1e-2` for several. When every curve
/// stays inside the unit disc the flux integral must also stay above
/// `-log 2`.
pub fn check_level_log_identity(field: &GreenField) -> Result<VerificationReport> {
    let curves = separating_curves(field)?;
    let mut lhs = 0.0;
    let mut level_sum = 0.0;
    for curve in &curves {
        lhs += level_log_flux(field, curve)?;
        level_sum += curve.level;
    }

    let mut outside = 0usize;
    let mut saddle_sum = 0.0;
    for saddle in find_critical_points(field)? {
        if curves.iter().any(|c| c.encloses(saddle.position)) {
            continue;
        }
        outside += saddle.multiplicity;
        saddle_sum += saddle.value * saddle.multiplicity as f64;
    }

    let rhs = saddle_sum - level_sum + field.robin();
    let n = curves.len();
    let tol = if n == 1 { 1e-6 } else { 1e-2 };

    let mut report = VerificationReport::new("level_log_identity");
    report
        .input("components", format!("{n}"))
        .quantity("lhs_flux_integral", lhs)
        .quantity("rhs_saddles_levels_robin", rhs)
        .quantity("residual", (lhs - rhs).abs())
        .quantity("robin", field.robin())
        .quantity("level_sum", level_sum)
        .quantity("saddle_value_sum", saddle_sum)
        .quantity("saddles_outside", outside as f64)
        .check(Check::approx("identity_residual", lhs, rhs, tol))
        .check(Check::eq(
            "saddles_outside_curves",
            outside as f64,
            (n - 1) as f64,
        ));
    if curves
        .iter()
        .flat_map(|c| c.points.iter())
        .all(|p| p.norm() < 1.0)
    {
        report.check(Check::gt("flux_integral_above_minus_log_two", lhs, -LN_2));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Clipped, CompactScene, Component, ComponentId, Disc, Shape};
    use crate::potential::{solve_equilibrium, SolverConfig};

    fn field_of(discs: &[(f64, f64, f64)], nodes: usize) -> GreenField {
        let comps = discs
            .iter()
            .enumerate()
            .map(|(k, &(x, y, r))| Component {
                id: ComponentId::new(format!("d{k}")),
                shape: Shape::Disc(Disc::new(Point::new(x, y), r)),
            })
            .collect();
        let scene = CompactScene::new(comps).unwrap();
        let sol = solve_equilibrium(
            &Clipped::from_scene(&scene),
            &SolverConfig::with_nodes(nodes),
        )
        .unwrap();
        GreenField::new(sol)
    }

    #[test]
    fn a_single_disc_closes_the_identity_to_quadrature_accuracy() {
        let field = field_of(&[(0.0, 0.0, 0.3)], 128);
        let report = check_level_log_identity(&field).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures());
        assert!(report.quantities["residual"] < 1e-6);
        assert_eq!(report.quantities["saddles_outside"], 0.0);
    }

    #[test]
    fn two_discs_balance_the_saddle_against_the_levels() {
        let field = field_of(&[(-0.25, 0.0, 0.1), (0.25, 0.0, 0.1)], 96);
        let report = check_level_log_identity(&field).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures());
        assert_eq!(report.quantities["saddles_outside"], 1.0);
        assert!(report.quantities["lhs_flux_integral"] > -LN_2);
    }

    #[test]
    fn separating_curves_enclose_their_own_component_only() {
        let field = field_of(
            &[(-0.2, 0.1, 0.06), (0.2, -0.1, 0.08), (0.0, -0.25, 0.05)],
            64,
        );
        let curves = separating_curves(&field).unwrap();
        assert_eq!(curves.len(), 3);
        for (j, curve) in curves.iter().enumerate() {
            assert_eq!(curve.enclosed, vec![j]);
            assert!(curve.level > 0.0);
        }
    }
}
