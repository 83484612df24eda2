//! Gradient bounds on the curves separating the surviving balls of a
//! modification run.
//!
//! Each surviving ball gets its curve from the alpha rule. A ball carrying
//! its own boundary (case 1) must have equilibrium mass consistent with the
//! sampled outer gradient, `inf |grad g| * r <= mass <= sup |grad g| * r`,
//! and a bounded sup/inf ratio. A ball wrapped in a level curve (case 2)
//! must keep `|grad g|` on the curve within a fixed multiple of
//! `m^2 log(1/side)`, enclose the alpha-disc, stay within radius
//! `mu * alpha`, and be star-shaped about the ball center.

use std::f64::consts::TAU;

use crate::error::Result;
use crate::geometry::{Disc, DyadicSquare, Point};
use crate::green::GreenField;
use crate::pipeline::{
    alpha_and_curve, boundary_gradient_samples, ModificationTrace, SigmaCurve,
};
use crate::verify::report::{Check, VerificationReport};

/// Rays used for the star-shape test in case 2.
const RAYS: usize = 360;
/// Allowed sup/inf spread of the boundary gradient in case 1.
const RATIO_CAP: f64 = 50.0;
/// Allowed `|grad g| / (m^2 log(1/side))` on a case-2 curve.
const NORMALIZED_CAP: f64 = 4.0;

/// Check the gradient bounds on every surviving ball of a finished run.
pub fn check_gradient_bound(trace: &ModificationTrace) -> Result<VerificationReport> {
    let field = GreenField::new(trace.final_solution.clone());
    let mut report = VerificationReport::new("gradient_bound");
    report
        .input("m", format!("{}", trace.params.m))
        .input("mu", format!("{}", trace.params.mu));

    let mut balls: Vec<(String, Disc, DyadicSquare)> = Vec::new();
    for &n in &trace.surviving_steps {
        let step = &trace.steps[n - 1];
        balls.push((step.id.as_str().to_owned(), step.disc, step.square));
    }
    for &j in &trace.surviving_seeds {
        let seed = &trace.first_stage[j - 1];
        balls.push((seed.id.as_str().to_owned(), seed.disc, seed.square));
    }
    report
        .quantity("balls_checked", balls.len() as f64)
        .check(Check::ge("at_least_one_ball", balls.len() as f64, 1.0));

    for (id, disc, square) in &balls {
        let dec = alpha_and_curve(&field, disc, square, trace.params.m, trace.params.mu)?;
        report
            .quantity(format!("{id}.alpha"), dec.alpha)
            .quantity(format!("{id}.case"), dec.case as f64)
            .quantity(format!("{id}.mass"), dec.ball_mass);
        match &dec.curve {
            SigmaCurve::Boundary(_) => {
                let samples = boundary_gradient_samples(&field, disc)?;
                let sup = samples.iter().fold(f64::NEG_INFINITY, |m, s| m.max(s.1));
                let inf = samples.iter().fold(f64::INFINITY, |m, s| m.min(s.1));
                report
                    .quantity(format!("{id}.grad_sup"), sup)
                    .quantity(format!("{id}.grad_inf"), inf)
                    .check(Check::ge(
                        format!("{id}.mass_above_inf_gradient_flux"),
                        dec.ball_mass,
                        inf * disc.radius * (1.0 - 1e-3),
                    ))
                    .check(Check::le(
                        format!("{id}.mass_below_sup_gradient_flux"),
                        dec.ball_mass,
                        sup * disc.radius * (1.0 + 1e-3),
                    ))
                    .check(Check::le(
                        format!("{id}.gradient_ratio"),
                        sup / inf,
                        RATIO_CAP,
                    ));
            }
            SigmaCurve::Level(curve) => {
                let mut max_grad = 0.0f64;
                for p in &curve.points {
                    max_grad = max_grad.max(field.grad_norm(*p)?);
                }
                let ell = square.side();
                let normalized =
                    max_grad / (trace.params.m * trace.params.m * (1.0 / ell).ln());
                let mut bad_rays = 0usize;
                for k in 0..RAYS {
                    let th = TAU * (k as f64 + 0.37) / RAYS as f64;
                    let dir = Point::new(th.cos(), th.sin());
                    if ray_crossings(&curve.points, disc.center, dir) != 1 {
                        bad_rays += 1;
                    }
                }
                report
                    .quantity(format!("{id}.max_grad"), max_grad)
                    .quantity(format!("{id}.normalized_gradient"), normalized)
                    .quantity(format!("{id}.min_radius"), dec.min_radius)
                    .quantity(format!("{id}.max_radius"), dec.max_radius)
                    .check(Check::le(
                        format!("{id}.gradient_within_normalized_cap"),
                        normalized,
                        NORMALIZED_CAP,
                    ))
                    .check(Check::ge(
                        format!("{id}.curve_encloses_alpha_disc"),
                        dec.min_radius,
                        dec.alpha * (1.0 - 1e-6),
                    ))
                    .check(Check::le(
                        format!("{id}.curve_within_mu_alpha"),
                        dec.max_radius,
                        trace.params.mu * dec.alpha,
                    ))
                    .check(Check::eq(
                        format!("{id}.rays_crossing_once"),
                        (RAYS - bad_rays) as f64,
                        RAYS as f64,
                    ));
            }
        }
    }
    Ok(report)
}

/// Number of times the open ray `center + t dir, t > 0` crosses the closed
/// polygon.
fn ray_crossings(points: &[Point], center: Point, dir: Point) -> usize {
    let cross = |p: Point, q: Point| p.x * q.y - p.y * q.x;
    let mut count = 0;
    for k in 0..points.len() {
        let a = points[k];
        let b = points[(k + 1) % points.len()];
        let e = b - a;
        let denom = cross(e, dir);
        if denom == 0.0 {
            continue;
        }
        let w = center - a;
        let t = cross(w, dir) / denom;
        let u = cross(w, e) / denom;
        if (0.0..1.0).contains(&t) && u > 0.0 {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CompactScene, Component, ComponentId, Shape};
    use crate::pipeline::{modify_domain, PipelineParams};
    use crate::potential::SolverConfig;

    fn disc_component(id: &str, x: f64, y: f64, r: f64) -> Component {
        Component {
            id: ComponentId::new(id),
            shape: Shape::Disc(Disc::new(Point::new(x, y), r)),
        }
    }

    #[test]
    fn a_tiny_surviving_ball_passes_the_level_curve_bounds() {
        // collapses to one small disc carrying all the mass: case 2, where
        // the radial field makes |grad g| ~ mass / alpha on the curve
        let scene =
            CompactScene::new(vec![disc_component("a", 1.0 / 32.0, 1.0 / 32.0, 0.02)]).unwrap();
        let trace = modify_domain(&scene, &PipelineParams::default()).unwrap();
        let report = check_gradient_bound(&trace).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures());
        assert_eq!(report.quantities["B1.case"], 2.0);
        let normalized = report.quantities["B1.normalized_gradient"];
        assert!((0.5..=1.5).contains(&normalized), "normalized {normalized}");
    }

    #[test]
    fn quarter_mass_balls_take_their_own_boundary_and_balance_the_flux() {
        let r = 0.03;
        let scene = CompactScene::new(vec![
            disc_component("ne", 0.25, 0.25, r),
            disc_component("nw", -0.25, 0.25, r),
            disc_component("sw", -0.25, -0.25, r),
            disc_component("se", 0.25, -0.25, r),
        ])
        .unwrap();
        let params = PipelineParams {
            solver: SolverConfig::with_nodes(192),
            ..PipelineParams::default()
        };
        let trace = modify_domain(&scene, &params).unwrap();
        let report = check_gradient_bound(&trace).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures());
        assert_eq!(report.quantities["balls_checked"], 4.0);
        for id in ["b1", "b2", "b3", "b4"] {
            assert_eq!(report.quantities[&format!("{id}.case")], 1.0);
            let ratio = report.quantities[&format!("{id}.grad_sup")]
                / report.quantities[&format!("{id}.grad_inf")];
            assert!(ratio < 2.0, "{id} gradient ratio {ratio}");
        }
    }

    #[test]
    fn ray_crossing_counts_are_exact_on_a_square_polygon() {
        let square = vec![
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0),
            Point::new(-1.0, -1.0),
            Point::new(1.0, -1.0),
        ];
        let inside = Point::new(0.1, -0.2);
        for k in 0..64 {
            let th = TAU * (k as f64 + 0.5) / 64.0;
            let dir = Point::new(th.cos(), th.sin());
            assert_eq!(ray_crossings(&square, inside, dir), 1);
        }
        let outside = Point::new(3.0, 0.0);
        assert_eq!(ray_crossings(&square, outside, Point::new(1.0, 0.0)), 0);
        assert_eq!(ray_crossings(&square, outside, Point::new(-1.0, 0.0)), 2);
    }
}
