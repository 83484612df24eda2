//! The separating curve attached to a constructed ball: either the ball's
//! own boundary (when the ball is large relative to its equilibrium mass)
//! or a level curve of the Green function just outside it.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{Disc, DyadicSquare, Point, Shape};
use crate::green::{trace_level_curve, GreenField, LevelCurve};

/// Angular resolution used to locate the supremum of `g` on the circle of
/// radius `alpha` in case 2.
const SUP_ANGLES: usize = 4096;

/// The curve that separates one ball from the rest of the scene.
#[derive(Clone, Debug)]
pub enum SigmaCurve {
    /// Case 1: the ball's own boundary circle.
    Boundary(Disc),
    /// Case 2: a traced level curve of `g` enclosing the ball.
    Level(LevelCurve),
}

/// Outcome of the radius/curve selection for one ball.
#[derive(Clone, Debug)]
pub struct AlphaDecision {
    pub disc: Disc,
    pub square: DyadicSquare,
    /// Equilibrium mass carried by the ball's boundary.
    pub ball_mass: f64,
    /// `max(mass / (m^2 log(1/side)), 2 radius)`.
    pub alpha: f64,
    /// 1 when `alpha` equals twice the radius, else 2.
    pub case: u8,
    /// The level of the traced curve (case 2 only).
    pub level: Option<f64>,
    pub curve: SigmaCurve,
    pub mu: f64,
    /// Distance from the ball center to the nearest curve point.
    pub min_radius: f64,
    /// Distance from the ball center to the farthest curve point.
    pub max_radius: f64,
    /// Case 2: whether the curve stays within radius `mu * alpha`.
    pub within_mu_alpha: Option<bool>,
}

/// Pick `alpha` and the separating curve for the ball `disc` built in
/// `square`, against the Green field of the final scene.
///
/// Case 1 (`alpha = 2 radius`): the curve is the ball boundary. Case 2: the
/// level is the supremum of `g` over the circle of radius `alpha` about the
/// ball center, and the curve is the level curve traced from the argmax.
pub fn alpha_and_curve(
    field: &GreenField,
    disc: &Disc,
    square: &DyadicSquare,
    m: f64,
    mu: f64,
) -> Result<AlphaDecision> {
    let ell = square.side();
    if ell >= 1.0 {
        return Err(Error::BadVerificationInput(format!(
            "square side {ell} needs log(1/side) > 0"
        )));
    }
    if !(m > 0.0) || !(mu >= 1.0) {
        return Err(Error::BadVerificationInput(format!(
            "need m > 0 and mu >= 1, got m = {m}, mu = {mu}"
        )));
    }
    let ball_mass = mass_of_disc(field, disc)?;
    let from_mass = ball_mass / (m * m * (1.0 / ell).ln());
    let alpha = from_mass.max(2.0 * disc.radius);

    if alpha == 2.0 * disc.radius {
        return Ok(AlphaDecision {
            disc: *disc,
            square: *square,
            ball_mass,
            alpha,
            case: 1,
            level: None,
            curve: SigmaCurve::Boundary(*disc),
            mu,
            min_radius: disc.radius,
            max_radius: disc.radius,
            within_mu_alpha: None,
        });
    }

    // case 2: sup of g over the alpha-circle, then the level curve through
    // the maximizing point
    let mut best: Option<(f64, Point)> = None;
    for k in 0..SUP_ANGLES {
        let th = TAU * k as f64 / SUP_ANGLES as f64;
        let p = Point::new(
            disc.center.x + alpha * th.cos(),
            disc.center.y + alpha * th.sin(),
        );
        // points falling inside another component are simply not part of
        // the search domain
        if let Ok(g) = field.green_at(p) {
            if best.map_or(true, |(b, _)| g > b) {
                best = Some((g, p));
            }
        }
    }
    let (level, seed) = best.ok_or_else(|| {
        Error::BadVerificationInput(format!(
            "alpha circle of radius {alpha} is entirely inside the scene"
        ))
    })?;
    let curve = trace_level_curve(field, level, seed)?;
    let (mut min_r, mut max_r) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &curve.points {
        let d = p.dist(disc.center);
        min_r = min_r.min(d);
        max_r = max_r.max(d);
    }
    Ok(AlphaDecision {
        disc: *disc,
        square: *square,
        ball_mass,
        alpha,
        case: 2,
        level: Some(level),
        curve: SigmaCurve::Level(curve),
        mu,
        min_radius: min_r,
        max_radius: max_r,
        within_mu_alpha: Some(max_r <= mu * alpha),
    })
}

/// Outward gradient magnitude of `g` sampled at the gap midpoints of a
/// ball's boundary mesh.
///
/// The discrete field evaluated on the circle gives the principal value,
/// the average of the inner (zero) and outer gradients; adding the jump
/// `pi * density` along the outward normal recovers the outer gradient.
/// Returns `(midpoint, |grad g| just outside)` pairs.
pub fn boundary_gradient_samples(
    field: &GreenField,
    disc: &Disc,
) -> Result<Vec<(Point, f64)>> {
    let solution = field.solution();
    let idx = find_disc_component(field, disc)?;
    let info = &solution.mesh.components[idx];
    let range = info.node_range.clone();
    // angle-sorted node indices; all nodes must sit on the circle itself
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(range.len());
    for a in range {
        let pos = solution.mesh.nodes[a].position;
        let d = pos.dist(disc.center);
        if (d - disc.radius).abs() > 1e-9 * disc.radius.max(1e-300) {
            return Err(Error::BadVerificationInput(format!(
                "component {:?} is clipped: node off its circle",
                info.id.as_str()
            )));
        }
        let th = (pos.y - disc.center.y).atan2(pos.x - disc.center.x);
        order.push((th, a));
    }
    if order.len() < 3 {
        return Err(Error::MeshTooSmall(order.len()));
    }
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut out = Vec::with_capacity(order.len());
    for k in 0..order.len() {
        let (th0, a) = order[k];
        let (th1, b) = order[(k + 1) % order.len()];
        let gap = (th1 - th0).rem_euclid(TAU);
        let th = th0 + 0.5 * gap;
        let mid = Point::new(
            disc.center.x + disc.radius * th.cos(),
            disc.center.y + disc.radius * th.sin(),
        );
        let pv = principal_value_grad(solution, mid);
        let density = (solution.weights[a] + solution.weights[b])
            / (solution.mesh.nodes[a].ds + solution.mesh.nodes[b].ds);
        let jump = std::f64::consts::PI * density;
        let outward = Point::new(
            pv.x + jump * th.cos(),
            pv.y + jump * th.sin(),
        );
        out.push((mid, outward.norm()));
    }
    Ok(out)
}

/// Gradient of the discrete potential as a raw sum over nodes. On a
/// boundary point this is the principal value — the mean of the inner and
/// outer limits — which the guarded field evaluation would reject as
/// sitting inside the component.
fn principal_value_grad(
    solution: &crate::potential::EquilibriumSolution,
    p: Point,
) -> Point {
    let mut g = Point::new(0.0, 0.0);
    for (node, w) in solution.mesh.nodes.iter().zip(&solution.weights) {
        let d = p - node.position;
        let r2 = d.x * d.x + d.y * d.y;
        g = g + d * (w / r2);
    }
    g
}

/// Equilibrium mass carried by the mesh component whose base is `disc`.
fn mass_of_disc(field: &GreenField, disc: &Disc) -> Result<f64> {
    let idx = find_disc_component(field, disc)?;
    Ok(field.solution().component_mass(idx))
}

/// Index of the mesh component whose base shape is `disc`.
fn find_disc_component(field: &GreenField, disc: &Disc) -> Result<usize> {
    let tol = 1e-9 * disc.radius.max(1e-300);
    field
        .solution()
        .mesh
        .components
        .iter()
        .position(|c| match &c.base {
            Shape::Disc(d) => {
                d.center.dist(disc.center) <= tol && (d.radius - disc.radius).abs() <= tol
            }
            Shape::Rect(_) => false,
        })
        .ok_or_else(|| {
            Error::BadVerificationInput(format!(
                "no mesh component matches the disc at ({}, {}) radius {}",
                disc.center.x, disc.center.y, disc.radius
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Clipped, CompactScene, Component, ComponentId};
    use crate::potential::{solve_equilibrium, SolverConfig};
    use approx::assert_relative_eq;

    fn single_disc_field(r: f64) -> (GreenField, Disc) {
        let center = Point::new(1.0 / 32.0, 1.0 / 32.0);
        let disc = Disc::new(center, r);
        let scene = CompactScene::new(vec![Component {
            id: ComponentId::new("B"),
            shape: Shape::Disc(disc),
        }])
        .unwrap();
        let sol =
            solve_equilibrium(&Clipped::from_scene(&scene), &SolverConfig::with_nodes(256))
                .unwrap();
        (GreenField::new(sol), disc)
    }

    fn seed_square() -> DyadicSquare {
        DyadicSquare { scale: 4, i: 0, j: 0 }
    }

    #[test]
    fn large_balls_take_their_own_boundary() {
        // mass 1, m = 8, side 1/16: mass / (64 log 16) ~ 0.0056 < 2r
        let (field, disc) = single_disc_field(0.01);
        let d = alpha_and_curve(&field, &disc, &seed_square(), 8.0, 16.0).unwrap();
        assert_eq!(d.case, 1);
        assert_relative_eq!(d.alpha, 0.02);
        assert_relative_eq!(d.ball_mass, 1.0, epsilon = 1e-12);
        assert!(matches!(d.curve, SigmaCurve::Boundary(_)));
        assert_eq!(d.level, None);
        assert_relative_eq!(d.max_radius, 0.01);
    }

    #[test]
    fn small_balls_get_an_enclosing_level_curve() {
        let (field, disc) = single_disc_field(0.001);
        let d = alpha_and_curve(&field, &disc, &seed_square(), 8.0, 16.0).unwrap();
        assert_eq!(d.case, 2);
        let expect_alpha = 1.0 / (64.0 * 16f64.ln());
        assert_relative_eq!(d.alpha, expect_alpha, max_relative = 1e-10);
        // the single-disc field is radial, so the level curve through the
        // sup point is the alpha-circle itself
        assert_relative_eq!(d.min_radius, d.alpha, max_relative = 1e-4);
        assert_relative_eq!(d.max_radius, d.alpha, max_relative = 1e-4);
        assert_eq!(d.within_mu_alpha, Some(true));
        let level = d.level.unwrap();
        assert_relative_eq!(level, (d.alpha / 0.001).ln(), max_relative = 1e-6);
        match &d.curve {
            SigmaCurve::Level(c) => assert!(c.encloses(disc.center)),
            SigmaCurve::Boundary(_) => panic!("expected a level curve"),
        }
    }

    #[test]
    fn boundary_samples_recover_the_outer_gradient_of_a_disc() {
        // one disc of mass 1: |grad g| = 1/r everywhere on the boundary
        let (field, disc) = single_disc_field(0.01);
        let samples = boundary_gradient_samples(&field, &disc).unwrap();
        assert_eq!(samples.len(), 256);
        for (p, grad) in samples {
            assert_relative_eq!(p.dist(disc.center), 0.01, max_relative = 1e-12);
            assert_relative_eq!(grad, 100.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn unknown_discs_are_rejected() {
        let (field, _) = single_disc_field(0.01);
        let other = Disc::new(Point::new(0.4, 0.4), 0.01);
        assert!(matches!(
            alpha_and_curve(&field, &other, &seed_square(), 8.0, 16.0),
            Err(Error::BadVerificationInput(_))
        ));
        assert!(matches!(
            boundary_gradient_samples(&field, &other),
            Err(Error::BadVerificationInput(_))
        ));
    }
}
