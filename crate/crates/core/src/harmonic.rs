//! Harmonic measure at infinity and bounded-domain references.
//!
//! For the exterior of a compact scene, harmonic measure at infinity is the
//! equilibrium measure, so measuring a boundary portion reduces to summing
//! node weights. The selectors pick that portion by component, by ball, or
//! by angular sector. Two analytic references accompany the solver: the
//! Green function of a round disc, and the harmonic measure of the inner
//! circle in a round annulus, the latter also solved numerically by
//! two-circle collocation as an independent cross-check.

use crate::error::{Error, Result};
use crate::geometry::{ComponentId, Disc, Point, Rect, Shape};
use crate::potential::{assemble_kernel, BoundaryMesh, EquilibriumSolution, MeshComponentInfo, MeshNode};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Which part of the scene boundary to measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySelector {
    /// The named components' entire boundaries.
    Components { ids: Vec<ComponentId> },
    /// Boundary nodes strictly inside the open ball.
    Ball { cx: f64, cy: f64, r: f64 },
    /// Boundary nodes whose angle around `(cx, cy)` lies in the half-open
    /// arc `[theta0, theta1)`; `theta1 - theta0 >= 2 pi` selects everything.
    Sector {
        cx: f64,
        cy: f64,
        theta0: f64,
        theta1: f64,
    },
}

/// Harmonic measure at infinity of the selected boundary portion: the
/// equilibrium mass it carries.
pub fn harmonic_measure(
    solution: &EquilibriumSolution,
    selector: &BoundarySelector,
) -> Result<f64> {
    match selector {
        BoundarySelector::Components { ids } => {
            if ids.is_empty() {
                return Err(Error::BadSelector("empty component list".into()));
            }
            let mut total = 0.0;
            for id in ids {
                total += solution.component_mass_by_id(id).ok_or_else(|| {
                    Error::BadSelector(format!("unknown component {:?}", id.as_str()))
                })?;
            }
            Ok(total)
        }
        BoundarySelector::Ball { cx, cy, r } => {
            if !(r.is_finite() && *r > 0.0) || !cx.is_finite() || !cy.is_finite() {
                return Err(Error::BadSelector(format!("bad ball ({cx}, {cy}, {r})")));
            }
            Ok(measure_ball(solution, &Disc::new(Point::new(*cx, *cy), *r)))
        }
        BoundarySelector::Sector {
            cx,
            cy,
            theta0,
            theta1,
        } => {
            if ![*cx, *cy, *theta0, *theta1].iter().all(|v| v.is_finite()) {
                return Err(Error::BadSelector("non-finite sector".into()));
            }
            let span_raw = theta1 - theta0;
            let span = if span_raw >= std::f64::consts::TAU {
                std::f64::consts::TAU
            } else if span_raw <= 0.0 {
                span_raw.rem_euclid(std::f64::consts::TAU)
            } else {
                span_raw
            };
            let center = Point::new(*cx, *cy);
            let mut total = 0.0;
            for (node, &w) in solution.mesh.nodes.iter().zip(&solution.weights) {
                let d = node.position - center;
                if d.norm() == 0.0 {
                    continue;
                }
                let phi = d.y.atan2(d.x);
                if (phi - theta0).rem_euclid(std::f64::consts::TAU) < span {
                    total += w;
                }
            }
            Ok(total)
        }
    }
}

/// Equilibrium mass strictly inside the open ball.
pub fn measure_ball(solution: &EquilibriumSolution, ball: &Disc) -> f64 {
    solution
        .mesh
        .nodes
        .iter()
        .zip(&solution.weights)
        .filter(|(n, _)| n.position.dist(ball.center) < ball.radius)
        .map(|(_, w)| w)
        .sum()
}

/// Green function of the round disc `|z| < R` with pole at `pole`:
/// `g(z) = log |R^2 - z conj(pole)| - log(R |z - pole|)`.
pub fn disc_green_reference(radius: f64, pole: Point, z: Point) -> Result<f64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::NonFinite {
            context: "reference disc radius",
        });
    }
    if pole.norm() >= radius {
        return Err(Error::OutsideReferenceDisc { radius });
    }
    if z.norm() >= radius {
        return Err(Error::OutsideReferenceDisc { radius });
    }
    let zc = z.to_complex();
    let pc = pole.to_complex();
    let dist = (zc - pc).norm();
    if dist < 1e-14 * radius {
        return Err(Error::PoleCollision);
    }
    let numerator = (radius * radius - zc * pc.conj()).norm();
    Ok((numerator / (radius * dist)).ln())
}

/// Harmonic measure of the inner boundary in the round annulus
/// `cap < |z| < R`, phrased through the Robin constant `gamma_b` of the
/// inner set: `omega(z) = log(R/|z|) / (log R + gamma_b)`.
///
/// Exact when the inner set is the concentric disc of capacity
/// `exp(-gamma_b)`; for other inner sets it is the leading large-`R`
/// asymptotic.
pub fn annulus_measure_reference(outer_radius: f64, gamma_b: f64, at_radius: f64) -> Result<f64> {
    let inner = (-gamma_b).exp();
    if !(outer_radius > inner) {
        return Err(Error::OutsideAnnulus {
            radius: at_radius,
            inner,
            outer: outer_radius,
        });
    }
    if !(at_radius >= inner && at_radius <= outer_radius) {
        return Err(Error::OutsideAnnulus {
            radius: at_radius,
            inner,
            outer: outer_radius,
        });
    }
    Ok((outer_radius / at_radius).ln() / (outer_radius.ln() + gamma_b))
}

/// Solve the annulus Dirichlet problem (1 on the inner circle, 0 on the
/// outer) by single-layer collocation on both circles and evaluate at
/// radius `at_radius`. Independent of `annulus_measure_reference` except
/// for sharing the kernel diagonal; by the circulant symmetry of the
/// concentric geometry the discrete solution is exact up to the diagonal
/// approximation.
pub fn annulus_measure_solved(
    outer_radius: f64,
    inner_radius: f64,
    nodes: usize,
    at_radius: f64,
) -> Result<f64> {
    if !(inner_radius > 0.0 && outer_radius > inner_radius) {
        return Err(Error::OutsideAnnulus {
            radius: at_radius,
            inner: inner_radius,
            outer: outer_radius,
        });
    }
    if !(at_radius > inner_radius && at_radius < outer_radius) {
        return Err(Error::OutsideAnnulus {
            radius: at_radius,
            inner: inner_radius,
            outer: outer_radius,
        });
    }
    if nodes < 16 {
        return Err(Error::MeshTooSmall(nodes));
    }

    let half = nodes / 2;
    let mesh = two_circle_mesh(inner_radius, outer_radius, half);
    let k = assemble_kernel(&mesh)?;
    // boundary data: 1 on the inner circle, 0 on the outer
    let mut b = DVector::zeros(mesh.len());
    for i in 0..half {
        b[i] = 1.0;
    }
    let q = k.lu().solve(&b).ok_or(Error::SingularKernel)?;

    let z = Point::new(at_radius, 0.0);
    let mut u = 0.0;
    for (node, &qa) in mesh.nodes.iter().zip(q.iter()) {
        u -= qa * z.dist(node.position).ln();
    }
    Ok(u)
}

fn two_circle_mesh(inner_radius: f64, outer_radius: f64, per_circle: usize) -> BoundaryMesh {
    let mut nodes = Vec::with_capacity(2 * per_circle);
    let mut components = Vec::new();
    for (ci, radius) in [inner_radius, outer_radius].into_iter().enumerate() {
        let start = nodes.len();
        let h = 2.0 * radius * (std::f64::consts::PI / per_circle as f64).sin();
        let ds = std::f64::consts::TAU * radius / per_circle as f64;
        for k in 0..per_circle {
            let th = std::f64::consts::TAU * k as f64 / per_circle as f64;
            nodes.push(MeshNode {
                position: Point::new(radius * th.cos(), radius * th.sin()),
                ds,
                h,
                component: ci,
            });
        }
        components.push(MeshComponentInfo {
            id: ComponentId::new(if ci == 0 { "inner" } else { "outer" }),
            base: Shape::Disc(Disc::new(Point::new(0.0, 0.0), radius)),
            window: None::<Rect>,
            boundary_len: std::f64::consts::TAU * radius,
            node_range: start..nodes.len(),
        });
    }
    BoundaryMesh { nodes, components }
}
