use super::{GreenField, LevelCurve};
use crate::error::{Error, Result};
use crate::geometry::Point;

/// A closed integration contour: an exact circle or a polygon (typically a
/// traced level curve). Orientation is counterclockwise.
#[derive(Clone, Debug)]
pub enum Contour {
    Circle { center: Point, radius: f64 },
    Polygon { points: Vec<Point> },
}

impl Contour {
    pub fn from_level_curve(curve: &LevelCurve) -> Contour {
        Contour::Polygon {
            points: curve.points.clone(),
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Contour::Circle { radius, .. } => std::f64::consts::TAU * radius,
            Contour::Polygon { points } => {
                let n = points.len();
                (0..n).map(|i| points[i].dist(points[(i + 1) % n])).sum()
            }
        }
    }
}

/// Outward flux of the gradient through the contour, normalized:
/// `(1/2pi) \oint grad g . n ds`. Equals the equilibrium mass enclosed.
pub fn contour_flux(field: &GreenField, contour: &Contour) -> Result<f64> {
    integrate(field, contour, 1e-10, &|field, p, tangent| {
        let grad = field.grad(p)?;
        let n = outward_normal(tangent);
        Ok((grad.x * n.x + grad.y * n.y) / std::f64::consts::TAU)
    })
}

/// The two halves of `(1/2pi) \oint log|grad g| (grad g . n) ds`, split by
/// the sign of the logarithm: returns `(plus, minus)` with
/// `total = plus - minus`, both halves having nonnegative integrands on a
/// level curve. Errors if `|grad g|` collapses on the contour.
pub fn log_grad_flux(field: &GreenField, contour: &Contour) -> Result<(f64, f64)> {
    let plus = integrate(field, contour, 1e-10, &|field, p, tangent| {
        let grad = field.grad(p)?;
        let gn = check_grad(grad)?;
        let n = outward_normal(tangent);
        let flux = grad.x * n.x + grad.y * n.y;
        Ok(gn.ln().max(0.0) * flux / std::f64::consts::TAU)
    })?;
    let minus = integrate(field, contour, 1e-10, &|field, p, tangent| {
        let grad = field.grad(p)?;
        let gn = check_grad(grad)?;
        let n = outward_normal(tangent);
        let flux = grad.x * n.x + grad.y * n.y;
        Ok((-gn.ln()).max(0.0) * flux / std::f64::consts::TAU)
    })?;
    Ok((plus, minus))
}

/// Normal derivative of `log |grad g|` integrated over the contour:
/// `(1/2pi) \oint d/dn log|grad g| ds`. For a contour with winding `n_z`
/// zeros minus `n_p` poles of the derivative inside, this is `n_z - n_p`;
/// on a curve around one component it comes out to exactly `-1`.
///
/// The integrand blows up like `1/dist` near saddles sitting just off the
/// contour, so the tolerance is kept moderate; the winding is only ever
/// checked against integers.
pub fn normal_log_grad_flux(field: &GreenField, contour: &Contour) -> Result<f64> {
    integrate(field, contour, 1e-6, &|field, p, tangent| {
        let glg = field.grad_log_grad(p)?;
        let n = outward_normal(tangent);
        Ok((glg.x * n.x + glg.y * n.y) / std::f64::consts::TAU)
    })
}

/// Outward normal of a counterclockwise contour: the unit tangent rotated
/// -90 degrees.
fn outward_normal(tangent: Point) -> Point {
    Point::new(tangent.y, -tangent.x)
}

fn check_grad(grad: Point) -> Result<f64> {
    let gn = grad.norm();
    if gn < 1e-14 {
        return Err(Error::GradientTooSmall {
            value: gn,
            floor: 1e-14,
        });
    }
    Ok(gn)
}

/// Adaptive midpoint quadrature of `f(point, unit_tangent) ds` over the
/// contour. Panels are halved until the two-level difference meets a
/// length-proportional share of `tol`, then Richardson-extrapolated.
fn integrate(
    field: &GreenField,
    contour: &Contour,
    tol: f64,
    f: &dyn Fn(&GreenField, Point, Point) -> Result<f64>,
) -> Result<f64> {
    match contour {
        Contour::Circle { center, radius } => {
            let param = |t: f64| {
                let th = std::f64::consts::TAU * t;
                (
                    Point::new(center.x + radius * th.cos(), center.y + radius * th.sin()),
                    Point::new(-th.sin(), th.cos()),
                )
            };
            let len = std::f64::consts::TAU * radius;
            let mut acc = 0.0;
            let panels = 64;
            for k in 0..panels {
                let (a, b) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
                acc += panel(field, &param, len, a, b, tol / panels as f64, f, 0)?;
            }
            Ok(acc)
        }
        Contour::Polygon { points } => {
            let n = points.len();
            let total_len: f64 = (0..n).map(|i| points[i].dist(points[(i + 1) % n])).sum();
            let mut acc = 0.0;
            for i in 0..n {
                let a = points[i];
                let b = points[(i + 1) % n];
                let len = a.dist(b);
                if len == 0.0 {
                    continue;
                }
                let t = Point::new((b.x - a.x) / len, (b.y - a.y) / len);
                let param = |s: f64| (Point::new(a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s), t);
                acc += panel(
                    field,
                    &param,
                    len,
                    0.0,
                    1.0,
                    tol * len / total_len,
                    f,
                    0,
                )?;
            }
            Ok(acc)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn panel(
    field: &GreenField,
    param: &dyn Fn(f64) -> (Point, Point),
    full_len: f64,
    a: f64,
    b: f64,
    tol: f64,
    f: &dyn Fn(&GreenField, Point, Point) -> Result<f64>,
    depth: usize,
) -> Result<f64> {
    let len = full_len * (b - a);
    let (pm, tm) = param(0.5 * (a + b));
    let coarse = f(field, pm, tm)? * len;

    let m = 0.5 * (a + b);
    let (p1, t1) = param(0.5 * (a + m));
    let (p2, t2) = param(0.5 * (m + b));
    let fine = (f(field, p1, t1)? + f(field, p2, t2)?) * (0.5 * len);

    if (fine - coarse).abs() < tol || depth >= 40 {
        // midpoint rule is second order: Richardson step
        return Ok(fine + (fine - coarse) / 3.0);
    }
    Ok(panel(field, param, full_len, a, m, 0.5 * tol, f, depth + 1)?
        + panel(field, param, full_len, m, b, 0.5 * tol, f, depth + 1)?)
}
