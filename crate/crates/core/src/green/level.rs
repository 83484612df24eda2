use super::GreenField;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// A closed level curve `{g = level}`, traced as a counterclockwise polygon.
#[derive(Clone, Debug)]
pub struct LevelCurve {
    pub level: f64,
    /// Closed polygon, counterclockwise, first point not repeated.
    pub points: Vec<Point>,
    pub length: f64,
    /// Indices (into the mesh component list) of components strictly inside.
    pub enclosed: Vec<usize>,
    pub steps: usize,
}

impl LevelCurve {
    /// Even-odd test against the closed polygon.
    pub fn encloses(&self, p: Point) -> bool {
        point_in_polygon(&self.points, p)
    }
}

const MAX_STEPS: usize = 200_000;

/// Trace the closed level curve of `g` through (a correction of) `seed`.
///
/// Predictor-corrector marching: the predictor steps along the tangent
/// (gradient rotated +90 degrees, counterclockwise around the scene), the
/// corrector Newton-projects back onto the level set along the gradient.
/// Steps shrink with the local curvature radius `|grad g| / 2|dgg|`; a
/// collapse of the step or of the gradient means the level passes through a
/// critical point, which is an error by design — callers pick non-critical
/// levels.
pub fn trace_level_curve(field: &GreenField, level: f64, seed: Point) -> Result<LevelCurve> {
    let scale = field.scale();
    let grad_floor = 1e-12 / scale;

    let start = correct(field, level, seed, grad_floor)?;
    let mut points = vec![start];
    let mut z = start;
    let mut length = 0.0;
    let mut steps = 0usize;

    loop {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::TraceDidNotClose { steps: MAX_STEPS });
        }
        let grad = field.grad(z)?;
        let gn = grad.norm();
        if gn < grad_floor {
            return Err(Error::CriticalLevelCollision {
                level,
                grad_norm: gn,
            });
        }
        let curvature_radius = gn / (2.0 * field.dzz(z)?.norm() + 1e-300);
        let mut h = (0.25 * curvature_radius).min(0.02 * scale);
        let tangent = Point::new(-grad.y / gn, grad.x / gn);

        // predictor-corrector with step halving on corrector failure
        let mut next = None;
        for _ in 0..40 {
            if h < 1e-9 * scale {
                return Err(Error::CriticalLevelCollision {
                    level,
                    grad_norm: gn,
                });
            }
            let predicted = z + tangent * h;
            match correct(field, level, predicted, grad_floor) {
                Ok(c) if c.dist(predicted) <= 0.5 * h => {
                    next = Some(c);
                    break;
                }
                _ => h *= 0.5,
            }
        }
        let Some(next) = next else {
            return Err(Error::CriticalLevelCollision {
                level,
                grad_norm: gn,
            });
        };

        length += z.dist(next);
        // closure test: back near the start after meaningful progress
        if points.len() >= 8 && next.dist(start) < 1.5 * h {
            length += next.dist(start);
            points.push(next);
            break;
        }
        points.push(next);
        z = next;
    }

    // normalize to counterclockwise
    if signed_area(&points) < 0.0 {
        points.reverse();
    }

    let enclosed = enclosed_components(field, &points);
    Ok(LevelCurve {
        level,
        points,
        length,
        enclosed,
        steps,
    })
}

/// Newton-project `z` onto `{g = level}` along the gradient.
fn correct(field: &GreenField, level: f64, mut z: Point, grad_floor: f64) -> Result<Point> {
    let tol = 1e-12 * level.abs().max(1.0);
    for _ in 0..30 {
        let g = field.green_at(z)?;
        if (g - level).abs() < tol {
            return Ok(z);
        }
        let grad = field.grad(z)?;
        let gn2 = grad.norm() * grad.norm();
        if gn2 < grad_floor * grad_floor {
            return Err(Error::CriticalLevelCollision {
                level,
                grad_norm: gn2.sqrt(),
            });
        }
        z = z - grad * ((g - level) / gn2);
    }
    let g = field.green_at(z)?;
    if (g - level).abs() < 1e3 * tol {
        return Ok(z);
    }
    Err(Error::CriticalLevelCollision {
        level,
        grad_norm: field.grad(z).map(|g| g.norm()).unwrap_or(0.0),
    })
}

/// Bracket and bisect a level crossing along the ray `anchor + t dir`.
///
/// Points where `g` is undefined (inside a component) count as below the
/// level, so the anchor may sit inside or on the scene. Errors if the ray
/// never reaches the level within a generous multiple of the scene scale.
pub fn find_level_seed(
    field: &GreenField,
    level: f64,
    anchor: Point,
    dir: Point,
) -> Result<Point> {
    let n = dir.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::NonFinite {
            context: "seed direction",
        });
    }
    let dir = dir * (1.0 / n);
    let scale = field.scale();
    let value = |t: f64| -> Option<f64> { field.green_at(anchor + dir * t).ok() };

    // geometric march to find the first bracketing interval
    let mut t_lo = 0.0f64;
    let mut lo_defined = false;
    let mut t = 1e-6 * scale;
    let mut bracket = None;
    while t < 1e6 * scale {
        match value(t) {
            Some(g) if g >= level => {
                bracket = Some((t_lo, t));
                break;
            }
            Some(_) => {
                t_lo = t;
                lo_defined = true;
            }
            None => {
                t_lo = t;
            }
        }
        t *= 1.3;
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Err(Error::SeedNotBracketing { level });
    };
    if !lo_defined && lo == 0.0 && value(0.0).map_or(false, |g| g >= level) {
        // the anchor itself already sits above the level
        return Err(Error::SeedNotBracketing { level });
    }

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match value(mid) {
            Some(g) if g >= level => hi = mid,
            _ => lo = mid,
        }
        if hi - lo < 1e-15 * scale.max(hi) {
            break;
        }
    }
    let found = anchor + dir * hi;
    // the bisection can also converge onto the scene boundary, where g jumps
    // from undefined to ~0; only a genuine crossing attains the level
    match field.green_at(found) {
        Ok(g) if (g - level).abs() <= 1e-6 * level.abs().max(1.0) => Ok(found),
        _ => Err(Error::SeedNotBracketing { level }),
    }
}

fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    0.5 * acc
}

fn point_in_polygon(points: &[Point], p: Point) -> bool {
    let n = points.len();
    let mut inside = false;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

fn enclosed_components(field: &GreenField, points: &[Point]) -> Vec<usize> {
    let mesh = &field.solution().mesh;
    let mut out = Vec::new();
    for ci in 0..mesh.components.len() {
        // clipped regions are convex, so the node centroid lies inside
        let nodes = mesh.component_nodes(ci);
        let mut c = Point::new(0.0, 0.0);
        for node in nodes {
            c = c + node.position;
        }
        let c = c * (1.0 / nodes.len() as f64);
        if point_in_polygon(points, c) {
            out.push(ci);
        }
    }
    out
}
