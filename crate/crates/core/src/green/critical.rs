use super::GreenField;
use crate::error::{Error, Result};
use crate::geometry::Point;
use num_complex::Complex64;

/// A zero of the field derivative outside the scene, i.e. a saddle of the
/// Green function. `multiplicity` is the order of the zero (symmetric scenes
/// merge several saddles into one).
#[derive(Clone, Copy, Debug)]
pub struct CriticalPoint {
    pub position: Point,
    /// Green-function value at the saddle.
    pub value: f64,
    pub multiplicity: usize,
}

/// Locate the critical points of the Green function in the exterior domain.
///
/// Zeros of `dg = (1/2) sum w_a/(z - z_a)` are convex combinations of the
/// nodes (weights `w_a/|z - z_a|^2`), so seeding a Newton iteration on a
/// grid over the node bounding box finds them all; zeros lying inside
/// components are discretization artifacts and are discarded.
///
/// Near a zero of order `m > 1`, `|dg| < tol` holds on a whole disk of
/// radius `~tol^(1/m)`, so Newton hits from different seeds scatter across
/// it. Hits are therefore clustered, and each cluster's multiplicity is the
/// winding of `dg` around a circle enclosing the whole cluster — exact as a
/// zero count no matter how the hits scattered. Saddles closer together
/// than about `1e-3` of the scene scale are reported merged, with their
/// multiplicities summed.
pub fn find_critical_points(field: &GreenField) -> Result<Vec<CriticalPoint>> {
    let (lo, hi) = node_bbox(field);
    let scale = field.scale();
    let tol_f = 1e-11 / scale;
    let grid = 64usize;

    let mut hits: Vec<Point> = Vec::new();
    for gy in 0..grid {
        for gx in 0..grid {
            let seed = Point::new(
                lo.x + (hi.x - lo.x) * (gx as f64 + 0.5) / grid as f64,
                lo.y + (hi.y - lo.y) * (gy as f64 + 0.5) / grid as f64,
            );
            let Some(z) = newton(field, seed, tol_f) else {
                continue;
            };
            if !z.is_finite() {
                continue;
            }
            // inside a component: spurious zero of the discrete field
            if field.component_containing(z).is_some() {
                continue;
            }
            // closer to a node than the mesh can resolve
            if field.node_clearance(z) < 1e-6 * scale {
                continue;
            }
            if hits.iter().all(|p| p.dist(z) > 1e-9 * scale) {
                hits.push(z);
            }
        }
    }

    // agglomerate hits until every cluster's winding circle excludes all
    // other clusters
    let mut clusters = cluster(hits, 1e-3 * scale);
    loop {
        let mut merged = false;
        'outer: for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let need = 3.0 * (clusters[i].spread + clusters[j].spread) + 1e-6 * scale;
                if clusters[i].center.dist(clusters[j].center) < need {
                    let b = clusters.remove(j);
                    let a = clusters.remove(i);
                    clusters.push(Cluster::merge(a, b));
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    clusters.sort_by(|a, b| {
        a.center
            .x
            .total_cmp(&b.center.x)
            .then(a.center.y.total_cmp(&b.center.y))
    });

    let mut out = Vec::with_capacity(clusters.len());
    for (i, c) in clusters.iter().enumerate() {
        let mut rho = (2.0 * c.spread + 1e-7 * scale)
            .max(1e-5 * scale)
            .min(0.5 * field.node_clearance(c.center));
        for (j, other) in clusters.iter().enumerate() {
            if i != j {
                rho = rho.min(0.45 * c.center.dist(other.center));
            }
        }
        let mult = winding_on_circle(field, c.center, rho)?;
        if mult <= 0 {
            // a cancelling artifact cluster, not a saddle
            continue;
        }
        out.push(CriticalPoint {
            position: c.center,
            value: field.green_at(c.center)?,
            multiplicity: mult as usize,
        });
    }
    Ok(out)
}

struct Cluster {
    center: Point,
    spread: f64,
    members: Vec<Point>,
}

impl Cluster {
    fn from_members(members: Vec<Point>) -> Cluster {
        let mut c = Point::new(0.0, 0.0);
        for p in &members {
            c = c + *p;
        }
        let center = c * (1.0 / members.len() as f64);
        let spread = members
            .iter()
            .map(|p| p.dist(center))
            .fold(0.0f64, f64::max);
        Cluster {
            center,
            spread,
            members,
        }
    }

    fn merge(a: Cluster, b: Cluster) -> Cluster {
        let mut members = a.members;
        members.extend(b.members);
        Cluster::from_members(members)
    }
}

fn cluster(hits: Vec<Point>, radius: f64) -> Vec<Cluster> {
    let mut groups: Vec<Vec<Point>> = Vec::new();
    for p in hits {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|q| q.dist(p) < radius))
        {
            Some(g) => g.push(p),
            None => groups.push(vec![p]),
        }
    }
    groups.into_iter().map(Cluster::from_members).collect()
}

/// Count critical points (with multiplicity) of the exterior field strictly
/// inside the circle `|z - center| = radius`, by the argument principle.
///
/// The winding of `dg` along the circle equals zeros minus poles inside.
/// Every enclosed node is a simple pole, and the discrete field has exactly
/// `n_j - 1` spurious zeros inside a component carrying `n_j` nodes, so the
/// exterior count is `winding + number of enclosed components`.
pub fn count_critical_by_argument(
    field: &GreenField,
    center: Point,
    radius: f64,
) -> Result<i64> {
    let mut enclosed = 0i64;
    for (ci, comp) in field.solution().mesh.components.iter().enumerate() {
        let nodes = field.solution().mesh.component_nodes(ci);
        let inside = nodes
            .iter()
            .filter(|n| n.position.dist(center) < radius)
            .count();
        if inside == nodes.len() {
            enclosed += 1;
        } else if inside > 0 {
            return Err(Error::BadVerificationInput(format!(
                "contour crosses component {:?}: {inside} of {} nodes enclosed",
                comp.id.as_str(),
                nodes.len()
            )));
        }
    }
    let w = winding_on_circle(field, center, radius)?;
    Ok(w + enclosed)
}

fn node_bbox(field: &GreenField) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for node in &field.solution().mesh.nodes {
        lo.x = lo.x.min(node.position.x);
        lo.y = lo.y.min(node.position.y);
        hi.x = hi.x.max(node.position.x);
        hi.y = hi.y.max(node.position.y);
    }
    (lo, hi)
}

fn newton(field: &GreenField, seed: Point, tol_f: f64) -> Option<Point> {
    let mut z = seed.to_complex();
    let mut best: Option<(f64, num_complex::Complex64)> = None;
    let mut polish_left = 30i32;
    // after the tolerance is first reached, keep taking polish steps: near a
    // zero of order m Newton still contracts linearly (rate (m-1)/m), which
    // pulls scattered hits down to the floating-point noise ball so that
    // hits from different seeds cluster tightly
    for _ in 0..120 {
        let p = Point::from_complex(z);
        let Ok(f) = field.dz(p) else { break };
        let fnorm = f.norm();
        if fnorm < tol_f && best.map_or(true, |(b, _)| fnorm < b) {
            best = Some((fnorm, z));
        }
        if best.is_some() {
            polish_left -= 1;
            if polish_left < 0 || fnorm < 1e-305 {
                break;
            }
        }
        let Ok(fp) = field.dzz(p) else { break };
        if fp.norm() < 1e-300 {
            break;
        }
        let step = f / fp;
        // damp wild steps out of the search region
        let cap = field.scale();
        let step = if step.norm() > cap {
            step * (cap / step.norm())
        } else {
            step
        };
        z -= step;
    }
    best.map(|(_, z)| Point::from_complex(z))
}

/// Winding number of `dg` along `|z - center| = radius`, by adaptive
/// argument accumulation: consecutive samples must differ by less than
/// `pi/2` in argument or the interval is bisected.
fn winding_on_circle(field: &GreenField, center: Point, radius: f64) -> Result<i64> {
    let eval = |t: f64| -> Result<Complex64> {
        let th = std::f64::consts::TAU * t;
        let p = Point::new(center.x + radius * th.cos(), center.y + radius * th.sin());
        let f = field.dz(p)?;
        if f.norm() < 1e-300 {
            return Err(Error::DerivativeNearZero { value: f.norm() });
        }
        Ok(f)
    };
    let n0 = 256usize;
    let mut total = 0.0f64;
    let mut t0 = 0.0f64;
    let mut f0 = eval(0.0)?;
    let first = f0;
    for k in 1..=n0 {
        let t1 = k as f64 / n0 as f64;
        let f1 = if k == n0 { first } else { eval(t1)? };
        total += arg_increment(&eval, t0, f0, t1, f1, 0)?;
        t0 = t1;
        f0 = f1;
    }
    let w = total / std::f64::consts::TAU;
    let rounded = w.round();
    if (w - rounded).abs() > 0.25 {
        return Err(Error::DerivativeNearZero {
            value: (w - rounded).abs(),
        });
    }
    Ok(rounded as i64)
}

fn arg_increment(
    eval: &dyn Fn(f64) -> Result<Complex64>,
    t0: f64,
    f0: Complex64,
    t1: f64,
    f1: Complex64,
    depth: usize,
) -> Result<f64> {
    let d = (f1 / f0).arg();
    if d.abs() <= std::f64::consts::FRAC_PI_2 {
        return Ok(d);
    }
    if depth > 48 {
        return Err(Error::DerivativeNearZero {
            value: f0.norm().min(f1.norm()),
        });
    }
    let tm = 0.5 * (t0 + t1);
    let fm = eval(tm)?;
    Ok(arg_increment(eval, t0, f0, tm, fm, depth + 1)?
        + arg_increment(eval, tm, fm, t1, f1, depth + 1)?)
}
