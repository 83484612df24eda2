use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::potential::{EquilibriumSolution, MeshComponentInfo};
use num_complex::Complex64;

/// The discrete Green function of the complement of a scene, with pole at
/// infinity, together with its first two complex derivatives.
#[derive(Clone, Debug)]
pub struct GreenField {
    solution: EquilibriumSolution,
    /// Longest pairwise extent of the scene; sets evaluation tolerances.
    scale: f64,
}

impl GreenField {
    pub fn new(solution: EquilibriumSolution) -> GreenField {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for node in &solution.mesh.nodes {
            lo.x = lo.x.min(node.position.x);
            lo.y = lo.y.min(node.position.y);
            hi.x = hi.x.max(node.position.x);
            hi.y = hi.y.max(node.position.y);
        }
        let scale = lo.dist(hi).max(1e-300);
        GreenField { solution, scale }
    }

    pub fn solution(&self) -> &EquilibriumSolution {
        &self.solution
    }

    pub fn robin(&self) -> f64 {
        self.solution.robin
    }

    /// Diameter-scale of the node cloud.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The component whose clipped region strictly contains `p`, if any.
    pub fn component_containing(&self, p: Point) -> Option<&MeshComponentInfo> {
        self.solution.mesh.components.iter().find(|c| {
            c.base.contains_point_strict(p)
                && c.window
                    .as_ref()
                    .map_or(true, |w| w.contains_point_strict(p))
        })
    }

    /// Distance from `p` to the nearest mesh node.
    pub fn node_clearance(&self, p: Point) -> f64 {
        self.solution
            .mesh
            .nodes
            .iter()
            .map(|n| p.dist(n.position))
            .fold(f64::INFINITY, f64::min)
    }

    fn check_evaluable(&self, p: Point) -> Result<()> {
        if let Some(c) = self.component_containing(p) {
            return Err(Error::InsideComponent {
                x: p.x,
                y: p.y,
                id: c.id.0.clone(),
            });
        }
        Ok(())
    }

    /// `g(z) = sum_a w_a log|z - z_a| + robin`. Errors strictly inside a
    /// component or on top of a node.
    pub fn green_at(&self, p: Point) -> Result<f64> {
        self.check_evaluable(p)?;
        let mut g = self.solution.robin;
        for (node, &w) in self.solution.mesh.nodes.iter().zip(&self.solution.weights) {
            let d = p.dist(node.position);
            if d < 1e-12 * node.h {
                return Err(Error::TooCloseToNode {
                    x: p.x,
                    y: p.y,
                    dist: d,
                });
            }
            g += w * d.ln();
        }
        Ok(g)
    }

    /// Complex derivative `dg(z) = (1/2) sum_a w_a / (z - z_a)`, so that the
    /// gradient is `(2 Re dg, -2 Im dg)` and `|grad g| = 2 |dg|`.
    pub fn dz(&self, p: Point) -> Result<Complex64> {
        self.check_evaluable(p)?;
        let z = p.to_complex();
        let mut f = Complex64::new(0.0, 0.0);
        for (node, &w) in self.solution.mesh.nodes.iter().zip(&self.solution.weights) {
            let dz = z - node.position.to_complex();
            if dz.norm() < 1e-12 * node.h {
                return Err(Error::TooCloseToNode {
                    x: p.x,
                    y: p.y,
                    dist: dz.norm(),
                });
            }
            f += w / dz;
        }
        Ok(0.5 * f)
    }

    /// Second complex derivative `-(1/2) sum_a w_a / (z - z_a)^2`.
    pub fn dzz(&self, p: Point) -> Result<Complex64> {
        self.check_evaluable(p)?;
        let z = p.to_complex();
        let mut f = Complex64::new(0.0, 0.0);
        for (node, &w) in self.solution.mesh.nodes.iter().zip(&self.solution.weights) {
            let dz = z - node.position.to_complex();
            if dz.norm() < 1e-12 * node.h {
                return Err(Error::TooCloseToNode {
                    x: p.x,
                    y: p.y,
                    dist: dz.norm(),
                });
            }
            f += w / (dz * dz);
        }
        Ok(-0.5 * f)
    }

    /// Euclidean gradient of `g`.
    pub fn grad(&self, p: Point) -> Result<Point> {
        let f = self.dz(p)?;
        Ok(Point::new(2.0 * f.re, -2.0 * f.im))
    }

    /// `|grad g|`.
    pub fn grad_norm(&self, p: Point) -> Result<f64> {
        Ok(2.0 * self.dz(p)?.norm())
    }

    /// Gradient of `log |grad g|`: with `q = dzz/dz` it equals
    /// `(Re q, -Im q)`.
    pub fn grad_log_grad(&self, p: Point) -> Result<Point> {
        let f = self.dz(p)?;
        if f.norm() < 1e-14 {
            return Err(Error::GradientTooSmall {
                value: 2.0 * f.norm(),
                floor: 1e-14,
            });
        }
        let q = self.dzz(p)? / f;
        Ok(Point::new(q.re, -q.im))
    }
}
