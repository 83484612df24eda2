use super::{assemble_kernel, discretize_boundary, BoundaryMesh};
use crate::error::{Error, Result};
use crate::geometry::{Clipped, ComponentId, Disc, Point, Rect};
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Target node count distributed over all boundaries.
    pub nodes: usize,
    /// Direct-solve weights below `-negative_weight_tol` trigger the
    /// projected-gradient fallback.
    pub negative_weight_tol: f64,
    pub fallback_max_iters: usize,
    pub fallback_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            nodes: 256,
            negative_weight_tol: 1e-10,
            fallback_max_iters: 100_000,
            fallback_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn with_nodes(nodes: usize) -> SolverConfig {
        SolverConfig {
            nodes,
            ..SolverConfig::default()
        }
    }
}

/// Discrete equilibrium measure of a clipped scene: node weights summing to
/// one that minimize the logarithmic energy, plus the Robin constant
/// (minimal energy) and the capacity `exp(-robin)`.
#[derive(Clone, Debug)]
pub struct EquilibriumSolution {
    pub mesh: BoundaryMesh,
    pub weights: Vec<f64>,
    pub robin: f64,
    pub capacity: f64,
    /// Max deviation from the optimality conditions: `|K w - robin|` on
    /// carried nodes, one-sided on zero-weight nodes.
    pub kkt_residual: f64,
}

impl EquilibriumSolution {
    /// Total weight carried by one component.
    pub fn component_mass(&self, idx: usize) -> f64 {
        self.mesh.components[idx]
            .node_range
            .clone()
            .map(|a| self.weights[a])
            .sum()
    }

    pub fn component_mass_by_id(&self, id: &ComponentId) -> Option<f64> {
        let idx = self.mesh.components.iter().position(|c| &c.id == id)?;
        Some(self.component_mass(idx))
    }

    /// Weight carried by nodes inside the closed rectangle.
    pub fn mass_in_rect(&self, rect: &Rect) -> f64 {
        self.mesh
            .nodes
            .iter()
            .zip(&self.weights)
            .filter(|(n, _)| rect.contains_point(n.position))
            .map(|(_, w)| w)
            .sum()
    }

    /// Weight carried by nodes inside the closed disc.
    pub fn mass_in_disc(&self, disc: &Disc) -> f64 {
        self.mesh
            .nodes
            .iter()
            .zip(&self.weights)
            .filter(|(n, _)| disc.contains_point(n.position))
            .map(|(_, w)| w)
            .sum()
    }

    /// Logarithmic potential `sum_a w_a log(1 / |z - z_a|)` of the discrete
    /// measure. Errors when `z` sits on a node.
    pub fn log_potential_at(&self, z: Point) -> Result<f64> {
        let mut u = 0.0;
        for (node, &w) in self.mesh.nodes.iter().zip(&self.weights) {
            let d = z.dist(node.position);
            if d < 1e-12 * node.h {
                return Err(Error::TooCloseToNode {
                    x: z.x,
                    y: z.y,
                    dist: d,
                });
            }
            u -= w * d.ln();
        }
        Ok(u)
    }
}

/// Solve the equilibrium problem on a clipped scene.
///
/// Direct path: LU-solve `K y = 1`, normalize to the simplex. If that
/// produces materially negative weights (possible near reentrant corners of
/// clipped regions), fall back to projected-gradient descent on the energy
/// over the simplex, which enforces nonnegativity by construction.
pub fn solve_equilibrium(clipped: &Clipped, config: &SolverConfig) -> Result<EquilibriumSolution> {
    let mesh = discretize_boundary(clipped, config.nodes)?;
    let k = assemble_kernel(&mesh)?;
    let n = mesh.len();

    let ones = DVector::from_element(n, 1.0);
    let y = k
        .clone()
        .lu()
        .solve(&ones)
        .ok_or(Error::SingularKernel)?;
    let s: f64 = y.sum();
    if s == 0.0 || !s.is_finite() {
        return Err(Error::SingularKernel);
    }
    let gamma = 1.0 / s;
    let mut w = y * gamma;

    let min_w = w.min();
    if min_w < -config.negative_weight_tol {
        let (wf, pg_norm, iters) = solve_simplex_qp(
            &k,
            DVector::from_element(n, 1.0 / n as f64),
            config.fallback_max_iters,
            config.fallback_tol,
        );
        if pg_norm > config.fallback_tol {
            return Err(Error::SolverDiverged {
                residual: pg_norm,
                iterations: iters,
                tolerance: config.fallback_tol,
            });
        }
        w = wf;
    }

    // clamp roundoff negatives and renormalize
    for x in w.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let total = w.sum();
    if !(total > 0.0) {
        return Err(Error::SingularKernel);
    }
    w /= total;

    let kw = &k * &w;
    let robin = w.dot(&kw);
    if !robin.is_finite() {
        return Err(Error::NonFinite {
            context: "robin constant".into(),
        });
    }
    let mut kkt = 0.0f64;
    for a in 0..n {
        let r = if w[a] > 1e-14 {
            (kw[a] - robin).abs()
        } else {
            (robin - kw[a]).max(0.0)
        };
        kkt = kkt.max(r);
    }

    Ok(EquilibriumSolution {
        mesh,
        weights: w.iter().cloned().collect(),
        robin,
        capacity: (-robin).exp(),
        kkt_residual: kkt,
    })
}

/// Minimize `w^T K w / 2` over the probability simplex by projected
/// gradient descent with Barzilai-Borwein steps and a halving safeguard.
/// Returns the iterate, the final unit-step projected-gradient norm, and the
/// iteration count.
pub fn solve_simplex_qp(
    k: &DMatrix<f64>,
    w0: DVector<f64>,
    max_iters: usize,
    tol: f64,
) -> (DVector<f64>, f64, usize) {
    let mut w = project_simplex(&w0);
    let mut g = k * &w;
    let mut t = 1.0 / (1.0 + g.amax());
    let mut pg_norm = f64::INFINITY;

    for iter in 0..max_iters {
        pg_norm = (&w - project_simplex(&(&w - &g))).amax();
        if pg_norm < tol {
            return (w, pg_norm, iter);
        }

        let energy = 0.5 * w.dot(&g);
        let mut step = t.clamp(1e-12, 1e6);
        let mut w_new = project_simplex(&(&w - step * &g));
        let mut g_new = k * &w_new;
        // safeguard: shrink until the energy stops increasing
        for _ in 0..40 {
            let e_new = 0.5 * w_new.dot(&g_new);
            if e_new <= energy + 1e-15 * energy.abs() {
                break;
            }
            step *= 0.5;
            w_new = project_simplex(&(&w - step * &g));
            g_new = k * &w_new;
        }

        let s = &w_new - &w;
        let yv = &g_new - &g;
        let sy = s.dot(&yv);
        t = if sy > 0.0 { s.dot(&s) / sy } else { 1.0 };
        w = w_new;
        g = g_new;
    }
    (w, pg_norm, max_iters)
}

fn project_simplex(v: &DVector<f64>) -> DVector<f64> {
    let mut u: Vec<f64> = v.iter().cloned().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumulative += ui;
        let t = (cumulative - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.map(|x| (x - theta).max(0.0))
}
