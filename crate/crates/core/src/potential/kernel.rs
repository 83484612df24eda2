use super::BoundaryMesh;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Assemble the logarithmic collocation matrix: `K[a][b] = log(1/|z_a - z_b|)`
/// off the diagonal, and `K[a][a] = log(2*pi / h_a)` on it, where `h_a` is the
/// chord to the node's neighbors on its piece.
///
/// The diagonal absorbs the self-interaction of the node's boundary panel.
/// On a circle of radius `r` with `n` uniform nodes the exact value making the
/// discrete system reproduce the continuum solution is `log(n/r)`; with the
/// chord `h = 2 r sin(pi/n)` the choice `log(2*pi/h)` matches it to
/// `O(n^-2)`, which after the row-sum normalization leaves an `O(n^-3)`
/// capacity error.
pub fn assemble_kernel(mesh: &BoundaryMesh) -> Result<DMatrix<f64>> {
    let n = mesh.len();
    if n < 2 {
        return Err(Error::MeshTooSmall(n));
    }
    let mut k = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        let za = mesh.nodes[a].position;
        for b in (a + 1)..n {
            let d = za.dist(mesh.nodes[b].position);
            if d < 1e-12 * mesh.nodes[a].h.max(mesh.nodes[b].h) {
                return Err(Error::CoincidentNodes { a, b, dist: d });
            }
            let v = -d.ln();
            k[(a, b)] = v;
            k[(b, a)] = v;
        }
        k[(a, a)] = (std::f64::consts::TAU / mesh.nodes[a].h).ln();
    }
    Ok(k)
}
