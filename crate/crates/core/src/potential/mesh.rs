use crate::error::{Error, Result};
use crate::geometry::{BoundaryPiece, Clipped, ComponentId, Rect, Shape};

/// One collocation node on a component boundary.
#[derive(Clone, Copy, Debug)]
pub struct MeshNode {
    pub position: crate::geometry::Point,
    /// Arclength carried by the node (piece length / nodes on the piece).
    pub ds: f64,
    /// Chord distance to the adjacent nodes on the same piece; feeds the
    /// kernel diagonal.
    pub h: f64,
    /// Index into `BoundaryMesh::components`.
    pub component: usize,
}

/// Per-component bookkeeping: which shape the nodes sample and where they
/// sit in the node array.
#[derive(Clone, Debug)]
pub struct MeshComponentInfo {
    pub id: ComponentId,
    pub base: Shape,
    pub window: Option<Rect>,
    pub boundary_len: f64,
    pub node_range: std::ops::Range<usize>,
}

#[derive(Clone, Debug)]
pub struct BoundaryMesh {
    pub nodes: Vec<MeshNode>,
    pub components: Vec<MeshComponentInfo>,
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn component_nodes(&self, idx: usize) -> &[MeshNode] {
        &self.nodes[self.components[idx].node_range.clone()]
    }
}

/// Minimum nodes on a full circle; fewer cannot represent its curvature.
const MIN_CIRCLE_NODES: usize = 8;
/// Minimum nodes on an arc or segment piece.
const MIN_PIECE_NODES: usize = 2;

/// Distribute `n_target` nodes over the clipped boundaries proportionally to
/// arclength (largest-remainder rounding), then sample each piece uniformly.
/// Circles are sampled starting at angle zero; arcs and segments at midpoint
/// parameters `(k + 1/2) / n`, which keeps nodes away from corners where the
/// equilibrium density is singular.
///
/// Per-piece minimums may push the total slightly above `n_target`.
pub fn discretize_boundary(clipped: &Clipped, n_target: usize) -> Result<BoundaryMesh> {
    if clipped.is_empty() {
        return Err(Error::EmptyClip {
            context: "discretize_boundary: no components".into(),
        });
    }
    if n_target < 2 {
        return Err(Error::MeshTooSmall(n_target));
    }
    let total_len = clipped.total_boundary_len();
    if !(total_len > 0.0) || !total_len.is_finite() {
        return Err(Error::NonFinite {
            context: "total boundary length".into(),
        });
    }

    // flat list of (component index, piece)
    let pieces: Vec<(usize, &BoundaryPiece)> = clipped
        .components
        .iter()
        .enumerate()
        .flat_map(|(ci, (_, region))| region.pieces.iter().map(move |p| (ci, p)))
        .collect();

    // largest-remainder allocation of n_target nodes by length
    let mut counts: Vec<usize> = Vec::with_capacity(pieces.len());
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(pieces.len());
    let mut assigned = 0usize;
    for (idx, (_, p)) in pieces.iter().enumerate() {
        let exact = n_target as f64 * p.length() / total_len;
        let base = exact.floor() as usize;
        counts.push(base);
        assigned += base;
        remainders.push((exact - base as f64, idx));
    }
    remainders.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut leftover = n_target.saturating_sub(assigned);
    for &(_, idx) in &remainders {
        if leftover == 0 {
            break;
        }
        counts[idx] += 1;
        leftover -= 1;
    }
    for (idx, (_, p)) in pieces.iter().enumerate() {
        let min = match p {
            BoundaryPiece::Circle { .. } => MIN_CIRCLE_NODES,
            _ => MIN_PIECE_NODES,
        };
        counts[idx] = counts[idx].max(min);
    }

    // sample, grouped by component so node ranges are contiguous
    let mut nodes = Vec::new();
    let mut components = Vec::with_capacity(clipped.components.len());
    let mut piece_cursor = 0usize;
    for (ci, (id, region)) in clipped.components.iter().enumerate() {
        let start = nodes.len();
        for piece in &region.pieces {
            let n = counts[piece_cursor];
            piece_cursor += 1;
            sample_piece(piece, n, ci, &mut nodes);
        }
        components.push(MeshComponentInfo {
            id: id.clone(),
            base: region.base.clone(),
            window: region.window.clone(),
            boundary_len: region.boundary_len(),
            node_range: start..nodes.len(),
        });
    }
    Ok(BoundaryMesh { nodes, components })
}

fn sample_piece(piece: &BoundaryPiece, n: usize, component: usize, out: &mut Vec<MeshNode>) {
    let len = piece.length();
    let ds = len / n as f64;
    match *piece {
        BoundaryPiece::Circle { radius, .. } => {
            let h = 2.0 * radius * (std::f64::consts::PI / n as f64).sin();
            for k in 0..n {
                out.push(MeshNode {
                    position: piece.point_at(k as f64 / n as f64),
                    ds,
                    h,
                    component,
                });
            }
        }
        BoundaryPiece::Arc { radius, sweep, .. } => {
            let h = 2.0 * radius * (sweep / (2.0 * n as f64)).sin();
            for k in 0..n {
                out.push(MeshNode {
                    position: piece.point_at((k as f64 + 0.5) / n as f64),
                    ds,
                    h,
                    component,
                });
            }
        }
        BoundaryPiece::Segment { .. } => {
            for k in 0..n {
                out.push(MeshNode {
                    position: piece.point_at((k as f64 + 0.5) / n as f64),
                    ds,
                    h: ds,
                    component,
                });
            }
        }
    }
}
