//! The two scene edits the pipeline is built from: replacing the part of a
//! scene inside a lattice square by a concentric disc sized by that part's
//! capacity, and deleting components from the annulus between a square and
//! its concentric dilation.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::{
    clip, dilate, relation, CompactScene, Component, ComponentId, Disc, DyadicSquare, Relation,
    Shape,
};
use crate::potential::{solve_equilibrium, SolverConfig};

/// Record of one disc construction.
#[derive(Clone, Debug)]
pub struct DiscConstruction {
    /// The replacement disc, concentric with the square.
    pub disc: Disc,
    /// Capacity of the clipped part `scene ∩ square` it replaced.
    pub clipped_capacity: f64,
    /// Scene components that met the square and were consumed whole.
    pub consumed: Vec<ComponentId>,
}

/// Compute the replacement disc for `scene ∩ square` without editing the
/// scene: radius `(1/2) * Cap(scene ∩ square)^(1+eps) / side^eps`. Returns
/// `None` when the square misses the scene.
pub(crate) fn replacement_disc(
    scene: &CompactScene,
    square: &DyadicSquare,
    eps: f64,
    config: &SolverConfig,
) -> Result<Option<DiscConstruction>> {
    let clipped = clip(scene, &square.rect())?;
    if clipped.is_empty() {
        return Ok(None);
    }
    let mut consumed: Vec<ComponentId> =
        clipped.components.iter().map(|(id, _)| id.clone()).collect();
    consumed.sort();
    let solution = solve_equilibrium(&clipped, config)?;
    let ell = square.side();
    let radius = 0.5 * solution.capacity.powf(1.0 + eps) / ell.powf(eps);
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::NonFinite {
            context: "replacement disc radius",
        });
    }
    // Cap(scene ∩ square) < 0.6 * side keeps the disc well inside the
    // square; the clamp only absorbs floating-point overshoot.
    let radius = radius.min(0.5 * ell * (1.0 - 1e-12));
    Ok(Some(DiscConstruction {
        disc: Disc::new(square.center(), radius),
        clipped_capacity: solution.capacity,
        consumed,
    }))
}

/// Replace `scene ∩ square` by its replacement disc, consuming every
/// component that meets the closed square. The new component is `new_id`.
pub fn disc_construction(
    scene: &CompactScene,
    square: &DyadicSquare,
    eps: f64,
    config: &SolverConfig,
    new_id: &str,
) -> Result<(CompactScene, DiscConstruction)> {
    let built = replacement_disc(scene, square, eps, config)?.ok_or_else(|| Error::EmptyClip {
        context: format!(
            "square ({}, {}) at scale {}",
            square.i, square.j, square.scale
        ),
    })?;
    let consumed: BTreeSet<ComponentId> = built.consumed.iter().cloned().collect();
    let component = Component {
        id: ComponentId::new(new_id),
        shape: Shape::Disc(built.disc),
    };
    let next = match scene.without(&consumed) {
        Some(rest) => rest.with_component(component)?,
        None => CompactScene::new(vec![component])?,
    };
    Ok((next, built))
}

/// Record of one annulus construction.
#[derive(Clone, Debug, Default)]
pub struct AnnulusOutcome {
    /// Components strictly inside the open annulus, deleted.
    pub removed: Vec<ComponentId>,
    /// Protected components that met the annulus but touched its boundary
    /// and were therefore kept whole.
    pub protected_kept: Vec<ComponentId>,
}

/// Delete every component lying strictly inside the open annulus between
/// `square` and its `r`-fold concentric dilation.
///
/// Components are atomic: one that touches the annulus boundary (either the
/// dilated square's edge or the inner square's edge) is kept whole, and is
/// reported in `protected_kept` when it appears in `protected`. Components
/// meeting the inner square are untouched — they belong to the disc
/// construction that follows.
pub fn annulus_construction(
    scene: &CompactScene,
    square: &DyadicSquare,
    r: u32,
    protected: &[ComponentId],
) -> Result<(CompactScene, AnnulusOutcome)> {
    let inner = square.rect();
    let outer = dilate(square, r);
    let protected: BTreeSet<&ComponentId> = protected.iter().collect();
    let mut outcome = AnnulusOutcome::default();
    for c in scene.components() {
        match relation(&c.shape, &inner) {
            Relation::Disjoint => match relation(&c.shape, &outer) {
                Relation::AInsideB => outcome.removed.push(c.id.clone()),
                Relation::BoundaryOverlap => {
                    if protected.contains(&c.id) {
                        outcome.protected_kept.push(c.id.clone());
                    }
                }
                Relation::Disjoint | Relation::BInsideA => {}
            },
            Relation::BoundaryOverlap => {
                // straddles the inner square's edge: touches the annulus
                // boundary from the other side, kept whole
                if protected.contains(&c.id) {
                    outcome.protected_kept.push(c.id.clone());
                }
            }
            Relation::AInsideB | Relation::BInsideA => {}
        }
    }
    outcome.removed.sort();
    outcome.protected_kept.sort();
    let removed: BTreeSet<ComponentId> = outcome.removed.iter().cloned().collect();
    let next = if removed.is_empty() {
        scene.clone()
    } else {
        scene.without(&removed).ok_or(Error::EmptyScene)?
    };
    Ok((next, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use approx::assert_relative_eq;

    fn disc_scene(discs: &[(&str, f64, f64, f64)]) -> CompactScene {
        CompactScene::new(
            discs
                .iter()
                .map(|&(id, x, y, r)| Component {
                    id: ComponentId::new(id),
                    shape: Shape::Disc(Disc::new(Point::new(x, y), r)),
                })
                .collect(),
        )
        .unwrap()
    }

    fn unit_square() -> DyadicSquare {
        DyadicSquare { scale: 0, i: 0, j: 0 }
    }

    #[test]
    fn replacement_radius_follows_the_capacity_power_law() {
        // disc of radius 1/4 centered in the unit square; capacity = 1/4,
        // so eps = 1 gives radius 0.5 * (1/4)^2 = 0.03125
        let scene = disc_scene(&[("a", 0.5, 0.5, 0.25)]);
        let config = SolverConfig::with_nodes(256);
        let (_, built) = disc_construction(&scene, &unit_square(), 1.0, &config, "b").unwrap();
        assert_relative_eq!(built.disc.radius, 0.03125, max_relative = 1e-4);
        assert_eq!(built.disc.center, Point::new(0.5, 0.5));
        assert_eq!(built.consumed, vec![ComponentId::new("a")]);

        // eps -> 0 tends to half the capacity
        let (_, built) = disc_construction(&scene, &unit_square(), 1e-9, &config, "b").unwrap();
        assert_relative_eq!(built.disc.radius, 0.125, max_relative = 1e-4);
    }

    #[test]
    fn replacement_disc_stays_inside_the_square() {
        // a component filling the square entirely: capacity is largest here
        let scene = CompactScene::new(vec![Component {
            id: ComponentId::new("full"),
            shape: Shape::Rect(unit_square().rect()),
        }])
        .unwrap();
        let config = SolverConfig::with_nodes(256);
        for eps in [0.25, 0.5, 1.0] {
            let (next, built) =
                disc_construction(&scene, &unit_square(), eps, &config, "b").unwrap();
            assert!(built.disc.radius < 0.5);
            assert_eq!(next.len(), 1);
            assert_eq!(next.components()[0].id.as_str(), "b");
        }
    }

    #[test]
    fn disc_construction_requires_overlap() {
        let scene = disc_scene(&[("far", 5.0, 5.0, 0.1)]);
        let config = SolverConfig::with_nodes(64);
        assert!(matches!(
            disc_construction(&scene, &unit_square(), 0.5, &config, "b"),
            Err(Error::EmptyClip { .. })
        ));
    }

    #[test]
    fn annulus_removes_strict_interior_components_only() {
        let q = DyadicSquare { scale: 2, i: 0, j: 0 }; // [0, 1/4]^2, dilation x5 -> [-1/2, 3/4]^2
        let scene = disc_scene(&[
            ("inside_q", 0.125, 0.125, 0.05),   // meets the inner square
            ("in_annulus", 0.5, 0.5, 0.05),     // strictly inside the open annulus
            ("on_outer", 0.7, 0.125, 0.06),     // crosses the dilated square's edge
            ("on_inner", 0.25, 0.125, 0.04),    // crosses the inner square's edge
            ("outside", 2.0, 2.0, 0.1),         // wholly outside
        ]);
        let protected: Vec<ComponentId> = scene.components().iter().map(|c| c.id.clone()).collect();
        let (next, outcome) = annulus_construction(&scene, &q, 5, &protected).unwrap();
        assert_eq!(outcome.removed, vec![ComponentId::new("in_annulus")]);
        assert_eq!(
            outcome.protected_kept,
            vec![ComponentId::new("on_inner"), ComponentId::new("on_outer")]
        );
        assert!(next.get(&ComponentId::new("in_annulus")).is_none());
        assert_eq!(next.len(), 4);

        // unprotected boundary-touchers are still kept, just not reported
        let (next2, outcome2) = annulus_construction(&scene, &q, 5, &[]).unwrap();
        assert_eq!(outcome2.removed, vec![ComponentId::new("in_annulus")]);
        assert!(outcome2.protected_kept.is_empty());
        assert_eq!(next2.len(), 4);
    }

    #[test]
    fn annulus_leaves_disjoint_scenes_alone() {
        let q = DyadicSquare { scale: 3, i: 20, j: 20 };
        let scene = disc_scene(&[("a", 0.1, 0.1, 0.05)]);
        let (next, outcome) = annulus_construction(&scene, &q, 4, &[]).unwrap();
        assert!(outcome.removed.is_empty());
        assert_eq!(next.len(), scene.len());
    }

    #[test]
    fn annulus_cannot_empty_the_scene() {
        let q = DyadicSquare { scale: 2, i: 0, j: 0 };
        let scene = disc_scene(&[("only", 0.5, 0.5, 0.05)]); // strictly in the annulus
        assert!(matches!(
            annulus_construction(&scene, &q, 5, &[]),
            Err(Error::EmptyScene)
        ));
    }
}
