//! Splitting the surviving seed discs by weight and assembling the
//! exceptional cover: dilated step squares plus the seed squares of heavy
//! survivors carry a finite size-content bound, while the light survivors
//! contribute only a small total measure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::clip;
use crate::pipeline::run::ModificationTrace;
use crate::verify::greedy_content;

/// Dyadic refinement depth used for the content terms.
const CONTENT_DEPTH: u32 = 6;

/// Surviving seed indices split by final mass: heavy means
/// `mass >= rho^(eps/2) * radius` (boundary-equal counts as heavy).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurvivorSplit {
    pub heavy: Vec<usize>,
    pub light: Vec<usize>,
}

/// Split the surviving seeds of a finished run by the mass-to-radius rule.
pub fn split_survivors(trace: &ModificationTrace) -> SurvivorSplit {
    let factor = trace.params.rho.powf(trace.params.eps / 2.0);
    let mut split = SurvivorSplit {
        heavy: Vec::new(),
        light: Vec::new(),
    };
    for &j in &trace.surviving_seeds {
        let f = &trace.first_stage[j - 1];
        let mass = trace
            .final_masses
            .get(f.id.as_str())
            .copied()
            .unwrap_or(0.0);
        if mass >= factor * f.disc.radius {
            split.heavy.push(j);
        } else {
            split.light.push(j);
        }
    }
    split
}

/// Where one piece of the exceptional cover comes from.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionSource {
    /// The `2r`-dilation of a surviving step square.
    Step { index: usize },
    /// The seed square of a heavy surviving seed.
    Seed { index: usize },
}

/// One rectangle of the exceptional cover.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExceptionalRegion {
    pub source: RegionSource,
    /// `[x0, y0, x1, y1]`.
    pub rect: [f64; 4],
    /// Input-scene components meeting the rectangle.
    pub clipped_ids: Vec<String>,
    /// This region's contribution to the content bound.
    pub content_term: f64,
}

/// The exceptional cover of a finished run: the scene is contained in these
/// regions up to a set of small equilibrium measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExceptionalCover {
    pub regions: Vec<ExceptionalRegion>,
    pub split: SurvivorSplit,
    /// Sum of `side^(1+eps)` over dilated step squares plus the greedy
    /// `(1+eps)`-content of the scene inside heavy seed squares.
    pub content_bound: f64,
    /// Total final mass on light surviving seeds.
    pub residual_measure: f64,
}

/// Assemble the exceptional cover from a finished modification run.
pub fn exceptional_set(trace: &ModificationTrace) -> Result<ExceptionalCover> {
    let s = 1.0 + trace.params.eps;
    let split = split_survivors(trace);
    let mut regions = Vec::new();
    let mut content_bound = 0.0;

    for (&k, sq) in trace
        .surviving_steps
        .iter()
        .zip(trace.surviving_step_squares())
    {
        let rect = crate::geometry::dilate(&sq, 2 * trace.params.r);
        let clipped = clip(&trace.input_scene, &rect)?;
        let term = (2.0 * trace.params.r as f64 * sq.side()).powf(s);
        content_bound += term;
        regions.push(ExceptionalRegion {
            source: RegionSource::Step { index: k },
            rect: [rect.fx0(), rect.fy0(), rect.fx1(), rect.fy1()],
            clipped_ids: clipped
                .components
                .iter()
                .map(|(id, _)| id.as_str().to_owned())
                .collect(),
            content_term: term,
        });
    }

    for &j in &split.heavy {
        let sq = trace.first_stage[j - 1].square;
        let rect = sq.rect();
        let clipped = clip(&trace.input_scene, &rect)?;
        if clipped.is_empty() {
            return Err(Error::BadVerificationInput(format!(
                "seed square {j} no longer meets the input scene"
            )));
        }
        let term = greedy_content(&clipped, s, CONTENT_DEPTH);
        content_bound += term;
        regions.push(ExceptionalRegion {
            source: RegionSource::Seed { index: j },
            rect: [rect.fx0(), rect.fy0(), rect.fx1(), rect.fy1()],
            clipped_ids: clipped
                .components
                .iter()
                .map(|(id, _)| id.as_str().to_owned())
                .collect(),
            content_term: term,
        });
    }

    let residual_measure = split
        .light
        .iter()
        .map(|&j| {
            let f = &trace.first_stage[j - 1];
            trace
                .final_masses
                .get(f.id.as_str())
                .copied()
                .unwrap_or(0.0)
        })
        .sum();

    Ok(ExceptionalCover {
        regions,
        split,
        content_bound,
        residual_measure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CompactScene, Component, ComponentId, Disc, Point, Shape};
    use crate::pipeline::{modify_domain, PipelineParams};
    use approx::assert_relative_eq;

    fn disc_component(id: &str, x: f64, y: f64, r: f64) -> Component {
        Component {
            id: ComponentId::new(id),
            shape: Shape::Disc(Disc::new(Point::new(x, y), r)),
        }
    }

    #[test]
    fn a_run_ending_in_one_step_disc_has_a_single_power_law_term() {
        // the single-disc run ends as one surviving step square of side 1/8
        let scene =
            CompactScene::new(vec![disc_component("a", 1.0 / 32.0, 1.0 / 32.0, 0.02)]).unwrap();
        let trace = modify_domain(&scene, &PipelineParams::default()).unwrap();
        assert_eq!(trace.surviving_steps, vec![1]);
        assert!(trace.surviving_seeds.is_empty());

        let cover = exceptional_set(&trace).unwrap();
        assert_eq!(cover.regions.len(), 1);
        // (2 * 4 * 1/8)^(1 + 1/2) = 1
        assert_relative_eq!(cover.content_bound, 1.0);
        assert_relative_eq!(cover.residual_measure, 0.0);
        assert!(matches!(cover.regions[0].source, RegionSource::Step { index: 1 }));
        assert_eq!(cover.regions[0].clipped_ids, vec!["a".to_owned()]);
    }

    #[test]
    fn surviving_seeds_with_ordinary_mass_are_heavy() {
        // four symmetric discs end the run as four surviving seeds, each
        // carrying mass ~ 1/4 >> rho^(eps/2) * radius
        let r = 0.03;
        let scene = CompactScene::new(vec![
            disc_component("ne", 0.25, 0.25, r),
            disc_component("nw", -0.25, 0.25, r),
            disc_component("sw", -0.25, -0.25, r),
            disc_component("se", 0.25, -0.25, r),
        ])
        .unwrap();
        let params = PipelineParams {
            solver: crate::potential::SolverConfig::with_nodes(192),
            ..PipelineParams::default()
        };
        let trace = modify_domain(&scene, &params).unwrap();
        assert!(trace.surviving_steps.is_empty());

        let split = split_survivors(&trace);
        assert_eq!(split.heavy, trace.surviving_seeds);
        assert!(split.light.is_empty());

        let cover = exceptional_set(&trace).unwrap();
        assert_relative_eq!(cover.residual_measure, 0.0);
        assert!(cover.content_bound.is_finite() && cover.content_bound > 0.0);
        assert_eq!(cover.regions.len(), trace.surviving_seeds.len());
    }
}
