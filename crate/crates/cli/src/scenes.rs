//! Scene input: JSON files or deterministic generators.
//!
//! A `--scene` argument is either a path to a scene JSON file or a
//! generator spec `name:key=val,key=val` with generators `cantor_discs`,
//! `random_discs`, and `grid_squares`. Every generated scene fits inside
//! the open disc of radius 1/2 about the origin, the region the
//! modification pipeline accepts.

use std::collections::BTreeMap;

use potlab_core::{CompactScene, Component, ComponentId, Disc, Point, Rect, SceneFile, Shape};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::CliError;

const GENERATORS: [&str; 3] = ["cantor_discs", "random_discs", "grid_squares"];

/// Load a scene from a file path or a generator spec. `default_seed` feeds
/// generators whose spec does not fix its own `seed` key.
pub fn load_scene(arg: &str, default_seed: u64) -> Result<CompactScene, CliError> {
    if let Some((name, params)) = parse_generator(arg)? {
        return generate(name, &params, default_seed);
    }
    let file = read_scene_file(arg)?;
    CompactScene::from_json(file).map_err(|e| CliError::Usage(format!("scene {arg}: {e}")))
}

/// Read a scene JSON file without validating it as a solvable scene (the
/// renderer accepts empty scenes).
pub fn read_scene_file(path: &str) -> Result<SceneFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("reading scene {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("parsing scene {path}: {e}")))
}

/// Scene JSON for the renderer: a generator spec is expanded, a path is
/// read as-is (and may hold an empty component list).
pub fn load_scene_file(arg: &str, default_seed: u64) -> Result<SceneFile, CliError> {
    if let Some((name, params)) = parse_generator(arg)? {
        return Ok(generate(name, &params, default_seed)?.to_json());
    }
    read_scene_file(arg)
}

fn parse_generator(arg: &str) -> Result<Option<(&str, BTreeMap<String, String>)>, CliError> {
    let (name, rest) = match arg.split_once(':') {
        Some((n, r)) => (n, r),
        None => (arg, ""),
    };
    if !GENERATORS.contains(&name) {
        return Ok(None);
    }
    let mut params = BTreeMap::new();
    for pair in rest.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("generator parameter `{pair}` is not key=value"))
        })?;
        params.insert(k.trim().to_owned(), v.trim().to_owned());
    }
    Ok(Some((name, params)))
}

fn generate(
    name: &str,
    params: &BTreeMap<String, String>,
    default_seed: u64,
) -> Result<CompactScene, CliError> {
    let get = |key: &str| params.get(key).map(String::as_str);
    let parse_f64 = |key: &str, default: f64| -> Result<f64, CliError> {
        match get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Usage(format!("{name}: bad {key} `{v}`"))),
        }
    };
    let parse_u64 = |key: &str, default: u64| -> Result<u64, CliError> {
        match get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Usage(format!("{name}: bad {key} `{v}`"))),
        }
    };
    for key in params.keys() {
        let known: &[&str] = match name {
            "cantor_discs" => &["depth", "ratio"],
            "random_discs" => &["n", "seed", "rmin", "rmax"],
            _ => &["n", "fill"],
        };
        if !known.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("{name}: unknown parameter `{key}`")));
        }
    }
    match name {
        "cantor_discs" => {
            let depth = parse_u64("depth", 2)? as u32;
            let ratio = parse_f64("ratio", 0.25)?;
            cantor_discs(depth, ratio)
        }
        "random_discs" => {
            let n = parse_u64("n", 8)? as usize;
            let seed = parse_u64("seed", default_seed)?;
            let rmin = parse_f64("rmin", 0.01)?;
            let rmax = parse_f64("rmax", 0.04)?;
            random_discs(n, seed, rmin, rmax)
        }
        _ => {
            let n = parse_u64("n", 3)? as usize;
            let fill = parse_f64("fill", 0.4)?;
            grid_squares(n, fill)
        }
    }
}

/// Cantor-dust discs: a side-0.7 square splits into its four corner squares
/// of side `ratio` times the parent, `depth` times over; each final cell
/// holds its inscribed disc. `4^depth` discs, all inside `{|z| < 1/2}`.
pub fn cantor_discs(depth: u32, ratio: f64) -> Result<CompactScene, CliError> {
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(CliError::Usage(format!(
            "cantor_discs: ratio must be in (0, 0.5), got {ratio}"
        )));
    }
    if depth > 5 {
        return Err(CliError::Usage(format!(
            "cantor_discs: depth {depth} would make {} discs",
            4f64.powi(depth as i32)
        )));
    }
    let mut cells = vec![(0.0f64, 0.0f64, 0.7f64)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(4 * cells.len());
        for &(x, y, s) in &cells {
            let off = 0.5 * s * (1.0 - ratio);
            let ns = s * ratio;
            for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
                next.push((x + sx * off, y + sy * off, ns));
            }
        }
        cells = next;
    }
    let components = cells
        .iter()
        .enumerate()
        .map(|(k, &(x, y, s))| Component {
            id: ComponentId::new(format!("c{k}")),
            shape: Shape::Disc(Disc::new(Point::new(x, y), 0.5 * s)),
        })
        .collect();
    CompactScene::new(components).map_err(|e| CliError::Usage(format!("cantor_discs: {e}")))
}

/// `n` non-overlapping random discs inside `{|z| < 0.48}`, radii in
/// `[rmin, rmax)`, reproducible from the seed.
pub fn random_discs(n: usize, seed: u64, rmin: f64, rmax: f64) -> Result<CompactScene, CliError> {
    if n == 0 || n > 64 {
        return Err(CliError::Usage(format!(
            "random_discs: n must be in 1..=64, got {n}"
        )));
    }
    if !(rmin > 0.0 && rmin < rmax && rmax <= 0.1) {
        return Err(CliError::Usage(format!(
            "random_discs: need 0 < rmin < rmax <= 0.1, got [{rmin}, {rmax})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut discs: Vec<Disc> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while discs.len() < n {
        attempts += 1;
        if attempts > 100_000 {
            return Err(CliError::Usage(format!(
                "random_discs: could not place {n} discs of radius [{rmin}, {rmax})"
            )));
        }
        let r: f64 = rng.gen_range(rmin..rmax);
        let x: f64 = rng.gen_range(-0.46..0.46);
        let y: f64 = rng.gen_range(-0.46..0.46);
        if x.hypot(y) + r > 0.48 {
            continue;
        }
        let p = Point::new(x, y);
        if discs.iter().any(|d| d.center.dist(p) < d.radius + r + 0.01) {
            continue;
        }
        discs.push(Disc::new(p, r));
    }
    let components = discs
        .iter()
        .enumerate()
        .map(|(k, d)| Component {
            id: ComponentId::new(format!("c{k}")),
            shape: Shape::Disc(*d),
        })
        .collect();
    CompactScene::new(components).map_err(|e| CliError::Usage(format!("random_discs: {e}")))
}

/// An `n` by `n` array of axis-parallel squares centered in the cells of a
/// regular grid over `[-0.3, 0.3]^2`; `fill` is the side as a fraction of
/// the cell pitch.
pub fn grid_squares(n: usize, fill: f64) -> Result<CompactScene, CliError> {
    if n == 0 || n > 8 {
        return Err(CliError::Usage(format!(
            "grid_squares: n must be in 1..=8, got {n}"
        )));
    }
    if !(fill > 0.0 && fill < 1.0) {
        return Err(CliError::Usage(format!(
            "grid_squares: fill must be in (0, 1), got {fill}"
        )));
    }
    let pitch = 0.6 / n as f64;
    let side = fill * pitch;
    let mut components = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let cx = -0.3 + (i as f64 + 0.5) * pitch;
            let cy = -0.3 + (j as f64 + 0.5) * pitch;
            let rect = Rect::square_from_f64(cx - 0.5 * side, cy - 0.5 * side, side)
                .map_err(|e| CliError::Usage(format!("grid_squares: {e}")))?;
            components.push(Component {
                id: ComponentId::new(format!("c{}", j * n + i)),
                shape: Shape::Rect(rect),
            });
        }
    }
    CompactScene::new(components).map_err(|e| CliError::Usage(format!("grid_squares: {e}")))
}

/// Parse `"x,y"` into a point.
pub fn parse_point(s: &str) -> Result<Point, CliError> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("point `{s}` is not x,y")))?;
    let parse = |v: &str| -> Result<f64, CliError> {
        v.trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad coordinate `{v}` in `{s}`")))
    };
    Ok(Point::new(parse(x)?, parse(y)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_depth_two_gives_sixteen_discs_inside_the_half_disc() {
        let scene = cantor_discs(2, 0.25).unwrap();
        assert_eq!(scene.len(), 16);
        for c in scene.components() {
            let Shape::Disc(d) = &c.shape else {
                panic!("expected discs")
            };
            assert!(d.center.norm() + d.radius < 0.5);
        }
    }

    #[test]
    fn random_scenes_are_reproducible_and_disjoint() {
        let a = random_discs(8, 1, 0.01, 0.04).unwrap();
        let b = random_discs(8, 1, 0.01, 0.04).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_discs(8, 2, 0.01, 0.04).unwrap());
        let discs: Vec<Disc> = a
            .components()
            .iter()
            .map(|c| match &c.shape {
                Shape::Disc(d) => *d,
                _ => panic!("expected discs"),
            })
            .collect();
        for (i, d) in discs.iter().enumerate() {
            assert!(d.center.norm() + d.radius < 0.5);
            for other in &discs[i + 1..] {
                assert!(d.center.dist(other.center) > d.radius + other.radius);
            }
        }
    }

    #[test]
    fn generator_specs_parse_keys_and_reject_junk() {
        assert!(load_scene("cantor_discs:depth=1,ratio=0.3", 1).is_ok());
        assert_eq!(load_scene("grid_squares:n=2", 1).unwrap().len(), 4);
        assert!(matches!(
            load_scene("cantor_discs:depth", 1),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            load_scene("random_discs:nope=3", 1),
            Err(CliError::Usage(_))
        ));
        // unknown name falls through to file lookup
        assert!(matches!(
            load_scene("no_such_generator:n=1", 1),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn grid_squares_fit_the_pipeline_bounds() {
        let scene = grid_squares(3, 0.4).unwrap();
        assert_eq!(scene.len(), 9);
        for c in scene.components() {
            let Shape::Rect(r) = &c.shape else {
                panic!("expected squares")
            };
            for corner in r.corners() {
                assert!(corner.norm() < 0.5);
            }
        }
    }
}
