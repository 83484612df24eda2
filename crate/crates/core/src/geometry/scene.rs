use super::{Point, Rect};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Closed disc with positive radius.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Disc {
    pub center: Point,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Point, radius: f64) -> Disc {
        Disc { center, radius }
    }

    pub fn contains_point(&self, p: Point) -> bool {
        p.dist_sq(self.center) <= self.radius * self.radius
    }

    pub fn contains_point_strict(&self, p: Point) -> bool {
        p.dist_sq(self.center) < self.radius * self.radius
    }
}

/// Identifier of a scene component; unique within a scene.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComponentId(pub String);

impl ComponentId {
    pub fn new(s: impl Into<String>) -> ComponentId {
        ComponentId(s.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ComponentId {
    fn from(s: &str) -> ComponentId {
        ComponentId(s.to_owned())
    }
}

/// Atomic scene shape. Squares from input files and lattice constructions are
/// stored as exact rectangles; discs carry solver-produced `f64` data.
#[derive(Clone, PartialEq, Debug)]
pub enum Shape {
    Disc(Disc),
    Rect(Rect),
}

impl Shape {
    pub fn bounding(&self) -> (Point, Point) {
        match self {
            Shape::Disc(d) => (
                Point::new(d.center.x - d.radius, d.center.y - d.radius),
                Point::new(d.center.x + d.radius, d.center.y + d.radius),
            ),
            Shape::Rect(r) => (Point::new(r.fx0(), r.fy0()), Point::new(r.fx1(), r.fy1())),
        }
    }

    pub fn contains_point_strict(&self, p: Point) -> bool {
        match self {
            Shape::Disc(d) => d.contains_point_strict(p),
            Shape::Rect(r) => r.contains_point_strict(p),
        }
    }

    pub fn contains_point(&self, p: Point) -> bool {
        match self {
            Shape::Disc(d) => d.contains_point(p),
            Shape::Rect(r) => r.contains_point(p),
        }
    }

    /// Distance from an outside point to the shape boundary (0 if inside).
    pub fn boundary_clearance(&self, p: Point) -> f64 {
        match self {
            Shape::Disc(d) => (p.dist(d.center) - d.radius).abs(),
            Shape::Rect(r) => {
                let dx = (r.fx0() - p.x).max(p.x - r.fx1()).max(0.0);
                let dy = (r.fy0() - p.y).max(p.y - r.fy1()).max(0.0);
                if dx > 0.0 || dy > 0.0 {
                    dx.hypot(dy)
                } else {
                    // inside: distance to the nearest edge
                    (p.x - r.fx0())
                        .min(r.fx1() - p.x)
                        .min(p.y - r.fy0())
                        .min(r.fy1() - p.y)
                }
            }
        }
    }
}

/// One identified component of a compact scene.
#[derive(Clone, PartialEq, Debug)]
pub struct Component {
    pub id: ComponentId,
    pub shape: Shape,
}

/// A compact planar set given as a finite union of closed discs and
/// axis-parallel rectangles with unique ids and positive capacity each.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct CompactScene {
    components: Vec<Component>,
}

impl CompactScene {
    pub fn new(components: Vec<Component>) -> Result<CompactScene> {
        if components.is_empty() {
            return Err(Error::EmptyScene);
        }
        let mut seen = BTreeSet::new();
        for c in &components {
            if !seen.insert(c.id.clone()) {
                return Err(Error::DuplicateComponentId(c.id.0.clone()));
            }
            match &c.shape {
                Shape::Disc(d) => {
                    if !(d.radius > 0.0) || !d.center.is_finite() || !d.radius.is_finite() {
                        return Err(Error::DegenerateComponent {
                            id: c.id.0.clone(),
                            reason: format!("disc radius {} must be finite positive", d.radius),
                        });
                    }
                }
                Shape::Rect(_) => {} // Rect construction already enforces positive area
            }
        }
        Ok(CompactScene { components })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn get(&self, id: &ComponentId) -> Option<&Component> {
        self.components.iter().find(|c| &c.id == id)
    }

    pub fn contains_point_strict(&self, p: Point) -> Option<&Component> {
        self.components
            .iter()
            .find(|c| c.shape.contains_point_strict(p))
    }

    /// Axis-parallel bounding box of the whole scene.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for c in &self.components {
            let (a, b) = c.shape.bounding();
            lo.x = lo.x.min(a.x);
            lo.y = lo.y.min(a.y);
            hi.x = hi.x.max(b.x);
            hi.y = hi.y.max(b.y);
        }
        (lo, hi)
    }

    pub fn diameter_bound(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi.x - lo.x).hypot(hi.y - lo.y)
    }

    /// Centroid of component centers; a cheap interior reference point.
    pub fn centroid(&self) -> Point {
        let mut x = 0.0;
        let mut y = 0.0;
        for c in &self.components {
            let p = match &c.shape {
                Shape::Disc(d) => d.center,
                Shape::Rect(r) => r.center(),
            };
            x += p.x;
            y += p.y;
        }
        let n = self.components.len() as f64;
        Point::new(x / n, y / n)
    }

    /// Scene with the listed ids removed; `None` if that would empty it.
    pub fn without(&self, ids: &BTreeSet<ComponentId>) -> Option<CompactScene> {
        let rest: Vec<Component> = self
            .components
            .iter()
            .filter(|c| !ids.contains(&c.id))
            .cloned()
            .collect();
        if rest.is_empty() {
            None
        } else {
            Some(CompactScene { components: rest })
        }
    }

    pub fn with_component(&self, c: Component) -> Result<CompactScene> {
        let mut components = self.components.clone();
        components.push(c);
        CompactScene::new(components)
    }

    pub fn to_json(&self) -> SceneFile {
        SceneFile {
            components: self
                .components
                .iter()
                .map(|c| match &c.shape {
                    Shape::Disc(d) => ComponentFile {
                        id: c.id.0.clone(),
                        disc: Some(DiscFile {
                            cx: d.center.x,
                            cy: d.center.y,
                            r: d.radius,
                        }),
                        square: None,
                    },
                    Shape::Rect(r) => ComponentFile {
                        id: c.id.0.clone(),
                        disc: None,
                        square: Some(SquareFile {
                            x0: r.fx0(),
                            y0: r.fy0(),
                            side: r.width().max(r.height()),
                        }),
                    },
                })
                .collect(),
        }
    }

    pub fn from_json(file: SceneFile) -> Result<CompactScene> {
        let mut components = Vec::new();
        for c in file.components {
            let shape = match (c.disc, c.square) {
                (Some(d), None) => Shape::Disc(Disc::new(Point::new(d.cx, d.cy), d.r)),
                (None, Some(s)) => {
                    if !(s.side > 0.0) || !s.side.is_finite() {
                        return Err(Error::DegenerateComponent {
                            id: c.id,
                            reason: format!("square side {} must be finite positive", s.side),
                        });
                    }
                    Shape::Rect(Rect::square_from_f64(s.x0, s.y0, s.side)?)
                }
                _ => {
                    return Err(Error::DegenerateComponent {
                        id: c.id,
                        reason: "component must have exactly one of `disc`, `square`".into(),
                    })
                }
            };
            components.push(Component {
                id: ComponentId(c.id),
                shape,
            });
        }
        CompactScene::new(components)
    }
}

/// On-disk scene schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SceneFile {
    pub components: Vec<ComponentFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentFile {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disc: Option<DiscFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub square: Option<SquareFile>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DiscFile {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SquareFile {
    pub x0: f64,
    pub y0: f64,
    pub side: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scene_validation_rejects_bad_input() {
        assert!(matches!(CompactScene::new(vec![]), Err(Error::EmptyScene)));
        let d = Component {
            id: "a".into(),
            shape: Shape::Disc(Disc::new(Point::new(0.0, 0.0), 0.1)),
        };
        let dup = CompactScene::new(vec![d.clone(), d.clone()]);
        assert!(matches!(dup, Err(Error::DuplicateComponentId(_))));
        let zero = Component {
            id: "z".into(),
            shape: Shape::Disc(Disc::new(Point::new(0.0, 0.0), 0.0)),
        };
        assert!(CompactScene::new(vec![zero]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let scene = CompactScene::new(vec![
            Component {
                id: "c0".into(),
                shape: Shape::Disc(Disc::new(Point::new(0.1, -0.2), 0.05)),
            },
            Component {
                id: "c1".into(),
                shape: Shape::Rect(Rect::square_from_f64(-0.3, -0.3, 0.125).unwrap()),
            },
        ])
        .unwrap();
        let text = serde_json::to_string(&scene.to_json()).unwrap();
        let back = CompactScene::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(scene, back);
    }

    #[test]
    fn json_requires_exactly_one_shape() {
        let bad = r#"{"components":[{"id":"x"}]}"#;
        let file: SceneFile = serde_json::from_str(bad).unwrap();
        assert!(CompactScene::from_json(file).is_err());
    }
}
