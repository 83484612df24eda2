//! Exact intersection of scene components with a rectangular window.
//!
//! A component clipped by an axis-parallel rectangle stays convex, so its
//! boundary is a single closed curve made of circular arcs and axis-parallel
//! segments. Those pieces are what the collocation mesher consumes: each
//! piece knows its length and can be sampled by arclength parameter.

use super::{relation, CompactScene, ComponentId, Disc, Point, Rect, Relation, Shape};
use crate::error::Result;
use serde::{Deserialize, Serialize};

/// Pieces below this fraction of the local scale are dropped as numerical
/// dust (tangencies, corner grazes).
const DUST: f64 = 1e-15;

/// One smooth piece of a clipped component boundary.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPiece {
    /// Full circle of a disc untouched by the window.
    Circle { center: Point, radius: f64 },
    /// Counterclockwise arc: angles `start..start + sweep`, `sweep > 0`.
    Arc {
        center: Point,
        radius: f64,
        start: f64,
        sweep: f64,
    },
    /// Straight segment (axis-parallel in practice).
    Segment { a: Point, b: Point },
}

impl BoundaryPiece {
    pub fn length(&self) -> f64 {
        match *self {
            BoundaryPiece::Circle { radius, .. } => std::f64::consts::TAU * radius,
            BoundaryPiece::Arc { radius, sweep, .. } => radius * sweep,
            BoundaryPiece::Segment { a, b } => a.dist(b),
        }
    }

    /// Point at arclength fraction `t` in `[0, 1]`.
    pub fn point_at(&self, t: f64) -> Point {
        match *self {
            BoundaryPiece::Circle { center, radius } => {
                let th = std::f64::consts::TAU * t;
                Point::new(center.x + radius * th.cos(), center.y + radius * th.sin())
            }
            BoundaryPiece::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let th = start + sweep * t;
                Point::new(center.x + radius * th.cos(), center.y + radius * th.sin())
            }
            BoundaryPiece::Segment { a, b } => Point::new(
                a.x + (b.x - a.x) * t,
                a.y + (b.y - a.y) * t,
            ),
        }
    }
}

/// One component after clipping: the original shape, the window it was
/// clipped by (if any), and the boundary pieces of the intersection.
#[derive(Clone, Debug)]
pub struct ClippedRegion {
    pub base: Shape,
    pub window: Option<Rect>,
    pub pieces: Vec<BoundaryPiece>,
}

impl ClippedRegion {
    pub fn boundary_len(&self) -> f64 {
        self.pieces.iter().map(|p| p.length()).sum()
    }

    /// Closed membership in the clipped set.
    pub fn contains_point(&self, p: Point) -> bool {
        self.base.contains_point(p)
            && self.window.as_ref().map_or(true, |w| w.contains_point(p))
    }

    /// Open membership in the clipped set.
    pub fn contains_point_strict(&self, p: Point) -> bool {
        self.base.contains_point_strict(p)
            && self
                .window
                .as_ref()
                .map_or(true, |w| w.contains_point_strict(p))
    }
}

/// A scene restricted to a window. Components whose intersection with the
/// window is empty or a single point are omitted.
#[derive(Clone, Debug)]
pub struct Clipped {
    pub components: Vec<(ComponentId, ClippedRegion)>,
}

impl Clipped {
    /// Wrap a whole scene with no window: every component keeps its full
    /// boundary.
    pub fn from_scene(scene: &CompactScene) -> Clipped {
        let components = scene
            .components()
            .iter()
            .map(|c| {
                (
                    c.id.clone(),
                    ClippedRegion {
                        base: c.shape.clone(),
                        window: None,
                        pieces: full_boundary(&c.shape),
                    },
                )
            })
            .collect();
        Clipped { components }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn total_boundary_len(&self) -> f64 {
        self.components.iter().map(|(_, r)| r.boundary_len()).sum()
    }

    /// Closed membership in the union of clipped components.
    pub fn contains_point(&self, p: Point) -> bool {
        self.components.iter().any(|(_, r)| r.contains_point(p))
    }
}

fn full_boundary(shape: &Shape) -> Vec<BoundaryPiece> {
    match shape {
        Shape::Disc(d) => vec![BoundaryPiece::Circle {
            center: d.center,
            radius: d.radius,
        }],
        Shape::Rect(r) => rect_segments(r),
    }
}

fn rect_segments(r: &Rect) -> Vec<BoundaryPiece> {
    let [a, b, c, d] = r.corners();
    vec![
        BoundaryPiece::Segment { a, b },
        BoundaryPiece::Segment { a: b, b: c },
        BoundaryPiece::Segment { a: c, b: d },
        BoundaryPiece::Segment { a: d, b: a },
    ]
}

/// Clip every scene component by `window`. Components that miss the window
/// (or touch it in a single point) are dropped from the result.
pub fn clip(scene: &CompactScene, window: &Rect) -> Result<Clipped> {
    let mut components = Vec::new();
    for c in scene.components() {
        let region = match relation(&c.shape, window) {
            Relation::Disjoint => continue,
            Relation::AInsideB => ClippedRegion {
                base: c.shape.clone(),
                window: Some(window.clone()),
                pieces: full_boundary(&c.shape),
            },
            Relation::BInsideA => ClippedRegion {
                base: c.shape.clone(),
                window: Some(window.clone()),
                pieces: rect_segments(window),
            },
            Relation::BoundaryOverlap => match &c.shape {
                Shape::Rect(r) => match clip_rect(r, window) {
                    Some(pieces) => ClippedRegion {
                        base: c.shape.clone(),
                        window: Some(window.clone()),
                        pieces,
                    },
                    None => continue,
                },
                Shape::Disc(d) => {
                    let pieces = clip_disc(d, window);
                    if pieces.is_empty() {
                        continue;
                    }
                    ClippedRegion {
                        base: c.shape.clone(),
                        window: Some(window.clone()),
                        pieces,
                    }
                }
            },
        };
        components.push((c.id.clone(), region));
    }
    Ok(Clipped { components })
}

/// Rect-rect intersection in exact dyadic arithmetic. A degenerate overlap
/// (zero width or height) becomes a single segment; a point overlap is
/// dropped.
fn clip_rect(r: &Rect, window: &Rect) -> Option<Vec<BoundaryPiece>> {
    let (x0, y0, x1, y1) = r.intersect_allow_degenerate(window)?;
    let (fx0, fy0, fx1, fy1) = (x0.to_f64(), y0.to_f64(), x1.to_f64(), y1.to_f64());
    let w = fx1 - fx0;
    let h = fy1 - fy0;
    if w > 0.0 && h > 0.0 {
        let rect = Rect::new(x0, y0, x1, y1);
        Some(rect_segments(&rect))
    } else if w > 0.0 {
        Some(vec![BoundaryPiece::Segment {
            a: Point::new(fx0, fy0),
            b: Point::new(fx1, fy0),
        }])
    } else if h > 0.0 {
        Some(vec![BoundaryPiece::Segment {
            a: Point::new(fx0, fy0),
            b: Point::new(fx0, fy1),
        }])
    } else {
        None
    }
}

/// Disc-rect intersection boundary: circle arcs inside the closed window
/// plus window-edge chords inside the closed disc.
fn clip_disc(d: &Disc, window: &Rect) -> Vec<BoundaryPiece> {
    let scale = d.radius.max(window.diameter());
    let min_len = DUST * scale;
    let mut pieces = Vec::new();

    // Angles where the circle crosses the window boundary.
    let mut events = crossing_angles(d, window);
    events.sort_by(|a, b| a.total_cmp(b));
    events.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if events.len() > 1 {
        let wrap = events[0] + std::f64::consts::TAU;
        if (wrap - *events.last().unwrap()).abs() < 1e-12 {
            events.pop();
        }
    }

    if events.is_empty() {
        // No crossings: the circle is entirely inside or entirely outside
        // the closed window (up to a tangency point). Two distinct probe
        // points cannot both be the tangency point.
        let p0 = circle_point(d, 0.0);
        let p1 = circle_point(d, 2.0);
        if window.contains_point(p0) && window.contains_point(p1) {
            pieces.push(BoundaryPiece::Circle {
                center: d.center,
                radius: d.radius,
            });
        }
    } else {
        let m = events.len();
        let mut arcs = Vec::new();
        for i in 0..m {
            let a = events[i];
            let mut b = events[(i + 1) % m];
            if b <= a {
                b += std::f64::consts::TAU;
            }
            let mid = circle_point(d, (a + b) * 0.5);
            if window.contains_point(mid) && (b - a) * d.radius > min_len {
                arcs.push((a, b - a));
            }
        }
        if arcs.len() == 1 && arcs[0].1 >= std::f64::consts::TAU - 1e-12 {
            pieces.push(BoundaryPiece::Circle {
                center: d.center,
                radius: d.radius,
            });
        } else {
            for (start, sweep) in arcs {
                pieces.push(BoundaryPiece::Arc {
                    center: d.center,
                    radius: d.radius,
                    start,
                    sweep,
                });
            }
        }
    }

    // Window-edge chords inside the closed disc.
    for seg in edge_chords(d, window) {
        if seg.0.dist(seg.1) > min_len {
            pieces.push(BoundaryPiece::Segment { a: seg.0, b: seg.1 });
        }
    }
    pieces
}

fn circle_point(d: &Disc, angle: f64) -> Point {
    Point::new(
        d.center.x + d.radius * angle.cos(),
        d.center.y + d.radius * angle.sin(),
    )
}

/// Angles (in `(-pi, pi]`) where the circle meets the window's boundary:
/// intersections with each edge line whose point lies within the edge span.
fn crossing_angles(d: &Disc, window: &Rect) -> Vec<f64> {
    let (cx, cy, r) = (d.center.x, d.center.y, d.radius);
    let mut out = Vec::new();

    let mut vertical = |x: f64| {
        let dx = x - cx;
        let disc = r * r - dx * dx;
        if disc >= 0.0 {
            let h = disc.sqrt();
            for y in [cy - h, cy + h] {
                if y >= window.fy0() && y <= window.fy1() {
                    out.push((y - cy).atan2(dx));
                }
            }
        }
    };
    vertical(window.fx0());
    vertical(window.fx1());

    let mut horizontal = |y: f64| {
        let dy = y - cy;
        let disc = r * r - dy * dy;
        if disc >= 0.0 {
            let h = disc.sqrt();
            for x in [cx - h, cx + h] {
                if x >= window.fx0() && x <= window.fx1() {
                    out.push(dy.atan2(x - cx));
                }
            }
        }
    };
    horizontal(window.fy0());
    horizontal(window.fy1());

    out
}

/// For each window edge, the portion lying inside the closed disc.
fn edge_chords(d: &Disc, window: &Rect) -> Vec<(Point, Point)> {
    let (cx, cy, r) = (d.center.x, d.center.y, d.radius);
    let mut out = Vec::new();

    // horizontal edges: y fixed, x in [x0, x1]
    for y in [window.fy0(), window.fy1()] {
        let dy = y - cy;
        let disc = r * r - dy * dy;
        if disc > 0.0 {
            let h = disc.sqrt();
            let lo = (cx - h).max(window.fx0());
            let hi = (cx + h).min(window.fx1());
            if hi > lo {
                out.push((Point::new(lo, y), Point::new(hi, y)));
            }
        }
    }
    // vertical edges: x fixed, y in [y0, y1]
    for x in [window.fx0(), window.fx1()] {
        let dx = x - cx;
        let disc = r * r - dx * dx;
        if disc > 0.0 {
            let h = disc.sqrt();
            let lo = (cy - h).max(window.fy0());
            let hi = (cy + h).min(window.fy1());
            if hi > lo {
                out.push((Point::new(x, lo), Point::new(x, hi)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Component;
    use approx::assert_relative_eq;

    fn disc_scene(cx: f64, cy: f64, r: f64) -> CompactScene {
        CompactScene::new(vec![Component {
            id: ComponentId::new("d"),
            shape: Shape::Disc(Disc::new(Point::new(cx, cy), r)),
        }])
        .unwrap()
    }

    #[test]
    fn untouched_disc_keeps_full_circle() {
        let scene = disc_scene(0.0, 0.0, 1.0);
        let window = Rect::from_f64(-2.0, -2.0, 2.0, 2.0).unwrap();
        let clipped = clip(&scene, &window).unwrap();
        assert_eq!(clipped.components.len(), 1);
        let region = &clipped.components[0].1;
        assert_eq!(region.pieces.len(), 1);
        assert_relative_eq!(
            region.boundary_len(),
            std::f64::consts::TAU,
            max_relative = 1e-14
        );
    }

    #[test]
    fn disjoint_window_drops_component() {
        let scene = disc_scene(0.0, 0.0, 1.0);
        let window = Rect::from_f64(5.0, 5.0, 6.0, 6.0).unwrap();
        let clipped = clip(&scene, &window).unwrap();
        assert!(clipped.is_empty());
    }

    #[test]
    fn half_disc_boundary_length() {
        // window keeps x >= 0: a half-disc bounded by a semicircle and a
        // diameter chord
        let scene = disc_scene(0.0, 0.0, 1.0);
        let window = Rect::from_f64(0.0, -2.0, 2.0, 2.0).unwrap();
        let clipped = clip(&scene, &window).unwrap();
        let region = &clipped.components[0].1;
        let arcs: f64 = region
            .pieces
            .iter()
            .filter(|p| matches!(p, BoundaryPiece::Arc { .. }))
            .map(|p| p.length())
            .sum();
        let segs: f64 = region
            .pieces
            .iter()
            .filter(|p| matches!(p, BoundaryPiece::Segment { .. }))
            .map(|p| p.length())
            .sum();
        assert_relative_eq!(arcs, std::f64::consts::PI, max_relative = 1e-12);
        assert_relative_eq!(segs, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn quarter_disc_boundary_length() {
        let scene = disc_scene(0.0, 0.0, 1.0);
        let window = Rect::from_f64(0.0, 0.0, 2.0, 2.0).unwrap();
        let clipped = clip(&scene, &window).unwrap();
        let region = &clipped.components[0].1;
        assert_relative_eq!(
            region.boundary_len(),
            std::f64::consts::FRAC_PI_2 + 2.0,
            max_relative = 1e-12
        );
        // membership respects both the disc and the window
        assert!(region.contains_point(Point::new(0.3, 0.3)));
        assert!(!region.contains_point(Point::new(-0.3, 0.3)));
        assert!(!region.contains_point(Point::new(0.9, 0.9)));
    }

    #[test]
    fn window_inside_disc_gives_window_perimeter() {
        let scene = disc_scene(0.0, 0.0, 10.0);
        let window = Rect::from_f64(-1.0, -1.0, 1.0, 1.0).unwrap();
        let clipped = clip(&scene, &window).unwrap();
        let region = &clipped.components[0].1;
        assert_eq!(region.pieces.len(), 4);
        assert_relative_eq!(region.boundary_len(), 8.0, max_relative = 1e-14);
    }

    #[test]
    fn rect_component_clips_exactly() {
        let scene = CompactScene::new(vec![Component {
            id: ComponentId::new("q"),
            shape: Shape::Rect(Rect::from_f64(0.0, 0.0, 1.0, 1.0).unwrap()),
        }])
        .unwrap();
        let window = Rect::from_f64(0.5, 0.5, 2.0, 2.0).unwrap();
        let clipped = clip(&scene, &window).unwrap();
        let region = &clipped.components[0].1;
        assert_relative_eq!(region.boundary_len(), 2.0, max_relative = 1e-15);

        // shared-edge overlap degenerates to a segment
        let edge_window = Rect::from_f64(1.0, 0.25, 2.0, 0.75).unwrap();
        let clipped = clip(&scene, &edge_window).unwrap();
        let region = &clipped.components[0].1;
        assert_eq!(region.pieces.len(), 1);
        assert_relative_eq!(region.boundary_len(), 0.5, max_relative = 1e-15);

        // corner-point overlap is dropped
        let corner_window = Rect::from_f64(1.0, 1.0, 2.0, 2.0).unwrap();
        assert!(clip(&scene, &corner_window).unwrap().is_empty());
    }

    #[test]
    fn internal_tangency_keeps_full_circle() {
        // disc inside the window, tangent to the edge x = 1
        let scene = disc_scene(0.5, 0.0, 0.5);
        let window = Rect::from_f64(-1.0, -1.0, 1.0, 1.0).unwrap();
        let clipped = clip(&scene, &window).unwrap();
        let region = &clipped.components[0].1;
        assert!(matches!(region.pieces[0], BoundaryPiece::Circle { .. }));
        let chords: f64 = region
            .pieces
            .iter()
            .filter(|p| matches!(p, BoundaryPiece::Segment { .. }))
            .map(|p| p.length())
            .sum();
        assert_relative_eq!(chords, 0.0);
    }

    #[test]
    fn external_tangency_is_empty() {
        // disc outside the window, tangent to the edge x = 1 at (1, 0)
        let scene = disc_scene(1.5, 0.0, 0.5);
        let window = Rect::from_f64(-1.0, -1.0, 1.0, 1.0).unwrap();
        let clipped = clip(&scene, &window).unwrap();
        assert!(clipped.is_empty());
    }

    #[test]
    fn piece_sampling_stays_on_boundary() {
        let d = Disc::new(Point::new(0.2, -0.1), 0.7);
        let arc = BoundaryPiece::Arc {
            center: d.center,
            radius: d.radius,
            start: 0.3,
            sweep: 1.9,
        };
        for k in 0..10 {
            let p = arc.point_at(k as f64 / 9.0);
            assert_relative_eq!(p.dist(d.center), 0.7, max_relative = 1e-14);
        }
        let seg = BoundaryPiece::Segment {
            a: Point::new(0.0, 0.0),
            b: Point::new(2.0, 0.0),
        };
        assert_relative_eq!(seg.point_at(0.25).x, 0.5);
        assert_relative_eq!(seg.length(), 2.0);
    }
}
