use super::{Disc, Rect, Shape};
use serde::{Deserialize, Serialize};

/// Closed-set classification of a shape `a` against a rectangle `b`.
///
/// Tangency counts as `BoundaryOverlap`: the sets are closed, so a single
/// shared boundary point is a non-empty intersection that is neither strict
/// containment nor disjointness.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Disjoint,
    AInsideB,
    BInsideA,
    BoundaryOverlap,
}

/// Classify shape `a` against rectangle `b` with closed-set semantics:
/// `AInsideB`/`BInsideA` require containment in the *interior* (no boundary
/// contact); everything that is neither disjoint nor strictly nested is
/// `BoundaryOverlap`.
pub fn relation(a: &Shape, b: &Rect) -> Relation {
    match a {
        Shape::Rect(r) => rect_rect(r, b),
        Shape::Disc(d) => disc_rect(d, b),
    }
}

fn rect_rect(a: &Rect, b: &Rect) -> Relation {
    if !a.meets(b) {
        Relation::Disjoint
    } else if a.inside_open(b) {
        Relation::AInsideB
    } else if b.inside_open(a) {
        Relation::BInsideA
    } else {
        Relation::BoundaryOverlap
    }
}

fn disc_rect(d: &Disc, b: &Rect) -> Relation {
    let (cx, cy, r) = (d.center.x, d.center.y, d.radius);
    // squared distance from the center to the closed rectangle
    let dx = (b.fx0() - cx).max(cx - b.fx1()).max(0.0);
    let dy = (b.fy0() - cy).max(cy - b.fy1()).max(0.0);
    if dx * dx + dy * dy > r * r {
        return Relation::Disjoint;
    }
    let strictly_inside = cx - r > b.fx0() && cx + r < b.fx1() && cy - r > b.fy0() && cy + r < b.fy1();
    if strictly_inside {
        return Relation::AInsideB;
    }
    let rect_inside_disc = b
        .corners()
        .iter()
        .all(|p| p.dist_sq(d.center) < r * r);
    if rect_inside_disc {
        return Relation::BInsideA;
    }
    Relation::BoundaryOverlap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn unit() -> Rect {
        Rect::from_f64(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    fn disc(cx: f64, cy: f64, r: f64) -> Shape {
        Shape::Disc(Disc::new(Point::new(cx, cy), r))
    }

    #[test]
    fn disc_cases() {
        assert_eq!(relation(&disc(0.5, 0.5, 0.1), &unit()), Relation::AInsideB);
        assert_eq!(relation(&disc(3.0, 0.0, 0.5), &unit()), Relation::Disjoint);
        // centered on an edge
        assert_eq!(
            relation(&disc(0.0, 0.5, 0.1), &unit()),
            Relation::BoundaryOverlap
        );
        // externally tangent to the edge x = 1
        assert_eq!(
            relation(&disc(1.25, 0.5, 0.25), &unit()),
            Relation::BoundaryOverlap
        );
        // internally tangent
        assert_eq!(
            relation(&disc(0.5, 0.5, 0.5), &unit()),
            Relation::BoundaryOverlap
        );
        // rectangle strictly inside a big disc
        assert_eq!(relation(&disc(0.5, 0.5, 2.0), &unit()), Relation::BInsideA);
        // disc through the corner region only
        assert_eq!(
            relation(&disc(1.2, 1.2, 0.3), &unit()),
            Relation::BoundaryOverlap
        );
    }

    #[test]
    fn rect_cases() {
        let inner = Shape::Rect(Rect::from_f64(0.25, 0.25, 0.75, 0.75).unwrap());
        assert_eq!(relation(&inner, &unit()), Relation::AInsideB);
        let outer = Shape::Rect(Rect::from_f64(-1.0, -1.0, 2.0, 2.0).unwrap());
        assert_eq!(relation(&outer, &unit()), Relation::BInsideA);
        let off = Shape::Rect(Rect::from_f64(2.0, 2.0, 3.0, 3.0).unwrap());
        assert_eq!(relation(&off, &unit()), Relation::Disjoint);
        // shares the edge x = 1: touching, so boundary overlap
        let touch = Shape::Rect(Rect::from_f64(1.0, 0.0, 2.0, 1.0).unwrap());
        assert_eq!(relation(&touch, &unit()), Relation::BoundaryOverlap);
        // equal rectangles touch their shared boundary
        let same = Shape::Rect(unit());
        assert_eq!(relation(&same, &unit()), Relation::BoundaryOverlap);
        // flush against the inside of an edge
        let flush = Shape::Rect(Rect::from_f64(0.0, 0.25, 0.5, 0.75).unwrap());
        assert_eq!(relation(&flush, &unit()), Relation::BoundaryOverlap);
    }

    #[test]
    fn translation_invariance_on_the_lattice() {
        // exact translation by multiples of 2^-3 must preserve classification
        let b = Rect::from_f64(0.0, 0.0, 0.5, 0.5).unwrap();
        let a = disc(0.25, 0.25, 0.125);
        let base = relation(&a, &b);
        for k in -4i32..=4 {
            let t = k as f64 * 0.125;
            let bt = Rect::from_f64(0.0 + t, 0.0 + t, 0.5 + t, 0.5 + t).unwrap();
            let at = disc(0.25 + t, 0.25 + t, 0.125);
            assert_eq!(relation(&at, &bt), base);
        }
    }
}
