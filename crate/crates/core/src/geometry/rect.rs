use super::{Dyadic, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Closed axis-parallel rectangle with exact dyadic corners, positive area.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Rect {
    pub x0: Dyadic,
    pub y0: Dyadic,
    pub x1: Dyadic,
    pub y1: Dyadic,
}

impl Rect {
    pub fn new(x0: Dyadic, y0: Dyadic, x1: Dyadic, y1: Dyadic) -> Rect {
        assert!(x0 < x1 && y0 < y1, "rectangle must have positive area");
        Rect { x0, y0, x1, y1 }
    }

    /// Exact rectangle from finite `f64` corners (every finite f64 is dyadic).
    pub fn from_f64(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Rect> {
        let conv = |v: f64| Dyadic::from_f64(v).ok_or(Error::NonFinite { context: "rect" });
        let (x0, y0, x1, y1) = (conv(x0)?, conv(y0)?, conv(x1)?, conv(y1)?);
        if x0 >= x1 || y0 >= y1 {
            return Err(Error::DegenerateComponent {
                id: String::new(),
                reason: "rectangle has non-positive extent".into(),
            });
        }
        Ok(Rect { x0, y0, x1, y1 })
    }

    pub fn square_from_f64(x0: f64, y0: f64, side: f64) -> Result<Rect> {
        Rect::from_f64(x0, y0, x0 + side, y0 + side)
    }

    pub fn fx0(&self) -> f64 {
        self.x0.to_f64()
    }
    pub fn fy0(&self) -> f64 {
        self.y0.to_f64()
    }
    pub fn fx1(&self) -> f64 {
        self.x1.to_f64()
    }
    pub fn fy1(&self) -> f64 {
        self.y1.to_f64()
    }

    pub fn width(&self) -> f64 {
        self.fx1() - self.fx0()
    }
    pub fn height(&self) -> f64 {
        self.fy1() - self.fy0()
    }

    pub fn center(&self) -> Point {
        Point::new(
            self.x0.add(self.x1).half().to_f64(),
            self.y0.add(self.y1).half().to_f64(),
        )
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.fx0(), self.fy0()),
            Point::new(self.fx1(), self.fy0()),
            Point::new(self.fx1(), self.fy1()),
            Point::new(self.fx0(), self.fy1()),
        ]
    }

    /// Closed-set membership.
    pub fn contains_point(&self, p: Point) -> bool {
        p.x >= self.fx0() && p.x <= self.fx1() && p.y >= self.fy0() && p.y <= self.fy1()
    }

    /// Open-set (interior) membership.
    pub fn contains_point_strict(&self, p: Point) -> bool {
        p.x > self.fx0() && p.x < self.fx1() && p.y > self.fy0() && p.y < self.fy1()
    }

    /// Exact closed intersection; `None` when disjoint or degenerate to a point,
    /// `Some(Err(segment))` is not modelled — degenerate slices are reported
    /// through `intersect_allow_degenerate`.
    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let x0 = self.x0.max(other.x0);
        let y0 = self.y0.max(other.y0);
        let x1 = self.x1.min(other.x1);
        let y1 = self.y1.min(other.y1);
        if x0 < x1 && y0 < y1 {
            Some(Rect { x0, y0, x1, y1 })
        } else {
            None
        }
    }

    /// Exact closed intersection keeping degenerate (zero-width or zero-height)
    /// results: returns corner pairs `((x0,y0),(x1,y1))` when sets touch.
    pub fn intersect_allow_degenerate(&self, other: &Rect) -> Option<(Dyadic, Dyadic, Dyadic, Dyadic)> {
        let x0 = self.x0.max(other.x0);
        let y0 = self.y0.max(other.y0);
        let x1 = self.x1.min(other.x1);
        let y1 = self.y1.min(other.y1);
        if x0 <= x1 && y0 <= y1 {
            Some((x0, y0, x1, y1))
        } else {
            None
        }
    }

    /// `self` contained in the closed `other`.
    pub fn inside_closed(&self, other: &Rect) -> bool {
        self.x0 >= other.x0 && self.x1 <= other.x1 && self.y0 >= other.y0 && self.y1 <= other.y1
    }

    /// `self` contained in the interior of `other`.
    pub fn inside_open(&self, other: &Rect) -> bool {
        self.x0 > other.x0 && self.x1 < other.x1 && self.y0 > other.y0 && self.y1 < other.y1
    }

    /// Closed sets share at least one point.
    pub fn meets(&self, other: &Rect) -> bool {
        self.x0 <= other.x1 && other.x0 <= self.x1 && self.y0 <= other.y1 && other.y0 <= self.y1
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }
}

/// A square of the dyadic lattice: side `2^-scale`, lower-left corner
/// `(i, j) * 2^-scale`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct DyadicSquare {
    pub scale: u32,
    pub i: i64,
    pub j: i64,
}

impl DyadicSquare {
    pub fn side(&self) -> f64 {
        2f64.powi(-(self.scale as i32))
    }

    pub fn rect(&self) -> Rect {
        let s = self.scale;
        Rect {
            x0: Dyadic::new(self.i as i128, s),
            y0: Dyadic::new(self.j as i128, s),
            x1: Dyadic::new(self.i as i128 + 1, s),
            y1: Dyadic::new(self.j as i128 + 1, s),
        }
    }

    pub fn center(&self) -> Point {
        self.rect().center()
    }

    /// Exact dyadic nesting: is `self` a sub-square of `other`?
    pub fn contained_in(&self, other: &DyadicSquare) -> bool {
        if self.scale < other.scale {
            return false;
        }
        let d = self.scale - other.scale;
        if d >= 63 {
            return false;
        }
        (self.i >> d) == other.i && (self.j >> d) == other.j
    }
}

/// All lattice squares of side `2^-scale` whose interior overlaps `region`.
///
/// Overlap is open (positive area): squares that merely touch the region
/// boundary are excluded, so a unit region at scale 1 yields exactly 4
/// squares.
pub fn dyadic_grid(scale: i32, region: &Rect) -> Result<Vec<DyadicSquare>> {
    if scale < 0 {
        return Err(Error::NegativeGridScale);
    }
    let s = scale as u32;
    let lo = |v: Dyadic| -> i64 {
        // smallest i with i + 1 > v * 2^s; equals floor in both the integer
        // and fractional case
        v.floor_scaled(s) as i64
    };
    let hi = |v: Dyadic| -> i64 {
        // largest i with i < v * 2^s
        let f = v.floor_scaled(s);
        let i = if v.is_integer_scaled(s) { f - 1 } else { f };
        i as i64
    };
    let (i0, i1) = (lo(region.x0), hi(region.x1));
    let (j0, j1) = (lo(region.y0), hi(region.y1));
    let mut out = Vec::new();
    for j in j0..=j1 {
        for i in i0..=i1 {
            out.push(DyadicSquare { scale: s, i, j });
        }
    }
    Ok(out)
}

/// Squares of `grid` whose index pair is congruent to `(p, q)` mod `r`.
pub fn sublattice(grid: &[DyadicSquare], p: u32, q: u32, r: u32) -> Vec<DyadicSquare> {
    let r = r as i64;
    let (p, q) = (p as i64 % r, q as i64 % r);
    grid.iter()
        .copied()
        .filter(|sq| sq.i.rem_euclid(r) == p && sq.j.rem_euclid(r) == q)
        .collect()
}

/// The concentric dilation `r * Q` of a lattice square: same center, side
/// multiplied by the integer `r`. Exact: corners are `(2i + 1 ∓ r) / 2^(s+1)`.
pub fn dilate(sq: &DyadicSquare, r: u32) -> Rect {
    let s = sq.scale + 1;
    let r = r as i128;
    let cx = 2 * sq.i as i128 + 1;
    let cy = 2 * sq.j as i128 + 1;
    Rect {
        x0: Dyadic::new(cx - r, s),
        y0: Dyadic::new(cy - r, s),
        x1: Dyadic::new(cx + r, s),
        y1: Dyadic::new(cy + r, s),
    }
}
