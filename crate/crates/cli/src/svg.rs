//! Deterministic SVG rendering of scenes, modification traces, level
//! curves, and critical points.
//!
//! Everything is emitted with fixed 7-decimal formatting and no
//! timestamps, so rendering the same input twice gives byte-identical
//! output. The world y axis points up; the flip to SVG screen coordinates
//! happens when a shape is added.

use std::fmt::Write as _;

use potlab_core::{dilate, Point, SceneFile, TraceFile};

use self::ShapeClass::*;

/// Style classes for the drawable elements.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum ShapeClass {
    /// Scene component.
    Scene,
    /// Disc constructed by the pipeline.
    Built,
    /// First-stage seed square.
    Seed,
    /// Square selected by an iteration step.
    Step,
    /// Annulus cleared around a step square.
    Ring,
    /// Traced level curve.
    Curve,
    /// Critical-point marker.
    Mark,
}

impl ShapeClass {
    fn css(self) -> &'static str {
        match self {
            Scene => "k",
            Built => "b",
            Seed => "s",
            Step => "q",
            Ring => "a",
            Curve => "c",
            Mark => "x",
        }
    }
}

enum Item {
    Circle { class: ShapeClass, cx: f64, cy: f64, r: f64 },
    Rect { class: ShapeClass, x: f64, y: f64, w: f64, h: f64 },
    Path { class: ShapeClass, d: String },
    Marker { class: ShapeClass, x: f64, y: f64 },
}

/// Accumulates shapes in screen coordinates and emits one `<svg>` document.
pub struct SvgDoc {
    desc: String,
    items: Vec<Item>,
    lo: Point,
    hi: Point,
}

fn num(v: f64) -> String {
    // normalize -0.0 so equal geometry formats identically
    format!("{:.7}", if v == 0.0 { 0.0 } else { v })
}

impl SvgDoc {
    pub fn new(desc: impl Into<String>) -> SvgDoc {
        SvgDoc {
            desc: desc.into(),
            items: Vec::new(),
            lo: Point::new(f64::INFINITY, f64::INFINITY),
            hi: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, x: f64, y: f64) {
        self.lo.x = self.lo.x.min(x);
        self.lo.y = self.lo.y.min(y);
        self.hi.x = self.hi.x.max(x);
        self.hi.y = self.hi.y.max(y);
    }

    /// Add a disc given in world coordinates.
    pub fn disc(&mut self, class: ShapeClass, center: Point, r: f64) {
        let (cx, cy) = (center.x, -center.y);
        self.grow(cx - r, cy - r);
        self.grow(cx + r, cy + r);
        self.items.push(Item::Circle { class, cx, cy, r });
    }

    /// Add an axis-parallel rectangle given by world corners.
    pub fn rect(&mut self, class: ShapeClass, x0: f64, y0: f64, x1: f64, y1: f64) {
        let (sy0, sy1) = (-y1, -y0);
        self.grow(x0, sy0);
        self.grow(x1, sy1);
        self.items.push(Item::Rect {
            class,
            x: x0,
            y: sy0,
            w: x1 - x0,
            h: sy1 - sy0,
        });
    }

    /// Add a rectangular ring (outer minus inner) as one even-odd path.
    pub fn ring(
        &mut self,
        class: ShapeClass,
        outer: (f64, f64, f64, f64),
        inner: (f64, f64, f64, f64),
    ) {
        let sub = |b: (f64, f64, f64, f64)| {
            let (x0, y0, x1, y1) = b;
            format!(
                "M{},{} L{},{} L{},{} L{},{} Z",
                num(x0),
                num(-y0),
                num(x1),
                num(-y0),
                num(x1),
                num(-y1),
                num(x0),
                num(-y1)
            )
        };
        self.grow(outer.0, -outer.3);
        self.grow(outer.2, -outer.1);
        let d = format!("{} {}", sub(outer), sub(inner));
        self.items.push(Item::Path { class, d });
    }

    /// Add a closed polygon through world points.
    pub fn closed_curve(&mut self, class: ShapeClass, points: &[Point]) {
        if points.is_empty() {
            return;
        }
        let mut d = String::new();
        for (k, p) in points.iter().enumerate() {
            let cmd = if k == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{},{} ", num(p.x), num(-p.y));
            self.grow(p.x, -p.y);
        }
        d.push('Z');
        self.items.push(Item::Path { class, d });
    }

    /// Add a point marker (size chosen at emission time).
    pub fn marker(&mut self, class: ShapeClass, p: Point) {
        self.grow(p.x, -p.y);
        self.items.push(Item::Marker {
            class,
            x: p.x,
            y: -p.y,
        });
    }

    /// Emit the document. The viewBox wraps the content with a 5% margin;
    /// an empty document gets the unit-disc frame the scenes live in.
    pub fn finish(&self) -> String {
        let (lo, hi) = if self.items.is_empty() {
            (Point::new(-0.55, -0.55), Point::new(0.55, 0.55))
        } else {
            (self.lo, self.hi)
        };
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
        let margin = 0.05 * span;
        let (vx, vy) = (lo.x - margin, lo.y - margin);
        let (vw, vh) = (hi.x - lo.x + 2.0 * margin, hi.y - lo.y + 2.0 * margin);
        let scale = vw.max(vh);
        let wide = 0.006 * scale;
        let thin = 0.003 * scale;
        let dash = 0.012 * scale;
        let mark = 0.009 * scale;

        let mut out = String::new();
        let _ = write!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"720\" viewBox=\"{} {} {} {}\">\n",
            num(vx),
            num(vy),
            num(vw),
            num(vh)
        );
        let _ = write!(out, "<desc>{}</desc>\n", self.desc);
        let _ = write!(
            out,
            "<style>\n\
             .k{{fill:#c8d6e5;stroke:#34495e;stroke-width:{w1}}}\n\
             .b{{fill:#f5b7b1;stroke:#922b21;stroke-width:{w1}}}\n\
             .s{{fill:none;stroke:#7f8c8d;stroke-width:{w2};stroke-dasharray:{d}}}\n\
             .q{{fill:none;stroke:#d35400;stroke-width:{w1}}}\n\
             .a{{fill:#f9e79f;fill-opacity:0.35;stroke:none;fill-rule:evenodd}}\n\
             .c{{fill:none;stroke:#1f618d;stroke-width:{w1}}}\n\
             .x{{fill:#17202a;stroke:none}}\n\
             </style>\n",
            w1 = num(wide),
            w2 = num(thin),
            d = num(dash)
        );
        for item in &self.items {
            match item {
                Item::Circle { class, cx, cy, r } => {
                    let _ = write!(
                        out,
                        "<circle class=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>\n",
                        class.css(),
                        num(*cx),
                        num(*cy),
                        num(*r)
                    );
                }
                Item::Rect { class, x, y, w, h } => {
                    let _ = write!(
                        out,
                        "<rect class=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>\n",
                        class.css(),
                        num(*x),
                        num(*y),
                        num(*w),
                        num(*h)
                    );
                }
                Item::Path { class, d } => {
                    let _ = write!(out, "<path class=\"{}\" d=\"{}\"/>\n", class.css(), d);
                }
                Item::Marker { class, x, y } => {
                    let _ = write!(
                        out,
                        "<circle class=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>\n",
                        class.css(),
                        num(*x),
                        num(*y),
                        num(mark)
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn scene_into(doc: &mut SvgDoc, scene: &SceneFile, class: ShapeClass) {
    for c in &scene.components {
        if let Some(d) = &c.disc {
            doc.disc(class, Point::new(d.cx, d.cy), d.r);
        }
        if let Some(s) = &c.square {
            doc.rect(class, s.x0, s.y0, s.x0 + s.side, s.y0 + s.side);
        }
    }
}

/// Render a scene on its own.
pub fn render_scene(scene: &SceneFile) -> String {
    let mut doc = SvgDoc::new(format!("scene with {} components", scene.components.len()));
    scene_into(&mut doc, scene, Scene);
    doc.finish()
}

/// Render a scene with traced level curves on top.
pub fn render_curves(scene: &SceneFile, curves: &[(f64, Vec<Point>)]) -> String {
    let mut doc = SvgDoc::new(format!(
        "scene with {} components, {} level curves",
        scene.components.len(),
        curves.len()
    ));
    scene_into(&mut doc, scene, Scene);
    for (_, points) in curves {
        doc.closed_curve(Curve, points);
    }
    doc.finish()
}

/// Render a scene with critical-point markers.
pub fn render_critical(scene: &SceneFile, points: &[Point]) -> String {
    let mut doc = SvgDoc::new(format!(
        "scene with {} components, {} critical points",
        scene.components.len(),
        points.len()
    ));
    scene_into(&mut doc, scene, Scene);
    for p in points {
        doc.marker(Mark, *p);
    }
    doc.finish()
}

fn rect_bounds(r: &potlab_core::Rect) -> (f64, f64, f64, f64) {
    (r.fx0(), r.fy0(), r.fx1(), r.fy1())
}

/// Render a modification trace: the input scene, the seed squares, each
/// step's square and cleared annulus, and the constructed discs.
pub fn render_trace(trace: &TraceFile) -> String {
    let mut doc = SvgDoc::new(format!(
        "modification trace: {} seeds, {} steps, {} final components",
        trace.first_stage.len(),
        trace.steps.len(),
        trace.final_scene.components.len()
    ));
    scene_into(&mut doc, &trace.input_scene, Scene);
    for sq in &trace.seed_squares {
        let b = rect_bounds(&sq.rect());
        doc.rect(Seed, b.0, b.1, b.2, b.3);
    }
    for step in &trace.steps {
        let inner = rect_bounds(&step.square.rect());
        let outer = rect_bounds(&dilate(&step.square, trace.params.r));
        doc.ring(Ring, outer, inner);
        doc.rect(Step, inner.0, inner.1, inner.2, inner.3);
    }
    for seed in &trace.first_stage {
        doc.disc(Built, Point::new(seed.disc.cx, seed.disc.cy), seed.disc.r);
    }
    for step in &trace.steps {
        doc.disc(Built, Point::new(step.disc.cx, step.disc.cy), step.disc.r);
    }
    doc.finish()
}
