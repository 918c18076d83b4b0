//! To-scale SVG drawings of floor plans.

use std::fmt::Write as _;

use ventplan_core::plan::{FloorPlan, Opening, OpeningKind, Rect, WallSide};

const SCALE: f64 = 50.0;
const MARGIN: f64 = 60.0;
const HEADER: f64 = 40.0;
/// Drawn thickness of a fin (m).
const FIN_THICKNESS: f64 = 0.06;

#[derive(Debug, Clone, Default)]
pub struct SvgLabels {
    pub design: String,
    pub design_penalty: Option<f64>,
    pub thermal_penalty: Option<f64>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Plan-local metres to SVG pixels. Reflected plans are drawn mirrored so
/// that the drawing is a pure rotation of the built layout.
struct Frame {
    reflected: bool,
    x0: f64,
    y1: f64,
}

impl Frame {
    fn new(plan: &FloorPlan, bounds: &Rect) -> Self {
        let (x0, y1) = if plan.reflected {
            (-bounds.right(), bounds.top())
        } else {
            (bounds.x, bounds.top())
        };
        Frame {
            reflected: plan.reflected,
            x0,
            y1,
        }
    }

    fn mirror(&self, x: f64, y: f64) -> (f64, f64) {
        if self.reflected {
            (-x, y)
        } else {
            (x, y)
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let (x, y) = self.mirror(x, y);
        (MARGIN + (x - self.x0) * SCALE, MARGIN + HEADER + (self.y1 - y) * SCALE)
    }

    fn points(&self, pts: &[(f64, f64)]) -> String {
        pts.iter()
            .map(|&(x, y)| {
                let (u, v) = self.px(x, y);
                format!("{u:.1},{v:.1}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn normal(side: WallSide) -> (f64, f64) {
    match side {
        WallSide::N => (0.0, 1.0),
        WallSide::S => (0.0, -1.0),
        WallSide::E => (1.0, 0.0),
        WallSide::W => (-1.0, 0.0),
    }
}

/// Both jambs of an opening on its host wall, in plan-local metres.
fn jambs(rect: &Rect, o: &Opening) -> [(f64, f64); 2] {
    match o.wall_side {
        WallSide::N => [(rect.x + o.offset, rect.top()), (rect.x + o.offset + o.width, rect.top())],
        WallSide::S => [(rect.x + o.offset, rect.y), (rect.x + o.offset + o.width, rect.y)],
        WallSide::E => [(rect.right(), rect.y + o.offset), (rect.right(), rect.y + o.offset + o.width)],
        WallSide::W => [(rect.x, rect.y + o.offset), (rect.x, rect.y + o.offset + o.width)],
    }
}

fn offset_point(p: (f64, f64), n: (f64, f64), d: f64) -> (f64, f64) {
    (p.0 + n.0 * d, p.1 + n.1 * d)
}

pub fn render_svg(plan: &FloorPlan, labels: &SvgLabels) -> String {
    let bounds = plan.bounds().unwrap_or(Rect {
        x: 0.0,
        y: 0.0,
        w: 1.0,
        h: 1.0,
    });
    let frame = Frame::new(plan, &bounds);
    let width = bounds.w * SCALE + 2.0 * MARGIN;
    let height = bounds.h * SCALE + 2.0 * MARGIN + HEADER;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let mut header = escape(&labels.design);
    if let Some(p) = labels.design_penalty {
        let _ = write!(header, "  design penalty {p:.1}");
    }
    if let Some(p) = labels.thermal_penalty {
        let _ = write!(header, "  thermal penalty {p:.1}");
    }
    let _ = writeln!(s, r#"<text class="header" x="{MARGIN}" y="28" font-size="16">{header}</text>"#);

    for sp in &plan.spaces {
        let r = sp.rect;
        let pts = frame.points(&[(r.x, r.y), (r.right(), r.y), (r.right(), r.top()), (r.x, r.top())]);
        let (cx, cy) = frame.px(r.x + r.w / 2.0, r.y + r.h / 2.0);
        let _ = writeln!(
            s,
            r##"<g class="space" data-id="{}"><polygon points="{pts}" fill="#f4f1ea" stroke="black" stroke-width="3"/><text x="{cx:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text><text x="{cx:.1}" y="{:.1}" font-size="11" text-anchor="middle">{:.1} m²</text></g>"##,
            sp.id,
            cy - 2.0,
            escape(sp.function.label()),
            cy + 12.0,
            sp.area()
        );
    }

    for o in &plan.openings {
        let Some(host) = plan.space(o.host_space) else { continue };
        let [a, b] = jambs(&host.rect, o);
        let gap = frame.points(&[a, b]);
        let _ = writeln!(
            s,
            r#"<polyline class="gap" points="{gap}" stroke="white" stroke-width="5"/>"#
        );
        let n = normal(o.wall_side);
        match o.kind {
            OpeningKind::Window => {
                for d in [-0.05, 0.05] {
                    let line = frame.points(&[offset_point(a, n, d), offset_point(b, n, d)]);
                    let _ = writeln!(
                        s,
                        r##"<polyline class="window" points="{line}" stroke="#1f5fa8" stroke-width="1.2"/>"##
                    );
                }
            }
            OpeningKind::InteriorDoor | OpeningKind::ExteriorDoor => {
                let leaf = frame.points(&[a, offset_point(a, n, -o.width)]);
                let _ = writeln!(
                    s,
                    r##"<polyline class="door" points="{leaf}" stroke="#555" stroke-width="1"/>"##
                );
            }
        }
    }

    for d in plan.shading.iter().filter(|d| !d.is_empty()) {
        let Some(o) = plan.opening(d.opening) else { continue };
        let Some(host) = plan.space(o.host_space) else { continue };
        let [a, b] = jambs(&host.rect, o);
        let n = normal(o.wall_side);
        let dashed = |pts: &[(f64, f64)]| {
            format!(
                r##"<polygon class="shading" points="{}" fill="none" stroke="#444" stroke-width="1" stroke-dasharray="4 3"/>"##,
                frame.points(pts)
            )
        };
        if d.overhang_depth > 0.0 {
            let h = d.overhang_depth;
            let _ = writeln!(s, "{}", dashed(&[a, b, offset_point(b, n, h), offset_point(a, n, h)]));
        }
        // Fin sides are stored in the plan-local frame, where the left jamb
        // lies clockwise of the outward normal.
        let cw = (n.1, -n.0);
        let a_is_left = a.0 * cw.0 + a.1 * cw.1 > b.0 * cw.0 + b.1 * cw.1;
        let (left, right) = if a_is_left { (a, b) } else { (b, a) };
        let along = ((b.0 - a.0) / o.width.max(1e-9), (b.1 - a.1) / o.width.max(1e-9));
        for (jamb, depth) in [(left, d.left_fin_depth), (right, d.right_fin_depth)] {
            if depth > 0.0 {
                let half = (along.0 * FIN_THICKNESS / 2.0, along.1 * FIN_THICKNESS / 2.0);
                let p0 = (jamb.0 - half.0, jamb.1 - half.1);
                let p1 = (jamb.0 + half.0, jamb.1 + half.1);
                let _ = writeln!(
                    s,
                    "{}",
                    dashed(&[p0, p1, offset_point(p1, n, depth), offset_point(p0, n, depth)])
                );
            }
        }
    }

    // North arrow: the drawing is the built plan rotated by `orientation`.
    let ax = width - MARGIN / 2.0 - 10.0;
    let ay = MARGIN / 2.0 + 10.0;
    let _ = writeln!(
        s,
        r#"<g class="north" transform="rotate({:.1} {ax:.1} {ay:.1})"><line x1="{ax:.1}" y1="{:.1}" x2="{ax:.1}" y2="{:.1}" stroke="black" stroke-width="2"/><polygon points="{ax:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="black"/><text x="{ax:.1}" y="{:.1}" font-size="12" text-anchor="middle">N</text></g>"#,
        -plan.orientation,
        ay + 14.0,
        ay - 14.0,
        ay - 20.0,
        ax - 5.0,
        ay - 10.0,
        ax + 5.0,
        ay - 10.0,
        ay - 23.0,
    );
    s.push_str("</svg>\n");
    s
}
