//! SVG rendering: contour map of the field with detected and exact
//! stationary sets drawn on top.

use std::fmt::Write;

use crate::bindings::{self, Binding, BindingKind};
use crate::geom::Vec2;
use crate::grid::GridField;
use crate::oracle::GroundTruth;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    /// Number of contour levels, evenly spaced strictly inside the value range.
    pub levels: usize,
    /// Width of the plot area in pixels; the height follows the aspect ratio.
    pub width: f64,
    pub margin: f64,
    /// Samples per ground-truth curve.
    pub curve_samples: usize,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            levels: 10,
            width: 600.0,
            margin: 20.0,
            curve_samples: 400,
        }
    }
}

/// `n` levels splitting `[lo, hi]` into `n + 1` equal parts.
pub fn contour_levels(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64)
        .collect()
}

/// Isoline segments of the bilinear cell interpolation at `level`, by
/// marching squares. Saddle cells are resolved with the cell-centre mean.
pub fn contour_segments(grid: &GridField, level: f64) -> Vec<(Vec2, Vec2)> {
    let mut out = Vec::new();
    for row in 0..grid.ny() - 1 {
        for col in 0..grid.nx() - 1 {
            // corners counter-clockwise from the lower left
            let corners = [
                (row, col),
                (row, col + 1),
                (row + 1, col + 1),
                (row + 1, col),
            ];
            let p = corners.map(|(r, c)| grid.node_unchecked(r, c));
            let v = corners.map(|(r, c)| grid.value_unchecked(r, c));
            let above = v.map(|x| x >= level);
            let case = above
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &a)| acc | ((a as u8) << k));
            if case == 0 || case == 15 {
                continue;
            }
            // edge k joins corner k and corner k+1
            let cross = |k: usize| {
                let (a, b) = (k, (k + 1) % 4);
                let t = (level - v[a]) / (v[b] - v[a]);
                p[a] + (p[b] - p[a]) * t
            };
            let edges: Vec<usize> = (0..4).filter(|&k| above[k] != above[(k + 1) % 4]).collect();
            if edges.len() == 2 {
                out.push((cross(edges[0]), cross(edges[1])));
                continue;
            }
            // two opposite corners above: pair the edges around the corners
            // that agree with the centre
            let centre_above = v.iter().sum::<f64>() / 4.0 >= level;
            if above[0] == centre_above {
                // corners 0 and 2 connect through the centre
                out.push((cross(0), cross(1)));
                out.push((cross(2), cross(3)));
            } else {
                out.push((cross(3), cross(0)));
                out.push((cross(1), cross(2)));
            }
        }
    }
    out
}

/// Maps field coordinates to SVG pixels, `y` pointing up.
struct Frame {
    lo: Vec2,
    scale: f64,
    height: f64,
    margin: f64,
}

impl Frame {
    fn new(grid: &GridField, opts: &PlotOptions) -> Self {
        let lo = grid.origin();
        let hi = grid.upper_corner();
        let scale = opts.width / (hi.x - lo.x);
        Frame {
            lo,
            scale,
            height: (hi.y - lo.y) * scale,
            margin: opts.margin,
        }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (
            self.margin + (p.x - self.lo.x) * self.scale,
            self.margin + self.height - (p.y - self.lo.y) * self.scale,
        )
    }
}

/// Renders a standalone SVG with the layers `contours`, `detected` and,
/// when `truth` is given, `ground-truth`. Isolated detections are circles
/// and curve detections polylines through the chained members.
pub fn render_svg(
    grid: &GridField,
    points: &[Vec2],
    found: &[Binding],
    truth: Option<&GroundTruth>,
    opts: &PlotOptions,
) -> String {
    let frame = Frame::new(grid, opts);
    let w = opts.width + 2.0 * opts.margin;
    let h = frame.height + 2.0 * opts.margin;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0) = frame.map(grid.origin());
    let (x1, y1) = frame.map(grid.upper_corner());
    let _ = writeln!(
        s,
        r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="0.5"/>"#,
        x1 - x0,
        y0 - y1
    );

    let (lo, hi) = grid.value_range();
    let _ = writeln!(
        s,
        r##"<g id="contours" fill="none" stroke="#7a7a7a" stroke-width="0.6">"##
    );
    if hi > lo {
        for level in contour_levels(lo, hi, opts.levels) {
            let segs = contour_segments(grid, level);
            if segs.is_empty() {
                continue;
            }
            let mut d = String::new();
            for (a, b) in segs {
                let (ax, ay) = frame.map(a);
                let (bx, by) = frame.map(b);
                let _ = write!(d, "M{ax:.2} {ay:.2}L{bx:.2} {by:.2}");
            }
            let _ = writeln!(s, r#"<path data-level="{level}" d="{d}"/>"#);
        }
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<g id="detected" fill="#1f4fbf" stroke="#1f4fbf">"##);
    for b in found {
        match b.kind {
            BindingKind::Isolated => {
                let (cx, cy) = frame.map(points[b.members[0]]);
                let _ = writeln!(s, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3.5"/>"#);
            }
            BindingKind::Curve => {
                let order = bindings::chain(points, &b.members);
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke-width="2" points="{}"/>"#,
                    polyline(&frame, order.iter().map(|&k| points[k]))
                );
            }
        }
    }
    let _ = writeln!(s, "</g>");

    if let Some(truth) = truth {
        let _ = writeln!(
            s,
            r##"<g id="ground-truth" fill="none" stroke="#d62020" stroke-width="1.2" stroke-dasharray="4 3">"##
        );
        for &p in &truth.isolated {
            let (cx, cy) = frame.map(p);
            let r = 5.0;
            let _ = writeln!(
                s,
                r#"<path stroke-dasharray="none" d="M{:.2} {cy:.2}H{:.2}M{cx:.2} {:.2}V{:.2}M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}"/>"#,
                cx - r,
                cx + r,
                cy - r,
                cy + r,
                cx - 0.7 * r,
                cy - 0.7 * r,
                cx + 0.7 * r,
                cy + 0.7 * r,
                cx - 0.7 * r,
                cy + 0.7 * r,
                cx + 0.7 * r,
                cy - 0.7 * r
            );
        }
        for c in &truth.curves {
            let _ = writeln!(
                s,
                r#"<polyline points="{}"/>"#,
                polyline(&frame, c.sample(opts.curve_samples).into_iter())
            );
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

fn polyline(frame: &Frame, pts: impl Iterator<Item = Vec2>) -> String {
    let mut out = String::new();
    for (k, p) in pts.enumerate() {
        let (x, y) = frame.map(p);
        if k > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.2},{y:.2}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TestFunction;
    use crate::oracle::ground_truth;

    fn count(svg: &str, tag: &str) -> usize {
        let doc = roxmltree::Document::parse(svg).expect("well-formed svg");
        doc.descendants().filter(|n| n.has_tag_name(tag)).count()
    }

    #[test]
    fn levels_are_interior_and_even() {
        let l = contour_levels(0.0, 1.0, 4);
        for (a, b) in l.iter().zip([0.2, 0.4, 0.6, 0.8]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(contour_levels(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn linear_field_gives_exact_isoline() {
        let grid =
            GridField::from_fn(9, 7, 0.25, 0.5, Vec2::new(-1.0, 0.0), |p| p.x + 2.0 * p.y).unwrap();
        let segs = contour_segments(&grid, 1.3);
        assert!(!segs.is_empty());
        for (a, b) in segs {
            assert!((a.x + 2.0 * a.y - 1.3).abs() < 1e-12);
            assert!((b.x + 2.0 * b.y - 1.3).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_isoline_stays_near_radius() {
        let grid = TestFunction::F13.sample(81, 81).unwrap();
        let field =
            GridField::from_fn(81, 81, grid.dx(), grid.dy(), grid.origin(), |p| p.norm()).unwrap();
        let segs = contour_segments(&field, 0.5);
        assert!(segs.len() > 20);
        for (a, b) in &segs {
            assert!((a.norm() - 0.5).abs() < 2e-3 && (b.norm() - 0.5).abs() < 2e-3);
        }
    }

    #[test]
    fn saddle_cells_give_two_segments() {
        // a single cell with opposite corners at 1, the others at 0
        let grid = GridField::from_fn(4, 4, 1.0, 1.0, Vec2::ZERO, |p| {
            if p.x <= 1.0 && p.y <= 1.0 {
                (p.x == p.y) as u8 as f64
            } else {
                0.0
            }
        })
        .unwrap();
        let at = |level| {
            contour_segments(&grid, level)
                .into_iter()
                .filter(|(a, b)| a.x.max(b.x) <= 1.0 && a.y.max(b.y) <= 1.0)
                .count()
        };
        assert_eq!(at(0.6), 2);
        assert_eq!(at(0.4), 2);
    }

    #[test]
    fn glyph_counts_and_layers() {
        let grid = TestFunction::F2.sample(30, 30).unwrap();
        let truth = ground_truth(TestFunction::F2);
        let found: Vec<Binding> = (0..24)
            .map(|k| Binding {
                kind: BindingKind::Isolated,
                members: vec![k],
            })
            .collect();
        let svg = render_svg(
            &grid,
            &truth.isolated,
            &found,
            Some(&truth),
            &PlotOptions::default(),
        );
        assert_eq!(count(&svg, "circle"), 24);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let groups: Vec<&str> = doc
            .descendants()
            .filter(|n| n.has_tag_name("g"))
            .filter_map(|n| n.attribute("id"))
            .collect();
        assert_eq!(groups, vec!["contours", "detected", "ground-truth"]);
        let root = doc.root_element();
        assert!(root.attribute("width").is_some() && root.attribute("height").is_some());
        assert_eq!(
            doc.descendants()
                .filter(|n| n.attribute("data-level").is_some())
                .count(),
            10
        );
    }

    #[test]
    fn empty_report_draws_only_contours() {
        let grid = TestFunction::F11.sample(20, 20).unwrap();
        let svg = render_svg(&grid, &[], &[], None, &PlotOptions::default());
        assert_eq!(count(&svg, "circle"), 0);
        assert_eq!(count(&svg, "polyline"), 0);
        assert!(count(&svg, "path") > 0);
    }

    #[test]
    fn constant_field_has_no_contours() {
        let grid = GridField::from_fn(5, 5, 1.0, 1.0, Vec2::ZERO, |_| 2.0).unwrap();
        let svg = render_svg(&grid, &[], &[], None, &PlotOptions::default());
        assert_eq!(count(&svg, "path"), 0);
    }
}
