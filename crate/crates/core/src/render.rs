//! SVG drawings of tessellations: cells coloured by side count, particles as
//! black dots.

use std::fmt::Write;

use crate::geometry::{ConvexPolygon, Point2};
use crate::laguerre::LaguerreDiagram;
use crate::stability::StabilityReport;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 10.0;

/// Fill colour for a cell with `sides` edges.
pub fn side_color(sides: usize) -> &'static str {
    match sides {
        4 => "#f2d43a",
        5 => "#f08c2a",
        6 => "#4f86c6",
        7 => "#d63a3a",
        _ => "#9a9a9a",
    }
}

struct Frame {
    lo: Point2,
    hi_y: f64,
    scale: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn new(domain: &ConvexPolygon) -> Frame {
        let (lo, hi) = domain.bounding_box().unwrap_or((Point2::ORIGIN, Point2::new(1.0, 1.0)));
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let scale = (CANVAS - 2.0 * MARGIN) / span;
        Frame {
            lo,
            hi_y: hi.y,
            scale,
            width: (hi.x - lo.x) * scale + 2.0 * MARGIN,
            height: (hi.y - lo.y) * scale + 2.0 * MARGIN,
        }
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        (MARGIN + (p.x - self.lo.x) * self.scale, MARGIN + (self.hi_y - p.y) * self.scale)
    }

    fn points_attr(&self, poly: &ConvexPolygon) -> String {
        let mut s = String::new();
        for v in poly.vertices() {
            let (x, y) = self.map(*v);
            let _ = write!(s, "{x:.3},{y:.3} ");
        }
        s.trim_end().to_string()
    }
}

fn draw(diagram: &LaguerreDiagram, points: &[Point2], highlight: &[bool]) -> String {
    let f = Frame::new(&diagram.domain);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.3} {:.3}\">\n",
        f.width.ceil(),
        f.height.ceil(),
        f.width,
        f.height
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for (i, cell) in diagram.cells.iter().enumerate() {
        if cell.is_empty() {
            continue;
        }
        let (stroke, width) = if highlight.get(i).copied().unwrap_or(false) {
            ("#000000", 2.5)
        } else {
            ("#222222", 0.6)
        };
        let _ = writeln!(
            s,
            "<polygon points=\"{}\" fill=\"{}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
            f.points_attr(cell),
            side_color(cell.edge_count())
        );
    }
    let _ = writeln!(
        s,
        "<polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
        f.points_attr(&diagram.domain)
    );
    let radius = (0.08 * f.scale * (diagram.domain.area() / points.len().max(1) as f64).sqrt()).clamp(0.8, 4.0);
    for p in points {
        let (x, y) = f.map(*p);
        let _ = writeln!(s, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{radius:.2}\" fill=\"black\"/>");
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_diagram(diagram: &LaguerreDiagram, points: &[Point2]) -> String {
    draw(diagram, points, &[])
}

/// Like [`render_diagram`], with interior cells outside the stability
/// windows outlined heavily.
pub fn render_stability(diagram: &LaguerreDiagram, points: &[Point2], report: &StabilityReport) -> String {
    let tol = report.window();
    let mut flags = vec![false; diagram.len()];
    for c in &report.per_cell {
        if c.index < flags.len() {
            flags[c.index] = !c.boundary && (c.max_vertex_dev > tol || c.max_edge_dev > tol);
        }
    }
    draw(diagram, points, &flags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laguerre::voronoi_diagram;

    #[test]
    fn colors_by_sides() {
        assert_eq!(side_color(6), "#4f86c6");
        assert_ne!(side_color(4), side_color(5));
        assert_eq!(side_color(3), side_color(9));
    }

    #[test]
    fn draws_every_cell_and_point() {
        let dom = ConvexPolygon::unit_square();
        let pts = [Point2::new(0.25, 0.5), Point2::new(0.75, 0.5)];
        let d = voronoi_diagram(&dom, &pts).unwrap();
        let svg = render_diagram(&d, &pts);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("<polygon").count(), 3);
        assert_eq!(svg.matches(side_color(4)).count(), 2);
    }
}
