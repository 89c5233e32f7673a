//! SVG rendering of a run: `K` with the trajectory on the left, `T` with the
//! dual curve and the bounce normals on the right.

use std::fmt::Write;

use crate::geom::Vec2;
use crate::report::RunReport;

const PANEL: f64 = 400.0;
const MARGIN: f64 = 30.0;

/// Maps a bounding box into a panel with y pointing up.
struct Frame {
    min: Vec2,
    scale: f64,
    x0: f64,
}

impl Frame {
    fn fit(points: &[Vec2], x0: f64) -> Self {
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        Self {
            min: lo,
            scale: (PANEL - 2.0 * MARGIN) / span,
            x0,
        }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (
            self.x0 + MARGIN + (p.x - self.min.x) * self.scale,
            PANEL - MARGIN - (p.y - self.min.y) * self.scale,
        )
    }

    fn points(&self, ps: &[Vec2]) -> String {
        ps.iter()
            .map(|p| {
                let (x, y) = self.map(*p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn normal_lines(out: &mut String, f: &Frame, at: &[Vec2], dirs: &[Vec2], class: &str) {
    for (p, n) in at.iter().zip(dirs) {
        let (x1, y1) = f.map(*p);
        let (x2, y2) = (x1 + 25.0 * n.x, y1 - 25.0 * n.y);
        let _ = writeln!(
            out,
            r#"<line class="{class}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#
        );
    }
}

pub fn render_svg(report: &RunReport) -> String {
    let k = &report.inputs.k.vertices;
    let t = &report.inputs.t.vertices;
    let mut t_pts = t.clone();
    t_pts.push(Vec2::ZERO);
    let fk = Frame::fit(k, 0.0);
    let ft = Frame::fit(&t_pts, PANEL);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = 2.0 * PANEL,
        h = PANEL
    );
    s.push_str(
        "<style>polygon{fill:none;stroke-width:1.5}.body-k,.body-t{stroke:#333}\
.q-curve{stroke:#c0392b}.p-curve{stroke:#2471a3}circle{fill:#000}\
.t-normal{stroke:#c0392b}.k-normal{stroke:#2471a3}text{font:12px sans-serif}</style>\n",
    );
    let _ = writeln!(s, r#"<polygon class="body-k" points="{}"/>"#, fk.points(k));
    let _ = writeln!(s, r#"<polygon class="body-t" points="{}"/>"#, ft.points(t));
    let (ox, oy) = ft.map(Vec2::ZERO);
    let _ = writeln!(
        s,
        r#"<circle class="origin" cx="{ox:.3}" cy="{oy:.3}" r="2"/>"#
    );
    let _ = writeln!(s, r#"<text x="10" y="18">K</text>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18">T</text>"#, PANEL + 10.0);

    if let Some(c) = &report.argmin {
        let q = c.pair.q.vertices();
        let p = c.pair.p.vertices();
        let _ = writeln!(s, r#"<polygon class="q-curve" points="{}"/>"#, fk.points(q));
        for (j, v) in q.iter().enumerate() {
            let (x, y) = fk.map(*v);
            let _ = writeln!(
                s,
                r#"<circle class="q-vertex" cx="{x:.3}" cy="{y:.3}" r="4"/>"#
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.3}" y="{:.3}">q{}</text>"#,
                x + 6.0,
                y - 6.0,
                j + 1
            );
        }
        normal_lines(&mut s, &fk, q, &c.pair.k_normals, "k-normal");
        let _ = writeln!(s, r#"<polygon class="p-curve" points="{}"/>"#, ft.points(p));
        for (j, v) in p.iter().enumerate() {
            let (x, y) = ft.map(*v);
            let _ = writeln!(
                s,
                r#"<circle class="p-vertex" cx="{x:.3}" cy="{y:.3}" r="3"/>"#
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.3}" y="{:.3}">p{}</text>"#,
                x + 6.0,
                y - 6.0,
                j + 1
            );
        }
        normal_lines(&mut s, &ft, p, &c.pair.t_normals, "t-normal");
        let _ = writeln!(
            s,
            r#"<text x="10" y="{:.0}">length {:.6}, {} bounces</text>"#,
            PANEL - 8.0,
            c.length,
            c.m
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, report, SearchOptions};

    #[test]
    fn square_plot_has_two_vertices() {
        let f = fixtures::load("exampleF_aux").unwrap();
        let r = report::shortest(&f.k, &f.t, &SearchOptions::default()).unwrap();
        let svg = render_svg(&r);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches(r#"class="q-vertex""#).count(), 2);
        assert_eq!(svg.matches(r#"class="p-vertex""#).count(), 2);
    }

    #[test]
    fn empty_report_draws_bodies_only() {
        let f = fixtures::load("exampleF_aux").unwrap();
        let mut r = report::shortest(&f.k, &f.t, &SearchOptions::default()).unwrap();
        r.argmin = None;
        let svg = render_svg(&r);
        assert!(svg.contains("body-k") && svg.contains("body-t"));
        assert!(!svg.contains("q-vertex"));
    }
}
