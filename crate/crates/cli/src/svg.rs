//! Standalone SVG figures of numerical ranges.

use std::fmt::Write;

use num_complex::Complex64;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 1.15;

pub struct RangeFigure<'a> {
    pub title: &'a str,
    /// Boundary polygon, counterclockwise.
    pub boundary: &'a [Complex64],
    pub eigenvalues: &'a [Complex64],
}

impl RangeFigure<'_> {
    /// Unit circle, filled range, eigenvalue markers and a crosshair at 0.
    pub fn render(&self) -> String {
        let extent = self
            .boundary
            .iter()
            .chain(self.eigenvalues)
            .map(|z| z.norm())
            .fold(1.0, f64::max)
            * MARGIN;
        let px = |x: f64| (x / extent + 1.0) * SIZE / 2.0;
        let py = |y: f64| (1.0 - y / extent) * SIZE / 2.0;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(s, "<title>{}</title>", escape(self.title));
        let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
        let (cx, cy) = (px(0.0), py(0.0));
        let _ = writeln!(
            s,
            r##"<line x1="0" y1="{cy:.3}" x2="{SIZE}" y2="{cy:.3}" stroke="#ddd"/><line x1="{cx:.3}" y1="0" x2="{cx:.3}" y2="{SIZE}" stroke="#ddd"/>"##
        );
        let r = SIZE / 2.0 / extent;
        let _ = writeln!(
            s,
            r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{r:.3}" fill="none" stroke="#888" stroke-dasharray="4 3"/>"##
        );
        match self.boundary {
            [] => {}
            [z] => {
                let _ = writeln!(
                    s,
                    r##"<circle cx="{:.3}" cy="{:.3}" r="3" fill="#4a78c2"/>"##,
                    px(z.re),
                    py(z.im)
                );
            }
            pts => {
                let points: Vec<String> = pts.iter().map(|z| format!("{:.3},{:.3}", px(z.re), py(z.im))).collect();
                let _ = writeln!(
                    s,
                    r##"<polygon points="{}" fill="#4a78c2" fill-opacity="0.35" stroke="#1f3f7a" stroke-width="1.5"/>"##,
                    points.join(" ")
                );
            }
        }
        for z in self.eigenvalues {
            let _ = writeln!(
                s,
                r##"<circle cx="{:.3}" cy="{:.3}" r="4" fill="black"/>"##,
                px(z.re),
                py(z.im)
            );
        }
        let arm = 8.0;
        let _ = writeln!(
            s,
            r##"<path d="M{:.3} {cy:.3}H{:.3}M{cx:.3} {:.3}V{:.3}" stroke="#c0392b" stroke-width="2"/>"##,
            cx - arm,
            cx + arm,
            cy - arm,
            cy + arm
        );
        let _ = writeln!(
            s,
            r#"<text x="10" y="20" font-family="sans-serif" font-size="14">{}</text>"#,
            escape(self.title)
        );
        s.push_str("</svg>\n");
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
