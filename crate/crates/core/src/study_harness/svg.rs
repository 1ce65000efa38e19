use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Minimal log-log line chart rendered as standalone SVG.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 70.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl LogLogChart {
    fn bounds(&self) -> Option<((f64, f64), (f64, f64))> {
        let pts = self
            .series
            .iter()
            .flat_map(|s| s.points.iter())
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite());
        let mut b: Option<((f64, f64), (f64, f64))> = None;
        for &(x, y) in pts {
            let (lx, ly) = (x.log10(), y.log10());
            b = Some(match b {
                None => ((lx, lx), (ly, ly)),
                Some(((x0, x1), (y0, y1))) => ((x0.min(lx), x1.max(lx)), (y0.min(ly), y1.max(ly))),
            });
        }
        b.map(|((x0, x1), (y0, y1))| {
            let pad = |a: f64, b: f64| if b - a < 1e-9 { (a - 0.5, b + 0.5) } else { (a, b) };
            (pad(x0.floor(), x1.ceil()), pad(y0.floor(), y1.ceil()))
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let Some(((x0, x1), (y0, y1))) = self.bounds() else {
            out.push_str("</svg>\n");
            return out;
        };
        let plot_w = WIDTH - 2.0 * MARGIN;
        let plot_h = HEIGHT - 2.0 * MARGIN;
        let px = |lx: f64| MARGIN + (lx - x0) / (x1 - x0) * plot_w;
        let py = |ly: f64| HEIGHT - MARGIN - (ly - y0) / (y1 - y0) * plot_h;
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        let mut d = x0.ceil();
        while d <= x1 {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">1e{}</text>"#,
                px(d),
                HEIGHT - MARGIN + 18.0,
                d
            );
            d += 1.0;
        }
        let mut d = y0.ceil();
        while d <= y1 {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{}</text>"#,
                MARGIN - 6.0,
                py(d) + 4.0,
                d
            );
            d += 1.0;
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 20.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (k, s) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let coords: Vec<String> = s
                .points
                .iter()
                .filter(|(x, y)| *x > 0.0 && *y > 0.0)
                .map(|(x, y)| format!("{:.2},{:.2}", px(x.log10()), py(y.log10())))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                coords.join(" ")
            );
            for c in &coords {
                let (cx, cy) = c.split_once(',').unwrap_or(("0", "0"));
                let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
            }
            let ly = MARGIN + 16.0 + 16.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{ly}" fill="{color}" text-anchor="end">{}</text>"#,
                WIDTH - MARGIN - 8.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
