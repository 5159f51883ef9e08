//! Minimal self-contained SVG charts for eyeballing runs.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub struct LineChart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series<'a>>,
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>
"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn transform(v: f64, scale: Scale) -> Option<f64> {
    match scale {
        Scale::Linear => v.is_finite().then_some(v),
        Scale::Log => (v > 0.0 && v.is_finite()).then(|| v.log10()),
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), labels: (&str, &str), scales: (Scale, Scale)) {
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN / 2.0, MARGIN / 1.5);
    let _ = writeln!(
        out,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#
    );
    let tick = |v: f64, s: Scale| match s {
        Scale::Linear => format!("{v:.3}"),
        Scale::Log => format!("1e{v:.1}"),
    };
    for (i, frac) in [0.0, 0.5, 1.0].into_iter().enumerate() {
        let xv = x.0 + frac * (x.1 - x.0);
        let yv = y.0 + frac * (y.1 - y.0);
        let px = x0 + frac * (x1 - x0);
        let py = y0 - frac * (y0 - y1);
        let anchor = ["start", "middle", "end"][i];
        let _ = writeln!(
            out,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="{anchor}">{}</text>"#,
            y0 + 16.0,
            tick(xv, scales.0)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{py:.1}" text-anchor="end">{}</text>"#,
            x0 - 4.0,
            tick(yv, scales.1)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(labels.0)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(labels.1)
    );
}

impl LineChart<'_> {
    pub fn to_svg(&self) -> String {
        let mut out = String::new();
        header(&mut out, self.title);
        let pts: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter_map(|&(x, y)| Some((transform(x, self.x_scale)?, transform(y, self.y_scale)?)))
                    .collect()
            })
            .collect();
        let xr = range(pts.iter().flatten().map(|p| p.0));
        let yr = range(pts.iter().flatten().map(|p| p.1));
        axes(
            &mut out,
            xr,
            yr,
            (self.x_label, self.y_label),
            (self.x_scale, self.y_scale),
        );
        let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN / 2.0, MARGIN / 1.5);
        for (i, (series, pts)) in self.series.iter().zip(&pts).enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let path: Vec<String> = pts
                .iter()
                .map(|&(x, y)| {
                    let px = x0 + (x - xr.0) / (xr.1 - xr.0) * (x1 - x0);
                    let py = y0 - (y - yr.0) / (yr.1 - yr.0) * (y0 - y1);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#,
                path.join(" ")
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
                x1 - 120.0,
                y1 + 14.0 * (i as f64 + 1.0),
                escape(series.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Time-by-momentum intensity map; `rows[i]` holds `P(n)` at `times[i]`.
pub fn heatmap_svg(title: &str, times: &[usize], momenta: &[i64], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let xr = (
        *momenta.first().unwrap_or(&0) as f64 - 0.5,
        *momenta.last().unwrap_or(&0) as f64 + 0.5,
    );
    let yr = (
        *times.first().unwrap_or(&0) as f64 - 0.5,
        *times.last().unwrap_or(&0) as f64 + 0.5,
    );
    axes(&mut out, xr, yr, ("momentum n", "kick t"), (Scale::Linear, Scale::Linear));
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN / 2.0, MARGIN / 1.5);
    let cw = (x1 - x0) / momenta.len().max(1) as f64;
    let ch = (y0 - y1) / times.len().max(1) as f64;
    let peak = rows.iter().flatten().copied().fold(0.0, f64::max);
    for (i, row) in rows.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            if p <= 0.0 || peak <= 0.0 {
                continue;
            }
            // square-root contrast so the flanks stay visible
            let level = (p / peak).sqrt();
            let shade = (255.0 * (1.0 - level)).round() as u8;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({shade},{shade},255)"/>"#,
                x0 + j as f64 * cw,
                y0 - (i as f64 + 1.0) * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_documents() {
        let chart = LineChart {
            title: "a < b",
            x_label: "t",
            y_label: "p",
            x_scale: Scale::Log,
            y_scale: Scale::Log,
            series: vec![Series {
                label: "1/t",
                points: (0..10).map(|t| (t as f64, 1.0 / t as f64)).collect(),
            }],
        };
        let svg = chart.to_svg();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a &lt; b"));
        assert!(!svg.contains("NaN") && !svg.contains("inf"));

        let map = heatmap_svg("map", &[0, 1], &[-1, 0, 1], &[vec![0.0, 1.0, 0.0], vec![0.3, 0.4, 0.3]]);
        assert_eq!(map.matches("<rect").count(), 1 + 4);
    }
}
