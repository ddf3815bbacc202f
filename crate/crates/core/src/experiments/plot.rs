//! Minimal dependency-free SVG charts.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

pub struct Curve<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

/// Line chart of the given curves. With `log_y`, nonpositive values are dropped.
pub fn line_chart(title: &str, curves: &[Curve<'_>], log_y: bool) -> String {
    let map_y = |y: f64| if log_y { y.log10() } else { y };
    let points: Vec<(f64, f64)> = curves
        .iter()
        .flat_map(|c| c.points.iter().copied())
        .filter(|&(x, y)| x.is_finite() && y.is_finite() && (!log_y || y > 0.0))
        .map(|(x, y)| (x, map_y(y)))
        .collect();
    let (x0, x1) = bounds(points.iter().map(|p| p.0));
    let (y0, y1) = bounds(points.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = header(title);
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let unit = if log_y { "log10 " } else { "" };
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}" font-size="11">{unit}y: [{y0:.3e}, {y1:.3e}]</text>"#, HEIGHT - 30.0);
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}" font-size="11">x: [{x0}, {x1}]</text>"#, HEIGHT - 15.0);
    for (k, curve) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = curve
            .points
            .iter()
            .filter(|&&(x, y)| x.is_finite() && y.is_finite() && (!log_y || y > 0.0))
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(map_y(y))))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 150.0,
            MARGIN + 16.0 * (k + 1) as f64,
            escape(curve.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Heat map of a row-major matrix, row 0 at the bottom.
pub fn heatmap(title: &str, rows: usize, cols: usize, values: &[f64]) -> String {
    let (lo, hi) = bounds(values.iter().copied().filter(|v| v.is_finite()));
    let cw = (WIDTH - 2.0 * MARGIN) / cols.max(1) as f64;
    let ch = (HEIGHT - 2.0 * MARGIN) / rows.max(1) as f64;
    let mut s = header(title);
    for r in 0..rows {
        for c in 0..cols {
            let t = ((values[r * cols + c] - lo) / (hi - lo)).clamp(0.0, 1.0);
            let shade = (255.0 * (1.0 - t)).round() as u8;
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({shade},{shade},255)"/>"#,
                MARGIN + c as f64 * cw,
                HEIGHT - MARGIN - (r + 1) as f64 * ch,
                cw,
                ch
            );
        }
    }
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}" font-size="11">range: [{lo:.3e}, {hi:.3e}]</text>"#, HEIGHT - 15.0);
    s.push_str("</svg>\n");
    s
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{MARGIN}\" y=\"30\" font-size=\"16\">{}</text>\n",
        escape(title)
    )
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_well_formed() {
        let curves = [
            Curve { label: "a<b", points: vec![(1.0, 1.0), (2.0, 0.1), (3.0, 0.0)] },
            Curve { label: "flat", points: vec![(1.0, 0.5), (3.0, 0.5)] },
        ];
        let svg = line_chart("loss", &curves, true);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a&lt;b"));
        assert!(!svg.contains("NaN") && !svg.contains("inf"));

        let map = heatmap("c", 2, 3, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(map.matches("<rect").count(), 1 + 6);
        let flat = heatmap("c", 1, 1, &[2.0]);
        assert!(!flat.contains("NaN"));
    }
}
