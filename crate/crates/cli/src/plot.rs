//! Minimal static SVG figures. Output depends only on the inputs.

use std::fmt::Write;

const WIDTH: f64 = 520.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

fn num(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    format!("{:.2}", if r == 0.0 { 0.0 } else { r })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn open(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#,
        w = num(width),
        h = num(height)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        num(width / 2.0),
        escape(title)
    );
}

fn close(out: &mut String) {
    out.push_str("</svg>\n");
}

/// Bar chart of eigenvalues.
pub fn scree(values: &[f64]) -> String {
    let mut out = String::new();
    open(&mut out, WIDTH, HEIGHT, "Eigenvalues");
    let (x0, y0) = (MARGIN, HEIGHT - MARGIN);
    let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#,
        x0 = num(x0),
        y0 = num(y0),
        x1 = num(x0 + w)
    );
    let top = values.iter().copied().fold(0.0, f64::max);
    if !values.is_empty() && top > 0.0 {
        let slot = w / values.len() as f64;
        for (i, &v) in values.iter().enumerate() {
            let bh = h * v.max(0.0) / top;
            let x = x0 + slot * i as f64 + slot * 0.1;
            let _ = writeln!(
                out,
                r#"<rect class="bar" x="{}" y="{}" width="{}" height="{}" fill="steelblue"/>"#,
                num(x),
                num(y0 - bh),
                num(slot * 0.8),
                num(bh)
            );
            if values.len() <= 40 {
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                    num(x + slot * 0.4),
                    num(y0 + 14.0),
                    i + 1
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            num(x0 - 4.0),
            num(y0 - h + 4.0),
            escape(&format!("{top:.4e}"))
        );
    }
    close(&mut out);
    out
}

/// Labelled points on two axes, with the origin marked.
pub fn scatter(title: &str, x_label: &str, y_label: &str, points: &[(String, f64, f64)]) -> String {
    let mut out = String::new();
    open(&mut out, WIDTH, HEIGHT, title);
    let span = |sel: fn(&(String, f64, f64)) -> f64| {
        let (lo, hi) = points
            .iter()
            .map(sel)
            .fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let pad = ((hi - lo) * 0.1).max(1e-12);
        (lo - pad, hi + pad)
    };
    let (xmin, xmax) = span(|p| p.1);
    let (ymin, ymax) = span(|p| p.2);
    let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let sx = |v: f64| MARGIN + w * (v - xmin) / (xmax - xmin);
    let sy = |v: f64| HEIGHT - MARGIN - h * (v - ymin) / (ymax - ymin);
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        num(MARGIN),
        num(MARGIN),
        num(w),
        num(h)
    );
    let _ = writeln!(
        out,
        r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="gray" stroke-dasharray="4 3"/>"#,
        num(MARGIN),
        num(MARGIN + w),
        y = num(sy(0.0))
    );
    let _ = writeln!(
        out,
        r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="gray" stroke-dasharray="4 3"/>"#,
        num(MARGIN),
        num(MARGIN + h),
        x = num(sx(0.0))
    );
    for (label, x, y) in points {
        let (px, py) = (sx(*x), sy(*y));
        let _ = writeln!(
            out,
            r#"<circle class="point" cx="{}" cy="{}" r="3" fill="steelblue"/>"#,
            num(px),
            num(py)
        );
        let _ = writeln!(
            out,
            r#"<text class="label" x="{}" y="{}">{}</text>"#,
            num(px + 5.0),
            num(py - 5.0),
            escape(label)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        num(WIDTH / 2.0),
        num(HEIGHT - 16.0),
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{y}" text-anchor="middle" transform="rotate(-90 16 {y})">{}</text>"#,
        escape(y_label),
        y = num(HEIGHT / 2.0)
    );
    close(&mut out);
    out
}

/// Heat map of a matrix with entries in [0, 1].
pub fn heatmap(title: &str, labels: &[String], values: &[Vec<f64>]) -> String {
    let k = labels.len().max(1);
    let cell = (320.0 / k as f64).clamp(8.0, 48.0);
    let left = 100.0;
    let top = 100.0;
    let width = left + cell * k as f64 + 24.0;
    let height = top + cell * k as f64 + 24.0;
    let mut out = String::new();
    open(&mut out, width.max(240.0), height, title);
    for (i, row) in values.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            num(left - 6.0),
            num(top + cell * (i as f64 + 0.5) + 4.0),
            escape(&labels[i])
        );
        for (j, &v) in row.iter().enumerate() {
            let t = v.clamp(0.0, 1.0);
            let shade = |lo: f64| (255.0 - t * (255.0 - lo)).round() as u8;
            let _ = writeln!(
                out,
                r#"<rect class="cell" x="{}" y="{}" width="{c}" height="{c}" fill="rgb({},{},{})" stroke="white"/>"#,
                num(left + cell * j as f64),
                num(top + cell * i as f64),
                shade(70.0),
                shade(130.0),
                shade(180.0),
                c = num(cell)
            );
            if cell >= 28.0 {
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" text-anchor="middle" fill="{}">{}</text>"#,
                    num(left + cell * (j as f64 + 0.5)),
                    num(top + cell * (i as f64 + 0.5) + 4.0),
                    if t > 0.6 { "white" } else { "black" },
                    num(v)
                );
            }
        }
    }
    for (j, label) in labels.iter().enumerate() {
        let (x, y) = (left + cell * (j as f64 + 0.5), top - 6.0);
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{y}" transform="rotate(-45 {x} {y})">{}</text>"#,
            escape(label),
            x = num(x),
            y = num(y)
        );
    }
    close(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_has_one_point_per_label() {
        let pts: Vec<(String, f64, f64)> = vec![
            ("a".into(), 1.0, 0.0),
            ("b<".into(), -1.0, 2.0),
            ("c".into(), 0.5, -0.5),
        ];
        let svg = scatter("t", "x", "y", &pts);
        assert_eq!(svg.matches("class=\"point\"").count(), 3);
        assert!(svg.contains("b&lt;"));
        assert_eq!(svg, scatter("t", "x", "y", &pts));
    }

    #[test]
    fn degenerate_inputs_do_not_panic() {
        assert!(scree(&[]).ends_with("</svg>\n"));
        assert!(scree(&[0.0]).ends_with("</svg>\n"));
        let svg = scatter("t", "x", "y", &[("a".into(), 0.0, 0.0)]);
        assert!(!svg.contains("NaN"));
        let h = heatmap("rv", &["a".into(), "b".into()], &[vec![1.0, 0.2], vec![0.2, 1.0]]);
        assert_eq!(h.matches("class=\"cell\"").count(), 4);
    }

    #[test]
    fn signed_zero_is_normalized() {
        assert_eq!(num(-0.001), "0.00");
        assert_eq!(num(-1.234), "-1.23");
    }
}
