//! Minimal hand-rolled SVG scatter plots.
//!
//! Output is deterministic byte-for-byte for a fixed input: no
//! timestamps, no generated ids, fixed float formatting ({:.3}), and
//! colors assigned by sorted label order.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 16.0;
const BOTTOM: f64 = 40.0;

const PALETTE: [&str; 10] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
    "#386cb0", "#f0027f",
];

/// Escapes the five XML-special characters.
fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        // Zero span: widen symmetrically so division stays safe.
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Renders labeled 2-D points as a fixed-size scatter plot. `labels`
/// must be empty (all points unlabeled) or have one entry per point;
/// points sharing a label share a color.
pub fn scatter(points: &[[f64; 2]], labels: &[String]) -> String {
    let (xmin, xmax) = range(points.iter().map(|p| p[0]));
    let (ymin, ymax) = range(points.iter().map(|p| p[1]));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - xmin) / (xmax - xmin) * plot_w;
    let sy = |y: f64| TOP + (ymax - y) / (ymax - ymin) * plot_h;

    let mut distinct: Vec<&str> = labels
        .iter()
        .map(String::as_str)
        .filter(|l| !l.is_empty())
        .collect();
    distinct.sort_unstable();
    distinct.dedup();
    let color_of = |label: &str| -> &str {
        match distinct.binary_search(&label) {
            Ok(i) => PALETTE[i % PALETTE.len()],
            Err(_) => "#444444",
        }
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
    );
    let _ = writeln!(
        out,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#222222\" stroke-width=\"1\"/>"
    );
    // Corner tick labels, monospace so widths are predictable.
    let _ = writeln!(
        out,
        "<text x=\"{LEFT:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"10\" fill=\"#222222\">{xmin:.3}</text>",
        HEIGHT - BOTTOM + 14.0
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"10\" fill=\"#222222\" text-anchor=\"end\">{xmax:.3}</text>",
        WIDTH - RIGHT,
        HEIGHT - BOTTOM + 14.0
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"10\" fill=\"#222222\" text-anchor=\"end\">{ymin:.3}</text>",
        LEFT - 6.0,
        HEIGHT - BOTTOM
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"10\" fill=\"#222222\" text-anchor=\"end\">{ymax:.3}</text>",
        LEFT - 6.0,
        TOP + 10.0
    );

    for (i, p) in points.iter().enumerate() {
        let label = labels.get(i).map(String::as_str).unwrap_or("");
        let fill = if label.is_empty() {
            "#444444"
        } else {
            color_of(label)
        };
        let _ = writeln!(
            out,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"{fill}\" fill-opacity=\"0.8\"/>",
            sx(p[0]),
            sy(p[1])
        );
    }

    for (i, label) in distinct.iter().enumerate() {
        let y = TOP + 10.0 + 14.0 * i as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"8\" height=\"8\" fill=\"{}\"/>",
            LEFT + 8.0,
            y - 7.0,
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"10\" fill=\"#222222\">{}</text>",
            LEFT + 20.0,
            y,
            xml_escape(label)
        );
    }

    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_points() -> (Vec<[f64; 2]>, Vec<String>) {
        let points = vec![[0.0, 0.0], [1.0, 2.0], [-1.5, 0.5], [2.0, -1.0]];
        let labels = vec!["b".into(), "a".into(), "a".into(), String::new()];
        (points, labels)
    }

    #[test]
    fn output_is_deterministic() {
        let (points, labels) = demo_points();
        assert_eq!(scatter(&points, &labels), scatter(&points, &labels));
    }

    #[test]
    fn labels_get_distinct_palette_colors() {
        let (points, labels) = demo_points();
        let svg = scatter(&points, &labels);
        // Sorted distinct labels: a -> palette[0], b -> palette[1].
        assert!(svg.contains(PALETTE[0]));
        assert!(svg.contains(PALETTE[1]));
        assert!(svg.contains("#444444")); // the unlabeled point
        assert!(svg.contains(">a</text>"));
        assert!(svg.contains(">b</text>"));
    }

    #[test]
    fn degenerate_single_point_stays_finite() {
        let svg = scatter(&[[3.0, 3.0]], &[]);
        assert!(!svg.contains("NaN"));
        assert!(!svg.contains("inf"));
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn label_text_is_escaped() {
        let svg = scatter(&[[0.0, 1.0]], &["a<b&\"c\"".to_string()]);
        assert!(svg.contains("a&lt;b&amp;&quot;c&quot;"));
        assert!(!svg.contains("a<b"));
    }
}
