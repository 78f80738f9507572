//! Minimal self-contained SVG line charts.
//!
//! One series per file, fixed geometry, no external assets. Output is a
//! pure function of the inputs so report runs stay byte-reproducible.

use chrono::NaiveDate;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 300.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 15.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 30.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render a dated series as an SVG line chart.
pub fn line_chart_svg(title: &str, dates: &[NaiveDate], values: &[f64]) -> String {
    assert_eq!(dates.len(), values.len(), "dates and values must align");
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

    let (mut lo, mut hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo < 1e-12 {
        // Flat series: pad so the line sits mid-chart.
        lo -= 0.5;
        hi += 0.5;
    }
    let span = hi - lo;

    let x_at = |i: usize| {
        let frac = if dates.len() > 1 { i as f64 / (dates.len() - 1) as f64 } else { 0.5 };
        MARGIN_LEFT + frac * plot_w
    };
    let y_at = |v: f64| MARGIN_TOP + (1.0 - (v - lo) / span) * plot_h;

    let mut points = String::new();
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            points.push(' ');
        }
        points.push_str(&format!("{:.2},{:.2}", x_at(i), y_at(v)));
    }

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n",
        MARGIN_LEFT,
        escape(title)
    ));
    // Axes.
    s.push_str(&format!(
        "<line x1=\"{l:.2}\" y1=\"{t:.2}\" x2=\"{l:.2}\" y2=\"{b:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h
    ));
    s.push_str(&format!(
        "<line x1=\"{l:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
        l = MARGIN_LEFT,
        b = MARGIN_TOP + plot_h,
        r = MARGIN_LEFT + plot_w
    ));
    // Y tick labels.
    for i in 0..=4 {
        let v = lo + span * i as f64 / 4.0;
        let y = y_at(v);
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{:.4}</text>\n",
            MARGIN_LEFT - 5.0,
            y + 3.0,
            v
        ));
        s.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        ));
    }
    // X labels: first and last date.
    if let (Some(first), Some(last)) = (dates.first(), dates.last()) {
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\">{first}</text>\n",
            MARGIN_LEFT,
            HEIGHT - 8.0
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{last}</text>\n",
            MARGIN_LEFT + plot_w,
            HEIGHT - 8.0
        ));
    }
    s.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"{points}\"/>\n"
    ));
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn renders_valid_svg_deterministically() {
        let dates = vec![day("2020-01-01"), day("2020-01-02"), day("2020-01-03")];
        let values = vec![1.0, 3.0, 2.0];
        let a = line_chart_svg("demo", &dates, &values);
        let b = line_chart_svg("demo", &dates, &values);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("polyline"));
        assert!(a.contains("2020-01-01"));
        assert!(a.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn flat_series_and_titles_with_markup_are_safe() {
        let dates = vec![day("2020-01-01"), day("2020-01-02")];
        let svg = line_chart_svg("a < b & c", &dates, &[2.0, 2.0]);
        assert!(svg.contains("a &lt; b &amp; c"));
    }
}
