//! Minimal SVG line plot of the PSNR profile (psnr_db vs k).

use fpr_core::TraceRow;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 56.0;

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders the finite PSNR samples of a trace as an SVG line plot with
/// labeled axes. Infinite and absent PSNR rows are skipped.
pub fn psnr_profile_svg(trace: &[TraceRow]) -> String {
    let points: Vec<(f64, f64)> = trace
        .iter()
        .filter_map(|r| {
            r.psnr_db
                .filter(|v| v.is_finite())
                .map(|v| (r.k as f64, v))
        })
        .collect();

    let (x_min, x_max) = (0.0, points.iter().map(|p| p.0).fold(1.0, f64::max));
    let (mut y_min, mut y_max) = points.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY),
        |(lo, hi), &(_, y)| (lo.min(y), hi.max(y)),
    );
    if points.is_empty() {
        (y_min, y_max) = (0.0, 1.0);
    }
    if y_max - y_min < 1e-9 {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let pad = 0.05 * (y_max - y_min);
    let (y_min, y_max) = (y_min - pad, y_max + pad);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min).max(1e-12) * plot_w;
    let y_of = |y: f64| MARGIN_TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "<!-- generated by fpr {} -->\n",
        env!("CARGO_PKG_VERSION")
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(x0),
        fmt(y0),
        fmt(x0 + plot_w),
        fmt(y0)
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(x0),
        fmt(MARGIN_TOP),
        fmt(x0),
        fmt(y0)
    ));

    // Ticks and grid labels.
    let ticks = 5usize;
    for t in 0..=ticks {
        let frac = t as f64 / ticks as f64;
        let xv = x_min + frac * (x_max - x_min);
        let xp = x_of(xv);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
            fmt(xp),
            fmt(y0),
            fmt(y0 + 6.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            fmt(xp),
            fmt(y0 + 20.0),
            xv.round() as i64
        ));

        let yv = y_min + frac * (y_max - y_min);
        let yp = y_of(yv);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n",
            fmt(x0 - 6.0),
            fmt(yp),
            fmt(x0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.1}</text>\n",
            fmt(x0 - 10.0),
            fmt(yp + 4.0),
            yv
        ));
    }

    // Axis labels.
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">iteration k</text>\n",
        fmt(x0 + plot_w / 2.0),
        fmt(HEIGHT - 12.0)
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">PSNR (dB)</text>\n",
        fmt(MARGIN_TOP + plot_h / 2.0),
        fmt(MARGIN_TOP + plot_h / 2.0)
    ));

    if points.is_empty() {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">no finite PSNR samples</text>\n",
            fmt(x0 + plot_w / 2.0),
            fmt(MARGIN_TOP + plot_h / 2.0)
        ));
    } else {
        let path: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt(x_of(x)), fmt(y_of(y))))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
