//! Hand-rolled SVG: mean cycle density against the supercriticality
//! constant, with the closed-form curve (1 - c^(-1/(k-j))) / (k-j)
//! overlaid. One panel per (k, j).

use super::CellAggregate;

const PANEL_W: f64 = 440.0;
const PANEL_H: f64 = 330.0;
const MARGIN_L: f64 = 58.0;
const MARGIN_B: f64 = 46.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_R: f64 = 18.0;

pub fn plot_curve(aggs: &[CellAggregate]) -> String {
    let mut groups: Vec<(u64, u64)> = aggs.iter().map(|a| (a.k, a.j)).collect();
    groups.sort_unstable();
    groups.dedup();
    if groups.is_empty() {
        groups.push((3, 2));
    }
    let total_w = PANEL_W * groups.len() as f64;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w}\" height=\"{PANEL_H}\" \
         viewBox=\"0 0 {total_w} {PANEL_H}\" font-family=\"monospace\" font-size=\"11\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{total_w}\" height=\"{PANEL_H}\" fill=\"white\"/>\n"
    ));
    for (gi, &(k, j)) in groups.iter().enumerate() {
        let cells: Vec<&CellAggregate> =
            aggs.iter().filter(|a| a.k == k && a.j == j).collect();
        svg.push_str(&panel(gi as f64 * PANEL_W, k, j, &cells));
    }
    svg.push_str("</svg>\n");
    svg
}

fn panel(x0: f64, k: u64, j: u64, cells: &[&CellAggregate]) -> String {
    let kj = (k - j) as f64;
    let max_c = cells.iter().map(|a| a.c).fold(2.0, f64::max) * 1.15;
    let max_y = (1.0 / kj * 1.05).min(1.05);
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let sx = |c: f64| x0 + MARGIN_L + (c - 1.0) / (max_c - 1.0) * plot_w;
    let sy = |y: f64| MARGIN_T + (1.0 - y / max_y) * plot_h;

    let mut s = String::new();
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">k={k} j={j}: \
         cycle density vs c</text>\n",
        x0 + MARGIN_L + plot_w / 2.0,
        MARGIN_T - 14.0
    ));
    // Axes.
    s.push_str(&format!(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n",
        x0 + MARGIN_L,
        MARGIN_T + plot_h,
        x0 + MARGIN_L + plot_w
    ));
    s.push_str(&format!(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
        x0 + MARGIN_L,
        MARGIN_T,
        MARGIN_T + plot_h
    ));
    // Ticks.
    let mut c_tick = 1.0;
    let step = ((max_c - 1.0) / 6.0).max(0.5);
    while c_tick <= max_c + 1e-9 {
        let x = sx(c_tick);
        s.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{0}\" x2=\"{x}\" y2=\"{1}\" stroke=\"black\"/>\n",
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 4.0
        ));
        s.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{c_tick:.1}</text>\n",
            MARGIN_T + plot_h + 16.0
        ));
        c_tick += step;
    }
    for i in 0..=4 {
        let y = max_y * i as f64 / 4.0;
        let yy = sy(y);
        s.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{yy}\" x2=\"{1}\" y2=\"{yy}\" stroke=\"black\"/>\n",
            x0 + MARGIN_L - 4.0,
            x0 + MARGIN_L
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y:.3}</text>\n",
            x0 + MARGIN_L - 7.0,
            yy + 3.5
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">c</text>\n",
        x0 + MARGIN_L + plot_w / 2.0,
        MARGIN_T + plot_h + 34.0
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">\
         L_C / n</text>\n",
        x0 + 14.0,
        MARGIN_T + plot_h / 2.0,
        x0 + 14.0,
        MARGIN_T + plot_h / 2.0
    ));

    // The closed-form curve.
    let mut pts = Vec::with_capacity(257);
    for i in 0..=256 {
        let c = 1.0 + (max_c - 1.0) * i as f64 / 256.0;
        let c = c.max(1.0 + 1e-9);
        let y = (1.0 - c.powf(-1.0 / kj)) / kj;
        pts.push(format!("{:.2},{:.2}", sx(c), sy(y)));
    }
    s.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#888\" stroke-width=\"1.2\"/>\n",
        pts.join(" ")
    ));

    // Data points: filled when certified trials exist, open at zero height
    // otherwise.
    for a in cells {
        if a.certified > 0 {
            s.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#1f4e9c\"/>\n",
                sx(a.c),
                sy(a.mean_lc_over_n)
            ));
            s.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"9\">{}/{}</text>\n",
                sx(a.c) + 6.0,
                sy(a.mean_lc_over_n) - 4.0,
                a.certified,
                a.trials
            ));
        } else {
            s.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"none\" stroke=\"#b03030\"/>\n",
                sx(a.c),
                sy(0.0)
            ));
            s.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"9\" fill=\"#b03030\">0/{}</text>\n",
                sx(a.c) + 6.0,
                sy(0.0) - 6.0,
                a.trials
            ));
        }
    }
    s
}
