//! Static SVG bar charts for campaign results.

const PALETTE: [&str; 6] = [
    "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2",
];

pub struct BarGroup {
    /// Group label (one group per device).
    pub label: String,
    pub bars: Vec<(String, f64)>,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Grouped bar chart: one `<g class="group">` per group, bars colored by
/// series label. Handles negative values by anchoring bars on the zero
/// line.
pub fn grouped_bar_svg(title: &str, y_label: &str, groups: &[BarGroup]) -> String {
    let bar_w = 26.0;
    let bar_gap = 4.0;
    let group_gap = 34.0;
    let margin_left = 70.0;
    let margin_right = 20.0;
    let margin_top = 46.0;
    let margin_bottom = 58.0;
    let plot_h = 280.0;

    let mut series: Vec<&str> = Vec::new();
    for g in groups {
        for (name, _) in &g.bars {
            if !series.contains(&name.as_str()) {
                series.push(name);
            }
        }
    }
    let color_of = |name: &str| {
        let idx = series.iter().position(|s| *s == name).unwrap_or(0);
        PALETTE[idx % PALETTE.len()]
    };

    let values: Vec<f64> = groups.iter().flat_map(|g| g.bars.iter().map(|b| b.1)).collect();
    let vmax = values.iter().cloned().fold(0.0f64, f64::max).max(1e-12);
    let vmin = values.iter().cloned().fold(0.0f64, f64::min);
    let span = vmax - vmin;
    let y_of = |v: f64| margin_top + (vmax - v) / span * plot_h;

    let group_w = |g: &BarGroup| g.bars.len() as f64 * (bar_w + bar_gap);
    let total_bars_w: f64 = groups.iter().map(group_w).sum();
    let width = margin_left + margin_right + total_bars_w + group_gap * groups.len() as f64;
    let height = margin_top + plot_h + margin_bottom;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        width / 2.0,
        escape(title)
    ));
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{:.1}\" transform=\"rotate(-90 16 {:.1})\" text-anchor=\"middle\">{}</text>\n",
        margin_top + plot_h / 2.0,
        margin_top + plot_h / 2.0,
        escape(y_label)
    ));
    // Axis lines and extreme tick labels.
    let zero_y = y_of(0.0);
    svg.push_str(&format!(
        "  <line x1=\"{margin_left:.1}\" y1=\"{zero_y:.1}\" x2=\"{:.1}\" y2=\"{zero_y:.1}\" stroke=\"#333\"/>\n",
        width - margin_right
    ));
    for (v, y) in [(vmax, y_of(vmax)), (0.0, zero_y)] {
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{v:.1}</text>\n",
            margin_left - 6.0,
            y + 4.0
        ));
    }

    let mut x = margin_left + group_gap / 2.0;
    for g in groups {
        svg.push_str(&format!(
            "  <g class=\"group\" data-group=\"{}\">\n",
            escape(&g.label)
        ));
        let group_start = x;
        for (name, value) in &g.bars {
            let top = y_of(value.max(0.0));
            let bottom = y_of(value.min(0.0));
            svg.push_str(&format!(
                "    <rect x=\"{x:.1}\" y=\"{top:.1}\" width=\"{bar_w:.1}\" height=\"{:.1}\" \
                 fill=\"{}\"><title>{}: {value}</title></rect>\n",
                (bottom - top).max(0.5),
                color_of(name),
                escape(name)
            ));
            x += bar_w + bar_gap;
        }
        let center = (group_start + x - bar_gap) / 2.0;
        svg.push_str(&format!(
            "    <text x=\"{center:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            margin_top + plot_h + 18.0,
            escape(&g.label)
        ));
        svg.push_str("  </g>\n");
        x += group_gap;
    }

    // Legend.
    let mut lx = margin_left;
    let ly = height - 16.0;
    for name in &series {
        svg.push_str(&format!(
            "  <rect x=\"{lx:.1}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n",
            ly - 10.0,
            color_of(name)
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{ly:.1}\">{}</text>\n",
            lx + 16.0,
            escape(name)
        ));
        lx += 16.0 + 8.0 * name.len() as f64 + 24.0;
    }
    svg.push_str("</svg>\n");
    svg
}
