//! Deterministic SVG chart emitters.
//!
//! All three chart kinds are plain text output with fixed ordering, a fixed
//! palette, and fixed-precision coordinates, so identical inputs yield
//! identical bytes. Scatter points carry `class="pt"`, report bars
//! `class="bar"`, histogram bars `class="hbar"`.

use crate::data::{Dataset, Label, N_FEATURES};
use crate::eval::Report;
use crate::util::fmt_g6;

/// One color per label, in canonical label order.
pub const LABEL_COLORS: [&str; 4] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a"];

/// Colors for the train/test/best score bars.
pub const SCORE_COLORS: [&str; 3] = ["#66c2a5", "#fc8d62", "#8da0cb"];

const FEATURE_NAMES: [&str; N_FEATURES] =
    ["PhiXSectContin", "PixelColor", "NeighbColorGrad", "Betw2Amplify"];

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"monospace\" font-size=\"10\">\n"
    )
}

fn feature_ranges(data: &Dataset) -> [(f64, f64); N_FEATURES] {
    let mut lo = [f64::INFINITY; N_FEATURES];
    let mut hi = [f64::NEG_INFINITY; N_FEATURES];
    for row in data.rows() {
        let f = row.features.as_f64();
        for j in 0..N_FEATURES {
            lo[j] = lo[j].min(f[j]);
            hi[j] = hi[j].max(f[j]);
        }
    }
    std::array::from_fn(|j| {
        if hi[j] > lo[j] {
            let pad = 0.05 * (hi[j] - lo[j]);
            (lo[j] - pad, hi[j] + pad)
        } else {
            (lo[j] - 0.5, hi[j] + 0.5)
        }
    })
}

fn legend(out: &mut String, x: f64, y: f64) {
    for (i, label) in Label::ALL.iter().enumerate() {
        let lx = x + 110.0 * i as f64;
        out.push_str(&format!(
            "<rect x=\"{lx:.2}\" y=\"{y:.2}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            LABEL_COLORS[i]
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\">{label}</text>\n",
            lx + 14.0,
            y + 9.0
        ));
    }
}

/// Pairwise feature scatter matrix colored by label: a 4x4 grid of panels,
/// each holding every row as one point.
pub fn scatter_matrix(data: &Dataset) -> String {
    const PANEL: f64 = 150.0;
    const GAP: f64 = 12.0;
    const MARGIN: f64 = 40.0;
    let side = MARGIN + 4.0 * PANEL + 3.0 * GAP + 12.0;
    let ranges = feature_ranges(data);

    let mut out = svg_open(side, side + 24.0);
    for fi in 0..N_FEATURES {
        for fj in 0..N_FEATURES {
            let ox = MARGIN + fj as f64 * (PANEL + GAP);
            let oy = MARGIN + fi as f64 * (PANEL + GAP);
            out.push_str(&format!(
                "<g class=\"panel\" data-x=\"{}\" data-y=\"{}\">\n",
                FEATURE_NAMES[fj], FEATURE_NAMES[fi]
            ));
            out.push_str(&format!(
                "<rect x=\"{ox:.2}\" y=\"{oy:.2}\" width=\"{PANEL:.2}\" height=\"{PANEL:.2}\" \
                 fill=\"none\" stroke=\"#888\"/>\n"
            ));
            if fi == 0 {
                out.push_str(&format!(
                    "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
                    ox + PANEL / 2.0,
                    oy - 6.0,
                    FEATURE_NAMES[fj]
                ));
            }
            if fj == 0 {
                out.push_str(&format!(
                    "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" \
                     transform=\"rotate(-90 {:.2} {:.2})\">{}</text>\n",
                    ox - 8.0,
                    oy + PANEL / 2.0,
                    ox - 8.0,
                    oy + PANEL / 2.0,
                    FEATURE_NAMES[fi]
                ));
            }
            let (x_lo, x_hi) = ranges[fj];
            let (y_lo, y_hi) = ranges[fi];
            for row in data.rows() {
                let f = row.features.as_f64();
                let cx = ox + (f[fj] - x_lo) / (x_hi - x_lo) * PANEL;
                let cy = oy + PANEL - (f[fi] - y_lo) / (y_hi - y_lo) * PANEL;
                out.push_str(&format!(
                    "<circle class=\"pt\" cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"2.5\" \
                     fill=\"{}\" fill-opacity=\"0.7\"/>\n",
                    LABEL_COLORS[row.label.index()]
                ));
            }
            out.push_str("</g>\n");
        }
    }
    legend(&mut out, MARGIN, side);
    out.push_str("</svg>\n");
    out
}

/// Per-feature histograms with one bar per (bin, label) pair: binary
/// features get two bins, the continuous ones sixteen.
pub fn histograms(data: &Dataset) -> String {
    const CHART_W: f64 = 640.0;
    const CHART_H: f64 = 120.0;
    const GAP: f64 = 36.0;
    const MARGIN: f64 = 40.0;
    let width = MARGIN + CHART_W + 20.0;
    let height = MARGIN + 4.0 * (CHART_H + GAP) + 24.0;
    let ranges = feature_ranges(data);

    let mut out = svg_open(width, height);
    for fi in 0..N_FEATURES {
        let bins = if fi == 0 || fi == 3 { 2 } else { 16 };
        let (lo, hi) = ranges[fi];
        let mut counts = vec![[0usize; 4]; bins];
        for row in data.rows() {
            let v = row.features.as_f64()[fi];
            let mut b = ((v - lo) / (hi - lo) * bins as f64) as usize;
            if b >= bins {
                b = bins - 1;
            }
            counts[b][row.label.index()] += 1;
        }
        let max_count = counts.iter().flatten().copied().max().unwrap_or(1).max(1);

        let oy = MARGIN + fi as f64 * (CHART_H + GAP);
        out.push_str(&format!(
            "<text x=\"{MARGIN:.2}\" y=\"{:.2}\">{} ({} bins)</text>\n",
            oy - 6.0,
            FEATURE_NAMES[fi],
            bins
        ));
        out.push_str(&format!(
            "<line x1=\"{MARGIN:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888\"/>\n",
            oy + CHART_H,
            MARGIN + CHART_W,
            oy + CHART_H
        ));
        let bin_w = CHART_W / bins as f64;
        let bar_w = (bin_w - 4.0) / 4.0;
        for (b, bin_counts) in counts.iter().enumerate() {
            for (li, &c) in bin_counts.iter().enumerate() {
                let h = c as f64 / max_count as f64 * CHART_H;
                let x = MARGIN + b as f64 * bin_w + 2.0 + li as f64 * bar_w;
                let y = oy + CHART_H - h;
                out.push_str(&format!(
                    "<rect class=\"hbar\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{bar_w:.2}\" \
                     height=\"{h:.2}\" fill=\"{}\"/>\n",
                    LABEL_COLORS[li]
                ));
            }
        }
    }
    legend(&mut out, MARGIN, height - 18.0);
    out.push_str("</svg>\n");
    out
}

/// Grouped train/test/best-accuracy bars, one group per report entry.
pub fn score_bars(report: &Report) -> String {
    const BAR_W: f64 = 34.0;
    const GROUP_GAP: f64 = 30.0;
    const CHART_H: f64 = 260.0;
    const MARGIN_L: f64 = 50.0;
    const MARGIN_T: f64 = 30.0;
    let n = report.entries.len();
    let group_w = 3.0 * BAR_W;
    let width = MARGIN_L + n as f64 * (group_w + GROUP_GAP) + 40.0;
    let height = MARGIN_T + CHART_H + 70.0;

    let mut out = svg_open(width, height);
    // Gridlines at 0, 0.25, ..., 1.0.
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let y = MARGIN_T + CHART_H * (1.0 - frac);
        out.push_str(&format!(
            "<line x1=\"{MARGIN_L:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"#ddd\"/>\n",
            width - 20.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 6.0,
            y + 3.0,
            fmt_g6(frac)
        ));
    }
    for (gi, entry) in report.entries.iter().enumerate() {
        let ox = MARGIN_L + gi as f64 * (group_w + GROUP_GAP);
        let scores = [entry.train_score, entry.test_score, entry.best_accuracy];
        for (si, score) in scores.iter().enumerate() {
            let v = score.unwrap_or(0.0).clamp(0.0, 1.0);
            let h = v * CHART_H;
            let x = ox + si as f64 * BAR_W;
            let y = MARGIN_T + CHART_H - h;
            out.push_str(&format!(
                "<rect class=\"bar\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" \
                 height=\"{h:.2}\" fill=\"{}\"/>\n",
                BAR_W - 4.0,
                SCORE_COLORS[si]
            ));
        }
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            ox + group_w / 2.0,
            MARGIN_T + CHART_H + 14.0,
            entry.algorithm
        ));
    }
    let series = ["train score", "test score", "best accuracy"];
    for (i, name) in series.iter().enumerate() {
        let lx = MARGIN_L + 140.0 * i as f64;
        let ly = MARGIN_T + CHART_H + 34.0;
        out.push_str(&format!(
            "<rect x=\"{lx:.2}\" y=\"{ly:.2}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            SCORE_COLORS[i]
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\">{name}</text>\n",
            lx + 14.0,
            ly + 9.0
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::AlgorithmConfig;
    use crate::data::GenConfig;
    use crate::datagen::{generate_dataset, reference_dataset};
    use crate::eval::{benchmark, SplitConfig};

    #[test]
    fn scatter_has_one_point_per_row_per_panel() {
        let data = reference_dataset();
        let svg = scatter_matrix(&data);
        assert_eq!(svg.matches("class=\"panel\"").count(), 16);
        assert_eq!(svg.matches("class=\"pt\"").count(), 16 * 20);
        for panel in svg.split("class=\"panel\"").skip(1) {
            let body = panel.split("</g>").next().unwrap();
            assert_eq!(body.matches("class=\"pt\"").count(), 20);
        }
        assert!(svg.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn bars_count_is_three_per_algorithm() {
        let data = generate_dataset(&GenConfig { n_samples: 120, ..GenConfig::default() }).unwrap();
        let report =
            benchmark(&data, &SplitConfig::default(), &AlgorithmConfig::suite_defaults()).unwrap();
        let svg = score_bars(&report);
        assert_eq!(svg.matches("class=\"bar\"").count(), 15);
    }

    #[test]
    fn emitters_are_deterministic() {
        let data = generate_dataset(&GenConfig { n_samples: 60, ..GenConfig::default() }).unwrap();
        assert_eq!(scatter_matrix(&data), scatter_matrix(&data));
        assert_eq!(histograms(&data), histograms(&data));
        let report =
            benchmark(&data, &SplitConfig::default(), &AlgorithmConfig::suite_defaults()).unwrap();
        assert_eq!(score_bars(&report), score_bars(&report));
    }

    #[test]
    fn histogram_emits_bars_for_every_label_bin_pair() {
        let data = reference_dataset();
        let svg = histograms(&data);
        // 2 + 16 + 16 + 2 bins, 4 labels each.
        assert_eq!(svg.matches("class=\"hbar\"").count(), 4 * (2 + 16 + 16 + 2));
    }
}
