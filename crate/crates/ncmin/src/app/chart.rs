//! Static SVG charts for the comparison figures, drawn by hand: fixed
//! 800x500 canvas, one polyline per strategy, legend, axis labels. No
//! plotting dependency; the output is deterministic text.

use std::fmt::Write as _;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
// plot rectangle inside the canvas, leaving room for labels and legend
const X0: f64 = 80.0;
const X1: f64 = 620.0;
const Y0: f64 = 50.0;
const Y1: f64 = 440.0;
const TICKS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    DownloadTimeVsFileSize,
    FailureVsDynamicLinks,
    RedundancyVsFileSize,
    ThroughputVsTime,
}

impl ChartKind {
    pub fn title(self) -> &'static str {
        match self {
            ChartKind::DownloadTimeVsFileSize => "Download Time Vs File Size",
            ChartKind::FailureVsDynamicLinks => "Failure Rate Vs Number of Dynamic Links",
            ChartKind::RedundancyVsFileSize => "Packet Redundancy Vs File Size",
            ChartKind::ThroughputVsTime => "System Throughput",
        }
    }

    pub fn x_label(self) -> &'static str {
        match self {
            ChartKind::DownloadTimeVsFileSize | ChartKind::RedundancyVsFileSize => {
                "file size (blocks)"
            }
            ChartKind::FailureVsDynamicLinks => "dynamic links",
            ChartKind::ThroughputVsTime => "round",
        }
    }

    pub fn y_label(self) -> &'static str {
        match self {
            ChartKind::DownloadTimeVsFileSize => "mean download time (rounds)",
            ChartKind::FailureVsDynamicLinks => "failure rate",
            ChartKind::RedundancyVsFileSize => "packet redundancy",
            ChartKind::ThroughputVsTime => "throughput (bytes/round)",
        }
    }

    /// File the chart is written to inside the output directory.
    pub fn file_name(self) -> &'static str {
        match self {
            ChartKind::DownloadTimeVsFileSize => "download_time_vs_filesize.svg",
            ChartKind::FailureVsDynamicLinks => "failure_vs_dynamic_links.svg",
            ChartKind::RedundancyVsFileSize => "redundancy_vs_filesize.svg",
            ChartKind::ThroughputVsTime => "throughput_vs_time.svg",
        }
    }
}

/// One strategy's curve. Points with a non-finite y (for example a mean
/// download time when nothing completed) are left out of the drawing.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub series: Vec<Series>,
}

fn color(name: &str, index: usize) -> &'static str {
    const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
    match name {
        "GANS" => "#1f77b4",
        "RSN" => "#ff7f0e",
        "CAN" => "#2ca02c",
        "NONE" => "#d62728",
        _ => PALETTE[index % PALETTE.len()],
    }
}

fn tick_label(v: f64, span: f64) -> String {
    if span >= 10.0 {
        format!("{v:.0}")
    } else if span >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

impl ChartSpec {
    /// Renders the chart. All series must have the same number of points
    /// and at least one point overall must be finite.
    pub fn render(&self) -> Result<String, String> {
        if self.series.is_empty() {
            return Err("chart needs at least one series".into());
        }
        let len = self.series[0].points.len();
        if self.series.iter().any(|s| s.points.len() != len) {
            return Err("all series in a chart must have the same length".into());
        }
        let finite: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        if finite.is_empty() {
            return Err("chart has no finite data points".into());
        }
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in &finite {
            xmin = xmin.min(*x);
            xmax = xmax.max(*x);
            ymin = ymin.min(*y);
            ymax = ymax.max(*y);
        }
        if xmin == xmax {
            xmin -= 1.0;
            xmax += 1.0;
        }
        if ymin == ymax {
            ymin -= 1.0;
            ymax += 1.0;
        } else {
            let pad = (ymax - ymin) * 0.06;
            ymin = if ymin >= 0.0 { (ymin - pad).max(0.0) } else { ymin - pad };
            ymax += pad;
        }
        let sx = |x: f64| X0 + (x - xmin) / (xmax - xmin) * (X1 - X0);
        let sy = |y: f64| Y1 - (y - ymin) / (ymax - ymin) * (Y1 - Y0);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">"
        );
        let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" fill=\"#222\">{}</text>",
            (X0 + X1) / 2.0,
            self.kind.title()
        );

        // gridlines and tick labels
        for i in 0..TICKS {
            let t = i as f64 / (TICKS - 1) as f64;
            let xv = xmin + t * (xmax - xmin);
            let yv = ymin + t * (ymax - ymin);
            let gx = sx(xv);
            let gy = sy(yv);
            let _ = writeln!(
                svg,
                "<line x1=\"{gx:.1}\" y1=\"{Y0}\" x2=\"{gx:.1}\" y2=\"{Y1}\" stroke=\"#ddd\"/>"
            );
            let _ = writeln!(
                svg,
                "<line x1=\"{X0}\" y1=\"{gy:.1}\" x2=\"{X1}\" y2=\"{gy:.1}\" stroke=\"#ddd\"/>"
            );
            let _ = writeln!(
                svg,
                "<text x=\"{gx:.1}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" \
                 fill=\"#222\">{}</text>",
                Y1 + 18.0,
                tick_label(xv, xmax - xmin)
            );
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"12\" \
                 fill=\"#222\">{}</text>",
                X0 - 8.0,
                gy + 4.0,
                tick_label(yv, ymax - ymin)
            );
        }

        // axes over the grid
        let _ = writeln!(
            svg,
            "<line x1=\"{X0}\" y1=\"{Y1}\" x2=\"{X1}\" y2=\"{Y1}\" stroke=\"#222\" stroke-width=\"1.5\"/>"
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{X0}\" y1=\"{Y0}\" x2=\"{X0}\" y2=\"{Y1}\" stroke=\"#222\" stroke-width=\"1.5\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"478\" text-anchor=\"middle\" font-size=\"14\" fill=\"#222\">{}</text>",
            (X0 + X1) / 2.0,
            self.kind.x_label()
        );
        let _ = writeln!(
            svg,
            "<text x=\"22\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\" fill=\"#222\" \
             transform=\"rotate(-90 22 {})\">{}</text>",
            (Y0 + Y1) / 2.0,
            (Y0 + Y1) / 2.0,
            self.kind.y_label()
        );

        for (i, series) in self.series.iter().enumerate() {
            let c = color(&series.name, i);
            let pts: Vec<(f64, f64)> = series
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| (sx(x), sy(y)))
                .collect();
            if pts.len() > 1 {
                let path: Vec<String> =
                    pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
                let _ = writeln!(
                    svg,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{c}\" stroke-width=\"2\"/>",
                    path.join(" ")
                );
            }
            for (x, y) in &pts {
                let _ = writeln!(svg, "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"3\" fill=\"{c}\"/>");
            }
            // legend row
            let ly = Y0 + 14.0 + i as f64 * 22.0;
            let _ = writeln!(
                svg,
                "<line x1=\"{}\" y1=\"{ly:.1}\" x2=\"{}\" y2=\"{ly:.1}\" stroke=\"{c}\" stroke-width=\"2\"/>",
                X1 + 18.0,
                X1 + 48.0
            );
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{:.1}\" font-size=\"13\" fill=\"#222\">{}</text>",
                X1 + 54.0,
                ly + 4.0,
                series.name
            );
        }
        svg.push_str("</svg>\n");
        Ok(svg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ChartSpec {
        ChartSpec {
            kind: ChartKind::RedundancyVsFileSize,
            series: vec![
                Series { name: "GANS".into(), points: vec![(16.0, 1.2), (32.0, 1.3), (64.0, 1.4)] },
                Series { name: "NONE".into(), points: vec![(16.0, 1.6), (32.0, 1.9), (64.0, 2.4)] },
            ],
        }
    }

    #[test]
    fn renders_polylines_legend_and_labels() {
        let svg = spec().render().unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("Packet Redundancy Vs File Size"));
        assert!(svg.contains(">GANS</text>"));
        assert!(svg.contains(">NONE</text>"));
        assert!(svg.contains("file size (blocks)"));
        assert!(svg.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn unequal_series_lengths_are_rejected() {
        let mut s = spec();
        s.series[1].points.pop();
        assert!(s.render().unwrap_err().contains("same length"));
    }

    #[test]
    fn non_finite_points_are_skipped_not_fatal() {
        let mut s = spec();
        s.series[0].points[1].1 = f64::NAN;
        let svg = s.render().unwrap();
        // one series drops to 2 drawable points, still a polyline
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn all_nan_chart_is_an_error() {
        let s = ChartSpec {
            kind: ChartKind::DownloadTimeVsFileSize,
            series: vec![Series { name: "CAN".into(), points: vec![(1.0, f64::NAN)] }],
        };
        assert!(s.render().unwrap_err().contains("no finite data"));
    }

    #[test]
    fn rendering_is_deterministic() {
        assert_eq!(spec().render().unwrap(), spec().render().unwrap());
    }
}
