//! Minimal SVG plots: axes, points with error bars, solid or dashed lines,
//! histogram bars, optional log axes.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 50.0;

#[derive(Clone, Debug)]
pub enum Series {
    Points {
        xs: Vec<f64>,
        ys: Vec<f64>,
        errors: Option<Vec<f64>>,
        color: &'static str,
    },
    Line {
        xs: Vec<f64>,
        ys: Vec<f64>,
        dashed: bool,
        color: &'static str,
    },
    /// Bars spanning `[lo, hi]` with the given heights.
    Bars {
        lo: Vec<f64>,
        hi: Vec<f64>,
        heights: Vec<f64>,
        color: &'static str,
    },
}

#[derive(Clone, Debug, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log2() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = if log { 0.25 } else { 0.05 * (hi - lo) };
        Self {
            lo: lo - pad,
            hi: hi + pad,
            log,
        }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.max(f64::MIN_POSITIVE).log2() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let step = ((b - a) / 8).max(1);
            (a..=b)
                .step_by(step as usize)
                .map(|k| (2f64.powi(k), format!("2^{k}")))
                .collect()
        } else {
            (0..=5)
                .map(|i| {
                    let v = self.lo + (self.hi - self.lo) * i as f64 / 5.0;
                    (v, format!("{v:.3}"))
                })
                .collect()
        }
    }
}

impl Plot {
    fn extents(&self) -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in &self.series {
            match s {
                Series::Points { xs: x, ys: y, errors, .. } => {
                    xs.extend(x);
                    match errors {
                        Some(e) => {
                            for (v, e) in y.iter().zip(e) {
                                ys.push(v - e);
                                ys.push(v + e);
                            }
                        }
                        None => ys.extend(y),
                    }
                }
                Series::Line { xs: x, ys: y, .. } => {
                    xs.extend(x);
                    ys.extend(y);
                }
                Series::Bars { lo, hi, heights, .. } => {
                    xs.extend(lo);
                    xs.extend(hi);
                    ys.push(0.0);
                    ys.extend(heights);
                }
            }
        }
        (xs, ys)
    }

    pub fn render(&self) -> String {
        let (xv, yv) = self.extents();
        let ax = Axis::fit(xv.into_iter(), self.log_x);
        let ay = Axis::fit(yv.into_iter(), self.log_y);
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let px = |x: f64| LEFT + ax.unit(x) * pw;
        let py = |y: f64| TOP + (1.0 - ay.unit(y)) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for (v, label) in ax.ticks() {
            let x = px(v);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 18.0
            );
        }
        for (v, label) in ay.ticks() {
            let y = py(v);
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for s in &self.series {
            match s {
                Series::Bars { lo, hi, heights, color } => {
                    for ((&a, &b), &h) in lo.iter().zip(hi).zip(heights) {
                        let (x0, x1) = (px(a), px(b));
                        let (y0, y1) = (py(h), py(0.0));
                        let _ = writeln!(
                            out,
                            r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.5" stroke="{color}"/>"#,
                            (x1 - x0).max(0.0),
                            (y1 - y0).max(0.0)
                        );
                    }
                }
                Series::Line { xs, ys, dashed, color } => {
                    let pts: Vec<String> = xs
                        .iter()
                        .zip(ys)
                        .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
                        .collect();
                    let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let _ = writeln!(
                        out,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                        pts.join(" ")
                    );
                }
                Series::Points { xs, ys, errors, color } => {
                    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
                        if let Some(e) = errors.as_ref().map(|e| e[i]) {
                            let _ = writeln!(
                                out,
                                r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{color}"/>"#,
                                px(x),
                                py(y - e),
                                py(y + e)
                            );
                        }
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                            px(x),
                            py(y)
                        );
                    }
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_all_series_kinds() {
        let plot = Plot {
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: true,
            log_y: false,
            series: vec![
                Series::Points {
                    xs: vec![2.0, 4.0, 8.0],
                    ys: vec![1.0, 2.0, 3.0],
                    errors: Some(vec![0.1, 0.2, 0.3]),
                    color: "black",
                },
                Series::Line {
                    xs: vec![2.0, 8.0],
                    ys: vec![1.0, 3.0],
                    dashed: true,
                    color: "red",
                },
                Series::Bars {
                    lo: vec![2.0],
                    hi: vec![4.0],
                    heights: vec![2.5],
                    color: "blue",
                },
            ],
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn empty_plot_renders() {
        assert!(Plot::default().render().contains("</svg>"));
    }
}
