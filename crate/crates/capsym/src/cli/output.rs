//! Artifact emission: CSV profiles, JSON-lines reports, SVG plots, and a
//! small environment-driven logger.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{CapsymError, Result};
use crate::verify::report::VerificationReport;

/// Logging level taken from `CAPSYM_LOG` (error < warn < info < debug).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LogLevel {
    Error,
    Warn,
    Info,
    Debug,
}

pub fn log_level() -> LogLevel {
    match std::env::var("CAPSYM_LOG").as_deref() {
        Ok("debug") => LogLevel::Debug,
        Ok("info") => LogLevel::Info,
        Ok("warn") => LogLevel::Warn,
        _ => LogLevel::Error,
    }
}

pub fn log(level: LogLevel, msg: &str) {
    if level <= log_level() {
        eprintln!("capsym[{level:?}]: {}", msg);
    }
}

/// A CSV table with a mandatory header. Numbers are written in scientific
/// notation with 17 significant digits so that re-importing reproduces
/// the in-memory values bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(headers: &[&str]) -> Self {
        CsvTable {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_text(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(CapsymError::Parse {
            line: 1,
            msg: "empty CSV".into(),
        })?;
        let headers: Vec<String> = header.split(',').map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for (lno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|c| {
                    c.trim().parse::<f64>().map_err(|_| CapsymError::Parse {
                        line: lno + 1,
                        msg: format!("bad CSV number '{c}'"),
                    })
                })
                .collect::<Result<_>>()?;
            if row.len() != headers.len() {
                return Err(CapsymError::Parse {
                    line: lno + 1,
                    msg: format!("expected {} columns, got {}", headers.len(), row.len()),
                });
            }
            rows.push(row);
        }
        Ok(CsvTable { headers, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Append reports to a JSON-lines file, one object per line.
pub fn append_reports(path: &Path, reports: &[VerificationReport]) -> Result<()> {
    use std::io::Write;
    let mut file = fs::OpenOptions::new().create(true).append(true).open(path)?;
    for r in reports {
        writeln!(file, "{}", r.to_json_line())?;
    }
    Ok(())
}

/// One named curve for the SVG plot.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

/// Emit a fixed-viewport 800x600 line plot as a standalone SVG document.
/// No plotting dependency: axes, labels, and polylines are written
/// directly.
pub fn plot_svg(title: &str, series: &[Series]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 600.0;
    const ML: f64 = 70.0; // margins
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if xmax - xmin < 1e-300 {
        xmax = xmin + 1.0;
    }
    if ymax - ymin < 1e-300 {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| ML + (x - xmin) / (xmax - xmin) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n\
         <rect width=\"800\" height=\"600\" fill=\"white\"/>\n\
         <text x=\"400\" y=\"25\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        xml_escape(title)
    );
    // axes
    let _ = write!(
        svg,
        "<line x1=\"{ML}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n\
         <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{0}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR
    );
    // tick labels at the extremes
    let _ = write!(
        svg,
        "<text x=\"{ML}\" y=\"{0}\" font-size=\"11\">{xmin:.4e}</text>\n\
         <text x=\"{1}\" y=\"{0}\" text-anchor=\"end\" font-size=\"11\">{xmax:.4e}</text>\n\
         <text x=\"{2}\" y=\"{3}\" font-size=\"11\" text-anchor=\"end\">{ymin:.4e}</text>\n\
         <text x=\"{2}\" y=\"{4}\" font-size=\"11\" text-anchor=\"end\">{ymax:.4e}</text>\n",
        H - MB + 18.0,
        W - MR,
        ML - 4.0,
        H - MB,
        MT + 10.0
    );
    for (k, s) in series.iter().enumerate() {
        let color = colors[k % colors.len()];
        let mut d = String::new();
        for &(x, y) in s.points {
            if y.is_finite() && x.is_finite() {
                let _ = write!(d, "{:.2},{:.2} ", sx(x), sy(y));
            }
        }
        let _ = write!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            d.trim_end(),
            W - MR - 150.0,
            MT + 18.0 * (k as f64 + 1.0),
            xml_escape(s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
