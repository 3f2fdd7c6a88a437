//! Sectioned key=value experiment configuration.
//!
//! Format: `[section]` headers followed by `key = value` lines; `#` starts
//! a comment. Sections are `experiment`, `obstacle`, `outer`, `field`, and
//! `output`. Numeric values accept plain literals and fractions such as
//! `1/64`. Unknown sections or keys are errors.

use std::sync::Arc;

use crate::error::{CapsymError, Result};
use crate::gauge::{DriftField, GaugeDescriptor};
use crate::geometry::grid::{GridField, MaskedGrid};
use crate::geometry::obstacle::{ConvexObstacle, OuterShape};
use crate::harmonic::analytic_drift;
use crate::vecn::VecN;
use crate::verify::constants::MoserConvention;

#[derive(Debug, Clone, PartialEq)]
pub enum ObstacleSpec {
    None,
    HalfSpace,
    Ball { center: Vec<f64>, radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum OuterSpec {
    Ball { center: Vec<f64>, radius: f64 },
    Box { min: Vec<f64>, max: Vec<f64> },
}

/// Built-in analytic test/source fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    /// Constant one on the domain (zero on the Dirichlet rim where the
    /// experiment requires it).
    Constant,
    /// Cone `amplitude * (1 - |x - apex|)_+`.
    Cone,
    /// Paraboloid `amplitude * (1 - |x|^2)_+`.
    Parabola,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub lambda: f64,
    pub p: f64,
    pub n: usize,
    pub spacing: f64,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub moser_convention: MoserConvention,
    pub obstacle: ObstacleSpec,
    pub outer: OuterSpec,
    pub field: FieldSpec,
    pub field_amplitude: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: String::new(),
            lambda: 0.0,
            p: 2.0,
            n: 2,
            spacing: 1.0 / 32.0,
            seed: 0,
            tolerance: None,
            moser_convention: MoserConvention::Proposition,
            obstacle: ObstacleSpec::HalfSpace,
            outer: OuterSpec::Ball {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            field: FieldSpec::Constant,
            field_amplitude: 1.0,
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> CapsymError {
    CapsymError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parse a real literal, allowing `a/b` fractions.
fn parse_number(line: usize, s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: f64 = a
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("bad numerator in '{s}'")))?;
        let den: f64 = b
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("bad denominator in '{s}'")))?;
        if den == 0.0 {
            return Err(parse_err(line, format!("zero denominator in '{s}'")));
        }
        return Ok(num / den);
    }
    s.parse()
        .map_err(|_| parse_err(line, format!("bad number '{s}'")))
}

fn parse_vec(line: usize, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|c| parse_number(line, c)).collect()
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut section = String::from("experiment");
    // obstacle/outer accumulate raw keys, then get assembled
    let mut obstacle_kind: Option<String> = None;
    let mut outer_kind: Option<String> = None;
    let mut center: Vec<f64> = Vec::new();
    let mut radius = 1.0f64;
    let mut outer_center: Vec<f64> = Vec::new();
    let mut outer_radius = 1.0f64;
    let mut outer_min: Vec<f64> = Vec::new();
    let mut outer_max: Vec<f64> = Vec::new();

    for (lno, raw) in text.lines().enumerate() {
        let line_no = lno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_lowercase();
            match name.as_str() {
                "experiment" | "obstacle" | "outer" | "field" | "output" => section = name,
                other => return Err(parse_err(line_no, format!("unknown section '[{other}]'"))),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim().to_lowercase();
        let value = value.trim();
        match (section.as_str(), key.as_str()) {
            ("experiment", "name") | ("experiment", "experiment") => {
                cfg.experiment = value.to_lowercase().replace('-', "_");
            }
            ("experiment", "lambda") => cfg.lambda = parse_number(line_no, value)?,
            ("experiment", "p") => cfg.p = parse_number(line_no, value)?,
            ("experiment", "n") => {
                cfg.n = parse_number(line_no, value)? as usize;
            }
            ("experiment", "spacing") | ("experiment", "h") => {
                cfg.spacing = parse_number(line_no, value)?;
            }
            ("experiment", "seed") => {
                cfg.seed = parse_number(line_no, value)? as u64;
            }
            ("experiment", "tolerance") => cfg.tolerance = Some(parse_number(line_no, value)?),
            ("experiment", "moser_convention") => {
                cfg.moser_convention = match value.to_lowercase().as_str() {
                    "proposition" => MoserConvention::Proposition,
                    "theorem" => MoserConvention::Theorem,
                    other => {
                        return Err(parse_err(
                            line_no,
                            format!("moser_convention must be proposition|theorem, got '{other}'"),
                        ))
                    }
                };
            }
            ("obstacle", "kind") => obstacle_kind = Some(value.to_lowercase()),
            ("obstacle", "center") => center = parse_vec(line_no, value)?,
            ("obstacle", "radius") => radius = parse_number(line_no, value)?,
            ("outer", "kind") => outer_kind = Some(value.to_lowercase()),
            ("outer", "center") => outer_center = parse_vec(line_no, value)?,
            ("outer", "radius") => outer_radius = parse_number(line_no, value)?,
            ("outer", "min") => outer_min = parse_vec(line_no, value)?,
            ("outer", "max") => outer_max = parse_vec(line_no, value)?,
            ("field", "kind") => {
                cfg.field = match value.to_lowercase().as_str() {
                    "constant" => FieldSpec::Constant,
                    "cone" => FieldSpec::Cone,
                    "parabola" => FieldSpec::Parabola,
                    other => {
                        return Err(parse_err(
                            line_no,
                            format!("field kind must be constant|cone|parabola, got '{other}'"),
                        ))
                    }
                };
            }
            ("field", "amplitude") => cfg.field_amplitude = parse_number(line_no, value)?,
            // output paths are accepted but resolved by the caller against
            // the --out directory; only known keys pass
            ("output", "report") | ("output", "csv") | ("output", "svg") => {}
            (sec, k) => {
                return Err(parse_err(
                    line_no,
                    format!("unknown key '{k}' in section '[{sec}]'"),
                ))
            }
        }
    }

    if center.is_empty() {
        center = vec![0.0; cfg.n];
    }
    cfg.obstacle = match obstacle_kind.as_deref() {
        None | Some("halfspace") | Some("half_space") => ObstacleSpec::HalfSpace,
        Some("none") | Some("far") => ObstacleSpec::None,
        Some("ball") => ObstacleSpec::Ball { center, radius },
        Some(other) => {
            return Err(parse_err(
                0,
                format!("obstacle kind must be halfspace|ball|none, got '{other}'"),
            ))
        }
    };
    if outer_center.is_empty() {
        outer_center = vec![0.0; cfg.n];
    }
    cfg.outer = match outer_kind.as_deref() {
        None | Some("ball") => OuterSpec::Ball {
            center: outer_center,
            radius: outer_radius,
        },
        Some("box") => {
            if outer_min.is_empty() || outer_max.is_empty() {
                return Err(parse_err(0, "box outer needs both min and max"));
            }
            OuterSpec::Box {
                min: outer_min,
                max: outer_max,
            }
        }
        Some(other) => {
            return Err(parse_err(
                0,
                format!("outer kind must be ball|box, got '{other}'"),
            ))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda.abs() < 1.0) {
            return Err(CapsymError::InvalidParameter(format!(
                "lambda must lie strictly inside (-1,1), got {}",
                self.lambda
            )));
        }
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(CapsymError::InvalidParameter(format!(
                "spacing must be positive, got {}",
                self.spacing
            )));
        }
        if !(2..=3).contains(&self.n) {
            return Err(CapsymError::InvalidParameter(format!(
                "dimension must be 2 or 3, got {}",
                self.n
            )));
        }
        if self.experiment == "sobolev" && !(1.0 < self.p && self.p < self.n as f64) {
            return Err(CapsymError::InvalidParameter(format!(
                "sobolev experiment needs 1 < p < n, got p = {}",
                self.p
            )));
        }
        Ok(())
    }

    pub fn build_obstacle(&self) -> ConvexObstacle {
        match &self.obstacle {
            ObstacleSpec::None => ConvexObstacle::far_away(self.n),
            ObstacleSpec::HalfSpace => ConvexObstacle::lower_half_space(self.n),
            ObstacleSpec::Ball { center, radius } => ConvexObstacle::Ball {
                center: VecN::new(center),
                radius: *radius,
            },
        }
    }

    pub fn build_outer(&self) -> OuterShape {
        match &self.outer {
            OuterSpec::Ball { center, radius } => OuterShape::Ball {
                center: VecN::new(center),
                radius: *radius,
            },
            OuterSpec::Box { min, max } => OuterShape::Box {
                min: VecN::new(min),
                max: VecN::new(max),
            },
        }
    }

    pub fn build_grid(&self) -> Result<MaskedGrid> {
        MaskedGrid::build(self.build_obstacle(), &self.build_outer(), self.spacing)
    }

    /// The drift of the obstacle gauge (closed form for the supported
    /// obstacle kinds).
    pub fn build_drift(&self) -> Result<Arc<dyn DriftField>> {
        analytic_drift(&self.build_obstacle(), self.lambda, self.n).ok_or_else(|| {
            CapsymError::MissingDrift
        })
    }

    pub fn build_gauge(&self) -> Result<GaugeDescriptor> {
        match &self.obstacle {
            ObstacleSpec::None => Ok(GaugeDescriptor::euclidean(self.n)),
            ObstacleSpec::HalfSpace => GaugeDescriptor::capillary_half_space(self.lambda, self.n),
            ObstacleSpec::Ball { .. } => {
                GaugeDescriptor::obstacle(self.lambda, self.n, self.build_drift()?)
            }
        }
    }

    pub fn build_field(&self, grid: &MaskedGrid) -> GridField {
        let a = self.field_amplitude;
        match self.field {
            FieldSpec::Constant => GridField::from_fn(grid, |_| a),
            FieldSpec::Cone => GridField::from_fn(grid, |x| a * (1.0 - x.norm()).max(0.0)),
            FieldSpec::Parabola => {
                GridField::from_fn(grid, |x| a * (1.0 - x.dot(&x)).max(0.0))
            }
        }
    }
}
