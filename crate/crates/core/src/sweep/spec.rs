use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::Branch;
use crate::oracles::{DEFAULT_PERIOD, DEFAULT_STEPS};
use crate::phases::DEFAULT_PANELS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Point,
    SweepG,
    TransitionSweep,
    Verify,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Point => "point",
            Mode::SweepG => "sweep-g",
            Mode::TransitionSweep => "transition-sweep",
            Mode::Verify => "verify",
        }
    }
}

/// Angle unit of phase columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Pi,
    Rad,
}

impl Units {
    pub fn as_str(self) -> &'static str {
        match self {
            Units::Pi => "pi",
            Units::Rad => "rad",
        }
    }

    pub fn scale(self, radians: f64) -> f64 {
        match self {
            Units::Pi => radians / PI,
            Units::Rad => radians,
        }
    }
}

impl FromStr for Units {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi" => Ok(Units::Pi),
            "rad" => Ok(Units::Rad),
            _ => Err(Error::Usage(format!("unknown units '{s}' (expected pi or rad)"))),
        }
    }
}

/// Which numeric oracles accompany the closed-form rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracles {
    pub wilson: bool,
    pub ode: bool,
}

impl Oracles {
    pub const NONE: Oracles = Oracles { wilson: false, ode: false };
    pub const ALL: Oracles = Oracles { wilson: true, ode: true };

    pub fn as_str(self) -> &'static str {
        match (self.wilson, self.ode) {
            (false, false) => "none",
            (true, false) => "wilson",
            (false, true) => "ode",
            (true, true) => "all",
        }
    }
}

impl FromStr for Oracles {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Oracles::NONE),
            "wilson" => Ok(Oracles { wilson: true, ode: false }),
            "ode" => Ok(Oracles { wilson: false, ode: true }),
            "all" => Ok(Oracles::ALL),
            _ => Err(Error::Usage(format!("unknown oracle '{s}' (expected none, wilson, ode or all)"))),
        }
    }
}

/// Uniform coupling grid of `steps` points from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GRange {
    pub fn single(g: f64) -> Self {
        Self { min: g, max: g, steps: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.max } else { self.min + span * i as f64 / last })
            .collect()
    }
}

impl FromStr for GRange {
    type Err = Error;
    /// `min:max:steps`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("g range '{s}' is not min:max:steps"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Ok(GRange { min, max, steps })
    }
}

impl fmt::Display for GRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.steps)
    }
}

/// Everything one run of the front end needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: Mode,
    /// Polar angle of constant-`θ` loops. For `verify`, an extra angle
    /// added to the oracle grid.
    pub theta: Option<f64>,
    pub g: GRange,
    pub branches: Vec<Branch>,
    pub oracles: Oracles,
    /// Grid points of Wilson loops and Schmidt tracking.
    pub points: usize,
    pub period: f64,
    pub steps: usize,
    pub panels: usize,
    pub units: Units,
    pub tol_scale: f64,
    pub out: Option<PathBuf>,
}

impl SweepSpec {
    pub fn new(mode: Mode) -> Self {
        let (theta, g, oracles) = match mode {
            Mode::Point => (Some(PI / 3.0), GRange::single(0.0), Oracles::NONE),
            Mode::SweepG => (Some(PI / 6.0), GRange { min: 0.0, max: 10.0, steps: 400 }, Oracles::NONE),
            Mode::TransitionSweep => (None, GRange { min: 0.0, max: 50.0, steps: 51 }, Oracles::NONE),
            Mode::Verify => (None, GRange::single(0.0), Oracles::ALL),
        };
        Self {
            mode,
            theta,
            g,
            branches: Branch::ALL.to_vec(),
            oracles,
            points: 4096,
            period: DEFAULT_PERIOD,
            steps: DEFAULT_STEPS,
            panels: DEFAULT_PANELS,
            units: Units::Pi,
            tol_scale: 1.0,
            out: None,
        }
    }

    /// Applies one `key=value` setting, as read from a config file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::Usage(format!("{key}: '{v}' is not a number")))
        };
        let count = |v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| Error::Usage(format!("{key}: '{v}' is not a positive integer")))
        };
        match key {
            "theta" => self.theta = Some(num(value)?),
            "g" => self.g = GRange::single(num(value)?),
            "g-range" => self.g = value.parse()?,
            "branch" => self.branches = parse_branches(value)?,
            "oracle" => self.oracles = value.parse()?,
            "points" => self.points = count(value)?,
            "period" => self.period = num(value)?,
            "steps" => self.steps = count(value)?,
            "panels" => self.panels = count(value)?,
            "units" => self.units = value.parse()?,
            "tol-scale" => self.tol_scale = num(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(Error::Usage(format!("unknown setting '{key}'"))),
        }
        Ok(())
    }

    /// Applies every setting of a config file.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (key, value) in parse_config(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(Error::Usage(m));
        if !(self.g.min.is_finite() && self.g.max.is_finite()) || self.g.min > self.g.max {
            return usage(format!("g range {} must satisfy min <= max", self.g));
        }
        if self.g.steps < 1 {
            return usage("g range needs at least one step".into());
        }
        if self.mode == Mode::Point && self.g.steps != 1 {
            return usage("point mode takes a single --g".into());
        }
        if self.branches.is_empty() {
            return usage("no branch selected".into());
        }
        if let Some(th) = self.theta {
            let open = matches!(self.mode, Mode::Point | Mode::SweepG | Mode::Verify);
            if open && !(th > 0.0 && th < PI) {
                return usage(format!("theta {th} must lie in (0, pi)"));
            }
        } else if matches!(self.mode, Mode::Point | Mode::SweepG) {
            return usage("this mode needs --theta".into());
        }
        if self.points < crate::oracles::MIN_WILSON_POINTS {
            return usage(format!("points must be at least {}", crate::oracles::MIN_WILSON_POINTS));
        }
        if !(self.period > 0.0) || self.steps < 2 || !self.steps.is_multiple_of(2) {
            return usage("period must be positive and steps even".into());
        }
        if self.panels < 2 {
            return usage("panels must be at least 2".into());
        }
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return usage("tol-scale must be positive".into());
        }
        Ok(())
    }

    /// One-line `key=value` echo of every setting that affects the data.
    pub fn echo(&self) -> String {
        let theta = self.theta.map_or("none".to_string(), |t| format!("{t:.17e}"));
        let branches: Vec<&str> = self.branches.iter().map(|b| b.as_str()).collect();
        let mut s = format!(
            "mode={} theta={} g-range={} branch={} oracle={} points={} period={} steps={} panels={} units={}",
            self.mode.as_str(),
            theta,
            self.g,
            branches.join(","),
            self.oracles.as_str(),
            self.points,
            self.period,
            self.steps,
            self.panels,
            self.units.as_str(),
        );
        if self.mode == Mode::Verify {
            s.push_str(&format!(" tol-scale={}", self.tol_scale));
        }
        s
    }
}

/// `minus`, `zero`, `plus`, `all`, or a comma-separated list.
pub fn parse_branches(s: &str) -> Result<Vec<Branch>> {
    if s == "all" {
        return Ok(Branch::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let b: Branch = part
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("unknown branch '{part}'")))?;
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out.sort_by_key(|b| b.index());
    Ok(out)
}

/// Flat `key=value` lines; blank lines and `#` comments are ignored.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("config line {}: expected key=value", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}
