//! Parameter sweeps and their CSV output.
//!
//! A run produces one closed-form row per `(g, branch)` and, when oracles
//! are enabled, one row per oracle method. Rows are computed in parallel and
//! emitted in grid order; phase columns are unwrapped along `g` so curves
//! stay continuous, and oracle phases are shifted by multiples of 2π to the
//! representative nearest the closed-form value of the same row.

mod run;
mod spec;
mod verify;

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::error::Error;
use crate::model::Branch;
use crate::phases::Method;

pub use run::{analytic_record, run_point, run_sweep_g, run_transition_sweep};
pub use spec::{parse_branches, parse_config, GRange, Mode, Oracles, SweepSpec, Units};
pub use verify::{run_verify, CheckOutcome, CheckReport, VerifyReport};

/// First line of every CSV file.
pub const CSV_MAGIC: &str = "# coupled-berry v1";

pub const CSV_HEADER: &str =
    "g,theta,branch,gamma_ab,gamma_mixed_sum,gamma_schmidt,gamma_a,gamma_b,p1,r,F,X,method,status";

/// One output row. Phases are radians; absent values are empty in CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub g: f64,
    pub theta: Option<f64>,
    pub branch: Branch,
    pub gamma_ab: Option<f64>,
    /// `Γ_{ξ,1}`.
    pub gamma_schmidt: Option<f64>,
    pub gamma_a: Option<f64>,
    pub gamma_b: Option<f64>,
    pub p1: Option<f64>,
    pub r: Option<f64>,
    pub f: Option<f64>,
    pub x: Option<f64>,
    pub method: Method,
    /// First failure met while filling the row.
    pub error: Option<Error>,
}

impl CsvRecord {
    pub fn empty(g: f64, theta: Option<f64>, branch: Branch, method: Method) -> Self {
        Self {
            g,
            theta,
            branch,
            gamma_ab: None,
            gamma_schmidt: None,
            gamma_a: None,
            gamma_b: None,
            p1: None,
            r: None,
            f: None,
            x: None,
            method,
            error: None,
        }
    }

    /// `γ_a + γ_b`.
    pub fn gamma_mixed_sum(&self) -> Option<f64> {
        Some(self.gamma_a? + self.gamma_b?)
    }

    pub fn status(&self) -> &'static str {
        self.error.as_ref().map_or("ok", Error::code)
    }

    /// Records the first failure and yields the value on success.
    pub(crate) fn take<T>(&mut self, r: crate::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.error.get_or_insert(e);
                None
            }
        }
    }

    fn phases_mut(&mut self) -> [&mut Option<f64>; 4] {
        [&mut self.gamma_ab, &mut self.gamma_schmidt, &mut self.gamma_a, &mut self.gamma_b]
    }
}

/// Twelve significant digits, with negative zero printed as zero.
pub fn format_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn nearest(x: f64, target: f64) -> f64 {
    x + TAU * ((target - x) / TAU).round()
}

/// Unwraps every phase column along `g` within each branch, then moves
/// each oracle phase to the representative nearest the closed-form phase
/// of the same `(g, branch)`. Rows must be in grid order.
pub(crate) fn unwrap_rows(rows: &mut [CsvRecord], reference: Method) {
    for branch in Branch::ALL {
        let mut last: [Option<f64>; 4] = [None; 4];
        for row in rows.iter_mut().filter(|r| r.branch == branch && r.method == reference) {
            for (slot, prev) in row.phases_mut().into_iter().zip(last.iter_mut()) {
                if let Some(v) = slot {
                    if let Some(p) = prev {
                        *v = nearest(*v, *p);
                    }
                    *prev = Some(*v);
                }
            }
        }
    }
    let refs: Vec<(f64, Branch, [Option<f64>; 4])> = rows
        .iter()
        .filter(|r| r.method == reference)
        .map(|r| (r.g, r.branch, [r.gamma_ab, r.gamma_schmidt, r.gamma_a, r.gamma_b]))
        .collect();
    for branch in Branch::ALL {
        let mut methods: Vec<Method> = Vec::new();
        for r in rows.iter() {
            if r.method != reference && !methods.contains(&r.method) {
                methods.push(r.method);
            }
        }
        for m in methods {
            let mut last: [Option<f64>; 4] = [None; 4];
            for row in rows.iter_mut().filter(|r| r.branch == branch && r.method == m) {
                let anchor = refs
                    .iter()
                    .find(|(g, b, _)| *g == row.g && *b == branch)
                    .map(|x| x.2)
                    .unwrap_or([None; 4]);
                for (i, slot) in row.phases_mut().into_iter().enumerate() {
                    if let Some(v) = slot {
                        if let Some(t) = anchor[i].or(last[i]) {
                            *v = nearest(*v, t);
                        }
                        last[i] = Some(*v);
                    }
                }
            }
        }
    }
}

/// Full CSV text: magic line, spec echo, header and one line per record.
pub fn render_csv(spec: &SweepSpec, rows: &[CsvRecord]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CSV_MAGIC}");
    let _ = writeln!(out, "# {}", spec.echo());
    let _ = writeln!(out, "{CSV_HEADER}");
    let u = spec.units;
    let real = |x: Option<f64>| x.map(format_real).unwrap_or_default();
    let phase = |x: Option<f64>| x.map(|v| format_real(u.scale(v))).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            format_real(r.g),
            real(r.theta),
            r.branch,
            phase(r.gamma_ab),
            phase(r.gamma_mixed_sum()),
            phase(r.gamma_schmidt),
            phase(r.gamma_a),
            phase(r.gamma_b),
            real(r.p1),
            real(r.r),
            real(r.f),
            real(r.x),
            r.method.as_str(),
            r.status(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(-1.0), "-1.00000000000e0");
        assert_eq!(format_real(-0.0), "0.00000000000e0");
        assert_eq!(format_real(0.123456789012345), "1.23456789012e-1");
    }

    #[test]
    fn unwrapping_follows_the_previous_row() {
        let mk = |g: f64, v: f64, m: Method| {
            let mut r = CsvRecord::empty(g, Some(1.0), Branch::Plus, m);
            r.gamma_ab = Some(v);
            r
        };
        let mut rows = vec![
            mk(0.0, 3.0, Method::Analytic),
            mk(0.0, 3.0 - TAU, Method::Wilson),
            mk(1.0, -3.1, Method::Analytic),
            mk(1.0, 3.2, Method::Wilson),
        ];
        unwrap_rows(&mut rows, Method::Analytic);
        assert!((rows[2].gamma_ab.unwrap() - (TAU - 3.1)).abs() < 1e-12);
        assert!((rows[1].gamma_ab.unwrap() - 3.0).abs() < 1e-12);
        assert!((rows[3].gamma_ab.unwrap() - 3.2).abs() < 1e-12);
    }
}
