use rayon::prelude::*;

use super::{unwrap_rows, CsvRecord, Mode, SweepSpec};
use crate::error::{Error, Result};
use crate::model::{signed_bloch_length, solve_shifted_eigenvalues, Branch};
use crate::oracles::{adiabatic_propagate, mixed_state_phase_numeric, schmidt_track, wilson_loop_phase};
use crate::phases::{
    composite_phase_constant_theta, scale_factor, schmidt_vector_phase,
    subsystem_phase_constant_theta, transition_path_phase, LoopPath, Method,
};

/// Closed-form quantities of one branch on the constant-`θ` loop.
pub fn analytic_record(theta: f64, g: f64, branch: Branch) -> CsvRecord {
    let mut rec = CsvRecord::empty(g, Some(theta), branch, Method::Analytic);
    rec.x = rec.take(solve_shifted_eigenvalues(theta, g)).map(|r| r.get(branch));
    if rec.x.is_none() {
        return rec;
    }
    if let Some(rs) = rec.take(signed_bloch_length(theta, g, branch)) {
        rec.r = Some(rs.abs());
        rec.p1 = Some((1.0 + rs.abs()) / 2.0);
    }
    rec.f = rec.take(scale_factor(theta, g, branch));
    rec.gamma_ab = rec
        .take(composite_phase_constant_theta(theta, g, branch))
        .map(|p| p.unwrapped());
    rec.gamma_schmidt = rec.take(schmidt_vector_phase(theta, g, branch)).map(|p| p.0);
    rec.gamma_a = rec.take(subsystem_phase_constant_theta(theta, g, branch));
    rec.gamma_b = rec.gamma_a;
    rec
}

/// Wilson loop for the composite phase plus Schmidt tracking for the
/// subsystem and Schmidt-vector phases.
fn wilson_record(path: &LoopPath, theta: Option<f64>, g: f64, branch: Branch, points: usize) -> CsvRecord {
    let mut rec = CsvRecord::empty(g, theta, branch, Method::Wilson);
    rec.gamma_ab = rec.take(wilson_loop_phase(path, g, branch, points));
    if let Some(track) = rec.take(schmidt_track(path, g, branch, points)) {
        let p = track.p_start();
        rec.p1 = Some(p[0]);
        rec.r = Some(p[0] - p[1]);
        rec.gamma_schmidt = Some(track.schmidt_a[0]);
        if let Some((a, b)) = rec.take(mixed_state_phase_numeric(&track)) {
            rec.gamma_a = Some(a);
            rec.gamma_b = Some(b);
        }
    }
    rec
}

fn ode_record(path: &LoopPath, theta: Option<f64>, g: f64, branch: Branch, spec: &SweepSpec) -> CsvRecord {
    let mut rec = CsvRecord::empty(g, theta, branch, Method::Ode);
    rec.gamma_ab = rec
        .take(adiabatic_propagate(path, g, branch, spec.period, spec.steps))
        .map(|r| r.geometric_phase);
    rec
}

fn constant_theta_rows(spec: &SweepSpec, theta: f64, g: f64, branch: Branch) -> Vec<CsvRecord> {
    let path = LoopPath::constant_polar(theta);
    let mut rows = vec![analytic_record(theta, g, branch)];
    if spec.oracles.wilson {
        rows.push(wilson_record(&path, Some(theta), g, branch, spec.points));
    }
    if spec.oracles.ode {
        rows.push(ode_record(&path, Some(theta), g, branch, spec));
    }
    rows
}

fn grid(spec: &SweepSpec) -> Vec<(f64, Branch)> {
    spec.g
        .values()
        .into_iter()
        .flat_map(|g| spec.branches.iter().map(move |&b| (g, b)))
        .collect()
}

fn require(spec: &SweepSpec, mode: Mode) -> Result<f64> {
    if spec.mode != mode {
        return Err(Error::Usage(format!("spec is for {}, not {}", spec.mode.as_str(), mode.as_str())));
    }
    spec.validate()?;
    Ok(spec.theta.unwrap_or(0.0))
}

/// All rows for one `(θ, g)` point. Any failure, in the closed form or in
/// an enabled oracle, is returned as the error.
pub fn run_point(spec: &SweepSpec) -> Result<Vec<CsvRecord>> {
    let theta = require(spec, Mode::Point)?;
    let g = spec.g.min;
    let mut rows: Vec<CsvRecord> = spec
        .branches
        .par_iter()
        .map(|&b| constant_theta_rows(spec, theta, g, b))
        .collect::<Vec<_>>()
        .concat();
    if let Some(e) = rows.iter().find_map(|r| r.error.clone()) {
        return Err(e);
    }
    unwrap_rows(&mut rows, Method::Analytic);
    Ok(rows)
}

/// Constant-`θ` loop over the coupling grid. Failing points become rows
/// with a status instead of aborting the sweep.
pub fn run_sweep_g(spec: &SweepSpec) -> Result<Vec<CsvRecord>> {
    let theta = require(spec, Mode::SweepG)?;
    let mut rows: Vec<CsvRecord> = grid(spec)
        .par_iter()
        .map(|&(g, b)| constant_theta_rows(spec, theta, g, b))
        .collect::<Vec<_>>()
        .concat();
    unwrap_rows(&mut rows, Method::Analytic);
    Ok(rows)
}

/// Composite phase on the pole-to-pole loop `θ = π sin πs`, `φ = πs` over
/// the coupling grid, by line-integral quadrature and optional oracles.
pub fn run_transition_sweep(spec: &SweepSpec) -> Result<Vec<CsvRecord>> {
    require(spec, Mode::TransitionSweep)?;
    let path = LoopPath::sine_polar();
    let mut rows: Vec<CsvRecord> = grid(spec)
        .par_iter()
        .map(|&(g, b)| {
            let mut q = CsvRecord::empty(g, None, b, Method::Quadrature);
            q.gamma_ab = q.take(transition_path_phase(&path, g, b, spec.panels)).map(|q| q.value);
            let mut rows = vec![q];
            if spec.oracles.wilson {
                let mut w = CsvRecord::empty(g, None, b, Method::Wilson);
                w.gamma_ab = w.take(wilson_loop_phase(&path, g, b, spec.points));
                rows.push(w);
            }
            if spec.oracles.ode {
                rows.push(ode_record(&path, None, g, b, spec));
            }
            rows
        })
        .collect::<Vec<_>>()
        .concat();
    unwrap_rows(&mut rows, Method::Quadrature);
    Ok(rows)
}
