use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI, TAU};
use std::fmt::Write as _;

use rayon::prelude::*;

use super::{format_real, render_csv, run_sweep_g, GRange, Mode, SweepSpec, CSV_MAGIC};
use crate::error::{Error, Result};
use crate::model::{
    apply_triplet_block, cubic_residual, instantaneous_eigenstate, schmidt_decompose,
    solve_shifted_eigenvalues, triplet_block, Branch, ModelParams,
};
use crate::oracles::{
    adiabatic_propagate, composite_from_schmidt, mixed_state_phase_numeric, propagate_singlet,
    schmidt_track, wilson_loop_phase,
};
use crate::phases::{
    circular_distance, composite_phase_constant_theta, degenerate_zero_g_subsystem_phase,
    scale_factor, schmidt_vector_phase, subsystem_phase_constant_theta, transition_path_phase,
    wrap_phase, LoopPath,
};

/// Result of one check.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckOutcome {
    Pass,
    Fail,
    /// Nothing could be evaluated; the reason is attached.
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub criterion: u8,
    pub name: &'static str,
    /// Largest deviation found, or smallest margin for lower-bound checks.
    pub value: f64,
    pub bound: f64,
    /// True when the check requires `value > bound`.
    pub lower_bound: bool,
    pub evaluated: usize,
    /// Grid points left out, each with its reason.
    pub skipped: Vec<String>,
    pub outcome: CheckOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub spec: SweepSpec,
    pub checks: Vec<CheckReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != CheckOutcome::Fail)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match &c.outcome {
                CheckOutcome::Pass => "PASS",
                CheckOutcome::Fail => "FAIL",
                CheckOutcome::Skipped(_) => "SKIP",
            };
            let rel = if c.lower_bound { ">" } else { "<=" };
            let _ = writeln!(
                out,
                "{status} [{}] {}: {} {rel} {} over {} point(s)",
                c.criterion,
                c.name,
                fmt_sci(c.value),
                fmt_sci(c.bound),
                c.evaluated
            );
            if let CheckOutcome::Skipped(why) = &c.outcome {
                let _ = writeln!(out, "    skipped: {why}");
            }
            for s in &c.skipped {
                let _ = writeln!(out, "    skipped {s}");
            }
        }
        let failed = self.checks.iter().filter(|c| c.outcome == CheckOutcome::Fail).count();
        let _ = writeln!(out, "{} check(s), {failed} failed", self.checks.len());
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CSV_MAGIC}");
        let _ = writeln!(out, "# {}", self.spec.echo());
        let _ = writeln!(out, "criterion,check,value,bound,kind,evaluated,skipped,status");
        for c in &self.checks {
            let status = match c.outcome {
                CheckOutcome::Pass => "pass",
                CheckOutcome::Fail => "fail",
                CheckOutcome::Skipped(_) => "skipped",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                c.criterion,
                c.name,
                format_real(c.value),
                format_real(c.bound),
                if c.lower_bound { "min" } else { "max" },
                c.evaluated,
                c.skipped.len(),
                status
            );
        }
        out
    }
}

fn fmt_sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Accumulates deviations of one check.
struct Acc {
    criterion: u8,
    name: &'static str,
    bound: f64,
    lower_bound: bool,
    value: Option<f64>,
    evaluated: usize,
    skipped: Vec<String>,
}

impl Acc {
    fn max(criterion: u8, name: &'static str, bound: f64) -> Self {
        Self { criterion, name, bound, lower_bound: false, value: None, evaluated: 0, skipped: vec![] }
    }

    fn min(criterion: u8, name: &'static str, bound: f64) -> Self {
        Self { lower_bound: true, ..Self::max(criterion, name, bound) }
    }

    fn add(&mut self, v: f64) {
        self.evaluated += 1;
        let v = if v.is_nan() { f64::INFINITY } else { v };
        self.value = Some(match self.value {
            None => v,
            Some(w) if self.lower_bound => w.min(v),
            Some(w) => w.max(v),
        });
    }

    fn add_result(&mut self, label: impl FnOnce() -> String, r: Result<f64>) {
        match r {
            Ok(v) => self.add(v),
            Err(e) => self.skipped.push(format!("{}: {}", label(), e.code())),
        }
    }

    fn finish(self) -> CheckReport {
        let outcome = match self.value {
            None => CheckOutcome::Skipped(if self.skipped.is_empty() {
                "nothing to evaluate".into()
            } else {
                "every point is singular".into()
            }),
            Some(v) if (self.lower_bound && v > self.bound) || (!self.lower_bound && v <= self.bound) => {
                CheckOutcome::Pass
            }
            Some(_) => CheckOutcome::Fail,
        };
        CheckReport {
            criterion: self.criterion,
            name: self.name,
            value: self.value.unwrap_or(f64::NAN),
            bound: self.bound,
            lower_bound: self.lower_bound,
            evaluated: self.evaluated,
            skipped: self.skipped,
            outcome,
        }
    }
}

const ZERO_COUPLING_THETAS: [f64; 3] = [FRAC_PI_6, FRAC_PI_3, 9.0 * PI / 20.0];
const TRIANGLE_GS: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0];

/// Loop period used for the ODE leg of the oracle triangle, as a multiple
/// of the run period. The leading non-adiabatic correction to the extracted
/// phase falls off as `1/T` and reaches 2e−2 near `θ = 9π/20` at `T = 2000`.
pub const TRIANGLE_PERIOD_FACTOR: usize = 4;

fn label(theta: f64, g: f64, b: Branch) -> String {
    format!("theta={theta:.6} g={g} {b}")
}

/// Runs every acceptance check, honouring the oracle selection, the extra
/// polar angle and the tolerance scale of `spec`.
pub fn run_verify(spec: &SweepSpec) -> Result<VerifyReport> {
    if spec.mode != Mode::Verify {
        return Err(Error::Usage("spec is not a verify spec".into()));
    }
    spec.validate()?;
    let k = spec.tol_scale;
    let n = spec.points;
    let mut checks = Vec::new();

    // zero coupling
    let mut exact = Acc::max(1, "zero-coupling-closed-form", 1e-12 * k);
    let mut wil = Acc::max(1, "zero-coupling-wilson", 1e-4 * k);
    let mut ode = Acc::max(1, "zero-coupling-ode", 1e-2 * k);
    let mut drift = Acc::max(1, "zero-coupling-ode-drift", 1e-3 * k);
    for th in ZERO_COUPLING_THETAS {
        let want = -TAU * (1.0 - th.cos());
        let path = LoopPath::constant_polar(th);
        exact.add_result(
            || label(th, 0.0, Branch::Plus),
            composite_phase_constant_theta(th, 0.0, Branch::Plus).map(|p| (p.unwrapped() - want).abs()),
        );
        if spec.oracles.wilson {
            wil.add_result(
                || label(th, 0.0, Branch::Plus),
                wilson_loop_phase(&path, 0.0, Branch::Plus, n).map(|w| circular_distance(w, want)),
            );
        }
    }
    if spec.oracles.ode {
        let runs: Vec<_> = ZERO_COUPLING_THETAS
            .par_iter()
            .map(|&th| {
                adiabatic_propagate(&LoopPath::constant_polar(th), 0.0, Branch::Plus, spec.period, spec.steps)
            })
            .collect();
        for (th, r) in ZERO_COUPLING_THETAS.iter().zip(runs) {
            let want = -TAU * (1.0 - th.cos());
            let lbl = || label(*th, 0.0, Branch::Plus);
            ode.add_result(lbl, r.clone().map(|r| circular_distance(r.geometric_phase, want)));
            drift.add_result(lbl, r.map(|r| r.populations_drift));
        }
    }
    checks.push(exact.finish());
    checks.push(oracle_gate(wil, spec.oracles.wilson, "wilson"));
    checks.push(oracle_gate(ode, spec.oracles.ode, "ode"));
    checks.push(oracle_gate(drift, spec.oracles.ode, "ode"));

    // cubic roots and eigenvectors
    let mut cubic = Acc::max(2, "cubic-residual", 1e-10 * k);
    let mut eig = Acc::max(2, "eigen-residual", 1e-10 * k);
    let mut dense = Acc::max(2, "dense-spectrum", 1e-9 * k);
    for i in 1..20 {
        let th = 0.05 * PI * i as f64;
        for j in 0..=40 {
            let g = 0.25 * j as f64;
            let lbl = || format!("theta={th:.6} g={g}");
            let roots = match solve_shifted_eigenvalues(th, g) {
                Ok(r) => r,
                Err(e) => {
                    cubic.skipped.push(format!("{}: {}", lbl(), e.code()));
                    continue;
                }
            };
            let p = ModelParams::new(g, th, 0.0)?;
            let mut ev: Vec<f64> = triplet_block(&p).symmetric_eigen().eigenvalues.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            for (idx, b) in Branch::ALL.into_iter().enumerate() {
                let x = roots.get(b);
                cubic.add(cubic_residual(x, th, g).abs());
                dense.add((x + g - ev[idx]).abs());
                eig.add_result(
                    || label(th, g, b),
                    instantaneous_eigenstate(&p, b).map(|(sol, st)| {
                        let hv = apply_triplet_block(&p, &st.amps);
                        (0..3).map(|i| (hv[i] - st.amps[i] * sol.energy).norm_sqr()).sum::<f64>().sqrt()
                    }),
                );
            }
        }
    }
    checks.extend([cubic.finish(), eig.finish(), dense.finish()]);

    // oracle triangle
    let mut thetas = ZERO_COUPLING_THETAS.to_vec();
    if let Some(t) = spec.theta {
        if !thetas.contains(&t) {
            thetas.push(t);
        }
    }
    let tri: Vec<(f64, f64, Branch)> = thetas
        .iter()
        .flat_map(|&th| TRIANGLE_GS.iter().flat_map(move |&g| Branch::ALL.map(|b| (th, g, b))))
        .collect();
    let mut aw = Acc::max(3, "triangle-closed-form-wilson", 1e-4 * k);
    let mut wo = Acc::max(3, "triangle-wilson-ode", 1e-2 * k);
    let period = spec.period * TRIANGLE_PERIOD_FACTOR as f64;
    let steps = spec.steps * TRIANGLE_PERIOD_FACTOR;
    let results: Vec<(Result<f64>, Option<Result<f64>>, Option<Result<f64>>)> = tri
        .par_iter()
        .map(|&(th, g, b)| {
            let path = LoopPath::constant_polar(th);
            let a = composite_phase_constant_theta(th, g, b).map(|p| p.unwrapped());
            let w = spec.oracles.wilson.then(|| wilson_loop_phase(&path, g, b, n));
            let o = spec
                .oracles
                .ode
                .then(|| adiabatic_propagate(&path, g, b, period, steps).map(|r| r.geometric_phase));
            (a, w, o)
        })
        .collect();
    for (&(th, g, b), (a, w, o)) in tri.iter().zip(results) {
        let lbl = || label(th, g, b);
        if let Some(w) = &w {
            aw.add_result(lbl, pair(&a, w).map(|(x, y)| circular_distance(x, y)));
        }
        if let (Some(w), Some(o)) = (&w, &o) {
            wo.add_result(lbl, pair(w, o).map(|(x, y)| circular_distance(x, y)));
        }
    }
    checks.push(oracle_gate(aw, spec.oracles.wilson, "wilson"));
    checks.push(oracle_gate(wo, spec.oracles.wilson && spec.oracles.ode, "wilson and ode"));

    // strong coupling
    let g_strong = 100.0;
    let mut qc = Acc::max(4, "quenching-composite", 0.05 * k);
    let mut qm = Acc::max(4, "quenching-mixed-sum", 0.05 * k);
    let mut qs = Acc::max(4, "quenching-schmidt", 0.05 * k);
    for th in [FRAC_PI_6, FRAC_PI_3] {
        for b in Branch::ALL {
            let lbl = || label(th, g_strong, b);
            qc.add_result(lbl, composite_phase_constant_theta(th, g_strong, b).map(|p| p.wrapped().abs()));
            qm.add_result(lbl, subsystem_phase_constant_theta(th, g_strong, b).map(|s| wrap_phase(2.0 * s).abs()));
        }
        for m in [-1, 1] {
            if let Some(b) = Branch::approaching_triplet(m, th) {
                qs.add_result(|| label(th, g_strong, b), schmidt_vector_phase(th, g_strong, b).map(|(g1, _)| wrap_phase(g1).abs()));
            }
        }
    }
    let mut anomaly = Acc::max(4, "entangled-branch-schmidt-phase", 0.05 * k);
    if let Some(b) = Branch::approaching_triplet(0, FRAC_PI_4) {
        anomaly.add_result(
            || label(FRAC_PI_4, g_strong, b),
            schmidt_vector_phase(FRAC_PI_4, g_strong, b).map(|(_, g2)| circular_distance(g2, PI)),
        );
    }
    checks.extend([qc.finish(), qm.finish(), qs.finish(), anomaly.finish()]);

    // pole-to-pole loop
    let sine = LoopPath::sine_polar();
    let mut tq = Acc::max(5, "transition-quenching", 0.05 * PI * k);
    for b in Branch::ALL {
        tq.add_result(|| format!("sine-polar g=50 {b}"), transition_path_phase(&sine, 50.0, b, spec.panels).map(|q| wrap_phase(q.value).abs()));
    }
    checks.push(tq.finish());
    let mut tw = Acc::max(5, "transition-line-integral-wilson", 1e-3 * k);
    if spec.oracles.wilson {
        let pts: Vec<(f64, Branch)> = [0.0, 1.0, 2.0, 5.0]
            .into_iter()
            .flat_map(|g| Branch::ALL.map(|b| (g, b)))
            .collect();
        let devs: Vec<Result<f64>> = pts
            .par_iter()
            .map(|&(g, b)| {
                let q = transition_path_phase(&sine, g, b, spec.panels)?;
                let w = wilson_loop_phase(&sine, g, b, n)?;
                Ok(circular_distance(q.value, w))
            })
            .collect();
        for ((g, b), d) in pts.into_iter().zip(devs) {
            tw.add_result(|| format!("sine-polar g={g} {b}"), d);
        }
    }
    checks.push(oracle_gate(tw, spec.oracles.wilson, "wilson"));

    // Schmidt decomposition of the composite phase
    let mut dc = Acc::max(6, "schmidt-sum-constant-theta", 1e-3 * k);
    let mut dt = Acc::max(6, "schmidt-sum-pole-to-pole", 1e-3 * k);
    if spec.oracles.wilson {
        let n_track = 2 * n;
        let circle = LoopPath::constant_polar(FRAC_PI_4);
        for b in Branch::ALL {
            dc.add_result(|| label(FRAC_PI_4, 1.0, b), schmidt_vs_wilson(&circle, 1.0, b, n_track));
            dt.add_result(|| format!("sine-polar g=2 {b}"), schmidt_vs_wilson(&sine, 2.0, b, n_track));
        }
    }
    checks.push(oracle_gate(dc, spec.oracles.wilson, "wilson"));
    checks.push(oracle_gate(dt, spec.oracles.wilson, "wilson"));

    // symmetry and structure
    let mut perm = Acc::max(7, "permutation-symmetry-numeric", 1e-6 * k);
    if spec.oracles.wilson {
        let pts: Vec<(f64, f64, Branch)> = ZERO_COUPLING_THETAS
            .iter()
            .flat_map(|&th| [0.0, 1.0, 5.0].into_iter().flat_map(move |g| Branch::ALL.map(|b| (th, g, b))))
            .collect();
        let devs: Vec<Result<f64>> = pts
            .par_iter()
            .map(|&(th, g, b)| {
                let t = schmidt_track(&LoopPath::constant_polar(th), g, b, n)?;
                let (a, bb) = mixed_state_phase_numeric(&t)?;
                Ok(circular_distance(a, bb))
            })
            .collect();
        for ((th, g, b), d) in pts.into_iter().zip(devs) {
            perm.add_result(|| label(th, g, b), d);
        }
    }
    checks.push(oracle_gate(perm, spec.oracles.wilson, "wilson"));
    let mut add0 = Acc::max(7, "additivity-at-zero-coupling", 1e-9 * k);
    for th in ZERO_COUPLING_THETAS {
        for b in [Branch::Minus, Branch::Plus] {
            add0.add_result(|| label(th, 0.0, b), additivity_gap(th, 0.0, b));
        }
    }
    checks.push(add0.finish());
    let mut nonadd = Acc::min(7, "non-additivity-at-finite-coupling", 0.01);
    nonadd.add_result(|| label(FRAC_PI_3, 1.0, Branch::Plus), additivity_gap(FRAC_PI_3, 1.0, Branch::Plus));
    checks.push(nonadd.finish());
    let mut singlet = Acc::max(7, "singlet-geometric-phase", 1e-9 * k);
    if spec.oracles.ode {
        for (lbl, path) in [("constant theta=pi/3", LoopPath::constant_polar(FRAC_PI_3)), ("sine-polar", sine.clone())] {
            singlet.add_result(|| lbl.to_string(), propagate_singlet(&path, 1.0, 200.0, 200_000).map(|r| r.geometric_phase.abs()));
        }
    }
    checks.push(oracle_gate(singlet, spec.oracles.ode, "ode"));

    // degenerate inputs must come back as errors
    let mut contracts = Acc::max(8, "degenerate-contracts", 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cases: [(&str, bool); 5] = [
        (
            "zero branch at g=0: Schmidt form",
            matches!(
                instantaneous_eigenstate(&ModelParams::new(0.0, FRAC_PI_3, 0.0)?, Branch::Zero)
                    .and_then(|(_, st)| schmidt_decompose(&st)),
                Err(Error::DegenerateSchmidt(_))
            ),
        ),
        (
            "zero branch at g=0: subsystem phase",
            matches!(subsystem_phase_constant_theta(FRAC_PI_3, 0.0, Branch::Zero), Err(Error::DegenerateSchmidt(_))),
        ),
        (
            "zero branch at g=0: Schmidt-vector phase",
            matches!(schmidt_vector_phase(FRAC_PI_3, 0.0, Branch::Zero), Err(Error::DegenerateSchmidt(_))),
        ),
        (
            "Re(alpha* beta) = 0",
            degenerate_zero_g_subsystem_phase(num_complex::Complex64::new(h, 0.0), num_complex::Complex64::new(0.0, h), 1.0)
                == Err(Error::UndefinedPhase),
        ),
        (
            "equatorial zero branch scale factor",
            matches!(scale_factor(PI / 2.0, 1.0, Branch::Zero), Err(Error::SingularScaleFactor(_))),
        ),
    ];
    for (name, ok) in cases {
        contracts.add(if ok { 0.0 } else { 1.0 });
        if !ok {
            contracts.skipped.push(format!("{name}: returned a value"));
        }
    }
    checks.push(contracts.finish());

    // determinism of a sweep
    let mut det = Acc::max(9, "sweep-determinism", 0.0);
    let mut s = SweepSpec::new(Mode::SweepG);
    s.g = GRange { min: 0.0, max: 10.0, steps: 101 };
    let first = render_csv(&s, &run_sweep_g(&s)?);
    let second = render_csv(&s, &run_sweep_g(&s)?);
    det.add(if first == second { 0.0 } else { 1.0 });
    checks.push(det.finish());

    Ok(VerifyReport { spec: spec.clone(), checks })
}

fn pair(a: &Result<f64>, b: &Result<f64>) -> Result<(f64, f64)> {
    Ok((a.clone()?, b.clone()?))
}

fn oracle_gate(acc: Acc, enabled: bool, which: &str) -> CheckReport {
    if enabled {
        acc.finish()
    } else {
        let mut r = acc.finish();
        r.outcome = CheckOutcome::Skipped(format!("{which} oracle disabled"));
        r
    }
}

fn schmidt_vs_wilson(path: &LoopPath, g: f64, b: Branch, n: usize) -> Result<f64> {
    let t = schmidt_track(path, g, b, n)?;
    let w = wilson_loop_phase(path, g, b, n)?;
    Ok(circular_distance(composite_from_schmidt(&t), w))
}

/// `|γ_ab − (γ_a + γ_b)|` on the circle.
fn additivity_gap(theta: f64, g: f64, b: Branch) -> Result<f64> {
    let ab = composite_phase_constant_theta(theta, g, b)?.unwrapped();
    let a = subsystem_phase_constant_theta(theta, g, b)?;
    Ok(circular_distance(ab, 2.0 * a))
}
