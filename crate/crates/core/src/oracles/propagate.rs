use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Vector4;

use crate::error::{Error, Result};
use crate::model::{
    build_hamiltonian, dense_triplet_eigen, solve_shifted_eigenvalues, Branch, ModelParams,
    TripletState, C64, ZERO,
};
use crate::phases::{wrap_phase, LoopPath};

/// Allowed deviation of `‖Ψ‖²` from 1.
pub const NORM_TOL: f64 = 1e-6;

/// Population drift above which the run is not adiabatic.
pub const ADIABATIC_DRIFT_TOL: f64 = 0.01;

/// Default loop period, in units of `1/(μB₀)`.
pub const DEFAULT_PERIOD: f64 = 2000.0;

/// Default number of RK4 steps for [`DEFAULT_PERIOD`].
pub const DEFAULT_STEPS: usize = 2_000_000;

/// Upper bound on population samples taken along a run.
const DRIFT_SAMPLES: usize = 4096;

/// Outcome of integrating the Schrödinger equation around a loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationResult {
    pub final_state: TripletState,
    /// Largest `Σ_n ||c_n(t)|² − |c_n(0)|²|` over the sampled times.
    pub populations_drift: f64,
    /// `arg⟨n(Q₀)|Ψ(T)⟩`.
    pub total_phase: f64,
    /// `−∫₀ᵀ E_n dt`.
    pub dynamical_phase: f64,
    /// Total minus dynamical phase, in `(−π, π]`.
    pub geometric_phase: f64,
    pub period: f64,
    pub steps: usize,
    /// `‖Ψ(T)‖² − 1`.
    pub norm_error: f64,
}

/// Triplet block minus `shift`, stored as its three diagonal entries and
/// the upper off-diagonal (the lower one is its conjugate).
#[derive(Clone, Copy)]
struct Tridiag {
    diag: [f64; 3],
    up: C64,
}

impl Tridiag {
    fn at(g: f64, theta: f64, phi: f64, shift: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            diag: [g - c - shift, -g - shift, g + c - shift],
            up: C64::from_polar(s * FRAC_1_SQRT_2, phi),
        }
    }

    /// `−i H v`.
    fn rhs(&self, v: &[C64; 3]) -> [C64; 3] {
        let dn = self.up.conj();
        let h = [
            v[0] * self.diag[0] + self.up * v[1],
            dn * v[0] + v[1] * self.diag[1] + self.up * v[2],
            dn * v[1] + v[2] * self.diag[2],
        ];
        h.map(|z| C64::new(z.im, -z.re))
    }
}

fn axpy(v: &[C64; 3], a: f64, k: &[C64; 3]) -> [C64; 3] {
    [v[0] + k[0] * a, v[1] + k[1] * a, v[2] + k[2] * a]
}

fn simpson(ys: &[f64], h: f64) -> f64 {
    let n = ys.len() - 1;
    let odd: f64 = ys.iter().skip(1).step_by(2).sum();
    let even: f64 = ys.iter().skip(2).step_by(2).take(n / 2 - 1).sum();
    h / 3.0 * (ys[0] + ys[n] + 4.0 * odd + 2.0 * even)
}

fn check_run(period: f64, steps: usize) -> Result<()> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::Usage(format!("period must be positive, got {period}")));
    }
    if steps < 2 || !steps.is_multiple_of(2) {
        return Err(Error::Usage(format!("step count must be even and at least 2, got {steps}")));
    }
    Ok(())
}

fn populations(params: &ModelParams, psi: &[C64; 3]) -> [f64; 3] {
    let (_, vecs) = dense_triplet_eigen(params);
    let st = TripletState::new(*psi);
    vecs.map(|v| v.inner(&st).norm_sqr())
}

/// Branch energy `X + g` at `s`, or `DegenerateAlongPath` if the roots meet.
fn branch_energy(path: &LoopPath, g: f64, branch: Branch, s: f64) -> Result<f64> {
    let (th, _) = path.point(s);
    match solve_shifted_eigenvalues(th, g) {
        Ok(r) => Ok(r.get(branch) + g),
        Err(Error::DegenerateRoots(a, b)) => Err(Error::DegenerateAlongPath { gap: (b - a).abs(), s }),
        Err(e) => Err(e),
    }
}

/// Integrates `i dΨ/dt = H_c(t) Ψ` with fixed-step RK4 while the field
/// traverses `path` once in time `period`, starting from the branch
/// eigenstate, and splits the final overlap into dynamical and geometric
/// parts.
///
/// The block is shifted by the initial energy so the integrated state turns
/// slowly; the shift is added back analytically. The dynamical phase uses
/// Simpson's rule on the integrator grid. Populations are sampled at up to
/// a few thousand evenly spaced times against dense eigenvectors.
pub fn adiabatic_propagate(
    path: &LoopPath,
    g: f64,
    branch: Branch,
    period: f64,
    steps: usize,
) -> Result<PropagationResult> {
    check_run(period, steps)?;
    let (th0, ph0) = path.point(0.0);
    let p0 = ModelParams::new(g, th0, ph0)?;
    let (vals, vecs) = dense_triplet_eigen(&p0);
    let k = branch.index();
    let gap = [k.checked_sub(1), (k < 2).then_some(k + 1)]
        .into_iter()
        .flatten()
        .map(|i| (vals[i] - vals[k]).abs())
        .fold(f64::INFINITY, f64::min);
    if gap < 1e-9 {
        return Err(Error::DegenerateAlongPath { gap, s: 0.0 });
    }
    let start = vecs[k];
    let e_ref = vals[k];

    let dt = period / steps as f64;
    let ds = 1.0 / steps as f64;
    let stride = (steps / DRIFT_SAMPLES).max(1);
    let mut pop0 = [0.0; 3];
    pop0[k] = 1.0;

    let constant_energy = path.is_constant_polar();
    let mut energy_offsets = Vec::new();
    if !constant_energy {
        energy_offsets.reserve(steps + 1);
        energy_offsets.push(0.0);
    }

    let at = |s: f64| {
        let (th, ph) = path.point(s);
        Tridiag::at(g, th, ph, e_ref)
    };
    let mut psi = start.amps;
    let mut h_start = at(0.0);
    let mut drift: f64 = 0.0;
    for j in 0..steps {
        let s = j as f64 * ds;
        let h_mid = at(s + 0.5 * ds);
        let h_end = at((j + 1) as f64 * ds);
        let k1 = h_start.rhs(&psi);
        let k2 = h_mid.rhs(&axpy(&psi, 0.5 * dt, &k1));
        let k3 = h_mid.rhs(&axpy(&psi, 0.5 * dt, &k2));
        let k4 = h_end.rhs(&axpy(&psi, dt, &k3));
        for i in 0..3 {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
        h_start = h_end;

        let s_next = (j + 1) as f64 * ds;
        if !constant_energy {
            energy_offsets.push(branch_energy(path, g, branch, s_next)? - e_ref);
        }
        if (j + 1) % stride == 0 || j + 1 == steps {
            let (th, ph) = path.point(s_next);
            let pops = populations(&ModelParams::new(g, th, ph)?, &psi);
            let d: f64 = (0..3).map(|i| (pops[i] - pop0[i]).abs()).sum();
            drift = drift.max(d);
            let nerr = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0;
            if nerr.abs() > NORM_TOL {
                return Err(Error::NormDrift(nerr));
            }
        }
    }
    if drift > ADIABATIC_DRIFT_TOL {
        return Err(Error::AdiabaticityFailure(drift));
    }

    let offset_integral = if constant_energy {
        0.0
    } else {
        simpson(&energy_offsets, dt)
    };
    let final_state = TripletState::new(psi);
    let norm_error = final_state.norm_sqr() - 1.0;
    let overlap_arg = start.inner(&final_state).arg();
    Ok(PropagationResult {
        final_state: TripletState::new(psi.map(|z| z * C64::from_polar(1.0, -e_ref * period))),
        populations_drift: drift,
        total_phase: wrap_phase(overlap_arg - e_ref * period),
        dynamical_phase: -(e_ref * period + offset_integral),
        geometric_phase: wrap_phase(overlap_arg + offset_integral),
        period,
        steps,
        norm_error,
    })
}

/// Phases picked up by the singlet `|0;0⟩` when the full 4×4 Hamiltonian is
/// integrated around a loop, without any energy shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingletPropagation {
    pub total_phase: f64,
    pub dynamical_phase: f64,
    pub geometric_phase: f64,
    /// Weight that leaked into the triplet sector.
    pub triplet_leakage: f64,
    pub norm_error: f64,
}

/// Integrates the full Hamiltonian from `|0;0⟩` around `path` in time
/// `period` with fixed-step RK4.
pub fn propagate_singlet(path: &LoopPath, g: f64, period: f64, steps: usize) -> Result<SingletPropagation> {
    check_run(period, steps)?;
    let dt = period / steps as f64;
    let ds = 1.0 / steps as f64;
    let minus_i = C64::new(0.0, -1.0);
    let ham = |s: f64| -> Result<_> {
        let (th, ph) = path.point(s);
        Ok(build_hamiltonian(&ModelParams::new(g, th, ph)?) * minus_i)
    };
    let mut psi = Vector4::new(ZERO, ZERO, ZERO, C64::new(1.0, 0.0));
    let mut h_start = ham(0.0)?;
    for j in 0..steps {
        let h_mid = ham((j as f64 + 0.5) * ds)?;
        let h_end = ham((j + 1) as f64 * ds)?;
        let k1 = h_start * psi;
        let k2 = h_mid * (psi + k1 * C64::from(0.5 * dt));
        let k3 = h_mid * (psi + k2 * C64::from(0.5 * dt));
        let k4 = h_end * (psi + k3 * C64::from(dt));
        psi += (k1 + (k2 + k3) * C64::from(2.0) + k4) * C64::from(dt / 6.0);
        h_start = h_end;
    }
    let norm_error = psi.norm_squared() - 1.0;
    if norm_error.abs() > NORM_TOL {
        return Err(Error::NormDrift(norm_error));
    }
    // E = −g throughout, so the dynamical phase is g T
    let dynamical_phase = g * period;
    let total = psi[3].arg();
    Ok(SingletPropagation {
        total_phase: total,
        dynamical_phase,
        geometric_phase: wrap_phase(total - dynamical_phase),
        triplet_leakage: psi[0].norm_sqr() + psi[1].norm_sqr() + psi[2].norm_sqr(),
        norm_error,
    })
}
