use num_complex::Complex64;

use super::{cubic, dense_triplet_eigen, Branch, ModelParams, TripletState};
use crate::error::Result;

/// Below this normalization the closed-form components are 0/0 and the
/// eigenvector is taken from a dense solve instead.
pub const MSQ_FALLBACK_TOL: f64 = 1e-12;

/// Closed-form data of one eigenbranch at `(θ, g)`.
///
/// The eigenstate is `e^{iφ} a |1;−1⟩ + b |1;0⟩ + e^{−iφ} c |1;+1⟩` with
/// real `a, b, c`; `msq` is the normalization of the unnormalized components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSolution {
    pub branch: Branch,
    pub x: f64,
    pub energy: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub msq: f64,
    /// True when `msq` fell below [`MSQ_FALLBACK_TOL`] and the components
    /// came from the dense solver.
    pub fallback: bool,
}

impl EigenSolution {
    /// `X⁴ + (1 − 3cos²θ)X² + cos²θ`, the textbook form of `msq`.
    pub fn msq_polynomial(x: f64, theta: f64) -> f64 {
        let c2 = theta.cos().powi(2);
        x.powi(4) + (1.0 - 3.0 * c2) * x * x + c2
    }

    /// `⟨σ_z⟩` of either qubit, `c² − a²`.
    pub fn qubit_sz(&self) -> f64 {
        self.c * self.c - self.a * self.a
    }
}

/// Instantaneous eigenstate of `H_c` on the requested branch, in the gauge
/// `(e^{iφ}A, B, e^{−iφ}C)` with real `A, B, C`.
///
/// When the closed form is singular (`θ ∈ {0, π}` on the `X = ±1` branches,
/// `θ = π/2` on the `X = 0` branch) the eigenvector is taken from a dense
/// solve and re-gauged: `B ≥ 0` when nonzero, else `A > 0`, else `C > 0`.
pub fn instantaneous_eigenstate(
    params: &ModelParams,
    branch: Branch,
) -> Result<(EigenSolution, TripletState)> {
    let ModelParams { g, theta, phi } = *params;
    let x = cubic::solve_shifted_eigenvalues(theta, g)?.get(branch);
    let (s, c) = theta.sin_cos();
    let dm = x - c;
    let dp = x + c;
    let b_num = dm * dp;
    // Sum of squares of the unnormalized components; free of cancellation.
    let msq = s * s * (x * x + c * c) + b_num * b_num;

    let (a, b, cc, fallback) = if msq >= MSQ_FALLBACK_TOL {
        let n2 = (2.0 * msq).sqrt();
        (dm * s / n2, b_num / msq.sqrt(), dp * s / n2, false)
    } else {
        let (a, b, cc) = dense_components(params, branch);
        (a, b, cc, true)
    };

    let sol = EigenSolution {
        branch,
        x,
        energy: x + g,
        a,
        b,
        c: cc,
        msq,
        fallback,
    };
    let e = Complex64::from_polar(1.0, phi);
    let state = TripletState::new([e * a, Complex64::new(b, 0.0), e.conj() * cc]);
    Ok((sol, state))
}

fn dense_components(params: &ModelParams, branch: Branch) -> (f64, f64, f64) {
    let (_, vecs) = dense_triplet_eigen(params);
    let v = vecs[branch.index()].amps;
    let e = Complex64::from_polar(1.0, params.phi);
    let w = [v[0] * e.conj(), v[1], v[2] * e];
    // remove the common phase using the largest component
    let k = (0..3)
        .max_by(|&i, &j| w[i].norm_sqr().total_cmp(&w[j].norm_sqr()))
        .unwrap_or(0);
    let rot = w[k].conj() / w[k].norm();
    let mut r = w.map(|z| (z * rot).re);
    let tol = 1e-12;
    let pick = if r[1].abs() > tol {
        1
    } else if r[0].abs() > tol {
        0
    } else {
        2
    };
    if r[pick] < 0.0 {
        r = r.map(|z| -z);
    }
    let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    (r[0] / n, r[1] / n, r[2] / n)
}
