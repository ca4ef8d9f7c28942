use super::{instantaneous_eigenstate, Branch, ModelParams, TripletState, C64, ZERO};
use crate::error::{Error, Result};

/// `p1 − p2` below this leaves the Schmidt vectors undetermined.
pub const SCHMIDT_DEGENERACY_TOL: f64 = 1e-9;

/// Schmidt form `Σ_k √p_k |a_k⟩ ⊗ |b_k⟩` of a two-qubit pure state.
///
/// Qubit vectors are in the `(|↑⟩, |↓⟩)` basis. `vecs_b[k]` is the co-vector
/// of `vecs_a[k]`, so the pair phases are tied: the state is reproduced
/// exactly by the sum above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtData {
    pub p1: f64,
    pub p2: f64,
    pub r: f64,
    pub vecs_a: [[C64; 2]; 2],
    pub vecs_b: [[C64; 2]; 2],
}

impl SchmidtData {
    pub fn weights(&self) -> [f64; 2] {
        [self.p1, self.p2]
    }

    /// Swaps the labels of the two Schmidt terms.
    pub fn swapped(&self) -> Self {
        Self {
            p1: self.p2,
            p2: self.p1,
            r: self.r,
            vecs_a: [self.vecs_a[1], self.vecs_a[0]],
            vecs_b: [self.vecs_b[1], self.vecs_b[0]],
        }
    }

    /// Multiplies `a_k` by `z` and `b_k` by `z̄`, leaving the state unchanged.
    pub fn rephase(&mut self, k: usize, z: C64) {
        self.vecs_a[k] = self.vecs_a[k].map(|v| v * z);
        self.vecs_b[k] = self.vecs_b[k].map(|v| v * z.conj());
    }
}

pub(crate) fn qubit_inner(u: &[C64; 2], v: &[C64; 2]) -> C64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

fn reduced_a(psi: &[[C64; 2]; 2]) -> (f64, C64, f64) {
    // ρ_a = ψ ψ†
    let alpha = psi[0][0].norm_sqr() + psi[0][1].norm_sqr();
    let delta = psi[1][0].norm_sqr() + psi[1][1].norm_sqr();
    let beta = psi[0][0] * psi[1][0].conj() + psi[0][1] * psi[1][1].conj();
    (alpha, beta, delta)
}

/// Eigenvalues `(p1, p2)`, `p1 ≥ p2`, of the reduced operator of either
/// qubit. Never fails; degenerate spectra are returned as they are.
pub fn schmidt_coefficients(state: &TripletState) -> (f64, f64) {
    let (alpha, beta, delta) = reduced_a(&state.two_qubit_matrix());
    let tr = alpha + delta;
    let gap = ((alpha - delta).powi(2) + 4.0 * beta.norm_sqr()).sqrt();
    ((tr + gap) / 2.0, (tr - gap) / 2.0)
}

fn unit_eigvec(alpha: f64, beta: C64, delta: f64, lambda: f64) -> [C64; 2] {
    let u = [beta, C64::new(lambda - alpha, 0.0)];
    let v = [C64::new(lambda - delta, 0.0), beta.conj()];
    let nu = u[0].norm_sqr() + u[1].norm_sqr();
    let nv = v[0].norm_sqr() + v[1].norm_sqr();
    let (w, n) = if nu >= nv { (u, nu) } else { (v, nv) };
    if n == 0.0 {
        // already diagonal: alpha = λ for the upper vector
        return if (lambda - alpha).abs() <= (lambda - delta).abs() {
            [C64::new(1.0, 0.0), ZERO]
        } else {
            [ZERO, C64::new(1.0, 0.0)]
        };
    }
    let n = n.sqrt();
    [w[0] / n, w[1] / n]
}

/// Schmidt decomposition of a triplet-sector state.
///
/// The subsystem-`a` vectors diagonalize `Tr_b |ψ⟩⟨ψ|`; `b_k` is
/// `(⟨a_k| ⊗ 1)|ψ⟩ / √p_k`. For a vanishing `p2` the second `b` vector is the
/// orthogonal complement of the first.
pub fn schmidt_decompose(state: &TripletState) -> Result<SchmidtData> {
    let psi = state.two_qubit_matrix();
    let (alpha, beta, delta) = reduced_a(&psi);
    let tr = alpha + delta;
    let r = ((alpha - delta).powi(2) + 4.0 * beta.norm_sqr()).sqrt();
    if r < SCHMIDT_DEGENERACY_TOL {
        return Err(Error::DegenerateSchmidt(r));
    }
    let p1 = (tr + r) / 2.0;
    let p2 = (tr - r) / 2.0;
    let a1 = unit_eigvec(alpha, beta, delta, p1);
    // orthogonal complement within the qubit
    let a2 = [-a1[1].conj(), a1[0].conj()];

    let cov = |a: &[C64; 2], p: f64| -> [C64; 2] {
        let s = p.max(0.0).sqrt();
        [
            (a[0].conj() * psi[0][0] + a[1].conj() * psi[1][0]) / s,
            (a[0].conj() * psi[0][1] + a[1].conj() * psi[1][1]) / s,
        ]
    };
    let b1 = cov(&a1, p1);
    let b2 = if p2 > 1e-20 {
        cov(&a2, p2)
    } else {
        [-b1[1].conj(), b1[0].conj()]
    };
    Ok(SchmidtData {
        p1,
        p2: p2.max(0.0),
        r,
        vecs_a: [a1, a2],
        vecs_b: [b1, b2],
    })
}

/// `(A + C)·√(2B² + (C − A)²)` with the sign of the shifted eigenvalue, so
/// that `⟨σ_z⟩` of either qubit equals `r_signed · F · cos θ`. Its magnitude
/// is the Bloch length.
pub fn signed_bloch_length(theta: f64, g: f64, branch: Branch) -> Result<f64> {
    let params = ModelParams::new(g, theta, 0.0)?;
    let (sol, _) = instantaneous_eigenstate(&params, branch)?;
    let (a, b, c) = (sol.a, sol.b, sol.c);
    let mag = ((a + c) * (2.0 * b * b + (c - a).powi(2)).sqrt()).abs();
    Ok(if sol.x < 0.0 { -mag } else { mag })
}

/// Length `r = p1 − p2 ∈ [0, 1]` of either qubit's Bloch vector, from the
/// closed-form eigenvector components. Independent of `φ`.
pub fn bloch_length(theta: f64, g: f64, branch: Branch) -> Result<f64> {
    signed_bloch_length(theta, g, branch).map(f64::abs)
}
