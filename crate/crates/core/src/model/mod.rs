//! Two spin-½ particles with a uniaxial exchange coupling `4J S_a^z S_b^z`,
//! both driven by a field of fixed magnitude along `n̂(θ, φ)`.
//!
//! Energies are in units of `μB₀`, so the only coupling parameter is
//! `g = J / (μB₀)`. Triplet amplitudes are stored in the total-spin basis
//! ordered `(|1;−1⟩, |1;0⟩, |1;+1⟩)`; the singlet `|0;0⟩` is the fourth
//! basis vector of the full Hamiltonian and never mixes with the triplet.

mod cubic;
mod eigen;
mod schmidt;

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use cubic::{cubic_residual, solve_shifted_eigenvalues, ShiftedRoots, ROOT_GAP_TOL};
pub use eigen::{instantaneous_eigenstate, EigenSolution, MSQ_FALLBACK_TOL};
pub use schmidt::{
    bloch_length, schmidt_coefficients, schmidt_decompose, signed_bloch_length, SchmidtData,
    SCHMIDT_DEGENERACY_TOL,
};
pub(crate) use schmidt::qubit_inner;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// Coupling and field direction for one instance of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub g: f64,
    pub theta: f64,
    pub phi: f64,
}

impl ModelParams {
    /// Builds canonical parameters: `theta ∈ [0, π]`, `phi ∈ [0, 2π)`,
    /// describing the same field direction as the inputs.
    pub fn new(g: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(g.is_finite() && theta.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidParams { g, theta, phi });
        }
        let mut theta = theta.rem_euclid(TAU);
        let mut phi = phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { g, theta, phi })
    }

    /// Unit vector of the field direction.
    pub fn direction(&self) -> [f64; 3] {
        direction(self.theta, self.phi)
    }
}

pub(crate) fn direction(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// The three eigenbranches of the triplet block.
///
/// Labels follow continuation in `g` from the `g = 0` anchor, where the
/// branches have shifted eigenvalues `X = −1, 0, +1`. The triplet block is a
/// tridiagonal Hermitian matrix with nonzero off-diagonal entries whenever
/// `0 < θ < π`, so its eigenvalues never cross there and continuation is the
/// same as ordering the roots (`Minus` lowest, `Plus` highest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Minus,
    Zero,
    Plus,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Minus, Branch::Zero, Branch::Plus];

    /// Position in ascending eigenvalue order.
    pub fn index(self) -> usize {
        match self {
            Branch::Minus => 0,
            Branch::Zero => 1,
            Branch::Plus => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Branch> {
        Branch::ALL.get(i).copied()
    }

    /// Shifted eigenvalue at `g = 0`.
    pub fn anchor(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            Branch::Zero => 0.0,
            Branch::Plus => 1.0,
        }
    }

    /// The branch whose eigenstate tends to the triplet state `|1;m⟩` as
    /// `g → ∞` at polar angle `theta`.
    ///
    /// The `|1;0⟩` state is always the lowest branch in that limit, while the
    /// `|1;±1⟩` states have `X → ±cos θ` and so swap between the upper two
    /// branches when `cos θ` changes sign. Returns `None` for `m = ±1` at
    /// `cos θ = 0`, where those two limits coincide, and for `|m| > 1`.
    pub fn approaching_triplet(m: i8, theta: f64) -> Option<Branch> {
        let c = theta.cos();
        match m {
            0 => Some(Branch::Minus),
            1 | -1 if c == 0.0 => None,
            1 => Some(if c > 0.0 { Branch::Plus } else { Branch::Zero }),
            -1 => Some(if c > 0.0 { Branch::Zero } else { Branch::Plus }),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Minus => "minus",
            Branch::Zero => "zero",
            Branch::Plus => "plus",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minus" | "-" => Ok(Branch::Minus),
            "zero" | "0" => Ok(Branch::Zero),
            "plus" | "+" => Ok(Branch::Plus),
            other => Err(Error::Usage(format!("unknown branch `{other}`"))),
        }
    }
}

/// A pure state in the triplet sector, amplitudes over
/// `(|1;−1⟩, |1;0⟩, |1;+1⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletState {
    pub amps: [C64; 3],
}

impl TripletState {
    pub fn new(amps: [C64; 3]) -> Self {
        Self { amps }
    }

    pub fn basis(m: i8) -> Self {
        let mut amps = [ZERO; 3];
        amps[(m + 1) as usize] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self {
            amps: self.amps.map(|a| a / n),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &TripletState) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, z: C64) -> Self {
        Self {
            amps: self.amps.map(|a| a * z),
        }
    }

    /// Two-qubit coefficient matrix `ψ[i][j]` for `|i⟩_a ⊗ |j⟩_b`, qubit
    /// basis ordered `(|↑⟩, |↓⟩)`, using `|1;−1⟩ = |↓↓⟩`,
    /// `|1;0⟩ = (|↑↓⟩ + |↓↑⟩)/√2` and `|1;+1⟩ = |↑↑⟩`.
    pub fn two_qubit_matrix(&self) -> [[C64; 2]; 2] {
        let [m, z, p] = self.amps;
        let mid = z * FRAC_1_SQRT_2;
        [[p, mid], [mid, m]]
    }

    /// `⟨σ_z⟩` of either qubit; equal to `|amp₊|² − |amp₋|²`.
    pub fn qubit_sz(&self) -> f64 {
        self.amps[2].norm_sqr() - self.amps[0].norm_sqr()
    }
}

/// Full 4×4 Hamiltonian in the basis `(|1;−1⟩, |1;0⟩, |1;+1⟩, |0;0⟩)`.
pub fn build_hamiltonian(params: &ModelParams) -> Matrix4<C64> {
    let block = triplet_block(params);
    let mut h = Matrix4::zeros();
    h.fixed_view_mut::<3, 3>(0, 0).copy_from(&block);
    h[(3, 3)] = C64::new(-params.g, 0.0);
    h
}

/// Triplet block `H_c(θ, φ, g)`.
pub fn triplet_block(params: &ModelParams) -> Matrix3<C64> {
    let ModelParams { g, theta, phi } = *params;
    let (s, c) = theta.sin_cos();
    let q = s * FRAC_1_SQRT_2;
    let e = C64::from_polar(1.0, phi);
    let up = e * q;
    let down = e.conj() * q;
    Matrix3::new(
        C64::new(g - c, 0.0),
        up,
        ZERO,
        down,
        C64::new(-g, 0.0),
        up,
        ZERO,
        down,
        C64::new(g + c, 0.0),
    )
}

/// `H_c v` for a triplet state, without building the matrix.
pub fn apply_triplet_block(params: &ModelParams, v: &[C64; 3]) -> [C64; 3] {
    let h = triplet_block(params);
    let mut out = [ZERO; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|j| h[(i, j)] * v[j]).sum();
    }
    out
}

/// Dense Hermitian eigendecomposition of the triplet block, eigenvalues in
/// ascending order with unit eigenvectors in arbitrary phase.
pub fn dense_triplet_eigen(params: &ModelParams) -> ([f64; 3], [TripletState; 3]) {
    let eig = triplet_block(params).symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.map(|i| eig.eigenvalues[i]);
    let vecs = order.map(|i| {
        let col = eig.eigenvectors.column(i);
        TripletState::new([col[0], col[1], col[2]]).normalized()
    });
    (vals, vecs)
}
