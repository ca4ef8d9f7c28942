//! Shifted eigenvalues `X = E − g` of the triplet block, the real roots of
//! `X³ + 2gX² − X − 2g cos²θ = 0`.

use std::f64::consts::TAU;

use super::Branch;
use crate::error::{Error, Result};

/// Two roots closer than this cannot be told apart by branch label.
pub const ROOT_GAP_TOL: f64 = 1e-9;

/// The three shifted eigenvalues, labelled by branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedRoots {
    pub minus: f64,
    pub zero: f64,
    pub plus: f64,
}

impl ShiftedRoots {
    pub fn get(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Minus => self.minus,
            Branch::Zero => self.zero,
            Branch::Plus => self.plus,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.minus, self.zero, self.plus]
    }
}

/// `X³ + 2gX² − X − 2g cos²θ`.
pub fn cubic_residual(x: f64, theta: f64, g: f64) -> f64 {
    let c2 = theta.cos().powi(2);
    ((x + 2.0 * g) * x - 1.0) * x - 2.0 * g * c2
}

fn derivative(x: f64, g: f64) -> f64 {
    (3.0 * x + 4.0 * g) * x - 1.0
}

/// Trigonometric form of the three real roots followed by Newton polishing.
///
/// Roots are returned labelled by continuation from `g = 0` (see [`Branch`]).
/// At the poles `θ ∈ {0, π}` the cubic factors as `(X − 1)(X + 1)(X + 2g)`
/// and two roots meet at `g = ±½`; there, and anywhere else two roots come
/// within [`ROOT_GAP_TOL`], the labels are ambiguous and `DegenerateRoots`
/// is returned.
pub fn solve_shifted_eigenvalues(theta: f64, g: f64) -> Result<ShiftedRoots> {
    if !(theta.is_finite() && g.is_finite()) {
        return Err(Error::InvalidParams { g, theta, phi: 0.0 });
    }
    let c2 = theta.cos().powi(2);
    // x = t − 2g/3 gives t³ + p t + q = 0
    let shift = 2.0 * g / 3.0;
    let p = -1.0 - 4.0 * g * g / 3.0;
    let q = 16.0 * g.powi(3) / 27.0 + 2.0 * g / 3.0 - 2.0 * g * c2;
    let amp = 2.0 * (-p / 3.0).sqrt();
    let arg = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
    let base = arg.acos() / 3.0;

    let mut roots = [0.0; 3];
    for (k, r) in roots.iter_mut().enumerate() {
        let t = amp * (base - TAU * k as f64 / 3.0).cos();
        *r = polish(t - shift, theta, g);
    }
    roots.sort_by(f64::total_cmp);

    for w in roots.windows(2) {
        if w[1] - w[0] < ROOT_GAP_TOL {
            return Err(Error::DegenerateRoots(w[0], w[1]));
        }
    }
    Ok(ShiftedRoots {
        minus: roots[0],
        zero: roots[1],
        plus: roots[2],
    })
}

fn polish(mut x: f64, theta: f64, g: f64) -> f64 {
    let mut f = cubic_residual(x, theta, g);
    for _ in 0..3 {
        let d = derivative(x, g);
        if f == 0.0 || d.abs() < 1e-300 {
            break;
        }
        let next = x - f / d;
        let fn_ = cubic_residual(next, theta, g);
        if fn_.abs() >= f.abs() {
            break;
        }
        x = next;
        f = fn_;
    }
    x
}
