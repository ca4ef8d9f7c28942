use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::direction;

type Curve = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Endpoint tolerance for closed parametrized paths, on the unit sphere.
pub const CLOSURE_TOL: f64 = 1e-12;

/// A closed loop traced by the field direction, parametrized by `s ∈ [0, 1]`.
#[derive(Clone)]
pub enum LoopPath {
    /// `θ` fixed while `φ` runs once from 0 to 2π.
    ConstantPolar { theta: f64 },
    Parametrized(ParamPath),
}

/// A loop given by `θ(s)` and `φ(s)`. Only the direction `n̂` has to return
/// to its start; the chart coordinates need not (a loop may begin and end
/// at a pole with different `φ`).
#[derive(Clone)]
pub struct ParamPath {
    label: String,
    theta_of: Curve,
    phi_of: Curve,
}

impl fmt::Debug for LoopPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoopPath::ConstantPolar { theta } => write!(f, "ConstantPolar {{ theta: {theta} }}"),
            LoopPath::Parametrized(p) => write!(f, "Parametrized({})", p.label),
        }
    }
}

impl LoopPath {
    pub fn constant_polar(theta: f64) -> Self {
        LoopPath::ConstantPolar { theta }
    }

    pub fn parametrized<T, P>(label: impl Into<String>, theta_of: T, phi_of: P) -> Result<Self>
    where
        T: Fn(f64) -> f64 + Send + Sync + 'static,
        P: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let path = ParamPath {
            label: label.into(),
            theta_of: Arc::new(theta_of),
            phi_of: Arc::new(phi_of),
        };
        let a = direction((path.theta_of)(0.0), (path.phi_of)(0.0));
        let b = direction((path.theta_of)(1.0), (path.phi_of)(1.0));
        let gap = (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt();
        if !(gap <= CLOSURE_TOL) {
            return Err(Error::OpenPath(gap));
        }
        Ok(LoopPath::Parametrized(path))
    }

    /// `θ = π sin(πs)`, `φ = πs`: pole to pole and back, with the azimuth
    /// advancing by π. The Schmidt coefficients vary along it.
    pub fn sine_polar() -> Self {
        Self::parametrized("sine-polar", |s| PI * (PI * s).sin(), |s| PI * s)
            .expect("sine-polar path is closed")
    }

    /// A degenerate loop that never leaves `(θ, φ)`.
    pub fn stationary(theta: f64, phi: f64) -> Self {
        Self::parametrized("stationary", move |_| theta, move |_| phi)
            .expect("constant path is closed")
    }

    pub fn label(&self) -> String {
        match self {
            LoopPath::ConstantPolar { theta } => format!("constant-polar({theta})"),
            LoopPath::Parametrized(p) => p.label.clone(),
        }
    }

    /// `(θ(s), φ(s))`.
    pub fn point(&self, s: f64) -> (f64, f64) {
        match self {
            LoopPath::ConstantPolar { theta } => (*theta, TAU * s),
            LoopPath::Parametrized(p) => ((p.theta_of)(s), (p.phi_of)(s)),
        }
    }

    pub fn is_constant_polar(&self) -> bool {
        matches!(self, LoopPath::ConstantPolar { .. })
    }
}

/// Quadrature value with its panel-doubling diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub panels: usize,
    /// `|I(2n) − I(n)| / max(|I(2n)|, 1)` at the final doubling.
    pub rel_change: f64,
}

pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Trapezoid rule for `∮ f(θ, φ) dφ` on `n` uniform panels in `s`.
///
/// Integrand samples are evaluated in parallel; the sum runs in fixed
/// pairwise order, so the result does not depend on thread scheduling.
pub(crate) fn loop_integral<F>(path: &LoopPath, panels: usize, f: &F) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let nodes: Vec<(f64, f64)> = (0..=panels)
        .map(|j| path.point(j as f64 / panels as f64))
        .collect();
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|&(th, ph)| f(th, ph))
        .collect::<Result<_>>()?;
    let terms: Vec<f64> = (0..panels)
        .map(|j| 0.5 * (vals[j] + vals[j + 1]) * (nodes[j + 1].1 - nodes[j].1))
        .collect();
    Ok(pairwise_sum(&terms))
}

pub(crate) const MAX_PANELS: usize = 1 << 20;

/// Doubles the panel count from `panels` until the relative change drops
/// below `tol` or [`MAX_PANELS`] is exceeded.
pub(crate) fn converged_loop_integral<F>(
    path: &LoopPath,
    panels: usize,
    tol: f64,
    f: &F,
) -> Result<Quadrature>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let mut n = panels.max(1);
    let mut prev = loop_integral(path, n, f)?;
    loop {
        let next = loop_integral(path, 2 * n, f)?;
        let rel_change = (next - prev).abs() / next.abs().max(1.0);
        n *= 2;
        if rel_change <= tol {
            return Ok(Quadrature {
                value: next,
                panels: n,
                rel_change,
            });
        }
        if n >= MAX_PANELS {
            return Err(Error::NonconvergentQuadrature {
                change: rel_change,
                panels: n,
            });
        }
        prev = next;
    }
}

/// Default panel count for loop quadratures.
pub const DEFAULT_PANELS: usize = 1 << 14;

/// Solid angle `∮ (1 − cos θ) dφ` swept by the field direction.
pub fn solid_angle(path: &LoopPath) -> f64 {
    match path {
        LoopPath::ConstantPolar { theta } => TAU * (1.0 - theta.cos()),
        LoopPath::Parametrized(_) => solid_angle_quadrature(path, DEFAULT_PANELS),
    }
}

/// Trapezoid quadrature of the solid angle on `panels` panels.
pub fn solid_angle_quadrature(path: &LoopPath, panels: usize) -> f64 {
    loop_integral(path, panels, &|th: f64, _| Ok(1.0 - th.cos()))
        .expect("solid-angle integrand is infallible")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_polar_solid_angles() {
        assert!((solid_angle(&LoopPath::constant_polar(PI / 2.0)) - TAU).abs() < 1e-15);
        assert!((solid_angle(&LoopPath::constant_polar(PI / 3.0)) - PI).abs() < 1e-15);
    }

    #[test]
    fn quadrature_reproduces_constant_polar() {
        let th = 0.8;
        let p = LoopPath::parametrized("circle", move |_| th, |s| TAU * s).unwrap();
        assert!((solid_angle(&p) - TAU * (1.0 - th.cos())).abs() < 1e-12);
    }

    #[test]
    fn sine_polar_solid_angle_converges() {
        let p = LoopPath::sine_polar();
        let a = solid_angle_quadrature(&p, 10_000);
        let b = solid_angle_quadrature(&p, 20_000);
        assert!((a - b).abs() / b.abs() < 1e-8);
        // ∫₀¹ cos(π sin πs) ds = J₀(π) = −0.30424217764409386
        let want = PI * (1.0 + 0.304_242_177_644_093_86);
        assert!((b - want).abs() < 1e-10, "{b} vs {want}");
    }

    #[test]
    fn open_paths_are_rejected() {
        assert!(matches!(
            LoopPath::parametrized("open", |s| 0.5 + s, |_| 0.0),
            Err(Error::OpenPath(_))
        ));
        // closed on the sphere although φ does not return
        assert!(LoopPath::parametrized("pole", |s| PI * (PI * s).sin(), |s| 3.0 * s).is_ok());
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
    }
}
