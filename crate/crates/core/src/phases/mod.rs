//! Closed-form cyclic geometric phases.
//!
//! Along a constant-`θ` loop the Schmidt coefficients of every eigenbranch
//! stay fixed, and the phases follow from the Bloch length `r`, the scale
//! factor `F` and `cos θ`. Along loops where `θ` varies only the composite
//! phase is defined, as a line integral over the loop.
//!
//! Sign conventions: `r_s` is the Bloch length carrying the sign of the
//! shifted eigenvalue, so that each qubit has `⟨σ_z⟩ = r_s F cos θ`.
//! Schmidt index 1 always refers to the larger coefficient.

mod path;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    instantaneous_eigenstate, signed_bloch_length, solve_shifted_eigenvalues, Branch,
    ModelParams, SCHMIDT_DEGENERACY_TOL,
};

pub use path::{
    solid_angle, solid_angle_quadrature, LoopPath, ParamPath, Quadrature, CLOSURE_TOL,
    DEFAULT_PANELS,
};
pub(crate) use path::pairwise_sum;

/// Denominators of `F` below this are treated as zero.
pub const SCALE_FACTOR_TOL: f64 = 1e-14;

/// Relative change on panel doubling accepted for transition-path quadrature.
pub const TRANSITION_QUADRATURE_TOL: f64 = 1e-6;

/// Maps an angle to `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// A phase carried as an unwrapped representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase(pub f64);

impl Phase {
    pub fn unwrapped(self) -> f64 {
        self.0
    }

    pub fn wrapped(self) -> f64 {
        wrap_phase(self.0)
    }
}

/// Which route produced a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Analytic,
    Wilson,
    Ode,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Wilson => "wilson",
            Method::Ode => "ode",
            Method::Quadrature => "quadrature",
        }
    }
}

/// Geometric phases of one eigenbranch around one loop. Components that a
/// route does not produce, or that are undefined, are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseResult {
    pub method: Method,
    pub gamma_ab: Option<Phase>,
    pub gamma_a: Option<Phase>,
    pub gamma_b: Option<Phase>,
    /// `Γ_{a,1}, Γ_{a,2}`.
    pub schmidt_a: Option<[Phase; 2]>,
    pub schmidt_b: Option<[Phase; 2]>,
    /// Weighted Schmidt-vector phases `Γ̃_{a,k}`, numeric tracking only.
    pub weighted_a: Option<[Phase; 2]>,
    pub weighted_b: Option<[Phase; 2]>,
}

impl PhaseResult {
    pub fn empty(method: Method) -> Self {
        Self {
            method,
            gamma_ab: None,
            gamma_a: None,
            gamma_b: None,
            schmidt_a: None,
            schmidt_b: None,
            weighted_a: None,
            weighted_b: None,
        }
    }
}

/// Phases at `g = 0` for total spin projection `m` along the field:
/// `γ_ab = −mΩ`, and for `m = ±1` each qubit carries half of it. The
/// subsystem phases of `m = 0` depend on the singlet admixture, see
/// [`degenerate_zero_g_subsystem_phase`].
pub fn zero_coupling_phase(m: i8, omega: f64) -> Result<PhaseResult> {
    if !(-1..=1).contains(&m) {
        return Err(Error::Usage(format!("spin projection {m} is not in {{-1, 0, 1}}")));
    }
    let mf = f64::from(m);
    let mut out = PhaseResult::empty(Method::Analytic);
    out.gamma_ab = Some(Phase(if m == 0 { 0.0 } else { -mf * omega }));
    if m != 0 {
        out.gamma_a = Some(Phase(-mf * omega / 2.0));
        out.gamma_b = out.gamma_a;
    }
    Ok(out)
}

/// Subsystem phases `(γ_a, γ_b)` of `α|1;0⟩ + β|0;0⟩` carried around a loop
/// of solid angle `omega` at `g = 0`:
/// `γ_a = −γ_b = −arctan[2 Re(α*β) tan(Ω/2)]`, principal branch.
pub fn degenerate_zero_g_subsystem_phase(
    alpha: Complex64,
    beta: Complex64,
    omega: f64,
) -> Result<(f64, f64)> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Usage(format!("|α|² + |β|² = {norm}, expected 1")));
    }
    let w = 2.0 * (alpha.conj() * beta).re;
    if w.abs() < 1e-12 {
        return Err(Error::UndefinedPhase);
    }
    let ga = -(w * (omega / 2.0).tan()).atan();
    Ok((ga, -ga))
}

struct BranchGeometry {
    cos_theta: f64,
    r_signed: f64,
    scale: f64,
}

fn geometry(theta: f64, g: f64, branch: Branch) -> Result<BranchGeometry> {
    Ok(BranchGeometry {
        cos_theta: theta.cos(),
        r_signed: signed_bloch_length(theta, g, branch)?,
        scale: scale_factor(theta, g, branch)?,
    })
}

/// `F = sin θ / √(X⁴ − 2X² cos²θ + cos²θ)`.
pub fn scale_factor(theta: f64, g: f64, branch: Branch) -> Result<f64> {
    let x = solve_shifted_eigenvalues(theta, g)?.get(branch);
    let (s, c) = theta.sin_cos();
    // (X² − c²)² + c² s², the same polynomial without cancellation
    let d = ((x - c) * (x + c)).powi(2) + (c * s).powi(2);
    if d < SCALE_FACTOR_TOL {
        return Err(Error::SingularScaleFactor(d));
    }
    Ok(s / d.sqrt())
}

/// Schmidt-vector phases `(Γ₁, Γ₂)` around a constant-`θ` loop, equal for
/// both qubits: `Γ₁ = −π(1 − F cos θ)` with `F cos θ` oriented along the
/// larger Schmidt vector's Bloch vector, and `Γ₂ = −Γ₁`.
pub fn schmidt_vector_phase(theta: f64, g: f64, branch: Branch) -> Result<(f64, f64)> {
    let geo = geometry(theta, g, branch)?;
    if geo.r_signed.abs() < SCHMIDT_DEGENERACY_TOL {
        return Err(Error::DegenerateSchmidt(geo.r_signed.abs()));
    }
    let n_z = geo.r_signed.signum() * geo.scale * geo.cos_theta;
    let g1 = -PI * (1.0 - n_z);
    Ok((g1, -g1))
}

/// Composite phase around a constant-`θ` loop, `γ_ab = −2π(1 − r_s F cos θ)`.
///
/// This is `Σ_k p_k (Γ_{a,k} + Γ_{b,k})` with each Schmidt-vector phase
/// taken in the gauge where that vector is single valued around the loop:
/// `−π(1 − n_k)` for Bloch component `n_k = ±F cos θ`. With the
/// antisymmetric pair `±Γ₁` instead the weighted sum is off by `2π(1 − r)`,
/// see [`composite_phase_antisymmetric_weighting`].
pub fn composite_phase_constant_theta(theta: f64, g: f64, branch: Branch) -> Result<Phase> {
    let geo = geometry(theta, g, branch)?;
    Ok(Phase(-TAU * (1.0 - geo.r_signed * geo.scale * geo.cos_theta)))
}

/// `−2π r_s (1 − F cos θ)`: the Schmidt-weighted sum built from the
/// antisymmetric representatives `Γ₂ = −Γ₁`. It agrees with the holonomy of
/// the eigenstate modulo 2π only when `|r| ∈ {0, 1}`, i.e. at `g = 0`.
pub fn composite_phase_antisymmetric_weighting(theta: f64, g: f64, branch: Branch) -> Result<f64> {
    let geo = geometry(theta, g, branch)?;
    Ok(-TAU * geo.r_signed * (1.0 - geo.scale * geo.cos_theta))
}

/// Mixed-state phase of either qubit around a constant-`θ` loop,
/// `arg[p₁ e^{iΓ₁} + p₂ e^{−iΓ₁}] = atan2(r sin Γ₁, cos Γ₁)`.
///
/// This is the quadrant-correct form of `−arctan[r tan(π(1 − F cos θ))]`;
/// the two agree modulo π.
pub fn subsystem_phase_constant_theta(theta: f64, g: f64, branch: Branch) -> Result<f64> {
    let (g1, _) = schmidt_vector_phase(theta, g, branch)?;
    let r = signed_bloch_length(theta, g, branch)?.abs();
    Ok((r * g1.sin()).atan2(g1.cos()))
}

/// All closed-form phases of a branch around a constant-`θ` loop.
pub fn nontransition_phases(theta: f64, g: f64, branch: Branch) -> Result<PhaseResult> {
    let mut out = PhaseResult::empty(Method::Analytic);
    out.gamma_ab = Some(composite_phase_constant_theta(theta, g, branch)?);
    let (g1, g2) = schmidt_vector_phase(theta, g, branch)?;
    let sub = Phase(subsystem_phase_constant_theta(theta, g, branch)?);
    out.gamma_a = Some(sub);
    out.gamma_b = Some(sub);
    out.schmidt_a = Some([Phase(g1), Phase(g2)]);
    out.schmidt_b = out.schmidt_a;
    Ok(out)
}

/// `⟨σ_z⟩` of either qubit on the branch, `r_s F cos θ`, with the limit
/// value from the eigenvector where `F` is 0/0.
fn transition_integrand(theta: f64, g: f64, branch: Branch) -> Result<f64> {
    let params = ModelParams::new(g, theta, 0.0)?;
    let (sol, _) = instantaneous_eigenstate(&params, branch)?;
    if sol.fallback {
        return Ok(sol.qubit_sz());
    }
    match scale_factor(theta, g, branch) {
        Ok(f) => Ok(signed_bloch_length(theta, g, branch)? * f * theta.cos()),
        Err(Error::SingularScaleFactor(_)) => Ok(sol.qubit_sz()),
        Err(e) => Err(e),
    }
}

/// Closure phase `−arg⟨ψ(end)|ψ(start)⟩` of the `(e^{iφ}A, B, e^{−iφ}C)`
/// gauge, which is single valued in `φ` but not at the poles.
fn gauge_closure(path: &LoopPath, g: f64, branch: Branch) -> Result<f64> {
    let (t0, p0) = path.point(0.0);
    let (t1, p1) = path.point(1.0);
    let (_, start) = instantaneous_eigenstate(&ModelParams::new(g, t0, p0)?, branch)?;
    let (_, end) = instantaneous_eigenstate(&ModelParams::new(g, t1, p1)?, branch)?;
    Ok(-end.inner(&start).arg())
}

/// Composite phase around a loop on which `θ` may vary:
/// `γ_ab = ∮ r_s F cos θ dφ` plus the closure phase of the eigenvector gauge
/// when the loop starts and ends at a pole with different `φ`.
///
/// The integrand is smooth along a loop that avoids root degeneracies, so
/// the trapezoid rule on `panels` panels is doubled until the relative
/// change falls below [`TRANSITION_QUADRATURE_TOL`]. Branches are labelled
/// per point by root order, which is continuous along any path with
/// `0 < θ < π` and agrees with the limit at the poles.
pub fn transition_path_phase(
    path: &LoopPath,
    g: f64,
    branch: Branch,
    panels: usize,
) -> Result<Quadrature> {
    let integrand = |th: f64, _ph: f64| transition_integrand(th, g, branch);
    let mut q = path::converged_loop_integral(path, panels, TRANSITION_QUADRATURE_TOL, &integrand)?;
    q.value += gauge_closure(path, g, branch)?;
    Ok(q)
}

/// `−∮ r_s (1 − F cos θ) dφ`, the transition-loop analogue of
/// [`composite_phase_antisymmetric_weighting`]. Matches the holonomy only at
/// `g = 0` on loops whose poles carry `|M| = 1`.
pub fn transition_path_phase_antisymmetric_weighting(
    path: &LoopPath,
    g: f64,
    branch: Branch,
    panels: usize,
) -> Result<f64> {
    let integrand = |th: f64, _ph: f64| -> Result<f64> {
        let sz = transition_integrand(th, g, branch)?;
        let params = ModelParams::new(g, th, 0.0)?;
        let (sol, _) = instantaneous_eigenstate(&params, branch)?;
        let (a, b, c) = (sol.a, sol.b, sol.c);
        let mag = ((a + c) * (2.0 * b * b + (c - a).powi(2)).sqrt()).abs();
        let rs = if sol.x < 0.0 { -mag } else { mag };
        Ok(-(rs - sz))
    };
    path::loop_integral(path, panels, &integrand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(TAU + 0.1) - 0.1).abs() < 1e-15);
        assert!((wrap_phase(-3.0 * PI + 0.2) - (-PI + 0.2)).abs() < 1e-14);
        assert!(circular_distance(PI - 0.01, -PI + 0.01) < 0.0201);
    }

    #[test]
    fn zero_coupling_examples() {
        let r = zero_coupling_phase(1, PI).unwrap();
        assert_eq!(r.gamma_ab.unwrap().unwrapped(), -PI);
        assert_eq!(r.gamma_a.unwrap().unwrapped(), -PI / 2.0);
        let z = zero_coupling_phase(0, 1.3).unwrap();
        assert_eq!(z.gamma_ab.unwrap().unwrapped(), 0.0);
        assert!(z.gamma_a.is_none());
        let m = zero_coupling_phase(-1, TAU).unwrap();
        assert_eq!(m.gamma_ab.unwrap().unwrapped(), TAU);
        assert!(m.gamma_ab.unwrap().wrapped().abs() < 1e-15);
        assert!(zero_coupling_phase(2, 1.0).is_err());
    }

    #[test]
    fn degenerate_m0_subsystem_phase() {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let (ga, gb) = degenerate_zero_g_subsystem_phase(h, h, PI / 2.0).unwrap();
        assert!((ga + PI / 4.0).abs() < 1e-15);
        assert_eq!(gb, -ga);
        let ih = Complex64::new(0.0, FRAC_1_SQRT_2);
        assert_eq!(degenerate_zero_g_subsystem_phase(h, ih, 1.0), Err(Error::UndefinedPhase));
        assert_eq!(
            degenerate_zero_g_subsystem_phase(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 1.0),
            Err(Error::UndefinedPhase)
        );
    }

    #[test]
    fn degenerate_m0_matches_weighted_phase_factors() {
        // |α|1;0⟩ + β|0;0⟩ has Schmidt pairs (↑,↓) and (↓,↑) with
        // p = |α ± β|²/2; the field-aligned and anti-aligned qubit states
        // pick up ∓Ω/2.
        let alpha = Complex64::new(0.8, 0.1);
        let beta = Complex64::new(0.3, -0.2);
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        let (alpha, beta) = (alpha / n, beta / n);
        let p1 = (alpha + beta).norm_sqr() / 2.0;
        let p2 = (alpha - beta).norm_sqr() / 2.0;
        for &omega in &[0.3, 1.0, 2.5] {
            let (ga, gb) = degenerate_zero_g_subsystem_phase(alpha, beta, omega).unwrap();
            let want_a = (Complex64::from_polar(p1, -omega / 2.0) + Complex64::from_polar(p2, omega / 2.0)).arg();
            let want_b = (Complex64::from_polar(p1, omega / 2.0) + Complex64::from_polar(p2, -omega / 2.0)).arg();
            assert!((ga - want_a).abs() < 1e-12);
            assert!((gb - want_b).abs() < 1e-12);
        }
    }

    #[test]
    fn scale_factor_limits() {
        for &th in &[0.3, 1.0, 2.0] {
            assert!((scale_factor(th, 0.0, Branch::Plus).unwrap() - 1.0).abs() < 1e-12);
        }
        let f = scale_factor(PI / 3.0, 100.0, Branch::Plus).unwrap();
        assert!((f - 2.0).abs() < 0.01, "{f}");
        let b0 = Branch::approaching_triplet(0, PI / 4.0).unwrap();
        assert!(scale_factor(PI / 4.0, 100.0, b0).unwrap() < 1e-3);
        assert!(matches!(
            scale_factor(PI / 2.0, 1.0, Branch::Zero),
            Err(Error::SingularScaleFactor(_))
        ));
    }

    #[test]
    fn schmidt_phase_examples() {
        let (g1, g2) = schmidt_vector_phase(PI / 3.0, 0.0, Branch::Plus).unwrap();
        assert!((g1 + PI / 2.0).abs() < 1e-12);
        assert_eq!(g2, -g1);
        let (g1, _) = schmidt_vector_phase(PI / 6.0, 100.0, Branch::Plus).unwrap();
        assert!(g1.abs() < 0.01);
        let b0 = Branch::approaching_triplet(0, PI / 4.0).unwrap();
        let (_, g2) = schmidt_vector_phase(PI / 4.0, 100.0, b0).unwrap();
        assert!(circular_distance(g2, PI) < 1e-3);
        assert!(matches!(
            schmidt_vector_phase(0.7, 0.0, Branch::Zero),
            Err(Error::DegenerateSchmidt(_))
        ));
    }

    #[test]
    fn composite_zero_coupling() {
        for &th in &[0.1, PI / 6.0, PI / 3.0, 1.4] {
            let got = composite_phase_constant_theta(th, 0.0, Branch::Plus).unwrap().unwrapped();
            let omega = solid_angle(&LoopPath::constant_polar(th));
            let want = zero_coupling_phase(1, omega).unwrap().gamma_ab.unwrap().unwrapped();
            assert!((got - want).abs() < 1e-12);
            let anti = composite_phase_antisymmetric_weighting(th, 0.0, Branch::Plus).unwrap();
            assert!((anti - want).abs() < 1e-12);
        }
    }

    #[test]
    fn antisymmetric_weighting_is_off_by_two_pi_one_minus_r() {
        for &(th, g) in &[(PI / 3.0, 1.0), (0.4 * PI, 2.0), (PI / 6.0, 0.5)] {
            for b in Branch::ALL {
                let good = composite_phase_constant_theta(th, g, b).unwrap().unwrapped();
                let anti = composite_phase_antisymmetric_weighting(th, g, b).unwrap();
                let rs = signed_bloch_length(th, g, b).unwrap();
                assert!((anti - good - TAU * (1.0 - rs)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn subsystem_examples() {
        let th = 0.4 * PI;
        let got = subsystem_phase_constant_theta(th, 0.0, Branch::Plus).unwrap();
        let omega = TAU * (1.0 - th.cos());
        assert!((got + omega / 2.0).abs() < 1e-12);
        // modulo π this is the printed arctan value
        let f = scale_factor(th, 0.0, Branch::Plus).unwrap();
        let printed = -(1.0 * (PI * (1.0 - f * th.cos())).tan()).atan();
        assert!(circular_distance(2.0 * got, 2.0 * printed) < 1e-12);
        assert!(subsystem_phase_constant_theta(PI / 6.0, 100.0, Branch::Plus).unwrap().abs() < 0.01);
        assert!(matches!(
            subsystem_phase_constant_theta(1.0, 0.0, Branch::Zero),
            Err(Error::DegenerateSchmidt(_))
        ));
    }

    #[test]
    fn transition_reduces_to_constant_polar() {
        for &(th, g) in &[(0.4 * PI, 1.0), (PI / 6.0, 2.0), (2.0, 0.3)] {
            let p = LoopPath::parametrized("circle", move |_| th, |s| TAU * s).unwrap();
            for b in Branch::ALL {
                let q = transition_path_phase(&p, g, b, 64).unwrap();
                let c = composite_phase_constant_theta(th, g, b).unwrap().unwrapped();
                assert!(circular_distance(q.value, c) < 1e-8, "{th} {g} {b}");
            }
        }
    }

    #[test]
    fn transition_zero_coupling_is_minus_solid_angle() {
        let p = LoopPath::sine_polar();
        let q = transition_path_phase(&p, 0.0, Branch::Plus, DEFAULT_PANELS).unwrap();
        let omega = solid_angle_quadrature(&p, 1 << 16);
        assert!(circular_distance(q.value, -omega) < 1e-9, "{} {}", q.value, omega);
        assert!(q.rel_change <= TRANSITION_QUADRATURE_TOL);
    }
}
