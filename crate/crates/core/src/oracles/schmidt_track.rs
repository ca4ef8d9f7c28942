use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    instantaneous_eigenstate, qubit_inner, schmidt_decompose, Branch, ModelParams, SchmidtData,
    TripletState, C64,
};
use crate::phases::{pairwise_sum, wrap_phase, LoopPath, Method, Phase, PhaseResult};

/// Largest `|p₁(s) − p₁(0)|` for which a loop counts as nontransition.
pub const NONTRANSITION_TOL: f64 = 1e-8;

/// Schmidt data followed around a discretized loop.
///
/// The eigenstate is first made single valued around the loop by parallel
/// transport with the holonomy spread evenly over the links. Each grid
/// state is then Schmidt decomposed; terms are matched to the previous
/// point by overlap, so `points[j].p1` is the weight of the term that
/// continues term 1 of the starting point, not necessarily the larger one.
#[derive(Debug, Clone)]
pub struct SchmidtTrack {
    pub branch: Branch,
    pub g: f64,
    /// Schmidt data at `s_j = j/N`, `j = 0..N−1`.
    pub points: Vec<SchmidtData>,
    /// Holonomies `Γ_{a,k}` of the Schmidt vectors, in `(−π, π]`.
    pub schmidt_a: [f64; 2],
    pub schmidt_b: [f64; 2],
    /// `Σ_j √(p_k(s_j) p_k(s_{j+1}))` times the link phase of `a_k`, with
    /// the holonomy of `a_k` spread evenly over the links.
    pub weighted_a: [f64; 2],
    /// Same weighting for the `b_k` link phases.
    pub weighted_b: [f64; 2],
    /// Weighted link phases of the product vectors `a_k ⊗ b_k`, which
    /// carry no gauge freedom.
    pub weighted_pair: [f64; 2],
    /// Largest `|p₁(s_j) − p₁(0)|`.
    pub p1_variation: f64,
}

impl SchmidtTrack {
    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    /// Schmidt weights at the start of the loop.
    pub fn p_start(&self) -> [f64; 2] {
        self.points[0].weights()
    }

    /// Schmidt weights at the last grid point before closure.
    pub fn p_end(&self) -> [f64; 2] {
        self.points[self.points.len() - 1].weights()
    }

    pub fn is_transition(&self) -> bool {
        self.p1_variation > NONTRANSITION_TOL
    }

    /// Tracked phases as a [`PhaseResult`]; subsystem phases are present
    /// only for nontransition loops.
    pub fn phase_result(&self) -> PhaseResult {
        let mut out = PhaseResult::empty(Method::Wilson);
        out.gamma_ab = Some(Phase(composite_from_schmidt(self)));
        if let Ok((a, b)) = mixed_state_phase_numeric(self) {
            out.gamma_a = Some(Phase(a));
            out.gamma_b = Some(Phase(b));
        }
        out.schmidt_a = Some(self.schmidt_a.map(Phase));
        out.schmidt_b = Some(self.schmidt_b.map(Phase));
        out.weighted_a = Some(self.weighted_a.map(Phase));
        out.weighted_b = Some(self.weighted_b.map(Phase));
        out
    }
}

fn unit_phase(z: C64) -> C64 {
    let n = z.norm();
    if n > 0.0 {
        z / n
    } else {
        C64::new(1.0, 0.0)
    }
}

/// Rephases `states` in place so every link is real and positive except
/// the last, then spreads the closing phase evenly over all links.
fn make_single_valued(states: &mut [TripletState]) {
    let n = states.len();
    for j in 1..n {
        let z = states[j - 1].inner(&states[j]);
        states[j] = states[j].scaled(unit_phase(z).conj());
    }
    let chi = states[n - 1].inner(&states[0]).arg();
    for (j, st) in states.iter_mut().enumerate() {
        *st = st.scaled(C64::from_polar(1.0, chi * j as f64 / n as f64));
    }
}

/// Follows the Schmidt decomposition of one eigenbranch around `path` on
/// `n_points` grid points, using the closed-form eigenvectors.
pub fn schmidt_track(path: &LoopPath, g: f64, branch: Branch, n_points: usize) -> Result<SchmidtTrack> {
    if n_points < 3 {
        return Err(Error::Usage(format!("Schmidt tracking needs at least 3 points, got {n_points}")));
    }
    let n = n_points;
    let mut states: Vec<TripletState> = (0..n)
        .into_par_iter()
        .map(|j| {
            let (th, ph) = path.point(j as f64 / n as f64);
            instantaneous_eigenstate(&ModelParams::new(g, th, ph)?, branch).map(|(_, st)| st)
        })
        .collect::<Result<_>>()?;
    make_single_valued(&mut states);

    let mut points: Vec<SchmidtData> = states.par_iter().map(schmidt_decompose).collect::<Result<_>>()?;

    // follow each term by overlap and parallel-transport its a-vector
    for j in 1..n {
        let prev = points[j - 1];
        let cur = &mut points[j];
        let keep = qubit_inner(&prev.vecs_a[0], &cur.vecs_a[0]).norm();
        let swap = qubit_inner(&prev.vecs_a[0], &cur.vecs_a[1]).norm();
        if swap > keep {
            *cur = cur.swapped();
        }
        for k in 0..2 {
            let z = qubit_inner(&prev.vecs_a[k], &cur.vecs_a[k]);
            cur.rephase(k, unit_phase(z).conj());
        }
    }
    let last = points[n - 1];
    let first = points[0];
    if qubit_inner(&last.vecs_a[0], &first.vecs_a[1]).norm() > qubit_inner(&last.vecs_a[0], &first.vecs_a[0]).norm() {
        // the loop exchanges the two Schmidt terms, so neither has a holonomy
        let r_min = points.iter().map(|p| p.r).fold(f64::INFINITY, f64::min);
        return Err(Error::DegenerateSchmidt(r_min));
    }
    for k in 0..2 {
        let chi = qubit_inner(&last.vecs_a[k], &first.vecs_a[k]).arg();
        for (j, p) in points.iter_mut().enumerate().skip(1) {
            p.rephase(k, C64::from_polar(1.0, chi * j as f64 / n as f64));
        }
    }

    let mut schmidt_a = [0.0; 2];
    let mut schmidt_b = [0.0; 2];
    let mut weighted_a = [0.0; 2];
    let mut weighted_b = [0.0; 2];
    let mut weighted_pair = [0.0; 2];
    for k in 0..2 {
        let mut la = Vec::with_capacity(n);
        let mut lb = Vec::with_capacity(n);
        let mut wa = Vec::with_capacity(n);
        let mut wb = Vec::with_capacity(n);
        let mut wp = Vec::with_capacity(n);
        for j in 0..n {
            let (p, q) = (&points[j], &points[(j + 1) % n]);
            let za = qubit_inner(&p.vecs_a[k], &q.vecs_a[k]);
            let zb = qubit_inner(&p.vecs_b[k], &q.vecs_b[k]);
            let w = (p.weights()[k] * q.weights()[k]).sqrt();
            la.push(za.arg());
            lb.push(zb.arg());
            wa.push(-w * za.arg());
            wb.push(-w * zb.arg());
            wp.push(-w * (za * zb).arg());
        }
        schmidt_a[k] = wrap_phase(-pairwise_sum(&la));
        schmidt_b[k] = wrap_phase(-pairwise_sum(&lb));
        weighted_a[k] = pairwise_sum(&wa);
        weighted_b[k] = pairwise_sum(&wb);
        weighted_pair[k] = pairwise_sum(&wp);
    }
    let p1_variation = points
        .iter()
        .map(|p| (p.p1 - points[0].p1).abs())
        .fold(0.0, f64::max);

    Ok(SchmidtTrack {
        branch,
        g,
        points,
        schmidt_a,
        schmidt_b,
        weighted_a,
        weighted_b,
        weighted_pair,
        p1_variation,
    })
}

/// Composite phase as the sum of weighted Schmidt-pair phases,
/// `Σ_k (Γ̃_{a,k} + Γ̃_{b,k})`. Valid on transition loops as well.
pub fn composite_from_schmidt(track: &SchmidtTrack) -> f64 {
    track.weighted_pair[0] + track.weighted_pair[1]
}

/// Mixed-state phases `(γ_a, γ_b)`, `γ_ξ = arg Σ_k p_k e^{iΓ_{ξ,k}}`, from
/// the tracked holonomies. Defined only when the weights stay constant.
pub fn mixed_state_phase_numeric(track: &SchmidtTrack) -> Result<(f64, f64)> {
    if track.is_transition() {
        return Err(Error::TransitionPath(track.p1_variation));
    }
    let p = track.p_start();
    let avg = |gs: &[f64; 2]| (C64::from_polar(p[0], gs[0]) + C64::from_polar(p[1], gs[1])).arg();
    Ok((avg(&track.schmidt_a), avg(&track.schmidt_b)))
}
