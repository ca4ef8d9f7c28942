use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{dense_triplet_eigen, Branch, ModelParams, TripletState};
use crate::phases::{pairwise_sum, wrap_phase, LoopPath};

/// Eigenvalue gaps below this make the branch ill-defined on the grid.
pub const WILSON_GAP_TOL: f64 = 1e-9;

/// Fewest grid points accepted by [`wilson_loop_phase`].
pub const MIN_WILSON_POINTS: usize = 64;

/// Berry phase `−arg Π⟨ψ_j|ψ_{j+1}⟩ ∈ (−π, π]` of a closed chain of states;
/// the last state links back to the first. Invariant under rephasing any
/// state.
pub fn wilson_loop_from_states(states: &[TripletState]) -> f64 {
    let n = states.len();
    if n < 2 {
        return 0.0;
    }
    let args: Vec<f64> = (0..n)
        .map(|j| states[j].inner(&states[(j + 1) % n]).arg())
        .collect();
    wrap_phase(-pairwise_sum(&args))
}

/// Dense eigenvectors of one branch at `s_j = j/N`, `j = 0..N−1`.
pub(crate) fn dense_branch_states(
    path: &LoopPath,
    g: f64,
    branch: Branch,
    n_points: usize,
) -> Result<Vec<TripletState>> {
    (0..n_points)
        .into_par_iter()
        .map(|j| {
            let s = j as f64 / n_points as f64;
            let (th, ph) = path.point(s);
            let (vals, vecs) = dense_triplet_eigen(&ModelParams::new(g, th, ph)?);
            let k = branch.index();
            let gap = [k.checked_sub(1), (k < 2).then_some(k + 1)]
                .into_iter()
                .flatten()
                .map(|i| (vals[i] - vals[k]).abs())
                .fold(f64::INFINITY, f64::min);
            if gap < WILSON_GAP_TOL {
                return Err(Error::DegenerateAlongPath { gap, s });
            }
            Ok(vecs[k])
        })
        .collect()
}

/// Discrete Wilson-loop Berry phase of one branch on `n_points` grid
/// points, from dense eigenvectors in whatever phase the solver returns.
/// The loop is closed onto the first state, so the result is exact mod 2π
/// up to the `O(N⁻²)` discretization error.
pub fn wilson_loop_phase(path: &LoopPath, g: f64, branch: Branch, n_points: usize) -> Result<f64> {
    if n_points < MIN_WILSON_POINTS {
        return Err(Error::Usage(format!(
            "Wilson loop needs at least {MIN_WILSON_POINTS} points, got {n_points}"
        )));
    }
    let states = dense_branch_states(path, g, branch, n_points)?;
    Ok(wilson_loop_from_states(&states))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phases::{circular_distance, composite_phase_constant_theta};
    use std::f64::consts::PI;

    #[test]
    fn stationary_loop_has_no_phase() {
        let p = LoopPath::stationary(0.9, 0.3);
        assert!(wilson_loop_phase(&p, 1.0, Branch::Plus, 64).unwrap().abs() < 1e-14);
    }

    #[test]
    fn zero_coupling_berry_formula() {
        let p = LoopPath::constant_polar(PI / 3.0);
        let w = wilson_loop_phase(&p, 0.0, Branch::Plus, 4096).unwrap();
        assert!(circular_distance(w, -PI) < 1e-4, "{w}");
    }

    #[test]
    fn matches_closed_form_at_finite_coupling() {
        let p = LoopPath::constant_polar(PI / 4.0);
        let w = wilson_loop_phase(&p, 2.0, Branch::Plus, 4096).unwrap();
        let a = composite_phase_constant_theta(PI / 4.0, 2.0, Branch::Plus).unwrap();
        assert!(circular_distance(w, a.unwrapped()) < 1e-4);
    }

    #[test]
    fn degenerate_and_short_grids_are_rejected() {
        // the pole crossing at g = 1/2 sits at s = 0 of this loop
        let p = LoopPath::sine_polar();
        assert!(matches!(
            wilson_loop_phase(&p, 0.5, Branch::Minus, 128),
            Err(Error::DegenerateAlongPath { .. })
        ));
        assert!(matches!(
            wilson_loop_phase(&LoopPath::constant_polar(1.0), 0.0, Branch::Plus, 10),
            Err(Error::Usage(_))
        ));
    }
}
