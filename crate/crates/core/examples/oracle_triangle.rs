//! One point checked three ways: closed form, Wilson loop and explicit
//! Schrödinger propagation.

use std::f64::consts::{FRAC_PI_4, PI};

use coupled_berry::oracles::{adiabatic_propagate, wilson_loop_phase, DEFAULT_PERIOD, DEFAULT_STEPS};
use coupled_berry::phases::composite_phase_constant_theta;
use coupled_berry::{Branch, LoopPath};

fn main() -> coupled_berry::Result<()> {
    let (theta, g) = (FRAC_PI_4, 2.0);
    let path = LoopPath::constant_polar(theta);
    for b in Branch::ALL {
        let exact = composite_phase_constant_theta(theta, g, b)?.wrapped();
        let wilson = wilson_loop_phase(&path, g, b, 4096)?;
        let ode = adiabatic_propagate(&path, g, b, DEFAULT_PERIOD, DEFAULT_STEPS)?;
        println!(
            "{b:>5}: closed form {:+.6} pi, wilson {:+.6} pi, ode {:+.6} pi (drift {:.1e})",
            exact / PI,
            wilson / PI,
            ode.geometric_phase / PI,
            ode.populations_drift
        );
    }
    Ok(())
}
