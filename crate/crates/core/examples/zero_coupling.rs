//! Without coupling the composite phase is the spin-1 Berry phase, and the
//! m = 0 state mixed with the singlet splits its phase between the qubits.

use std::f64::consts::PI;

use coupled_berry::phases::{composite_phase_constant_theta, degenerate_zero_g_subsystem_phase, solid_angle};
use coupled_berry::{Branch, LoopPath};
use num_complex::Complex64;

fn main() -> coupled_berry::Result<()> {
    for k in 1..=9 {
        let theta = k as f64 * PI / 20.0;
        let omega = solid_angle(&LoopPath::constant_polar(theta));
        let plus = composite_phase_constant_theta(theta, 0.0, Branch::Plus)?.unwrapped();
        println!("theta {:.3} pi: Omega {omega:.6}, gamma_ab(+) {plus:+.6}", theta / PI);
    }
    let omega = PI / 2.0;
    for mix in [0.0f64, 0.25, 0.5, 0.75] {
        let alpha = Complex64::new((1.0 - mix * mix).sqrt(), 0.0);
        let beta = Complex64::new(mix, 0.0);
        match degenerate_zero_g_subsystem_phase(alpha, beta, omega) {
            Ok((a, b)) => println!("singlet amplitude {mix}: gamma_a {a:+.6}, gamma_b {b:+.6}"),
            Err(e) => println!("singlet amplitude {mix}: {e}"),
        }
    }
    Ok(())
}
