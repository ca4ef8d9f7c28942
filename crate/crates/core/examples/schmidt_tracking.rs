//! Follows the Schmidt decomposition around a loop and rebuilds the
//! composite phase from the Schmidt pairs.

use std::f64::consts::{FRAC_PI_4, PI};

use coupled_berry::oracles::{composite_from_schmidt, mixed_state_phase_numeric, schmidt_track, wilson_loop_phase};
use coupled_berry::{Branch, LoopPath};

fn main() -> coupled_berry::Result<()> {
    for (path, g) in [(LoopPath::constant_polar(FRAC_PI_4), 1.0), (LoopPath::sine_polar(), 2.0)] {
        println!("{} at g = {g}", path.label());
        for b in Branch::ALL {
            let track = match schmidt_track(&path, g, b, 4096) {
                Ok(t) => t,
                Err(e) => {
                    println!("  {b:>5}: {e}");
                    continue;
                }
            };
            let sum = composite_from_schmidt(&track);
            let wilson = wilson_loop_phase(&path, g, b, 4096)?;
            print!(
                "  {b:>5}: p1 {:.4}..{:.4}, pair sum {:+.6} pi, wilson {:+.6} pi",
                track.p_start()[0],
                track.p_end()[0],
                sum / PI,
                wilson / PI
            );
            match mixed_state_phase_numeric(&track) {
                Ok((a, bb)) => println!(", gamma_a {:+.6} pi, gamma_b {:+.6} pi", a / PI, bb / PI),
                Err(_) => println!(", Schmidt weights vary along the loop"),
            }
        }
    }
    Ok(())
}
