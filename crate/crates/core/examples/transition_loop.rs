//! Composite phase on the pole-to-pole loop theta = pi sin(pi s),
//! phi = pi s, by line-integral quadrature and by a Wilson loop.

use std::f64::consts::PI;

use coupled_berry::oracles::wilson_loop_phase;
use coupled_berry::phases::{circular_distance, transition_path_phase, DEFAULT_PANELS};
use coupled_berry::{Branch, LoopPath};

fn main() -> coupled_berry::Result<()> {
    let path = LoopPath::sine_polar();
    for g in [0.0, 1.0, 2.0, 5.0, 20.0, 50.0] {
        for b in Branch::ALL {
            let q = transition_path_phase(&path, g, b, DEFAULT_PANELS)?;
            let w = wilson_loop_phase(&path, g, b, 4096)?;
            println!(
                "g {g:>4} {b:>5}: quadrature {:+.5} pi ({} panels), wilson {:+.5} pi, mod-2pi gap {:.1e}",
                q.value / PI,
                q.panels,
                w / PI,
                circular_distance(q.value, w)
            );
        }
    }
    Ok(())
}
