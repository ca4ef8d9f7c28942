//! Composite and subsystem phases against coupling for a few polar angles,
//! printed as one table per angle.

use std::f64::consts::PI;

use coupled_berry::sweep::{run_sweep_g, GRange, Mode, SweepSpec};

fn main() -> coupled_berry::Result<()> {
    for (label, theta) in [("pi/6", PI / 6.0), ("pi/3", PI / 3.0), ("pi/30", PI / 30.0), ("9pi/20", 9.0 * PI / 20.0)] {
        let mut spec = SweepSpec::new(Mode::SweepG);
        spec.theta = Some(theta);
        spec.g = GRange { min: 0.0, max: 10.0, steps: 11 };
        println!("theta = {label}");
        println!("{:>5} {:>7} {:>12} {:>12}", "g", "branch", "gamma_ab/pi", "gamma_a/pi");
        for row in run_sweep_g(&spec)? {
            let show = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{:+.5}", v / PI));
            println!("{:>5} {:>7} {:>12} {:>12}", row.g, row.branch.as_str(), show(row.gamma_ab), show(row.gamma_a));
        }
        println!();
    }
    Ok(())
}
