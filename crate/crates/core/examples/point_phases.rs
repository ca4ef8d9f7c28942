//! Closed-form phases of every branch at one (theta, g) point.
//!
//! cargo run --example point_phases -- 1.047 1.0

use coupled_berry::phases::nontransition_phases;
use coupled_berry::Branch;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("number"));
    let theta = args.next().unwrap_or(std::f64::consts::FRAC_PI_3);
    let g = args.next().unwrap_or(1.0);
    println!("theta = {theta:.4}, g = {g}");
    for b in Branch::ALL {
        match nontransition_phases(theta, g, b) {
            Ok(p) => {
                let pi = std::f64::consts::PI;
                let ab = p.gamma_ab.unwrap().unwrapped() / pi;
                let a = p.gamma_a.unwrap().unwrapped() / pi;
                let [g1, g2] = p.schmidt_a.unwrap().map(|x| x.unwrapped() / pi);
                println!("{b:>5}: gamma_ab {ab:+.6} pi, gamma_a = gamma_b {a:+.6} pi, Gamma {g1:+.6} / {g2:+.6} pi");
            }
            Err(e) => println!("{b:>5}: {e}"),
        }
    }
}
