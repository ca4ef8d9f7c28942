//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI, TAU};
use std::process::Command;

use coupled_berry::model::{
    cubic_residual, instantaneous_eigenstate, schmidt_decompose, solve_shifted_eigenvalues,
    Branch, ModelParams,
};
use coupled_berry::oracles::{
    adiabatic_propagate, composite_from_schmidt, mixed_state_phase_numeric, propagate_singlet,
    schmidt_track, wilson_loop_phase,
};
use coupled_berry::phases::{
    circular_distance, composite_phase_constant_theta, degenerate_zero_g_subsystem_phase,
    scale_factor, schmidt_vector_phase, subsystem_phase_constant_theta, transition_path_phase,
    wrap_phase, LoopPath, DEFAULT_PANELS,
};
use coupled_berry::Error;
use nalgebra::Matrix3;
use num_complex::Complex64 as C;

const THETAS: [f64; 3] = [FRAC_PI_6, FRAC_PI_3, 9.0 * PI / 20.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Triplet block written out entry by entry, independent of the library.
fn reference_block(g: f64, theta: f64, phi: f64) -> Matrix3<C> {
    let (s, c) = theta.sin_cos();
    let t = C::from_polar(s / 2f64.sqrt(), phi);
    let z = C::new(0.0, 0.0);
    Matrix3::new(
        C::new(g - c, 0.0), t, z,
        t.conj(), C::new(-g, 0.0), t,
        z, t.conj(), C::new(g + c, 0.0),
    )
}

fn reference_spectrum(g: f64, theta: f64) -> [f64; 3] {
    let ev = reference_block(g, theta, 0.3).symmetric_eigen().eigenvalues;
    let mut v = [ev[0], ev[1], ev[2]];
    v.sort_by(f64::total_cmp);
    v
}

fn zero_coupling() -> Outcome {
    let (mut exact, mut wil, mut ode, mut drift) = (0f64, 0f64, 0f64, 0f64);
    for th in THETAS {
        let want = -TAU * (1.0 - th.cos());
        let path = LoopPath::constant_polar(th);
        let a = composite_phase_constant_theta(th, 0.0, Branch::Plus).unwrap().unwrapped();
        exact = exact.max((a - want).abs());
        let w = wilson_loop_phase(&path, 0.0, Branch::Plus, 4096).unwrap();
        wil = wil.max(circular_distance(w, want));
        match adiabatic_propagate(&path, 0.0, Branch::Plus, 2000.0, 2_000_000) {
            Ok(r) => {
                ode = ode.max(circular_distance(r.geometric_phase, want));
                drift = drift.max(r.populations_drift);
            }
            Err(e) => return outcome(false, format!("propagation at theta={th}: {e}")),
        }
    }
    outcome(
        exact <= 1e-12 && wil <= 1e-4 && ode <= 1e-2 && drift < 1e-3,
        format!("closed form {exact:.2e} (<=1e-12), Wilson {wil:.2e} (<=1e-4), ODE {ode:.2e} (<=1e-2), drift {drift:.2e} (<1e-3)"),
    )
}

fn cubic_and_eigenvectors() -> Outcome {
    let (mut res, mut eig, mut spec) = (0f64, 0f64, 0f64);
    for i in 1..20 {
        let th = 0.05 * PI * i as f64;
        for j in 0..=40 {
            let g = 0.25 * j as f64;
            let roots = match solve_shifted_eigenvalues(th, g) {
                Ok(r) => r.as_array(),
                Err(e) => return outcome(false, format!("theta={th} g={g}: {e}")),
            };
            let dense = reference_spectrum(g, th);
            let phi = 0.3;
            let h = reference_block(g, th, phi);
            for (k, b) in Branch::ALL.into_iter().enumerate() {
                res = res.max(cubic_residual(roots[k], th, g).abs());
                spec = spec.max((roots[k] + g - dense[k]).abs());
                let (sol, st) = instantaneous_eigenstate(&ModelParams::new(g, th, phi).unwrap(), b).unwrap();
                let v = nalgebra::Vector3::new(st.amps[0], st.amps[1], st.amps[2]);
                eig = eig.max((h * v - v * C::from(sol.energy)).norm());
            }
        }
    }
    outcome(
        res < 1e-10 && eig < 1e-10 && spec <= 1e-9,
        format!("cubic residual {res:.2e} (<1e-10), eigen residual {eig:.2e} (<1e-10), spectrum {spec:.2e} (<=1e-9) on 19x41 grid"),
    )
}

fn oracle_triangle() -> Outcome {
    let (mut aw, mut wo) = (0f64, 0f64);
    let mut skipped = Vec::new();
    let mut n = 0;
    for th in THETAS {
        for g in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
            for b in Branch::ALL {
                let path = LoopPath::constant_polar(th);
                let w = wilson_loop_phase(&path, g, b, 4096).unwrap();
                match composite_phase_constant_theta(th, g, b) {
                    Ok(a) => aw = aw.max(circular_distance(a.unwrapped(), w)),
                    Err(e) => skipped.push(format!("theta={th:.4} g={g} {b}: {}", e.code())),
                }
                let o = adiabatic_propagate(&path, g, b, 8000.0, 8_000_000).unwrap();
                wo = wo.max(circular_distance(w, o.geometric_phase));
                n += 1;
            }
        }
    }
    outcome(
        aw <= 1e-4 && wo <= 1e-2,
        format!("closed form vs Wilson {aw:.2e} (<=1e-4), Wilson vs ODE at T=8000 {wo:.2e} (<=1e-2), {n} points, skipped {skipped:?}"),
    )
}

fn strong_coupling() -> Outcome {
    let g = 100.0;
    let (mut ab, mut mixed, mut sch) = (0f64, 0f64, 0f64);
    for th in [FRAC_PI_6, FRAC_PI_3] {
        for b in Branch::ALL {
            ab = ab.max(composite_phase_constant_theta(th, g, b).unwrap().wrapped().abs());
            let ga = subsystem_phase_constant_theta(th, g, b).unwrap();
            mixed = mixed.max(wrap_phase(2.0 * ga).abs());
        }
        // the branches that end on |1;+1> and |1;-1>
        for m in [-1, 1] {
            let b = Branch::approaching_triplet(m, th).unwrap();
            sch = sch.max(wrap_phase(schmidt_vector_phase(th, g, b).unwrap().0).abs());
        }
    }
    let b0 = Branch::approaching_triplet(0, FRAC_PI_4).unwrap();
    let g2 = schmidt_vector_phase(FRAC_PI_4, g, b0).unwrap().1;
    let anomaly = (g2 - PI).abs();
    outcome(
        ab < 0.05 && mixed < 0.05 && sch < 0.05 && anomaly < 0.05,
        format!("|gamma_ab| {ab:.2e}, |gamma_a+gamma_b| {mixed:.2e}, |Gamma_1| {sch:.2e}, |Gamma_2 - pi| on the |1;0> branch {anomaly:.2e} (all <0.05)"),
    )
}

fn transition_path() -> Outcome {
    let path = LoopPath::sine_polar();
    let mut strong = Vec::new();
    for b in Branch::ALL {
        let q = transition_path_phase(&path, 50.0, b, DEFAULT_PANELS).unwrap();
        strong.push((b, wrap_phase(q.value).abs() / PI));
    }
    let quenched = strong.iter().all(|&(_, v)| v < 0.05);
    let mut dev = 0f64;
    for g in [0.0, 1.0, 2.0, 5.0] {
        for b in Branch::ALL {
            let q = transition_path_phase(&path, g, b, DEFAULT_PANELS).unwrap();
            let w = wilson_loop_phase(&path, g, b, 4096).unwrap();
            dev = dev.max(circular_distance(q.value, w));
        }
    }
    let listed: Vec<String> = strong.iter().map(|(b, v)| format!("{b} {v:.4}pi")).collect();
    outcome(
        quenched && dev <= 1e-3,
        format!("|gamma_ab(g=50)| = [{}] (each <0.05pi), line integral vs Wilson {dev:.2e} (<=1e-3)", listed.join(", ")),
    )
}

fn schmidt_sum() -> Outcome {
    let mut dev = 0f64;
    let mut notes = Vec::new();
    let mut per_path = [0usize; 2];
    let paths = [(LoopPath::constant_polar(FRAC_PI_4), 1.0), (LoopPath::sine_polar(), 2.0)];
    for (i, (path, g)) in paths.iter().enumerate() {
        for b in Branch::ALL {
            match schmidt_track(path, *g, b, 8192) {
                Ok(t) => {
                    let w = wilson_loop_phase(path, *g, b, 8192).unwrap();
                    dev = dev.max(circular_distance(composite_from_schmidt(&t), w));
                    per_path[i] += 1;
                }
                Err(Error::DegenerateSchmidt(_)) => notes.push(format!("{} g={g} {b}: Schmidt-degenerate point on loop", path.label())),
                Err(e) => return outcome(false, format!("{} {b}: {e}", path.label())),
            }
        }
    }
    outcome(
        dev <= 1e-3 && per_path.iter().all(|&n| n > 0),
        format!("max deviation {dev:.2e} (<=1e-3) over {} + {} branches; not evaluated: {notes:?}", per_path[0], per_path[1]),
    )
}

fn symmetry_and_structure() -> Outcome {
    let mut perm = 0f64;
    for th in THETAS {
        for g in [0.5, 1.0, 5.0] {
            for b in Branch::ALL {
                let t = schmidt_track(&LoopPath::constant_polar(th), g, b, 4096).unwrap();
                let (a, bb) = mixed_state_phase_numeric(&t).unwrap();
                perm = perm.max(circular_distance(a, bb));
            }
        }
    }
    let mut add0 = 0f64;
    for th in THETAS {
        for b in [Branch::Minus, Branch::Plus] {
            let ab = composite_phase_constant_theta(th, 0.0, b).unwrap().unwrapped();
            let a = subsystem_phase_constant_theta(th, 0.0, b).unwrap();
            add0 = add0.max(circular_distance(ab, 2.0 * a));
        }
    }
    // Judged on the plus branch; the minus branch quenches fast and sits
    // within a few 1e-3 of additivity throughout g ~ 1.
    let gaps: Vec<f64> = Branch::ALL
        .iter()
        .map(|&b| {
            let ab = composite_phase_constant_theta(FRAC_PI_3, 1.0, b).unwrap().unwrapped();
            let a = subsystem_phase_constant_theta(FRAC_PI_3, 1.0, b).unwrap();
            circular_distance(ab, 2.0 * a)
        })
        .collect();
    let margin = gaps[Branch::Plus.index()];
    let mut singlet = 0f64;
    for path in [LoopPath::constant_polar(FRAC_PI_3), LoopPath::sine_polar()] {
        singlet = singlet.max(propagate_singlet(&path, 1.0, 200.0, 200_000).unwrap().geometric_phase.abs());
    }
    outcome(
        perm <= 1e-6 && add0 <= 1e-9 && margin > 0.01 && singlet <= 1e-9,
        format!("|gamma_a - gamma_b| {perm:.2e} (<=1e-6), additivity at g=0 {add0:.2e} (<=1e-9), gap at (pi/3, 1) plus {margin:.3} (>0.01) [minus {:.4}, zero {:.3}], singlet {singlet:.2e} (<=1e-9)", gaps[0], gaps[1]),
    )
}

fn degenerate_contracts() -> Outcome {
    let p = ModelParams::new(0.0, FRAC_PI_3, 0.0).unwrap();
    let (_, st) = instantaneous_eigenstate(&p, Branch::Zero).unwrap();
    let h = FRAC_1_SQRT_2;
    let cases = [
        ("Schmidt form", matches!(schmidt_decompose(&st), Err(Error::DegenerateSchmidt(_)))),
        ("subsystem phase", matches!(subsystem_phase_constant_theta(FRAC_PI_3, 0.0, Branch::Zero), Err(Error::DegenerateSchmidt(_)))),
        ("Schmidt-vector phase", matches!(schmidt_vector_phase(FRAC_PI_3, 0.0, Branch::Zero), Err(Error::DegenerateSchmidt(_)))),
        ("Re(a*b)=0", degenerate_zero_g_subsystem_phase(C::new(h, 0.0), C::new(0.0, h), 1.0) == Err(Error::UndefinedPhase)),
        ("equatorial scale factor", matches!(scale_factor(PI / 2.0, 1.0, Branch::Zero), Err(Error::SingularScaleFactor(_)))),
    ];
    let bad: Vec<&str> = cases.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(bad.is_empty(), format!("{} contract cases, returned values instead of errors: {bad:?}", cases.len()))
}

fn run_twice(args: &[&str]) -> Result<bool, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_coupled-berry"))
            .args(args)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.exists() {
            return Err(format!("{args:?} wrote no CSV (exit {:?})", status.status.code()));
        }
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    Ok(outputs[0] == outputs[1])
}

fn determinism() -> Outcome {
    let specs: [&[&str]; 3] = [
        &["verify"],
        &["sweep-g", "--theta", "0.5235987755982988", "--g-range", "0:10:41", "--oracle", "wilson", "--points", "512"],
        &["transition-sweep", "--g-range", "0:5:6", "--oracle", "wilson", "--points", "512"],
    ];
    let mut notes = Vec::new();
    let mut pass = true;
    for s in specs {
        match run_twice(s) {
            Ok(same) => {
                pass &= same;
                notes.push(format!("{}: {}", s[0], if same { "identical" } else { "differs" }));
            }
            Err(e) => {
                pass = false;
                notes.push(e);
            }
        }
    }
    outcome(pass, notes.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("zero-coupling Berry formula", zero_coupling),
        ("cubic roots and eigenvectors", cubic_and_eigenvectors),
        ("oracle triangle", oracle_triangle),
        ("strong-coupling quenching", strong_coupling),
        ("pole-to-pole loop quenching and line integral", transition_path),
        ("Schmidt-pair sum equals the holonomy", schmidt_sum),
        ("symmetry and structure", symmetry_and_structure),
        ("degenerate-case contracts", degenerate_contracts),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {} {name}: {} {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
