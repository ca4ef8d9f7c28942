use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coupled_berry::sweep::{
    render_csv, run_point, run_sweep_g, run_transition_sweep, run_verify, Mode, SweepSpec,
};
use coupled_berry::Error;

/// Geometric phases of two coupled spins in a rotating field.
#[derive(Parser)]
#[command(name = "coupled-berry", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Phases of one (theta, g) point.
    Point(Opts),
    /// Constant-theta loop over a coupling grid.
    SweepG(Opts),
    /// Pole-to-pole loop theta = pi sin(pi s), phi = pi s over a coupling grid.
    TransitionSweep(Opts),
    /// Run the verification grid; exit 1 if any check fails.
    Verify(Opts),
}

#[derive(Args)]
struct Opts {
    /// Polar angle of the loop, radians.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Single coupling value.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "g_range")]
    g: Option<String>,
    /// Coupling grid as min:max:steps.
    #[arg(long)]
    g_range: Option<String>,
    /// minus, zero, plus, all, or a comma-separated list.
    #[arg(long)]
    branch: Option<String>,
    /// none, wilson, ode or all.
    #[arg(long)]
    oracle: Option<String>,
    /// Grid points of Wilson loops and Schmidt tracking.
    #[arg(long)]
    points: Option<String>,
    /// Loop period for Schrödinger propagation.
    #[arg(long)]
    period: Option<String>,
    /// RK4 steps per propagation.
    #[arg(long)]
    steps: Option<String>,
    /// Initial quadrature panels on transition loops.
    #[arg(long)]
    panels: Option<String>,
    /// Phase units: pi or rad.
    #[arg(long)]
    units: Option<String>,
    /// Tolerance multiplier for verify.
    #[arg(long)]
    tol_scale: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// key=value settings file; command-line flags take precedence.
    #[arg(long)]
    config: Option<String>,
}

fn build_spec(mode: Mode, o: &Opts) -> Result<SweepSpec, Error> {
    let mut spec = SweepSpec::new(mode);
    if let Some(path) = &o.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {path}: {e}")))?;
        spec.apply_config(&text)?;
    }
    let flags = [
        ("theta", &o.theta),
        ("g", &o.g),
        ("g-range", &o.g_range),
        ("branch", &o.branch),
        ("oracle", &o.oracle),
        ("points", &o.points),
        ("period", &o.period),
        ("steps", &o.steps),
        ("panels", &o.panels),
        ("units", &o.units),
        ("tol-scale", &o.tol_scale),
        ("out", &o.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            spec.set(key, v)?;
        }
    }
    spec.validate()?;
    Ok(spec)
}

fn emit(spec: &SweepSpec, text: &str) -> Result<(), Error> {
    match &spec.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let (mode, opts) = match &cli.command {
        Command::Point(o) => (Mode::Point, o),
        Command::SweepG(o) => (Mode::SweepG, o),
        Command::TransitionSweep(o) => (Mode::TransitionSweep, o),
        Command::Verify(o) => (Mode::Verify, o),
    };
    let spec = build_spec(mode, opts)?;
    let rows = match mode {
        Mode::Point => run_point(&spec)?,
        Mode::SweepG => run_sweep_g(&spec)?,
        Mode::TransitionSweep => run_transition_sweep(&spec)?,
        Mode::Verify => {
            let report = run_verify(&spec)?;
            print!("{}", report.render_text());
            if spec.out.is_some() {
                emit(&spec, &report.render_csv())?;
            }
            return Ok(if report.passed() { 0 } else { 1 });
        }
    };
    emit(&spec, &render_csv(&spec, &rows))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
