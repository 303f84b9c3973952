use std::fmt;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use qtradeoff::experiment::{
    analytic_tradeoff, estimate_tradeoff, gamma_beta_from_setting, simulate_dataset, ExperimentConfig,
};
use qtradeoff::measures::{disturbance_estimate, measurement_error_estimate};
use qtradeoff::schemes::{
    cloner_marginal_channels, cloner_tradeoff_point, induced_povm, swap_marginal_channels,
    swap_tradeoff_point,
};
use qtradeoff::supopt::{bipartite_vector, pure_state_at};
use qtradeoff::verify::{run_verify_with, VerifyLevel};
use qtradeoff::{
    disturbance, make_diagonal_instrument, make_optimal_instrument, measurement_error, optimal_frontier,
    povm_of, ClonerParams, DiagonalFamilyParams, ExtremumEstimate, InstrumentDescriptor, MeasureKind,
    OptimalFamilyParams, SupremumStrategy, SwapParams, TradeoffPoint,
};

const SEED_VAR: &str = "QTRADEOFF_SEED";

#[derive(Parser)]
#[command(name = "qtradeoff", version, about = "Measurement error versus disturbance for qubit instruments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a scheme's parameter and write closed-form and numeric points as CSV.
    Sweep {
        #[arg(long, value_enum)]
        scheme: Scheme,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = "worst-case-trace-norm", value_parser = parse_kind)]
        kind: MeasureKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate one instrument given as JSON.
    Eval {
        #[arg(long)]
        instrument: PathBuf,
        #[arg(long, default_value = "worst-case-trace-norm", value_parser = parse_kind)]
        kind: MeasureKind,
    },
    /// Simulate the interferometer and estimate the tradeoff point.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the self-verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: Level,
        /// Shift the reference frontier, to confirm the suite notices.
        #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
        frontier_offset: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scheme {
    Optimal,
    Cloner,
    Swap,
    Diagonal,
}

impl Scheme {
    fn name(self) -> &'static str {
        match self {
            Scheme::Optimal => "optimal",
            Scheme::Cloner => "cloner",
            Scheme::Swap => "swap",
            Scheme::Diagonal => "diagonal",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Level {
    Quick,
    Full,
}

fn parse_kind(s: &str) -> Result<MeasureKind, String> {
    s.parse().map_err(|e: qtradeoff::Error| e.to_string())
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Verification(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Verification(m) => f.write_str(m),
        }
    }
}

impl From<qtradeoff::Error> for CliError {
    fn from(e: qtradeoff::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn input_err(context: impl fmt::Display) -> impl FnOnce(std::io::Error) -> CliError {
    move |e| CliError::Input(format!("{context}: {e}"))
}

fn strategy() -> CliResult<SupremumStrategy> {
    let mut s = SupremumStrategy::default();
    if let Some(seed) = seed_override()? {
        s.seed = seed;
    }
    Ok(s)
}

fn seed_override() -> CliResult<Option<u64>> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Input(format!("{SEED_VAR} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn log_setup(kind: Option<MeasureKind>, s: &SupremumStrategy) {
    match kind {
        Some(k) => info!("measure kind: {k}"),
        None => info!("measure kind: {}", MeasureKind::WorstCaseTraceNorm),
    }
    info!(
        "strategy: grid {} points, {} refine iterations per parameter, tolerance {:e}, {} multistarts, seed {}",
        s.coarse_grid_points, s.refine_iterations, s.tolerance, s.multistarts, s.seed
    );
}

/// Reads JSON, reporting schema errors with the path of the offending field.
fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let file = File::open(path).map_err(input_err(path.display()))?;
    let mut de = serde_json::Deserializer::from_reader(BufReader::new(file));
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        CliError::Input(format!("{}: at `{field}`: {}", path.display(), e.inner()))
    })
}

fn from_value<T: DeserializeOwned>(v: Value, path: &Path) -> CliResult<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let field = e.path().to_string();
        CliError::Input(format!("{}: at `{field}`: {}", path.display(), e.inner()))
    })
}

/// Dispatches on `family` first so that field errors keep their path.
fn read_instrument(path: &Path) -> CliResult<InstrumentDescriptor> {
    let mut v: Value = read_json(path)?;
    let family_err = |msg: &str| CliError::Input(format!("{}: at `family`: {msg}", path.display()));
    let obj = v
        .as_object_mut()
        .ok_or_else(|| CliError::Input(format!("{}: expected a JSON object", path.display())))?;
    let family = match obj.remove("family") {
        Some(Value::String(f)) => f,
        Some(_) => return Err(family_err("expected a string")),
        None => return Err(family_err("missing field")),
    };
    Ok(match family.as_str() {
        "optimal" => InstrumentDescriptor::Optimal(from_value(v, path)?),
        "diagonal" => InstrumentDescriptor::Diagonal(from_value(v, path)?),
        "raw" => InstrumentDescriptor::Raw(from_value(v, path)?),
        other => return Err(family_err(&format!("unknown family `{other}`, expected optimal, diagonal or raw"))),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(input_err(path.display()))
}

/// Fixed-point or scientific rendering with exactly 12 significant digits.
fn sig12(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.11}", 0.0);
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        format!("{x:.*}", (11 - exp) as usize)
    } else {
        sci
    }
}

struct SweepRow {
    param: f64,
    closed: Option<TradeoffPoint>,
    numeric: (f64, f64),
}

fn closed_form_applies(kind: MeasureKind) -> bool {
    matches!(kind, MeasureKind::WorstCaseTraceNorm | MeasureKind::WorstCaseHilbertSchmidt)
}

fn sweep_row(scheme: Scheme, u: f64, kind: MeasureKind, s: &SupremumStrategy) -> CliResult<SweepRow> {
    let (param, closed, numeric) = match scheme {
        Scheme::Optimal => {
            let p = OptimalFamilyParams::with_gamma(u)?;
            let ins = make_optimal_instrument(p)?;
            let closed = TradeoffPoint::new(
                0.5 * (1.0 - u),
                optimal_frontier(0.5 * (1.0 - u)),
                "optimal",
                [("gamma".to_string(), u)].into(),
            );
            let numeric = (measurement_error(&povm_of(&ins), s), disturbance(&ins, kind, s));
            (u, closed, numeric)
        }
        Scheme::Diagonal => {
            let b = u;
            let p = DiagonalFamilyParams::new(b, b, 0.0, 0.0)?;
            let ins = make_diagonal_instrument(p)?;
            let closed = qtradeoff::measures::diagonal_tradeoff_closed_form(p)?;
            let numeric = (measurement_error(&povm_of(&ins), s), disturbance(&ins, kind, s));
            (b, closed, numeric)
        }
        Scheme::Cloner => {
            let p = ClonerParams::from_a2(u)?;
            let (kept, measured) = cloner_marginal_channels(p);
            let numeric = (measurement_error(&induced_povm(&measured)?, s), disturbance(&kept, kind, s));
            (u, cloner_tradeoff_point(p), numeric)
        }
        Scheme::Swap => {
            let t = u * std::f64::consts::FRAC_PI_2;
            let p = SwapParams::new(t)?;
            let (kept, measured) = swap_marginal_channels(p);
            let numeric = (measurement_error(&induced_povm(&measured)?, s), disturbance(&kept, kind, s));
            (t, swap_tradeoff_point(p), numeric)
        }
    };
    Ok(SweepRow {
        param,
        closed: closed_form_applies(kind).then_some(closed),
        numeric,
    })
}

fn cmd_sweep(scheme: Scheme, steps: usize, kind: MeasureKind, out: &Path) -> CliResult {
    if steps < 2 {
        return Err(CliError::Input(format!("--steps must be at least 2, got {steps}")));
    }
    let s = strategy()?;
    log_setup(Some(kind), &s);
    info!("sweeping {} over {steps} points", scheme.name());
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        rows.push(sweep_row(scheme, i as f64 / (steps - 1) as f64, kind, &s)?);
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(out)
        .map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    let csv_err = |e: csv::Error| CliError::Input(format!("{}: {e}", out.display()));
    w.write_record(["scheme", "param", "delta_closed", "Delta_closed", "delta_numeric", "Delta_numeric", "kind"])
        .map_err(csv_err)?;
    for r in &rows {
        let (dc, ddc) = match &r.closed {
            Some(p) => (sig12(p.measurement_error), sig12(p.disturbance)),
            None => (String::new(), String::new()),
        };
        w.write_record([
            scheme.name().to_string(),
            sig12(r.param),
            dc,
            ddc,
            sig12(r.numeric.0),
            sig12(r.numeric.1),
            kind.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(input_err(out.display()))?;
    info!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn argmax_state(est: &ExtremumEstimate) -> Value {
    match est.argmax.len() {
        2 => json!({ "bloch": pure_state_at(est.argmax[0], est.argmax[1]).bloch().as_array() }),
        6 => {
            let v = bipartite_vector(&est.argmax);
            json!({ "bipartite": v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>() })
        }
        _ => Value::Null,
    }
}

fn cmd_eval(path: &Path, kind: MeasureKind) -> CliResult {
    let s = strategy()?;
    log_setup(Some(kind), &s);
    let descriptor = read_instrument(path)?;
    let ins = descriptor.build()?;
    let d = measurement_error_estimate(&povm_of(&ins), &s);
    let dd = disturbance_estimate(&ins, kind, &s);
    let out = json!({
        "delta": d.value,
        "Delta": dd.value,
        "kind": kind,
        "argmax_states": { "delta": argmax_state(&d), "Delta": argmax_state(&dd) },
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    Ok(())
}

fn cmd_experiment(config: &Path, out: &Path) -> CliResult {
    let mut cfg: ExperimentConfig = read_json(config)?;
    if let Some(seed) = seed_override()? {
        info!("{SEED_VAR} overrides config seed {} with {seed}", cfg.seed);
        cfg.seed = seed;
    }
    cfg.validate()?;
    let s = SupremumStrategy::default();
    log_setup(Some(MeasureKind::WorstCaseTraceNorm), &s);
    info!("estimator: maxima over probe angles with parabolic refinement, target fit {:?}", cfg.target_fit);
    let setting = cfg.setting();
    let (gamma, beta) = gamma_beta_from_setting(&setting);
    let analytic = analytic_tradeoff(&setting)?;
    let dataset = simulate_dataset(&cfg)?;
    let estimate = estimate_tradeoff(&dataset)?;
    fs::create_dir_all(out).map_err(input_err(out.display()))?;
    write_json(&out.join("dataset.json"), &dataset)?;
    let summary = json!({
        "gamma": gamma,
        "beta": beta,
        "analytic": { "delta": analytic.measurement_error, "Delta": analytic.disturbance },
        "estimate": estimate,
    });
    write_json(&out.join("estimate.json"), &summary)?;
    println!("gamma = {gamma:.6}, beta = {beta:.6}");
    println!(
        "analytic  delta = {:.6}, Delta = {:.6}",
        analytic.measurement_error, analytic.disturbance
    );
    println!(
        "estimated delta = {:.6}, Delta = {:.6}",
        estimate.delta_hat, estimate.disturbance_hat
    );
    Ok(())
}

fn cmd_verify(level: Level, offset: f64) -> CliResult {
    let s = SupremumStrategy::default();
    log_setup(None, &s);
    let level = match level {
        Level::Quick => VerifyLevel::Quick,
        Level::Full => VerifyLevel::Full,
    };
    if offset != 0.0 {
        info!("reference frontier shifted by {offset:e}");
    }
    let frontier = move |d: f64| optimal_frontier(d) + offset;
    let report = run_verify_with(level, &frontier);
    for c in &report.checks {
        println!(
            "{} {}: worst {:.3e} (tolerance {:.0e}), {:.2}s; {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tolerance,
            c.seconds,
            c.detail
        );
    }
    if report.all_passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(CliError::Verification(format!("failed: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep { scheme, steps, kind, out } => cmd_sweep(*scheme, *steps, *kind, out),
        Command::Eval { instrument, kind } => cmd_eval(instrument, *kind),
        Command::Experiment { config, out } => cmd_experiment(config, out),
        Command::Verify { level, frontier_offset } => cmd_verify(*level, *frontier_offset),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Input(_) => ExitCode::from(2),
                CliError::Verification(_) => ExitCode::from(3),
            }
        }
    }
}
