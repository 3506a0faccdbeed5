use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qwswap::dsl::{builtin_protocol_source, CircuitSource, Severity};
use qwswap::hilbert::{single, Line, Polarization, SparseState};
use qwswap::protocol::{
    run_protocol_with_circuit, sample_shots, success_probability, ProtocolRun, SwapConfig, Verdict,
};
use qwswap::statistics::Regime;
use qwswap::verify::{builtin_source_check, run_checks};
use qwswap::walk::{position_distribution, run_single_walker, Circuit, CoinOperator};

#[derive(Debug, Parser)]
#[command(name = "qwswap", version, about = "Quantum-walk entanglement swapping simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the swapping protocol and report states, clicks and verdicts.
    Simulate {
        /// Amplitude of |HH> in each source pair; b = sqrt(1 - a^2).
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, value_enum, default_value_t = RegimeArg::Sync)]
        regime: RegimeArg,
        /// Circuit description file; the builtin protocol when omitted.
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Tabulate the success probability over a range of a.
    Sweep {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a_max: f64,
        #[arg(long, default_value_t = 11)]
        points: usize,
        /// Detector efficiency.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eta: f64,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
    /// Monte Carlo sampling of detector clicks.
    Sample {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eta: f64,
        /// Standard deviation of wave-plate angle errors, in radians.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        jitter_sigma: f64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Check the simulation against closed-form states and detection tables.
    Verify {
        /// Replace the last line-3 coin with the identity before checking.
        #[arg(long, hide = true)]
        corrupt_coin: bool,
    },
    /// Single-walker demo on one line.
    Walk {
        /// Half-wave plate angle in degrees.
        #[arg(long, default_value_t = 22.5, allow_negative_numbers = true)]
        coin_angle: f64,
        #[arg(long, default_value_t = 3, allow_negative_numbers = true)]
        steps: i64,
        #[arg(long, value_enum, default_value_t = PolArg::H)]
        initial_pol: PolArg,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegimeArg {
    Sync,
    Async,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Sync => Regime::Synchronized,
            RegimeArg::Async => Regime::Asynchronous,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolArg {
    H,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug)]
enum Failure {
    /// Invalid arguments (exit 2).
    Usage(String),
    /// Circuit file did not compile (exit 3).
    Parse(String),
    /// At least one verification check failed (exit 1).
    Verify,
    /// Simulation error after validation (exit 1).
    Runtime(String),
}

impl From<qwswap::Error> for Failure {
    fn from(e: qwswap::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2));
        }
    };
    let result = match cli.command {
        Command::Simulate { a, regime, circuit, format } => simulate(a, regime.into(), circuit, format),
        Command::Sweep { a_min, a_max, points, eta, format } => sweep(a_min, a_max, points, eta, format),
        Command::Sample { a, shots, seed, eta, jitter_sigma, format } => {
            sample(a, shots, seed, eta, jitter_sigma, format)
        }
        Command::Verify { corrupt_coin } => verify(corrupt_coin),
        Command::Walk { coin_angle, steps, initial_pol, format } => walk(coin_angle, steps, initial_pol, format),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Parse(msg)) => {
            eprint!("{msg}");
            ExitCode::from(3)
        }
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn check_unit(name: &str, x: f64) -> Result<(), Failure> {
    if x.is_finite() && (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{name} must lie in [0, 1], got {x}")))
    }
}

fn config_for(a: f64) -> Result<SwapConfig, Failure> {
    check_unit("a", a)?;
    SwapConfig::from_a(a).map_err(|e| Failure::Usage(e.to_string()))
}

fn load_circuit(path: Option<PathBuf>) -> Result<(String, Circuit), Failure> {
    let source = match path {
        None => builtin_protocol_source(),
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            CircuitSource::new(path.display().to_string(), text)
        }
    };
    match source.parse() {
        Ok(compiled) => {
            for w in &compiled.warnings {
                eprintln!("{}: {w}", source.name);
            }
            Ok((source.name, compiled.circuit))
        }
        Err(diagnostics) => {
            let mut msg = String::new();
            for d in &diagnostics {
                let _ = writeln!(msg, "{}: {d}", source.name);
            }
            let errors = diagnostics.iter().filter(|d| d.severity == Severity::Error).count();
            let _ = writeln!(msg, "{}: {errors} error(s), circuit not compiled", source.name);
            Err(Failure::Parse(msg))
        }
    }
}

#[derive(Serialize)]
struct Term {
    ket: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct BranchReport {
    branch: u8,
    weight: f64,
    remote_bell: String,
    final_state: Vec<Term>,
    clicks: Vec<(String, f64)>,
    verdicts: Vec<(String, f64)>,
}

#[derive(Serialize)]
struct OutcomeReport {
    verdict: String,
    probability: f64,
    concurrence: f64,
    bell_fidelity: f64,
}

#[derive(Serialize)]
struct SimulateReport {
    a: f64,
    b: f64,
    regime: String,
    circuit: String,
    success_probability: f64,
    branches: Vec<BranchReport>,
    outcomes: Vec<OutcomeReport>,
}

fn simulate_report(circuit_name: String, run: &ProtocolRun) -> SimulateReport {
    let branches = run
        .branches
        .iter()
        .map(|r| BranchReport {
            branch: r.branch.id.number(),
            weight: r.branch.coefficient * r.branch.coefficient,
            remote_bell: r.branch.remote_bell.to_string(),
            final_state: r
                .final_state()
                .iter()
                .map(|(k, z)| Term { ket: k.to_string(), re: z.re, im: z.im })
                .collect(),
            clicks: r.clicks.iter().map(|(p, x)| (p.to_string(), *x)).collect(),
            verdicts: r.verdicts.iter().map(|(v, x)| (v.to_string(), *x)).collect(),
        })
        .collect();
    let outcomes = run
        .outcomes()
        .into_iter()
        .map(|o| OutcomeReport {
            verdict: o.verdict.to_string(),
            probability: o.probability,
            concurrence: o.concurrence,
            bell_fidelity: o.bell_fidelity,
        })
        .collect();
    SimulateReport {
        a: run.a,
        b: run.b,
        regime: run.regime.to_string(),
        circuit: circuit_name,
        success_probability: run.success_probability(),
        branches,
        outcomes,
    }
}

fn simulate(a: f64, regime: Regime, circuit: Option<PathBuf>, format: ReportFormat) -> CliResult {
    let config = config_for(a)?.with_regime(regime);
    let (name, circuit) = load_circuit(circuit)?;
    let run = run_protocol_with_circuit(&config, &circuit)?;
    let report = simulate_report(name, &run);
    if format == ReportFormat::Json {
        return Ok(to_json(&report));
    }

    let mut out = String::new();
    let _ = writeln!(out, "a = {:.6}, b = {:.6}, regime = {}", report.a, report.b, report.regime);
    let _ = writeln!(out, "circuit: {}", report.circuit);
    for b in &report.branches {
        let _ = writeln!(out, "\nbranch {} (weight {:.6}, remote {})", b.branch, b.weight, b.remote_bell);
        for t in &b.final_state {
            let _ = writeln!(out, "  {:+.6}{:+.6}i  {}", t.re, t.im, t.ket);
        }
    }
    let _ = writeln!(out, "\ndetector clicks per branch");
    for b in &report.branches {
        let cells: Vec<String> = b.clicks.iter().map(|(p, x)| format!("{p}: {x:.6}")).collect();
        let verdict = b
            .verdicts
            .iter()
            .filter(|(_, x)| *x > 1e-12)
            .map(|(v, x)| format!("{v} {x:.6}"))
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "  branch {} | {} | {}", b.branch, cells.join("  "), verdict);
    }
    let _ = writeln!(out, "\nverdicts");
    for o in &report.outcomes {
        if o.verdict == Verdict::Inconclusive.to_string() || o.probability <= 0.0 {
            let _ = writeln!(out, "  {:<12} probability {:.6}", o.verdict, o.probability);
        } else {
            let _ = writeln!(
                out,
                "  {:<12} probability {:.6}  concurrence {:.12}  bell fidelity {:.12}",
                o.verdict, o.probability, o.concurrence, o.bell_fidelity
            );
        }
    }
    let _ = writeln!(out, "\nsuccess probability {:.6}", report.success_probability);
    if report.success_probability == 0.0 {
        let _ = writeln!(out, "note: the source pairs are product states, so no swap can be heralded");
    }
    Ok(out)
}

fn sweep(a_min: f64, a_max: f64, points: usize, eta: f64, format: TableFormat) -> CliResult {
    check_unit("a-min", a_min)?;
    check_unit("a-max", a_max)?;
    check_unit("eta", eta)?;
    if a_min >= a_max {
        return Err(Failure::Usage(format!("--a-min ({a_min}) must be below --a-max ({a_max})")));
    }
    if points < 2 {
        return Err(Failure::Usage(format!("--points must be at least 2, got {points}")));
    }
    let mut out = String::new();
    match format {
        TableFormat::Csv => out.push_str("a,p_success,p_success_eta\n"),
        TableFormat::Text => {
            let _ = writeln!(out, "{:>10}  {:>14}  {:>14}", "a", "p_success", "p_success_eta");
        }
    }
    for i in 0..points {
        let a = a_min + (a_max - a_min) * i as f64 / (points - 1) as f64;
        let b = (1.0 - a * a).max(0.0).sqrt();
        let p = success_probability(a, b);
        let _ = match format {
            TableFormat::Csv => writeln!(out, "{a:.6},{p:.12},{:.12}", p * eta * eta),
            TableFormat::Text => writeln!(out, "{a:>10.6}  {p:>14.12}  {:>14.12}", p * eta * eta),
        };
    }
    Ok(out)
}

#[derive(Serialize)]
struct SampleReport {
    a: f64,
    b: f64,
    shots: u64,
    seed: u64,
    eta: f64,
    jitter_sigma: f64,
    counts: Vec<(u8, String, u64)>,
    verdict_counts: Vec<(String, u64)>,
    successes: u64,
    success_fraction: f64,
    expected_success: f64,
    success_sigma: f64,
    misclassifications: u64,
    verdict_accuracy: Option<f64>,
}

fn sample(a: f64, shots: u64, seed: u64, eta: f64, sigma: f64, format: ReportFormat) -> CliResult {
    check_unit("eta", eta)?;
    if shots == 0 {
        return Err(Failure::Usage("--shots must be at least 1".into()));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Failure::Usage(format!("--jitter-sigma must be a non-negative number, got {sigma}")));
    }
    let config = config_for(a)?
        .with_shots(shots)
        .with_seed(seed)
        .with_detector_efficiency(eta)
        .with_jitter(sigma);
    let r = sample_shots(&config)?;
    let report = SampleReport {
        a: config.a,
        b: config.b,
        shots,
        seed,
        eta,
        jitter_sigma: sigma,
        counts: r.counts.iter().map(|((id, p), n)| (id.number(), p.to_string(), *n)).collect(),
        verdict_counts: r.verdict_counts.iter().map(|(v, n)| (v.to_string(), *n)).collect(),
        successes: r.successes,
        success_fraction: r.success_fraction,
        expected_success: r.expected_success,
        success_sigma: r.success_sigma(),
        misclassifications: r.misclassifications,
        verdict_accuracy: r.verdict_accuracy,
    };
    if format == ReportFormat::Json {
        return Ok(to_json(&report));
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        "a = {:.6}, b = {:.6}, shots = {}, seed = {}, eta = {}, jitter sigma = {} rad",
        report.a, report.b, shots, seed, eta, sigma
    );
    let _ = writeln!(out, "\ncounts per branch and click pattern");
    for (id, pattern, n) in &report.counts {
        let _ = writeln!(out, "  branch {id}  {pattern:<8} {n}");
    }
    let _ = writeln!(out, "\nverdicts");
    for (v, n) in &report.verdict_counts {
        let _ = writeln!(out, "  {v:<12} {n}");
    }
    let _ = writeln!(
        out,
        "\nsuccess fraction {:.6} (expected {:.6}, sigma {:.6})",
        report.success_fraction, report.expected_success, report.success_sigma
    );
    let _ = writeln!(out, "misclassifications {}", report.misclassifications);
    match report.verdict_accuracy {
        Some(acc) => {
            let _ = writeln!(out, "verdict accuracy {acc:.6}");
        }
        None => {
            let _ = writeln!(out, "verdict accuracy n/a (no conclusive verdicts)");
        }
    }
    Ok(out)
}

fn verify(corrupt_coin: bool) -> CliResult {
    let (_, mut circuit) = load_circuit(None)?;
    if corrupt_coin {
        if let Some(last) = circuit.steps.last_mut() {
            last.coin_line3 = CoinOperator::identity();
        }
    }
    let mut checks = vec![builtin_source_check()];
    checks.extend(run_checks(&circuit));
    let failed = checks.iter().filter(|c| !c.passed()).count();
    for c in &checks {
        println!("{c}");
    }
    println!("\n{} checks, {} passed, {} failed", checks.len(), checks.len() - failed, failed);
    if failed == 0 {
        Ok(String::new())
    } else {
        Err(Failure::Verify)
    }
}

fn walk(angle: f64, steps: i64, pol: PolArg, format: TableFormat) -> CliResult {
    if !angle.is_finite() {
        return Err(Failure::Usage(format!("--coin-angle must be finite, got {angle}")));
    }
    if steps < 0 {
        return Err(Failure::Usage(format!("--steps must be non-negative, got {steps}")));
    }
    let pol = match pol {
        PolArg::H => Polarization::H,
        PolArg::V => Polarization::V,
    };
    let start = SparseState::basis(single(pol, Line::Line2, 0));
    let end = run_single_walker(&start, &CoinOperator::half_wave_plate(angle), steps)?;
    let mut out = String::new();
    match format {
        TableFormat::Csv => out.push_str("position,probability\n"),
        TableFormat::Text => {
            let _ = writeln!(out, "{steps} steps, HWP at {angle} deg, start |{pol},0>");
        }
    }
    for (x, p) in position_distribution(&end) {
        let _ = match format {
            TableFormat::Csv => writeln!(out, "{x},{p:.12}"),
            TableFormat::Text => writeln!(out, "{x:>+5}  {p:.12}"),
        };
    }
    Ok(out)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
