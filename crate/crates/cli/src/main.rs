use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hybrid_chsh::catstates::{equal_amplitude_cascade, herald_cat, heralding_probability, split_cat};
use hybrid_chsh::chsh::{
    low_efficiency_witness, optimized, violation_threshold, FreeParam, OptimizerSettings, WitnessSearch,
};
use hybrid_chsh::verify::{format_report, run_all, VerifyConfig};
use hybrid_chsh::{ChannelSpec, ChshResult, LossConvention, Scenario, StateSpec};
use rayon::prelude::*;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const CSV_HEADER: &str = "t_line,eta_or_eta_a,s_max,alpha_opt,nu_opt,gamma_opt,b_opt,c1,c2,c3";
const FINE_STEP: f64 = 0.01;
const COARSE_STEP: f64 = 0.05;

#[derive(Parser, Debug)]
#[command(name = "hybrid-chsh", version, about = "CHSH violations for hybrid atom-field states under loss")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimized S over a grid of line transmission and a second efficiency axis, as CSV.
    Sweep(SweepArgs),
    /// Smallest transmission or atomic efficiency that still violates.
    Threshold(ThresholdArgs),
    /// Violating amplitudes for low photocounting efficiencies.
    Theorem1(Theorem1Args),
    /// Heralded cat state and its equal-amplitude splitting.
    Cat(CatArgs),
    /// Cross-check closed forms against the Fock-space oracle.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ScenarioArg {
    Photocount,
    TwoHomodyne,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ConventionArg {
    /// c3 = 2exp(-ηT|α|²/2) - 1
    Paper,
    /// c3 = 2exp(-ηT|α|²) - 1
    Born,
}

impl ConventionArg {
    fn convention(self) -> LossConvention {
        match self {
            ConventionArg::Paper => LossConvention::HalfExponent,
            ConventionArg::Born => LossConvention::BornRule,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FreeArg {
    TLine,
    EtaA,
}

#[derive(Args, Debug, Clone, Copy)]
struct Common {
    #[arg(long, value_enum, default_value = "photocount")]
    scenario: ScenarioArg,
    #[arg(long, value_enum, default_value = "born")]
    convention: ConventionArg,
    /// Upper end of the |α| search.
    #[arg(long, default_value_t = 12.0)]
    alpha_max: f64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn scenario(&self) -> Scenario {
        match self.scenario {
            ScenarioArg::Photocount => Scenario::photocount(self.convention.convention()),
            ScenarioArg::TwoHomodyne => Scenario::two_homodyne(),
        }
    }

    fn settings(&self) -> Result<OptimizerSettings, String> {
        OptimizerSettings::default()
            .with_alpha_max(self.alpha_max)
            .validate()
            .map_err(|e| format!("--alpha-max: {e}"))
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// MIN:MAX:STEP or a single value.
    #[arg(long)]
    t_line: Option<String>,
    /// Photocounting efficiency axis, MIN:MAX:STEP or a single value.
    #[arg(long)]
    eta: Option<String>,
    /// Atomic efficiency axis (two-homodyne only), MIN:MAX:STEP or a single value.
    #[arg(long)]
    eta_a: Option<String>,
    /// Default grids at step 0.05 instead of 0.01.
    #[arg(long)]
    coarse: bool,
    /// Output path (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "t-line")]
    free: FreeArg,
    #[arg(long, default_value_t = 1.0)]
    t_line: f64,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    eta_a: f64,
}

#[derive(Args, Debug)]
struct Theorem1Args {
    #[arg(long, value_enum, default_value = "born")]
    convention: ConventionArg,
    /// Comma-separated efficiencies.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 0.1, 0.01, 0.001])]
    eta: Vec<f64>,
    #[arg(long, default_value_t = 1000.0)]
    alpha_max: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CatArgs {
    /// Hybrid-state amplitude |α|; the cat amplitude is half of it.
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = FRAC_PI_4)]
    nu: f64,
    #[arg(long, default_value_t = 2)]
    modes: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long)]
    jobs: Option<usize>,
    /// Negate every tolerance so all checks fail (harness self-test).
    #[arg(long, hide = true)]
    corrupt_tolerance: bool,
}

/// `MIN:MAX:STEP` or a single value, inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Range {
    min: f64,
    max: f64,
    step: f64,
}

impl Range {
    fn single(v: f64) -> Self {
        Self {
            min: v,
            max: v,
            step: 1.0,
        }
    }

    fn parse(flag: &str, text: &str) -> Result<Self, String> {
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("{flag}: '{s}' is not a number"))
        };
        let parts: Vec<&str> = text.split(':').collect();
        let r = match parts.as_slice() {
            [v] => Self::single(num(v)?),
            [a, b, s] => Self {
                min: num(a)?,
                max: num(b)?,
                step: num(s)?,
            },
            _ => return Err(format!("{flag}: expected MIN:MAX:STEP or a single value (got '{text}')")),
        };
        if r.step.is_nan() || r.step <= 0.0 || r.step.is_infinite() {
            return Err(format!("{flag}: step must be positive (got {})", r.step));
        }
        if !(0.0..=1.0).contains(&r.min) || !(0.0..=1.0).contains(&r.max) {
            return Err(format!("{flag}: range must lie in [0,1] (got {text})"));
        }
        if r.min > r.max {
            return Err(format!("{flag}: MIN exceeds MAX (got {text})"));
        }
        Ok(r)
    }

    fn values(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| (self.min + i as f64 * self.step).min(self.max)).collect()
    }

    fn describe(&self) -> String {
        if self.min == self.max {
            fmt9(self.min)
        } else {
            format!("{}:{}:{}", fmt9(self.min), fmt9(self.max), fmt9(self.step))
        }
    }
}

/// Shortest round-trip form of `x` rounded to 9 significant digits.
fn fmt9(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x:?}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    // Avoid "-0.0".
    format!("{:?}", if rounded == 0.0 { 0.0 } else { rounded })
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err("--jobs must be at least 1".into());
        }
        builder = builder.num_threads(j);
    }
    builder.build().map_err(|e| format!("thread pool: {e}"))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| format!("stdout: {e}"))
        }
    }
}

fn csv_row(t_line: f64, second: Option<f64>, r: &ChshResult) -> String {
    let c = &r.coefficients;
    let second = second.map(fmt9).unwrap_or_default();
    [
        fmt9(t_line),
        second,
        fmt9(r.s_value),
        fmt9(r.alpha_opt),
        fmt9(r.nu_opt),
        fmt9(r.gamma_opt),
        fmt9(r.b_opt),
        fmt9(c.c1),
        fmt9(c.c2),
        fmt9(c.c3),
    ]
    .join(",")
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SecondAxis {
    Eta,
    EtaA,
    None,
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), String> {
    let common = args.common;
    let settings = common.settings()?;
    let scenario = common.scenario();
    let default_step = if args.coarse { COARSE_STEP } else { FINE_STEP };
    let default_range = Range {
        min: 0.0,
        max: 1.0,
        step: default_step,
    };
    let t_range = match &args.t_line {
        Some(s) => Range::parse("--t-line", s)?,
        None => default_range,
    };
    let (axis, second) = match common.scenario {
        ScenarioArg::Photocount => {
            if args.eta_a.is_some() {
                return Err("--eta-a applies to the two-homodyne scenario only".into());
            }
            let r = match &args.eta {
                Some(s) => Range::parse("--eta", s)?,
                None => default_range,
            };
            (SecondAxis::Eta, Some(r))
        }
        ScenarioArg::TwoHomodyne => {
            if args.eta.is_some() {
                return Err("--eta applies to the photocount scenario only".into());
            }
            match &args.eta_a {
                Some(s) => (SecondAxis::EtaA, Some(Range::parse("--eta-a", s)?)),
                None => (SecondAxis::None, None),
            }
        }
    };

    let mut points: Vec<(f64, Option<f64>)> = Vec::new();
    for t in t_range.values() {
        match &second {
            Some(r) => points.extend(r.values().into_iter().map(|v| (t, Some(v)))),
            None => points.push((t, None)),
        }
    }
    let rows: Vec<Result<String, String>> = pool(common.jobs)?.install(|| {
        points
            .par_iter()
            .map(|&(t, v)| {
                let ch = match axis {
                    SecondAxis::Eta => ChannelSpec::new(t, v.unwrap_or(1.0), 1.0),
                    SecondAxis::EtaA => ChannelSpec::new(t, 1.0, v.unwrap_or(1.0)),
                    SecondAxis::None => ChannelSpec::new(t, 1.0, 1.0),
                }
                .map_err(|e| e.to_string())?;
                let r = optimized(&ch, scenario, &settings).map_err(|e| format!("t_line={t}: {e}"))?;
                Ok(csv_row(t, v, &r))
            })
            .collect()
    });

    let mut text = String::new();
    let scenario_name = match common.scenario {
        ScenarioArg::Photocount => "photocount",
        ScenarioArg::TwoHomodyne => "two-homodyne",
    };
    let _ = writeln!(text, "# hybrid-chsh {VERSION} sweep");
    let _ = write!(
        text,
        "# scenario={scenario_name} alpha_max={} t_line={}",
        fmt9(common.alpha_max),
        t_range.describe()
    );
    match (axis, &second) {
        (SecondAxis::Eta, Some(r)) => {
            let conv = match common.convention {
                ConventionArg::Paper => "paper",
                ConventionArg::Born => "born",
            };
            let _ = write!(text, " convention={conv} eta={}", r.describe());
        }
        (SecondAxis::EtaA, Some(r)) => {
            let _ = write!(text, " eta_a={}", r.describe());
        }
        _ => {}
    }
    text.push('\n');
    text.push_str(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row?);
        text.push('\n');
    }
    emit(&args.out, &text)
}

fn cmd_threshold(args: &ThresholdArgs) -> Result<(), String> {
    let common = args.common;
    let settings = common.settings()?;
    let fixed = ChannelSpec::new(args.t_line, args.eta, args.eta_a).map_err(|e| e.to_string())?;
    let free = match args.free {
        FreeArg::TLine => FreeParam::TLine,
        FreeArg::EtaA => FreeParam::EtaA,
    };
    let th = pool(common.jobs)?
        .install(|| violation_threshold(common.scenario(), free, &fixed, &settings))
        .map_err(|e| e.to_string())?;
    println!(
        "{} {} bracket [{}, {}] s_lo={} s_hi={}",
        th.param.name(),
        fmt9(th.value),
        fmt9(th.lo),
        fmt9(th.hi),
        fmt9(th.s_lo),
        fmt9(th.s_hi)
    );
    Ok(())
}

fn cmd_theorem1(args: &Theorem1Args) -> Result<(), String> {
    let settings = OptimizerSettings::default();
    let mut text = String::new();
    let _ = writeln!(text, "eta,witness_alpha,witness_s,crossover_alpha");
    for &eta in &args.eta {
        let w = low_efficiency_witness(eta, args.alpha_max, args.convention.convention(), &settings)
            .map_err(|e| e.to_string())?;
        match w {
            WitnessSearch::Found(w) => {
                let cross = w.crossover.map(fmt9).unwrap_or_default();
                let _ = writeln!(text, "{},{},{},{cross}", fmt9(eta), fmt9(w.alpha), fmt9(w.s));
            }
            WitnessSearch::NotFound { predicted_alpha } => {
                return Err(format!(
                    "no violation for eta={eta} up to |alpha|={} (asymptotic crossover {})",
                    args.alpha_max,
                    predicted_alpha.map(fmt9).unwrap_or_else(|| "none".into())
                ));
            }
        }
    }
    emit(&args.out, &text)
}

fn cmd_cat(args: &CatArgs) -> Result<(), String> {
    let state = StateSpec::new(args.nu, args.alpha).map_err(|e| e.to_string())?;
    let cat = herald_cat(&state).map_err(|e| e.to_string())?;
    let p = heralding_probability(&state).map_err(|e| e.to_string())?;
    let cascade = equal_amplitude_cascade(args.modes).map_err(|e| e.to_string())?;
    let split = split_cat(&cat, &cascade);
    let list = |v: &[f64]| v.iter().map(|x| fmt9(*x)).collect::<Vec<_>>().join(",");
    let through: f64 = cascade.transmittivities().iter().product();
    let reflected: f64 = split.factors[..split.factors.len() - 1].iter().map(|f| f * f).sum();
    println!("cat_amplitude: {}", fmt9(cat.alpha.norm()));
    println!("norm: {}", fmt9(cat.norm));
    println!("heralding_probability: {}", fmt9(p));
    println!("transmittivities: {}", list(cascade.transmittivities()));
    println!("mode_factors: {}", list(&split.factors));
    let amps: Vec<f64> = split.plus.iter().map(|z| z.norm()).collect();
    println!("mode_amplitudes: {}", list(&amps));
    println!("energy_identity: {}", fmt9(reflected + through * through));
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), String> {
    let config = VerifyConfig {
        seed: args.seed,
        samples: args.samples,
        tolerance_scale: if args.corrupt_tolerance { -1.0 } else { 1.0 },
    };
    let reports = pool(args.jobs)?
        .install(|| run_all(&config))
        .map_err(|e| e.to_string())?;
    print!("{}", format_report(&config, &reports));
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(format!("verification failed: {}", failed.join(", ")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Theorem1(a) => cmd_theorem1(a),
        Command::Cat(a) => cmd_cat(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {}", msg.replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
