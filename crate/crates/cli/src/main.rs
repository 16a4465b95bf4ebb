use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use tankstat::combinatorics::{check_identity_grid, IdentityGrid};
use tankstat::estimators::{gtp_estimate, gtp_um_estimate};
use tankstat::fixed_gap::{fixed_gap_estimate, fixed_gap_estimate_inverted, fixed_gap_estimate_k1};
use tankstat::mfp::mfp_estimate;
use tankstat::miss_probability::{
    p_miss_exact, p_miss_limit_exact, q_expectation, q_variance, regime_curve, FactorySize,
    GrowthRegime, MissQuery, RegimeMapping,
};
use tankstat::sim::{
    build_layout, enumerate_oracle, run_mse, FactoryLayout, SimulationConfig, Statistic,
    DEFAULT_BUDGET,
};
use tankstat::{BigRational, Estimate, Sample};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(
    name = "tankstat",
    version,
    about = "Serial-number estimation from captured samples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate production from observed serial numbers
    #[command(subcommand)]
    Estimate(EstimateCmd),
    /// Probabilities of a sample missing a factory
    #[command(subcommand)]
    Prob(ProbCmd),
    /// Run Monte Carlo MSE experiments from a JSON config and write CSV
    Simulate(SimulateArgs),
    /// Check the binomial identities exactly over a grid
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Exact mean and variance of a statistic over every sample of a layout
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SerialsArgs {
    /// Comma-separated serial numbers
    #[arg(
        long,
        value_delimiter = ',',
        required_unless_present = "serials_file",
        conflicts_with = "serials_file"
    )]
    serials: Vec<u64>,
    /// File with one serial number per line
    #[arg(long)]
    serials_file: Option<PathBuf>,
}

impl SerialsArgs {
    fn sample(&self) -> anyhow::Result<Sample> {
        match &self.serials_file {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("--serials-file: cannot read {}", path.display()))?;
                let serials = text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(|l| l.parse::<u64>().map_err(|e| anyhow!("{l:?}: {e}")))
                    .collect::<anyhow::Result<Vec<_>>>()
                    .context("--serials-file")?;
                Sample::new(serials).context("--serials-file")
            }
            None => Sample::new(self.serials.clone()).context("--serials"),
        }
    }
}

#[derive(Subcommand)]
enum EstimateCmd {
    /// Single factory, serials start at 1
    Gtp(SerialsArgs),
    /// Single factory, unknown first serial
    GtpUm(SerialsArgs),
    /// Several factories separated by unknown gaps
    Mfp {
        #[command(flatten)]
        serials: SerialsArgs,
        /// Number of factories l
        #[arg(long)]
        factories: usize,
        /// Do not assume the first factory starts at serial 1
        #[arg(long)]
        min_unknown: bool,
    },
    /// Equal factories separated by a known gap; estimates the factory size
    FixedGap {
        #[command(flatten)]
        serials: SerialsArgs,
        #[arg(long)]
        factories: u64,
        #[arg(long)]
        gap: u64,
        /// Solve the exact expected maximum for N instead of the approximation
        #[arg(long)]
        invert_exact: bool,
    },
}

#[derive(Subcommand)]
enum ProbCmd {
    /// Probability that k draws miss at least one of l factories of size N
    Miss {
        #[arg(long, required_unless_present = "limit")]
        factory_size: Option<u64>,
        #[arg(long)]
        factories: u64,
        #[arg(long)]
        samples: u64,
        /// Use the N -> infinity limit
        #[arg(long, conflicts_with = "factory_size")]
        limit: bool,
    },
    /// Miss probability along the regime l = floor(A k^c), written as CSV
    Curve(CurveArgs),
}

#[derive(Args)]
struct CurveArgs {
    /// Scale A
    #[arg(long = "A", value_name = "A")]
    scale: f64,
    /// Exponent c
    #[arg(long)]
    exponent: f64,
    #[arg(long, required_unless_present = "limit")]
    factory_size: Option<u64>,
    #[arg(long, conflicts_with = "factory_size")]
    limit: bool,
    /// Which count drives the curve
    #[arg(long, value_enum, default_value = "l-of-k")]
    mapping: Mapping,
    /// First and last point (sample counts for l-of-k, factory counts for k-of-l)
    #[arg(long)]
    k_min: u64,
    #[arg(long)]
    k_max: u64,
    #[arg(long, default_value_t = 1)]
    k_step: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mapping {
    LOfK,
    KOfL,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON config, or an array of configs
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Override the seed of every config
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Identities I-III and the hockey stick identity
    Identities {
        #[arg(long, default_value_t = 30)]
        max_n: u64,
        #[arg(long, default_value_t = 8)]
        max_ab: u64,
        #[arg(long, default_value_t = 12)]
        max_k: u64,
        #[arg(long, default_value_t = 60)]
        max_hockey: u64,
    },
}

#[derive(Args)]
struct OracleArgs {
    /// Inline JSON, a JSON file, or `SIZES[/GAPS[/START]]` such as `2,2/3`
    #[arg(long)]
    layout: String,
    #[arg(long)]
    k: u64,
    /// gtp, gtp-um, mfp, mfp-min-unknown, fixed-gap-k1, max, min, spread,
    /// miss-factory or empty-fraction
    #[arg(long)]
    statistic: String,
    /// Largest number of subsets to enumerate
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

/// Failure writing an output file, as opposed to bad input.
#[derive(Debug)]
struct OutputError;

impl std::fmt::Display for OutputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("output error")
    }
}

impl std::error::Error for OutputError {}

fn rational(r: &BigRational) -> Value {
    json!({
        "exact": r.to_string(),
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
        "decimal": r.to_f64(),
    })
}

fn estimate_json(est: &Estimate) -> anyhow::Result<Value> {
    let mut v = serde_json::to_value(est)?;
    v["schema"] = json!(SCHEMA);
    Ok(v)
}

fn estimate(cmd: EstimateCmd) -> anyhow::Result<Value> {
    let est = match cmd {
        EstimateCmd::Gtp(s) => gtp_estimate(&s.sample()?),
        EstimateCmd::GtpUm(s) => gtp_um_estimate(&s.sample()?).context("--serials")?,
        EstimateCmd::Mfp {
            serials,
            factories,
            min_unknown,
        } => mfp_estimate(&serials.sample()?, factories, !min_unknown).context("--factories")?,
        EstimateCmd::FixedGap {
            serials,
            factories,
            gap,
            invert_exact,
        } => {
            let sample = serials.sample()?;
            let (k, max) = (sample.len() as u64, sample.max());
            if invert_exact {
                fixed_gap_estimate_inverted(factories, gap, k, max)
            } else if k == 1 {
                Ok(fixed_gap_estimate_k1(factories, gap, max))
            } else {
                fixed_gap_estimate(factories, gap, k, max)
            }
            .context("--factories")?
        }
    };
    estimate_json(&est)
}

fn prob(cmd: ProbCmd) -> anyhow::Result<Value> {
    match cmd {
        ProbCmd::Miss {
            factory_size: Some(n),
            factories,
            samples,
            ..
        } => {
            let q = MissQuery::new(n, factories, samples).context("--samples")?;
            let mut v = rational(&p_miss_exact(&q));
            v["schema"] = json!(SCHEMA);
            v["factory_size"] = json!(n);
            v["factories"] = json!(factories);
            v["samples"] = json!(samples);
            Ok(v)
        }
        ProbCmd::Miss {
            factories, samples, ..
        } => {
            let p = p_miss_limit_exact(factories, samples).context("--factories")?;
            let mut v = rational(&p);
            v["schema"] = json!(SCHEMA);
            v["factory_size"] = json!("limit");
            v["factories"] = json!(factories);
            v["samples"] = json!(samples);
            v["empty_fraction_mean"] = json!(q_expectation(factories, samples)?);
            if factories >= 2 {
                v["empty_fraction_variance"] = json!(q_variance(factories, samples)?);
            }
            Ok(v)
        }
        ProbCmd::Curve(args) => curve(args),
    }
}

fn curve(args: CurveArgs) -> anyhow::Result<Value> {
    let regime = GrowthRegime::new(args.scale, args.exponent).context("--A/--exponent")?;
    if args.k_step == 0 || args.k_min > args.k_max {
        bail!("--k-min/--k-max/--k-step: need k-min <= k-max and a positive step");
    }
    let points: Vec<u64> = (args.k_min..=args.k_max)
        .step_by(args.k_step as usize)
        .collect();
    let size = match args.factory_size {
        Some(n) => FactorySize::Finite(n),
        None => FactorySize::Limit,
    };
    let mapping = match args.mapping {
        Mapping::LOfK => RegimeMapping::LOfK,
        Mapping::KOfL => RegimeMapping::KOfL,
    };
    let curve = regime_curve(regime, mapping, &points, size).context("--k-min/--k-max")?;
    write_csv(&args.out, &curve)?;
    Ok(json!({
        "schema": SCHEMA,
        "out": args.out,
        "rows": curve.len(),
    }))
}

fn write_csv<T: serde::Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let write = || -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    };
    write()
        .with_context(|| format!("--out: cannot write {}", path.display()))
        .context(OutputError)
}

fn simulate(args: SimulateArgs) -> anyhow::Result<Value> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("--config: cannot read {}", args.config.display()))?;
    let raw: Value = serde_json::from_str(&text).context("--config")?;
    let mut configs: Vec<SimulationConfig> = match raw {
        Value::Array(items) => items.into_iter().map(serde_json::from_value).collect(),
        single => serde_json::from_value(single).map(|c| vec![c]),
    }
    .context("--config")?;
    if let Some(seed) = args.seed {
        for c in &mut configs {
            c.seed = seed;
        }
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for c in &configs {
        let report = run_mse(c)?;
        summaries.push(json!({
            "config_id": report.config_id,
            "seed": report.seed,
            "target": report.target,
        }));
        rows.extend(report.rows);
    }
    write_csv(&args.out, &rows)?;
    Ok(json!({
        "schema": SCHEMA,
        "out": args.out,
        "rows": rows.len(),
        "configs": summaries,
    }))
}

fn verify(cmd: VerifyCmd) -> anyhow::Result<bool> {
    let VerifyCmd::Identities {
        max_n,
        max_ab,
        max_k,
        max_hockey,
    } = cmd;
    let report = check_identity_grid(IdentityGrid {
        max_n,
        max_ab,
        max_k,
        max_hockey,
    });
    for failure in &report.failures {
        eprintln!("{failure}");
    }
    println!(
        "identities: {} checked (I {}, II {}, III {}, hockey stick {}), {} failed",
        report.checked(),
        report.identity_i,
        report.identity_ii,
        report.identity_iii,
        report.hockey_stick,
        report.failures.len()
    );
    Ok(report.passed())
}

fn parse_layout(text: &str) -> anyhow::Result<FactoryLayout> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        return serde_json::from_str(trimmed).context("--layout");
    }
    let path = Path::new(trimmed);
    if path.is_file() {
        let body = fs::read_to_string(path)
            .with_context(|| format!("--layout: cannot read {}", path.display()))?;
        return serde_json::from_str(&body).context("--layout");
    }
    let list = |s: &str| -> anyhow::Result<Vec<u64>> {
        s.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse::<u64>().map_err(|e| anyhow!("{p:?}: {e}")))
            .collect()
    };
    let mut parts = trimmed.split('/');
    let sizes = list(parts.next().unwrap_or_default()).context("--layout sizes")?;
    let gaps = match parts.next() {
        Some(g) => list(g).context("--layout gaps")?,
        None => Vec::new(),
    };
    let start = match parts.next() {
        Some(s) => s.trim().parse().context("--layout start")?,
        None => 1,
    };
    if parts.next().is_some() {
        bail!("--layout: expected SIZES[/GAPS[/START]]");
    }
    build_layout(sizes, gaps, start).context("--layout")
}

fn oracle(args: OracleArgs) -> anyhow::Result<Value> {
    let layout = parse_layout(&args.layout)?;
    let statistic: Statistic = args.statistic.parse().context("--statistic")?;
    let result = enumerate_oracle(&layout, args.k, statistic, args.budget).context("--k")?;
    Ok(json!({
        "schema": SCHEMA,
        "statistic": statistic,
        "k": args.k,
        "subsets": result.subsets,
        "undefined": result.undefined,
        "mean": result.mean.as_ref().map(rational),
        "variance": result.variance.as_ref().map(rational),
    }))
}

fn print_json(v: &Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let v = match cli.command {
        Command::Estimate(cmd) => estimate(cmd)?,
        Command::Prob(cmd) => prob(cmd)?,
        Command::Simulate(args) => simulate(args)?,
        Command::Oracle(args) => oracle(args)?,
        Command::Verify(cmd) => {
            return Ok(if verify(cmd)? {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    };
    print_json(&v)?;
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.is::<OutputError>()) {
        return 1;
    }
    let budget_or_regime = err
        .chain()
        .filter_map(|e| e.downcast_ref::<tankstat::Error>())
        .any(tankstat::Error::is_budget_or_regime);
    if budget_or_regime {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
