//! Subcommand implementations and the process entry point.
//!
//! Exit codes: 0 success (including completed checks whatever their verdict
//! prints), 1 configuration/usage error, 2 runtime error, 3 a `verify`
//! procedure ran to completion and FAILED.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Once;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::assumption::{
    estimate_delta, estimate_delta_i, estimate_g_grid, estimate_l, estimate_value_curve,
    EstimateWithCI, LambdaPoint,
};
use crate::bidders::AlgorithmKind;
use crate::cli::builtin::{builtin_scenario, ALL_LABELS, DEFAULT_SEED, SYNTHETIC_LABELS};
use crate::cli::config::{self, parse_distribution, ResolvedConfig};
use crate::coordination::MechanismSpec;
use crate::data_ingest::{load_price_pool, ColumnSelector};
use crate::distributions::{DistributionSpec, RandomStream};
use crate::error::{Error, Result};
use crate::reporting::{
    summarize_totals, write_long_csv, write_summary_json, write_trace_csv, SummaryDocument,
};
use crate::simulator::{run_once, run_paired, run_replications, RunTotals, ScenarioConfig};

#[derive(Parser, Debug)]
#[command(
    name = "coord-bid-sim",
    version,
    about = "Coordinated vs. independent auto-bidding in repeated second-price auctions"
)]
struct Cli {
    /// Worker threads for replications (default: COORD_BID_SIM_JOBS or all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario config: paired replications, trace + summary outputs.
    Simulate(SimulateArgs),
    /// Estimate Δ (and Δᵢ for non-i.i.d. specs) and print a verdict.
    Check(CheckArgs),
    /// Run one of the named verification procedures and print PASS/FAIL.
    Verify(VerifyArgs),
    /// Re-run a built-in benchmark row and print published-vs-measured cells.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the config's replication count.
    #[arg(long)]
    reps: Option<usize>,
    /// Override the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for outputs (default: current directory).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Export trajectories at every round instead of the subsampled grid.
    #[arg(long)]
    full_trajectories: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Value distribution; repeat N times for non-i.i.d. coalitions.
    #[arg(long = "F", required = true)]
    f: Vec<String>,
    /// Outside-bid distribution.
    #[arg(long = "D", required = true)]
    d: String,
    /// Coalition size (default: number of --F entries).
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Sweep coalition sizes, e.g. --sweep-n 2..8 (single --F only).
    #[arg(long = "sweep-n")]
    sweep_n: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of: gap, theorem1, gmono, convergence, value-ceiling.
    which: String,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "T")]
    t: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long = "F")]
    f: Option<String>,
    #[arg(long = "D")]
    d: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Monte-Carlo samples per probe for gmono's grid.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1_000_000)]
    oracle_samples: usize,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// A scenario label (fig-i1 .. fig-real-k5) or `all-synthetic`.
    row: String,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Winning-price dataset for the real-data rows.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Price column in --data (name or 0-based index).
    #[arg(long, default_value = "winning_price")]
    data_column: String,
    /// Field delimiter in --data (single char or `tab`).
    #[arg(long, default_value = ",")]
    data_delimiter: String,
    /// Whether --data has a header row.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    data_header: bool,
}

/// Process entry point.
pub fn main() -> ExitCode {
    let code = run(std::env::args().collect());
    ExitCode::from(code)
}

/// Testable entry point: returns the process exit code.
pub fn run(args: Vec<String>) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests print to stdout and exit 0; real usage
            // errors print to stderr and exit 1.
            let is_usage_error = e.use_stderr();
            let _ = e.print();
            return if is_usage_error { 1 } else { 0 };
        }
    };
    init_thread_pool(cli.jobs);
    let outcome = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Check(a) => cmd_check(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Precondition(_) | Error::Parse(_)
                | Error::MapRejected(_) => 1,
                Error::Io { .. } | Error::NoRootInBracket { .. } => 2,
            }
        }
    }
}

fn init_thread_pool(jobs: Option<usize>) {
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        let jobs = jobs.or_else(|| {
            std::env::var("COORD_BID_SIM_JOBS").ok().and_then(|v| v.parse().ok())
        });
        if let Some(j) = jobs {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
        }
    });
}

fn fmt_est(e: &EstimateWithCI) -> String {
    format!("{:+.6} ± {:.6}", e.mean, e.half_width_95)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(args: SimulateArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::io(args.config.display().to_string(), e))?;
    let mut file: config::ConfigFile = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", args.config.display())))?;
    if let Some(r) = args.reps {
        file.replications = r;
    }
    if let Some(s) = args.seed {
        file.base_seed = s;
    }
    let resolved =
        config::resolve_config(&file, args.config.parent().unwrap_or(Path::new(".")))?;
    run_simulation(&resolved, &args.out_dir, args.full_trajectories)
}

/// Shared simulate pipeline (also exercised directly by integration tests).
pub fn run_simulation(
    resolved: &ResolvedConfig,
    out_dir: &Path,
    full_trajectories: bool,
) -> Result<u8> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    let m = resolved.scenario.replications;
    let subsample = if full_trajectories { 1 } else { resolved.output.subsample };

    // Trace: first replication of every requested mechanism.
    let mut first_runs = Vec::new();
    for mech in &resolved.mechanisms {
        first_runs.push(run_once(&resolved.scenario.with_mechanism(mech.clone()), 1)?);
    }
    let trace_path =
        out_dir.join(resolved.output.trace.clone().unwrap_or_else(|| "trace.csv".into()));
    let meta = vec![
        format!("label={} base_seed={}", resolved.label, resolved.scenario.base_seed),
        format!("config={}", serde_json::to_string(&resolved.echo).expect("config serializes")),
    ];
    write_trace_csv(&trace_path, &first_runs.iter().collect::<Vec<_>>(), &meta)?;
    println!("wrote {}", trace_path.display());

    if m < 2 {
        eprintln!(
            "summary refused: confidence intervals need at least 2 replications (got {m}); \
             trace written"
        );
        return Ok(0);
    }

    let mut scenarios = Vec::new();
    let mut bands = Vec::new();
    let mut totals_by_tag: Vec<(String, Vec<RunTotals>)> = Vec::new();
    for mech in &resolved.mechanisms {
        let cfg = resolved.scenario.with_mechanism(mech.clone());
        let out = run_replications(&cfg, m, subsample)?;
        println!(
            "{:<24} utility/T {}   value/T {}",
            mech.tag(),
            fmt_est(&out.stats.total_utility),
            fmt_est(&out.stats.total_value)
        );
        scenarios.push(out.stats.clone());
        bands.push(out.bands.clone());
        totals_by_tag.push((mech.tag(), out.totals));
    }

    let find = |mech: &MechanismSpec| {
        totals_by_tag.iter().find(|(tag, _)| *tag == mech.tag()).map(|(_, t)| t.clone())
    };
    let table_row = match (find(&MechanismSpec::Independent), find(&MechanismSpec::HighestValue)) {
        (Some(ind), Some(coo)) => Some(summarize_totals(
            &resolved.label,
            &resolved.setting,
            resolved.scenario.n_bidders,
            resolved.scenario.horizon,
            &ind,
            &coo,
        )?),
        _ => None,
    };

    let doc = SummaryDocument {
        schema: crate::reporting::SCHEMA_LINE.trim_start_matches("# ").to_string(),
        label: resolved.label.clone(),
        setting: resolved.setting.clone(),
        config: resolved.echo.clone(),
        base_seed: resolved.scenario.base_seed,
        scenarios,
        table_row,
        pool_stats: resolved.pool_stats.clone(),
    };
    let summary_path =
        out_dir.join(resolved.output.summary.clone().unwrap_or_else(|| "summary.json".into()));
    write_summary_json(&summary_path, &doc)?;
    println!("wrote {}", summary_path.display());

    let long_path =
        out_dir.join(resolved.output.long.clone().unwrap_or_else(|| "long.csv".into()));
    write_long_csv(&long_path, &bands.iter().collect::<Vec<_>>())?;
    println!("wrote {}", long_path.display());
    Ok(0)
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

fn verdict(e: &EstimateWithCI) -> &'static str {
    if e.mean - e.half_width_95 > 0.0 {
        "HOLDS"
    } else if e.mean + e.half_width_95 < 0.0 {
        "FAILS"
    } else {
        "INCONCLUSIVE"
    }
}

fn cmd_check(args: CheckArgs) -> Result<u8> {
    let value_specs: Vec<DistributionSpec> =
        args.f.iter().map(|s| parse_distribution(s)).collect::<Result<_>>()?;
    let outside = parse_distribution(&args.d)?;

    if let Some(sweep) = &args.sweep_n {
        if value_specs.len() != 1 {
            return Err(Error::Config("--sweep-n needs a single --F".into()));
        }
        let (lo, hi) = sweep
            .split_once("..")
            .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
            .ok_or_else(|| Error::Config(format!("bad --sweep-n '{sweep}', expected lo..hi")))?;
        if lo < 2 || hi < lo {
            return Err(Error::Config("--sweep-n needs 2 <= lo <= hi".into()));
        }
        println!("Δ sweep over coalition size, F={} D={}", args.f[0], args.d);
        for n in lo..=hi {
            let mut stream = RandomStream::from_seed(args.seed ^ n as u64);
            let est = estimate_delta(&value_specs, &outside, n, args.samples, &mut stream)?;
            println!("  N={n:<3} Δ = {}  → {}", fmt_est(&est), verdict(&est));
        }
        return Ok(0);
    }

    let n = args.n.unwrap_or(value_specs.len());
    if n < 2 {
        return Err(Error::Precondition("check needs N >= 2".into()));
    }
    let mut stream = RandomStream::from_seed(args.seed);
    let delta = estimate_delta(&value_specs, &outside, n, args.samples, &mut stream)?;
    println!(
        "Δ over {} samples (N={n}, F={}, D={}): {}  → {}",
        args.samples,
        args.f.join(" | "),
        args.d,
        fmt_est(&delta),
        verdict(&delta)
    );

    if value_specs.len() > 1 {
        let mut all_hold = true;
        let mut any_fail = false;
        for i in 0..n {
            let mut s = RandomStream::from_seed(args.seed.wrapping_add(1 + i as u64));
            let di = estimate_delta_i(&value_specs, &outside, n, i, args.samples, &mut s)?;
            let v = verdict(&di);
            all_hold &= v == "HOLDS";
            any_fail |= v == "FAILS";
            println!("  Δ_{} = {}  → {}", i + 1, fmt_est(&di), v);
        }
        let overall = if all_hold {
            "HOLDS"
        } else if any_fail {
            "FAILS"
        } else {
            "INCONCLUSIVE"
        };
        println!("per-bidder margin condition: {overall}");
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct PerBidderGaps {
    /// `[bidder][run]` gaps, coordinated minus independent totals.
    gaps: Vec<Vec<f64>>,
}

impl PerBidderGaps {
    fn collect(cfg: &ScenarioConfig, reps: usize) -> Result<PerBidderGaps> {
        let per_run: Vec<(RunTotals, RunTotals)> = (1..=reps as u64)
            .into_par_iter()
            .map(|run| -> Result<(RunTotals, RunTotals)> {
                let (ind, coo) = run_paired(cfg, run)?;
                Ok((ind.totals(), coo.totals()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut gaps = vec![Vec::with_capacity(reps); cfg.n_bidders];
        for (ind, coo) in &per_run {
            for (i, bidder_gaps) in gaps.iter_mut().enumerate() {
                bidder_gaps.push(coo.per_bidder_utility[i] - ind.per_bidder_utility[i]);
            }
        }
        Ok(PerBidderGaps { gaps })
    }

    fn estimates(&self) -> Vec<EstimateWithCI> {
        self.gaps.iter().map(|g| EstimateWithCI::from_samples(g)).collect()
    }
}

fn se(e: &EstimateWithCI) -> f64 {
    e.half_width_95 / 1.96
}

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let f_spec = parse_distribution(args.f.as_deref().unwrap_or("uniform(0,1)"))?;
    let d_spec = parse_distribution(args.d.as_deref().unwrap_or("uniform(0,1)"))?;
    let pass = match args.which.as_str() {
        "gap" => verify_gap(&args, f_spec, d_spec)?,
        "theorem1" => verify_theorem1(&args, f_spec, d_spec)?,
        "gmono" => verify_gmono(&args, f_spec, d_spec)?,
        "convergence" => verify_convergence(&args, f_spec, d_spec)?,
        "value-ceiling" => verify_value_ceiling(&args, f_spec, d_spec)?,
        other => {
            return Err(Error::Config(format!(
                "unknown check '{other}' (expected gap, theorem1, gmono, convergence, value-ceiling)"
            )))
        }
    };
    println!("RESULT: {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { 3 })
}

/// Exact-gap identity for the trigger-overbidding adversary:
/// E[U_C − U_I] per bidder equals (T/N)·Δ + ((1 − N^{−T})/(N − 1))·L.
fn verify_gap(args: &VerifyArgs, f: DistributionSpec, d: DistributionSpec) -> Result<bool> {
    let n = args.n.unwrap_or(2);
    let t = args.t.unwrap_or(200);
    let reps = args.reps.unwrap_or(500);
    if n < 2 {
        return Err(Error::Precondition("gap check needs N >= 2".into()));
    }
    let cfg = config::scenario_from_parts(
        n,
        t,
        vec![f.clone()],
        d.clone(),
        None,
        AlgorithmKind::TriggerOverbid,
        reps,
        args.seed,
    )?;

    let mut s = RandomStream::from_seed(args.seed ^ 0xdead);
    let delta = estimate_delta(&cfg.value_specs, &d, n, args.oracle_samples, &mut s)?;
    let mut s = RandomStream::from_seed(args.seed ^ 0xbeef);
    let l = estimate_l(&cfg.value_specs, &d, n, args.oracle_samples, &mut s)?;
    let geom = (1.0 - (n as f64).powi(-(t.min(1000) as i32))) / (n as f64 - 1.0);
    let predicted = t as f64 / n as f64 * delta.mean + geom * l.mean;
    let se_pred =
        ((t as f64 / n as f64 * se(&delta)).powi(2) + (geom * se(&l)).powi(2)).sqrt();

    println!("exact-gap check: N={n} T={t} reps={reps} F={} D={}", f.describe(), d.describe());
    println!("  oracle: Δ = {}, L = {}", fmt_est(&delta), fmt_est(&l));
    println!("  predicted per-bidder gap: {predicted:+.6}");

    let gaps = PerBidderGaps::collect(&cfg, reps)?;
    let mut pass = true;
    for (i, est) in gaps.estimates().iter().enumerate() {
        let tol = 3.0 * (se(est).powi(2) + se_pred.powi(2)).sqrt();
        let ok = (est.mean - predicted).abs() <= tol;
        pass &= ok;
        println!(
            "  bidder {}: measured {:+.6} |diff| {:.6} tol(3se) {:.6}  {}",
            i + 1,
            est.mean,
            (est.mean - predicted).abs(),
            tol,
            if ok { "ok" } else { "VIOLATION" }
        );
    }
    Ok(pass)
}

/// Utility-gap lower bound: per-bidder E[U_C − U_I] ≥ TΔ/N for weakly
/// overbidding algorithms; checked for the truthful and mirror-descent
/// bidders.
fn verify_theorem1(args: &VerifyArgs, f: DistributionSpec, d: DistributionSpec) -> Result<bool> {
    let n = args.n.unwrap_or(4);
    let t = args.t.unwrap_or(1000);
    let reps = args.reps.unwrap_or(200);
    if n < 2 {
        return Err(Error::Precondition("theorem1 check needs N >= 2".into()));
    }
    let mut s = RandomStream::from_seed(args.seed ^ 0x7177);
    let delta = estimate_delta(std::slice::from_ref(&f), &d, n, args.oracle_samples, &mut s)?;
    let bound = t as f64 * delta.mean / n as f64;
    let se_bound = t as f64 * se(&delta) / n as f64;
    println!(
        "utility-gap lower bound: N={n} T={t} reps={reps} F={} D={}  Δ = {}",
        f.describe(),
        d.describe(),
        fmt_est(&delta)
    );
    println!("  per-bidder bound TΔ/N = {bound:+.4}");

    let mut pass = true;
    for algorithm in [AlgorithmKind::Truthful, AlgorithmKind::MdRos] {
        let cfg = config::scenario_from_parts(
            n,
            t,
            vec![f.clone()],
            d.clone(),
            None,
            algorithm,
            reps,
            args.seed,
        )?;
        let gaps = PerBidderGaps::collect(&cfg, reps)?;
        for (i, est) in gaps.estimates().iter().enumerate() {
            let tol = 3.0 * (se(est).powi(2) + se_bound.powi(2)).sqrt();
            let ok = est.mean >= bound - tol;
            pass &= ok;
            println!(
                "  {} bidder {}: gap {:+.4} >= {:+.4} - {:.4}  {}",
                algorithm.tag(),
                i + 1,
                est.mean,
                bound,
                tol,
                if ok { "ok" } else { "VIOLATION" }
            );
        }
    }
    Ok(pass)
}

/// Monotonicity of G(λ) on a common-random-numbers grid.
fn verify_gmono(args: &VerifyArgs, f: DistributionSpec, d: DistributionSpec) -> Result<bool> {
    let n = args.n.unwrap_or(4);
    let samples = args.samples;
    let lambdas: Vec<f64> =
        (0..20).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 19.0)).collect();
    let base = RandomStream::from_seed(args.seed);
    let ests = estimate_g_grid(std::slice::from_ref(&f), &d, n, &lambdas, samples, &base)?;
    println!(
        "G monotonicity: N={n} samples={samples} F={} D={} (shared draws)",
        f.describe(),
        d.describe()
    );
    let mut pass = true;
    for (k, (lambda, est)) in lambdas.iter().zip(&ests).enumerate() {
        let ok = k == 0 || est.mean >= ests[k - 1].mean;
        pass &= ok;
        println!(
            "  λ = {lambda:>10.4e}  G = {}  {}",
            fmt_est(est),
            if ok { "ok" } else { "DECREASE" }
        );
    }
    Ok(pass)
}

/// Coordinated multiplier convergence: the fraction of (bidder, replication)
/// pairs whose final λ exceeds exp(−Δ√T/(2N)) stays below the theoretical
/// failure probability plus slack.
fn verify_convergence(args: &VerifyArgs, f: DistributionSpec, d: DistributionSpec) -> Result<bool> {
    let n = args.n.unwrap_or(4);
    let t = args.t.unwrap_or(20000);
    let reps = args.reps.unwrap_or(100);
    let mut s = RandomStream::from_seed(args.seed ^ 0xc0);
    let delta = estimate_delta(std::slice::from_ref(&f), &d, n, args.oracle_samples, &mut s)?;
    if delta.mean <= 0.0 {
        return Err(Error::Precondition(
            "convergence check needs a configuration with Δ > 0".into(),
        ));
    }
    let threshold = (-delta.mean * (t as f64).sqrt() / (2.0 * n as f64)).exp();
    let allowed =
        (-delta.mean * delta.mean * t as f64 / (32.0 * (n * n) as f64)).exp() + 0.05;

    let cfg = config::scenario_from_parts(
        n,
        t,
        vec![f.clone()],
        d.clone(),
        None,
        AlgorithmKind::MdRos,
        reps,
        args.seed,
    )?
    .with_mechanism(MechanismSpec::HighestValue);

    let finals: Vec<Vec<f64>> = (1..=reps as u64)
        .into_par_iter()
        .map(|run| run_once(&cfg, run).map(|s| s.final_lambdas))
        .collect::<Result<Vec<_>>>()?;
    let total = (reps * n) as f64;
    let exceed = finals.iter().flatten().filter(|l| **l > threshold).count() as f64;
    let frac = exceed / total;
    println!("multiplier convergence: N={n} T={t} reps={reps} Δ = {}", fmt_est(&delta));
    println!(
        "  final λ > {threshold:.4e} in {frac:.4} of pairs; allowed {allowed:.4} \
         (theory failure bound + 0.05)"
    );
    Ok(frac <= allowed)
}

/// Value ceiling: every mechanism in the baseline family keeps time-average
/// coalition value at or below E[v₍N₎].
fn verify_value_ceiling(args: &VerifyArgs, f: DistributionSpec, d: DistributionSpec) -> Result<bool> {
    let n = args.n.unwrap_or(4);
    let t = args.t.unwrap_or(4000);
    let reps = args.reps.unwrap_or(20);
    let mut s = RandomStream::from_seed(args.seed ^ 0xcee1);
    let ceiling =
        estimate_value_curve(
            std::slice::from_ref(&f),
            &d,
            n,
            LambdaPoint::ZeroPlus,
            args.oracle_samples,
            &mut s,
        )?;
    println!(
        "value ceiling: N={n} T={t} reps={reps} E[v(N)] = {} F={} D={}",
        fmt_est(&ceiling),
        f.describe(),
        d.describe()
    );

    let family: Vec<(MechanismSpec, AlgorithmKind)> = vec![
        (MechanismSpec::Independent, AlgorithmKind::MdRos),
        (MechanismSpec::HighestValue, AlgorithmKind::MdRos),
        (MechanismSpec::HighestValue, AlgorithmKind::Truthful),
        (MechanismSpec::AllTruthful, AlgorithmKind::Truthful),
        (MechanismSpec::FixedMultiplierAll(0.25), AlgorithmKind::Truthful),
        (MechanismSpec::FixedMultiplierAll(1.0), AlgorithmKind::Truthful),
        (MechanismSpec::FixedMultiplierAll(4.0), AlgorithmKind::Truthful),
        (MechanismSpec::ScaleTopK { k: 1, lambda0: 1.0 }, AlgorithmKind::Truthful),
    ];

    let mut pass = true;
    for (mech, algorithm) in family {
        let cfg = config::scenario_from_parts(
            n,
            t,
            vec![f.clone()],
            d.clone(),
            None,
            algorithm,
            reps,
            args.seed,
        )?
        .with_mechanism(mech.clone());
        let values: Vec<f64> = (1..=reps as u64)
            .into_par_iter()
            .map(|run| run_once(&cfg, run).map(|s| s.totals().total_value / t as f64))
            .collect::<Result<Vec<_>>>()?;
        let est = EstimateWithCI::from_samples(&values);
        let tol = 3.0 * (se(&est).powi(2) + se(&ceiling).powi(2)).sqrt();
        let ok = est.mean <= ceiling.mean + tol;
        pass &= ok;
        println!(
            "  {:<28} value/T = {}  {}",
            format!("{} + {}", mech.tag(), cfg.algorithm.tag()),
            fmt_est(&est),
            if ok { "ok" } else { "ABOVE CEILING" }
        );
    }
    Ok(pass)
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

fn cmd_reproduce(args: ReproduceArgs) -> Result<u8> {
    let labels: Vec<&str> = if args.row == "all-synthetic" {
        SYNTHETIC_LABELS.to_vec()
    } else if ALL_LABELS.contains(&args.row.as_str()) {
        vec![ALL_LABELS.iter().find(|l| **l == args.row).unwrap()]
    } else {
        return Err(Error::Config(format!(
            "unknown row '{}' (labels: {}, or all-synthetic)",
            args.row,
            ALL_LABELS.join(", ")
        )));
    };

    let pool = match &args.data {
        Some(path) => {
            let column = match args.data_column.parse::<usize>() {
                Ok(i) => ColumnSelector::Index(i),
                Err(_) => ColumnSelector::Name(args.data_column.clone()),
            };
            let delim = match args.data_delimiter.as_str() {
                "tab" => '\t',
                s if s.chars().count() == 1 => s.chars().next().unwrap(),
                other => {
                    return Err(Error::Config(format!("bad --data-delimiter '{other}'")))
                }
            };
            Some(load_price_pool(path, &column, delim, args.data_header, None)?)
        }
        None => None,
    };

    for label in labels {
        let row = crate::cli::builtin::builtin_row(label)?;
        if row.real_data && pool.is_none() {
            println!(
                "{label}: SKIPPED (real-data row; supply the winning-price dataset with --data)"
            );
            continue;
        }
        let (cfg, row) = builtin_scenario(label, args.seed, pool.as_ref())?;
        let m = args.reps.unwrap_or(row.replications);
        let ind = run_replications(&cfg.with_mechanism(MechanismSpec::Independent), m, 0)?;
        let coo = run_replications(&cfg.with_mechanism(MechanismSpec::HighestValue), m, 0)?;
        let measured = [
            ind.stats.total_utility,
            coo.stats.total_utility,
            ind.stats.total_value,
            coo.stats.total_value,
        ];
        println!(
            "{label} ({}, N={}, T={}, M={m}):",
            row.setting, row.n_bidders, row.horizon
        );
        let names = ["utility (I)", "utility (C)", "value (I)", "value (C)"];
        for k in 0..4 {
            println!(
                "  {:<12} published {:+.3}  measured {:+.4} ± {:.4}  |diff| {:.4}",
                names[k],
                row.target_cells[k],
                measured[k].mean,
                measured[k].half_width_95,
                (measured[k].mean - row.target_cells[k]).abs()
            );
        }
    }
    Ok(0)
}
