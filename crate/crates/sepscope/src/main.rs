//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 a validated property was violated, 2 usage or
//! parse error, 3 numerical or I/O failure.

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use sepscope::json;
use sepscope::state_spec::{parse_state, BuiltState};
use sepscope::sweep::{compute_sweep, write_csv, SweepSpec};
use sepscope::validate::{run_chain_campaign, ChainCampaignSpec};
use sepscope::{fmt12, round_sig12};
use sepscope_core::bounds::{family_trace, rm_bound, BoundError, BoundVariant, SpectrumPath};
use sepscope_core::measures::rm_pure;
use sepscope_core::partitions::{
    complete_group, nonempty_subsets, orbit_reduce, set_partitions, v4, SitePermutation, SiteSet,
};
use sepscope_core::roof::RoofError;
use sepscope_core::tensor::TensorError;
use serde_json::json;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "sepscope",
    version,
    about = "Multipartite entanglement measures and computable lower bounds for qudit registers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ThreadsArg {
    /// Worker threads; falls back to SEPSCOPE_THREADS, then to the
    /// available parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact R_m of a pure state, with per-partition detail.
    RmPure {
        /// State spec, e.g. ghz:4, w:4, product:0000.
        state: String,
        /// Number of partition blocks.
        #[arg(long)]
        m: usize,
    },
    /// Computable lower bound of R_m for any state of the mini-language.
    RmBound {
        state: String,
        #[arg(long)]
        m: usize,
        /// Aggregation variant: literal, quadrature or max.
        #[arg(long, default_value = "quadrature")]
        variant: String,
        /// Orbit reduction: none, v4, or file:<perms.json>.
        #[arg(long, default_value = "none")]
        symmetry: String,
        /// Dump per-witness (λ₁, Σλ) rows as CSV to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        threads: ThreadsArg,
    },
    /// Noise sweep over the four-qubit mixture family, written as CSV.
    Sweep {
        /// Lattice points per axis (applies to both p1 and p2).
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Comma-separated block counts out of 2,3,4.
        #[arg(long, default_value = "2,3,4")]
        m: String,
        #[arg(long, default_value = "quadrature")]
        variant: String,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        threads: ThreadsArg,
    },
    /// List the partitions of n sites into m blocks, optionally orbit-reduced.
    Partitions {
        n: usize,
        m: usize,
        #[arg(long, default_value = "none")]
        symmetry: String,
    },
    /// Run a validation campaign (currently: chain).
    Validate {
        campaign: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random decompositions per convex-roof estimate.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value = "quadrature")]
        variant: String,
        /// Random two-qubit mixed states in the campaign.
        #[arg(long, default_value_t = 50)]
        states2: usize,
        /// Random three-qubit mixed states in the campaign.
        #[arg(long, default_value_t = 25)]
        states3: usize,
        #[command(flatten)]
        threads: ThreadsArg,
    },
    /// Build a state from the mini-language and dump it as JSON.
    State {
        state: String,
        /// Emit components as exact decimal strings instead of rounded numbers.
        #[arg(long)]
        exact: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// Maps failures onto the documented exit codes.
fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(bound) = cause.downcast_ref::<BoundError>() {
            return match bound {
                BoundError::SymmetryViolation { .. } => 1,
                BoundError::InvalidRange { .. } | BoundError::FullSetError => 2,
                _ => 3,
            };
        }
        if let Some(roof) = cause.downcast_ref::<RoofError>() {
            return match roof {
                RoofError::ChainViolation { .. } => 1,
                RoofError::NoTrials | RoofError::SizeTooSmall { .. } => 2,
                _ => 3,
            };
        }
        if cause.downcast_ref::<sepscope::state_spec::ParseError>().is_some() {
            return 2;
        }
        if let Some(t) = cause.downcast_ref::<TensorError>() {
            return match t {
                TensorError::InvalidShape { .. } | TensorError::SiteOutOfRange { .. } => 2,
                _ => 3,
            };
        }
        if cause.downcast_ref::<sepscope_core::partitions::PartitionError>().is_some()
            || cause.downcast_ref::<sepscope_core::measures::MeasureError>().is_some()
        {
            return 2;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 3;
        }
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
    }
    3
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::RmPure { state, m } => {
            let psi = match parse_state(&state)? {
                BuiltState::Pure(psi) => psi,
                BuiltState::Mixed(_) => {
                    return Err(usage(format!(
                        "{state:?} builds a mixed state; rm-pure needs a pure one (use rm-bound)"
                    )))
                }
            };
            let report = rm_pure(&psi, m)?;
            println!("{}", serde_json::to_string_pretty(&json::rm_pure_report_json(&report))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::RmBound {
            state,
            m,
            variant,
            symmetry,
            trace,
            threads,
        } => {
            let rho = parse_state(&state)?.into_density();
            let variant = parse_variant(&variant)?;
            let group = parse_symmetry(&symmetry, rho.shape().n())?;
            let pool = build_pool(threads.threads)?;
            let report = pool.install(|| rm_bound(&rho, m, variant, group.as_deref()))?;
            if let Some(path) = trace {
                write_trace(&rho, &path)?;
            }
            println!("{}", serde_json::to_string_pretty(&json::bound_report_json(&report))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            steps,
            m,
            variant,
            out,
            threads,
        } => {
            let ms = parse_m_list(&m)?;
            let spec = SweepSpec::new(steps, steps, ms, parse_variant(&variant)?)?;
            let pool = build_pool(threads.threads)?;
            let grid = pool.install(|| compute_sweep(&spec))?;
            let mut file = BufWriter::new(File::create(&out)?);
            write_csv(&grid, &mut file)?;
            file.flush()?;
            eprintln!("wrote {} rows to {}", grid.rows.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Partitions { n, m, symmetry } => {
            let parts = set_partitions(n, m)?;
            let value = match parse_symmetry(&symmetry, n)? {
                None => json!({
                    "n": n, "m": m,
                    "count": parts.len(),
                    "partitions": parts.iter().map(json::partition_json).collect::<Vec<_>>(),
                }),
                Some(group) => {
                    let table = orbit_reduce(&parts, &group)?;
                    json!({
                        "n": n, "m": m,
                        "count": parts.len(),
                        "orbits": json::orbit_table_json(&table),
                    })
                }
            };
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            campaign,
            seed,
            trials,
            variant,
            states2,
            states3,
            threads,
        } => {
            if campaign != "chain" {
                return Err(usage(format!("unknown campaign {campaign:?} (expected: chain)")));
            }
            let mut spec = ChainCampaignSpec::new(seed, trials, parse_variant(&variant)?);
            spec.two_qubit_states = states2;
            spec.three_qubit_states = states3;
            let pool = build_pool(threads.threads)?;
            let outcome = pool.install(|| run_chain_campaign(&spec))?;
            let value = json!({
                "campaign": "chain",
                "seed": seed,
                "trials": trials,
                "variant": spec.variant.as_str(),
                "states": outcome.states.iter().map(|s| json!({
                    "n": s.n,
                    "index": s.state_index,
                    "gammas": s.reports.iter().map(json::chain_report_json).collect::<Vec<_>>(),
                    "violations": s.violations,
                })).collect::<Vec<_>>(),
                "violation_count": outcome.violation_count,
                "min_margin": round_sig12(outcome.min_margin),
                "pass": outcome.violation_count == 0,
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
            if outcome.violation_count > 0 {
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::State { state, exact } => {
            let value = match parse_state(&state)? {
                BuiltState::Pure(psi) => json::pure_state_json(&psi, exact),
                BuiltState::Mixed(rho) => json::density_json(&rho, exact),
            };
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_variant(s: &str) -> Result<BoundVariant> {
    BoundVariant::from_str(s).map_err(|e| usage(format!("bad --variant {s:?}: {e}")))
}

fn parse_m_list(s: &str) -> Result<Vec<usize>> {
    let mut ms: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| usage(format!("bad m value {p:?}"))))
        .collect::<Result<_>>()?;
    ms.sort_unstable();
    ms.dedup();
    Ok(ms)
}

fn parse_symmetry(s: &str, n: usize) -> Result<Option<Vec<SitePermutation>>> {
    match s {
        "none" => Ok(None),
        "v4" => {
            if n != 4 {
                return Err(usage("--symmetry v4 applies to four-site states only"));
            }
            Ok(Some(v4()))
        }
        other => match other.strip_prefix("file:") {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let value: serde_json::Value = serde_json::from_str(&text)?;
                let perms = json::permutations_from_json(&value)?;
                if perms.iter().any(|p| p.n() != n) {
                    return Err(usage("permutation length does not match the state"));
                }
                Ok(Some(complete_group(&perms)?))
            }
            None => Err(usage(format!(
                "bad --symmetry {other:?} (expected none, v4 or file:<path>)"
            ))),
        },
    }
}

fn build_pool(flag: Option<usize>) -> Result<rayon::ThreadPool> {
    let threads = flag
        .or_else(|| {
            std::env::var("SEPSCOPE_THREADS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| anyhow!("thread pool: {e}"))
}

/// Per-witness (λ₁, Σλ) rows over every flip family the bound pipeline
/// uses for this state.
fn write_trace(rho: &sepscope_core::tensor::DensityMatrix, path: &PathBuf) -> Result<()> {
    let n = rho.shape().n();
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "gamma,delta,assignment,label,lambda1,lambda_sum")?;
    let all = SiteSet::full(n);
    for gamma in nonempty_subsets(&all) {
        if gamma.len() >= n {
            continue;
        }
        for delta in nonempty_subsets(&gamma.complement(n)) {
            for spec in family_trace(rho, &gamma, &delta, SpectrumPath::Reduced)? {
                let join = |s: &SiteSet| {
                    s.members()
                        .iter()
                        .map(|m| m.to_string())
                        .collect::<Vec<_>>()
                        .join("+")
                };
                let assignment = spec
                    .assignment
                    .entries()
                    .iter()
                    .map(|(s, k, l)| format!("{s}:{k}-{l}"))
                    .collect::<Vec<_>>()
                    .join("+");
                writeln!(
                    file,
                    "{},{},{},{},{},{}",
                    join(&gamma),
                    join(&delta),
                    assignment,
                    spec.label,
                    fmt12(spec.lambdas.first().copied().unwrap_or(0.0)),
                    fmt12(spec.lambda_sum()),
                )?;
            }
        }
    }
    file.flush()?;
    Ok(())
}
