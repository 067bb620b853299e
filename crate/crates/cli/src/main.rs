//! `cwilf`: command-line access to occurrence statistics, cluster numbers,
//! generating functions, classification and the asymptotic bounds.
//!
//! Structured output is JSON with sorted keys and counts as decimal
//! strings; the `N_k` curve is CSV. Exit codes: 2 for unparseable input,
//! 3 for an exhausted resource budget, 1 for a failed verification or any
//! other error.

mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cwilf_core::asymptotics::{nk_sequence, nonoverlap_construct, sandwich_check, write_nk_csv};
use cwilf_core::equivalence::{classify_with, default_horizon, render_table, ClassifyOptions, Level};
use cwilf_core::gfseries::{cluster_gf_with, pattern_gf_with};
use cwilf_core::permcore::{is_nonoverlapping, occurrences, overlap_set, to_standard_form};
use cwilf_core::{ClusterEngine, CountCache, CountConfig, Permutation};
use serde_json::json;

#[derive(Parser)]
#[command(name = "cwilf", version, about = "Consecutive pattern enumeration via cluster posets")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, value_name = "J")]
    jobs: Option<usize>,

    /// Append-only JSON-lines cache of cluster counts.
    #[arg(long, global = true, env = "CWILF_CACHE", value_name = "FILE")]
    cache: Option<PathBuf>,

    /// Downset-state budget per cluster poset; larger requests exit with 3.
    #[arg(long, global = true, value_name = "STATES")]
    max_states: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Positions of consecutive occurrences of a pattern in a permutation.
    Occ {
        #[arg(long)]
        pattern: Permutation,
        #[arg(long)]
        perm: Permutation,
    },
    /// Overlap set, non-overlapping flag and standard form of a pattern.
    Overlap {
        #[arg(long)]
        pattern: Permutation,
    },
    /// A cluster number r_{n,k}, or a refined one r_{n,S} with --marks.
    Cluster {
        #[arg(long)]
        pattern: Permutation,
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "marks", required_unless_present = "marks")]
        k: Option<usize>,
        /// Comma-separated marked positions, e.g. 1,4,8.
        #[arg(long, value_delimiter = ',')]
        marks: Option<Vec<usize>>,
    },
    /// Truncated series of a_{n,k} (or r_{n,k} with --cluster), n <= nmax.
    Gf {
        #[arg(long)]
        pattern: Permutation,
        #[arg(long)]
        nmax: usize,
        #[arg(long)]
        cluster: bool,
    },
    /// Partition S_m into equivalence classes at one level.
    Classify {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "strong")]
        level: Level,
        /// Horizon N; defaults to 3(m-1)+1.
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Sandwich bounds for non-overlapping patterns.
    Asym(AsymArgs),
    /// Re-check the published worked examples.
    VerifyPaper {
        #[arg(long, value_enum, default_value = "fast")]
        tier: verify::Tier,
    },
}

#[derive(Args)]
struct AsymArgs {
    /// Non-overlapping pattern; emits the N_k curve as CSV.
    #[arg(long, conflicts_with_all = ["m", "a", "b"], required_unless_present = "m")]
    pattern: Option<Permutation>,
    #[arg(long, requires_all = ["a", "b"])]
    m: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long, default_value_t = 20)]
    kmax: usize,
    /// CSV destination; stdout when absent.
    #[arg(long, requires = "pattern")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<cwilf_core::Error>() {
        Some(e) if e.is_resource() => 3,
        Some(cwilf_core::Error::InvalidInput(_)) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!(cwilf_core::Error::InvalidInput("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let cache = match &cli.cache {
        Some(path) => Some(Arc::new(
            CountCache::open(path).with_context(|| format!("opening cache {}", path.display()))?,
        )),
        None => None,
    };
    let mut config = CountConfig::default();
    if let Some(states) = cli.max_states {
        config.max_states = states;
    }
    let engine = |p: &Permutation| ClusterEngine::with_config(p, config, cache.clone());
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());

    let code = match cli.command {
        Command::Occ { pattern, perm } => {
            print_json(&mut out, &json!({ "positions": occurrences(&pattern, &perm).positions }))?;
            ExitCode::SUCCESS
        }
        Command::Overlap { pattern } => {
            let overlaps = overlap_set(&pattern)?;
            let (standard, symmetry) = to_standard_form(&pattern)?;
            print_json(
                &mut out,
                &json!({
                    "indices": overlaps.indices(),
                    "nonoverlapping": is_nonoverlapping(&pattern)?,
                    "pattern": pattern,
                    "standard_form": standard,
                    "symmetry": symmetry,
                }),
            )?;
            ExitCode::SUCCESS
        }
        Command::Cluster { pattern, n, k, marks } => {
            let e = engine(&pattern);
            let count = match (k, marks) {
                (_, Some(marks)) => e.refined_cluster_number(n, &marks)?,
                (Some(k), None) => e.cluster_number(n, k)?,
                (None, None) => unreachable!("clap requires --k or --marks"),
            };
            writeln!(out, "{count}")?;
            ExitCode::SUCCESS
        }
        Command::Gf { pattern, nmax, cluster } => {
            let e = engine(&pattern);
            let series = if cluster { cluster_gf_with(&e, nmax)? } else { pattern_gf_with(&e, nmax)? };
            print_json(&mut out, &series.to_json())?;
            ExitCode::SUCCESS
        }
        Command::Classify { m, level, nmax, format } => {
            let horizon = nmax.unwrap_or_else(|| default_horizon(m));
            let opts = ClassifyOptions { config, cache: cache.clone(), ..ClassifyOptions::default() };
            let report = classify_with(m, level, horizon, &opts)?;
            match (format, level) {
                (Format::Json, _) => print_json(&mut out, &serde_json::to_value(&report)?)?,
                (Format::Table, Level::Cwilf) => write!(out, "{}", report.to_text())?,
                (Format::Table, Level::Strong) => {
                    let sup = classify_with(m, Level::Superstrong, horizon, &opts)?;
                    write!(out, "{}", render_table(&report, &sup))?
                }
                (Format::Table, Level::Superstrong) => {
                    let strong = classify_with(m, Level::Strong, horizon, &opts)?;
                    write!(out, "{}", render_table(&strong, &report))?
                }
            }
            ExitCode::SUCCESS
        }
        Command::Asym(args) => {
            asym(&mut out, args)?;
            ExitCode::SUCCESS
        }
        Command::VerifyPaper { tier } => {
            if verify::run(&mut out, tier)? {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    };
    out.flush()?;
    if let Some(cache) = cache {
        cache.flush()?;
    }
    Ok(code)
}

fn asym(out: &mut impl Write, args: AsymArgs) -> anyhow::Result<()> {
    if let Some(pattern) = args.pattern {
        let points = nk_sequence(&pattern, args.kmax)?;
        match args.out {
            Some(path) => {
                let mut file = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
                write_nk_csv(&mut file, &pattern, &points)?;
                file.flush()?;
            }
            None => write_nk_csv(out, &pattern, &points)?,
        }
        return Ok(());
    }
    let (Some(m), Some(a), Some(b)) = (args.m, args.a, args.b) else {
        bail!(cwilf_core::Error::InvalidInput("asym needs --pattern or all of --m, --a, --b".into()));
    };
    let triples = sandwich_check(m, a, b, args.kmax)?;
    // the explicit realization exists for every admissible triple except one
    let realization = nonoverlap_construct(m, a, b).ok();
    print_json(out, &json!({ "a": a, "b": b, "m": m, "realization": realization, "triples": triples }))?;
    Ok(())
}

/// Compact JSON; `serde_json::Map` keeps keys sorted.
fn print_json(out: &mut impl Write, value: &serde_json::Value) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
