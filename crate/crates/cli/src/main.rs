//! `splitloci`: classes of splitting loci from the command line.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use splitloci::cache::{PushCache, CACHE_ENV};
use splitloci::document::{Format, FormulaDocument};
use splitloci::gysin::Gysin;
use splitloci::splitting::{
    class_of, degree_audit, general_class_with, normalize_twist, poset, rewrite_formula_twist, ClassOptions, Engine,
    SplittingType, WMode,
};
use splitloci::verify::{self, Suite};
use splitloci::Error;

#[derive(Parser)]
#[command(name = "splitloci", version, about = "Chern class formulas for splitting loci on P^1-bundles")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Class of the closure of a splitting locus.
    Class(ClassArgs),
    /// Expected codimension u(e).
    U {
        #[arg(short, long, allow_hyphen_values = true)]
        e: String,
    },
    /// Strata of given rank and degree up to a codimension, with covering relations.
    Poset {
        #[arg(short, long)]
        r: usize,
        #[arg(short, long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value_t = 5)]
        max_u: u32,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Run the built-in oracle checks.
    Verify {
        /// gysin, equivalence, sweep, flagship or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Degree bookkeeping of the Quot-scheme construction, without expansion.
    Audit {
        #[arg(short, long, allow_hyphen_values = true)]
        e: String,
    },
}

#[derive(Args)]
struct CacheArgs {
    /// Directory for Grassmannian pushforwards and fixed-point samples
    /// (default: $SPLITLOCI_CACHE).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Ignore $SPLITLOCI_CACHE.
    #[arg(long, conflicts_with = "cache")]
    no_cache: bool,
}

#[derive(Args)]
struct ClassArgs {
    /// Comma-separated splitting type, e.g. -2,0,2.
    #[arg(short, long, allow_hyphen_values = true)]
    e: String,
    /// trivial or general.
    #[arg(long, default_value = "trivial")]
    mode: String,
    /// text, latex or json.
    #[arg(long, default_value = "text")]
    format: String,
    /// Use the Quot-scheme construction even when the closed formula applies.
    #[arg(long)]
    force_general: bool,
    /// Express the result in pi_* E(M), pi_* E(M-1) of the bundle as entered.
    #[arg(long, allow_hyphen_values = true)]
    twist: Option<i64>,
    /// auto, schur or fixed-point.
    #[arg(long, default_value = "auto")]
    engine: String,
    /// Refuse to start when the engine's work estimate exceeds this.
    #[arg(long)]
    budget: Option<u128>,
    /// Seed of the fixed-point sample points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print timing and cache counters to stderr.
    #[arg(long)]
    stats: bool,
    #[command(flatten)]
    cache: CacheArgs,
}

/// Failure with the exit code it maps to.
struct Fail(u8, anyhow::Error);

impl From<anyhow::Error> for Fail {
    fn from(e: anyhow::Error) -> Self {
        let code = match e.downcast_ref::<Error>() {
            Some(Error::BudgetExceeded { .. }) => 3,
            Some(
                Error::DegreeMismatch { .. }
                | Error::NonIntegralCoefficient { .. }
                | Error::Numerical(_)
                | Error::ContextMismatch(..)
                | Error::MissingVariable(_),
            ) => 2,
            _ => 1,
        };
        Fail(code, e)
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn parse_type(s: &str) -> Result<SplittingType> {
    let entries = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().with_context(|| format!("{x:?} is not an integer")))
        .collect::<Result<Vec<_>>>()?;
    let (e, reordered) = SplittingType::sorted(entries)?;
    if reordered {
        eprintln!("warning: entries reordered to the nondecreasing type {e}");
    }
    Ok(e)
}

fn open_cache(args: &CacheArgs) -> Result<Option<Arc<PushCache>>> {
    if args.no_cache {
        return Ok(None);
    }
    let cache = match &args.cache {
        Some(dir) => Some(PushCache::open(dir).with_context(|| format!("opening cache {}", dir.display()))?),
        None => PushCache::from_env().with_context(|| format!("opening the cache named by {CACHE_ENV}"))?,
    };
    Ok(cache.map(Arc::new))
}

fn cmd_class(a: &ClassArgs) -> Result<(), Fail> {
    let t0 = Instant::now();
    let e = parse_type(&a.e)?;
    let mode: WMode = a.mode.parse()?;
    let format: Format = a.format.parse()?;
    let engine: Engine = a.engine.parse()?;
    let cache = open_cache(&a.cache)?;
    let opts = ClassOptions { engine, m: None, budget: a.budget, gysin: Gysin::new(cache.clone()), seed: a.seed };
    let (en, t) = normalize_twist(&e);
    let doc = if en.is_balanced() {
        FormulaDocument::unit(&e, t, mode)
    } else {
        let mut f = if a.force_general { general_class_with(&en, mode, &opts)? } else { class_of(&en, mode, &opts)? };
        if let Some(target) = a.twist {
            f = rewrite_formula_twist(&f, target - t)?;
        }
        FormulaDocument::new(&e, t, &f)?
    };
    if let Some(c) = &cache {
        c.flush().map_err(anyhow::Error::from)?;
    }
    print!("{}", doc.render(format));
    if a.stats {
        eprintln!("elapsed: {:.3?}", t0.elapsed());
        eprintln!("threads: {}", splitloci::par::threads());
        if let Some(c) = &cache {
            let s = c.stats();
            eprintln!(
                "cache: {} hits, {} misses, {} loaded, {} rejected files",
                s.hits, s.misses, s.loaded, s.rejected_files
            );
        }
    }
    Ok(())
}

fn cmd_poset(r: usize, d: i64, max_u: u32, format: &str) -> Result<(), Fail> {
    if r == 0 {
        return Err(Fail(1, anyhow::anyhow!("rank must be at least 1")));
    }
    let p = poset(r, d, max_u);
    match format {
        "json" => {
            let nodes: Vec<_> = p.nodes.iter().map(|(e, u)| json!({ "type": e.entries(), "u": u })).collect();
            let edges: Vec<_> = p.edges.iter().map(|&(hi, lo)| json!([hi, lo])).collect();
            let v = json!({ "rank": r, "degree": d, "max_u": max_u, "nodes": nodes, "edges": edges });
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
        "text" => {
            for (e, u) in &p.nodes {
                println!("u={u} {e}");
            }
            for &(hi, lo) in &p.edges {
                println!("{} -> {}", p.nodes[hi].0, p.nodes[lo].0);
            }
        }
        other => return Err(Fail(1, anyhow::anyhow!("unknown format {other:?}"))),
    }
    Ok(())
}

fn cmd_verify(suite: &str, cache: &CacheArgs) -> Result<(), Fail> {
    let suite: Suite = suite.parse()?;
    let opts = ClassOptions { gysin: Gysin::new(open_cache(cache)?), ..Default::default() };
    let checks = verify::run(suite, &opts);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.ok).count();
    println!("{} checks, {failed} failed", checks.len());
    if failed > 0 {
        return Err(Fail(2, anyhow::anyhow!("{failed} checks failed")));
    }
    Ok(())
}

fn cmd_audit(e: &str) -> Result<(), Fail> {
    let (en, t) = normalize_twist(&parse_type(e)?);
    let (integrand, fiber, u) = degree_audit(&en)?;
    if t != 0 {
        println!("normalized: {en} (shift {t})");
    }
    println!("integrand degree {integrand}, fiber dimension {fiber}, codimension {u}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Fail> {
    match &cli.cmd {
        Cmd::Class(a) => cmd_class(a),
        Cmd::U { e } => {
            println!("{}", parse_type(e)?.expected_codim());
            Ok(())
        }
        Cmd::Poset { r, d, max_u, format } => cmd_poset(*r, *d, *max_u, format),
        Cmd::Verify { suite, cache } => cmd_verify(suite, cache),
        Cmd::Audit { e } => cmd_audit(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(1);
    }
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match splitloci::par::with_threads(threads, || run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
