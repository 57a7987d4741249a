//! Command line front end for the exact multiindex engine and the lattice
//! laboratory. Every subcommand reads JSON inputs, works in exact rational
//! arithmetic (the simulator excepted), and writes byte-deterministic output.
//! Exit codes separate the failure classes: 0 all good, 1 a verified property
//! failed or an internal law broke, 2 malformed input, 3 non-generic
//! parameters.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde_json::Value;

use mirs_core::appell::{appell_from_moments, hermite};
use mirs_core::enumerate::{classify_degree_two, enumerate_populated};
use mirs_core::error::{Error, Result};
use mirs_core::hierarchy::{dependency_graph, enumerate_counterterms, expand_pi_minus};
use mirs_core::json::{
    depgraph_to_json, dpispec_from_json, moments_from_json, multiindex_from_json,
    params_from_json, piminus_to_json, pispec_from_json,
};
use mirs_core::multiindex::{bracket, homogeneity, is_populated, order, Multiindex};
use mirs_core::params::StructureParams;
use mirs_core::ratio::{format_rational, parse_rational};
use mirs_core::recenter::{DGammaEngine, GammaEngine};
use mirs_sim::config::SimConfig;
use mirs_sim::report::{report_to_json, run_lab};

use mirs::suites;

/// Fixed seed for the randomized check suites; `MIRS_SEED` overrides it.
const CHECK_SEED: u64 = 0x6d697273;

#[derive(Parser)]
#[command(
    name = "mirs",
    version,
    about = "Exact multiindex calculus, recentering, and a lattice laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum IndexKind {
    /// Homogeneity as a linear form in the two exponents
    Homog,
    /// Order: homogeneity shifted by the half dimension per fertility step
    Order,
    /// Integer fertility bracket
    Bracket,
    /// Whether the index can carry a nonzero model entry
    Populated,
}

#[derive(Copy, Clone, ValueEnum)]
enum ExprFormat {
    /// Human-readable one-line expansion
    Text,
    /// Structured term list
    JsonAst,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one grading of a multiindex
    Index {
        #[arg(value_enum)]
        which: IndexKind,
        /// Multiindex JSON file
        #[arg(long)]
        beta: PathBuf,
        /// Parameter JSON file; the standard parameters when omitted
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// List every populated index up to an order cutoff
    Enumerate {
        /// Order cutoff, as an integer or a fraction p/q
        #[arg(long = "max-order")]
        max_order: String,
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// List the indices of homogeneity two up to an order cutoff
    ClassifyTwo {
        #[arg(long = "max-order")]
        max_order: String,
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Evaluate one recentering entry, optionally with its derivative entry
    Gamma {
        /// Recentering spec JSON file
        #[arg(long = "pi-spec")]
        pi_spec: PathBuf,
        /// Target index JSON file
        #[arg(long)]
        beta: PathBuf,
        /// Source index JSON file
        #[arg(long)]
        gamma: PathBuf,
        /// Derivative spec JSON file; adds the derivative entry
        #[arg(long)]
        dgamma: Option<PathBuf>,
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Expand the forcing line of one index
    PiMinus {
        #[arg(long)]
        beta: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: ExprFormat,
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// List every counterterm slot reachable below an order cutoff
    Counterterms {
        #[arg(long = "max-order")]
        max_order: String,
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Print the dependency graph of one index
    Deps {
        #[arg(long)]
        beta: PathBuf,
        /// Graphviz output instead of JSON
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Build one adapted polynomial from a moment sequence
    Appell {
        /// Moment sequence JSON file
        #[arg(long)]
        moments: PathBuf,
        /// Polynomial degree
        #[arg(long)]
        k: u32,
        /// Gaussian variance for the comparison family
        #[arg(long)]
        sigma2: Option<String>,
        /// Compare against the Gaussian family at --sigma2
        #[arg(long = "check-hermite")]
        check_hermite: bool,
    },
    /// Run the lattice laboratory and write a JSON report
    Simulate {
        /// Lattice configuration JSON file
        #[arg(long)]
        config: PathBuf,
        /// Report output path
        #[arg(long)]
        out: PathBuf,
        /// Ensemble size
        #[arg(long, default_value_t = 32)]
        fields: usize,
    },
    /// Re-verify the structural laws and print one row per property
    Check {
        #[arg(long = "max-order", default_value = "6")]
        max_order: String,
        /// Append the Monte-Carlo suite
        #[arg(long = "with-sim")]
        with_sim: bool,
        /// Worker threads for the parallel suites
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Validation(_) => 2,
                Error::NonGenericParameters(_) => 3,
                Error::InternalInconsistency(_) => 1,
            };
            std::process::exit(code);
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::validation(format!("{}: not valid JSON: {e}", path.display())))
}

fn load_params(path: &Option<PathBuf>) -> Result<StructureParams> {
    match path {
        None => Ok(StructureParams::standard()),
        Some(p) => params_from_json(&read_json(p)?),
    }
}

fn load_multiindex(path: &Path, params: &StructureParams) -> Result<Multiindex> {
    multiindex_from_json(&read_json(path)?, params)
}

fn seed_override(fallback: u64) -> Result<u64> {
    match std::env::var("MIRS_SEED") {
        Err(_) => Ok(fallback),
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| Error::validation("MIRS_SEED must be an unsigned integer")),
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Index {
            which,
            beta,
            params,
        } => {
            let params = load_params(&params)?;
            let beta = load_multiindex(&beta, &params)?;
            match which {
                IndexKind::Homog => {
                    let form = homogeneity(&beta, &params);
                    println!("{form} = {}", format_rational(&form.eval(&params)));
                }
                IndexKind::Order => {
                    let form = order(&beta, &params);
                    println!("{form} = {}", format_rational(&form.eval(&params)));
                }
                IndexKind::Bracket => println!("{}", bracket(&beta)),
                IndexKind::Populated => println!("{}", is_populated(&beta, &params)),
            }
            Ok(0)
        }
        Command::Enumerate { max_order, params } => {
            let params = load_params(&params)?;
            let cutoff = parse_rational(&max_order)?;
            for beta in enumerate_populated(&params, &cutoff)? {
                print_indexed(&beta, &params);
            }
            Ok(0)
        }
        Command::ClassifyTwo { max_order, params } => {
            let params = load_params(&params)?;
            let cutoff = parse_rational(&max_order)?;
            for beta in classify_degree_two(&params, &cutoff)? {
                print_indexed(&beta, &params);
            }
            Ok(0)
        }
        Command::Gamma {
            pi_spec,
            beta,
            gamma,
            dgamma,
            params,
        } => {
            let params = load_params(&params)?;
            let spec = pispec_from_json(&read_json(&pi_spec)?, &params)?;
            let beta = load_multiindex(&beta, &params)?;
            let gamma = load_multiindex(&gamma, &params)?;
            let engine = GammaEngine::new(&params, &spec);
            println!("gamma: {}", engine.gamma_entry(&gamma, &beta));
            if let Some(dpath) = dgamma {
                let dspec = dpispec_from_json(&read_json(&dpath)?, &params)?;
                let dengine = DGammaEngine::new(&params, &spec, &dspec);
                println!("dgamma: {}", dengine.dgamma_entry(&gamma, &beta));
            }
            Ok(0)
        }
        Command::PiMinus {
            beta,
            format,
            params,
        } => {
            let params = load_params(&params)?;
            let beta = load_multiindex(&beta, &params)?;
            let expr = expand_pi_minus(&beta, &params)?;
            match format {
                ExprFormat::Text => println!("{expr}"),
                ExprFormat::JsonAst => println!("{:#}", piminus_to_json(&expr)),
            }
            Ok(0)
        }
        Command::Counterterms { max_order, params } => {
            let params = load_params(&params)?;
            let cutoff = parse_rational(&max_order)?;
            for (k, beta) in enumerate_counterterms(&params, &cutoff)? {
                println!("c^({k})[{beta}]");
            }
            Ok(0)
        }
        Command::Deps { beta, dot, params } => {
            let params = load_params(&params)?;
            let beta = load_multiindex(&beta, &params)?;
            let graph = dependency_graph(&beta, &params)?;
            if dot {
                print!("{}", graph.dot());
            } else {
                println!("{:#}", depgraph_to_json(&graph, &params));
            }
            Ok(0)
        }
        Command::Appell {
            moments,
            k,
            sigma2,
            check_hermite,
        } => {
            let m = moments_from_json(&read_json(&moments)?)?;
            let w = appell_from_moments(&m, k)?;
            println!("{w}");
            if check_hermite {
                let sigma2 = sigma2.ok_or_else(|| {
                    Error::validation("--check-hermite needs --sigma2 for the comparison family")
                })?;
                let matched = w == hermite(k, &parse_rational(&sigma2)?);
                println!("hermite match: {matched}");
                return Ok(if matched { 0 } else { 1 });
            }
            Ok(0)
        }
        Command::Simulate {
            config,
            out,
            fields,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::validation(format!("cannot read {}: {e}", config.display())))?;
            let mut cfg: SimConfig = serde_json::from_str(&text)
                .map_err(|e| Error::validation(format!("{}: {e}", config.display())))?;
            cfg.seed = seed_override(cfg.seed)?;
            let params = StructureParams::standard();
            let report = run_lab(&cfg, fields, params.alpha())?;
            std::fs::write(&out, report_to_json(&report)?)
                .map_err(|e| Error::validation(format!("cannot write {}: {e}", out.display())))?;
            println!("report written: {}", out.display());
            Ok(0)
        }
        Command::Check {
            max_order,
            with_sim,
            jobs,
            params,
        } => {
            let params = load_params(&params)?;
            let cutoff = parse_rational(&max_order)?;
            let seed = seed_override(CHECK_SEED)?;
            match jobs {
                None => run_check(&params, &cutoff, seed, with_sim),
                Some(n) => {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build()
                        .map_err(|e| Error::validation(format!("cannot build thread pool: {e}")))?;
                    pool.install(|| run_check(&params, &cutoff, seed, with_sim))
                }
            }
        }
    }
}

/// Order-annotated listing line shared by the enumeration commands.
fn print_indexed(beta: &Multiindex, params: &StructureParams) {
    println!(
        "{}\t{beta}",
        format_rational(&order(beta, params).eval(params))
    );
}

fn print_rows(section: &str, rows: &[suites::SuiteRow], failures: &mut usize, total: &mut usize) {
    println!("[{section}]");
    for row in rows {
        *total += 1;
        if row.pass {
            println!("PASS  {}", row.label);
        } else {
            *failures += 1;
            let detail = row.detail.as_deref().unwrap_or("no witness");
            println!("FAIL  {} ({detail})", row.label);
        }
    }
}

/// Wall-clock per suite on stderr when `MIRS_TIMING` is set; stdout stays
/// byte-deterministic either way.
fn timed<T>(section: &str, work: impl FnOnce() -> T) -> T {
    let start = std::time::Instant::now();
    let out = work();
    if std::env::var_os("MIRS_TIMING").is_some() {
        eprintln!("{section}: {:.2}s", start.elapsed().as_secs_f64());
    }
    out
}

fn run_check(
    params: &StructureParams,
    cutoff: &BigRational,
    seed: u64,
    with_sim: bool,
) -> Result<i32> {
    let mut failures = 0usize;
    let mut total = 0usize;

    let rows = timed("index calculus", || suites::multiindex_suite(params, cutoff))?;
    print_rows("index calculus", &rows, &mut failures, &mut total);

    let rows = timed("series algebra", || {
        suites::series_suite(params, cutoff, seed, 24)
    })?;
    print_rows("series algebra", &rows, &mut failures, &mut total);

    let rows = timed("recentering", || {
        suites::recenter_suite(params, cutoff, 6, 12, seed.wrapping_add(1))
    })?;
    print_rows("recentering", &rows, &mut failures, &mut total);

    let rows = timed("polynomial sector", || {
        suites::polynomial_sector_suite(params, 4, 4, seed.wrapping_add(2))
    })?;
    print_rows("polynomial sector", &rows, &mut failures, &mut total);

    let rows = timed("forcing hierarchy", || suites::hierarchy_suite(params, cutoff))?;
    print_rows("forcing hierarchy", &rows, &mut failures, &mut total);

    let rows = timed("adapted polynomials", || {
        suites::appell_suite(seed.wrapping_add(3), 10, 8)
    })?;
    print_rows("adapted polynomials", &rows, &mut failures, &mut total);

    if with_sim {
        let mut cfg = SimConfig::default_lab();
        cfg.seed = seed;
        let rows = timed("monte carlo", || suites::mc_suite(&cfg, 32, params.alpha()))?;
        print_rows("monte carlo", &rows, &mut failures, &mut total);
    }

    println!("{}/{} properties verified", total - failures, total);
    Ok(if failures == 0 { 0 } else { 1 })
}
