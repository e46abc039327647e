//! The `robust-ftap` command line. [`run`] does all the work so tests can
//! drive it without spawning a process.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::arbitrage::{self, check_member, moment_errors, ClassVariant, Verdict};
use crate::error::{Error, Result};
use crate::io::generate::{generate, GeneratorConfig};
use crate::io::oracle::{oracle_na, oracle_sna};
use crate::io::report::{
    CalibrateReport, ConvexOrderReport, DualityJson, MeasuresReport, NaReport, OracleReport, SensitivityJson, SnaReport,
    SupportJson, SuperhedgeReport,
};
use crate::io::{self, to_pretty, SCHEMA};
use crate::lp::SolverConfig;
use crate::market::Market;
use crate::mot;
use crate::num::parse_rational;
use crate::superhedge::{self, Continuation, HedgeOptions};

pub const THREADS_ENV: &str = "ROBUST_FTAP_THREADS";

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "robust-ftap", version, about = "Model-uncertain arbitrage, superhedging and calibration on finite trees")]
struct Cli {
    /// Exact rational arithmetic (the default).
    #[arg(long, global = true, conflicts_with = "tol")]
    exact: bool,
    /// Floating-point simplex with this comparison tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ContinuationArg {
    QuasiSure,
    PerPrior,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Exact,
    Mixed,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical quasi-sure no-arbitrage.
    CheckNa {
        #[arg(long)]
        market: PathBuf,
        /// Also write the certificate to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Sensitive no-arbitrage.
    CheckSna {
        #[arg(long)]
        market: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Superhedging price of a claim.
    Superhedge {
        #[arg(long)]
        market: PathBuf,
        #[arg(long)]
        claim: PathBuf,
        /// Price under one named prior (`P1`, `mix`, `sel(...)`).
        #[arg(long)]
        prior: Option<String>,
        #[arg(long, value_enum, default_value = "quasi-sure")]
        continuation: ContinuationArg,
        /// Compare the quasi-sure price with every per-prior price.
        #[arg(long)]
        sensitivity: bool,
        /// Cross-check against the global program and the martingale dual.
        #[arg(long)]
        dual: bool,
        /// Admissibility cap `λ` as a rational.
        #[arg(long)]
        cap: Option<String>,
    },
    /// Approximate martingale measures charging one leaf.
    Measures {
        #[arg(long)]
        market: PathBuf,
        #[arg(long)]
        leaf: String,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "mixed")]
        variant: VariantArg,
    },
    /// Implied marginals and static arbitrage in call quotes.
    Calibrate {
        #[arg(long)]
        quotes: PathBuf,
        /// Tree to attach the quotes to; requires `--priors`.
        #[arg(long, requires = "priors")]
        tree: Option<PathBuf>,
        #[arg(long, requires = "tree")]
        priors: Option<PathBuf>,
        /// Write the assembled market here.
        #[arg(long, requires = "tree")]
        emit_market: Option<PathBuf>,
    },
    /// Convex order of two discrete marginals.
    ConvexOrder {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
    },
    /// Random market in the JSON format.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        horizon: usize,
        #[arg(long, default_value_t = 2)]
        branching: usize,
        #[arg(long, default_value_t = 1)]
        assets: usize,
        #[arg(long, default_value_t = 2)]
        priors: usize,
        #[arg(long)]
        kernel: bool,
        #[arg(long, default_value_t = 0)]
        options: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(hide = true)]
    Oracle {
        #[arg(long)]
        market: PathBuf,
    },
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_market(path: &Path) -> Result<Market> {
    io::parse_market(&read(path)?)
}

fn leaf_position(market: &Market, id: &str) -> Result<usize> {
    market.tree.leaf_position_by_id(id).ok_or_else(|| Error::Precondition(format!("{id:?} is not a leaf")))
}

fn exit_for(v: Verdict) -> i32 {
    match v {
        Verdict::NoArbitrage => EXIT_CLEAN,
        Verdict::Arbitrage => EXIT_VIOLATION,
    }
}

fn execute(cli: Cli) -> Result<(String, i32)> {
    let cfg = match cli.tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => return Err(Error::Precondition(format!("tolerance {t} must be positive"))),
        Some(t) => SolverConfig::float(t),
        None => SolverConfig::default(),
    };
    match cli.command {
        Command::CheckNa { market, witness } => {
            let m = load_market(&market)?;
            let v = arbitrage::check_na(&m, &cfg)?;
            let report = NaReport::new(&m, &v);
            if let Some(path) = witness {
                match &report.witness {
                    Some(w) => write(&path, &to_pretty(w))?,
                    None => write(&path, &to_pretty(&report.measures))?,
                }
            }
            Ok((to_pretty(&report), exit_for(v.verdict)))
        }
        Command::CheckSna { market, witness } => {
            let m = load_market(&market)?;
            let v = arbitrage::check_sna(&m, &cfg)?;
            let report = SnaReport::new(&m, &v);
            if let Some(path) = witness {
                match &report.witness {
                    Some(w) => write(&path, &to_pretty(w))?,
                    None => write(&path, &to_pretty(&report.charged_by))?,
                }
            }
            Ok((to_pretty(&report), exit_for(v.verdict)))
        }
        Command::Superhedge { market, claim, prior, continuation, sensitivity, dual, cap } => {
            let m = load_market(&market)?;
            let x = io::parse_claim(&m.tree, &read(&claim)?)?;
            let continuation = match continuation {
                ContinuationArg::QuasiSure => Continuation::QuasiSure,
                ContinuationArg::PerPrior => Continuation::PerPrior,
            };
            let cap = cap
                .map(|c| parse_rational(&c).map_err(|e| Error::Precondition(format!("--cap: {e}"))))
                .transpose()?;
            let opts = HedgeOptions { cap: cap.clone(), continuation };
            let result = match &prior {
                Some(name) => {
                    let p = m
                        .priors
                        .candidates(&m.tree)
                        .into_iter()
                        .find(|p| p.name == *name)
                        .ok_or_else(|| Error::Precondition(format!("no prior named {name:?}")))?;
                    superhedge::superhedge_per_prior(&m, &x, &p, &opts, &cfg)?
                }
                None => superhedge::superhedge_qs(&m, &x, &opts, &cfg)?,
            };
            let mut report = SuperhedgeReport::new(&m, &result);
            report.prior = prior;
            report.continuation = match continuation {
                Continuation::QuasiSure => "quasi-sure",
                Continuation::PerPrior => "per-prior",
            };
            report.cap = cap.map(io::schema::Q);
            if sensitivity {
                let s = superhedge::sensitivity_report(&m, &x, continuation, &cfg)?;
                report.sensitivity = Some(SensitivityJson::new(&m, &s));
            }
            if dual {
                report.duality = Some(DualityJson::new(&m, &superhedge::duality_check(&m, &x, &cfg)?));
            }
            Ok((to_pretty(&report), EXIT_CLEAN))
        }
        Command::Measures { market, leaf, n_max, variant } => {
            let m = load_market(&market)?;
            let pos = leaf_position(&m, &leaf)?;
            let (v, name) = match variant {
                VariantArg::Exact => (ClassVariant::Exact, "exact"),
                VariantArg::Mixed => (ClassVariant::Mixed, "mixed"),
            };
            let class = arbitrage::approximate_class(&m, pos, n_max, v, &cfg)?;
            let errors: Vec<_> = class.members.iter().map(|(_, q)| moment_errors(&m, q).max()).collect();
            let checks: Vec<_> = class
                .members
                .iter()
                .map(|(n, q)| check_member(&m, q, *n, &class.dominating_measure, pos, &class.delta))
                .collect();
            let code = if checks.iter().all(|c| c.is_ok()) { EXIT_CLEAN } else { EXIT_VIOLATION };
            Ok((to_pretty(&MeasuresReport::new(&m, &class, name, &errors, &checks)), code))
        }
        Command::Calibrate { quotes, tree, priors, emit_market } => {
            let sheet = io::parse_quotes(&read(&quotes)?)?;
            let diagnostics = mot::quote_diagnostics(&sheet);
            let functions: Vec<_> = sheet.assets.iter().map(mot::support_function).collect();
            let marginals: Vec<_> = sheet
                .assets
                .iter()
                .zip(&functions)
                .map(|(q, f)| {
                    if diagnostics.consistent && q.is_terminated() {
                        mot::implied_marginal(f, &q.spot).ok()
                    } else {
                        None
                    }
                })
                .collect();
            let mut report = CalibrateReport::new(&functions, &marginals, &diagnostics);
            let mut code = if diagnostics.consistent { EXIT_CLEAN } else { EXIT_VIOLATION };
            if let (Some(tree), Some(priors)) = (tree, priors) {
                let t = io::parse_tree(&read(&tree)?)?;
                let p = io::parse_priors(&t, &read(&priors)?)?;
                let m = mot::assemble_market(&sheet, t, p)?;
                let support = mot::support_enforcement(&m, &mot::calibrate(&sheet)?)?;
                if !support.is_clean() {
                    code = EXIT_VIOLATION;
                }
                report.support = Some(SupportJson::new(&m, &support));
                if let Some(path) = emit_market {
                    write(&path, &io::market_to_json(&m))?;
                }
            }
            Ok((to_pretty(&report), code))
        }
        Command::ConvexOrder { mu, nu } => {
            let a = io::parse_marginal(&read(&mu)?)?;
            let b = io::parse_marginal(&read(&nu)?)?;
            let order = mot::convex_order_check(&a, &b);
            let coupling = mot::martingale_coupling(&a, &b, &cfg)?;
            if order.is_ordered() != coupling.is_some() {
                return Err(Error::OracleDisagreement(format!(
                    "call comparison says {order:?}, coupling LP {}",
                    if coupling.is_some() { "found a coupling" } else { "found none" }
                )));
            }
            let code = if order.is_ordered() { EXIT_CLEAN } else { EXIT_VIOLATION };
            Ok((to_pretty(&ConvexOrderReport::new(&order, coupling.as_ref())), code))
        }
        Command::Generate { seed, horizon, branching, assets, priors, kernel, options, out } => {
            let m = generate(&GeneratorConfig { seed, horizon, branching, assets, priors, kernel, options })?;
            let text = io::market_to_json(&m);
            match out {
                Some(path) => {
                    write(&path, &text)?;
                    Ok((String::new(), EXIT_CLEAN))
                }
                None => Ok((text, EXIT_CLEAN)),
            }
        }
        Command::Oracle { market } => {
            let m = load_market(&market)?;
            let na = oracle_na(&m)?;
            let sna = oracle_sna(&m)?;
            let tree = &m.tree;
            let report = OracleReport {
                schema: SCHEMA,
                command: "oracle",
                na: na.na,
                blocked: na.blocked.iter().map(|&l| tree.leaf_id(l).to_string()).collect(),
                sna: sna.sna,
                charged_by: sna.charged_by.iter().map(|(l, p)| (tree.leaf_id(*l).to_string(), p.clone())).collect(),
            };
            let code = if na.na && sna.sna { EXIT_CLEAN } else { EXIT_VIOLATION };
            Ok((to_pretty(&report), code))
        }
    }
}

fn thread_count() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got {v:?}")),
        },
    }
}

/// Runs one invocation; `args[0]` is the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { stdout: text, stderr: String::new(), code: EXIT_CLEAN },
                _ => Outcome { stdout: String::new(), stderr: text, code: EXIT_ERROR },
            };
        }
    };
    let result = match thread_count() {
        Err(msg) => Err(Error::Precondition(msg)),
        Ok(None) => execute(cli),
        Ok(Some(n)) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(cli)),
            Err(e) => Err(Error::Precondition(format!("thread pool: {e}"))),
        },
    };
    match result {
        Ok((stdout, code)) => Outcome { stdout, stderr: String::new(), code },
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: EXIT_ERROR },
    }
}
