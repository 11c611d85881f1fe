//! `supsize`: support size estimation, simulation sweeps and the lower-bound lab.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use support_size_cli::config::read_config;
use support_size_cli::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "supsize", version, about = "Support size estimation from samples and fingerprints")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// key=value file whose entries act as defaults for the flags of the same name.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the support size from a fingerprint file or a text corpus.
    ///
    /// CSV columns: estimator, value, rounded, n, distinct, k, L, l, r, error.
    Estimate(EstimateArgs),
    /// Monte Carlo sweep over sample sizes on a synthetic family.
    ///
    /// CSV columns: family, sampling, estimator, n, support_size, k, trials,
    /// undefined_count, mean_estimate, std_dev, rmse.
    Simulate(SimulateArgs),
    /// Empirical sample complexity: smallest n with P[|S_hat - S| >= eps k] <= delta.
    ///
    /// CSV columns: family, estimator, epsilon, delta, k, support_size, n_star, ceiling,
    /// ceiling_reached, failures, trials, failure_rate, wilson_low, wilson_high,
    /// evaluations.
    Probe(ProbeArgs),
    /// Coefficients a_j of P_L and the estimator weights g_L(j) for given k and n.
    ///
    /// CSV columns: j, a, g, g_minus_one, L, l, r, n.
    Coeffs(CoeffsArgs),
    /// Lower-bound machinery: best approximation, prior pairs, TV, certificates.
    ///
    /// CSV output lists one field per line as field,value with JSON-encoded values.
    Theory {
        #[command(subcommand)]
        action: TheoryCommand,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Tuning {
    /// L = floor(c0 ln k).
    #[arg(long, default_value_t = 0.45)]
    pub c0: f64,
    /// r = c1 ln k / n.
    #[arg(long, default_value_t = 0.5)]
    pub c1: f64,
    /// Use this degree instead of floor(c0 ln k).
    #[arg(long)]
    pub degree: Option<usize>,
    /// Efron-Thisted / Good-Toulmin extrapolation ratio t.
    #[arg(long, default_value_t = 1.0)]
    pub et_t: f64,
    /// Number of Efron-Thisted terms J.
    #[arg(long, default_value_t = 10)]
    pub et_terms: usize,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Fingerprint file: "j h_j" lines, optional ">m types" tail row.
    #[arg(long, conflicts_with = "text")]
    pub fingerprint: Option<PathBuf>,
    /// Text corpus, tokenized on whitespace.
    #[arg(long)]
    pub text: Option<PathBuf>,
    /// Reciprocal of the minimum nonzero probability (required by wy).
    #[arg(long)]
    pub k: Option<f64>,
    /// Comma-separated subset of wy, plugin, gt, cl1, cl2, et, gtoulmin.
    #[arg(
        long,
        visible_alias = "estimator",
        value_delimiter = ',',
        default_value = "wy,plugin,gt,cl1,cl2,et,gtoulmin"
    )]
    pub estimators: Vec<String>,
    /// Restrict each estimate to [distinct observed, k].
    #[arg(long)]
    pub clamp: bool,
    /// Report the rounded estimate as the value.
    #[arg(long)]
    pub round: bool,
    #[arg(long, value_enum, default_value_t = Encoding::Utf8)]
    pub encoding: Encoding,
    /// Keep letter case when tokenizing.
    #[arg(long)]
    pub no_case_fold: bool,
    /// Keep non-alphanumeric characters inside tokens.
    #[arg(long)]
    pub keep_punctuation: bool,
    /// Resample this fraction of the corpus (with replacement) before counting.
    #[arg(long)]
    pub resample_fraction: Option<f64>,
    #[arg(long, value_enum, default_value_t = Unit::Paragraph)]
    pub resample_unit: Unit,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Encoding {
    Utf8,
    Latin1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Unit {
    Word,
    Paragraph,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// uniform:k=K | zipf:k=K,alpha=A | mixture:k=K
    #[arg(long)]
    pub family: Option<String>,
    /// Comma-separated, strictly increasing sample sizes.
    #[arg(long, value_delimiter = ',', conflicts_with = "n_geom")]
    pub n_grid: Vec<u64>,
    /// lo:hi:count, geometrically spaced sample sizes.
    #[arg(long)]
    pub n_geom: Option<String>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "wy,plugin")]
    pub estimators: Vec<String>,
    #[arg(long, default_value = "poissonized")]
    pub sampling: String,
    /// k given to wy; defaults to 1 / min mass of the family.
    #[arg(long)]
    pub k: Option<f64>,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, default_value = "wy")]
    pub estimator: String,
    /// One or more accuracies, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Largest n tried; defaults to 10 k ln k.
    #[arg(long)]
    pub ceiling: Option<u64>,
    /// Relative width at which bisection stops.
    #[arg(long, default_value_t = 0.01)]
    pub resolution: f64,
    #[arg(long, default_value = "iid")]
    pub sampling: String,
    #[arg(long)]
    pub k: Option<f64>,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Subcommand)]
pub enum TheoryCommand {
    /// Best uniform approximation of 1/x on [a, b] by Remez exchange.
    Approx {
        #[arg(long, short = 'L', default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long)]
        b: Option<f64>,
        /// Also solve the discretized moment-matching program on this many points.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Moment-matched prior pair on {0} u [1 + nu, lambda].
    Priors {
        #[arg(long, short = 'L', default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// TV between the Poisson mixtures of a prior pair, with the moment-matching bound.
    Tv {
        #[arg(long, short = 'L', default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
        #[arg(long)]
        lambda: Option<f64>,
        /// Poisson scale (n / k).
        #[arg(long)]
        scale: Option<f64>,
        /// Largest count summed exactly; chosen automatically when absent.
        #[arg(long)]
        cutoff: Option<u64>,
    },
    /// Le Cam certificate, from explicit parameters or from (k, epsilon) via the
    /// standard recipe.
    Certify {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        n: Option<f64>,
        #[arg(long, short = 'L')]
        degree: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0.45)]
        c0: f64,
        #[arg(long, default_value_t = 1.35)]
        gamma: f64,
        /// Constant C in n = C k / ln k * ln^2(1 / (2 epsilon)).
        #[arg(long = "C", default_value_t = 0.01)]
        c: f64,
    },
    /// Maximum of e^{-beta x} T_L(x) over x >= 1.
    Maxcheb {
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, short = 'L', default_value_t = 6)]
        degree: usize,
    },
}

// Returns the value of `--config` without running the full parser.
fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

// Long name and aliases of an argument.
fn names(arg: &clap::Arg) -> Vec<&str> {
    let mut out: Vec<&str> = arg.get_long().into_iter().collect();
    out.extend(arg.get_all_aliases().unwrap_or_default());
    out
}

fn collect_longs(cmd: &clap::Command, out: &mut Vec<String>) {
    out.extend(cmd.get_arguments().flat_map(|a| names(a).into_iter().map(str::to_string)));
    for sub in cmd.get_subcommands() {
        collect_longs(sub, out);
    }
}

fn with_defaults(cmd: clap::Command, kv: &[(String, String)]) -> clap::Command {
    let set = |arg: clap::Arg| {
        let accepted = names(&arg);
        match kv.iter().rev().find(|(k, _)| accepted.contains(&k.as_str())) {
            Some((_, v)) if arg.get_value_delimiter().is_some() => {
                let vals: Vec<String> = v.split(',').map(|s| s.trim().to_string()).collect();
                arg.default_values(vals)
            }
            Some((_, v)) => arg.default_value(v.clone()),
            None => arg,
        }
    };
    cmd.mut_args(set)
        .mut_subcommands(|sub| with_defaults(sub, kv))
}

fn parse(args: Vec<OsString>) -> Result<Cli, ExitCode> {
    let mut cmd = Cli::command();
    if let Some(path) = find_config(&args) {
        let kv = match read_config(&path) {
            Ok(kv) => kv,
            Err(e) => return Err(report(&e)),
        };
        let mut known = Vec::new();
        collect_longs(&cmd, &mut known);
        if let Some((k, _)) = kv.iter().find(|(k, _)| !known.contains(k) || k == "config") {
            return Err(report(&CliError::Usage(format!("unknown configuration key \"{k}\""))));
        }
        cmd = with_defaults(cmd, &kv);
    }
    let matches = match cmd.try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return Err(ExitCode::SUCCESS);
            }
            return Err(report(&CliError::Usage(e.render().to_string().trim_end().to_string())));
        }
    };
    Cli::from_arg_matches(&matches).map_err(|e| report(&CliError::Usage(e.to_string())))
}

fn report(err: &CliError) -> ExitCode {
    let record = serde_json::to_string(&err.record()).unwrap_or_else(|_| err.to_string());
    eprintln!("{record}");
    match err {
        CliError::Usage(_) | CliError::Config { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    commands::dispatch(cli)
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
