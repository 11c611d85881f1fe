//! Subcommand bodies. Each one builds its records and hands them to [`write_records`].

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use support_size::ingest::{count_tokens, read_paragraphs, TextEncoding};
use support_size::synth::Family;
use support_size::theory::tv::{certificate_recipe, cutoff_for, lecam_certificate, CertificateParams, TAIL_TOLERANCE};
use support_size::theory::{
    best_inv_approx, closed_form_error, construct_prior_pair, max_exp_cheby, primal_value, tv_bound, tv_exact,
};
use support_size::{
    build_histogram, estimate, fingerprint_of, read_fingerprint_file, resample, EstimatorConfig64, EstimatorKind,
    Fingerprint, ResampleUnit, TokenizerConfig,
};
use support_size_cli::output::{emit_csv, emit_json, open_output, CsvRecord};
use support_size_cli::{
    geometric_grid, probe_sample_complexity, run_sweep, CliError, CliResult, ProbeSpec, Sampling, SweepSpec,
};

use crate::{
    Cli, CoeffsArgs, Command, Encoding, EstimateArgs, Format, ProbeArgs, SimulateArgs, TheoryCommand, Tuning, Unit,
};

pub fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Estimate(args) => {
            let rows = run_estimate(args, cli.seed)?;
            write_records(cli, &rows)
        }
        Command::Simulate(args) => {
            let rows = run_sweep(&sweep_spec(args, cli.seed)?)?;
            write_records(cli, &rows)
        }
        Command::Probe(args) => {
            let rows = run_probe(args, cli.seed)?;
            write_records(cli, &rows)
        }
        Command::Coeffs(args) => write_records(cli, &coeff_rows(args)?),
        Command::Theory { action } => {
            let value = run_theory(action)?;
            write_fields(cli, value)
        }
    }
}

fn write_records<R: CsvRecord>(cli: &Cli, rows: &[R]) -> CliResult<()> {
    let out = open_output(cli.output.as_deref())?;
    match cli.format {
        Format::Csv => emit_csv(rows, out),
        Format::Json => emit_json(rows, out),
    }
}

#[derive(Debug, Serialize)]
struct FieldRow {
    field: String,
    value: String,
}

impl CsvRecord for FieldRow {
    const HEADER: &'static [&'static str] = &["field", "value"];
}

// JSON: the object on one line. CSV: one `field,value` row per top-level field.
fn write_fields(cli: &Cli, value: Value) -> CliResult<()> {
    match cli.format {
        Format::Json => {
            let mut out = open_output(cli.output.as_deref())?;
            serde_json::to_writer(&mut out, &value)?;
            writeln!(out).map_err(serde_json::Error::io)?;
            out.flush().map_err(serde_json::Error::io)?;
            Ok(())
        }
        Format::Csv => {
            let Value::Object(map) = value else {
                return Err(CliError::Usage("theory output is not an object".into()));
            };
            let rows: Vec<FieldRow> = map
                .into_iter()
                .map(|(field, v)| FieldRow {
                    field,
                    value: v.to_string(),
                })
                .collect();
            let out = open_output(cli.output.as_deref())?;
            emit_csv(&rows, out)
        }
    }
}

fn missing(flag: &str) -> CliError {
    CliError::Usage(format!("--{flag} is required"))
}

fn estimator_config(t: &Tuning) -> EstimatorConfig64 {
    EstimatorConfig64 {
        c0: t.c0,
        c1: t.c1,
        degree: t.degree,
        et_t: t.et_t,
        et_terms: t.et_terms,
    }
}

fn parse_estimators(names: &[String]) -> CliResult<Vec<EstimatorKind>> {
    let mut out = Vec::new();
    for name in names {
        let kind: EstimatorKind = name.trim().parse()?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no estimators given".into()));
    }
    Ok(out)
}

fn parse_family(spec: Option<&String>) -> CliResult<Family> {
    Ok(spec.ok_or_else(|| missing("family"))?.parse()?)
}

#[derive(Debug, Serialize)]
struct EstimateRow {
    estimator: EstimatorKind,
    value: Option<f64>,
    rounded: Option<i64>,
    n: u64,
    distinct: u64,
    k: Option<f64>,
    #[serde(rename = "L")]
    degree: Option<usize>,
    l: Option<f64>,
    r: Option<f64>,
    error: Option<String>,
}

impl CsvRecord for EstimateRow {
    const HEADER: &'static [&'static str] = &[
        "estimator", "value", "rounded", "n", "distinct", "k", "L", "l", "r", "error",
    ];
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_fingerprint(args: &EstimateArgs, seed: u64) -> CliResult<Fingerprint> {
    let text = match (&args.fingerprint, &args.text) {
        (Some(path), None) => {
            if args.resample_fraction.is_some() {
                return Err(CliError::Usage("--resample-fraction needs --text".into()));
            }
            return Ok(read_fingerprint_file(path)?);
        }
        (None, Some(path)) => path,
        (Some(_), Some(_)) => return Err(CliError::Usage("give only one of --fingerprint and --text".into())),
        (None, None) => return Err(CliError::Usage("one of --fingerprint or --text is required".into())),
    };
    let cfg = TokenizerConfig {
        case_fold: !args.no_case_fold,
        strip_punctuation: !args.keep_punctuation,
        encoding: match args.encoding {
            Encoding::Utf8 => TextEncoding::Utf8,
            Encoding::Latin1 => TextEncoding::Latin1,
        },
    };
    let hist = match args.resample_fraction {
        None => count_tokens(open(text)?, &cfg)?.histogram(),
        Some(fraction) => {
            let paragraphs = read_paragraphs(open(text)?, &cfg)?;
            let unit = match args.resample_unit {
                Unit::Word => ResampleUnit::Word,
                Unit::Paragraph => ResampleUnit::Paragraph,
            };
            build_histogram(resample(&paragraphs, fraction, unit, seed)?)
        }
    };
    Ok(fingerprint_of(&hist))
}

fn run_estimate(args: &EstimateArgs, seed: u64) -> CliResult<Vec<EstimateRow>> {
    let kinds = parse_estimators(&args.estimators)?;
    if args.k.is_none() && (args.clamp || kinds.contains(&EstimatorKind::Chebyshev)) {
        return Err(CliError::Usage("--k is required for wy and --clamp".into()));
    }
    let cfg = estimator_config(&args.tuning);
    let fp = load_fingerprint(args, seed)?;
    let k = args.k.unwrap_or(f64::NAN);
    let distinct = fp.distinct();
    let mut rows = Vec::new();
    let mut first_error = None;
    for kind in kinds {
        let base = EstimateRow {
            estimator: kind,
            value: None,
            rounded: None,
            n: fp.n(),
            distinct,
            k: args.k,
            degree: None,
            l: None,
            r: None,
            error: None,
        };
        let row = match estimate(kind, &fp, k, &cfg) {
            Ok(mut est) => {
                if args.clamp {
                    est = est.clamped(distinct as f64, k);
                }
                let value = if args.round { est.rounded as f64 } else { est.value };
                let params = est.params;
                EstimateRow {
                    value: Some(value),
                    rounded: Some(est.rounded),
                    degree: params.map(|p| p.degree),
                    l: params.map(|p| p.l),
                    r: params.map(|p| p.r),
                    ..base
                }
            }
            Err(e) => {
                let row = EstimateRow {
                    error: Some(e.to_string()),
                    ..base
                };
                first_error.get_or_insert(e);
                row
            }
        };
        rows.push(row);
    }
    // a run where nothing could be estimated is a failure
    match first_error {
        Some(e) if rows.iter().all(|r| r.error.is_some()) => Err(e.into()),
        _ => Ok(rows),
    }
}

fn sweep_spec(args: &SimulateArgs, seed: u64) -> CliResult<SweepSpec> {
    let family = parse_family(args.family.as_ref())?;
    let n_grid = match &args.n_geom {
        Some(g) => {
            let parts: Vec<&str> = g.split(':').collect();
            let bad = || CliError::Usage(format!("--n-geom \"{g}\": expected lo:hi:count"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
            geometric_grid(lo, hi, count)?
        }
        None if args.n_grid.is_empty() => return Err(missing("n-grid or --n-geom")),
        None => args.n_grid.clone(),
    };
    let mut spec = SweepSpec::new(family, n_grid, parse_estimators(&args.estimators)?);
    spec.trials = args.trials;
    spec.seed = seed;
    spec.sampling = args.sampling.parse::<Sampling>()?;
    spec.config = estimator_config(&args.tuning);
    spec.k = args.k;
    spec.validate()?;
    Ok(spec)
}

fn run_probe(args: &ProbeArgs, seed: u64) -> CliResult<Vec<support_size_cli::ProbeResult>> {
    let family = parse_family(args.family.as_ref())?;
    let estimator: EstimatorKind = args.estimator.trim().parse()?;
    if args.epsilon.is_empty() {
        return Err(missing("epsilon"));
    }
    let sampling: Sampling = args.sampling.parse()?;
    args.epsilon
        .iter()
        .map(|&epsilon| {
            let mut spec = ProbeSpec::new(family, estimator, epsilon);
            spec.delta = args.delta;
            spec.trials = args.trials;
            spec.seed = seed;
            spec.ceiling = args.ceiling;
            spec.resolution = args.resolution;
            spec.sampling = sampling;
            spec.config = estimator_config(&args.tuning);
            spec.k = args.k;
            probe_sample_complexity(&spec)
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct CoeffRow {
    j: usize,
    a: f64,
    g: f64,
    g_minus_one: f64,
    #[serde(rename = "L")]
    degree: usize,
    l: f64,
    r: f64,
    n: u64,
}

impl CsvRecord for CoeffRow {
    const HEADER: &'static [&'static str] = &["j", "a", "g", "g_minus_one", "L", "l", "r", "n"];
}

fn coeff_rows(args: &CoeffsArgs) -> CliResult<Vec<CoeffRow>> {
    let k = args.k.ok_or_else(|| missing("k"))?;
    let n = args.n.ok_or_else(|| missing("n"))?;
    let table = support_size::estimators::wy_table(k, n, &estimator_config(&args.tuning))?;
    let (l, r) = table.interval();
    Ok((0..=table.degree())
        .map(|j| CoeffRow {
            j,
            a: table.a()[j],
            g: table.g()[j],
            g_minus_one: table.g_minus_one()[j],
            degree: table.degree(),
            l,
            r,
            n,
        })
        .collect())
}

fn object<T: Serialize>(v: &T) -> CliResult<Map<String, Value>> {
    match serde_json::to_value(v)? {
        Value::Object(m) => Ok(m),
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            Ok(m)
        }
    }
}

fn run_theory(action: &TheoryCommand) -> CliResult<Value> {
    let map = match *action {
        TheoryCommand::Approx { degree, a, b, grid } => {
            let b = b.ok_or_else(|| missing("b"))?;
            let approx = best_inv_approx(degree, a, b)?;
            let mut m = object(&approx)?;
            m.insert("closed_form_error".into(), closed_form_error(degree + 1, a, b)?.into());
            if let Some(grid) = grid {
                m.insert("lp_value".into(), primal_value(degree, a, b, grid)?.into());
            }
            m
        }
        TheoryCommand::Priors { degree, nu, lambda } => {
            let lambda = lambda.ok_or_else(|| missing("lambda"))?;
            object(&construct_prior_pair(degree, nu, lambda)?)?
        }
        TheoryCommand::Tv {
            degree,
            nu,
            lambda,
            scale,
            cutoff,
        } => {
            let lambda = lambda.ok_or_else(|| missing("lambda"))?;
            let scale = scale.ok_or_else(|| missing("scale"))?;
            let pair = construct_prior_pair(degree, nu, lambda)?;
            let big_lambda = scale * pair.lambda;
            let cutoff = cutoff.unwrap_or_else(|| cutoff_for(big_lambda, TAIL_TOLERANCE));
            let mut m = object(&tv_exact(&pair, scale, cutoff)?)?;
            m.insert("Lambda".into(), big_lambda.into());
            m.insert("L".into(), degree.into());
            m.insert("gap".into(), pair.gap.into());
            m.insert("bound".into(), serde_json::to_value(tv_bound(big_lambda, pair.degree)?)?);
            m
        }
        TheoryCommand::Certify {
            k,
            epsilon,
            n,
            degree,
            lambda,
            nu,
            alpha,
            c0,
            gamma,
            c,
        } => {
            let k = k.ok_or_else(|| missing("k"))?;
            let params = match (n, degree, lambda, nu, alpha) {
                (Some(n), Some(degree), Some(lambda), Some(nu), Some(alpha)) => CertificateParams {
                    k,
                    n,
                    degree,
                    lambda,
                    nu,
                    alpha,
                },
                (None, None, None, None, None) => {
                    let epsilon = epsilon.ok_or_else(|| {
                        CliError::Usage("give --epsilon, or all of --n, -L, --lambda, --nu, --alpha".into())
                    })?;
                    certificate_recipe(k, epsilon, c0, gamma, c)?
                }
                _ => {
                    return Err(CliError::Usage(
                        "explicit certificates need all of --n, -L, --lambda, --nu, --alpha".into(),
                    ))
                }
            };
            object(&lecam_certificate(params)?)?
        }
        TheoryCommand::Maxcheb { beta, degree } => {
            let beta = beta.ok_or_else(|| missing("beta"))?;
            let mut m = object(&max_exp_cheby(beta, degree)?)?;
            m.insert("beta".into(), beta.into());
            m.insert("L".into(), degree.into());
            m
        }
    };
    Ok(Value::Object(map))
}
