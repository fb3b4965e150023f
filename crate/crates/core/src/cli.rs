//! Batch front end behind the `tp-mahler` binary.
//!
//! Every subcommand validates its parameters, computes, and writes one
//! artifact (CSV or JSON) to `--output`, to a file in the directory named by
//! `TP_MAHLER_OUTPUT_DIR`, or to standard output. Diagnostics go to
//! standard error. Exit status: 0 success, 1 invalid configuration,
//! 2 precondition violation, 3 failed invariant or non-empty comparison.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arith::{format_rational, parse_rational, ExactRational, Prime};
use crate::auxiliary::{
    build_aux, decay_experiment, height_ledger, regularity_check, verify_vanishing, AuxScheme,
};
use crate::coeffs::{
    check_functional_equation, check_golden, check_p_integrality, check_tables_agree,
    check_vanishing, generate, read_coeff_csv, write_coeff_rows, Algorithm, CheckReport, CoeffRow,
};
use crate::error::{Error, Result};
use crate::eval::{
    boundary_probe, default_probe_radii, eval_product, eval_series, eval_via_log_series,
    iterate_identity_check, write_eval_csv, write_iterate_csv, ComplexRational,
};
use crate::golden::{golden_table, GOLDEN_MAX_N};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "TP_MAHLER_OUTPUT_DIR";

const MAX_ORDER: usize = 100_000;
const MAX_PREC: u32 = 1 << 16;
const MIN_PREC: u32 = 16;
const MAX_K: u32 = 24;
const DECAY_EPSILON: f64 = 0.5;

#[derive(Debug, Parser)]
#[command(
    name = "tp-mahler",
    version,
    about = "Coefficients, certified values and auxiliary-function experiments for T_p(z)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Artifact format (the default depends on the command).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the artifact here instead of the default location.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Exact coefficients t_p(0..=N).
    Coeffs {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value = "log-exp")]
        algorithm: Algorithm,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run every invariant audit on freshly generated tables.
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Certified value of T_p(alpha) by every route.
    Eval {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 256)]
        prec: u32,
        /// Order of the coefficient table behind the series route.
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare T_p(alpha^(p^k)) with the value propagated from T_p(alpha).
    Iterate {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 5)]
        kmax: u32,
        #[arg(long, default_value_t = 256)]
        prec: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// log T_p along the real ray and toward a root of unity.
    Probe {
        #[arg(long)]
        p: u64,
        /// Probe toward a primitive p^j-th root of unity.
        #[arg(long = "root-exponent", default_value_t = 1)]
        root_exponent: u32,
        /// Comma-separated increasing radii in (0,1).
        #[arg(long)]
        radii: Option<String>,
        #[arg(long, default_value_t = 256)]
        prec: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build an auxiliary scheme with vanishing order at least P^2.
    Aux {
        #[arg(long)]
        p: u64,
        #[arg(long = "P", visible_alias = "degree", default_value_t = 3)]
        degree: usize,
        /// Table order; defaults to P^2 + P.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "log-exp")]
        algorithm: Algorithm,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Decay of E_P along alpha, alpha^p, alpha^(p^2), ...
    Decay {
        #[arg(long)]
        p: u64,
        #[arg(long = "P", visible_alias = "degree", default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        #[arg(long, default_value_t = 256)]
        prec: u32,
        /// Use a scheme previously written by `aux` instead of building one.
        #[arg(long)]
        scheme: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Analytic against arithmetic bounds for log |E_P(alpha^(p^k))|.
    Ledger {
        #[arg(long)]
        p: u64,
        #[arg(long = "P", visible_alias = "degree", default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check that the orbit of alpha avoids the functional-equation singularities.
    Regularity {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 10)]
        kmax: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The stored reference table for small primes.
    Golden {
        #[arg(long)]
        p: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact differences between two coefficient CSV files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// What a command produced: the artifact text, diagnostics, and an
/// invariant failure to report after the artifact is written.
#[derive(Debug)]
pub struct Outcome {
    pub artifact: String,
    pub default_name: String,
    pub notes: Vec<String>,
    pub failure: Option<Error>,
}

impl Outcome {
    fn new(artifact: String, default_name: String) -> Self {
        Outcome {
            artifact,
            default_name,
            notes: Vec::new(),
            failure: None,
        }
    }
}

fn prime(p: u64) -> Result<Prime> {
    Prime::new(p)
}

fn check_prec(prec: u32) -> Result<u32> {
    if (MIN_PREC..=MAX_PREC).contains(&prec) {
        Ok(prec)
    } else {
        Err(Error::InvalidArgument(format!(
            "precision must lie in {MIN_PREC}..={MAX_PREC} bits, got {prec}"
        )))
    }
}

fn check_order(n: usize) -> Result<usize> {
    if n <= MAX_ORDER {
        Ok(n)
    } else {
        Err(Error::InvalidArgument(format!(
            "order {n} exceeds {MAX_ORDER}"
        )))
    }
}

fn check_kmax(p: Prime, kmax: u32) -> Result<u32> {
    match p.get().checked_pow(kmax) {
        Some(v) if kmax <= MAX_K && v <= 1 << 24 => Ok(kmax),
        _ => Err(Error::InvalidArgument(format!(
            "kmax = {kmax} is too large for p = {p} (p^kmax must stay below 2^24)"
        ))),
    }
}

fn real_alpha(s: &str) -> Result<ExactRational> {
    parse_rational(s)
}

fn csv_to_json(csv_text: &str) -> Result<String> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers()?.clone();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let obj: BTreeMap<&str, &str> = headers.iter().zip(record.iter()).collect();
        rows.push(serde_json::to_value(obj)?);
    }
    Ok(serde_json::to_string(&rows)?)
}

fn render_with<F>(format: Format, write: F) -> Result<String>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    let text = String::from_utf8(buf).expect("csv output is utf-8");
    match format {
        Format::Csv => Ok(text),
        Format::Json => csv_to_json(&text),
    }
}

fn write_records(buf: &mut Vec<u8>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn failed_checks(reports: &[CheckReport]) -> Option<Error> {
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.to_string())
        .collect();
    (!failed.is_empty()).then(|| Error::Internal(failed.join("; ")))
}

/// Runs one command and returns its artifact without writing anything.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Coeffs {
            p,
            n,
            algorithm,
            out,
        } => {
            let p = prime(*p)?;
            let tab = generate(*algorithm, p, check_order(*n)?);
            let format = out.format.unwrap_or(Format::Csv);
            let artifact = match format {
                Format::Csv => tab.to_csv_string()?,
                Format::Json => tab.to_json()?,
            };
            let name = format!(
                "coeffs-p{p}-n{n}-{}.{}",
                algorithm.name(),
                format.extension()
            );
            Ok(Outcome::new(artifact, name))
        }
        Command::Verify { p, n, out } => {
            let p = prime(*p)?;
            let n = check_order(*n)?;
            let tables: Vec<_> = Algorithm::ALL.iter().map(|&a| generate(a, p, n)).collect();
            let reference = &tables[0];
            let mut reports = vec![
                check_vanishing(reference),
                check_p_integrality(reference),
                check_functional_equation(reference),
            ];
            for other in &tables[1..] {
                reports.push(check_tables_agree(reference, other));
            }
            if golden_table().column(p).is_some() {
                reports.push(check_golden(&reference.truncate(GOLDEN_MAX_N)));
            }
            let format = out.format.unwrap_or(Format::Csv);
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.check.to_string(),
                        r.checked.to_string(),
                        r.violations.len().to_string(),
                        r.first_violation()
                            .map(|v| v.to_string())
                            .unwrap_or_default(),
                        if r.passed() { "pass" } else { "fail" }.to_string(),
                    ]
                })
                .collect();
            let artifact = render_with(format, |buf| {
                write_records(
                    buf,
                    &[
                        "check",
                        "checked",
                        "violations",
                        "first_violation",
                        "status",
                    ],
                    &rows,
                )
            })?;
            let mut outcome =
                Outcome::new(artifact, format!("verify-p{p}-n{n}.{}", format.extension()));
            outcome.notes = reports.iter().map(|r| r.to_string()).collect();
            outcome.failure = failed_checks(&reports);
            Ok(outcome)
        }
        Command::Eval {
            p,
            alpha,
            prec,
            n,
            out,
        } => {
            let p = prime(*p)?;
            let prec = check_prec(*prec)?;
            let n = check_order(*n)?;
            let point: ComplexRational = alpha.parse()?;
            let mut reports = vec![
                eval_product(p, &point, None, prec)?,
                eval_via_log_series(p, &point, None, prec)?,
            ];
            let tab = generate(Algorithm::LogExp, p, n);
            reports.push(eval_series(&point, &tab, prec)?);
            let format = out.format.unwrap_or(Format::Csv);
            let artifact = render_with(format, |buf| write_eval_csv(buf, &reports))?;
            let mut outcome = Outcome::new(artifact, format!("eval-p{p}.{}", format.extension()));
            if !reports[0].value.overlaps(&reports[1].value) {
                outcome.failure = Some(Error::Internal(
                    "product and log-series enclosures are disjoint".into(),
                ));
            }
            Ok(outcome)
        }
        Command::Iterate {
            p,
            alpha,
            kmax,
            prec,
            out,
        } => {
            let p = prime(*p)?;
            let kmax = check_kmax(p, *kmax)?;
            let prec = check_prec(*prec)?;
            let point: ComplexRational = alpha.parse()?;
            let rows = iterate_identity_check(p, &point, kmax, prec)?;
            let format = out.format.unwrap_or(Format::Csv);
            let artifact = render_with(format, |buf| write_iterate_csv(buf, &rows))?;
            let mut outcome =
                Outcome::new(artifact, format!("iterate-p{p}.{}", format.extension()));
            let bad: Vec<String> = rows
                .iter()
                .filter(|r| !r.consistent)
                .map(|r| r.k.to_string())
                .collect();
            if !bad.is_empty() {
                outcome.failure = Some(Error::Internal(format!(
                    "iteration identity violated at k = {}",
                    bad.join(", ")
                )));
            }
            Ok(outcome)
        }
        Command::Probe {
            p,
            root_exponent,
            radii,
            prec,
            out,
        } => {
            let p = prime(*p)?;
            let prec = check_prec(*prec)?;
            let radii = match radii {
                Some(list) => list
                    .split(',')
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?,
                None => default_probe_radii(),
            };
            let table = boundary_probe(p, *root_exponent, &radii, prec)?;
            let format = out.format.unwrap_or(Format::Csv);
            let artifact = render_with(format, |buf| table.write_csv(buf))?;
            let mut outcome = Outcome::new(artifact, format!("probe-p{p}.{}", format.extension()));
            outcome.notes.push(format!(
                "real ray strictly increasing: {}; positive: {}; |T(r·zeta)| <= T(r): {}",
                table.real_strictly_increasing, table.real_positive, table.root_dominated
            ));
            if !(table.real_strictly_increasing && table.real_positive && table.root_dominated) {
                outcome.failure = Some(Error::Internal("boundary probe property failed".into()));
            }
            Ok(outcome)
        }
        Command::Aux {
            p,
            degree,
            n,
            algorithm,
            out,
        } => {
            let p = prime(*p)?;
            let order = check_order(n.unwrap_or(degree * degree + degree))?;
            let tab = generate(*algorithm, p, order);
            let scheme = build_aux(&tab, *degree)?;
            let format = out.format.unwrap_or(Format::Json);
            let artifact = match format {
                Format::Json => scheme.to_json()?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = scheme
                        .d
                        .iter()
                        .enumerate()
                        .flat_map(|(j, row)| {
                            row.iter().enumerate().map(move |(l, x)| {
                                vec![j.to_string(), l.to_string(), format_rational(x)]
                            })
                        })
                        .collect();
                    render_with(Format::Csv, |buf| {
                        write_records(buf, &["j", "l", "d"], &rows)
                    })?
                }
            };
            let mut outcome = Outcome::new(
                artifact,
                format!("aux-p{p}-P{degree}.{}", format.extension()),
            );
            outcome.notes.push(format!(
                "rank {}, nullspace dimension {}, vanishing order {}",
                scheme.rank, scheme.nullity, scheme.achieved_vanishing
            ));
            if scheme.achieved_vanishing < degree * degree {
                outcome.failure = Some(Error::Internal(format!(
                    "vanishing order {} is below P^2 = {}",
                    scheme.achieved_vanishing,
                    degree * degree
                )));
            }
            Ok(outcome)
        }
        Command::Decay {
            p,
            degree,
            alpha,
            kmax,
            prec,
            scheme,
            out,
        } => {
            let p = prime(*p)?;
            let kmax = check_kmax(p, *kmax)?;
            let prec = check_prec(*prec)?;
            let alpha = real_alpha(alpha)?;
            let scheme = load_or_build_scheme(p, *degree, scheme.as_deref())?;
            let report = decay_experiment(&scheme, &alpha, kmax, prec)?;
            let format = out.format.unwrap_or(Format::Csv);
            let artifact = render_with(format, |buf| report.write_csv(buf))?;
            let mut outcome = Outcome::new(
                artifact,
                format!("decay-p{p}-P{}.{}", scheme.degree, format.extension()),
            );
            if let Some(c) = report.log_c {
                outcome.notes.push(format!("fitted log C = {c:.6}"));
            }
            let target = (scheme.degree * scheme.degree) as f64 - DECAY_EPSILON;
            let low: Vec<String> = report
                .rows
                .iter()
                .filter(|r| r.k >= 1)
                .filter(|r| r.decay_exponent.is_none_or(|e| e < target))
                .map(|r| match r.decay_exponent {
                    Some(e) => format!("k={} ({e:.4})", r.k),
                    None => format!("k={} (indeterminate)", r.k),
                })
                .collect();
            if !low.is_empty() {
                outcome.failure = Some(Error::Internal(format!(
                    "decay exponent below {target} at {}",
                    low.join(", ")
                )));
            }
            Ok(outcome)
        }
        Command::Ledger {
            p,
            degree,
            alpha,
            kmax,
            out,
        } => {
            let p = prime(*p)?;
            let kmax = check_kmax(p, *kmax)?;
            let alpha = real_alpha(alpha)?;
            let scheme = load_or_build_scheme(p, *degree, None)?;
            let ledger = height_ledger(&scheme, &alpha, kmax)?;
            let format = out.format.unwrap_or(Format::Csv);
            let artifact = render_with(format, |buf| ledger.write_csv(buf))?;
            let mut outcome = Outcome::new(
                artifact,
                format!("ledger-p{p}-P{degree}.{}", format.extension()),
            );
            outcome.notes.push(format!(
                "C0 = {:.6}, C1 = {:.6}, c2 = {:.6}, crossover P* = {}, analytic dominates at P = {}: {}",
                ledger.c0,
                ledger.c1,
                ledger.c2,
                ledger.crossover_p,
                degree,
                ledger.analytic_dominates()
            ));
            Ok(outcome)
        }
        Command::Regularity {
            p,
            alpha,
            kmax,
            out,
        } => {
            let p = prime(*p)?;
            let alpha = real_alpha(alpha)?;
            let report = regularity_check(p, &alpha, *kmax)?;
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.k.to_string(),
                        r.g.to_string(),
                        r.denominator_positive.to_string(),
                        format!("{:.17e}", r.denominator_approx),
                    ]
                })
                .collect();
            let format = out.format.unwrap_or(Format::Csv);
            let artifact = render_with(format, |buf| {
                write_records(
                    buf,
                    &["k", "g", "denominator_positive", "denominator"],
                    &rows,
                )
            })?;
            let mut outcome =
                Outcome::new(artifact, format!("regularity-p{p}.{}", format.extension()));
            if !report.regular() {
                outcome.failure = Some(Error::Internal("orbit meets a singular point".into()));
            }
            Ok(outcome)
        }
        Command::Golden { p, out } => {
            let golden = golden_table();
            let filter = p.map(prime).transpose()?;
            if let Some(q) = filter {
                if golden.column(q).is_none() {
                    return Err(Error::InvalidArgument(format!(
                        "no reference column for p = {q}"
                    )));
                }
            }
            let rows: Vec<CoeffRow> = golden
                .entries()
                .filter(|(q, _, _)| filter.is_none_or(|f| f == *q))
                .map(|(q, n, x)| CoeffRow {
                    p: q.get(),
                    n,
                    numerator: x.numer().to_string(),
                    denominator: x.denom().to_string(),
                })
                .collect();
            let format = out.format.unwrap_or(Format::Csv);
            let artifact = render_with(format, |buf| write_coeff_rows(buf, &rows))?;
            Ok(Outcome::new(
                artifact,
                format!("golden.{}", format.extension()),
            ))
        }
        Command::Compare { a, b, out } => {
            let diff = compare_tables(a, b)?;
            let rows: Vec<Vec<String>> = diff
                .iter()
                .map(|m| {
                    vec![
                        m.p.to_string(),
                        m.n.to_string(),
                        m.expected.as_ref().map(format_rational).unwrap_or_default(),
                        m.found.as_ref().map(format_rational).unwrap_or_default(),
                    ]
                })
                .collect();
            let format = out.format.unwrap_or(Format::Csv);
            let artifact = render_with(format, |buf| {
                write_records(buf, &["p", "n", "expected", "found"], &rows)
            })?;
            let mut outcome = Outcome::new(artifact, format!("compare.{}", format.extension()));
            outcome
                .notes
                .push(format!("{} mismatching rows", diff.len()));
            if !diff.is_empty() {
                outcome.failure = Some(Error::Internal(format!(
                    "tables differ in {} rows",
                    diff.len()
                )));
            }
            Ok(outcome)
        }
    }
}

fn load_or_build_scheme(p: Prime, degree: usize, path: Option<&Path>) -> Result<AuxScheme> {
    match path {
        Some(path) => {
            let scheme = AuxScheme::from_json(&fs::read_to_string(path)?)?;
            if scheme.p != p {
                return Err(Error::InvalidArgument(format!(
                    "scheme file is for p = {}, not {p}",
                    scheme.p
                )));
            }
            let order = scheme.degree * scheme.degree + scheme.degree;
            let tab = generate(Algorithm::DiffRecurrence, p, order);
            let v = verify_vanishing(&scheme, &tab, order)?;
            if !v.at_least(scheme.degree * scheme.degree) {
                return Err(Error::Precondition(format!(
                    "scheme vanishes only to order {}",
                    v.order()
                )));
            }
            Ok(scheme)
        }
        None => {
            let order = check_order(degree * degree + degree)?;
            build_aux(&generate(Algorithm::LogExp, p, order), degree)
        }
    }
}

/// One row of a table comparison; a missing side is `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub p: u64,
    pub n: usize,
    pub expected: Option<ExactRational>,
    pub found: Option<ExactRational>,
}

/// Exact differences between two coefficient CSV files, keyed by `(p, n)`.
pub fn compare_tables(path_a: &Path, path_b: &Path) -> Result<Vec<Mismatch>> {
    let read = |path: &Path| -> Result<BTreeMap<(u64, usize), ExactRational>> {
        let rows = read_coeff_csv(fs::File::open(path)?).map_err(|e| match e {
            Error::Parse { line, msg } => Error::Parse {
                line,
                msg: format!("{}: {msg}", path.display()),
            },
            other => other,
        })?;
        Ok(rows.into_iter().map(|(p, n, x)| ((p, n), x)).collect())
    };
    let a = read(path_a)?;
    let b = read(path_b)?;
    let mut keys: Vec<_> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    Ok(keys
        .into_iter()
        .filter(|k| a.get(k) != b.get(k))
        .map(|(p, n)| Mismatch {
            p,
            n,
            expected: a.get(&(p, n)).cloned(),
            found: b.get(&(p, n)).cloned(),
        })
        .collect())
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Coeffs { out, .. }
        | Command::Verify { out, .. }
        | Command::Eval { out, .. }
        | Command::Iterate { out, .. }
        | Command::Probe { out, .. }
        | Command::Aux { out, .. }
        | Command::Decay { out, .. }
        | Command::Ledger { out, .. }
        | Command::Regularity { out, .. }
        | Command::Golden { out, .. }
        | Command::Compare { out, .. } => out,
    }
}

fn destination(cmd: &Command, outcome: &Outcome) -> Option<PathBuf> {
    if let Some(path) = &output_args(cmd).output {
        return Some(path.clone());
    }
    std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|dir| PathBuf::from(dir).join(&outcome.default_name))
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// Parses arguments, runs the command, writes the artifact, and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let artifact = ensure_newline(outcome.artifact.clone());
    let written = match destination(&cli.command, &outcome) {
        Some(path) => path
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .map_or(Ok(()), fs::create_dir_all)
            .and_then(|_| fs::write(&path, &artifact))
            .map(|_| Some(path)),
        None => stdout.write_all(artifact.as_bytes()).map(|_| None),
    };
    match written {
        Ok(Some(path)) => {
            let _ = writeln!(stderr, "wrote {}", path.display());
        }
        Ok(None) => {}
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    }
    for note in &outcome.notes {
        let _ = writeln!(stderr, "{note}");
    }
    match outcome.failure {
        Some(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
        None => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::COEFF_CSV_HEADER;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["tp-mahler"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn coeffs_csv_matches_reference_column() {
        let (code, out, _) = run_args(&["coeffs", "--p", "2", "--n", "20", "--algorithm", "diff"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some(COEFF_CSV_HEADER.join(",").as_str()));
        assert!(out.contains("2,20,144427,262144\n"));
        assert_eq!(out.lines().count(), 22);
    }

    #[test]
    fn invalid_configuration_exits_one() {
        assert_eq!(run_args(&["coeffs", "--p", "4"]).0, 1);
        assert_eq!(run_args(&["coeffs", "--p", "2", "--algorithm", "fft"]).0, 1);
        assert_eq!(run_args(&["eval", "--p", "2", "--prec", "4"]).0, 1);
        assert_eq!(run_args(&["nonsense"]).0, 1);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn precondition_exits_two() {
        let (code, _, err) = run_args(&["eval", "--p", "2", "--alpha", "1"]);
        assert_eq!(code, 2);
        assert!(err.contains("|α| < 1"));
        assert_eq!(run_args(&["aux", "--p", "2", "--P", "3", "--n", "5"]).0, 2);
    }

    #[test]
    fn eval_at_zero() {
        let (code, out, _) = run_args(&["eval", "--p", "2", "--alpha", "0", "--prec", "128"]);
        assert_eq!(code, 0);
        let product = out.lines().nth(1).unwrap();
        assert!(product.starts_with("product,0/1,1.000"));
        assert!(product.ends_with(",0,0,1,true"));
    }

    #[test]
    fn json_table_output() {
        let (code, out, _) =
            run_args(&["regularity", "--p", "2", "--kmax", "1", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);
        assert_eq!(v[0]["g"], "1");
    }

    #[test]
    fn aux_scheme_json() {
        let (code, out, err) = run_args(&["aux", "--p", "2", "--P", "2"]);
        assert_eq!(code, 0);
        let scheme = AuxScheme::from_json(out.trim()).unwrap();
        assert_eq!(scheme.degree, 2);
        assert!(err.contains("vanishing order 4"));
    }
}
