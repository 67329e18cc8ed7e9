//! Command-line front end: argument parsing, dispatch and rendering.
//!
//! Exit status is 0 on success (whatever the verdict) and 2 on usage or
//! input errors. `SEQSPACE_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::duality::{dual_check, dual_mode_note, Dual};
use crate::error::{Error, Result};
use crate::input::{parse_exponents, parse_lambda, parse_matrix, parse_seq};
use crate::lambda_ops::Summation;
use crate::matrix_class::{build_tilde, classify, eval_condition, tilde_for_conditions, ConditionId, Target};
use crate::paranorm::{
    membership, paranorm_ellp, paranorm_lambda, sample_values, s_criterion_check, exponent_inclusion_check,
    witness_strict_inclusion, ParanormSeries, Space,
};
use crate::scalar::{float_json, Mode, Real, Scalar};
use crate::seq::{ExponentSeq, LambdaSeq, SeqSpec, Transform};
use crate::verdict::{window_start, Thresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "seqspace", version, about = "Weighted-mean sequence spaces on finite horizons")]
struct Cli {
    /// Arithmetic: float or rational.
    #[arg(long, global = true, default_value = "float")]
    mode: Mode,
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: Format,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Largest last-decade term for a convergent series.
    #[arg(long, global = true)]
    tail_tol: Option<f64>,
    /// Partial sums or sups above this count as growth.
    #[arg(long, global = true)]
    divergence_cap: Option<f64>,
    /// Fraction of indices in the trailing window.
    #[arg(long, global = true)]
    window_fraction: Option<f64>,
    /// Trailing/leading sup ratio for tending to zero.
    #[arg(long, global = true)]
    c0_ratio: Option<f64>,
}

impl ThresholdArgs {
    fn resolve(&self) -> Result<Thresholds> {
        let mut th = Thresholds::default();
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Spec(format!("--{name} must be positive and finite")))
            }
        };
        if let Some(v) = self.tail_tol {
            th.tail_tol = positive("tail-tol", v)?;
        }
        if let Some(v) = self.divergence_cap {
            th.divergence_cap = positive("divergence-cap", v)?;
        }
        if let Some(v) = self.window_fraction {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Spec("--window-fraction must lie in (0, 1]".into()));
            }
            th.window_fraction = v;
        }
        if let Some(v) = self.c0_ratio {
            th.c0_ratio = positive("c0-ratio", v)?;
        }
        Ok(th)
    }
}

#[derive(Debug, Args)]
struct ExpArgs {
    /// Exponent sequence p.
    #[arg(long)]
    p: String,
    /// Declared bound H ≥ sup p_k (implied for constants and lists).
    #[arg(long)]
    p_bound: Option<f64>,
}

#[derive(Debug, Args)]
struct TargetExpArgs {
    /// Target exponent sequence q (nondecreasing).
    #[arg(long)]
    q: String,
    #[arg(long)]
    q_bound: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// y = Λ(x).
    Transform {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        x: String,
        #[arg(long = "N")]
        n: usize,
        /// Evaluate each row sum directly instead of the running scan.
        #[arg(long)]
        direct: bool,
    },
    /// x = Λ⁻¹(y).
    Inverse {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        y: String,
        #[arg(long = "N")]
        n: usize,
    },
    /// S(x) = x − Λ(x).
    Soperator {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        x: String,
        #[arg(long = "N")]
        n: usize,
    },
    /// Truncated paranorm in ℓ(p), or in ℓ(λ, p) when --lambda is given.
    Paranorm {
        #[arg(long)]
        x: String,
        #[arg(long)]
        lambda: Option<String>,
        #[command(flatten)]
        p: ExpArgs,
        #[arg(long = "N")]
        n: usize,
    },
    /// Membership verdict in ellp, ell_lambda or c0_lambda.
    Member {
        #[arg(long)]
        space: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        lambda: Option<String>,
        #[command(flatten)]
        p: ExpArgs,
        #[arg(long = "N")]
        n: usize,
    },
    /// Sequence in c₀(λ, p) but not in ℓ(λ, p).
    Witness {
        #[arg(long)]
        lambda: String,
        #[arg(long = "N", default_value_t = 10_000)]
        n: usize,
    },
    /// x, Λx and S(x) in ℓ(p) for p ≥ 1.
    Thm4 {
        #[arg(long)]
        x: String,
        #[arg(long)]
        lambda: String,
        #[command(flatten)]
        p: ExpArgs,
        #[arg(long = "N")]
        n: usize,
    },
    /// Termwise comparison of Σ|Λx| and Σ|Λx|^p.
    Thm5 {
        #[arg(long)]
        x: String,
        #[arg(long)]
        lambda: String,
        #[command(flatten)]
        p: ExpArgs,
        #[arg(long = "N")]
        n: usize,
    },
    /// Dual membership of a sequence a.
    Dual {
        #[arg(long)]
        which: Dual,
        #[arg(long)]
        a: String,
        #[arg(long)]
        lambda: String,
        #[command(flatten)]
        p: ExpArgs,
        #[arg(long = "N")]
        n: usize,
    },
    /// Nonzero entries of ã.
    Tilde {
        #[arg(long = "A")]
        matrix: String,
        #[arg(long)]
        lambda: String,
        #[arg(long = "N")]
        n: usize,
    },
    /// One mapping condition, 4.6 to 4.21.
    Condition {
        #[arg(long)]
        id: String,
        #[arg(long = "A")]
        matrix: String,
        #[arg(long)]
        lambda: String,
        #[command(flatten)]
        p: ExpArgs,
        #[command(flatten)]
        q: TargetExpArgs,
        #[arg(long = "N")]
        n: usize,
    },
    /// Classification of A against lq, c0q, cq or linfq.
    Classify {
        #[arg(long = "A")]
        matrix: String,
        #[arg(long)]
        lambda: String,
        #[command(flatten)]
        p: ExpArgs,
        #[command(flatten)]
        q: TargetExpArgs,
        #[arg(long)]
        target: Target,
        #[arg(long = "N")]
        n: usize,
    },
}

/// A rendered result: JSON plus an optional tabular form used for table
/// and CSV output.
struct Output {
    json: Value,
    rows: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
}

impl Output {
    fn report(json: Value) -> Self {
        Output { json, rows: None }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let (header, rows) = self.rows_or_flat();
                let mut s = header.join(",");
                s.push('\n');
                for r in rows {
                    s.push_str(&r.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                s
            }
            Format::Table => {
                let (header, rows) = self.rows_or_flat();
                let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
                for r in &rows {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |cells: Vec<String>| -> String {
                    let padded: Vec<String> =
                        cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}", w = *w)).collect();
                    padded.join("  ").trim_end().to_string()
                };
                let mut s = line(header.iter().map(|h| h.to_string()).collect());
                s.push('\n');
                for r in rows {
                    s.push_str(&line(r));
                    s.push('\n');
                }
                s
            }
        }
    }

    fn rows_or_flat(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        match &self.rows {
            Some((h, r)) => (h.clone(), r.clone()),
            None => {
                let mut rows = Vec::new();
                flatten("", &self.json, &mut rows);
                (vec!["key", "value"], rows.into_iter().map(|(k, v)| vec![k, v]).collect())
            }
        }
    }
}

fn csv_field(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |key: &str| if prefix.is_empty() { key.to_string() } else { format!("{prefix}.{key}") };
    match v {
        Value::Object(map) => {
            if map.len() == 2 && map.contains_key("num") && map.contains_key("den") {
                let (n, d) = (map["num"].as_str().unwrap_or(""), map["den"].as_str().unwrap_or(""));
                out.push((prefix.to_string(), if d == "1" { n.to_string() } else { format!("{n}/{d}") }));
                return;
            }
            for (k, v) in map {
                flatten(&join(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn check_horizon(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Spec("--N must be at least 1".into()));
    }
    Ok(())
}

fn exponents(args: &ExpArgs) -> Result<ExponentSeq> {
    parse_exponents(&args.p, args.p_bound)
}

fn require_rational_closed(mode: Mode, closed: bool, what: &str) -> Result<()> {
    if mode == Mode::Rational && !closed {
        return Err(Error::Spec(format!("{what} needs real powers or transcendental functions; use --mode float")));
    }
    Ok(())
}

/// Runs a sequence-valued transform in the requested mode.
fn sequence_output(spec: &SeqSpec, n: usize, mode: Mode) -> Result<Output> {
    require_rational_closed(mode, spec.is_rational_closed(), "this sequence")?;
    let values: Vec<Scalar> = match mode {
        Mode::Float => spec.prefix::<f64>(n + 1)?.into_iter().map(Scalar::Float).collect(),
        Mode::Rational => spec.prefix::<BigRational>(n + 1)?.into_iter().map(Scalar::Rational).collect(),
    };
    Ok(values_output(&values, n, mode))
}

fn values_output(values: &[Scalar], n: usize, mode: Mode) -> Output {
    let json = json!({
        "N": n,
        "mode": mode.to_string(),
        "values": values.iter().map(Scalar::to_json).collect::<Vec<_>>(),
    });
    let rows = values.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_string()]).collect();
    Output { json, rows: Some((vec!["n", "value"], rows)) }
}

fn transform_direct(lambda: &LambdaSeq, x: &SeqSpec, n: usize, mode: Mode) -> Result<Output> {
    let closed = x.is_rational_closed() && lambda.generator().is_rational_closed();
    require_rational_closed(mode, closed, "this sequence")?;
    let values: Vec<Scalar> = match mode {
        Mode::Float => crate::lambda_ops::lambda_transform_with::<f64>(lambda, x, n, Summation::Direct)?
            .into_iter()
            .map(Scalar::Float)
            .collect(),
        Mode::Rational => crate::lambda_ops::lambda_transform_with::<BigRational>(lambda, x, n, Summation::Direct)?
            .into_iter()
            .map(Scalar::Rational)
            .collect(),
    };
    Ok(values_output(&values, n, mode))
}

fn witness_output(lambda: &LambdaSeq, n: usize, mode: Mode, th: &Thresholds) -> Result<Output> {
    let (w, p) = witness_strict_inclusion(lambda);
    let y = SeqSpec::derived(Transform::Lambda(lambda.clone()), w.clone());
    let (values, note) = sample_values(&y, n + 1, mode)?;
    let series = ParanormSeries::new(&values, &p.sample(n)?, note);
    let report = series.report(n, th);
    let y_abs: Vec<f64> = values.to_f64().iter().map(|v| v.abs()).collect();
    let start = window_start(n, th.window_fraction);
    let trailing_max = y_abs[start..].iter().copied().fold(0.0, f64::max);
    let c0 = membership(&w, &Space::C0Lambda(lambda.clone(), p.clone()), n, mode, th)?;
    let (x_values, _) = sample_values(&w, n.min(9) + 1, mode)?;
    let json = json!({
        "N": n,
        "exponents": "p_n = 1 + 1/(n+1)",
        "lambda_transform": "(n+1)^(-1/p_n)",
        "x_prefix": (0..x_values.len()).map(|i| x_values.scalar(i).to_json()).collect::<Vec<_>>(),
        "partial_sum": report.partial_sum.to_json(),
        "trailing_window_start": start,
        "trailing_max_abs_lambda_x": float_json(trailing_max),
        "c0_lambda": to_json(&c0.verdict),
        "ell_lambda": to_json(&report.verdict),
        "precision_note": report.precision_note,
    });
    Ok(Output::report(json))
}

fn tilde_output(matrix: &str, lambda: &LambdaSeq, n: usize, mode: Mode) -> Result<Output> {
    let a = parse_matrix(matrix, Some(lambda))?;
    let closed = a.is_rational_closed() && lambda.generator().is_rational_closed();
    require_rational_closed(mode, closed, "this matrix")?;
    let entries: Vec<(usize, usize, Scalar)> = match mode {
        Mode::Float => {
            let t = build_tilde::<f64>(&a, lambda, n)?;
            collect_entries(t.entries().rows(), Scalar::Float)
        }
        Mode::Rational => {
            let t = build_tilde::<BigRational>(&a, lambda, n)?;
            collect_entries(t.entries().rows(), Scalar::Rational)
        }
    };
    let json = json!({
        "N": n,
        "mode": mode.to_string(),
        "entries": entries.iter().map(|(r, c, v)| json!({"n": r, "k": c, "value": v.to_json()})).collect::<Vec<_>>(),
    });
    let rows = entries.iter().map(|(r, c, v)| vec![r.to_string(), c.to_string(), v.to_string()]).collect();
    Ok(Output { json, rows: Some((vec!["n", "k", "value"], rows)) })
}

fn collect_entries<T: Real>(rows: &[Vec<(usize, T)>], wrap: fn(T) -> Scalar) -> Vec<(usize, usize, Scalar)> {
    rows.iter()
        .enumerate()
        .flat_map(|(n, row)| row.iter().map(move |(k, v)| (n, *k, wrap(v.clone()))))
        .collect()
}

fn parse_space(name: &str, lambda: Option<&str>, p: ExponentSeq) -> Result<Space> {
    let lam = || -> Result<LambdaSeq> {
        parse_lambda(lambda.ok_or_else(|| Error::Spec(format!("space `{name}` needs --lambda")))?)
    };
    match name {
        "ellp" | "lp" => Ok(Space::Ellp(p)),
        "ell_lambda" => Ok(Space::EllLambda(lam()?, p)),
        "c0_lambda" => Ok(Space::C0Lambda(lam()?, p)),
        other => Err(Error::Spec(format!("unknown space `{other}` (expected ellp|ell_lambda|c0_lambda)"))),
    }
}

fn with_note(mut json: Value, note: Option<&'static str>) -> Value {
    if let (Some(n), Value::Object(map)) = (note, &mut json) {
        map.insert("precision_note".into(), Value::String(n.into()));
    }
    json
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let th = cli.thresholds.resolve()?;
    let mode = cli.mode;
    match &cli.command {
        Command::Transform { lambda, x, n, direct } => {
            check_horizon(*n)?;
            let lambda = parse_lambda(lambda)?;
            let x = parse_seq(x)?;
            if *direct {
                transform_direct(&lambda, &x, *n, mode)
            } else {
                sequence_output(&SeqSpec::derived(Transform::Lambda(lambda), x), *n, mode)
            }
        }
        Command::Inverse { lambda, y, n } => {
            check_horizon(*n)?;
            let spec = SeqSpec::derived(Transform::InverseLambda(parse_lambda(lambda)?), parse_seq(y)?);
            sequence_output(&spec, *n, mode)
        }
        Command::Soperator { lambda, x, n } => {
            check_horizon(*n)?;
            let spec = SeqSpec::derived(Transform::SOperator(parse_lambda(lambda)?), parse_seq(x)?);
            sequence_output(&spec, *n, mode)
        }
        Command::Paranorm { x, lambda, p, n } => {
            let x = parse_seq(x)?;
            let p = exponents(p)?;
            let json = match lambda {
                Some(l) => to_json(&paranorm_lambda(&x, &parse_lambda(l)?, &p, *n, mode, &th)?),
                None => to_json(&paranorm_ellp(&x, &p, *n, mode, &th)?),
            };
            Ok(Output::report(json))
        }
        Command::Member { space, x, lambda, p, n } => {
            let space = parse_space(space, lambda.as_deref(), exponents(p)?)?;
            Ok(Output::report(to_json(&membership(&parse_seq(x)?, &space, *n, mode, &th)?)))
        }
        Command::Witness { lambda, n } => {
            check_horizon(*n)?;
            witness_output(&parse_lambda(lambda)?, *n, mode, &th)
        }
        Command::Thm4 { x, lambda, p, n } => {
            let r = s_criterion_check(&parse_seq(x)?, &parse_lambda(lambda)?, &exponents(p)?, *n, mode, &th)?;
            Ok(Output::report(to_json(&r)))
        }
        Command::Thm5 { x, lambda, p, n } => {
            let r = exponent_inclusion_check(&parse_seq(x)?, &parse_lambda(lambda)?, &exponents(p)?, *n, mode, &th)?;
            Ok(Output::report(to_json(&r)))
        }
        Command::Dual { which, a, lambda, p, n } => {
            check_horizon(*n)?;
            let r = dual_check(*which, &parse_seq(a)?, &parse_lambda(lambda)?, &exponents(p)?, *n, &th)?;
            Ok(Output::report(with_note(to_json(&r), dual_mode_note(mode))))
        }
        Command::Tilde { matrix, lambda, n } => {
            check_horizon(*n)?;
            tilde_output(matrix, &parse_lambda(lambda)?, *n, mode)
        }
        Command::Condition { id, matrix, lambda, p, q, n } => {
            check_horizon(*n)?;
            let id = ConditionId::parse(id)?;
            let lambda = parse_lambda(lambda)?;
            let a = parse_matrix(matrix, Some(&lambda))?;
            let tilde = tilde_for_conditions(&a, &lambda, *n, mode)?;
            let q = parse_exponents(&q.q, q.q_bound)?;
            let r = eval_condition(id, &tilde, &exponents(p)?, &q, &th)?;
            let mut json = to_json(&r);
            if let Value::Object(map) = &mut json {
                map.insert("catalog".into(), to_json(&id.catalog()));
            }
            Ok(Output::report(json))
        }
        Command::Classify { matrix, lambda, p, q, target, n } => {
            check_horizon(*n)?;
            let lambda = parse_lambda(lambda)?;
            let a = parse_matrix(matrix, Some(&lambda))?;
            let q = parse_exponents(&q.q, q.q_bound)?;
            let r = classify(&a, &lambda, &exponents(p)?, &q, *target, *n, mode, &th)?;
            let rows = r
                .conditions
                .iter()
                .map(|c| vec![c.id.to_string(), c.verdict.tag.to_string(), c.verdict.rationale.clone()])
                .chain(std::iter::once(vec![
                    "combined".to_string(),
                    r.combined.tag.to_string(),
                    r.combined.rationale.clone(),
                ]))
                .collect();
            Ok(Output { json: to_json(&r), rows: Some((vec!["condition", "verdict", "rationale"], rows)) })
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SEQSPACE_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t >= 1)
        .ok_or_else(|| Error::Spec(format!("SEQSPACE_THREADS must be a positive integer, got `{raw}`")))?;
    // A pool configured by an earlier call in the same process stays in place.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Parses `args` (program name first), runs the command and writes the
/// result to `out` or a diagnostic to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if code == 0 { 0 } else { 2 };
        }
    };
    let result = configure_threads().and_then(|_| dispatch(&cli));
    match result {
        Ok(output) => {
            if out.write_all(output.render(cli.format).as_bytes()).is_err() {
                return 1;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
