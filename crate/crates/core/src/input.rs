//! Textual and JSON forms of sequences, exponent sequences and matrices.
//!
//! A sequence argument is one of
//! - inline JSON starting with `{`,
//! - `@path` to a JSON file,
//! - `list:v1,v2,...;tail=zero|const:c|repeat`,
//! - `csv:path` with a header row and `n,value` rows,
//! - a bare expression in `n` (or `k`).
//!
//! Sequence JSON uses a `kind` tag:
//! `{"kind":"expr","expr":"1/(n+1)"}`,
//! `{"kind":"list","values":["1","1/2",0.25],"tail":{"rule":"zero"}}`
//! (tail rules `zero`, `repeat`, `const` with a `value`; the string forms
//! `"zero"`, `"repeat"`, `"const:c"` are accepted too),
//! `{"kind":"transform","op":"lambda|inverse|soperator","lambda":<seq>,"of":<seq>}`,
//! `{"kind":"transform","op":"scale","factor":"2","of":<seq>}`.
//! Numbers may be JSON numbers, strings (`"1/3"`, `"2.5e-3"`) or
//! `{"num":"1","den":"3"}`.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::matrix::MatrixSpec;
use crate::scalar::parse_exact;
use crate::seq::{ExponentSeq, LambdaSeq, SeqSpec, TailRule, Transform};

fn spec_error(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

fn read_file(path: &str) -> Result<String> {
    std::fs::read_to_string(Path::new(path)).map_err(|e| spec_error(format!("cannot read `{path}`: {e}")))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| spec_error(format!("invalid JSON: {e}")))
}

/// A number in any accepted JSON form, converted exactly. JSON numbers go
/// through their shortest decimal form, so `0.1` means 1/10.
pub fn number_from_json(v: &Value) -> Result<BigRational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Object(map) => {
            let part = |key: &str| -> Result<BigInt> {
                let raw = map.get(key).ok_or_else(|| spec_error(format!("rational object needs `{key}`")))?;
                let s = match raw {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(spec_error(format!("`{key}` must be an integer"))),
                };
                s.trim().parse::<BigInt>().map_err(|_| spec_error(format!("`{key}` must be an integer, got `{s}`")))
            };
            let (num, den) = (part("num")?, part("den")?);
            if den == BigInt::from(0) {
                return Err(spec_error("zero denominator"));
            }
            return Ok(BigRational::new(num, den));
        }
        other => return Err(spec_error(format!("expected a number, got {other}"))),
    };
    parse_exact(&text).ok_or_else(|| spec_error(format!("invalid number `{text}`")))
}

fn parse_tail(text: &str) -> Result<TailRule> {
    match text.trim() {
        "zero" => Ok(TailRule::Zero),
        "repeat" => Ok(TailRule::RepeatLast),
        other => match other.strip_prefix("const:") {
            Some(c) => Ok(TailRule::Const(
                parse_exact(c).ok_or_else(|| spec_error(format!("invalid tail constant `{c}`")))?,
            )),
            None => Err(spec_error(format!("unknown tail `{other}` (expected zero|const:c|repeat)"))),
        },
    }
}

fn tail_from_json(v: &Value) -> Result<TailRule> {
    let map = match v {
        Value::String(s) => return parse_tail(s),
        Value::Object(map) => map,
        other => return Err(spec_error(format!("`tail` must be a string or object, got {other}"))),
    };
    match map.get("rule").and_then(Value::as_str) {
        Some("zero") => Ok(TailRule::Zero),
        Some("repeat") => Ok(TailRule::RepeatLast),
        Some("const") => Ok(TailRule::Const(number_from_json(
            map.get("value").ok_or_else(|| spec_error("tail rule `const` needs `value`"))?,
        )?)),
        _ => Err(spec_error("`tail.rule` must be zero|const|repeat")),
    }
}

fn parse_list(body: &str) -> Result<SeqSpec> {
    let (values, options) = body.split_once(';').unwrap_or((body, ""));
    let mut tail = TailRule::Zero;
    for opt in options.split(';').filter(|o| !o.trim().is_empty()) {
        match opt.split_once('=') {
            Some(("tail", t)) => tail = parse_tail(t)?,
            _ => return Err(spec_error(format!("unknown list option `{opt}`"))),
        }
    }
    let prefix = values
        .split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| parse_exact(v).ok_or_else(|| spec_error(format!("invalid list value `{}`", v.trim()))))
        .collect::<Result<Vec<_>>>()?;
    SeqSpec::explicit(prefix, tail)
}

/// Reads `n,value` rows after a header line; indices must run 0, 1, 2, ...
pub fn parse_csv_sequence(text: &str) -> Result<SeqSpec> {
    let mut prefix = Vec::new();
    for (line_no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let (idx, value) = line
            .split_once(',')
            .ok_or_else(|| spec_error(format!("CSV line {}: expected `n,value`", line_no + 1)))?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| spec_error(format!("CSV line {}: invalid index `{}`", line_no + 1, idx.trim())))?;
        if idx != prefix.len() {
            return Err(spec_error(format!("CSV line {}: expected index {}, got {idx}", line_no + 1, prefix.len())));
        }
        let value = value.trim();
        prefix.push(
            parse_exact(value).ok_or_else(|| spec_error(format!("CSV line {}: invalid value `{value}`", line_no + 1)))?,
        );
    }
    SeqSpec::explicit(prefix, TailRule::Zero)
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SeqJson {
    Expr {
        expr: String,
    },
    List {
        values: Vec<Value>,
        #[serde(default)]
        tail: Option<Value>,
    },
    Transform {
        op: String,
        #[serde(default)]
        lambda: Option<Value>,
        #[serde(default)]
        factor: Option<Value>,
        of: Value,
    },
}

/// Sequence from its JSON value (object or bare string).
pub fn seq_from_json(v: &Value) -> Result<SeqSpec> {
    if let Value::String(s) = v {
        return parse_seq(s);
    }
    let parsed: SeqJson =
        serde_json::from_value(v.clone()).map_err(|e| spec_error(format!("invalid sequence JSON: {e}")))?;
    match parsed {
        SeqJson::Expr { expr } => SeqSpec::expr(&expr),
        SeqJson::List { values, tail } => {
            let prefix = values.iter().map(number_from_json).collect::<Result<Vec<_>>>()?;
            let tail = match tail {
                Some(t) => tail_from_json(&t)?,
                None => TailRule::Zero,
            };
            SeqSpec::explicit(prefix, tail)
        }
        SeqJson::Transform { op, lambda, factor, of } => {
            let parent = seq_from_json(&of)?;
            let lam = || -> Result<LambdaSeq> {
                let l = lambda.as_ref().ok_or_else(|| spec_error(format!("transform `{op}` needs `lambda`")))?;
                Ok(LambdaSeq::new(seq_from_json(l)?))
            };
            let t = match op.as_str() {
                "lambda" => Transform::Lambda(lam()?),
                "inverse" => Transform::InverseLambda(lam()?),
                "soperator" => Transform::SOperator(lam()?),
                "scale" => Transform::Scale(number_from_json(
                    factor.as_ref().ok_or_else(|| spec_error("transform `scale` needs `factor`"))?,
                )?),
                other => return Err(spec_error(format!("unknown transform `{other}`"))),
            };
            Ok(SeqSpec::derived(t, parent))
        }
    }
}

/// Sequence from a command-line argument.
pub fn parse_seq(text: &str) -> Result<SeqSpec> {
    let t = text.trim();
    if t.starts_with('{') {
        return seq_from_json(&parse_json(t)?);
    }
    if let Some(path) = t.strip_prefix('@') {
        return seq_from_json(&parse_json(&read_file(path)?)?);
    }
    if let Some(body) = t.strip_prefix("list:") {
        return parse_list(body);
    }
    if let Some(path) = t.strip_prefix("csv:") {
        return parse_csv_sequence(&read_file(path)?);
    }
    SeqSpec::expr(t)
}

pub fn parse_lambda(text: &str) -> Result<LambdaSeq> {
    Ok(LambdaSeq::new(parse_seq(text)?))
}

/// Exponent sequence; JSON may carry `{"seq": <seq>, "bound": H}`.
pub fn parse_exponents(text: &str, bound: Option<f64>) -> Result<ExponentSeq> {
    let t = text.trim();
    let json = if t.starts_with('{') {
        Some(parse_json(t)?)
    } else if let Some(path) = t.strip_prefix('@') {
        Some(parse_json(&read_file(path)?)?)
    } else {
        None
    };
    match json {
        Some(Value::Object(map)) if map.contains_key("seq") => {
            let seq = seq_from_json(&map["seq"])?;
            let declared = match map.get("bound") {
                Some(b) => Some(b.as_f64().ok_or_else(|| spec_error("`bound` must be a number"))?),
                None => None,
            };
            ExponentSeq::new(seq, bound.or(declared))
        }
        Some(v) => ExponentSeq::new(seq_from_json(&v)?, bound),
        None => ExponentSeq::new(parse_seq(t)?, bound),
    }
}

/// Matrix JSON: `{"kind":"zero"}`, `{"kind":"identity"}`, `{"kind":"lambda"}`,
/// `{"kind":"diag","expr":..}`, `{"kind":"triangle","expr":..}`,
/// `{"kind":"closed_form","expr":..}`,
/// `{"kind":"banded","bands":[{"offset":-1,"expr":..}, ...]}`; the form
/// `{"kind":"matrix","form":"triangle","expr":..}` names the same kinds.
pub fn parse_matrix(text: &str, lambda: Option<&LambdaSeq>) -> Result<MatrixSpec> {
    let t = text.trim();
    let json = if t.starts_with('{') {
        parse_json(t)?
    } else if let Some(path) = t.strip_prefix('@') {
        parse_json(&read_file(path)?)?
    } else {
        return MatrixSpec::parse(t, lambda);
    };
    let mut kind = json.get("kind").and_then(Value::as_str).ok_or_else(|| spec_error("matrix JSON needs `kind`"))?;
    if kind == "matrix" {
        kind = json.get("form").and_then(Value::as_str).ok_or_else(|| spec_error("matrix JSON needs `form`"))?;
    }
    let expr = || -> Result<Expr> {
        let e = json.get("expr").and_then(Value::as_str).ok_or_else(|| spec_error(format!("`{kind}` needs `expr`")))?;
        Ok(Expr::parse(e)?)
    };
    match kind {
        "zero" => Ok(MatrixSpec::zero()),
        "identity" => Ok(MatrixSpec::identity()),
        "lambda" => MatrixSpec::parse("lambda", lambda),
        "diag" => Ok(MatrixSpec::Banded(vec![(0, expr()?)])),
        "triangle" => Ok(MatrixSpec::Triangle(expr()?)),
        "closed_form" => Ok(MatrixSpec::ClosedForm(expr()?)),
        "banded" => {
            let bands = json
                .get("bands")
                .and_then(Value::as_array)
                .ok_or_else(|| spec_error("`banded` needs a `bands` array"))?;
            let bands = bands
                .iter()
                .map(|b| {
                    let offset = b.get("offset").and_then(Value::as_i64).ok_or_else(|| spec_error("band needs integer `offset`"))?;
                    let e = b.get("expr").and_then(Value::as_str).ok_or_else(|| spec_error("band needs `expr`"))?;
                    Ok((offset, Expr::parse(e)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(MatrixSpec::Banded(bands))
        }
        other => Err(spec_error(format!("unknown matrix kind `{other}`"))),
    }
}
