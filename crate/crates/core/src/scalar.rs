//! Dual-mode numerics.
//!
//! Every computation in this crate runs either in binary floating point
//! (`f64`) or in exact arbitrary-precision rationals (`BigRational`). The
//! algorithms are generic over [`Real`]; the mode is fixed by the type
//! parameter, so one evaluation can never mix the two representations.
//! [`Scalar`] is the tagged value used at API boundaries.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::expr::{EvalError, Func};

/// Largest exponent magnitude accepted by exact integer powers.
const MAX_EXACT_EXPONENT: u64 = 1 << 20;
/// Largest result size (in bits) accepted by exact integer powers.
const MAX_EXACT_BITS: u64 = 1 << 26;
/// Largest decimal exponent accepted by [`parse_exact`].
const MAX_LITERAL_EXPONENT: u32 = 4096;

/// Arithmetic mode of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Float,
    Rational,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Float => f.write_str("float"),
            Mode::Rational => f.write_str("rational"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "float" => Ok(Mode::Float),
            "rational" => Ok(Mode::Rational),
            other => Err(format!("unknown mode `{other}` (expected float|rational)")),
        }
    }
}

/// A real number type the library can compute with.
pub trait Real:
    Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const MODE: Mode;

    fn from_rational(r: &BigRational) -> Self;
    fn from_i64(i: i64) -> Self;
    /// `mantissa / 10^scale`.
    fn from_decimal(mantissa: u64, scale: u32) -> Self;
    fn to_f64(&self) -> f64;
    fn to_scalar(&self) -> Scalar;
    /// Exact value as an integer, if it is one and fits.
    fn as_integer(&self) -> Option<i64>;
    fn pow_int(&self, exp: i64) -> Result<Self, EvalError>;
    fn pow_real(&self, exp: &Self) -> Result<Self, EvalError>;
    fn apply(func: Func, x: &Self) -> Result<Self, EvalError>;
    fn is_finite_value(&self) -> bool;
    /// Σ values. Floats add left to right, so prefix sums of non-negative
    /// terms stay monotone; rationals add by binary splitting to keep
    /// intermediate denominators small.
    fn sum_all(values: &[Self]) -> Self;
}

impl Real for f64 {
    const MODE: Mode = Mode::Float;

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_i64(i: i64) -> Self {
        i as f64
    }

    fn from_decimal(mantissa: u64, scale: u32) -> Self {
        // A single IEEE division of two exactly representable values is
        // correctly rounded.
        if mantissa < (1 << 53) && scale <= 22 {
            mantissa as f64 / 10f64.powi(scale as i32)
        } else {
            let r = BigRational::new(BigInt::from(mantissa), BigInt::from(10u8).pow(scale));
            ToPrimitive::to_f64(&r).unwrap_or(f64::NAN)
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_scalar(&self) -> Scalar {
        Scalar::Float(*self)
    }

    fn as_integer(&self) -> Option<i64> {
        if self.fract() == 0.0 && self.abs() < 9.0e15 {
            Some(*self as i64)
        } else {
            None
        }
    }

    fn pow_int(&self, exp: i64) -> Result<Self, EvalError> {
        if *self == 0.0 && exp < 0 {
            return Err(EvalError::DivisionByZero);
        }
        let v = if let Ok(e) = i32::try_from(exp) {
            self.powi(e)
        } else {
            self.powf(exp as f64)
        };
        finite(v, "^")
    }

    fn pow_real(&self, exp: &Self) -> Result<Self, EvalError> {
        if let Some(e) = exp.as_integer() {
            return self.pow_int(e);
        }
        if *self < 0.0 {
            return Err(EvalError::DomainError {
                op: "^",
                detail: format!("negative base {self} with non-integer exponent {exp}"),
            });
        }
        if *self == 0.0 && *exp < 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        finite(self.powf(*exp), "^")
    }

    fn apply(func: Func, x: &Self) -> Result<Self, EvalError> {
        let v = match func {
            Func::Log => {
                if *x <= 0.0 {
                    return Err(EvalError::DomainError {
                        op: "log",
                        detail: format!("argument {x} is not positive"),
                    });
                }
                x.ln()
            }
            Func::Exp => x.exp(),
            Func::Sqrt => {
                if *x < 0.0 {
                    return Err(EvalError::DomainError {
                        op: "sqrt",
                        detail: format!("argument {x} is negative"),
                    });
                }
                x.sqrt()
            }
            Func::Abs => x.abs(),
            Func::Min | Func::Max => unreachable!("binary functions are evaluated by the caller"),
        };
        finite(v, func.name())
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn sum_all(values: &[Self]) -> Self {
        values.iter().sum()
    }
}

fn finite(v: f64, op: &'static str) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite { op })
    }
}

impl Real for BigRational {
    const MODE: Mode = Mode::Rational;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_i64(i: i64) -> Self {
        BigRational::from_integer(BigInt::from(i))
    }

    fn from_decimal(mantissa: u64, scale: u32) -> Self {
        BigRational::new(BigInt::from(mantissa), BigInt::from(10u8).pow(scale))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_scalar(&self) -> Scalar {
        Scalar::Rational(self.clone())
    }

    fn as_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    fn pow_int(&self, exp: i64) -> Result<Self, EvalError> {
        if exp.unsigned_abs() > MAX_EXACT_EXPONENT {
            return Err(EvalError::Overflow { op: "^" });
        }
        if self.is_zero() {
            return if exp < 0 {
                Err(EvalError::DivisionByZero)
            } else if exp == 0 {
                Ok(BigRational::one())
            } else {
                Ok(BigRational::zero())
            };
        }
        let bits = self.numer().bits().max(self.denom().bits());
        if bits.saturating_mul(exp.unsigned_abs()) > MAX_EXACT_BITS {
            return Err(EvalError::Overflow { op: "^" });
        }
        let e = i32::try_from(exp).map_err(|_| EvalError::Overflow { op: "^" })?;
        Ok(Pow::pow(self, e))
    }

    fn pow_real(&self, exp: &Self) -> Result<Self, EvalError> {
        match exp.as_integer() {
            Some(e) => self.pow_int(e),
            None => Err(EvalError::RationalUnsupported {
                what: format!("non-integer exponent {exp}"),
            }),
        }
    }

    fn apply(func: Func, x: &Self) -> Result<Self, EvalError> {
        match func {
            Func::Abs => Ok(x.abs()),
            Func::Log | Func::Exp | Func::Sqrt => Err(EvalError::RationalUnsupported {
                what: format!("function {}", func.name()),
            }),
            Func::Min | Func::Max => unreachable!("binary functions are evaluated by the caller"),
        }
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn sum_all(values: &[Self]) -> Self {
        match values.len() {
            0 => BigRational::zero(),
            1 => values[0].clone(),
            len => {
                let (a, b) = values.split_at(len / 2);
                Self::sum_all(a) + Self::sum_all(b)
            }
        }
    }
}

/// A value tagged with its arithmetic mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Float(f64),
    Rational(BigRational),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Float(_) => Mode::Float,
            Scalar::Rational(_) => Mode::Rational,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Float(v) => *v,
            Scalar::Rational(r) => Real::to_f64(r),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// JSON form: floats as numbers, rationals as `{"num": "...", "den": "..."}`.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Scalar::Float(v) => float_json(*v),
            Scalar::Rational(r) => serde_json::json!({
                "num": r.numer().to_string(),
                "den": r.denom().to_string(),
            }),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Float(v) => write!(f, "{v}"),
            Scalar::Rational(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// Shortest round-trip JSON number; non-finite values become strings.
pub fn float_json(v: f64) -> serde_json::Value {
    match serde_json::Number::from_f64(v) {
        Some(n) => serde_json::Value::Number(n),
        None => serde_json::Value::String(v.to_string()),
    }
}

/// Parses an exact number: an optionally signed decimal with optional
/// exponent (`-1.25e-3`) or a fraction `p/q` of such decimals.
pub fn parse_exact(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n = parse_exact_decimal(num.trim())?;
        let d = parse_exact_decimal(den.trim())?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    parse_exact_decimal(text)
}

fn parse_exact_decimal(text: &str) -> Option<BigRational> {
    let (negative, rest) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (body, exponent) = match rest.find(['e', 'E']) {
        Some(pos) => (&rest[..pos], rest[pos + 1..].parse::<i32>().ok()?),
        None => (rest, 0),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    if exponent.unsigned_abs() > MAX_LITERAL_EXPONENT {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mantissa: BigInt = digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let mut value = if scale >= 0 {
        BigRational::from_integer(mantissa * Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(mantissa, Pow::pow(&ten, scale.unsigned_abs()))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Exact rational value of a finite binary float.
pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_f64(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exact_parsing() {
        assert_eq!(parse_exact("0.5"), Some(q(1, 2)));
        assert_eq!(parse_exact("-1/3"), Some(q(-1, 3)));
        assert_eq!(parse_exact("1.5e2"), Some(q(150, 1)));
        assert_eq!(parse_exact("2.5E-1"), Some(q(1, 4)));
        assert_eq!(parse_exact(".25"), Some(q(1, 4)));
        assert_eq!(parse_exact("1/0"), None);
        assert_eq!(parse_exact("abc"), None);
        assert_eq!(parse_exact(""), None);
    }

    #[test]
    fn decimal_literals_are_correctly_rounded() {
        assert_eq!(<f64 as Real>::from_decimal(1, 1), 0.1);
        assert_eq!(<f64 as Real>::from_decimal(12345, 3), 12.345);
        assert_eq!(BigRational::from_decimal(5, 1), q(1, 2));
    }

    #[test]
    fn rational_powers() {
        assert_eq!(q(2, 3).pow_int(3).unwrap(), q(8, 27));
        assert_eq!(q(2, 3).pow_int(-2).unwrap(), q(9, 4));
        assert_eq!(BigRational::zero().pow_int(-1), Err(EvalError::DivisionByZero));
        assert!(matches!(
            q(2, 1).pow_real(&q(1, 2)),
            Err(EvalError::RationalUnsupported { .. })
        ));
        assert_eq!(q(3, 1).pow_int(1 << 21), Err(EvalError::Overflow { op: "^" }));
    }

    #[test]
    fn float_domain_errors() {
        assert!(matches!((-2.0f64).pow_real(&0.5), Err(EvalError::DomainError { .. })));
        assert_eq!((-2.0f64).pow_real(&3.0).unwrap(), -8.0);
        assert_eq!(0.0f64.pow_int(-1), Err(EvalError::DivisionByZero));
        assert!(matches!(<f64 as Real>::apply(Func::Log, &0.0), Err(EvalError::DomainError { .. })));
    }

    #[test]
    fn scalar_json() {
        assert_eq!(Scalar::Rational(q(-1, 5)).to_json(), serde_json::json!({"num": "-1", "den": "5"}));
        assert_eq!(Scalar::Float(0.1).to_json().to_string(), "0.1");
    }
}
