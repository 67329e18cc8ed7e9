//! Sequence descriptions: general real sequences, the weight sequence λ and
//! exponent sequences (p_k), (q_k).

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, ExponentError, LambdaViolation, Result};
use crate::expr::{Bindings, Expr};
use crate::lambda_ops::LambdaTable;
use crate::scalar::{Mode, Real};

/// How an explicit prefix continues past its last listed value.
#[derive(Debug, Clone, PartialEq)]
pub enum TailRule {
    Zero,
    Const(BigRational),
    RepeatLast,
}

/// Sequence-valued transforms that can be layered over another sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    /// y = Λ(x)
    Lambda(LambdaSeq),
    /// x = Λ⁻¹(y)
    InverseLambda(LambdaSeq),
    /// S(x)
    SOperator(LambdaSeq),
    /// c·x
    Scale(BigRational),
}

/// A real sequence (x_n), n ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqSpec {
    /// Closed form in the index; both `n` and `k` are bound to it.
    ClosedForm(Expr),
    Explicit { prefix: Vec<BigRational>, tail: TailRule },
    Derived { op: Transform, parent: Box<SeqSpec> },
}

impl SeqSpec {
    pub fn expr(text: &str) -> Result<SeqSpec> {
        Ok(SeqSpec::ClosedForm(Expr::parse(text)?))
    }

    pub fn explicit(prefix: Vec<BigRational>, tail: TailRule) -> Result<SeqSpec> {
        if prefix.is_empty() && tail == TailRule::RepeatLast {
            return Err(Error::Spec("repeat-last tail needs a non-empty prefix".into()));
        }
        Ok(SeqSpec::Explicit { prefix, tail })
    }

    /// θ = (0, 0, ...)
    pub fn zero() -> SeqSpec {
        SeqSpec::Explicit { prefix: Vec::new(), tail: TailRule::Zero }
    }

    /// e = (1, 1, ...)
    pub fn ones() -> SeqSpec {
        SeqSpec::Explicit { prefix: Vec::new(), tail: TailRule::Const(BigRational::one()) }
    }

    /// The unit vector with a one at `index`.
    pub fn unit(index: usize) -> SeqSpec {
        let mut prefix = vec![BigRational::zero(); index + 1];
        prefix[index] = BigRational::one();
        SeqSpec::Explicit { prefix, tail: TailRule::Zero }
    }

    pub fn derived(op: Transform, parent: SeqSpec) -> SeqSpec {
        SeqSpec::Derived { op, parent: Box::new(parent) }
    }

    /// Finite support is only guaranteed for explicit prefixes with a zero tail.
    pub fn has_finite_support(&self) -> bool {
        matches!(self, SeqSpec::Explicit { tail: TailRule::Zero, .. })
    }

    /// True if rational-mode evaluation can succeed structurally.
    pub fn is_rational_closed(&self) -> bool {
        match self {
            SeqSpec::ClosedForm(e) => e.is_rational_closed(),
            SeqSpec::Explicit { .. } => true,
            SeqSpec::Derived { op, parent } => {
                let op_ok = match op {
                    Transform::Lambda(l) | Transform::InverseLambda(l) | Transform::SOperator(l) => {
                        l.generator().is_rational_closed()
                    }
                    Transform::Scale(_) => true,
                };
                op_ok && parent.is_rational_closed()
            }
        }
    }

    /// The first `len` values x_0, ..., x_{len-1}.
    pub fn prefix<T: Real>(&self, len: usize) -> Result<Vec<T>> {
        match self {
            SeqSpec::ClosedForm(e) => (0..len)
                .map(|i| {
                    let i64_index = i as i64;
                    e.eval::<T>(&Bindings { n: Some(i64_index), k: Some(i64_index) })
                        .map_err(|source| Error::eval_at(i, source))
                })
                .collect(),
            SeqSpec::Explicit { prefix, tail } => {
                let mut out: Vec<T> = prefix.iter().take(len).map(T::from_rational).collect();
                if out.len() < len {
                    let fill = match tail {
                        TailRule::Zero => T::zero(),
                        TailRule::Const(c) => T::from_rational(c),
                        TailRule::RepeatLast => T::from_rational(
                            prefix.last().ok_or_else(|| Error::Spec("repeat-last tail on empty prefix".into()))?,
                        ),
                    };
                    out.resize(len, fill);
                }
                Ok(out)
            }
            SeqSpec::Derived { op, parent } => {
                let base = parent.prefix::<T>(len)?;
                match op {
                    Transform::Scale(c) => {
                        let c = T::from_rational(c);
                        Ok(base.into_iter().map(|v| c.clone() * v).collect())
                    }
                    Transform::Lambda(l) | Transform::InverseLambda(l) | Transform::SOperator(l) => {
                        if len == 0 {
                            return Ok(Vec::new());
                        }
                        let table = l.table::<T>(len - 1)?;
                        Ok(match op {
                            Transform::Lambda(_) => table.forward(&base),
                            Transform::InverseLambda(_) => table.inverse(&base),
                            _ => table.s_operator(&base),
                        })
                    }
                }
            }
        }
    }

    pub fn value<T: Real>(&self, n: usize) -> Result<T> {
        match self {
            SeqSpec::ClosedForm(e) => e
                .eval::<T>(&Bindings { n: Some(n as i64), k: Some(n as i64) })
                .map_err(|source| Error::eval_at(n, source)),
            _ => Ok(self.prefix::<T>(n + 1)?.pop().expect("prefix of length n + 1")),
        }
    }
}

/// The strictly increasing positive weight sequence λ, with λ₋₁ = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSeq {
    generator: Box<SeqSpec>,
}

/// Successful finite-horizon validation of a λ sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaReport {
    pub horizon: usize,
    pub first: f64,
    pub last: f64,
    pub mode: Mode,
    pub note: &'static str,
}

const GROWTH_NOTE: &str =
    "positivity and strict increase verified on [0, horizon]; divergence to infinity is not certified by a finite sample";

impl LambdaSeq {
    pub fn new(generator: SeqSpec) -> Self {
        LambdaSeq { generator: Box::new(generator) }
    }

    pub fn from_expr(text: &str) -> Result<Self> {
        Ok(LambdaSeq::new(SeqSpec::expr(text)?))
    }

    pub fn generator(&self) -> &SeqSpec {
        &self.generator
    }

    /// λ_0..=λ_horizon, checked for positivity and strict increase.
    pub fn table<T: Real>(&self, horizon: usize) -> Result<LambdaTable<T>> {
        let values = self.generator.prefix::<T>(horizon + 1)?;
        check_increasing(&values)?;
        Ok(LambdaTable::from_validated(values))
    }
}

fn check_increasing<T: Real>(values: &[T]) -> Result<(), LambdaViolation> {
    for (k, v) in values.iter().enumerate() {
        if !v.is_positive() {
            return Err(LambdaViolation::NonPositive(k));
        }
        if k > 0 && *v <= values[k - 1] {
            return Err(LambdaViolation::NotIncreasing(k));
        }
    }
    Ok(())
}

/// Checks positivity and strict increase of λ on [0, horizon].
///
/// Runs exactly when the generator allows it and falls back to floats
/// otherwise.
pub fn validate_lambda(spec: &LambdaSeq, horizon: usize) -> Result<LambdaReport> {
    if horizon < 1 {
        return Err(LambdaViolation::HorizonTooSmall.into());
    }
    let (first, last, mode) = match spec.table::<BigRational>(horizon) {
        Ok(t) => (Real::to_f64(t.value(0)), Real::to_f64(t.value(horizon)), Mode::Rational),
        Err(e) if e.is_rational_unsupported() => {
            let t = spec.table::<f64>(horizon)?;
            (*t.value(0), *t.value(horizon), Mode::Float)
        }
        Err(e) => return Err(e),
    };
    Ok(LambdaReport { horizon, first, last, mode, note: GROWTH_NOTE })
}

/// A bounded, strictly positive exponent sequence with a declared bound H.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSeq {
    generator: SeqSpec,
    bound: f64,
}

impl ExponentSeq {
    /// `bound` may be omitted when it can be read off the generator
    /// (constant expressions and explicit lists).
    pub fn new(generator: SeqSpec, bound: Option<f64>) -> Result<Self> {
        let bound = match bound {
            Some(b) => b,
            None => implied_bound(&generator).ok_or(ExponentError::MissingBound)?,
        };
        if !(bound.is_finite() && bound > 0.0) {
            return Err(ExponentError::InvalidBound(bound).into());
        }
        Ok(ExponentSeq { generator, bound })
    }

    pub fn constant(text: &str) -> Result<Self> {
        ExponentSeq::new(SeqSpec::expr(text)?, None)
    }

    pub fn generator(&self) -> &SeqSpec {
        &self.generator
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// p_0..=p_horizon with the derived quantities.
    pub fn sample(&self, horizon: usize) -> Result<Exponents> {
        let len = horizon + 1;
        let exact = match self.generator.prefix::<BigRational>(len) {
            Ok(v) => Some(v),
            Err(e) if e.is_rational_unsupported() => None,
            Err(e) => return Err(e),
        };
        let values: Vec<f64> = match &exact {
            Some(v) => v.iter().map(Real::to_f64).collect(),
            None => self.generator.prefix::<f64>(len)?,
        };
        for (k, &p) in values.iter().enumerate() {
            let positive = match &exact {
                Some(v) => v[k].is_positive(),
                None => p > 0.0,
            };
            if !positive || !p.is_finite() {
                return Err(ExponentError::NonPositive(k, p).into());
            }
            if p > self.bound {
                return Err(ExponentError::ExceedsBound { index: k, value: p, bound: self.bound }.into());
            }
        }
        Ok(Exponents { values, exact, bound: self.bound })
    }
}

fn implied_bound(generator: &SeqSpec) -> Option<f64> {
    match generator {
        SeqSpec::ClosedForm(e) if e.is_constant() => e.eval::<f64>(&Bindings::default()).ok(),
        SeqSpec::Explicit { prefix, tail } => {
            let tail_value = match tail {
                TailRule::Zero => None,
                TailRule::Const(c) => Some(c),
                TailRule::RepeatLast => None,
            };
            prefix
                .iter()
                .chain(tail_value)
                .map(Real::to_f64)
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
        }
        _ => None,
    }
}

/// Sampled exponents p_0..=p_N.
#[derive(Debug, Clone, PartialEq)]
pub struct Exponents {
    values: Vec<f64>,
    exact: Option<Vec<BigRational>>,
    bound: f64,
}

impl Exponents {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn p(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact(&self, k: usize) -> Option<&BigRational> {
        self.exact.as_ref().map(|v| &v[k])
    }

    /// Declared bound H.
    pub fn h(&self) -> f64 {
        self.bound
    }

    /// M = max(1, H).
    pub fn m(&self) -> f64 {
        self.bound.max(1.0)
    }

    /// Largest sampled exponent.
    pub fn sampled_sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// k ∈ K1 ⇔ p_k ≤ 1, decided exactly when the exponents are rational.
    pub fn in_k1(&self, k: usize) -> bool {
        match &self.exact {
            Some(v) => v[k] <= BigRational::one(),
            None => self.values[k] <= 1.0,
        }
    }

    pub fn in_k2(&self, k: usize) -> bool {
        !self.in_k1(k)
    }

    pub fn k1(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.in_k1(k)).collect()
    }

    pub fn k2(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.in_k2(k)).collect()
    }

    /// p̀_k = p_k / (p_k − 1), defined for p_k > 1 only.
    pub fn conjugate(&self, k: usize) -> Result<f64> {
        if self.in_k1(k) {
            return Err(Error::ConjugateUndefined(k));
        }
        let p = self.values[k];
        Ok(p / (p - 1.0))
    }

    /// p_k as a non-negative integer, when it is one exactly.
    pub fn integer(&self, k: usize) -> Option<u32> {
        match &self.exact {
            Some(v) if v[k].is_integer() => u32::try_from(v[k].to_integer()).ok(),
            _ => None,
        }
    }

    pub fn all_integer(&self) -> bool {
        (0..self.len()).all(|k| self.integer(k).is_some())
    }

    /// Checks the standing assumption on target exponents: nondecreasing.
    pub fn check_nondecreasing(&self) -> Result<()> {
        for k in 1..self.len() {
            let smaller = match &self.exact {
                Some(v) => v[k] < v[k - 1],
                None => self.values[k] < self.values[k - 1],
            };
            if smaller {
                return Err(ExponentError::NotNondecreasing(k).into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn validate_lambda_examples() {
        let ok = validate_lambda(&LambdaSeq::from_expr("k+1").unwrap(), 1000).unwrap();
        assert_eq!(ok.mode, Mode::Rational);
        assert_eq!(ok.last, 1001.0);
        assert!(ok.note.contains("not certified"));
        let err = validate_lambda(&LambdaSeq::from_expr("1").unwrap(), 10).unwrap_err();
        assert_eq!(err, Error::Lambda(LambdaViolation::NotIncreasing(1)));
        let err = validate_lambda(&LambdaSeq::from_expr("k-5").unwrap(), 10).unwrap_err();
        assert_eq!(err, Error::Lambda(LambdaViolation::NonPositive(0)));
        let err = validate_lambda(&LambdaSeq::from_expr("n+1").unwrap(), 0).unwrap_err();
        assert_eq!(err, Error::Lambda(LambdaViolation::HorizonTooSmall));
    }

    #[test]
    fn validate_lambda_falls_back_to_float() {
        let report = validate_lambda(&LambdaSeq::from_expr("exp(n)").unwrap(), 20).unwrap();
        assert_eq!(report.mode, Mode::Float);
        let err = validate_lambda(&LambdaSeq::from_expr("2 - log(n+1)").unwrap(), 20).unwrap_err();
        assert_eq!(err, Error::Lambda(LambdaViolation::NotIncreasing(1)));
    }

    #[test]
    fn explicit_tails() {
        let s = SeqSpec::explicit(vec![q(1, 1), q(2, 1)], TailRule::RepeatLast).unwrap();
        assert_eq!(s.prefix::<f64>(4).unwrap(), vec![1.0, 2.0, 2.0, 2.0]);
        let s = SeqSpec::explicit(vec![q(1, 1)], TailRule::Const(q(1, 2))).unwrap();
        assert_eq!(s.prefix::<BigRational>(3).unwrap(), vec![q(1, 1), q(1, 2), q(1, 2)]);
        let s = SeqSpec::explicit(vec![q(3, 1)], TailRule::Zero).unwrap();
        assert!(s.has_finite_support());
        assert_eq!(s.value::<f64>(100).unwrap(), 0.0);
        assert!(SeqSpec::explicit(vec![], TailRule::RepeatLast).is_err());
        assert_eq!(SeqSpec::unit(2).prefix::<f64>(4).unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn derived_sequences() {
        let lambda = LambdaSeq::from_expr("n+1").unwrap();
        let y = SeqSpec::derived(Transform::Lambda(lambda.clone()), SeqSpec::unit(0));
        assert_eq!(y.prefix::<BigRational>(3).unwrap(), vec![q(1, 1), q(1, 2), q(1, 3)]);
        let back = SeqSpec::derived(Transform::InverseLambda(lambda), y);
        assert_eq!(back.prefix::<BigRational>(3).unwrap(), vec![q(1, 1), q(0, 1), q(0, 1)]);
        let scaled = SeqSpec::derived(Transform::Scale(q(-2, 1)), SeqSpec::ones());
        assert_eq!(scaled.value::<f64>(5).unwrap(), -2.0);
    }

    #[test]
    fn exponent_partition_and_conjugate() {
        let p = ExponentSeq::new(SeqSpec::expr("1/2 + n/4").unwrap(), Some(3.0)).unwrap();
        let s = p.sample(8).unwrap();
        assert_eq!(s.k1(), vec![0, 1, 2]);
        assert_eq!(s.k2(), vec![3, 4, 5, 6, 7, 8]);
        assert_eq!(s.conjugate(2), Err(Error::ConjugateUndefined(2)));
        assert_eq!(s.conjugate(6).unwrap(), 2.0);
        assert_eq!(s.m(), 3.0);
        assert_eq!(s.integer(2), Some(1));
        assert_eq!(s.integer(1), None);
    }

    #[test]
    fn exponent_errors() {
        assert_eq!(
            ExponentSeq::new(SeqSpec::expr("1+1/(n+1)").unwrap(), None).unwrap_err(),
            Error::Exponent(ExponentError::MissingBound)
        );
        let p = ExponentSeq::constant("2").unwrap();
        assert_eq!(p.bound(), 2.0);
        let p = ExponentSeq::new(SeqSpec::expr("n").unwrap(), Some(5.0)).unwrap();
        assert_eq!(p.sample(3).unwrap_err(), Error::Exponent(ExponentError::NonPositive(0, 0.0)));
        let p = ExponentSeq::new(SeqSpec::expr("n+1").unwrap(), Some(3.0)).unwrap();
        assert!(matches!(
            p.sample(5).unwrap_err(),
            Error::Exponent(ExponentError::ExceedsBound { index: 3, .. })
        ));
        assert!(ExponentSeq::new(SeqSpec::expr("2").unwrap(), Some(-1.0)).is_err());
        let q = ExponentSeq::new(SeqSpec::expr("2 - n/10").unwrap(), Some(2.0)).unwrap();
        assert_eq!(
            q.sample(3).unwrap().check_nondecreasing().unwrap_err(),
            Error::Exponent(ExponentError::NotNondecreasing(1))
        );
    }

    #[test]
    fn float_only_exponents_still_partition() {
        let p = ExponentSeq::new(SeqSpec::expr("exp(0-n)*2").unwrap(), Some(2.0)).unwrap();
        let s = p.sample(3).unwrap();
        assert!(s.exact(0).is_none());
        assert_eq!(s.k2(), vec![0]);
        assert_eq!(s.k1(), vec![1, 2, 3]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn k1_k2_partition(offsets in proptest::collection::vec(1u32..40, 1..60)) {
                let prefix: Vec<BigRational> = offsets.iter().map(|&o| q(o as i64, 20)).collect();
                let p = ExponentSeq::new(
                    SeqSpec::explicit(prefix.clone(), TailRule::RepeatLast).unwrap(),
                    None,
                ).unwrap();
                let s = p.sample(prefix.len() - 1).unwrap();
                let (k1, k2) = (s.k1(), s.k2());
                prop_assert_eq!(k1.len() + k2.len(), prefix.len());
                for k in 0..prefix.len() {
                    prop_assert!(k1.contains(&k) != k2.contains(&k));
                    prop_assert_eq!(k1.contains(&k), prefix[k] <= BigRational::one());
                }
            }
        }
    }
}
