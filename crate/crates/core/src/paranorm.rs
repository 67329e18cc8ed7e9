//! The paranorm h(x) = (Σ |x_n|^{p_n})^{1/M} on ℓ(p) and ℓ(λ, p), membership
//! verdicts, the strict-inclusion witness and the inclusion checks built on
//! the S-operator and on termwise exponent comparison.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Mode, Real, Scalar};
use crate::seq::{ExponentSeq, Exponents, LambdaSeq, SeqSpec, Transform};
use crate::verdict::{limit_zero_verdict, series_verdict, LimitZeroEvidence, Samples, SeriesEvidence, Thresholds, Verdict};

pub(crate) const FLOAT_FALLBACK_NOTE: &str =
    "rational mode requested; sequence or exponents need real powers, evaluated in floating point";

/// Values of a sequence on [0, N] in the arithmetic that could be honoured.
#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Exact(v) => v.len(),
            Values::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Values::Exact(v) => v.iter().map(Real::to_f64).collect(),
            Values::Float(v) => v.clone(),
        }
    }

    pub fn scalar(&self, n: usize) -> Scalar {
        match self {
            Values::Exact(v) => Scalar::Rational(v[n].clone()),
            Values::Float(v) => Scalar::Float(v[n]),
        }
    }
}

/// Samples `len` values in `mode`; rational requests that hit a real power
/// or transcendental function are re-run in floating point with a note.
pub fn sample_values(spec: &SeqSpec, len: usize, mode: Mode) -> Result<(Values, Option<&'static str>)> {
    if mode == Mode::Rational {
        match spec.prefix::<BigRational>(len) {
            Ok(v) => return Ok((Values::Exact(v), None)),
            Err(e) if e.is_rational_unsupported() => {
                return Ok((Values::Float(spec.prefix::<f64>(len)?), Some(FLOAT_FALLBACK_NOTE)));
            }
            Err(e) => return Err(e),
        }
    }
    Ok((Values::Float(spec.prefix::<f64>(len)?), None))
}

/// Terms |x_n|^{p_n} on [0, N] with running sums, from which a report can
/// be cut at any truncation N' ≤ N.
#[derive(Debug, Clone, PartialEq)]
pub struct ParanormSeries {
    exact_terms: Option<Vec<BigRational>>,
    terms: Vec<f64>,
    running: Vec<f64>,
    m: f64,
    precision_note: Option<&'static str>,
}

impl ParanormSeries {
    pub fn new(values: &Values, exps: &Exponents, note: Option<&'static str>) -> Self {
        let len = values.len().min(exps.len());
        let mut precision_note = note;
        let exact_terms = match values {
            Values::Exact(v) if exps.all_integer() => Some(
                (0..len)
                    .map(|n| {
                        let e = exps.integer(n).expect("checked integer exponents");
                        num_traits::pow(v[n].abs(), e as usize)
                    })
                    .collect::<Vec<_>>(),
            ),
            Values::Exact(_) => {
                precision_note = Some(FLOAT_FALLBACK_NOTE);
                None
            }
            Values::Float(_) => None,
        };
        let terms: Vec<f64> = match &exact_terms {
            Some(t) => t.iter().map(Real::to_f64).collect(),
            None => {
                let v = values.to_f64();
                (0..len)
                    .map(|n| match exps.integer(n) {
                        Some(e) if e <= i32::MAX as u32 => v[n].abs().powi(e as i32),
                        _ => v[n].abs().powf(exps.p(n)),
                    })
                    .collect()
            }
        };
        let mut acc = 0.0;
        let running = terms
            .iter()
            .map(|t| {
                acc += t;
                acc
            })
            .collect();
        ParanormSeries { exact_terms, terms, running, m: exps.m(), precision_note }
    }

    pub fn horizon(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    pub fn terms(&self) -> &[f64] {
        &self.terms
    }

    pub fn exact_terms(&self) -> Option<&[BigRational]> {
        self.exact_terms.as_deref()
    }

    /// P_n in floating point for every n.
    pub fn running_sums(&self) -> &[f64] {
        &self.running
    }

    /// Truncated paranorm h_n = P_n^{1/M} for every n.
    pub fn truncated_paranorms(&self) -> Vec<f64> {
        self.running.iter().map(|p| p.powf(1.0 / self.m)).collect()
    }

    pub fn partial_sum(&self, horizon: usize) -> Scalar {
        match &self.exact_terms {
            Some(t) => Scalar::Rational(BigRational::sum_all(&t[..=horizon])),
            None => Scalar::Float(self.running[horizon]),
        }
    }

    pub fn report(&self, horizon: usize, th: &Thresholds) -> ParanormReport {
        let partial_sum = self.partial_sum(horizon);
        let p = partial_sum.to_f64();
        let points: Vec<(usize, f64)> = self.terms[..=horizon].iter().copied().enumerate().collect();
        let (verdict, evidence) = series_verdict(Samples::new(horizon, &points), p, th);
        ParanormReport {
            horizon,
            estimate: p.powf(1.0 / self.m),
            m: self.m,
            partial_sum,
            tail: self.terms[horizon],
            verdict,
            evidence,
            precision_note: self.precision_note,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParanormReport {
    #[serde(rename = "N")]
    pub horizon: usize,
    pub partial_sum: Scalar,
    /// P_N^{1/M}.
    pub estimate: f64,
    #[serde(rename = "M")]
    pub m: f64,
    /// Last term t_N = |x_N|^{p_N}.
    pub tail: f64,
    pub verdict: Verdict,
    pub evidence: SeriesEvidence,
    pub precision_note: Option<&'static str>,
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon < 1 {
        return Err(Error::Spec("horizon N must be at least 1".into()));
    }
    Ok(())
}

/// Series of |y_n|^{p_n}, n ≤ N.
pub fn ellp_series(y: &SeqSpec, p: &ExponentSeq, horizon: usize, mode: Mode) -> Result<ParanormSeries> {
    check_horizon(horizon)?;
    let exps = p.sample(horizon)?;
    let (values, note) = sample_values(y, horizon + 1, mode)?;
    Ok(ParanormSeries::new(&values, &exps, note))
}

/// h on ℓ(p) truncated at N.
pub fn paranorm_ellp(y: &SeqSpec, p: &ExponentSeq, horizon: usize, mode: Mode, th: &Thresholds) -> Result<ParanormReport> {
    Ok(ellp_series(y, p, horizon, mode)?.report(horizon, th))
}

/// Both views of x ∈ ℓ(λ, p): the paranorm of Λx in ℓ(p) and, for
/// reference, the ℓ(p) paranorm of x itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaParanormReport {
    pub lambda_side: ParanormReport,
    pub x_side: ParanormReport,
}

pub fn paranorm_lambda(
    x: &SeqSpec,
    lambda: &LambdaSeq,
    p: &ExponentSeq,
    horizon: usize,
    mode: Mode,
    th: &Thresholds,
) -> Result<LambdaParanormReport> {
    let y = SeqSpec::derived(Transform::Lambda(lambda.clone()), x.clone());
    Ok(LambdaParanormReport {
        lambda_side: paranorm_ellp(&y, p, horizon, mode, th)?,
        x_side: paranorm_ellp(x, p, horizon, mode, th)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Ellp(ExponentSeq),
    EllLambda(LambdaSeq, ExponentSeq),
    C0Lambda(LambdaSeq, ExponentSeq),
}

impl Space {
    pub fn name(&self) -> &'static str {
        match self {
            Space::Ellp(_) => "ellp",
            Space::EllLambda(..) => "ell_lambda",
            Space::C0Lambda(..) => "c0_lambda",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub space: &'static str,
    pub verdict: Verdict,
    /// Paranorm estimate for ℓ-type spaces.
    pub estimate: Option<f64>,
    /// Series evidence for ℓ-type spaces.
    pub paranorm: Option<ParanormReport>,
    /// Limit-to-zero evidence for c₀(λ, p).
    pub limit: Option<LimitZeroEvidence>,
}

pub fn membership(x: &SeqSpec, space: &Space, horizon: usize, mode: Mode, th: &Thresholds) -> Result<MembershipReport> {
    match space {
        Space::Ellp(p) => {
            let r = paranorm_ellp(x, p, horizon, mode, th)?;
            Ok(MembershipReport {
                space: space.name(),
                verdict: r.verdict.clone(),
                estimate: Some(r.estimate),
                paranorm: Some(r),
                limit: None,
            })
        }
        Space::EllLambda(l, p) => {
            let r = paranorm_lambda(x, l, p, horizon, mode, th)?.lambda_side;
            Ok(MembershipReport {
                space: space.name(),
                verdict: r.verdict.clone(),
                estimate: Some(r.estimate),
                paranorm: Some(r),
                limit: None,
            })
        }
        Space::C0Lambda(l, p) => {
            let y = SeqSpec::derived(Transform::Lambda(l.clone()), x.clone());
            let series = ellp_series(&y, p, horizon, mode)?;
            let (verdict, evidence) = limit_zero_verdict(series.terms(), th);
            Ok(MembershipReport { space: space.name(), verdict, estimate: None, paranorm: None, limit: Some(evidence) })
        }
    }
}

/// Exponents p_n = 1 + 1/(n+1) and x = Λ⁻¹(y) with y_n = (n+1)^{−1/p_n}, so
/// that |Λ_n(x)|^{p_n} = 1/(n+1) while Λ_n(x) → 0: x ∈ c₀(λ, p) \ ℓ(λ, p).
pub fn witness_strict_inclusion(lambda: &LambdaSeq) -> (SeqSpec, ExponentSeq) {
    let y = SeqSpec::expr("(n+1)^(-1/(1+1/(n+1)))").expect("witness expression parses");
    let p = ExponentSeq::new(SeqSpec::expr("1+1/(n+1)").expect("exponent expression parses"), Some(2.0))
        .expect("bound is valid");
    (SeqSpec::derived(Transform::InverseLambda(lambda.clone()), y), p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SCriterionReport {
    #[serde(rename = "N")]
    pub horizon: usize,
    pub x_in_lp: Verdict,
    pub lambda_x_in_lp: Verdict,
    pub s_x_in_lp: Verdict,
    /// x ∈ ℓ(λ,p), x ∈ ℓ(p) but S(x) divergent.
    pub forward_violation: bool,
    /// x ∈ ℓ(λ,p), S(x) ∈ ℓ(p) but x divergent.
    pub converse_violation: bool,
    pub consistent: bool,
    /// Truncations n at which h_n(Sx) ≤ h_n(x) + h_n(Λx) failed.
    pub s_triangle_violations: Vec<usize>,
    /// Truncations n at which h_n(x) ≤ h_n(Sx) + h_n(Λx) failed.
    pub x_triangle_violations: Vec<usize>,
    pub precision_note: Option<&'static str>,
}

const TRIANGLE_SLACK: f64 = 1e-12;

fn triangle_violations(lhs: &[f64], a: &[f64], b: &[f64]) -> Vec<usize> {
    (0..lhs.len())
        .filter(|&n| lhs[n] > (a[n] + b[n]) * (1.0 + TRIANGLE_SLACK))
        .collect()
}

/// Membership of x, Λx and S(x) in ℓ(p) for p_k ≥ 1, the equivalence
/// x ∈ ℓ(p) ⇔ S(x) ∈ ℓ(p) for x ∈ ℓ(λ, p) at verdict level, and the two
/// triangle inequalities between truncated paranorms at every n ≤ N.
pub fn s_criterion_check(
    x: &SeqSpec,
    lambda: &LambdaSeq,
    p: &ExponentSeq,
    horizon: usize,
    mode: Mode,
    th: &Thresholds,
) -> Result<SCriterionReport> {
    check_horizon(horizon)?;
    let exps = p.sample(horizon)?;
    if let Some(k) = (0..exps.len()).find(|&k| exps.p(k) < 1.0) {
        return Err(Error::HypothesisViolated(format!("p_{k} = {} < 1", exps.p(k))));
    }
    let lx = SeqSpec::derived(Transform::Lambda(lambda.clone()), x.clone());
    let sx = SeqSpec::derived(Transform::SOperator(lambda.clone()), x.clone());
    let mut note = None;
    let mut series = Vec::with_capacity(3);
    for spec in [x, &lx, &sx] {
        let (values, n) = sample_values(spec, horizon + 1, mode)?;
        let s = ParanormSeries::new(&values, &exps, n);
        note = note.or(s.precision_note);
        series.push(s);
    }
    let reports: Vec<ParanormReport> = series.iter().map(|s| s.report(horizon, th)).collect();
    let h: Vec<Vec<f64>> = series.iter().map(ParanormSeries::truncated_paranorms).collect();
    let (vx, vl, vs) = (&reports[0].verdict, &reports[1].verdict, &reports[2].verdict);
    let forward_violation = vl.is_convergent() && vx.is_convergent() && vs.is_divergent();
    let converse_violation = vl.is_convergent() && vs.is_convergent() && vx.is_divergent();
    let s_triangle_violations = triangle_violations(&h[2], &h[0], &h[1]);
    let x_triangle_violations = triangle_violations(&h[0], &h[2], &h[1]);
    Ok(SCriterionReport {
        horizon,
        x_in_lp: vx.clone(),
        lambda_x_in_lp: vl.clone(),
        s_x_in_lp: vs.clone(),
        forward_violation,
        converse_violation,
        consistent: !forward_violation
            && !converse_violation
            && s_triangle_violations.is_empty()
            && x_triangle_violations.is_empty(),
        s_triangle_violations,
        x_triangle_violations,
        precision_note: note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExponentCase {
    /// p_n > 1 for every sampled n.
    AboveOne,
    /// p_n < 1 for every sampled n.
    BelowOne,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentInclusionReport {
    #[serde(rename = "N")]
    pub horizon: usize,
    pub case: ExponentCase,
    /// First m with |Λ_n(x)| < 1 for all n in [m, N]; absent when |Λ_N(x)| ≥ 1.
    pub settle_index: Option<usize>,
    /// True when there is no index range on which to compare.
    pub vacuous: bool,
    /// Indices in [m, N] where the termwise bound fails.
    pub termwise_violations: Vec<usize>,
    /// Σ |Λ_n(x)|.
    pub l1: Verdict,
    /// Σ |Λ_n(x)|^{p_n}.
    pub lp: Verdict,
    /// The implied membership failed at verdict level.
    pub implication_violation: bool,
    pub precision_note: Option<&'static str>,
}

const TERMWISE_SLACK: f64 = 1e-12;

/// Compares Σ|Λ_n x| with Σ|Λ_n x|^{p_n} when all p_n > 1 (the second is
/// dominated termwise once |Λ_n x| < 1) or all p_n < 1 (the reverse).
pub fn exponent_inclusion_check(
    x: &SeqSpec,
    lambda: &LambdaSeq,
    p: &ExponentSeq,
    horizon: usize,
    mode: Mode,
    th: &Thresholds,
) -> Result<ExponentInclusionReport> {
    check_horizon(horizon)?;
    let exps = p.sample(horizon)?;
    let case = if exps.values().iter().all(|&v| v > 1.0) {
        ExponentCase::AboveOne
    } else if exps.values().iter().all(|&v| v < 1.0) {
        ExponentCase::BelowOne
    } else {
        return Err(Error::MixedExponents);
    };
    let lx = SeqSpec::derived(Transform::Lambda(lambda.clone()), x.clone());
    let (values, note) = sample_values(&lx, horizon + 1, mode)?;
    let lp_series = ParanormSeries::new(&values, &exps, note);
    let ones = ExponentSeq::constant("1")?.sample(horizon)?;
    let l1_series = ParanormSeries::new(&values, &ones, note);
    let abs = l1_series.terms();
    let powered = lp_series.terms();
    let settle_index = match abs.iter().rposition(|v| *v >= 1.0) {
        None => Some(0),
        Some(last) if last < horizon => Some(last + 1),
        Some(_) => None,
    };
    let termwise_violations: Vec<usize> = match settle_index {
        None => Vec::new(),
        Some(m) => (m..=horizon)
            .filter(|&n| match case {
                ExponentCase::AboveOne => powered[n] > abs[n] * (1.0 + TERMWISE_SLACK),
                ExponentCase::BelowOne => abs[n] > powered[n] * (1.0 + TERMWISE_SLACK),
            })
            .collect(),
    };
    let l1 = l1_series.report(horizon, th).verdict;
    let lp = lp_series.report(horizon, th).verdict;
    let implication_violation = match case {
        ExponentCase::AboveOne => l1.is_convergent() && lp.is_divergent(),
        ExponentCase::BelowOne => lp.is_convergent() && l1.is_divergent(),
    };
    Ok(ExponentInclusionReport {
        horizon,
        case,
        settle_index,
        vacuous: settle_index.is_none(),
        termwise_violations,
        l1,
        lp,
        implication_violation,
        precision_note: lp_series.precision_note.or(note),
    })
}

/// Σ_{n≤N} |x_n|^{p_n} in exact arithmetic, or `None` when an exponent is
/// not an integer or x cannot be evaluated exactly.
pub fn exact_partial_sum(x: &SeqSpec, exps: &Exponents, horizon: usize) -> Result<Option<BigRational>> {
    let (values, _) = sample_values(x, horizon + 1, Mode::Rational)?;
    let series = ParanormSeries::new(&values, exps, None);
    Ok(series.exact_terms().map(|t| BigRational::sum_all(&t[..=horizon])))
}

/// True when every entry is exactly zero.
pub fn is_zero_sequence(values: &Values) -> bool {
    match values {
        Values::Exact(v) => v.iter().all(Zero::is_zero),
        Values::Float(v) => v.iter().all(|x| *x == 0.0),
    }
}
