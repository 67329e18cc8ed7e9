//! α-, β- and γ-duals of ℓ(λ, p) through the matrices D^a and B^a.
//!
//! With y = Λx, a_n x_n = (D^a y)_n and Σ_{k≤n} a_k x_k = (B^a y)_n, so the
//! dual conditions on a become mapping conditions on D^a and B^a over ℓ(p).

use serde::Serialize;

use crate::error::Result;
use crate::matrix_class::subset_sup_f64;
use crate::scalar::{Mode, Real};
use crate::seq::{ExponentSeq, Exponents, LambdaSeq, SeqSpec};
use crate::verdict::{exists_on_grid, series_verdict, sup_verdict, Samples, Thresholds, Verdict, VerdictTag, GRID};

/// D^a: row n has d_{n,n−1} = −λ_{n−1} a_n / δ_n and d_nn = λ_n a_n / δ_n,
/// δ_n = λ_n − λ_{n−1}.
#[derive(Debug, Clone, PartialEq)]
pub struct DualMatrixD<T> {
    diag: Vec<T>,
    sub: Vec<T>,
}

impl<T: Real> DualMatrixD<T> {
    pub fn horizon(&self) -> usize {
        self.diag.len() - 1
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    /// d_{n,n−1}; the n = 0 slot is zero.
    pub fn sub(&self) -> &[T] {
        &self.sub
    }

    pub fn entry(&self, n: usize, k: usize) -> T {
        if k == n {
            self.diag[n].clone()
        } else if k + 1 == n {
            self.sub[n].clone()
        } else {
            T::zero()
        }
    }

    /// (D^a y)_n for n ≤ horizon.
    pub fn apply(&self, y: &[T]) -> Vec<T> {
        (0..=self.horizon())
            .map(|n| {
                let d = self.diag[n].clone() * y[n].clone();
                if n == 0 {
                    d
                } else {
                    d + self.sub[n].clone() * y[n - 1].clone()
                }
            })
            .collect()
    }
}

/// Rows 0..=horizon of D^a.
pub fn build_d<T: Real>(a: &SeqSpec, lambda: &LambdaSeq, horizon: usize) -> Result<DualMatrixD<T>> {
    let table = lambda.table::<T>(horizon.max(1))?;
    let a = a.prefix::<T>(horizon + 1)?;
    let mut diag = Vec::with_capacity(horizon + 1);
    let mut sub = Vec::with_capacity(horizon + 1);
    for n in 0..=horizon {
        let scale = a[n].clone() / table.gap(n).clone();
        diag.push(table.value(n).clone() * scale.clone());
        sub.push(-(table.prev(n) * scale));
    }
    Ok(DualMatrixD { diag, sub })
}

/// B^a: b_nk = s¹_k for k < n, s²_n on the diagonal, zero above.
#[derive(Debug, Clone, PartialEq)]
pub struct DualMatrixB<T> {
    s1: Vec<T>,
    s2: Vec<T>,
}

impl<T: Real> DualMatrixB<T> {
    pub fn horizon(&self) -> usize {
        self.s1.len() - 1
    }

    /// s¹_k = (a_k/δ_k − a_{k+1}/δ_{k+1}) λ_k.
    pub fn s1(&self) -> &[T] {
        &self.s1
    }

    /// s²_k = a_k λ_k / δ_k.
    pub fn s2(&self) -> &[T] {
        &self.s2
    }

    pub fn entry(&self, n: usize, k: usize) -> T {
        match k.cmp(&n) {
            std::cmp::Ordering::Less => self.s1[k].clone(),
            std::cmp::Ordering::Equal => self.s2[k].clone(),
            std::cmp::Ordering::Greater => T::zero(),
        }
    }

    /// (B^a y)_n for n ≤ horizon, accumulating the s¹ prefix.
    pub fn apply(&self, y: &[T]) -> Vec<T> {
        let mut acc = T::zero();
        let mut out = Vec::with_capacity(self.s1.len());
        for n in 0..=self.horizon() {
            out.push(acc.clone() + self.s2[n].clone() * y[n].clone());
            acc = acc + self.s1[n].clone() * y[n].clone();
        }
        out
    }
}

/// s¹, s² for k ≤ horizon; reads a and λ up to horizon + 1.
pub fn build_b<T: Real>(a: &SeqSpec, lambda: &LambdaSeq, horizon: usize) -> Result<DualMatrixB<T>> {
    let table = lambda.table::<T>(horizon + 1)?;
    let a = a.prefix::<T>(horizon + 2)?;
    let ratio: Vec<T> = (0..=horizon + 1).map(|k| a[k].clone() / table.gap(k).clone()).collect();
    let s1 = (0..=horizon)
        .map(|k| (ratio[k].clone() - ratio[k + 1].clone()) * table.value(k).clone())
        .collect();
    let s2 = (0..=horizon).map(|k| ratio[k].clone() * table.value(k).clone()).collect();
    Ok(DualMatrixB { s1, s2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dual {
    Alpha,
    Beta,
    Gamma,
}

impl std::str::FromStr for Dual {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alpha" => Ok(Dual::Alpha),
            "beta" => Ok(Dual::Beta),
            "gamma" => Ok(Dual::Gamma),
            other => Err(format!("unknown dual `{other}` (expected alpha|beta|gamma)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    #[serde(rename = "M")]
    pub m: f64,
    pub tag: VerdictTag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualReport {
    pub dual: Dual,
    #[serde(rename = "N")]
    pub horizon: usize,
    pub k1_size: usize,
    pub k2_size: usize,
    /// Sup-type condition on K1.
    pub part_i: Verdict,
    /// ∃M condition on K2.
    pub part_ii: Verdict,
    pub grid: Vec<GridPoint>,
    /// Largest value entering part (i).
    pub k1_sup: f64,
    pub combined: Verdict,
}

fn k_samples(exps: &Exponents, upto: usize, k1: bool, f: impl Fn(usize) -> f64) -> Vec<(usize, f64)> {
    (0..=upto).filter(|&k| exps.in_k1(k) == k1).map(|k| (k, f(k))).collect()
}

fn sample_exponents(p: &ExponentSeq, horizon: usize) -> Result<Exponents> {
    let exps = p.sample(horizon)?;
    for k in 0..=horizon {
        if exps.in_k2(k) {
            exps.conjugate(k)?;
        }
    }
    Ok(exps)
}

/// Column sign-split sups of D^a against K1 (sup form) and K2 (conjugate
/// sums over the M grid). Column k of D^a holds d_kk and d_{k+1,k}.
pub fn alpha_dual_check(
    a: &SeqSpec,
    lambda: &LambdaSeq,
    p: &ExponentSeq,
    horizon: usize,
    th: &Thresholds,
) -> Result<DualReport> {
    let exps = sample_exponents(p, horizon)?;
    let d = build_d::<f64>(a, lambda, horizon + 1)?;
    let col_sup: Vec<f64> = (0..=horizon).map(|k| subset_sup_f64(&[d.diag()[k], d.sub()[k + 1]])).collect();
    let k1 = k_samples(&exps, horizon, true, |k| col_sup[k].powf(exps.p(k)));
    let (part_i, _) = sup_verdict(Samples::new(horizon, &k1), th);
    let k1_sup = k1.iter().map(|s| s.1).fold(0.0, f64::max);
    let mut results = Vec::with_capacity(GRID.len());
    for &m in &GRID {
        let terms = k_samples(&exps, horizon, false, |k| {
            (col_sup[k] / m).powf(exps.conjugate(k).expect("K2 index"))
        });
        let total = terms.iter().map(|t| t.1).sum();
        results.push((m, series_verdict(Samples::new(horizon, &terms), total, th).0));
    }
    Ok(finish(Dual::Alpha, horizon, &exps, part_i, results, k1_sup, th))
}

/// sup |s^i_k|^{p_k} on K1 and, for some M on the grid, summability and
/// boundedness of |s^i_k / M|^{p̀_k} on K2, for i = 1, 2. The β- and γ-duals
/// of ℓ(λ, p) coincide, so `dual` only labels the report.
pub fn beta_gamma_dual_check(
    a: &SeqSpec,
    lambda: &LambdaSeq,
    p: &ExponentSeq,
    horizon: usize,
    dual: Dual,
    th: &Thresholds,
) -> Result<DualReport> {
    let exps = sample_exponents(p, horizon)?;
    let b = build_b::<f64>(a, lambda, horizon)?;
    let seqs = [b.s1(), b.s2()];
    let mut part_i = Verdict::new(VerdictTag::ConvergentNumeric, "K1 is empty on the horizon", th);
    let mut k1_sup = 0.0f64;
    let mut rationale = Vec::new();
    for (i, s) in seqs.iter().enumerate() {
        let pts = k_samples(&exps, horizon, true, |k| s[k].abs().powf(exps.p(k)));
        k1_sup = pts.iter().map(|x| x.1).fold(k1_sup, f64::max);
        let (v, _) = sup_verdict(Samples::new(horizon, &pts), th);
        rationale.push(format!("s{}: {}", i + 1, v.rationale));
        part_i = Verdict::new(part_i.tag.and(v.tag), rationale.join("; "), th);
    }
    let mut results = Vec::with_capacity(GRID.len());
    for &m in &GRID {
        let mut tag = VerdictTag::ConvergentNumeric;
        let mut why = Vec::new();
        for (i, s) in seqs.iter().enumerate() {
            let terms = k_samples(&exps, horizon, false, |k| {
                (s[k].abs() / m).powf(exps.conjugate(k).expect("K2 index"))
            });
            let total = terms.iter().map(|t| t.1).sum();
            let (series, _) = series_verdict(Samples::new(horizon, &terms), total, th);
            let (sup, _) = sup_verdict(Samples::new(horizon, &terms), th);
            tag = tag.and(series.tag).and(sup.tag);
            why.push(format!("s{}: {}", i + 1, series.rationale));
        }
        results.push((m, Verdict::new(tag, why.join("; "), th)));
    }
    Ok(finish(dual, horizon, &exps, part_i, results, k1_sup, th))
}

fn finish(
    dual: Dual,
    horizon: usize,
    exps: &Exponents,
    part_i: Verdict,
    results: Vec<(f64, Verdict)>,
    k1_sup: f64,
    th: &Thresholds,
) -> DualReport {
    let k2_size = exps.k2().len();
    let part_ii = if k2_size == 0 {
        Verdict::new(VerdictTag::ConvergentNumeric, "K2 is empty on the horizon", th)
    } else {
        exists_on_grid("M", &results, th)
    };
    let combined = Verdict::new(
        part_i.tag.and(part_ii.tag),
        format!("part (i): {}; part (ii): {}", part_i.tag, part_ii.tag),
        th,
    );
    DualReport {
        dual,
        horizon,
        k1_size: exps.len() - k2_size,
        k2_size,
        part_i,
        part_ii,
        grid: results.iter().map(|(m, v)| GridPoint { m: *m, tag: v.tag }).collect(),
        k1_sup,
        combined,
    }
}

/// Dispatches to the α or β/γ check.
pub fn dual_check(
    dual: Dual,
    a: &SeqSpec,
    lambda: &LambdaSeq,
    p: &ExponentSeq,
    horizon: usize,
    th: &Thresholds,
) -> Result<DualReport> {
    match dual {
        Dual::Alpha => alpha_dual_check(a, lambda, p, horizon, th),
        Dual::Beta | Dual::Gamma => beta_gamma_dual_check(a, lambda, p, horizon, dual, th),
    }
}

/// Mode is accepted for symmetry with the other commands; the dual checks
/// raise entries to real powers and always run in floating point.
pub fn dual_mode_note(mode: Mode) -> Option<&'static str> {
    (mode == Mode::Rational).then_some(crate::paranorm::FLOAT_FALLBACK_NOTE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn lam() -> LambdaSeq {
        LambdaSeq::from_expr("k+1").unwrap()
    }

    fn th() -> Thresholds {
        Thresholds::default()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn d_for_ones() {
        let d = build_d::<BigRational>(&SeqSpec::ones(), &lam(), 10).unwrap();
        for n in 1..=10 {
            assert_eq!(d.entry(n, n), q(n as i64 + 1, 1));
            assert_eq!(d.entry(n, n - 1), q(-(n as i64), 1));
            assert_eq!(d.entry(n, n + 1), q(0, 1));
        }
        let z = build_d::<BigRational>(&SeqSpec::zero(), &lam(), 10).unwrap();
        assert!((0..=10).all(|n| (0..=10).all(|k| z.entry(n, k) == q(0, 1))));
    }

    #[test]
    fn b_examples() {
        let b = build_b::<BigRational>(&SeqSpec::ones(), &lam(), 10).unwrap();
        assert!(b.s1().iter().all(|v| *v == q(0, 1)));
        assert_eq!(b.s2()[4], q(5, 1));
        let b = build_b::<BigRational>(&SeqSpec::expr("1/(k+1)").unwrap(), &lam(), 10).unwrap();
        for k in 0..=10 {
            assert_eq!(b.s1()[k], q(1, k as i64 + 2));
            assert_eq!(b.s2()[k], q(1, 1));
        }
    }

    #[test]
    fn alpha_examples() {
        let p2 = ExponentSeq::constant("2").unwrap();
        let r = alpha_dual_check(&SeqSpec::expr("1/(n+1)^2").unwrap(), &lam(), &p2, 2000, &th()).unwrap();
        assert!(r.combined.is_convergent(), "{}", r.combined.rationale);
        let one = ExponentSeq::constant("1").unwrap();
        let r = alpha_dual_check(&SeqSpec::zero(), &lam(), &one, 500, &th()).unwrap();
        assert!(r.combined.is_convergent());
        assert_eq!(r.k1_sup, 0.0);
        let r = alpha_dual_check(&SeqSpec::ones(), &lam(), &one, 500, &th()).unwrap();
        assert!(r.part_i.is_divergent());
        assert_eq!(r.k1_sup, 501.0);
    }

    #[test]
    fn beta_examples() {
        let one = ExponentSeq::constant("1").unwrap();
        let r = beta_gamma_dual_check(&SeqSpec::ones(), &lam(), &one, 500, Dual::Beta, &th()).unwrap();
        assert!(r.combined.is_divergent());
        let p2 = ExponentSeq::constant("2").unwrap();
        let r = beta_gamma_dual_check(&SeqSpec::expr("1/(k+1)^2").unwrap(), &lam(), &p2, 2000, Dual::Gamma, &th())
            .unwrap();
        assert!(r.combined.is_convergent(), "{}", r.combined.rationale);
        let r = beta_gamma_dual_check(&SeqSpec::zero(), &lam(), &p2, 100, Dual::Beta, &th()).unwrap();
        assert!(r.combined.is_convergent());
    }
}
