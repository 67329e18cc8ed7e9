//! Finite-horizon evidence for statements about infinite sequences.
//!
//! Nothing here proves convergence or divergence. Each classifier looks at
//! values sampled on [0, N] and reports `ConvergentNumeric` (bounded /
//! summable / tending to zero), `DivergentNumeric` (growth) or
//! `Inconclusive`, together with the thresholds that were applied.
//!
//! The trailing window is the last `window_fraction` of the index range;
//! the "last decade" is the last tenth.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VerdictTag {
    ConvergentNumeric,
    DivergentNumeric,
    Inconclusive,
}

impl VerdictTag {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictTag::ConvergentNumeric => "ConvergentNumeric",
            VerdictTag::DivergentNumeric => "DivergentNumeric",
            VerdictTag::Inconclusive => "Inconclusive",
        }
    }

    /// Conjunction: bounded ∧ bounded = bounded, any growth = growth.
    pub fn and(self, other: VerdictTag) -> VerdictTag {
        use VerdictTag::*;
        match (self, other) {
            (DivergentNumeric, _) | (_, DivergentNumeric) => DivergentNumeric,
            (ConvergentNumeric, ConvergentNumeric) => ConvergentNumeric,
            _ => Inconclusive,
        }
    }
}

impl std::fmt::Display for VerdictTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Largest term allowed over the last decade for a convergent series.
    pub tail_tol: f64,
    /// Partial sums or sups above this are growth.
    pub divergence_cap: f64,
    pub window_fraction: f64,
    /// Trailing sup below `c0_ratio` × leading sup counts as tending to zero.
    pub c0_ratio: f64,
    /// Slack on the log-log slope −1 of the harmonic comparison.
    pub harmonic_slope_tol: f64,
    /// Trailing log-log slope above −flat_slope counts as "not decaying".
    pub flat_slope: f64,
    /// Trailing log-log slope at or above this counts as growth.
    pub growth_slope: f64,
    /// Relative increase of a running sup tolerated inside the window.
    pub sup_flat_tol: f64,
    /// Relative spread allowed over the last decade when estimating a limit.
    pub limit_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            tail_tol: 1e-9,
            divergence_cap: 1e12,
            window_fraction: 0.25,
            c0_ratio: 0.01,
            harmonic_slope_tol: 1e-6,
            flat_slope: 0.05,
            growth_slope: 0.1,
            sup_flat_tol: 1e-3,
            limit_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub tag: VerdictTag,
    pub rationale: String,
    pub thresholds: Thresholds,
}

impl Verdict {
    pub fn new(tag: VerdictTag, rationale: impl Into<String>, thresholds: &Thresholds) -> Self {
        Verdict { tag, rationale: rationale.into(), thresholds: *thresholds }
    }

    pub fn is_convergent(&self) -> bool {
        self.tag == VerdictTag::ConvergentNumeric
    }

    pub fn is_divergent(&self) -> bool {
        self.tag == VerdictTag::DivergentNumeric
    }
}

/// Sparse samples (index, value) on [0, horizon], sorted by index. Missing
/// indices are not part of the sample set (e.g. indices outside K1).
#[derive(Debug, Clone, Copy)]
pub struct Samples<'a> {
    pub horizon: usize,
    pub points: &'a [(usize, f64)],
}

impl<'a> Samples<'a> {
    pub fn new(horizon: usize, points: &'a [(usize, f64)]) -> Self {
        Samples { horizon, points }
    }

    fn split_at_index(&self, start: usize) -> (&'a [(usize, f64)], &'a [(usize, f64)]) {
        let cut = self.points.partition_point(|(i, _)| *i < start);
        self.points.split_at(cut)
    }
}

/// First index of the trailing window on [0, horizon].
pub fn window_start(horizon: usize, fraction: f64) -> usize {
    let len = horizon + 1;
    let width = ((len as f64) * fraction).ceil().max(1.0) as usize;
    len - width.min(len)
}

/// First index of the last decade on [0, horizon].
pub fn decade_start(horizon: usize) -> usize {
    window_start(horizon, 0.1)
}

/// Least-squares slope of ln v against ln(i + 1) over the positive samples.
pub fn loglog_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .map(|&(i, v)| (((i + 1) as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn max_value(points: &[(usize, f64)]) -> f64 {
    points.iter().map(|p| p.1).fold(0.0, f64::max)
}

fn min_value(points: &[(usize, f64)]) -> f64 {
    points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
}

/// Evidence gathered while classifying a series Σ t_n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesEvidence {
    pub window_start: usize,
    pub window_min_term: f64,
    pub window_max_term: f64,
    /// Largest term over the last decade.
    pub tail_term: f64,
    /// P_N / P_{window_start − 1}; absent when the denominator is zero.
    pub growth_ratio: Option<f64>,
    pub decay_slope: Option<f64>,
    /// min over the window of (n + 1) t_n.
    pub harmonic_constant: f64,
    /// Largest ratio t_{n+1}/t_n over consecutive window terms.
    pub ratio_bound: Option<f64>,
    /// Estimated remainder Σ_{n>N} t_n from a geometric or integral majorant.
    pub tail_majorant: Option<f64>,
}

/// Classifies Σ t_n (t_n ≥ 0) from its terms on [0, N] and the partial sum
/// P_N.
///
/// Divergent when P_N exceeds the cap, or when the window terms stay above
/// c/(n+1) for some c > 0 while decaying no faster than 1/n (harmonic
/// comparison). Convergent when the terms over the last decade are below
/// `tail_tol` and a geometric or power-law majorant bounds the remainder.
pub fn series_verdict(terms: Samples<'_>, partial_sum: f64, th: &Thresholds) -> (Verdict, SeriesEvidence) {
    let start = window_start(terms.horizon, th.window_fraction);
    let (lead, window) = terms.split_at_index(start);
    let (_, decade) = terms.split_at_index(decade_start(terms.horizon));
    let lead_sum: f64 = lead.iter().map(|p| p.1).sum();
    let slope = loglog_slope(window);
    let harmonic_constant = window
        .iter()
        .map(|&(i, v)| v * (i + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    let ratio_bound = window
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1 && w[0].1 > 0.0)
        .map(|w| w[1].1 / w[0].1)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    let last_term = window.last().map_or(0.0, |p| p.1);
    let geometric = ratio_bound.filter(|r| *r < 1.0).map(|r| last_term * r / (1.0 - r));
    let integral = slope
        .filter(|s| *s < -1.0)
        .map(|s| last_term * (terms.horizon + 1) as f64 / (-s - 1.0));
    let tail_majorant = match (geometric, integral) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let evidence = SeriesEvidence {
        window_start: start,
        window_min_term: if window.is_empty() { 0.0 } else { min_value(window) },
        window_max_term: max_value(window),
        tail_term: max_value(decade),
        growth_ratio: (lead_sum > 0.0).then(|| partial_sum / lead_sum),
        decay_slope: slope,
        harmonic_constant: if window.is_empty() { 0.0 } else { harmonic_constant },
        ratio_bound,
        tail_majorant,
    };

    if !partial_sum.is_finite() || partial_sum > th.divergence_cap {
        let v = Verdict::new(
            VerdictTag::DivergentNumeric,
            format!("partial sum {partial_sum:e} exceeds divergence cap {:e}", th.divergence_cap),
            th,
        );
        return (v, evidence);
    }
    if window.iter().all(|p| p.1 == 0.0) {
        let v = Verdict::new(VerdictTag::ConvergentNumeric, "all terms in the trailing window vanish", th);
        return (v, evidence);
    }
    if let Some(s) = slope {
        if harmonic_constant > 0.0 && s >= -1.0 - th.harmonic_slope_tol {
            let v = Verdict::new(
                VerdictTag::DivergentNumeric,
                format!(
                    "terms stay above {harmonic_constant:.3e}/(n+1) on the window and decay with slope {s:.4} (no faster than 1/n)"
                ),
                th,
            );
            return (v, evidence);
        }
    }
    match tail_majorant {
        Some(m) if evidence.tail_term < th.tail_tol => {
            let v = Verdict::new(
                VerdictTag::ConvergentNumeric,
                format!(
                    "last-decade terms below {:e} (max {:.3e}); remainder majorant {m:.3e}",
                    th.tail_tol, evidence.tail_term
                ),
                th,
            );
            (v, evidence)
        }
        _ => {
            let v = Verdict::new(
                VerdictTag::Inconclusive,
                format!(
                    "last-decade term max {:.3e} vs tail_tol {:e}; decay slope {}",
                    evidence.tail_term,
                    th.tail_tol,
                    slope.map_or("n/a".to_string(), |s| format!("{s:.4}"))
                ),
                th,
            );
            (v, evidence)
        }
    }
}

/// Evidence for sup-type statements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupEvidence {
    pub window_start: usize,
    pub leading_sup: f64,
    pub window_sup: f64,
    pub trend_slope: Option<f64>,
}

/// Classifies sup_n v_n < ∞ (v_n ≥ 0).
///
/// Bounded when the trailing window does not raise the running sup by more
/// than `sup_flat_tol`; growth when the sup exceeds the cap or the window
/// values trend upward with log-log slope ≥ `growth_slope`.
pub fn sup_verdict(values: Samples<'_>, th: &Thresholds) -> (Verdict, SupEvidence) {
    let start = window_start(values.horizon, th.window_fraction);
    let (lead, window) = values.split_at_index(start);
    let leading_sup = max_value(lead);
    let window_sup = max_value(window);
    let trend_slope = loglog_slope(window);
    let evidence = SupEvidence { window_start: start, leading_sup, window_sup, trend_slope };
    let sup = leading_sup.max(window_sup);
    let any_nan = values.points.iter().any(|p| p.1.is_nan());
    let verdict = if any_nan || !sup.is_finite() || sup > th.divergence_cap {
        Verdict::new(
            VerdictTag::DivergentNumeric,
            format!("sup {sup:e} exceeds divergence cap {:e}", th.divergence_cap),
            th,
        )
    } else if window_sup <= leading_sup * (1.0 + th.sup_flat_tol) {
        Verdict::new(
            VerdictTag::ConvergentNumeric,
            format!("running sup {sup:.6e} flat over the trailing window"),
            th,
        )
    } else if trend_slope.is_some_and(|s| s >= th.growth_slope) {
        Verdict::new(
            VerdictTag::DivergentNumeric,
            format!(
                "values grow over the trailing window (slope {:.4}, sup {window_sup:.6e})",
                trend_slope.unwrap_or_default()
            ),
            th,
        )
    } else {
        Verdict::new(
            VerdictTag::Inconclusive,
            format!("sup rose from {leading_sup:.6e} to {window_sup:.6e} without a clear growth trend"),
            th,
        )
    };
    (verdict, evidence)
}

/// Evidence for v_n → 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitZeroEvidence {
    pub window_start: usize,
    pub initial_sup: f64,
    pub trailing_sup: f64,
    pub trailing_min: f64,
    pub trend_slope: Option<f64>,
}

/// Classifies v_n → 0 (v_n ≥ 0) from dense values v_0..=v_N.
///
/// Tending to zero when the trailing sup is below `c0_ratio` × the sup
/// before the window; not tending to zero when the trailing values stay
/// above that level without decaying (slope ≥ −`flat_slope`).
pub fn limit_zero_verdict(values: &[f64], th: &Thresholds) -> (Verdict, LimitZeroEvidence) {
    let horizon = values.len().saturating_sub(1);
    let start = window_start(horizon, th.window_fraction);
    let lead = if start == 0 { values } else { &values[..start] };
    let window = &values[start..];
    let initial_sup = lead.iter().copied().fold(0.0, f64::max);
    let trailing_sup = window.iter().copied().fold(0.0, f64::max);
    let trailing_min = window.iter().copied().fold(f64::INFINITY, f64::min);
    let pts: Vec<(usize, f64)> = window.iter().enumerate().map(|(i, v)| (start + i, *v)).collect();
    let trend_slope = loglog_slope(&pts);
    let evidence = LimitZeroEvidence { window_start: start, initial_sup, trailing_sup, trailing_min, trend_slope };
    let level = th.c0_ratio * initial_sup;
    let verdict = if values.iter().any(|v| !v.is_finite()) {
        Verdict::new(VerdictTag::DivergentNumeric, "non-finite values", th)
    } else if trailing_sup == 0.0 {
        Verdict::new(VerdictTag::ConvergentNumeric, "trailing window is identically zero", th)
    } else if trailing_sup < level {
        Verdict::new(
            VerdictTag::ConvergentNumeric,
            format!("trailing sup {trailing_sup:.3e} < {} x initial sup {initial_sup:.3e}", th.c0_ratio),
            th,
        )
    } else if trailing_min > level && trend_slope.is_none_or(|s| s >= -th.flat_slope) {
        Verdict::new(
            VerdictTag::DivergentNumeric,
            format!("trailing values stay at or above {trailing_min:.3e} without decaying"),
            th,
        )
    } else {
        Verdict::new(
            VerdictTag::Inconclusive,
            format!("trailing sup {trailing_sup:.3e} vs initial sup {initial_sup:.3e}"),
            th,
        )
    };
    (verdict, evidence)
}

/// Estimated limit of a sequence from the mean of its last decade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub value: f64,
    pub deviation: f64,
    pub scale: f64,
    pub stable: bool,
}

/// Mean of the last decade with the max deviation from it; stable when the
/// deviation is at most `limit_tol` × scale, scale being the sup of |v|.
pub fn limit_estimate(values: &[f64], th: &Thresholds) -> LimitEstimate {
    if values.is_empty() {
        return LimitEstimate { value: 0.0, deviation: 0.0, scale: 0.0, stable: true };
    }
    let decade = &values[decade_start(values.len() - 1)..];
    let mean = decade.iter().sum::<f64>() / decade.len() as f64;
    let deviation = decade.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let stable = deviation.is_finite() && deviation <= th.limit_tol * scale;
    LimitEstimate { value: mean, deviation, scale, stable }
}

/// Classifies convergence of (v_n) to some finite limit.
pub fn limit_verdict(values: &[f64], th: &Thresholds) -> (Verdict, LimitEstimate) {
    let est = limit_estimate(values, th);
    let verdict = if est.stable {
        Verdict::new(
            VerdictTag::ConvergentNumeric,
            format!("last decade flat around {:.6e} (deviation {:.3e})", est.value, est.deviation),
            th,
        )
    } else {
        let horizon = values.len().saturating_sub(1);
        let start = window_start(horizon, th.window_fraction);
        let pts: Vec<(usize, f64)> = values[start..].iter().enumerate().map(|(i, v)| (start + i, v.abs())).collect();
        let slope = loglog_slope(&pts);
        if !est.scale.is_finite() || est.scale > th.divergence_cap || slope.is_some_and(|s| s >= th.growth_slope) {
            Verdict::new(VerdictTag::DivergentNumeric, "magnitudes grow over the trailing window", th)
        } else {
            Verdict::new(
                VerdictTag::Inconclusive,
                format!("last decade deviates by {:.3e} (scale {:.3e})", est.deviation, est.scale),
                th,
            )
        }
    };
    (verdict, est)
}

/// Grid for the existential and universal constants M and L: 2¹, …, 2¹⁰.
pub const GRID: [f64; 10] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0];

/// ∃ over a grid: bounded if some grid point is, growth only if every grid
/// point is, else inconclusive.
pub fn exists_on_grid(name: &str, results: &[(f64, Verdict)], th: &Thresholds) -> Verdict {
    if let Some((g, v)) = results.iter().find(|(_, v)| v.is_convergent()) {
        return Verdict::new(VerdictTag::ConvergentNumeric, format!("{name} = {g}: {}", v.rationale), th);
    }
    if !results.is_empty() && results.iter().all(|(_, v)| v.is_divergent()) {
        let (g, v) = results.last().expect("non-empty grid");
        return Verdict::new(
            VerdictTag::DivergentNumeric,
            format!("growth for every {name} on the grid; at {name} = {g}: {}", v.rationale),
            th,
        );
    }
    Verdict::new(VerdictTag::Inconclusive, format!("no {name} on the grid gives bounded evidence"), th)
}

/// ∀ over a grid: growth if some grid point grows; bounded only if every
/// grid point is bounded and the curve at the largest grid value is flat
/// across its top two decades.
pub fn forall_on_grid(name: &str, results: &[(f64, Verdict)], top_curve: &[f64], th: &Thresholds) -> Verdict {
    if let Some((g, v)) = results.iter().find(|(_, v)| v.is_divergent()) {
        return Verdict::new(VerdictTag::DivergentNumeric, format!("{name} = {g}: {}", v.rationale), th);
    }
    if results.iter().all(|(_, v)| v.is_convergent()) {
        if let Some(flat) = flat_top_decades(top_curve, th) {
            if flat {
                return Verdict::new(
                    VerdictTag::ConvergentNumeric,
                    format!("bounded for every {name} on the grid, flat across the top two decades"),
                    th,
                );
            }
            return Verdict::new(
                VerdictTag::Inconclusive,
                format!("bounded for every {name} on the grid but still rising across the top two decades"),
                th,
            );
        }
        return Verdict::new(
            VerdictTag::ConvergentNumeric,
            format!("bounded for every {name} on the grid (horizon too short for a two-decade trend)"),
            th,
        );
    }
    Verdict::new(VerdictTag::Inconclusive, format!("some {name} on the grid is inconclusive"), th)
}

/// V(N) ≤ V(⌊N/100⌋)·(1 + sup_flat_tol) for a nondecreasing curve; `None`
/// when the curve spans fewer than two decades.
pub fn flat_top_decades(curve: &[f64], th: &Thresholds) -> Option<bool> {
    let last = curve.len().checked_sub(1)?;
    if last < 100 {
        return None;
    }
    let (lo, hi) = (curve[last / 100], curve[last]);
    Some(hi <= lo * (1.0 + th.sup_flat_tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(f: impl Fn(usize) -> f64, horizon: usize) -> Vec<(usize, f64)> {
        (0..=horizon).map(|n| (n, f(n))).collect()
    }

    fn series(f: impl Fn(usize) -> f64, horizon: usize) -> Verdict {
        let pts = dense(f, horizon);
        let sum = pts.iter().map(|p| p.1).sum();
        series_verdict(Samples::new(horizon, &pts), sum, &Thresholds::default()).0
    }

    #[test]
    fn window_bounds() {
        assert_eq!(window_start(99, 0.25), 75);
        assert_eq!(window_start(0, 0.25), 0);
        assert_eq!(window_start(1, 0.25), 1);
        assert_eq!(decade_start(999), 900);
    }

    #[test]
    fn series_classification() {
        let n = 100_000;
        assert_eq!(series(|k| 1.0 / ((k + 1) as f64).powi(2), n).tag, VerdictTag::ConvergentNumeric);
        assert_eq!(series(|k| 1.0 / (k + 1) as f64, n).tag, VerdictTag::DivergentNumeric);
        assert_eq!(series(|_| 1.0, 1000).tag, VerdictTag::DivergentNumeric);
        assert_eq!(series(|k| 0.5f64.powi(k as i32), 200).tag, VerdictTag::ConvergentNumeric);
        assert_eq!(series(|_| 0.0, 10).tag, VerdictTag::ConvergentNumeric);
        // Slow but summable: honest answer is Inconclusive.
        assert_eq!(series(|k| 1.0 / ((k + 1) as f64).powf(1.1), n).tag, VerdictTag::Inconclusive);
        assert_eq!(series(|_| 1e13, 10).tag, VerdictTag::DivergentNumeric);
    }

    #[test]
    fn sup_classification() {
        let th = Thresholds::default();
        let grow = dense(|k| (k + 1) as f64, 1000);
        assert_eq!(sup_verdict(Samples::new(1000, &grow), &th).0.tag, VerdictTag::DivergentNumeric);
        let decay = dense(|k| 1.0 / (k + 1) as f64, 1000);
        assert_eq!(sup_verdict(Samples::new(1000, &decay), &th).0.tag, VerdictTag::ConvergentNumeric);
        let approach = dense(|k| 1.0 - 1.0 / (k + 1) as f64, 1000);
        assert_eq!(sup_verdict(Samples::new(1000, &approach), &th).0.tag, VerdictTag::ConvergentNumeric);
        assert_eq!(sup_verdict(Samples::new(5, &[]), &th).0.tag, VerdictTag::ConvergentNumeric);
    }

    #[test]
    fn limit_zero_classification() {
        let th = Thresholds::default();
        let harmonic: Vec<f64> = (0..=10_000).map(|n| 1.0 / (n + 1) as f64).collect();
        assert_eq!(limit_zero_verdict(&harmonic, &th).0.tag, VerdictTag::ConvergentNumeric);
        assert_eq!(limit_zero_verdict(&vec![1.0; 100], &th).0.tag, VerdictTag::DivergentNumeric);
        assert_eq!(limit_zero_verdict(&vec![0.0; 100], &th).0.tag, VerdictTag::ConvergentNumeric);
        let slow: Vec<f64> = (0..=1000).map(|n| 1.0 / ((n + 2) as f64).ln()).collect();
        assert_eq!(limit_zero_verdict(&slow, &th).0.tag, VerdictTag::Inconclusive);
    }

    #[test]
    fn limits() {
        let th = Thresholds::default();
        let flat: Vec<f64> = (0..100).map(|n| if n < 10 { n as f64 } else { 3.0 }).collect();
        let (v, est) = limit_verdict(&flat, &th);
        assert!(v.is_convergent());
        assert_eq!(est.value, 3.0);
        let grow: Vec<f64> = (0..100).map(|n| n as f64).collect();
        assert!(limit_verdict(&grow, &th).0.is_divergent());
        let wobble: Vec<f64> = (0..100).map(|n| 1.0 + 0.01 * (n % 2) as f64).collect();
        assert_eq!(limit_verdict(&wobble, &th).0.tag, VerdictTag::Inconclusive);
    }

    #[test]
    fn grid_quantifiers() {
        let th = Thresholds::default();
        let b = Verdict::new(VerdictTag::ConvergentNumeric, "b", &th);
        let g = Verdict::new(VerdictTag::DivergentNumeric, "g", &th);
        let i = Verdict::new(VerdictTag::Inconclusive, "i", &th);
        assert!(exists_on_grid("M", &[(2.0, g.clone()), (4.0, b.clone())], &th).is_convergent());
        assert!(exists_on_grid("M", &[(2.0, g.clone()), (4.0, g.clone())], &th).is_divergent());
        assert_eq!(exists_on_grid("M", &[(2.0, g.clone()), (4.0, i.clone())], &th).tag, VerdictTag::Inconclusive);
        let flat = vec![1.0; 1001];
        assert!(forall_on_grid("L", &[(2.0, b.clone()), (4.0, b.clone())], &flat, &th).is_convergent());
        assert!(forall_on_grid("L", &[(2.0, b.clone()), (4.0, g)], &flat, &th).is_divergent());
        let rising: Vec<f64> = (0..=1000).map(|n| 2.0 - 1.0 / (n + 1) as f64).collect();
        assert_eq!(forall_on_grid("L", &[(2.0, b.clone())], &rising, &th).tag, VerdictTag::Inconclusive);
        assert_eq!(forall_on_grid("L", &[(2.0, b), (4.0, i)], &flat, &th).tag, VerdictTag::Inconclusive);
    }

    #[test]
    fn conjunction() {
        use VerdictTag::*;
        assert_eq!(ConvergentNumeric.and(ConvergentNumeric), ConvergentNumeric);
        assert_eq!(ConvergentNumeric.and(Inconclusive), Inconclusive);
        assert_eq!(Inconclusive.and(DivergentNumeric), DivergentNumeric);
    }
}
