//! The matrix ã built from A and λ, the mapping conditions 4.6 to 4.21 and
//! the classification of A into (ℓ(λ,p) : ℓ(q)), (ℓ(λ,p) : c₀(q)),
//! (ℓ(λ,p) : c(q)) and (ℓ(λ,p) : ℓ_∞(q)).
//!
//! Every sup/sum condition is evaluated on the square section [0, N]² and
//! recorded as a curve V(t), t ≤ N, the value of the condition on [0, t]².
//! Curves are nondecreasing by construction and classified with the sup
//! rule of [`crate::verdict`].

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{MatrixSpec, SparseMatrix};
use crate::scalar::{Mode, Real};
use crate::seq::{ExponentSeq, Exponents, LambdaSeq};
use crate::verdict::{
    exists_on_grid, forall_on_grid, limit_estimate, limit_verdict, limit_zero_verdict, sup_verdict, window_start,
    LimitEstimate, Samples, Thresholds, Verdict, VerdictTag, GRID,
};

/// max(Σ positive entries, |Σ negative entries|): the largest |Σ_{i∈S} c_i|
/// over subsets S.
pub fn subset_sup<T: Real>(column: &[T]) -> T {
    let (pos, neg) = column.iter().fold((T::zero(), T::zero()), |(p, n), c| {
        if c.is_positive() {
            (p + c.clone(), n)
        } else {
            (p, n - c.clone())
        }
    });
    if pos >= neg {
        pos
    } else {
        neg
    }
}

pub(crate) fn subset_sup_f64(column: &[f64]) -> f64 {
    subset_sup(column)
}

pub const BRUTE_FORCE_LIMIT: usize = 20;

/// max over all 2^m subsets of |Σ_{i∈S} c_i|, visiting subsets in Gray-code
/// order so each step adds or removes one entry.
pub fn brute_force_subset_sup<T: Real>(column: &[T]) -> Result<T> {
    let m = column.len();
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::BruteForceTooLarge(m));
    }
    let mut best = T::zero();
    let mut sum = T::zero();
    let mut inside = vec![false; m];
    for step in 1u32..(1u32 << m) {
        let bit = step.trailing_zeros() as usize;
        inside[bit] = !inside[bit];
        sum = if inside[bit] { sum + column[bit].clone() } else { sum - column[bit].clone() };
        let a = sum.abs();
        if a > best {
            best = a;
        }
    }
    Ok(best)
}

/// ã_nk = (a_nk/δ_k − a_{n,k+1}/δ_{k+1}) λ_k on rows and columns 0..=N,
/// together with the section of A it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeMatrix<T> {
    horizon: usize,
    entries: SparseMatrix<T>,
    source: SparseMatrix<T>,
    /// λ_k / δ_k for k ≤ N + 1.
    weights: Vec<T>,
}

pub fn build_tilde<T: Real>(a: &MatrixSpec, lambda: &LambdaSeq, horizon: usize) -> Result<TildeMatrix<T>> {
    let table = lambda.table::<T>(horizon + 1)?;
    let source = a.section::<T>(horizon, horizon + 1)?;
    let inv_gap: Vec<T> = (0..=horizon + 1).map(|k| T::one() / table.gap(k).clone()).collect();
    let weights: Vec<T> = (0..=horizon + 1).map(|k| table.value(k).clone() * inv_gap[k].clone()).collect();
    let rows = source
        .rows()
        .iter()
        .map(|row| {
            let mut out: Vec<(usize, T)> = Vec::with_capacity(row.len() * 2);
            let mut push = |k: usize, v: T| match out.last_mut() {
                Some(last) if last.0 == k => last.1 = last.1.clone() + v,
                _ => out.push((k, v)),
            };
            // Entry a_nj feeds column j (first term) and column j − 1
            // (second term); visiting j in order keeps columns sorted.
            for (j, v) in row {
                if *j >= 1 {
                    let k = j - 1;
                    push(k, -(v.clone() * inv_gap[*j].clone() * table.value(k).clone()));
                }
                if *j <= horizon {
                    push(*j, v.clone() * weights[*j].clone());
                }
            }
            out.retain(|(_, v)| !v.is_zero());
            out
        })
        .collect();
    Ok(TildeMatrix { horizon, entries: SparseMatrix::from_rows(rows, horizon), source, weights })
}

impl<T: Real> TildeMatrix<T> {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn entries(&self) -> &SparseMatrix<T> {
        &self.entries
    }

    pub fn source(&self) -> &SparseMatrix<T> {
        &self.source
    }

    pub fn entry(&self, n: usize, k: usize) -> T {
        self.entries.entry(n, k)
    }

    /// λ_k / δ_k.
    pub fn weight(&self, k: usize) -> &T {
        &self.weights[k]
    }

    /// Σ_{k≤m} a_nk x_k.
    pub fn partial_sum_x(&self, n: usize, m: usize, x: &[T]) -> T {
        self.source.partial_row_sum(n, m, x)
    }

    /// Σ_{k≤m−1} ã_nk y_k + (λ_m/δ_m) a_nm y_m, the same partial sum
    /// rewritten through y = Λx.
    pub fn partial_sum_y(&self, n: usize, m: usize, y: &[T]) -> T {
        let head = if m == 0 { T::zero() } else { self.entries.partial_row_sum(n, m - 1, y) };
        head + self.weights[m].clone() * self.source.entry(n, m) * y[m].clone()
    }

    pub fn to_f64(&self) -> TildeMatrix<f64> {
        TildeMatrix {
            horizon: self.horizon,
            entries: self.entries.to_f64(),
            source: self.source.to_f64(),
            weights: self.weights.iter().map(Real::to_f64).collect(),
        }
    }
}

impl TildeMatrix<f64> {
    /// Column limits ã_k for k ≤ upto from the last decade of rows.
    pub fn column_limits(&self, upto: usize, th: &Thresholds) -> Vec<LimitEstimate> {
        let cols = self.entries.columns();
        let decade = crate::verdict::decade_start(self.horizon);
        (0..=upto.min(self.horizon))
            .map(|k| {
                let col = &cols[k];
                if col.iter().all(|(n, _)| *n < decade) {
                    let scale = col.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
                    return LimitEstimate { value: 0.0, deviation: 0.0, scale, stable: true };
                }
                limit_estimate(&dense_column(col, self.horizon), th)
            })
            .collect()
    }
}

fn dense_column(col: &[(usize, f64)], horizon: usize) -> Vec<f64> {
    let mut v = vec![0.0; horizon + 1];
    for (n, x) in col {
        v[*n] = *x;
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConditionId {
    C4_6,
    C4_7,
    C4_8,
    C4_9,
    C4_10,
    C4_11,
    C4_12,
    C4_13,
    C4_14,
    C4_15,
    C4_16,
    C4_17,
    C4_18,
    C4_19,
    C4_20,
    C4_21,
}

/// One catalog entry: the truncated formula evaluated and the transcription
/// choices made for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub formula: &'static str,
    pub note: Option<&'static str>,
}

impl ConditionId {
    pub const ALL: [ConditionId; 16] = [
        ConditionId::C4_6,
        ConditionId::C4_7,
        ConditionId::C4_8,
        ConditionId::C4_9,
        ConditionId::C4_10,
        ConditionId::C4_11,
        ConditionId::C4_12,
        ConditionId::C4_13,
        ConditionId::C4_14,
        ConditionId::C4_15,
        ConditionId::C4_16,
        ConditionId::C4_17,
        ConditionId::C4_18,
        ConditionId::C4_19,
        ConditionId::C4_20,
        ConditionId::C4_21,
    ];

    pub fn parse(text: &str) -> Result<ConditionId> {
        let t = text.trim().trim_start_matches('(').trim_end_matches(')');
        ConditionId::ALL
            .into_iter()
            .find(|c| c.label() == t)
            .ok_or_else(|| Error::UnsupportedCondition(text.to_string()))
    }

    pub fn label(self) -> &'static str {
        self.catalog().id
    }

    pub fn catalog(self) -> CatalogEntry {
        use ConditionId::*;
        let (id, formula, note) = match self {
            C4_6 => (
                "4.6",
                "sup_{F finite} sup_{k∈K1} |Σ_{n∈F} ã_nk|^{p_k} < ∞",
                Some("exponent p_k; the subset sup is taken per column by sign splitting"),
            ),
            C4_7 => (
                "4.7",
                "∃M: sup_{F finite} Σ_{k∈K2} |Σ_{n∈F} ã_nk / M|^{p̀_k} < ∞",
                Some("per-column sign splitting gives a majorant of the common-subset sup"),
            ),
            C4_8 => ("4.8", "∃M: sup_k Σ_n (|ã_nk| M^{−1/p_k})^{q_n} < ∞", Some("entries ã_nk inside the row sum")),
            C4_9 => ("4.9", "lim_n |ã_nk|^{q_n} = 0 for every k", Some("columns k ≤ ⌊N/4⌋")),
            C4_10 => ("4.10", "∀L: sup_n sup_{k∈K1} (|ã_nk| L^{1/q_n})^{p_k} < ∞", None),
            C4_11 => (
                "4.11",
                "∀L ∃M: sup_n Σ_{k∈K2} (|ã_nk| L^{1/q_n} / M)^{p̀_k} < ∞",
                Some("entries ã_nk inside the row sum"),
            ),
            C4_12 => ("4.12", "sup_n sup_{k∈K1} |ã_nk|^{p_k} < ∞", None),
            C4_13 => (
                "4.13",
                "∃M: sup_n Σ_{k∈K2} (|ã_nk| / M)^{p̀_k} < ∞",
                Some("entries ã_nk inside the row sum"),
            ),
            C4_14 => (
                "4.14",
                "∀L: sup_n sup_{k∈K1} (|ã_nk − ã_k| L^{1/q_n})^{p_k} < ∞",
                Some("columns k ≤ ⌊N/4⌋; ã_k from the last decade of rows"),
            ),
            C4_15 => (
                "4.15",
                "lim_n |ã_nk − ã_k|^{q_n} = 0 for every k",
                Some("columns k ≤ ⌊N/4⌋; ã_k from the last decade of rows"),
            ),
            C4_16 => (
                "4.16",
                "∀L ∃M: sup_n Σ_{k∈K2} (|ã_nk − ã_k| L^{1/q_n} / M)^{p̀_k} < ∞",
                Some("finiteness made explicit; columns k ≤ ⌊N/4⌋"),
            ),
            C4_17 => ("4.17", "∃L: sup_n sup_{k∈K1} (|ã_nk| L^{−1/q_n})^{p_k} < ∞", None),
            C4_18 => ("4.18", "∃L: sup_n Σ_{k∈K2} (|ã_nk| L^{−1/q_n})^{p̀_k} < ∞", None),
            C4_19 => ("4.19", "((λ_k/δ_k) a_nk)_k ∈ c₀(q) for every n", Some("rows n ≤ ⌊N/4⌋, k ≤ N")),
            C4_20 => ("4.20", "((λ_k/δ_k) a_nk)_k ∈ c(q) for every n", Some("rows n ≤ ⌊N/4⌋, k ≤ N")),
            C4_21 => ("4.21", "((λ_k/δ_k) a_nk)_k ∈ ℓ_∞(q) for every n", Some("rows n ≤ ⌊N/4⌋, k ≤ N")),
        };
        CatalogEntry { id, formula, note }
    }
}

impl std::fmt::Display for ConditionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Target {
    #[serde(rename = "lq")]
    Lq,
    #[serde(rename = "c0q")]
    C0q,
    #[serde(rename = "cq")]
    Cq,
    #[serde(rename = "linfq")]
    LinfQ,
}

impl Target {
    pub const ALL: [Target; 4] = [Target::Lq, Target::C0q, Target::Cq, Target::LinfQ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Lq => "lq",
            Target::C0q => "c0q",
            Target::Cq => "cq",
            Target::LinfQ => "linfq",
        }
    }

    pub fn conditions(self) -> &'static [ConditionId] {
        use ConditionId::*;
        match self {
            Target::Lq => &[C4_6, C4_7, C4_8, C4_19],
            Target::C0q => &[C4_9, C4_10, C4_11, C4_19],
            Target::Cq => &[C4_12, C4_13, C4_14, C4_15, C4_16, C4_20],
            Target::LinfQ => &[C4_17, C4_18, C4_21],
        }
    }
}

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lq" | "ell_q" => Ok(Target::Lq),
            "c0q" | "c0_q" => Ok(Target::C0q),
            "cq" | "c_q" => Ok(Target::Cq),
            "linfq" | "ell_inf_q" => Ok(Target::LinfQ),
            other => Err(format!("unknown target `{other}` (expected lq|c0q|cq|linfq)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRecord {
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    pub tag: VerdictTag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub id: &'static str,
    #[serde(rename = "N")]
    pub horizon: usize,
    pub formula: &'static str,
    /// Running value of the condition at truncation checkpoints; for grid
    /// conditions at the largest grid constants.
    pub witness_curve: Vec<CurvePoint>,
    pub grid: Vec<GridRecord>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub target: Target,
    #[serde(rename = "N")]
    pub horizon: usize,
    pub conditions: Vec<ConditionResult>,
    pub combined: Verdict,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    n: usize,
    k: usize,
    v: f64,
}

#[derive(Debug, Clone, Copy)]
enum Accum {
    /// V = max entry value.
    MaxEntry,
    /// V = max_k g(k, subset sup of column k).
    ColumnSubsetMax,
    /// V = Σ_k g(k, subset sup of column k).
    ColumnSubsetSum,
    /// V = max_k Σ_n entry.
    ColumnSumMax,
    /// V = max_n Σ_k entry.
    RowSumMax,
}

type EntryFn<'a> = dyn Fn(usize, usize, f64) -> Option<f64> + Sync + 'a;
type ColumnFn<'a> = dyn Fn(usize, f64) -> f64 + Sync + 'a;

/// Entries bucketed by t = max(n, k), so bucket t completes [0, t]².
struct Buckets {
    horizon: usize,
    buckets: Vec<Vec<Event>>,
}

impl Buckets {
    fn from_entries(horizon: usize, entries: impl Iterator<Item = Event>) -> Self {
        let mut buckets = vec![Vec::new(); horizon + 1];
        for e in entries {
            buckets[e.n.max(e.k)].push(e);
        }
        Buckets { horizon, buckets }
    }

    fn curve(&self, accum: Accum, entry: &EntryFn<'_>, column: &ColumnFn<'_>) -> Vec<f64> {
        let size = self.horizon + 1;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut sums = Vec::new();
        match accum {
            Accum::ColumnSubsetMax | Accum::ColumnSubsetSum => {
                pos = vec![0.0; size];
                neg = vec![0.0; size];
                sums = vec![0.0; size];
            }
            Accum::ColumnSumMax | Accum::RowSumMax => sums = vec![0.0; size],
            Accum::MaxEntry => {}
        }
        let mut value = 0.0f64;
        let mut curve = Vec::with_capacity(size);
        for bucket in &self.buckets {
            for e in bucket {
                let Some(c) = entry(e.n, e.k, e.v) else { continue };
                match accum {
                    Accum::MaxEntry => value = value.max(c),
                    Accum::ColumnSubsetMax | Accum::ColumnSubsetSum => {
                        if c > 0.0 {
                            pos[e.k] += c;
                        } else {
                            neg[e.k] -= c;
                        }
                        let g = column(e.k, pos[e.k].max(neg[e.k]));
                        if matches!(accum, Accum::ColumnSubsetMax) {
                            value = value.max(g);
                        } else if g > sums[e.k] {
                            value += g - sums[e.k];
                            sums[e.k] = g;
                        }
                    }
                    Accum::ColumnSumMax => {
                        sums[e.k] += c;
                        value = value.max(sums[e.k]);
                    }
                    Accum::RowSumMax => {
                        sums[e.n] += c;
                        value = value.max(sums[e.n]);
                    }
                }
            }
            curve.push(value);
        }
        curve
    }
}

fn no_column(_: usize, s: f64) -> f64 {
    s
}

/// Shared, immutable inputs for evaluating conditions at one horizon.
pub struct ConditionContext {
    horizon: usize,
    tilde: TildeMatrix<f64>,
    p: Exponents,
    q: Exponents,
    th: Thresholds,
    buckets: Buckets,
    /// Columns of ã, (row, value) sorted by row.
    columns: Vec<Vec<(usize, f64)>>,
}

impl ConditionContext {
    pub fn new(tilde: TildeMatrix<f64>, p: &ExponentSeq, q: &ExponentSeq, th: &Thresholds) -> Result<Self> {
        let horizon = tilde.horizon();
        if horizon < 1 {
            return Err(Error::Spec("horizon N must be at least 1".into()));
        }
        let p = p.sample(horizon)?;
        let q = q.sample(horizon)?;
        q.check_nondecreasing()?;
        let entries = tilde.entries().rows().iter().enumerate().flat_map(|(n, row)| {
            row.iter().filter(|(k, _)| *k <= horizon).map(move |(k, v)| Event { n, k: *k, v: *v })
        });
        let buckets = Buckets::from_entries(horizon, entries);
        let columns = tilde.entries().columns();
        Ok(ConditionContext { horizon, tilde, p, q, th: *th, buckets, columns })
    }

    fn quarter(&self) -> usize {
        self.horizon / 4
    }

    fn conj(&self, k: usize) -> f64 {
        let p = self.p.p(k);
        p / (p - 1.0)
    }

    fn checkpoints(&self) -> Vec<usize> {
        let mut pts: Vec<usize> = std::iter::successors(Some(10usize), |c| c.checked_mul(10))
            .take_while(|c| *c < self.horizon)
            .collect();
        pts.push(self.horizon);
        pts
    }

    fn witness(&self, curve: &[f64]) -> Vec<CurvePoint> {
        self.checkpoints().into_iter().map(|n| CurvePoint { n, value: curve[n] }).collect()
    }

    fn curve_verdict(&self, curve: &[f64]) -> Verdict {
        let pts: Vec<(usize, f64)> = curve.iter().copied().enumerate().collect();
        sup_verdict(Samples::new(self.horizon, &pts), &self.th).0
    }

    fn result(&self, id: ConditionId, curve: &[f64], grid: Vec<GridRecord>, verdict: Verdict) -> ConditionResult {
        ConditionResult {
            id: id.label(),
            horizon: self.horizon,
            formula: id.catalog().formula,
            witness_curve: self.witness(curve),
            grid,
            verdict,
        }
    }

    fn plain(&self, id: ConditionId, accum: Accum, entry: &EntryFn<'_>, column: &ColumnFn<'_>) -> ConditionResult {
        self.plain_on(&self.buckets, id, accum, entry, column)
    }

    fn plain_on(
        &self,
        buckets: &Buckets,
        id: ConditionId,
        accum: Accum,
        entry: &EntryFn<'_>,
        column: &ColumnFn<'_>,
    ) -> ConditionResult {
        let curve = buckets.curve(accum, entry, column);
        let verdict = self.curve_verdict(&curve);
        self.result(id, &curve, Vec::new(), verdict)
    }

    /// ∃ over one grid constant.
    fn exists<'c, F>(&self, buckets: &Buckets, id: ConditionId, name: &str, accum: Accum, make: F) -> ConditionResult
    where
        F: Fn(f64) -> (Box<EntryFn<'c>>, Box<ColumnFn<'c>>) + Sync,
    {
        let runs: Vec<(f64, Vec<f64>, Verdict)> = GRID
            .par_iter()
            .map(|&g| {
                let (entry, column) = make(g);
                let curve = buckets.curve(accum, &*entry, &*column);
                let v = self.curve_verdict(&curve);
                (g, curve, v)
            })
            .collect();
        let results: Vec<(f64, Verdict)> = runs.iter().map(|(g, _, v)| (*g, v.clone())).collect();
        let verdict = exists_on_grid(name, &results, &self.th);
        let grid = runs
            .iter()
            .map(|(g, _, v)| {
                let g = Some(*g);
                let (l, m) = if name == "L" { (g, None) } else { (None, g) };
                GridRecord { l, m, tag: v.tag }
            })
            .collect();
        let top = &runs.last().expect("non-empty grid").1;
        self.result(id, top, grid, verdict)
    }

    /// ∀L, with an optional inner ∃M.
    fn forall_l<'c, F>(&self, buckets: &Buckets, id: ConditionId, accum: Accum, inner_m: bool, make: F) -> ConditionResult
    where
        F: Fn(f64, f64) -> (Box<EntryFn<'c>>, Box<ColumnFn<'c>>) + Sync,
    {
        let m_grid: &[f64] = if inner_m { &GRID } else { &[1.0] };
        let pairs: Vec<(f64, f64)> = GRID.iter().flat_map(|&l| m_grid.iter().map(move |&m| (l, m))).collect();
        let runs: Vec<(f64, f64, Vec<f64>, Verdict)> = pairs
            .par_iter()
            .map(|&(l, m)| {
                let (entry, column) = make(l, m);
                let curve = buckets.curve(accum, &*entry, &*column);
                let v = self.curve_verdict(&curve);
                (l, m, curve, v)
            })
            .collect();
        let mut per_l: Vec<(f64, Verdict)> = Vec::with_capacity(GRID.len());
        let mut top_curve: &[f64] = &[];
        for &l in &GRID {
            let at_l: Vec<&(f64, f64, Vec<f64>, Verdict)> = runs.iter().filter(|r| r.0 == l).collect();
            let v = if inner_m {
                let ms: Vec<(f64, Verdict)> = at_l.iter().map(|r| (r.1, r.3.clone())).collect();
                exists_on_grid("M", &ms, &self.th)
            } else {
                at_l[0].3.clone()
            };
            if l == GRID[GRID.len() - 1] {
                let chosen = at_l.iter().find(|r| r.3.is_convergent()).unwrap_or(at_l.last().expect("non-empty"));
                top_curve = &chosen.2;
            }
            per_l.push((l, v));
        }
        let verdict = forall_on_grid("L", &per_l, top_curve, &self.th);
        let grid = runs
            .iter()
            .map(|(l, m, _, v)| GridRecord { l: Some(*l), m: inner_m.then_some(*m), tag: v.tag })
            .collect();
        self.result(id, top_curve, grid, verdict)
    }

    /// Per-column lim_n of |ã_nk − shift_k|^{q_n} = 0 over k ≤ ⌊N/4⌋.
    fn column_limit_zero(&self, id: ConditionId, shifts: Option<&[LimitEstimate]>) -> ConditionResult {
        let horizon = self.horizon;
        let start = window_start(horizon, self.th.window_fraction);
        let mut tags = (0usize, 0usize, 0usize);
        let mut combined = VerdictTag::ConvergentNumeric;
        let mut first_bad = None;
        for k in 0..=self.quarter() {
            let col = &self.columns[k];
            let shift = shifts.map_or(0.0, |s| s[k].value);
            let tag = if shift == 0.0 && col.iter().all(|(n, _)| *n < start) {
                VerdictTag::ConvergentNumeric
            } else {
                let dense: Vec<f64> = dense_column(col, horizon)
                    .iter()
                    .enumerate()
                    .map(|(n, v)| (v - shift).abs().powf(self.q.p(n)))
                    .collect();
                limit_zero_verdict(&dense, &self.th).0.tag
            };
            match tag {
                VerdictTag::ConvergentNumeric => tags.0 += 1,
                VerdictTag::DivergentNumeric => tags.1 += 1,
                VerdictTag::Inconclusive => tags.2 += 1,
            }
            if tag != VerdictTag::ConvergentNumeric && first_bad.is_none() {
                first_bad = Some(k);
            }
            combined = combined.and(tag);
        }
        let rationale = format!(
            "columns 0..={}: {} tend to zero, {} do not, {} inconclusive{}",
            self.quarter(),
            tags.0,
            tags.1,
            tags.2,
            first_bad.map_or(String::new(), |k| format!(" (first at k = {k})"))
        );
        let verdict = Verdict::new(combined, rationale, &self.th);
        let quarter = self.quarter();
        let q = &self.q;
        let curve = match shifts {
            None => self.buckets.curve(
                Accum::MaxEntry,
                &|n, k, v| (k <= quarter).then(|| v.abs().powf(q.p(n))),
                &no_column,
            ),
            Some(s) => self.shifted_buckets(s).curve(
                Accum::MaxEntry,
                &|n, k, v| Some((v - s[k].value).abs().powf(q.p(n))),
                &no_column,
            ),
        };
        self.result(id, &curve, Vec::new(), verdict)
    }

    /// Entries of ã on columns k ≤ ⌊N/4⌋, with explicit zeros added in
    /// columns whose limit is nonzero so that |0 − ã_k| is visited.
    fn shifted_buckets(&self, limits: &[LimitEstimate]) -> Buckets {
        let quarter = self.quarter();
        let mut events = Vec::new();
        for (k, col) in self.columns.iter().enumerate().take(quarter + 1) {
            if limits[k].value == 0.0 {
                events.extend(col.iter().map(|(n, v)| Event { n: *n, k, v: *v }));
            } else {
                let dense = dense_column(col, self.horizon);
                events.extend(dense.into_iter().enumerate().map(|(n, v)| Event { n, k, v }));
            }
        }
        Buckets::from_entries(self.horizon, events.into_iter())
    }

    fn limits_or_inconclusive(&self, id: ConditionId) -> std::result::Result<Vec<LimitEstimate>, ConditionResult> {
        let limits = self.tilde.column_limits(self.quarter(), &self.th);
        if let Some(k) = limits.iter().position(|l| !l.stable) {
            let l = &limits[k];
            let verdict = Verdict::new(
                VerdictTag::Inconclusive,
                format!(
                    "column limit of column {k} not settled: last-decade deviation {:.3e} exceeds {:e} x scale {:.3e}",
                    l.deviation, self.th.limit_tol, l.scale
                ),
                &self.th,
            );
            return Err(self.result(id, &vec![0.0; self.horizon + 1], Vec::new(), verdict));
        }
        Ok(limits)
    }

    /// Row conditions on ((λ_k/δ_k) a_nk)_k, rows n ≤ ⌊N/4⌋.
    fn row_condition(&self, id: ConditionId) -> ConditionResult {
        let horizon = self.horizon;
        let source = self.tilde.source();
        let decade = crate::verdict::decade_start(horizon);
        let start = window_start(horizon, self.th.window_fraction);
        let mut combined = VerdictTag::ConvergentNumeric;
        let mut counts = (0usize, 0usize, 0usize);
        let mut curve = vec![0.0f64; horizon + 1];
        for n in 0..=self.quarter() {
            let row: Vec<(usize, f64)> = source
                .row(n)
                .iter()
                .filter(|(k, _)| *k <= horizon)
                .map(|(k, v)| (*k, v * self.tilde.weight(*k)))
                .collect();
            for (k, v) in &row {
                let mag = match id {
                    ConditionId::C4_20 => v.abs(),
                    _ => v.abs().powf(self.q.p(*k)),
                };
                let t = n.max(*k);
                curve[t] = curve[t].max(mag);
            }
            let tail_free = |from: usize| row.iter().all(|(k, _)| *k < from);
            let dense = || {
                let mut d = vec![0.0; horizon + 1];
                for (k, v) in &row {
                    d[*k] = *v;
                }
                d
            };
            let tag = match id {
                ConditionId::C4_19 if tail_free(start) => VerdictTag::ConvergentNumeric,
                ConditionId::C4_19 => {
                    let mags: Vec<f64> = dense().iter().enumerate().map(|(k, v)| v.abs().powf(self.q.p(k))).collect();
                    limit_zero_verdict(&mags, &self.th).0.tag
                }
                ConditionId::C4_20 if tail_free(decade) => VerdictTag::ConvergentNumeric,
                ConditionId::C4_20 => limit_verdict(&dense(), &self.th).0.tag,
                _ => {
                    let pts: Vec<(usize, f64)> =
                        row.iter().map(|(k, v)| (*k, v.abs().powf(self.q.p(*k)))).collect();
                    sup_verdict(Samples::new(horizon, &pts), &self.th).0.tag
                }
            };
            match tag {
                VerdictTag::ConvergentNumeric => counts.0 += 1,
                VerdictTag::DivergentNumeric => counts.1 += 1,
                VerdictTag::Inconclusive => counts.2 += 1,
            }
            combined = combined.and(tag);
        }
        for t in 1..=horizon {
            curve[t] = curve[t].max(curve[t - 1]);
        }
        let verdict = Verdict::new(
            combined,
            format!(
                "rows 0..={}: {} pass, {} fail, {} inconclusive",
                self.quarter(),
                counts.0,
                counts.1,
                counts.2
            ),
            &self.th,
        );
        self.result(id, &curve, Vec::new(), verdict)
    }

    pub fn evaluate(&self, id: ConditionId) -> ConditionResult {
        use ConditionId::*;
        let p = &self.p;
        let q = &self.q;
        let b = &self.buckets;
        match id {
            C4_6 => self.plain(
                id,
                Accum::ColumnSubsetMax,
                &|_, k, v| p.in_k1(k).then_some(v),
                &|k, s| s.powf(p.p(k)),
            ),
            C4_7 => self.exists(b, id, "M", Accum::ColumnSubsetSum, |m| {
                (
                    Box::new(move |_, k, v| p.in_k2(k).then_some(v)),
                    Box::new(move |k, s| (s / m).powf(self.conj(k))),
                )
            }),
            C4_8 => self.exists(b, id, "M", Accum::ColumnSumMax, |m| {
                (
                    Box::new(move |n, k, v| Some((v.abs() * m.powf(-1.0 / p.p(k))).powf(q.p(n)))),
                    Box::new(no_column),
                )
            }),
            C4_9 => self.column_limit_zero(id, None),
            C4_10 => self.forall_l(b, id, Accum::MaxEntry, false, |l, _| {
                (
                    Box::new(move |n, k, v| p.in_k1(k).then(|| (v.abs() * l.powf(1.0 / q.p(n))).powf(p.p(k)))),
                    Box::new(no_column),
                )
            }),
            C4_11 => self.forall_l(b, id, Accum::RowSumMax, true, |l, m| {
                (
                    Box::new(move |n, k, v| {
                        p.in_k2(k).then(|| (v.abs() * l.powf(1.0 / q.p(n)) / m).powf(self.conj(k)))
                    }),
                    Box::new(no_column),
                )
            }),
            C4_12 => self.plain(id, Accum::MaxEntry, &|_, k, v| p.in_k1(k).then(|| v.abs().powf(p.p(k))), &no_column),
            C4_13 => self.exists(b, id, "M", Accum::RowSumMax, |m| {
                (Box::new(move |_, k, v| p.in_k2(k).then(|| (v.abs() / m).powf(self.conj(k)))), Box::new(no_column))
            }),
            C4_14 | C4_16 => {
                let limits = match self.limits_or_inconclusive(id) {
                    Ok(l) => l,
                    Err(r) => return r,
                };
                let shifted = self.shifted_buckets(&limits);
                let lim = &limits;
                if id == C4_14 {
                    self.forall_l(&shifted, id, Accum::MaxEntry, false, |l, _| {
                        (
                            Box::new(move |n, k, v| {
                                p.in_k1(k).then(|| ((v - lim[k].value).abs() * l.powf(1.0 / q.p(n))).powf(p.p(k)))
                            }),
                            Box::new(no_column),
                        )
                    })
                } else {
                    self.forall_l(&shifted, id, Accum::RowSumMax, true, |l, m| {
                        (
                            Box::new(move |n, k, v| {
                                p.in_k2(k).then(|| {
                                    ((v - lim[k].value).abs() * l.powf(1.0 / q.p(n)) / m).powf(self.conj(k))
                                })
                            }),
                            Box::new(no_column),
                        )
                    })
                }
            }
            C4_15 => match self.limits_or_inconclusive(id) {
                Ok(limits) => self.column_limit_zero(id, Some(&limits)),
                Err(r) => r,
            },
            C4_17 => self.exists(b, id, "L", Accum::MaxEntry, |l| {
                (
                    Box::new(move |n, k, v| p.in_k1(k).then(|| (v.abs() * l.powf(-1.0 / q.p(n))).powf(p.p(k)))),
                    Box::new(no_column),
                )
            }),
            C4_18 => self.exists(b, id, "L", Accum::RowSumMax, |l| {
                (
                    Box::new(move |n, k, v| p.in_k2(k).then(|| (v.abs() * l.powf(-1.0 / q.p(n))).powf(self.conj(k)))),
                    Box::new(no_column),
                )
            }),
            C4_19 | C4_20 | C4_21 => self.row_condition(id),
        }
    }
}

/// Builds ã in the requested arithmetic and converts it for evaluation;
/// conditions raise entries to real powers and run in floating point.
pub fn tilde_for_conditions(a: &MatrixSpec, lambda: &LambdaSeq, horizon: usize, mode: Mode) -> Result<TildeMatrix<f64>> {
    if mode == Mode::Rational && a.is_rational_closed() && lambda.generator().is_rational_closed() {
        match build_tilde::<num_rational::BigRational>(a, lambda, horizon) {
            Ok(t) => return Ok(t.to_f64()),
            Err(e) if e.is_rational_unsupported() => {}
            Err(e) => return Err(e),
        }
    }
    build_tilde::<f64>(a, lambda, horizon)
}

pub fn eval_condition(
    id: ConditionId,
    tilde: &TildeMatrix<f64>,
    p: &ExponentSeq,
    q: &ExponentSeq,
    th: &Thresholds,
) -> Result<ConditionResult> {
    let ctx = ConditionContext::new(tilde.clone(), p, q, th)?;
    Ok(ctx.evaluate(id))
}

pub fn classify_with(ctx: &ConditionContext, target: Target) -> ClassificationResult {
    let conditions: Vec<ConditionResult> = target.conditions().par_iter().map(|&id| ctx.evaluate(id)).collect();
    let tag = conditions.iter().fold(VerdictTag::ConvergentNumeric, |acc, c| acc.and(c.verdict.tag));
    let rationale = conditions.iter().map(|c| format!("{}: {}", c.id, c.verdict.tag)).collect::<Vec<_>>().join(", ");
    ClassificationResult {
        target,
        horizon: ctx.horizon,
        combined: Verdict::new(tag, rationale, &ctx.th),
        conditions,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn classify(
    a: &MatrixSpec,
    lambda: &LambdaSeq,
    p: &ExponentSeq,
    q: &ExponentSeq,
    target: Target,
    horizon: usize,
    mode: Mode,
    th: &Thresholds,
) -> Result<ClassificationResult> {
    let tilde = tilde_for_conditions(a, lambda, horizon, mode)?;
    let ctx = ConditionContext::new(tilde, p, q, th)?;
    Ok(classify_with(&ctx, target))
}
