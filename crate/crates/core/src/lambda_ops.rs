//! The weighted-mean matrix Λ, its inverse and the S-operator.
//!
//! With gaps δ_k = λ_k − λ_{k−1} (λ₋₁ = 0):
//!
//! * Λ_n(x) = (1/λ_n) Σ_{k≤n} δ_k x_k
//! * (Λ⁻¹y)_n = (λ_n y_n − λ_{n−1} y_{n−1}) / δ_n
//! * S_0(x) = 0, S_n(x) = (1/λ_n) Σ_{k=1}^{n} λ_{k−1}(x_k − x_{k−1})
//!
//! The forward transform is evaluated as a running prefix sum, O(N) in
//! total. [`LambdaTable::forward_direct`] keeps the O(N²) row-by-row sum
//! for cross-checking.

use crate::error::Result;
use crate::seq::{LambdaSeq, SeqSpec};
use crate::scalar::Real;

/// Validated λ_0..=λ_N together with the gaps δ_k.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTable<T> {
    values: Vec<T>,
    gaps: Vec<T>,
}

impl<T: Real> LambdaTable<T> {
    /// `values` must already be positive and strictly increasing.
    pub(crate) fn from_validated(values: Vec<T>) -> Self {
        let gaps = values
            .iter()
            .enumerate()
            .map(|(k, v)| if k == 0 { v.clone() } else { v.clone() - values[k - 1].clone() })
            .collect();
        LambdaTable { values, gaps }
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, k: usize) -> &T {
        &self.values[k]
    }

    /// λ_{k−1}, zero at k = 0.
    pub fn prev(&self, k: usize) -> T {
        if k == 0 {
            T::zero()
        } else {
            self.values[k - 1].clone()
        }
    }

    /// δ_k = λ_k − λ_{k−1}.
    pub fn gap(&self, k: usize) -> &T {
        &self.gaps[k]
    }

    /// λ_nk: δ_k / λ_n for k ≤ n, else 0.
    pub fn entry(&self, n: usize, k: usize) -> T {
        if k > n {
            T::zero()
        } else {
            self.gaps[k].clone() / self.values[n].clone()
        }
    }

    /// Entry of Λ⁻¹: nonzero only for k ∈ {n−1, n}.
    pub fn inverse_entry(&self, n: usize, k: usize) -> T {
        if k == n {
            self.values[n].clone() / self.gaps[n].clone()
        } else if k + 1 == n {
            -(self.values[k].clone() / self.gaps[n].clone())
        } else {
            T::zero()
        }
    }

    pub fn scan(&self) -> LambdaScan<'_, T> {
        LambdaScan { table: self, numerator: T::zero(), next: 0 }
    }

    /// Λ(x) on the first min(len(x), N + 1) entries.
    pub fn forward(&self, x: &[T]) -> Vec<T> {
        let mut scan = self.scan();
        x.iter().take(self.values.len()).map(|v| scan.push(v)).collect()
    }

    /// Row-by-row evaluation of Λ(x).
    pub fn forward_direct(&self, x: &[T]) -> Vec<T> {
        let len = x.len().min(self.values.len());
        (0..len)
            .map(|n| {
                (0..=n).fold(T::zero(), |acc, k| acc + self.entry(n, k) * x[k].clone())
            })
            .collect()
    }

    /// Λ⁻¹(y) via the two-term closed form.
    pub fn inverse(&self, y: &[T]) -> Vec<T> {
        let len = y.len().min(self.values.len());
        (0..len)
            .map(|n| {
                let head = self.values[n].clone() * y[n].clone();
                let num = if n == 0 { head } else { head - self.values[n - 1].clone() * y[n - 1].clone() };
                num / self.gaps[n].clone()
            })
            .collect()
    }

    /// S(x) from its defining sum.
    pub fn s_operator(&self, x: &[T]) -> Vec<T> {
        let len = x.len().min(self.values.len());
        let mut out = Vec::with_capacity(len);
        let mut acc = T::zero();
        for n in 0..len {
            if n == 0 {
                out.push(T::zero());
                continue;
            }
            acc = acc + self.values[n - 1].clone() * (x[n].clone() - x[n - 1].clone());
            out.push(acc.clone() / self.values[n].clone());
        }
        out
    }

    /// Dense (N+1)×(N+1) truncation of Λ.
    pub fn dense(&self) -> Vec<Vec<T>> {
        let size = self.values.len();
        (0..size).map(|n| (0..size).map(|k| self.entry(n, k)).collect()).collect()
    }

    /// Dense (N+1)×(N+1) truncation of Λ⁻¹.
    pub fn inverse_dense(&self) -> Vec<Vec<T>> {
        let size = self.values.len();
        (0..size).map(|n| (0..size).map(|k| self.inverse_entry(n, k)).collect()).collect()
    }
}

/// Incremental Λ-transform: c_n = c_{n−1} + δ_n x_n, y_n = c_n / λ_n.
#[derive(Debug, Clone)]
pub struct LambdaScan<'a, T> {
    table: &'a LambdaTable<T>,
    numerator: T,
    next: usize,
}

impl<T: Real> LambdaScan<'_, T> {
    /// Feeds x_n and returns y_n.
    ///
    /// Panics when pushed past the table horizon.
    pub fn push(&mut self, x: &T) -> T {
        let n = self.next;
        self.numerator = self.numerator.clone() + self.table.gaps[n].clone() * x.clone();
        self.next += 1;
        self.numerator.clone() / self.table.values[n].clone()
    }

    /// Running numerator c_n.
    pub fn numerator(&self) -> &T {
        &self.numerator
    }

    /// Index of the next value to push.
    pub fn index(&self) -> usize {
        self.next
    }
}

/// Selects how [`lambda_transform_with`] sums the rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    #[default]
    Incremental,
    Direct,
}

pub fn lambda_entry<T: Real>(lambda: &LambdaSeq, n: usize, k: usize) -> Result<T> {
    let table = lambda.table::<T>(n.max(k))?;
    Ok(table.entry(n, k))
}

pub fn lambda_transform<T: Real>(lambda: &LambdaSeq, x: &SeqSpec, horizon: usize) -> Result<Vec<T>> {
    lambda_transform_with(lambda, x, horizon, Summation::Incremental)
}

pub fn lambda_transform_with<T: Real>(
    lambda: &LambdaSeq,
    x: &SeqSpec,
    horizon: usize,
    summation: Summation,
) -> Result<Vec<T>> {
    let table = lambda.table::<T>(horizon)?;
    let xs = x.prefix::<T>(horizon + 1)?;
    Ok(match summation {
        Summation::Incremental => table.forward(&xs),
        Summation::Direct => table.forward_direct(&xs),
    })
}

pub fn inverse_transform<T: Real>(lambda: &LambdaSeq, y: &SeqSpec, horizon: usize) -> Result<Vec<T>> {
    let table = lambda.table::<T>(horizon)?;
    let ys = y.prefix::<T>(horizon + 1)?;
    Ok(table.inverse(&ys))
}

pub fn s_operator<T: Real>(lambda: &LambdaSeq, x: &SeqSpec, horizon: usize) -> Result<Vec<T>> {
    let table = lambda.table::<T>(horizon)?;
    let xs = x.prefix::<T>(horizon + 1)?;
    Ok(table.s_operator(&xs))
}
