//! Infinite matrices A = (a_nk) and their finite sections.

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr};
use crate::scalar::Real;
use crate::seq::LambdaSeq;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSpec {
    /// a_nk given by an expression in n and k.
    ClosedForm(Expr),
    /// a_nk = expr(n, k) for k ≤ n, zero above the diagonal.
    Triangle(Expr),
    /// a_{n, n+offset} = expr(n), all other entries zero. `k` is bound to
    /// n + offset. An empty band list is the zero matrix.
    Banded(Vec<(i64, Expr)>),
    /// The weighted-mean matrix Λ itself.
    Weighted(LambdaSeq),
}

impl MatrixSpec {
    pub fn zero() -> Self {
        MatrixSpec::Banded(Vec::new())
    }

    pub fn identity() -> Self {
        MatrixSpec::Banded(vec![(0, Expr::lit(1))])
    }

    pub fn diagonal(text: &str) -> Result<Self> {
        Ok(MatrixSpec::Banded(vec![(0, Expr::parse(text)?)]))
    }

    /// Parses `zero`, `identity`, `lambda` (needs λ), `diag:<expr>`,
    /// `triangle:<expr>` or a bare expression in n and k.
    pub fn parse(text: &str, lambda: Option<&LambdaSeq>) -> Result<Self> {
        let text = text.trim();
        match text {
            "zero" => return Ok(MatrixSpec::zero()),
            "identity" => return Ok(MatrixSpec::identity()),
            "lambda" => {
                return lambda
                    .cloned()
                    .map(MatrixSpec::Weighted)
                    .ok_or_else(|| Error::Spec("matrix `lambda` needs a lambda sequence".into()))
            }
            _ => {}
        }
        if let Some(rest) = text.strip_prefix("diag:") {
            return MatrixSpec::diagonal(rest);
        }
        if let Some(rest) = text.strip_prefix("triangle:") {
            return Ok(MatrixSpec::Triangle(Expr::parse(rest)?));
        }
        Ok(MatrixSpec::ClosedForm(Expr::parse(text)?))
    }

    pub fn is_rational_closed(&self) -> bool {
        match self {
            MatrixSpec::ClosedForm(e) | MatrixSpec::Triangle(e) => e.is_rational_closed(),
            MatrixSpec::Banded(b) => b.iter().all(|(_, e)| e.is_rational_closed()),
            MatrixSpec::Weighted(l) => l.generator().is_rational_closed(),
        }
    }

    /// Rows 0..=last_row restricted to columns 0..=last_col, zeros dropped.
    pub fn section<T: Real>(&self, last_row: usize, last_col: usize) -> Result<SparseMatrix<T>> {
        let eval = |e: &Expr, n: usize, k: usize| -> Result<T> {
            e.eval::<T>(&Bindings::nk(n as i64, k as i64))
                .map_err(|source| Error::eval_at(format!("({n}, {k})"), source))
        };
        let mut rows = Vec::with_capacity(last_row + 1);
        match self {
            MatrixSpec::ClosedForm(e) | MatrixSpec::Triangle(e) => {
                let triangle = matches!(self, MatrixSpec::Triangle(_));
                for n in 0..=last_row {
                    let end = if triangle { n.min(last_col) } else { last_col };
                    let mut row = Vec::new();
                    for k in 0..=end {
                        let v = eval(e, n, k)?;
                        if !v.is_zero() {
                            row.push((k, v));
                        }
                    }
                    rows.push(row);
                }
            }
            MatrixSpec::Banded(bands) => {
                let mut sorted: Vec<&(i64, Expr)> = bands.iter().collect();
                sorted.sort_by_key(|b| b.0);
                for n in 0..=last_row {
                    let mut row: Vec<(usize, T)> = Vec::new();
                    for (offset, e) in &sorted {
                        let k = n as i64 + offset;
                        if k < 0 || k as usize > last_col {
                            continue;
                        }
                        let v = eval(e, n, k as usize)?;
                        if v.is_zero() {
                            continue;
                        }
                        match row.last_mut() {
                            Some(last) if last.0 == k as usize => last.1 = last.1.clone() + v,
                            _ => row.push((k as usize, v)),
                        }
                    }
                    row.retain(|(_, v)| !v.is_zero());
                    rows.push(row);
                }
            }
            MatrixSpec::Weighted(l) => {
                let table = l.table::<T>(last_row.max(1))?;
                for n in 0..=last_row {
                    let end = n.min(last_col);
                    let inv = T::one() / table.value(n).clone();
                    rows.push((0..=end).map(|k| (k, table.gap(k).clone() * inv.clone())).collect());
                }
            }
        }
        Ok(SparseMatrix { rows, last_col })
    }
}

/// Row-major sparse section of an infinite matrix; rows hold (column, value)
/// pairs sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    rows: Vec<Vec<(usize, T)>>,
    last_col: usize,
}

impl<T: Real> SparseMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<(usize, T)>>, last_col: usize) -> Self {
        SparseMatrix { rows, last_col }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn last_col(&self) -> usize {
        self.last_col
    }

    pub fn row(&self, n: usize) -> &[(usize, T)] {
        &self.rows[n]
    }

    pub fn rows(&self) -> &[Vec<(usize, T)>] {
        &self.rows
    }

    pub fn entry(&self, n: usize, k: usize) -> T {
        let row = &self.rows[n];
        match row.binary_search_by_key(&k, |e| e.0) {
            Ok(i) => row[i].1.clone(),
            Err(_) => T::zero(),
        }
    }

    /// Σ_{k ≤ m} a_nk x_k.
    pub fn partial_row_sum(&self, n: usize, m: usize, x: &[T]) -> T {
        self.rows[n]
            .iter()
            .take_while(|(k, _)| *k <= m)
            .fold(T::zero(), |acc, (k, v)| acc + v.clone() * x[*k].clone())
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_f64(&self) -> SparseMatrix<f64> {
        SparseMatrix {
            rows: self.rows.iter().map(|r| r.iter().map(|(k, v)| (*k, v.to_f64())).collect()).collect(),
            last_col: self.last_col,
        }
    }

    /// Column-major copy: for each column, (row, value) sorted by row.
    pub fn columns(&self) -> Vec<Vec<(usize, T)>> {
        let mut cols = vec![Vec::new(); self.last_col + 1];
        for (n, row) in self.rows.iter().enumerate() {
            for (k, v) in row {
                cols[*k].push((n, v.clone()));
            }
        }
        cols
    }
}
