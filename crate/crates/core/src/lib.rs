//! Weighted-mean sequence spaces: the Λ transform, its inverse, paranormed
//! spaces ℓ(λ, p), their duals and matrix transformations into ℓ(q), c₀(q),
//! c(q) and ℓ_∞(q), evaluated on finite horizons.

pub mod cli;
pub mod duality;
pub mod error;
pub mod expr;
pub mod input;
pub mod lambda_ops;
pub mod matrix;
pub mod matrix_class;
pub mod paranorm;
pub mod scalar;
pub mod seq;
pub mod verdict;

pub use error::{Error, Result};
pub use expr::{Expr, ParseError};
pub use lambda_ops::LambdaTable;
pub use scalar::{Mode, Real, Scalar};
pub use seq::{ExponentSeq, Exponents, LambdaSeq, SeqSpec, TailRule};
pub use verdict::{Thresholds, Verdict, VerdictTag};
