//! Exact scalar ring and the generic noncommutative expression engine.
//!
//! Expressions are formal sums of words over an ordered generator set with
//! coefficients in [`Scalar`]. [`normalize`] rewrites an expression to its
//! unique canonical form under an [`AlgebraSpec`]: every word sorted into
//! generator order and every power rule exhausted.

mod expr;
mod normalize;
mod scalar;
mod spec;
mod word;

use thiserror::Error;

pub use expr::OpExpr;
pub use normalize::{
    adjoint, bracket_formal, brackets, equals, is_canonical_word, is_normal, normalize, reduce,
    BracketKind, Reduction, Strategy,
};
pub use scalar::{GaussianRational, Scalar, UnitMonomial};
pub use spec::{AlgebraSpec, AlgebraSpecBuilder, Rule, DEFAULT_STEP_BUDGET};
pub use word::{Factor, GenId, Generator, GeneratorSet, OpWord, WordDisplay};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("scalar {0} is not invertible (zero or more than one monomial)")]
    NotInvertible(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("expressions belong to different generator sets")]
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("reduction exceeded its budget of {budget} rule applications")]
    BudgetExceeded { budget: usize },
    #[error("generator {0} is not self-adjoint")]
    NotSelfAdjoint(String),
    #[error("negative power of non-invertible generator {0}")]
    NotInvertible(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("rule pair {0}, {1} is already in canonical order")]
    InOrderPair(String, String),
    #[error("generator {0} cannot carry power {1} in a rule")]
    BadUnit(String, i32),
    #[error("power rule on {0} needs exponent >= 2, got {1}")]
    BadPowerRule(String, i32),
    #[error("rule replacement uses a different generator set")]
    ForeignReplacement,
    #[error("no rule reduces {left}^{left_sign} * {right}^{right_sign}")]
    MissingRule {
        left: String,
        left_sign: i32,
        right: String,
        right_sign: i32,
    },
}
