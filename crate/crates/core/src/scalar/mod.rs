//! Exact scalars: Gaussian rationals, sparse parameter polynomials that are
//! Laurent in the contraction variable `eps`, and a small rational-function
//! closure used where ratios are unavoidable (classification invariants,
//! intermediate elimination steps).
//!
//! Design rules enforced here and relied on everywhere else:
//!
//! * coefficients live in Q(i), never floats;
//! * a polynomial's monomials may only carry negative exponents on the
//!   distinguished variable [`EPS`] — all other parameters are ordinary
//!   polynomial variables;
//! * canonical form means "no zero coefficients stored", so structural
//!   equality of two expressions is mathematical equality;
//! * parameter names are validated against an explicit [`ParamSet`] registry
//!   at the boundaries (file parsing, [`normalize`]), not deep inside
//!   arithmetic.

mod gaussian;
mod monomial;
mod expr;
mod ratio;
pub mod parse;

pub use gaussian::GaussianRational;
pub use monomial::{Monomial, EPS};
pub use expr::{Divergent, ScalarExpr};
pub use ratio::{LimitError, RatioExpr};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Errors raised by scalar construction, validation and evaluation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("parameter `{0}` is not declared in the parameter registry")]
    UndeclaredParameter(String),
    #[error("variable `{0}` carries a negative exponent; only `eps` may")]
    NegativeExponent(String),
    #[error("no value assigned to `{0}` during evaluation")]
    MissingAssignment(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by a non-constant expression is not supported here")]
    NonConstantDivisor,
    #[error("`{0}` is reserved and cannot be declared as a parameter")]
    ReservedName(String),
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
}

/// The declared symbolic parameters an expression may mention.
///
/// `eps` is always implicitly present (it is the contraction variable, not a
/// user parameter) and cannot be declared explicitly. The imaginary unit `i`
/// is an expression literal, not a parameter, and is likewise rejected.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamSet {
    names: BTreeSet<String>,
}

/// `true` for `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ParamSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new<I, S>(names: I) -> Result<Self, ScalarError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = Self::default();
        for name in names {
            set.declare(name.into())?;
        }
        Ok(set)
    }

    pub fn declare(&mut self, name: String) -> Result<(), ScalarError> {
        if name == EPS || name == "i" {
            return Err(ScalarError::ReservedName(name));
        }
        if !is_identifier(&name) {
            return Err(ScalarError::BadIdentifier(name));
        }
        self.names.insert(name);
        Ok(())
    }

    /// Membership check; the contraction variable is always allowed.
    pub fn contains(&self, name: &str) -> bool {
        name == EPS || self.names.contains(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| s.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn union(&self, other: &ParamSet) -> ParamSet {
        ParamSet {
            names: self.names.union(&other.names).cloned().collect(),
        }
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for n in &self.names {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{n}")?;
            first = false;
        }
        Ok(())
    }
}

/// Validate an expression against a parameter registry and return its
/// canonical form.
///
/// Canonicalisation proper (dropping zero coefficients, merging equal
/// monomials) is maintained by construction in all arithmetic, so this is
/// primarily the boundary check: every mentioned variable must be declared,
/// and only `eps` may appear with a negative exponent. Idempotent.
pub fn normalize(expr: ScalarExpr, params: &ParamSet) -> Result<ScalarExpr, ScalarError> {
    expr.check_well_formed()?;
    for var in expr.vars() {
        if !params.contains(&var) {
            return Err(ScalarError::UndeclaredParameter(var));
        }
    }
    Ok(expr.canonicalized())
}
