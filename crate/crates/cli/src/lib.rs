//! Command-line front end for the exact Lie algebra engine: a text format
//! for algebra definitions, a dispatcher for the analysis subcommands, and
//! deterministic JSON (or aligned plaintext) reports.

pub mod commands;
pub mod lie_file;
pub mod templates;

use serde::Serialize;

/// A dispatched command's machine-readable result. Serialized as the
/// top-level JSON object on stdout; field order and map ordering are
/// deterministic, so reports are byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct CommandReport {
    /// The subcommand that produced this report.
    pub command: String,
    /// Structured result payload.
    pub result: serde_json::Value,
    /// Human-oriented notes (assumptions made, defaults filled in).
    pub diagnostics: Vec<String>,
}

/// A command's full outcome: the report plus its plaintext rendering.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: CommandReport,
    pub pretty: String,
}

/// Errors that terminate a command, split by exit code: domain errors
/// (bad mathematics or bad input data) exit 1, usage errors exit 2.
#[derive(Debug, Clone, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn domain(msg: impl Into<String>) -> Self {
        CliError::Domain(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

macro_rules! domain_from {
    ($($ty:ty),* $(,)?) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Domain(e.to_string())
            }
        })*
    };
}

domain_from!(
    liekit::finite::FiniteError,
    liekit::classify::ClassifyError,
    liekit::contraction::ContractionError,
    liekit::deformation::DeformationError,
    liekit::graded::GradedError,
    liekit::scalar::ScalarError,
    lie_file::LieFileError,
);

/// Parse a class label in its display syntax: `C3`, `n3`, `r2+C`, `r3`,
/// `sl2`, or `r3(lambda=<Gaussian rational>)`.
pub fn parse_label(s: &str) -> Result<liekit::classify::Class3Label, CliError> {
    use liekit::classify::{Class3Label, Lambda};
    let s = s.trim();
    match s {
        "C3" => return Ok(Class3Label::Abelian),
        "n3" => return Ok(Class3Label::Heisenberg),
        "r2+C" => return Ok(Class3Label::R2PlusC),
        "r3" => return Ok(Class3Label::R3),
        "sl2" => return Ok(Class3Label::Sl2),
        _ => {}
    }
    if let Some(inner) = s
        .strip_prefix("r3(lambda=")
        .and_then(|rest| rest.strip_suffix(')'))
    {
        let v = liekit::scalar::parse::parse_gaussian(inner).map_err(|e| {
            CliError::usage(format!("`{inner}` is not a Gaussian rational: {e}"))
        })?;
        return Ok(Class3Label::R3Lambda {
            lambda: Lambda::Numeric(v),
        });
    }
    Err(CliError::usage(format!(
        "`{s}` is not a class label (expected C3, n3, r2+C, r3, sl2, or r3(lambda=...))"
    )))
}
