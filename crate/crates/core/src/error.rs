use std::io;

use thiserror::Error;

use crate::zerofinder::ZeroCandidate;

/// Which of the two beta solutions failed inside a [`crate::beta::BetaPair`] evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaKind {
    Zeta,
    Meta,
}

impl std::fmt::Display for BetaKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BetaKind::Zeta => f.write_str("b_zeta"),
            BetaKind::Meta => f.write_str("b_m"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("singularity: {what} (|guarded quantity| = {magnitude:e})")]
    Singularity { what: &'static str, magnitude: f64 },

    #[error("degenerate Euler product: factor {index} has magnitude {magnitude:e}")]
    DegenerateProduct { index: usize, magnitude: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{which} failed: {source}")]
    Beta {
        which: BetaKind,
        #[source]
        source: Box<Error>,
    },

    #[error("scan failed: every grid point in [{t_min}, {t_max}] was singular")]
    ScanFailed { t_min: f64, t_max: f64 },

    #[error("refinement did not reach the requested width after {iterations} iterations (best t = {})", best.t)]
    RefinementFailed {
        iterations: usize,
        best: Box<ZeroCandidate>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by evaluating too close to a pole or a degenerate factor.
    pub fn is_singular(&self) -> bool {
        match self {
            Error::Singularity { .. } | Error::DegenerateProduct { .. } | Error::NonFinite(_) => {
                true
            }
            Error::Beta { source, .. } => source.is_singular(),
            _ => false,
        }
    }

    /// Process exit status: 1 I/O, 2 usage, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::InvalidArgument(_) | Error::Domain(_) | Error::Parse(_) => 2,
            Error::Beta { source, .. } => source.exit_code(),
            Error::Singularity { .. }
            | Error::DegenerateProduct { .. }
            | Error::NonFinite(_)
            | Error::ScanFailed { .. }
            | Error::RefinementFailed { .. } => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
