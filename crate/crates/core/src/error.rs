use std::fmt;

use thiserror::Error;

use crate::point_process::JumpSequence;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature or root finding stopped short of its tolerance.
    #[error("{what} did not converge (best estimate {estimate:e}, error estimate {error:e})")]
    Convergence {
        what: &'static str,
        estimate: f64,
        error: f64,
    },

    /// The jump or series budget ran out before the truncation tolerance was met.
    /// The partial sequence is kept so the caller can inspect how far it got.
    #[error("truncation tolerance not met after {jumps} terms (tail bound {tail_bound:e})")]
    Truncation {
        jumps: usize,
        tail_bound: f64,
        partial: Option<Box<JumpSequence>>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

// The partial sequence can hold a million jumps; keep Debug output short.
impl fmt::Debug for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => f.debug_tuple("Domain").field(m).finish(),
            Error::Convergence { what, estimate, error } => f
                .debug_struct("Convergence")
                .field("what", what)
                .field("estimate", estimate)
                .field("error", error)
                .finish(),
            Error::Truncation { jumps, tail_bound, partial } => f
                .debug_struct("Truncation")
                .field("jumps", jumps)
                .field("tail_bound", tail_bound)
                .field("partial", &partial.as_ref().map(|p| format!("<{} jumps>", p.len())))
                .finish(),
            Error::Unsupported(m) => f.debug_tuple("Unsupported").field(m).finish(),
        }
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        // written negated so that NaN arguments fail the check
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !($cond) {
            return Err($crate::error::Error::Domain(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
