//! Random discrete distributions on the infinite simplex built from Poisson and
//! negative binomial point processes.
//!
//! The library covers
//!
//! - the Lévy densities used as intensities ([`levy`]),
//! - ordered-jump simulation of `PPP(vρ)` and `BN(r, ρ)` with a certified
//!   truncation bound ([`point_process`]),
//! - the simplex samplers: normalised jumps, stick-breaking, trimmed stable,
//!   Beta-ratio, and size-biased permutation ([`simplex`]),
//! - the remaining-sum densities, recursions and moment constants
//!   ([`densities`]),
//! - the change-of-measure estimator for the trimmed class ([`estimators`]),
//! - KS / chi-square machinery and the verification criteria ([`stats`],
//!   [`verify`]).

#![allow(clippy::excessive_precision)]

pub mod densities;
pub mod error;
pub mod estimators;
pub mod levy;
pub mod point_process;
pub mod rng;
pub mod simplex;
pub mod special_fn;
pub mod stats;
pub mod verify;
pub mod zipf;

pub use error::{Error, Result};
pub use levy::LevyFamily;
pub use point_process::JumpSequence;
pub use simplex::{SimplexSample, SizeBiasedDraw};
