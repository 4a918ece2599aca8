//! Prime-series representations of the Riemann zeta function, the two
//! inner-base functions `b_zeta` and `b_m`, the meta function, a
//! critical-line zero finder, and figure data generators.

pub mod beta;
pub mod cli;
pub mod complex;
pub mod config;
pub mod error;
pub mod figures;
pub mod meta;
pub mod primes;
pub mod series;
pub mod zerofinder;

pub use beta::{BetaBases, BetaPair};
pub use complex::{c, format_complex, parse_complex, Complex};
pub use config::{Overrides, RunConfig};
pub use error::{BetaKind, Error, Result};
pub use meta::MetaMode;
pub use primes::{generate_primes, PrimeTable};
pub use series::{Acceleration, EvalConfig, Evaluator, PrimeSums, SeriesValue};
pub use zerofinder::{ReferenceZeroTable, ScanOptions, VerificationReport, ZeroCandidate};
