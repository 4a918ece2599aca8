//! The meta function
//!
//! `m(s; b) = [1 + (1 - 2 b^-s)^-1 A(s)] / [Π(s) (1 + P(s))]`
//!
//! evaluated for an explicit `b`. Feeding it `b_m` gives zero by
//! construction; feeding it `b_zeta` gives back the eta-form zeta.

use std::fmt;
use std::str::FromStr;

use crate::beta::principal_power;
use crate::complex::{ensure_finite, parse_complex, Complex};
use crate::error::{Error, Result};
use crate::series::Evaluator;

/// Which `b` the meta function is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MetaMode {
    #[default]
    WithBZeta,
    WithBM,
    Fixed(Complex),
}

impl MetaMode {
    pub fn validate(&self) -> Result<()> {
        match self {
            MetaMode::Fixed(b) if b.re == 0.0 && b.im == 0.0 => Err(Error::InvalidArgument(
                "fixed meta b must be nonzero".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MetaMode::WithBZeta => "with_b_zeta",
            MetaMode::WithBM => "with_b_m",
            MetaMode::Fixed(_) => "fixed",
        }
    }
}

impl fmt::Display for MetaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetaMode::Fixed(b) => write!(f, "fixed:{}", crate::complex::format_complex(*b)),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for MetaMode {
    type Err = Error;

    /// `with_b_zeta`, `with_b_m`, or `fixed:<complex>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mode = match s {
            "with_b_zeta" | "b_zeta" => MetaMode::WithBZeta,
            "with_b_m" | "b_m" => MetaMode::WithBM,
            _ => match s
                .strip_prefix("fixed:")
                .or_else(|| s.strip_prefix("fixed="))
            {
                Some(b) => MetaMode::Fixed(parse_complex(b)?),
                None => return Err(Error::Parse(format!("unknown meta mode {s:?}"))),
            },
        };
        mode.validate()?;
        Ok(mode)
    }
}

impl Evaluator {
    /// The meta function at `s` for the given `b`.
    pub fn meta(&self, s: Complex, b: Complex) -> Result<Complex> {
        ensure_finite(b, "meta b")?;
        if b.re == 0.0 && b.im == 0.0 {
            return Err(Error::InvalidArgument("meta requires b != 0".into()));
        }
        let guard = self.config().pole_guard;
        let sums = self.prime_sums(s)?;
        let prefactor = 1.0 - 2.0 * principal_power(b, -s)?;
        if prefactor.norm() <= guard {
            return Err(Error::Singularity {
                what: "meta prefactor pole b^s = 2",
                magnitude: prefactor.norm(),
            });
        }
        let denom = sums.euler_product * (1.0 + sums.prime_zeta);
        if denom.norm() <= guard {
            return Err(Error::Singularity {
                what: "meta denominator Π(1 + P)",
                magnitude: denom.norm(),
            });
        }
        let numer = 1.0 + sums.alt_prime_zeta / prefactor;
        ensure_finite(numer / denom, "meta")
    }

    /// The meta function with `b` chosen by `mode`.
    pub fn meta_auto(&self, s: Complex, mode: MetaMode) -> Result<Complex> {
        mode.validate()?;
        let b = match mode {
            MetaMode::WithBZeta => self.b_zeta(s)?,
            MetaMode::WithBM => self.b_m(s)?,
            MetaMode::Fixed(b) => b,
        };
        self.meta(s, b)
    }
}
