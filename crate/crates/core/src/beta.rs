//! The two closed-form solutions for the auxiliary variable `b` and their residual.
//!
//! Writing `A` for the alternating prime zeta, `P` for the prime zeta, `Π`
//! for the Euler product and `X = ζ (1 + P) Π`:
//!
//! * `b_m    = (2 / (1 + A))^(1/s)`            (the meta function set to zero)
//! * `b_zeta = (2 / (1 - A / (X - 1)))^(1/s)`  (zeta equated with the meta function)
//!
//! The two inner bases differ by `2 A X / ((X - 1 - A)(1 + A))`, so they
//! agree exactly when `X = 0`, i.e. at a zero of the eta-form zeta.
//!
//! All roots use the principal branch. When `Log(base) / s` has an imaginary
//! part outside `(-π, π]`, raising the root back to the power `s` does not
//! recover the base; such points are reported through
//! [`BetaPair::branch_wrapped`].

use std::f64::consts::PI;

use crate::complex::{ensure_finite, Complex};
use crate::error::{BetaKind, Error, Result};
use crate::series::{Evaluator, PrimeSums};

/// `exp(exponent · Log(base))` with `Im(Log) ∈ (-π, π]`.
pub fn principal_power(base: Complex, exponent: Complex) -> Result<Complex> {
    ensure_finite(base, "power base")?;
    ensure_finite(exponent, "power exponent")?;
    if base.re == 0.0 && base.im == 0.0 {
        if exponent.re <= 0.0 {
            return Err(Error::Singularity {
                what: "zero raised to a power with Re <= 0",
                magnitude: 0.0,
            });
        }
        return Ok(Complex::new(0.0, 0.0));
    }
    ensure_finite((exponent * principal_log(base)).exp(), "principal power")
}

/// Principal logarithm; a signed-zero imaginary part is read as `+0` so that
/// the negative real axis maps to `Im = +π`.
pub fn principal_log(z: Complex) -> Complex {
    let z = if z.im == 0.0 {
        Complex::new(z.re, 0.0)
    } else {
        z
    };
    z.ln()
}

/// True when `(base^(1/s))^s` would land on a different sheet than `base`.
pub fn branch_wraps(base: Complex, s: Complex) -> bool {
    (principal_log(base) / s).im.abs() > PI
}

/// Both beta values at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPair {
    pub s: Complex,
    pub b_zeta: Complex,
    pub b_m: Complex,
    /// `|b_zeta - b_m|`
    pub residual: f64,
    /// Either root wrapped across the principal branch cut.
    pub branch_wrapped: bool,
}

impl BetaPair {
    pub fn re_gap(&self) -> f64 {
        (self.b_zeta.re - self.b_m.re).abs()
    }

    pub fn im_gap(&self) -> f64 {
        (self.b_zeta.im - self.b_m.im).abs()
    }
}

/// Inner bases of the two roots, before raising to `1/s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaBases {
    pub zeta: Complex,
    pub meta: Complex,
}

fn check_s(s: Complex) -> Result<()> {
    ensure_finite(s, "beta argument")?;
    if s.re == 0.0 && s.im == 0.0 {
        return Err(Error::Domain("beta solutions need s != 0".into()));
    }
    Ok(())
}

impl Evaluator {
    fn b_m_base(&self, sums: &PrimeSums) -> Result<Complex> {
        let denom = 1.0 + sums.alt_prime_zeta;
        if denom.norm() < self.config().pole_guard {
            return Err(Error::Singularity {
                what: "1 + alternating prime zeta",
                magnitude: denom.norm(),
            });
        }
        Ok(2.0 / denom)
    }

    fn b_zeta_base(&self, sums: &PrimeSums, zeta: Complex) -> Result<Complex> {
        let guard = self.config().pole_guard;
        let x = zeta * (1.0 + sums.prime_zeta) * sums.euler_product;
        let x_minus_one = x - 1.0;
        if x_minus_one.norm() <= guard {
            return Err(Error::Singularity {
                what: "b_zeta pole X = 1",
                magnitude: x_minus_one.norm(),
            });
        }
        let inner = 1.0 - sums.alt_prime_zeta / x_minus_one;
        if inner.norm() <= guard {
            return Err(Error::Singularity {
                what: "b_zeta inner base 1 - A/(X-1)",
                magnitude: inner.norm(),
            });
        }
        ensure_finite(2.0 / inner, "b_zeta base")
    }

    /// The inner bases `2/(1 + A)` and `2/(1 - A/(X - 1))`.
    pub fn beta_bases(&self, s: Complex) -> Result<BetaBases> {
        check_s(s)?;
        let sums = self.prime_sums(s)?;
        let zeta = self.eta_zeta(s)?.value;
        Ok(BetaBases {
            zeta: self.b_zeta_base(&sums, zeta)?,
            meta: self.b_m_base(&sums)?,
        })
    }

    /// `b_m = (2 / (1 + A(s)))^(1/s)`.
    pub fn b_m(&self, s: Complex) -> Result<Complex> {
        check_s(s)?;
        let sums = self.prime_sums(s)?;
        principal_power(self.b_m_base(&sums)?, s.inv())
    }

    /// `b_zeta = (2 / (1 - A / (ζ (1 + P) Π - 1)))^(1/s)`.
    pub fn b_zeta(&self, s: Complex) -> Result<Complex> {
        check_s(s)?;
        let sums = self.prime_sums(s)?;
        let zeta = self.eta_zeta(s)?.value;
        principal_power(self.b_zeta_base(&sums, zeta)?, s.inv())
    }

    /// Both betas at `s`, sharing one pass over the primes. Errors are tagged
    /// with the beta that failed.
    pub fn beta_pair(&self, s: Complex) -> Result<BetaPair> {
        check_s(s)?;
        let tag = |which: BetaKind| {
            move |e: Error| Error::Beta {
                which,
                source: Box::new(e),
            }
        };
        // the prime sums feed both solutions; a degenerate product only hurts b_zeta
        let sums = self.prime_sums(s).map_err(tag(BetaKind::Zeta))?;
        let meta_base = self.b_m_base(&sums).map_err(tag(BetaKind::Meta))?;
        let b_m = principal_power(meta_base, s.inv()).map_err(tag(BetaKind::Meta))?;
        let zeta = self.eta_zeta(s).map_err(tag(BetaKind::Zeta))?.value;
        let zeta_base = self.b_zeta_base(&sums, zeta).map_err(tag(BetaKind::Zeta))?;
        let b_zeta = principal_power(zeta_base, s.inv()).map_err(tag(BetaKind::Zeta))?;
        Ok(BetaPair {
            s,
            b_zeta,
            b_m,
            residual: (b_zeta - b_m).norm(),
            branch_wrapped: branch_wraps(zeta_base, s) || branch_wraps(meta_base, s),
        })
    }

    /// `|b_zeta(s) - b_m(s)|`.
    pub fn beta_residual(&self, s: Complex) -> Result<f64> {
        self.beta_pair(s).map(|p| p.residual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::c;
    use crate::series::EvalConfig;

    fn eval(k: usize) -> Evaluator {
        Evaluator::new(EvalConfig::default().with_primes(k)).unwrap()
    }

    #[test]
    fn power_special_cases() {
        let w = c(0.3, -7.0);
        assert!((principal_power(c(1.0, 0.0), w).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let root = principal_power(c(-1.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((root - c(0.0, 1.0)).norm() < 1e-15);
        // signed zero does not flip the branch
        let root = principal_power(c(-1.0, -0.0), c(0.5, 0.0)).unwrap();
        assert!((root - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(
            principal_power(c(0.0, 0.0), c(0.5, 1.0)).unwrap(),
            c(0.0, 0.0)
        );
        assert!(matches!(
            principal_power(c(0.0, 0.0), c(0.0, 1.0)),
            Err(Error::Singularity { .. })
        ));
        assert!(principal_power(c(f64::INFINITY, 0.0), w).is_err());
    }

    #[test]
    fn power_matches_scalar_oracle() {
        // 2^(0.5+14.134725i) = 2^0.5 (cos(t ln 2) + i sin(t ln 2))
        let (sigma, t) = (0.5f64, 14.134725f64);
        let ln2 = std::f64::consts::LN_2;
        let expected = c(
            (sigma * ln2).exp() * (t * ln2).cos(),
            (sigma * ln2).exp() * (t * ln2).sin(),
        );
        let got = principal_power(c(2.0, 0.0), c(sigma, t)).unwrap();
        assert!((got - expected).norm() < 1e-14);
    }

    #[test]
    fn b_m_single_prime() {
        let b = eval(1).b_m(c(2.0, 0.0)).unwrap();
        assert!((b - c(1.6f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn b_m_composes_with_series() {
        let e = eval(1000);
        let s = c(2.0, 0.0);
        let a = e.alt_prime_zeta_trunc(s).unwrap().value.re;
        let expected = (2.0 / (1.0 + a)).sqrt();
        assert!((e.b_m(s).unwrap().re - expected).abs() < 1e-15);
    }

    #[test]
    fn b_zeta_nested_form_matches_simplified_form() {
        // literal nesting {[(1/2)(1 - A/(X - 1))]^-1}^(1/s) at K = 2
        let e = eval(2);
        for s in [c(2.0, 0.0), c(0.7, 3.0), c(1.5, -20.0), c(0.3, 9.0)] {
            let a = e.alt_prime_zeta_trunc(s).unwrap().value;
            let p = e.prime_zeta_trunc(s).unwrap().value;
            let prod = e.euler_product_trunc(s).unwrap().value;
            let z = e.eta_zeta(s).unwrap().value;
            let half = 0.5 * (1.0 - a / (z * (1.0 + p) * prod - 1.0));
            let literal = (half.inv().ln() / s).exp();
            let got = e.b_zeta(s).unwrap();
            assert!((got - literal).norm() < 1e-12 * literal.norm(), "{s}");
        }
    }

    #[test]
    fn pair_at_two_is_distinct() {
        let p = eval(1000).beta_pair(c(2.0, 0.0)).unwrap();
        assert!(p.b_zeta.re.is_finite());
        assert!(p.residual > 0.1);
        assert!(!p.branch_wrapped);
    }

    #[test]
    fn zero_argument_rejected() {
        let e = eval(10);
        assert!(matches!(e.b_m(c(0.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(e.b_zeta(c(0.0, 0.0)), Err(Error::Domain(_))));
        assert!(e.beta_pair(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn pair_errors_are_tagged() {
        // s = 1 is the eta pole: b_m exists, b_zeta does not
        let e = eval(10);
        assert!(e.b_m(c(1.0, 0.0)).is_ok());
        match e.beta_pair(c(1.0, 0.0)) {
            Err(Error::Beta {
                which: BetaKind::Zeta,
                source,
            }) => assert!(source.is_singular()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coincide_at_first_zero() {
        let e = eval(1000);
        let at_zero = e.beta_pair(c(0.5, 14.134725)).unwrap();
        assert!(at_zero.residual < 1e-4, "{}", at_zero.residual);
        let between = e.beta_pair(c(0.5, 17.5)).unwrap();
        assert!(between.residual > 10.0 * at_zero.residual);
    }

    #[test]
    fn branch_wrap_detection() {
        // negative real base with real 0 < s < 1 needs Im(Log)/s = π/s > π
        assert!(branch_wraps(c(-2.0, 0.0), c(0.5, 0.0)));
        assert!(!branch_wraps(c(-2.0, 0.0), c(2.0, 0.0)));
        assert!(!branch_wraps(c(3.0, 0.1), c(0.5, 14.0)));
    }

    #[test]
    fn deterministic() {
        let e = eval(1000);
        let s = c(0.5, 21.3);
        let a = e.beta_pair(s).unwrap();
        let b = e.beta_pair(s).unwrap();
        assert_eq!(a.b_zeta.re.to_bits(), b.b_zeta.re.to_bits());
        assert_eq!(a.b_m.im.to_bits(), b.b_m.im.to_bits());
    }
}
