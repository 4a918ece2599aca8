//! Truncated prime series and the eta-form analytic zeta.
//!
//! All prime series run over the first `prime_count` primes with no
//! acceleration: the truncation is part of the definition of the meta
//! function and the two beta solutions, not an approximation to be hidden.
//! Only the Dirichlet eta series is accelerated, because it is the one
//! quantity standing in for the analytic zeta in the critical strip.
//!
//! The remainder function is evaluated through its product form
//! `Π(1 - p^-s) (1 + P(s)) - 1`; the nested alternating sums that define it
//! term by term are only expanded in tests.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::complex::{ensure_finite, Complex};
use crate::error::{Error, Result};
use crate::primes::{self, PrimeTable};

pub const DEFAULT_PRIME_COUNT: usize = 1000;
pub const DEFAULT_ETA_TERMS: usize = 64;
pub const DEFAULT_POLE_GUARD: f64 = 1e-8;
pub const MIN_ETA_TERMS: usize = 8;

/// How the alternating eta series is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Acceleration {
    /// Binomial (Euler-Knopp) average of the partial sums `S_0..S_N`.
    #[default]
    EulerTransform,
    /// Plain partial sum of `N` terms, closed with a second-order endpoint
    /// average `(S_N + 2 S_{N+1} + S_{N+2}) / 4`.
    DirectPartialSum,
}

impl Acceleration {
    pub fn as_str(self) -> &'static str {
        match self {
            Acceleration::EulerTransform => "euler_transform",
            Acceleration::DirectPartialSum => "direct_partial_sum",
        }
    }
}

impl fmt::Display for Acceleration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Acceleration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "euler_transform" | "euler" => Ok(Acceleration::EulerTransform),
            "direct_partial_sum" | "direct" => Ok(Acceleration::DirectPartialSum),
            other => Err(Error::Parse(format!("unknown acceleration {other:?}"))),
        }
    }
}

/// Truncation and acceleration parameters shared by every series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub prime_count: usize,
    pub eta_terms: usize,
    pub acceleration: Acceleration,
    pub pole_guard: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            prime_count: DEFAULT_PRIME_COUNT,
            eta_terms: DEFAULT_ETA_TERMS,
            acceleration: Acceleration::EulerTransform,
            pole_guard: DEFAULT_POLE_GUARD,
        }
    }
}

impl EvalConfig {
    pub fn with_primes(mut self, prime_count: usize) -> Self {
        self.prime_count = prime_count;
        self
    }

    pub fn with_eta_terms(mut self, eta_terms: usize) -> Self {
        self.eta_terms = eta_terms;
        self
    }

    pub fn with_acceleration(mut self, acceleration: Acceleration) -> Self {
        self.acceleration = acceleration;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.prime_count < 1 {
            return Err(Error::InvalidArgument("prime_count must be >= 1".into()));
        }
        if self.eta_terms < MIN_ETA_TERMS {
            return Err(Error::InvalidArgument(format!(
                "eta_terms must be >= {MIN_ETA_TERMS}, got {}",
                self.eta_terms
            )));
        }
        if !(self.pole_guard > 0.0 && self.pole_guard.is_finite()) {
            return Err(Error::InvalidArgument(
                "pole_guard must be a positive number".into(),
            ));
        }
        Ok(())
    }
}

/// A series value together with how it was truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex,
    pub terms_used: usize,
    pub truncation_estimate: f64,
}

/// The truncated prime quantities at one point, computed in a single pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimeSums {
    /// `Σ p_k^-s`
    pub prime_zeta: Complex,
    /// `Σ (-1)^(k+1) p_k^-s`
    pub alt_prime_zeta: Complex,
    /// `Π (1 - p_k^-s)`
    pub euler_product: Complex,
}

/// Evaluation context: a validated [`EvalConfig`] plus the prime table it refers to.
///
/// Every operation is a pure function of `(s, config, primes)`, so one
/// evaluator can be shared across threads.
#[derive(Debug, Clone)]
pub struct Evaluator {
    cfg: EvalConfig,
    primes: Arc<PrimeTable>,
    log_primes: Arc<[f64]>,
    // ln(1..=N+3) for the eta series; N+2 terms are needed by the endpoint average
    log_naturals: Arc<[f64]>,
    euler_weights: Arc<[f64]>,
    // order N-1, for the last-correction estimate
    euler_weights_prev: Arc<[f64]>,
}

impl Evaluator {
    /// Builds an evaluator, taking primes from the process-wide cache.
    pub fn new(cfg: EvalConfig) -> Result<Self> {
        cfg.validate()?;
        let table = primes::cached(cfg.prime_count)?;
        Self::with_primes(cfg, table)
    }

    pub fn with_primes(cfg: EvalConfig, table: Arc<PrimeTable>) -> Result<Self> {
        cfg.validate()?;
        if table.len() < cfg.prime_count {
            return Err(Error::InvalidArgument(format!(
                "prime table holds {} primes, {} requested",
                table.len(),
                cfg.prime_count
            )));
        }
        let log_primes: Arc<[f64]> = table.as_slice()[..cfg.prime_count]
            .iter()
            .map(|&p| (p as f64).ln())
            .collect();
        let log_naturals: Arc<[f64]> = (1..=cfg.eta_terms + 3).map(|n| (n as f64).ln()).collect();
        Ok(Evaluator {
            cfg,
            primes: table,
            log_primes,
            log_naturals,
            euler_weights: euler_term_weights(cfg.eta_terms).into(),
            euler_weights_prev: euler_term_weights(cfg.eta_terms - 1).into(),
        })
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    pub fn primes(&self) -> &PrimeTable {
        &self.primes
    }

    /// `(1 - 2^(1-s))^-1 Σ (-1)^(n+1) n^-s`, the eta form of ζ(s) valid for `Re(s) > 0`.
    pub fn eta_zeta(&self, s: Complex) -> Result<SeriesValue> {
        ensure_finite(s, "eta_zeta argument")?;
        if s.re <= 0.0 {
            return Err(Error::Domain(format!(
                "eta_zeta requires Re(s) > 0, got Re(s) = {}",
                s.re
            )));
        }
        let prefactor = Complex::new(1.0, 0.0) - 2.0 * (-s * std::f64::consts::LN_2).exp();
        if prefactor.norm() <= self.cfg.pole_guard {
            return Err(Error::Singularity {
                what: "eta prefactor 1 - 2^(1-s)",
                magnitude: prefactor.norm(),
            });
        }
        let eta = match self.cfg.acceleration {
            Acceleration::EulerTransform => self.eta_euler(s),
            Acceleration::DirectPartialSum => self.eta_direct(s),
        };
        let value = ensure_finite(eta.value / prefactor, "eta_zeta")?;
        Ok(SeriesValue {
            value,
            terms_used: eta.terms_used,
            truncation_estimate: eta.truncation_estimate / prefactor.norm(),
        })
    }

    fn eta_term(&self, s: Complex, k: usize) -> Complex {
        // (-1)^k (k+1)^-s
        let t = (-s * self.log_naturals[k]).exp();
        if k.is_multiple_of(2) {
            t
        } else {
            -t
        }
    }

    fn eta_euler(&self, s: Complex) -> SeriesValue {
        let n = self.cfg.eta_terms;
        let mut sum = Complex::new(0.0, 0.0);
        let mut prev_sum = Complex::new(0.0, 0.0);
        for k in 0..=n {
            let term = self.eta_term(s, k);
            sum += term * self.euler_weights[k];
            if k < n {
                prev_sum += term * self.euler_weights_prev[k];
            }
        }
        SeriesValue {
            value: sum,
            terms_used: n + 1,
            truncation_estimate: (sum - prev_sum).norm(),
        }
    }

    fn eta_direct(&self, s: Complex) -> SeriesValue {
        let n = self.cfg.eta_terms;
        let mut partial = Complex::new(0.0, 0.0);
        for k in 0..n {
            partial += self.eta_term(s, k);
        }
        let a1 = self.eta_term(s, n);
        let a2 = self.eta_term(s, n + 1);
        // (S_N + 2 S_{N+1} + S_{N+2}) / 4
        let value = partial + a1 * 0.75 + a2 * 0.25;
        SeriesValue {
            value,
            terms_used: n + 2,
            truncation_estimate: ((a1 + a2) * 0.25).norm(),
        }
    }

    fn prime_power(&self, s: Complex, k: usize) -> Complex {
        (-s * self.log_primes[k]).exp()
    }

    /// `Σ_{k<=K} p_k^-s`.
    pub fn prime_zeta_trunc(&self, s: Complex) -> Result<SeriesValue> {
        ensure_finite(s, "prime_zeta argument")?;
        let k = self.cfg.prime_count;
        let value: Complex = (0..k).map(|i| self.prime_power(s, i)).sum();
        Ok(SeriesValue {
            value: ensure_finite(value, "prime_zeta")?,
            terms_used: k,
            truncation_estimate: self.prime_power(s, k - 1).norm(),
        })
    }

    /// `Σ_{k<=K} (-1)^(k+1) p_k^-s`; the estimate is the magnitude of the last term.
    pub fn alt_prime_zeta_trunc(&self, s: Complex) -> Result<SeriesValue> {
        ensure_finite(s, "alt_prime_zeta argument")?;
        let k = self.cfg.prime_count;
        let value: Complex = (0..k)
            .map(|i| {
                let t = self.prime_power(s, i);
                if i % 2 == 0 {
                    t
                } else {
                    -t
                }
            })
            .sum();
        Ok(SeriesValue {
            value: ensure_finite(value, "alt_prime_zeta")?,
            terms_used: k,
            truncation_estimate: self.prime_power(s, k - 1).norm(),
        })
    }

    /// `Π_{k<=K} (1 - p_k^-s)`. Fails if any factor is within `pole_guard` of zero.
    pub fn euler_product_trunc(&self, s: Complex) -> Result<SeriesValue> {
        ensure_finite(s, "euler_product argument")?;
        let k = self.cfg.prime_count;
        let mut product = Complex::new(1.0, 0.0);
        let mut last = Complex::new(0.0, 0.0);
        for i in 0..k {
            let factor = Complex::new(1.0, 0.0) - self.prime_power(s, i);
            if factor.norm() < self.cfg.pole_guard {
                return Err(Error::DegenerateProduct {
                    index: i + 1,
                    magnitude: factor.norm(),
                });
            }
            last = factor;
            product *= factor;
        }
        Ok(SeriesValue {
            value: ensure_finite(product, "euler_product")?,
            terms_used: k,
            truncation_estimate: (product * (Complex::new(1.0, 0.0) - last)).norm(),
        })
    }

    /// `Π(1 - p^-s) (1 + P(s)) - 1` at the same truncation.
    pub fn remainder_trunc(&self, s: Complex) -> Result<SeriesValue> {
        let product = self.euler_product_trunc(s)?;
        let prime_zeta = self.prime_zeta_trunc(s)?;
        let value = product.value * (1.0 + prime_zeta.value) - 1.0;
        Ok(SeriesValue {
            value: ensure_finite(value, "remainder")?,
            terms_used: self.cfg.prime_count,
            truncation_estimate: product.truncation_estimate * (1.0 + prime_zeta.value).norm()
                + product.value.norm() * prime_zeta.truncation_estimate,
        })
    }

    /// The three prime quantities at `s` in one pass over the table.
    pub fn prime_sums(&self, s: Complex) -> Result<PrimeSums> {
        ensure_finite(s, "prime series argument")?;
        let one = Complex::new(1.0, 0.0);
        let mut prime_zeta = Complex::new(0.0, 0.0);
        let mut alt = Complex::new(0.0, 0.0);
        let mut product = one;
        for i in 0..self.cfg.prime_count {
            let x = self.prime_power(s, i);
            prime_zeta += x;
            if i % 2 == 0 {
                alt += x;
            } else {
                alt -= x;
            }
            let factor = one - x;
            if factor.norm() < self.cfg.pole_guard {
                return Err(Error::DegenerateProduct {
                    index: i + 1,
                    magnitude: factor.norm(),
                });
            }
            product *= factor;
        }
        Ok(PrimeSums {
            prime_zeta: ensure_finite(prime_zeta, "prime_zeta")?,
            alt_prime_zeta: ensure_finite(alt, "alt_prime_zeta")?,
            euler_product: ensure_finite(product, "euler_product")?,
        })
    }
}

/// Weights `w_k` with `Σ_k w_k a_k = 2^-N Σ_j C(N, j) S_j`, i.e.
/// `w_k = 2^-N Σ_{j>=k} C(N, j)`. All weights lie in `(0, 1]`, so the
/// weighted sum has no cancellation beyond that of the series itself.
fn euler_term_weights(n: usize) -> Vec<f64> {
    // binomial probabilities C(N, j) 2^-N built in log space to avoid overflow
    let ln2 = std::f64::consts::LN_2;
    let mut log_binom = 0.0f64;
    let mut probs = Vec::with_capacity(n + 1);
    for j in 0..=n {
        if j > 0 {
            log_binom += ((n - j + 1) as f64).ln() - (j as f64).ln();
        }
        probs.push((log_binom - n as f64 * ln2).exp());
    }
    let mut weights = vec![0.0; n + 1];
    let mut tail = 0.0;
    for j in (0..=n).rev() {
        tail += probs[j];
        weights[j] = tail;
    }
    weights
}
