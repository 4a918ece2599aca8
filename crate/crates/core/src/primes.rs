//! Table of the first `K` primes.
//!
//! Every prime series in the crate sums or multiplies over a prefix of this
//! table. Tables are immutable once built; [`cached`] keeps the largest table
//! generated so far and hands out shared prefixes, so repeated scans do not
//! re-sieve.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Environment variable naming an optional on-disk prime cache.
pub const PRIME_CACHE_ENV: &str = "BETAZETA_PRIME_CACHE";

/// Ascending sequence of the first `count` primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn last(&self) -> u64 {
        // non-empty by construction
        self.primes[self.primes.len() - 1]
    }

    /// Table holding the first `k` entries of `self`.
    pub fn prefix(&self, k: usize) -> Result<PrimeTable> {
        if k == 0 || k > self.primes.len() {
            return Err(Error::InvalidArgument(format!(
                "prefix of {k} primes requested from a table of {}",
                self.primes.len()
            )));
        }
        Ok(PrimeTable {
            primes: self.primes[..k].to_vec(),
        })
    }

    /// Parses a newline-delimited list of decimal primes and checks it.
    pub fn parse(text: &str) -> Result<PrimeTable> {
        let mut primes = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let p: u64 = line
                .parse()
                .map_err(|e| Error::Parse(format!("prime cache line {}: {e}", lineno + 1)))?;
            primes.push(p);
        }
        let table = PrimeTable { primes };
        table.validate()?;
        Ok(table)
    }

    /// Ascending from 2, each entry prime, no gaps (checked against the earlier entries).
    fn validate(&self) -> Result<()> {
        if self.primes.first() != Some(&2) {
            return Err(Error::Parse("prime table must start at 2".into()));
        }
        for (i, &p) in self.primes.iter().enumerate().skip(1) {
            if p <= self.primes[i - 1] {
                return Err(Error::Parse(format!(
                    "prime table not increasing at entry {i}"
                )));
            }
            let composite = self.primes[..i]
                .iter()
                .take_while(|&&q| q * q <= p)
                .any(|&q| p % q == 0);
            if composite {
                return Err(Error::Parse(format!("{p} is not prime")));
            }
        }
        // no skipped primes: every odd number between neighbours must be composite
        for w in self.primes.windows(2) {
            let mut n = w[0] + 1;
            while n < w[1] {
                let has_factor = self
                    .primes
                    .iter()
                    .take_while(|&&q| q * q <= n)
                    .any(|&q| n % q == 0);
                if !has_factor {
                    return Err(Error::Parse(format!("prime {n} missing from table")));
                }
                n += 1;
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.primes.len() * 8);
        for p in &self.primes {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }

    /// Loads the table from `path` if it holds at least `k` primes, otherwise
    /// generates it and rewrites the file.
    pub fn load_or_create(path: &Path, k: usize) -> Result<PrimeTable> {
        if let Ok(text) = fs::read_to_string(path) {
            match PrimeTable::parse(&text) {
                Ok(table) if table.len() >= k => return table.prefix(k),
                Ok(_) => {}
                Err(e) => log::warn!("ignoring prime cache {}: {e}", path.display()),
            }
        }
        let table = generate_primes(k)?;
        let mut file = fs::File::create(path)?;
        file.write_all(table.to_text().as_bytes())?;
        Ok(table)
    }
}

/// Upper bound on the `k`-th prime: `k (ln k + ln ln k)` for `k >= 6`.
fn sieve_bound(k: usize) -> usize {
    if k < 6 {
        return 15;
    }
    let kf = k as f64;
    (kf * (kf.ln() + kf.ln().ln())).ceil() as usize + 1
}

/// The first `k` primes in ascending order.
pub fn generate_primes(k: usize) -> Result<PrimeTable> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "prime count must be at least 1".into(),
        ));
    }
    let limit = sieve_bound(k);
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::with_capacity(k);
    for n in 2..=limit {
        if composite[n] {
            continue;
        }
        primes.push(n as u64);
        if primes.len() == k {
            break;
        }
        let mut m = n * n;
        while m <= limit {
            composite[m] = true;
            m += n;
        }
    }
    debug_assert_eq!(primes.len(), k, "sieve bound too small for k = {k}");
    Ok(PrimeTable { primes })
}

fn cache() -> &'static Mutex<Option<Arc<PrimeTable>>> {
    static CACHE: OnceLock<Mutex<Option<Arc<PrimeTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(None))
}

/// Shared table of the first `k` primes, built at most once per process for
/// the largest `k` requested. Consults the file named by
/// [`PRIME_CACHE_ENV`] when that variable is set.
pub fn cached(k: usize) -> Result<Arc<PrimeTable>> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "prime count must be at least 1".into(),
        ));
    }
    let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(table) = guard.as_ref() {
        if table.len() == k {
            return Ok(Arc::clone(table));
        }
        if table.len() > k {
            return Ok(Arc::new(table.prefix(k)?));
        }
    }
    let table = match std::env::var_os(PRIME_CACHE_ENV) {
        Some(path) if !path.is_empty() => PrimeTable::load_or_create(Path::new(&path), k)?,
        _ => generate_primes(k)?,
    };
    let table = Arc::new(table);
    *guard = Some(Arc::clone(&table));
    Ok(table)
}
