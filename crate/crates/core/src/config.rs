//! Run configuration: built-in defaults, overridden by a `key = value`
//! config file, overridden by command-line flags.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::figures::DEFAULT_DIVERGENCE_THRESHOLD;
use crate::meta::MetaMode;
use crate::series::{Acceleration, EvalConfig};
use crate::zerofinder::ScanOptions;

pub const DEFAULT_REFINE_TOL: f64 = 1e-6;
pub const DEFAULT_MATCH_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub eval: EvalConfig,
    pub scan: ScanOptions,
    pub refine_tol: f64,
    pub match_tol: f64,
    pub meta_mode: MetaMode,
    pub divergence_threshold: f64,
    pub reference_table: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub prime_cache: Option<PathBuf>,
    /// `None` means all available cores.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            eval: EvalConfig::default(),
            scan: ScanOptions::default(),
            refine_tol: DEFAULT_REFINE_TOL,
            match_tol: DEFAULT_MATCH_TOL,
            meta_mode: MetaMode::WithBZeta,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            reference_table: None,
            output_dir: PathBuf::from("."),
            prime_cache: None,
            workers: None,
        }
    }
}

/// Values supplied on the command line; `None` leaves the lower layer in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub prime_count: Option<usize>,
    pub eta_terms: Option<usize>,
    pub acceleration: Option<Acceleration>,
    pub pole_guard: Option<f64>,
    pub scan_step: Option<f64>,
    pub detect_threshold: Option<f64>,
    pub confirm_threshold: Option<f64>,
    pub refine_tol: Option<f64>,
    pub match_tol: Option<f64>,
    pub meta_mode: Option<MetaMode>,
    pub divergence_threshold: Option<f64>,
    pub reference_table: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub prime_cache: Option<PathBuf>,
    pub workers: Option<usize>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Parse(format!("config key {key}: {e}")))
}

impl RunConfig {
    /// Applies `key = value` lines. `#` starts a comment; unknown keys are errors.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("config line {}: expected key = value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "prime_count" => self.eval.prime_count = parse_num(key, value)?,
            "eta_terms" => self.eval.eta_terms = parse_num(key, value)?,
            "acceleration" => self.eval.acceleration = value.parse()?,
            "pole_guard" => self.eval.pole_guard = parse_num(key, value)?,
            "scan_step" => self.scan.step = parse_num(key, value)?,
            "detect_threshold" => self.scan.detect_threshold = parse_num(key, value)?,
            "confirm_threshold" => self.scan.confirm_threshold = parse_num(key, value)?,
            "refine_tol" => self.refine_tol = parse_num(key, value)?,
            "match_tol" => self.match_tol = parse_num(key, value)?,
            "meta_mode" => self.meta_mode = value.parse()?,
            "divergence_threshold" => self.divergence_threshold = parse_num(key, value)?,
            "reference_table" => self.reference_table = Some(PathBuf::from(value)),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "prime_cache" => self.prime_cache = Some(PathBuf::from(value)),
            "workers" => self.workers = Some(parse_num(key, value)?),
            other => return Err(Error::Parse(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        fn put<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        put(&mut self.eval.prime_count, &o.prime_count);
        put(&mut self.eval.eta_terms, &o.eta_terms);
        put(&mut self.eval.acceleration, &o.acceleration);
        put(&mut self.eval.pole_guard, &o.pole_guard);
        put(&mut self.scan.step, &o.scan_step);
        put(&mut self.scan.detect_threshold, &o.detect_threshold);
        put(&mut self.scan.confirm_threshold, &o.confirm_threshold);
        put(&mut self.refine_tol, &o.refine_tol);
        put(&mut self.match_tol, &o.match_tol);
        put(&mut self.meta_mode, &o.meta_mode);
        put(&mut self.divergence_threshold, &o.divergence_threshold);
        put(&mut self.output_dir, &o.output_dir);
        if o.reference_table.is_some() {
            self.reference_table = o.reference_table.clone();
        }
        if o.prime_cache.is_some() {
            self.prime_cache = o.prime_cache.clone();
        }
        if o.workers.is_some() {
            self.workers = o.workers;
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.eval.validate()?;
        self.meta_mode.validate()?;
        let positive = [
            ("scan_step", self.scan.step),
            ("detect_threshold", self.scan.detect_threshold),
            ("confirm_threshold", self.scan.confirm_threshold),
            ("refine_tol", self.refine_tol),
            ("match_tol", self.match_tol),
            ("divergence_threshold", self.divergence_threshold),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.scan.step > 0.5 {
            return Err(Error::InvalidArgument(
                "scan_step must be at most 0.5".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_layer_precedence() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.eval.prime_count, 1000);
        cfg.apply_file(
            "# a comment\n\
             prime_count = 500   # trailing comment\n\
             eta_terms = 96\n\
             acceleration = direct_partial_sum\n\
             \n\
             meta_mode = with_b_m\n",
        )
        .unwrap();
        cfg.apply_overrides(&Overrides {
            prime_count: Some(200),
            ..Overrides::default()
        });
        assert_eq!(cfg.eval.prime_count, 200); // flag
        assert_eq!(cfg.eval.eta_terms, 96); // file
        assert_eq!(cfg.eval.acceleration, Acceleration::DirectPartialSum); // file
        assert_eq!(cfg.meta_mode, MetaMode::WithBM); // file
        assert_eq!(cfg.refine_tol, DEFAULT_REFINE_TOL); // default
        cfg.validate().unwrap();
    }

    #[test]
    fn file_errors() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_file("bogus = 1\n").is_err());
        assert!(cfg.apply_file("prime_count 12\n").is_err());
        assert!(cfg.apply_file("prime_count = twelve\n").is_err());
        assert!(cfg.apply_file("meta_mode = fixed:0\n").is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::default();
        cfg.scan.step = 0.75;
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            workers: Some(0),
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.eval.eta_terms = 4;
        assert!(cfg.validate().is_err());
    }
}
