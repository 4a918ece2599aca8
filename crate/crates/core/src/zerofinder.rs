//! Critical-line zero search driven by the beta coincidence.
//!
//! On `s = 1/2 + it` the residual `|b_zeta - b_m|` touches zero at the zeros
//! of the eta-form zeta. Away from zeros it is not bounded away from zero:
//! the residual factors as `|X| · |A| · (...)` and dips whenever the
//! alternating prime sum `A` passes close to the origin. A scan therefore
//! works in two stages:
//!
//! 1. evaluate the residual on a grid and keep local minima below
//!    `detect_threshold`;
//! 2. screen each minimum with golden-section search inside its grid
//!    bracket and keep it only if the minimised residual falls below
//!    `confirm_threshold`.
//!
//! At `K = 1000` the spurious dips bottom out around `5e-4` on `t < 55`
//! while genuine zeros minimise to `1e-6` or less.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::series::Evaluator;

/// Local minima at or above this residual are ignored.
pub const DEFAULT_DETECT_THRESHOLD: f64 = 0.05;
/// A screened minimum must fall below this residual to count as a zero.
pub const DEFAULT_CONFIRM_THRESHOLD: f64 = 1e-4;
/// Bracket width reached while screening grid minima.
pub const DEFAULT_SCREEN_TOL: f64 = 1e-6;
/// Grid step. At `K = 1000` a step of 0.05 misses the narrow dip at
/// `t ≈ 52.97`; 0.025 resolves every zero below `t = 100`.
pub const DEFAULT_SCAN_STEP: f64 = 0.025;
pub const MAX_GOLDEN_ITERATIONS: usize = 200;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Ordinates of known zeros, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceZeroTable {
    ordinates: Vec<f64>,
}

const STANDARD_ZEROS: &str = include_str!("../../../data/zeta_zeros_100.txt");

impl ReferenceZeroTable {
    /// The first 100 zeros shipped with the crate.
    pub fn standard() -> Self {
        Self::parse(STANDARD_ZEROS).expect("bundled zero table is well formed")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// One positive decimal per line; blank lines and `#` comments skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ordinates = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let t: f64 = line
                .parse()
                .map_err(|e| Error::Parse(format!("zero table line {}: {e}", lineno + 1)))?;
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Parse(format!(
                    "zero table line {}: ordinate must be positive",
                    lineno + 1
                )));
            }
            if let Some(&prev) = ordinates.last() {
                if t <= prev {
                    return Err(Error::Parse(format!(
                        "zero table line {}: ordinates must be strictly increasing",
                        lineno + 1
                    )));
                }
            }
            ordinates.push(t);
        }
        Ok(ReferenceZeroTable { ordinates })
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// 1-based lookup.
    pub fn zero(&self, index: usize) -> Option<f64> {
        index
            .checked_sub(1)
            .and_then(|i| self.ordinates.get(i).copied())
    }

    /// `(1-based index, ordinate)` of every zero in `[lo, hi]`.
    pub fn in_range(&self, lo: f64, hi: f64) -> Vec<(usize, f64)> {
        self.ordinates
            .iter()
            .enumerate()
            .filter(|(_, &t)| t >= lo && t <= hi)
            .map(|(i, &t)| (i + 1, t))
            .collect()
    }

    fn nearest(&self, t: f64) -> Option<(usize, f64)> {
        let i = self.ordinates.partition_point(|&z| z < t);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < self.ordinates.len())
            .map(|j| (j + 1, self.ordinates[j]))
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
    }
}

/// A located critical-line ordinate and the evidence for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCandidate {
    pub t: f64,
    pub bracket: (f64, f64),
    /// `|b_zeta - b_m|` at `t`.
    pub residual_at_t: f64,
    /// `|Re b_zeta - Re b_m|` at `t`.
    pub re_gap: f64,
    /// `|Im b_zeta - Im b_m|` at `t`.
    pub im_gap: f64,
    /// `|ζ(1/2 + it)|` from the eta form, as an independent check.
    pub zeta_mod_at_t: f64,
    pub matched_reference: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub step: f64,
    pub detect_threshold: f64,
    pub confirm_threshold: f64,
    pub screen_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            step: DEFAULT_SCAN_STEP,
            detect_threshold: DEFAULT_DETECT_THRESHOLD,
            confirm_threshold: DEFAULT_CONFIRM_THRESHOLD,
            screen_tol: DEFAULT_SCREEN_TOL,
        }
    }
}

impl ScanOptions {
    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }
}

/// Residual on a grid; `None` marks singular points.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualGrid {
    pub t: Vec<f64>,
    pub residual: Vec<Option<f64>>,
}

/// Outcome of golden-section minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenSearch {
    pub t: f64,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Smaller of the two interior values after each iteration.
    pub history: Vec<f64>,
}

/// Minimises `f` on `[lo, hi]` until the bracket is narrower than `tol`.
/// Non-finite values of `f` are treated as `+∞`.
pub fn golden_section<F>(f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> GoldenSearch
where
    F: Fn(f64) -> f64,
{
    let eval = |t: f64| {
        let v = f(t);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    let mut history = Vec::new();
    let mut iterations = 0;
    while b - a > tol && iterations < max_iter {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = eval(d);
        }
        iterations += 1;
        history.push(fc.min(fd));
    }
    // both interior points lie strictly inside [a, b]
    let best = if fc <= fd { (c, fc) } else { (d, fd) };
    GoldenSearch {
        t: best.0,
        value: best.1,
        lo: a,
        hi: b,
        iterations,
        converged: b - a <= tol,
        history,
    }
}

/// `t_min, t_min + step, ...` up to `t_max`, snapped to 12 decimals so that
/// grids hit round values exactly.
pub fn grid(t_min: f64, t_max: f64, step: f64) -> Vec<f64> {
    let n = ((t_max - t_min) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| snap(t_min + i as f64 * step))
        .filter(|&t| t <= t_max + 1e-12)
        .collect()
}

pub(crate) fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn critical(t: f64) -> Complex {
    Complex::new(0.5, t)
}

impl Evaluator {
    /// Beta residual at `1/2 + it`, `+∞` where either beta is singular.
    fn critical_residual(&self, t: f64) -> f64 {
        self.beta_residual(critical(t)).unwrap_or(f64::INFINITY)
    }

    /// Beta residual over a critical-line grid, evaluated in parallel.
    pub fn residual_grid(&self, t_min: f64, t_max: f64, step: f64) -> ResidualGrid {
        let t = grid(t_min, t_max, step);
        let residual = t
            .par_iter()
            .map(|&t| match self.beta_residual(critical(t)) {
                Ok(r) => Some(r),
                Err(e) => {
                    log::debug!("skipping singular grid point t = {t}: {e}");
                    None
                }
            })
            .collect();
        ResidualGrid { t, residual }
    }

    fn candidate_at(&self, t: f64, bracket: (f64, f64)) -> ZeroCandidate {
        let (residual, re_gap, im_gap) = match self.beta_pair(critical(t)) {
            Ok(p) => (p.residual, p.re_gap(), p.im_gap()),
            Err(_) => (f64::INFINITY, f64::INFINITY, f64::INFINITY),
        };
        let zeta_mod = self
            .eta_zeta(critical(t))
            .map(|z| z.value.norm())
            .unwrap_or(f64::NAN);
        ZeroCandidate {
            t,
            bracket,
            residual_at_t: residual,
            re_gap,
            im_gap,
            zeta_mod_at_t: zeta_mod,
            matched_reference: None,
        }
    }

    /// Scans `1/2 + it` for `t ∈ [t_min, t_max]` and returns one screened
    /// candidate per confirmed residual minimum, in ascending `t`.
    pub fn scan_critical_line(
        &self,
        t_min: f64,
        t_max: f64,
        opts: &ScanOptions,
    ) -> Result<Vec<ZeroCandidate>> {
        if !(t_min.is_finite() && t_max.is_finite() && t_min > 0.0 && t_min < t_max) {
            return Err(Error::InvalidArgument(format!(
                "scan range must satisfy 0 < t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if !(opts.step > 0.0 && opts.step <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "scan step must lie in (0, 0.5], got {}",
                opts.step
            )));
        }
        if !(opts.screen_tol > 0.0 && opts.confirm_threshold > 0.0 && opts.detect_threshold > 0.0) {
            return Err(Error::InvalidArgument(
                "scan thresholds must be positive".into(),
            ));
        }

        let grid = self.residual_grid(t_min, t_max, opts.step);
        if grid.residual.iter().all(Option::is_none) {
            return Err(Error::ScanFailed { t_min, t_max });
        }

        let minima: Vec<usize> = (1..grid.t.len().saturating_sub(1))
            .filter(
                |&i| match (grid.residual[i - 1], grid.residual[i], grid.residual[i + 1]) {
                    (Some(l), Some(m), Some(r)) => m < l && m <= r && m < opts.detect_threshold,
                    _ => false,
                },
            )
            .collect();

        let mut found: Vec<ZeroCandidate> = minima
            .par_iter()
            .filter_map(|&i| {
                let bracket = (grid.t[i - 1], grid.t[i + 1]);
                let search = golden_section(
                    |t| self.critical_residual(t),
                    bracket.0,
                    bracket.1,
                    opts.screen_tol,
                    MAX_GOLDEN_ITERATIONS,
                );
                if search.value < opts.confirm_threshold {
                    Some(self.candidate_at(search.t, bracket))
                } else {
                    log::debug!(
                        "rejecting residual dip near t = {:.6}: minimum {:.3e}",
                        search.t,
                        search.value
                    );
                    None
                }
            })
            .collect();

        // neighbouring grid minima can screen to the same zero
        found.sort_by(|a, b| a.t.total_cmp(&b.t));
        let mut merged: Vec<ZeroCandidate> = Vec::with_capacity(found.len());
        for cand in found {
            match merged.last_mut() {
                Some(prev) if (cand.t - prev.t).abs() < 10.0 * opts.screen_tol => {
                    if cand.residual_at_t < prev.residual_at_t {
                        *prev = cand;
                    }
                }
                _ => merged.push(cand),
            }
        }
        Ok(merged)
    }

    /// Narrows a candidate's bracket to width `tol` by golden-section
    /// minimisation of the residual.
    pub fn refine_zero(&self, candidate: &ZeroCandidate, tol: f64) -> Result<ZeroCandidate> {
        self.refine_zero_traced(candidate, tol).map(|(c, _)| c)
    }

    /// As [`Self::refine_zero`], also returning the best residual after each iteration.
    pub fn refine_zero_traced(
        &self,
        candidate: &ZeroCandidate,
        tol: f64,
    ) -> Result<(ZeroCandidate, Vec<f64>)> {
        let (lo, hi) = candidate.bracket;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "empty bracket [{lo}, {hi}]"
            )));
        }
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidArgument(
                "refinement tolerance must be positive".into(),
            ));
        }
        let search = golden_section(
            |t| self.critical_residual(t),
            lo,
            hi,
            tol,
            MAX_GOLDEN_ITERATIONS,
        );
        let mut refined = self.candidate_at(search.t, (search.lo, search.hi));
        refined.matched_reference = candidate.matched_reference;
        if !search.converged {
            return Err(Error::RefinementFailed {
                iterations: search.iterations,
                best: Box::new(refined),
            });
        }
        Ok((refined, search.history))
    }

    /// Scan then refine every candidate to `refine_tol`.
    pub fn find_zeros(
        &self,
        t_min: f64,
        t_max: f64,
        opts: &ScanOptions,
        refine_tol: f64,
    ) -> Result<Vec<ZeroCandidate>> {
        let candidates = self.scan_critical_line(t_min, t_max, opts)?;
        candidates
            .par_iter()
            .map(|c| self.refine_zero(c, refine_tol))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceMatch {
    pub candidate_t: f64,
    pub reference_index: usize,
    pub reference_t: f64,
    pub error: f64,
}

/// Candidates paired against a reference table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub range: (f64, f64),
    pub tol: f64,
    pub matches: Vec<ReferenceMatch>,
    /// Candidates whose nearest reference zero is farther than `tol`.
    pub misses: Vec<ReferenceMatch>,
    /// Candidates matching a reference zero already claimed by another candidate.
    pub duplicates: Vec<ReferenceMatch>,
    /// Reference zeros in range with no candidate, as `(index, t)`.
    pub false_negatives: Vec<(usize, f64)>,
    /// Input candidates with `matched_reference` filled in.
    pub candidates: Vec<ZeroCandidate>,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.misses.is_empty() && self.false_negatives.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "range [{}, {}]: {} matched, {} misses, {} duplicates, {} false negatives (tol {:e})",
            self.range.0,
            self.range.1,
            self.matches.len(),
            self.misses.len(),
            self.duplicates.len(),
            self.false_negatives.len(),
            self.tol
        )
    }
}

/// Pairs each candidate with its nearest reference zero and lists reference
/// zeros in `range` that nothing matched.
pub fn verify_against_table(
    candidates: &[ZeroCandidate],
    table: &ReferenceZeroTable,
    tol: f64,
    range: (f64, f64),
) -> Result<VerificationReport> {
    if table.is_empty() {
        return Err(Error::InvalidArgument(
            "reference zero table is empty".into(),
        ));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(
            "verification tolerance must be positive".into(),
        ));
    }
    let mut report = VerificationReport {
        range,
        tol,
        matches: Vec::new(),
        misses: Vec::new(),
        duplicates: Vec::new(),
        false_negatives: Vec::new(),
        candidates: candidates.to_vec(),
    };
    let mut claimed = vec![false; table.len()];
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    // closest candidates claim their zero first
    let nearest: Vec<(usize, f64)> = candidates
        .iter()
        .map(|c| table.nearest(c.t).expect("table is non-empty"))
        .collect();
    order.sort_by(|&i, &j| {
        let ei = (candidates[i].t - nearest[i].1).abs();
        let ej = (candidates[j].t - nearest[j].1).abs();
        ei.total_cmp(&ej)
    });
    for i in order {
        let (index, reference_t) = nearest[i];
        let m = ReferenceMatch {
            candidate_t: candidates[i].t,
            reference_index: index,
            reference_t,
            error: (candidates[i].t - reference_t).abs(),
        };
        if m.error > tol {
            report.misses.push(m);
        } else if claimed[index - 1] {
            report.duplicates.push(m);
        } else {
            claimed[index - 1] = true;
            report.candidates[i].matched_reference = Some(reference_t);
            report.matches.push(m);
        }
    }
    for list in [
        &mut report.matches,
        &mut report.misses,
        &mut report.duplicates,
    ] {
        list.sort_by(|a, b| a.candidate_t.total_cmp(&b.candidate_t));
    }
    report.false_negatives = table
        .in_range(range.0, range.1)
        .into_iter()
        .filter(|(index, _)| !claimed[index - 1])
        .collect();
    Ok(report)
}
