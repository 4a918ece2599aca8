//! CSV datasets behind the real-axis figures and the per-zero panels.
//!
//! Every row evaluates `b_zeta`, `b_m`, the eta-form zeta and the meta
//! function at one `s = alpha + it`. A quantity that hits a guarded
//! singularity is left empty and the row is marked `singular`; the other
//! columns of that row are still filled.
//!
//! Output is byte-deterministic: values use 12 significant digits in
//! exponent notation, `,` separators and `\n` line endings, and rows are
//! emitted in grid order regardless of how they were computed.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::complex::{format_real, Complex};
use crate::error::{Error, Result};
use crate::meta::MetaMode;
use crate::series::Evaluator;
use crate::zerofinder::{grid, ReferenceZeroTable};

/// Relative `|b_zeta - b_m| / |b_m|` above which the two betas count as diverged.
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e-10;
/// Relative `|zeta - meta| / |zeta|` below which zeta and meta count as coinciding.
pub const DEFAULT_AGREEMENT_THRESHOLD: f64 = 1e-6;

pub const CSV_HEADER: &str =
    "alpha,t,re_b_zeta,im_b_zeta,re_b_m,im_b_m,residual,re_zeta,im_zeta,re_meta,im_meta,status";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    Singular,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Singular => "singular",
        }
    }
}

/// One grid point `s = alpha + it`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub alpha: f64,
    pub t: f64,
    pub b_zeta: Option<Complex>,
    pub b_m: Option<Complex>,
    pub zeta: Option<Complex>,
    pub meta: Option<Complex>,
    pub status: RowStatus,
}

impl ScanRow {
    pub fn residual(&self) -> Option<f64> {
        Some((self.b_zeta? - self.b_m?).norm())
    }

    pub fn relative_residual(&self) -> Option<f64> {
        Some(self.residual()? / self.b_m?.norm())
    }

    fn csv_line(&self) -> String {
        let mut fields = vec![format_real(self.alpha), format_real(self.t)];
        for z in [self.b_zeta, self.b_m] {
            push_complex(&mut fields, z);
        }
        fields.push(self.residual().map(format_real).unwrap_or_default());
        for z in [self.zeta, self.meta] {
            push_complex(&mut fields, z);
        }
        fields.push(self.status.as_str().to_string());
        fields.join(",")
    }
}

fn push_complex(fields: &mut Vec<String>, z: Option<Complex>) {
    match z {
        Some(z) => {
            fields.push(format_real(z.re));
            fields.push(format_real(z.im));
        }
        None => {
            fields.push(String::new());
            fields.push(String::new());
        }
    }
}

impl Evaluator {
    /// Evaluates every column of a [`ScanRow`] at `alpha + it`.
    pub fn scan_row(&self, alpha: f64, t: f64, mode: MetaMode) -> ScanRow {
        let s = Complex::new(alpha, t);
        let b_zeta = self.b_zeta(s).ok();
        let b_m = self.b_m(s).ok();
        let zeta = self.eta_zeta(s).ok().map(|v| v.value);
        let b = match mode {
            MetaMode::WithBZeta => b_zeta,
            MetaMode::WithBM => b_m,
            MetaMode::Fixed(b) => Some(b),
        };
        let meta = b.and_then(|b| self.meta(s, b).ok());
        let complete = b_zeta.is_some() && b_m.is_some() && zeta.is_some() && meta.is_some();
        ScanRow {
            alpha,
            t,
            b_zeta,
            b_m,
            zeta,
            meta,
            status: if complete {
                RowStatus::Ok
            } else {
                RowStatus::Singular
            },
        }
    }

    fn rows_over_alpha(&self, alphas: &[f64], t: f64, mode: MetaMode) -> Vec<ScanRow> {
        alphas
            .par_iter()
            .map(|&a| self.scan_row(a, t, mode))
            .collect()
    }
}

fn check_alpha_grid(alpha_min: f64, alpha_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(alpha_min.is_finite() && alpha_max.is_finite() && alpha_min > 0.0 && alpha_min < alpha_max)
    {
        return Err(Error::InvalidArgument(format!(
            "alpha range must satisfy 0 < alpha_min < alpha_max, got [{alpha_min}, {alpha_max}]"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha step must be positive, got {step}"
        )));
    }
    Ok(grid(alpha_min, alpha_max, step))
}

/// Rows along the real axis plus the measured crossovers.
#[derive(Debug, Clone, PartialEq)]
pub struct RealAxisScan {
    pub rows: Vec<ScanRow>,
    pub divergence_threshold: f64,
    /// First `alpha` whose relative beta residual exceeds the threshold.
    pub crossover_alpha: Option<f64>,
    /// Smallest grid `alpha` from which every row with both zeta and meta
    /// defined has them agreeing to [`DEFAULT_AGREEMENT_THRESHOLD`].
    pub zeta_meta_agree_from: Option<f64>,
}

/// Rows at `s = alpha + 0i` for `alpha` on the grid. Meta is evaluated with `b_zeta`.
pub fn real_axis_scan(
    eval: &Evaluator,
    alpha_min: f64,
    alpha_max: f64,
    step: f64,
    divergence_threshold: f64,
) -> Result<RealAxisScan> {
    let alphas = check_alpha_grid(alpha_min, alpha_max, step)?;
    if divergence_threshold.is_nan() || divergence_threshold <= 0.0 {
        return Err(Error::InvalidArgument(
            "divergence threshold must be positive".into(),
        ));
    }
    let rows = eval.rows_over_alpha(&alphas, 0.0, MetaMode::WithBZeta);
    let crossover_alpha = rows
        .iter()
        .find(|r| {
            r.relative_residual()
                .is_some_and(|x| x > divergence_threshold)
        })
        .map(|r| r.alpha);

    let mut zeta_meta_agree_from = None;
    for r in rows.iter().rev() {
        match (r.zeta, r.meta) {
            (Some(z), Some(m)) if (z - m).norm() <= DEFAULT_AGREEMENT_THRESHOLD * z.norm() => {
                zeta_meta_agree_from = Some(r.alpha)
            }
            (Some(_), Some(_)) | (Some(_), None) => break,
            // zeta itself undefined (pole): not evidence either way
            (None, _) => {}
        }
    }
    Ok(RealAxisScan {
        rows,
        divergence_threshold,
        crossover_alpha,
        zeta_meta_agree_from,
    })
}

/// Rows at `s = alpha + ρi` for one reference zero `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroPanel {
    pub zero_index: usize,
    pub t: f64,
    pub rows: Vec<ScanRow>,
}

impl ZeroPanel {
    /// Grid `alpha` with the smallest beta residual.
    pub fn argmin_alpha(&self) -> Option<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.residual().map(|x| (r.alpha, x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// One panel per reference zero with 1-based index in `first..=last`.
pub fn zero_panels(
    eval: &Evaluator,
    table: &ReferenceZeroTable,
    zeros: (usize, usize),
    alpha_min: f64,
    alpha_max: f64,
    step: f64,
    mode: MetaMode,
) -> Result<Vec<ZeroPanel>> {
    let (first, last) = zeros;
    if first == 0 || first > last {
        return Err(Error::InvalidArgument(format!(
            "empty zero index range {first}..{last}"
        )));
    }
    if last > table.len() {
        return Err(Error::InvalidArgument(format!(
            "zero {last} requested but the reference table holds {}",
            table.len()
        )));
    }
    mode.validate()?;
    let alphas = check_alpha_grid(alpha_min, alpha_max, step)?;
    Ok((first..=last)
        .map(|index| {
            let t = table
                .zero(index)
                .expect("index checked against table length");
            ZeroPanel {
                zero_index: index,
                t,
                rows: eval.rows_over_alpha(&alphas, t, mode),
            }
        })
        .collect())
}

/// The four datasets the CLI can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Real axis, right half-plane.
    Fig1,
    /// Real axis, inside the critical strip.
    Fig2,
    /// Zeta versus meta at reference zeros.
    AppendixA,
    /// `b_zeta` versus `b_m` at reference zeros.
    AppendixB,
}

impl FigureId {
    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::AppendixA => "appendixA",
            FigureId::AppendixB => "appendixB",
        }
    }

    /// Default `(alpha_min, alpha_max, step)`.
    pub fn default_alpha_grid(self) -> (f64, f64, f64) {
        match self {
            FigureId::Fig1 => (0.05, 3.0, 0.01),
            FigureId::Fig2 => (0.01, 0.99, 0.01),
            FigureId::AppendixA | FigureId::AppendixB => (0.1, 0.9, 0.05),
        }
    }

    pub fn is_panel(self) -> bool {
        matches!(self, FigureId::AppendixA | FigureId::AppendixB)
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(FigureId::Fig1),
            "fig2" => Ok(FigureId::Fig2),
            "appendixA" | "appendixa" => Ok(FigureId::AppendixA),
            "appendixB" | "appendixb" => Ok(FigureId::AppendixB),
            other => Err(Error::Parse(format!(
                "unknown figure {other:?} (expected fig1, fig2, appendixA or appendixB)"
            ))),
        }
    }
}

fn write_metadata<W: Write>(
    out: &mut W,
    figure: FigureId,
    eval: &Evaluator,
    mode: MetaMode,
) -> io::Result<()> {
    let cfg = eval.config();
    writeln!(out, "# figure = {figure}")?;
    writeln!(out, "# prime_count = {}", cfg.prime_count)?;
    writeln!(out, "# eta_terms = {}", cfg.eta_terms)?;
    writeln!(out, "# acceleration = {}", cfg.acceleration)?;
    writeln!(out, "# pole_guard = {:e}", cfg.pole_guard)?;
    writeln!(out, "# meta_mode = {mode}")?;
    writeln!(out, "{CSV_HEADER}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_else(|| "none".to_string())
}

pub fn write_real_axis_csv<W: Write>(
    out: &mut W,
    figure: FigureId,
    eval: &Evaluator,
    scan: &RealAxisScan,
) -> io::Result<()> {
    write_metadata(out, figure, eval, MetaMode::WithBZeta)?;
    for row in &scan.rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    writeln!(
        out,
        "# divergence_threshold = {} (relative |b_zeta - b_m| / |b_m|)",
        format_real(scan.divergence_threshold)
    )?;
    writeln!(
        out,
        "# crossover_alpha = {}",
        format_opt(scan.crossover_alpha)
    )?;
    writeln!(
        out,
        "# zeta_meta_agree_from_alpha = {} (relative tolerance {})",
        format_opt(scan.zeta_meta_agree_from),
        format_real(DEFAULT_AGREEMENT_THRESHOLD)
    )
}

pub fn write_panels_csv<W: Write>(
    out: &mut W,
    figure: FigureId,
    eval: &Evaluator,
    mode: MetaMode,
    panels: &[ZeroPanel],
) -> io::Result<()> {
    write_metadata(out, figure, eval, mode)?;
    for panel in panels {
        for row in &panel.rows {
            writeln!(out, "{}", row.csv_line())?;
        }
    }
    for panel in panels {
        let (alpha, residual) = match panel.argmin_alpha() {
            Some((a, r)) => (Some(a), Some(r)),
            None => (None, None),
        };
        writeln!(
            out,
            "# panel zero_index = {} t = {} argmin_alpha = {} min_residual = {}",
            panel.zero_index,
            format_real(panel.t),
            format_opt(alpha),
            format_opt(residual)
        )?;
    }
    Ok(())
}
