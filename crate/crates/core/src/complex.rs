//! Complex value type and the `a+bi` literal syntax used on the command line.

use std::str::FromStr;

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub(crate) fn ensure_finite(z: Complex, what: &'static str) -> Result<Complex> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// A complex literal written as `a+bi`, `a-bi`, `a`, or `bi`, with optional spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexLiteral(pub Complex);

impl FromStr for ComplexLiteral {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_complex(text).map(ComplexLiteral)
    }
}

pub fn parse_complex(text: &str) -> Result<Complex> {
    let compact: String = text.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || {
        Error::Parse(format!(
            "expected a complex number like 0.5+14.1347i, got {text:?}"
        ))
    };
    if compact.is_empty() {
        return Err(bad());
    }

    let Some(body) = compact.strip_suffix(['i', 'j']) else {
        let re: f64 = compact.parse().map_err(|_| bad())?;
        return finite(Complex::new(re, 0.0)).ok_or_else(bad);
    };

    // split at the last sign that is not the leading sign or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));

    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    finite(Complex::new(re, im)).ok_or_else(bad)
}

fn finite(z: Complex) -> Option<Complex> {
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

/// Renders `z` as `a+bi` with 12 significant digits per component.
pub fn format_complex(z: Complex) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", format_real(z.re), sign, format_real(z.im.abs()))
}

/// 12 significant digits in exponent notation; deterministic across platforms.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        // normalise -0
        return "0.00000000000e0".to_string();
    }
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn literal_forms() {
        assert_eq!(parse_complex("2+0i").unwrap(), c(2.0, 0.0));
        assert_eq!(
            parse_complex("0.5 + 14.134725i").unwrap(),
            c(0.5, 14.134725)
        );
        assert_eq!(parse_complex("0.5-14i").unwrap(), c(0.5, -14.0));
        assert_eq!(parse_complex("-1").unwrap(), c(-1.0, 0.0));
        assert_eq!(parse_complex("3i").unwrap(), c(0.0, 3.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1+i").unwrap(), c(1.0, 1.0));
        assert_eq!(parse_complex("1e-3-2.5e+1i").unwrap(), c(1e-3, -25.0));
        assert_eq!(parse_complex("-1e2+1E-2j").unwrap(), c(-100.0, 0.01));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "i+", "abc", "1+2", "1+2ii", "nan", "inf+1i", "1++2i"] {
            assert!(parse_complex(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn negative_zero_formats_plainly() {
        assert_eq!(format_real(-0.0), format_real(0.0));
        assert_eq!(
            format_complex(c(1.5, -2.0)),
            "1.50000000000e0-2.00000000000e0i"
        );
    }

    proptest! {
        #[test]
        fn display_parses_back(re in -1e6f64..1e6, im in -1e6f64..1e6) {
            let z = c(re, im);
            let back = parse_complex(&format_complex(z)).unwrap();
            prop_assert!((back - z).norm() <= 1e-10 * (1.0 + z.norm()));
        }
    }
}
