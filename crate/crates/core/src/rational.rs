//! Exact rational coefficients.
//!
//! QUBO and Ising coefficients are stored as rationals so that the
//! QUBO↔Ising transforms and coefficient normalization are exact; halves and
//! quarters arise from the spin/bit substitution and must not drift. Floating
//! point only appears at emission time (file export, solver input).

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Coefficient type used throughout the formulation layer.
pub type Coef = Ratio<i128>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseCoefError {
    #[error("empty coefficient")]
    Empty,
    #[error("invalid coefficient `{0}`")]
    Invalid(String),
    #[error("coefficient `{0}` out of range")]
    OutOfRange(String),
}

pub fn coef(numer: i128, denom: i128) -> Coef {
    Ratio::new(numer, denom)
}

pub fn coef_int(value: i128) -> Coef {
    Ratio::from_integer(value)
}

pub fn to_f64(value: &Coef) -> f64 {
    *value.numer() as f64 / *value.denom() as f64
}

/// Parse a coefficient exactly. Accepts integers (`-3`), ratios (`3/4`) and
/// decimal/scientific notation (`0.25`, `2.5e-1`); decimals convert without
/// rounding.
pub fn parse_coef(input: &str) -> Result<Coef, ParseCoefError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(ParseCoefError::Empty);
    }
    if let Some((n, d)) = s.split_once('/') {
        let numer: i128 = n
            .trim()
            .parse()
            .map_err(|_| ParseCoefError::Invalid(input.to_string()))?;
        let denom: i128 = d
            .trim()
            .parse()
            .map_err(|_| ParseCoefError::Invalid(input.to_string()))?;
        if denom == 0 {
            return Err(ParseCoefError::Invalid(input.to_string()));
        }
        return Ok(Ratio::new(numer, denom));
    }
    parse_decimal(s).ok_or_else(|| ParseCoefError::Invalid(input.to_string()))
}

fn parse_decimal(s: &str) -> Option<Coef> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().ok()?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (mantissa, negative) = match mantissa.strip_prefix('-') {
        Some(rest) => (rest, true),
        None => (mantissa.strip_prefix('+').unwrap_or(mantissa), false),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    // Cap the parsed precision well inside i128 range.
    if digits.len() > 30 {
        return None;
    }
    let mut numer: i128 = digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let mut value = Ratio::from_integer(numer);
    match scale.cmp(&0) {
        std::cmp::Ordering::Greater => {
            value *= Ratio::from_integer(10i128.checked_pow(scale as u32)?);
        }
        std::cmp::Ordering::Less => {
            value /= Ratio::from_integer(10i128.checked_pow(scale.unsigned_abs())?);
        }
        std::cmp::Ordering::Equal => {}
    }
    Some(value)
}

/// Format a coefficient with 12 significant digits in scientific notation.
pub fn format_coef(value: &Coef) -> String {
    format!("{:.*e}", 11, to_f64(value))
}

pub fn abs(value: &Coef) -> Coef {
    value.abs()
}

pub fn is_zero(value: &Coef) -> bool {
    value.is_zero()
}
