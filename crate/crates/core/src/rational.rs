//! Exact rational arithmetic helpers.
//!
//! Every quantity in the crate is a [`Rational`]: an arbitrary-precision
//! numerator over an arbitrary-precision denominator, always kept in lowest
//! terms. The canonical text form is `"p/q"` with `q > 0`, so zero prints as
//! `"0/1"`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{GrovesError, Result};

pub type Rational = num_rational::BigRational;

/// `p / q` as an exact rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Exact `"p/q"` rendering; integers keep the `/1`.
pub fn to_exact_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"`, a plain integer, or a finite decimal such as `"-2.75"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || GrovesError::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(GrovesError::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut numer: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(numer, denom));
    }
    let v: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(v))
}

/// Parses a comma-separated list of rationals.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_rational).collect()
}

/// Decimal rendering rounded half away from zero to `places` digits.
pub fn to_decimal_string(r: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = r * Rational::from_integer(scale.clone());
    let rounded = if scaled.is_negative() {
        -((-scaled) + rat(1, 2)).floor()
    } else {
        (scaled + rat(1, 2)).floor()
    };
    let v = rounded.to_integer();
    let negative = v.is_negative();
    let (q, rem) = v.abs().div_rem(&scale);
    let sign = if negative && !(q.is_zero() && rem.is_zero()) {
        "-"
    } else {
        ""
    };
    if places == 0 {
        format!("{sign}{q}")
    } else {
        format!("{sign}{q}.{:0>width$}", rem.to_string(), width = places)
    }
}

/// Binomial coefficient with `C(p, q) = 0` whenever `q < 0` or `q > p`.
pub fn binomial(p: i64, q: i64) -> BigInt {
    if q < 0 || p < 0 || q > p {
        return BigInt::zero();
    }
    let q = q.min(p - q);
    let mut acc = BigInt::one();
    for i in 0..q {
        acc *= BigInt::from(p - i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

pub fn approx_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
