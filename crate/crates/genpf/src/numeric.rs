//! Rational scalar helpers shared across the crate.
//!
//! Gains are stored as exact rationals so that verdicts near the optimum
//! never hinge on float rounding; a float view is derived where iteration
//! speed matters.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational scalar used for gains, `beta` values and LP pivots.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Exact conversion of a finite float: every finite `f64` is a rational.
pub fn rat_from_f64(v: f64) -> Result<Rat> {
    Rat::from_float(v).ok_or_else(|| Error::Parse(format!("not a finite number: {v}")))
}

pub fn rat_to_f64(v: &Rat) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, `"p"`, or a decimal string such as `"1.5"`.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let den: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(num, den));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Ok(Rat::from_integer(i));
    }
    // Decimal form: an integer part, a dot and a fractional part.
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.chars().all(|c| c.is_ascii_digit()) && !frac_part.is_empty() {
            let negative = int_part.trim_start().starts_with('-');
            let int_val: BigInt = if int_part.is_empty() || int_part == "-" {
                BigInt::zero()
            } else {
                int_part
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {s:?}")))?
            };
            let frac_val: BigInt = frac_part
                .parse()
                .map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
            let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
            let mut r = Rat::from_integer(int_val.abs()) + Rat::new(frac_val, scale);
            if negative {
                r = -r;
            }
            return Ok(r);
        }
    }
    Err(Error::Parse(format!("cannot parse rational from {s:?}")))
}

/// Renders a rational as `"p"` or `"p/q"`.
pub fn format_rational(v: &Rat) -> String {
    if v.denom() == &BigInt::from(1) {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// True when the rational survives a round trip through `f64` unchanged.
pub fn roundtrips_f64(v: &Rat) -> bool {
    match v.to_f64() {
        Some(f) if f.is_finite() => Rat::from_float(f).map(|r| &r == v).unwrap_or(false),
        _ => false,
    }
}

/// Best rational approximation with denominator at most `max_denom`,
/// via the continued-fraction convergents of `v`.
pub fn approximate_with_denominator(v: &Rat, max_denom: u64) -> Rat {
    let limit = BigInt::from(max_denom);
    if v.denom() <= &limit {
        return v.clone();
    }
    let negative = v.is_negative();
    let mut x = v.abs();
    // Convergents p/q of the continued fraction expansion.
    let (mut p0, mut q0) = (BigInt::from(0), BigInt::from(1));
    let (mut p1, mut q1) = (BigInt::from(1), BigInt::from(0));
    loop {
        let a = x.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > limit {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = &x - Rat::from_integer(a);
        if frac.is_zero() {
            break;
        }
        x = frac.recip();
    }
    let approx = Rat::new(p1, q1);
    if negative {
        -approx
    } else {
        approx
    }
}
