//! High-precision binary floating point used by the ensemble and analysis
//! code, with conversions from the exact integer and rational types.

use std::str::FromStr;

use dashu_base::{SquareRoot, UnsignedAbs};
use dashu_float::round::mode::HalfEven;
use dashu_float::{DBig, FBig};
use dashu_int::IBig;
use dashu_ratio::RBig;

pub type Real = FBig<HalfEven, 2>;

/// 224 bits, a little over 67 significant decimal digits.
pub const PRECISION_BITS: usize = 224;

/// Significant digits in every CSV value this crate writes.
pub const CSV_DIGITS: usize = 16;

pub fn from_f64(x: f64) -> Real {
    Real::try_from(x)
        .expect("finite float")
        .with_precision(PRECISION_BITS)
        .value()
}

pub fn from_int(x: &IBig) -> Real {
    Real::from(x.clone()).with_precision(PRECISION_BITS).value()
}

pub fn from_i64(x: i64) -> Real {
    Real::from(x).with_precision(PRECISION_BITS).value()
}

pub fn from_ratio(x: &RBig) -> Real {
    x.to_float(PRECISION_BITS).value()
}

pub fn to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

pub fn zero() -> Real {
    from_i64(0)
}

pub fn sqrt(x: &Real) -> Real {
    x.sqrt()
}

/// `x^y` for `x > 0`.
pub fn powf(x: &Real, y: &Real) -> Real {
    (y * x.ln()).exp()
}

pub fn parse(s: &str) -> Result<Real, String> {
    let cleaned = s.trim().replace("e+", "e").replace("E+", "e").replace('E', "e");
    let d = DBig::from_str(&cleaned).map_err(|e| format!("bad number {s:?}: {e}"))?;
    Ok(d
        .with_rounding::<HalfEven>()
        .with_base_and_precision::<2>(PRECISION_BITS)
        .value())
}

/// Scientific notation with exactly `digits` significant digits, e.g.
/// `1.094901468298879e1`.
pub fn format_sci(x: &Real, digits: usize) -> String {
    assert!(digits >= 1);
    if *x == Real::ZERO {
        return format!("{:.*}e0", digits - 1, 0.0);
    }
    let dec = x
        .clone()
        .with_base_and_precision::<10>(digits)
        .value();
    let repr = dec.repr();
    let sign = if repr.significand() < &IBig::ZERO { "-" } else { "" };
    let mut mant = repr.significand().unsigned_abs().to_string();
    let mut exp = repr.exponent() as i64 + mant.len() as i64 - 1;
    // Rounding can leave fewer digits (trailing zeros stripped) or carry
    // into one more.
    if mant.len() > digits {
        mant.truncate(digits);
    }
    while mant.len() < digits {
        mant.push('0');
    }
    if mant.starts_with('0') {
        exp -= 1;
    }
    let (head, tail) = mant.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    }
}

pub fn format_csv(x: &Real) -> String {
    format_sci(x, CSV_DIGITS)
}
