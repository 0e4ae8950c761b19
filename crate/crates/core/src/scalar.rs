//! Numeric back ends.
//!
//! Every computation in the crate is generic over [`Scalar`]. Two
//! implementations exist: `f64` for arbitrary real inputs and
//! [`BigRational`] for integer or rational inputs, where equalities such as
//! a zero adversary advantage can be asserted exactly.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Relative tolerance for float equality assertions.
pub const FLOAT_REL_TOL: f64 = 1e-9;
/// Absolute tolerance for float equality assertions.
pub const FLOAT_ABS_TOL: f64 = 1e-12;

pub trait Scalar:
    Clone + Debug + PartialOrd + Send + Sync + 'static + Num + Signed + FromPrimitive + ToPrimitive
{
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Allowance when checking `x <= bound` for a bound of the given scale.
    /// Zero on the exact path.
    fn slack(scale: &Self) -> Self;

    /// `self > bound` beyond rounding noise.
    fn exceeds(&self, bound: &Self) -> bool;

    /// Equality within `tol` (relative to the larger magnitude, floored at 1).
    /// The exact path ignores `tol`.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// Parses an integer, `a/b` fraction, or decimal literal.
    fn parse_literal(s: &str) -> Result<Self>;

    /// Human-readable rendering (`9/16` or a shortest round-trip float).
    fn render(&self) -> String;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn slack(scale: &Self) -> Self {
        FLOAT_REL_TOL * scale.abs() + FLOAT_ABS_TOL
    }

    fn exceeds(&self, bound: &Self) -> bool {
        *self > *bound + 1e-12 * self.abs().max(bound.abs())
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= tol * scale
    }

    fn parse_literal(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((num, den)) = t.split_once('/') {
            let n: f64 = num.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
            let d: f64 = den.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
            if d == 0.0 {
                return Err(Error::Parse(s.to_string()));
            }
            return Ok(n / d);
        }
        let v: f64 = t.parse().map_err(|_| Error::Parse(s.to_string()))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse(s.to_string()))
        }
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn slack(_scale: &Self) -> Self {
        BigRational::zero()
    }

    fn exceeds(&self, bound: &Self) -> bool {
        self > bound
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn parse_literal(s: &str) -> Result<Self> {
        parse_rational(s).ok_or_else(|| Error::Parse(s.to_string()))
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// True for literals that the exact path represents without rounding by
/// convention: integers and `a/b` fractions.
pub fn is_rational_literal(s: &str) -> bool {
    let t = s.trim();
    let int = |x: &str| {
        let x = x.trim();
        let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    match t.split_once('/') {
        Some((n, d)) => int(n) && int(d),
        None => int(t),
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_decimal(n)?;
        let d = parse_decimal(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    parse_decimal(t)
}

/// Exact decimal parsing: `-12.5e-3` becomes `-125/10000`.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, unsigned) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = unsigned.split_once('.').unwrap_or((unsigned, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Formats a float with 17 significant digits, `%.17g` style.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
