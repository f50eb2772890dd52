//! Exact arithmetic: rationals, univariate polynomials with Sturm machinery,
//! real number fields Q(β) and exact characteristic polynomials.

mod field;
mod linalg;
mod poly;

pub use field::{FieldElement, NumberField};
pub use linalg::{char_poly, det, identity, RatMatrix};
pub use poly::{IsolatedRoot, Poly};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary precision rational in lowest terms.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("no real root of the polynomial lies in the hint interval")]
    NoRootInHint,
    #[error("hint interval contains {0} real roots; tighten it")]
    MultipleRootsInHint(usize),
    #[error("field elements belong to different number fields")]
    FieldMismatch,
    #[error("interval endpoint is a root of the polynomial")]
    EndpointIsRoot,
    #[error("polynomial has no real root")]
    NoRealRoot,
    #[error("matrix is not square")]
    NotSquare,
    #[error("division by zero")]
    DivisionByZero,
    #[error("defining polynomial is reducible: factor {0} vanishes at the generator")]
    ReducibleMinPoly(String),
    #[error("malformed number: {0}")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.19"`.
pub fn parse_rational(s: &str) -> Result<Rational, NumError> {
    let t = s.trim();
    let bad = || NumError::Parse(s.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        let whole: BigInt = if ip.is_empty() { BigInt::zero() } else { ip.parse().map_err(|_| bad())? };
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let v = Rational::new(whole * &den + frac, den);
        return Ok(if neg { -v } else { v });
    }
    let p: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // fall back to scaling for huge numerators/denominators
    let n = r.numer().bits() as i64;
    let d = r.denom().bits() as i64;
    let shift = n - d;
    let scaled = if shift > 0 {
        r / Rational::from_integer(BigInt::one() << shift as usize)
    } else {
        r * Rational::from_integer(BigInt::one() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

pub fn rat_abs(r: &Rational) -> Rational {
    r.abs()
}

/// Serde helpers: rationals as `"p/q"` strings.
pub mod serde_rat {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_rational(&v).map_err(D::Error::custom)
    }

    pub fn value_to_rational(v: &serde_json::Value) -> Result<Rational, NumError> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(rint(i))
                } else {
                    parse_rational(&n.to_string())
                }
            }
            other => Err(NumError::Parse(other.to_string())),
        }
    }
}
