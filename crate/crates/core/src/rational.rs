//! Exact rational helpers on top of `num-rational`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational numerator {num:?}"))?;
    let q: BigInt = den
        .parse()
        .map_err(|_| format!("invalid rational denominator {den:?}"))?;
    if q.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rational::new(p, q))
}

/// Always `p/q` with `q > 0` and the fraction in lowest terms; this is the
/// wire format.
pub fn to_wire(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `p` for integers, `p/q` otherwise.
pub fn to_text(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        to_wire(r)
    }
}

/// Exact square root of a rational if it is a square in `Q`.
pub fn sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let p = r.numer().sqrt();
    let q = r.denom().sqrt();
    if &(&p * &p) == r.numer() && &(&q * &q) == r.denom() {
        Some(Rational::new(p, q))
    } else {
        None
    }
}

pub fn is_square(r: &Rational) -> bool {
    sqrt(r).is_some()
}

pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}
