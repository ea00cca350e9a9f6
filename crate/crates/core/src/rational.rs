//! Exact rational coefficients and their wire format.
//!
//! Every exact quantity in this crate is a `BigRational` (arbitrary-precision
//! integers, always reduced to lowest terms with positive denominator).
//! On the wire rationals are strings `"p/q"` (or just `"p"` when q = 1),
//! never floats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Rational from an integer pair. Panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rat_i(num: i64) -> Rational {
    BigRational::from_integer(BigInt::from(num))
}

/// Exact decimal-free string: `"p/q"`, or `"p"` when the denominator is 1.
pub fn rat_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `"p/q"` or `"p"`.
pub fn rat_from_string(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().ok()?;
            Some(BigRational::from_integer(p))
        }
    }
}

/// n! as a rational.
pub fn factorial(n: u64) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    BigRational::from_integer(acc)
}

/// Exact b-th root of a rational, when one exists.
pub fn nth_root_exact(r: &Rational, b: u64) -> Option<Rational> {
    assert!(b >= 1);
    if b == 1 {
        return Some(r.clone());
    }
    if r.is_negative() && b.is_multiple_of(2) {
        return None;
    }
    let num = int_nth_root_exact(r.numer(), b)?;
    let den = int_nth_root_exact(r.denom(), b)?;
    Some(BigRational::new(num, den))
}

fn int_nth_root_exact(v: &BigInt, b: u64) -> Option<BigInt> {
    if v.is_zero() {
        return Some(BigInt::zero());
    }
    let negative = v.is_negative();
    let mag = v.abs();
    let root = mag.nth_root(b as u32);
    if root.pow(b as u32) != mag {
        return None;
    }
    Some(if negative { -root } else { root })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        let r = rat(-22, 8);
        assert_eq!(rat_to_string(&r), "-11/4");
        assert_eq!(rat_from_string("-11/4").unwrap(), r);
        assert_eq!(rat_from_string("7").unwrap(), rat_i(7));
        assert!(rat_from_string("1/0").is_none());
    }

    #[test]
    fn exact_roots() {
        assert_eq!(nth_root_exact(&rat(8, 27), 3).unwrap(), rat(2, 3));
        assert_eq!(nth_root_exact(&rat(9, 4), 2).unwrap(), rat(3, 2));
        assert!(nth_root_exact(&rat(2, 1), 2).is_none());
        assert!(nth_root_exact(&rat(-4, 1), 2).is_none());
        assert_eq!(nth_root_exact(&rat(-8, 1), 3).unwrap(), rat_i(-2));
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), rat_i(1));
        assert_eq!(factorial(5), rat_i(120));
    }
}
