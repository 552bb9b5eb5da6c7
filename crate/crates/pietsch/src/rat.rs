//! Exact rational helpers shared across the crate.
//!
//! All exact-tier arithmetic goes through `BigRational`. Powers of two and
//! dyadic logarithms are used everywhere (dyadic cells `[2^n, 2^{n+1})`), so
//! they get dedicated exact implementations here.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// `2^n` as an exact rational, for any integer `n`.
pub fn pow2(n: i64) -> Rat {
    let one = BigInt::one();
    if n >= 0 {
        Rat::from_integer(one << n as usize)
    } else {
        Rat::new(one.clone(), one << (-n) as usize)
    }
}

/// `r^k` for integer `k` (negative exponents allowed, `r != 0`).
pub fn rat_pow(r: &Rat, k: i64) -> Rat {
    if k == 0 {
        return Rat::one();
    }
    let mut base = if k > 0 { r.clone() } else { r.recip() };
    let mut e = k.unsigned_abs();
    let mut acc = Rat::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

/// Largest `n` with `2^n <= t`, for `t > 0`. Exact.
pub fn floor_log2(t: &Rat) -> i64 {
    assert!(t.is_positive(), "floor_log2 requires t > 0");
    let p = t.numer();
    let q = t.denom();
    // bits(p) - bits(q) is within 1 of the answer; fix up exactly.
    let mut n = p.bits() as i64 - q.bits() as i64;
    while pow2(n) > *t {
        n -= 1;
    }
    while pow2(n + 1) <= *t {
        n += 1;
    }
    n
}

/// If `t` is exactly `2^n`, returns `n`.
pub fn as_pow2(t: &Rat) -> Option<i64> {
    if !t.is_positive() {
        return None;
    }
    let n = floor_log2(t);
    if pow2(n) == *t {
        Some(n)
    } else {
        None
    }
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| format!("bad rational numerator in {s:?}"))?;
    let q: BigInt = den
        .parse()
        .map_err(|_| format!("bad rational denominator in {s:?}"))?;
    if q.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(p, q))
}

/// Canonical `"p/q"` form with positive denominator and reduced terms.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Rational from an `f64`, exact (the float's binary value). None for non-finite.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Nearest `f64` to an exact rational (for display and the numeric tier).
pub fn rat_to_f64(r: &Rat) -> f64 {
    // Scale into f64 range via the dyadic exponent to avoid overflow of huge BigInts.
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let a = r.abs();
    let e = floor_log2(&a);
    if e.abs() > 900 {
        let m = &a / pow2(e);
        let mf = m.numer().to_string().parse::<f64>().unwrap_or(f64::NAN)
            / m.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
        let v = mf * 2f64.powi(e.clamp(-1074, 1024) as i32);
        return if neg { -v } else { v };
    }
    let num = a.numer();
    let den = a.denom();
    let scale = 64i64;
    let shifted = Rat::new(num * (BigInt::one() << scale as usize), den.clone());
    let floor = shifted.floor().to_integer();
    let (sign, digits) = floor.to_u64_digits();
    let mut x = 0f64;
    for d in digits.iter().rev() {
        x = x * 1.8446744073709552e19 + *d as f64;
    }
    if sign == Sign::Minus {
        x = -x;
    }
    let v = x / 1.8446744073709552e19; // 2^64
    if neg {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn pow2_both_signs() {
        assert_eq!(pow2(3), r(8, 1));
        assert_eq!(pow2(0), r(1, 1));
        assert_eq!(pow2(-2), r(1, 4));
    }

    #[test]
    fn floor_log2_matches_definition() {
        assert_eq!(floor_log2(&r(1, 1)), 0);
        assert_eq!(floor_log2(&r(3, 1)), 1);
        assert_eq!(floor_log2(&r(4, 1)), 2);
        assert_eq!(floor_log2(&r(1, 3)), -2);
        assert_eq!(floor_log2(&r(7, 8)), -1);
        assert_eq!(floor_log2(&r(1, 8)), -3);
    }

    #[test]
    fn as_pow2_detects() {
        assert_eq!(as_pow2(&r(8, 1)), Some(3));
        assert_eq!(as_pow2(&r(1, 4)), Some(-2));
        assert_eq!(as_pow2(&r(3, 1)), None);
    }

    #[test]
    fn parse_and_format_round_trip() {
        let v = parse_rat("-6/4").unwrap();
        assert_eq!(v, r(-3, 2));
        assert_eq!(format_rat(&v), "-3/2");
        assert_eq!(parse_rat("5").unwrap(), r(5, 1));
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn f64_round_trip_on_small_values() {
        let v = r(-355, 113);
        let f = rat_to_f64(&v);
        assert!((f - (-355.0 / 113.0)).abs() < 1e-14);
        assert_eq!(rat_from_f64(0.5).unwrap(), r(1, 2));
    }
}
