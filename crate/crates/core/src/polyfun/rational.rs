//! Exact rational scalars and vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type QVec = Vec<Rational>;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qfrac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(v: &[i64]) -> QVec {
    v.iter().map(|&x| q(x)).collect()
}

pub fn zeros(n: usize) -> QVec {
    vec![Rational::zero(); n]
}

pub fn unit(n: usize, i: usize) -> QVec {
    let mut v = zeros(n);
    v[i] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> QVec {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Rational]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn norm2(a: &[Rational]) -> Rational {
    dot(a, a)
}

pub fn is_zero(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| if x.is_positive() { f64::INFINITY } else { f64::NEG_INFINITY })
}

pub fn vec_to_f64(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Exact dyadic value of a finite float.
pub fn from_f64_exact(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or(Error::NonFinite)
}

pub fn vec_from_f64_exact(v: &[f64]) -> Result<QVec> {
    v.iter().map(|&x| from_f64_exact(x)).collect()
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions with a final semiconvergent check).
pub fn best_approximation(x: f64, max_den: u64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    let exact = from_f64_exact(x)?;
    let max_den = BigInt::from(max_den);
    if exact.denom() <= &max_den {
        return Ok(exact);
    }
    // Convergents h/k of the continued fraction of the exact dyadic value.
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rem = exact.clone();
    loop {
        let a = rem.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > max_den {
            // Largest admissible semiconvergent.
            let t = (&max_den - &k0).div_floor(&k1);
            let hs = &t * &h1 + &h0;
            let ks = &t * &k1 + &k0;
            let conv = Rational::new(h1.clone(), k1.clone());
            let semi = Rational::new(hs, ks);
            let dc = (&conv - &exact).abs();
            let ds = (&semi - &exact).abs();
            return Ok(if ds < dc { semi } else { conv });
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = &rem - Rational::from_integer(a);
        if frac.is_zero() {
            return Ok(Rational::new(h1, k1));
        }
        rem = frac.recip();
    }
}

/// Parses `"-3/2"`, `"7"` or a decimal such as `"0.125"` / `"-1e-3"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    // Decimal with optional exponent, converted digit by digit.
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(all);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn format_vec(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

/// Scales a nonzero vector to the primitive integer vector along the same ray.
pub fn primitive_direction(v: &[Rational]) -> QVec {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for i in &ints {
        g = g.gcd(i);
    }
    if g.is_zero() {
        return zeros(v.len());
    }
    ints.into_iter().map(|i| Rational::from_integer(i / &g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("-3/2").unwrap(), qfrac(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), q(7));
        assert_eq!(parse_rational("0.125").unwrap(), qfrac(1, 8));
        assert_eq!(parse_rational("-1e-3").unwrap(), qfrac(-1, 1000));
        assert_eq!(parse_rational("2.5E1").unwrap(), q(25));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn best_approximation_recovers_small_fractions() {
        assert_eq!(best_approximation(1.0 / 3.0, 1_000_000).unwrap(), qfrac(1, 3));
        assert_eq!(best_approximation(0.5 + 1e-16, 1_000_000).unwrap(), qfrac(1, 2));
        assert_eq!(best_approximation(-0.7, 1_000_000).unwrap(), qfrac(-7, 10));
        assert_eq!(best_approximation(3.0, 10).unwrap(), q(3));
        let pi = best_approximation(std::f64::consts::PI, 1000).unwrap();
        assert_eq!(pi, qfrac(355, 113));
        let x = 0.123_456_789_012_345;
        let a = best_approximation(x, 1_000_000).unwrap();
        assert!(*a.denom() <= BigInt::from(1_000_000));
        assert!((to_f64(&a) - x).abs() <= 1.0 / (a.denom().to_f64().unwrap() * 1_000_001.0));
    }

    #[test]
    fn primitive_directions() {
        assert_eq!(primitive_direction(&[qfrac(1, 2), qfrac(-3, 4)]), qvec(&[2, -3]));
        assert_eq!(primitive_direction(&[q(0), q(6)]), qvec(&[0, 1]));
    }
}
