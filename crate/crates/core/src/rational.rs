//! Exact rationals and their textual form.
//!
//! Rationals travel as `"num/den"` strings so that arbitrary precision
//! survives JSON round trips.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Always `num/den`, integers included (`3/1`).
pub fn format(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse(s: &str) -> Result<Rational> {
    let err = || Error::ParseRational(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Closest rational to `x` whose denominator does not exceed `max_den`.
///
/// Continued-fraction convergents plus the best semiconvergent; ties go to
/// the convergent.
pub fn best_approximation(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() || max_den == 0 {
        return None;
    }
    let target = Rational::from_float(x)?;
    let max_den = BigInt::from(max_den);
    if target.denom() <= &max_den {
        return Some(target);
    }
    let (mut p0, mut q0, mut p1, mut q1) = (
        BigInt::zero(),
        BigInt::one(),
        BigInt::one(),
        BigInt::zero(),
    );
    let mut n = target.numer().clone();
    let mut d = target.denom().clone();
    loop {
        let (a, r) = n.div_mod_floor(&d);
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        if r.is_zero() {
            break;
        }
        n = std::mem::replace(&mut d, r);
    }
    let k = (&max_den - &q0) / &q1;
    let semi = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = Rational::new(p1, q1);
    if (&semi - &target).abs() < (&conv - &target).abs() {
        Some(semi)
    } else {
        Some(conv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse() {
        assert_eq!(format(&ratio(6, 16)), "3/8");
        assert_eq!(format(&int(3)), "3/1");
        assert_eq!(parse("3/8").unwrap(), ratio(3, 8));
        assert_eq!(parse(" -2 ").unwrap(), int(-2));
        assert_eq!(parse("4/-8").unwrap(), ratio(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn huge_rationals_survive() {
        let s = "123456789012345678901234567891/7";
        assert_eq!(format(&parse(s).unwrap()), s);
    }

    #[test]
    fn best_approximation_matches_known_values() {
        assert_eq!(best_approximation(0.5, 10).unwrap(), ratio(1, 2));
        assert_eq!(best_approximation(1.0 / 3.0, 64).unwrap(), ratio(1, 3));
        assert_eq!(best_approximation(3.0 / 8.0, 64).unwrap(), ratio(3, 8));
        assert_eq!(
            best_approximation(std::f64::consts::PI, 1000).unwrap(),
            ratio(355, 113)
        );
        // semiconvergent beats the last convergent here
        assert_eq!(best_approximation(std::f64::consts::PI, 10).unwrap(), ratio(22, 7));
        assert_eq!(best_approximation(0.0, 5).unwrap(), int(0));
    }

    #[test]
    fn best_approximation_is_best_by_brute_force() {
        for &(x, max_den) in &[(0.2357, 30u64), (0.618034, 50), (0.0909, 11), (0.999, 40)] {
            let got = best_approximation(x, max_den).unwrap();
            let target = Rational::from_float(x).unwrap();
            let err = (&got - &target).abs();
            for den in 1..=max_den as i64 {
                let num = (x * den as f64).round() as i64;
                for cand in [num - 1, num, num + 1] {
                    let c = ratio(cand, den);
                    assert!((&c - &target).abs() >= err, "{x}: {c} beats {got}");
                }
            }
        }
    }
}
