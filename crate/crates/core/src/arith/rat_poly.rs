use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::int_poly::IntPoly;
use super::modular::mod_inverse;
use crate::error::{Error, Result};

/// Polynomial over Q stored as an integer numerator over a positive
/// common denominator, with gcd(denominator, content(numerator)) = 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RatPoly {
    numerator: IntPoly,
    #[serde(with = "crate::serde_util::bigint_string")]
    denominator: BigInt,
}

impl Default for RatPoly {
    fn default() -> Self {
        RatPoly::zero()
    }
}

impl RatPoly {
    pub fn new(numerator: IntPoly, denominator: BigInt) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        if numerator.is_zero() {
            return RatPoly::zero();
        }
        if denominator.is_one() {
            return RatPoly { numerator, denominator };
        }
        let mut g = numerator.content().gcd(&denominator);
        if denominator.is_negative() {
            g = -g;
        }
        RatPoly {
            numerator: numerator.div_scalar_exact(&g),
            denominator: denominator / g,
        }
    }

    pub fn zero() -> Self {
        RatPoly {
            numerator: IntPoly::zero(),
            denominator: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        RatPoly::from_int_poly(IntPoly::one())
    }

    pub fn z() -> Self {
        RatPoly::from_int_poly(IntPoly::z())
    }

    pub fn from_int_poly(p: IntPoly) -> Self {
        RatPoly {
            numerator: p,
            denominator: BigInt::one(),
        }
    }

    pub fn constant(c: &BigRational) -> Self {
        RatPoly::new(IntPoly::constant(c.numer().clone()), c.denom().clone())
    }

    pub fn from_rationals(coeffs: &[BigRational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        RatPoly::new(IntPoly::new(num), den)
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.numerator
            .coeffs()
            .iter()
            .map(|c| BigRational::new(c.clone(), self.denominator.clone()))
            .collect()
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn degree(&self) -> Option<usize> {
        self.numerator.degree()
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        BigRational::new(self.numerator.coeff(i), self.denominator.clone())
    }

    pub fn leading(&self) -> Option<BigRational> {
        self.numerator
            .leading()
            .map(|c| BigRational::new(c.clone(), self.denominator.clone()))
    }

    pub fn scale(&self, k: &BigRational) -> RatPoly {
        RatPoly::new(self.numerator.scale(k.numer()), &self.denominator * k.denom())
    }

    /// Monic normalization; zero stays zero.
    pub fn monic(&self) -> RatPoly {
        match self.numerator.leading() {
            None => RatPoly::zero(),
            Some(l) => RatPoly::new(self.numerator.clone(), l.clone()),
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let num = self
            .numerator
            .coeffs()
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| {
                acc * x + BigRational::from_integer(c.clone())
            });
        num / BigRational::from_integer(self.denominator.clone())
    }

    /// Evaluates at `a` modulo `p`; `None` when the denominator is not
    /// invertible mod `p`.
    pub fn eval_mod(&self, a: &BigUint, p: &BigUint) -> Option<BigUint> {
        let inv = mod_inverse(&reduce_mod(&self.denominator, p), p)?;
        let mut acc = BigUint::zero();
        for c in self.numerator.coeffs().iter().rev() {
            acc = (acc * a + reduce_mod(c, p)) % p;
        }
        Some(acc * inv % p)
    }

    /// Remainder modulo a monic integer polynomial.
    pub fn rem_monic(&self, m: &IntPoly) -> RatPoly {
        RatPoly::new(self.numerator.rem_monic(m), self.denominator.clone())
    }

    pub fn mul_mod(&self, other: &RatPoly, m: &IntPoly) -> RatPoly {
        (self * other).rem_monic(m)
    }

    pub fn pow_mod(&self, mut e: u64, m: &IntPoly) -> RatPoly {
        let mut base = self.rem_monic(m);
        let mut acc = RatPoly::one().rem_monic(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_mod(&base, m);
            }
        }
        acc
    }

    /// Substitutes `z -> inner` and reduces modulo monic `m`.
    pub fn compose_mod(&self, inner: &RatPoly, m: &IntPoly) -> RatPoly {
        let mut acc = RatPoly::zero();
        for c in self.numerator.coeffs().iter().rev() {
            acc = &acc.mul_mod(inner, m) + &RatPoly::from_int_poly(IntPoly::constant(c.clone()));
        }
        acc.scale(&BigRational::new(BigInt::one(), self.denominator.clone()))
    }

    /// Division with remainder over Q.
    pub fn div_rem(&self, d: &RatPoly) -> Result<(RatPoly, RatPoly)> {
        if d.is_zero() {
            return Err(Error::invalid("division by the zero polynomial"));
        }
        let (q, r) = qdivrem(&self.to_rationals(), &d.to_rationals());
        Ok((RatPoly::from_rationals(&q), RatPoly::from_rationals(&r)))
    }

    /// Inverse modulo `m` over Q, `None` when not coprime.
    pub fn inverse_mod(&self, m: &IntPoly) -> Option<RatPoly> {
        let mq: Vec<BigRational> = m
            .coeffs()
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let a = self.rem_monic(m).to_rationals();
        // extended Euclid tracking the cofactor of `a`
        let (mut r0, mut r1) = (mq, a);
        let (mut t0, mut t1) = (Vec::<BigRational>::new(), vec![BigRational::one()]);
        while !r1.is_empty() {
            let (q, r) = qdivrem(&r0, &r1);
            let t2 = qsub(&t0, &qmul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.len() != 1 {
            return None;
        }
        let inv = &r0[0];
        let t: Vec<BigRational> = t0.iter().map(|c| c / inv).collect();
        Some(RatPoly::from_rationals(&t).rem_monic(m))
    }
}

fn qtrim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn qsub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigRational> = (0..n)
        .map(|i| {
            a.get(i).cloned().unwrap_or_else(BigRational::zero) - b.get(i).cloned().unwrap_or_else(BigRational::zero)
        })
        .collect();
    qtrim(&mut out);
    out
}

fn qmul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    qtrim(&mut out);
    out
}

fn qdivrem(a: &[BigRational], d: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    qtrim(&mut r);
    let dd = d.len() - 1;
    if r.len() <= dd {
        return (Vec::new(), r);
    }
    let lc = &d[dd];
    let mut q = vec![BigRational::zero(); r.len() - dd];
    for i in (dd..r.len()).rev() {
        let c = &r[i] / lc;
        if c.is_zero() {
            continue;
        }
        for (j, dc) in d.iter().enumerate() {
            r[i - dd + j] -= &c * dc;
        }
        q[i - dd] = c;
    }
    r.truncate(dd);
    qtrim(&mut r);
    qtrim(&mut q);
    (q, r)
}

pub(crate) fn reduce_mod(c: &BigInt, p: &BigUint) -> BigUint {
    let (sign, mag) = (c.sign(), c.magnitude());
    let r = mag % p;
    if sign == Sign::Minus && !r.is_zero() {
        p - r
    } else {
        r
    }
}

/// Monic gcd over Q. Fails when both inputs are zero.
pub fn poly_gcd_q(a: &RatPoly, b: &RatPoly) -> Result<RatPoly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::invalid("gcd of two zero polynomials"));
    }
    let g = a.numerator().gcd(b.numerator());
    Ok(RatPoly::from_int_poly(g).monic())
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({self})")
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.to_rationals();
        super::int_poly::write_poly(f, q.into_iter(), "z")
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let l = self.denominator.lcm(&rhs.denominator);
        let a = self.numerator.scale(&(&l / &self.denominator));
        let b = rhs.numerator.scale(&(&l / &rhs.denominator));
        RatPoly::new(&a + &b, l)
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        self + &(-rhs)
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        RatPoly::new(&self.numerator * &rhs.numerator, &self.denominator * &rhs.denominator)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly {
            numerator: -&self.numerator,
            denominator: self.denominator.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(c: &[i64]) -> RatPoly {
        RatPoly::from_int_poly(IntPoly::from_i64s(c))
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(poly_gcd_q(&r(&[-1, 0, 1]), &r(&[-1, 1])).unwrap(), r(&[-1, 1]));
        assert_eq!(poly_gcd_q(&r(&[-2, 0, 1]), &r(&[1, 0, 1])).unwrap(), r(&[1]));
        assert_eq!(poly_gcd_q(&r(&[2, -3, 0, 1]), &r(&[-3, 0, 3])).unwrap(), r(&[-1, 1]));
        assert!(poly_gcd_q(&r(&[]), &r(&[])).is_err());
        assert_eq!(poly_gcd_q(&r(&[]), &r(&[4, 2])).unwrap(), r(&[2, 1]));
    }

    #[test]
    fn normalization_and_inverse() {
        let a = RatPoly::new(IntPoly::from_i64s(&[2, 4]), BigInt::from(-6));
        assert_eq!(a.numerator(), &IntPoly::from_i64s(&[-1, -2]));
        assert_eq!(a.denominator(), &BigInt::from(3));
        let m = IntPoly::from_i64s(&[9, 0, -2, 0, 1]);
        let x = r(&[1, 1]);
        let inv = x.inverse_mod(&m).unwrap();
        assert_eq!(x.mul_mod(&inv, &m), RatPoly::one());
        assert!(r(&[-1, 0, 1]).inverse_mod(&IntPoly::from_i64s(&[-1, 1])).is_none());
    }

    #[test]
    fn modular_evaluation() {
        let half = RatPoly::new(IntPoly::from_i64s(&[1, 1]), BigInt::from(2));
        // (1 + 3) / 2 = 2 mod 7
        let p = BigUint::from(7u32);
        assert_eq!(half.eval_mod(&BigUint::from(3u32), &p), Some(BigUint::from(2u32)));
        assert_eq!(half.eval_mod(&BigUint::from(3u32), &BigUint::from(2u32)), None);
    }
}
