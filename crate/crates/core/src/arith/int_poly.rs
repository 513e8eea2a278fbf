use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::subres;
use crate::error::{Error, Result as CrateResult};

/// Dense univariate polynomial over Z in the implicit variable `z`.
///
/// Coefficients are stored low-to-high; the highest stored coefficient is
/// never zero, so the zero polynomial is the empty vector.
///
/// Serializes as a low-to-high array of integers (`z^2 - 2` is `[-2, 0, 1]`);
/// coefficients outside the i64 range are written as decimal strings.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::serde_util::serialize_int_seq(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        crate::serde_util::deserialize_int_seq(d).map(IntPoly::new)
    }
}

impl Ord for IntPoly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for IntPoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        IntPoly::from_i64s(&[0, 1])
    }

    /// `z - c`
    pub fn linear_root(c: &BigInt) -> Self {
        IntPoly::new(vec![-c, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial treated as degree 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    pub fn pow(&self, mut e: u32) -> IntPoly {
        let mut base = self.clone();
        let mut acc = IntPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Non-negative gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut c = self.content();
        if self.leading().is_some_and(|l| l.is_negative()) {
            c = -c;
        }
        self.div_scalar_exact(&c)
    }

    pub fn div_scalar_exact(&self, k: &BigInt) -> IntPoly {
        debug_assert!(self.coeffs.iter().all(|c| (c % k).is_zero()));
        IntPoly::new(self.coeffs.iter().map(|c| c / k).collect())
    }

    /// Substitutes `z -> inner`.
    pub fn compose(&self, inner: &IntPoly) -> IntPoly {
        self.coeffs.iter().rev().fold(IntPoly::zero(), |acc, c| {
            &(&acc * inner) + &IntPoly::constant(c.clone())
        })
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
    pub fn pseudo_rem(&self, b: &IntPoly) -> IntPoly {
        IntPoly::new(subres::prem(&self.coeffs, &b.coeffs))
    }

    /// Exact division, `None` when `d` does not divide `self` in Z[z].
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        let (q, r) = self.div_rem_z(d)?;
        r.is_zero().then_some(q)
    }

    /// Division with remainder in Z[z]; `None` when a quotient coefficient
    /// would leave Z.
    pub fn div_rem_z(&self, d: &IntPoly) -> Option<(IntPoly, IntPoly)> {
        let dd = d.degree()?;
        let lc = d.leading()?.clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Some((IntPoly::zero(), self.clone()));
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = std::mem::take(&mut r[i]);
            if c.is_zero() {
                continue;
            }
            let (quo, rem) = c.div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate().take(dd) {
                r[i - dd + j] -= &quo * dc;
            }
            q[i - dd] = quo;
        }
        r.truncate(dd);
        Some((IntPoly::new(q), IntPoly::new(r)))
    }

    /// Remainder modulo a monic polynomial; stays in Z[z].
    pub fn rem_monic(&self, m: &IntPoly) -> IntPoly {
        debug_assert!(m.is_monic());
        let dm = m.deg0();
        if self.coeffs.len() <= dm {
            return self.clone();
        }
        let mut r = self.coeffs.clone();
        for i in (dm..r.len()).rev() {
            let c = std::mem::take(&mut r[i]);
            if c.is_zero() {
                continue;
            }
            for (j, mc) in m.coeffs.iter().enumerate().take(dm) {
                r[i - dm + j] -= &c * mc;
            }
        }
        r.truncate(dm);
        IntPoly::new(r)
    }

    /// Greatest common divisor over Z via the subresultant remainder
    /// sequence. The result is primitive with positive leading coefficient,
    /// so it is also the gcd over Q up to normalization.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        IntPoly::new(subres::gcd_primitive(&self.coeffs, &other.coeffs))
    }

    /// `g / gcd(g, g')`, primitive with positive leading coefficient.
    pub fn squarefree_part(&self) -> CrateResult<IntPoly> {
        if self.is_zero() {
            return Err(Error::invalid("squarefree part of the zero polynomial"));
        }
        let g = self.gcd(&self.derivative());
        let q = self
            .primitive_part()
            .div_exact(&g)
            .ok_or_else(|| Error::Internal("gcd with derivative does not divide".into()))?;
        Ok(q.primitive_part())
    }

    /// True iff gcd(g, g') is constant, i.e. no repeated complex root.
    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).deg0() == 0
    }

    /// Sum of squared coefficients.
    pub fn norm2_squared(&self) -> BigInt {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Resultant of two integer polynomials in `z`.
pub fn resultant(a: &IntPoly, b: &IntPoly) -> CrateResult<BigInt> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::invalid("resultant of a zero polynomial"));
    }
    Ok(subres::resultant(&a.coeffs, &b.coeffs))
}

/// Resultant eliminating `y` from bivariate polynomials given as
/// coefficient lists in `y` whose entries are polynomials in `z`.
pub fn resultant_in_y(a: &[IntPoly], b: &[IntPoly]) -> CrateResult<IntPoly> {
    let a = trim_bivariate(a);
    let b = trim_bivariate(b);
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("resultant of a zero polynomial"));
    }
    Ok(subres::resultant(&a, &b))
}

pub(crate) fn trim_bivariate(a: &[IntPoly]) -> Vec<IntPoly> {
    let mut v = a.to_vec();
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(
            f,
            self.coeffs.iter().cloned().map(num_rational::BigRational::from_integer),
            "z",
        )
    }
}

pub(crate) fn write_poly(
    f: &mut fmt::Formatter<'_>,
    coeffs: impl DoubleEndedIterator<Item = num_rational::BigRational> + ExactSizeIterator,
    var: &str,
) -> fmt::Result {
    let n = coeffs.len();
    let mut first = true;
    for (i, c) in coeffs.enumerate().collect::<Vec<_>>().into_iter().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let unit = a.is_one() && i > 0;
        if !unit {
            if a.is_integer() {
                write!(f, "{}", a.numer())?;
            } else {
                write!(f, "{}/{}", a.numer(), a.denom())?;
            }
        }
        match i {
            0 => {}
            1 => write!(f, "{}{var}", if unit { "" } else { "*" })?,
            _ => write!(f, "{}{var}^{i}", if unit { "" } else { "*" })?,
        }
    }
    if first || n == 0 {
        write!(f, "0")?;
    }
    Ok(())
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntPoly {
            type Output = IntPoly;
            fn $m(self, rhs: IntPoly) -> IntPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(p(&[2, -3, 0, 1]).squarefree_part().unwrap(), p(&[-2, 1, 1]));
        assert_eq!(p(&[1, 0, 1]).squarefree_part().unwrap(), p(&[1, 0, 1]));
        assert_eq!(p(&[0, 0, 1]).squarefree_part().unwrap(), p(&[0, 1]));
        assert!(p(&[]).squarefree_part().is_err());
        // content and sign are normalized away
        assert_eq!(p(&[0, 0, -6]).squarefree_part().unwrap(), p(&[0, 1]));
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&p(&[-3, 1]), &p(&[-2, 0, 1])).unwrap(), BigInt::from(7));
        assert_eq!(resultant(&p(&[-1, 0, 1]), &p(&[-1, 1])).unwrap(), BigInt::zero());
        assert!(resultant(&p(&[]), &p(&[1])).is_err());
        // Res_y(y^2 - 2, (z - y)^2 + 1)
        let a = vec![p(&[-2]), p(&[]), p(&[1])];
        let b = vec![p(&[1, 0, 1]), p(&[0, -2]), p(&[1])];
        assert_eq!(resultant_in_y(&a, &b).unwrap(), p(&[9, 0, -2, 0, 1]));
    }

    #[test]
    fn division_and_display() {
        let a = p(&[-1, 0, 1]);
        assert_eq!(a.div_exact(&p(&[-1, 1])), Some(p(&[1, 1])));
        assert_eq!(a.div_exact(&p(&[0, 2])), None);
        assert_eq!(p(&[1, 2, 3]).rem_monic(&p(&[1, 0, 1])), p(&[-2, 2]));
        assert_eq!(p(&[-2, 0, 1]).to_string(), "z^2 - 2");
        assert_eq!(p(&[]).to_string(), "0");
        assert_eq!(p(&[0, -1, 3]).to_string(), "3*z^2 - z");
    }
}
