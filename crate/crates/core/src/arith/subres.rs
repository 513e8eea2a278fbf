//! Subresultant machinery over an integral domain with exact division.
//!
//! Polynomials are plain coefficient vectors (low-to-high, trimmed) whose
//! entries live in a [`CoeffRing`]. The same code runs over `BigInt`
//! (univariate resultants and gcds) and over `IntPoly` (eliminating `y`
//! from polynomials in `Z[z][y]`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::int_poly::IntPoly;

pub trait CoeffRing: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Division known to be exact; panics otherwise.
    fn exact_div(&self, o: &Self) -> Self;

    fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl CoeffRing for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, o: &Self) -> Self {
        let (q, r) = self.div_rem(o);
        assert!(Zero::is_zero(&r), "inexact integer division");
        q
    }
    fn pow(&self, e: usize) -> Self {
        num_traits::pow(self.clone(), e)
    }
}

impl CoeffRing for IntPoly {
    fn zero() -> Self {
        IntPoly::zero()
    }
    fn one() -> Self {
        IntPoly::one()
    }
    fn is_zero(&self) -> bool {
        IntPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, o: &Self) -> Self {
        self.div_exact(o).expect("inexact polynomial division")
    }
    fn pow(&self, e: usize) -> Self {
        IntPoly::pow(self, e as u32)
    }
}

fn trim<R: CoeffRing>(v: &mut Vec<R>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn deg<R>(v: &[R]) -> usize {
    v.len().saturating_sub(1)
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
pub fn prem<R: CoeffRing>(a: &[R], b: &[R]) -> Vec<R> {
    assert!(!b.is_empty(), "pseudo-remainder by zero");
    let mut r: Vec<R> = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return r;
    }
    let db = deg(b);
    let lb = b[db].clone();
    let mut e = r.len() - b.len() + 1;
    while !r.is_empty() && r.len() > db {
        let k = deg(&r) - db;
        let lr = r[deg(&r)].clone();
        let mut next: Vec<R> = r.iter().map(|c| c.mul(&lb)).collect();
        for (j, bc) in b.iter().enumerate() {
            next[j + k] = next[j + k].sub(&lr.mul(bc));
        }
        trim(&mut next);
        r = next;
        e -= 1;
    }
    if e > 0 {
        let f = lb.pow(e);
        r = r.iter().map(|c| c.mul(&f)).collect();
    }
    r
}

/// Resultant by the subresultant pseudo-remainder sequence. Both inputs
/// must be non-zero.
pub fn resultant<R: CoeffRing>(a: &[R], b: &[R]) -> R {
    let mut a: Vec<R> = a.to_vec();
    let mut b: Vec<R> = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    assert!(!a.is_empty() && !b.is_empty());
    let mut negate = false;
    if a.len() < b.len() {
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            negate = true;
        }
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = R::one();
    let mut h = R::one();
    while deg(&b) > 0 {
        let (da, db) = (deg(&a), deg(&b));
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            negate = !negate;
        }
        let r = prem(&a, &b);
        if r.is_empty() {
            return R::zero();
        }
        let divisor = g.mul(&h.pow(delta));
        a = b;
        b = r.iter().map(|c| c.exact_div(&divisor)).collect();
        g = a[deg(&a)].clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => g.pow(delta).exact_div(&h.pow(delta - 1)),
        };
    }
    let da = deg(&a);
    let lb = b[0].clone();
    let res = match da {
        0 => h,
        1 => lb,
        _ => lb.pow(da).exact_div(&h.pow(da - 1)),
    };
    if negate {
        res.neg()
    } else {
        res
    }
}

fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(<BigInt as Zero>::zero(), |g, c| g.gcd(c))
}

fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut c = content(v);
    if v[v.len() - 1].is_negative() {
        c = -c;
    }
    v.iter().map(|x| x / &c).collect()
}

/// Primitive gcd over Z with positive leading coefficient.
pub fn gcd_primitive(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() {
        return primitive(&b);
    }
    if b.is_empty() {
        return primitive(&a);
    }
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    a = primitive(&a);
    b = primitive(&b);
    let mut g = <BigInt as One>::one();
    let mut h = <BigInt as One>::one();
    loop {
        let delta = deg(&a) - deg(&b);
        let r = prem(&a, &b);
        if r.is_empty() {
            return primitive(&b);
        }
        if r.len() == 1 {
            return vec![<BigInt as One>::one()];
        }
        let divisor = &g * CoeffRing::pow(&h, delta);
        a = b;
        b = r.iter().map(|c| c / &divisor).collect();
        g = a[deg(&a)].clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => CoeffRing::pow(&g, delta) / CoeffRing::pow(&h, delta - 1),
        };
    }
}

/// Fraction-free (Bareiss) determinant.
pub fn bareiss_det<R: CoeffRing>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    if n == 0 {
        return R::one();
    }
    let mut negate = false;
    let mut prev = R::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return R::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = v.exact_div(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

/// The `j`-th subresultant of `a` and `b` computed directly from
/// determinants of Sylvester submatrices. Returned coefficients are
/// low-to-high, length `j + 1` (untrimmed).
pub fn subresultant_by_minors<R: CoeffRing>(a: &[R], b: &[R], j: usize) -> Vec<R> {
    let (m, n) = (deg(a), deg(b));
    assert!(j <= m.min(n), "subresultant index out of range");
    let cols = m + n - j;
    let rows = m + n - 2 * j;
    // row entries indexed high-to-low: column c holds the coefficient of x^(cols-1-c)
    let mut mat: Vec<Vec<R>> = Vec::with_capacity(rows);
    for (poly, d, count) in [(a, m, n - j), (b, n, m - j)] {
        for i in 0..count {
            let shift = count - 1 - i;
            let mut row = vec![R::zero(); cols];
            for (k, c) in poly.iter().enumerate().take(d + 1) {
                let power = k + shift;
                row[cols - 1 - power] = c.clone();
            }
            mat.push(row);
        }
    }
    (0..=j)
        .map(|i| {
            let sub: Vec<Vec<R>> = mat
                .iter()
                .map(|row| {
                    let mut r: Vec<R> = row[..rows - 1].to_vec();
                    r.push(row[cols - 1 - i].clone());
                    r
                })
                .collect();
            bareiss_det(sub)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn prs_matches_sylvester_determinant() {
        let cases: &[(&[i64], &[i64])] = &[
            (&[-2, 0, 1], &[1, 0, 1]),
            (&[1, 2, 3, 4], &[5, -1, 2]),
            (&[3, 0, 0, 0, 1], &[-1, 1]),
            (&[2, -3, 0, 1], &[-3, 0, 3]),
            (&[7], &[1, 1, 1]),
        ];
        for (a, b) in cases {
            let (a, b) = (v(a), v(b));
            let prs = resultant(&a, &b);
            let det = subresultant_by_minors(&a, &b, 0)[0].clone();
            assert_eq!(prs, det, "{a:?} {b:?}");
        }
    }

    #[test]
    fn gcd_via_prs() {
        assert_eq!(gcd_primitive(&v(&[2, -3, 0, 1]), &v(&[-3, 0, 3])), v(&[-1, 1]));
        assert_eq!(gcd_primitive(&v(&[-2, 0, 1]), &v(&[1, 0, 1])), v(&[1]));
        assert_eq!(gcd_primitive(&v(&[]), &v(&[0, -4])), v(&[0, 1]));
    }
}
