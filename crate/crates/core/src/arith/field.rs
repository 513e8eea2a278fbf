//! Prime fields and dense polynomial algorithms over them.
//!
//! Everything here is generic over [`PrimeField`] so the same code serves a
//! word-sized modulus (u64 residues, u128 products) and an arbitrary
//! precision one.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use super::modular::{mod_inverse, mul_mod_u64, pow_mod_u64};
use super::rat_poly::reduce_mod;

pub trait PrimeField {
    type E: Clone + PartialEq + Debug;

    fn modulus(&self) -> BigUint;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn from_bigint(&self, c: &BigInt) -> Self::E;
    fn from_u64(&self, c: u64) -> Self::E;
    fn to_biguint(&self, a: &Self::E) -> BigUint;
    fn random<R: Rng>(&self, rng: &mut R) -> Self::E;

    fn neg(&self, a: &Self::E) -> Self::E {
        self.sub(&self.zero(), a)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SmallField {
    p: u64,
}

impl SmallField {
    pub fn new(p: u64) -> Self {
        SmallField { p }
    }
}

impl PrimeField for SmallField {
    type E = u64;

    fn modulus(&self) -> BigUint {
        BigUint::from(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        (s % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod_u64(*a, *b, self.p)
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        pow_mod_u64(*a, self.p - 2, self.p)
    }
    fn from_bigint(&self, c: &BigInt) -> u64 {
        reduce_mod(c, &BigUint::from(self.p)).to_u64().unwrap()
    }
    fn from_u64(&self, c: u64) -> u64 {
        c % self.p
    }
    fn to_biguint(&self, a: &u64) -> BigUint {
        BigUint::from(*a)
    }
    fn random<R: Rng>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
}

#[derive(Clone, Debug)]
pub struct BigField {
    p: BigUint,
}

impl BigField {
    pub fn new(p: BigUint) -> Self {
        BigField { p }
    }
}

impl PrimeField for BigField {
    type E = BigUint;

    fn modulus(&self) -> BigUint {
        self.p.clone()
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one() % &self.p
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.p
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.p - (b - a)
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.p
    }
    fn inv(&self, a: &BigUint) -> BigUint {
        mod_inverse(a, &self.p).expect("inverse of a non-unit")
    }
    fn from_bigint(&self, c: &BigInt) -> BigUint {
        reduce_mod(c, &self.p)
    }
    fn from_u64(&self, c: u64) -> BigUint {
        BigUint::from(c) % &self.p
    }
    fn to_biguint(&self, a: &BigUint) -> BigUint {
        a.clone()
    }
    fn random<R: Rng>(&self, rng: &mut R) -> BigUint {
        let bits = self.p.bits();
        loop {
            let words = bits.div_ceil(32) as usize;
            let digits: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
            let mut x = BigUint::new(digits);
            let excess = words as u64 * 32 - bits;
            x >>= excess;
            if x < self.p {
                return x;
            }
        }
    }
}

/// Runs `$body` with `$f` bound to the cheapest field implementation for
/// the modulus `$p: &BigUint`.
macro_rules! with_field {
    ($p:expr, |$f:ident| $body:expr) => {{
        let modulus: &num_bigint::BigUint = $p;
        match num_traits::ToPrimitive::to_u64(modulus) {
            Some(small) if small < (1u64 << 62) => {
                let $f = &$crate::arith::field::SmallField::new(small);
                $body
            }
            _ => {
                let $f = &$crate::arith::field::BigField::new(modulus.clone());
                $body
            }
        }
    }};
}
pub(crate) use with_field;

pub type Poly<F> = Vec<<F as PrimeField>::E>;

pub fn trim<F: PrimeField>(f: &F, a: &mut Poly<F>) {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
}

pub fn from_ints<F: PrimeField>(f: &F, coeffs: &[BigInt]) -> Poly<F> {
    let mut v: Poly<F> = coeffs.iter().map(|c| f.from_bigint(c)).collect();
    trim(f, &mut v);
    v
}

pub fn x_poly<F: PrimeField>(f: &F) -> Poly<F> {
    let mut v = vec![f.zero(), f.one()];
    trim(f, &mut v);
    v
}

pub fn add<F: PrimeField>(f: &F, a: &[F::E], b: &[F::E]) -> Poly<F> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let mut out: Poly<F> = (0..n)
        .map(|i| f.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    trim(f, &mut out);
    out
}

pub fn sub<F: PrimeField>(f: &F, a: &[F::E], b: &[F::E]) -> Poly<F> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let mut out: Poly<F> = (0..n)
        .map(|i| f.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    trim(f, &mut out);
    out
}

pub fn mul<F: PrimeField>(f: &F, a: &[F::E], b: &[F::E]) -> Poly<F> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, &mut out);
    out
}

pub fn scale<F: PrimeField>(f: &F, a: &[F::E], k: &F::E) -> Poly<F> {
    let mut out: Poly<F> = a.iter().map(|c| f.mul(c, k)).collect();
    trim(f, &mut out);
    out
}

pub fn monic<F: PrimeField>(f: &F, a: &[F::E]) -> Poly<F> {
    match a.last() {
        None => Vec::new(),
        Some(l) => scale(f, a, &f.inv(l)),
    }
}

pub fn div_rem<F: PrimeField>(f: &F, a: &[F::E], d: &[F::E]) -> (Poly<F>, Poly<F>) {
    assert!(!d.is_empty(), "division by the zero polynomial");
    let mut r: Poly<F> = a.to_vec();
    trim(f, &mut r);
    let dd = d.len() - 1;
    if r.len() <= dd {
        return (Vec::new(), r);
    }
    let inv = f.inv(&d[dd]);
    let mut q = vec![f.zero(); r.len() - dd];
    for i in (dd..r.len()).rev() {
        let c = f.mul(&r[i], &inv);
        if f.is_zero(&c) {
            continue;
        }
        for (j, dc) in d.iter().enumerate() {
            r[i - dd + j] = f.sub(&r[i - dd + j], &f.mul(&c, dc));
        }
        q[i - dd] = c;
    }
    r.truncate(dd);
    trim(f, &mut r);
    trim(f, &mut q);
    (q, r)
}

pub fn rem<F: PrimeField>(f: &F, a: &[F::E], d: &[F::E]) -> Poly<F> {
    div_rem(f, a, d).1
}

/// Monic gcd (zero when both are zero).
pub fn gcd<F: PrimeField>(f: &F, a: &[F::E], b: &[F::E]) -> Poly<F> {
    let mut a: Poly<F> = a.to_vec();
    let mut b: Poly<F> = b.to_vec();
    trim(f, &mut a);
    trim(f, &mut b);
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, &a)
}

pub fn derivative<F: PrimeField>(f: &F, a: &[F::E]) -> Poly<F> {
    let mut out: Poly<F> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| f.mul(c, &f.from_u64(i as u64)))
        .collect();
    trim(f, &mut out);
    out
}

pub fn eval<F: PrimeField>(f: &F, a: &[F::E], x: &F::E) -> F::E {
    a.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

/// `base^e mod m` by square-and-multiply over the bits of `e`.
pub fn pow_mod<F: PrimeField>(f: &F, base: &[F::E], e: &BigUint, m: &[F::E]) -> Poly<F> {
    let mut acc = rem(f, &[f.one()], m);
    let base = rem(f, base, m);
    for i in (0..e.bits()).rev() {
        acc = rem(f, &mul(f, &acc, &acc), m);
        if e.bit(i) {
            acc = rem(f, &mul(f, &acc, &base), m);
        }
    }
    acc
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// pairs `(d, product of all irreducible factors of degree d)`.
pub fn distinct_degree<F: PrimeField>(f: &F, g: &[F::E]) -> Vec<(usize, Poly<F>)> {
    let p = f.modulus();
    let x = x_poly(f);
    let mut rest: Poly<F> = monic(f, g);
    let mut out = Vec::new();
    let mut h = x.clone();
    let mut d = 0;
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            out.push((rest.len() - 1, rest.clone()));
            break;
        }
        h = pow_mod(f, &h, &p, &rest);
        let part = gcd(f, &rest, &sub(f, &h, &x));
        if part.len() > 1 {
            rest = div_rem(f, &rest, &part).0;
            h = rem(f, &h, &rest);
            out.push((d, part));
        }
    }
    out
}

/// Splits a monic squarefree product of irreducibles all of degree `d`
/// into its factors (Cantor-Zassenhaus; trace map in characteristic 2).
pub fn equal_degree<F: PrimeField, R: Rng>(f: &F, g: &[F::E], d: usize, rng: &mut R) -> Vec<Poly<F>> {
    let n = g.len() - 1;
    if n == d {
        return vec![g.to_vec()];
    }
    let p = f.modulus();
    let two = BigUint::from(2u32);
    loop {
        let a: Poly<F> = {
            let mut v: Poly<F> = (0..n).map(|_| f.random(rng)).collect();
            trim(f, &mut v);
            v
        };
        if a.len() < 2 {
            continue;
        }
        let b = if p == two {
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = rem(f, &mul(f, &t, &t), g);
                acc = add(f, &acc, &t);
            }
            acc
        } else {
            let e = (p.pow(d as u32) - BigUint::one()) / &two;
            sub(f, &pow_mod(f, &a, &e, g), &[f.one()])
        };
        let c = gcd(f, g, &b);
        if c.len() > 1 && c.len() < g.len() {
            let other = div_rem(f, g, &c).0;
            let mut out = equal_degree(f, &c, d, rng);
            out.extend(equal_degree(f, &monic(f, &other), d, rng));
            return out;
        }
    }
}

/// Full factorization of a monic squarefree polynomial into monic irreducibles.
pub fn factor_squarefree<F: PrimeField, R: Rng>(f: &F, g: &[F::E], rng: &mut R) -> Vec<Poly<F>> {
    distinct_degree(f, g)
        .into_iter()
        .flat_map(|(d, part)| equal_degree(f, &part, d, rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn sp(c: &[u64]) -> Vec<u64> {
        c.to_vec()
    }

    #[test]
    fn ddf_of_cubic_mod_5() {
        // z^3 - 2 = (z - 3)(z^2 + 3z + 4) mod 5
        let f = SmallField::new(5);
        let g = sp(&[3, 0, 0, 1]);
        let parts = distinct_degree(&f, &g);
        let degs: Vec<_> = parts.iter().map(|(d, p)| (*d, p.len() - 1)).collect();
        assert_eq!(degs, vec![(1, 1), (2, 2)]);
    }

    #[test]
    fn edf_agrees_between_field_backends() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        // (z-1)(z-2)(z-3)(z-4) mod 101
        let f = SmallField::new(101);
        let g = [1u64, 2, 3, 4]
            .iter()
            .fold(vec![1u64], |acc, r| mul(&f, &acc, &[101 - r, 1]));
        let mut roots: Vec<u64> = equal_degree(&f, &g, 1, &mut rng)
            .into_iter()
            .map(|l| 101 - l[0])
            .collect();
        roots.sort();
        assert_eq!(roots, vec![1, 2, 3, 4]);

        let bf = BigField::new(BigUint::from(2u32));
        // z^2 + z = z (z + 1) over GF(2)
        let g2 = vec![BigUint::zero(), BigUint::one(), BigUint::one()];
        assert_eq!(equal_degree(&bf, &g2, 1, &mut rng).len(), 2);
    }
}
