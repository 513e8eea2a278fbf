//! Certified complex root isolation with dyadic fixed-point arithmetic.
//!
//! Approximations come from Durand-Kerner iteration on integers scaled by
//! `2^w`. Each approximation `z` is then certified exactly: some root lies
//! within `n |f(z)| / |f'(z)|` of `z`, and when the resulting `n` boxes are
//! pairwise disjoint each holds exactly one root.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::IntPoly;
use crate::error::{Error, Result};

/// Fractional bits of the first isolation attempt.
pub const START_BITS: u32 = 64;
/// Precision ceiling; exceeding it yields [`Error::Precision`].
pub const MAX_BITS: u32 = 4096;
/// Beyond this precision, roots whose real-part intervals still overlap are
/// ordered by imaginary part.
const ORDER_BITS: u32 = 256;

/// Closed axis-parallel rectangle in the complex plane with exact rational
/// endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rect {
    pub re_lo: BigRational,
    pub re_hi: BigRational,
    pub im_lo: BigRational,
    pub im_hi: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn min_max(v: [BigRational; 4]) -> (BigRational, BigRational) {
    let mut lo = v[0].clone();
    let mut hi = v[0].clone();
    for x in &v[1..] {
        if *x < lo {
            lo = x.clone();
        }
        if *x > hi {
            hi = x.clone();
        }
    }
    (lo, hi)
}

fn imul(a: (&BigRational, &BigRational), b: (&BigRational, &BigRational)) -> (BigRational, BigRational) {
    min_max([a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1])
}

impl Rect {
    pub fn new(re_lo: BigRational, re_hi: BigRational, im_lo: BigRational, im_hi: BigRational) -> Result<Self> {
        if re_lo > re_hi || im_lo > im_hi {
            return Err(Error::invalid("rectangle endpoints out of order"));
        }
        Ok(Rect {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        })
    }

    pub fn point(re: BigRational, im: BigRational) -> Self {
        Rect {
            re_lo: re.clone(),
            re_hi: re,
            im_lo: im.clone(),
            im_hi: im,
        }
    }

    pub fn from_ints(re_lo: i64, re_hi: i64, im_lo: i64, im_hi: i64) -> Result<Self> {
        Rect::new(rat(re_lo), rat(re_hi), rat(im_lo), rat(im_hi))
    }

    pub fn contains(&self, o: &Rect) -> bool {
        self.re_lo <= o.re_lo && o.re_hi <= self.re_hi && self.im_lo <= o.im_lo && o.im_hi <= self.im_hi
    }

    pub fn intersects(&self, o: &Rect) -> bool {
        self.re_lo <= o.re_hi && o.re_lo <= self.re_hi && self.im_lo <= o.im_hi && o.im_lo <= self.im_hi
    }

    pub fn intersection(&self, o: &Rect) -> Option<Rect> {
        if !self.intersects(o) {
            return None;
        }
        Some(Rect {
            re_lo: self.re_lo.clone().max(o.re_lo.clone()),
            re_hi: self.re_hi.clone().min(o.re_hi.clone()),
            im_lo: self.im_lo.clone().max(o.im_lo.clone()),
            im_hi: self.im_hi.clone().min(o.im_hi.clone()),
        })
    }

    /// Complex conjugate of every point.
    pub fn mirror(&self) -> Rect {
        Rect {
            re_lo: self.re_lo.clone(),
            re_hi: self.re_hi.clone(),
            im_lo: -&self.im_hi,
            im_hi: -&self.im_lo,
        }
    }

    pub fn add(&self, o: &Rect) -> Rect {
        Rect {
            re_lo: &self.re_lo + &o.re_lo,
            re_hi: &self.re_hi + &o.re_hi,
            im_lo: &self.im_lo + &o.im_lo,
            im_hi: &self.im_hi + &o.im_hi,
        }
    }

    pub fn scale(&self, k: &BigInt) -> Rect {
        let k = BigRational::from_integer(k.clone());
        let (re_lo, re_hi) = min_max([&self.re_lo * &k, &self.re_hi * &k, &self.re_lo * &k, &self.re_hi * &k]);
        let (im_lo, im_hi) = min_max([&self.im_lo * &k, &self.im_hi * &k, &self.im_lo * &k, &self.im_hi * &k]);
        Rect {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        }
    }

    pub fn mul(&self, o: &Rect) -> Rect {
        let rr = imul((&self.re_lo, &self.re_hi), (&o.re_lo, &o.re_hi));
        let ii = imul((&self.im_lo, &self.im_hi), (&o.im_lo, &o.im_hi));
        let ri = imul((&self.re_lo, &self.re_hi), (&o.im_lo, &o.im_hi));
        let ir = imul((&self.im_lo, &self.im_hi), (&o.re_lo, &o.re_hi));
        Rect {
            re_lo: &rr.0 - &ii.1,
            re_hi: &rr.1 - &ii.0,
            im_lo: &ri.0 + &ir.0,
            im_hi: &ri.1 + &ir.1,
        }
    }

    /// Enclosure of `c0 + c1 x + ... ` for `x` in the rectangle.
    pub fn eval_rat(coeffs: &[BigRational], x: &Rect) -> Rect {
        let mut acc = Rect::point(BigRational::zero(), BigRational::zero());
        for c in coeffs.iter().rev() {
            acc = acc.mul(x).add(&Rect::point(c.clone(), BigRational::zero()));
        }
        acc
    }

    pub fn contains_zero(&self) -> bool {
        let z = BigRational::zero();
        self.re_lo <= z && z <= self.re_hi && self.im_lo <= z && z <= self.im_hi
    }

    pub fn width(&self) -> BigRational {
        (&self.re_hi - &self.re_lo).max(&self.im_hi - &self.im_lo)
    }

    pub fn endpoints(&self) -> [&BigRational; 4] {
        [&self.re_lo, &self.re_hi, &self.im_lo, &self.im_hi]
    }
}

impl fmt::Debug for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}] x [{}, {}]i",
            self.re_lo, self.re_hi, self.im_lo, self.im_hi
        )
    }
}

impl Serialize for Rect {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.endpoints().iter().map(|x| x.to_string()))
    }
}

impl<'de> Deserialize<'de> for Rect {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        if raw.len() != 4 {
            return Err(D::Error::custom("a rectangle has four endpoints"));
        }
        let v = raw
            .iter()
            .map(|x| match x {
                serde_json::Value::String(s) => parse_rational(s),
                serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| D::Error::custom("rectangle endpoints must be rationals"))?;
        let [a, b, c, e]: [BigRational; 4] = v.try_into().unwrap();
        Rect::new(a, b, c, e).map_err(D::Error::custom)
    }
}

/// Parses `"-3"`, `"7/2"` or a finite decimal such as `"1.25"` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: BigInt = format!("{int_part}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10u32);
    Some(if shift >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-shift) as usize))
    })
}

type C = (BigInt, BigInt);

fn c_mul(a: &C, b: &C, w: u32) -> C {
    ((&a.0 * &b.0 - &a.1 * &b.1) >> w, (&a.0 * &b.1 + &a.1 * &b.0) >> w)
}

fn c_div(a: &C, b: &C, w: u32) -> Option<C> {
    let den = &b.0 * &b.0 + &b.1 * &b.1;
    if den.is_zero() {
        return None;
    }
    let re = &a.0 * &b.0 + &a.1 * &b.1;
    let im = &a.1 * &b.0 - &a.0 * &b.1;
    Some(((re << w).div_floor(&den), (im << w).div_floor(&den)))
}

fn c_eval(coeffs: &[BigInt], z: &C, w: u32) -> C {
    let mut acc: C = (BigInt::zero(), BigInt::zero());
    for c in coeffs.iter().rev() {
        acc = c_mul(&acc, z, w);
        acc.0 += c << w;
    }
    acc
}

fn durand_kerner(coeffs: &[BigInt], zs: &mut [C], w: u32, max_iter: usize) {
    let n = zs.len();
    let tol = BigInt::one() << 8u32;
    let mut nudge = BigInt::one() << (w / 2);
    for _ in 0..max_iter {
        let mut worst = BigInt::zero();
        for k in 0..n {
            let fz = c_eval(coeffs, &zs[k], w);
            let mut prod: C = (BigInt::one() << w, BigInt::zero());
            for j in 0..n {
                if j != k {
                    let d = (&zs[k].0 - &zs[j].0, &zs[k].1 - &zs[j].1);
                    prod = c_mul(&prod, &d, w);
                }
            }
            match c_div(&fz, &prod, w) {
                Some(delta) => {
                    worst = worst.max(delta.0.abs()).max(delta.1.abs());
                    zs[k].0 -= delta.0;
                    zs[k].1 -= delta.1;
                }
                None => {
                    zs[k].0 += &nudge;
                    zs[k].1 += &nudge;
                    nudge += 1u32;
                    worst = worst.max(nudge.clone());
                }
            }
        }
        if worst <= tol {
            return;
        }
    }
}

fn ceil_sqrt(n: &BigUint) -> BigUint {
    let s = n.sqrt();
    if &(&s * &s) < n {
        s + 1u32
    } else {
        s
    }
}

/// Exact certified radius (in units of `2^-w`) around the approximation `z`.
fn certified_radius(coeffs: &[BigInt], z: &C, w: u32) -> Option<BigInt> {
    let n = coeffs.len() - 1;
    // Horner on P(Z) = sum c_j 2^{w(n-j)} Z^j, so P(Z) = f(z) 2^{wn}
    // and P'(Z) = f'(z) 2^{w(n-1)}
    let mut f: C = (coeffs[n].clone(), BigInt::zero());
    let mut g: C = (BigInt::zero(), BigInt::zero());
    for j in (0..n).rev() {
        g = (&g.0 * &z.0 - &g.1 * &z.1 + &f.0, &g.0 * &z.1 + &g.1 * &z.0 + &f.1);
        f = (&f.0 * &z.0 - &f.1 * &z.1, &f.0 * &z.1 + &f.1 * &z.0);
        f.0 += &coeffs[j] << (w as usize * (n - j));
    }
    let f2 = (&f.0 * &f.0 + &f.1 * &f.1).to_biguint().unwrap();
    let g2 = (&g.0 * &g.0 + &g.1 * &g.1).to_biguint().unwrap();
    if f2.is_zero() {
        return Some(BigInt::zero());
    }
    if g2.is_zero() {
        return None;
    }
    // |z - root| <= n |f(z)/f'(z)| = n |P| / (|P'| 2^w)
    let q = (f2 * BigUint::from(n * n)).div_ceil(&g2);
    Some(BigInt::from(ceil_sqrt(&q)))
}

fn to_rat(v: &BigInt, w: u32) -> BigRational {
    BigRational::new(v.clone(), BigInt::one() << w)
}

fn boxes_disjoint(bs: &[(C, BigInt)]) -> bool {
    for i in 0..bs.len() {
        for j in i + 1..bs.len() {
            let (a, ra) = &bs[i];
            let (b, rb) = &bs[j];
            let dre = (&a.0 - &b.0).abs();
            let dim = (&a.1 - &b.1).abs();
            let reach = ra + rb;
            if dre <= reach && dim <= reach {
                return false;
            }
        }
    }
    true
}

fn start_points(n: usize, w: u32) -> Vec<C> {
    let base: C = ((BigInt::from(2) << w) / 5, (BigInt::from(9) << w) / 10);
    let mut out = Vec::with_capacity(n);
    let mut cur: C = (BigInt::one() << w, BigInt::zero());
    for _ in 0..n {
        cur = c_mul(&cur, &base, w);
        out.push(cur.clone());
    }
    out
}

/// Pairwise disjoint boxes, one around each complex root of the monic
/// squarefree `f`, each of width at most `2^(1-bits)`.
pub fn isolate_roots(f: &IntPoly, bits: u32) -> Result<Vec<Rect>> {
    let n = f
        .degree()
        .ok_or_else(|| Error::invalid("cannot isolate roots of zero"))?;
    if !f.is_monic() {
        return Err(Error::invalid(format!(
            "root isolation expects a monic polynomial, got {f}"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let coeffs = f.coeffs();
    let mut w = START_BITS.max(bits + 32);
    let mut zs = start_points(n, w);
    let mut iters = 200 + 40 * n;
    loop {
        durand_kerner(coeffs, &mut zs, w, iters);
        let radii: Option<Vec<BigInt>> = zs.iter().map(|z| certified_radius(coeffs, z, w)).collect();
        if let Some(radii) = radii {
            let limit = BigInt::one() << (w - bits.min(w));
            let tight = radii.iter().all(|r| *r <= limit);
            let bs: Vec<(C, BigInt)> = zs.iter().cloned().zip(radii).collect();
            if tight && boxes_disjoint(&bs) {
                return Ok(bs
                    .iter()
                    .map(|(z, r)| Rect {
                        re_lo: to_rat(&(&z.0 - r), w),
                        re_hi: to_rat(&(&z.0 + r), w),
                        im_lo: to_rat(&(&z.1 - r), w),
                        im_hi: to_rat(&(&z.1 + r), w),
                    })
                    .collect());
            }
        }
        if w >= MAX_BITS {
            return Err(Error::Precision {
                bits: w,
                context: format!("isolating the roots of {f}"),
            });
        }
        let nw = (w * 2).min(MAX_BITS);
        for z in zs.iter_mut() {
            z.0 <<= nw - w;
            z.1 <<= nw - w;
        }
        w = nw;
        iters = 100 + 10 * n;
    }
}

/// Shrinks the isolating box `b` of a root of `f` below width `2^(1-bits)`.
pub fn refine_root(f: &IntPoly, b: &Rect, bits: u32) -> Result<Rect> {
    let mut bits = bits;
    loop {
        let hits: Vec<Rect> = isolate_roots(f, bits)?
            .into_iter()
            .filter_map(|r| r.intersection(b))
            .collect();
        if hits.len() == 1 {
            return Ok(hits.into_iter().next().unwrap());
        }
        if bits >= MAX_BITS {
            return Err(Error::Precision {
                bits,
                context: format!("refining a root of {f}"),
            });
        }
        bits *= 2;
    }
}

fn compare_roots(boxes: &[Rect], i: usize, j: usize, final_round: bool) -> Option<Ordering> {
    let (a, b) = (&boxes[i], &boxes[j]);
    if a.re_hi < b.re_lo {
        return Some(Ordering::Less);
    }
    if b.re_hi < a.re_lo {
        return Some(Ordering::Greater);
    }
    let only_hit = |m: &Rect, k: usize| {
        boxes
            .iter()
            .enumerate()
            .filter(|(_, r)| r.intersects(m))
            .map(|(idx, _)| idx)
            .collect::<Vec<_>>()
            == vec![k]
    };
    // conjugate roots share their real part exactly
    let mates = only_hit(&a.mirror(), j) && only_hit(&b.mirror(), i);
    if mates || final_round {
        if a.im_hi < b.im_lo {
            return Some(Ordering::Less);
        }
        if b.im_hi < a.im_lo {
            return Some(Ordering::Greater);
        }
    }
    None
}

/// Isolating boxes sorted by (real, imaginary) part of the enclosed root.
pub fn sorted_roots(f: &IntPoly) -> Result<Vec<Rect>> {
    let mut bits = START_BITS;
    loop {
        let boxes = isolate_roots(f, bits)?;
        let final_round = bits >= ORDER_BITS;
        let n = boxes.len();
        let mut decided = true;
        'outer: for i in 0..n {
            for j in i + 1..n {
                if compare_roots(&boxes, i, j, final_round).is_none() {
                    decided = false;
                    break 'outer;
                }
            }
        }
        if decided {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&i, &j| compare_roots(&boxes, i, j, final_round).unwrap());
            return Ok(idx.into_iter().map(|i| boxes[i].clone()).collect());
        }
        bits *= 2;
    }
}

/// Box of the lexicographically smallest root of `f`.
pub fn default_root(f: &IntPoly) -> Result<Rect> {
    sorted_roots(f)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::invalid(format!("{f} has no roots")))
}

/// Certifies that `user` contains exactly one root of `f` and returns a box
/// around it contained in `user`.
pub fn root_in_rect(f: &IntPoly, user: &Rect) -> Result<Rect> {
    let mut bits = START_BITS;
    loop {
        let boxes = isolate_roots(f, bits)?;
        if boxes.iter().all(|b| user.contains(b) || !user.intersects(b)) {
            let inside: Vec<&Rect> = boxes.iter().filter(|b| user.contains(b)).collect();
            return match inside.len() {
                1 => Ok(inside[0].clone()),
                k => Err(Error::invalid(format!(
                    "isolating rectangle {user:?} contains {k} roots of {f}, expected exactly one"
                ))),
            };
        }
        if bits >= MAX_BITS {
            return Err(Error::Precision {
                bits,
                context: format!("deciding which roots of {f} lie in {user:?}"),
            });
        }
        bits *= 2;
    }
}

/// Sign helper used by callers checking a box lies off the real axis.
pub fn strictly_nonreal(r: &Rect) -> bool {
    let z = BigRational::zero();
    r.im_lo > z || r.im_hi < z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn isolates_sqrt2_and_i() {
        let roots = sorted_roots(&p(&[-2, 0, 1])).unwrap();
        assert_eq!(roots.len(), 2);
        // -sqrt2 first
        assert!(roots[0].re_hi < r(-141, 100) && roots[0].re_lo > r(-142, 100));
        assert!(roots[1].re_lo > r(141, 100));
        let gi = sorted_roots(&p(&[1, 0, 1])).unwrap();
        assert!(gi[0].im_hi < rat(0) && gi[1].im_lo > rat(0));
    }

    #[test]
    fn rectangles_select_roots() {
        let f = p(&[9, 0, -2, 0, 1]);
        let all = isolate_roots(&f, 64).unwrap();
        assert_eq!(all.len(), 4);
        let q1 = Rect::from_ints(0, 3, 0, 3).unwrap();
        let b = root_in_rect(&f, &q1).unwrap();
        assert!(q1.contains(&b));
        let big = Rect::from_ints(-3, 3, -3, 3).unwrap();
        assert!(root_in_rect(&f, &big).is_err());
    }

    #[test]
    fn interval_arithmetic_encloses() {
        let a = Rect::new(r(1, 1), r(2, 1), r(-1, 1), r(1, 1)).unwrap();
        let sq = a.mul(&a);
        // (1.5 + 0.5i)^2 = 2 + 1.5i
        let pt = Rect::point(r(2, 1), r(3, 2));
        assert!(sq.contains(&pt));
        assert_eq!(parse_rational("1.25"), Some(r(5, 4)));
        assert_eq!(parse_rational("-7/2"), Some(r(-7, 2)));
    }

    #[test]
    fn many_roots_and_clusters() {
        // (z^2+1)(z^2+4)(z-3)(z+3)
        let f = &(&p(&[1, 0, 1]) * &p(&[4, 0, 1])) * &p(&[-9, 0, 1]);
        let roots = sorted_roots(&f).unwrap();
        assert_eq!(roots.len(), 6);
        assert!(roots[0].re_hi < rat(-2));
        // equal real parts are ordered by imaginary part
        assert!(roots[1].im_hi < roots[2].im_lo);
        let refined = refine_root(&f, &roots[5], 200).unwrap();
        assert!(refined.width() < r(1, 1 << 40));
    }
}
