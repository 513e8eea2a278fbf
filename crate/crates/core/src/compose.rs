//! Primitive element for the algebraic generators.
//!
//! Generators are folded in one at a time: `theta' = theta + c * beta` with
//! the smallest `|c|` (order 1, -1, 2, -2, ...) whose resultant
//! `R(z) = Res_y(f_theta(y), c^n f_beta((z - y)/c))` is squarefree. The factor of `R`
//! vanishing at `theta'` becomes the new minimal polynomial, and the first
//! subresultant `s1(z) y + s0(z)` yields `theta = -s0/s1` in `Q[theta']`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::subres::subresultant_by_minors;
use crate::arith::{
    check_irreducible, poly_gcd_q, prime_factors, resultant_in_y, IntPoly, Irreducibility, IrreducibilityCheck, RatPoly,
};
use crate::domain::DomainPresentation;
use crate::error::{Error, Result};
use crate::interval::{self, Rect, MAX_BITS, START_BITS};

/// Largest mixing coefficient tried before giving up.
const MAX_MIXING: i64 = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorRewrite {
    pub name: String,
    /// Coefficient of this generator in `theta`.
    #[serde(with = "crate::serde_util::bigint_string")]
    pub mixing: BigInt,
    /// The generator as a polynomial in `theta`, reduced mod `f_theta`.
    pub rewrite: RatPoly,
}

/// `theta`, its minimal polynomial and every generator expressed in it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositionResult {
    pub f_theta: IntPoly,
    pub irreducibility: Irreducibility,
    pub certificate: Option<String>,
    pub generators: Vec<GeneratorRewrite>,
    /// Primes dividing some rewrite denominator.
    #[serde(with = "crate::serde_util::biguint_seq")]
    pub excluded_primes: Vec<BigUint>,
    pub theta_box: Rect,
}

impl CompositionResult {
    pub fn rewrite(&self, name: &str) -> Option<&RatPoly> {
        self.generators.iter().find(|g| g.name == name).map(|g| &g.rewrite)
    }

    /// `prod alpha_k^{e_k}` rewritten in `theta`.
    pub fn monomial(&self, e: &[u32]) -> RatPoly {
        let m = &self.f_theta;
        let mut acc = RatPoly::one().rem_monic(m);
        for (g, &k) in self.generators.iter().zip(e) {
            if k > 0 {
                acc = acc.mul_mod(&g.rewrite.pow_mod(k as u64, m), m);
            }
        }
        acc
    }

    /// Product of all rewrite denominators.
    pub fn denominator(&self) -> BigInt {
        self.generators
            .iter()
            .fold(BigInt::one(), |acc, g| acc * g.rewrite.denominator())
    }
}

/// Polynomial in the transcendentals with coefficients in `Q[theta]/f_theta`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ThetaPoly {
    terms: BTreeMap<Vec<u32>, RatPoly>,
}

impl ThetaPoly {
    pub fn new(mut terms: BTreeMap<Vec<u32>, RatPoly>) -> Self {
        terms.retain(|_, v| !v.is_zero());
        ThetaPoly { terms }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, RatPoly> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Vec<u32>, RatPoly> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Substitutes integers for the transcendentals.
    pub fn specialize(&self, point: &[BigInt], f_theta: &IntPoly) -> RatPoly {
        let mut acc = RatPoly::zero();
        for (e, c) in &self.terms {
            let mut k = BigInt::one();
            for (x, &d) in point.iter().zip(e) {
                if d > 0 {
                    k *= num_traits::pow(x.clone(), d as usize);
                }
            }
            if !k.is_zero() {
                acc = &acc + &c.scale(&BigRational::from_integer(k));
            }
        }
        acc.rem_monic(f_theta)
    }

    /// The constant term when no transcendental occurs.
    pub fn as_theta(&self) -> Option<RatPoly> {
        match self.terms.len() {
            0 => Some(RatPoly::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }
}

/// Rewrites an element of the presentation in `theta`.
pub fn rewrite_element(e: &crate::domain::Element, comp: &CompositionResult) -> ThetaPoly {
    let j = e.presentation().num_transcendentals();
    let mut out: BTreeMap<Vec<u32>, RatPoly> = BTreeMap::new();
    for (exp, c) in e.poly().terms() {
        let (t, a) = exp.split_at(j);
        let term = comp.monomial(a).scale(c);
        let slot = out.entry(t.to_vec()).or_default();
        *slot = (&*slot + &term).rem_monic(&comp.f_theta);
    }
    ThetaPoly::new(out)
}

/// One fold step: `theta' = u * theta + v * beta`.
struct Step {
    u: BigInt,
    v: BigInt,
    f: IntPoly,
    irreducibility: Irreducibility,
    certificate: Option<String>,
    /// `theta` in terms of `theta'`.
    rewrite_a: RatPoly,
    /// `beta` in terms of `theta'`.
    rewrite_b: RatPoly,
    theta_box: Rect,
}

struct Side<'a> {
    f: &'a IntPoly,
    root: &'a Rect,
    irreducibility: Irreducibility,
    certificate: Option<String>,
}

fn constant_root(f: &IntPoly) -> RatPoly {
    RatPoly::constant(&BigRational::from_integer(-f.coeff(0)))
}

/// Whether two isolating boxes of roots of `f` hold the same root.
fn same_root(f: &IntPoly, a: &Rect, b: &Rect) -> Result<bool> {
    let mut bits = START_BITS;
    loop {
        let boxes = interval::isolate_roots(f, bits)?;
        let ia: Vec<usize> = (0..boxes.len()).filter(|&i| boxes[i].intersects(a)).collect();
        let ib: Vec<usize> = (0..boxes.len()).filter(|&i| boxes[i].intersects(b)).collect();
        if ia.len() == 1 && ib.len() == 1 {
            return Ok(ia == ib);
        }
        if bits >= MAX_BITS {
            return Err(Error::Precision {
                bits,
                context: format!("comparing two roots of {f}"),
            });
        }
        bits *= 2;
    }
}

/// `c^n f((z - y)/c)` as coefficients in `y` over `Z[z]`.
fn shifted(fb: &IntPoly, c: &BigInt) -> Vec<IntPoly> {
    let n = fb.deg0();
    let mut out = vec![IntPoly::zero(); n + 1];
    // (z - y)^k expanded by binomial coefficients
    for k in 0..=n {
        let bk = fb.coeff(k);
        if bk.is_zero() {
            continue;
        }
        let scale = bk * num_traits::pow(c.clone(), n - k);
        let mut binom = BigInt::one();
        for i in 0..=k {
            let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            let coeff = &scale * &binom * sign;
            let term = IntPoly::constant(coeff).shift(k - i);
            out[i] = &out[i] + &term;
            binom = binom * BigInt::from(k - i) / BigInt::from(i + 1);
        }
    }
    out
}

fn monic_sign(f: IntPoly) -> IntPoly {
    if f.leading().is_some_and(|l| l.is_negative()) {
        -&f
    } else {
        f
    }
}

fn status_of(g: &IntPoly) -> (Irreducibility, Option<String>, Option<Vec<IntPoly>>) {
    match check_irreducible(g) {
        IrreducibilityCheck::Irreducible(c) => (Irreducibility::Certified, Some(c.to_string()), None),
        IrreducibilityCheck::Reducible(fs) => (Irreducibility::Certified, None, Some(fs)),
        IrreducibilityCheck::Unknown => (Irreducibility::Attested, None, None),
    }
}

fn pair_step(a: Side, b: Side) -> Result<Step> {
    let one = BigInt::one();
    let zero = BigInt::zero();
    if a.f.deg0() == 1 {
        return Ok(Step {
            u: zero,
            v: one,
            f: b.f.clone(),
            irreducibility: b.irreducibility,
            certificate: b.certificate,
            rewrite_a: constant_root(a.f),
            rewrite_b: RatPoly::z(),
            theta_box: b.root.clone(),
        });
    }
    if b.f.deg0() == 1 {
        return Ok(Step {
            u: one,
            v: zero,
            f: a.f.clone(),
            irreducibility: a.irreducibility,
            certificate: a.certificate,
            rewrite_a: RatPoly::z(),
            rewrite_b: constant_root(b.f),
            theta_box: a.root.clone(),
        });
    }
    if a.f == b.f && same_root(a.f, a.root, b.root)? {
        return Ok(Step {
            u: one,
            v: zero,
            f: a.f.clone(),
            irreducibility: a.irreducibility,
            certificate: a.certificate,
            rewrite_a: RatPoly::z(),
            rewrite_b: RatPoly::z(),
            theta_box: a.root.intersection(b.root).unwrap_or_else(|| a.root.clone()),
        });
    }
    let fa_y: Vec<IntPoly> = a.f.coeffs().iter().map(|c| IntPoly::constant(c.clone())).collect();
    for k in 1..=MAX_MIXING {
        for c in [BigInt::from(k), BigInt::from(-k)] {
            let fb_shift = shifted(b.f, &c);
            let r = monic_sign(resultant_in_y(&fa_y, &fb_shift)?);
            if !r.is_squarefree() {
                continue;
            }
            return finish_pair(&a, &b, c, &fa_y, &fb_shift, r);
        }
    }
    Err(Error::Internal(format!(
        "no mixing coefficient up to {MAX_MIXING} separates {} and {}",
        a.f, b.f
    )))
}

fn finish_pair(a: &Side, b: &Side, c: BigInt, fa_y: &[IntPoly], fb_shift: &[IntPoly], r: IntPoly) -> Result<Step> {
    let (mut irr, mut cert, split) = status_of(&r);
    let mut candidates = split.unwrap_or_else(|| vec![r.clone()]);
    let s = subresultant_by_minors(fa_y, fb_shift, 1);
    let (s0, s1) = (&s[0], &s[1]);
    let (mut ra, mut rb) = (a.root.clone(), b.root.clone());
    let mut bits = START_BITS;
    loop {
        let theta_box = ra.add(&rb.scale(&c));
        let mut hits: Vec<(usize, Rect)> = Vec::new();
        for (i, g) in candidates.iter().enumerate() {
            for bx in interval::isolate_roots(g, bits)? {
                if bx.intersects(&theta_box) {
                    hits.push((i, bx));
                }
            }
        }
        if hits.len() != 1 {
            if bits >= MAX_BITS {
                return Err(Error::Precision {
                    bits,
                    context: format!("locating theta among the roots of {r}"),
                });
            }
            bits *= 2;
            ra = interval::refine_root(a.f, &ra, bits)?;
            rb = interval::refine_root(b.f, &rb, bits)?;
            continue;
        }
        let (idx, bx) = hits.pop().unwrap();
        let g = candidates[idx].clone();
        let s1g = RatPoly::from_int_poly(s1.clone());
        let Some(inv) = s1g.inverse_mod(&g) else {
            // s1 shares a factor with g, so g is reducible: split and retry
            let h = poly_gcd_q(&s1g.rem_monic(&g), &RatPoly::from_int_poly(g.clone()))?;
            let h = h.numerator().clone();
            let rest = g
                .div_exact(&h)
                .ok_or_else(|| Error::Internal(format!("{h} does not divide {g}")))?;
            candidates.remove(idx);
            candidates.push(monic_sign(h));
            candidates.push(monic_sign(rest));
            continue;
        };
        let rewrite_a = (-&RatPoly::from_int_poly(s0.clone())).mul_mod(&inv, &g);
        let rewrite_b = (&RatPoly::z() - &rewrite_a)
            .scale(&BigRational::new(BigInt::one(), c.clone()))
            .rem_monic(&g);
        let theta_box = bx.intersection(&theta_box).unwrap_or(bx);
        if g != r {
            let (i2, c2, _) = status_of(&g);
            irr = i2;
            cert = c2;
        }
        return Ok(Step {
            u: BigInt::one(),
            v: c,
            f: g,
            irreducibility: irr,
            certificate: cert,
            rewrite_a,
            rewrite_b,
            theta_box,
        });
    }
}

fn check_relation(name: &str, f: &IntPoly, rewrite: &RatPoly, m: &IntPoly) -> Result<()> {
    let fr = RatPoly::from_int_poly(f.clone()).compose_mod(rewrite, m);
    if fr.is_zero() {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "rewrite of {name} does not satisfy {f} modulo {m}: remainder {fr}"
        )))
    }
}

/// Primitive element for two polynomials and chosen roots, with generators
/// named `a` and `b`.
pub fn compose_pair(fa: &IntPoly, fb: &IntPoly, root_a: &Rect, root_b: &Rect) -> Result<CompositionResult> {
    let pres = DomainPresentation::new(
        vec![],
        vec![
            ("a".into(), fa.clone(), Some(root_a.clone())),
            ("b".into(), fb.clone(), Some(root_b.clone())),
        ],
    )?;
    compose_all(&pres)
}

/// Left fold over the algebraic generators of `pres`.
pub fn compose_all(pres: &DomainPresentation) -> Result<CompositionResult> {
    let mut f = IntPoly::z();
    let mut irr = Irreducibility::Certified;
    let mut cert: Option<String> = Some("degree 1".into());
    let mut theta_box = Rect::point(BigRational::zero(), BigRational::zero());
    let mut gens: Vec<GeneratorRewrite> = Vec::new();
    for alg in pres.algebraics() {
        let step = pair_step(
            Side {
                f: &f,
                root: &theta_box,
                irreducibility: irr,
                certificate: cert.clone(),
            },
            Side {
                f: &alg.minpoly,
                root: &alg.root_box,
                irreducibility: alg.irreducibility,
                certificate: alg.certificate.clone(),
            },
        )?;
        for g in gens.iter_mut() {
            g.mixing = &g.mixing * &step.u;
            g.rewrite = g.rewrite.compose_mod(&step.rewrite_a, &step.f);
        }
        gens.push(GeneratorRewrite {
            name: alg.name.clone(),
            mixing: step.v.clone(),
            rewrite: step.rewrite_b.rem_monic(&step.f),
        });
        f = step.f;
        irr = step.irreducibility;
        cert = step.certificate;
        theta_box = step.theta_box;
        for (g, alg) in gens.iter().zip(pres.algebraics()) {
            check_relation(&g.name, &alg.minpoly, &g.rewrite, &f)?;
        }
    }
    let mut excluded: Vec<BigUint> = gens
        .iter()
        .flat_map(|g| prime_factors(g.rewrite.denominator().magnitude()))
        .collect();
    excluded.sort();
    excluded.dedup();
    Ok(CompositionResult {
        f_theta: f,
        irreducibility: irr,
        certificate: cert,
        generators: gens,
        excluded_primes: excluded,
        theta_box,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn default(f: &IntPoly) -> Rect {
        interval::default_root(f).unwrap()
    }

    #[test]
    fn sqrt2_and_i() {
        let (fa, fb) = (p(&[-2, 0, 1]), p(&[1, 0, 1]));
        let comp = compose_pair(&fa, &fb, &default(&fa), &default(&fb)).unwrap();
        assert_eq!(comp.f_theta, p(&[9, 0, -2, 0, 1]));
        assert_eq!(comp.irreducibility, Irreducibility::Certified);
        let m = &comp.f_theta;
        let r2 = comp.rewrite("a").unwrap();
        let i = comp.rewrite("b").unwrap();
        assert_eq!(r2.mul_mod(r2, m), RatPoly::from_int_poly(p(&[2])));
        assert_eq!(i.mul_mod(i, m), RatPoly::from_int_poly(p(&[-1])));
        assert_eq!(comp.excluded_primes, vec![BigUint::from(2u32), BigUint::from(3u32)]);
        // theta's box encloses alpha + c beta
        let back = Rect::eval_rat(&r2.to_rationals(), &comp.theta_box);
        assert!(back.intersects(&default(&fa)));
    }

    #[test]
    fn degenerate_pairs() {
        let fa = p(&[-2, 0, 1]);
        let rational = p(&[0, 1]);
        let comp = compose_pair(&fa, &rational, &default(&fa), &default(&rational)).unwrap();
        assert_eq!(comp.f_theta, fa);
        assert!(comp.rewrite("b").unwrap().is_zero());
        let same = compose_pair(&fa, &fa, &default(&fa), &default(&fa)).unwrap();
        assert_eq!(same.f_theta, fa);
        assert_eq!(same.rewrite("b").unwrap(), &RatPoly::z());
        assert_eq!(same.generators[1].mixing, BigInt::zero());
    }

    #[test]
    fn compose_all_cases() {
        let empty = DomainPresentation::new(vec!["t".into()], vec![]).unwrap();
        let c = compose_all(&empty).unwrap();
        assert_eq!(c.f_theta, IntPoly::z());
        assert!(c.generators.is_empty());
        let one = DomainPresentation::new(vec![], vec![("i".into(), p(&[1, 0, 1]), None)]).unwrap();
        let c = compose_all(&one).unwrap();
        assert_eq!(c.f_theta, p(&[1, 0, 1]));
        assert_eq!(c.rewrite("i").unwrap(), &RatPoly::z());
    }

    #[test]
    fn three_generators_and_opposite_roots() {
        let pos = Rect::from_ints(0, 2, -1, 1).unwrap();
        let neg = Rect::from_ints(-2, 0, -1, 1).unwrap();
        let pres = DomainPresentation::new(
            vec![],
            vec![
                ("r".into(), p(&[-2, 0, 1]), Some(pos)),
                ("s".into(), p(&[-2, 0, 1]), Some(neg)),
                ("w".into(), p(&[-3, 0, 1]), None),
            ],
        )
        .unwrap();
        let c = compose_all(&pres).unwrap();
        let m = &c.f_theta;
        let r = c.rewrite("r").unwrap();
        let s = c.rewrite("s").unwrap();
        // s = -r
        assert!((r + s).rem_monic(m).is_zero());
        assert_eq!(m.deg0(), 4);
    }
}
