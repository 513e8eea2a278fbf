//! Homomorphisms `Z[S] -> Z/p` that keep every constraint non-zero.

mod density;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::rat_poly::reduce_mod;
use crate::arith::{is_fully_split, is_probable_prime, roots_mod_p, IntPoly, ModPoly, MultiPoly, PrimeRange};
use crate::domain::{ConstraintSet, Domain, Element};
use crate::error::{Error, Result};
use crate::specialize::SpecializationResult;

pub use density::{density_scan, parse_predictions, DensityReport};

/// Random element pairs checked against the homomorphism laws per map.
pub const HOM_SPOT_CHECKS: usize = 32;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Requires `f_theta * L1` to split into distinct linear factors mod p.
    #[default]
    Strict,
    /// Accepts any root of `f_theta` at which the constraint product survives.
    Relaxed,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Mode::Strict),
            "relaxed" => Ok(Mode::Relaxed),
            _ => Err(Error::invalid(format!(
                "unknown mode {s:?} (expected strict or relaxed)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Relaxed => "relaxed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSearchConfig {
    pub p_min: u64,
    pub p_max: u64,
    pub mode: Mode,
    pub max_maps: usize,
    pub excluded: BTreeSet<BigUint>,
}

impl PrimeSearchConfig {
    pub fn new(p_min: u64, p_max: u64, mode: Mode, max_maps: usize) -> Result<Self> {
        if p_min < 2 || p_min > p_max {
            return Err(Error::invalid(format!(
                "prime range {p_min}:{p_max} is empty or starts below 2"
            )));
        }
        Ok(PrimeSearchConfig {
            p_min,
            p_max,
            mode,
            max_maps,
            excluded: BTreeSet::new(),
        })
    }
}

/// Parses the inclusive range syntax `lo:hi`.
pub fn parse_prime_range(s: &str) -> Result<(u64, u64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("prime range {s:?} must look like lo:hi")))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<u64>()
            .map_err(|_| Error::invalid(format!("bad prime range bound {x:?}")))
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo < 2 || lo > hi {
        return Err(Error::invalid(format!("prime range {s:?} is empty or starts below 2")));
    }
    Ok((lo, hi))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationRecord {
    pub passed: bool,
    pub failure: Option<String>,
    #[serde(with = "crate::serde_util::biguint_num")]
    pub f_theta_at_a: BigUint,
    /// `f_alpha(image(alpha)) mod p` per algebraic generator.
    #[serde(with = "crate::serde_util::biguint_map")]
    pub relations: BTreeMap<String, BigUint>,
    /// Image of each constraint, in constraint order.
    #[serde(with = "crate::serde_util::biguint_seq")]
    pub constraint_images: Vec<BigUint>,
    pub hom_checks: usize,
}

/// A concrete homomorphism: `theta -> a` in `Z/p`, transcendentals to
/// their specialized integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionMap {
    #[serde(with = "crate::serde_util::biguint_num")]
    pub p: BigUint,
    #[serde(with = "crate::serde_util::biguint_num")]
    pub a: BigUint,
    #[serde(with = "crate::serde_util::biguint_map")]
    pub images: BTreeMap<String, BigUint>,
    pub mode: Mode,
    pub verified: bool,
    pub verification: VerificationRecord,
}

impl ReductionMap {
    /// Builds the map determined by `(p, a)` without verifying it; `None`
    /// when a rewrite denominator is not invertible mod `p`.
    pub fn new(
        domain: &Domain,
        assignment: &BTreeMap<String, BigInt>,
        p: BigUint,
        a: BigUint,
        mode: Mode,
    ) -> Option<Self> {
        let mut images = BTreeMap::new();
        for name in domain.presentation().transcendentals() {
            let v = assignment.get(name)?;
            images.insert(name.clone(), reduce_mod(v, &p));
        }
        for g in &domain.composition().generators {
            images.insert(g.name.clone(), g.rewrite.eval_mod(&a, &p)?);
        }
        Some(ReductionMap {
            p,
            a,
            images,
            mode,
            verified: false,
            verification: VerificationRecord::default(),
        })
    }

    pub fn p_u64(&self) -> Option<u64> {
        self.p.to_u64()
    }

    /// Images in the presentation's variable order.
    fn image_vec(&self, vars: &[String]) -> Option<Vec<BigUint>> {
        vars.iter().map(|v| self.images.get(v).cloned()).collect()
    }
}

/// Image of `e` under the map, by direct substitution of generator images.
pub fn apply_map(m: &ReductionMap, e: &Element) -> Result<BigUint> {
    let vars = e.presentation().vars();
    let imgs = m
        .image_vec(vars)
        .ok_or_else(|| Error::invalid("map does not cover every generator of the element"))?;
    e.poly()
        .eval_mod(&imgs, &m.p)
        .ok_or_else(|| Error::Internal(format!("coefficient denominator not invertible mod {}", m.p)))
}

fn random_element(domain: &Domain, rng: &mut ChaCha8Rng) -> Element {
    let pres = domain.presentation();
    let vars = pres.vars().clone();
    let j = pres.num_transcendentals();
    let caps: Vec<u32> = (0..vars.len())
        .map(|i| {
            if i < j {
                2
            } else {
                pres.algebraics()[i - j].degree() as u32 - 1
            }
        })
        .collect();
    let terms = (0..3).map(|_| {
        let e: Vec<u32> = caps.iter().map(|&c| rng.gen_range(0..=c)).collect();
        let c = num_rational::BigRational::from_integer(BigInt::from(rng.gen_range(-20i64..=20)));
        (e, c)
    });
    Element::from_poly(pres, MultiPoly::from_terms(vars, terms.collect::<Vec<_>>())).expect("same variables")
}

/// Checks `phi(x op y) = phi(x) op phi(y)` on `count` random pairs.
pub fn hom_law_check(m: &ReductionMap, domain: &Domain, count: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = &m.p;
    for _ in 0..count {
        let x = random_element(domain, &mut rng);
        let y = random_element(domain, &mut rng);
        let (fx, fy) = (apply_map(m, &x)?, apply_map(m, &y)?);
        if apply_map(m, &(&x * &y))? != (&fx * &fy) % p {
            return Err(Error::Internal(format!("multiplicativity fails on ({x}) * ({y})")));
        }
        if apply_map(m, &(&x + &y))? != (&fx + &fy) % p {
            return Err(Error::Internal(format!("additivity fails on ({x}) + ({y})")));
        }
    }
    Ok(())
}

/// Recomputes every defining property of `m` from scratch.
pub fn verify_map(
    m: &ReductionMap,
    domain: &Domain,
    constraints: &ConstraintSet,
    assignment: &BTreeMap<String, BigInt>,
) -> VerificationRecord {
    let mut rec = VerificationRecord::default();
    let fail = |mut rec: VerificationRecord, why: String| {
        rec.passed = false;
        rec.failure = Some(why);
        rec
    };
    let p = &m.p;
    if !is_probable_prime(p) {
        return fail(rec, format!("{p} is not prime"));
    }
    if m.a >= *p {
        return fail(rec, format!("a = {} is not reduced mod {p}", m.a));
    }
    let comp = domain.composition();
    if comp.excluded_primes.contains(p) {
        return fail(rec, format!("{p} divides a rewrite denominator"));
    }
    if reduce_mod(comp.f_theta.leading().expect("non-zero"), p).is_zero() {
        return fail(rec, format!("{p} divides the leading coefficient of f_theta"));
    }
    rec.f_theta_at_a = ModPoly::from_int_poly(&comp.f_theta, p).eval(&m.a);
    if !rec.f_theta_at_a.is_zero() {
        let v = rec.f_theta_at_a.clone();
        return fail(rec, format!("f_theta({}) = {v} is non-zero mod {p}", m.a));
    }
    let pres = domain.presentation();
    for name in pres.transcendentals() {
        let want = assignment.get(name).map(|v| reduce_mod(v, p));
        if want.as_ref() != m.images.get(name) {
            return fail(rec, format!("image of {name} disagrees with the specialization"));
        }
    }
    for (g, alg) in comp.generators.iter().zip(pres.algebraics()) {
        let Some(img) = g.rewrite.eval_mod(&m.a, p) else {
            return fail(
                rec,
                format!("denominator of the rewrite of {} is not invertible mod {p}", g.name),
            );
        };
        if m.images.get(&g.name) != Some(&img) {
            return fail(rec, format!("image of {} disagrees with its rewrite at a", g.name));
        }
        let r = ModPoly::from_int_poly(&alg.minpoly, p).eval(&img);
        let bad = !r.is_zero();
        rec.relations.insert(g.name.clone(), r);
        if bad {
            return fail(
                rec,
                format!("minimal polynomial of {} does not vanish at its image", g.name),
            );
        }
    }
    for item in constraints.items() {
        match apply_map(m, &item.element) {
            Ok(v) if v.is_zero() => {
                rec.constraint_images.push(v);
                return fail(rec, format!("constraint {} maps to 0", item.label));
            }
            Ok(v) => rec.constraint_images.push(v),
            Err(e) => return fail(rec, e.to_string()),
        }
    }
    let seed = m.p.to_u64_digits().first().copied().unwrap_or(0)
        ^ m.a.to_u64_digits().first().copied().unwrap_or(0).rotate_left(32);
    if let Err(e) = hom_law_check(m, domain, HOM_SPOT_CHECKS, seed) {
        return fail(rec, e.to_string());
    }
    rec.hom_checks = HOM_SPOT_CHECKS;
    rec.passed = true;
    rec
}

/// Prepared data for scanning primes.
struct Search<'a> {
    domain: &'a Domain,
    constraints: &'a ConstraintSet,
    spec: &'a SpecializationResult,
    cfg: &'a PrimeSearchConfig,
    /// `f_theta * L1` for the strict test.
    split_target: IntPoly,
}

impl Search<'_> {
    /// Roots of `f_theta` mod `p` at which the product survives, when `p`
    /// passes the mode's splitting test.
    fn candidates(&self, p: u64) -> Vec<BigUint> {
        let bp = BigUint::from(p);
        let comp = self.domain.composition();
        if self.cfg.excluded.contains(&bp) || comp.excluded_primes.contains(&bp) {
            return Vec::new();
        }
        if self.cfg.mode == Mode::Strict && !is_fully_split(&self.split_target, &bp) {
            return Vec::new();
        }
        let f = ModPoly::from_int_poly(&comp.f_theta, &bp);
        if f.is_zero() {
            return Vec::new();
        }
        let roots = roots_mod_p(&f).unwrap_or_default();
        roots
            .into_iter()
            .filter(|a| matches!(self.spec.product.eval_mod(a, &bp), Some(v) if !v.is_zero()))
            .collect()
    }

    /// The map at the smallest root that verifies.
    fn first_verified(&self, p: u64, roots: &[BigUint]) -> Option<ReductionMap> {
        let bp = BigUint::from(p);
        roots.iter().find_map(|a| {
            let mut m = ReductionMap::new(self.domain, &self.spec.assignment, bp.clone(), a.clone(), self.cfg.mode)?;
            let rec = verify_map(&m, self.domain, self.constraints, &self.spec.assignment);
            rec.passed.then(|| {
                m.verified = true;
                m.verification = rec;
                m
            })
        })
    }
}

/// Primes screened per parallel batch.
const BATCH: usize = 64;

/// Scans primes in ascending order and returns up to `max_maps` verified
/// maps, at most one per prime (the smallest verified root).
pub fn find_maps(
    domain: &Domain,
    constraints: &ConstraintSet,
    spec: &SpecializationResult,
    cfg: &PrimeSearchConfig,
) -> Result<Vec<ReductionMap>> {
    let f = &domain.composition().f_theta;
    let cleared = spec.product.numerator();
    if cleared.is_zero() {
        return Err(Error::NotADomain("constraint product is zero".into()));
    }
    let split_target = match cfg.mode {
        Mode::Strict => f * &cleared.squarefree_part()?,
        Mode::Relaxed => f.clone(),
    };
    let search = Search {
        domain,
        constraints,
        spec,
        cfg,
        split_target,
    };
    let mut out = Vec::new();
    let mut primes = PrimeRange::new(cfg.p_min, cfg.p_max);
    let chunk = rayon::current_num_threads().max(1);
    while out.len() < cfg.max_maps {
        let batch: Vec<u64> = primes.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            break;
        }
        let screened: Vec<(u64, Vec<BigUint>)> = batch
            .par_iter()
            .map(|&p| (p, search.candidates(p)))
            .filter(|(_, r)| !r.is_empty())
            .collect();
        // verify lazily: only as many primes as could still be needed
        for group in screened.chunks(chunk) {
            if out.len() >= cfg.max_maps {
                break;
            }
            let maps: Vec<Option<ReductionMap>> = group
                .par_iter()
                .map(|(p, roots)| search.first_verified(*p, roots))
                .collect();
            out.extend(maps.into_iter().flatten());
        }
    }
    out.truncate(cfg.max_maps);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::IntPoly;
    use crate::domain::{ConstraintKind, DomainPresentation};
    use crate::specialize::{specialize, SpecializeBudget};

    fn setup(algs: &[(&str, &[i64])], ls: &[&str]) -> (Domain, ConstraintSet, SpecializationResult) {
        let p = DomainPresentation::new(
            vec![],
            algs.iter()
                .map(|(n, c)| (n.to_string(), IntPoly::from_i64s(c), None))
                .collect(),
        )
        .unwrap();
        let d = Domain::new(p).unwrap();
        let named: Vec<_> = ls.iter().map(|s| (s.to_string(), d.parse(s).unwrap())).collect();
        let l = ConstraintSet::build(&d, ConstraintKind::Custom, &named);
        let s = specialize(&d, &l, 0, SpecializeBudget::default()).unwrap();
        (d, l, s)
    }

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn sqrt2_first_map_is_p7() {
        let (d, l, s) = setup(&[("r2", &[-2, 0, 1])], &["r2 - 1"]);
        let cfg = PrimeSearchConfig::new(2, 50, Mode::Strict, 1).unwrap();
        let maps = find_maps(&d, &l, &s, &cfg).unwrap();
        assert_eq!(maps[0].p, b(7));
        assert_eq!(maps[0].a, b(3));
        assert_eq!(maps[0].images["r2"], b(3));
        assert_eq!(apply_map(&maps[0], &d.parse("1 + r2").unwrap()).unwrap(), b(4));
        assert_eq!(apply_map(&maps[0], &d.parse("10").unwrap()).unwrap(), b(3));
        // corrupted map
        let bad = ReductionMap::new(&d, &s.assignment, b(7), b(2), Mode::Strict).unwrap();
        let rec = verify_map(&bad, &d, &l, &s.assignment);
        assert!(!rec.passed);
        assert_eq!(rec.f_theta_at_a, b(2));
    }

    #[test]
    fn gaussian_primes_are_1_mod_4() {
        let (d, l, s) = setup(&[("i", &[1, 0, 1])], &["i"]);
        let cfg = PrimeSearchConfig::new(2, 100, Mode::Strict, usize::MAX).unwrap();
        let ps: Vec<u64> = find_maps(&d, &l, &s, &cfg)
            .unwrap()
            .iter()
            .map(|m| m.p_u64().unwrap())
            .collect();
        assert_eq!(ps, vec![5, 13, 17, 29, 37, 41, 53, 61, 73, 89, 97]);
        let m5 = ReductionMap::new(&d, &s.assignment, b(5), b(2), Mode::Strict).unwrap();
        assert_eq!(apply_map(&m5, &d.parse("i^2").unwrap()).unwrap(), b(4));
    }

    #[test]
    fn vanishing_constraint_skips_prime() {
        for mode in [Mode::Strict, Mode::Relaxed] {
            let (d, l, s) = setup(&[("r2", &[-2, 0, 1])], &["(3 - r2)*(3 + r2)"]);
            let cfg = PrimeSearchConfig::new(7, 50, mode, 1).unwrap();
            let maps = find_maps(&d, &l, &s, &cfg).unwrap();
            assert!(maps[0].p > b(7), "{mode}");
        }
    }

    #[test]
    fn composed_maps_verify() {
        let (d, l, s) = setup(&[("r2", &[-2, 0, 1]), ("i", &[1, 0, 1])], &["r2 - i"]);
        let cfg = PrimeSearchConfig::new(2, 500, Mode::Strict, 3).unwrap();
        let maps = find_maps(&d, &l, &s, &cfg).unwrap();
        assert_eq!(maps.len(), 3);
        for m in &maps {
            assert!(m.p > b(3));
            assert!(verify_map(m, &d, &l, &s.assignment).passed);
        }
    }
}
