//! Triple products and commutators of 2x2 matrices with determinant 1.

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{find_map, finish, image, run_trials, stats, HarnessConfig, HarnessReport, TrialRecord};
use crate::arith::modular::mul_mod_u64;
use crate::domain::{CanonicalKey, ConstraintSet, Domain, Element};
use crate::error::{Error, Result};

/// Row-major `[[a, b], [c, d]]`.
pub type Mat = [Element; 4];
type ModMat = [u64; 4];

pub fn mat_mul(x: &Mat, y: &Mat) -> Mat {
    [
        &(&x[0] * &y[0]) + &(&x[1] * &y[2]),
        &(&x[0] * &y[1]) + &(&x[1] * &y[3]),
        &(&x[2] * &y[0]) + &(&x[3] * &y[2]),
        &(&x[2] * &y[1]) + &(&x[3] * &y[3]),
    ]
}

pub fn det(x: &Mat) -> Element {
    &(&x[0] * &x[3]) - &(&x[1] * &x[2])
}

/// Inverse of a determinant-1 matrix.
fn inverse(x: &Mat) -> Mat {
    [x[3].clone(), -&x[1], -&x[2], x[0].clone()]
}

/// `[[1, b], [0, 1]]`
pub fn upper(domain: &Domain, b: Element) -> Mat {
    [domain.int(1), b, domain.int(0), domain.int(1)]
}

/// `[[1, 0], [c, 1]]`
pub fn lower(domain: &Domain, c: Element) -> Mat {
    [domain.int(1), domain.int(0), c, domain.int(1)]
}

fn key(domain: &Domain, m: &Mat) -> Vec<CanonicalKey> {
    m.iter().map(|e| domain.key(e)).collect()
}

fn mm(x: &ModMat, y: &ModMat, p: u64) -> ModMat {
    let f = |a, b, c, d| (mul_mod_u64(a, b, p) + mul_mod_u64(c, d, p)) % p;
    [
        f(x[0], y[0], x[1], y[2]),
        f(x[0], y[1], x[1], y[3]),
        f(x[2], y[0], x[3], y[2]),
        f(x[2], y[1], x[3], y[3]),
    ]
}

fn mdet(x: &ModMat, p: u64) -> u64 {
    (mul_mod_u64(x[0], x[3], p) + p - mul_mod_u64(x[1], x[2], p)) % p
}

fn minv(x: &ModMat, p: u64) -> ModMat {
    [x[3], (p - x[1]) % p, (p - x[2]) % p, x[0]]
}

/// Deduplicated `A`, `AA`, `AAA` and their union, in first-seen order.
fn products<T: Clone, K: Eq + std::hash::Hash>(
    a: &[T],
    mul: impl Fn(&T, &T) -> T,
    key: impl Fn(&T) -> K,
) -> [Vec<T>; 4] {
    let dedup = |xs: Vec<T>| {
        let mut seen = HashSet::new();
        xs.into_iter().filter(|x| seen.insert(key(x))).collect::<Vec<_>>()
    };
    let a1 = dedup(a.to_vec());
    let a2 = dedup(a1.iter().flat_map(|x| a1.iter().map(|y| mul(x, y))).collect());
    let a3 = dedup(a2.iter().flat_map(|x| a1.iter().map(|y| mul(x, y))).collect());
    let all = dedup(a1.iter().chain(&a2).chain(&a3).cloned().collect());
    [a1, a2, a3, all]
}

pub fn evaluate_on_instance(domain: &Domain, a: &[Mat], seed: u64, cfg: &HarnessConfig) -> Result<TrialRecord> {
    let one = domain.int(1);
    if let Some(bad) = a.iter().find(|m| !domain.equal(&det(m), &one)) {
        return Err(Error::invalid(format!(
            "matrix [{}, {}; {}, {}] does not have determinant 1",
            bad[0], bad[1], bad[2], bad[3]
        )));
    }
    let [a1, a2, a3, all] = products(a, mat_mul, |m| key(domain, m));
    let det_one = all.iter().filter(|m| domain.equal(&det(m), &one)).count();

    let mut l = ConstraintSet::new();
    for (i, x) in all.iter().enumerate() {
        for (j, y) in all.iter().enumerate().skip(i + 1) {
            if let Some(k) = (0..4).find(|&k| !domain.equal(&x[k], &y[k])) {
                l.push(domain, &x[k] - &y[k], format!("M{i}[{k}] - M{j}[{k}]"));
            }
        }
    }
    let identity = upper(domain, domain.int(0));
    let mut pairs = Vec::new();
    for i in 0..a1.len() {
        for j in i + 1..a1.len() {
            let (x, y) = (&a1[i], &a1[j]);
            let k = mat_mul(&mat_mul(x, y), &mat_mul(&inverse(x), &inverse(y)));
            if (0..4).any(|e| !domain.equal(&k[e], &identity[e])) {
                pairs.push((i, j));
                for e in 0..4 {
                    l.push(domain, &k[e] - &identity[e], format!("[A{i}, A{j}][{e}] - I[{e}]"));
                }
            }
        }
    }
    let mut notes = Vec::new();
    if pairs.is_empty() {
        notes.push("no non-commuting pair in A; commutator check skipped".to_string());
    }
    let source = stats([
        ("A", a1.len()),
        ("AA", a2.len()),
        ("AAA", a3.len()),
        ("det_one", det_one),
        ("noncommuting_pairs", pairs.len()),
    ]);
    let found = find_map(domain, &l, seed, cfg)?;
    finish(seed, &l, source, found, notes, |m| {
        let p = m.p_u64().expect("u64 prime");
        let img: Vec<ModMat> = a1
            .iter()
            .map(|x| {
                let v: Vec<u64> = x.iter().map(|e| image(m, e)).collect::<Result<_>>()?;
                Ok([v[0], v[1], v[2], v[3]])
            })
            .collect::<Result<_>>()?;
        let [b1, b2, b3, ball] = products(&img, |x, y| mm(x, y, p), |x| *x);
        let dets = ball.iter().filter(|x| mdet(x, p) == 1 % p).count();
        let noncomm = pairs
            .iter()
            .filter(|&&(i, j)| {
                let (x, y) = (&img[i], &img[j]);
                mm(&mm(x, y, p), &mm(&minv(x, p), &minv(y, p), p), p) != [1, 0, 0, 1]
            })
            .count();
        let distinct_images: BTreeSet<ModMat> = img.iter().copied().collect();
        Ok((
            stats([
                ("A", distinct_images.len()),
                ("AA", b2.len()),
                ("AAA", b3.len()),
                ("det_one", dets),
                ("noncommuting_pairs", noncomm),
            ]),
            b1.len() == distinct_images.len(),
        ))
    })
}

/// Product of `len` random letters from `U(1)`, `L(1)`, `U(g)`, `L(g)`.
pub fn random_word(domain: &Domain, gen: &Element, rng: &mut ChaCha8Rng, len: usize) -> Mat {
    let letters = [
        upper(domain, domain.int(1)),
        lower(domain, domain.int(1)),
        upper(domain, gen.clone()),
        lower(domain, gen.clone()),
    ];
    (0..len).fold(upper(domain, domain.int(0)), |acc, _| {
        mat_mul(&acc, &letters[rng.gen_range(0..letters.len())])
    })
}

pub fn sample_instance(domain: &Domain, gen: &Element, rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Mat>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for _ in 0..n * 100 {
        if out.len() == n {
            return Ok(out);
        }
        let len = rng.gen_range(1..=3);
        let m = random_word(domain, gen, rng, len);
        if seen.insert(key(domain, &m)) {
            out.push(m);
        }
    }
    if out.len() == n {
        return Ok(out);
    }
    Err(Error::invalid(format!("could not sample {n} distinct matrices")))
}

pub fn run(cfg: &HarnessConfig) -> Result<HarnessReport> {
    let trials = run_trials(cfg, |domain, seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = domain.var(cfg.domain.generator())?;
        let a = sample_instance(domain, &g, &mut rng, cfg.size)?;
        evaluate_on_instance(domain, &a, seed, cfg)
    })?;
    Ok(HarnessReport::new(cfg.clone(), trials, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::super::{Application, DomainChoice, Verdict};
    use super::*;

    fn cfg(n: usize) -> HarnessConfig {
        let mut c = HarnessConfig::new(Application::Sl2);
        c.size = n;
        c
    }

    #[test]
    fn abelian_family_has_binomial_aa() {
        let d = DomainChoice::Gaussian.domain();
        let a = vec![upper(&d, d.int(2)), upper(&d, d.int(4))];
        let r = evaluate_on_instance(&d, &a, 0, &cfg(2)).unwrap();
        assert_eq!(r.source["AA"], 3);
        assert_eq!(r.source["noncommuting_pairs"], 0);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = evaluate_on_instance(&d, &[upper(&d, d.int(0))], 0, &cfg(1)).unwrap();
        assert_eq!(r.source["AAA"], 1);
    }

    #[test]
    fn free_pair_triples() {
        let d = DomainChoice::Gaussian.domain();
        let a = vec![upper(&d, d.int(1)), lower(&d, d.int(1))];
        let r = evaluate_on_instance(&d, &a, 0, &cfg(2)).unwrap();
        // the two generators span a free monoid: all 8 ordered triples differ
        assert_eq!(r.source["AAA"], 8);
        assert_eq!(r.source["noncommuting_pairs"], 1);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn rejects_non_sl2() {
        let d = DomainChoice::Gaussian.domain();
        let m = [d.int(2), d.int(0), d.int(0), d.int(1)];
        assert!(evaluate_on_instance(&d, &[m], 0, &cfg(1)).is_err());
    }

    #[test]
    fn seeded_trials_pass() {
        let mut c = cfg(3);
        c.seed = 7;
        c.trials = 5;
        let r = run(&c).unwrap();
        assert_eq!(r.failed, 0);
        assert!(r.passed > 0);
    }
}
