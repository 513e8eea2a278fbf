//! Singularity of matrices with entries from a finite support.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{find_map, finish, image, run_trials, stats, trial_seed, HarnessConfig, HarnessReport, TrialRecord};
use crate::arith::modular::{mul_mod_u64, pow_mod_u64};
use crate::domain::{ConstraintSet, Domain, Element};
use crate::error::{Error, Result};

/// Largest `n` for full enumeration.
pub const EXHAUSTIVE_CAP: usize = 3;
/// Largest `n` for sampling.
pub const MONTE_CARLO_CAP: usize = 8;

/// Determinant of a row-major `n x n` matrix by expansion over column subsets.
pub fn det_laplace(domain: &Domain, m: &[Element], n: usize) -> Element {
    let mut dp: Vec<Option<Element>> = vec![None; 1 << n];
    dp[0] = Some(domain.int(1));
    for mask in 0usize..(1 << n) {
        let Some(acc) = dp[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == n {
            return acc;
        }
        for j in (0..n).filter(|j| mask & (1 << j) == 0) {
            let entry = &m[row * n + j];
            if domain.is_zero(entry) {
                continue;
            }
            let mut term = &acc * entry;
            if (mask >> (j + 1)).count_ones() % 2 == 1 {
                term = -&term;
            }
            let slot = &mut dp[mask | (1 << j)];
            *slot = Some(match slot.take() {
                Some(s) => &s + &term,
                None => term,
            });
        }
    }
    dp[(1 << n) - 1].take().unwrap_or_else(|| domain.int(0))
}

/// Fraction-free elimination over Z.
pub fn det_bareiss(m: &[BigInt], n: usize) -> BigInt {
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| !a[r * n + k].is_zero()) else {
            return BigInt::zero();
        };
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v.div_floor(&prev);
            }
        }
        prev = a[k * n + k].clone();
    }
    sign * &a[n * n - 1]
}

/// Determinant mod a prime `p < 2^63` by Gaussian elimination.
pub fn det_mod(m: &[u64], n: usize, p: u64) -> u64 {
    let mut a = m.to_vec();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| a[r * n + k] != 0) else {
            return 0;
        };
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            det = (p - det) % p;
        }
        let pk = a[k * n + k];
        det = mul_mod_u64(det, pk, p);
        let inv = pow_mod_u64(pk, p - 2, p);
        for i in k + 1..n {
            let f = mul_mod_u64(a[i * n + k], inv, p);
            if f == 0 {
                continue;
            }
            for j in k..n {
                a[i * n + j] = (a[i * n + j] + p - mul_mod_u64(f, a[k * n + j], p)) % p;
            }
        }
    }
    det
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    let z = 1.959_963_984_540_054_f64;
    let n = n as f64;
    let ph = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (ph + z * z / (2.0 * n)) / denom;
    let half = z / denom * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// First row all `t`, below it `s` on the diagonal and `t` elsewhere;
/// the determinant is `(s - t)^(n-1) t`.
fn bordered(s: usize, t: usize, n: usize) -> Vec<usize> {
    (0..n * n)
        .map(|k| {
            let (r, c) = (k / n, k % n);
            if r > 0 && r == c {
                s
            } else {
                t
            }
        })
        .collect()
}

fn check_support(domain: &Domain, support: &[Element]) -> Result<()> {
    let keys: HashSet<_> = support.iter().map(|e| domain.key(e)).collect();
    if keys.len() != support.len() {
        return Err(Error::invalid("matrix support has repeated entries"));
    }
    Ok(())
}

fn support_constraints(domain: &Domain, support: &[Element], l: &mut ConstraintSet) {
    for (i, s) in support.iter().enumerate() {
        for (j, t) in support.iter().enumerate().skip(i + 1) {
            l.push(domain, s - t, format!("s{i} - s{j}"));
        }
    }
}

fn images(m: &crate::reduce::ReductionMap, support: &[Element]) -> Result<Vec<u64>> {
    support.iter().map(|e| image(m, e)).collect()
}

/// Every `n x n` matrix over `support`: singularity must agree under the map,
/// and the map must be injective on the support.
pub fn evaluate_exhaustive(
    domain: &Domain,
    support: &[Element],
    n: usize,
    seed: u64,
    cfg: &HarnessConfig,
) -> Result<TrialRecord> {
    check_support(domain, support)?;
    let k = support.len();
    let cells = n * n;
    let total = k
        .checked_pow(cells as u32)
        .filter(|&t| n <= EXHAUSTIVE_CAP && t <= 1 << 20)
        .ok_or_else(|| Error::invalid(format!("{k}^{cells} matrices is too many to enumerate")))?;
    let index = |mut code: usize| -> Vec<usize> {
        (0..cells)
            .map(|_| {
                let d = code % k;
                code /= k;
                d
            })
            .collect()
    };
    let entries = |idx: &[usize]| idx.iter().map(|&i| support[i].clone()).collect::<Vec<_>>();
    let dets: Vec<Element> = (0..total)
        .map(|c| det_laplace(domain, &entries(&index(c)), n))
        .collect();
    if dets.len() != total {
        return Err(Error::Internal("enumeration count mismatch".into()));
    }
    let singular: Vec<bool> = dets.iter().map(|d| domain.is_zero(d)).collect();

    let mut l = ConstraintSet::new();
    support_constraints(domain, support, &mut l);
    for (c, d) in dets.iter().enumerate() {
        if !singular[c] {
            l.push(domain, d.clone(), format!("det M{c}"));
        }
    }
    let mut notes = Vec::new();
    let mut pairs = Vec::new();
    for s in 0..k {
        for t in (0..k).filter(|&t| t != s && !domain.is_zero(&support[t])) {
            let d = det_laplace(domain, &entries(&bordered(s, t, n)), n);
            let want = &(&support[s] - &support[t]).pow(n as u64 - 1) * &support[t];
            if !domain.equal(&d, &want) {
                return Err(Error::Internal(format!(
                    "bordered determinant identity fails for s{s}, t{t}"
                )));
            }
            pairs.push((s, t));
        }
    }
    notes.push(format!(
        "bordered determinant identity checked on {} ordered pairs",
        pairs.len()
    ));
    let source = stats([
        ("matrices", total),
        ("singular", singular.iter().filter(|&&b| b).count()),
        ("agree", total),
        ("support", k),
        ("bordered_nonzero", pairs.len()),
    ]);
    let found = find_map(domain, &l, seed, cfg)?;
    finish(seed, &l, source, found, notes, |m| {
        let p = m.p_u64().expect("u64 prime");
        let v = images(m, support)?;
        let mut seen = 0;
        let mut sing = 0;
        let mut agree = 0;
        for (c, &src) in singular.iter().enumerate() {
            let img: Vec<u64> = index(c).iter().map(|&i| v[i]).collect();
            let z = det_mod(&img, n, p) == 0;
            seen += 1;
            sing += z as usize;
            agree += (z == src) as usize;
        }
        let bordered_nonzero = pairs
            .iter()
            .filter(|&&(s, t)| {
                let img: Vec<u64> = bordered(s, t, n).iter().map(|&i| v[i]).collect();
                det_mod(&img, n, p) != 0
            })
            .count();
        let distinct: BTreeSet<u64> = v.iter().copied().collect();
        Ok((
            stats([
                ("matrices", seen),
                ("singular", sing),
                ("agree", agree),
                ("support", distinct.len()),
                ("bordered_nonzero", bordered_nonzero),
            ]),
            true,
        ))
    })
}

/// `samples` uniform matrices over `support`, classified exactly and mod p.
pub fn evaluate_samples(
    domain: &Domain,
    support: &[Element],
    n: usize,
    samples: usize,
    seed: u64,
    cfg: &HarnessConfig,
) -> Result<TrialRecord> {
    check_support(domain, support)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<usize>> = (0..samples)
        .map(|_| (0..n * n).map(|_| rng.gen_range(0..support.len())).collect())
        .collect();
    let ints: Option<Vec<BigInt>> = support
        .iter()
        .map(|e| e.as_constant().filter(|c| c.is_integer()).map(|c| c.to_integer()))
        .collect();
    let dets: Vec<Element> = match &ints {
        Some(zs) => draws
            .iter()
            .map(|d| {
                let m: Vec<BigInt> = d.iter().map(|&i| zs[i].clone()).collect();
                Element::from_bigint(domain.presentation(), det_bareiss(&m, n))
            })
            .collect(),
        None => draws
            .iter()
            .map(|d| {
                let m: Vec<Element> = d.iter().map(|&i| support[i].clone()).collect();
                det_laplace(domain, &m, n)
            })
            .collect(),
    };
    let singular: Vec<bool> = dets.iter().map(|d| domain.is_zero(d)).collect();
    let mut l = ConstraintSet::new();
    support_constraints(domain, support, &mut l);
    for (c, d) in dets.iter().enumerate() {
        if !singular[c] {
            l.push(domain, d.clone(), format!("det M{c}"));
        }
    }
    let n_sing = singular.iter().filter(|&&b| b).count();
    let (lo, hi) = wilson_interval(n_sing as u64, samples as u64);
    let notes = vec![format!(
        "singular fraction {n_sing}/{samples} = {:.4}, 95% CI [{lo:.4}, {hi:.4}]",
        n_sing as f64 / samples as f64
    )];
    let source = stats([("samples", samples), ("singular", n_sing), ("agree", samples)]);
    let found = find_map(domain, &l, seed, cfg)?;
    finish(seed, &l, source, found, notes, |m| {
        let p = m.p_u64().expect("u64 prime");
        let v = images(m, support)?;
        let mut sing = 0;
        let mut agree = 0;
        for (d, &src) in draws.iter().zip(&singular) {
            let img: Vec<u64> = d.iter().map(|&i| v[i]).collect();
            let z = det_mod(&img, n, p) == 0;
            sing += z as usize;
            agree += (z == src) as usize;
        }
        Ok((
            stats([("samples", draws.len()), ("singular", sing), ("agree", agree)]),
            true,
        ))
    })
}

pub fn parse_support(domain: &Domain, items: &[String]) -> Result<Vec<Element>> {
    items.iter().map(|s| domain.parse(s.trim())).collect()
}

pub fn run(cfg: &HarnessConfig) -> Result<HarnessReport> {
    let n = cfg.size;
    let bounds = vec![format!(
        "primes used are far below 2^(n^n) = 2^{}; only per-matrix preservation is tested",
        (n as u64)
            .checked_pow(n as u32)
            .map_or("overflow".to_string(), |v| v.to_string())
    )];
    let trials = if cfg.exhaustive {
        let domain = cfg.domain.domain();
        let support = parse_support(&domain, &cfg.support)?;
        vec![evaluate_exhaustive(&domain, &support, n, trial_seed(cfg.seed, 0), cfg)?]
    } else {
        run_trials(cfg, |domain, seed| {
            let support = parse_support(domain, &cfg.support)?;
            evaluate_samples(domain, &support, n, cfg.samples, seed, cfg)
        })?
    };
    let mut report = HarnessReport::new(cfg.clone(), trials, bounds);
    for t in &report.trials {
        if t.source.contains_key("samples") && !t.notes.is_empty() {
            report.bounds.push(format!("trial {}: {}", t.index, t.notes[0]));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::{Application, DomainChoice, Verdict};
    use super::*;

    fn cfg(n: usize) -> HarnessConfig {
        let mut c = HarnessConfig::new(Application::Matrix);
        c.size = n;
        c
    }

    #[test]
    fn determinant_routines_agree() {
        let d = DomainChoice::Gaussian.domain();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=4 {
            for _ in 0..20 {
                let zs: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-3..=3)).collect();
                let big: Vec<BigInt> = zs.iter().map(|&z| BigInt::from(z)).collect();
                let els: Vec<Element> = zs.iter().map(|&z| d.int(z)).collect();
                let exact = det_bareiss(&big, n);
                assert_eq!(
                    det_laplace(&d, &els, n),
                    Element::from_bigint(d.presentation(), exact.clone())
                );
                let p = 1_000_003u64;
                let md: Vec<u64> = zs.iter().map(|&z| z.rem_euclid(p as i64) as u64).collect();
                let want = exact.mod_floor(&BigInt::from(p));
                assert_eq!(BigInt::from(det_mod(&md, n, p)), want);
            }
        }
        assert!(det_bareiss(&vec![BigInt::zero(); 9], 3).is_zero());
    }

    #[test]
    fn two_by_two_sign_matrices() {
        let d = DomainChoice::Gaussian.domain();
        let s = parse_support(&d, &["1".into(), "-1".into()]).unwrap();
        let r = evaluate_exhaustive(&d, &s, 2, 1, &cfg(2)).unwrap();
        assert_eq!(r.source["matrices"], 16);
        assert_eq!(r.source["singular"], 8);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn bordered_example_is_nonsingular() {
        let d = DomainChoice::Gaussian.domain();
        let s = parse_support(&d, &["2".into(), "1".into()]).unwrap();
        let m: Vec<Element> = bordered(0, 1, 3).iter().map(|&i| s[i].clone()).collect();
        assert_eq!(det_laplace(&d, &m, 3), d.int(1));
        let zero = vec![d.int(0); 9];
        assert!(d.is_zero(&det_laplace(&d, &zero, 3)));
    }

    #[test]
    fn sampled_classification_agrees() {
        let d = DomainChoice::Gaussian.domain();
        let s = parse_support(&d, &["1".into(), "-1".into()]).unwrap();
        let r = evaluate_samples(&d, &s, 4, 500, 2, &cfg(4)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
    }
}
