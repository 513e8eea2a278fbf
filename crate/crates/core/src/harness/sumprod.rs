//! Cardinalities of `A`, `A + A` and `AA`.

use std::collections::{BTreeSet, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    find_map, finish, image, run_trials, sample_element, stats, HarnessConfig, HarnessReport, TrialRecord, SAMPLE_BOUND,
};
use crate::domain::{ConstraintKind, ConstraintSet, Domain, Element};
use crate::error::{Error, Result};

/// Samples `n` distinct elements.
pub(crate) fn sample_distinct(domain: &Domain, rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Element>> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n * 100 {
        if out.len() == n {
            break;
        }
        let e = sample_element(domain, rng, SAMPLE_BOUND);
        if seen.insert(domain.key(&e)) {
            out.push(e);
        }
    }
    if out.len() < n {
        return Err(Error::invalid(format!("could not sample {n} distinct elements")));
    }
    Ok(out)
}

pub fn evaluate_on_instance(domain: &Domain, a: &[Element], seed: u64, cfg: &HarnessConfig) -> Result<TrialRecord> {
    let card = |it: &mut dyn Iterator<Item = Element>| it.map(|e| domain.key(&e)).collect::<HashSet<_>>().len();
    let n_a = card(&mut a.iter().cloned());
    let n_sum = card(&mut a.iter().flat_map(|x| a.iter().map(move |y| x + y)));
    let n_prod = card(&mut a.iter().flat_map(|x| a.iter().map(move |y| x * y)));
    let source = stats([("A", n_a), ("A+A", n_sum), ("AA", n_prod)]);

    let named: Vec<(String, Element)> = a
        .iter()
        .enumerate()
        .map(|(k, e)| (format!("a{k}"), e.clone()))
        .collect();
    let mut l = ConstraintSet::new();
    for kind in [
        ConstraintKind::PairwiseDifferences,
        ConstraintKind::SumDifferences,
        ConstraintKind::ProductDifferences,
    ] {
        l.extend_kind(domain, kind, &named);
    }
    let trivial = n_sum.max(n_prod) >= n_a;
    let notes = vec![format!(
        "max(|A+A|, |AA|) = {} >= |A| = {n_a}; |A|^(14/13) = {:.3}",
        n_sum.max(n_prod),
        (n_a as f64).powf(14.0 / 13.0)
    )];
    let found = find_map(domain, &l, seed, cfg)?;
    finish(seed, &l, source, found, notes, |m| {
        let p = m.p_u64().expect("u64 prime") as u128;
        let v: Vec<u128> = a.iter().map(|e| image(m, e).map(u128::from)).collect::<Result<_>>()?;
        let sums: BTreeSet<u128> = v.iter().flat_map(|x| v.iter().map(move |y| (x + y) % p)).collect();
        let prods: BTreeSet<u128> = v.iter().flat_map(|x| v.iter().map(move |y| x * y % p)).collect();
        let distinct: BTreeSet<u128> = v.iter().copied().collect();
        Ok((
            stats([("A", distinct.len()), ("A+A", sums.len()), ("AA", prods.len())]),
            trivial,
        ))
    })
}

pub fn run(cfg: &HarnessConfig) -> Result<HarnessReport> {
    let trials = run_trials(cfg, |domain, seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample_distinct(domain, &mut rng, cfg.size)?;
        evaluate_on_instance(domain, &a, seed, cfg)
    })?;
    Ok(HarnessReport::new(cfg.clone(), trials, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::super::{Application, DomainChoice, Verdict};
    use super::*;

    fn eval(choice: DomainChoice, xs: &[&str]) -> TrialRecord {
        let d = choice.domain();
        let a: Vec<Element> = xs.iter().map(|s| d.parse(s).unwrap()).collect();
        let mut cfg = HarnessConfig::new(Application::Sumprod);
        cfg.size = a.len();
        evaluate_on_instance(&d, &a, 0, &cfg).unwrap()
    }

    #[test]
    fn small_instances() {
        let r = eval(DomainChoice::Gaussian, &["0", "1", "i"]);
        assert_eq!(r.source, stats([("A", 3), ("A+A", 6), ("AA", 4)]));
        assert_eq!(r.verdict, Verdict::Pass);
        let r = eval(DomainChoice::Gaussian, &["0"]);
        assert_eq!(r.source, stats([("A", 1), ("A+A", 1), ("AA", 1)]));
        assert_eq!(r.verdict, Verdict::Pass);
        let r = eval(DomainChoice::Sqrt2, &["1", "2", "4"]);
        assert_eq!(r.source, stats([("A", 3), ("A+A", 6), ("AA", 5)]));
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn seeded_runs_pass_and_repeat() {
        let mut cfg = HarnessConfig::new(Application::Sumprod);
        cfg.size = 5;
        cfg.trials = 4;
        cfg.seed = 9;
        let a = run(&cfg).unwrap();
        assert_eq!(a.failed, 0);
        assert_eq!(a, run(&cfg).unwrap());
    }
}
