//! Distance sets `{(x1 - x2)^2 + (y1 - y2)^2}`, zero included.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::incidence::Point;
use super::{
    find_map, finish, image, run_trials, sample_element, stats, HarnessConfig, HarnessReport, TrialRecord, SAMPLE_BOUND,
};
use crate::arith::modular::mul_mod_u64;
use crate::domain::{ConstraintKind, ConstraintSet, Domain, Element};
use crate::error::Result;

fn dist(p: &Point, q: &Point) -> Element {
    let dx = &p.0 - &q.0;
    let dy = &p.1 - &q.1;
    &(&dx * &dx) + &(&dy * &dy)
}

pub fn evaluate_on_instance(domain: &Domain, points: &[Point], seed: u64, cfg: &HarnessConfig) -> Result<TrialRecord> {
    let mut l = ConstraintSet::new();
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate().skip(i + 1) {
            l.push(domain, &p.0 - &q.0, format!("x{i} - x{j}"));
            l.push(domain, &p.1 - &q.1, format!("y{i} - y{j}"));
        }
    }
    let mut delta: HashMap<_, (String, Element)> = HashMap::new();
    let zero = domain.int(0);
    delta.insert(domain.key(&zero), ("0".to_string(), zero));
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate().skip(i + 1) {
            let d = dist(p, q);
            delta.entry(domain.key(&d)).or_insert((format!("d{i}{j}"), d));
        }
    }
    let mut named: Vec<(String, Element)> = delta.into_values().collect();
    named.sort_by(|a, b| a.0.cmp(&b.0));
    l.extend_kind(domain, ConstraintKind::PairwiseDifferences, &named);
    let distinct_points = points
        .iter()
        .map(|(x, y)| (domain.key(x), domain.key(y)))
        .collect::<HashSet<_>>()
        .len();
    let source = stats([("distances", named.len()), ("points", distinct_points)]);
    let found = find_map(domain, &l, seed, cfg)?;
    finish(seed, &l, source, found, Vec::new(), |m| {
        let p = m.p_u64().expect("u64 prime");
        let ip: Vec<(u64, u64)> = points
            .iter()
            .map(|(x, y)| Ok((image(m, x)?, image(m, y)?)))
            .collect::<Result<_>>()?;
        let mut ds = BTreeSet::from([0u64]);
        for (i, a) in ip.iter().enumerate() {
            for b in &ip[i + 1..] {
                let dx = (a.0 + p - b.0) % p;
                let dy = (a.1 + p - b.1) % p;
                ds.insert((mul_mod_u64(dx, dx, p) + mul_mod_u64(dy, dy, p)) % p);
            }
        }
        let n_pts = ip.iter().collect::<HashSet<_>>().len();
        Ok((stats([("distances", ds.len()), ("points", n_pts)]), true))
    })
}

pub fn run(cfg: &HarnessConfig) -> Result<HarnessReport> {
    let trials = run_trials(cfg, |domain, seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Point> = (0..cfg.size)
            .map(|_| {
                let x = sample_element(domain, &mut rng, SAMPLE_BOUND);
                (x, sample_element(domain, &mut rng, SAMPLE_BOUND))
            })
            .collect();
        evaluate_on_instance(domain, &pts, seed, cfg)
    })?;
    Ok(HarnessReport::new(cfg.clone(), trials, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::super::{Application, DomainChoice, Verdict};
    use super::*;

    fn eval(pts: &[(&str, &str)]) -> TrialRecord {
        let d = DomainChoice::Gaussian.domain();
        let e = |s: &str| d.parse(s).unwrap();
        let pts: Vec<Point> = pts.iter().map(|(x, y)| (e(x), e(y))).collect();
        let mut cfg = HarnessConfig::new(Application::Distance);
        cfg.size = pts.len();
        evaluate_on_instance(&d, &pts, 0, &cfg).unwrap()
    }

    #[test]
    fn small_instances() {
        let r = eval(&[("0", "0"), ("1", "0"), ("0", "1")]);
        assert_eq!(r.source["distances"], 3);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(eval(&[("2", "i")]).source["distances"], 1);
        // (1)^2 + (i)^2 = 0 for distinct points
        let r = eval(&[("0", "0"), ("1", "i")]);
        assert_eq!(r.source, stats([("distances", 1), ("points", 2)]));
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn seeded_trials_pass() {
        let mut cfg = HarnessConfig::new(Application::Distance);
        cfg.trials = 3;
        cfg.domain = DomainChoice::Transcendental;
        let r = run(&cfg).unwrap();
        assert_eq!(r.failed, 0);
        assert!(r.passed > 0);
    }
}
