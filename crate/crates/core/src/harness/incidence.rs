//! Point-line incidences `y = m x + b`.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    find_map, finish, image, run_trials, sample_element, stats, HarnessConfig, HarnessReport, TrialRecord, SAMPLE_BOUND,
};
use crate::arith::modular::mul_mod_u64;
use crate::domain::{ConstraintSet, Domain, Element};
use crate::error::Result;

pub type Point = (Element, Element);
/// `(m, b)` for the line `y = m x + b`.
pub type Line = (Element, Element);

fn residual(pt: &Point, ln: &Line) -> Element {
    &(&pt.1 - &(&ln.0 * &pt.0)) - &ln.1
}

pub fn evaluate_on_instance(
    domain: &Domain,
    points: &[Point],
    lines: &[Line],
    seed: u64,
    cfg: &HarnessConfig,
) -> Result<TrialRecord> {
    let mut l = ConstraintSet::new();
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate().skip(i + 1) {
            l.push(domain, &p.0 - &q.0, format!("x{i} - x{j}"));
            l.push(domain, &p.1 - &q.1, format!("y{i} - y{j}"));
        }
    }
    for (i, p) in lines.iter().enumerate() {
        for (j, q) in lines.iter().enumerate().skip(i + 1) {
            l.push(domain, &p.0 - &q.0, format!("m{i} - m{j}"));
            l.push(domain, &p.1 - &q.1, format!("b{i} - b{j}"));
        }
    }
    let mut incidences = 0;
    for (i, p) in points.iter().enumerate() {
        for (j, ln) in lines.iter().enumerate() {
            let r = residual(p, ln);
            if domain.is_zero(&r) {
                incidences += 1;
            } else {
                l.push(domain, r, format!("y{i} - m{j} x{i} - b{j}"));
            }
        }
    }
    let distinct = |xs: &[(Element, Element)]| {
        xs.iter()
            .map(|(u, v)| (domain.key(u), domain.key(v)))
            .collect::<HashSet<_>>()
            .len()
    };
    let source = stats([
        ("incidences", incidences),
        ("points", distinct(points)),
        ("lines", distinct(lines)),
    ]);
    let found = find_map(domain, &l, seed, cfg)?;
    finish(seed, &l, source, found, Vec::new(), |m| {
        let p = m.p_u64().expect("u64 prime");
        let img = |xs: &[(Element, Element)]| -> Result<Vec<(u64, u64)>> {
            xs.iter().map(|(u, v)| Ok((image(m, u)?, image(m, v)?))).collect()
        };
        let (ip, il) = (img(points)?, img(lines)?);
        let hits = ip
            .iter()
            .flat_map(|&(x, y)| il.iter().map(move |&(mm, b)| (x, y, mm, b)))
            .filter(|&(x, y, mm, b)| (mul_mod_u64(mm, x, p) + b) % p == y)
            .count();
        let count = |v: &[(u64, u64)]| v.iter().collect::<HashSet<_>>().len();
        Ok((
            stats([("incidences", hits), ("points", count(&ip)), ("lines", count(&il))]),
            true,
        ))
    })
}

/// `n` random points and `n` lines, about half of them through a sampled point.
pub fn sample_instance(domain: &Domain, rng: &mut ChaCha8Rng, n: usize) -> (Vec<Point>, Vec<Line>) {
    let el = |rng: &mut ChaCha8Rng| sample_element(domain, rng, SAMPLE_BOUND);
    let points: Vec<Point> = (0..n).map(|_| (el(rng), el(rng))).collect();
    let lines = (0..n)
        .map(|_| {
            let m = el(rng);
            let b = if rng.gen_bool(0.5) {
                let (x, y) = &points[rng.gen_range(0..n)];
                y - &(&m * x)
            } else {
                el(rng)
            };
            (m, b)
        })
        .collect();
    (points, lines)
}

pub fn run(cfg: &HarnessConfig) -> Result<HarnessReport> {
    let trials = run_trials(cfg, |domain, seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pts, lns) = sample_instance(domain, &mut rng, cfg.size);
        evaluate_on_instance(domain, &pts, &lns, seed, cfg)
    })?;
    Ok(HarnessReport::new(cfg.clone(), trials, Vec::new()))
}
