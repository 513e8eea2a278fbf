use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::mod_poly::decomposition_type_unchecked;
use crate::arith::{DecompositionType, IntPoly, PrimeRange};
use crate::error::{Error, Result};
use crate::interval::parse_rational;

/// Factorization-pattern statistics of a polynomial over a prime range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub polynomial: String,
    pub bound: u64,
    pub primes_examined: u64,
    /// Primes dividing the leading coefficient or the discriminant.
    pub ramified: u64,
    /// Pattern (ascending degrees, comma separated) to prime count.
    pub counts: BTreeMap<String, u64>,
    /// Count divided by the number of unramified primes.
    pub densities: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<BTreeMap<String, String>>,
    /// `|empirical - predicted|` per predicted pattern.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviations: Option<BTreeMap<String, f64>>,
}

impl DensityReport {
    pub fn density(&self, pattern: &str) -> f64 {
        self.densities.get(pattern).copied().unwrap_or(0.0)
    }

    pub fn max_deviation(&self) -> Option<f64> {
        self.deviations
            .as_ref()
            .map(|d| d.values().copied().fold(0.0, f64::max))
    }
}

fn normalize_pattern(s: &str) -> Result<String> {
    let mut degs = s
        .split(',')
        .map(|d| {
            d.trim()
                .parse::<usize>()
                .ok()
                .filter(|&d| d > 0)
                .ok_or_else(|| Error::invalid(format!("bad pattern degree {d:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    degs.sort_unstable();
    Ok(degs.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
}

/// Parses `"1,1=1/2;2=1/2"` into pattern to predicted density.
pub fn parse_predictions(s: &str) -> Result<BTreeMap<String, BigRational>> {
    let mut out = BTreeMap::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (pat, val) = part
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("prediction {part:?} must look like pattern=density")))?;
        let v = parse_rational(val.trim()).ok_or_else(|| Error::invalid(format!("bad density {val:?}")))?;
        if out.insert(normalize_pattern(pat)?, v).is_some() {
            return Err(Error::invalid(format!("pattern {pat:?} predicted twice")));
        }
    }
    if out.is_empty() {
        return Err(Error::invalid("empty prediction"));
    }
    Ok(out)
}

/// Tallies the decomposition type of `g` modulo every prime up to `bound`.
pub fn density_scan(
    g: &IntPoly,
    bound: u64,
    predicted: Option<&BTreeMap<String, BigRational>>,
) -> Result<DensityReport> {
    if g.degree().unwrap_or(0) == 0 {
        return Err(Error::invalid("density scan needs a polynomial of degree at least 1"));
    }
    if !g.is_squarefree() {
        return Err(Error::invalid(format!("{g} is not squarefree over Q")));
    }
    let primes: Vec<u64> = PrimeRange::new(2, bound).collect();
    let types: Vec<DecompositionType> = primes
        .par_iter()
        .map(|&p| decomposition_type_unchecked(g, &BigUint::from(p)))
        .collect();
    let mut counts = BTreeMap::new();
    let mut ramified = 0;
    for t in &types {
        match t {
            DecompositionType::Ramified => ramified += 1,
            DecompositionType::Pattern(_) => *counts.entry(t.to_string()).or_insert(0u64) += 1,
        }
    }
    let unramified = (primes.len() as u64 - ramified).max(1) as f64;
    let densities: BTreeMap<String, f64> = counts
        .iter()
        .map(|(k, &c)| (k.clone(), c as f64 / unramified))
        .collect();
    let deviations = predicted.map(|pred| {
        pred.iter()
            .map(|(k, v)| {
                let e = densities.get(k).copied().unwrap_or(0.0);
                (k.clone(), (e - v.to_f64().unwrap_or(f64::NAN)).abs())
            })
            .collect()
    });
    Ok(DensityReport {
        polynomial: g.to_string(),
        bound,
        primes_examined: primes.len() as u64,
        ramified,
        counts,
        densities,
        predicted: predicted.map(|p| p.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()),
        deviations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_split_density_near_half() {
        let g = IntPoly::from_i64s(&[-2, 0, 1]);
        let pred = parse_predictions("1,1=1/2; 2=1/2").unwrap();
        let r = density_scan(&g, 20_000, Some(&pred)).unwrap();
        assert_eq!(r.counts.values().sum::<u64>() + r.ramified, r.primes_examined);
        assert_eq!(r.ramified, 1);
        assert!(r.max_deviation().unwrap() < 0.02);
    }

    #[test]
    fn predictions_normalize_and_reject_garbage() {
        let p = parse_predictions("2,1=1/2;3=1/3").unwrap();
        assert!(p.contains_key("1,2"));
        assert!(parse_predictions("1,1").is_err());
        assert!(parse_predictions("1,0=1").is_err());
        assert!(density_scan(&IntPoly::from_i64s(&[1, 2, 1]), 100, None).is_err());
    }
}
