//! Integer specialization of the transcendental generators.

use std::collections::BTreeMap;

use num_bigint::{BigInt, RandBigInt};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{Irreducibility, RatPoly};
use crate::compose::ThetaPoly;
use crate::domain::{ConstraintSet, Domain};
use crate::error::{Error, Result};

/// A draw under which some constraint vanished.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    #[serde(with = "crate::serde_util::bigint_map")]
    pub assignment: BTreeMap<String, BigInt>,
    pub constraint: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecializeBudget {
    pub batches: usize,
    pub batch_size: usize,
}

impl Default for SpecializeBudget {
    fn default() -> Self {
        SpecializeBudget {
            batches: 64,
            batch_size: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecializationResult {
    #[serde(with = "crate::serde_util::bigint_map")]
    pub assignment: BTreeMap<String, BigInt>,
    /// Product of the specialized constraints, reduced mod `f_theta`.
    pub product: RatPoly,
    /// Each specialized constraint, in constraint order.
    #[serde(skip)]
    pub values: Vec<RatPoly>,
    pub transcript: Vec<Rejection>,
    /// Number of tuples drawn, including the accepted one.
    pub draws: usize,
    #[serde(with = "crate::serde_util::bigint_string")]
    pub final_bound: BigInt,
}

/// Balanced product tree, reduced mod `f_theta`.
fn product(values: &[RatPoly], domain: &Domain) -> RatPoly {
    let m = &domain.composition().f_theta;
    match values {
        [] => RatPoly::one().rem_monic(m),
        [v] => v.rem_monic(m),
        _ => {
            let (a, b) = values.split_at(values.len() / 2);
            product(a, domain).mul_mod(&product(b, domain), m)
        }
    }
}

fn vanishing_product(domain: &Domain, constraints: &ConstraintSet, values: &[RatPoly]) -> Error {
    let zero: Vec<&str> = constraints
        .items()
        .iter()
        .zip(values)
        .filter(|(_, v)| v.is_zero())
        .map(|(c, _)| c.label.as_str())
        .collect();
    match domain.irreducibility() {
        Irreducibility::Certified => Error::Internal(format!(
            "constraint product vanishes modulo the certified minimal polynomial {}",
            domain.composition().f_theta
        )),
        Irreducibility::Attested => Error::NotADomain(format!(
            "constraint product vanishes modulo {} (zero items: {:?}); the minimal polynomial is \
             probably reducible",
            domain.composition().f_theta,
            zero
        )),
    }
}

/// Finds integers for the transcendentals keeping every constraint non-zero.
pub fn specialize(
    domain: &Domain,
    constraints: &ConstraintSet,
    seed: u64,
    budget: SpecializeBudget,
) -> Result<SpecializationResult> {
    let pres = domain.presentation();
    let m = &domain.composition().f_theta;
    let rewritten: Vec<ThetaPoly> = constraints.elements().map(|e| domain.rewrite(e)).collect();
    let names = pres.transcendentals();
    if names.is_empty() {
        let values: Vec<RatPoly> = rewritten
            .iter()
            .map(|t| t.as_theta().expect("no transcendentals"))
            .collect();
        let prod = product(&values, domain);
        if prod.is_zero() {
            return Err(vanishing_product(domain, constraints, &values));
        }
        return Ok(SpecializationResult {
            assignment: BTreeMap::new(),
            product: prod,
            values,
            transcript: Vec::new(),
            draws: 0,
            final_bound: BigInt::zero(),
        });
    }
    let degree: u64 = rewritten.iter().map(|t| t.total_degree() as u64).sum();
    let mut bound = BigInt::from((2 * degree).max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transcript = Vec::new();
    let mut draws = 0;
    for _ in 0..budget.batches {
        for _ in 0..budget.batch_size {
            draws += 1;
            let point: Vec<BigInt> = names
                .iter()
                .map(|_| rng.gen_bigint_range(&-&bound, &(&bound + 1u32)))
                .collect();
            let mut values = Vec::with_capacity(rewritten.len());
            let mut failed = None;
            for (t, item) in rewritten.iter().zip(constraints.items()) {
                let v = t.specialize(&point, m);
                if v.is_zero() {
                    failed = Some(item.label.clone());
                    break;
                }
                values.push(v);
            }
            let assignment: BTreeMap<String, BigInt> = names.iter().cloned().zip(point).collect();
            if let Some(constraint) = failed {
                transcript.push(Rejection { assignment, constraint });
                continue;
            }
            let prod = product(&values, domain);
            if prod.is_zero() {
                return Err(vanishing_product(domain, constraints, &values));
            }
            return Ok(SpecializationResult {
                assignment,
                product: prod,
                values,
                transcript,
                draws,
                final_bound: bound,
            });
        }
        bound *= 2u32;
    }
    Err(Error::Specialization {
        attempts: draws,
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::IntPoly;
    use crate::domain::{ConstraintKind, DomainPresentation};
    use num_traits::One;

    fn domain(ts: &[&str], algs: &[(&str, &[i64])]) -> Domain {
        let p = DomainPresentation::new(
            ts.iter().map(|s| s.to_string()).collect(),
            algs.iter()
                .map(|(n, c)| (n.to_string(), IntPoly::from_i64s(c), None))
                .collect(),
        )
        .unwrap();
        Domain::new(p).unwrap()
    }

    fn custom(d: &Domain, xs: &[&str]) -> ConstraintSet {
        let named: Vec<_> = xs.iter().map(|s| (s.to_string(), d.parse(s).unwrap())).collect();
        ConstraintSet::build(d, ConstraintKind::Custom, &named)
    }

    #[test]
    fn avoids_zeros_and_is_deterministic() {
        let d = domain(&["t"], &[]);
        let l = custom(&d, &["t", "t - 1"]);
        let a = specialize(&d, &l, 0, SpecializeBudget::default()).unwrap();
        let t = &a.assignment["t"];
        assert!(*t != BigInt::zero() && *t != BigInt::one());
        assert_eq!(a, specialize(&d, &l, 0, SpecializeBudget::default()).unwrap());
        for r in &a.transcript {
            let v = &r.assignment["t"];
            assert!(*v == BigInt::zero() || *v == BigInt::one());
        }
    }

    #[test]
    fn first_draw_accepted_when_nothing_vanishes() {
        let d = domain(&["t"], &[("i", &[1, 0, 1])]);
        let a = specialize(&d, &custom(&d, &["t^2 + 1"]), 3, SpecializeBudget::default()).unwrap();
        assert_eq!(a.draws, 1);
        let d = domain(&["t"], &[]);
        let a = specialize(&d, &custom(&d, &["t^2 - 2"]), 3, SpecializeBudget::default()).unwrap();
        assert!(a.transcript.is_empty());
    }

    #[test]
    fn passthrough_without_transcendentals() {
        let d = domain(&[], &[("i", &[1, 0, 1])]);
        let a = specialize(&d, &custom(&d, &["i - 1"]), 0, SpecializeBudget::default()).unwrap();
        assert_eq!(a.product, RatPoly::from_int_poly(IntPoly::from_i64s(&[-1, 1])));
        let d = domain(&[], &[("r2", &[-2, 0, 1])]);
        let a = specialize(&d, &custom(&d, &["(3 - r2)*(3 + r2)"]), 0, SpecializeBudget::default()).unwrap();
        assert_eq!(a.product, RatPoly::from_int_poly(IntPoly::from_i64s(&[7])));
    }

    #[test]
    fn rejection_rate_within_twice_the_degree_bound() {
        let d = domain(&["s", "t"], &[]);
        let l = custom(&d, &["t - s", "t + s", "s*t - 1"]);
        let (mut rejected, mut draws) = (0usize, 0usize);
        let mut bound = BigInt::zero();
        for seed in 0..1000 {
            let r = specialize(&d, &l, seed, SpecializeBudget::default()).unwrap();
            rejected += r.transcript.len();
            draws += r.draws;
            bound = bound.max(r.final_bound);
        }
        // total degree 4, so a draw from [-B, B]^2 is rejected with probability at most 4 / (2B + 1)
        assert_eq!(bound, BigInt::from(8));
        let rate = rejected as f64 / draws as f64;
        assert!(rate <= 2.0 * 4.0 / 17.0, "rejection rate {rate}");
    }

    #[test]
    fn exhausted_budget_reports_transcript() {
        let d = domain(&["t"], &[]);
        // t*(t-1)*(t+1) vanishes on every draw from [-1, 1]
        let l = custom(&d, &["t^3 - t"]);
        let tiny = SpecializeBudget {
            batches: 1,
            batch_size: 4,
        };
        match specialize(&d, &l, 1, tiny) {
            Ok(r) => assert!(r.draws <= 4),
            Err(Error::Specialization { attempts, transcript }) => {
                assert_eq!(attempts, 4);
                assert_eq!(transcript.len(), 4);
            }
            Err(e) => panic!("{e}"),
        }
    }
}
