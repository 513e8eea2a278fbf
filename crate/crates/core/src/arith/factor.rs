//! Factorization of small monic squarefree integer polynomials and the
//! irreducibility certificate built on it.
//!
//! Factoring works modulo a single prime larger than twice the Mignotte
//! bound, so every true factor is the symmetric lift of a product of
//! modular factors and no Hensel lifting is required.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::{self, with_field, PrimeField};
use super::int_poly::IntPoly;
use super::primes::{next_prime, primes_up_to};

/// Upper limit on the number of modular factors whose subsets are tried.
pub const MAX_MODULAR_FACTORS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Irreducibility {
    Certified,
    /// Accepted without proof.
    #[serde(rename = "unverified")]
    Attested,
}

/// Outcome of trying to prove a polynomial irreducible over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrreducibilityCheck {
    Irreducible(Certificate),
    Reducible(Vec<IntPoly>),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Linear,
    NoRationalRoot,
    IrreducibleModPrime(u64),
    FactorSearch(BigUint),
}

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Certificate::Linear => write!(f, "degree 1"),
            Certificate::NoRationalRoot => write!(f, "no rational root (degree <= 3)"),
            Certificate::IrreducibleModPrime(p) => write!(f, "irreducible mod {p}"),
            Certificate::FactorSearch(p) => write!(f, "exhaustive factor search mod {p}"),
        }
    }
}

fn has_integer_root(f: &IntPoly) -> bool {
    let c0 = f.coeff(0);
    if c0.is_zero() {
        return true;
    }
    let a = c0.abs();
    let Some(a_small) = a.to_u64() else {
        return false;
    };
    let mut d = 1u64;
    while d * d <= a_small {
        if a_small % d == 0 {
            for cand in [d, a_small / d] {
                let c = BigInt::from(cand);
                if f.eval(&c).is_zero() || f.eval(&-&c).is_zero() {
                    return true;
                }
            }
        }
        d += 1;
    }
    false
}

/// Certification ladder for a monic squarefree polynomial: degree one,
/// the rational-root test up to degree 3, irreducibility modulo a prime
/// `p <= 1000`, and finally exhaustive factor search.
pub fn check_irreducible(f: &IntPoly) -> IrreducibilityCheck {
    let Some(n) = f.degree() else {
        return IrreducibilityCheck::Unknown;
    };
    if n == 0 {
        return IrreducibilityCheck::Unknown;
    }
    if n == 1 {
        return IrreducibilityCheck::Irreducible(Certificate::Linear);
    }
    if f.is_monic() && n <= 3 && f.coeff(0).abs() <= BigInt::from(1_000_000_000_000u64) {
        return if has_integer_root(f) {
            match factor_monic_squarefree(f) {
                Some(fs) => IrreducibilityCheck::Reducible(fs),
                None => IrreducibilityCheck::Unknown,
            }
        } else {
            IrreducibilityCheck::Irreducible(Certificate::NoRationalRoot)
        };
    }
    for p in primes_up_to(1000) {
        let dt = super::mod_poly::decomposition_type_unchecked(f, &BigUint::from(p));
        if dt.pattern() == Some(&[n][..]) {
            return IrreducibilityCheck::Irreducible(Certificate::IrreducibleModPrime(p));
        }
    }
    if !f.is_monic() {
        return IrreducibilityCheck::Unknown;
    }
    match factor_with_prime(f) {
        Some((fs, p)) if fs.len() == 1 => IrreducibilityCheck::Irreducible(Certificate::FactorSearch(p)),
        Some((fs, _)) => IrreducibilityCheck::Reducible(fs),
        None => IrreducibilityCheck::Unknown,
    }
}

/// Irreducible monic factors of a monic squarefree polynomial over Z,
/// sorted; `None` when the modular factor count exceeds
/// [`MAX_MODULAR_FACTORS`].
pub fn factor_monic_squarefree(f: &IntPoly) -> Option<Vec<IntPoly>> {
    factor_with_prime(f).map(|(fs, _)| fs)
}

fn factor_with_prime(f: &IntPoly) -> Option<(Vec<IntPoly>, BigUint)> {
    assert!(f.is_monic(), "factorization expects a monic polynomial");
    let n = f.deg0();
    // coefficients of any factor are bounded by 2^n * ||f||_2
    let norm = f.norm2_squared().sqrt() + BigInt::one();
    let bound = (norm << n).to_biguint().unwrap();
    let mut p = next_prime(&(bound * 2u32));
    loop {
        let squarefree = with_field!(&p, |fl| {
            let g = field::from_ints(fl, f.coeffs());
            field::gcd(fl, &g, &field::derivative(fl, &g)).len() == 1
        });
        if squarefree {
            break;
        }
        p = next_prime(&p);
    }
    let factors = with_field!(&p, |fl| combine_factors(fl, f, n))?;
    Some((factors, p))
}

fn combine_factors<F: PrimeField>(fl: &F, f: &IntPoly, n: usize) -> Option<Vec<IntPoly>> {
    if n <= 1 {
        return Some(vec![f.clone()]);
    }
    let g = field::from_ints(fl, f.coeffs());
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let mut modular = field::factor_squarefree(fl, &g, &mut rng);
    if modular.len() > MAX_MODULAR_FACTORS {
        return None;
    }
    let p = BigInt::from(fl.modulus());
    let half = &p / 2;
    let lift = |v: &[F::E]| -> IntPoly {
        IntPoly::new(
            v.iter()
                .map(|c| {
                    let c = BigInt::from(fl.to_biguint(c));
                    if c > half {
                        c - &p
                    } else {
                        c
                    }
                })
                .collect(),
        )
    };
    let mut rest = f.clone();
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= modular.len() {
        let mut progressed = false;
        for subset in subsets(modular.len(), size) {
            let prod = subset
                .iter()
                .fold(vec![fl.one()], |acc, &i| field::mul(fl, &acc, &modular[i]));
            let cand = lift(&prod);
            if let Some(q) = rest.div_exact(&cand) {
                found.push(cand);
                rest = q;
                let keep: Vec<_> = (0..modular.len())
                    .filter(|i| !subset.contains(i))
                    .map(|i| modular[i].clone())
                    .collect();
                modular = keep;
                progressed = true;
                break;
            }
        }
        if !progressed {
            size += 1;
        }
    }
    found.push(rest);
    found.sort();
    Some(found)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn biquadratic_is_certified_by_factor_search() {
        // z^4 - 2z^2 + 9 splits mod every prime but is irreducible over Q
        match check_irreducible(&p(&[9, 0, -2, 0, 1])) {
            IrreducibilityCheck::Irreducible(Certificate::FactorSearch(_)) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reducible_polynomials_are_split() {
        // (z^2 - 2)(z^2 - 18) = z^4 - 20 z^2 + 36
        let f = p(&[36, 0, -20, 0, 1]);
        assert_eq!(
            factor_monic_squarefree(&f).unwrap(),
            vec![p(&[-18, 0, 1]), p(&[-2, 0, 1])]
        );
        assert!(matches!(
            check_irreducible(&p(&[-2, 1, 1])),
            IrreducibilityCheck::Reducible(_)
        ));
    }

    #[test]
    fn small_degree_certificates() {
        assert_eq!(
            check_irreducible(&p(&[1, 0, 1])),
            IrreducibilityCheck::Irreducible(Certificate::NoRationalRoot)
        );
        assert_eq!(
            check_irreducible(&p(&[-3, 1])),
            IrreducibilityCheck::Irreducible(Certificate::Linear)
        );
        // z^5 - z - 1 is irreducible mod 5
        assert!(matches!(
            check_irreducible(&p(&[-1, -1, 0, 0, 0, 1])),
            IrreducibilityCheck::Irreducible(Certificate::IrreducibleModPrime(_))
        ));
    }
}
