use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::field::{self, with_field, PrimeField};
use super::int_poly::IntPoly;
use super::rat_poly::reduce_mod;
use crate::error::{Error, Result};

/// Below this modulus `roots_mod_p` enumerates every residue.
pub const EXHAUSTIVE_ROOT_LIMIT: u64 = 1 << 16;

/// Polynomial over Z/p with residues in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModPoly {
    modulus: BigUint,
    coeffs: Vec<BigUint>,
}

impl ModPoly {
    pub fn new(modulus: BigUint, coeffs: impl IntoIterator<Item = BigInt>) -> Self {
        let mut c: Vec<BigUint> = coeffs.into_iter().map(|x| reduce_mod(&x, &modulus)).collect();
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        ModPoly { modulus, coeffs: c }
    }

    pub fn from_int_poly(g: &IntPoly, p: &BigUint) -> Self {
        ModPoly::new(p.clone(), g.coeffs().iter().cloned())
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn to_field<F: PrimeField>(&self, f: &F) -> Vec<F::E> {
        self.coeffs
            .iter()
            .map(|c| f.from_bigint(&BigInt::from(c.clone())))
            .collect()
    }

    fn from_field<F: PrimeField>(f: &F, v: &[F::E]) -> Self {
        ModPoly {
            modulus: f.modulus(),
            coeffs: v.iter().map(|c| f.to_biguint(c)).collect(),
        }
    }

    pub fn eval(&self, x: &BigUint) -> BigUint {
        self.coeffs
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, c| (acc * x + c) % &self.modulus)
    }
}

impl fmt::Debug for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModPoly({:?} mod {})", self.coeffs, self.modulus)
    }
}

/// Deterministic generator for randomized splitting, keyed on `(g, p)`.
fn splitting_rng(g: &ModPoly) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(g.modulus.to_bytes_le());
    for c in &g.coeffs {
        h.update(b"|");
        h.update(c.to_bytes_le());
    }
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// `z^p` reduced modulo `(g, p)`.
pub fn powmod_x(p: &BigUint, g: &ModPoly) -> Result<ModPoly> {
    if g.coeffs.len() < 2 {
        return Err(Error::invalid("powmod_x needs a non-constant modulus polynomial"));
    }
    if &g.modulus != p {
        return Err(Error::invalid("modulus mismatch"));
    }
    Ok(with_field!(p, |f| {
        let gv = g.to_field(f);
        let r = field::pow_mod(f, &field::x_poly(f), p, &gv);
        ModPoly::from_field(f, &r)
    }))
}

/// All roots of `g` in `[0, p)`, ascending.
pub fn roots_mod_p(g: &ModPoly) -> Result<Vec<BigUint>> {
    if g.is_zero() {
        return Err(Error::invalid("roots of the zero polynomial mod p"));
    }
    Ok(with_field!(&g.modulus, |f| {
        let gv = g.to_field(f);
        roots_generic(f, &gv, || splitting_rng(g))
    }))
}

pub(crate) fn roots_generic<F: PrimeField>(f: &F, g: &[F::E], rng: impl FnOnce() -> ChaCha8Rng) -> Vec<BigUint> {
    if g.len() == 1 {
        return Vec::new();
    }
    let p = f.modulus();
    let mut roots: Vec<BigUint> = match p.to_u64() {
        Some(small) if small < EXHAUSTIVE_ROOT_LIMIT => (0..small)
            .filter(|&a| f.is_zero(&field::eval(f, g, &f.from_u64(a))))
            .map(BigUint::from)
            .collect(),
        _ => {
            let x = field::x_poly(f);
            let xp = field::pow_mod(f, &x, &p, g);
            let lin = field::gcd(f, g, &field::sub(f, &xp, &x));
            if lin.len() < 2 {
                return Vec::new();
            }
            let mut rng = rng();
            field::equal_degree(f, &lin, 1, &mut rng)
                .into_iter()
                .map(|l| f.to_biguint(&f.neg(&l[0])))
                .collect()
        }
    };
    roots.sort();
    roots
}

/// True iff `g` splits into `deg g` distinct linear factors modulo `p`.
pub fn is_fully_split(g: &IntPoly, p: &BigUint) -> bool {
    let Some(n) = g.degree() else { return false };
    if reduce_mod(g.leading().unwrap(), p).is_zero() {
        return false;
    }
    if n == 0 {
        return true;
    }
    with_field!(p, |f| {
        let gv = field::monic(f, &field::from_ints(f, g.coeffs()));
        if field::gcd(f, &gv, &field::derivative(f, &gv)).len() != 1 {
            return false;
        }
        let x = field::x_poly(f);
        let xp = field::pow_mod(f, &x, p, &gv);
        field::rem(f, &x, &gv) == xp
    })
}

/// Degrees of the irreducible factors of a squarefree polynomial mod p.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompositionType {
    Ramified,
    /// Sorted ascending.
    Pattern(Vec<usize>),
}

impl DecompositionType {
    pub fn pattern(&self) -> Option<&[usize]> {
        match self {
            DecompositionType::Pattern(v) => Some(v),
            DecompositionType::Ramified => None,
        }
    }
}

impl fmt::Display for DecompositionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionType::Ramified => write!(f, "ramified"),
            DecompositionType::Pattern(v) => {
                let parts: Vec<String> = v.iter().map(|d| d.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

/// Decomposition type of `g` modulo `p` by distinct-degree splitting.
pub fn decomposition_type(g: &IntPoly, p: &BigUint) -> Result<DecompositionType> {
    if g.is_zero() || !g.is_squarefree() {
        return Err(Error::invalid(format!("{g} is not squarefree over Q")));
    }
    Ok(decomposition_type_unchecked(g, p))
}

/// As [`decomposition_type`] without re-checking squarefreeness over Q.
pub(crate) fn decomposition_type_unchecked(g: &IntPoly, p: &BigUint) -> DecompositionType {
    if reduce_mod(g.leading().unwrap(), p).is_zero() {
        return DecompositionType::Ramified;
    }
    with_field!(p, |f| {
        let gv = field::monic(f, &field::from_ints(f, g.coeffs()));
        if field::gcd(f, &gv, &field::derivative(f, &gv)).len() != 1 {
            return DecompositionType::Ramified;
        }
        let mut degs: Vec<usize> = field::distinct_degree(f, &gv)
            .into_iter()
            .flat_map(|(d, part)| std::iter::repeat_n(d, (part.len() - 1) / d))
            .collect();
        degs.sort_unstable();
        DecompositionType::Pattern(degs)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(c: &[i64], p: u64) -> ModPoly {
        ModPoly::new(BigUint::from(p), c.iter().map(|&x| BigInt::from(x)))
    }

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn powmod_x_examples() {
        assert_eq!(powmod_x(&b(7), &mp(&[-2, 0, 1], 7)).unwrap(), mp(&[0, 1], 7));
        assert_eq!(powmod_x(&b(5), &mp(&[1, 0, 1], 5)).unwrap(), mp(&[0, 1], 5));
        assert_eq!(powmod_x(&b(7), &mp(&[1, 0, 1], 7)).unwrap(), mp(&[0, 6], 7));
        assert!(powmod_x(&b(7), &mp(&[3], 7)).is_err());
    }

    #[test]
    fn roots_examples() {
        assert_eq!(roots_mod_p(&mp(&[-2, 0, 1], 7)).unwrap(), vec![b(3), b(4)]);
        assert!(roots_mod_p(&mp(&[1, 0, 1], 7)).unwrap().is_empty());
        assert_eq!(roots_mod_p(&mp(&[1, 0, 1], 5)).unwrap(), vec![b(2), b(3)]);
        assert!(roots_mod_p(&mp(&[7, 14], 7)).is_err());
    }

    #[test]
    fn roots_above_exhaustive_limit() {
        // 1000003 is prime and == 3 mod 4, so z^2 + 1 has no roots; 1000033 == 1 mod 4
        let p = 1_000_033u64;
        let r = roots_mod_p(&mp(&[1, 0, 1], p)).unwrap();
        assert_eq!(r.len(), 2);
        for a in &r {
            assert!((a * a + 1u32) % p == BigUint::zero());
        }
        assert!(roots_mod_p(&mp(&[1, 0, 1], 1_000_003)).unwrap().is_empty());
    }

    #[test]
    fn split_and_decomposition_examples() {
        let g = IntPoly::from_i64s(&[-2, 0, 1]);
        assert!(is_fully_split(&g, &b(7)));
        assert!(!is_fully_split(&g, &b(5)));
        assert!(!is_fully_split(&IntPoly::from_i64s(&[1, -2, 1]), &b(11)));

        let pat = |v: &[usize]| DecompositionType::Pattern(v.to_vec());
        assert_eq!(decomposition_type(&g, &b(7)).unwrap(), pat(&[1, 1]));
        let cubic = IntPoly::from_i64s(&[-2, 0, 0, 1]);
        assert_eq!(decomposition_type(&cubic, &b(5)).unwrap(), pat(&[1, 2]));
        assert_eq!(decomposition_type(&cubic, &b(7)).unwrap(), pat(&[3]));
        assert_eq!(decomposition_type(&g, &b(2)).unwrap(), DecompositionType::Ramified);
        assert!(decomposition_type(&IntPoly::from_i64s(&[1, -2, 1]), &b(7)).is_err());
    }
}
