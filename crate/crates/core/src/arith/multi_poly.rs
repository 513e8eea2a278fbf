use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::modular::mod_inverse;
use super::rat_poly::reduce_mod;

/// Sparse multivariate polynomial with rational coefficients.
///
/// Exponent vectors have one entry per variable; zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: Arc<[String]>,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MultiPoly {
    pub fn zero(vars: Arc<[String]>) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Arc<[String]>, c: BigRational) -> Self {
        let mut p = MultiPoly::zero(vars);
        if !c.is_zero() {
            let n = p.vars.len();
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    pub fn from_int(vars: Arc<[String]>, c: i64) -> Self {
        MultiPoly::constant(vars, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(vars: Arc<[String]>, index: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[index] = 1;
        let mut p = MultiPoly::zero(vars);
        p.terms.insert(e, BigRational::one());
        p
    }

    pub fn from_terms(vars: Arc<[String]>, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Self {
        let mut p = MultiPoly::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Vec<u32>, BigRational> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value when the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// Total degree counting only the variables selected by `mask`.
    pub fn degree_in(&self, mask: &[bool]) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().zip(mask).filter(|(_, &m)| m).map(|(x, _)| *x).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, k: &BigRational) -> MultiPoly {
        if k.is_zero() {
            return MultiPoly::zero(self.vars.clone());
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.check_vars(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.check_vars(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.check_vars(other);
        let mut out = MultiPoly::zero(self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    fn check_vars(&self, other: &MultiPoly) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "variable lists differ"
        );
    }

    /// Evaluates with every variable replaced by a residue mod `p`;
    /// `None` when a coefficient denominator is not invertible.
    pub fn eval_mod(&self, images: &[BigUint], p: &BigUint) -> Option<BigUint> {
        assert_eq!(images.len(), self.vars.len());
        let mut acc = BigUint::zero();
        for (e, c) in &self.terms {
            let mut t = reduce_mod(c.numer(), p);
            if !c.denom().is_one() {
                t = t * mod_inverse(&reduce_mod(c.denom(), p), p)? % p;
            }
            for (x, &k) in images.iter().zip(e) {
                if k > 0 {
                    t = t * x.modpow(&BigUint::from(k), p) % p;
                }
            }
            acc = (acc + t) % p;
        }
        Some(acc)
    }

    /// True iff every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

/// Renders in the expression grammar (`3*x^2*r2 - 1`), highest terms first.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&x| x == 0);
            if !a.is_one() || is_const {
                if a.is_integer() {
                    factors.push(a.numer().to_string());
                } else {
                    factors.push(format!("{}/{}", a.numer(), a.denom()));
                }
            }
            for (name, &k) in self.vars.iter().zip(e) {
                match k {
                    0 => {}
                    1 => factors.push(name.clone()),
                    _ => factors.push(format!("{name}^{k}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> Arc<[String]> {
        Arc::from(vec!["x".to_string(), "y".to_string()])
    }

    #[test]
    fn arithmetic_and_display() {
        let v = vars();
        let x = MultiPoly::var(v.clone(), 0);
        let y = MultiPoly::var(v.clone(), 1);
        let one = MultiPoly::from_int(v.clone(), 1);
        let p = x.add(&y).mul(&x.sub(&y)).add(&one);
        assert_eq!(p.to_string(), "x^2 - y^2 + 1");
        assert_eq!(p.total_degree(), 2);
        assert!(p.sub(&p).is_zero());
        let imgs = [BigUint::from(3u32), BigUint::from(1u32)];
        assert_eq!(p.eval_mod(&imgs, &BigUint::from(7u32)), Some(BigUint::from(2u32)));
    }
}
