//! Finitely presented domains `Z[x_1..x_j, alpha_1..alpha_k]`, their
//! elements and constraint sets.

mod constraints;
mod element;
mod parse;
mod spec_file;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::arith::{check_irreducible, IntPoly, Irreducibility, IrreducibilityCheck, MultiPoly, RatPoly};
use crate::compose::{compose_all, CompositionResult, ThetaPoly};
use crate::error::{Error, Result};
use crate::interval::{self, Rect};

pub use constraints::{ConstraintItem, ConstraintKind, ConstraintSet};
pub use element::Element;
pub use parse::parse_element;
pub use spec_file::{ConstraintSpec, LoadedSpec, SpecAlgebraic, SpecFile};

/// An algebraic generator: a root of a monic squarefree integer polynomial.
#[derive(Clone, Debug, Serialize)]
pub struct Algebraic {
    pub name: String,
    pub minpoly: IntPoly,
    /// Rectangle supplied by the user, if any.
    pub isolate: Option<Rect>,
    /// Certified box around the chosen root.
    pub root_box: Rect,
    pub irreducibility: Irreducibility,
    pub certificate: Option<String>,
    #[serde(skip)]
    powers: Vec<IntPoly>,
}

impl Algebraic {
    pub fn degree(&self) -> usize {
        self.minpoly.deg0()
    }

    /// `z^e mod minpoly`, tabulated for `d <= e <= 2d - 2`.
    fn power(&self, e: u32) -> IntPoly {
        let d = self.degree();
        let e = e as usize;
        match e.checked_sub(d).and_then(|i| self.powers.get(i)) {
            Some(p) => p.clone(),
            None => IntPoly::z().pow(e as u32).rem_monic(&self.minpoly),
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Generators of `Z[S]`: transcendentals first, then algebraic integers.
#[derive(Clone, Serialize)]
pub struct DomainPresentation {
    transcendentals: Vec<String>,
    algebraics: Vec<Algebraic>,
    #[serde(skip)]
    vars: Arc<[String]>,
}

impl PartialEq for DomainPresentation {
    fn eq(&self, o: &Self) -> bool {
        self.transcendentals == o.transcendentals
            && self.algebraics.len() == o.algebraics.len()
            && self
                .algebraics
                .iter()
                .zip(&o.algebraics)
                .all(|(a, b)| a.name == b.name && a.minpoly == b.minpoly && a.root_box == b.root_box)
    }
}

impl fmt::Debug for DomainPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[")?;
        let mut parts: Vec<String> = self.transcendentals.clone();
        parts.extend(self.algebraics.iter().map(|a| format!("{}: {}", a.name, a.minpoly)));
        write!(f, "{}]", parts.join(", "))
    }
}

impl DomainPresentation {
    /// Validates and builds a presentation. Each algebraic entry is
    /// `(name, minimal polynomial, optional isolating rectangle)`.
    pub fn new(transcendentals: Vec<String>, algebraics: Vec<(String, IntPoly, Option<Rect>)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for name in transcendentals.iter().chain(algebraics.iter().map(|a| &a.0)) {
            if !is_identifier(name) {
                return Err(Error::invalid(format!("generator name {name:?} is not an identifier")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::invalid(format!("generator name {name:?} is used twice")));
            }
        }
        let mut algs = Vec::with_capacity(algebraics.len());
        for (name, f, isolate) in algebraics {
            algs.push(Self::validate_algebraic(name, f, isolate)?);
        }
        let vars: Arc<[String]> = transcendentals
            .iter()
            .cloned()
            .chain(algs.iter().map(|a| a.name.clone()))
            .collect();
        Ok(DomainPresentation {
            transcendentals,
            algebraics: algs,
            vars,
        })
    }

    fn validate_algebraic(name: String, f: IntPoly, isolate: Option<Rect>) -> Result<Algebraic> {
        let Some(d) = f.degree().filter(|&d| d >= 1) else {
            return Err(Error::invalid(format!(
                "minimal polynomial of {name} must have degree at least 1, got {f}"
            )));
        };
        let lc = f.leading().unwrap().clone();
        if lc != BigInt::from(1) {
            return Err(Error::invalid(format!(
                "minimal polynomial of {name} is not monic (leading coefficient {lc}); \
                 present the algebraic integer {lc}*{name} instead"
            )));
        }
        if !f.is_squarefree() {
            return Err(Error::invalid(format!(
                "minimal polynomial of {name} ({f}) is not squarefree"
            )));
        }
        let (irreducibility, certificate) = match check_irreducible(&f) {
            IrreducibilityCheck::Irreducible(c) => (Irreducibility::Certified, Some(c.to_string())),
            IrreducibilityCheck::Reducible(fs) => {
                let shown: Vec<String> = fs.iter().map(|g| format!("({g})")).collect();
                return Err(Error::NotADomain(format!(
                    "minimal polynomial of {name} factors as {}; use the factor vanishing at {name}",
                    shown.join("*")
                )));
            }
            IrreducibilityCheck::Unknown => (Irreducibility::Attested, None),
        };
        let root_box = match &isolate {
            Some(r) => interval::root_in_rect(&f, r)?,
            None => interval::default_root(&f)?,
        };
        let mut powers = Vec::with_capacity(d.saturating_sub(1));
        let mut cur = IntPoly::z().pow(d as u32).rem_monic(&f);
        for _ in d..=(2 * d).saturating_sub(2) {
            powers.push(cur.clone());
            cur = cur.shift(1).rem_monic(&f);
        }
        Ok(Algebraic {
            name,
            minpoly: f,
            isolate,
            root_box,
            irreducibility,
            certificate,
            powers,
        })
    }

    pub fn transcendentals(&self) -> &[String] {
        &self.transcendentals
    }

    pub fn algebraics(&self) -> &[Algebraic] {
        &self.algebraics
    }

    /// All generator names in variable order.
    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn num_transcendentals(&self) -> usize {
        self.transcendentals.len()
    }

    /// Mask selecting the transcendental variables.
    pub fn transcendental_mask(&self) -> Vec<bool> {
        (0..self.vars.len()).map(|i| i < self.transcendentals.len()).collect()
    }

    /// Reduces every algebraic exponent below the degree of its minimal
    /// polynomial, one generator at a time.
    pub fn reduce(&self, p: MultiPoly) -> MultiPoly {
        let j = self.transcendentals.len();
        let mut cur = p;
        for (k, alg) in self.algebraics.iter().enumerate() {
            let idx = j + k;
            let d = alg.degree() as u32;
            if cur.terms().keys().all(|e| e[idx] < d) {
                continue;
            }
            let vars = cur.vars().clone();
            let mut out = MultiPoly::zero(vars);
            for (e, c) in cur.into_terms() {
                if e[idx] < d {
                    out.add_term(e, c);
                    continue;
                }
                let r = alg.power(e[idx]);
                for (i, rc) in r.coeffs().iter().enumerate() {
                    let mut e2 = e.clone();
                    e2[idx] = i as u32;
                    out.add_term(e2, &c * BigRational::from_integer(rc.clone()));
                }
            }
            cur = out;
        }
        cur
    }
}

/// Key identifying an element up to equality in the domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalKey {
    NormalForm(BTreeMap<Vec<u32>, BigRational>),
    Theta(BTreeMap<Vec<u32>, RatPoly>),
}

/// A presentation together with its primitive-element composition, giving
/// a faithful zero test.
pub struct Domain {
    presentation: Arc<DomainPresentation>,
    composition: CompositionResult,
    faithful_normal_form: bool,
    monomials: HashMap<Vec<u32>, RatPoly>,
}

/// Largest algebraic monomial basis whose rewrites are tabulated.
const MONOMIAL_TABLE_LIMIT: usize = 4096;

impl Domain {
    pub fn new(presentation: DomainPresentation) -> Result<Self> {
        let composition = compose_all(&presentation)?;
        let basis: usize = presentation.algebraics.iter().map(|a| a.degree()).product();
        // per-generator normal forms are faithful exactly when the degrees multiply
        let faithful_normal_form = composition.f_theta.deg0() == basis;
        let mut monomials = HashMap::new();
        if basis <= MONOMIAL_TABLE_LIMIT {
            let degs: Vec<u32> = presentation.algebraics.iter().map(|a| a.degree() as u32).collect();
            let mut e = vec![0u32; degs.len()];
            loop {
                monomials.insert(e.clone(), composition.monomial(&e));
                let mut i = 0;
                while i < e.len() {
                    e[i] += 1;
                    if e[i] < degs[i] {
                        break;
                    }
                    e[i] = 0;
                    i += 1;
                }
                if i == e.len() {
                    break;
                }
            }
        }
        Ok(Domain {
            presentation: Arc::new(presentation),
            composition,
            faithful_normal_form,
            monomials,
        })
    }

    pub fn presentation(&self) -> &Arc<DomainPresentation> {
        &self.presentation
    }

    pub fn composition(&self) -> &CompositionResult {
        &self.composition
    }

    pub fn parse(&self, text: &str) -> Result<Element> {
        parse_element(text, &self.presentation)
    }

    pub fn int(&self, n: i64) -> Element {
        Element::from_int(&self.presentation, n)
    }

    pub fn var(&self, name: &str) -> Result<Element> {
        Element::var(&self.presentation, name)
    }

    /// Rewrites an element in `theta`, keeping transcendentals as exponent
    /// vectors.
    pub fn rewrite(&self, e: &Element) -> ThetaPoly {
        let j = self.presentation.num_transcendentals();
        let m = &self.composition.f_theta;
        let mut out: BTreeMap<Vec<u32>, RatPoly> = BTreeMap::new();
        for (exp, c) in e.poly().terms() {
            let (t, a) = exp.split_at(j);
            let mono = match self.monomials.get(a) {
                Some(r) => r.clone(),
                None => self.composition.monomial(a),
            };
            let term = mono.scale(c);
            let slot = out.entry(t.to_vec()).or_default();
            *slot = (&*slot + &term).rem_monic(m);
        }
        out.retain(|_, v| !v.is_zero());
        ThetaPoly::new(out)
    }

    pub fn is_zero(&self, e: &Element) -> bool {
        if self.faithful_normal_form {
            e.poly().is_zero()
        } else {
            self.rewrite(e).is_zero()
        }
    }

    pub fn key(&self, e: &Element) -> CanonicalKey {
        if self.faithful_normal_form {
            CanonicalKey::NormalForm(e.poly().terms().clone())
        } else {
            CanonicalKey::Theta(self.rewrite(e).into_terms())
        }
    }

    pub fn equal(&self, a: &Element, b: &Element) -> bool {
        self.is_zero(&(a - b))
    }

    /// Whether the zero test relies on an unproven irreducibility claim.
    pub fn irreducibility(&self) -> Irreducibility {
        self.composition.irreducibility
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> Domain {
        let p = DomainPresentation::new(vec![], vec![("i".into(), IntPoly::from_i64s(&[1, 0, 1]), None)]).unwrap();
        Domain::new(p).unwrap()
    }

    #[test]
    fn presentation_validation() {
        let bad = |c: &[i64]| DomainPresentation::new(vec![], vec![("a".into(), IntPoly::from_i64s(c), None)]);
        assert!(bad(&[]).is_err());
        assert!(bad(&[5]).is_err());
        let err = bad(&[-1, 0, 2]).unwrap_err().to_string();
        assert!(err.contains("2*a"), "{err}");
        assert!(bad(&[1, -2, 1]).is_err());
        assert!(matches!(bad(&[-2, 1, 1]), Err(Error::NotADomain(_))));
        assert!(DomainPresentation::new(vec!["x".into(), "x".into()], vec![]).is_err());
        assert!(DomainPresentation::new(vec!["2x".into()], vec![]).is_err());
    }

    #[test]
    fn zero_test_and_keys() {
        let d = gaussian();
        let e = d.parse("i^2 + 1").unwrap();
        assert!(d.is_zero(&e));
        assert!(!d.is_zero(&d.parse("i - 1").unwrap()));
        assert_eq!(d.key(&d.parse("(1+i)*(1-i)").unwrap()), d.key(&d.int(2)));
    }

    #[test]
    fn overlapping_fields_use_theta_keys() {
        // Q(sqrt2, sqrt8) = Q(sqrt2): per-generator normal forms are not faithful
        let p = DomainPresentation::new(
            vec![],
            vec![
                (
                    "r2".into(),
                    IntPoly::from_i64s(&[-2, 0, 1]),
                    Some(Rect::from_ints(0, 2, -1, 1).unwrap()),
                ),
                (
                    "r8".into(),
                    IntPoly::from_i64s(&[-8, 0, 1]),
                    Some(Rect::from_ints(0, 3, -1, 1).unwrap()),
                ),
            ],
        )
        .unwrap();
        let d = Domain::new(p).unwrap();
        assert_eq!(d.composition().f_theta.deg0(), 2);
        let e = d.parse("r8 - 2*r2").unwrap();
        assert!(!e.poly().is_zero());
        assert!(d.is_zero(&e));
        assert!(!d.is_zero(&d.parse("r8 + 2*r2").unwrap()));
    }
}
