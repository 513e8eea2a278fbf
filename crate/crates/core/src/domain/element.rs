use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::DomainPresentation;
use crate::arith::MultiPoly;
use crate::error::{Error, Result};

/// Member of `Z[S]`, held in per-generator normal form.
#[derive(Clone)]
pub struct Element {
    presentation: Arc<DomainPresentation>,
    poly: MultiPoly,
}

impl Element {
    /// Wraps `poly`, reducing algebraic exponents.
    pub fn from_poly(presentation: &Arc<DomainPresentation>, poly: MultiPoly) -> Result<Self> {
        if poly.vars() != presentation.vars() {
            return Err(Error::invalid("polynomial variables do not match the presentation"));
        }
        Ok(Element {
            presentation: presentation.clone(),
            poly: presentation.reduce(poly),
        })
    }

    pub fn from_int(presentation: &Arc<DomainPresentation>, n: i64) -> Self {
        Element::from_bigint(presentation, BigInt::from(n))
    }

    pub fn from_bigint(presentation: &Arc<DomainPresentation>, n: BigInt) -> Self {
        Element {
            presentation: presentation.clone(),
            poly: MultiPoly::constant(presentation.vars().clone(), BigRational::from_integer(n)),
        }
    }

    pub fn var(presentation: &Arc<DomainPresentation>, name: &str) -> Result<Self> {
        let idx = presentation
            .var_index(name)
            .ok_or_else(|| Error::invalid(format!("unknown generator {name:?}")))?;
        Element::from_poly(presentation, MultiPoly::var(presentation.vars().clone(), idx))
    }

    pub fn presentation(&self) -> &Arc<DomainPresentation> {
        &self.presentation
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    fn same(&self, o: &Element) -> Result<()> {
        if Arc::ptr_eq(&self.presentation, &o.presentation) || self.presentation == o.presentation {
            Ok(())
        } else {
            Err(Error::invalid("elements belong to different presentations"))
        }
    }

    pub fn checked_add(&self, o: &Element) -> Result<Element> {
        self.same(o)?;
        Ok(self.with(self.poly.add(&o.poly)))
    }

    pub fn checked_sub(&self, o: &Element) -> Result<Element> {
        self.same(o)?;
        Ok(self.with(self.poly.sub(&o.poly)))
    }

    pub fn checked_mul(&self, o: &Element) -> Result<Element> {
        self.same(o)?;
        Ok(self.with(self.presentation.reduce(self.poly.mul(&o.poly))))
    }

    pub fn pow(&self, mut e: u64) -> Element {
        let mut base = self.clone();
        let mut acc = Element::from_int(&self.presentation, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, k: &BigInt) -> Element {
        self.with(self.poly.scale(&BigRational::from_integer(k.clone())))
    }

    fn with(&self, poly: MultiPoly) -> Element {
        Element {
            presentation: self.presentation.clone(),
            poly,
        }
    }

    /// Constant value, when the element is a rational number.
    pub fn as_constant(&self) -> Option<BigRational> {
        self.poly.as_constant()
    }
}

impl PartialEq for Element {
    fn eq(&self, o: &Self) -> bool {
        self.same(o).is_ok() && self.poly == o.poly
    }
}

impl Eq for Element {}

impl std::hash::Hash for Element {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.poly.hash(h);
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.poly, f)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({})", self.poly)
    }
}

// Operator forms panic on mismatched presentations; the `checked_*`
// methods report it as an error instead.
impl Add for &Element {
    type Output = Element;
    fn add(self, o: &Element) -> Element {
        self.checked_add(o).expect("element arithmetic")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, o: &Element) -> Element {
        self.checked_sub(o).expect("element arithmetic")
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, o: &Element) -> Element {
        self.checked_mul(o).expect("element arithmetic")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.with(self.poly.neg())
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn arithmetic_examples() {
        let p = Arc::new(
            DomainPresentation::new(
                vec!["x".into()],
                vec![
                    ("r2".into(), IntPoly::from_i64s(&[-2, 0, 1]), None),
                    ("i".into(), IntPoly::from_i64s(&[1, 0, 1]), None),
                ],
            )
            .unwrap(),
        );
        let e = |s: &str| parse_element(s, &p).unwrap();
        assert_eq!(&e("1 + i") * &e("1 - i"), e("2"));
        assert_eq!(&e("r2") * &e("r2"), e("2"));
        let xr = &e("x") * &e("r2");
        assert_eq!((&xr + &xr).to_string(), "2*x*r2");
        assert_eq!(e("i").pow(7), e("-i"));
        let other = Arc::new(DomainPresentation::new(vec!["y".into()], vec![]).unwrap());
        assert!(e("x").checked_add(&Element::from_int(&other, 1)).is_err());
    }
}
