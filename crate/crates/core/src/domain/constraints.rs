use std::collections::HashSet;

use serde::{Deserialize, Serialize, Serializer};

use super::element::Element;
use super::{CanonicalKey, Domain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    PairwiseDifferences,
    SumDifferences,
    ProductDifferences,
    Custom,
}

impl std::str::FromStr for ConstraintKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown constraint kind {s:?}"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstraintItem {
    #[serde(serialize_with = "as_text")]
    pub element: Element,
    pub label: String,
}

fn as_text<S: Serializer>(e: &Element, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(e)
}

/// Non-zero elements that must stay non-zero under the reduction map.
/// Items are distinct as domain elements; the first label wins.
#[derive(Clone, Debug, Default, Serialize)]
#[serde(transparent)]
pub struct ConstraintSet {
    items: Vec<ConstraintItem>,
    #[serde(skip)]
    keys: HashSet<CanonicalKey>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        ConstraintSet::default()
    }

    pub fn items(&self) -> &[ConstraintItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.items.iter().map(|i| &i.element)
    }

    /// Adds `e` unless it is zero or already present; returns whether it
    /// was added.
    pub fn push(&mut self, domain: &Domain, e: Element, label: impl Into<String>) -> bool {
        if domain.is_zero(&e) {
            return false;
        }
        if !self.keys.insert(domain.key(&e)) {
            return false;
        }
        self.items.push(ConstraintItem {
            element: e,
            label: label.into(),
        });
        true
    }

    /// Emits the difference family of `kind` over the named inputs.
    pub fn extend_kind(&mut self, domain: &Domain, kind: ConstraintKind, inputs: &[(String, Element)]) {
        match kind {
            ConstraintKind::Custom => {
                for (name, e) in inputs {
                    self.push(domain, e.clone(), format!("custom {name}"));
                }
            }
            ConstraintKind::PairwiseDifferences => {
                for (i, (na, a)) in inputs.iter().enumerate() {
                    for (nb, b) in &inputs[i + 1..] {
                        self.push(domain, a - b, format!("{na} - {nb}"));
                    }
                }
            }
            ConstraintKind::SumDifferences | ConstraintKind::ProductDifferences => {
                let sum = kind == ConstraintKind::SumDifferences;
                let op = if sum { "+" } else { "*" };
                let mut seen = HashSet::new();
                let mut values: Vec<(String, Element)> = Vec::new();
                for (na, a) in inputs {
                    for (nb, b) in inputs {
                        let v = if sum { a + b } else { a * b };
                        if seen.insert(domain.key(&v)) {
                            values.push((format!("({na} {op} {nb})"), v));
                        }
                    }
                }
                for (k, (lu, u)) in values.iter().enumerate() {
                    for (lv, v) in &values[k + 1..] {
                        self.push(domain, u - v, format!("{lu} - {lv}"));
                    }
                }
            }
        }
    }

    pub fn build(domain: &Domain, kind: ConstraintKind, inputs: &[(String, Element)]) -> Self {
        let mut s = ConstraintSet::new();
        s.extend_kind(domain, kind, inputs);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    fn gaussian() -> Domain {
        let p = DomainPresentation::new(vec![], vec![("i".into(), IntPoly::from_i64s(&[1, 0, 1]), None)]).unwrap();
        Domain::new(p).unwrap()
    }

    fn named(d: &Domain, xs: &[&str]) -> Vec<(String, Element)> {
        xs.iter().map(|s| (s.to_string(), d.parse(s).unwrap())).collect()
    }

    #[test]
    fn difference_families() {
        let d = gaussian();
        let s = ConstraintSet::build(&d, ConstraintKind::PairwiseDifferences, &named(&d, &["0", "1", "i"]));
        assert_eq!(s.len(), 3);
        let s = ConstraintSet::build(&d, ConstraintKind::SumDifferences, &named(&d, &["0", "1"]));
        let got: HashSet<String> = s.elements().map(|e| e.to_string()).collect();
        assert_eq!(got, ["-1", "-2"].iter().map(|s| s.to_string()).collect());
        let s = ConstraintSet::build(&d, ConstraintKind::ProductDifferences, &named(&d, &["1", "i"]));
        let want: HashSet<CanonicalKey> = ["1 - i", "2", "i + 1"]
            .iter()
            .map(|t| d.key(&d.parse(t).unwrap()))
            .collect();
        let got: HashSet<CanonicalKey> = s.elements().map(|e| d.key(e)).collect();
        assert_eq!(got, want);
        assert_eq!(s.len(), 3);
        let s = ConstraintSet::build(&d, ConstraintKind::Custom, &named(&d, &["i^2 + 1", "i", "i"]));
        assert_eq!(s.len(), 1);
    }
}
