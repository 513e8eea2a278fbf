use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::constraints::{ConstraintKind, ConstraintSet};
use super::element::Element;
use super::{Domain, DomainPresentation};
use crate::arith::IntPoly;
use crate::error::{Error, Result};
use crate::interval::Rect;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecAlgebraic {
    pub name: String,
    #[serde(
        serialize_with = "crate::serde_util::serialize_int_seq",
        deserialize_with = "crate::serde_util::deserialize_int_seq"
    )]
    pub minpoly: Vec<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isolate: Option<Rect>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    #[serde(default)]
    pub kinds: Vec<ConstraintKind>,
    #[serde(default)]
    pub custom: Vec<String>,
}

/// JSON input describing a presentation, a named set and its constraints.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default)]
    pub transcendentals: Vec<String>,
    #[serde(default)]
    pub algebraics: Vec<SpecAlgebraic>,
    #[serde(default)]
    pub set: BTreeMap<String, String>,
    #[serde(default)]
    pub constraints: ConstraintSpec,
    /// Run options; command-line flags take precedence.
    #[serde(default)]
    pub options: BTreeMap<String, serde_json::Value>,
}

/// Everything built from a spec file.
pub struct LoadedSpec {
    pub domain: Domain,
    pub set: Vec<(String, Element)>,
    pub constraints: ConstraintSet,
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("spec file: {e}")))
    }

    pub fn presentation(&self) -> Result<DomainPresentation> {
        DomainPresentation::new(
            self.transcendentals.clone(),
            self.algebraics
                .iter()
                .map(|a| (a.name.clone(), IntPoly::new(a.minpoly.clone()), a.isolate.clone()))
                .collect(),
        )
    }

    pub fn load(&self) -> Result<LoadedSpec> {
        let domain = Domain::new(self.presentation()?)?;
        let set = self
            .set
            .iter()
            .map(|(k, v)| Ok((k.clone(), domain.parse(v).map_err(|e| context(e, k))?)))
            .collect::<Result<Vec<_>>>()?;
        let mut constraints = ConstraintSet::new();
        for kind in &self.constraints.kinds {
            if *kind == ConstraintKind::Custom {
                continue;
            }
            if set.is_empty() {
                return Err(Error::invalid(format!(
                    "constraint kind {kind:?} needs a non-empty set"
                )));
            }
            constraints.extend_kind(&domain, *kind, &set);
        }
        for (i, text) in self.constraints.custom.iter().enumerate() {
            let e = domain.parse(text).map_err(|e| context(e, &format!("custom[{i}]")))?;
            if domain.is_zero(&e) {
                return Err(Error::NotADomain(format!(
                    "custom constraint {text:?} is zero in the domain"
                )));
            }
            constraints.push(&domain, e, format!("custom[{i}]: {text}"));
        }
        Ok(LoadedSpec {
            domain,
            set,
            constraints,
        })
    }
}

fn context(e: Error, what: &str) -> Error {
    match e {
        Error::Parse { position, message } => Error::Parse {
            position,
            message: format!("{message} (in {what})"),
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_example_spec() {
        let spec = SpecFile::from_json(
            r#"{"algebraics": [{"name": "r2", "minpoly": [-2, 0, 1]}],
                "set": {"a": "r2", "b": "r2 + 1"},
                "constraints": {"kinds": ["pairwise-differences"], "custom": ["r2 - 1"]}}"#,
        )
        .unwrap();
        let l = spec.load().unwrap();
        assert_eq!(l.set.len(), 2);
        assert_eq!(l.constraints.len(), 2);
        assert!(SpecFile::from_json(r#"{"algebraics": [], "bogus": 1}"#).is_err());
        let zero = SpecFile::from_json(
            r#"{"algebraics": [{"name": "i", "minpoly": [1, 0, 1]}], "constraints": {"custom": ["i^2 + 1"]}}"#,
        )
        .unwrap();
        assert!(matches!(zero.load(), Err(Error::NotADomain(_))));
    }
}
