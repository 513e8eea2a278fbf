//! JSON helpers: integers stay JSON numbers while they fit in an i64 and
//! fall back to decimal strings beyond that.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Text(String),
}

fn to_repr(c: &BigInt) -> IntRepr {
    match c.to_i64() {
        Some(v) => IntRepr::Small(v),
        None => IntRepr::Text(c.to_string()),
    }
}

fn from_repr<E: serde::de::Error>(r: IntRepr) -> Result<BigInt, E> {
    match r {
        IntRepr::Small(v) => Ok(BigInt::from(v)),
        IntRepr::Text(s) => s
            .trim()
            .parse()
            .map_err(|_| E::custom(format!("not an integer: {s:?}"))),
    }
}

pub fn serialize_int_seq<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(to_repr))
}

pub fn deserialize_int_seq<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
    let raw: Vec<IntRepr> = Vec::deserialize(d)?;
    raw.into_iter().map(from_repr).collect()
}

pub fn int_to_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(c.to_string()),
    }
}

pub mod bigint_string {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        to_repr(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        from_repr(IntRepr::deserialize(d)?)
    }
}

pub mod biguint_num {
    use num_bigint::BigUint;

    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        to_repr(&BigInt::from(v.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let v = from_repr::<D::Error>(IntRepr::deserialize(d)?)?;
        v.to_biguint()
            .ok_or_else(|| D::Error::custom("expected a non-negative integer"))
    }
}

pub mod bigint_map {
    use std::collections::BTreeMap;

    use super::*;

    pub fn serialize<S: Serializer>(v: &BTreeMap<String, BigInt>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(v.iter().map(|(k, x)| (k, to_repr(x))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, BigInt>, D::Error> {
        let raw: BTreeMap<String, IntRepr> = BTreeMap::deserialize(d)?;
        raw.into_iter().map(|(k, v)| from_repr(v).map(|x| (k, x))).collect()
    }
}

pub mod biguint_seq {
    use num_bigint::BigUint;

    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| to_repr(&BigInt::from(x.clone()))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw: Vec<IntRepr> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|r| {
                from_repr::<D::Error>(r)?
                    .to_biguint()
                    .ok_or_else(|| D::Error::custom("expected a non-negative integer"))
            })
            .collect()
    }
}

pub mod biguint_map {
    use std::collections::BTreeMap;

    use num_bigint::BigUint;

    use super::*;

    pub fn serialize<S: Serializer>(v: &BTreeMap<String, BigUint>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(v.iter().map(|(k, x)| (k, to_repr(&BigInt::from(x.clone())))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, BigUint>, D::Error> {
        let raw: BTreeMap<String, IntRepr> = BTreeMap::deserialize(d)?;
        raw.into_iter()
            .map(|(k, r)| {
                let v = from_repr::<D::Error>(r)?
                    .to_biguint()
                    .ok_or_else(|| D::Error::custom("expected a non-negative integer"))?;
                Ok((k, v))
            })
            .collect()
    }
}
