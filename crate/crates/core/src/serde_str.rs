//! Serde adapters that write big integers and rationals as decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{de, Deserialize, Deserializer, Serializer};

pub mod bigint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

pub mod bigint_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse().map_err(de::Error::custom))
            .collect()
    }
}

/// Rationals as `"num/den"` (denominator always written, even when 1).
pub mod rational {
    use super::*;

    pub fn to_string(v: &BigRational) -> String {
        format!("{}/{}", v.numer(), v.denom())
    }

    pub fn parse(s: &str) -> Option<BigRational> {
        let (n, d) = s.split_once('/')?;
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        Some(BigRational::new(n, d))
    }

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&to_string(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| de::Error::custom(format!("bad rational {s:?}")))
    }
}

pub mod rational_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.collect_str(&rational::to_string(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let raw = Option::<String>::deserialize(d)?;
        raw.map(|s| rational::parse(&s).ok_or_else(|| de::Error::custom("bad rational")))
            .transpose()
    }
}

pub mod rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&rational::to_string(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| rational::parse(s).ok_or_else(|| de::Error::custom("bad rational")))
            .collect()
    }
}

pub mod rational_opt_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Option<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.as_ref().map(rational::to_string))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Vec<Option<BigRational>>, D::Error> {
        let raw = Vec::<Option<String>>::deserialize(d)?;
        raw.iter()
            .map(|o| {
                o.as_ref()
                    .map(|s| rational::parse(s).ok_or_else(|| de::Error::custom("bad rational")))
                    .transpose()
            })
            .collect()
    }
}

/// Any `Display + FromStr` value as a string (used for `u128`).
pub mod display {
    use super::*;
    use std::fmt::Display;
    use std::str::FromStr;

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

pub mod bigint_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.collect_str(x),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(de::Error::custom))
            .transpose()
    }
}
