use std::fmt;
use std::str::FromStr;

use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactlin::{Int, Rat};

/// An integer: a JSON number, or a decimal string when it does not fit `i64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonInt(pub Int);

/// A rational: a bare integer or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonRat(pub Rat);

fn serialize_int<S: Serializer>(n: &Int, s: S) -> Result<S::Ok, S::Error> {
    match n.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&n.to_string()),
    }
}

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_int(&self.0, s)
    }
}

impl Serialize for JsonRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            serialize_int(self.0.numer(), s)
        } else {
            s.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom()))
        }
    }
}

struct IntVisitor;

impl Visitor<'_> for IntVisitor {
    type Value = Int;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an integer")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
        Ok(Int::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
        Ok(Int::from(v))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
        Int::from_str(v.trim()).map_err(|_| E::custom(format!("{v:?} is not an integer")))
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(IntVisitor).map(JsonInt)
    }
}

struct RatVisitor;

impl Visitor<'_> for RatVisitor {
    type Value = Rat;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an integer or a \"p/q\" string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
        Ok(Rat::from_integer(Int::from(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
        Ok(Rat::from_integer(Int::from(v)))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
        let bad = || E::custom(format!("{v:?} is not an integer or \"p/q\" rational"));
        match v.split_once('/') {
            None => Int::from_str(v.trim())
                .map(Rat::from_integer)
                .map_err(|_| bad()),
            Some((p, q)) => {
                let p = Int::from_str(p.trim()).map_err(|_| bad())?;
                let q = Int::from_str(q.trim()).map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(E::custom(format!("{v:?} has a zero denominator")));
                }
                Ok(Rat::new(p, q))
            }
        }
    }
}

impl<'de> Deserialize<'de> for JsonRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(RatVisitor).map(JsonRat)
    }
}
