//! Exact rationals, planar rational points and their `"p/q"` string form.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Canonical text: always `p/q` with `q > 0`, so `3` prints as `3/1`.
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let d = BigInt::from_str(d).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(n, d))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter for a single rational stored as a string.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => parse_q(&s).map_err(D::Error::custom),
            serde_json::Value::Number(n) if n.is_i64() => Ok(qi(n.as_i64().unwrap())),
            other => Err(D::Error::custom(format!("expected rational string, got {other}"))),
        }
    }
}

/// A point (or vector) of the rational plane.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Pt {
    pub x: Q,
    pub y: Q,
}

impl Pt {
    pub fn new(x: Q, y: Q) -> Self {
        Pt { x, y }
    }

    pub fn ints(x: i64, y: i64) -> Self {
        Pt::new(qi(x), qi(y))
    }

    pub fn zero() -> Self {
        Pt::new(Q::zero(), Q::zero())
    }

    pub fn from_int_vec(v: [i64; 2]) -> Self {
        Pt::ints(v[0], v[1])
    }

    pub fn add(&self, o: &Pt) -> Pt {
        Pt::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Pt) -> Pt {
        Pt::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn scale(&self, t: &Q) -> Pt {
        Pt::new(&self.x * t, &self.y * t)
    }

    pub fn neg(&self) -> Pt {
        Pt::new(-&self.x, -&self.y)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// det(self, o) = self.x o.y - self.y o.x
    pub fn cross(&self, o: &Pt) -> Q {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn dot(&self, o: &Pt) -> Q {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn sup_norm(&self) -> Q {
        let (a, b) = (self.x.abs(), self.y.abs());
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }

    /// Primitive integer vector pointing the same way, if the coordinates are nonzero.
    pub fn primitive_direction(&self) -> Option<[i64; 2]> {
        if self.is_zero() {
            return None;
        }
        let l = num::integer::lcm(self.x.denom().clone(), self.y.denom().clone());
        let a = (&self.x * Q::from_integer(l.clone())).to_integer();
        let b = (&self.y * Q::from_integer(l)).to_integer();
        let g = num::integer::gcd(a.clone(), b.clone());
        Some([(a / &g).to_i64()?, (b / &g).to_i64()?])
    }
}

impl fmt::Display for Pt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_q(&self.x), format_q(&self.y))
    }
}

impl Serialize for Pt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_q(&self.x), format_q(&self.y)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "serde_q")] Q, #[serde(with = "serde_q")] Q);
        let W(x, y) = W::deserialize(d)?;
        Ok(Pt { x, y })
    }
}

pub fn is_primitive(v: [i64; 2]) -> bool {
    num::integer::gcd(v[0], v[1]) == 1
}

pub fn q_one() -> Q {
    Q::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for s in ["3/4", "-7/2", "0/1", "5/1"] {
            assert_eq!(format_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("6/8").unwrap(), q(3, 4));
        assert_eq!(parse_q("2").unwrap(), qi(2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn primitive_direction_reduces() {
        assert_eq!(Pt::new(q(1, 2), q(-1, 4)).primitive_direction(), Some([2, -1]));
        assert_eq!(Pt::ints(0, -3).primitive_direction(), Some([0, -1]));
        assert_eq!(Pt::zero().primitive_direction(), None);
    }
}
