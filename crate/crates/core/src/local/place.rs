use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::check_prime;
use crate::error::{Error, Result};

/// A place of Q: a finite prime or the real place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Prime(u64),
    Infinity,
}

impl Place {
    pub fn prime(p: u64) -> Result<Place> {
        check_prime(p)?;
        Ok(Place::Prime(p))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Place::Prime(_))
    }

    pub fn as_prime(&self) -> Option<u64> {
        match *self {
            Place::Prime(p) => Some(p),
            Place::Infinity => None,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Place> {
        match s {
            "inf" | "infinity" | "oo" => Ok(Place::Infinity),
            _ => {
                let p: u64 = s.parse().map_err(|_| Error::Parse(format!("bad place `{s}`")))?;
                Place::prime(p)
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
