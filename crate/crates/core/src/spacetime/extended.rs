use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::format_significant;

/// A value in `[0, +inf]`; addition saturates at `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    pub fn finite(value: f64) -> Self {
        debug_assert!(value >= 0.0 && value.is_finite(), "{value}");
        ExtendedReal::Finite(value)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::Infinite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtendedReal::Finite(v) if *v == 0.0)
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            ExtendedReal::Infinite => None,
        }
    }

    /// `f64::INFINITY` for the infinite value.
    pub fn to_f64(&self) -> f64 {
        self.as_finite().unwrap_or(f64::INFINITY)
    }

    /// `self^s`, computed as `exp(s ln self)` with `0^s = 0`.
    pub fn powf(&self, s: f64) -> ExtendedReal {
        match *self {
            ExtendedReal::Finite(0.0) => ExtendedReal::ZERO,
            ExtendedReal::Finite(v) => ExtendedReal::Finite((s * v.ln()).exp()),
            ExtendedReal::Infinite => ExtendedReal::Infinite,
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: ExtendedReal) -> ExtendedReal {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinite,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => f.write_str(&format_significant(*v, 12)),
            ExtendedReal::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        if text == "inf" {
            return Ok(ExtendedReal::Infinite);
        }
        let value: f64 = text.parse().map_err(serde::de::Error::custom)?;
        if !(value >= 0.0 && value.is_finite()) {
            return Err(serde::de::Error::custom(format!("{text} is not in [0, inf)")));
        }
        Ok(ExtendedReal::Finite(value))
    }
}
