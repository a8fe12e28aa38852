//! Exact fixed-point decimals.
//!
//! Attribute values and rule thresholds are compared for exact equality, so
//! they are stored as integers scaled by 10^4 rather than as binary floats.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of fractional digits kept.
pub const PRECISION: u32 = 4;
/// `10^PRECISION`.
pub const SCALE: i64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid decimal {text:?}: {reason}")]
pub struct ParseDecimalError {
    pub text: String,
    pub reason: &'static str,
}

/// A decimal number with four fractional digits, stored as a scaled integer.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decimal(i64);

impl Decimal {
    pub const ZERO: Decimal = Decimal(0);
    pub const ONE: Decimal = Decimal(SCALE);

    pub const fn from_scaled(scaled: i64) -> Self {
        Decimal(scaled)
    }

    pub const fn from_int(value: i64) -> Self {
        Decimal(value * SCALE)
    }

    pub const fn scaled(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    /// Rounds `numerator / denominator` (both in scaled units of the result)
    /// to `decimals` fractional digits, half away from zero.
    pub(crate) fn round_quotient(numerator: i128, denominator: i128, decimals: u32) -> Self {
        assert!(denominator != 0, "zero denominator");
        let decimals = decimals.min(PRECISION);
        let unit = 10i128.pow(PRECISION - decimals);
        let den = denominator * unit;
        let (num, den) = if den < 0 { (-numerator, -den) } else { (numerator, den) };
        let q = if num >= 0 {
            (2 * num + den) / (2 * den)
        } else {
            -((-2 * num + den) / (2 * den))
        };
        Decimal((q * unit) as i64)
    }

    /// Renders with at least `min_decimals` fractional digits (trailing zeros
    /// beyond that are dropped). Integers are printed without a point.
    pub fn to_string_min(self, min_decimals: u32) -> String {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let int = abs / SCALE as u64;
        let frac = abs % SCALE as u64;
        if frac == 0 {
            return format!("{sign}{int}");
        }
        let mut digits = format!("{frac:04}");
        while digits.len() > min_decimals as usize && digits.ends_with('0') {
            digits.pop();
        }
        format!("{sign}{int}.{digits}")
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_min(0))
    }
}

impl fmt::Debug for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Decimal {
    type Err = ParseDecimalError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParseDecimalError {
            text: text.to_string(),
            reason,
        };
        let s = text.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            Some(_) => (false, s),
            None => return Err(err("empty")),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err("no digits"));
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(err("unexpected character"));
        }
        let frac_trimmed = frac_part.trim_end_matches('0');
        if frac_trimmed.len() > PRECISION as usize {
            return Err(err("more than four fractional digits"));
        }
        let int: i64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| err("integer part out of range"))?
        };
        let mut frac: i64 = 0;
        for (i, b) in frac_trimmed.bytes().enumerate() {
            frac += i64::from(b - b'0') * 10i64.pow(PRECISION - 1 - i as u32);
        }
        let magnitude = int
            .checked_mul(SCALE)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(|| err("out of range"))?;
        Ok(Decimal(if negative { -magnitude } else { magnitude }))
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0 % SCALE == 0 {
            serializer.serialize_i64(self.0 / SCALE)
        } else {
            serializer.serialize_f64(self.to_f64())
        }
    }
}

struct DecimalVisitor;

impl Visitor<'_> for DecimalVisitor {
    type Value = Decimal;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a decimal number with at most four fractional digits")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Decimal, E> {
        v.checked_mul(SCALE)
            .map(Decimal)
            .ok_or_else(|| E::custom("decimal out of range"))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Decimal, E> {
        let v = i64::try_from(v).map_err(|_| E::custom("decimal out of range"))?;
        self.visit_i64(v)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Decimal, E> {
        // Shortest round-trip rendering recovers the literal written in the file.
        format!("{v}").parse().map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Decimal, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(DecimalVisitor)
    }
}
