//! Binary basis-state keys.
//!
//! A key is displayed MSB-first: the string `"b2 b1 b0"` maps to the integer
//! `b2·4 + b1·2 + b0`, and character `i` from the right is qubit `i`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Widest register a key may address.
pub const MAX_KEY_WIDTH: usize = 63;

/// One computational basis state of an `n`-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisKey {
    width: usize,
    value: u64,
}

impl BasisKey {
    pub fn new(value: u64, width: usize) -> Result<Self> {
        if width == 0 || width > MAX_KEY_WIDTH {
            return Err(Error::InvalidArgument(format!(
                "key width must be in 1..={MAX_KEY_WIDTH}, got {width}"
            )));
        }
        if value >> width != 0 {
            return Err(Error::InvalidArgument(format!(
                "value {value} does not fit in {width} bits"
            )));
        }
        Ok(Self { width, value })
    }

    /// Parses an MSB-first bit string such as `"101"`.
    pub fn parse(bits: &str) -> Result<Self> {
        if bits.is_empty()
            || bits.len() > MAX_KEY_WIDTH
            || !bits.bytes().all(|b| b == b'0' || b == b'1')
        {
            return Err(Error::InvalidKey(bits.to_string()));
        }
        let value = bits
            .bytes()
            .fold(0u64, |acc, b| (acc << 1) | u64::from(b - b'0'));
        Ok(Self {
            width: bits.len(),
            value,
        })
    }

    /// Parses and checks the width against a register.
    pub fn parse_with_width(bits: &str, width: usize) -> Result<Self> {
        let key = Self::parse(bits)?;
        key.expect_width(width)?;
        Ok(key)
    }

    pub fn all_ones(width: usize) -> Result<Self> {
        if width == 0 || width > MAX_KEY_WIDTH {
            return Err(Error::InvalidArgument(format!(
                "key width must be in 1..={MAX_KEY_WIDTH}, got {width}"
            )));
        }
        Self::new((1u64 << width) - 1, width)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn index(&self) -> usize {
        self.value as usize
    }

    /// Bit carried by `qubit` (qubit 0 is the least significant bit).
    pub fn bit(&self, qubit: usize) -> bool {
        qubit < self.width && (self.value >> qubit) & 1 == 1
    }

    pub fn bits(&self) -> String {
        (0..self.width)
            .rev()
            .map(|q| if self.bit(q) { '1' } else { '0' })
            .collect()
    }

    pub fn expect_width(&self, width: usize) -> Result<()> {
        if self.width != width {
            return Err(Error::WidthMismatch {
                expected: width,
                found: self.width,
            });
        }
        Ok(())
    }
}

/// MSB-first label of basis index `index` in an `n_qubits` register.
pub fn bit_label(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .rev()
        .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bits())
    }
}

impl FromStr for BasisKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for BasisKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.bits())
    }
}

impl<'de> Deserialize<'de> for BasisKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}
