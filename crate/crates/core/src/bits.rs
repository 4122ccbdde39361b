use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A bitstring `w = w_n … w_1`.
///
/// Text is most-significant first, so `w_1` is the rightmost character.
/// Position 1 is the first suffix bit consumed by the search.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    // bits[0] = w_1
    bits: Vec<bool>,
}

impl BitString {
    pub fn empty() -> Self {
        BitString { bits: Vec::new() }
    }

    /// The `len` low bits of `value`, bit 0 becoming `w_1`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        BitString {
            bits: (0..len).map(|i| i < 64 && (value >> i) & 1 == 1).collect(),
        }
    }

    /// Bits listed from `w_1` upward.
    pub fn from_lsb_first(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `w_pos`, 1-based.
    pub fn bit(&self, pos: usize) -> bool {
        self.bits[pos - 1]
    }

    pub fn lsb_first(&self) -> &[bool] {
        &self.bits
    }

    /// `b·w'`: a new most significant bit at position `len + 1`.
    pub fn extended(&self, b: bool) -> Self {
        let mut bits = self.bits.clone();
        bits.push(b);
        BitString { bits }
    }

    /// Value with `w_1` as bit 0. Panics beyond 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.bits.len() <= 64, "bitstring longer than 64 bits");
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    /// Whether `self` ends with `suffix`.
    pub fn has_suffix(&self, suffix: &BitString) -> bool {
        suffix.len() <= self.len() && self.bits[..suffix.len()] == suffix.bits[..]
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.bits.iter().rev() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars().rev() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::InvalidQuery(format!("'{s}' is not a bitstring"))),
            }
        }
        Ok(BitString { bits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_is_msb_first() {
        let w: BitString = "1001".parse().unwrap();
        assert!(w.bit(1) && !w.bit(2) && !w.bit(3) && w.bit(4));
        assert_eq!(w.to_u64(), 9);
        assert_eq!(w.to_string(), "1001");
        assert_eq!(BitString::from_u64(9, 4), w);
        assert_eq!(BitString::empty().to_string(), "");
    }

    #[test]
    fn extension_prepends_in_text() {
        let w: BitString = "01".parse().unwrap();
        assert_eq!(w.extended(false).to_string(), "001");
        assert_eq!(w.extended(true).to_string(), "101");
        assert!("1001".parse::<BitString>().unwrap().has_suffix(&"001".parse().unwrap()));
        assert!(!"1001".parse::<BitString>().unwrap().has_suffix(&"11".parse().unwrap()));
    }

    #[test]
    fn rejects_other_characters() {
        assert!("10a".parse::<BitString>().is_err());
    }
}
