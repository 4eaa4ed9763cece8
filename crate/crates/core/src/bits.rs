//! Fixed-capacity binary strings.
//!
//! A [`BitString`] packs up to [`MAX_LEN`] bits into a `u128`, with the first
//! symbol in the most significant used position. Numeric order on the packed
//! value therefore coincides with lexicographic order for strings of equal
//! length, which the codebook enumerators rely on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Longest supported string.
pub const MAX_LEN: usize = 128;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    // Ordering derives on (len, value): shorter strings first, then lexicographic.
    len: u16,
    value: u128,
}

impl BitString {
    /// Builds a string from its packed value. Bits above `len` must be clear.
    pub fn from_value(value: u128, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::Range(format!("length {len} outside 1..={MAX_LEN}")));
        }
        if len < 128 && value >> len != 0 {
            return Err(Error::Range(format!("value {value:#x} does not fit in {len} bits")));
        }
        Ok(Self { len: len as u16, value })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() || bits.len() > MAX_LEN {
            return Err(Error::Range(format!(
                "length {} outside 1..={MAX_LEN}",
                bits.len()
            )));
        }
        let mut value = 0u128;
        for &b in bits {
            if b > 1 {
                return Err(Error::Range(format!("symbol {b} is not binary")));
            }
            value = (value << 1) | b as u128;
        }
        Ok(Self { len: bits.len() as u16, value })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_value(0, len)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    /// Always false; a `BitString` holds at least one symbol.
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn value(&self) -> u128 {
        self.value
    }

    /// Symbol at 0-based position `p`.
    #[inline]
    pub fn get(&self, p: usize) -> u8 {
        debug_assert!(p < self.len());
        ((self.value >> (self.len() - 1 - p)) & 1) as u8
    }

    /// Copy with position `p` set to `b`.
    pub fn with_bit(&self, p: usize, b: u8) -> Self {
        let shift = self.len() - 1 - p;
        let cleared = self.value & !(1u128 << shift);
        Self { len: self.len, value: cleared | ((b as u128 & 1) << shift) }
    }

    /// Number of ones in the 0-based half-open range `start..end`.
    #[inline]
    pub fn ones_in(&self, start: usize, end: usize) -> u32 {
        debug_assert!(start <= end && end <= self.len());
        let width = end - start;
        if width == 0 {
            return 0;
        }
        let shifted = self.value >> (self.len() - end);
        let mask = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
        (shifted & mask).count_ones()
    }

    pub fn weight(&self) -> u32 {
        self.value.count_ones()
    }

    pub fn reverse(&self) -> Self {
        let n = self.len();
        let value = self.value.reverse_bits() >> (128 - n);
        Self { len: self.len, value }
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(move |p| self.get(p))
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.iter().collect()
    }

    /// Removes the symbol at 0-based position `p`.
    pub fn remove(&self, p: usize) -> Result<Self> {
        let mut bits = self.to_vec();
        if p >= bits.len() || bits.len() == 1 {
            return Err(Error::Range(format!("cannot remove position {p}")));
        }
        bits.remove(p);
        Self::from_bits(&bits)
    }

    /// Inserts `b` before 0-based position `p`.
    pub fn insert(&self, p: usize, b: u8) -> Result<Self> {
        let mut bits = self.to_vec();
        if p > bits.len() {
            return Err(Error::Range(format!("cannot insert at position {p}")));
        }
        bits.insert(p, b);
        Self::from_bits(&bits)
    }

    /// Every string of length `n`, in lexicographic order.
    pub fn all(n: usize) -> Result<impl Iterator<Item = BitString>> {
        if n == 0 || n > 64 {
            return Err(Error::Resource(format!("cannot enumerate all strings of length {n}")));
        }
        Ok((0..(1u128 << n)).map(move |v| BitString { len: n as u16, value: v }))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .bytes()
            .map(|c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::Range(format!("invalid symbol {:?} in bit string", c as char))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(&bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        let s = bs("001010111");
        assert_eq!(s.len(), 9);
        assert_eq!(s.to_string(), "001010111");
        assert_eq!(s.get(0), 0);
        assert_eq!(s.get(8), 1);
        assert!("0120".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().is_err());
    }

    #[test]
    fn lexicographic_order_matches_value() {
        assert!(bs("0011") < bs("0101"));
        assert!(bs("0111") < bs("1000"));
    }

    #[test]
    fn ones_and_reverse() {
        let s = bs("001010111");
        assert_eq!(s.ones_in(0, 7), 3);
        assert_eq!(s.ones_in(2, 9), 5);
        assert_eq!(s.weight(), 5);
        assert_eq!(s.reverse().to_string(), "111010100");
    }

    #[test]
    fn full_width_strings() {
        let bits: Vec<u8> = (0..128).map(|i| (i % 3 == 0) as u8).collect();
        let s = BitString::from_bits(&bits).unwrap();
        assert_eq!(s.len(), 128);
        assert_eq!(s.to_vec(), bits);
        assert_eq!(s.reverse().reverse(), s);
        assert_eq!(s.ones_in(0, 128), s.weight());
    }

    #[test]
    fn edit_operations() {
        let s = bs("0110");
        assert_eq!(s.with_bit(0, 1).to_string(), "1110");
        assert_eq!(s.remove(1).unwrap().to_string(), "010");
        assert_eq!(s.insert(2, 0).unwrap().to_string(), "01010");
    }
}
