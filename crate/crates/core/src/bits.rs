use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitStringError {
    #[error("invalid bit character {0:?} (expected '0' or '1')")]
    InvalidChar(char),
    #[error("value needs {needed} bits but only {declared} were declared")]
    ValueTooWide { needed: u64, declared: usize },
    #[error("{bytes} bytes cannot hold {bits} bits")]
    ShortBuffer { bytes: usize, bits: usize },
    #[error("bits past the declared length must be zero")]
    DirtyTrailingBits,
}

/// An ordered payload of bits with an explicit length.
///
/// Position 0 is the first serialized below-diagonal entry. Leading zeros are
/// significant, so `0110` and `110` are different payloads.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    /// Low `len` bits of `word`, bit `t` of the word becoming position `t`.
    pub fn from_word(word: u64, len: usize) -> Self {
        assert!(len <= 64, "from_word supports at most 64 bits");
        Self { bits: (0..len).map(|t| (word >> t) & 1 == 1).collect() }
    }

    /// Inverse of [`BitString::from_word`]; `None` when longer than 64 bits.
    pub fn to_word(&self) -> Option<u64> {
        if self.bits.len() > 64 {
            return None;
        }
        Some(self.bits.iter().enumerate().fold(0u64, |w, (t, &b)| w | (u64::from(b) << t)))
    }

    /// Fixed-width big-endian rendering of a non-negative integer: the most
    /// significant of the `len` bits lands at position 0.
    pub fn from_biguint(value: &BigUint, len: usize) -> Result<Self, BitStringError> {
        let needed = value.bits();
        if needed > len as u64 {
            return Err(BitStringError::ValueTooWide { needed, declared: len });
        }
        let bits = (0..len).map(|pos| value.bit((len - 1 - pos) as u64)).collect();
        Ok(Self { bits })
    }

    pub fn to_biguint(&self) -> BigUint {
        let mut value = BigUint::default();
        for (pos, &b) in self.bits.iter().enumerate() {
            if b {
                value.set_bit((self.bits.len() - 1 - pos) as u64, true);
            }
        }
        value
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, pos: usize) -> Option<bool> {
        self.bits.get(pos).copied()
    }

    pub fn flip(&mut self, pos: usize) {
        self.bits[pos] = !self.bits[pos];
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Positions where `self` and `other` differ. Lengths must match.
    pub fn diff_positions(&self, other: &BitString) -> Vec<usize> {
        assert_eq!(self.len(), other.len(), "bit strings of different length");
        (0..self.len()).filter(|&t| self.bits[t] != other.bits[t]).collect()
    }

    /// MSB-first packing: position 0 is the high bit of byte 0. Unused
    /// trailing bits are zero.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.bits.len().div_ceil(8)];
        for (t, &b) in self.bits.iter().enumerate() {
            if b {
                out[t / 8] |= 0x80 >> (t % 8);
            }
        }
        out
    }

    /// Unpacks exactly `len` bits; `bytes` must be `ceil(len / 8)` long with
    /// zeroed trailing bits.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self, BitStringError> {
        if bytes.len() != len.div_ceil(8) {
            return Err(BitStringError::ShortBuffer { bytes: bytes.len(), bits: len });
        }
        let bits: Vec<bool> = (0..len).map(|t| bytes[t / 8] & (0x80 >> (t % 8)) != 0).collect();
        if len % 8 != 0 {
            let tail_mask = 0xFFu8 >> (len % 8);
            if bytes[bytes.len() - 1] & tail_mask != 0 {
                return Err(BitStringError::DirtyTrailingBits);
            }
        }
        Ok(Self { bits })
    }
}

impl FromStr for BitString {
    type Err = BitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitStringError::InvalidChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self::new(bits)
    }
}
