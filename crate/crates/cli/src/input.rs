use std::path::Path;

use anyhow::{bail, Context, Result};
use gccd_core::codec::PaddingMode;
use gccd_core::wire::parse_message;
use gccd_core::{BitString, CheckedMessage};
use num_bigint::BigUint;

use crate::{ModeArg, PaddingArgs, PayloadArgs};

impl PayloadArgs {
    pub fn is_given(&self) -> bool {
        self.bits.is_some() || self.hex.is_some() || self.dec.is_some()
    }

    /// Converts whichever literal was given into a bit string of the declared
    /// length. Numeric forms never guess leading zeros: `--dec` needs an
    /// explicit `--bits-len`, `--hex` defaults to four bits per digit.
    pub fn to_bits(&self) -> Result<BitString> {
        if let Some(bits) = &self.bits {
            let b: BitString = bits.parse().with_context(|| format!("--bits {bits:?}"))?;
            if let Some(len) = self.bits_len {
                if len != b.len() {
                    bail!("--bits has {} digits but --bits-len is {len}", b.len());
                }
            }
            return Ok(b);
        }
        if let Some(hex) = &self.hex {
            let digits = hex.strip_prefix("0x").or_else(|| hex.strip_prefix("0X")).unwrap_or(hex);
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_hexdigit()) {
                bail!("--hex {hex:?} is not a hexadecimal number");
            }
            let value = BigUint::parse_bytes(digits.as_bytes(), 16).expect("validated digits");
            let len = self.bits_len.unwrap_or(4 * digits.len());
            return BitString::from_biguint(&value, len).with_context(|| format!("--hex {hex}"));
        }
        if let Some(dec) = &self.dec {
            if dec.is_empty() || !dec.chars().all(|c| c.is_ascii_digit()) {
                bail!("--dec {dec:?} is not a decimal number");
            }
            let Some(len) = self.bits_len else {
                bail!("--dec needs --bits-len to fix the number of leading zeros");
            };
            let value = BigUint::parse_bytes(dec.as_bytes(), 10).expect("validated digits");
            return BitString::from_biguint(&value, len).with_context(|| format!("--dec {dec}"));
        }
        bail!("no payload given; use one of --bits, --hex or --dec")
    }
}

impl PaddingArgs {
    pub fn resolve(&self) -> (PaddingMode, usize) {
        match self.mode {
            ModeArg::Zero => (PaddingMode::ZeroFill, self.pin_size.unwrap_or(0)),
            ModeArg::Pin => (PaddingMode::CliquePin, self.pin_size.unwrap_or(0)),
        }
    }
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_message(path: &Path) -> Result<CheckedMessage> {
    let bytes = read_file(path)?;
    parse_message(&bytes).with_context(|| format!("{} is not a valid message", path.display()))
}

/// Parses `A..B` or `A..=B`, both inclusive.
pub fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once("..").with_context(|| format!("range {s:?} is not of the form A..B"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo: usize = a.trim().parse().with_context(|| format!("range start {a:?}"))?;
    let hi: usize = b.trim().parse().with_context(|| format!("range end {b:?}"))?;
    if lo > hi {
        bail!("empty range {s}");
    }
    Ok((lo, hi))
}
