//! Binary container for a [`CheckedMessage`]. All integers big-endian.
//!
//! | offset | size      | field                                   |
//! |--------|-----------|-----------------------------------------|
//! | 0      | 4         | magic `GCCD`                            |
//! | 4      | 1         | version (1)                             |
//! | 5      | 1         | padding mode (0 zero-fill, 1 clique-pin)|
//! | 6      | 2         | total order m                           |
//! | 8      | 2         | chromatic number n                      |
//! | 10     | 2         | pin size                                |
//! | 12     | 8         | payload length in bits l                |
//! | 20     | 2·m       | vertex colors                           |
//! | 20+2m  | ⌈l/8⌉     | payload, MSB-first, trailing bits zero  |

use thiserror::Error;

use crate::bits::{BitString, BitStringError};
use crate::codec::{CodecError, ExtensionPlan, PaddingMode};
use crate::scheme::{CheckedMessage, SchemeError};

pub const MAGIC: [u8; 4] = *b"GCCD";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    BadVersion(u8),
    #[error("unknown padding mode {0}")]
    BadMode(u8),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("color out of range: {0}")]
    ColorOutOfRange(String),
    #[error("{0} unexpected bytes after the payload")]
    TrailingGarbage(usize),
    #[error("header describes an impossible plan: {0}")]
    InvalidPlan(CodecError),
    #[error("payload bits past the declared length are not zero")]
    DirtyPadding,
    #[error("message too large for the wire format: {0}")]
    TooLarge(String),
}

pub fn serialize_message(msg: &CheckedMessage) -> Result<Vec<u8>, WireError> {
    let plan = msg.plan();
    let narrow = |what: &str, v: usize| u16::try_from(v).map_err(|_| WireError::TooLarge(format!("{what} = {v}")));
    let m = narrow("order", plan.total_order())?;
    let n = narrow("n", msg.n())?;
    let pin = narrow("pin size", plan.pin_size())?;
    let payload = msg.payload().to_bytes();

    let mut out = Vec::with_capacity(HEADER_LEN + 2 * usize::from(m) + payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(plan.mode().wire_code());
    out.extend_from_slice(&m.to_be_bytes());
    out.extend_from_slice(&n.to_be_bytes());
    out.extend_from_slice(&pin.to_be_bytes());
    out.extend_from_slice(&(plan.payload_len() as u64).to_be_bytes());
    for &c in msg.colors().colors() {
        out.extend_from_slice(&narrow("color", c)?.to_be_bytes());
    }
    out.extend_from_slice(&payload);
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8], WireError> {
        let end = self.at.checked_add(len).filter(|&e| e <= self.buf.len()).ok_or_else(|| {
            WireError::LengthMismatch(format!("{what} needs {len} bytes at offset {}, stream has {}", self.at, self.buf.len()))
        })?;
        let s = &self.buf[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8, WireError> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16, WireError> {
        Ok(u16::from_be_bytes(self.take(2, what)?.try_into().expect("2 bytes")))
    }

    fn u64(&mut self, what: &str) -> Result<u64, WireError> {
        Ok(u64::from_be_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }
}

pub fn parse_message(bytes: &[u8]) -> Result<CheckedMessage, WireError> {
    let mut r = Reader { buf: bytes, at: 0 };
    let magic: [u8; 4] = r.take(4, "magic")?.try_into().expect("4 bytes");
    if magic != MAGIC {
        return Err(WireError::BadMagic(magic));
    }
    let version = r.u8("version")?;
    if version != VERSION {
        return Err(WireError::BadVersion(version));
    }
    let mode_code = r.u8("mode")?;
    let mode = PaddingMode::from_wire_code(mode_code).ok_or(WireError::BadMode(mode_code))?;
    let m = usize::from(r.u16("order")?);
    let n = usize::from(r.u16("n")?);
    let pin = usize::from(r.u16("pin size")?);
    let len = r.u64("payload length")?;

    let len = usize::try_from(len).map_err(|_| WireError::LengthMismatch(format!("payload length {len} is not addressable")))?;
    let plan = ExtensionPlan::new(len, mode, pin).map_err(WireError::InvalidPlan)?;
    if plan.total_order() != m {
        return Err(WireError::LengthMismatch(format!(
            "header order {m} but a {len}-bit payload with this padding needs {}",
            plan.total_order()
        )));
    }
    if n == 0 || n > m {
        return Err(WireError::ColorOutOfRange(format!("n = {n} outside 1..={m}")));
    }

    let mut colors = Vec::with_capacity(m);
    for v in 1..=m {
        let c = usize::from(r.u16("color")?);
        if c >= n {
            return Err(WireError::ColorOutOfRange(format!("vertex {v} has color {c}, n = {n}")));
        }
        colors.push(c);
    }
    let payload_bytes = r.take(len.div_ceil(8), "payload")?;
    if r.at != bytes.len() {
        return Err(WireError::TrailingGarbage(bytes.len() - r.at));
    }
    let payload = BitString::from_bytes(payload_bytes, len).map_err(|e| match e {
        BitStringError::DirtyTrailingBits => WireError::DirtyPadding,
        other => WireError::LengthMismatch(other.to_string()),
    })?;

    CheckedMessage::from_parts(payload, plan, n, colors).map_err(|e| match e {
        SchemeError::ColorCount { declared, used } => {
            WireError::ColorOutOfRange(format!("n = {declared} but the coloring uses {used} colors"))
        }
        other => WireError::LengthMismatch(other.to_string()),
    })
}
