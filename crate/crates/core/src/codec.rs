//! Bit strings to graphs and back through the below-diagonal adjacency
//! entries, read row by row: a₂₁, a₃₁, a₃₂, a₄₁, a₄₂, a₄₃, …
//!
//! A payload whose length is not triangular is extended with padding entries
//! that both endpoints regenerate from an [`ExtensionPlan`]. Padding is never
//! transmitted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::coloring::Coloring;
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("({row}, {col}) is not a below-diagonal position of an order-{order} matrix")]
    InvalidPosition { row: usize, col: usize, order: usize },
    #[error("index {index} outside the {capacity} below-diagonal slots of an order-{order} matrix")]
    IndexOutOfRange { index: usize, capacity: usize, order: usize },
    #[error("empty payloads are not supported")]
    EmptyPayload,
    #[error("zero-fill padding takes no pinned block (got pin size {0})")]
    PinWithZeroFill(usize),
    #[error("clique pinning needs a pin size of at least 1")]
    MissingPinSize,
    #[error("position {index} lies inside the {payload_len}-bit payload region")]
    InsidePayload { index: usize, payload_len: usize },
    #[error("payload has {actual} bits but the plan expects {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("{len} bits exceed the {capacity} slots of an order-{order} graph")]
    CapacityExceeded { len: usize, capacity: usize, order: usize },
    #[error("coloring covers {actual} vertices, graph has {expected}")]
    ColoringLength { expected: usize, actual: usize },
    #[error("plan needs more than {MAX_PLAN_ORDER} vertices")]
    OrderTooLarge,
}

/// Largest total order an [`ExtensionPlan`] may describe.
pub const MAX_PLAN_ORDER: usize = 1 << 20;

/// Number of below-diagonal slots in an order-`m` adjacency matrix.
pub const fn capacity(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// A below-diagonal entry `a_ij` (1-based, `j < i`) and its serialization index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrianglePosition {
    pub row: usize,
    pub col: usize,
    pub index: usize,
}

pub fn pos_of(row: usize, col: usize, order: usize) -> Result<usize, CodecError> {
    if col < 1 || col >= row || row > order {
        return Err(CodecError::InvalidPosition { row, col, order });
    }
    Ok((row - 1) * (row - 2) / 2 + (col - 1))
}

pub fn pair_at(index: usize, order: usize) -> Result<(usize, usize), CodecError> {
    let cap = capacity(order);
    if index >= cap {
        return Err(CodecError::IndexOutOfRange { index, capacity: cap, order });
    }
    // r = row - 1 satisfies r(r-1)/2 <= index < r(r+1)/2.
    let r = ((8 * index as u64 + 1).isqrt() as usize).div_ceil(2);
    let col = index - r * (r - 1) / 2 + 1;
    Ok((r + 1, col))
}

/// All positions of an order-`m` triangle in serialization order.
pub fn positions(order: usize) -> impl Iterator<Item = TrianglePosition> {
    (2..=order)
        .flat_map(|row| (1..row).map(move |col| (row, col)))
        .enumerate()
        .map(|(index, (row, col))| TrianglePosition { row, col, index })
}

/// Smallest order whose triangle holds `len` bits, and the unused slack.
pub fn order_for_length(len: usize) -> Result<(usize, usize), CodecError> {
    if len == 0 {
        return Err(CodecError::EmptyPayload);
    }
    if len > capacity(MAX_PLAN_ORDER) {
        return Err(CodecError::OrderTooLarge);
    }
    let mut m = ((8 * len as u64 + 1).isqrt() as usize).div_ceil(2);
    while capacity(m) < len {
        m += 1;
    }
    Ok((m, capacity(m) - len))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaddingMode {
    /// Unused slots are 0; the payload graph is only enlarged when needed.
    ZeroFill,
    /// A complete block on `pin_size` extra vertices, disjoint from the
    /// payload vertices, is appended. The extended graph then has chromatic
    /// number `max(χ(payload graph), pin_size)`.
    CliquePin,
}

impl PaddingMode {
    pub fn wire_code(self) -> u8 {
        match self {
            PaddingMode::ZeroFill => 0,
            PaddingMode::CliquePin => 1,
        }
    }

    pub fn from_wire_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(PaddingMode::ZeroFill),
            1 => Some(PaddingMode::CliquePin),
            _ => None,
        }
    }
}

/// How a payload of a given length is laid out in an adjacency triangle.
/// A pure function of `(payload_len, mode, pin_size)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtensionPlan {
    payload_len: usize,
    payload_order: usize,
    total_order: usize,
    mode: PaddingMode,
    pin_size: usize,
}

impl ExtensionPlan {
    pub fn new(payload_len: usize, mode: PaddingMode, pin_size: usize) -> Result<Self, CodecError> {
        let (payload_order, _) = order_for_length(payload_len)?;
        let total_order = match mode {
            PaddingMode::ZeroFill if pin_size != 0 => return Err(CodecError::PinWithZeroFill(pin_size)),
            PaddingMode::ZeroFill => payload_order,
            PaddingMode::CliquePin if pin_size == 0 => return Err(CodecError::MissingPinSize),
            PaddingMode::CliquePin => payload_order.saturating_add(pin_size),
        };
        if total_order > MAX_PLAN_ORDER {
            return Err(CodecError::OrderTooLarge);
        }
        Ok(Self { payload_len, payload_order, total_order, mode, pin_size })
    }

    pub fn zero_fill(payload_len: usize) -> Result<Self, CodecError> {
        Self::new(payload_len, PaddingMode::ZeroFill, 0)
    }

    pub fn payload_len(&self) -> usize {
        self.payload_len
    }

    pub fn payload_order(&self) -> usize {
        self.payload_order
    }

    pub fn total_order(&self) -> usize {
        self.total_order
    }

    pub fn mode(&self) -> PaddingMode {
        self.mode
    }

    pub fn pin_size(&self) -> usize {
        self.pin_size
    }

    pub fn capacity(&self) -> usize {
        capacity(self.total_order)
    }

    /// True when the payload fills the whole triangle with nothing appended.
    pub fn is_exact_fit(&self) -> bool {
        self.capacity() == self.payload_len
    }

    fn is_pinned(&self, vertex: usize) -> bool {
        self.mode == PaddingMode::CliquePin && vertex > self.total_order - self.pin_size
    }
}

pub fn padding_bit(plan: &ExtensionPlan, index: usize) -> Result<bool, CodecError> {
    if index < plan.payload_len {
        return Err(CodecError::InsidePayload { index, payload_len: plan.payload_len });
    }
    let (row, col) = pair_at(index, plan.total_order)?;
    Ok(plan.is_pinned(row) && plan.is_pinned(col))
}

pub fn bits_to_graph(payload: &BitString, plan: &ExtensionPlan) -> Result<Graph, CodecError> {
    if payload.len() != plan.payload_len {
        return Err(CodecError::LengthMismatch { expected: plan.payload_len, actual: payload.len() });
    }
    let mut g = Graph::empty(plan.total_order).expect("plans have order >= 2");
    for p in positions(plan.total_order) {
        let bit = match payload.get(p.index) {
            Some(b) => b,
            None => plan.is_pinned(p.row) && plan.is_pinned(p.col),
        };
        if bit {
            g.add_edge(p.row, p.col).expect("positions are in range");
        }
    }
    Ok(g)
}

/// The first `len` serialized entries of `g`.
pub fn graph_to_bits(g: &Graph, len: usize) -> Result<BitString, CodecError> {
    let cap = capacity(g.order());
    if len > cap {
        return Err(CodecError::CapacityExceeded { len, capacity: cap, order: g.order() });
    }
    Ok(positions(g.order()).take(len).map(|p| g.has_edge(p.row, p.col)).collect::<Vec<_>>().into())
}

/// Full description of an adjacency matrix carrying a coloring: the
/// below-diagonal bits in serialization order, then the diagonal colors
/// `a₁₁ … a_mm`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixSymbols {
    pub below_diagonal: BitString,
    pub diagonal: Vec<usize>,
}

impl MatrixSymbols {
    pub fn to_vec(&self) -> Vec<usize> {
        self.below_diagonal.iter().map(usize::from).chain(self.diagonal.iter().copied()).collect()
    }
}

pub fn serialize_symbols(g: &Graph, coloring: &Coloring) -> Result<MatrixSymbols, CodecError> {
    if coloring.len() != g.order() {
        return Err(CodecError::ColoringLength { expected: g.order(), actual: coloring.len() });
    }
    Ok(MatrixSymbols {
        below_diagonal: graph_to_bits(g, capacity(g.order()))?,
        diagonal: coloring.colors().to_vec(),
    })
}

/// Graph whose `t`-th serialized entry is bit `t` of `word`. Used to walk all
/// labeled graphs of small order by counting.
pub fn graph_from_word(order: usize, word: u64) -> Graph {
    assert!(capacity(order) <= 64, "order {order} does not fit a 64-bit word");
    let mut g = Graph::empty(order).expect("order >= 1");
    for p in positions(order) {
        if word >> p.index & 1 == 1 {
            g.add_edge(p.row, p.col).expect("positions are in range");
        }
    }
    g
}
