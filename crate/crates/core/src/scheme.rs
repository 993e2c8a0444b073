//! The check-digit procedure.
//!
//! Encoding turns a payload `D` into its graph `G(D)` and sends `D` together
//! with the canonical minimal coloring `col(D)`. The receiver rebuilds
//! `G(D′)` from what arrived and accepts only if `col(D)` is still a proper
//! `n`-coloring of it and `G(D′)` is not `(n − 1)`-colorable.
//!
//! Acceptance means "verification passed". It does not prove `D′ = D`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::codec::{bits_to_graph, CodecError, ExtensionPlan, PaddingMode};
use crate::coloring::{has_k_coloring, is_proper, ChromaticSolver, Coloring, ColoringError, SOLVER_ORDER_LIMIT};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("coloring covers {actual} vertices, plan has {expected}")]
    ColorsLength { expected: usize, actual: usize },
    #[error("declared {declared} colors but the coloring uses {used}")]
    ColorCount { declared: usize, used: usize },
    #[error("chromatic number must be at least 1")]
    ZeroColors,
}

/// The transmitted pair `{D, col(D)}` plus the plan needed to rebuild the
/// graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckedMessage {
    payload: BitString,
    plan: ExtensionPlan,
    n: usize,
    colors: Coloring,
}

impl CheckedMessage {
    /// Assembles a message after structural checks only: lengths agree, the
    /// palette is `n` and all `n` colors occur. Whether the coloring is
    /// proper or minimal is left to [`verify`].
    pub fn from_parts(payload: BitString, plan: ExtensionPlan, n: usize, colors: Vec<usize>) -> Result<Self, SchemeError> {
        if payload.len() != plan.payload_len() {
            return Err(CodecError::LengthMismatch { expected: plan.payload_len(), actual: payload.len() }.into());
        }
        if colors.len() != plan.total_order() {
            return Err(SchemeError::ColorsLength { expected: plan.total_order(), actual: colors.len() });
        }
        if n == 0 {
            return Err(SchemeError::ZeroColors);
        }
        let colors = Coloring::new(colors, n)?;
        let used = colors.distinct_colors();
        if used != n {
            return Err(SchemeError::ColorCount { declared: n, used });
        }
        Ok(Self { payload, plan, n, colors })
    }

    pub fn payload(&self) -> &BitString {
        &self.payload
    }

    pub fn plan(&self) -> &ExtensionPlan {
        &self.plan
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn colors(&self) -> &Coloring {
        &self.colors
    }

    /// Same check digits over a different (typically corrupted) payload.
    pub fn with_payload(&self, payload: BitString) -> Result<Self, SchemeError> {
        if payload.len() != self.plan.payload_len() {
            return Err(CodecError::LengthMismatch { expected: self.plan.payload_len(), actual: payload.len() }.into());
        }
        Ok(Self { payload, ..self.clone() })
    }

    /// `G(D)` with padding regenerated from the plan.
    pub fn graph(&self) -> Graph {
        bits_to_graph(&self.payload, &self.plan).expect("payload length checked at construction")
    }

    /// Payload positions whose endpoints share a color. Any of them set in a
    /// received payload makes the coloring improper.
    pub fn monochrome_positions(&self) -> Vec<usize> {
        crate::codec::positions(self.plan.total_order())
            .take(self.plan.payload_len())
            .filter(|p| self.colors.color_of(p.row) == self.colors.color_of(p.col))
            .map(|p| p.index)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionStage {
    Malformed,
    ImproperColoring,
    ChromaticDrop,
}

impl DetectionStage {
    pub const ALL: [DetectionStage; 3] =
        [DetectionStage::Malformed, DetectionStage::ImproperColoring, DetectionStage::ChromaticDrop];

    pub fn as_str(self) -> &'static str {
        match self {
            DetectionStage::Malformed => "malformed",
            DetectionStage::ImproperColoring => "improper_coloring",
            DetectionStage::ChromaticDrop => "chromatic_drop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum VerificationOutcome {
    Accepted,
    ErrorDetected { stage: DetectionStage },
}

impl VerificationOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, VerificationOutcome::Accepted)
    }

    pub fn stage(&self) -> Option<DetectionStage> {
        match self {
            VerificationOutcome::Accepted => None,
            VerificationOutcome::ErrorDetected { stage } => Some(*stage),
        }
    }

    fn detected(stage: DetectionStage) -> Self {
        VerificationOutcome::ErrorDetected { stage }
    }
}

/// Encodes payloads with a configurable solver guard.
#[derive(Debug, Clone, Copy, Default)]
pub struct Encoder {
    solver: ChromaticSolver,
}

impl Encoder {
    pub fn new(solver: ChromaticSolver) -> Self {
        Self { solver }
    }

    pub fn with_max_order(max_order: usize) -> Self {
        Self::new(ChromaticSolver::with_max_order(max_order))
    }

    pub fn encode(&self, payload: &BitString, mode: PaddingMode, pin_size: usize) -> Result<CheckedMessage, SchemeError> {
        let plan = ExtensionPlan::new(payload.len(), mode, pin_size)?;
        let graph = bits_to_graph(payload, &plan)?;
        let cert = self.solver.chromatic_number(&graph)?;
        debug_assert!(is_proper(&graph, &cert.witness).unwrap_or(false));
        Ok(CheckedMessage { payload: payload.clone(), plan, n: cert.n, colors: cert.witness })
    }
}

/// Encodes with the default solver guard.
pub fn encode(payload: &BitString, mode: PaddingMode, pin_size: usize) -> Result<CheckedMessage, SchemeError> {
    Encoder::default().encode(payload, mode, pin_size)
}

/// Runs the receiver's checks on `msg`, whose payload is the received `D′`.
/// Stages run in order and stop at the first failure.
pub fn verify(msg: &CheckedMessage) -> VerificationOutcome {
    let plan = msg.plan();
    let structurally_sound = msg.payload.len() == plan.payload_len()
        && msg.colors.len() == plan.total_order()
        && msg.n >= 1
        && msg.colors.palette() == msg.n
        && plan.total_order() <= SOLVER_ORDER_LIMIT;
    if !structurally_sound {
        return VerificationOutcome::detected(DetectionStage::Malformed);
    }
    let received = msg.graph();
    if !is_proper(&received, &msg.colors).unwrap_or(false) {
        return VerificationOutcome::detected(DetectionStage::ImproperColoring);
    }
    if has_k_coloring(&received, msg.n - 1) {
        return VerificationOutcome::detected(DetectionStage::ChromaticDrop);
    }
    VerificationOutcome::Accepted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::chromatic_number;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn zf(s: &str) -> CheckedMessage {
        encode(&bits(s), PaddingMode::ZeroFill, 0).unwrap()
    }

    #[test]
    fn encode_examples() {
        let m = zf("110");
        assert_eq!((m.plan().total_order(), m.n(), m.colors().colors()), (3, 2, &[0, 1, 1][..]));
        let m = zf("000000");
        assert_eq!((m.plan().total_order(), m.n(), m.colors().colors()), (4, 1, &[0, 0, 0, 0][..]));
        let m = zf("111");
        assert_eq!((m.plan().total_order(), m.n(), m.colors().colors()), (3, 3, &[0, 1, 2][..]));
    }

    #[test]
    fn encode_errors() {
        assert_eq!(
            encode(&BitString::default(), PaddingMode::ZeroFill, 0),
            Err(SchemeError::Codec(CodecError::EmptyPayload))
        );
        // 300 bits need 25 vertices, past the default guard of 24.
        assert!(matches!(
            encode(&BitString::zeros(300), PaddingMode::ZeroFill, 0),
            Err(SchemeError::Coloring(ColoringError::OrderGuard { order: 25, max_order: 24 }))
        ));
        assert!(Encoder::with_max_order(25).encode(&BitString::zeros(300), PaddingMode::ZeroFill, 0).is_ok());
    }

    #[test]
    fn verify_examples() {
        let m = zf("110");
        assert_eq!(verify(&m), VerificationOutcome::Accepted);

        let flipped = m.with_payload(bits("111")).unwrap();
        assert_eq!(verify(&flipped).stage(), Some(DetectionStage::ImproperColoring));

        // Undetected: a single edge still leaves (0,1,1) proper and χ = 2.
        let undetected = m.with_payload(bits("100")).unwrap();
        assert_eq!(verify(&undetected), VerificationOutcome::Accepted);
    }

    #[test]
    fn chromatic_drop_stage() {
        // D = 111 (triangle, n = 3). D′ = 110 is a path: colors (0,1,2) stay
        // proper but two colors suffice.
        let m = zf("111");
        assert_eq!(verify(&m.with_payload(bits("110")).unwrap()).stage(), Some(DetectionStage::ChromaticDrop));
    }

    #[test]
    fn structural_checks() {
        let plan = ExtensionPlan::zero_fill(3).unwrap();
        assert_eq!(
            CheckedMessage::from_parts(bits("110"), plan, 3, vec![0, 1, 1]),
            Err(SchemeError::ColorCount { declared: 3, used: 2 })
        );
        assert_eq!(
            CheckedMessage::from_parts(bits("110"), plan, 2, vec![0, 1]),
            Err(SchemeError::ColorsLength { expected: 3, actual: 2 })
        );
        assert!(matches!(
            CheckedMessage::from_parts(bits("110"), plan, 2, vec![0, 1, 2]),
            Err(SchemeError::Coloring(ColoringError::ColorOutOfPalette { .. }))
        ));
        assert_eq!(CheckedMessage::from_parts(bits("110"), plan, 0, vec![]), Err(SchemeError::ColorsLength { expected: 3, actual: 0 }));
        assert!(matches!(zf("110").with_payload(bits("11")), Err(SchemeError::Codec(_))));
    }

    #[test]
    fn clique_pin_raises_chromatic_number() {
        let m = encode(&bits("110"), PaddingMode::CliquePin, 4).unwrap();
        assert_eq!(m.plan().total_order(), 7);
        assert_eq!(m.n(), 4);
        assert_eq!(verify(&m), VerificationOutcome::Accepted);
        assert_eq!(chromatic_number(&m.graph()).unwrap().n, 4);
    }

    #[test]
    fn outcome_json_shape() {
        let j = serde_json::to_string(&VerificationOutcome::Accepted).unwrap();
        assert_eq!(j, r#"{"verdict":"accepted"}"#);
        let j = serde_json::to_string(&VerificationOutcome::ErrorDetected { stage: DetectionStage::ChromaticDrop }).unwrap();
        assert_eq!(j, r#"{"verdict":"error_detected","stage":"chromatic_drop"}"#);
    }

    #[test]
    fn monochrome_positions_of_hand_example() {
        // Colors (0,1,1): only a32 joins equal colors.
        assert_eq!(zf("110").monochrome_positions(), vec![2]);
    }
}
