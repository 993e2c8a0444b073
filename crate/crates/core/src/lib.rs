//! Check digits from graph colorings.
//!
//! A payload of `l` bits is read as the below-diagonal half of an adjacency
//! matrix, giving a labeled graph `G(D)`. Its canonical minimal coloring is
//! sent alongside as check digits. A receiver that finds the coloring
//! improper for the received graph, or finds the received graph colorable
//! with fewer colors, has detected an error.
//!
//! - [`codec`]: bit strings ↔ graphs, padding plans
//! - [`coloring`]: proper-coloring checks, bounds, exact solver
//! - [`counting`]: exact graph counts per color partition, error bounds
//! - [`scheme`]: encode / verify
//! - [`wire`]: binary message container
//! - [`channel`]: corruption channels and detection statistics

#![forbid(unsafe_code)]

pub mod bits;
pub mod channel;
pub mod codec;
pub mod coloring;
pub mod counting;
pub mod graph;
pub mod scheme;
pub mod wire;

pub use bits::BitString;
pub use codec::{ExtensionPlan, PaddingMode};
pub use coloring::{ChromaticCertificate, ChromaticSolver, Coloring};
pub use graph::Graph;
pub use scheme::{encode, verify, CheckedMessage, DetectionStage, Encoder, VerificationOutcome};
