//! Non-adaptive group testing with feedbacks of bounded capacity and
//! expressiveness, under malicious and honest adversaries.
//!
//! The crate builds query sequences with the randomized constructions,
//! checks them exhaustively at small scale, decodes hidden sets from
//! feedback vectors and reproduces the separating examples between the two
//! "two smallest identifiers" feedbacks.

pub mod adversaries;
pub mod analysis;
pub mod error;
pub mod feedbacks;
pub mod generators;
pub mod instance;
pub mod subset;
pub mod verify;

pub use adversaries::{position_value_set, theorem7_strategy, AdversaryKind, AdversaryModel, PositionValueSet};
pub use error::{GtError, Result};
pub use feedbacks::{build_bcc, BccCode, FeedbackKind, FeedbackSpec};
pub use instance::{bar_alpha, validate_instance, FeedbackWord, HiddenSet, Params, Query, QuerySequence};
pub use subset::Subset;
pub use verify::{decode, verify_prop2, verify_sequence, DecodeResult, VerificationReport};
