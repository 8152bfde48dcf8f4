//! Error types for every layer of the codec and the resilience analysis.

use thiserror::Error;

use crate::sip::TemplateClause;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WatermarkError {
    #[error("watermark {0} is below the codec domain (w must be at least 2)")]
    TooSmall(u64),
    #[error("bit-length {0} is outside the supported range 2..=63")]
    UnsupportedBits(u32),
    #[error("invalid bit string {0:?}: expected a leading 1 followed by 0/1 digits")]
    InvalidBitString(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SipError {
    #[error("sequence of length {len} is not a permutation of 1..={len}")]
    NotAPermutation { len: usize },
    #[error("not self-inverting: position {position} holds {value}, but position {value} does not hold {position}")]
    NotAnInvolution { position: usize, value: usize },
    #[error("expected exactly one fixed point, found {0}")]
    FixedPoints(usize),
    #[error("element {element} is outside 1..={len}")]
    ElementOutOfRange { element: usize, len: usize },
    #[error("not a watermark encoding: {0}")]
    NotAWatermark(String),
    #[error("template violation: {0}")]
    TemplateViolation(TemplateClause),
    #[error("cannot parse permutation: {0}")]
    Parse(String),
}

/// The first check that failed while reconstructing a permutation from a graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeFailure {
    #[error("back edge of u{element} points to node {target}, which is not above it")]
    BackEdgeOrientation { element: usize, target: usize },
    #[error("reconstructed sequence does not reproduce the back edge of u{element}")]
    DominationMismatch { element: usize },
    #[error(transparent)]
    Sip(#[from] SipError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graphs have {left} and {right} interior nodes; distance needs equal sizes")]
    SizeMismatch { left: usize, right: usize },
    #[error("false-incorrect graph: {0}")]
    FalseIncorrectGraph(DecodeFailure),
    #[error("graph needs at least one interior node")]
    Empty,
    #[error("back edge of u{element} targets node {target}, outside 0..={max}")]
    TargetOutOfRange {
        element: usize,
        target: usize,
        max: usize,
    },
    #[error("unsupported graph file version {0} (expected 1)")]
    UnsupportedVersion(u64),
    #[error("malformed graph file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    #[error("unsupported attack: {0}")]
    UnsupportedAttack(String),
    #[error("cannot parse edit {0:?}: expected source:new_target")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResilienceError {
    #[error("bit-length {bits} is below 4, where the closed form does not apply")]
    OutOfTheoremRange { bits: u32 },
    #[error("bit-length {bits} exceeds the enumeration cap {cap}")]
    ResourceBound { bits: u32, cap: u32 },
    #[error("invalid range: bits {min}..={max}")]
    InvalidRange { min: u32, max: u32 },
    #[error("soundness violation for w={w}: {detail}")]
    Unsound { w: u64, detail: String },
    #[error(transparent)]
    Watermark(#[from] WatermarkError),
}
