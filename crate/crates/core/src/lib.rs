//! Codec and resilience analysis for permutation-graph software watermarks.
//!
//! The pipeline is
//!
//! ```text
//! w  --encode_w_to_sip-->  pi*  --encode_sip_to_rpg-->  F[pi*]
//! w  <--decode_sip_to_w--  pi*  <--decode_rpg_to_sip--  F[pi*]
//! ```
//!
//! where `pi*` is a self-inverting permutation of `1..=2n+1` and `F[pi*]` a
//! reducible flow graph with one back edge per element. The [`integrity`]
//! module validates tampered graphs and [`resilience`] measures how many
//! back-edge retargetings separate one valid watermark graph from another.
//!
//! ```
//! use wrpg::{encode_w_to_sip, encode_sip_to_rpg, decode_rpg_to_sip, decode_sip_to_w, Watermark};
//!
//! let w = Watermark::new(12).unwrap();
//! let (sip, _) = encode_w_to_sip(&w);
//! assert_eq!(sip.to_string(), "5 6 9 8 1 2 7 4 3");
//! let graph = encode_sip_to_rpg(&sip);
//! let back = decode_sip_to_w(&decode_rpg_to_sip(&graph).unwrap()).unwrap();
//! assert_eq!(back, w);
//! ```

pub mod cli;
pub mod error;
pub mod integrity;
pub mod resilience;
pub mod rpg;
pub mod sip;
pub mod watermark;

pub use error::{
    AttackError, DecodeFailure, GraphError, ResilienceError, SipError, WatermarkError,
};
pub use integrity::{
    apply_edge_edits, classify_graph, parse_edits, swap_conjugate, AttackVerdict, CheckName,
    CheckStatus, EdgeEdit, ValidityReport, Verdict,
};
pub use resilience::{
    classify_strength, minvm_closed_form, minvm_oracle, proof_neighbors, strong_watermark_of,
    verify_theorem, ResilienceReport, Strength,
};
pub use rpg::{
    check_reducibility, decode_rpg_to_sip, dmax_map, encode_sip_to_rpg, graph_distance,
    rebuild_permutation, BackEdgeMap, ReduciblePermutationGraph,
};
pub use sip::{
    decode_sip_to_w, decompose_blocks, encode_w_to_sip, BlockDecomposition, EncodingTrace,
    SelfInvertingPermutation,
};
pub use watermark::{bit_shape, Watermark, WatermarkShape};

/// Encodes a watermark all the way to its graph.
pub fn encode(w: &Watermark) -> ReduciblePermutationGraph {
    encode_sip_to_rpg(&encode_w_to_sip(w).0)
}

/// Decodes a graph all the way to its watermark.
pub fn decode(g: &ReduciblePermutationGraph) -> Result<Watermark, GraphError> {
    let sip = decode_rpg_to_sip(g)?;
    decode_sip_to_w(&sip).map_err(|e| GraphError::FalseIncorrectGraph(DecodeFailure::Sip(e)))
}
