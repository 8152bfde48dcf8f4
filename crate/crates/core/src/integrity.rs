//! Edge-modification attacks and 4-Chain validation of possibly tampered graphs.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{AttackError, SipError};
use crate::rpg::{dmax_map, graph_distance, rebuild_permutation, ReduciblePermutationGraph};
use crate::sip::{
    decode_sip_to_w, decompose_elements, is_bitonic, leading_run, SelfInvertingPermutation,
};
use crate::watermark::Watermark;

/// Retarget the back edge leaving `u_source` to node `new_target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeEdit {
    pub source: usize,
    pub new_target: usize,
}

impl FromStr for EdgeEdit {
    type Err = AttackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || AttackError::Parse(s.to_owned());
        let (source, target) = s.trim().split_once(':').ok_or_else(err)?;
        Ok(EdgeEdit {
            source: source.trim().parse().map_err(|_| err())?,
            new_target: target.trim().parse().map_err(|_| err())?,
        })
    }
}

impl fmt::Display for EdgeEdit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.source, self.new_target)
    }
}

/// Parses `source:target` pairs separated by commas. Blank input is no edits.
pub fn parse_edits(s: &str) -> Result<Vec<EdgeEdit>, AttackError> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditOutcome {
    pub graph: ReduciblePermutationGraph,
    /// Number of edits in the request.
    pub applied: usize,
}

/// Applies back-edge retargetings in order; later edits to the same source win.
///
/// Only interior back edges can be retargeted. Edits on `s`/`t`, targets
/// outside the node set, and targets that coincide with the spine successor
/// fall outside the attack model and are rejected.
pub fn apply_edge_edits(
    g: &ReduciblePermutationGraph,
    edits: &[EdgeEdit],
) -> Result<EditOutcome, AttackError> {
    let n_star = g.n_star();
    let mut targets = g.back_edges().as_slice().to_vec();
    for edit in edits {
        if !(1..=n_star).contains(&edit.source) {
            return Err(AttackError::UnsupportedAttack(format!(
                "source {} is not an interior node (1..={n_star})",
                edit.source
            )));
        }
        if edit.new_target > n_star + 1 {
            return Err(AttackError::UnsupportedAttack(format!(
                "target {} is not a node (0..={})",
                edit.new_target,
                n_star + 1
            )));
        }
        if edit.new_target + 1 == edit.source {
            return Err(AttackError::UnsupportedAttack(format!(
                "edit {edit} duplicates the forward spine edge"
            )));
        }
        targets[edit.source - 1] = edit.new_target;
    }
    let graph = g
        .with_back_edges(targets)
        .expect("targets were range-checked above");
    Ok(EditOutcome {
        graph,
        applied: edits.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    BackEdgeOrientation,
    RangeOddLength,
    Involution,
    SingleFixedPoint,
    BlockTemplate,
    BitonicPi2,
    Roundtrip,
}

impl CheckName {
    pub const ALL: [CheckName; 7] = [
        CheckName::BackEdgeOrientation,
        CheckName::RangeOddLength,
        CheckName::Involution,
        CheckName::SingleFixedPoint,
        CheckName::BlockTemplate,
        CheckName::BitonicPi2,
        CheckName::Roundtrip,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::BackEdgeOrientation => "back_edge_orientation",
            CheckName::RangeOddLength => "range_odd_length",
            CheckName::Involution => "involution",
            CheckName::SingleFixedPoint => "single_fixed_point",
            CheckName::BlockTemplate => "block_template",
            CheckName::BitonicPi2 => "bitonic_pi2",
            CheckName::Roundtrip => "roundtrip",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail(String),
    /// Could not be evaluated because an earlier check failed.
    Skipped,
}

impl CheckStatus {
    pub fn passed(&self) -> bool {
        matches!(self, CheckStatus::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid(Watermark),
    FalseIncorrect(Vec<CheckName>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityReport {
    pub checks: Vec<(CheckName, CheckStatus)>,
    /// Permutation rebuilt from the back-edge forest, when orientation allows.
    pub candidate: Option<Vec<usize>>,
    pub verdict: Verdict,
}

impl ValidityReport {
    pub fn status(&self, name: CheckName) -> &CheckStatus {
        &self
            .checks
            .iter()
            .find(|(n, _)| *n == name)
            .expect("every check is recorded")
            .1
    }

    pub fn watermark(&self) -> Option<Watermark> {
        match self.verdict {
            Verdict::Valid(w) => Some(w),
            Verdict::FalseIncorrect(_) => None,
        }
    }

    /// Relation of this graph to the watermark it was originally encoding.
    pub fn relation_to(&self, original: &Watermark) -> AttackVerdict {
        match self.verdict {
            Verdict::Valid(w) if w == *original => AttackVerdict::Intact,
            Verdict::Valid(w) => AttackVerdict::TrueIncorrect(w),
            Verdict::FalseIncorrect(_) => AttackVerdict::FalseIncorrect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackVerdict {
    Intact,
    TrueIncorrect(Watermark),
    FalseIncorrect,
}

/// Runs every structural check and decodes when all pass. Never fails.
pub fn classify_graph(g: &ReduciblePermutationGraph) -> ValidityReport {
    let mut checks = Vec::with_capacity(CheckName::ALL.len());
    let n_star = g.n_star();

    let candidate = match rebuild_permutation(g) {
        Ok(order) => {
            checks.push((CheckName::BackEdgeOrientation, CheckStatus::Pass));
            Some(order)
        }
        Err(e) => {
            checks.push((
                CheckName::BackEdgeOrientation,
                CheckStatus::Fail(e.to_string()),
            ));
            None
        }
    };

    checks.push((
        CheckName::RangeOddLength,
        if n_star % 2 == 1 && n_star >= 5 {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail(format!("{n_star} interior nodes is not 2n+1 with n >= 2"))
        },
    ));

    let Some(perm) = candidate.as_deref() else {
        for name in &CheckName::ALL[2..] {
            checks.push((*name, CheckStatus::Skipped));
        }
        return finish(checks, None, None);
    };

    let involution_break = perm
        .iter()
        .enumerate()
        .find(|&(idx, &v)| perm[v - 1] != idx + 1);
    checks.push((
        CheckName::Involution,
        match involution_break {
            None => CheckStatus::Pass,
            Some((idx, &v)) => CheckStatus::Fail(format!(
                "position {} holds {v}, position {v} holds {}",
                idx + 1,
                perm[v - 1]
            )),
        },
    ));

    let fixed = perm
        .iter()
        .enumerate()
        .filter(|&(idx, &v)| idx + 1 == v)
        .count();
    checks.push((
        CheckName::SingleFixedPoint,
        if fixed == 1 {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail(format!("{fixed} fixed points"))
        },
    ));

    checks.push((
        CheckName::BlockTemplate,
        match decompose_elements(perm) {
            Ok(_) => CheckStatus::Pass,
            Err(clause) => CheckStatus::Fail(clause.to_string()),
        },
    ));

    let n = (n_star - 1) / 2;
    let k = leading_run(perm, n);
    let pi2 = &perm[k.min(n)..n];
    checks.push((
        CheckName::BitonicPi2,
        if is_bitonic(pi2) {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail(format!("pi2 = {pi2:?}"))
        },
    ));

    let decoded = roundtrip(g, perm);
    checks.push((
        CheckName::Roundtrip,
        match &decoded {
            Ok(_) => CheckStatus::Pass,
            Err(reason) => CheckStatus::Fail(reason.clone()),
        },
    ));
    let decoded = decoded.ok();
    finish(checks, candidate, decoded)
}

fn roundtrip(g: &ReduciblePermutationGraph, perm: &[usize]) -> Result<Watermark, String> {
    if dmax_map(perm) != *g.back_edges() {
        return Err("rebuilt permutation does not reproduce the back edges".into());
    }
    let sip = SelfInvertingPermutation::new(perm.to_vec()).map_err(|e| e.to_string())?;
    decode_sip_to_w(&sip).map_err(|e| e.to_string())
}

fn finish(
    checks: Vec<(CheckName, CheckStatus)>,
    candidate: Option<Vec<usize>>,
    decoded: Option<Watermark>,
) -> ValidityReport {
    let failed: Vec<CheckName> = checks
        .iter()
        .filter(|(_, s)| !s.passed())
        .map(|(n, _)| *n)
        .collect();
    let verdict = match decoded {
        Some(w) if failed.is_empty() => Verdict::Valid(w),
        _ => Verdict::FalseIncorrect(failed),
    };
    ValidityReport {
        checks,
        candidate,
        verdict,
    }
}

/// Relabels `x` and `y` in every cycle: `tau . pi . tau` with `tau = (x y)`.
pub fn swap_conjugate(
    sip: &SelfInvertingPermutation,
    x: usize,
    y: usize,
) -> Result<SelfInvertingPermutation, SipError> {
    let len = sip.len();
    for element in [x, y] {
        if !(1..=len).contains(&element) {
            return Err(SipError::ElementOutOfRange { element, len });
        }
    }
    let tau = |e: usize| {
        if e == x {
            y
        } else if e == y {
            x
        } else {
            e
        }
    };
    let mut elements = vec![0; len];
    for p in 1..=len {
        elements[tau(p) - 1] = tau(sip.at(p));
    }
    SelfInvertingPermutation::new(elements)
}

/// Effective retargetings between `before` and `after`.
pub fn edit_distance(
    before: &ReduciblePermutationGraph,
    after: &ReduciblePermutationGraph,
) -> usize {
    graph_distance(before, after).expect("edits never change the node count")
}
