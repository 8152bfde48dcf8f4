//! Slow, direct reference implementations used as test oracles.
//!
//! These deliberately share no code with the library: bit strings are built
//! with `format!`, parents are found by linear scans, and distances compare
//! plain vectors.

#![allow(dead_code)]

/// One-line permutation for `w`, built straight from the bit string.
pub fn reference_sip(w: u64) -> Vec<usize> {
    let bits = format!("{w:b}");
    let n = bits.len();
    let b_prime = format!("{}{}0", "0".repeat(n), bits);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, c) in b_prime.chars().enumerate() {
        if c == '0' {
            x.push(i + 1);
        } else {
            y.push(i + 1);
        }
    }
    y.reverse();
    let pi_b: Vec<usize> = x.into_iter().chain(y).collect();
    let len = pi_b.len();
    let mut perm = vec![0; len];
    for i in 0..len {
        perm[pi_b[i] - 1] = pi_b[len - 1 - i];
    }
    perm
}

/// Back-edge target of every element, indexed by element - 1.
pub fn reference_back_edges(perm: &[usize]) -> Vec<usize> {
    let mut targets = vec![0; perm.len()];
    for (pos, &e) in perm.iter().enumerate() {
        targets[e - 1] = perm[..pos]
            .iter()
            .rev()
            .find(|&&left| left > e)
            .copied()
            .unwrap_or(perm.len() + 1);
    }
    targets
}

pub fn reference_graph(w: u64) -> Vec<usize> {
    reference_back_edges(&reference_sip(w))
}

pub fn reference_distance(a: &[usize], b: &[usize]) -> usize {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn bit_len(w: u64) -> u32 {
    64 - w.leading_zeros()
}

/// Closed-form minimum distance read directly from the bit string.
pub fn reference_closed_form(w: u64) -> usize {
    let bits: Vec<u8> = format!("{w:b}").bytes().map(|c| c - b'0').collect();
    let n = bits.len();
    assert!(n >= 4);
    let inner = &bits[1..n - 1];
    let zeros: Vec<usize> = (0..inner.len()).filter(|&i| inner[i] == 0).collect();
    let last = bits[n - 1];
    match zeros.len() {
        0 => 4,
        1 => {
            let ell = zeros[0];
            let r = inner.len() - 1 - ell;
            match (last, r) {
                (0, 0) => 4,
                (0, r) => 4 + ell.min(r - 1),
                (_, r) => 4 + ell.min(r),
            }
        }
        _ => 3,
    }
}

/// Pairwise distances among all graphs with `n` bits, values ascending.
pub struct ReferenceTable {
    pub first: u64,
    pub graphs: Vec<Vec<usize>>,
}

impl ReferenceTable {
    pub fn new(n: u32) -> Self {
        let first = 1u64 << (n - 1);
        let graphs = (first..first << 1).map(reference_graph).collect();
        ReferenceTable { first, graphs }
    }

    pub fn graph(&self, w: u64) -> &[usize] {
        &self.graphs[(w - self.first) as usize]
    }

    /// `(min distance, nearest watermarks)` for `w`.
    pub fn nearest(&self, w: u64) -> (usize, Vec<u64>) {
        let g = self.graph(w);
        let mut best = usize::MAX;
        let mut nearest = Vec::new();
        for (idx, other) in self.graphs.iter().enumerate() {
            let v = self.first + idx as u64;
            if v == w {
                continue;
            }
            let d = reference_distance(g, other);
            if d < best {
                best = d;
                nearest.clear();
            }
            if d == best {
                nearest.push(v);
            }
        }
        (best, nearest)
    }
}

/// A synthetic sweep result with one disagreeing row, for exercising the
/// mismatch reporting path.
pub fn failing_report() -> wrpg::resilience::VerificationReport {
    use wrpg::resilience::{RangeSummary, SurveyRow, VerificationReport};
    use wrpg::Strength;
    VerificationReport {
        ranges: vec![RangeSummary {
            n: 4,
            watermarks: 8,
            mismatches: 1,
            max_minvm: 4,
            argmax: vec![10, 11],
            argmax_nearest_counts: vec![2, 1],
            strong: 11,
            strong_nearest_count: 1,
            strong_claim_holds: true,
            min_pairwise_distance: 3,
            separation_holds: true,
            proof_witnesses_checked: 30,
        }],
        counterexamples: vec![SurveyRow {
            n: 4,
            w: 13,
            shape_case: 2,
            ell: Some(0),
            r: Some(1),
            b_n: Some(1),
            minvm_closed: Some(5),
            minvm_oracle: 4,
            agree: Some(false),
            nearest_count: 2,
            strength: Some(Strength::Ordinary),
        }],
    }
}
