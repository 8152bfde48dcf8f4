//! Minimum valid edge-modification (minVM) analysis.
//!
//! Three independent views of the same quantity:
//!
//! * [`minvm_closed_form`], a function of the bit shape alone;
//! * [`minvm_oracle`], brute force over every same-length watermark;
//! * [`proof_neighbors`], explicit true-incorrect rewrites with their predicted
//!   costs, each of which can be measured with [`graph_distance`](crate::rpg::graph_distance).
//!
//! [`verify_theorem`] sweeps whole ranges and cross-checks all three.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::ResilienceError;
use crate::integrity::swap_conjugate;
use crate::rpg::{dmax_map, encode_sip_to_rpg};
use crate::sip::{decode_sip_to_w, encode_w_to_sip};
use crate::watermark::{range_of, Watermark, WatermarkShape};

/// Smallest bit-length the closed form covers.
pub const MIN_THEOREM_BITS: u32 = 4;

/// Default largest bit-length the oracle will enumerate.
pub const DEFAULT_ENUMERATION_CAP: u32 = 14;

fn require_theorem_range(bits: u32) -> Result<(), ResilienceError> {
    if bits < MIN_THEOREM_BITS {
        return Err(ResilienceError::OutOfTheoremRange { bits });
    }
    Ok(())
}

pub fn minvm_closed_form(w: &Watermark) -> Result<usize, ResilienceError> {
    require_theorem_range(w.bits())?;
    Ok(match w.shape() {
        WatermarkShape::Case1 => 3,
        WatermarkShape::Case2 {
            ell,
            r,
            last_bit: 0,
        } if r > 0 => 4 + ell.min(r - 1) as usize,
        WatermarkShape::Case2 { last_bit: 0, .. } => 4,
        WatermarkShape::Case2 { ell, r, .. } => 4 + ell.min(r) as usize,
        WatermarkShape::Case3 { .. } => 4,
    })
}

/// Back-edge maps of every watermark in `R_n`, stored as one flat byte table.
#[derive(Debug, Clone)]
pub struct RangeTable {
    bits: u32,
    first: u64,
    width: usize,
    rows: Vec<u8>,
}

impl RangeTable {
    pub fn build(bits: u32, cap: u32) -> Result<Self, ResilienceError> {
        if bits > cap {
            return Err(ResilienceError::ResourceBound { bits, cap });
        }
        let range = range_of(bits)?;
        let first = *range.start();
        let width = 2 * bits as usize + 1;
        let rows: Vec<u8> = range
            .collect::<Vec<_>>()
            .par_iter()
            .flat_map_iter(|&value| {
                let w = Watermark::new(value).expect("range values are valid watermarks");
                let sip = encode_w_to_sip(&w).0;
                // Targets are at most n* + 1 <= 128, so they fit in a byte.
                dmax_map(sip.elements())
                    .as_slice()
                    .iter()
                    .map(|&t| t as u8)
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(Self {
            bits,
            first,
            width,
            rows,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn row(&self, value: u64) -> &[u8] {
        let idx = (value - self.first) as usize;
        &self.rows[idx * self.width..(idx + 1) * self.width]
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len() as u64).map(move |i| self.first + i)
    }

    pub fn distance(&self, a: u64, b: u64) -> usize {
        self.row(a)
            .iter()
            .zip(self.row(b))
            .filter(|(x, y)| x != y)
            .count()
    }

    /// Minimum distance from `w` to any other watermark of the range, and all minimizers.
    pub fn nearest(&self, w: u64) -> NearestSet {
        let mut best = usize::MAX;
        let mut watermarks = Vec::new();
        for other in self.values().filter(|&v| v != w) {
            let d = self.distance(w, other);
            if d < best {
                best = d;
                watermarks.clear();
            }
            if d == best {
                watermarks.push(other);
            }
        }
        NearestSet {
            distance: best,
            watermarks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NearestSet {
    pub distance: usize,
    /// Ascending.
    pub watermarks: Vec<u64>,
}

pub fn minvm_oracle(w: &Watermark, cap: u32) -> Result<NearestSet, ResilienceError> {
    let table = RangeTable::build(w.bits(), cap)?;
    Ok(table.nearest(w.value()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum NeighborRule {
    /// Exchange of `max` and `max - 1` in the bitonic block.
    Swap,
    /// The `moved` largest elements of the leading increasing block move out.
    MoveOutPi1 { moved: u32 },
    /// The `moved` smallest elements of the bitonic block move out.
    MoveOutPi2 { moved: u32 },
}

impl fmt::Display for NeighborRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeighborRule::Swap => write!(f, "swap"),
            NeighborRule::MoveOutPi1 { moved } => write!(f, "move-out-pi1 i={moved}"),
            NeighborRule::MoveOutPi2 { moved } => write!(f, "move-out-pi2 j={moved}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProofNeighbor {
    pub watermark: Watermark,
    pub predicted_cost: usize,
    pub rule: NeighborRule,
}

fn ones(count: u32) -> String {
    "1".repeat(count as usize)
}

/// Explicit true-incorrect rewrites of `w` with their predicted back-edge costs.
///
/// For `w = 1 1^ell 0 1^r b` the table is
///
/// | rule | `w'` | cost |
/// |---|---|---|
/// | swap | `w` with `b` flipped | `4 + ell` |
/// | move-out-pi2, `1 <= j <= r` | `1 1^(ell+j) 0 1^(r-j) b` | `3 + r + b` |
/// | move-out-pi2, `j = r + 1` | `1^(n-1) 0` | `n + 1` if `b = 0`, else `4 + r` |
/// | move-out-pi2, `j = r + 2` | `1^n` | `4 + r` if `b = 0`, else `n + 1` |
/// | move-out-pi1, `1 <= i <= ell` | `1 1^(ell-i) 0 1^(r+i) b` | `3 + i + r + b` |
///
/// Case 1 contributes the swap of `max`/`max - 1` at cost 3, and an all-ones
/// internal block contributes one move-out from pi1 at cost 4.
pub fn proof_neighbors(w: &Watermark) -> Result<Vec<ProofNeighbor>, ResilienceError> {
    let n = w.bits();
    require_theorem_range(n)?;
    let mut out = Vec::new();
    let mut push = |bits: String, cost: u32, rule: NeighborRule| -> Result<(), ResilienceError> {
        out.push(ProofNeighbor {
            watermark: Watermark::from_bit_str(&bits)?,
            predicted_cost: cost as usize,
            rule,
        });
        Ok(())
    };

    match w.shape() {
        WatermarkShape::Case1 => {
            let sip = encode_w_to_sip(w).0;
            let max = sip.len();
            let swapped = swap_conjugate(&sip, max, max - 1)
                .and_then(|s| decode_sip_to_w(&s))
                .map_err(|e| ResilienceError::Unsound {
                    w: w.value(),
                    detail: format!("swap of max and max-1 is not a watermark: {e}"),
                })?;
            push(swapped.bit_string(), 3, NeighborRule::Swap)?;
        }
        WatermarkShape::Case2 {
            ell,
            r,
            last_bit: b,
        } => {
            let bu = b as u32;
            push(
                format!("1{}0{}{}", ones(ell), ones(r), 1 - b),
                4 + ell,
                NeighborRule::Swap,
            )?;
            for j in 1..=r {
                push(
                    format!("1{}0{}{}", ones(ell + j), ones(r - j), b),
                    3 + r + bu,
                    NeighborRule::MoveOutPi2 { moved: j },
                )?;
            }
            push(
                format!("{}0", ones(n - 1)),
                if b == 0 { n + 1 } else { 4 + r },
                NeighborRule::MoveOutPi2 { moved: r + 1 },
            )?;
            push(
                ones(n),
                if b == 0 { 4 + r } else { n + 1 },
                NeighborRule::MoveOutPi2 { moved: r + 2 },
            )?;
            for i in 1..=ell {
                push(
                    format!("1{}0{}{}", ones(ell - i), ones(r + i), b),
                    3 + i + r + bu,
                    NeighborRule::MoveOutPi1 { moved: i },
                )?;
            }
        }
        WatermarkShape::Case3 { last_bit: 0 } => {
            push(
                format!("1{}01", ones(n - 3)),
                4,
                NeighborRule::MoveOutPi1 { moved: 1 },
            )?;
        }
        WatermarkShape::Case3 { .. } => {
            push(
                format!("1{}00", ones(n - 3)),
                4,
                NeighborRule::MoveOutPi1 { moved: 2 },
            )?;
        }
    }
    Ok(out)
}

/// The watermark of bit-length `bits` with the largest minVM and fewest nearest neighbours.
pub fn strong_watermark_of(bits: u32) -> Result<Watermark, ResilienceError> {
    require_theorem_range(bits)?;
    let form = if bits % 2 == 1 {
        let ell = (bits - 3) / 2;
        format!("1{}0{}1", ones(ell), ones(ell))
    } else {
        let ell = (bits - 4) / 2;
        format!("1{}0{}1", ones(ell), ones(ell + 1))
    };
    Ok(Watermark::from_bit_str(&form)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Weak,
    Strong,
    Ordinary,
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strength::Weak => "weak",
            Strength::Strong => "strong",
            Strength::Ordinary => "ordinary",
        })
    }
}

pub fn classify_strength(w: &Watermark) -> Result<Strength, ResilienceError> {
    if minvm_closed_form(w)? == 3 {
        Ok(Strength::Weak)
    } else if *w == strong_watermark_of(w.bits())? {
        Ok(Strength::Strong)
    } else {
        Ok(Strength::Ordinary)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResilienceReport {
    pub w: Watermark,
    pub shape: WatermarkShape,
    /// `None` below four bits.
    pub minvm_closed: Option<usize>,
    pub minvm_oracle: usize,
    pub nearest: Vec<u64>,
    pub strength: Option<Strength>,
    pub agreement: Option<bool>,
}

impl ResilienceReport {
    /// Two- and three-bit watermarks fall outside the closed form.
    pub fn below_theorem_range(&self) -> bool {
        self.w.bits() < MIN_THEOREM_BITS
    }
}

fn report_from(w: Watermark, nearest: NearestSet) -> Result<ResilienceReport, ResilienceError> {
    let (minvm_closed, strength) = if w.bits() >= MIN_THEOREM_BITS {
        (Some(minvm_closed_form(&w)?), Some(classify_strength(&w)?))
    } else {
        (None, None)
    };
    Ok(ResilienceReport {
        w,
        shape: w.shape(),
        minvm_closed,
        minvm_oracle: nearest.distance,
        agreement: minvm_closed.map(|c| c == nearest.distance),
        nearest: nearest.watermarks,
        strength,
    })
}

pub fn analyze(w: &Watermark, cap: u32) -> Result<ResilienceReport, ResilienceError> {
    report_from(*w, minvm_oracle(w, cap)?)
}

/// One row of a survey or verification table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurveyRow {
    pub n: u32,
    pub w: u64,
    pub shape_case: u8,
    pub ell: Option<u32>,
    pub r: Option<u32>,
    pub b_n: Option<u8>,
    pub minvm_closed: Option<usize>,
    pub minvm_oracle: usize,
    pub agree: Option<bool>,
    pub nearest_count: usize,
    pub strength: Option<Strength>,
}

impl From<&ResilienceReport> for SurveyRow {
    fn from(r: &ResilienceReport) -> Self {
        SurveyRow {
            n: r.w.bits(),
            w: r.w.value(),
            shape_case: r.shape.case().number(),
            ell: r.shape.ell(),
            r: r.shape.r(),
            b_n: r.shape.last_bit(),
            minvm_closed: r.minvm_closed,
            minvm_oracle: r.minvm_oracle,
            agree: r.agreement,
            nearest_count: r.nearest.len(),
            strength: r.strength,
        }
    }
}

/// Reports for every watermark of a table, in ascending order.
pub fn analyze_range(table: &RangeTable) -> Result<Vec<ResilienceReport>, ResilienceError> {
    table
        .values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&value| {
            let w = Watermark::new(value)?;
            report_from(w, table.nearest(value))
        })
        .collect()
}

pub fn survey(bits: u32, cap: u32) -> Result<Vec<SurveyRow>, ResilienceError> {
    let table = RangeTable::build(bits, cap)?;
    Ok(analyze_range(&table)?.iter().map(SurveyRow::from).collect())
}

/// Per-range results of [`verify_theorem`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeSummary {
    pub n: u32,
    pub watermarks: usize,
    pub mismatches: usize,
    pub max_minvm: usize,
    /// Watermarks attaining `max_minvm`, ascending.
    pub argmax: Vec<u64>,
    /// Nearest-set size of each argmax watermark.
    pub argmax_nearest_counts: Vec<usize>,
    pub strong: u64,
    pub strong_nearest_count: usize,
    /// Odd n: the strong form is the unique argmax. Even n: it is in the
    /// argmax set with the smallest nearest-set size.
    pub strong_claim_holds: bool,
    pub min_pairwise_distance: usize,
    /// Distance 3 is attained exactly by the Case 1 watermarks.
    pub separation_holds: bool,
    pub proof_witnesses_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub ranges: Vec<RangeSummary>,
    /// Rows where the oracle and the closed form disagree.
    pub counterexamples: Vec<SurveyRow>,
}

impl VerificationReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
            && self
                .ranges
                .iter()
                .all(|r| r.strong_claim_holds && r.separation_holds)
    }
}

/// Sweeps every watermark with `n_min <= n <= n_max`.
///
/// Fails hard when the oracle exceeds the closed form or a proof witness
/// cost differs from its measured distance; closed-form mismatches are
/// collected as counterexamples instead.
pub fn verify_theorem(
    n_min: u32,
    n_max: u32,
    cap: u32,
) -> Result<VerificationReport, ResilienceError> {
    if n_min < MIN_THEOREM_BITS {
        return Err(ResilienceError::OutOfTheoremRange { bits: n_min });
    }
    if n_min > n_max {
        return Err(ResilienceError::InvalidRange {
            min: n_min,
            max: n_max,
        });
    }
    if n_max > cap {
        return Err(ResilienceError::ResourceBound { bits: n_max, cap });
    }

    let mut ranges = Vec::new();
    let mut counterexamples = Vec::new();
    for n in n_min..=n_max {
        let table = RangeTable::build(n, cap)?;
        let reports = analyze_range(&table)?;

        let witnesses: Vec<usize> = reports
            .par_iter()
            .map(|report| check_witnesses(&table, report))
            .collect::<Result<_, _>>()?;

        let mut mismatches = 0;
        for report in &reports {
            if report.agreement != Some(true) {
                mismatches += 1;
                counterexamples.push(SurveyRow::from(report));
            }
        }

        let max_minvm = reports.iter().map(|r| r.minvm_oracle).max().unwrap_or(0);
        let argmax: Vec<&ResilienceReport> = reports
            .iter()
            .filter(|r| r.minvm_oracle == max_minvm)
            .collect();
        let strong = strong_watermark_of(n)?;
        let strong_report = &reports[(strong.value() - table.first) as usize];
        let min_count = argmax.iter().map(|r| r.nearest.len()).min().unwrap_or(0);
        let strong_claim_holds = if n % 2 == 1 {
            argmax.len() == 1 && argmax[0].w == strong
        } else {
            strong_report.minvm_oracle == max_minvm && strong_report.nearest.len() == min_count
        };

        let min_pairwise_distance = reports.iter().map(|r| r.minvm_oracle).min().unwrap_or(0);
        let separation_holds = min_pairwise_distance == 3
            && reports
                .iter()
                .all(|r| (r.minvm_oracle == 3) == (r.shape == WatermarkShape::Case1));

        ranges.push(RangeSummary {
            n,
            watermarks: reports.len(),
            mismatches,
            max_minvm,
            argmax: argmax.iter().map(|r| r.w.value()).collect(),
            argmax_nearest_counts: argmax.iter().map(|r| r.nearest.len()).collect(),
            strong: strong.value(),
            strong_nearest_count: strong_report.nearest.len(),
            strong_claim_holds,
            min_pairwise_distance,
            separation_holds,
            proof_witnesses_checked: witnesses.iter().sum(),
        });
    }
    Ok(VerificationReport {
        ranges,
        counterexamples,
    })
}

fn check_witnesses(
    table: &RangeTable,
    report: &ResilienceReport,
) -> Result<usize, ResilienceError> {
    let w = report.w.value();
    let unsound = |detail: String| ResilienceError::Unsound { w, detail };
    let closed = report
        .minvm_closed
        .expect("sweep only covers the theorem range");
    if report.minvm_oracle > closed {
        return Err(unsound(format!(
            "oracle minimum {} exceeds closed form {closed}",
            report.minvm_oracle
        )));
    }
    let neighbors = proof_neighbors(&report.w)?;
    for nb in &neighbors {
        let other = nb.watermark;
        if other.bits() != report.w.bits() || other == report.w {
            return Err(unsound(format!(
                "witness {other} ({}) is not a distinct same-length watermark",
                nb.rule
            )));
        }
        let measured = table.distance(w, other.value());
        if measured != nb.predicted_cost {
            return Err(unsound(format!(
                "witness {other} ({}) predicted {} but measured {measured}",
                nb.rule, nb.predicted_cost
            )));
        }
    }
    let best = neighbors
        .iter()
        .map(|nb| nb.predicted_cost)
        .min()
        .unwrap_or(usize::MAX);
    if best != closed {
        return Err(unsound(format!(
            "cheapest witness costs {best}, closed form is {closed}"
        )));
    }
    Ok(neighbors.len())
}

/// Graph-level distance between two watermarks of equal length.
pub fn watermark_distance(a: &Watermark, b: &Watermark) -> Result<usize, ResilienceError> {
    if a.bits() != b.bits() {
        return Err(ResilienceError::InvalidRange {
            min: a.bits(),
            max: b.bits(),
        });
    }
    let ga = encode_sip_to_rpg(&encode_w_to_sip(a).0);
    let gb = encode_sip_to_rpg(&encode_w_to_sip(b).0);
    Ok(crate::rpg::graph_distance(&ga, &gb).expect("equal bit-lengths give equal sizes"))
}
