//! Watermark <-> self-inverting permutation codec.
//!
//! Positions and elements are 1-based throughout. A permutation of length
//! `n* = 2n + 1` is stored densely; `elements()[p - 1]` is the element at
//! position `p`.

use std::fmt;
use std::str::FromStr;

use crate::error::SipError;
use crate::watermark::{Watermark, MAX_BITS};

/// An involution on `1..=n*` with exactly one fixed point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelfInvertingPermutation {
    elements: Vec<usize>,
    fixed_point: usize,
}

impl SelfInvertingPermutation {
    pub fn new(elements: Vec<usize>) -> Result<Self, SipError> {
        check_permutation(&elements)?;
        for (idx, &value) in elements.iter().enumerate() {
            let position = idx + 1;
            if elements[value - 1] != position {
                return Err(SipError::NotAnInvolution { position, value });
            }
        }
        let fixed: Vec<usize> = elements
            .iter()
            .enumerate()
            .filter(|&(idx, &v)| idx + 1 == v)
            .map(|(_, &v)| v)
            .collect();
        if fixed.len() != 1 {
            return Err(SipError::FixedPoints(fixed.len()));
        }
        Ok(Self {
            elements,
            fixed_point: fixed[0],
        })
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    /// `n*`, the number of elements.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `n = (n* - 1) / 2`.
    pub fn half_len(&self) -> usize {
        (self.elements.len() - 1) / 2
    }

    /// The element at 1-based `position`.
    pub fn at(&self, position: usize) -> usize {
        self.elements[position - 1]
    }

    /// Position of `element`. For an involution this is the image of the element.
    pub fn position_of(&self, element: usize) -> usize {
        self.elements[element - 1]
    }

    pub fn fixed_point(&self) -> usize {
        self.fixed_point
    }
}

impl fmt::Display for SelfInvertingPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_one_line(f, &self.elements)
    }
}

impl FromStr for SelfInvertingPermutation {
    type Err = SipError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(parse_one_line(s)?)
    }
}

/// Parses space-separated one-line notation.
pub fn parse_one_line(s: &str) -> Result<Vec<usize>, SipError> {
    s.split_whitespace()
        .map(|tok| tok.parse().map_err(|_| SipError::Parse(tok.to_owned())))
        .collect()
}

pub(crate) fn write_one_line(f: &mut impl fmt::Write, elements: &[usize]) -> fmt::Result {
    for (i, e) in elements.iter().enumerate() {
        if i > 0 {
            f.write_char(' ')?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

pub(crate) fn check_permutation(elements: &[usize]) -> Result<(), SipError> {
    let len = elements.len();
    let mut seen = vec![false; len];
    for &e in elements {
        if e == 0 || e > len || std::mem::replace(&mut seen[e - 1], true) {
            return Err(SipError::NotAPermutation { len });
        }
    }
    if len == 0 {
        return Err(SipError::NotAPermutation { len });
    }
    Ok(())
}

/// Intermediate sequences built while encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingTrace {
    /// `0^n || b_1..b_n || 0`, one entry per bit.
    pub b_prime: Vec<u8>,
    /// Ascending 1-based positions of the zeros of `b_prime`.
    pub x_positions: Vec<usize>,
    /// Ascending 1-based positions of the ones of `b_prime`.
    pub y_positions: Vec<usize>,
    /// `X || reverse(Y)`, increasing then decreasing.
    pub pi_b: Vec<usize>,
}

pub fn encode_w_to_sip(w: &Watermark) -> (SelfInvertingPermutation, EncodingTrace) {
    let n = w.bits() as usize;
    let n_star = 2 * n + 1;

    let mut b_prime = vec![0u8; n_star];
    for j in 1..=n {
        b_prime[n + j - 1] = w.bit(j as u32);
    }
    let (mut x_positions, mut y_positions) = (Vec::new(), Vec::with_capacity(n));
    for (idx, &bit) in b_prime.iter().enumerate() {
        if bit == 0 {
            x_positions.push(idx + 1);
        } else {
            y_positions.push(idx + 1);
        }
    }
    let pi_b: Vec<usize> = x_positions
        .iter()
        .chain(y_positions.iter().rev())
        .copied()
        .collect();

    // Mirrored positions of pi_b form the 2-cycles; the middle one is the fixed point.
    let mut elements = vec![0usize; n_star];
    for i in 0..n {
        let (a, b) = (pi_b[i], pi_b[n_star - 1 - i]);
        elements[a - 1] = b;
        elements[b - 1] = a;
    }
    let middle = pi_b[n];
    elements[middle - 1] = middle;

    let sip = SelfInvertingPermutation {
        elements,
        fixed_point: middle,
    };
    let trace = EncodingTrace {
        b_prime,
        x_positions,
        y_positions,
        pi_b,
    };
    (sip, trace)
}

/// Recovers the watermark, re-encoding the result to reject anything the
/// encoder could not have produced.
pub fn decode_sip_to_w(sip: &SelfInvertingPermutation) -> Result<Watermark, SipError> {
    let n = sip.half_len();
    if sip.len().is_multiple_of(2) {
        return Err(SipError::NotAWatermark(format!(
            "even length {}",
            sip.len()
        )));
    }
    if n < 2 {
        return Err(SipError::NotAWatermark(format!(
            "length {} is below 5",
            sip.len()
        )));
    }
    if n > MAX_BITS as usize {
        return Err(SipError::NotAWatermark(format!(
            "length {} is too long",
            sip.len()
        )));
    }

    let ones = sip
        .elements()
        .iter()
        .take_while(|&&e| (n + 1..=2 * n).contains(&e));
    let mut value = 0u64;
    for &e in ones {
        value |= 1 << (2 * n - e);
    }
    if value >> (n - 1) != 1 {
        return Err(SipError::NotAWatermark(
            "most significant bit is not 1".to_owned(),
        ));
    }
    let w = Watermark::new(value).map_err(|e| SipError::NotAWatermark(e.to_string()))?;
    let (expected, _) = encode_w_to_sip(&w);
    if &expected != sip {
        return Err(SipError::NotAWatermark(format!(
            "re-encoding {} gives {}, not the input",
            value, expected
        )));
    }
    Ok(w)
}

/// A single clause of the Zero-and-One / All-One template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateClause {
    EvenLength(usize),
    TooShort(usize),
    Pi1Start {
        expected: usize,
        found: usize,
    },
    Pi2Range {
        position: usize,
        element: usize,
    },
    Pi2NotBitonic,
    Pi3Prefix {
        position: usize,
        expected: usize,
        found: usize,
    },
    FixedPoint {
        expected: usize,
        found: usize,
    },
    Pi4Index {
        position: usize,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for TemplateClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateClause::EvenLength(len) => write!(f, "length {len} is even"),
            TemplateClause::TooShort(len) => write!(f, "length {len} is too short"),
            TemplateClause::Pi1Start { expected, found } => {
                write!(f, "pi1 must start at {expected}, found {found}")
            }
            TemplateClause::Pi2Range { position, element } => write!(
                f,
                "pi2 element {element} at position {position} is outside its value set"
            ),
            TemplateClause::Pi2NotBitonic => write!(f, "pi2 is not bitonic"),
            TemplateClause::Pi3Prefix { position, expected, found } => write!(
                f,
                "pi3 position {position} must hold {expected}, found {found}"
            ),
            TemplateClause::FixedPoint { expected, found } => write!(
                f,
                "last element of pi3 must be the fixed point {expected}, found {found}"
            ),
            TemplateClause::Pi4Index { position, expected, found } => write!(
                f,
                "pi4 position {position} must index the next smallest pi2 element ({expected}), found {found}"
            ),
        }
    }
}

/// `pi* = pi1 || pi2 || pi3 || pi4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub pi1: Vec<usize>,
    pub pi2: Vec<usize>,
    pub pi3: Vec<usize>,
    pub pi4: Vec<usize>,
    /// Length of `pi1`.
    pub k: usize,
    /// The fixed point (last element of `pi3`).
    pub alpha: usize,
    /// Last element of `pi2`; absent in the All-One case.
    pub beta: Option<usize>,
    /// Position of the maximum element `2n + 1`.
    pub gamma: usize,
}

impl BlockDecomposition {
    pub fn is_all_one(&self) -> bool {
        self.pi2.is_empty()
    }
}

pub fn is_bitonic(seq: &[usize]) -> bool {
    let peak = seq
        .windows(2)
        .position(|w| w[0] > w[1])
        .unwrap_or(seq.len().saturating_sub(1));
    seq[peak..].windows(2).all(|w| w[0] > w[1])
}

/// Length of the run `n+1, n+2, ...` at the front of the permutation.
pub(crate) fn leading_run(elements: &[usize], n: usize) -> usize {
    elements
        .iter()
        .enumerate()
        .take(n)
        .take_while(|&(i, &e)| e == n + 1 + i)
        .count()
}

pub fn decompose_blocks(sip: &SelfInvertingPermutation) -> Result<BlockDecomposition, SipError> {
    decompose_elements(sip.elements()).map_err(SipError::TemplateViolation)
}

pub(crate) fn decompose_elements(el: &[usize]) -> Result<BlockDecomposition, TemplateClause> {
    let len = el.len();
    if len.is_multiple_of(2) {
        return Err(TemplateClause::EvenLength(len));
    }
    if len < 3 {
        return Err(TemplateClause::TooShort(len));
    }
    let n = (len - 1) / 2;
    let max = 2 * n + 1;
    if el[0] != n + 1 {
        return Err(TemplateClause::Pi1Start {
            expected: n + 1,
            found: el[0],
        });
    }
    let k = leading_run(el, n);

    let pi2 = &el[k..n];
    for (i, &e) in pi2.iter().enumerate() {
        if !(n + k + 2..=max).contains(&e) {
            return Err(TemplateClause::Pi2Range {
                position: k + 1 + i,
                element: e,
            });
        }
    }
    if !is_bitonic(pi2) {
        return Err(TemplateClause::Pi2NotBitonic);
    }

    let pi3 = &el[n..n + k + 1];
    for (i, &e) in pi3[..k].iter().enumerate() {
        if e != i + 1 {
            return Err(TemplateClause::Pi3Prefix {
                position: n + 1 + i,
                expected: i + 1,
                found: e,
            });
        }
    }
    let alpha = pi3[k];
    let expected_alpha = if k == n { max } else { n + k + 1 };
    if alpha != expected_alpha {
        return Err(TemplateClause::FixedPoint {
            expected: expected_alpha,
            found: alpha,
        });
    }

    let pi4 = &el[n + k + 1..];
    let mut by_value: Vec<(usize, usize)> = pi2
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, k + 1 + i))
        .collect();
    by_value.sort_unstable();
    for (i, (&found, &(_, expected))) in pi4.iter().zip(&by_value).enumerate() {
        if found != expected {
            return Err(TemplateClause::Pi4Index {
                position: n + k + 2 + i,
                expected,
                found,
            });
        }
    }

    let gamma = el
        .iter()
        .position(|&e| e == max)
        .map(|p| p + 1)
        .unwrap_or(0);
    Ok(BlockDecomposition {
        pi1: el[..k].to_vec(),
        pi2: pi2.to_vec(),
        pi3: pi3.to_vec(),
        pi4: pi4.to_vec(),
        k,
        alpha,
        beta: pi2.last().copied(),
        gamma,
    })
}
