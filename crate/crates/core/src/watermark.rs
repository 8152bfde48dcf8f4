//! Integer watermarks and their bit-shape classification.
//!
//! A watermark `w` of bit-length `n` lives in `R_n = [2^(n-1), 2^n - 1]`. Bits are
//! numbered `b_1 .. b_n` from the most significant end, so `b_1` is always 1.
//! The internal block `b_2 .. b_(n-1)` decides how resilient the encoded graph is.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::Serialize;

use crate::error::WatermarkError;

/// Largest supported bit-length; keeps every value of `R_n` inside a `u64`.
pub const MAX_BITS: u32 = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Watermark {
    value: u64,
    bits: u32,
}

impl Watermark {
    pub fn new(value: u64) -> Result<Self, WatermarkError> {
        if value < 2 {
            return Err(WatermarkError::TooSmall(value));
        }
        let bits = u64::BITS - value.leading_zeros();
        if bits > MAX_BITS {
            return Err(WatermarkError::UnsupportedBits(bits));
        }
        Ok(Self { value, bits })
    }

    /// Parses a binary digit string such as `"11011"`.
    pub fn from_bit_str(s: &str) -> Result<Self, WatermarkError> {
        let invalid = || WatermarkError::InvalidBitString(s.to_owned());
        if !s.starts_with('1') || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(invalid());
        }
        if s.len() > MAX_BITS as usize {
            return Err(WatermarkError::UnsupportedBits(s.len() as u32));
        }
        let value = u64::from_str_radix(s, 2).map_err(|_| invalid())?;
        Self::new(value)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Bit-length `n`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Bit `b_j` for `j` in `1..=n`, counted from the most significant end.
    pub fn bit(&self, j: u32) -> u8 {
        assert!(
            (1..=self.bits).contains(&j),
            "bit index {j} outside 1..={}",
            self.bits
        );
        ((self.value >> (self.bits - j)) & 1) as u8
    }

    pub fn bit_string(&self) -> String {
        format!("{:b}", self.value)
    }

    pub fn shape(&self) -> WatermarkShape {
        bit_shape(self)
    }
}

impl fmt::Display for Watermark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FromStr for Watermark {
    type Err = WatermarkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let value: u64 = s
            .trim()
            .parse()
            .map_err(|_| WatermarkError::InvalidBitString(s.to_owned()))?;
        Self::new(value)
    }
}

/// Values of `R_n`.
pub fn range_of(bits: u32) -> Result<RangeInclusive<u64>, WatermarkError> {
    if !(2..=MAX_BITS).contains(&bits) {
        return Err(WatermarkError::UnsupportedBits(bits));
    }
    Ok((1u64 << (bits - 1))..=((1u64 << bits) - 1))
}

/// Every watermark of bit-length `bits`, ascending.
pub fn watermarks_of(bits: u32) -> Result<impl Iterator<Item = Watermark>, WatermarkError> {
    Ok(range_of(bits)?.map(move |value| Watermark { value, bits }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ShapeCase {
    Case1,
    Case2,
    Case3,
}

impl ShapeCase {
    pub fn number(self) -> u8 {
        match self {
            ShapeCase::Case1 => 1,
            ShapeCase::Case2 => 2,
            ShapeCase::Case3 => 3,
        }
    }
}

/// Zero-count classification of the internal block.
///
/// `Case2` means `w = 1 1^ell 0 1^r b_n` with `ell + r = n - 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WatermarkShape {
    /// At least two zeros in the internal block.
    Case1,
    /// Exactly one zero in the internal block.
    Case2 { ell: u32, r: u32, last_bit: u8 },
    /// No zeros in the internal block.
    Case3 { last_bit: u8 },
}

impl WatermarkShape {
    pub fn case(&self) -> ShapeCase {
        match self {
            WatermarkShape::Case1 => ShapeCase::Case1,
            WatermarkShape::Case2 { .. } => ShapeCase::Case2,
            WatermarkShape::Case3 { .. } => ShapeCase::Case3,
        }
    }

    pub fn ell(&self) -> Option<u32> {
        match *self {
            WatermarkShape::Case2 { ell, .. } => Some(ell),
            _ => None,
        }
    }

    pub fn r(&self) -> Option<u32> {
        match *self {
            WatermarkShape::Case2 { r, .. } => Some(r),
            _ => None,
        }
    }

    pub fn last_bit(&self) -> Option<u8> {
        match *self {
            WatermarkShape::Case1 => None,
            WatermarkShape::Case2 { last_bit, .. } | WatermarkShape::Case3 { last_bit } => {
                Some(last_bit)
            }
        }
    }
}

impl fmt::Display for WatermarkShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WatermarkShape::Case1 => write!(f, "case1"),
            WatermarkShape::Case2 { ell, r, last_bit } => {
                write!(f, "case2 ell={ell} r={r} b_n={last_bit}")
            }
            WatermarkShape::Case3 { last_bit } => write!(f, "case3 b_n={last_bit}"),
        }
    }
}

pub fn bit_shape(w: &Watermark) -> WatermarkShape {
    let n = w.bits();
    let last_bit = w.bit(n);
    let internal_zeros: Vec<u32> = (2..n).filter(|&j| w.bit(j) == 0).collect();
    match internal_zeros.as_slice() {
        [] => WatermarkShape::Case3 { last_bit },
        &[zero] => WatermarkShape::Case2 {
            ell: zero - 2,
            r: n - 1 - zero,
            last_bit,
        },
        _ => WatermarkShape::Case1,
    }
}
