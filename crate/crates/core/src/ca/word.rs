use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{input, Error, Result};

/// Longest word a [`RegionWord`] can hold.
pub const MAX_WORD_LEN: usize = 32;

pub(crate) fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// A finite Boolean word, packed with the leftmost cell in the most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionWord {
    len: usize,
    bits: u64,
}

impl RegionWord {
    pub fn from_bits(len: usize, bits: u64) -> Result<Self> {
        if len > MAX_WORD_LEN {
            return input(format!("word length {len} exceeds {MAX_WORD_LEN}"));
        }
        if bits & !mask(len) != 0 {
            return input(format!("encoding {bits} does not fit in {len} cells"));
        }
        Ok(RegionWord { len, bits })
    }

    /// Caller guarantees `len <= MAX_WORD_LEN` and `bits < 2^len`.
    pub(crate) fn from_raw(len: usize, bits: u64) -> Self {
        debug_assert!(len <= MAX_WORD_LEN && bits & !mask(len) == 0);
        RegionWord { len, bits }
    }

    pub fn from_symbols(symbols: &[u8]) -> Result<Self> {
        if symbols.len() > MAX_WORD_LEN {
            return input(format!(
                "word length {} exceeds {MAX_WORD_LEN}",
                symbols.len()
            ));
        }
        let mut bits = 0u64;
        for &s in symbols {
            if s > 1 {
                return input(format!("symbol {s} is not in {{0,1}}"));
            }
            bits = (bits << 1) | u64::from(s);
        }
        Ok(RegionWord {
            len: symbols.len(),
            bits,
        })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_bits(len, 0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Canonical integer encoding, `sum symbols[i] * 2^(n-1-i)`.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Symbol at cell `i`, counted from the left.
    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len, "cell {i} out of range for length {}", self.len);
        ((self.bits >> (self.len - 1 - i)) & 1) as u8
    }

    pub fn symbols(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// The sub-word on cells `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> RegionWord {
        assert!(start + len <= self.len);
        let shift = self.len - start - len;
        RegionWord::from_raw(len, (self.bits >> shift) & mask(len))
    }
}

impl fmt::Display for RegionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for RegionWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => input(format!("'{other}' is not a binary digit in word \"{s}\"")),
            })
            .collect::<Result<Vec<u8>>>()?;
        RegionWord::from_symbols(&symbols)
    }
}

impl Serialize for RegionWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RegionWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Boundary control written on the `r` cells at each side of the region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ControlPair {
    pub left: RegionWord,
    pub right: RegionWord,
}

impl ControlPair {
    pub fn new(left: RegionWord, right: RegionWord) -> Result<Self> {
        if left.len() != right.len() || left.is_empty() {
            return input(format!(
                "control sides must both have the rule radius, got {} and {}",
                left.len(),
                right.len()
            ));
        }
        Ok(ControlPair { left, right })
    }

    /// Control with index `enc(left) * 2^r + enc(right)`.
    pub fn from_index(radius: usize, index: u64) -> Result<Self> {
        if radius == 0 || 2 * radius > MAX_WORD_LEN || index >> (2 * radius) != 0 {
            return input(format!("control index {index} invalid for radius {radius}"));
        }
        Ok(ControlPair {
            left: RegionWord::from_raw(radius, index >> radius),
            right: RegionWord::from_raw(radius, index & mask(radius)),
        })
    }

    pub fn radius(&self) -> usize {
        self.left.len()
    }

    pub fn index(&self) -> u64 {
        (self.left.bits() << self.radius()) | self.right.bits()
    }

    /// Parses `"<left>,<right>"`, e.g. `"0,1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (l, r) = s
            .split_once(',')
            .ok_or_else(|| Error::Input(format!("control \"{s}\" must be <left>,<right>")))?;
        ControlPair::new(l.trim().parse()?, r.trim().parse()?)
    }
}

impl fmt::Display for ControlPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left, self.right)
    }
}
