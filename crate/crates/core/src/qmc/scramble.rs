//! Owen nested-uniform and Matoušek linear-plus-shift scrambles.
//!
//! Both act digit-wise on each coordinate word independently and preserve
//! the elementary-interval counts of the input net.

use super::direction::DIGIT_WIDTH;
use super::sobol::{DigitalPointSet, ScrambleDescriptor};
use crate::error::{Error, Result};
use crate::seed::{hash2, split, CounterRng};

const SCRAMBLE_TAG: u64 = 0x5c7a_b1e0;
const BLOCK: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScrambleKind {
    None,
    NestedUniform,
    LinearShift,
}

impl std::str::FromStr for ScrambleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "nested-uniform" | "owen" => Ok(Self::NestedUniform),
            "linear-with-shift" | "linear" => Ok(Self::LinearShift),
            other => Err(Error::Domain(format!("unknown scramble kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for ScrambleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::NestedUniform => "nested-uniform",
            Self::LinearShift => "linear-with-shift",
        })
    }
}

/// Nested uniform scramble of one coordinate.
///
/// Every node of the binary digit tree carries an independent random flip
/// bit. Nodes are grouped six levels at a time: one keyed hash of
/// `(block, input prefix above the block)` yields 63 bits, one per node of
/// that depth-6 subtree in heap order.
#[derive(Clone, Copy, Debug)]
pub struct NestedUniform {
    key: u64,
}

impl NestedUniform {
    pub fn new(seed: u64, dim: usize) -> Self {
        Self { key: split(split(seed, SCRAMBLE_TAG), dim as u64) }
    }

    #[inline]
    pub fn apply(&self, word: u64) -> u64 {
        let mut out = 0u64;
        let mut start = 0u32;
        while start < DIGIT_WIDTH {
            let len = BLOCK.min(DIGIT_WIDTH - start);
            let prefix = if start == 0 { 0 } else { word >> (DIGIT_WIDTH - start) };
            let tree = hash2(self.key, start as u64, prefix);
            let mut node = 0u32;
            for k in 0..len {
                let pos = DIGIT_WIDTH - 1 - start - k;
                let digit = (word >> pos) & 1;
                let flip = (tree >> node) & 1;
                out |= (digit ^ flip) << pos;
                node = 2 * node + 1 + digit as u32;
            }
            start += len;
        }
        out
    }
}

/// Random nonsingular lower-triangular digit matrix followed by a digital shift.
#[derive(Clone, Debug)]
pub struct LinearScramble {
    rows: [u64; DIGIT_WIDTH as usize],
    shift: u64,
}

impl LinearScramble {
    pub fn new(seed: u64, dim: usize) -> Self {
        let rng = CounterRng::new(split(split(seed, SCRAMBLE_TAG ^ 1), dim as u64));
        let full = (1u64 << DIGIT_WIDTH) - 1;
        let mut rows = [0u64; DIGIT_WIDTH as usize];
        for (k, row) in rows.iter_mut().enumerate() {
            let diag_pos = DIGIT_WIDTH - 1 - k as u32;
            // output digit k+1 mixes input digits 1..=k+1
            let above = full & !((1u64 << (diag_pos + 1)) - 1);
            *row = (rng.bits(k as u64) & above) | (1u64 << diag_pos);
        }
        let shift = rng.bits(DIGIT_WIDTH as u64) & full;
        Self { rows, shift }
    }

    #[inline]
    pub fn apply(&self, word: u64) -> u64 {
        let mut out = 0u64;
        for (k, row) in self.rows.iter().enumerate() {
            let bit = ((row & word).count_ones() & 1) as u64;
            out |= bit << (DIGIT_WIDTH - 1 - k as u32);
        }
        out ^ self.shift
    }
}

/// Randomizes an unscrambled point set. Deterministic in `(points, kind, seed)`.
pub fn scramble(points: &DigitalPointSet, kind: ScrambleKind, seed: u64) -> Result<DigitalPointSet> {
    if points.scramble().kind != ScrambleKind::None {
        return Err(Error::Contract("point set is already scrambled".into()));
    }
    let d = points.dim();
    let mut words = points.words().to_vec();
    match kind {
        ScrambleKind::None => {}
        ScrambleKind::NestedUniform => {
            let maps: Vec<NestedUniform> = (0..d).map(|j| NestedUniform::new(seed, j)).collect();
            for p in words.chunks_mut(d) {
                for (w, map) in p.iter_mut().zip(&maps) {
                    *w = map.apply(*w);
                }
            }
        }
        ScrambleKind::LinearShift => {
            let maps: Vec<LinearScramble> = (0..d).map(|j| LinearScramble::new(seed, j)).collect();
            for p in words.chunks_mut(d) {
                for (w, map) in p.iter_mut().zip(&maps) {
                    *w = map.apply(*w);
                }
            }
        }
    }
    Ok(DigitalPointSet::from_parts(points.m(), d, words, ScrambleDescriptor { kind, seed }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmc::{sobol_points, DirectionNumbers};

    #[test]
    fn deterministic_given_seed() {
        let dirs = DirectionNumbers::embedded(3).unwrap();
        let pts = sobol_points(&dirs, 3, 6).unwrap();
        for kind in [ScrambleKind::NestedUniform, ScrambleKind::LinearShift] {
            let a = scramble(&pts, kind, 99).unwrap();
            let b = scramble(&pts, kind, 99).unwrap();
            let c = scramble(&pts, kind, 100).unwrap();
            assert_eq!(a, b);
            assert_ne!(a.words(), c.words());
        }
    }

    #[test]
    fn rescrambling_is_rejected() {
        let dirs = DirectionNumbers::embedded(1).unwrap();
        let pts = sobol_points(&dirs, 1, 2).unwrap();
        let once = scramble(&pts, ScrambleKind::NestedUniform, 1).unwrap();
        assert!(matches!(scramble(&once, ScrambleKind::LinearShift, 2), Err(Error::Contract(_))));
    }

    #[test]
    fn nested_scramble_is_a_bijection_on_prefixes() {
        // Two words agreeing on the first k digits map to outputs agreeing on
        // the first k digits, and the first differing digit still differs.
        let map = NestedUniform::new(5, 0);
        let a = 0b1011_0110u64 << 45;
        let b = 0b1011_1110u64 << 45;
        let (fa, fb) = (map.apply(a), map.apply(b));
        assert_eq!((fa ^ fb).leading_zeros(), (a ^ b).leading_zeros());
    }

    #[test]
    fn linear_scramble_preserves_prefix_structure() {
        let map = LinearScramble::new(11, 2);
        let a = 0b1100_0000u64 << 45;
        let b = 0b1101_0000u64 << 45;
        assert_eq!((map.apply(a) ^ map.apply(b)).leading_zeros(), (a ^ b).leading_zeros());
    }
}
