use super::direction::{DirectionNumbers, DIGIT_WIDTH};
use super::scramble::ScrambleKind;
use crate::error::{Error, Result};

/// Quality parameter, log2 size and dimension of a digital net.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetParams {
    pub t: u32,
    pub m: u32,
    pub d: usize,
}

impl NetParams {
    pub fn new(t: u32, m: u32, d: usize) -> Result<Self> {
        if t > m {
            return Err(Error::Domain(format!("t = {t} exceeds m = {m}")));
        }
        if d == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        Ok(Self { t, m, d })
    }
}

/// Describes how a point set was randomized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScrambleDescriptor {
    pub kind: ScrambleKind,
    pub seed: u64,
}

/// `2^m` points in `[0,1)^d` stored as `DIGIT_WIDTH`-digit binary words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitalPointSet {
    m: u32,
    d: usize,
    words: Vec<u64>,
    scramble: ScrambleDescriptor,
}

impl DigitalPointSet {
    pub(crate) fn from_parts(m: u32, d: usize, words: Vec<u64>, scramble: ScrambleDescriptor) -> Self {
        debug_assert_eq!(words.len(), d << m);
        Self { m, d, words, scramble }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        1 << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scramble(&self) -> ScrambleDescriptor {
        self.scramble
    }

    /// Digit words of point `i`.
    pub fn point(&self, i: usize) -> &[u64] {
        &self.words[i * self.d..(i + 1) * self.d]
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Converts point `i` into `out`.
    #[inline]
    pub fn write_unit(&self, i: usize, out: &mut [f64]) {
        for (o, &w) in out.iter_mut().zip(self.point(i)) {
            *o = word_to_unit(w);
        }
    }

    /// All points as rows of reals in `[0,1)`.
    pub fn to_unit_cube(&self) -> Vec<Vec<f64>> {
        self.words.chunks(self.d).map(|p| p.iter().map(|&w| word_to_unit(w)).collect()).collect()
    }
}

/// Σ digit_k 2^{-k}; exact in double precision because the width is 53.
#[inline]
pub fn word_to_unit(word: u64) -> f64 {
    word as f64 * (1.0 / (1u64 << DIGIT_WIDTH) as f64)
}

/// Largest `m` for which a point set is stored in memory.
pub const MAX_MATERIALIZED_M: u32 = 30;

/// First `2^m` points of the `d`-dimensional Sobol' sequence in natural order.
pub fn sobol_points(dirs: &DirectionNumbers, d: usize, m: u32) -> Result<DigitalPointSet> {
    if d == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if m > DIGIT_WIDTH {
        return Err(Error::Domain(format!("m = {m} exceeds the digit width {DIGIT_WIDTH}")));
    }
    if m > MAX_MATERIALIZED_M {
        return Err(Error::Capability(format!("2^{m} points cannot be materialized")));
    }
    if d > dirs.dims() {
        return Err(Error::Capacity { requested: d, available: dirs.dims() });
    }
    let n = 1usize << m;
    let mut words = vec![0u64; n * d];
    for j in 0..d {
        let cols = dirs.columns(j);
        // x_i = x_{i with lowest set bit cleared} ^ v_{lowest set bit}
        for i in 1..n {
            let low = i.trailing_zeros() as usize;
            let prev = i & (i - 1);
            words[i * d + j] = words[prev * d + j] ^ cols[low];
        }
    }
    Ok(DigitalPointSet::from_parts(
        m,
        d,
        words,
        ScrambleDescriptor { kind: ScrambleKind::None, seed: 0 },
    ))
}
