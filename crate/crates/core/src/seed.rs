//! Seed splitting and the keyed counter-based hash used for all randomness.
//!
//! Every random quantity in the crate is a pure function of a 64-bit key and
//! a counter, so results do not depend on evaluation order or thread count.
//!
//! Splitting rule: the child seed for `(parent, index)` is
//! `mix64(parent ^ mix64(index + GOLDEN))`, where `mix64` is the SplitMix64
//! finalizer. Replicate `r` of an experiment uses `split(master, r)`;
//! dimension `j` of a scramble uses `split(split(seed, SCRAMBLE_TAG), j)`.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function (a bijection on `u64`).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent child seed.
#[inline]
pub fn split(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index.wrapping_add(GOLDEN)))
}

/// Keyed pseudo-random function of two counters.
#[inline]
pub fn hash2(key: u64, a: u64, b: u64) -> u64 {
    mix64(key ^ mix64(a.wrapping_mul(GOLDEN) ^ mix64(b.wrapping_add(GOLDEN))))
}

/// Uniform double in `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Counter-based stream of uniforms: the `i`-th value for `key`.
#[derive(Clone, Copy, Debug)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { key: mix64(seed ^ 0x6a09_e667_f3bc_c909) }
    }

    #[inline]
    pub fn uniform(&self, counter: u64) -> f64 {
        unit_f64(mix64(self.key ^ mix64(counter.wrapping_add(GOLDEN))))
    }

    #[inline]
    pub fn bits(&self, counter: u64) -> u64 {
        mix64(self.key ^ mix64(counter.wrapping_add(GOLDEN)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_deterministic_and_distinct() {
        assert_eq!(split(7, 3), split(7, 3));
        assert_ne!(split(7, 3), split(7, 4));
        assert_ne!(split(7, 3), split(8, 3));
    }

    #[test]
    fn uniforms_cover_unit_interval() {
        let rng = CounterRng::new(42);
        let n = 20_000;
        let mut bins = [0usize; 10];
        for i in 0..n {
            let u = rng.uniform(i);
            assert!((0.0..1.0).contains(&u));
            bins[(u * 10.0) as usize] += 1;
        }
        for b in bins {
            assert!((b as f64 - 2000.0).abs() < 200.0, "bin count {b}");
        }
    }
}
