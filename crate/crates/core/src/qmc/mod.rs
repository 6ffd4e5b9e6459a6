//! Base-2 Sobol' digital nets and their randomizations.

mod direction;
mod scramble;
mod sobol;

pub use direction::{
    load_direction_numbers, DimensionRecord, DirectionNumbers, DIGIT_WIDTH, EMBEDDED_DIMS,
    EMBEDDED_JOE_KUO,
};
pub use scramble::{scramble, LinearScramble, NestedUniform, ScrambleKind};
pub use sobol::{
    sobol_points, word_to_unit, DigitalPointSet, NetParams, ScrambleDescriptor, MAX_MATERIALIZED_M,
};

use crate::error::Result;

/// Scrambled Sobol' points as unit-cube rows: the common path for estimators.
pub fn scrambled_sobol(
    dirs: &DirectionNumbers,
    d: usize,
    m: u32,
    kind: ScrambleKind,
    seed: u64,
) -> Result<DigitalPointSet> {
    scramble(&sobol_points(dirs, d, m)?, kind, seed)
}
