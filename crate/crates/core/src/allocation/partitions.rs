use crate::error::{Error, Result};

/// Largest L for which the catalogue is enumerated.
pub const MAX_PARTITION_STRATA: usize = 24;

/// All ways to write 1 as a sum of L negative powers of two, up to order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionCatalogue {
    pub strata: usize,
    /// Non-decreasing exponents κ (β_ℓ = 2^{-κ_ℓ}), in lexicographic order.
    pub partitions: Vec<Vec<u32>>,
}

impl PartitionCatalogue {
    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    /// "1/2 1/4 1/4" style rendering of one partition.
    pub fn format(kappa: &[u32]) -> String {
        kappa.iter().map(|k| format!("1/{}", 1u64 << k)).collect::<Vec<_>>().join(" ")
    }
}

/// Depth-first enumeration over non-decreasing κ with exact arithmetic in
/// units of 2^{-(L-1)}, the finest part any L-term partition can use.
pub fn enumerate_partitions(strata: usize) -> Result<PartitionCatalogue> {
    if !(2..=MAX_PARTITION_STRATA).contains(&strata) {
        return Err(Error::Capability(format!(
            "partition catalogue supports 2 <= L <= {MAX_PARTITION_STRATA}, got {strata}"
        )));
    }
    let finest = (strata - 1) as u32;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(strata);
    descend(1u64 << finest, strata, 1, finest, &mut current, &mut out);
    Ok(PartitionCatalogue { strata, partitions: out })
}

fn descend(
    remaining: u64,
    slots: usize,
    min_kappa: u32,
    finest: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if slots == 0 {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    for kappa in min_kappa..=finest {
        let part = 1u64 << (finest - kappa);
        if part > remaining {
            continue;
        }
        let rest = remaining - part;
        let later = (slots - 1) as u64;
        // later parts are each between one unit and `part`
        if rest < later || rest > later * part {
            continue;
        }
        current.push(kappa);
        descend(rest, slots - 1, kappa, finest, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(enumerate_partitions(2).unwrap().partitions, vec![vec![1, 1]]);
        assert_eq!(enumerate_partitions(3).unwrap().partitions, vec![vec![1, 2, 2]]);
        assert_eq!(
            enumerate_partitions(4).unwrap().partitions,
            vec![vec![1, 2, 3, 3], vec![2, 2, 2, 2]]
        );
    }

    #[test]
    fn every_partition_sums_to_one() {
        for l in 2..=12 {
            let cat = enumerate_partitions(l).unwrap();
            for kappa in &cat.partitions {
                let denom = 1u64 << 20;
                let total: u64 = kappa.iter().map(|&k| denom >> k).sum();
                assert_eq!(total, denom);
                assert!(kappa.windows(2).all(|w| w[0] <= w[1]));
            }
            let mut sorted = cat.partitions.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted, cat.partitions);
        }
    }

    #[test]
    fn counts_follow_known_sequence() {
        let want = [1, 1, 2, 3, 5, 9, 16, 28, 50, 89, 159, 285, 510, 914, 1639];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(enumerate_partitions(i + 2).unwrap().len(), w, "L={}", i + 2);
        }
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(enumerate_partitions(1), Err(Error::Capability(_))));
        assert!(matches!(enumerate_partitions(25), Err(Error::Capability(_))));
        assert!(enumerate_partitions(24).is_ok());
    }

    #[test]
    fn formatting() {
        assert_eq!(PartitionCatalogue::format(&[1, 2, 2]), "1/2 1/4 1/4");
    }
}
