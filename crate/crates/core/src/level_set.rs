//! Nested training sets and a disjoint held-out set.
//!
//! Level `i` (1-based) of a split is generated from a seed derived from the
//! master seed, the split's stream and `i` alone. A set of `L` levels is
//! therefore the first `L` entries of any larger set from the same master
//! seed, and the held-out split draws from a separate stream.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::EnvKind;
use crate::error::Result;
use crate::level::Level;
use crate::procgen::GenSeed;
use crate::rng::{self, stream};

pub const DEFAULT_HELD_OUT_LEVELS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    HeldOut,
}

impl Split {
    fn stream(self) -> u64 {
        match self {
            Split::Train => stream::TRAIN_LEVELS,
            Split::HeldOut => stream::HELD_OUT_LEVELS,
        }
    }
}

/// Generator seed of level `index` (1-based) in `split`.
pub fn level_seed(master: u64, split: Split, index: usize) -> GenSeed {
    GenSeed(rng::derive_seed(master, &[split.stream(), index as u64]))
}

/// Levels `1..=count` of `split`, generated in parallel and returned in
/// index order.
pub fn generate_level_set(kind: EnvKind, master: u64, split: Split, count: usize) -> Result<Vec<Level>> {
    (1..=count).into_par_iter().map(|i| Level::generate(kind, level_seed(master, split, i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn smaller_sets_are_prefixes() {
        let small = generate_level_set(EnvKind::TrafficNavigation, 11, Split::Train, 3).unwrap();
        let large = generate_level_set(EnvKind::TrafficNavigation, 11, Split::Train, 6).unwrap();
        assert_eq!(small[..], large[..3]);
    }

    #[test]
    fn held_out_seeds_are_disjoint_from_training_seeds() {
        let train: HashSet<u64> = (1..=10_000).map(|i| level_seed(5, Split::Train, i).0).collect();
        assert_eq!(train.len(), 10_000);
        assert!((1..=DEFAULT_HELD_OUT_LEVELS).all(|i| !train.contains(&level_seed(5, Split::HeldOut, i).0)));
    }
}
