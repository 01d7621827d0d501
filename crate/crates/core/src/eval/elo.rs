use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::MatchResult;
use crate::error::{Error, Result};

pub const DEFAULT_K: f64 = 2.0;
pub const DEFAULT_INITIAL_RATING: f64 = 1000.0;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_SWEEPS: usize = 1_000_000;

/// Match score for side `i`: 1 for a win, 0 for a loss, ½ for a draw.
pub fn match_score(s_i: f64, s_j: f64) -> f64 {
    match s_i.partial_cmp(&s_j) {
        Some(Ordering::Greater) => 1.0,
        Some(Ordering::Less) => 0.0,
        _ => 0.5,
    }
}

/// Expected score of a player rated `r_i` against one rated `r_j`.
pub fn expected_score(r_i: f64, r_j: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf((r_j - r_i) / 400.0))
}

/// One zero-sum rating update from a single match.
pub fn elo_update(r_i: f64, r_j: f64, s_i: f64, s_j: f64, k: f64) -> (f64, f64) {
    let delta = k * (match_score(s_i, s_j) - expected_score(r_i, r_j));
    (r_i + delta, r_j - delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EloConfig {
    pub k: f64,
    pub initial: f64,
    /// Stop once no rating moves by this much over a full sweep.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for EloConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            initial: DEFAULT_INITIAL_RATING,
            tolerance: DEFAULT_TOLERANCE,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingTable {
    /// Population ids in order of first appearance in the results.
    pub ids: Vec<String>,
    pub ratings: Vec<f64>,
    pub k: f64,
    pub initial: f64,
    pub sweeps: usize,
    pub converged: bool,
}

impl RatingTable {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.ids.iter().position(|x| x == id).map(|i| self.ratings[i])
    }

    /// `(id, rating)` pairs, best first; ties keep first-appearance order.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut rows: Vec<(&str, f64)> = self.ids.iter().map(String::as_str).zip(self.ratings.iter().copied()).collect();
        rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal));
        rows
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# elo K={} init={} sweeps={} converged={}\n",
            self.k, self.initial, self.sweeps, self.converged
        );
        for (rank, (id, r)) in self.ranked().into_iter().enumerate() {
            let _ = writeln!(out, "{}\t{id}\t{r:.4}", rank + 1);
        }
        out
    }
}

/// Sweeps the results in input order, applying [`elo_update`] to each,
/// until the largest change of any rating over one sweep falls below the
/// tolerance or the sweep cap is hit.
///
/// Self-play results carry no rating information and are skipped.
pub fn fit_elo(results: &[MatchResult], config: &EloConfig) -> Result<RatingTable> {
    if results.is_empty() {
        return Err(Error::domain("cannot fit ratings to an empty result list"));
    }
    if !(config.k > 0.0) {
        return Err(Error::domain(format!("K must be positive, got {}", config.k)));
    }
    let ids = super::population_ids(results);
    let pairs: Vec<(usize, usize, f64, f64)> = results
        .iter()
        .filter(|r| r.pop_a != r.pop_b)
        .map(|r| {
            let i = ids.iter().position(|x| *x == r.pop_a).expect("collected");
            let j = ids.iter().position(|x| *x == r.pop_b).expect("collected");
            (i, j, r.score_a, r.score_b)
        })
        .collect();

    let mut ratings = vec![config.initial; ids.len()];
    let mut before = ratings.clone();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < config.max_sweeps {
        before.copy_from_slice(&ratings);
        for &(i, j, si, sj) in &pairs {
            let (ri, rj) = elo_update(ratings[i], ratings[j], si, sj, config.k);
            ratings[i] = ri;
            ratings[j] = rj;
        }
        sweeps += 1;
        let change = ratings.iter().zip(&before).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if change < config.tolerance {
            converged = true;
            break;
        }
    }
    Ok(RatingTable { ids, ratings, k: config.k, initial: config.initial, sweeps, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::test_result;
    use proptest::prelude::*;

    #[test]
    fn update_examples() {
        assert_eq!(elo_update(1000.0, 1000.0, 1.0, 0.0, 2.0), (1001.0, 999.0));
        assert_eq!(elo_update(1000.0, 1000.0, 3.0, 3.0, 2.0), (1000.0, 1000.0));
        // Hand evaluation: expected = 1 / (1 + 10^-0.5) = 0.7597469266...
        let expected = 1.0 / (1.0 + 1.0 / 10f64.sqrt());
        let (ri, rj) = elo_update(1200.0, 1000.0, 0.0, 1.0, 2.0);
        assert!((ri - (1200.0 - 2.0 * expected)).abs() < 1e-12);
        assert!((ri - 1198.4806).abs() < 1e-4, "{ri}");
        assert!((rj - 1001.5194).abs() < 1e-4, "{rj}");
    }

    #[test]
    fn all_draws_leave_initial_ratings() {
        let results: Vec<_> = (0..10).map(|i| test_result(["a", "b", "c"][i % 3], ["b", "c", "a"][i % 3], 1.0, 1.0)).collect();
        let t = fit_elo(&results, &EloConfig::default()).unwrap();
        assert!(t.converged);
        assert_eq!(t.sweeps, 1);
        assert!(t.ratings.iter().all(|&r| r == 1000.0));
    }

    #[test]
    fn single_match_single_sweep() {
        let results = vec![test_result("a", "b", 1.0, 0.0)];
        let t = fit_elo(&results, &EloConfig { max_sweeps: 1, ..EloConfig::default() }).unwrap();
        assert_eq!(t.ratings, vec![1001.0, 999.0]);
        assert!(!t.converged);
    }

    #[test]
    fn transitive_dominance_orders_ratings() {
        let mut results = Vec::new();
        for _ in 0..100 {
            results.push(test_result("a", "b", 1.0, 0.0));
            results.push(test_result("b", "c", 1.0, 0.0));
        }
        let t = fit_elo(&results, &EloConfig { max_sweeps: 2000, ..EloConfig::default() }).unwrap();
        let (a, b, c) = (t.get("a").unwrap(), t.get("b").unwrap(), t.get("c").unwrap());
        assert!(a > b && b > c, "{a} {b} {c}");
        assert!((a + b + c - 3000.0).abs() < 1e-9);
        assert_eq!(t.ranked()[0].0, "a");
    }

    #[test]
    fn empty_results_are_rejected() {
        assert!(fit_elo(&[], &EloConfig::default()).is_err());
    }

    proptest! {
        #[test]
        fn updates_are_zero_sum_and_antisymmetric(
            ri in 0.0f64..3000.0, rj in 0.0f64..3000.0, si in 0.0f64..5.0, sj in 0.0f64..5.0, k in 0.1f64..40.0,
        ) {
            let (a, b) = elo_update(ri, rj, si, sj, k);
            prop_assert!((a + b - ri - rj).abs() < 1e-9);
            let (b2, a2) = elo_update(rj, ri, sj, si, k);
            prop_assert!((a - a2).abs() < 1e-9 && (b - b2).abs() < 1e-9);
        }
    }
}
