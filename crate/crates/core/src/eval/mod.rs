//! Cross-play evaluation: mixed-population matches, win and reward matrices,
//! generalization gaps and Elo ratings.

mod elo;
mod matrix;

use std::io::{BufRead, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use elo::{
    elo_update, expected_score, fit_elo, match_score, EloConfig, RatingTable, DEFAULT_INITIAL_RATING, DEFAULT_K,
    DEFAULT_MAX_SWEEPS, DEFAULT_TOLERANCE,
};
pub use matrix::{generalization_gap, mean_score_matrix, win_matrix, GenGap, ScoreMatrix};

use crate::engine::{run_episode, EnvKind, Environment, EpisodeConfig};
use crate::envs::ctf::{CtfEnv, Team};
use crate::error::{Error, Result};
use crate::level::Level;
use crate::policy::{Policy, Population};
use crate::rng::{self, stream};

pub const DEFAULT_MATCHES_PER_PAIRING: usize = 100;

/// How many seats are filled from population A and from population B.
/// A's members take the first seats, which in Capture the Flag is the red
/// team.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossPlayGrouping {
    pub env: EnvKind,
    pub from_a: usize,
    pub from_b: usize,
}

impl CrossPlayGrouping {
    pub fn default_for(env: EnvKind) -> Self {
        let (from_a, from_b) = match env {
            EnvKind::HarvestPatch => (1, 5),
            EnvKind::TrafficNavigation => (1, 7),
            EnvKind::Overcooked => (1, 1),
            EnvKind::CaptureTheFlag => (2, 2),
        };
        Self { env, from_a, from_b }
    }

    pub fn new(env: EnvKind, from_a: usize, from_b: usize) -> Result<Self> {
        let g = Self { env, from_a, from_b };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.env.num_players();
        if self.from_a + self.from_b != n {
            return Err(Error::config(format!(
                "grouping {}+{} does not fill the {n} seats of {}",
                self.from_a, self.from_b, self.env
            )));
        }
        if self.from_a == 0 {
            return Err(Error::config("population A must fill at least one seat"));
        }
        if self.env == EnvKind::CaptureTheFlag && self.from_a != 2 {
            return Err(Error::config("capture the flag matches are two against two"));
        }
        Ok(())
    }
}

/// Outcome of one cross-play match.
///
/// In Capture the Flag the scores are the two teams' capture counts. In the
/// other environments `score_a` is the mean return of A's sampled agents and
/// `score_b` that of B's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub env: EnvKind,
    pub level_id: String,
    pub pop_a: String,
    pub pop_b: String,
    pub seed: u64,
    pub members_a: Vec<usize>,
    pub members_b: Vec<usize>,
    pub score_a: f64,
    pub score_b: f64,
    /// Undiscounted return of every seat; A's agents come first.
    pub returns: Vec<f64>,
}

impl MatchResult {
    /// Returns of the agents drawn from population A.
    pub fn focal_rewards(&self) -> &[f64] {
        &self.returns[..self.members_a.len()]
    }

    /// 1 if A won, 0 if B won, ½ for a draw.
    pub fn outcome_a(&self) -> f64 {
        match_score(self.score_a, self.score_b)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Plays one match with members drawn with replacement from each population.
pub fn cross_play_match(
    pop_a: &Population,
    pop_b: &Population,
    grouping: &CrossPlayGrouping,
    level: &Level,
    seed: u64,
) -> Result<MatchResult> {
    cross_play_match_with_horizon(pop_a, pop_b, grouping, level, seed, None)
}

/// As [`cross_play_match`], with an optional episode length in place of the
/// environment's horizon.
pub fn cross_play_match_with_horizon(
    pop_a: &Population,
    pop_b: &Population,
    grouping: &CrossPlayGrouping,
    level: &Level,
    seed: u64,
    horizon: Option<usize>,
) -> Result<MatchResult> {
    grouping.validate()?;
    pop_a.validate()?;
    pop_b.validate()?;
    let env = grouping.env;
    for (what, kind) in [(&pop_a.id, pop_a.env), (&pop_b.id, pop_b.env), (&level.id().to_owned(), level.kind())] {
        if kind != env {
            return Err(Error::config(format!("{what} is for {kind}, grouping is for {env}")));
        }
    }

    let mut rng = rng::rng_for(seed, &[stream::MATCH]);
    let members_a: Vec<usize> = (0..grouping.from_a).map(|_| rng.gen_range(0..pop_a.len())).collect();
    let members_b: Vec<usize> = (0..grouping.from_b).map(|_| rng.gen_range(0..pop_b.len())).collect();
    let policies: Vec<&dyn Policy> = members_a
        .iter()
        .map(|&m| &pop_a.members[m] as &dyn Policy)
        .chain(members_b.iter().map(|&m| &pop_b.members[m] as &dyn Policy))
        .collect();

    let mut config = EpisodeConfig::for_env(env, rng::derive_seed(seed, &[stream::MATCH, 1]));
    if let Some(h) = horizon {
        config = config.with_horizon(h);
    }

    let (traj, captures) = match level {
        Level::Ctf(l) => {
            let mut sim = CtfEnv::new(l.clone());
            let traj = run_episode(&mut sim, &policies, &config)?;
            (traj, Some((sim.captures(Team::Red), sim.captures(Team::Blue))))
        }
        other => {
            let mut sim: Box<dyn Environment> = other.make_env();
            (run_episode(sim.as_mut(), &policies, &config)?, None)
        }
    };
    let returns = traj.returns;
    let (score_a, score_b) = match captures {
        Some((red, blue)) => (red as f64, blue as f64),
        None => (mean(&returns[..grouping.from_a]), mean(&returns[grouping.from_a..])),
    };
    Ok(MatchResult {
        env,
        level_id: level.id().to_owned(),
        pop_a: pop_a.id.clone(),
        pop_b: pop_b.id.clone(),
        seed,
        members_a,
        members_b,
        score_a,
        score_b,
        returns,
    })
}

/// Which population pairs a tournament covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Every ordered pair `(i, j)` including `i == j`, as needed for full
    /// cross-play matrices.
    Ordered,
    /// Every `(i, j)` with `i < j`, as used for rating fits.
    Unordered,
}

/// One scheduled match: population indices, level index and match seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchTask {
    pub a: usize,
    pub b: usize,
    pub level: usize,
    pub seed: u64,
}

/// Lays out `per_pairing` matches for every pair, each on a level drawn
/// uniformly from `num_levels`.
pub fn schedule(num_pops: usize, num_levels: usize, per_pairing: usize, pairing: Pairing, seed: u64) -> Result<Vec<MatchTask>> {
    if num_levels == 0 {
        return Err(Error::domain("no levels to schedule matches on"));
    }
    let pairs: Vec<(usize, usize)> = match pairing {
        Pairing::Ordered => (0..num_pops).flat_map(|i| (0..num_pops).map(move |j| (i, j))).collect(),
        Pairing::Unordered => (0..num_pops).flat_map(|i| (i + 1..num_pops).map(move |j| (i, j))).collect(),
    };
    Ok(pairs
        .into_iter()
        .flat_map(|(a, b)| {
            (0..per_pairing).map(move |r| {
                let path = [stream::MATCH, a as u64, b as u64, r as u64];
                let level = rng::rng_for(seed, &path).gen_range(0..num_levels);
                MatchTask { a, b, level, seed: rng::derive_seed(seed, &path) }
            })
        })
        .collect())
}

/// Plays every task in parallel; results come back in task order.
pub fn run_matches(
    populations: &[Population],
    levels: &[Level],
    grouping: &CrossPlayGrouping,
    tasks: &[MatchTask],
    horizon: Option<usize>,
) -> Result<Vec<MatchResult>> {
    for t in tasks {
        if t.a >= populations.len() || t.b >= populations.len() || t.level >= levels.len() {
            return Err(Error::config(format!("match task {t:?} refers to a missing population or level")));
        }
    }
    tasks
        .par_iter()
        .map(|t| {
            cross_play_match_with_horizon(
                &populations[t.a],
                &populations[t.b],
                grouping,
                &levels[t.level],
                t.seed,
                horizon,
            )
        })
        .collect()
}

/// Population ids in order of first appearance.
pub fn population_ids(results: &[MatchResult]) -> Vec<String> {
    let mut ids: Vec<String> = Vec::new();
    for r in results {
        for id in [&r.pop_a, &r.pop_b] {
            if !ids.contains(id) {
                ids.push(id.clone());
            }
        }
    }
    ids
}

/// One JSON object per line.
pub fn write_match_log(results: &[MatchResult], mut out: impl Write) -> Result<()> {
    for r in results {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a log written by [`write_match_log`]; blank lines are ignored.
pub fn read_match_log(input: impl BufRead) -> Result<Vec<MatchResult>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: MatchResult =
            serde_json::from_str(&line).map_err(|e| Error::parse(i + 1, e.column(), e.to_string()))?;
        if !r.score_a.is_finite() || !r.score_b.is_finite() {
            return Err(Error::parse(i + 1, 1, "match scores must be finite"));
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) fn test_result(a: &str, b: &str, score_a: f64, score_b: f64) -> MatchResult {
    MatchResult {
        env: EnvKind::CaptureTheFlag,
        level_id: "test".into(),
        pop_a: a.into(),
        pop_b: b.into(),
        seed: 0,
        members_a: vec![0, 0],
        members_b: vec![0, 0],
        score_a,
        score_b,
        returns: vec![0.0; 4],
    }
}
