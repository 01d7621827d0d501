//! Expected action variation: how differently the members of a population
//! act when shown the same states.
//!
//! The computation has three stages. [`build_state_pool`] plays episodes
//! with members of every population and samples player views from them.
//! [`approximate_policy_dists`] prompts every member with every pooled view
//! and records its action distribution, either exactly or as a normalized
//! histogram of `R` sampled actions. [`intra_population_variation`] averages
//! the total variation distance over pool entries and then over unordered
//! member pairs.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{run_episode_with, EnvKind, EpisodeConfig, Observation};
use crate::error::{Error, Result};
use crate::level::Level;
use crate::policy::{Policy, PolicyMemory, PolicySpec, Population};
use crate::rng::{self, stream};

pub const DEFAULT_EPISODES: usize = 10;
pub const DEFAULT_STATES_PER_EPISODE: usize = 10;
pub const DEFAULT_ACTION_SAMPLES: usize = 100;

/// Scaling of the per-entry distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TvdNorm {
    /// `½·Σ|p − q|`, in `[0, 1]`.
    #[default]
    Half,
    /// `Σ|p − q|`, in `[0, 2]`.
    Raw,
}

impl TvdNorm {
    pub fn distance(self, p: &[f64], q: &[f64]) -> f64 {
        let l1: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
        match self {
            TvdNorm::Half => 0.5 * l1,
            TvdNorm::Raw => l1,
        }
    }
}

/// How member distributions are obtained at each pool entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistMode {
    /// The distribution returned by the policy.
    Exact,
    /// Histogram of this many sampled actions, divided by the count.
    Sampled(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EavConfig {
    /// Episodes per population (`E`).
    pub episodes: usize,
    /// Timesteps sampled per episode (`J`).
    pub states_per_episode: usize,
    pub mode: DistMode,
    /// Episode length; the environment's horizon when `None`.
    pub horizon: Option<usize>,
    pub norm: TvdNorm,
    pub seed: u64,
}

impl EavConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            episodes: DEFAULT_EPISODES,
            states_per_episode: DEFAULT_STATES_PER_EPISODE,
            mode: DistMode::Sampled(DEFAULT_ACTION_SAMPLES),
            horizon: None,
            norm: TvdNorm::Half,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.episodes == 0 || self.states_per_episode == 0 {
            return Err(Error::domain("episodes and states per episode must both be at least 1"));
        }
        if self.mode == DistMode::Sampled(0) {
            return Err(Error::domain("action sample count must be at least 1"));
        }
        if self.horizon == Some(0) {
            return Err(Error::domain("episode horizon must be at least 1"));
        }
        Ok(())
    }
}

/// One pooled state: what the focal seat saw at timestep `t` and its policy
/// memory at that moment.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolEntry {
    /// Index of the population whose episode produced the state.
    pub population: usize,
    pub episode: usize,
    pub level_id: String,
    /// 1-based timestep, in `1..=episode_len`.
    pub t: usize,
    pub episode_len: usize,
    pub seat: usize,
    pub observation: Observation,
    pub memory: PolicyMemory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatePool {
    pub env: EnvKind,
    pub entries: Vec<PoolEntry>,
    pub episodes: usize,
    pub states_per_episode: usize,
    pub players: usize,
    pub seed: u64,
}

impl StatePool {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn common_env(populations: &[Population]) -> Result<EnvKind> {
    let first = populations.first().ok_or_else(|| Error::domain("no populations given"))?;
    for p in populations {
        p.validate()?;
        if p.env != first.env {
            return Err(Error::config(format!(
                "populations {} ({}) and {} ({}) are for different environments",
                first.id, first.env, p.id, p.env
            )));
        }
    }
    Ok(first.env)
}

/// Plays `E` episodes per population and samples `J` (timestep, seat) views
/// from each, giving `|populations|·E·J` entries in (population, episode,
/// draw) order.
///
/// Each episode seats members drawn with replacement on a level drawn from
/// `levels`. Entries depend only on `config.seed`, not on scheduling.
pub fn build_state_pool(populations: &[Population], levels: &[Level], config: &EavConfig) -> Result<StatePool> {
    config.validate()?;
    let env = common_env(populations)?;
    if levels.is_empty() {
        return Err(Error::domain("cannot build a state pool from an empty level set"));
    }
    if let Some(l) = levels.iter().find(|l| l.kind() != env) {
        return Err(Error::config(format!("level {} is for {}, populations are for {env}", l.id(), l.kind())));
    }
    let players = env.num_players();
    let horizon = config.horizon.unwrap_or(env.horizon());

    let tasks: Vec<(usize, usize)> =
        (0..populations.len()).flat_map(|p| (0..config.episodes).map(move |e| (p, e))).collect();
    let per_episode: Vec<Vec<PoolEntry>> = tasks
        .par_iter()
        .map(|&(p, e)| {
            let pop = &populations[p];
            let mut rng = rng::rng_for(config.seed, &[stream::POOL, p as u64, e as u64]);
            let seats: Vec<&PolicySpec> =
                (0..players).map(|_| &pop.members[rng.gen_range(0..pop.len())]).collect();
            let level = &levels[rng.gen_range(0..levels.len())];
            let draws: Vec<(usize, usize)> =
                (0..config.states_per_episode).map(|_| (rng.gen_range(1..=horizon), rng.gen_range(0..players))).collect();
            let episode_seed = rng::derive_seed(config.seed, &[stream::POOL, p as u64, e as u64, 1]);

            let policies: Vec<&dyn Policy> = seats.iter().map(|s| *s as &dyn Policy).collect();
            let mut sim = level.make_env();
            let cfg = EpisodeConfig::for_env(env, episode_seed).with_horizon(horizon);
            let mut captured: Vec<Option<(Observation, PolicyMemory)>> = vec![None; draws.len()];
            run_episode_with(sim.as_mut(), &policies, &cfg, |view| {
                for (slot, &(t, seat)) in captured.iter_mut().zip(&draws) {
                    if t == view.t {
                        *slot = Some((view.observations[seat].clone(), view.memories[seat].clone()));
                    }
                }
            })?;

            Ok(draws
                .iter()
                .zip(captured)
                .map(|(&(t, seat), snap)| {
                    let (observation, memory) = snap.expect("every drawn timestep is visited");
                    PoolEntry {
                        population: p,
                        episode: e,
                        level_id: level.id().to_owned(),
                        t,
                        episode_len: horizon,
                        seat,
                        observation,
                        memory,
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok(StatePool {
        env,
        entries: per_episode.into_iter().flatten().collect(),
        episodes: config.episodes,
        states_per_episode: config.states_per_episode,
        players,
        seed: config.seed,
    })
}

/// Action distributions indexed `[population][member][entry][action]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyDistTable {
    pub mode: DistMode,
    pub dists: Vec<Vec<Vec<Vec<f64>>>>,
}

impl PolicyDistTable {
    pub fn population(&self, p: usize) -> &[Vec<Vec<f64>>] {
        &self.dists[p]
    }
}

/// Identity of a policy for caching and for keying its sampling stream.
/// Two members with identical specifications are the same agent and get
/// the same histogram at every entry.
fn policy_key(spec: &PolicySpec) -> String {
    serde_json::to_string(spec).expect("policy specs serialize")
}

/// Prompts every member of every population with every pool entry.
///
/// In sampled mode each histogram uses a generator keyed by the seed, the
/// member's specification and the entry index, so results do not depend on
/// member order or scheduling.
pub fn approximate_policy_dists(
    populations: &[Population],
    pool: &StatePool,
    mode: DistMode,
    seed: u64,
) -> Result<PolicyDistTable> {
    if mode == DistMode::Sampled(0) {
        return Err(Error::domain("action sample count must be at least 1"));
    }
    let mut unique: Vec<&PolicySpec> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let member_slots: Vec<Vec<usize>> = populations
        .iter()
        .map(|pop| {
            pop.members
                .iter()
                .map(|m| {
                    *index.entry(policy_key(m)).or_insert_with(|| {
                        unique.push(m);
                        unique.len() - 1
                    })
                })
                .collect()
        })
        .collect();

    let cells: Vec<(usize, usize)> =
        (0..unique.len()).flat_map(|u| (0..pool.len()).map(move |k| (u, k))).collect();
    let flat: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(u, k)| {
            let spec = unique[u];
            let entry = &pool.entries[k];
            let mut memory = entry.memory.clone();
            let dist = spec.act(&entry.observation, &mut memory)?;
            Ok(match mode {
                DistMode::Exact => dist.probs().to_vec(),
                DistMode::Sampled(r) => {
                    let key = rng::digest_of(policy_key(spec).as_str());
                    let mut rng = rng::rng_for(seed, &[stream::HIST, key, k as u64]);
                    let mut hist = vec![0u64; dist.len()];
                    for _ in 0..r {
                        hist[dist.sample(rng.gen::<f64>()) as usize] += 1;
                    }
                    hist.into_iter().map(|c| c as f64 / r as f64).collect()
                }
            })
        })
        .collect::<Result<_>>()?;

    let per_policy: Vec<&[Vec<f64>]> = flat.chunks(pool.len().max(1)).collect();
    let dists = member_slots
        .iter()
        .map(|slots| slots.iter().map(|&u| per_policy.get(u).map_or_else(Vec::new, |d| d.to_vec())).collect())
        .collect();
    Ok(PolicyDistTable { mode, dists })
}

/// Mean over unordered distinct member pairs of the mean per-entry distance.
/// Members are paired by position, so duplicated members form pairs at
/// distance zero. A single member gives 0.
pub fn intra_population_variation(member_dists: &[Vec<Vec<f64>>], norm: TvdNorm) -> Result<f64> {
    let m = member_dists.len();
    if m == 0 {
        return Err(Error::domain("population has no members"));
    }
    let entries = member_dists[0].len();
    if member_dists.iter().any(|d| d.len() != entries) {
        return Err(Error::domain("members were evaluated on different numbers of entries"));
    }
    if m == 1 {
        return Ok(0.0);
    }
    if entries == 0 {
        return Err(Error::domain("no pool entries to compare on"));
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 0..m {
        for b in a + 1..m {
            let sum: f64 = member_dists[a].iter().zip(&member_dists[b]).map(|(p, q)| norm.distance(p, q)).sum();
            total += sum / entries as f64;
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationEav {
    pub id: String,
    pub eav: f64,
    pub members: usize,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EavReport {
    pub env: EnvKind,
    pub populations: Vec<PopulationEav>,
    pub episodes: usize,
    pub states_per_episode: usize,
    pub mode: DistMode,
    pub norm: TvdNorm,
    pub seed: u64,
    pub pool_size: usize,
}

impl EavReport {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.populations.iter().find(|p| p.id == id).map(|p| p.eav)
    }

    /// One header line with the provenance, then one line per population.
    pub fn to_text(&self) -> String {
        let samples = match self.mode {
            DistMode::Exact => "exact".to_owned(),
            DistMode::Sampled(r) => r.to_string(),
        };
        let norm = match self.norm {
            TvdNorm::Half => "half",
            TvdNorm::Raw => "raw",
        };
        let mut out = format!(
            "# eav env={} E={} J={} R={} seed={} pool={} norm={}\n",
            self.env, self.episodes, self.states_per_episode, samples, self.seed, self.pool_size, norm
        );
        for p in &self.populations {
            let _ = writeln!(out, "{}\t{:.6}\tmembers={}\tpairs={}", p.id, p.eav, p.members, p.pairs);
        }
        out
    }
}

/// Builds the pool, estimates distributions and reports one value per
/// population.
pub fn expected_action_variation(
    populations: &[Population],
    levels: &[Level],
    config: &EavConfig,
) -> Result<EavReport> {
    let pool = build_state_pool(populations, levels, config)?;
    let table = approximate_policy_dists(populations, &pool, config.mode, config.seed)?;
    let reports = populations
        .iter()
        .enumerate()
        .map(|(p, pop)| {
            let m = pop.len();
            Ok(PopulationEav {
                id: pop.id.clone(),
                eav: intra_population_variation(table.population(p), config.norm)?,
                members: m,
                pairs: m * (m - 1) / 2,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EavReport {
        env: pool.env,
        populations: reports,
        episodes: config.episodes,
        states_per_episode: config.states_per_episode,
        mode: config.mode,
        norm: config.norm,
        seed: config.seed,
        pool_size: pool.len(),
    })
}

/// Shuffled member order, used to check that the metric ignores ordering.
pub fn shuffled(pop: &Population, seed: u64) -> Population {
    let mut out = pop.clone();
    out.members.shuffle(&mut rng::rng_for(seed, &[stream::POPULATION, 1]));
    out
}
