use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ActionId, EnvKind, Environment, Observation};
use crate::error::{Error, Result};
use crate::policy::{Policy, PolicyMemory};
use crate::rng::{self, stream};

pub const TRAJECTORY_LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub num_players: usize,
    pub horizon: usize,
    pub discount: f64,
    pub seed: u64,
}

impl EpisodeConfig {
    /// Defaults for `kind`: its player count and horizon, discount 0.99.
    pub fn for_env(kind: EnvKind, seed: u64) -> Self {
        Self { num_players: kind.num_players(), horizon: kind.horizon(), discount: 0.99, seed }
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self, kind: EnvKind) -> Result<()> {
        if self.num_players != kind.num_players() {
            return Err(Error::config(format!(
                "{kind} is played by {} players, config has {}",
                kind.num_players(),
                self.num_players
            )));
        }
        if !(0.0..1.0).contains(&self.discount) {
            return Err(Error::domain(format!("discount {} outside [0, 1)", self.discount)));
        }
        Ok(())
    }
}

/// One transition. `state_hash` digests the state the joint action was taken in;
/// `observations` are digests of what each player saw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub state_hash: u64,
    pub actions: Vec<ActionId>,
    pub rewards: Vec<f64>,
    pub observations: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub env: EnvKind,
    pub level_id: String,
    pub config: EpisodeConfig,
    pub steps: Vec<StepRecord>,
    pub returns: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn rewards_of(&self, player: usize) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(move |s| s.rewards[player])
    }

    pub fn discounted_returns(&self) -> Vec<f64> {
        (0..self.config.num_players)
            .map(|i| {
                let r: Vec<f64> = self.rewards_of(i).collect();
                discounted_return(&r, self.config.discount).expect("validated discount")
            })
            .collect()
    }
}

/// What a step hook sees before the joint action at step `t` (1-based).
pub struct StepView<'a> {
    pub t: usize,
    pub observations: &'a [Observation],
    pub memories: &'a [PolicyMemory],
}

pub fn run_episode(env: &mut dyn Environment, policies: &[&dyn Policy], config: &EpisodeConfig) -> Result<Trajectory> {
    run_episode_with(env, policies, config, |_| {})
}

/// Runs one episode of exactly `config.horizon` steps.
///
/// Every policy is queried every step, tagged-out players included. Actions
/// are sampled from the returned distributions with a generator derived from
/// `config.seed`, so the trajectory is a pure function of the level, the
/// policies and the seed.
pub fn run_episode_with(
    env: &mut dyn Environment,
    policies: &[&dyn Policy],
    config: &EpisodeConfig,
    mut hook: impl FnMut(&StepView<'_>),
) -> Result<Trajectory> {
    let kind = env.kind();
    config.validate(kind)?;
    if policies.len() != config.num_players {
        return Err(Error::config(format!("{} policies for {} players", policies.len(), config.num_players)));
    }
    if let Some(p) = policies.iter().find(|p| p.env() != kind) {
        return Err(Error::config(format!("policy {} targets {}, not {kind}", p.name(), p.env())));
    }

    env.reset(config.seed);
    let n = config.num_players;
    let spec = kind.obs_spec();
    let mut action_rng = rng::rng_for(config.seed, &[stream::ACTIONS]);
    let mut observations: Vec<Observation> = (0..n).map(|_| Observation::blank(&spec)).collect();
    let mut memories = vec![PolicyMemory::default(); n];
    let mut returns = vec![0.0; n];
    let mut steps = Vec::with_capacity(config.horizon);

    for t in 1..=config.horizon {
        for (i, obs) in observations.iter_mut().enumerate() {
            env.observe_into(i, obs);
        }
        hook(&StepView { t, observations: &observations, memories: &memories });

        let state_hash = env.state_hash();
        let mut actions = Vec::with_capacity(n);
        for i in 0..n {
            let dist = policies[i].act(&observations[i], &mut memories[i])?;
            actions.push(dist.sample(action_rng.gen::<f64>()));
        }
        let mut rewards = vec![0.0; n];
        env.step(&actions, &mut rewards)?;
        for (ret, r) in returns.iter_mut().zip(&rewards) {
            *ret += r;
        }
        steps.push(StepRecord {
            state_hash,
            actions,
            rewards,
            observations: observations.iter().map(Observation::digest).collect(),
        });
    }

    Ok(Trajectory { env: kind, level_id: env.level_id().to_owned(), config: *config, steps, returns })
}

/// Finite-horizon discounted return `sum_t gamma^t r_t`.
pub fn discounted_return(rewards: &[f64], discount: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&discount) {
        return Err(Error::domain(format!("discount {discount} outside [0, 1)")));
    }
    // Horner from the back keeps this exact for the short integer cases.
    Ok(rewards.iter().rev().fold(0.0, |acc, r| r + discount * acc))
}

#[derive(Serialize, Deserialize)]
struct LogHeader {
    format: String,
    version: u32,
    env: EnvKind,
    level: String,
    seed: u64,
    horizon: usize,
    players: usize,
    discount: f64,
}

#[derive(Serialize, Deserialize)]
struct LogStep {
    t: usize,
    actions: Vec<ActionId>,
    rewards: Vec<f64>,
}

/// Writes the line-delimited trajectory log: one JSON header line, then one
/// line per step with the step index, joint action ids and rewards.
pub fn write_trajectory_log(traj: &Trajectory, mut out: impl Write) -> Result<()> {
    let header = LogHeader {
        format: "popgrid-trajectory".into(),
        version: TRAJECTORY_LOG_VERSION,
        env: traj.env,
        level: traj.level_id.clone(),
        seed: traj.config.seed,
        horizon: traj.config.horizon,
        players: traj.config.num_players,
        discount: traj.config.discount,
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for (t, s) in traj.steps.iter().enumerate() {
        serde_json::to_writer(&mut out, &LogStep { t, actions: s.actions.clone(), rewards: s.rewards.clone() })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a log back into (config, joint actions, rewards per step).
pub fn read_trajectory_log(input: impl BufRead) -> Result<(EnvKind, EpisodeConfig, Vec<(Vec<ActionId>, Vec<f64>)>)> {
    let mut lines = input.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| Error::parse(1, 1, "empty trajectory log"))?;
    let header: LogHeader = serde_json::from_str(&first?).map_err(|e| Error::parse(1, e.column(), e.to_string()))?;
    if header.version != TRAJECTORY_LOG_VERSION {
        return Err(Error::parse(1, 1, format!("unsupported log version {}", header.version)));
    }
    let config = EpisodeConfig {
        num_players: header.players,
        horizon: header.horizon,
        discount: header.discount,
        seed: header.seed,
    };
    let mut steps = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let step: LogStep = serde_json::from_str(&line).map_err(|e| Error::parse(i + 1, e.column(), e.to_string()))?;
        if step.t != steps.len() {
            return Err(Error::parse(i + 1, 1, format!("expected step {}, found {}", steps.len(), step.t)));
        }
        steps.push((step.actions, step.rewards));
    }
    Ok((header.env, config, steps))
}
