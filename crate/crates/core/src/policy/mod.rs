//! Policies: the decision-maker interface, a zoo of scripted baselines that
//! stand in for trained agents, and the social-value-orientation transform.

mod dist;
pub mod scripted;
mod spec;
mod svo;

pub use dist::ActionDist;
pub use spec::{archetypes, Population, PolicySpec, REGISTRY};
pub use svo::{svo_population_presets, svo_utility, SvoParams, SvoPreset};

use std::hash::Hash;

use crate::engine::{EnvKind, Observation};
use crate::error::{Error, Result};

/// Per-episode policy state. Policies may use it freely; the episode loop
/// resets it at the start of each episode and snapshots it for the
/// diversity metric.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PolicyMemory {
    pub step: u64,
    pub slots: [i64; 4],
}

/// Maps one player's observation (and memory) to a distribution over the
/// environment's discrete actions.
///
/// Implementations must be pure: the same observation and memory give the
/// same distribution and the same updated memory.
pub trait Policy: Send + Sync {
    fn env(&self) -> EnvKind;

    fn name(&self) -> String;

    fn act(&self, obs: &Observation, memory: &mut PolicyMemory) -> Result<ActionDist>;
}

pub(crate) fn check_obs(env: EnvKind, obs: &Observation) -> Result<()> {
    if obs.matches(&env.obs_spec()) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "observation {}x{} with {} aux channels does not match {env}",
            obs.height,
            obs.width,
            obs.aux.len()
        )))
    }
}
