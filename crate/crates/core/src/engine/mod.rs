//! The Markov-game contract shared by every environment and the
//! deterministic episode loop.

mod episode;
mod grid;
pub mod moves;
mod observation;

pub use episode::{
    discounted_return, read_trajectory_log, run_episode, run_episode_with, write_trajectory_log, EpisodeConfig,
    StepRecord, StepView, Trajectory, TRAJECTORY_LOG_VERSION,
};
pub use grid::{Direction, GridPos};
pub use observation::{ObsSpec, Observation};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discrete action id. Each environment documents its own action table.
pub type ActionId = u8;

/// The four environments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EnvKind {
    #[serde(rename = "harvest_patch")]
    HarvestPatch,
    #[serde(rename = "traffic_navigation")]
    TrafficNavigation,
    #[serde(rename = "overcooked")]
    Overcooked,
    #[serde(rename = "capture_the_flag")]
    CaptureTheFlag,
}

const HARVEST_OBS: ObsSpec = ObsSpec { height: 88, width: 88, window: 11, sprite: 8, aux: &[] };
const TRAFFIC_OBS: ObsSpec =
    ObsSpec { height: 33, width: 33, window: 11, sprite: 3, aux: &["goal_row_offset", "goal_col_offset"] };
const KITCHEN_OBS: ObsSpec = ObsSpec { height: 56, width: 56, window: 7, sprite: 8, aux: &[] };
const CTF_OBS: ObsSpec =
    ObsSpec { height: 88, width: 88, window: 11, sprite: 8, aux: &["own_flag_held_by_enemy", "enemy_flag_held_by_team"] };

impl EnvKind {
    pub const ALL: [EnvKind; 4] =
        [EnvKind::HarvestPatch, EnvKind::TrafficNavigation, EnvKind::Overcooked, EnvKind::CaptureTheFlag];

    pub fn id(self) -> &'static str {
        match self {
            EnvKind::HarvestPatch => "harvest_patch",
            EnvKind::TrafficNavigation => "traffic_navigation",
            EnvKind::Overcooked => "overcooked",
            EnvKind::CaptureTheFlag => "capture_the_flag",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == id)
            .ok_or_else(|| Error::config(format!("unknown environment id {id:?}")))
    }

    pub fn num_players(self) -> usize {
        match self {
            EnvKind::HarvestPatch => 6,
            EnvKind::TrafficNavigation => 8,
            EnvKind::Overcooked => 2,
            EnvKind::CaptureTheFlag => 4,
        }
    }

    pub fn num_actions(self) -> usize {
        match self {
            EnvKind::HarvestPatch | EnvKind::CaptureTheFlag => 8,
            EnvKind::TrafficNavigation => 5,
            EnvKind::Overcooked => 6,
        }
    }

    /// Default episode length in steps.
    pub fn horizon(self) -> usize {
        match self {
            EnvKind::HarvestPatch | EnvKind::TrafficNavigation => 1000,
            EnvKind::Overcooked => 540,
            EnvKind::CaptureTheFlag => 2400,
        }
    }

    pub fn obs_spec(self) -> ObsSpec {
        match self {
            EnvKind::HarvestPatch => HARVEST_OBS,
            EnvKind::TrafficNavigation => TRAFFIC_OBS,
            EnvKind::Overcooked => KITCHEN_OBS,
            EnvKind::CaptureTheFlag => CTF_OBS,
        }
    }
}

impl std::fmt::Display for EnvKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// A partially observable Markov game instance bound to one level.
///
/// Joint actions are resolved simultaneously. All randomness is drawn from
/// an instance-owned generator seeded by [`Environment::reset`].
pub trait Environment: Send {
    fn kind(&self) -> EnvKind;

    fn num_players(&self) -> usize {
        self.kind().num_players()
    }

    fn level_id(&self) -> &str;

    fn reset(&mut self, seed: u64);

    /// Advances one step. `rewards` is overwritten with this step's rewards.
    fn step(&mut self, actions: &[ActionId], rewards: &mut [f64]) -> Result<()>;

    fn observe_into(&self, player: usize, obs: &mut Observation);

    fn observe(&self, player: usize) -> Observation {
        let mut obs = Observation::blank(&self.kind().obs_spec());
        self.observe_into(player, &mut obs);
        obs
    }

    fn state_hash(&self) -> u64;

    fn steps_taken(&self) -> u64;
}

pub(crate) fn check_actions(kind: EnvKind, actions: &[ActionId], rewards: &[f64]) -> Result<()> {
    let n = kind.num_players();
    if actions.len() != n || rewards.len() != n {
        return Err(Error::config(format!(
            "{kind} expects {n} actions and reward slots, got {} and {}",
            actions.len(),
            rewards.len()
        )));
    }
    if let Some(&bad) = actions.iter().find(|&&a| a as usize >= kind.num_actions()) {
        return Err(Error::domain(format!("action id {bad} out of range for {kind}")));
    }
    Ok(())
}
