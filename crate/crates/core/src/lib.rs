//! Multi-agent gridworld environments with procedural level generation,
//! scripted baseline populations, cross-play evaluation and a behavioural
//! diversity metric.

pub mod eav;
pub mod engine;
pub mod envs;
pub mod error;
pub mod eval;
pub mod level;
pub mod level_set;
pub mod parallel;
pub mod policy;
pub mod procgen;
pub mod render;
pub mod rng;

pub use engine::{
    discounted_return, run_episode, run_episode_with, ActionId, Direction, EnvKind, Environment, EpisodeConfig,
    GridPos, ObsSpec, Observation, Trajectory,
};
pub use error::{Error, Result};
pub use level::Level;
pub use level_set::{generate_level_set, level_seed, Split};
pub use policy::{ActionDist, Policy, PolicyMemory, PolicySpec, Population};
pub use procgen::{GenSeed, GridMask};
