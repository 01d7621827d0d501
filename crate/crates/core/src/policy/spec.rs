//! Serializable policy descriptions and populations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::scripted::{Cook, CtfRole, FlagPlayer, GoalSeeker, Harvester};
use super::{check_obs, ActionDist, Policy, PolicyMemory};
use crate::engine::{ActionId, EnvKind, Observation};
use crate::error::{Error, Result};
use crate::rng::{self, stream};

/// A policy by registry id plus parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum PolicySpec {
    UniformRandom { env: EnvKind },
    /// Replays a fixed action list, then no-ops.
    ActionSequence { env: EnvKind, actions: Vec<ActionId> },
    GreedyHarvester(Harvester),
    AbstentiousHarvester(Harvester),
    GoalSeeker(GoalSeeker),
    ScriptedCook(Cook),
    FlagRusher(FlagPlayer),
    Defender(FlagPlayer),
}

/// Registry ids accepted by [`PolicySpec::from_registry`].
pub const REGISTRY: [(&str, &[EnvKind]); 8] = [
    ("uniform_random", &EnvKind::ALL),
    ("action_sequence", &EnvKind::ALL),
    ("greedy_harvester", &[EnvKind::HarvestPatch]),
    ("abstentious_harvester", &[EnvKind::HarvestPatch]),
    ("goal_seeker", &[EnvKind::TrafficNavigation]),
    ("scripted_cook", &[EnvKind::Overcooked]),
    ("flag_rusher", &[EnvKind::CaptureTheFlag]),
    ("defender", &[EnvKind::CaptureTheFlag]),
];

/// Scripted archetypes available for random population draws.
pub fn archetypes(env: EnvKind) -> &'static [&'static str] {
    match env {
        EnvKind::HarvestPatch => &["greedy_harvester", "abstentious_harvester"],
        EnvKind::TrafficNavigation => &["goal_seeker"],
        EnvKind::Overcooked => &["scripted_cook"],
        EnvKind::CaptureTheFlag => &["flag_rusher", "defender"],
    }
}

impl PolicySpec {
    pub fn registry_id(&self) -> &'static str {
        match self {
            PolicySpec::UniformRandom { .. } => "uniform_random",
            PolicySpec::ActionSequence { .. } => "action_sequence",
            PolicySpec::GreedyHarvester(_) => "greedy_harvester",
            PolicySpec::AbstentiousHarvester(_) => "abstentious_harvester",
            PolicySpec::GoalSeeker(_) => "goal_seeker",
            PolicySpec::ScriptedCook(_) => "scripted_cook",
            PolicySpec::FlagRusher(_) => "flag_rusher",
            PolicySpec::Defender(_) => "defender",
        }
    }

    /// Default-parameter policy for a registry id.
    pub fn from_registry(id: &str, env: EnvKind) -> Result<Self> {
        let (_, envs) = REGISTRY
            .iter()
            .find(|(name, _)| *name == id)
            .ok_or_else(|| Error::config(format!("unknown policy id {id:?}")))?;
        if !envs.contains(&env) {
            return Err(Error::config(format!("policy {id} is not available for {env}")));
        }
        let harvester = |min_neighbors, aggression| Harvester {
            epsilon: 0.05,
            aggression,
            wander: 0.2,
            min_neighbors,
            search_order: 0,
            left_handed: false,
        };
        let flag_player = |role| FlagPlayer {
            role,
            epsilon: 0.05,
            aggression: 0.8,
            wander: 0.2,
            guard_radius: 2,
            search_order: 0,
            left_handed: false,
        };
        Ok(match id {
            "uniform_random" => PolicySpec::UniformRandom { env },
            "action_sequence" => PolicySpec::ActionSequence { env, actions: Vec::new() },
            "greedy_harvester" => PolicySpec::GreedyHarvester(harvester(0, 0.5)),
            "abstentious_harvester" => PolicySpec::AbstentiousHarvester(harvester(2, 0.0)),
            "goal_seeker" => {
                PolicySpec::GoalSeeker(GoalSeeker { epsilon: 0.05, rows_first: true, patience: 0.5, search_order: 0 })
            }
            "scripted_cook" => PolicySpec::ScriptedCook(Cook { epsilon: 0.0, eager_dish: true, search_order: 0 }),
            "flag_rusher" => PolicySpec::FlagRusher(flag_player(CtfRole::Rusher)),
            _ => PolicySpec::Defender(flag_player(CtfRole::Defender)),
        })
    }

    /// Draws an archetype and its parameters.
    pub fn random(env: EnvKind, rng: &mut impl Rng) -> Self {
        let kinds = archetypes(env);
        let id = kinds[rng.gen_range(0..kinds.len())];
        Self::random_of(id, rng).expect("archetype ids are registered")
    }

    /// Draws parameters for a given scripted archetype.
    pub fn random_of(id: &str, rng: &mut impl Rng) -> Result<Self> {
        let order = rng.gen_range(0..4);
        Ok(match id {
            "greedy_harvester" | "abstentious_harvester" => {
                let abstains = id == "abstentious_harvester";
                let h = Harvester {
                    epsilon: rng.gen_range(0.0..0.2),
                    aggression: if abstains { 0.0 } else { rng.gen_range(0.0..1.0) },
                    wander: rng.gen_range(0.05..0.5),
                    min_neighbors: if abstains { rng.gen_range(1..=4) } else { 0 },
                    search_order: order,
                    left_handed: rng.gen_bool(0.5),
                };
                if abstains {
                    PolicySpec::AbstentiousHarvester(h)
                } else {
                    PolicySpec::GreedyHarvester(h)
                }
            }
            "goal_seeker" => PolicySpec::GoalSeeker(GoalSeeker {
                epsilon: rng.gen_range(0.0..0.3),
                rows_first: rng.gen_bool(0.5),
                patience: rng.gen_range(0.0..1.0),
                search_order: order,
            }),
            "scripted_cook" => PolicySpec::ScriptedCook(Cook {
                epsilon: rng.gen_range(0.0..0.2),
                eager_dish: rng.gen_bool(0.5),
                search_order: order,
            }),
            "flag_rusher" | "defender" => {
                let role = if id == "defender" { CtfRole::Defender } else { CtfRole::Rusher };
                let p = FlagPlayer {
                    role,
                    epsilon: rng.gen_range(0.0..0.2),
                    aggression: rng.gen_range(0.2..1.0),
                    wander: rng.gen_range(0.05..0.5),
                    guard_radius: rng.gen_range(1..=4),
                    search_order: order,
                    left_handed: rng.gen_bool(0.5),
                };
                if role == CtfRole::Defender {
                    PolicySpec::Defender(p)
                } else {
                    PolicySpec::FlagRusher(p)
                }
            }
            other => return Err(Error::config(format!("{other:?} is not a scripted archetype"))),
        })
    }
}

impl Policy for PolicySpec {
    fn env(&self) -> EnvKind {
        match self {
            PolicySpec::UniformRandom { env } | PolicySpec::ActionSequence { env, .. } => *env,
            PolicySpec::GreedyHarvester(_) | PolicySpec::AbstentiousHarvester(_) => EnvKind::HarvestPatch,
            PolicySpec::GoalSeeker(_) => EnvKind::TrafficNavigation,
            PolicySpec::ScriptedCook(_) => EnvKind::Overcooked,
            PolicySpec::FlagRusher(_) | PolicySpec::Defender(_) => EnvKind::CaptureTheFlag,
        }
    }

    fn name(&self) -> String {
        self.registry_id().to_owned()
    }

    fn act(&self, obs: &Observation, memory: &mut PolicyMemory) -> Result<ActionDist> {
        let env = self.env();
        check_obs(env, obs)?;
        let n = env.num_actions();
        let dist = match self {
            PolicySpec::UniformRandom { .. } => ActionDist::uniform(n),
            PolicySpec::ActionSequence { actions, .. } => {
                let a = actions.get(memory.step as usize).copied().unwrap_or(0);
                if a as usize >= n {
                    return Err(Error::domain(format!("scripted action {a} out of range for {env}")));
                }
                ActionDist::one_hot(n, a)
            }
            PolicySpec::GreedyHarvester(h) | PolicySpec::AbstentiousHarvester(h) => h.act(obs),
            PolicySpec::GoalSeeker(g) => g.act(obs),
            PolicySpec::ScriptedCook(c) => c.act(obs, memory),
            PolicySpec::FlagRusher(f) | PolicySpec::Defender(f) => f.act(obs),
        };
        memory.step += 1;
        Ok(dist)
    }
}

/// A population of policies for one environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub id: String,
    pub env: EnvKind,
    /// Identifier of the training-level set the population belongs to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_set: Option<String>,
    pub members: Vec<PolicySpec>,
}

impl Population {
    pub fn new(id: impl Into<String>, env: EnvKind, members: Vec<PolicySpec>) -> Result<Self> {
        let pop = Self { id: id.into(), env, level_set: None, members };
        pop.validate()?;
        Ok(pop)
    }

    /// `size` members with archetypes and parameters drawn from `seed`.
    pub fn random(id: impl Into<String>, env: EnvKind, size: usize, seed: u64) -> Result<Self> {
        let mut rng = rng::rng_for(seed, &[stream::POPULATION]);
        let members = (0..size).map(|_| PolicySpec::random(env, &mut rng)).collect();
        Self::new(id, env, members)
    }

    /// `size` copies of one policy.
    pub fn replicated(id: impl Into<String>, policy: PolicySpec, size: usize) -> Result<Self> {
        let env = policy.env();
        Self::new(id, env, vec![policy; size])
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::config(format!("population {} has no members", self.id)));
        }
        if let Some(m) = self.members.iter().find(|m| m.env() != self.env) {
            return Err(Error::config(format!(
                "population {} is for {} but member {} targets {}",
                self.id,
                self.env,
                m.name(),
                m.env()
            )));
        }
        Ok(())
    }
}
