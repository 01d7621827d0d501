//! Evaluation manifests.
//!
//! A manifest is a TOML file. Relative paths are resolved against the
//! manifest's directory.
//!
//! ```toml
//! env = "capture_the_flag"
//! seed = 7
//! levels = "levels/train"              # directory of .level files, or one file
//! held_out_levels = "levels/held_out"  # optional
//! populations = ["pops/a.json", "pops/b.json"]
//! matches = 100                        # per pairing
//! pairing = "ordered"                  # or "unordered"
//! grouping = [2, 2]                    # seats from A and B; per-env default
//! horizon = 600                        # optional episode length override
//! out = "results"                      # output directory
//!
//! [eav]
//! episodes = 10
//! states_per_episode = 10
//! action_samples = 100                 # omit with exact = true
//! exact = false
//! raw_tvd = false
//! horizon = 200
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use popgrid::eav::{DistMode, EavConfig, TvdNorm};
use popgrid::eval::{CrossPlayGrouping, Pairing, DEFAULT_MATCHES_PER_PAIRING};
use popgrid::{EnvKind, Level, Population};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::files;

fn default_matches() -> usize {
    DEFAULT_MATCHES_PER_PAIRING
}

fn default_pairing() -> Pairing {
    Pairing::Ordered
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub env: String,
    #[serde(default)]
    pub seed: u64,
    pub levels: PathBuf,
    #[serde(default)]
    pub held_out_levels: Option<PathBuf>,
    pub populations: Vec<PathBuf>,
    #[serde(default = "default_matches")]
    pub matches: usize,
    #[serde(default = "default_pairing")]
    pub pairing: Pairing,
    #[serde(default)]
    pub grouping: Option<[usize; 2]>,
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub eav: EavSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EavSection {
    pub episodes: Option<usize>,
    pub states_per_episode: Option<usize>,
    pub action_samples: Option<usize>,
    #[serde(default)]
    pub exact: bool,
    #[serde(default)]
    pub raw_tvd: bool,
    pub horizon: Option<usize>,
}

impl EavSection {
    pub fn config(&self, seed: u64) -> EavConfig {
        let mut cfg = EavConfig::new(seed);
        if let Some(e) = self.episodes {
            cfg.episodes = e;
        }
        if let Some(j) = self.states_per_episode {
            cfg.states_per_episode = j;
        }
        if self.exact {
            cfg.mode = DistMode::Exact;
        } else if let Some(r) = self.action_samples {
            cfg.mode = DistMode::Sampled(r);
        }
        if self.raw_tvd {
            cfg.norm = TvdNorm::Raw;
        }
        cfg.horizon = self.horizon;
        cfg
    }
}

/// A manifest with its files loaded and cross-checked.
#[derive(Debug, Clone)]
pub struct LoadedManifest {
    pub env: EnvKind,
    pub seed: u64,
    pub levels: Vec<Level>,
    pub held_out: Option<Vec<Level>>,
    pub populations: Vec<Population>,
    pub grouping: CrossPlayGrouping,
    pub matches: usize,
    pub pairing: Pairing,
    pub horizon: Option<usize>,
    pub out: PathBuf,
    pub eav: EavSection,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn require_exists(p: &Path) -> CliResult<()> {
    if p.exists() {
        Ok(())
    } else {
        Err(CliError::input(p, "referenced path does not exist"))
    }
}

pub fn load(path: &Path) -> CliResult<LoadedManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    let raw: RunManifest = toml::from_str(&text).map_err(|e| CliError::input(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let env = EnvKind::from_id(&raw.env).map_err(|e| CliError::input(path, e))?;

    if raw.populations.is_empty() {
        return Err(CliError::input(path, "population list is empty"));
    }
    if raw.matches == 0 {
        return Err(CliError::input(path, "matches must be at least 1"));
    }
    let levels_path = resolve(base, &raw.levels);
    require_exists(&levels_path)?;
    let levels = files::read_levels(&levels_path)?;
    files::check_level_env(&levels, env)?;
    let held_out = match &raw.held_out_levels {
        Some(p) => {
            let p = resolve(base, p);
            require_exists(&p)?;
            let l = files::read_levels(&p)?;
            files::check_level_env(&l, env)?;
            Some(l)
        }
        None => None,
    };

    let mut populations = Vec::new();
    let mut ids = HashSet::new();
    for p in &raw.populations {
        let p = resolve(base, p);
        require_exists(&p)?;
        let pop = files::read_population(&p)?;
        if pop.env != env {
            return Err(CliError::input(&p, format!("population {} is for {}, manifest is for {env}", pop.id, pop.env)));
        }
        if !ids.insert(pop.id.clone()) {
            return Err(CliError::input(&p, format!("duplicate population id {}", pop.id)));
        }
        populations.push(pop);
    }

    let grouping = match raw.grouping {
        Some([a, b]) => CrossPlayGrouping::new(env, a, b).map_err(|e| CliError::input(path, e))?,
        None => CrossPlayGrouping::default_for(env),
    };
    Ok(LoadedManifest {
        env,
        seed: raw.seed,
        levels,
        held_out,
        populations,
        grouping,
        matches: raw.matches,
        pairing: raw.pairing,
        horizon: raw.horizon,
        out: resolve(base, raw.out.as_deref().unwrap_or(Path::new("results"))),
        eav: raw.eav,
    })
}
