//! Level text format.
//!
//! ```text
//! # popgrid level v1
//! env: traffic_navigation
//! id: traffic_navigation-00000000000000ff
//! seed: 255
//! feature.openness: 0.71
//! grid:
//! ##SS####
//! #......#
//! ...
//! ```
//!
//! The header is `key: value` lines in a fixed order, terminated by the
//! `grid:` line; every following line is one grid row, one glyph per cell:
//!
//! | glyph | meaning |
//! |-------|---------|
//! | `#` | wall (Overcooked: bare counter edge is `C`) |
//! | `.` | open floor |
//! | `a`..`n` | apple belonging to patch 0..13 |
//! | `S` | spawn point (HarvestPatch, Overcooked) or edge gap (Traffic Navigation: spawn and goal) |
//! | `C` | counter |
//! | `O` | cooking pot |
//! | `T` | tomato station |
//! | `D` | dish station |
//! | `X` | delivery station |
//! | `R` / `B` | red / blue flag home |
//! | `1` / `2` | red / blue spawn point |
//!
//! `feature.*` keys are informational and recomputed on write, so
//! parse-then-write reproduces the input exactly.

use crate::engine::{EnvKind, Environment};
use crate::envs::{ctf::CtfLevel, harvest::HarvestLevel, kitchen::KitchenLevel, traffic::TrafficLevel};
use crate::error::{Error, Result};
use crate::procgen::GenSeed;

pub const LEVEL_FORMAT_LINE: &str = "# popgrid level v1";

/// Raw header plus grid rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelText {
    pub header: Vec<(String, String)>,
    pub rows: Vec<String>,
    /// 1-based line number of the first grid row, for error positions.
    pub grid_line: usize,
}

impl LevelText {
    pub fn new() -> Self {
        Self { header: Vec::new(), rows: Vec::new(), grid_line: 0 }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.header.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::parse(1, 1, format!("missing header key {key:?}")))
    }

    pub fn require_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.require(key)?;
        raw.parse().map_err(|_| {
            let line = self.header.iter().position(|(k, _)| k == key).map_or(1, |i| i + 2);
            Error::parse(line, key.len() + 3, format!("cannot parse {key} value {raw:?}"))
        })
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Calls `f(row, col, glyph)` for every cell, mapping errors to positions.
    pub fn for_each_glyph(&self, mut f: impl FnMut(usize, usize, char) -> std::result::Result<(), String>) -> Result<()> {
        for (r, row) in self.rows.iter().enumerate() {
            for (c, ch) in row.chars().enumerate() {
                f(r, c, ch).map_err(|msg| Error::parse(self.grid_line + r, c + 1, msg))?;
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::new();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim_end() == LEVEL_FORMAT_LINE => {}
            _ => return Err(Error::parse(1, 1, format!("expected {LEVEL_FORMAT_LINE:?}"))),
        }
        let mut in_grid = false;
        for (i, line) in lines {
            let line = line.trim_end_matches('\r');
            if in_grid {
                if line.is_empty() {
                    continue;
                }
                if !out.rows.is_empty() && line.len() != out.rows[0].len() {
                    return Err(Error::parse(i + 1, line.len().min(out.rows[0].len()) + 1, "ragged grid row"));
                }
                out.rows.push(line.to_owned());
            } else if line == "grid:" {
                in_grid = true;
                out.grid_line = i + 2;
            } else {
                let (k, v) = line
                    .split_once(": ")
                    .ok_or_else(|| Error::parse(i + 1, 1, format!("expected `key: value`, found {line:?}")))?;
                out.header.push((k.to_owned(), v.to_owned()));
            }
        }
        if out.rows.is_empty() {
            return Err(Error::parse(text.lines().count().max(1), 1, "level has no grid rows"));
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        let mut s = String::with_capacity(64 + self.rows.len() * (self.width() + 1));
        s.push_str(LEVEL_FORMAT_LINE);
        s.push('\n');
        for (k, v) in &self.header {
            s.push_str(k);
            s.push_str(": ");
            s.push_str(v);
            s.push('\n');
        }
        s.push_str("grid:\n");
        for row in &self.rows {
            s.push_str(row);
            s.push('\n');
        }
        s
    }
}

impl Default for LevelText {
    fn default() -> Self {
        Self::new()
    }
}

/// Identity and provenance shared by all level types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelMeta {
    pub id: String,
    pub seed: u64,
}

impl LevelMeta {
    pub fn generated(kind: EnvKind, seed: GenSeed) -> Self {
        Self { id: format!("{}-{:016x}", kind.id(), seed.0), seed: seed.0 }
    }

    pub(crate) fn write(&self, kind: EnvKind, text: &mut LevelText) {
        text.push("env", kind.id());
        text.push("id", &self.id);
        text.push("seed", self.seed);
    }

    pub(crate) fn read(kind: EnvKind, text: &LevelText) -> Result<Self> {
        let env = text.require("env")?;
        if env != kind.id() {
            return Err(Error::parse(2, 6, format!("expected env {}, found {env}", kind.id())));
        }
        Ok(Self { id: text.require("id")?.to_owned(), seed: text.require_parsed("seed")? })
    }
}

/// A level for any of the four environments.
#[derive(Debug, Clone, PartialEq)]
pub enum Level {
    Harvest(HarvestLevel),
    Traffic(TrafficLevel),
    Kitchen(KitchenLevel),
    Ctf(CtfLevel),
}

impl Level {
    /// Generates a level with parameters drawn from the seed where the
    /// generator takes any (HarvestPatch patch count, radius, density).
    pub fn generate(kind: EnvKind, seed: GenSeed) -> Result<Self> {
        Ok(match kind {
            EnvKind::HarvestPatch => Level::Harvest(crate::envs::harvest::generate_harvest_level_sampled(seed)?),
            EnvKind::TrafficNavigation => Level::Traffic(crate::envs::traffic::generate_traffic_level(seed)?),
            EnvKind::Overcooked => Level::Kitchen(crate::envs::kitchen::generate_kitchen_level(seed)?),
            EnvKind::CaptureTheFlag => Level::Ctf(crate::envs::ctf::generate_ctf_level(seed)?),
        })
    }

    pub fn kind(&self) -> EnvKind {
        match self {
            Level::Harvest(_) => EnvKind::HarvestPatch,
            Level::Traffic(_) => EnvKind::TrafficNavigation,
            Level::Kitchen(_) => EnvKind::Overcooked,
            Level::Ctf(_) => EnvKind::CaptureTheFlag,
        }
    }

    pub fn meta(&self) -> &LevelMeta {
        match self {
            Level::Harvest(l) => &l.meta,
            Level::Traffic(l) => &l.meta,
            Level::Kitchen(l) => &l.meta,
            Level::Ctf(l) => &l.meta,
        }
    }

    pub fn id(&self) -> &str {
        &self.meta().id
    }

    pub fn to_text(&self) -> String {
        match self {
            Level::Harvest(l) => l.to_level_text(),
            Level::Traffic(l) => l.to_level_text(),
            Level::Kitchen(l) => l.to_level_text(),
            Level::Ctf(l) => l.to_level_text(),
        }
        .render()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let parsed = LevelText::parse(text)?;
        let kind = EnvKind::from_id(parsed.require("env")?)
            .map_err(|e| Error::parse(2, 6, e.to_string()))?;
        Ok(match kind {
            EnvKind::HarvestPatch => Level::Harvest(HarvestLevel::from_level_text(&parsed)?),
            EnvKind::TrafficNavigation => Level::Traffic(TrafficLevel::from_level_text(&parsed)?),
            EnvKind::Overcooked => Level::Kitchen(KitchenLevel::from_level_text(&parsed)?),
            EnvKind::CaptureTheFlag => Level::Ctf(CtfLevel::from_level_text(&parsed)?),
        })
    }

    /// Named descriptive features of the level.
    pub fn features(&self) -> Vec<(&'static str, f64)> {
        match self {
            Level::Harvest(l) => l.features(),
            Level::Traffic(l) => {
                let f = crate::envs::traffic::traffic_features(l);
                vec![("openness", f.openness), ("num_walls", f.num_walls as f64)]
            }
            Level::Kitchen(l) => match crate::envs::kitchen::kitchen_features(l) {
                Ok(f) => vec![("est_path_length", f.est_path_length as f64), ("openness", f.openness)],
                Err(_) => vec![("openness", crate::envs::kitchen::kitchen_openness(l))],
            },
            Level::Ctf(l) => match crate::envs::ctf::ctf_features(l) {
                Ok(f) => vec![
                    ("crow_distance", f.crow),
                    ("path_distance", f.path as f64),
                    ("path_complexity", f.complexity),
                    ("openness", f.openness),
                ],
                Err(_) => vec![],
            },
        }
    }

    /// A fresh environment instance on this level.
    pub fn make_env(&self) -> Box<dyn Environment> {
        match self {
            Level::Harvest(l) => Box::new(crate::envs::harvest::HarvestEnv::new(l.clone())),
            Level::Traffic(l) => Box::new(crate::envs::traffic::TrafficEnv::new(l.clone())),
            Level::Kitchen(l) => Box::new(crate::envs::kitchen::KitchenEnv::new(l.clone())),
            Level::Ctf(l) => Box::new(crate::envs::ctf::CtfEnv::new(l.clone())),
        }
    }
}

pub(crate) fn format_feature(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.6}")
    }
}

pub(crate) fn write_features(text: &mut LevelText, features: &[(&'static str, f64)]) {
    for (k, v) in features {
        text.push(format!("feature.{k}"), format_feature(*v));
    }
}
