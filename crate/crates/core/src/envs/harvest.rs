//! HarvestPatch: six players share apple patches that regrow only while
//! enough apples remain nearby, and may tag each other out with a beam.
//!
//! Actions: 0 no-op, 1 forward, 2 backward, 3 strafe left, 4 strafe right,
//! 5 turn left, 6 turn right, 7 tag beam.

use std::hash::Hash;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::moves::{resolve_moves, ContestRule};
use crate::engine::{check_actions, ActionId, Direction, EnvKind, Environment, GridPos, Observation};
use crate::error::{Error, Result};
use crate::level::{write_features, LevelMeta, LevelText};
use crate::procgen::{generate_with_retries, GenSeed, GridMask, DEFAULT_RETRY_CAP};
use crate::render::{palette, render_window, Sprite, Window, HARVEST_FRAME};
use crate::rng::{self, stream, Digest, SimRng};

pub const SIZE: usize = 35;
pub const NUM_SPAWNS: usize = 10;
pub const TAG_OUT_STEPS: u8 = 50;
pub const BEAM_COOLDOWN: u8 = 4;
pub const BEAM_WIDTH: i32 = 3;
pub const BEAM_DEPTH: i32 = 3;

pub const NOOP: ActionId = 0;
pub const FORWARD: ActionId = 1;
pub const BACKWARD: ActionId = 2;
pub const STRAFE_LEFT: ActionId = 3;
pub const STRAFE_RIGHT: ActionId = 4;
pub const TURN_LEFT: ActionId = 5;
pub const TURN_RIGHT: ActionId = 6;
pub const TAG: ActionId = 7;

/// Per-step regrowth probability for a harvested apple whose patch holds
/// `live_apples` uneaten apples.
pub fn regrowth_probability(live_apples: i64) -> Result<f64> {
    match live_apples {
        n if n < 0 => Err(Error::domain(format!("negative apple count {n}"))),
        0 => Ok(0.0),
        1 => Ok(0.001),
        2 => Ok(0.005),
        _ => Ok(0.025),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub center: GridPos,
    pub cells: Vec<GridPos>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarvestLevel {
    pub meta: LevelMeta,
    pub grid: GridMask,
    pub patches: Vec<Patch>,
    pub radius: u32,
    pub density: f64,
    pub spawns: Vec<GridPos>,
}

impl HarvestLevel {
    pub fn apple_count(&self) -> usize {
        self.patches.iter().map(|p| p.cells.len()).sum()
    }

    pub fn features(&self) -> Vec<(&'static str, f64)> {
        vec![("apple_count", self.apple_count() as f64), ("patch_radius", f64::from(self.radius))]
    }

    pub fn to_level_text(&self) -> LevelText {
        let mut t = LevelText::new();
        self.meta.write(EnvKind::HarvestPatch, &mut t);
        t.push("param.patches", self.patches.len());
        t.push("param.radius", self.radius);
        t.push("param.density", self.density);
        let centers: Vec<String> = self.patches.iter().map(|p| p.center.to_string()).collect();
        t.push("patch_centers", centers.join(";"));
        write_features(&mut t, &self.features());
        let mut rows: Vec<Vec<char>> = self.grid.to_rows().iter().map(|r| r.chars().collect()).collect();
        for (k, patch) in self.patches.iter().enumerate() {
            for c in &patch.cells {
                rows[c.row as usize][c.col as usize] = (b'a' + k as u8) as char;
            }
        }
        for s in &self.spawns {
            rows[s.row as usize][s.col as usize] = 'S';
        }
        t.rows = rows.into_iter().map(String::from_iter).collect();
        t
    }

    pub fn from_level_text(t: &LevelText) -> Result<Self> {
        let meta = LevelMeta::read(EnvKind::HarvestPatch, t)?;
        let radius: u32 = t.require_parsed("param.radius")?;
        let density: f64 = t.require_parsed("param.density")?;
        let centers: Vec<GridPos> = t
            .require("patch_centers")?
            .split(';')
            .filter(|s| !s.is_empty())
            .map(parse_pos)
            .collect::<Option<_>>()
            .ok_or_else(|| Error::parse(1, 1, "malformed patch_centers"))?;
        let mut grid = GridMask::walled(t.height(), t.width());
        let mut patches: Vec<Patch> = centers.iter().map(|&center| Patch { center, cells: Vec::new() }).collect();
        let mut spawns = Vec::new();
        t.for_each_glyph(|r, c, ch| {
            let p = GridPos::new(r as i32, c as i32);
            match ch {
                '#' => {}
                '.' => grid.set(p, true),
                'S' => {
                    grid.set(p, true);
                    spawns.push(p);
                }
                'a'..='n' => {
                    grid.set(p, true);
                    let k = (ch as u8 - b'a') as usize;
                    patches.get_mut(k).ok_or(format!("apple of undeclared patch {k}"))?.cells.push(p);
                }
                other => return Err(format!("unexpected glyph {other:?}")),
            }
            Ok(())
        })?;
        Ok(Self { meta, grid, patches, radius, density, spawns })
    }
}

pub(crate) fn parse_pos(s: &str) -> Option<GridPos> {
    let (r, c) = s.split_once(',')?;
    Some(GridPos::new(r.trim().parse().ok()?, c.trim().parse().ok()?))
}

/// Cells within Euclidean distance `radius` of `center`, row-major.
pub fn disc(center: GridPos, radius: u32) -> Vec<GridPos> {
    let r = radius as i32;
    let mut cells = Vec::new();
    for dr in -r..=r {
        for dc in -r..=r {
            if dr * dr + dc * dc <= r * r {
                cells.push(center.offset(dr, dc));
            }
        }
    }
    cells
}

/// Places `patches` centres at least `3 * radius` apart (discs kept inside
/// the 35x35 area), fills each disc with apples at `density`, then puts ten
/// spawn points on apple-free cells.
pub fn generate_harvest_level(patches: u32, radius: u32, density: f64, seed: GenSeed) -> Result<HarvestLevel> {
    generate_harvest_level_with_cap(patches, radius, density, seed, DEFAULT_RETRY_CAP)
}

pub fn generate_harvest_level_with_cap(
    patches: u32,
    radius: u32,
    density: f64,
    seed: GenSeed,
    cap: u32,
) -> Result<HarvestLevel> {
    if !(1..=14).contains(&patches) {
        return Err(Error::domain(format!("patch count {patches} outside [1, 14]")));
    }
    if !(3..=7).contains(&radius) {
        return Err(Error::domain(format!("patch radius {radius} outside [3, 7]")));
    }
    if !(0.9..=1.0).contains(&density) {
        return Err(Error::domain(format!("density {density} outside [0.90, 1.00]")));
    }
    let min_spacing = 3.0 * f64::from(radius);
    let lo = radius as i32;
    let hi = SIZE as i32 - 1 - radius as i32;
    let grid = GridMask::open(SIZE, SIZE);

    generate_with_retries("harvest_patch", seed, cap, |rng| {
        let mut centers: Vec<GridPos> = Vec::with_capacity(patches as usize);
        for _ in 0..patches {
            let placed = (0..64).find_map(|_| {
                let c = GridPos::new(rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
                centers.iter().all(|o| o.euclidean(c) >= min_spacing).then_some(c)
            })?;
            centers.push(placed);
        }
        let mut apple = vec![false; SIZE * SIZE];
        let mut level_patches = Vec::with_capacity(centers.len());
        for &center in &centers {
            let cells: Vec<GridPos> = disc(center, radius)
                .into_iter()
                .filter(|_| density >= 1.0 || rng.gen::<f64>() < density)
                .collect();
            if cells.is_empty() {
                return None;
            }
            for c in &cells {
                apple[c.index(SIZE)] = true;
            }
            level_patches.push(Patch { center, cells });
        }
        let mut free: Vec<GridPos> = grid.open_cells().filter(|p| !apple[p.index(SIZE)]).collect();
        if free.len() < NUM_SPAWNS {
            return None;
        }
        let (chosen, _) = free.partial_shuffle(rng, NUM_SPAWNS);
        let mut spawns = chosen.to_vec();
        spawns.sort();
        Some(HarvestLevel {
            meta: LevelMeta::generated(EnvKind::HarvestPatch, seed),
            grid: grid.clone(),
            patches: level_patches,
            radius,
            density,
            spawns,
        })
    })
}

/// Draws (patch count, radius, density) from the seed, then generates;
/// infeasible parameter draws are redrawn.
pub fn generate_harvest_level_sampled(seed: GenSeed) -> Result<HarvestLevel> {
    const PARAM_DRAWS: u64 = 1000;
    for draw in 0..PARAM_DRAWS {
        let mut rng = rng::rng_for(seed.0, &[stream::GENERATOR, 0x5041_5241, draw]);
        let radius = rng.gen_range(3..=7u32);
        let patches = rng.gen_range(1..=14u32);
        let density = 0.9 + 0.1 * rng.gen::<f64>();
        let density = (density * 1000.0).round() / 1000.0;
        let sub = GenSeed(rng::derive_seed(seed.0, &[draw]));
        if let Ok(mut level) = generate_harvest_level_with_cap(patches, radius, density, sub, 50) {
            level.meta = LevelMeta::generated(EnvKind::HarvestPatch, seed);
            return Ok(level);
        }
    }
    Err(Error::Generation { env: "harvest_patch", attempts: PARAM_DRAWS as u32 })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HarvestPlayer {
    pub pos: GridPos,
    pub facing: Direction,
    pub on_board: bool,
    /// Steps left tagged out (0..=50).
    pub tagged_out: u8,
    /// Steps left before the beam can fire again (0..=4).
    pub cooldown: u8,
}

pub struct HarvestEnv {
    level: HarvestLevel,
    apple_patch: Vec<i16>,
    apple_present: Vec<bool>,
    patch_live: Vec<u32>,
    players: Vec<HarvestPlayer>,
    occupancy: Vec<i8>,
    rng: SimRng,
    steps: u64,
    regrowth_events: u64,
}

impl HarvestEnv {
    pub fn new(level: HarvestLevel) -> Self {
        let mut apple_patch = vec![-1i16; level.grid.len()];
        for (k, patch) in level.patches.iter().enumerate() {
            for c in &patch.cells {
                apple_patch[c.index(level.grid.width())] = k as i16;
            }
        }
        let mut env = Self {
            apple_present: vec![false; level.grid.len()],
            occupancy: vec![-1; level.grid.len()],
            patch_live: vec![0; level.patches.len()],
            apple_patch,
            players: Vec::new(),
            rng: rng::rng_for(0, &[stream::ENV]),
            steps: 0,
            regrowth_events: 0,
            level,
        };
        env.reset(0);
        env
    }

    pub fn level(&self) -> &HarvestLevel {
        &self.level
    }

    pub fn players(&self) -> &[HarvestPlayer] {
        &self.players
    }

    pub fn apple_present(&self, p: GridPos) -> bool {
        self.level.grid.contains(p) && self.apple_present[p.index(self.level.grid.width())]
    }

    pub fn live_apples(&self, patch: usize) -> u32 {
        self.patch_live[patch]
    }

    pub fn total_live_apples(&self) -> u32 {
        self.patch_live.iter().sum()
    }

    /// Count of apples that have regrown since reset.
    pub fn regrowth_events(&self) -> u64 {
        self.regrowth_events
    }

    /// Places a player directly (test fixtures).
    pub fn place_player(&mut self, i: usize, pos: GridPos, facing: Direction) {
        let w = self.level.grid.width();
        let old = self.players[i].pos;
        if self.players[i].on_board && self.occupancy[old.index(w)] == i as i8 {
            self.occupancy[old.index(w)] = -1;
        }
        self.players[i] = HarvestPlayer { pos, facing, on_board: true, tagged_out: 0, cooldown: 0 };
        self.occupancy[pos.index(w)] = i as i8;
    }

    /// Removes or restores an apple directly (test fixtures).
    pub fn set_apple(&mut self, p: GridPos, present: bool) {
        let i = p.index(self.level.grid.width());
        let k = self.apple_patch[i];
        assert!(k >= 0, "{p} is not an apple cell");
        if self.apple_present[i] != present {
            self.apple_present[i] = present;
            if present {
                self.patch_live[k as usize] += 1;
            } else {
                self.patch_live[k as usize] -= 1;
            }
        }
    }

    fn occupant(&self, p: GridPos) -> Option<usize> {
        if !self.level.grid.contains(p) {
            return None;
        }
        let o = self.occupancy[p.index(self.level.grid.width())];
        (o >= 0).then_some(o as usize)
    }

    /// Cells hit by `shooter`'s beam: three lanes, three deep, each lane
    /// stopping at the first wall or player.
    pub fn beam_hits(&self, shooter: usize) -> Vec<usize> {
        let me = &self.players[shooter];
        let (fr, fc) = me.facing.delta();
        let (rr, rc) = me.facing.turn_right().delta();
        let mut hits = Vec::new();
        for lateral in -(BEAM_WIDTH / 2)..=(BEAM_WIDTH / 2) {
            for depth in 1..=BEAM_DEPTH {
                let cell = me.pos.offset(fr * depth + rr * lateral, fc * depth + rc * lateral);
                if !self.level.grid.is_open(cell) {
                    break;
                }
                if let Some(j) = self.occupant(cell) {
                    if j != shooter {
                        hits.push(j);
                    }
                    break;
                }
            }
        }
        hits
    }

    fn move_target(&self, i: usize, action: ActionId) -> Option<GridPos> {
        let p = &self.players[i];
        let dir = match action {
            FORWARD => p.facing,
            BACKWARD => p.facing.opposite(),
            STRAFE_LEFT => p.facing.turn_left(),
            STRAFE_RIGHT => p.facing.turn_right(),
            _ => return None,
        };
        let t = p.pos.step(dir);
        self.level.grid.is_open(t).then_some(t)
    }

    fn respawn_cell(&mut self) -> Option<GridPos> {
        let w = self.level.grid.width();
        let candidates: Vec<GridPos> = self
            .level
            .grid
            .open_cells()
            .filter(|p| self.occupancy[p.index(w)] < 0 && !self.apple_present[p.index(w)])
            .collect();
        candidates.choose(&mut self.rng).copied()
    }
}

impl Environment for HarvestEnv {
    fn kind(&self) -> EnvKind {
        EnvKind::HarvestPatch
    }

    fn level_id(&self) -> &str {
        &self.level.meta.id
    }

    /// Restores all apples and seats the six players on six of the ten spawn
    /// points, drawn without replacement, with random facings.
    fn reset(&mut self, seed: u64) {
        self.rng = rng::rng_for(seed, &[stream::ENV]);
        self.steps = 0;
        self.regrowth_events = 0;
        self.apple_present.iter_mut().for_each(|a| *a = false);
        for (k, patch) in self.level.patches.iter().enumerate() {
            for c in &patch.cells {
                self.apple_present[c.index(self.level.grid.width())] = true;
            }
            self.patch_live[k] = patch.cells.len() as u32;
        }
        self.occupancy.iter_mut().for_each(|o| *o = -1);
        let n = EnvKind::HarvestPatch.num_players();
        let mut spawns = self.level.spawns.clone();
        let (chosen, _) = spawns.partial_shuffle(&mut self.rng, n.min(self.level.spawns.len()));
        let chosen = chosen.to_vec();
        self.players = (0..n)
            .map(|i| {
                let pos = chosen[i % chosen.len()];
                let facing = Direction::from_index(self.rng.gen_range(0..4));
                HarvestPlayer { pos, facing, on_board: true, tagged_out: 0, cooldown: 0 }
            })
            .collect();
        let w = self.level.grid.width();
        for (i, p) in self.players.iter().enumerate() {
            self.occupancy[p.pos.index(w)] = i as i8;
        }
    }

    /// Step order: turns, beams (from pre-move positions), movement, harvest,
    /// regrowth, then timers and respawns.
    fn step(&mut self, actions: &[ActionId], rewards: &mut [f64]) -> Result<()> {
        check_actions(EnvKind::HarvestPatch, actions, rewards)?;
        rewards.fill(0.0);
        let n = self.players.len();
        let w = self.level.grid.width();

        for (p, &a) in self.players.iter_mut().zip(actions) {
            if p.on_board {
                match a {
                    TURN_LEFT => p.facing = p.facing.turn_left(),
                    TURN_RIGHT => p.facing = p.facing.turn_right(),
                    _ => {}
                }
            }
        }

        let mut fired = vec![false; n];
        let mut hit = vec![false; n];
        for i in 0..n {
            if actions[i] == TAG && self.players[i].on_board && self.players[i].cooldown == 0 {
                fired[i] = true;
                for j in self.beam_hits(i) {
                    hit[j] = true;
                }
            }
        }
        for i in 0..n {
            if fired[i] {
                self.players[i].cooldown = BEAM_COOLDOWN;
            }
            if hit[i] {
                let p = &mut self.players[i];
                self.occupancy[p.pos.index(w)] = -1;
                p.on_board = false;
                p.tagged_out = TAG_OUT_STEPS;
            }
        }

        let current: Vec<Option<GridPos>> =
            self.players.iter().map(|p| p.on_board.then_some(p.pos)).collect();
        let intended: Vec<Option<GridPos>> = (0..n)
            .map(|i| if self.players[i].on_board { self.move_target(i, actions[i]) } else { None })
            .collect();
        let outcome = resolve_moves(&current, &intended, ContestRule::LowestIndexWins);
        for (i, pos) in outcome.positions.iter().enumerate() {
            if let Some(pos) = *pos {
                let p = &mut self.players[i];
                if p.pos != pos {
                    if self.occupancy[p.pos.index(w)] == i as i8 {
                        self.occupancy[p.pos.index(w)] = -1;
                    }
                    p.pos = pos;
                }
            }
        }
        for (i, p) in self.players.iter().enumerate() {
            if p.on_board {
                self.occupancy[p.pos.index(w)] = i as i8;
            }
        }

        for (i, p) in self.players.iter().enumerate() {
            if !p.on_board {
                continue;
            }
            let idx = p.pos.index(w);
            if self.apple_present[idx] {
                self.apple_present[idx] = false;
                self.patch_live[self.apple_patch[idx] as usize] -= 1;
                rewards[i] += 1.0;
            }
        }

        let live_before = self.patch_live.clone();
        for (k, patch) in self.level.patches.iter().enumerate() {
            let prob = regrowth_probability(i64::from(live_before[k])).expect("non-negative");
            if prob == 0.0 || live_before[k] as usize == patch.cells.len() {
                continue;
            }
            for c in &patch.cells {
                let idx = c.index(w);
                if self.apple_present[idx] || self.occupancy[idx] >= 0 {
                    continue;
                }
                if self.rng.gen::<f64>() < prob {
                    self.apple_present[idx] = true;
                    self.patch_live[k] += 1;
                    self.regrowth_events += 1;
                }
            }
        }

        for i in 0..n {
            if !fired[i] && self.players[i].cooldown > 0 {
                self.players[i].cooldown -= 1;
            }
            if !hit[i] && self.players[i].tagged_out > 0 {
                self.players[i].tagged_out -= 1;
                if self.players[i].tagged_out == 0 {
                    match self.respawn_cell() {
                        Some(cell) => {
                            let facing = Direction::from_index(self.rng.gen_range(0..4));
                            let p = &mut self.players[i];
                            p.pos = cell;
                            p.facing = facing;
                            p.on_board = true;
                            self.occupancy[cell.index(w)] = i as i8;
                        }
                        // Board full: try again next step.
                        None => self.players[i].tagged_out = 1,
                    }
                }
            }
        }

        self.steps += 1;
        Ok(())
    }

    fn observe_into(&self, player: usize, obs: &mut Observation) {
        let atlas = atlas();
        let spec = EnvKind::HarvestPatch.obs_spec();
        let me = &self.players[player];
        let window = Window { origin: me.pos, facing: me.facing, frame: HARVEST_FRAME, cells: spec.window };
        let grid = &self.level.grid;
        render_window(obs, &spec, &window, |p| {
            if !grid.contains(p) {
                return &atlas.padding;
            }
            if !grid.is_open(p) {
                return &atlas.wall;
            }
            if let Some(j) = self.occupant(p) {
                let rel = window.relative(self.players[j].facing) as usize;
                return if j == player { &atlas.me[rel] } else { &atlas.other[rel] };
            }
            if self.apple_present[p.index(grid.width())] {
                &atlas.apple
            } else {
                &atlas.floor
            }
        });
    }

    fn state_hash(&self) -> u64 {
        let mut d = Digest::new();
        self.steps.hash(&mut d);
        self.players.hash(&mut d);
        self.apple_present.hash(&mut d);
        d.finish()
    }

    fn steps_taken(&self) -> u64 {
        self.steps
    }
}

pub(crate) struct HarvestAtlas {
    pub padding: Sprite,
    pub wall: Sprite,
    pub floor: Sprite,
    pub apple: Sprite,
    pub me: Vec<Sprite>,
    pub other: Vec<Sprite>,
}

pub(crate) fn atlas() -> &'static HarvestAtlas {
    static ATLAS: OnceLock<HarvestAtlas> = OnceLock::new();
    ATLAS.get_or_init(|| {
        let token = |body| Sprite::token(8, palette::FLOOR, body);
        HarvestAtlas {
            padding: Sprite::solid(8, palette::PADDING),
            wall: Sprite::solid(8, palette::WALL),
            floor: Sprite::solid(8, palette::FLOOR),
            apple: token(palette::APPLE).fill(0, 1, 3, 5, palette::WALL),
            me: Direction::ALL.iter().map(|&d| token(palette::SELF).with_facing(d)).collect(),
            other: Direction::ALL.iter().map(|&d| token(palette::OTHER).with_facing(d)).collect(),
        }
    })
}
