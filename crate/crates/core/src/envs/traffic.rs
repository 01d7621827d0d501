//! Traffic Navigation: eight players cross a walled area to edge goals and
//! are penalised for colliding with each other.
//!
//! Actions: 0 no-op, 1 north, 2 south, 3 west, 4 east. The aux channels are
//! `(goal_row - row, goal_col - col)` in that order.

use std::hash::Hash;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::moves::{resolve_moves, ContestRule};
use crate::engine::{check_actions, ActionId, Direction, EnvKind, Environment, GridPos, Observation};
use crate::error::Result;
use crate::level::{write_features, LevelMeta, LevelText};
use crate::procgen::{generate_with_retries, reachable, GenSeed, GridMask, DEFAULT_RETRY_CAP};
use crate::render::{palette, render_window, Sprite, Window, WindowFrame};
use crate::rng::{self, stream, Digest, SimRng};

pub const MIN_SIZE: usize = 10;
pub const MAX_SIZE: usize = 20;
pub const BLOCK: i32 = 3;

pub const NOOP: ActionId = 0;
pub const NORTH: ActionId = 1;
pub const SOUTH: ActionId = 2;
pub const WEST: ActionId = 3;
pub const EAST: ActionId = 4;

pub fn action_direction(a: ActionId) -> Option<Direction> {
    match a {
        NORTH => Some(Direction::North),
        SOUTH => Some(Direction::South),
        WEST => Some(Direction::West),
        EAST => Some(Direction::East),
        _ => None,
    }
}

pub fn direction_action(d: Direction) -> ActionId {
    match d {
        Direction::North => NORTH,
        Direction::South => SOUTH,
        Direction::West => WEST,
        Direction::East => EAST,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficLevel {
    pub meta: LevelMeta,
    pub grid: GridMask,
    /// Removed edge-wall cells, in pairs; each is a spawn point and a goal
    /// candidate.
    pub gaps: Vec<GridPos>,
}

impl TrafficLevel {
    pub fn to_level_text(&self) -> LevelText {
        let mut t = LevelText::new();
        self.meta.write(EnvKind::TrafficNavigation, &mut t);
        let f = traffic_features(self);
        write_features(&mut t, &[("openness", f.openness), ("num_walls", f.num_walls as f64)]);
        let mut rows: Vec<Vec<char>> = self.grid.to_rows().iter().map(|r| r.chars().collect()).collect();
        for g in &self.gaps {
            rows[g.row as usize][g.col as usize] = 'S';
        }
        t.rows = rows.into_iter().map(String::from_iter).collect();
        t
    }

    pub fn from_level_text(t: &LevelText) -> Result<Self> {
        let meta = LevelMeta::read(EnvKind::TrafficNavigation, t)?;
        let mut grid = GridMask::walled(t.height(), t.width());
        let mut gaps = Vec::new();
        t.for_each_glyph(|r, c, ch| {
            let p = GridPos::new(r as i32, c as i32);
            match ch {
                '#' => {}
                '.' => grid.set(p, true),
                'S' => {
                    grid.set(p, true);
                    gaps.push(p);
                }
                other => return Err(format!("unexpected glyph {other:?}")),
            }
            Ok(())
        })?;
        Ok(Self { meta, grid, gaps })
    }

    fn is_gap(&self, p: GridPos) -> bool {
        let (h, w) = (self.grid.height() as i32, self.grid.width() as i32);
        (p.row == 0 || p.col == 0 || p.row == h - 1 || p.col == w - 1) && self.grid.is_open(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficFeatures {
    pub openness: f64,
    pub num_walls: usize,
}

pub fn traffic_features(level: &TrafficLevel) -> TrafficFeatures {
    let total = level.grid.len();
    let open = level.grid.count_open();
    TrafficFeatures {
        openness: if total == 0 { 0.0 } else { open as f64 / total as f64 },
        num_walls: total - open,
    }
}

/// Cells separating two 3x3 blocks given their top-left corners
/// (0 when touching or overlapping).
fn block_separation(a: GridPos, b: GridPos) -> i32 {
    let dr = ((a.row - b.row).abs() - BLOCK).max(0);
    let dc = ((a.col - b.col).abs() - BLOCK).max(0);
    dr.max(dc)
}

fn far_fraction(blocks: &[GridPos]) -> f64 {
    if blocks.len() < 2 {
        return 1.0;
    }
    let far = blocks
        .iter()
        .enumerate()
        .filter(|&(i, a)| blocks.iter().enumerate().all(|(j, b)| i == j || block_separation(*a, *b) > 2))
        .count();
    far as f64 / blocks.len() as f64
}

/// Walled area with eight neighbouring gap pairs on its edges, 3x3 wall
/// blocks kept mostly apart, scattered single walls, and every gap reachable
/// from every other.
pub fn generate_traffic_level(seed: GenSeed) -> Result<TrafficLevel> {
    let players = EnvKind::TrafficNavigation.num_players();
    generate_with_retries("traffic_navigation", seed, DEFAULT_RETRY_CAP, |rng| {
        let h = rng.gen_range(MIN_SIZE..=MAX_SIZE);
        let w = rng.gen_range(MIN_SIZE..=MAX_SIZE);
        let mut grid = GridMask::walled(h, w);
        for r in 1..h as i32 - 1 {
            for c in 1..w as i32 - 1 {
                grid.set(GridPos::new(r, c), true);
            }
        }

        // Candidate pairs: two adjacent non-corner edge cells.
        let (hi, wi) = (h as i32, w as i32);
        let mut pairs: Vec<[GridPos; 2]> = Vec::new();
        for c in 1..wi - 2 {
            pairs.push([GridPos::new(0, c), GridPos::new(0, c + 1)]);
            pairs.push([GridPos::new(hi - 1, c), GridPos::new(hi - 1, c + 1)]);
        }
        for r in 1..hi - 2 {
            pairs.push([GridPos::new(r, 0), GridPos::new(r + 1, 0)]);
            pairs.push([GridPos::new(r, wi - 1), GridPos::new(r + 1, wi - 1)]);
        }
        pairs.shuffle(rng);
        let mut gaps: Vec<GridPos> = Vec::with_capacity(2 * players);
        for pair in pairs {
            if gaps.len() == 2 * players {
                break;
            }
            if pair.iter().all(|p| !gaps.contains(p)) {
                gaps.extend(pair);
            }
        }
        if gaps.len() < 2 * players {
            return None;
        }
        for g in &gaps {
            grid.set(*g, true);
        }

        let interior = (h - 2) * (w - 2);
        let target_blocks = rng.gen_range(0..=interior / 36);
        let mut blocks: Vec<GridPos> = Vec::new();
        for _ in 0..target_blocks * 4 {
            if blocks.len() == target_blocks {
                break;
            }
            let tl = GridPos::new(rng.gen_range(1..=hi - 1 - BLOCK), rng.gen_range(1..=wi - 1 - BLOCK));
            let mut trial = blocks.clone();
            trial.push(tl);
            if far_fraction(&trial) >= 0.5 {
                blocks = trial;
            }
        }
        for tl in &blocks {
            for dr in 0..BLOCK {
                for dc in 0..BLOCK {
                    grid.set(tl.offset(dr, dc), false);
                }
            }
        }

        let scatter = rng.gen_range(0..=interior / 12);
        for _ in 0..scatter {
            let p = GridPos::new(rng.gen_range(1..hi - 1), rng.gen_range(1..wi - 1));
            grid.set(p, false);
        }

        let reach = reachable(&grid, gaps[0]).ok()?;
        if !gaps.iter().all(|g| reach.contains(g)) {
            return None;
        }
        gaps.sort();
        Some(TrafficLevel { meta: LevelMeta::generated(EnvKind::TrafficNavigation, seed), grid, gaps })
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrafficPlayer {
    pub pos: GridPos,
    pub goal: GridPos,
}

pub struct TrafficEnv {
    level: TrafficLevel,
    players: Vec<TrafficPlayer>,
    rng: SimRng,
    steps: u64,
    // Scratch buffers reused every step.
    current: Vec<Option<GridPos>>,
    intended: Vec<Option<GridPos>>,
}

impl TrafficEnv {
    pub fn new(level: TrafficLevel) -> Self {
        let n = EnvKind::TrafficNavigation.num_players();
        let mut env = Self {
            level,
            players: Vec::new(),
            rng: rng::rng_for(0, &[stream::ENV]),
            steps: 0,
            current: vec![None; n],
            intended: vec![None; n],
        };
        env.reset(0);
        env
    }

    pub fn level(&self) -> &TrafficLevel {
        &self.level
    }

    pub fn players(&self) -> &[TrafficPlayer] {
        &self.players
    }

    /// Places a player and its goal directly (test fixtures).
    pub fn place_player(&mut self, i: usize, pos: GridPos, goal: GridPos) {
        self.players[i] = TrafficPlayer { pos, goal };
    }

    fn sample_goal(&mut self, exclude: GridPos) -> GridPos {
        loop {
            let g = *self.level.gaps.choose(&mut self.rng).expect("level has gaps");
            if g != exclude || self.level.gaps.len() < 2 {
                return g;
            }
        }
    }
}

impl Environment for TrafficEnv {
    fn kind(&self) -> EnvKind {
        EnvKind::TrafficNavigation
    }

    fn level_id(&self) -> &str {
        &self.level.meta.id
    }

    /// Seats players on distinct gap cells (uniform without replacement),
    /// then draws each player's first goal in player order.
    fn reset(&mut self, seed: u64) {
        self.rng = rng::rng_for(seed, &[stream::ENV]);
        self.steps = 0;
        let n = EnvKind::TrafficNavigation.num_players();
        let mut gaps = self.level.gaps.clone();
        let k = n.min(gaps.len());
        let (chosen, _) = gaps.partial_shuffle(&mut self.rng, k);
        let starts = chosen.to_vec();
        self.players = (0..n)
            .map(|i| {
                let pos = starts[i % starts.len()];
                TrafficPlayer { pos, goal: pos }
            })
            .collect();
        for i in 0..n {
            let pos = self.players[i].pos;
            self.players[i].goal = self.sample_goal(pos);
        }
    }

    /// Moves are resolved simultaneously; contests, swaps and moving into an
    /// occupied cell are collisions (every participant stays and gets -1,
    /// at most once per step). A player on its goal then gets +1 and a new
    /// goal.
    fn step(&mut self, actions: &[ActionId], rewards: &mut [f64]) -> Result<()> {
        check_actions(EnvKind::TrafficNavigation, actions, rewards)?;
        rewards.fill(0.0);
        for (i, p) in self.players.iter().enumerate() {
            self.current[i] = Some(p.pos);
            self.intended[i] = action_direction(actions[i])
                .map(|d| p.pos.step(d))
                .filter(|&t| self.level.grid.is_open(t));
        }
        let outcome = resolve_moves(&self.current, &self.intended, ContestRule::AllBounce);
        for i in 0..self.players.len() {
            if outcome.collided[i] {
                rewards[i] -= 1.0;
            }
            if let Some(pos) = outcome.positions[i] {
                self.players[i].pos = pos;
            }
        }
        for i in 0..self.players.len() {
            let p = &self.players[i];
            if p.pos == p.goal {
                rewards[i] += 1.0;
                let pos = p.pos;
                self.players[i].goal = self.sample_goal(pos);
            }
        }
        self.steps += 1;
        Ok(())
    }

    fn observe_into(&self, player: usize, obs: &mut Observation) {
        let atlas = atlas();
        let spec = EnvKind::TrafficNavigation.obs_spec();
        let me = &self.players[player];
        let window = Window { origin: me.pos, facing: Direction::North, frame: WindowFrame::Centered, cells: spec.window };
        let grid = &self.level.grid;
        render_window(obs, &spec, &window, |p| {
            if !grid.contains(p) {
                return &atlas.padding;
            }
            if !grid.is_open(p) {
                return &atlas.wall;
            }
            if p == me.pos {
                return &atlas.me;
            }
            if self.players.iter().any(|o| o.pos == p) {
                return &atlas.other;
            }
            if p == me.goal {
                &atlas.goal
            } else if self.level.is_gap(p) {
                &atlas.gap
            } else {
                &atlas.floor
            }
        });
        obs.aux[0].1 = (me.goal.row - me.pos.row) as f32;
        obs.aux[1].1 = (me.goal.col - me.pos.col) as f32;
    }

    fn state_hash(&self) -> u64 {
        let mut d = Digest::new();
        self.steps.hash(&mut d);
        self.players.hash(&mut d);
        d.finish()
    }

    fn steps_taken(&self) -> u64 {
        self.steps
    }
}

pub(crate) struct TrafficAtlas {
    pub padding: Sprite,
    pub wall: Sprite,
    pub floor: Sprite,
    pub gap: Sprite,
    pub goal: Sprite,
    pub me: Sprite,
    pub other: Sprite,
}

pub(crate) fn atlas() -> &'static TrafficAtlas {
    static ATLAS: OnceLock<TrafficAtlas> = OnceLock::new();
    ATLAS.get_or_init(|| TrafficAtlas {
        padding: Sprite::solid(3, palette::PADDING),
        wall: Sprite::solid(3, palette::WALL),
        floor: Sprite::solid(3, palette::FLOOR),
        gap: Sprite::solid(3, palette::FLOOR).fill(0, 1, 0, 1, palette::BEAM),
        goal: Sprite::solid(3, palette::FLOOR).fill(1, 2, 1, 2, palette::MARKER),
        me: Sprite::solid(3, palette::SELF),
        other: Sprite::solid(3, palette::OTHER),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::cell_key;

    fn ring_level(size: usize) -> TrafficLevel {
        let mut grid = GridMask::walled(size, size);
        for r in 1..size as i32 - 1 {
            for c in 1..size as i32 - 1 {
                grid.set(GridPos::new(r, c), true);
            }
        }
        let mut gaps = Vec::new();
        for k in 0..4 {
            for (r, c) in [(0, 2 + 2 * k), (0, 3 + 2 * k), (size as i32 - 1, 2 + 2 * k), (size as i32 - 1, 3 + 2 * k)] {
                grid.set(GridPos::new(r, c), true);
                gaps.push(GridPos::new(r, c));
            }
        }
        gaps.sort();
        TrafficLevel { meta: LevelMeta { id: "ring".into(), seed: 0 }, grid, gaps }
    }

    #[test]
    fn ring_features() {
        let mut level = ring_level(10);
        for g in level.gaps.clone() {
            level.grid.set(g, false);
        }
        let f = traffic_features(&level);
        assert_eq!(f.num_walls, 36);
        assert!((f.openness - 0.64).abs() < 1e-12);
    }

    #[test]
    fn generated_levels_are_valid() {
        for seed in 0..50 {
            let level = generate_traffic_level(GenSeed(seed)).unwrap();
            let (h, w) = (level.grid.height(), level.grid.width());
            assert!((MIN_SIZE..=MAX_SIZE).contains(&h) && (MIN_SIZE..=MAX_SIZE).contains(&w));
            assert_eq!(level.gaps.len(), 16);
            let reach = reachable(&level.grid, level.gaps[0]).unwrap();
            assert!(level.gaps.iter().all(|g| reach.contains(g)));
        }
    }

    #[test]
    fn head_on_contest_costs_both() {
        let mut env = TrafficEnv::new(ring_level(12));
        env.reset(3);
        for i in 0..8 {
            let far = GridPos::new(5 + (i as i32 / 4), 2 + 2 * (i as i32 % 4));
            env.place_player(i, far, GridPos::new(0, 2));
        }
        env.place_player(0, GridPos::new(2, 2), GridPos::new(0, 2));
        env.place_player(1, GridPos::new(2, 4), GridPos::new(0, 2));
        let mut rewards = vec![0.0; 8];
        env.step(&[EAST, WEST, 0, 0, 0, 0, 0, 0], &mut rewards).unwrap();
        assert_eq!(&rewards[..2], &[-1.0, -1.0]);
        assert!(rewards[2..].iter().all(|&r| r == 0.0));
        assert_eq!(env.players()[0].pos, GridPos::new(2, 2));
        assert_eq!(env.players()[1].pos, GridPos::new(2, 4));
    }

    #[test]
    fn reaching_goal_pays_and_resamples() {
        let mut env = TrafficEnv::new(ring_level(12));
        env.reset(3);
        for i in 0..8 {
            env.place_player(i, GridPos::new(5 + (i as i32 / 4), 2 + 2 * (i as i32 % 4)), GridPos::new(0, 2));
        }
        env.place_player(0, GridPos::new(1, 2), GridPos::new(0, 2));
        let mut rewards = vec![0.0; 8];
        env.step(&[NORTH, 0, 0, 0, 0, 0, 0, 0], &mut rewards).unwrap();
        assert_eq!(rewards[0], 1.0);
        let p = &env.players()[0];
        assert!(env.level().gaps.contains(&p.goal));
        assert_ne!(p.goal, p.pos);
    }

    #[test]
    fn observation_is_centered_with_goal_offset() {
        let mut env = TrafficEnv::new(ring_level(12));
        env.reset(1);
        for i in 1..8 {
            env.place_player(i, GridPos::new(9, i as i32 + 1), GridPos::new(0, 2));
        }
        env.place_player(0, GridPos::new(1, 1), GridPos::new(0, 3));
        let obs = env.observe(0);
        assert_eq!((obs.height, obs.width), (33, 33));
        assert_eq!(obs.aux_value("goal_row_offset"), Some(-1.0));
        assert_eq!(obs.aux_value("goal_col_offset"), Some(2.0));
        assert_eq!(cell_key(&obs, 3, 5, 5), palette::SELF);
        assert_eq!(cell_key(&obs, 3, 4, 4), palette::WALL);
        assert_eq!(cell_key(&obs, 3, 0, 0), palette::PADDING);
        assert_eq!(cell_key(&obs, 3, 4, 7), palette::MARKER);
    }
}
