//! Overcooked: two players share a kitchen, carry tomatoes to pots, plate
//! cooked soup and deliver it for a shared reward.
//!
//! Actions: 0 no-op, 1 north, 2 south, 3 west, 4 east, 5 interact.

use std::hash::Hash;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::moves::{resolve_moves, ContestRule};
use crate::engine::{check_actions, ActionId, Direction, EnvKind, Environment, GridPos, Observation};
use crate::error::{Error, Result};
use crate::level::{write_features, LevelMeta, LevelText};
use crate::procgen::{bfs_distances, generate_with_retries, GenSeed, GridMask, DEFAULT_RETRY_CAP};
use crate::render::{palette, render_window, Rgb, Sprite, Window, WindowFrame};
use crate::rng::{self, stream, Digest, SimRng};

pub const MIN_INTERIOR: usize = 4;
pub const MAX_INTERIOR: usize = 9;
pub const COOK_STEPS: u8 = 20;
pub const TOMATOES_PER_SOUP: u8 = 3;
pub const DEPOSIT_REWARD: f64 = 1.0;
pub const DELIVERY_REWARD: f64 = 20.0;

pub const NOOP: ActionId = 0;
pub const NORTH: ActionId = 1;
pub const SOUTH: ActionId = 2;
pub const WEST: ActionId = 3;
pub const EAST: ActionId = 4;
pub const INTERACT: ActionId = 5;

pub fn action_direction(a: ActionId) -> Option<Direction> {
    crate::envs::traffic::action_direction(a)
}

pub fn direction_action(d: Direction) -> ActionId {
    crate::envs::traffic::direction_action(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tile {
    Floor,
    Counter,
    Pot,
    TomatoStation,
    DishStation,
    Delivery,
}

impl Tile {
    pub const OBJECTS: [Tile; 4] = [Tile::Pot, Tile::TomatoStation, Tile::DishStation, Tile::Delivery];

    fn glyph(self) -> char {
        match self {
            Tile::Floor => '.',
            Tile::Counter => 'C',
            Tile::Pot => 'O',
            Tile::TomatoStation => 'T',
            Tile::DishStation => 'D',
            Tile::Delivery => 'X',
        }
    }

    fn from_glyph(c: char) -> Option<Self> {
        Some(match c {
            '.' | 'S' => Tile::Floor,
            'C' | '#' => Tile::Counter,
            'O' => Tile::Pot,
            'T' => Tile::TomatoStation,
            'D' => Tile::DishStation,
            'X' => Tile::Delivery,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Item {
    Tomato,
    Dish,
    Soup,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KitchenLevel {
    pub meta: LevelMeta,
    pub height: usize,
    pub width: usize,
    pub tiles: Vec<Tile>,
    pub spawns: [GridPos; 2],
}

impl KitchenLevel {
    pub fn tile(&self, p: GridPos) -> Option<Tile> {
        p.in_bounds(self.height, self.width).then(|| self.tiles[p.index(self.width)])
    }

    pub fn floor_mask(&self) -> GridMask {
        let mut m = GridMask::walled(self.height, self.width);
        for (i, t) in self.tiles.iter().enumerate() {
            if *t == Tile::Floor {
                m.set(GridPos::from_index(i, self.width), true);
            }
        }
        m
    }

    pub fn cells_of(&self, tile: Tile) -> impl Iterator<Item = GridPos> + '_ {
        let w = self.width;
        self.tiles.iter().enumerate().filter(move |(_, t)| **t == tile).map(move |(i, _)| GridPos::from_index(i, w))
    }

    /// Floor cells from which `tile` objects can be interacted with.
    pub fn access_cells(&self, tile: Tile) -> Vec<GridPos> {
        let floor = self.floor_mask();
        let mut out: Vec<GridPos> = self
            .cells_of(tile)
            .flat_map(|p| Direction::ALL.map(|d| p.step(d)))
            .filter(|&p| floor.is_open(p))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn to_level_text(&self) -> LevelText {
        let mut t = LevelText::new();
        self.meta.write(EnvKind::Overcooked, &mut t);
        let mut features = Vec::new();
        if let Ok(f) = kitchen_features(self) {
            features.push(("est_path_length", f.est_path_length as f64));
        }
        features.push(("openness", kitchen_openness(self)));
        write_features(&mut t, &features);
        let mut rows: Vec<Vec<char>> =
            self.tiles.chunks(self.width).map(|row| row.iter().map(|t| t.glyph()).collect()).collect();
        for s in &self.spawns {
            rows[s.row as usize][s.col as usize] = 'S';
        }
        t.rows = rows.into_iter().map(String::from_iter).collect();
        t
    }

    pub fn from_level_text(t: &LevelText) -> Result<Self> {
        let meta = LevelMeta::read(EnvKind::Overcooked, t)?;
        let (height, width) = (t.height(), t.width());
        let mut tiles = vec![Tile::Counter; height * width];
        let mut spawns = Vec::new();
        t.for_each_glyph(|r, c, ch| {
            tiles[r * width + c] = Tile::from_glyph(ch).ok_or(format!("unexpected glyph {ch:?}"))?;
            if ch == 'S' {
                spawns.push(GridPos::new(r as i32, c as i32));
            }
            Ok(())
        })?;
        let spawns: [GridPos; 2] = spawns
            .try_into()
            .map_err(|v: Vec<GridPos>| Error::parse(t.grid_line, 1, format!("expected 2 spawns, found {}", v.len())))?;
        Ok(Self { meta, height, width, tiles, spawns })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KitchenFeatures {
    pub est_path_length: u32,
    pub openness: f64,
}

/// Fraction of cells that are walkable floor.
pub fn kitchen_openness(level: &KitchenLevel) -> f64 {
    let floor = level.tiles.iter().filter(|t| **t == Tile::Floor).count();
    floor as f64 / level.tiles.len() as f64
}

/// Shortest floor distance between any access cell of `a` and any of `b`.
fn object_distance(level: &KitchenLevel, floor: &GridMask, a: Tile, b: Tile) -> Option<u32> {
    let targets = level.access_cells(b);
    level
        .access_cells(a)
        .into_iter()
        .filter_map(|s| {
            let d = bfs_distances(floor, s);
            targets.iter().filter_map(|t| d[t.index(level.width)]).min()
        })
        .min()
}

/// Movement estimate for one soup: three tomato-to-pot legs, one
/// dish-to-pot leg and one pot-to-delivery leg.
pub fn kitchen_features(level: &KitchenLevel) -> Result<KitchenFeatures> {
    let floor = level.floor_mask();
    let leg = |a, b| {
        object_distance(level, &floor, a, b)
            .ok_or_else(|| Error::domain(format!("no floor path from {a:?} to {b:?}")))
    };
    let tomato = leg(Tile::TomatoStation, Tile::Pot)?;
    let dish = leg(Tile::DishStation, Tile::Pot)?;
    let deliver = leg(Tile::Pot, Tile::Delivery)?;
    Ok(KitchenFeatures {
        est_path_length: u32::from(TOMATOES_PER_SOUP) * tomato + dish + deliver,
        openness: kitchen_openness(level),
    })
}

/// True when a player starting at `from` can reach an access cell of every
/// object type.
pub fn player_can_cook(level: &KitchenLevel, from: GridPos) -> bool {
    let floor = level.floor_mask();
    if !floor.is_open(from) {
        return false;
    }
    let d = bfs_distances(&floor, from);
    Tile::OBJECTS
        .iter()
        .all(|&t| level.access_cells(t).iter().any(|c| d[c.index(level.width)].is_some()))
}

/// Counter ring around a random interior, extra counters as a central block
/// or scattered, one to three of each object converted from counters that
/// touch the floor, and two spawns on distinct floor cells.
pub fn generate_kitchen_level(seed: GenSeed) -> Result<KitchenLevel> {
    generate_with_retries("overcooked", seed, DEFAULT_RETRY_CAP, |rng| {
        let ih = rng.gen_range(MIN_INTERIOR..=MAX_INTERIOR);
        let iw = rng.gen_range(MIN_INTERIOR..=MAX_INTERIOR);
        let (height, width) = (ih + 2, iw + 2);
        let mut tiles = vec![Tile::Counter; height * width];
        for r in 1..=ih {
            for c in 1..=iw {
                tiles[r * width + c] = Tile::Floor;
            }
        }
        if rng.gen_bool(0.5) {
            let bh = rng.gen_range(0..=ih - 2);
            let bw = rng.gen_range(0..=iw - 2);
            let r0 = 1 + (ih - bh) / 2;
            let c0 = 1 + (iw - bw) / 2;
            for r in r0..r0 + bh {
                for c in c0..c0 + bw {
                    tiles[r * width + c] = Tile::Counter;
                }
            }
        } else {
            let k = rng.gen_range(0..=ih * iw / 4);
            for _ in 0..k {
                let (r, c) = (rng.gen_range(1..=ih), rng.gen_range(1..=iw));
                tiles[r * width + c] = Tile::Counter;
            }
        }

        let is_floor = |tiles: &[Tile], p: GridPos| p.in_bounds(height, width) && tiles[p.index(width)] == Tile::Floor;
        let mut counters: Vec<GridPos> = (0..tiles.len())
            .map(|i| GridPos::from_index(i, width))
            .filter(|&p| tiles[p.index(width)] == Tile::Counter && Direction::ALL.iter().any(|&d| is_floor(&tiles, p.step(d))))
            .collect();
        counters.shuffle(rng);
        for object in Tile::OBJECTS {
            let n = rng.gen_range(1..=3);
            for _ in 0..n {
                let p = counters.pop()?;
                tiles[p.index(width)] = object;
            }
        }

        let mut floor: Vec<GridPos> =
            (0..tiles.len()).map(|i| GridPos::from_index(i, width)).filter(|&p| is_floor(&tiles, p)).collect();
        if floor.len() < 2 {
            return None;
        }
        let (chosen, _) = floor.partial_shuffle(rng, 2);
        let spawns = [chosen[0], chosen[1]];
        let level = KitchenLevel { meta: LevelMeta::generated(EnvKind::Overcooked, seed), height, width, tiles, spawns };
        spawns.iter().all(|&s| player_can_cook(&level, s)).then_some(level)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Pot {
    pub tomatoes: u8,
    /// Steps cooked since the third tomato went in.
    pub timer: u8,
}

impl Pot {
    pub fn is_cooking(&self) -> bool {
        self.tomatoes == TOMATOES_PER_SOUP && self.timer < COOK_STEPS
    }

    pub fn is_ready(&self) -> bool {
        self.tomatoes == TOMATOES_PER_SOUP && self.timer >= COOK_STEPS
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cook {
    pub pos: GridPos,
    pub facing: Direction,
    pub held: Option<Item>,
}

pub struct KitchenEnv {
    level: KitchenLevel,
    players: Vec<Cook>,
    counter_items: Vec<Option<Item>>,
    pots: Vec<Pot>,
    rng: SimRng,
    steps: u64,
    deliveries: u64,
}

impl KitchenEnv {
    pub fn new(level: KitchenLevel) -> Self {
        let cells = level.tiles.len();
        let mut env = Self {
            level,
            players: Vec::new(),
            counter_items: vec![None; cells],
            pots: vec![Pot::default(); cells],
            rng: rng::rng_for(0, &[stream::ENV]),
            steps: 0,
            deliveries: 0,
        };
        env.reset(0);
        env
    }

    pub fn level(&self) -> &KitchenLevel {
        &self.level
    }

    pub fn players(&self) -> &[Cook] {
        &self.players
    }

    pub fn pot(&self, p: GridPos) -> Option<&Pot> {
        (self.level.tile(p) == Some(Tile::Pot)).then(|| &self.pots[p.index(self.level.width)])
    }

    pub fn counter_item(&self, p: GridPos) -> Option<Item> {
        match self.level.tile(p) {
            Some(Tile::Counter) => self.counter_items[p.index(self.level.width)],
            _ => None,
        }
    }

    pub fn deliveries(&self) -> u64 {
        self.deliveries
    }

    /// Places a player directly (test fixtures).
    pub fn place_player(&mut self, i: usize, pos: GridPos, facing: Direction, held: Option<Item>) {
        self.players[i] = Cook { pos, facing, held };
    }

    fn interact(&mut self, i: usize, rewards: &mut [f64]) {
        let w = self.level.width;
        let target = self.players[i].pos.step(self.players[i].facing);
        let Some(tile) = self.level.tile(target) else { return };
        let idx = target.index(w);
        let held = self.players[i].held;
        match (tile, held) {
            (Tile::Counter, None) => {
                if let Some(item) = self.counter_items[idx].take() {
                    self.players[i].held = Some(item);
                }
            }
            (Tile::Counter, Some(item)) => {
                if self.counter_items[idx].is_none() {
                    self.counter_items[idx] = Some(item);
                    self.players[i].held = None;
                }
            }
            (Tile::Pot, Some(Item::Tomato)) => {
                let pot = &mut self.pots[idx];
                if pot.tomatoes < TOMATOES_PER_SOUP {
                    pot.tomatoes += 1;
                    self.players[i].held = None;
                    rewards[i] += DEPOSIT_REWARD;
                }
            }
            (Tile::Pot, Some(Item::Dish)) => {
                if self.pots[idx].is_ready() {
                    self.pots[idx] = Pot::default();
                    self.players[i].held = Some(Item::Soup);
                }
            }
            (Tile::Delivery, Some(Item::Soup)) => {
                self.players[i].held = None;
                self.deliveries += 1;
                rewards.iter_mut().for_each(|r| *r += DELIVERY_REWARD);
            }
            (Tile::TomatoStation, None) => self.players[i].held = Some(Item::Tomato),
            (Tile::DishStation, None) => self.players[i].held = Some(Item::Dish),
            _ => {}
        }
    }
}

impl Environment for KitchenEnv {
    fn kind(&self) -> EnvKind {
        EnvKind::Overcooked
    }

    fn level_id(&self) -> &str {
        &self.level.meta.id
    }

    /// Empties counters and pots; the two players start on the two spawn
    /// points in a random assignment, facing random directions.
    fn reset(&mut self, seed: u64) {
        self.rng = rng::rng_for(seed, &[stream::ENV]);
        self.steps = 0;
        self.deliveries = 0;
        self.counter_items.iter_mut().for_each(|c| *c = None);
        self.pots.iter_mut().for_each(|p| *p = Pot::default());
        let mut spawns = self.level.spawns;
        spawns.shuffle(&mut self.rng);
        self.players = spawns
            .iter()
            .map(|&pos| Cook { pos, facing: Direction::from_index(self.rng.gen_range(0..4)), held: None })
            .collect();
    }

    /// Movement (which also turns the player) is resolved first, then
    /// interactions in player order, then pots that were already cooking
    /// advance one step.
    fn step(&mut self, actions: &[ActionId], rewards: &mut [f64]) -> Result<()> {
        check_actions(EnvKind::Overcooked, actions, rewards)?;
        rewards.fill(0.0);
        let cooking_before: Vec<bool> = self.pots.iter().map(Pot::is_cooking).collect();

        let mut current = Vec::with_capacity(2);
        let mut intended = Vec::with_capacity(2);
        for (p, &a) in self.players.iter_mut().zip(actions) {
            current.push(Some(p.pos));
            let target = action_direction(a).map(|d| {
                p.facing = d;
                p.pos.step(d)
            });
            intended.push(target.filter(|&t| self.level.tile(t) == Some(Tile::Floor)));
        }
        let outcome = resolve_moves(&current, &intended, ContestRule::LowestIndexWins);
        for (p, pos) in self.players.iter_mut().zip(outcome.positions) {
            p.pos = pos.expect("cooks are always on the board");
        }

        for i in 0..self.players.len() {
            if actions[i] == INTERACT {
                self.interact(i, rewards);
            }
        }

        for (pot, was_cooking) in self.pots.iter_mut().zip(cooking_before) {
            if was_cooking && pot.is_cooking() {
                pot.timer += 1;
            }
        }
        self.steps += 1;
        Ok(())
    }

    fn observe_into(&self, player: usize, obs: &mut Observation) {
        let atlas = atlas();
        let spec = EnvKind::Overcooked.obs_spec();
        let me = &self.players[player];
        let window = Window { origin: me.pos, facing: Direction::North, frame: WindowFrame::Centered, cells: spec.window };
        let w = self.level.width;
        render_window(obs, &spec, &window, |p| {
            let Some(tile) = self.level.tile(p) else { return &atlas.padding };
            if let Some(j) = self.players.iter().position(|c| c.pos == p) {
                let c = &self.players[j];
                return atlas.cook(j == player, c.facing, c.held);
            }
            match tile {
                Tile::Floor => &atlas.floor,
                Tile::Counter => match self.counter_items[p.index(w)] {
                    None => &atlas.counter,
                    Some(item) => &atlas.counter_with[item_index(item)],
                },
                Tile::Pot => atlas.pot(&self.pots[p.index(w)]),
                Tile::TomatoStation => &atlas.tomato_station,
                Tile::DishStation => &atlas.dish_station,
                Tile::Delivery => &atlas.delivery,
            }
        });
    }

    fn state_hash(&self) -> u64 {
        let mut d = Digest::new();
        self.steps.hash(&mut d);
        self.players.hash(&mut d);
        self.counter_items.hash(&mut d);
        self.pots.hash(&mut d);
        d.finish()
    }

    fn steps_taken(&self) -> u64 {
        self.steps
    }
}

fn item_index(item: Item) -> usize {
    match item {
        Item::Tomato => 0,
        Item::Dish => 1,
        Item::Soup => 2,
    }
}

pub fn item_color(item: Item) -> Rgb {
    [palette::TOMATO, palette::DISH, palette::SOUP][item_index(item)]
}

pub(crate) struct KitchenAtlas {
    pub padding: Sprite,
    pub floor: Sprite,
    pub counter: Sprite,
    pub counter_with: Vec<Sprite>,
    pub tomato_station: Sprite,
    pub dish_station: Sprite,
    pub delivery: Sprite,
    /// Idle pots by tomato count.
    pub pot_filling: Vec<Sprite>,
    /// Full pots by cook timer; the last entry is the ready pot.
    pub pot_cooking: Vec<Sprite>,
    /// Indexed by `[is_self][facing][held + 1]`.
    pub cooks: Vec<Sprite>,
}

impl KitchenAtlas {
    pub fn pot(&self, pot: &Pot) -> &Sprite {
        if pot.tomatoes < TOMATOES_PER_SOUP {
            &self.pot_filling[pot.tomatoes as usize]
        } else {
            &self.pot_cooking[pot.timer.min(COOK_STEPS) as usize]
        }
    }

    pub fn cook(&self, is_self: bool, facing: Direction, held: Option<Item>) -> &Sprite {
        let h = held.map_or(0, |i| item_index(i) + 1);
        &self.cooks[(usize::from(is_self) * 4 + facing as usize) * 4 + h]
    }
}

/// Pixel row of the pot loading bar.
pub const POT_BAR_ROW: usize = 7;

pub(crate) fn atlas() -> &'static KitchenAtlas {
    static ATLAS: OnceLock<KitchenAtlas> = OnceLock::new();
    ATLAS.get_or_init(|| {
        let pot_base = || Sprite::token(8, palette::COUNTER, palette::POT);
        let with_pips = |s: Sprite, n: u8| (0..n as usize).fold(s, |s, k| s.fill(0, 1, 1 + 2 * k, 2 + 2 * k, palette::TOMATO));
        let pot_filling = (0..TOMATOES_PER_SOUP).map(|n| with_pips(pot_base(), n)).collect();
        let pot_cooking = (0..=COOK_STEPS)
            .map(|t| {
                let s = with_pips(pot_base(), TOMATOES_PER_SOUP);
                if t == COOK_STEPS {
                    s.fill(POT_BAR_ROW, POT_BAR_ROW + 1, 0, 8, palette::READY)
                } else {
                    let filled = (8 * t as usize).div_ceil(COOK_STEPS as usize);
                    s.fill(POT_BAR_ROW, POT_BAR_ROW + 1, 0, filled, palette::PROGRESS)
                }
            })
            .collect();
        let mut cooks = Vec::with_capacity(32);
        for body in [palette::OTHER, palette::SELF] {
            for d in Direction::ALL {
                let base = Sprite::token(8, palette::FLOOR, body).with_facing(d);
                cooks.push(base.clone());
                for item in [Item::Tomato, Item::Dish, Item::Soup] {
                    cooks.push(base.clone().with_badge(item_color(item)));
                }
            }
        }
        KitchenAtlas {
            padding: Sprite::solid(8, palette::PADDING),
            floor: Sprite::solid(8, palette::FLOOR),
            counter: Sprite::solid(8, palette::COUNTER),
            counter_with: [Item::Tomato, Item::Dish, Item::Soup]
                .iter()
                .map(|&i| Sprite::token(8, palette::COUNTER, item_color(i)))
                .collect(),
            tomato_station: Sprite::token(8, palette::TOMATO_STATION, palette::TOMATO_STATION).fill(3, 5, 3, 5, palette::TOMATO),
            dish_station: Sprite::solid(8, palette::DISH_STATION).fill(3, 5, 3, 5, palette::WALL),
            delivery: Sprite::solid(8, palette::DELIVERY).fill(3, 5, 3, 5, palette::MARKER),
            pot_filling,
            pot_cooking,
            cooks,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ```text
    /// CTCCC
    /// C...O
    /// D...C
    /// C...X
    /// CCCCC
    /// ```
    pub(crate) fn fixture() -> KitchenLevel {
        let text = "# popgrid level v1\nenv: overcooked\nid: fixture\nseed: 0\ngrid:\nCTCCC\nCS..O\nD...C\nC..SX\nCCCCC\n";
        KitchenLevel::from_level_text(&LevelText::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn features_of_fixture() {
        let level = fixture();
        let f = kitchen_features(&level).unwrap();
        // Tomato access (1,1) to pot access (1,3): 2; dish access (2,1) to
        // (1,3): 3; pot access (1,3) to delivery access (3,3): 2.
        assert_eq!(f.est_path_length, 3 * 2 + 3 + 2);
        assert!((f.openness - 9.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn third_tomato_cooks_for_twenty_steps() {
        let mut env = KitchenEnv::new(fixture());
        env.reset(0);
        let pot = GridPos::new(1, 4);
        env.place_player(1, GridPos::new(3, 1), Direction::South, None);
        let mut rewards = vec![0.0; 2];
        for k in 0..3 {
            env.place_player(0, GridPos::new(1, 3), Direction::East, Some(Item::Tomato));
            env.step(&[INTERACT, NOOP], &mut rewards).unwrap();
            assert_eq!(rewards, vec![1.0, 0.0]);
            assert_eq!(env.pot(pot).unwrap().tomatoes, k + 1);
        }
        for t in 1..=20 {
            assert!(!env.pot(pot).unwrap().is_ready(), "ready too early at +{t}");
            env.step(&[NOOP, NOOP], &mut rewards).unwrap();
        }
        assert!(env.pot(pot).unwrap().is_ready());
    }

    #[test]
    fn delivery_pays_both() {
        let mut env = KitchenEnv::new(fixture());
        env.reset(0);
        env.place_player(0, GridPos::new(3, 3), Direction::East, Some(Item::Soup));
        env.place_player(1, GridPos::new(1, 1), Direction::North, None);
        let mut rewards = vec![0.0; 2];
        env.step(&[INTERACT, NOOP], &mut rewards).unwrap();
        assert_eq!(rewards, vec![20.0, 20.0]);
        assert_eq!(env.players()[0].held, None);
    }

    #[test]
    fn tomato_goes_onto_empty_counter() {
        let mut env = KitchenEnv::new(fixture());
        env.reset(0);
        env.place_player(0, GridPos::new(2, 3), Direction::East, Some(Item::Tomato));
        env.place_player(1, GridPos::new(1, 1), Direction::North, None);
        let mut rewards = vec![0.0; 2];
        env.step(&[INTERACT, NOOP], &mut rewards).unwrap();
        assert_eq!(env.players()[0].held, None);
        assert_eq!(env.counter_item(GridPos::new(2, 4)), Some(Item::Tomato));
        assert_eq!(rewards, vec![0.0, 0.0]);
    }

    #[test]
    fn generated_levels_are_solvable() {
        for seed in 0..50 {
            let level = generate_kitchen_level(GenSeed(seed)).unwrap();
            assert!((MIN_INTERIOR + 2..=MAX_INTERIOR + 2).contains(&level.height));
            for t in Tile::OBJECTS {
                assert!((1..=3).contains(&level.cells_of(t).count()));
            }
            assert!(level.spawns.iter().all(|&s| player_can_cook(&level, s)));
            assert!(kitchen_features(&level).is_ok());
        }
    }

    #[test]
    fn loading_bar_changes_with_timer() {
        let a = atlas();
        assert_ne!(a.pot_cooking[3], a.pot_cooking[12]);
        assert_ne!(a.pot_cooking[19], a.pot_cooking[20]);
    }
}
