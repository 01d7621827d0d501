//! Capture the Flag: two teams of two on a 180-degree symmetric maze.
//!
//! Players 0 and 1 are red, 2 and 3 blue. Actions are the same eight as in
//! HarvestPatch (no-op, forward, backward, strafe left/right, turn
//! left/right, tag beam). Aux channels, from the observing player's side:
//! `own_flag_held_by_enemy`, `enemy_flag_held_by_team`.

use std::hash::Hash;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::moves::{resolve_moves, ContestRule};
use crate::engine::{check_actions, ActionId, Direction, EnvKind, Environment, GridPos, Observation};
use crate::envs::harvest::{BACKWARD, FORWARD, STRAFE_LEFT, STRAFE_RIGHT, TAG, TURN_LEFT, TURN_RIGHT};
use crate::error::{Error, Result};
use crate::level::{write_features, LevelMeta, LevelText};
use crate::procgen::{
    bfs_distances, carve_maze, generate_with_retries, mirror180_concat, path_distance, reachable,
    remove_deadends, remove_deadends_and_horseshoes, GenSeed, GridMask, HalfLayout, TeamSite, DEFAULT_RETRY_CAP,
};
use crate::render::{palette, render_window, Sprite, Window, CTF_FRAME};
use crate::rng::{self, stream, Digest, SimRng};

pub const MAX_HEALTH: u8 = 3;
pub const TAG_OUT_STEPS: u8 = 20;
pub const BEAM_COOLDOWN: u8 = 3;
pub const MIN_FLAG_DISTANCE: f64 = 6.0;
pub const SPAWNS_PER_TEAM: usize = 3;

pub const REWARD_CAPTURE: f64 = 6.0;
pub const REWARD_PICKUP: f64 = 1.0;
pub const REWARD_RETURN: f64 = 1.0;
pub const REWARD_TEAMMATE_CAPTURE: f64 = 5.0;
pub const REWARD_TAG_CARRIER: f64 = 2.0;
pub const REWARD_TAG: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Team {
    Red,
    Blue,
}

impl Team {
    pub fn of_player(i: usize) -> Team {
        if i < 2 {
            Team::Red
        } else {
            Team::Blue
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn other(self) -> Team {
        match self {
            Team::Red => Team::Blue,
            Team::Blue => Team::Red,
        }
    }

    pub fn members(self) -> [usize; 2] {
        match self {
            Team::Red => [0, 1],
            Team::Blue => [2, 3],
        }
    }
}

/// A rectangular room: top-left corner plus size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Room {
    pub top: i32,
    pub left: i32,
    pub height: i32,
    pub width: i32,
}

impl Room {
    pub fn contains(&self, p: GridPos) -> bool {
        p.row >= self.top && p.row < self.top + self.height && p.col >= self.left && p.col < self.left + self.width
    }

    pub fn cells(&self) -> impl Iterator<Item = GridPos> + '_ {
        (self.top..self.top + self.height)
            .flat_map(move |r| (self.left..self.left + self.width).map(move |c| GridPos::new(r, c)))
    }

    pub fn rotate180(&self, h: usize, w: usize) -> Self {
        Self {
            top: h as i32 - self.top - self.height,
            left: w as i32 - self.left - self.width,
            height: self.height,
            width: self.width,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtfLevel {
    pub meta: LevelMeta,
    pub grid: GridMask,
    pub red: TeamSite,
    pub blue: TeamSite,
    pub red_base: Room,
}

impl CtfLevel {
    pub fn site(&self, team: Team) -> &TeamSite {
        match team {
            Team::Red => &self.red,
            Team::Blue => &self.blue,
        }
    }

    pub fn base(&self, team: Team) -> Room {
        match team {
            Team::Red => self.red_base,
            Team::Blue => self.red_base.rotate180(self.grid.height(), self.grid.width()),
        }
    }

    pub fn to_level_text(&self) -> LevelText {
        let mut t = LevelText::new();
        self.meta.write(EnvKind::CaptureTheFlag, &mut t);
        let b = self.red_base;
        t.push("red_base", format!("{},{},{},{}", b.top, b.left, b.height, b.width));
        if let Ok(f) = ctf_features(self) {
            write_features(
                &mut t,
                &[
                    ("crow_distance", f.crow),
                    ("path_distance", f.path as f64),
                    ("path_complexity", f.complexity),
                    ("openness", f.openness),
                ],
            );
        }
        let mut rows: Vec<Vec<char>> = self.grid.to_rows().iter().map(|r| r.chars().collect()).collect();
        for (site, flag, spawn) in [(&self.red, 'R', '1'), (&self.blue, 'B', '2')] {
            rows[site.flag.row as usize][site.flag.col as usize] = flag;
            for s in &site.spawns {
                rows[s.row as usize][s.col as usize] = spawn;
            }
        }
        t.rows = rows.into_iter().map(String::from_iter).collect();
        t
    }

    pub fn from_level_text(t: &LevelText) -> Result<Self> {
        let meta = LevelMeta::read(EnvKind::CaptureTheFlag, t)?;
        let base: Vec<i32> = t
            .require("red_base")?
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(1, 1, "malformed red_base"))?;
        let [top, left, height, width] = base[..] else {
            return Err(Error::parse(1, 1, "red_base needs four integers"));
        };
        let mut grid = GridMask::walled(t.height(), t.width());
        let (mut red_flag, mut blue_flag) = (None, None);
        let (mut red_spawns, mut blue_spawns) = (Vec::new(), Vec::new());
        t.for_each_glyph(|r, c, ch| {
            let p = GridPos::new(r as i32, c as i32);
            match ch {
                '#' => return Ok(()),
                '.' => {}
                'R' => red_flag = Some(p),
                'B' => blue_flag = Some(p),
                '1' => red_spawns.push(p),
                '2' => blue_spawns.push(p),
                other => return Err(format!("unexpected glyph {other:?}")),
            }
            grid.set(p, true);
            Ok(())
        })?;
        let missing = |what| Error::parse(t.grid_line, 1, format!("level has no {what} flag"));
        let red = TeamSite { flag: red_flag.ok_or_else(|| missing("red"))?, spawns: red_spawns };
        // Blue spawns are stored in rotated red order; row-major parsing
        // reverses that order.
        blue_spawns.sort_by_key(|s| std::cmp::Reverse(*s));
        let blue = TeamSite { flag: blue_flag.ok_or_else(|| missing("blue"))?, spawns: blue_spawns };
        Ok(Self { meta, grid, red, blue, red_base: Room { top, left, height, width } })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtfFeatures {
    pub crow: f64,
    pub path: u32,
    pub complexity: f64,
    pub openness: f64,
}

pub fn ctf_features(level: &CtfLevel) -> Result<CtfFeatures> {
    let crow = level.red.flag.euclidean(level.blue.flag);
    let path = path_distance(&level.grid, level.red.flag, level.blue.flag)
        .ok_or_else(|| Error::domain("flags are not connected"))?;
    Ok(CtfFeatures {
        crow,
        path,
        complexity: if path == 0 { 1.0 } else { crow / f64::from(path) },
        openness: level.grid.count_open() as f64 / level.grid.len() as f64,
    })
}

/// Checks the solvability conditions: flags far enough apart and every flag
/// and spawn in one connected component.
pub fn ctf_level_is_valid(level: &CtfLevel) -> bool {
    if level.red.flag.euclidean(level.blue.flag) < MIN_FLAG_DISTANCE {
        return false;
    }
    let Ok(reach) = reachable(&level.grid, level.red.flag) else { return false };
    [&level.red, &level.blue]
        .iter()
        .all(|s| reach.contains(&s.flag) && s.spawns.iter().all(|p| reach.contains(p)))
}

/// Rooms on an odd lattice joined by a backtracking maze, deadends and
/// horseshoes removed, the first room from the top left (wholly left of the
/// centre column) made the red base, then mirrored.
pub fn generate_ctf_level(seed: GenSeed) -> Result<CtfLevel> {
    generate_with_retries("capture_the_flag", seed, DEFAULT_RETRY_CAP, |rng| {
        let w = 2 * rng.gen_range(7..=12usize) + 1;
        let h = rng.gen_range(9..=15usize);
        let (hi, wi) = (h as i32, w as i32);
        let mid = wi / 2;

        let mut interior = GridMask::walled(h, w);
        for r in 1..hi - 1 {
            for c in 1..wi - 1 {
                interior.set(GridPos::new(r, c), true);
            }
        }
        let mut base = GridMask::walled(h, w);
        let mut rooms = Vec::new();
        let n_rooms = rng.gen_range(2..=5);
        for _ in 0..n_rooms {
            let rh = 2 * rng.gen_range(1..=2) + 1;
            let rw = 2 * rng.gen_range(1..=2) + 1;
            let max_top = (hi - 1 - rh) / 2;
            let max_left = (wi - 1 - rw) / 2;
            if max_top < 0 || max_left < 0 {
                continue;
            }
            let room = Room {
                top: 2 * rng.gen_range(0..=max_top) + 1,
                left: 2 * rng.gen_range(0..=max_left) + 1,
                height: rh,
                width: rw,
            };
            if room.top + room.height > hi - 1 || room.left + room.width > wi - 1 {
                continue;
            }
            for p in room.cells() {
                base.set(p, true);
            }
            rooms.push(room);
        }
        let maze = carve_maze(&base, &interior, (1, 1), rng);
        let maze = remove_deadends_and_horseshoes(&maze);

        // Scan from the top left for the first room lying wholly left of
        // the centre column.
        let base_room = maze
            .cells()
            .filter(|p| p.col < mid)
            .find_map(|p| rooms.iter().find(|r| r.contains(p) && r.left + r.width <= mid && r.cells().all(|c| maze.is_open(c))))
            .copied()?;

        let mut cells: Vec<GridPos> = base_room.cells().collect();
        cells.shuffle(rng);
        let mut spawns = cells[1..=SPAWNS_PER_TEAM].to_vec();
        spawns.sort();
        let red = TeamSite { flag: cells[0], spawns };

        let mut half = GridMask::walled(h, (mid + 1) as usize);
        for p in half.cells().collect::<Vec<_>>() {
            half.set(p, maze.is_open(p));
        }
        let mirrored = mirror180_concat(&HalfLayout { grid: half, full_width: w, red }).ok()?;

        // The shared centre column can leave stubs; prune them and keep only
        // the component holding the flags.
        let pruned = remove_deadends(&mirrored.grid);
        if !pruned.is_rotation_symmetric() {
            return None;
        }
        let reach = reachable(&pruned, mirrored.red.flag).ok()?;
        let mut grid = GridMask::walled(h, w);
        for p in &reach {
            grid.set(*p, true);
        }
        let level = CtfLevel {
            meta: LevelMeta::generated(EnvKind::CaptureTheFlag, seed),
            grid,
            red: mirrored.red,
            blue: mirrored.blue,
            red_base: base_room,
        };
        ctf_level_is_valid(&level).then_some(level)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlagState {
    Home,
    Carried(usize),
    Dropped(GridPos),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CtfPlayer {
    pub team: Team,
    pub pos: GridPos,
    pub facing: Direction,
    pub health: u8,
    pub tagged_out: u8,
    pub cooldown: u8,
}

impl CtfPlayer {
    pub fn on_board(&self) -> bool {
        self.tagged_out == 0
    }
}

/// Result of a finished match, by capture count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOutcome {
    pub red_captures: u32,
    pub blue_captures: u32,
    pub winner: Option<Team>,
}

impl MatchOutcome {
    pub fn new(red_captures: u32, blue_captures: u32) -> Self {
        let winner = match red_captures.cmp(&blue_captures) {
            std::cmp::Ordering::Greater => Some(Team::Red),
            std::cmp::Ordering::Less => Some(Team::Blue),
            std::cmp::Ordering::Equal => None,
        };
        Self { red_captures, blue_captures, winner }
    }
}

/// Reward-bearing events of one step, for logs and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtfEvent {
    Capture { player: usize },
    Pickup { player: usize },
    Return { player: usize },
    TagOut { shooter: usize, victim: usize, carrier: bool },
}

pub struct CtfEnv {
    level: CtfLevel,
    players: Vec<CtfPlayer>,
    flags: [FlagState; 2],
    captures: [u32; 2],
    events: Vec<CtfEvent>,
    rng: SimRng,
    steps: u64,
}

impl CtfEnv {
    pub fn new(level: CtfLevel) -> Self {
        let mut env = Self {
            level,
            players: Vec::new(),
            flags: [FlagState::Home; 2],
            captures: [0; 2],
            events: Vec::new(),
            rng: rng::rng_for(0, &[stream::ENV]),
            steps: 0,
        };
        env.reset(0);
        env
    }

    pub fn level(&self) -> &CtfLevel {
        &self.level
    }

    pub fn players(&self) -> &[CtfPlayer] {
        &self.players
    }

    pub fn flag(&self, team: Team) -> FlagState {
        self.flags[team.index()]
    }

    pub fn captures(&self, team: Team) -> u32 {
        self.captures[team.index()]
    }

    pub fn outcome(&self) -> MatchOutcome {
        MatchOutcome::new(self.captures[0], self.captures[1])
    }

    /// Events of the most recent step.
    pub fn events(&self) -> &[CtfEvent] {
        &self.events
    }

    /// Player carrying `team`'s flag, if any.
    pub fn carrier_of(&self, team: Team) -> Option<usize> {
        match self.flags[team.index()] {
            FlagState::Carried(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_carrying(&self, player: usize) -> bool {
        self.carrier_of(self.players[player].team.other()) == Some(player)
    }

    /// Where `team`'s flag currently is.
    pub fn flag_position(&self, team: Team) -> GridPos {
        match self.flags[team.index()] {
            FlagState::Home => self.level.site(team).flag,
            FlagState::Carried(p) => self.players[p].pos,
            FlagState::Dropped(p) => p,
        }
    }

    /// Places a player directly (test fixtures).
    pub fn place_player(&mut self, i: usize, pos: GridPos, facing: Direction) {
        let p = &mut self.players[i];
        p.pos = pos;
        p.facing = facing;
        p.tagged_out = 0;
    }

    pub fn set_health(&mut self, i: usize, health: u8) {
        self.players[i].health = health;
    }

    pub fn set_flag(&mut self, team: Team, state: FlagState) {
        self.flags[team.index()] = state;
    }

    fn occupant(&self, p: GridPos) -> Option<usize> {
        self.players.iter().position(|q| q.on_board() && q.pos == p)
    }

    /// First on-board player in front of `shooter` before a wall.
    pub fn beam_target(&self, shooter: usize) -> Option<usize> {
        let me = &self.players[shooter];
        let mut cell = me.pos.step(me.facing);
        while self.level.grid.is_open(cell) {
            if let Some(j) = self.occupant(cell) {
                return Some(j);
            }
            cell = cell.step(me.facing);
        }
        None
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

    fn respawn_facing(team: Team) -> Direction {
        match team {
            Team::Red => Direction::East,
            Team::Blue => Direction::West,
        }
    }
}

impl Environment for CtfEnv {
    fn kind(&self) -> EnvKind {
        EnvKind::CaptureTheFlag
    }

    fn level_id(&self) -> &str {
        &self.level.meta.id
    }

    /// Both teams use the same random choice of two of their three spawn
    /// points and mirrored random facings, keeping the start symmetric.
    fn reset(&mut self, seed: u64) {
        self.rng = rng::rng_for(seed, &[stream::ENV]);
        self.steps = 0;
        self.flags = [FlagState::Home; 2];
        self.captures = [0; 2];
        self.events.clear();
        let mut order: Vec<usize> = (0..self.level.red.spawns.len()).collect();
        order.shuffle(&mut self.rng);
        let facings = [Direction::from_index(self.rng.gen_range(0..4)), Direction::from_index(self.rng.gen_range(0..4))];
        let mut players = Vec::with_capacity(4);
        for team in [Team::Red, Team::Blue] {
            for (k, &facing) in facings.iter().enumerate() {
                let site = self.level.site(team);
                let pos = site.spawns[order[k % order.len()]];
                let facing = if team == Team::Red { facing } else { facing.opposite() };
                players.push(CtfPlayer { team, pos, facing, health: MAX_HEALTH, tagged_out: 0, cooldown: 0 });
            }
        }
        self.players = players;
    }

    /// Step order: turns, beams (simultaneous, from pre-move positions),
    /// movement (every contender bounces), captures, then pickups and
    /// returns, then timers and respawns.
    fn step(&mut self, actions: &[ActionId], rewards: &mut [f64]) -> Result<()> {
        check_actions(EnvKind::CaptureTheFlag, actions, rewards)?;
        rewards.fill(0.0);
        self.events.clear();
        let n = self.players.len();

        for (p, &a) in self.players.iter_mut().zip(actions) {
            if p.on_board() {
                match a {
                    TURN_LEFT => p.facing = p.facing.turn_left(),
                    TURN_RIGHT => p.facing = p.facing.turn_right(),
                    _ => {}
                }
            }
        }

        let mut fired = [false; 4];
        let mut hits_on = [0u8; 4];
        let mut shooters_of: [Vec<usize>; 4] = Default::default();
        for i in 0..n {
            if actions[i] == TAG && self.players[i].on_board() && self.players[i].cooldown == 0 {
                fired[i] = true;
                if let Some(j) = self.beam_target(i) {
                    if self.players[j].team != self.players[i].team {
                        hits_on[j] += 1;
                        shooters_of[j].push(i);
                    }
                }
            }
        }
        let mut tagged_now = [false; 4];
        for j in 0..n {
            if hits_on[j] == 0 {
                continue;
            }
            let victim = &mut self.players[j];
            victim.health = victim.health.saturating_sub(hits_on[j]);
            if victim.health == 0 {
                victim.tagged_out = TAG_OUT_STEPS;
                tagged_now[j] = true;
                let pos = victim.pos;
                let enemy_flag = victim.team.other().index();
                let carrier = self.flags[enemy_flag] == FlagState::Carried(j);
                if carrier {
                    self.flags[enemy_flag] = FlagState::Dropped(pos);
                }
                for &s in &shooters_of[j] {
                    rewards[s] += if carrier { REWARD_TAG_CARRIER } else { REWARD_TAG };
                    self.events.push(CtfEvent::TagOut { shooter: s, victim: j, carrier });
                }
            }
        }
        for i in 0..n {
            if fired[i] {
                self.players[i].cooldown = BEAM_COOLDOWN;
            }
        }

        let current: Vec<Option<GridPos>> =
            self.players.iter().map(|p| p.on_board().then_some(p.pos)).collect();
        let intended: Vec<Option<GridPos>> = (0..n)
            .map(|i| if self.players[i].on_board() { self.move_target(i, actions[i]) } else { None })
            .collect();
        let outcome = resolve_moves(&current, &intended, ContestRule::AllBounce);
        for (p, pos) in self.players.iter_mut().zip(outcome.positions) {
            if let Some(pos) = pos {
                p.pos = pos;
            }
        }

        // Captures are judged on the flag positions after movement, before
        // anyone picks up or returns a flag this step.
        let flags_before = self.flags;
        for i in 0..n {
            let p = &self.players[i];
            let (own, enemy) = (p.team.index(), p.team.other().index());
            if p.on_board()
                && flags_before[enemy] == FlagState::Carried(i)
                && flags_before[own] == FlagState::Home
                && p.pos == self.level.site(p.team).flag
            {
                let team = p.team;
                self.captures[own] += 1;
                self.flags[enemy] = FlagState::Home;
                rewards[i] += REWARD_CAPTURE;
                for mate in team.members() {
                    if mate != i {
                        rewards[mate] += REWARD_TEAMMATE_CAPTURE;
                    }
                }
                self.events.push(CtfEvent::Capture { player: i });
            }
        }
        for i in 0..n {
            let p = &self.players[i];
            if !p.on_board() {
                continue;
            }
            let (team, pos) = (p.team, p.pos);
            let (own, enemy) = (team.index(), team.other().index());
            let enemy_at_here = match self.flags[enemy] {
                FlagState::Home => self.level.site(team.other()).flag == pos,
                FlagState::Dropped(d) => d == pos,
                FlagState::Carried(_) => false,
            };
            if enemy_at_here {
                self.flags[enemy] = FlagState::Carried(i);
                rewards[i] += REWARD_PICKUP;
                self.events.push(CtfEvent::Pickup { player: i });
            }
            if self.flags[own] == FlagState::Dropped(pos) {
                self.flags[own] = FlagState::Home;
                rewards[i] += REWARD_RETURN;
                self.events.push(CtfEvent::Return { player: i });
            }
        }

        for i in 0..n {
            if !fired[i] && self.players[i].cooldown > 0 {
                self.players[i].cooldown -= 1;
            }
            if tagged_now[i] || self.players[i].tagged_out == 0 {
                continue;
            }
            self.players[i].tagged_out -= 1;
            if self.players[i].tagged_out == 0 {
                let team = self.players[i].team;
                let spawn = self
                    .level
                    .site(team)
                    .spawns
                    .iter()
                    .copied()
                    .find(|&s| (0..n).all(|j| j == i || !self.players[j].on_board() || self.players[j].pos != s));
                match spawn {
                    Some(s) => {
                        let p = &mut self.players[i];
                        p.pos = s;
                        p.facing = Self::respawn_facing(team);
                        p.health = MAX_HEALTH;
                        p.cooldown = 0;
                    }
                    // Every spawn occupied: wait one more step.
                    None => self.players[i].tagged_out = 1,
                }
            }
        }
        self.steps += 1;
        Ok(())
    }

    fn observe_into(&self, player: usize, obs: &mut Observation) {
        let me = &self.players[player];
        let (own, enemy) = (me.team, me.team.other());
        obs.aux[0].1 = f32::from(u8::from(self.carrier_of(own).is_some()));
        obs.aux[1].1 = f32::from(u8::from(self.carrier_of(enemy).is_some()));
        if !me.on_board() {
            obs.pixels.fill(0);
            return;
        }
        let atlas = atlas();
        let spec = EnvKind::CaptureTheFlag.obs_spec();
        let window = Window { origin: me.pos, facing: me.facing, frame: CTF_FRAME, cells: spec.window };
        let grid = &self.level.grid;
        let (own_base, enemy_base) = (self.level.base(own), self.level.base(enemy));
        let dropped = |team: Team| match self.flags[team.index()] {
            FlagState::Home => Some(self.level.site(team).flag),
            FlagState::Dropped(p) => Some(p),
            FlagState::Carried(_) => None,
        };
        let (own_flag, enemy_flag) = (dropped(own), dropped(enemy));
        render_window(obs, &spec, &window, |p| {
            if !grid.contains(p) {
                return &atlas.padding;
            }
            if !grid.is_open(p) {
                return &atlas.wall;
            }
            if let Some(j) = self.occupant(p) {
                let q = &self.players[j];
                let kind = if j == player {
                    0
                } else if q.team == own {
                    1
                } else {
                    2
                };
                let carrying = self.is_carrying(j);
                return atlas.player(kind, window.relative(q.facing), carrying);
            }
            if own_flag == Some(p) {
                &atlas.own_flag
            } else if enemy_flag == Some(p) {
                &atlas.enemy_flag
            } else if own_base.contains(p) {
                &atlas.own_base
            } else if enemy_base.contains(p) {
                &atlas.enemy_base
            } else {
                &atlas.floor
            }
        });
    }

    fn state_hash(&self) -> u64 {
        let mut d = Digest::new();
        self.steps.hash(&mut d);
        self.players.hash(&mut d);
        self.flags.hash(&mut d);
        self.captures.hash(&mut d);
        d.finish()
    }

    fn steps_taken(&self) -> u64 {
        self.steps
    }
}

pub(crate) struct CtfAtlas {
    pub padding: Sprite,
    pub wall: Sprite,
    pub floor: Sprite,
    pub own_base: Sprite,
    pub enemy_base: Sprite,
    pub own_flag: Sprite,
    pub enemy_flag: Sprite,
    /// Indexed by `[kind][facing][carrying]`, kind 0 self, 1 teammate, 2 enemy.
    pub players: Vec<Sprite>,
}

impl CtfAtlas {
    pub fn player(&self, kind: usize, facing: Direction, carrying: bool) -> &Sprite {
        &self.players[(kind * 4 + facing as usize) * 2 + usize::from(carrying)]
    }
}

pub(crate) fn atlas() -> &'static CtfAtlas {
    static ATLAS: OnceLock<CtfAtlas> = OnceLock::new();
    ATLAS.get_or_init(|| {
        let mut players = Vec::with_capacity(24);
        for (kind, body) in [palette::SELF, palette::TEAMMATE, palette::OTHER].into_iter().enumerate() {
            // A carrier holds the flag of the team opposing its own.
            let carried = if kind == 2 { palette::OWN_FLAG } else { palette::ENEMY_FLAG };
            for d in Direction::ALL {
                let s = Sprite::token(8, palette::FLOOR, body).with_facing(d);
                players.push(s.clone());
                players.push(s.with_badge(carried));
            }
        }
        CtfAtlas {
            padding: Sprite::solid(8, palette::PADDING),
            wall: Sprite::solid(8, palette::WALL),
            floor: Sprite::solid(8, palette::FLOOR),
            own_base: Sprite::solid(8, palette::OWN_BASE),
            enemy_base: Sprite::solid(8, palette::ENEMY_BASE),
            own_flag: Sprite::token(8, palette::FLOOR, palette::OWN_FLAG).fill(1, 7, 1, 2, palette::MARKER).fill(1, 2, 1, 2, palette::OWN_FLAG),
            enemy_flag: Sprite::token(8, palette::FLOOR, palette::ENEMY_FLAG).fill(1, 7, 1, 2, palette::MARKER).fill(1, 2, 1, 2, palette::ENEMY_FLAG),
            players,
        }
    })
}

/// Walking distances from `from` to every cell (`None` for walls and
/// unreachable cells).
pub fn distance_field(level: &CtfLevel, from: GridPos) -> Vec<Option<u32>> {
    bfs_distances(&level.grid, from)
}
