//! Scripted baseline policies.
//!
//! Each reads only its own observation: cells are classified by the colour
//! of their sprite key pixel, with a few extra pixels for facing markers,
//! held-item badges and pot state. Navigation is breadth-first search over
//! the visible window, so behaviour depends on what the player can see.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{ActionDist, PolicyMemory};
use crate::engine::{ActionId, Direction, EnvKind, Observation};
use crate::envs::{harvest, kitchen, traffic};
use crate::render::{cell_key, cell_pixel, palette, Rgb};

/// Window cell coordinates `(row, col)`.
pub type Cell = (usize, usize);

/// Decoded view of an observation's cell keys.
pub struct View<'a> {
    obs: &'a Observation,
    pub cells: usize,
    pub sprite: usize,
    pub owner: Cell,
}

impl<'a> View<'a> {
    pub fn new(env: EnvKind, obs: &'a Observation) -> Self {
        let spec = env.obs_spec();
        let owner = match env {
            EnvKind::HarvestPatch | EnvKind::CaptureTheFlag => (9, 5),
            EnvKind::TrafficNavigation | EnvKind::Overcooked => (spec.window / 2, spec.window / 2),
        };
        Self { obs, cells: spec.window, sprite: spec.sprite, owner }
    }

    pub fn key(&self, c: Cell) -> Rgb {
        cell_key(self.obs, self.sprite, c.0, c.1)
    }

    pub fn pixel(&self, c: Cell, r: usize, col: usize) -> Rgb {
        cell_pixel(self.obs, self.sprite, c.0, c.1, r, col)
    }

    pub fn all_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.cells).flat_map(move |i| (0..self.cells).map(move |j| (i, j)))
    }

    pub fn neighbor(&self, c: Cell, d: Direction) -> Option<Cell> {
        let (dr, dc) = d.delta();
        let (r, col) = (c.0 as i32 + dr, c.1 as i32 + dc);
        (r >= 0 && col >= 0 && (r as usize) < self.cells && (col as usize) < self.cells).then_some((r as usize, col as usize))
    }

    /// Facing of the sprite in `c`, read from its notch marker.
    pub fn facing_of(&self, c: Cell) -> Option<Direction> {
        let s = self.sprite;
        let mid = s / 2 - 1;
        [
            (Direction::North, (0, mid)),
            (Direction::South, (s - 1, mid)),
            (Direction::East, (mid, s - 1)),
            (Direction::West, (mid, 0)),
        ]
        .into_iter()
        .find(|(_, (r, col))| self.pixel(c, *r, *col) == palette::MARKER)
        .map(|(d, _)| d)
    }

    /// Badge colour of the sprite in `c` (its body colour when it has none).
    pub fn badge(&self, c: Cell) -> Rgb {
        let s = self.sprite;
        self.pixel(c, s - 3, s - 3)
    }
}

/// Fixed neighbour orders for breadth-first search; the index is a policy
/// parameter so members of a population break ties differently.
pub const SEARCH_ORDERS: [[Direction; 4]; 4] = [
    [Direction::North, Direction::East, Direction::South, Direction::West],
    [Direction::East, Direction::South, Direction::West, Direction::North],
    [Direction::West, Direction::North, Direction::East, Direction::South],
    [Direction::South, Direction::West, Direction::North, Direction::East],
];

/// Breadth-first search from `start` through passable cells to the nearest
/// cell satisfying `goal`. Returns the first step direction (in window
/// terms) and the distance; `None` if no goal is reachable or `start` is
/// itself a goal.
pub fn first_step(
    view: &View<'_>,
    start: Cell,
    order: usize,
    passable: impl Fn(Cell) -> bool,
    goal: impl Fn(Cell) -> bool,
) -> Option<(Direction, usize)> {
    let n = view.cells;
    let mut first: Vec<Option<Direction>> = vec![None; n * n];
    let mut dist = vec![usize::MAX; n * n];
    let mut queue = VecDeque::new();
    dist[start.0 * n + start.1] = 0;
    queue.push_back(start);
    let dirs = SEARCH_ORDERS[order % SEARCH_ORDERS.len()];
    while let Some(c) = queue.pop_front() {
        for &d in &dirs {
            let Some(nb) = view.neighbor(c, d) else { continue };
            let k = nb.0 * n + nb.1;
            if dist[k] != usize::MAX {
                continue;
            }
            let step = if c == start { Some(d) } else { first[c.0 * n + c.1] };
            if goal(nb) {
                return step.map(|s| (s, dist[c.0 * n + c.1] + 1));
            }
            if passable(nb) {
                dist[k] = dist[c.0 * n + c.1] + 1;
                first[k] = step;
                queue.push_back(nb);
            }
        }
    }
    None
}

/// Egocentric move action for a window direction in oriented views.
pub fn oriented_move(d: Direction) -> ActionId {
    match d {
        Direction::North => harvest::FORWARD,
        Direction::South => harvest::BACKWARD,
        Direction::West => harvest::STRAFE_LEFT,
        Direction::East => harvest::STRAFE_RIGHT,
    }
}

fn mix(n: usize, epsilon: f64, weights: &[(ActionId, f64)]) -> ActionDist {
    let mut p = vec![epsilon / n as f64; n];
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    for &(a, w) in weights {
        p[a as usize] += (1.0 - epsilon) * w / total;
    }
    ActionDist::from_weights(&p).expect("mixture of valid weights")
}

/// Scales `weights` to `1 - aggression` and adds the tag beam with the
/// remaining mass when a target is in range.
fn with_tag(mut weights: Vec<(ActionId, f64)>, target: bool, aggression: f64) -> Vec<(ActionId, f64)> {
    if !target || aggression <= 0.0 {
        return weights;
    }
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    weights.iter_mut().for_each(|(_, w)| *w *= (1.0 - aggression) / total);
    weights.push((harvest::TAG, aggression));
    weights.retain(|(_, w)| *w > 0.0);
    weights
}

/// Forward when the cell ahead is passable (turning with probability
/// `wander`), otherwise turn.
fn explore_oriented(view: &View<'_>, passable: impl Fn(Cell) -> bool, wander: f64, left_handed: bool) -> Vec<(ActionId, f64)> {
    let ahead = (view.owner.0 - 1, view.owner.1);
    let (primary, secondary) = if left_handed {
        (harvest::TURN_LEFT, harvest::TURN_RIGHT)
    } else {
        (harvest::TURN_RIGHT, harvest::TURN_LEFT)
    };
    if passable(ahead) {
        vec![(harvest::FORWARD, 1.0 - wander), (primary, wander * 0.75), (secondary, wander * 0.25)]
    } else {
        vec![(primary, 0.75), (secondary, 0.25)]
    }
}

/// HarvestPatch forager. The greedy variant chases the nearest visible
/// apple; with `min_neighbors > 0` it only eats apples that have at least
/// that many visible apple neighbours, leaving sparse patches to regrow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Harvester {
    pub epsilon: f64,
    /// Probability of firing when another player stands in the beam area.
    pub aggression: f64,
    pub wander: f64,
    pub min_neighbors: u8,
    pub search_order: usize,
    pub left_handed: bool,
}

impl Harvester {
    pub fn act(&self, obs: &Observation) -> ActionDist {
        let view = View::new(EnvKind::HarvestPatch, obs);
        let n = EnvKind::HarvestPatch.num_actions();
        let passable = |c: Cell| matches!(view.key(c), palette::FLOOR | palette::APPLE);
        let is_apple = |c: Cell| view.key(c) == palette::APPLE;
        let neighbors = |c: Cell| {
            let mut k = 0;
            for dr in -1i32..=1 {
                for dc in -1i32..=1 {
                    let (r, col) = (c.0 as i32 + dr, c.1 as i32 + dc);
                    if (dr, dc) != (0, 0) && r >= 0 && col >= 0 && (r as usize) < view.cells && (col as usize) < view.cells && is_apple((r as usize, col as usize)) {
                        k += 1;
                    }
                }
            }
            k
        };
        let edible = |c: Cell| is_apple(c) && neighbors(c) >= usize::from(self.min_neighbors);

        let (or, oc) = view.owner;
        let target_in_beam = (or.saturating_sub(3)..or)
            .any(|r| (oc.saturating_sub(1)..=oc + 1).any(|c| view.key((r, c)) == palette::OTHER));
        let movement = match first_step(&view, view.owner, self.search_order, passable, edible) {
            Some((d, _)) => vec![(oriented_move(d), 1.0)],
            None => explore_oriented(&view, passable, self.wander, self.left_handed),
        };
        let weights = with_tag(movement, target_in_beam, self.aggression);
        mix(n, self.epsilon, &weights)
    }
}

/// Traffic Navigation goal seeker: shortest visible path to the goal
/// marker, otherwise greedy along the goal offset, with ε-uniform noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalSeeker {
    pub epsilon: f64,
    /// Prefer closing the row offset before the column offset.
    pub rows_first: bool,
    /// Probability of waiting rather than side-stepping when blocked.
    pub patience: f64,
    pub search_order: usize,
}

impl GoalSeeker {
    pub fn act(&self, obs: &Observation) -> ActionDist {
        let view = View::new(EnvKind::TrafficNavigation, obs);
        let n = EnvKind::TrafficNavigation.num_actions();
        let dr = obs.aux.first().map_or(0.0, |a| a.1) as i32;
        let dc = obs.aux.get(1).map_or(0.0, |a| a.1) as i32;
        let free = |c: Cell| matches!(view.key(c), palette::FLOOR | palette::MARKER);
        let free_dir = |d: Direction| view.neighbor(view.owner, d).is_some_and(|c| free(c));
        let half = (view.cells / 2) as i32;

        if dr.abs() <= half && dc.abs() <= half {
            let goal = ((view.owner.0 as i32 + dr) as usize, (view.owner.1 as i32 + dc) as usize);
            if let Some((d, _)) = first_step(&view, view.owner, self.search_order, free, |c| c == goal) {
                return mix(n, self.epsilon, &[(traffic::direction_action(d), 1.0)]);
            }
        }
        let vertical = if dr < 0 { Some(Direction::North) } else if dr > 0 { Some(Direction::South) } else { None };
        let horizontal = if dc < 0 { Some(Direction::West) } else if dc > 0 { Some(Direction::East) } else { None };
        let preferred: Vec<Direction> = if self.rows_first {
            vertical.into_iter().chain(horizontal).collect()
        } else {
            horizontal.into_iter().chain(vertical).collect()
        };
        if let Some(&d) = preferred.iter().find(|&&d| free_dir(d)) {
            return mix(n, self.epsilon, &[(traffic::direction_action(d), 1.0)]);
        }
        let sidesteps: Vec<(ActionId, f64)> = Direction::ALL
            .iter()
            .filter(|&&d| free_dir(d) && !preferred.contains(&d))
            .map(|&d| (traffic::direction_action(d), 1.0))
            .collect();
        let mut weights = vec![(traffic::NOOP, self.patience.max(if sidesteps.is_empty() { 1.0 } else { 0.0 }))];
        let side_mass = 1.0 - self.patience;
        let k = sidesteps.len() as f64;
        weights.extend(sidesteps.into_iter().map(|(a, _)| (a, side_mass / k)));
        weights.retain(|(_, w)| *w > 0.0);
        mix(n, self.epsilon, &weights)
    }
}

/// Overcooked cook: fetch tomatoes for the pot, fetch a dish once soup is
/// cooking, plate and deliver. Objects outside the view are searched for by
/// wandering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cook {
    pub epsilon: f64,
    /// Fetch a dish as soon as a pot is cooking (otherwise only once the
    /// soup is ready).
    pub eager_dish: bool,
    pub search_order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PotView {
    Filling(u8),
    Cooking,
    Ready,
}

impl Cook {
    fn pot_state(view: &View<'_>, c: Cell) -> PotView {
        if view.pixel(c, kitchen::POT_BAR_ROW, 0) == palette::READY {
            return PotView::Ready;
        }
        let pips = [1, 3, 5].iter().filter(|&&col| view.pixel(c, 0, col) == palette::TOMATO).count() as u8;
        if pips >= 3 {
            PotView::Cooking
        } else {
            PotView::Filling(pips)
        }
    }

    pub fn act(&self, obs: &Observation, memory: &PolicyMemory) -> ActionDist {
        let view = View::new(EnvKind::Overcooked, obs);
        let n = EnvKind::Overcooked.num_actions();
        let me = view.owner;
        let held = match view.badge(me) {
            palette::TOMATO => Some(kitchen::Item::Tomato),
            palette::DISH => Some(kitchen::Item::Dish),
            palette::SOUP => Some(kitchen::Item::Soup),
            _ => None,
        };
        let key = |c: Cell| view.key(c);
        let pots: Vec<(Cell, PotView)> =
            view.all_cells().filter(|&c| key(c) == palette::POT).map(|c| (c, Self::pot_state(&view, c))).collect();
        let any_pot = |f: &dyn Fn(PotView) -> bool| pots.iter().any(|&(_, s)| f(s));
        let mate_has_dish = view.all_cells().any(|c| {
            key(c) == palette::OTHER && matches!(view.badge(c), palette::DISH | palette::SOUP)
        });

        let target: Box<dyn Fn(Cell) -> bool + '_> = match held {
            Some(kitchen::Item::Soup) => Box::new(move |c| key(c) == palette::DELIVERY),
            Some(kitchen::Item::Dish) => {
                if any_pot(&|s| matches!(s, PotView::Ready | PotView::Cooking)) {
                    let pots = pots.clone();
                    Box::new(move |c| pots.iter().any(|&(p, s)| p == c && matches!(s, PotView::Ready | PotView::Cooking)))
                } else {
                    let pots = pots.clone();
                    Box::new(move |c| pots.iter().any(|&(p, _)| p == c))
                }
            }
            Some(kitchen::Item::Tomato) => {
                if any_pot(&|s| matches!(s, PotView::Filling(_))) {
                    let pots = pots.clone();
                    Box::new(move |c| pots.iter().any(|&(p, s)| p == c && matches!(s, PotView::Filling(_))))
                } else {
                    Box::new(move |c| key(c) == palette::COUNTER)
                }
            }
            None => {
                let soup_coming = if self.eager_dish {
                    any_pot(&|s| matches!(s, PotView::Ready | PotView::Cooking))
                } else {
                    any_pot(&|s| s == PotView::Ready)
                };
                if soup_coming && !mate_has_dish {
                    Box::new(move |c| key(c) == palette::DISH_STATION)
                } else if any_pot(&|s| matches!(s, PotView::Filling(_))) || pots.is_empty() {
                    Box::new(move |c| key(c) == palette::TOMATO_STATION)
                } else {
                    Box::new(move |c| key(c) == palette::DISH_STATION)
                }
            }
        };

        // Adjacent to a target: face it, then interact.
        let facing = view.facing_of(me);
        for d in SEARCH_ORDERS[self.search_order % 4] {
            if let Some(c) = view.neighbor(me, d) {
                if target(c) {
                    let a = if facing == Some(d) { kitchen::INTERACT } else { kitchen::direction_action(d) };
                    return mix(n, self.epsilon, &[(a, 1.0)]);
                }
            }
        }
        let floor = |c: Cell| key(c) == palette::FLOOR;
        let near_target = |c: Cell| floor(c) && Direction::ALL.iter().any(|&d| view.neighbor(c, d).is_some_and(|nb| target(nb)));
        if let Some((d, _)) = first_step(&view, me, self.search_order, floor, near_target) {
            return mix(n, self.epsilon, &[(kitchen::direction_action(d), 1.0)]);
        }
        // Nothing useful in view: wander, cycling through directions.
        let d = Direction::from_index(((memory.step / 4) % 4) as u8);
        mix(n, self.epsilon.max(0.25), &[(kitchen::direction_action(d), 1.0)])
    }
}

/// Capture the Flag roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CtfRole {
    /// Runs for the enemy flag and carries it home.
    Rusher,
    /// Stays by its own flag and chases enemies that take it.
    Defender,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagPlayer {
    pub role: CtfRole,
    pub epsilon: f64,
    /// Probability of firing at an enemy in the line of fire.
    pub aggression: f64,
    pub wander: f64,
    /// Distance from its own flag a defender tolerates before returning.
    pub guard_radius: usize,
    pub search_order: usize,
    pub left_handed: bool,
}

impl FlagPlayer {
    pub fn act(&self, obs: &Observation) -> ActionDist {
        let n = EnvKind::CaptureTheFlag.num_actions();
        if obs.is_black() {
            return ActionDist::one_hot(n, harvest::NOOP);
        }
        let view = View::new(EnvKind::CaptureTheFlag, obs);
        let me = view.owner;
        let key = |c: Cell| view.key(c);
        let passable = |c: Cell| {
            matches!(key(c), palette::FLOOR | palette::OWN_BASE | palette::ENEMY_BASE | palette::OWN_FLAG | palette::ENEMY_FLAG)
        };
        let carrying = view.badge(me) == palette::ENEMY_FLAG;
        let own_flag_taken = obs.aux_value("own_flag_held_by_enemy").unwrap_or(0.0) > 0.5;

        // Enemy straight ahead before any wall or other player?
        let mut enemy_in_line = false;
        for r in (0..me.0).rev() {
            match key((r, me.1)) {
                palette::OTHER => {
                    enemy_in_line = true;
                    break;
                }
                k if k == palette::WALL || k == palette::TEAMMATE || k == palette::PADDING => break,
                _ => {}
            }
        }

        let toward = |goal: &dyn Fn(Cell) -> bool| first_step(&view, me, self.search_order, passable, goal);
        let step = match self.role {
            CtfRole::Rusher => {
                if carrying {
                    toward(&|c| key(c) == palette::OWN_FLAG).or_else(|| toward(&|c| key(c) == palette::OWN_BASE))
                } else {
                    toward(&|c| key(c) == palette::ENEMY_FLAG)
                }
            }
            CtfRole::Defender => {
                if own_flag_taken || view.all_cells().any(|c| key(c) == palette::OTHER) {
                    toward(&|c| key(c) == palette::OTHER)
                } else {
                    match toward(&|c| key(c) == palette::OWN_FLAG) {
                        Some((_, dist)) if dist <= self.guard_radius => None,
                        other => other.or_else(|| toward(&|c| key(c) == palette::OWN_BASE)),
                    }
                }
            }
        };
        let guarding = self.role == CtfRole::Defender
            && step.is_none()
            && view.all_cells().any(|c| key(c) == palette::OWN_FLAG);
        let weights = match step {
            Some((d, _)) => vec![(oriented_move(d), 1.0)],
            None if guarding => vec![(harvest::TURN_LEFT, 0.5), (harvest::NOOP, 0.5)],
            None => explore_oriented(&view, passable, self.wander, self.left_handed),
        };
        let weights = with_tag(weights, enemy_in_line, self.aggression);
        mix(n, self.epsilon, &weights)
    }
}
