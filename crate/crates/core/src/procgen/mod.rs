//! Generator machinery shared by the four level generators: occupancy
//! masks, 4-connected reachability, maze carving, deadend pruning and
//! 180 degree symmetrization.

mod maze;
mod mirror;

pub use maze::{backtracking_maze, carve_maze, remove_deadends, remove_deadends_and_horseshoes};
pub use mirror::{mirror180_concat, HalfLayout, MirroredLayout, TeamSite};

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::engine::{Direction, GridPos};
use crate::error::{Error, Result};
use crate::rng::{self, stream, SimRng};

/// Rejection sampling cap shared by all generators.
pub const DEFAULT_RETRY_CAP: u32 = 10_000;

/// Seed for one generator run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSeed(pub u64);

/// Open/wall occupancy of a `height x width` grid. Out-of-bounds reads as wall.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridMask {
    width: usize,
    height: usize,
    open: Vec<bool>,
}

impl GridMask {
    pub fn walled(height: usize, width: usize) -> Self {
        Self { width, height, open: vec![false; width * height] }
    }

    pub fn open(height: usize, width: usize) -> Self {
        Self { width, height, open: vec![true; width * height] }
    }

    /// Builds a mask from rows of `'.'` (open) and anything else (wall).
    pub fn from_rows(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut m = Self::walled(height, width);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), width, "ragged mask rows");
            for (c, ch) in row.chars().enumerate() {
                m.open[r * width + c] = ch == '.';
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<String> {
        (0..self.height)
            .map(|r| (0..self.width).map(|c| if self.open[r * self.width + c] { '.' } else { '#' }).collect())
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    #[inline]
    pub fn contains(&self, p: GridPos) -> bool {
        p.in_bounds(self.height, self.width)
    }

    #[inline]
    pub fn is_open(&self, p: GridPos) -> bool {
        self.contains(p) && self.open[p.index(self.width)]
    }

    pub fn set(&mut self, p: GridPos, open: bool) {
        assert!(self.contains(p), "{p} outside {}x{}", self.height, self.width);
        self.open[p.index(self.width)] = open;
    }

    pub fn cells(&self) -> impl Iterator<Item = GridPos> + '_ {
        let w = self.width;
        (0..self.open.len()).map(move |i| GridPos::from_index(i, w))
    }

    pub fn open_cells(&self) -> impl Iterator<Item = GridPos> + '_ {
        self.cells().filter(|&p| self.is_open(p))
    }

    pub fn count_open(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    pub fn open_neighbors(&self, p: GridPos) -> impl Iterator<Item = GridPos> + '_ {
        Direction::ALL.into_iter().map(move |d| p.step(d)).filter(|&q| self.is_open(q))
    }

    pub fn open_degree(&self, p: GridPos) -> usize {
        self.open_neighbors(p).count()
    }

    /// Equal under a 180 degree rotation of the grid.
    pub fn is_rotation_symmetric(&self) -> bool {
        self.cells().all(|p| self.is_open(p) == self.is_open(p.rotate180(self.height, self.width)))
    }

    /// True when all open cells form one 4-connected component (or none).
    pub fn is_connected(&self) -> bool {
        match self.open_cells().next() {
            None => true,
            Some(start) => {
                let reached = bfs_distances(self, start).iter().filter(|d| d.is_some()).count();
                reached == self.count_open()
            }
        }
    }
}

/// BFS step distances from `from` over open cells, indexed like the mask.
/// A walled `from` yields all `None`.
pub fn bfs_distances(grid: &GridMask, from: GridPos) -> Vec<Option<u32>> {
    let mut dist = vec![None; grid.len()];
    if !grid.is_open(from) {
        return dist;
    }
    let mut queue = VecDeque::new();
    dist[from.index(grid.width)] = Some(0);
    queue.push_back(from);
    while let Some(p) = queue.pop_front() {
        let d = dist[p.index(grid.width)].unwrap();
        for q in grid.open_neighbors(p) {
            let slot = &mut dist[q.index(grid.width)];
            if slot.is_none() {
                *slot = Some(d + 1);
                queue.push_back(q);
            }
        }
    }
    dist
}

/// Shortest path length between two open cells, if connected.
pub fn path_distance(grid: &GridMask, from: GridPos, to: GridPos) -> Option<u32> {
    if !grid.is_open(to) {
        return None;
    }
    bfs_distances(grid, from)[to.index(grid.width)]
}

/// Exact 4-connected closure of `from`.
pub fn reachable(grid: &GridMask, from: GridPos) -> Result<BTreeSet<GridPos>> {
    if !grid.is_open(from) {
        return Err(Error::domain(format!("reachability source {from} is not an open cell")));
    }
    let w = grid.width;
    Ok(bfs_distances(grid, from)
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_some())
        .map(|(i, _)| GridPos::from_index(i, w))
        .collect())
}

/// Runs `attempt` with generators derived from `(seed, attempt index)` until
/// it produces a value, up to `cap` attempts.
pub fn generate_with_retries<T>(
    env: &'static str,
    seed: GenSeed,
    cap: u32,
    mut attempt: impl FnMut(&mut SimRng) -> Option<T>,
) -> Result<T> {
    for i in 0..cap {
        let mut rng = rng::rng_for(seed.0, &[stream::GENERATOR, u64::from(i)]);
        if let Some(v) = attempt(&mut rng) {
            return Ok(v);
        }
    }
    Err(Error::Generation { env, attempts: cap })
}
