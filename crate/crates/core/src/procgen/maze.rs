use rand::seq::SliceRandom;

use super::{GenSeed, GridMask};
use crate::engine::{Direction, GridPos};
use crate::rng::{self, stream, SimRng};

const MAZE_STREAM: u64 = 0x4d41_5a45;

/// Fills the open cells of `region` with a perfect maze.
///
/// Maze nodes sit on the lattice anchored at the first open cell of the
/// region (row-major); corridors join nodes two cells apart through an
/// open-able middle cell. Every carved cell is reachable from every other
/// carved cell of the same region component. A fully walled region gives
/// an all-wall result.
pub fn backtracking_maze(region: &GridMask, seed: GenSeed) -> GridMask {
    let mut rng = rng::rng_for(seed.0, &[stream::GENERATOR, MAZE_STREAM]);
    let base = GridMask::walled(region.height(), region.width());
    match region.open_cells().next() {
        None => base,
        Some(start) => carve_maze(&base, region, (start.row & 1, start.col & 1), &mut rng),
    }
}

/// Recursive-backtracker carving over the lattice with the given parity.
///
/// Cells already open in `base` (pre-placed rooms) stay open and act as
/// ordinary maze nodes, so the corridors connect every room reached.
pub fn carve_maze(base: &GridMask, region: &GridMask, parity: (i32, i32), rng: &mut SimRng) -> GridMask {
    let mut out = base.clone();
    let w = region.width();
    let is_node = |p: GridPos| {
        region.is_open(p) && p.row.rem_euclid(2) == parity.0 && p.col.rem_euclid(2) == parity.1
    };
    let mut visited = vec![false; region.len()];
    let mut stack = Vec::new();
    let mut dirs = Direction::ALL;

    for root in region.cells().filter(|&p| is_node(p)) {
        if visited[root.index(w)] {
            continue;
        }
        visited[root.index(w)] = true;
        out.set(root, true);
        stack.push(root);
        while let Some(&cur) = stack.last() {
            dirs.shuffle(rng);
            let next = dirs.iter().find_map(|&d| {
                let mid = cur.step(d);
                let nb = mid.step(d);
                (is_node(nb) && region.is_open(mid) && !visited[nb.index(w)]).then_some((mid, nb))
            });
            match next {
                Some((mid, nb)) => {
                    visited[nb.index(w)] = true;
                    out.set(mid, true);
                    out.set(nb, true);
                    stack.push(nb);
                }
                None => {
                    stack.pop();
                }
            }
        }
    }
    out
}

/// Walls off open cells with exactly one open neighbour until none remain.
pub fn remove_deadends(grid: &GridMask) -> GridMask {
    let mut out = grid.clone();
    let mut queue: Vec<GridPos> = out.open_cells().filter(|&p| out.open_degree(p) == 1).collect();
    while let Some(p) = queue.pop() {
        if !out.is_open(p) || out.open_degree(p) != 1 {
            continue;
        }
        let nb = out.open_neighbors(p).next().unwrap();
        out.set(p, false);
        if out.open_degree(nb) == 1 {
            queue.push(nb);
        }
    }
    out
}

/// Removes deadends and horseshoes, iterating to a fixed point.
///
/// A horseshoe is a U-shaped pocket of three open cells wrapped around a
/// single wall cell: a straight middle cell whose two neighbours each turn
/// the same way towards the legs. It is removed when walling the middle cell
/// and then pruning the resulting deadends stays inside the U's 2x3 window
/// and leaves the remaining cells connected, i.e. the U was a detour next
/// to a through corridor. Closed loops are never collapsed.
pub fn remove_deadends_and_horseshoes(grid: &GridMask) -> GridMask {
    let mut out = remove_deadends(grid);
    while let Some(next) = remove_one_horseshoe(&out) {
        out = next;
    }
    out
}

fn remove_one_horseshoe(grid: &GridMask) -> Option<GridMask> {
    for m in grid.open_cells() {
        if grid.open_degree(m) != 2 {
            continue;
        }
        for axis in [Direction::East, Direction::South] {
            let a = m.step(axis);
            let b = m.step(axis.opposite());
            if !grid.is_open(a) || !grid.is_open(b) {
                continue;
            }
            for bend in [axis.turn_left(), axis.turn_right()] {
                let enclosed = m.step(bend);
                let (leg_a, leg_b) = (a.step(bend), b.step(bend));
                let is_u = !grid.is_open(enclosed)
                    && grid.is_open(leg_a)
                    && grid.is_open(leg_b)
                    && grid.open_degree(a) == 2
                    && grid.open_degree(b) == 2;
                if !is_u {
                    continue;
                }
                let window = [m, a, b, leg_a, leg_b];
                let mut trial = grid.clone();
                trial.set(m, false);
                let trial = remove_deadends(&trial);
                let removed_outside_window = grid
                    .open_cells()
                    .any(|p| !trial.is_open(p) && !window.contains(&p));
                if !removed_outside_window && trial.count_open() > 0 && trial.is_connected() {
                    return Some(trial);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procgen::{bfs_distances, reachable};

    #[test]
    fn single_cell_region_is_unchanged() {
        let region = GridMask::open(1, 1);
        assert_eq!(backtracking_maze(&region, GenSeed(3)), region);
    }

    #[test]
    fn walled_region_gives_empty_maze() {
        let region = GridMask::walled(5, 5);
        assert_eq!(backtracking_maze(&region, GenSeed(3)).count_open(), 0);
    }

    #[test]
    fn seven_by_seven_maze_is_connected() {
        for seed in 0..20 {
            let maze = backtracking_maze(&GridMask::open(7, 7), GenSeed(seed));
            let start = maze.open_cells().next().unwrap();
            let reached = bfs_distances(&maze, start).iter().filter(|d| d.is_some()).count();
            assert_eq!(reached, maze.count_open(), "seed {seed}");
            // A perfect maze on a 4x4 node lattice carves 16 nodes + 15 links.
            assert_eq!(maze.count_open(), 31);
        }
    }

    #[test]
    fn maze_is_deterministic() {
        let region = GridMask::open(9, 13);
        assert_eq!(backtracking_maze(&region, GenSeed(11)), backtracking_maze(&region, GenSeed(11)));
    }

    #[test]
    fn rooms_stay_open_and_connected() {
        let mut base = GridMask::walled(11, 11);
        for r in 1..4 {
            for c in 1..4 {
                base.set(GridPos::new(r, c), true);
            }
        }
        let mut region = GridMask::walled(11, 11);
        for r in 1..10 {
            for c in 1..10 {
                region.set(GridPos::new(r, c), true);
            }
        }
        let mut rng = rng::rng_for(5, &[]);
        let out = carve_maze(&base, &region, (1, 1), &mut rng);
        assert!(base.open_cells().all(|p| out.is_open(p)));
        assert!(out.is_connected());
    }

    #[test]
    fn stub_is_walled_off() {
        // A loop with a one-cell stub hanging off its top.
        let g = GridMask::from_rows(&["#####.###", "#.......#", "#.#####.#", "#.......#", "#########"]);
        let out = remove_deadends_and_horseshoes(&g);
        assert!(!out.is_open(GridPos::new(0, 5)));
        assert!(out.open_cells().all(|p| out.open_degree(p) != 1));
        assert_eq!(out.count_open(), g.count_open() - 1);
    }

    #[test]
    fn loop_only_maze_is_unchanged() {
        let g = GridMask::from_rows(&["#####", "#...#", "#.#.#", "#...#", "#####"]);
        assert_eq!(remove_deadends_and_horseshoes(&g), g);
        let big = GridMask::from_rows(&["#######", "#.....#", "#.###.#", "#.....#", "#######"]);
        assert_eq!(remove_deadends_and_horseshoes(&big), big);
    }

    #[test]
    fn open_room_is_unchanged() {
        let g = GridMask::open(2, 2);
        assert_eq!(remove_deadends_and_horseshoes(&g), g);
    }

    #[test]
    fn horseshoe_beside_corridor_is_removed() {
        // A U over a straight corridor that continues into a loop both ways.
        let g = GridMask::from_rows(&[
            "#########",
            "###...###",
            "###.#.###",
            "#.......#",
            "#.#####.#",
            "#.......#",
            "#########",
        ]);
        let out = remove_deadends_and_horseshoes(&g);
        for p in [(1, 3), (1, 4), (1, 5), (2, 3), (2, 5)] {
            assert!(!out.is_open(GridPos::new(p.0, p.1)), "{p:?} should be walled");
        }
        assert!(out.is_connected());
        assert!(out.open_cells().all(|p| out.open_degree(p) != 1));
        assert_eq!(reachable(&out, GridPos::new(3, 1)).unwrap().len(), out.count_open());
    }
}
