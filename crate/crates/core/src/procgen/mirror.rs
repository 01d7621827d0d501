use serde::{Deserialize, Serialize};

use super::GridMask;
use crate::engine::GridPos;
use crate::error::{Error, Result};

/// One team's fixtures: flag home cell and spawn points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TeamSite {
    pub flag: GridPos,
    pub spawns: Vec<GridPos>,
}

impl TeamSite {
    pub fn rotate180(&self, height: usize, width: usize) -> Self {
        Self {
            flag: self.flag.rotate180(height, width),
            spawns: self.spawns.iter().map(|s| s.rotate180(height, width)).collect(),
        }
    }
}

/// The left half of a level (columns `0..=full_width / 2`) with the red
/// team's fixtures placed strictly left of the centre column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfLayout {
    pub grid: GridMask,
    pub full_width: usize,
    pub red: TeamSite,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MirroredLayout {
    pub grid: GridMask,
    pub red: TeamSite,
    pub blue: TeamSite,
}

impl MirroredLayout {
    /// Rotates the layout 180 degrees and swaps the team colours.
    pub fn rotated_color_swap(&self) -> Self {
        let (h, w) = (self.grid.height(), self.grid.width());
        let mut grid = GridMask::walled(h, w);
        for p in self.grid.cells() {
            grid.set(p.rotate180(h, w), self.grid.is_open(p));
        }
        Self { grid, red: self.blue.rotate180(h, w), blue: self.red.rotate180(h, w) }
    }

    pub fn left_half(&self) -> HalfLayout {
        let (h, w) = (self.grid.height(), self.grid.width());
        let half_w = w / 2 + 1;
        let mut grid = GridMask::walled(h, half_w);
        for p in grid.cells().collect::<Vec<_>>() {
            grid.set(p, self.grid.is_open(p));
        }
        HalfLayout { grid, full_width: w, red: self.red.clone() }
    }
}

/// Concatenates a left half with its 180 degree rotation.
///
/// Column `c > full_width / 2` takes the rotated image of column
/// `full_width - 1 - c`; the shared centre column is the union of itself and
/// its vertical flip so it is symmetric too. The blue team's fixtures are the
/// rotated images of the red team's, in the same order.
pub fn mirror180_concat(half: &HalfLayout) -> Result<MirroredLayout> {
    let w = half.full_width;
    let h = half.grid.height();
    if w % 2 == 0 || half.grid.width() != w / 2 + 1 {
        return Err(Error::domain(format!(
            "half of width {} cannot form an odd-width level of {w}",
            half.grid.width()
        )));
    }
    let mid = (w / 2) as i32;
    let fixtures = std::iter::once(&half.red.flag).chain(&half.red.spawns);
    if let Some(p) = fixtures.clone().find(|p| p.col >= mid || !half.grid.contains(**p)) {
        return Err(Error::domain(format!("red fixture {p} is not strictly left of the centre column")));
    }

    let mut grid = GridMask::walled(h, w);
    for p in grid.cells().collect::<Vec<_>>() {
        let open = if p.col < mid {
            half.grid.is_open(p)
        } else if p.col == mid {
            half.grid.is_open(p) || half.grid.is_open(p.rotate180(h, w))
        } else {
            half.grid.is_open(p.rotate180(h, w))
        };
        grid.set(p, open);
    }
    Ok(MirroredLayout { grid, red: half.red.clone(), blue: half.red.rotate180(h, w) })
}
