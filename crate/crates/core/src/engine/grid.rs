use serde::{Deserialize, Serialize};

/// A cell coordinate. Row grows southwards, column eastwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridPos {
    pub row: i32,
    pub col: i32,
}

impl GridPos {
    pub const fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }

    #[inline]
    pub fn offset(self, dr: i32, dc: i32) -> Self {
        Self { row: self.row + dr, col: self.col + dc }
    }

    #[inline]
    pub fn step(self, dir: Direction) -> Self {
        let (dr, dc) = dir.delta();
        self.offset(dr, dc)
    }

    pub fn manhattan(self, other: Self) -> i32 {
        (self.row - other.row).abs() + (self.col - other.col).abs()
    }

    pub fn euclidean(self, other: Self) -> f64 {
        let dr = f64::from(self.row - other.row);
        let dc = f64::from(self.col - other.col);
        (dr * dr + dc * dc).sqrt()
    }

    /// The image under a 180 degree rotation of a `height x width` grid.
    pub fn rotate180(self, height: usize, width: usize) -> Self {
        Self { row: height as i32 - 1 - self.row, col: width as i32 - 1 - self.col }
    }

    #[inline]
    pub fn in_bounds(self, height: usize, width: usize) -> bool {
        self.row >= 0 && self.col >= 0 && (self.row as usize) < height && (self.col as usize) < width
    }

    #[inline]
    pub fn index(self, width: usize) -> usize {
        self.row as usize * width + self.col as usize
    }

    pub fn from_index(index: usize, width: usize) -> Self {
        Self { row: (index / width) as i32, col: (index % width) as i32 }
    }
}

impl std::fmt::Display for GridPos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.row, self.col)
    }
}

/// Cardinal facing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::East, Direction::South, Direction::West];

    #[inline]
    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::North => (-1, 0),
            Direction::East => (0, 1),
            Direction::South => (1, 0),
            Direction::West => (0, -1),
        }
    }

    pub fn from_index(i: u8) -> Self {
        Self::ALL[(i & 3) as usize]
    }

    /// Rotates clockwise by `quarter_turns`.
    #[inline]
    pub fn rotate(self, quarter_turns: u8) -> Self {
        Self::from_index(self as u8 + quarter_turns)
    }

    pub fn turn_left(self) -> Self {
        self.rotate(3)
    }

    pub fn turn_right(self) -> Self {
        self.rotate(1)
    }

    pub fn opposite(self) -> Self {
        self.rotate(2)
    }
}
