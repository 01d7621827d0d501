//! Built-in sprite atlas and egocentric window rendering.
//!
//! Each cell is drawn as a `size x size` RGB sprite. Every sprite carries a
//! distinct colour at its key pixel `(1, 1)`, which is what scripted policies
//! read back to classify cells; details such as facing markers or held items
//! are drawn elsewhere in the sprite.

use crate::engine::{Direction, GridPos, ObsSpec, Observation};

pub type Rgb = [u8; 3];

pub mod palette {
    use super::Rgb;

    pub const FLOOR: Rgb = [0, 0, 0];
    pub const PADDING: Rgb = [48, 48, 64];
    pub const WALL: Rgb = [128, 128, 128];
    pub const SELF: Rgb = [64, 160, 255];
    pub const OTHER: Rgb = [255, 96, 96];
    pub const TEAMMATE: Rgb = [64, 224, 160];
    pub const MARKER: Rgb = [255, 255, 255];
    pub const APPLE: Rgb = [40, 200, 40];
    pub const BEAM: Rgb = [255, 230, 40];
    pub const COUNTER: Rgb = [150, 100, 60];
    pub const POT: Rgb = [90, 90, 90];
    pub const TOMATO_STATION: Rgb = [200, 40, 40];
    pub const DISH_STATION: Rgb = [220, 220, 220];
    pub const DELIVERY: Rgb = [40, 40, 200];
    pub const TOMATO: Rgb = [255, 60, 40];
    pub const DISH: Rgb = [240, 240, 240];
    pub const SOUP: Rgb = [250, 160, 30];
    pub const PROGRESS: Rgb = [250, 210, 0];
    pub const READY: Rgb = [0, 230, 0];
    pub const OWN_FLAG: Rgb = [0, 120, 255];
    pub const ENEMY_FLAG: Rgb = [255, 40, 200];
    pub const OWN_BASE: Rgb = [20, 40, 90];
    pub const ENEMY_BASE: Rgb = [90, 20, 60];
}

pub const KEY_PIXEL: (usize, usize) = (1, 1);

/// A square RGB sprite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sprite {
    size: usize,
    pixels: Vec<u8>,
}

impl Sprite {
    pub fn solid(size: usize, color: Rgb) -> Self {
        Self { size, pixels: color.repeat(size * size) }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Paints the half-open pixel rectangle `[r0, r1) x [c0, c1)`.
    pub fn fill(mut self, r0: usize, r1: usize, c0: usize, c1: usize, color: Rgb) -> Self {
        for r in r0..r1.min(self.size) {
            for c in c0..c1.min(self.size) {
                let i = (r * self.size + c) * 3;
                self.pixels[i..i + 3].copy_from_slice(&color);
            }
        }
        self
    }

    /// A body inset by one pixel on `bg`.
    pub fn token(size: usize, bg: Rgb, body: Rgb) -> Self {
        Self::solid(size, bg).fill(1, size - 1, 1, size - 1, body)
    }

    /// Adds a facing notch on the edge in `dir` (as seen in the window).
    pub fn with_facing(self, dir: Direction) -> Self {
        let s = self.size;
        let (lo, hi) = (s / 2 - 1, s / 2 + 1);
        match dir {
            Direction::North => self.fill(0, 2, lo, hi, palette::MARKER),
            Direction::South => self.fill(s - 2, s, lo, hi, palette::MARKER),
            Direction::East => self.fill(lo, hi, s - 2, s, palette::MARKER),
            Direction::West => self.fill(lo, hi, 0, 2, palette::MARKER),
        }
    }

    /// Adds a small held-item badge in the lower right corner.
    pub fn with_badge(self, color: Rgb) -> Self {
        let s = self.size;
        self.fill(s - 3, s - 1, s - 3, s - 1, color)
    }
}

/// Copies `sprite` into window cell `(cell_row, cell_col)` of `obs`.
#[inline]
pub fn blit(obs: &mut Observation, cell_row: usize, cell_col: usize, sprite: &Sprite) {
    let s = sprite.size;
    let stride = obs.width * 3;
    let base = cell_row * s * stride + cell_col * s * 3;
    for r in 0..s {
        let dst = base + r * stride;
        obs.pixels[dst..dst + s * 3].copy_from_slice(&sprite.pixels[r * s * 3..(r + 1) * s * 3]);
    }
}

/// How an egocentric window sits relative to its owner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowFrame {
    /// Owner at the centre, north always up.
    Centered,
    /// Rotated so the owner faces up; `ahead` cells in front, `behind`
    /// behind, `side` to each side.
    Oriented { ahead: i32, behind: i32, side: i32 },
}

/// Window geometry: which world cell each window cell shows.
#[derive(Debug, Clone, Copy)]
pub struct Window {
    pub origin: GridPos,
    pub facing: Direction,
    pub frame: WindowFrame,
    pub cells: usize,
}

impl Window {
    /// World coordinates of window cell `(i, j)`, row 0 being the top of the
    /// rendered image.
    #[inline]
    pub fn world(&self, i: usize, j: usize) -> GridPos {
        match self.frame {
            WindowFrame::Centered => {
                let half = (self.cells / 2) as i32;
                self.origin.offset(i as i32 - half, j as i32 - half)
            }
            WindowFrame::Oriented { ahead, side, .. } => {
                let forward = ahead - i as i32;
                let lateral = j as i32 - side;
                let (fr, fc) = self.facing.delta();
                let (rr, rc) = self.facing.turn_right().delta();
                self.origin.offset(fr * forward + rr * lateral, fc * forward + rc * lateral)
            }
        }
    }

    /// Window cell that holds the owner.
    pub fn owner_cell(&self) -> (usize, usize) {
        match self.frame {
            WindowFrame::Centered => (self.cells / 2, self.cells / 2),
            WindowFrame::Oriented { ahead, side, .. } => (ahead as usize, side as usize),
        }
    }

    /// A direction in the world as it appears in the rendered window.
    pub fn relative(&self, world_dir: Direction) -> Direction {
        match self.frame {
            WindowFrame::Centered => world_dir,
            WindowFrame::Oriented { .. } => world_dir.rotate(4 - self.facing as u8),
        }
    }
}

pub const HARVEST_FRAME: WindowFrame = WindowFrame::Oriented { ahead: 9, behind: 1, side: 5 };
pub const CTF_FRAME: WindowFrame = HARVEST_FRAME;

/// Renders all window cells with `tile`, which maps a world cell to a sprite.
pub fn render_window<'a>(obs: &mut Observation, spec: &ObsSpec, window: &Window, mut tile: impl FnMut(GridPos) -> &'a Sprite) {
    for i in 0..spec.window {
        for j in 0..spec.window {
            let sprite = tile(window.world(i, j));
            blit(obs, i, j, sprite);
        }
    }
}

/// Key-pixel colour of window cell `(i, j)`.
#[inline]
pub fn cell_key(obs: &Observation, sprite: usize, i: usize, j: usize) -> Rgb {
    let (kr, kc) = if sprite >= 3 { KEY_PIXEL } else { (0, 0) };
    obs.pixel(i * sprite + kr, j * sprite + kc)
}

/// Colour at pixel `(r, c)` inside window cell `(i, j)`.
#[inline]
pub fn cell_pixel(obs: &Observation, sprite: usize, i: usize, j: usize, r: usize, c: usize) -> Rgb {
    obs.pixel(i * sprite + r, j * sprite + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oriented_window_north_spans_nine_ahead_one_behind() {
        let w = Window { origin: GridPos::new(17, 17), facing: Direction::North, frame: HARVEST_FRAME, cells: 11 };
        assert_eq!(w.world(0, 5), GridPos::new(8, 17));
        assert_eq!(w.world(10, 5), GridPos::new(18, 17));
        assert_eq!(w.world(9, 0), GridPos::new(17, 12));
        assert_eq!(w.world(9, 10), GridPos::new(17, 22));
        assert_eq!(w.owner_cell(), (9, 5));
    }

    #[test]
    fn oriented_window_east() {
        let w = Window { origin: GridPos::new(5, 5), facing: Direction::East, frame: HARVEST_FRAME, cells: 11 };
        // Top-centre is nine cells east; right side of the image is south.
        assert_eq!(w.world(0, 5), GridPos::new(5, 14));
        assert_eq!(w.world(9, 10), GridPos::new(10, 5));
        assert_eq!(w.relative(Direction::East), Direction::North);
        assert_eq!(w.relative(Direction::South), Direction::East);
    }

    #[test]
    fn centered_window() {
        let w = Window { origin: GridPos::new(5, 5), facing: Direction::South, frame: WindowFrame::Centered, cells: 11 };
        assert_eq!(w.world(0, 0), GridPos::new(0, 0));
        assert_eq!(w.world(10, 10), GridPos::new(10, 10));
        assert_eq!(w.owner_cell(), (5, 5));
    }

    #[test]
    fn sprite_key_pixel_survives_markers() {
        let base = Sprite::token(8, palette::FLOOR, palette::SELF);
        for d in Direction::ALL {
            let s = base.clone().with_facing(d).with_badge(palette::TOMATO);
            assert_eq!(&s.pixels()[(8 + 1) * 3..(8 + 1) * 3 + 3], &palette::SELF);
        }
    }
}
