use std::hash::{Hash, Hasher};

use crate::rng::Digest;

/// Pixel dimensions and auxiliary channel names an environment emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObsSpec {
    pub height: usize,
    pub width: usize,
    /// Cells per side of the egocentric window.
    pub window: usize,
    /// Sprite side length in pixels.
    pub sprite: usize,
    pub aux: &'static [&'static str],
}

impl ObsSpec {
    pub fn pixel_len(&self) -> usize {
        self.height * self.width * 3
    }
}

/// One player's view: an RGB image (row-major, 3 bytes per pixel) plus
/// named scalar channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<u8>,
    pub aux: Vec<(&'static str, f32)>,
}

impl Observation {
    pub fn blank(spec: &ObsSpec) -> Self {
        Self {
            height: spec.height,
            width: spec.width,
            pixels: vec![0; spec.pixel_len()],
            aux: spec.aux.iter().map(|&name| (name, 0.0)).collect(),
        }
    }

    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let i = (row * self.width + col) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn aux_value(&self, name: &str) -> Option<f32> {
        self.aux.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }

    pub fn matches(&self, spec: &ObsSpec) -> bool {
        self.height == spec.height
            && self.width == spec.width
            && self.pixels.len() == spec.pixel_len()
            && self.aux.len() == spec.aux.len()
            && self.aux.iter().zip(spec.aux).all(|((a, _), b)| a == b)
    }

    pub fn is_black(&self) -> bool {
        self.pixels.iter().all(|&p| p == 0)
    }

    pub fn digest(&self) -> u64 {
        let mut d = Digest::new();
        self.hash(&mut d);
        d.finish()
    }
}

impl Hash for Observation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.height.hash(state);
        self.width.hash(state);
        state.write(&self.pixels);
        for (name, v) in &self.aux {
            name.hash(state);
            v.to_bits().hash(state);
        }
    }
}
