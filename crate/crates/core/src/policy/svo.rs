use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Social value orientation: a target reward angle in degrees, 0 (selfish)
/// to 90 (fully prosocial).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvoParams {
    pub theta_degrees: f64,
}

impl SvoParams {
    pub fn new(theta_degrees: f64) -> Result<Self> {
        if !(0.0..=90.0).contains(&theta_degrees) {
            return Err(Error::domain(format!("reward angle {theta_degrees} outside [0, 90]")));
        }
        Ok(Self { theta_degrees })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvoPreset {
    Identical,
    Heterogeneous,
}

/// Reward-angle projection `own * cos(theta) + mean_others * sin(theta)`.
///
/// This is the conventional SVO utility; swap it out if a different
/// functional form is needed.
pub fn svo_utility(own_reward: f64, mean_others_reward: f64, params: SvoParams) -> f64 {
    let theta = params.theta_degrees.to_radians();
    // Snap the axis angles so 0 and 90 degrees reduce exactly.
    let (sin, cos) = match params.theta_degrees {
        t if t == 0.0 => (0.0, 1.0),
        t if t == 90.0 => (1.0, 0.0),
        _ => theta.sin_cos(),
    };
    own_reward * cos + mean_others_reward * sin
}

/// Angle sets for four-member SVO populations.
pub fn svo_population_presets(kind: SvoPreset, population_size: usize) -> Result<Vec<SvoParams>> {
    if population_size != 4 {
        return Err(Error::domain(format!("SVO presets are defined for 4 members, not {population_size}")));
    }
    let angles: [f64; 4] = match kind {
        SvoPreset::Identical => [45.0; 4],
        SvoPreset::Heterogeneous => [0.0, 30.0, 60.0, 90.0],
    };
    Ok(angles.iter().map(|&t| SvoParams { theta_degrees: t }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn utility_examples() {
        assert_eq!(svo_utility(5.0, 99.0, SvoParams::new(0.0).unwrap()), 5.0);
        assert_eq!(svo_utility(99.0, 5.0, SvoParams::new(90.0).unwrap()), 5.0);
        let u = svo_utility(1.0, 1.0, SvoParams::new(45.0).unwrap());
        assert!((u - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn presets() {
        let same = svo_population_presets(SvoPreset::Identical, 4).unwrap();
        assert!(same.iter().all(|p| p.theta_degrees == 45.0));
        let het = svo_population_presets(SvoPreset::Heterogeneous, 4).unwrap();
        let angles: Vec<f64> = het.iter().map(|p| p.theta_degrees).collect();
        assert_eq!(angles, vec![0.0, 30.0, 60.0, 90.0]);
        assert!(svo_population_presets(SvoPreset::Identical, 3).is_err());
    }

    #[test]
    fn angle_range_checked() {
        assert!(SvoParams::new(-1.0).is_err());
        assert!(SvoParams::new(90.5).is_err());
    }
}
