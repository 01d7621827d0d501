use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{domain, Result};

/// Sample size, mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

pub fn describe(xs: &[f64]) -> Result<Summary> {
    if xs.len() < 2 {
        return Err(domain(format!("need at least 2 samples, got {}", xs.len())));
    }
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(Summary { n, mean, sd: var.sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub n: usize,
}

/// Two-sided Student-t interval for the mean at confidence `level`.
pub fn t_confidence_interval(xs: &[f64], level: f64) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(domain(format!("confidence level {level} outside (0, 1)")));
    }
    let s = describe(xs)?;
    let t = StudentsT::new(0.0, 1.0, (s.n - 1) as f64).map_err(|e| domain(e.to_string()))?;
    let half = t.inverse_cdf(0.5 + 0.5 * level) * s.sd / (s.n as f64).sqrt();
    Ok(ConfidenceInterval { mean: s.mean, lower: s.mean - half, upper: s.mean + half, level, n: s.n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_and_interval() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        let s = describe(&xs).unwrap();
        assert_eq!(s.mean, 5.0);
        assert!((s.sd - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        let ci = t_confidence_interval(&xs, 0.95).unwrap();
        // t_{0.975, 7} = 2.3646242515927844
        let half = 2.364_624_251_592_784_4 * s.sd / 8f64.sqrt();
        assert!((ci.upper - 5.0 - half).abs() < 1e-8);
        assert!((ci.mean - ci.lower - half).abs() < 1e-8);
        assert!(t_confidence_interval(&xs, 1.0).is_err());
    }
}
