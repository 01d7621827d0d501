use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{domain, Result};

/// Samples grouped by condition, with one label per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedSamples {
    pub labels: Vec<String>,
    pub groups: Vec<Vec<f64>>,
}

impl GroupedSamples {
    /// At least two groups of at least two finite values each.
    pub fn new(labels: Vec<String>, groups: Vec<Vec<f64>>) -> Result<Self> {
        let s = Self { labels, groups };
        s.validate()?;
        Ok(s)
    }

    /// Groups labelled `g0, g1, …`.
    pub fn unlabelled(groups: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..groups.len()).map(|i| format!("g{i}")).collect();
        Self::new(labels, groups)
    }

    pub fn validate(&self) -> Result<()> {
        if self.groups.len() < 2 {
            return Err(domain(format!("need at least 2 groups, got {}", self.groups.len())));
        }
        if self.labels.len() != self.groups.len() {
            return Err(domain(format!("{} labels for {} groups", self.labels.len(), self.groups.len())));
        }
        for (label, g) in self.labels.iter().zip(&self.groups) {
            if g.len() < 2 {
                return Err(domain(format!("group {label} has {} samples, need at least 2", g.len())));
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(domain(format!("group {label} contains a non-finite value")));
            }
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn means(&self) -> Vec<f64> {
        self.groups.iter().map(|g| mean(g)).collect()
    }

    /// Pooled within-group sum of squares.
    pub(crate) fn ss_within(&self) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let m = mean(g);
                g.iter().map(|x| (x - m).powi(2)).sum::<f64>()
            })
            .sum()
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p: f64,
    pub ss_between: f64,
    pub ss_within: f64,
    /// Set when every group is constant but the group means differ: `F` is
    /// infinite and `p` is reported as 0.
    pub degenerate: bool,
}

/// One-way analysis of variance with the upper-tail `F` p-value.
pub fn one_way_anova(samples: &GroupedSamples) -> Result<AnovaResult> {
    samples.validate()?;
    let k = samples.groups.len();
    let n = samples.total();
    let grand = samples.groups.iter().flatten().sum::<f64>() / n as f64;
    let ss_between: f64 = samples.groups.iter().map(|g| g.len() as f64 * (mean(g) - grand).powi(2)).sum();
    let ss_within = samples.ss_within();
    let (df_between, df_within) = (k - 1, n - k);

    if ss_within == 0.0 {
        if ss_between == 0.0 {
            return Err(domain("all values are identical; F is undefined"));
        }
        return Ok(AnovaResult {
            f: f64::INFINITY,
            df_between,
            df_within,
            p: 0.0,
            ss_between,
            ss_within,
            degenerate: true,
        });
    }
    let f = (ss_between / df_between as f64) / (ss_within / df_within as f64);
    let dist = FisherSnedecor::new(df_between as f64, df_within as f64).map_err(|e| domain(e.to_string()))?;
    let p = dist.sf(f).clamp(0.0, 1.0);
    Ok(AnovaResult { f, df_between, df_within, p, ss_between, ss_within, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_example() {
        let s = GroupedSamples::unlabelled(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let r = one_way_anova(&s).unwrap();
        assert_eq!(r.f, 13.5);
        assert_eq!((r.df_between, r.df_within), (1, 4));
        assert!((r.p - 0.021_311_641_128_756_72).abs() < 1e-9, "{}", r.p);
    }

    #[test]
    fn equal_means_give_zero_f() {
        let s = GroupedSamples::unlabelled(vec![vec![4.0, 6.0], vec![0.0, 10.0]]).unwrap();
        let r = one_way_anova(&s).unwrap();
        assert_eq!(r.f, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn degenerate_cases() {
        let s = GroupedSamples::unlabelled(vec![vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let r = one_way_anova(&s).unwrap();
        assert!(r.degenerate && r.p == 0.0 && r.f.is_infinite());
        let same = GroupedSamples::unlabelled(vec![vec![3.0, 3.0], vec![3.0, 3.0]]).unwrap();
        assert!(one_way_anova(&same).is_err());
        assert!(GroupedSamples::unlabelled(vec![vec![1.0, 2.0]]).is_err());
        assert!(GroupedSamples::unlabelled(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
