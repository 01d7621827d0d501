use serde::{Deserialize, Serialize};

use crate::anova::{mean, GroupedSamples};
use crate::error::{domain, Result};
use crate::range::studentized_range_sf;

/// One Tukey–Kramer comparison between groups `a` and `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseComparison {
    pub a: String,
    pub b: String,
    /// `mean(a) − mean(b)`.
    pub mean_diff: f64,
    pub q: f64,
    pub p_adj: f64,
    /// Set when the pooled variance is zero; `p_adj` is then 0 for a nonzero
    /// difference and 1 otherwise.
    pub degenerate: bool,
}

/// Tukey's honestly significant difference test for every unordered pair
/// `(i, j)` with `i < j`, in lexicographic order. Unequal group sizes use
/// the Tukey–Kramer standard error.
pub fn tukey_hsd(samples: &GroupedSamples) -> Result<Vec<PairwiseComparison>> {
    samples.validate()?;
    let k = samples.groups.len();
    let df = (samples.total() - k) as f64;
    let mse = samples.ss_within() / df;
    let means: Vec<f64> = samples.groups.iter().map(|g| mean(g)).collect();
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let diff = means[i] - means[j];
            let (ni, nj) = (samples.groups[i].len() as f64, samples.groups[j].len() as f64);
            let se = (0.5 * mse * (1.0 / ni + 1.0 / nj)).sqrt();
            let (q, p_adj, degenerate) = if se == 0.0 {
                if diff == 0.0 {
                    (0.0, 1.0, true)
                } else {
                    (f64::INFINITY, 0.0, true)
                }
            } else {
                let q = diff.abs() / se;
                (q, studentized_range_sf(q, k, df)?, false)
            };
            if p_adj.is_nan() {
                return Err(domain("studentized range evaluation failed"));
            }
            out.push(PairwiseComparison {
                a: samples.labels[i].clone(),
                b: samples.labels[j].clone(),
                mean_diff: diff,
                q,
                p_adj,
                degenerate,
            });
        }
    }
    Ok(out)
}
