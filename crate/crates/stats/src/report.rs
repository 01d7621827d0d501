//! Text renderings of test results: aligned tables for reading and
//! tab-separated rows for machines.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::anova::AnovaResult;
use crate::tukey::PairwiseComparison;

/// Machine-readable comparison row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub pair: String,
    pub diff: f64,
    pub p_adj: f64,
}

pub fn comparison_rows(comparisons: &[PairwiseComparison]) -> Vec<ComparisonRow> {
    comparisons
        .iter()
        .map(|c| ComparisonRow { pair: format!("{}-{}", c.a, c.b), diff: c.mean_diff, p_adj: c.p_adj })
        .collect()
}

/// `F(df1,df2) = …, p = …` on one line.
pub fn anova_table(label: &str, r: &AnovaResult) -> String {
    let flag = if r.degenerate { " (degenerate: zero within-group variance)" } else { "" };
    format!("{label}: F({}, {}) = {:.4}, p = {:.6e}{flag}\n", r.df_between, r.df_within, r.f, r.p)
}

/// Aligned table with columns `a`, `b`, mean difference and adjusted p.
pub fn comparison_table(comparisons: &[PairwiseComparison]) -> String {
    let wa = comparisons.iter().map(|c| c.a.len()).max().unwrap_or(0).max(1);
    let wb = comparisons.iter().map(|c| c.b.len()).max().unwrap_or(0).max(1);
    let mut out = format!("{:<wa$}  {:<wb$}  {:>14}  {:>12}\n", "a", "b", "mean_diff", "p_adj");
    for c in comparisons {
        let _ = writeln!(out, "{:<wa$}  {:<wb$}  {:>14.4}  {:>12.6}", c.a, c.b, c.mean_diff, c.p_adj);
    }
    out
}
