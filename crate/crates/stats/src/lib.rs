//! Statistics for comparing populations across experimental conditions:
//! one-way ANOVA, Holm–Bonferroni step-down correction, Tukey HSD pairwise
//! comparisons and t-based confidence intervals.

mod anova;
mod ci;
mod error;
mod holm;
mod quad;
mod range;
mod report;
mod tukey;

pub use anova::{one_way_anova, AnovaResult, GroupedSamples};
pub use ci::{describe, t_confidence_interval, ConfidenceInterval, Summary};
pub use error::{Result, StatsError};
pub use holm::holm_bonferroni;
pub use quad::integrate;
pub use range::{range_cdf_normal, studentized_range_cdf, studentized_range_sf};
pub use report::{anova_table, comparison_rows, comparison_table, ComparisonRow};
pub use tukey::{tukey_hsd, PairwiseComparison};
