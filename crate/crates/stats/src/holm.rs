use crate::error::{domain, Result};

/// Holm–Bonferroni step-down adjustment.
///
/// With the p-values sorted ascending, the `i`-th (1-based) adjusted value
/// is `min(1, max_{j<=i} (m − j + 1)·p_(j))`. Results are returned in input
/// order; tied inputs receive equal adjusted values.
pub fn holm_bonferroni(p_values: &[f64]) -> Result<Vec<f64>> {
    if let Some(p) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(domain(format!("p-value {p} outside [0, 1]")));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]).then(a.cmp(&b)));
    let mut adjusted = vec![0.0; m];
    let mut running: f64 = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        running = running.max((m - rank) as f64 * p_values[i]);
        adjusted[i] = running.min(1.0);
    }
    Ok(adjusted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_examples() {
        assert_eq!(holm_bonferroni(&[0.01, 0.04, 0.03]).unwrap(), vec![0.03, 0.06, 0.06]);
        assert_eq!(holm_bonferroni(&[0.05]).unwrap(), vec![0.05]);
        assert_eq!(holm_bonferroni(&[0.5, 0.9]).unwrap(), vec![1.0, 1.0]);
        assert!(holm_bonferroni(&[]).unwrap().is_empty());
        assert!(holm_bonferroni(&[1.2]).is_err());
    }

    proptest! {
        #[test]
        fn dominates_input_and_commutes_with_permutation(
            ps in prop::collection::vec(0.0f64..=1.0, 1..12),
            rot in 0usize..12,
        ) {
            let adj = holm_bonferroni(&ps).unwrap();
            for (a, p) in adj.iter().zip(&ps) {
                prop_assert!(*a >= *p && *a <= 1.0);
            }
            let mut rotated = ps.clone();
            rotated.rotate_left(rot % ps.len());
            let mut expect = adj.clone();
            expect.rotate_left(rot % ps.len());
            prop_assert_eq!(holm_bonferroni(&rotated).unwrap(), expect);

            let mut pairs: Vec<(f64, f64)> = ps.iter().copied().zip(adj.iter().copied()).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            prop_assert!(pairs.windows(2).all(|w| w[0].1 <= w[1].1));
        }
    }
}
