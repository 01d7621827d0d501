use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::MatchResult;

/// Train-minus-test performance, both signed and absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenGap {
    pub signed: f64,
    pub absolute: f64,
}

pub fn generalization_gap(train: f64, test: f64) -> GenGap {
    let signed = train - test;
    GenGap { signed, absolute: signed.abs() }
}

/// A square table over population ids. `None` marks pairs with no matches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub ids: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
    pub counts: Vec<Vec<usize>>,
}

impl ScoreMatrix {
    fn accumulate(ids: &[String], entries: impl Iterator<Item = (usize, usize, f64)>) -> Self {
        let n = ids.len();
        let mut sums = vec![vec![0.0; n]; n];
        let mut counts = vec![vec![0usize; n]; n];
        for (i, j, v) in entries {
            sums[i][j] += v;
            counts[i][j] += 1;
        }
        let cells = sums
            .iter()
            .zip(&counts)
            .map(|(row, c)| row.iter().zip(c).map(|(&s, &k)| (k > 0).then(|| s / k as f64)).collect())
            .collect();
        Self { ids: ids.to_vec(), cells, counts }
    }

    pub fn get(&self, row: &str, col: &str) -> Option<f64> {
        let i = self.ids.iter().position(|x| x == row)?;
        let j = self.ids.iter().position(|x| x == col)?;
        self.cells[i][j]
    }

    /// Tab-separated table with a header row; empty cells print as `-`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("row\\col");
        for id in &self.ids {
            let _ = write!(out, "\t{id}");
        }
        out.push('\n');
        for (id, row) in self.ids.iter().zip(&self.cells) {
            out.push_str(id);
            for c in row {
                match c {
                    Some(v) => {
                        let _ = write!(out, "\t{v:.4}");
                    }
                    None => out.push_str("\t-"),
                }
            }
            out.push('\n');
        }
        out
    }
}

fn index_of(ids: &[String], id: &str) -> Option<usize> {
    ids.iter().position(|x| x == id)
}

/// Entry `(i, j)` is the fraction of i-versus-j matches that i won, counting
/// a draw as half a win. Matches are counted from both sides. A diagonal
/// entry is population A's win rate in self-play. Results for ids outside
/// `ids` are ignored.
pub fn win_matrix(results: &[MatchResult], ids: &[String]) -> ScoreMatrix {
    let entries = results.iter().filter_map(|r| {
        let (i, j) = (index_of(ids, &r.pop_a)?, index_of(ids, &r.pop_b)?);
        Some((i, j, r.outcome_a()))
    });
    let mirrored = results.iter().filter_map(|r| {
        let (i, j) = (index_of(ids, &r.pop_a)?, index_of(ids, &r.pop_b)?);
        (i != j).then(|| (j, i, 1.0 - r.outcome_a()))
    });
    ScoreMatrix::accumulate(ids, entries.chain(mirrored))
}

/// Entry `(i, j)` is the mean `score_a` over matches with A = i and B = j:
/// the reward of agents from the row population when grouped with agents
/// from the column population.
pub fn mean_score_matrix(results: &[MatchResult], ids: &[String]) -> ScoreMatrix {
    let entries = results.iter().filter_map(|r| Some((index_of(ids, &r.pop_a)?, index_of(ids, &r.pop_b)?, r.score_a)));
    ScoreMatrix::accumulate(ids, entries)
}
