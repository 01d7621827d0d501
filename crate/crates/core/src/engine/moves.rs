//! Simultaneous movement resolution.
//!
//! Every player declares a target cell (already filtered for walls by the
//! environment). Conflicts are resolved in rounds until stable:
//!
//! * several movers targeting one cell form a contest,
//! * two movers exchanging cells form a swap, which is always refused,
//! * a mover whose target is held by a player that is not leaving is blocked.
//!
//! Rotations of three or more players all succeed.

use super::GridPos;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContestRule {
    /// The lowest player index among the contenders moves; the rest stay.
    LowestIndexWins,
    /// Every contender stays.
    AllBounce,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveOutcome {
    pub positions: Vec<Option<GridPos>>,
    /// Players that took part in any contest, swap or block this step,
    /// including stationary players that were moved into.
    pub collided: Vec<bool>,
}

/// `current[i]` is `None` for players that are off the board.
/// `intended[i]` is `None` for players that do not try to move.
pub fn resolve_moves(current: &[Option<GridPos>], intended: &[Option<GridPos>], rule: ContestRule) -> MoveOutcome {
    let n = current.len();
    debug_assert_eq!(n, intended.len());
    let mut active: Vec<bool> = (0..n)
        .map(|i| matches!((current[i], intended[i]), (Some(c), Some(t)) if c != t))
        .collect();
    let mut collided = vec![false; n];

    loop {
        let snapshot = active.clone();
        let mut changed = false;
        let mut stop = |i: usize, active: &mut Vec<bool>| {
            if active[i] {
                active[i] = false;
                changed = true;
            }
        };

        for i in (0..n).filter(|&i| snapshot[i]) {
            let target = intended[i];
            let mut rivals = (0..n).filter(|&j| j != i && snapshot[j] && intended[j] == target).peekable();
            if rivals.peek().is_none() {
                continue;
            }
            match rule {
                ContestRule::AllBounce => {
                    collided[i] = true;
                    stop(i, &mut active);
                }
                ContestRule::LowestIndexWins => {
                    collided[i] = true;
                    if rivals.any(|j| j < i) {
                        stop(i, &mut active);
                    }
                }
            }
        }

        for i in 0..n {
            for j in (i + 1)..n {
                if snapshot[i] && snapshot[j] && intended[i] == current[j] && intended[j] == current[i] {
                    collided[i] = true;
                    collided[j] = true;
                    stop(i, &mut active);
                    stop(j, &mut active);
                }
            }
        }

        for i in 0..n {
            if !active[i] {
                continue;
            }
            let target = intended[i];
            if let Some(j) = (0..n).find(|&j| j != i && !active[j] && current[j].is_some() && current[j] == target) {
                collided[i] = true;
                collided[j] = true;
                stop(i, &mut active);
            }
        }

        if !changed {
            break;
        }
    }

    let positions = (0..n).map(|i| if active[i] { intended[i] } else { current[i] }).collect();
    MoveOutcome { positions, collided }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r: i32, c: i32) -> Option<GridPos> {
        Some(GridPos::new(r, c))
    }

    #[test]
    fn contest_all_bounce() {
        let out = resolve_moves(&[p(0, 0), p(0, 2)], &[p(0, 1), p(0, 1)], ContestRule::AllBounce);
        assert_eq!(out.positions, vec![p(0, 0), p(0, 2)]);
        assert_eq!(out.collided, vec![true, true]);
    }

    #[test]
    fn contest_lowest_index_wins() {
        let out = resolve_moves(&[p(0, 0), p(0, 2)], &[p(0, 1), p(0, 1)], ContestRule::LowestIndexWins);
        assert_eq!(out.positions, vec![p(0, 1), p(0, 2)]);
    }

    #[test]
    fn swap_is_refused() {
        let out = resolve_moves(&[p(0, 0), p(0, 1)], &[p(0, 1), p(0, 0)], ContestRule::LowestIndexWins);
        assert_eq!(out.positions, vec![p(0, 0), p(0, 1)]);
        assert_eq!(out.collided, vec![true, true]);
    }

    #[test]
    fn following_a_leaving_player_succeeds() {
        let out = resolve_moves(&[p(0, 0), p(0, 1)], &[p(0, 1), p(0, 2)], ContestRule::AllBounce);
        assert_eq!(out.positions, vec![p(0, 1), p(0, 2)]);
        assert_eq!(out.collided, vec![false, false]);
    }

    #[test]
    fn blocked_chain_propagates() {
        // 2 is stationary, 1 is blocked by 2, then 0 is blocked by 1.
        let out = resolve_moves(&[p(0, 0), p(0, 1), p(0, 2)], &[p(0, 1), p(0, 2), None], ContestRule::AllBounce);
        assert_eq!(out.positions, vec![p(0, 0), p(0, 1), p(0, 2)]);
        assert_eq!(out.collided, vec![true, true, true]);
    }

    #[test]
    fn rotation_succeeds() {
        let cur = [p(0, 0), p(0, 1), p(1, 1), p(1, 0)];
        let tgt = [p(0, 1), p(1, 1), p(1, 0), p(0, 0)];
        let out = resolve_moves(&cur, &tgt, ContestRule::AllBounce);
        assert_eq!(out.positions, tgt.to_vec());
    }

    #[test]
    fn off_board_players_never_block() {
        let out = resolve_moves(&[p(0, 0), None], &[p(0, 1), None], ContestRule::AllBounce);
        assert_eq!(out.positions, vec![p(0, 1), None]);
    }
}
