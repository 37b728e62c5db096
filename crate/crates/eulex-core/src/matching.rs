//! Minimum weight perfect bipartite matching on exact integer costs.
//!
//! A hand-rolled shortest augmenting path solver (Hungarian method with
//! potentials) over a dense square cost matrix. Forbidden pairs carry `INF`
//! and are represented internally by a huge finite surrogate that no chain of
//! legitimate potentials can ever reach, so "no finite perfect matching" is
//! detected exactly. All tie breaking is by lowest column index, which makes
//! the returned assignment deterministic.

use crate::weight::{Weight, INF};

const BIG: i128 = i128::MAX / 4;

/// Finds a minimum weight perfect matching of the square cost matrix, or
/// `None` if every perfect matching uses a forbidden pair.
///
/// Returns the total weight and, for each row, the matched column.
pub fn min_weight_perfect_matching(cost: &[Vec<Weight>]) -> Option<(Weight, Vec<usize>)> {
    let n = cost.len();
    for row in cost {
        assert_eq!(row.len(), n, "cost matrix must be square");
    }
    if n == 0 {
        return Some((0, Vec::new()));
    }
    let c = |i: usize, j: usize| -> i128 {
        let w = cost[i][j];
        if w == INF {
            BIG
        } else {
            w as i128
        }
    };

    // Columns are 1-based with a virtual column 0 through which each new row
    // enters; p[j] is the row currently matched to column j.
    let mut u = vec![0i128; n + 1];
    let mut v = vec![0i128; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![BIG; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = BIG;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = c(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            if delta >= BIG / 2 {
                // Only forbidden pairs reach the remaining columns.
                return None;
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut match_of_row = vec![usize::MAX; n];
    for j in 1..=n {
        match_of_row[p[j] - 1] = j - 1;
    }
    let mut total: Weight = 0;
    for (i, &j) in match_of_row.iter().enumerate() {
        debug_assert_ne!(cost[i][j], INF, "forbidden pairs never end up matched");
        total += cost[i][j];
    }
    Some((total, match_of_row))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_the_cheap_diagonal() {
        let cost = vec![vec![1, 10, 10], vec![10, 1, 10], vec![10, 10, 1]];
        let (w, m) = min_weight_perfect_matching(&cost).unwrap();
        assert_eq!(w, 3);
        assert_eq!(m, vec![0, 1, 2]);
    }

    #[test]
    fn routes_around_forbidden_pairs() {
        let cost = vec![vec![1, 2], vec![INF, 7]];
        let (w, m) = min_weight_perfect_matching(&cost).unwrap();
        assert_eq!(w, 8);
        assert_eq!(m, vec![0, 1]);
    }

    #[test]
    fn detects_infeasibility() {
        let cost = vec![vec![1, INF], vec![1, INF]];
        assert_eq!(min_weight_perfect_matching(&cost), None);
    }

    #[test]
    fn ties_resolve_to_the_lowest_column() {
        let cost = vec![vec![5, 5], vec![5, 5]];
        let (w, m) = min_weight_perfect_matching(&cost).unwrap();
        assert_eq!(w, 10);
        assert_eq!(m, vec![0, 1]);
    }

    #[test]
    fn empty_is_trivially_matched() {
        assert_eq!(min_weight_perfect_matching(&[]), Some((0, Vec::new())));
    }

    #[test]
    fn beats_greedy_row_choices() {
        // Row 0 is tempted by column 0, but the optimum crosses over.
        let cost = vec![vec![1, 4], vec![2, 100]];
        let (w, m) = min_weight_perfect_matching(&cost).unwrap();
        assert_eq!(w, 6);
        assert_eq!(m, vec![1, 0]);
    }
}
