//! Maximum-cardinality bipartite matching by augmenting paths (Kuhn).

/// Left vertices are `0..adj.len()`, right vertices `0..right`.
/// Returns the matching size and, for each left vertex, its partner.
pub fn max_bipartite_matching(adj: &[Vec<usize>], right: usize) -> (usize, Vec<Option<usize>>) {
    let mut owner: Vec<Option<usize>> = vec![None; right];
    let mut size = 0;
    let mut seen = vec![false; right];
    for u in 0..adj.len() {
        seen.iter_mut().for_each(|s| *s = false);
        if augment(u, adj, &mut owner, &mut seen) {
            size += 1;
        }
    }
    let mut partner = vec![None; adj.len()];
    for (v, u) in owner.iter().enumerate() {
        if let Some(u) = u {
            partner[*u] = Some(v);
        }
    }
    (size, partner)
}

fn augment(u: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if owner[v].is_none_or(|w| augment(w, adj, owner, seen)) {
            owner[v] = Some(u);
            return true;
        }
    }
    false
}

/// True iff every left vertex can be matched.
pub fn saturates_left(adj: &[Vec<usize>], right: usize) -> bool {
    adj.len() <= right && max_bipartite_matching(adj, right).0 == adj.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(adj: &[Vec<usize>], right: usize) -> usize {
        fn go(u: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if u == adj.len() {
                return 0;
            }
            let mut best = go(u + 1, adj, used);
            for &v in &adj[u] {
                if !used[v] {
                    used[v] = true;
                    best = best.max(1 + go(u + 1, adj, used));
                    used[v] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; right])
    }

    #[test]
    fn small_cases() {
        assert_eq!(max_bipartite_matching(&[], 3).0, 0);
        assert!(saturates_left(&[], 0));
        let adj = vec![vec![0, 1], vec![0]];
        let (size, partner) = max_bipartite_matching(&adj, 2);
        assert_eq!(size, 2);
        assert_eq!(partner, vec![Some(1), Some(0)]);
        assert!(!saturates_left(&[vec![0], vec![0]], 2));
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            right in 1usize..6,
            rows in prop::collection::vec(prop::collection::vec(0usize..6, 0..4), 0..6),
        ) {
            let adj: Vec<Vec<usize>> = rows
                .into_iter()
                .map(|r| {
                    let mut r: Vec<usize> = r.into_iter().filter(|&v| v < right).collect();
                    r.sort();
                    r.dedup();
                    r
                })
                .collect();
            let (size, partner) = max_bipartite_matching(&adj, right);
            prop_assert_eq!(size, brute_force(&adj, right));
            let mut used = vec![false; right];
            for (u, p) in partner.iter().enumerate() {
                if let Some(v) = p {
                    prop_assert!(adj[u].contains(v));
                    prop_assert!(!used[*v]);
                    used[*v] = true;
                }
            }
        }
    }
}
