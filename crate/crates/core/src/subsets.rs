//! k-subsets of `{0, .., n-1}` in lexicographic order.
//!
//! Internally subsets are 0-based sorted vectors; user-facing keys such as
//! `"1,3"` are 1-based.

use itertools::Itertools;

use crate::error::{Error, Result};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All k-subsets of `0..n`, lexicographically ordered.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(k).collect()
}

/// Position of a sorted subset within [`k_subsets`].
pub fn subset_rank(subset: &[usize], n: usize) -> usize {
    let k = subset.len();
    let mut rank = 0;
    let mut next = 0;
    for (pos, &s) in subset.iter().enumerate() {
        for v in next..s {
            rank += binomial(n - 1 - v, k - 1 - pos);
        }
        next = s + 1;
    }
    rank
}

/// Sorts a tuple of distinct column indices, returning the sorted vector and
/// the parity of the sorting permutation (`+1` or `-1`). `None` if an index
/// repeats.
pub fn sort_with_sign(cols: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = cols.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// Formats a 0-based subset as a 1-based key, e.g. `[0, 2]` -> `"1,3"`.
pub fn subset_key(subset: &[usize]) -> String {
    subset.iter().map(|i| (i + 1).to_string()).join(",")
}

/// Parses a 1-based key into a 0-based subset, requiring strictly
/// increasing entries within `1..=n` and exactly `k` of them.
pub fn parse_subset_key(key: &str, n: usize, k: usize) -> Result<Vec<usize>> {
    let err = |msg: String| Error::parse(format!("subset key {key:?}"), msg);
    let parts: Vec<usize> = if key.trim().is_empty() {
        Vec::new()
    } else {
        key.split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(e.to_string()))?
    };
    if parts.len() != k {
        return Err(err(format!("expected {k} elements, got {}", parts.len())));
    }
    if parts.iter().any(|&p| p == 0 || p > n) {
        return Err(err(format!("elements must lie in 1..={n}")));
    }
    if parts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(err("elements must be strictly increasing".into()));
    }
    Ok(parts.into_iter().map(|p| p - 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_matches_enumeration() {
        for n in 1..8 {
            for k in 0..=n {
                for (i, s) in k_subsets(n, k).iter().enumerate() {
                    assert_eq!(subset_rank(s, n), i);
                }
                assert_eq!(k_subsets(n, k).len(), binomial(n, k));
            }
        }
    }

    #[test]
    fn sorting_sign() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn keys() {
        assert_eq!(subset_key(&[0, 2]), "1,3");
        assert_eq!(parse_subset_key("1,3", 4, 2).unwrap(), vec![0, 2]);
        let e = parse_subset_key("2,1", 4, 2).unwrap_err().to_string();
        assert!(e.contains("\"2,1\""), "{e}");
        assert!(parse_subset_key("1,5", 4, 2).is_err());
        assert!(parse_subset_key("1", 4, 2).is_err());
    }
}
