//! Noncrossing partitions of the odd labels `{1, 3, .., 2n-1}` on a circle
//! of `2n` points, and their Kreweras complements on the even labels.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A set partition of labels on the circle `1..=2n`, stored with sorted
/// blocks ordered by their least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NoncrossingPartition {
    n: usize,
    parts: Vec<Vec<usize>>,
}

fn canonical(mut parts: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    parts.retain(|p| !p.is_empty());
    for p in &mut parts {
        p.sort_unstable();
    }
    parts.sort();
    parts
}

/// Whether blocks `a` and `b` cross: some `w < x < y < z` alternate
/// between them. Both blocks must be sorted.
fn blocks_cross(a: &[usize], b: &[usize]) -> bool {
    let inside = |lo: usize, hi: usize, v: usize| lo < v && v < hi;
    for w in a.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let any_in = b.iter().any(|&v| inside(lo, hi, v));
        let any_out = b.iter().any(|&v| !inside(lo, hi, v));
        if any_in && any_out {
            return true;
        }
    }
    false
}

pub fn is_noncrossing(parts: &[Vec<usize>]) -> bool {
    for (i, a) in parts.iter().enumerate() {
        for b in &parts[i + 1..] {
            if blocks_cross(a, b) {
                return false;
            }
        }
    }
    true
}

impl NoncrossingPartition {
    /// Validates a partition of the odd labels of `[2n]`.
    pub fn new(n: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        let parts = canonical(parts);
        let mut seen: Vec<usize> = parts.iter().flatten().copied().collect();
        seen.sort_unstable();
        let odd: Vec<usize> = (0..n).map(|i| 2 * i + 1).collect();
        if seen != odd {
            return Err(Error::InvalidPartition(format!(
                "blocks must cover each odd label in 1..={} exactly once",
                2 * n
            )));
        }
        if !is_noncrossing(&parts) {
            return Err(Error::InvalidPartition("blocks cross".into()));
        }
        Ok(Self { n, parts })
    }

    /// Parses `"1,3|5"`.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let parts = s
            .split('|')
            .map(|block| {
                block
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<usize>()
                            .map_err(|e| Error::parse(format!("partition {s:?}"), e.to_string()))
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, parts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    fn block_of(&self, label: usize) -> usize {
        self.parts
            .iter()
            .position(|p| p.contains(&label))
            .expect("label belongs to some block")
    }

    /// The coarsest partition of the even labels that does not cross `self`:
    /// two evens share a block when no block of `self` has labels on both
    /// sides of the chord joining them.
    pub fn kreweras(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for a in 0..n {
            for b in a + 1..n {
                let (lo, hi) = (2 * a + 2, 2 * b + 2);
                let separated = self.parts.iter().any(|p| {
                    let inside = p.iter().filter(|&&v| lo < v && v < hi).count();
                    inside > 0 && inside < p.len()
                });
                if !separated {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n];
        for a in 0..n {
            let r = find(&mut parent, a);
            blocks[r].push(2 * a + 2);
        }
        canonical(blocks)
    }

    /// `sigma'(i)`: for odd `i`, split `i` off its block; for even `i`, merge
    /// the blocks of `i - 1` and `i + 1` (labels mod `2n`).
    pub fn sigma_prime(&self, i: usize) -> Result<Self> {
        let two_n = 2 * self.n;
        if i == 0 || i > two_n {
            return Err(Error::InvalidParameter(format!("index {i} is outside 1..={two_n}")));
        }
        let mut parts = self.parts.clone();
        if i % 2 == 1 {
            let b = self.block_of(i);
            parts[b].retain(|&v| v != i);
            parts.push(vec![i]);
        } else {
            let next = if i == two_n { 1 } else { i + 1 };
            let (a, b) = (self.block_of(i - 1), self.block_of(next));
            if a != b {
                let moved = std::mem::take(&mut parts[b]);
                parts[a].extend(moved);
            }
        }
        Ok(Self {
            n: self.n,
            parts: canonical(parts),
        })
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl fmt::Display for NoncrossingPartition {
    /// Blocks separated by `|`, e.g. `1,3|5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self
            .parts
            .iter()
            .map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", s.join("|"))
    }
}

/// Noncrossing partitions of an ordered list of labels, built by choosing
/// the block of the first label; the gaps that block leaves are then
/// partitioned independently.
fn nc_of(labels: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = labels.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for mask in 0u64..(1 << rest.len()) {
        let mut block = vec![first];
        let mut segments: Vec<Vec<usize>> = vec![Vec::new()];
        for (idx, &v) in rest.iter().enumerate() {
            if mask >> idx & 1 == 1 {
                block.push(v);
                segments.push(Vec::new());
            } else {
                segments.last_mut().expect("nonempty").push(v);
            }
        }
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for seg in segments.iter().filter(|s| !s.is_empty()) {
            let options = nc_of(seg);
            partial = partial
                .iter()
                .flat_map(|p| {
                    options.iter().map(move |o| {
                        let mut q = p.clone();
                        q.extend(o.iter().cloned());
                        q
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// All noncrossing partitions of `{1, 3, .., 2n-1}`, sorted.
pub fn enumerate_nc(n: usize) -> Result<Vec<NoncrossingPartition>> {
    if n == 0 {
        return Err(Error::InvalidDimensions("need n >= 1".into()));
    }
    let labels: Vec<usize> = (0..n).map(|i| 2 * i + 1).collect();
    let mut all: Vec<NoncrossingPartition> = nc_of(&labels)
        .into_iter()
        .map(|parts| NoncrossingPartition {
            n,
            parts: canonical(parts),
        })
        .collect();
    all.sort();
    Ok(all)
}

pub fn catalan(n: usize) -> usize {
    crate::subsets::binomial(2 * n, n) / (n + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_are_catalan() {
        for n in 1..=7 {
            assert_eq!(enumerate_nc(n).unwrap().len(), catalan(n));
        }
    }

    #[test]
    fn example_kreweras() {
        let s = NoncrossingPartition::parse(3, "1,3|5").unwrap();
        assert_eq!(s.kreweras(), vec![vec![2], vec![4, 6]]);
        let single = NoncrossingPartition::parse(3, "1|3|5").unwrap();
        assert_eq!(single.kreweras(), vec![vec![2, 4, 6]]);
        let full = NoncrossingPartition::parse(3, "1,3,5").unwrap();
        assert_eq!(full.kreweras(), vec![vec![2], vec![4], vec![6]]);
    }

    #[test]
    fn example_sigma_prime() {
        let s = NoncrossingPartition::parse(3, "1,3|5").unwrap();
        let sp = |i| s.sigma_prime(i).unwrap().to_string();
        assert_eq!(sp(1), "1|3|5");
        assert_eq!(sp(3), "1|3|5");
        assert_eq!(sp(2), "1,3|5");
        assert_eq!(sp(5), "1,3|5");
        assert_eq!(sp(4), "1,3,5");
        assert_eq!(sp(6), "1,3,5");
    }

    #[test]
    fn rejects_crossing_and_bad_labels() {
        assert!(NoncrossingPartition::parse(4, "1,5|3,7").is_err());
        assert!(NoncrossingPartition::parse(4, "1,5|3|7").is_ok());
        assert!(NoncrossingPartition::parse(2, "1,2").is_err());
        assert!(NoncrossingPartition::parse(2, "1").is_err());
        assert!(NoncrossingPartition::parse(2, "1,x").is_err());
    }
}
