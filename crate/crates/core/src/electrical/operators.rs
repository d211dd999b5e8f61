//! Vectors indexed by the `(n-1)`-subsets of `[2n]`, the vectors `A_sigma`,
//! the raising and lowering operators `u_i`, `d_i`, their sum `Phi`, and the
//! span `H` of the `A_sigma`.

use std::ops::Add;

use itertools::Itertools;
use num::{One, Zero};
use serde::Serialize;

use super::noncrossing::{enumerate_nc, NoncrossingPartition};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};
use crate::subsets::{binomial, k_subsets, subset_key, subset_rank};

/// Coefficients on the basis `e_I`, `I` an `(n-1)`-subset of `[2n]` (stored
/// 0-based, in lexicographic order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BigVector<T> {
    pub n: usize,
    pub coords: Vec<T>,
}

impl<T: Clone + Zero> BigVector<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            coords: vec![T::zero(); binomial(2 * n, n - 1)],
        }
    }

    pub fn dim(n: usize) -> usize {
        binomial(2 * n, n - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Nonzero coordinates as 1-based subset keys.
    pub fn support(&self) -> Vec<(String, T)> {
        k_subsets(2 * self.n, self.n - 1)
            .iter()
            .zip(&self.coords)
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| (subset_key(s), c.clone()))
            .collect()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> BigVector<U> {
        BigVector {
            n: self.n,
            coords: self.coords.iter().map(f).collect(),
        }
    }
}

impl<T: Clone + Add<Output = T>> BigVector<T> {
    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

/// `e_I` for a 0-based subset.
pub fn basis_vector<T: Clone + Zero + One>(n: usize, subset: &[usize]) -> BigVector<T> {
    let mut v = BigVector::zeros(n);
    v.coords[subset_rank(subset, 2 * n)] = T::one();
    v
}

/// Sum of `e_I` over the subsets `I` whose complement picks exactly one
/// label from every block of `sigma` and of its Kreweras complement.
pub fn a_sigma(sigma: &NoncrossingPartition) -> BigVector<i64> {
    let n = sigma.n();
    let blocks: Vec<Vec<usize>> = sigma.parts().iter().cloned().chain(sigma.kreweras()).collect();
    let mut v = BigVector::zeros(n);
    for pick in blocks.iter().map(|b| b.iter().copied()).multi_cartesian_product() {
        let subset: Vec<usize> = (1..=2 * n).filter(|x| !pick.contains(x)).map(|x| x - 1).collect();
        v.coords[subset_rank(&subset, 2 * n)] += 1;
    }
    v
}

/// `(u_i + d_i)(v)` for a 1-based `i` in `1..=2n`, labels mod `2n`.
pub fn ud_apply<T: Clone + Zero>(i: usize, v: &BigVector<T>) -> Result<BigVector<T>> {
    let n = v.n;
    let two_n = 2 * n;
    if i == 0 || i > two_n {
        return Err(Error::InvalidParameter(format!("index {i} is outside 1..={two_n}")));
    }
    let up = if i == two_n { 0 } else { i };
    let down = if i == 1 { two_n - 1 } else { i - 2 };
    let i0 = i - 1;
    let mut out = BigVector::<T>::zeros(n);
    for (subset, c) in k_subsets(two_n, n - 1).iter().zip(&v.coords) {
        if c.is_zero() || !subset.contains(&i0) {
            continue;
        }
        for target in [up, down] {
            if subset.contains(&target) {
                continue;
            }
            let mut moved: Vec<usize> = subset.iter().map(|&x| if x == i0 { target } else { x }).collect();
            moved.sort_unstable();
            let r = subset_rank(&moved, two_n);
            out.coords[r] = out.coords[r].clone() + c.clone();
        }
    }
    Ok(out)
}

/// `Phi = sum_i (u_i + d_i)`.
pub fn phi_apply<T: Clone + Zero>(v: &BigVector<T>) -> BigVector<T> {
    let mut acc = BigVector::<T>::zeros(v.n);
    for i in 1..=2 * v.n {
        let w = ud_apply(i, v).expect("index in range");
        for (a, b) in acc.coords.iter_mut().zip(w.coords) {
            *a = a.clone() + b;
        }
    }
    acc
}

/// `Phi(A_sigma) = sum of A_{sigma'(i)}` over the `i` with `sigma'(i) != sigma`,
/// collected by partition.
pub fn phi_expansion(sigma: &NoncrossingPartition) -> Vec<(NoncrossingPartition, i64)> {
    let mut out: Vec<(NoncrossingPartition, i64)> = Vec::new();
    for i in 1..=2 * sigma.n() {
        let sp = sigma.sigma_prime(i).expect("index in range");
        if sp == *sigma {
            continue;
        }
        match out.iter_mut().find(|(p, _)| *p == sp) {
            Some((_, c)) => *c += 1,
            None => out.push((sp, 1)),
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct UdCounterexample {
    pub sigma: String,
    pub i: usize,
    pub expected: Vec<(String, i64)>,
    pub got: Vec<(String, i64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UdReport {
    pub n: usize,
    pub partitions: usize,
    pub cases: usize,
    pub failures: Vec<UdCounterexample>,
}

impl UdReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `(u_i + d_i)(A_sigma)` against `0` or `A_{sigma'(i)}` for every
/// `sigma` and `i`, in integer arithmetic.
pub fn verify_lemma_ud(n: usize) -> Result<UdReport> {
    let all = enumerate_nc(n)?;
    let mut failures = Vec::new();
    let mut cases = 0;
    for sigma in &all {
        let a = a_sigma(sigma);
        for i in 1..=2 * n {
            cases += 1;
            let got = ud_apply(i, &a)?;
            let sp = sigma.sigma_prime(i)?;
            let expected = if sp == *sigma { BigVector::zeros(n) } else { a_sigma(&sp) };
            if got != expected {
                failures.push(UdCounterexample {
                    sigma: sigma.to_string(),
                    i,
                    expected: expected.support(),
                    got: got.support(),
                });
            }
        }
    }
    Ok(UdReport {
        n,
        partitions: all.len(),
        cases,
        failures,
    })
}

/// The span of the `A_sigma`.
#[derive(Clone, Debug)]
pub struct HSubspace {
    pub n: usize,
    pub partitions: Vec<NoncrossingPartition>,
    /// Rows `A_sigma` in the order of `partitions`.
    pub vectors: Matrix<Rational>,
    pub rank: usize,
    independent: Matrix<Rational>,
    gram_inv: Matrix<Rational>,
    orthonormal: Vec<Vec<f64>>,
}

pub fn h_subspace(n: usize) -> Result<HSubspace> {
    let partitions = enumerate_nc(n)?;
    let rows: Vec<Vec<Rational>> = partitions
        .iter()
        .map(|s| a_sigma(s).coords.iter().map(|&c| Rational::from_ratio(c, 1)).collect())
        .collect();
    let vectors = Matrix::from_rows(rows.clone())?;
    let rank = vectors.rank(0.0);

    let mut chosen: Vec<Vec<Rational>> = Vec::new();
    for r in rows {
        let mut trial = chosen.clone();
        trial.push(r);
        if Matrix::from_rows(trial.clone())?.rank(0.0) == trial.len() {
            chosen = trial;
        }
    }
    let independent = Matrix::from_rows(chosen)?;
    let gram_inv = independent.matmul(&independent.transpose())?.inverse()?;

    let mut orthonormal: Vec<Vec<f64>> = Vec::new();
    for r in 0..independent.rows() {
        let mut v: Vec<f64> = independent.row(r).iter().map(Scalar::to_f64).collect();
        for _ in 0..2 {
            for q in &orthonormal {
                let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        orthonormal.push(v.into_iter().map(|x| x / len).collect());
    }
    Ok(HSubspace {
        n,
        partitions,
        vectors,
        rank,
        independent,
        gram_inv,
        orthonormal,
    })
}

impl HSubspace {
    pub fn dim(&self) -> usize {
        BigVector::<i64>::dim(self.n)
    }

    /// `v - P_H v`, computed exactly.
    pub fn residual_exact(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.dim() {
            return Err(Error::InvalidDimensions(format!(
                "vector has length {}, expected {}",
                v.len(),
                self.dim()
            )));
        }
        let col = Matrix::new(v.len(), 1, v.to_vec())?;
        let coeffs = self.gram_inv.matmul(&self.independent.matmul(&col)?)?;
        let proj = self.independent.transpose().matmul(&coeffs)?;
        Ok(v.iter().zip(proj.data()).map(|(a, b)| a.clone() - b.clone()).collect())
    }

    pub fn contains_exact(&self, v: &[Rational]) -> Result<bool> {
        Ok(self.residual_exact(v)?.iter().all(Zero::is_zero))
    }

    /// `|v - P_H v| / |v|`, a projective distance from `v` to `H`.
    pub fn residual(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::InvalidDimensions(format!(
                "vector has length {}, expected {}",
                v.len(),
                self.dim()
            )));
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 {
            return Err(Error::ZeroPoint);
        }
        let mut r = v.to_vec();
        for q in &self.orthonormal {
            let d: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        Ok(r.iter().map(|x| x * x).sum::<f64>().sqrt() / len)
    }

    /// Orthonormal basis of `H` (rows).
    pub fn orthonormal_basis(&self) -> &[Vec<f64>] {
        &self.orthonormal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_set(v: &BigVector<i64>) -> Vec<String> {
        v.support().into_iter().map(|(k, _)| k).collect()
    }

    #[test]
    fn example_vectors() {
        let s = NoncrossingPartition::parse(3, "1,3|5").unwrap();
        assert_eq!(key_set(&a_sigma(&s)), vec!["1,4", "1,6", "3,4", "3,6"]);
        let single = NoncrossingPartition::parse(3, "1|3|5").unwrap();
        assert_eq!(key_set(&a_sigma(&single)), vec!["2,4", "2,6", "4,6"]);
        assert_eq!(ud_apply(1, &a_sigma(&s)).unwrap(), a_sigma(&single));
        assert!(ud_apply(2, &a_sigma(&s)).unwrap().is_zero());
    }

    #[test]
    fn n1_is_the_empty_subset() {
        let all = enumerate_nc(1).unwrap();
        let a = a_sigma(&all[0]);
        assert_eq!(a.coords, vec![1]);
        assert!(verify_lemma_ud(1).unwrap().pass());
    }

    #[test]
    fn u_vanishes_off_support() {
        let e: BigVector<i64> = basis_vector(3, &[1, 3]);
        assert!(ud_apply(1, &e).unwrap().is_zero());
        assert!(phi_apply(&BigVector::<i64>::zeros(3)).is_zero());
    }

    #[test]
    fn ud_relation_small() {
        for n in 1..=4 {
            let r = verify_lemma_ud(n).unwrap();
            assert!(r.pass(), "{:?}", r.failures.first());
            assert_eq!(r.cases, r.partitions * 2 * n);
        }
    }

    #[test]
    fn phi_expansion_matches_phi() {
        for n in 2..=4 {
            for s in enumerate_nc(n).unwrap() {
                let mut want = BigVector::zeros(n);
                for (p, c) in phi_expansion(&s) {
                    want = want.add(&a_sigma(&p).map(|x| x * c));
                }
                assert_eq!(phi_apply(&a_sigma(&s)), want);
            }
        }
    }

    #[test]
    fn h_membership() {
        let h = h_subspace(3).unwrap();
        assert_eq!(h.dim(), 15);
        for r in 0..h.vectors.rows() {
            assert!(h.contains_exact(h.vectors.row(r)).unwrap());
        }
        let e: Vec<Rational> = basis_vector::<i64>(3, &[0, 1]).coords.iter().map(|&c| Rational::from_ratio(c, 1)).collect();
        assert!(!h.contains_exact(&e).unwrap());
        assert!(h.residual(&e.iter().map(Scalar::to_f64).collect::<Vec<_>>()).unwrap() > 0.1);
    }
}
