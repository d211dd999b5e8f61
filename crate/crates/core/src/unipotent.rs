//! Upper unitriangular matrices, the slice `V` where the superdiagonal sums
//! to `n - 1`, the multiplicative flow
//! `a(t) x = rho(1/t) exp((t-1) e) x rho(t)`, and the coordinates
//! `b_ij = c^(i-j) ((j-i)! x_ij - 1)` in which it contracts onto `exp(e)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{max_norm, ContractiveFlow, Membership};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, Sign};
use crate::subsets::k_subsets;

/// Exhaustive minor enumeration is used up to this size.
pub const EXHAUSTIVE_MAX_N: usize = 6;

fn factorial<T: Scalar>(d: usize) -> T {
    (1..=d).fold(T::one(), |acc, i| acc * T::from_usize(i))
}

/// An `n x n` upper unitriangular matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnipotentMatrix<T> {
    m: Matrix<T>,
}

impl<T: Scalar> UnipotentMatrix<T> {
    /// Checks that `m` is square with ones on the diagonal and zeros below.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        let (r, c) = m.shape();
        if r != c {
            return Err(Error::InvalidDimensions(format!("unipotent matrix must be square, got {r}x{c}")));
        }
        for i in 0..r {
            if !(m[(i, i)].clone() - T::one()).is_zero() {
                return Err(Error::InvalidParameter(format!("diagonal entry ({0},{0}) is not 1", i + 1)));
            }
            for j in 0..i {
                if !m[(i, j)].is_zero() {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({},{}) below the diagonal is nonzero",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { m })
    }

    /// Builds from the strictly upper entries listed row by row:
    /// `x_12, x_13, .., x_1n, x_23, ..`.
    pub fn from_upper(n: usize, upper: &[T]) -> Result<Self> {
        if n == 0 || upper.len() != n * (n - 1) / 2 {
            return Err(Error::InvalidDimensions(format!(
                "n = {n} needs {} upper entries, got {}",
                n * n.saturating_sub(1) / 2,
                upper.len()
            )));
        }
        let mut it = upper.iter();
        let mut m = Matrix::identity(n);
        for i in 0..n {
            for j in i + 1..n {
                m[(i, j)] = it.next().expect("length checked").clone();
            }
        }
        Ok(Self { m })
    }

    pub fn identity(n: usize) -> Self {
        Self { m: Matrix::identity(n) }
    }

    /// `exp(e)`, with entries `1 / (j - i)!`.
    pub fn exp_e(n: usize) -> Self {
        let m = Matrix::from_fn(n, n, |i, j| {
            if j >= i {
                T::one() / factorial::<T>(j - i)
            } else {
                T::zero()
            }
        });
        Self { m }
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.m[(i, j)]
    }

    /// Strictly upper entries, row by row.
    pub fn upper(&self) -> Vec<T> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.m[(i, j)].clone());
            }
        }
        out
    }

    pub fn superdiagonal_sum(&self) -> T {
        (0..self.n() - 1).fold(T::zero(), |acc, i| acc + self.m[(i, i + 1)].clone())
    }

    /// Whether the superdiagonal sums to `n - 1` (within `tol` for floats).
    pub fn in_v(&self, tol: f64) -> bool {
        let d = self.superdiagonal_sum() - T::from_usize(self.n() - 1);
        d.sign_tol(tol) == Sign::Zero
    }

    /// The dilation action: multiplies the `d`-th superdiagonal by `s^d`.
    pub fn dilate(&self, s: &T) -> Self {
        let n = self.n();
        Self {
            m: Matrix::from_fn(n, n, |i, j| {
                if j > i {
                    s.powi((j - i) as i32) * self.m[(i, j)].clone()
                } else {
                    self.m[(i, j)].clone()
                }
            }),
        }
    }

    pub fn to_f64(&self) -> UnipotentMatrix<f64> {
        UnipotentMatrix { m: self.m.to_f64() }
    }

    /// `0 <= x_ij <= (n-1)^(j-i)` for all `i < j`.
    pub fn entry_bound_holds(&self) -> bool {
        let n = self.n();
        let base = T::from_usize(n - 1);
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let x = &self.m[(i, j)];
                !x.is_negative() && *x <= base.powi((j - i) as i32)
            })
        })
    }
}

/// `a(t) . x`, entrywise
/// `t^(i-j) sum_{l=i..j} (t-1)^(l-i) / (l-i)! x_lj`.
pub fn a_flow<T: Scalar>(t: &T, x: &UnipotentMatrix<T>) -> Result<UnipotentMatrix<T>> {
    if *t <= T::zero() {
        return Err(Error::InvalidParameter(format!("a(t) needs t > 0, got {t}")));
    }
    let n = x.n();
    let s = t.clone() - T::one();
    // (t-1)^d / d! for d < n
    let coeff: Vec<T> = (0..n).map(|d| s.powi(d as i32) / factorial::<T>(d)).collect();
    let inv_t = T::one() / t.clone();
    let m = Matrix::from_fn(n, n, |i, j| {
        if j < i {
            return T::zero();
        }
        let sum = (i..=j).fold(T::zero(), |acc, l| acc + coeff[l - i].clone() * x.m[(l, j)].clone());
        inv_t.powi((j - i) as i32) * sum
    });
    Ok(UnipotentMatrix { m })
}

/// Coordinates centered at `exp(e)`, listed in the same order as
/// [`UnipotentMatrix::upper`].
#[derive(Clone, Debug, PartialEq)]
pub struct BCoords<T> {
    pub n: usize,
    pub c: T,
    pub values: Vec<T>,
}

impl<T: Scalar> BCoords<T> {
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.values[pair_index(self.n, i, j)]
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.to_f64().abs()))
    }

    pub fn superdiagonal_sum(&self) -> T {
        (0..self.n - 1).fold(T::zero(), |acc, i| acc + self.get(i, i + 1).clone())
    }

    /// Inverse of [`b_coords`].
    pub fn to_unipotent(&self) -> Result<UnipotentMatrix<T>> {
        let n = self.n;
        let mut upper = Vec::with_capacity(self.values.len());
        for i in 0..n {
            for j in i + 1..n {
                let d = j - i;
                let v = (self.c.powi(d as i32) * self.get(i, j).clone() + T::one()) / factorial::<T>(d);
                upper.push(v);
            }
        }
        UnipotentMatrix::from_upper(n, &upper)
    }
}

/// Position of `(i, j)`, `i < j`, in row-by-row upper order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

pub fn b_coords<T: Scalar>(x: &UnipotentMatrix<T>, c: &T) -> Result<BCoords<T>> {
    if *c <= T::one() {
        return Err(Error::InvalidParameter(format!("b-coordinates need c > 1, got {c}")));
    }
    let n = x.n();
    let mut values = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = j - i;
            values.push((factorial::<T>(d) * x.m[(i, j)].clone() - T::one()) / c.powi(d as i32));
        }
    }
    Ok(BCoords { n, c: c.clone(), values })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum UPositivity {
    /// All minors nonnegative and every minor with `j_a >= i_a` nonzero.
    UPositive,
    /// Totally nonnegative with a vanishing minor among those with `j_a >= i_a`.
    Boundary { rows: Vec<usize>, cols: Vec<usize> },
    NotTnn { rows: Vec<usize>, cols: Vec<usize> },
}

impl UPositivity {
    pub fn label(&self) -> &'static str {
        match self {
            UPositivity::UPositive => "U_gt0",
            UPositivity::Boundary { .. } => "U_ge0_boundary",
            UPositivity::NotTnn { .. } => "not_TNN",
        }
    }

    pub fn is_tnn(&self) -> bool {
        !matches!(self, UPositivity::NotTnn { .. })
    }
}

fn dominates(rows: &[usize], cols: &[usize]) -> bool {
    rows.iter().zip(cols).all(|(i, j)| j >= i)
}

fn minor_pairs(n: usize) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> {
    (1..=n).flat_map(move |k| {
        let subsets = k_subsets(n, k);
        let subsets2 = subsets.clone();
        subsets
            .into_iter()
            .flat_map(move |r| subsets2.clone().into_iter().map(move |c| (r.clone(), c)))
    })
}

fn classify_over<T: Scalar>(
    x: &UnipotentMatrix<T>,
    tol: f64,
    pairs: impl Iterator<Item = (Vec<usize>, Vec<usize>)>,
) -> UPositivity {
    let mut boundary = None;
    for (rows, cols) in pairs {
        let d = x.m.submatrix(&rows, &cols).det().expect("square minor");
        match d.sign_tol(tol) {
            Sign::Negative => return UPositivity::NotTnn { rows, cols },
            Sign::Zero if boundary.is_none() && dominates(&rows, &cols) => boundary = Some((rows, cols)),
            _ => {}
        }
    }
    match boundary {
        Some((rows, cols)) => UPositivity::Boundary { rows, cols },
        None => UPositivity::UPositive,
    }
}

/// Classifies by every minor when `n <= 6` and by [`classify_u_positivity_sampled`]
/// with 4096 minors and seed 0 otherwise. The exhaustive check costs
/// `C(2n, n) - 1` determinants.
pub fn classify_u_positivity<T: Scalar>(x: &UnipotentMatrix<T>, tol: f64) -> UPositivity {
    if x.n() <= EXHAUSTIVE_MAX_N {
        classify_over(x, tol, minor_pairs(x.n()))
    } else {
        classify_u_positivity_sampled(x, tol, 4096, 0)
    }
}

/// Classifies using the `1x1` minors plus `samples` random row/column subset
/// pairs. A `UPositive` verdict is then only evidence, not proof.
pub fn classify_u_positivity_sampled<T: Scalar>(
    x: &UnipotentMatrix<T>,
    tol: f64,
    samples: usize,
    seed: u64,
) -> UPositivity {
    let n = x.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..n).flat_map(move |i| (0..n).map(move |j| (vec![i], vec![j])));
    let random: Vec<(Vec<usize>, Vec<usize>)> = (0..samples)
        .map(|_| {
            let k = rng.gen_range(1..=n);
            let pick = |rng: &mut ChaCha8Rng| {
                let mut s = rand::seq::index::sample(rng, n, k).into_vec();
                s.sort_unstable();
                s
            };
            let r = pick(&mut rng);
            let c = pick(&mut rng);
            (r, c)
        })
        .collect();
    classify_over(x, tol, entries.chain(random))
}

/// Smallest minor among those with `j_a >= i_a` (the ones that are positive
/// exactly on `U_>0`). Exhaustive, so intended for `n <= 6`.
pub fn min_dominant_minor<T: Scalar>(x: &UnipotentMatrix<T>) -> f64 {
    minor_pairs(x.n())
        .filter(|(r, c)| dominates(r, c))
        .map(|(r, c)| x.m.submatrix(&r, &c).det().expect("square minor").to_f64())
        .fold(f64::INFINITY, f64::min)
}

/// A point of `V_>=0`: a product of elementary factors `1 + t E_{i,i+1}`
/// with random rational `t > 0`, dilated so the superdiagonal sums to
/// `n - 1`. Even seeds use the reduced word of the longest permutation, so
/// the sample lies in `V_>0`; odd seeds use a random word, which may land on
/// the boundary.
pub fn sample_v_tnn<T: Scalar>(n: usize, seed: u64) -> Result<UnipotentMatrix<T>> {
    if n < 2 {
        return Err(Error::InvalidDimensions(format!("need n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let word: Vec<usize> = if seed.is_multiple_of(2) {
        (1..n).rev().flat_map(|len| 0..len).collect()
    } else {
        let len = rng.gen_range(1..=n * (n - 1) / 2 + 2);
        (0..len).map(|_| rng.gen_range(0..n - 1)).collect()
    };
    let mut x = Matrix::<T>::identity(n);
    for i in word {
        let t = T::from_ratio(rng.gen_range(1..=8), rng.gen_range(1..=4));
        // right-multiplying by 1 + t E_{i,i+1} adds t * column i to column i+1
        for r in 0..n {
            let v = x[(r, i + 1)].clone() + t.clone() * x[(r, i)].clone();
            x[(r, i + 1)] = v;
        }
    }
    let x = UnipotentMatrix { m: x };
    let scale = T::from_usize(n - 1) / x.superdiagonal_sum();
    Ok(x.dilate(&scale))
}

/// `(t, b) -> b(a(e^t) . x(b))` on the b-coordinates of `V`, with the
/// sup norm and region `b(V_>0)`.
#[derive(Clone, Debug)]
pub struct UnipotentFlow {
    n: usize,
    c: f64,
}

impl UnipotentFlow {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimensions(format!("need n >= 2, got {n}")));
        }
        if !(c > 1.0) {
            return Err(Error::InvalidParameter(format!("b-coordinates need c > 1, got {c}")));
        }
        Ok(Self { n, c })
    }

    fn point(&self, p: &[f64]) -> UnipotentMatrix<f64> {
        BCoords {
            n: self.n,
            c: self.c,
            values: p.to_vec(),
        }
        .to_unipotent()
        .expect("point dimension matches")
    }

    /// Random points of `W` (b-coordinates with superdiagonal sum zero).
    pub fn sample_w(&self, count: usize, scale: f64, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.n;
        (0..count)
            .map(|_| {
                let mut v: Vec<f64> = (0..self.dim()).map(|_| rng.gen_range(-scale..=scale)).collect();
                let mean = (0..n - 1).map(|i| v[pair_index(n, i, i + 1)]).sum::<f64>() / (n - 1) as f64;
                for i in 0..n - 1 {
                    v[pair_index(n, i, i + 1)] -= mean;
                }
                v
            })
            .collect()
    }
}

impl ContractiveFlow for UnipotentFlow {
    fn dim(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    fn flow(&self, t: f64, p: &[f64]) -> Vec<f64> {
        let x = a_flow(&t.exp(), &self.point(p)).expect("e^t > 0");
        b_coords(&x, &self.c).expect("c > 1").values
    }

    fn norm(&self, p: &[f64]) -> f64 {
        max_norm(p)
    }

    fn membership(&self, p: &[f64], tol: f64) -> Membership {
        match classify_u_positivity(&self.point(p), tol) {
            UPositivity::UPositive => Membership::Interior,
            UPositivity::Boundary { .. } => Membership::ClosureBoundary,
            UPositivity::NotTnn { .. } => Membership::Outside,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn n3_trajectory_closed_form() {
        let (p, q, r) = (rat(2, 3), rat(-1, 5), rat(7, 2));
        let x = UnipotentMatrix::from_upper(3, &[p.clone(), q.clone(), r.clone()]).unwrap();
        for t in [rat(1, 2), rat(3, 1), rat(5, 7)] {
            let y = a_flow(&t, &x).unwrap();
            let one = rat(1, 1);
            let two = rat(2, 1);
            assert_eq!(*y.get(0, 1), (t.clone() + p.clone() - one.clone()) / t.clone());
            assert_eq!(*y.get(1, 2), (t.clone() + r.clone() - one.clone()) / t.clone());
            let want13 = (t.clone() * t.clone() + (two.clone() * r.clone() - two.clone()) * t.clone() + two.clone() * q.clone()
                - two.clone() * r.clone()
                + one.clone())
                / (two.clone() * t.clone() * t.clone());
            assert_eq!(*y.get(0, 2), want13);

            let c = rat(2, 1);
            let b = b_coords(&y, &c).unwrap();
            assert_eq!(*b.get(0, 1), (p.clone() - one.clone()) / (c.clone() * t.clone()));
            assert_eq!(*b.get(1, 2), (r.clone() - one.clone()) / (c.clone() * t.clone()));
            let want = ((two.clone() * r.clone() - two.clone()) * t.clone() + two.clone() * q.clone() - two.clone() * r.clone() + one)
                / (c.clone() * c.clone() * t.clone() * t.clone());
            assert_eq!(*b.get(0, 2), want);
        }
    }

    #[test]
    fn exp_e_is_fixed_and_centered() {
        for n in 2..6 {
            let e = UnipotentMatrix::<Rational>::exp_e(n);
            assert_eq!(a_flow(&rat(7, 3), &e).unwrap(), e);
            assert_eq!(b_coords(&e, &rat(2, 1)).unwrap().norm_inf(), 0.0);
            assert_eq!(classify_u_positivity(&e, 0.0), UPositivity::UPositive);
        }
    }

    #[test]
    fn classification_examples() {
        let id = UnipotentMatrix::<Rational>::identity(3);
        assert_eq!(id.to_f64().n(), 3);
        assert!(matches!(classify_u_positivity(&id, 0.0), UPositivity::Boundary { .. }));
        let bad = UnipotentMatrix::from_upper(3, &[rat(-1, 1), rat(0, 1), rat(2, 1)]).unwrap();
        assert!(matches!(classify_u_positivity(&bad, 0.0), UPositivity::NotTnn { .. }));
    }

    #[test]
    fn samples_are_tnn_in_v() {
        for seed in 0..20 {
            for n in 2..6 {
                let x: UnipotentMatrix<Rational> = sample_v_tnn(n, seed).unwrap();
                assert!(x.in_v(0.0));
                assert!(x.entry_bound_holds());
                assert!(classify_u_positivity(&x, 0.0).is_tnn());
                if n == 2 {
                    assert_eq!(*x.get(0, 1), rat(1, 1));
                }
                if seed % 2 == 0 {
                    assert_eq!(classify_u_positivity(&x, 0.0), UPositivity::UPositive);
                }
                assert_eq!(b_coords(&x, &rat(2, 1)).unwrap().superdiagonal_sum(), rat(0, 1));
            }
        }
    }

    #[test]
    fn b_coords_round_trip() {
        let x: UnipotentMatrix<Rational> = sample_v_tnn(4, 3).unwrap();
        let b = b_coords(&x, &rat(3, 2)).unwrap();
        assert_eq!(b.to_unipotent().unwrap(), x);
        assert!(b_coords(&x, &rat(1, 1)).is_err());
    }

    #[test]
    fn rejects_non_unipotent() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![0.5, 1.0]]).unwrap();
        assert!(UnipotentMatrix::new(m).is_err());
        assert!(a_flow(&0.0, &UnipotentMatrix::<f64>::identity(2)).is_err());
    }

    #[test]
    fn pair_index_order() {
        let n = 5;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), k);
                k += 1;
            }
        }
    }

    #[test]
    fn sampled_classifier_agrees_on_small_n() {
        let x: UnipotentMatrix<Rational> = sample_v_tnn(4, 1).unwrap();
        let full = classify_u_positivity(&x, 0.0);
        let sampled = classify_u_positivity_sampled(&x, 0.0, 5000, 9);
        assert_eq!(full.is_tnn(), sampled.is_tnn());
    }
}
