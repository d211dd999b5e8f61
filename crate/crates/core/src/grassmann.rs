//! Points of `Gr(k, n)` as full-rank `k x n` matrices, their Plücker
//! coordinates, and total positivity classification.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, Sign};
use crate::subsets::{k_subsets, subset_rank};

/// Minors below this fraction of the Hadamard bound count as zero when
/// checking float matrices for full rank.
const FLOAT_RANK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// Divide by the (signed) coordinate of largest magnitude.
    MaxAbs,
    /// Divide by the first nonzero coordinate in subset order.
    FirstNonzero,
    Raw,
}

impl Normalization {
    /// `MaxAbs` for floats, `FirstNonzero` for exact scalars.
    pub fn default_for<T: Scalar>() -> Self {
        if T::EXACT {
            Normalization::FirstNonzero
        } else {
            Normalization::MaxAbs
        }
    }
}

/// Projective vector of maximal minors indexed by the k-subsets of `[n]`
/// in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct PluckerVector<T> {
    k: usize,
    n: usize,
    coords: Vec<T>,
    normalization: Normalization,
}

impl<T: Scalar> PluckerVector<T> {
    pub fn new(k: usize, n: usize, coords: Vec<T>) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidDimensions(format!("k = {k} exceeds n = {n}")));
        }
        let expected = crate::subsets::binomial(n, k);
        if coords.len() != expected {
            return Err(Error::InvalidDimensions(format!(
                "Plücker vector for Gr({k},{n}) needs {expected} coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().all(num::Zero::is_zero) {
            return Err(Error::InvalidParameter(
                "Plücker vector must have a nonzero coordinate".into(),
            ));
        }
        Ok(Self {
            k,
            n,
            coords,
            normalization: Normalization::Raw,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Coordinate for a sorted 0-based subset.
    pub fn get(&self, subset: &[usize]) -> &T {
        &self.coords[subset_rank(subset, self.n)]
    }

    pub fn subsets(&self) -> Vec<Vec<usize>> {
        k_subsets(self.n, self.k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &T)> {
        self.subsets().into_iter().zip(self.coords.iter())
    }

    pub fn normalized(&self, normalization: Normalization) -> Self {
        let pivot = match normalization {
            Normalization::Raw => None,
            Normalization::FirstNonzero => self.coords.iter().find(|c| !c.is_zero()).cloned(),
            Normalization::MaxAbs => {
                let max = self
                    .coords
                    .iter()
                    .map(|c| c.to_f64().abs())
                    .fold(0.0, f64::max);
                // First coordinate within rounding of the maximum, so ties do not
                // depend on the last few bits.
                self.coords
                    .iter()
                    .find(|c| c.to_f64().abs() >= max * (1.0 - 1e-12))
                    .cloned()
            }
        };
        let coords = match pivot {
            Some(p) => self.coords.iter().map(|c| c.clone() / p.clone()).collect(),
            None => self.coords.clone(),
        };
        Self {
            k: self.k,
            n: self.n,
            coords,
            normalization,
        }
    }

    pub fn to_f64(&self) -> PluckerVector<f64> {
        PluckerVector {
            k: self.k,
            n: self.n,
            coords: self.coords.iter().map(Scalar::to_f64).collect(),
            normalization: self.normalization,
        }
    }

    /// Smallest coordinate after flipping the global sign so that the
    /// largest-magnitude coordinate is positive, relative to that magnitude.
    pub fn min_margin(&self) -> f64 {
        let v = self.normalized(Normalization::MaxAbs).to_f64();
        v.coords.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl PluckerVector<f64> {
    /// Relative distance between two projective points: `|a - s b| / |a|`
    /// minimized over scalars `s`.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        projective_distance(&self.coords, &other.coords)
    }
}

/// `min_s |a - s b| / |a|`, the distance between the lines through `a` and `b`.
pub fn projective_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let bb: f64 = b.iter().map(|y| y * y).sum();
    let aa: f64 = a.iter().map(|x| x * x).sum();
    if bb == 0.0 || aa == 0.0 {
        return if aa == bb { 0.0 } else { f64::INFINITY };
    }
    let s = ab / bb;
    let r: f64 = a.iter().zip(b).map(|(x, y)| (x - s * y).powi(2)).sum();
    (r / aa).sqrt()
}

/// Unnormalized maximal minors.
pub fn plucker_raw<T: Scalar>(m: &Matrix<T>) -> Result<PluckerVector<T>> {
    let (k, n) = m.shape();
    if k > n {
        return Err(Error::NotGrassmannianPoint { rows: k, cols: n });
    }
    let coords = k_subsets(n, k)
        .iter()
        .map(|cols| m.select_columns(cols).det())
        .collect::<Result<Vec<T>>>()?;
    let full_rank = if T::EXACT {
        coords.iter().any(|c| !c.is_zero())
    } else {
        let hadamard: f64 = (0..k)
            .map(|i| m.row(i).iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt())
            .product();
        let max = coords.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max);
        hadamard > 0.0 && max > FLOAT_RANK_TOL * hadamard
    };
    if !full_rank {
        return Err(Error::NotGrassmannianPoint { rows: k, cols: n });
    }
    Ok(PluckerVector {
        k,
        n,
        coords,
        normalization: Normalization::Raw,
    })
}

/// Plücker coordinates with the backend's default normalization.
pub fn plucker<T: Scalar>(m: &Matrix<T>) -> Result<PluckerVector<T>> {
    Ok(plucker_raw(m)?.normalized(Normalization::default_for::<T>()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositivityClass {
    /// All coordinates share a strict sign; `weakest` is the subset with the
    /// smallest magnitude.
    TotallyPositive { weakest: Vec<usize> },
    /// Weakly one sign with at least one (near-)zero coordinate.
    Boundary { zero_at: Vec<usize> },
    /// Coordinates of both strict signs.
    NotTnn {
        positive_at: Vec<usize>,
        negative_at: Vec<usize>,
    },
}

impl PositivityClass {
    pub fn is_tnn(&self) -> bool {
        !matches!(self, PositivityClass::NotTnn { .. })
    }

    pub fn is_tp(&self) -> bool {
        matches!(self, PositivityClass::TotallyPositive { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            PositivityClass::TotallyPositive { .. } => "TP",
            PositivityClass::Boundary { .. } => "TNN_boundary",
            PositivityClass::NotTnn { .. } => "not_TNN",
        }
    }
}

/// Classifies `p` as it is stored; callers wanting a scale-free tolerance
/// should normalize first.
pub fn classify_positivity<T: Scalar>(p: &PluckerVector<T>, tol: f64) -> PositivityClass {
    let subsets = p.subsets();
    let mut first_pos = None;
    let mut first_neg = None;
    let mut first_zero = None;
    let mut weakest: Option<(usize, f64)> = None;
    for (idx, c) in p.coords.iter().enumerate() {
        match c.sign_tol(tol) {
            Sign::Positive => {
                first_pos.get_or_insert(idx);
            }
            Sign::Negative => {
                first_neg.get_or_insert(idx);
            }
            Sign::Zero => {
                first_zero.get_or_insert(idx);
            }
        }
        let mag = c.to_f64().abs();
        if weakest.is_none_or(|(_, w)| mag < w) {
            weakest = Some((idx, mag));
        }
    }
    match (first_pos, first_neg, first_zero) {
        (Some(pos), Some(neg), _) => PositivityClass::NotTnn {
            positive_at: subsets[pos].clone(),
            negative_at: subsets[neg].clone(),
        },
        (_, _, Some(z)) => PositivityClass::Boundary {
            zero_at: subsets[z].clone(),
        },
        _ => PositivityClass::TotallyPositive {
            weakest: subsets[weakest.map_or(0, |w| w.0)].clone(),
        },
    }
}

/// `sum_I det(M0_I) det(M_I)`, which equals `det(M0 M^T)`.
pub fn cauchy_binet<T: Scalar>(m0: &Matrix<T>, m: &Matrix<T>) -> Result<T> {
    if m0.shape() != m.shape() || m0.rows() > m0.cols() {
        return Err(Error::ShapeMismatch {
            op: "cauchy_binet",
            left: m0.shape(),
            right: m.shape(),
        });
    }
    let (k, n) = m.shape();
    let mut sum = T::zero();
    for cols in k_subsets(n, k) {
        let a = m0.select_columns(&cols).det()?;
        if a.is_zero() {
            continue;
        }
        sum = sum + a * m.select_columns(&cols).det()?;
    }
    Ok(sum)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SampleKind {
    /// Rows `(x_i^(j-1))_j` with `0 < x_1 < .. < x_k`; every maximal minor is a
    /// positive generalized Vandermonde determinant.
    TpVandermonde,
    /// Span of the standard basis vectors indexed by the given 0-based
    /// subset, or a seed-chosen one when `None`.
    BoundaryCoordinate(Option<Vec<usize>>),
    /// Random small rational entries, resampled until full rank.
    Generic,
    /// A Vandermonde point or a coordinate subspace, multiplied on the right
    /// by random elementary bidiagonal factors `1 + a E_{i,i+1}` and
    /// `1 + a E_{i+1,i}` with `a >= 0`. Right multiplication by a totally
    /// nonnegative matrix preserves total nonnegativity, so the result is
    /// TNN and may lie on the boundary.
    RandomTnn,
}

pub fn sample_point<T: Scalar>(kind: &SampleKind, k: usize, n: usize, seed: u64) -> Result<Matrix<T>> {
    if k == 0 || k >= n {
        return Err(Error::InvalidDimensions(format!("need 0 < k < n, got k={k}, n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SampleKind::TpVandermonde => {
            let mut xs: Vec<i64> = (1..=4 * k as i64).collect();
            xs.shuffle(&mut rng);
            let mut xs = xs[..k].to_vec();
            xs.sort_unstable();
            Ok(Matrix::from_fn(k, n, |i, j| T::from_ratio(xs[i], 2 * k as i64).powi(j as i32)))
        }
        SampleKind::BoundaryCoordinate(subset) => {
            let cols = match subset {
                Some(s) => {
                    if s.len() != k || s.iter().any(|&c| c >= n) || s.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(Error::InvalidParameter(format!(
                            "coordinate subset {s:?} is not a sorted {k}-subset of 0..{n}"
                        )));
                    }
                    s.clone()
                }
                None => {
                    let mut all: Vec<usize> = (0..n).collect();
                    all.shuffle(&mut rng);
                    let mut s = all[..k].to_vec();
                    s.sort_unstable();
                    s
                }
            };
            Ok(Matrix::from_fn(k, n, |i, j| if cols[i] == j { T::one() } else { T::zero() }))
        }
        SampleKind::RandomTnn => {
            let start = if rng.gen_bool(0.5) {
                SampleKind::TpVandermonde
            } else {
                SampleKind::BoundaryCoordinate(None)
            };
            let mut m: Matrix<T> = sample_point(&start, k, n, rng.gen())?;
            let factors = rng.gen_range(0..=2 * n);
            for _ in 0..factors {
                let i = rng.gen_range(0..n - 1);
                let a = T::from_ratio(rng.gen_range(0..=6), rng.gen_range(1..=3));
                let (from, to) = if rng.gen_bool(0.5) { (i, i + 1) } else { (i + 1, i) };
                for r in 0..k {
                    let v = m[(r, to)].clone() + a.clone() * m[(r, from)].clone();
                    m[(r, to)] = v;
                }
            }
            Ok(m)
        }
        SampleKind::Generic => loop {
            let m = Matrix::from_fn(k, n, |_, _| {
                T::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))
            });
            if m.rank(1e-12) == k {
                return Ok(m);
            }
        },
    }
}
