//! Numeric search for points of `X_n = Gr(n-1, 2n) ∩ H`, and the checks
//! that `exp(t tau)` keeps such points in `H`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::operators::{a_sigma, phi_apply, BigVector, HSubspace};
use crate::cyclic::TauEigensystem;
use crate::error::{Error, Result};
use crate::grassmann::{classify_positivity, plucker_raw, projective_distance, Normalization, PluckerVector};
use crate::matrix::Matrix;
use crate::subsets::{k_subsets, sort_with_sign, subset_rank};

const MAX_ATTEMPTS: usize = 40;
const MAX_ITERATIONS: usize = 300;

/// Quadratic Grassmann–Plücker relations for `Gr(k, m)`, each a list of
/// `(sign, a, b)` meaning `sign * p_a * p_b`.
pub fn plucker_relations(k: usize, m: usize) -> Vec<Vec<(f64, usize, usize)>> {
    let mut out = Vec::new();
    if k == 0 || k >= m {
        return out;
    }
    for small in k_subsets(m, k - 1) {
        for big in k_subsets(m, k + 1) {
            let mut terms = Vec::new();
            for (a, &j) in big.iter().enumerate() {
                let mut left = small.clone();
                left.push(j);
                let Some((left_sorted, sign)) = sort_with_sign(&left) else {
                    continue;
                };
                let right: Vec<usize> = big.iter().copied().filter(|&x| x != j).collect();
                let s = if a % 2 == 0 { sign } else { -sign } as f64;
                terms.push((s, subset_rank(&left_sorted, m), subset_rank(&right, m)));
            }
            if !terms.is_empty() {
                out.push(terms);
            }
        }
    }
    out
}

/// `max |relation(p)| / max|p|^2`.
pub fn plucker_relation_residual(p: &[f64], k: usize, m: usize) -> f64 {
    let scale = p.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    if scale == 0.0 {
        return f64::INFINITY;
    }
    plucker_relations(k, m)
        .iter()
        .map(|terms| terms.iter().map(|&(s, a, b)| s * p[a] * p[b]).sum::<f64>().abs())
        .fold(0.0, f64::max)
        / (scale * scale)
}

/// A `k x m` matrix whose Plücker vector is proportional to `p`, assuming
/// `p` satisfies the relations: columns `I0 = argmax |p|` form the identity
/// and the other entries are ratios `p_{I0 - i_r + j} / p_{I0}`.
pub fn lift_to_matrix(p: &[f64], k: usize, m: usize) -> Result<Matrix<f64>> {
    let subsets = k_subsets(m, k);
    if p.len() != subsets.len() {
        return Err(Error::InvalidDimensions(format!(
            "Gr({k},{m}) needs {} coordinates, got {}",
            subsets.len(),
            p.len()
        )));
    }
    let (best, pivot) = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, v)| (i, *v))
        .ok_or(Error::ZeroPoint)?;
    if pivot == 0.0 {
        return Err(Error::ZeroPoint);
    }
    let i0 = &subsets[best];
    Ok(Matrix::from_fn(k, m, |r, j| {
        if let Some(pos) = i0.iter().position(|&x| x == j) {
            return if pos == r { 1.0 } else { 0.0 };
        }
        let mut cols = i0.clone();
        cols[r] = j;
        match sort_with_sign(&cols) {
            Some((sorted, sign)) => sign as f64 * p[subset_rank(&sorted, m)] / pivot,
            None => 0.0,
        }
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct XnResult {
    pub n: usize,
    pub converged: bool,
    pub attempts: usize,
    pub iterations: usize,
    /// `(n-1) x 2n` representative, rows as vectors.
    pub matrix: Vec<Vec<f64>>,
    /// Coefficient of each `A_sigma`, normalized to sum 1, keyed by partition.
    pub coefficients: Vec<(String, f64)>,
    /// Relation residual of the candidate Plücker vector `sum c_sigma A_sigma`.
    pub plucker_residual: f64,
    /// Distance from the Plücker vector of `matrix` to `H`.
    pub h_residual: f64,
    /// Projective distance between the candidate and the Plücker vector of `matrix`.
    pub lift_error: f64,
    pub tnn: bool,
}

impl XnResult {
    pub fn matrix(&self) -> Matrix<f64> {
        Matrix::from_rows(self.matrix.clone()).expect("rectangular")
    }
}

/// Searches for a totally nonnegative point of `X_n` as `p = sum c_sigma A_sigma`
/// with `c = exp(w) > 0`, driving the Plücker relations to zero by damped
/// Gauss–Newton (Levenberg–Marquardt) from random starts. A run that never
/// reaches `tol` is reported with `converged = false`.
pub fn xn_search(h: &HSubspace, seed: u64, tol: f64) -> Result<XnResult> {
    let n = h.n;
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("xn_search supports n in {{2, 3}}, got {n}")));
    }
    let (k, m) = (n - 1, 2 * n);
    let basis: Vec<Vec<f64>> = h.partitions.iter().map(|s| a_sigma(s).coords.iter().map(|&c| c as f64).collect()).collect();
    let relations = plucker_relations(k, m);
    let dim = basis[0].len();
    let nc = basis.len();
    let combine = |c: &[f64]| -> Vec<f64> {
        (0..dim).map(|q| (0..nc).map(|s| c[s] * basis[s][q]).sum()).collect()
    };
    // residuals: every relation, then sum(c) - 1
    let residuals = |c: &[f64]| -> Vec<f64> {
        let p = combine(c);
        let mut r: Vec<f64> = relations
            .iter()
            .map(|terms| terms.iter().map(|&(s, a, b)| s * p[a] * p[b]).sum())
            .collect();
        r.push(c.iter().sum::<f64>() - 1.0);
        r
    };
    let jacobian = |c: &[f64]| -> Matrix<f64> {
        let p = combine(c);
        let rows = relations.len() + 1;
        let mut jm = Matrix::zeros(rows, nc);
        for (r, terms) in relations.iter().enumerate() {
            for s in 0..nc {
                let d: f64 = terms
                    .iter()
                    .map(|&(sg, a, b)| sg * (basis[s][a] * p[b] + p[a] * basis[s][b]))
                    .sum();
                jm[(r, s)] = d * c[s];
            }
        }
        for s in 0..nc {
            jm[(rows - 1, s)] = c[s];
        }
        jm
    };
    let cost = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total_iterations = 0;
    let mut last: Option<(Vec<f64>, f64)> = None;
    for attempt in 1..=MAX_ATTEMPTS {
        let mut w: Vec<f64> = (0..nc).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let total: f64 = w.iter().map(|x| x.exp()).sum();
        w.iter_mut().for_each(|x| *x -= total.ln());
        let mut mu = 1e-3;
        let mut c: Vec<f64> = w.iter().map(|x| x.exp()).collect();
        let mut r = residuals(&c);
        for _ in 0..MAX_ITERATIONS {
            let rel = plucker_relation_residual(&combine(&c), k, m);
            if rel < tol * 1e-2 && r[r.len() - 1].abs() < 1e-12 {
                break;
            }
            total_iterations += 1;
            let j = jacobian(&c);
            let jt = j.transpose();
            let jtj = jt.matmul(&j)?;
            let g = jt.matmul(&Matrix::new(r.len(), 1, r.clone())?)?;
            let mut improved = false;
            for _ in 0..30 {
                let mut a = jtj.clone();
                for d in 0..nc {
                    a[(d, d)] += mu * (1.0 + jtj[(d, d)]);
                }
                let Ok(step) = a.solve(&g) else {
                    mu *= 10.0;
                    continue;
                };
                let w_new: Vec<f64> = w.iter().enumerate().map(|(i, x)| x - step[(i, 0)]).collect();
                let c_new: Vec<f64> = w_new.iter().map(|x| x.exp()).collect();
                let r_new = residuals(&c_new);
                if cost(&r_new) < cost(&r) {
                    w = w_new;
                    c = c_new;
                    r = r_new;
                    mu = (mu / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        let rel = plucker_relation_residual(&combine(&c), k, m);
        if rel < tol {
            return finish(h, &basis, &c, k, m, attempt, total_iterations, true, tol);
        }
        if last.as_ref().is_none_or(|(_, best)| rel < *best) {
            last = Some((c, rel));
        }
    }
    let (c, _) = last.expect("at least one attempt");
    finish(h, &basis, &c, k, m, MAX_ATTEMPTS, total_iterations, false, tol)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    h: &HSubspace,
    basis: &[Vec<f64>],
    c: &[f64],
    k: usize,
    m: usize,
    attempts: usize,
    iterations: usize,
    converged: bool,
    tol: f64,
) -> Result<XnResult> {
    let total: f64 = c.iter().sum();
    let c: Vec<f64> = c.iter().map(|x| x / total).collect();
    let dim = basis[0].len();
    let p: Vec<f64> = (0..dim).map(|q| c.iter().zip(basis).map(|(cs, b)| cs * b[q]).sum()).collect();
    let plucker_residual = plucker_relation_residual(&p, k, m);
    let matrix = lift_to_matrix(&p, k, m)?;
    let actual = plucker_raw(&matrix)?;
    let h_residual = h.residual(actual.coords())?;
    let lift_error = projective_distance(actual.coords(), &p);
    let tnn = classify_positivity(&actual.normalized(Normalization::MaxAbs), tol).is_tnn();
    Ok(XnResult {
        n: h.n,
        converged: converged && h_residual < tol,
        attempts,
        iterations,
        matrix: matrix.to_rows(),
        coefficients: h.partitions.iter().map(|s| s.to_string()).zip(c).collect(),
        plucker_residual,
        h_residual,
        lift_error,
        tnn,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowInvariance {
    pub t: f64,
    pub h_residual: f64,
    /// Smallest coordinate of the max-abs normalized Plücker vector.
    pub min_plucker: f64,
}

/// H-residual and positivity margin of `exp(t tau) . X` along `ts`.
pub fn flow_invariance(h: &HSubspace, x: &Matrix<f64>, ts: &[f64]) -> Result<Vec<FlowInvariance>> {
    let eig = TauEigensystem::new(h.n - 1, 2 * h.n)?;
    ts.iter()
        .map(|&t| {
            let p = plucker_raw(&eig.flow_grassmann(t, x)?)?;
            let normalized = p.normalized(Normalization::MaxAbs);
            Ok(FlowInvariance {
                t,
                h_residual: h.residual(p.coords())?,
                min_plucker: normalized.coords().iter().copied().fold(f64::INFINITY, f64::min),
            })
        })
        .collect()
}

/// Relative error between the central difference
/// `(Delta(X exp(h tau)) - Delta(X exp(-h tau))) / 2h` of the raw minors and
/// `Phi(Delta(X))`.
pub fn phi_first_order_error(x: &Matrix<f64>, step: f64) -> Result<f64> {
    let (k, m) = x.shape();
    if m % 2 != 0 || k + 1 != m / 2 {
        return Err(Error::InvalidDimensions(format!("expected an (n-1) x 2n matrix, got {k}x{m}")));
    }
    let n = m / 2;
    let eig = TauEigensystem::new(k, m)?;
    let base = plucker_raw(x)?;
    let plus = plucker_raw(&eig.flow_grassmann(step, x)?)?;
    let minus = plucker_raw(&eig.flow_grassmann(-step, x)?)?;
    let fd: Vec<f64> = plus
        .coords()
        .iter()
        .zip(minus.coords())
        .map(|(a, b)| (a - b) / (2.0 * step))
        .collect();
    let phi = phi_apply(&BigVector {
        n,
        coords: base.coords().to_vec(),
    });
    let num = fd.iter().zip(&phi.coords).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let den = phi.coords.iter().map(|b| b * b).sum::<f64>().sqrt();
    if den == 0.0 {
        return Err(Error::ZeroPoint);
    }
    Ok(num / den)
}

/// The Plücker vector of a lifted point, for reporting.
pub fn plucker_of(x: &Matrix<f64>) -> Result<PluckerVector<f64>> {
    Ok(plucker_raw(x)?.normalized(Normalization::MaxAbs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::electrical::operators::h_subspace;

    #[test]
    fn relations_vanish_on_matrices() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0, 0.5, -1.0, 3.0], vec![0.0, 1.0, 4.0, 2.0, -2.0]]).unwrap();
        let p = plucker_raw(&m).unwrap();
        assert!(plucker_relation_residual(p.coords(), 2, 5) < 1e-14);
        let bad = vec![1.0; 10];
        assert!(plucker_relation_residual(&bad, 2, 5) > 0.1);
    }

    #[test]
    fn lift_reproduces_plucker() {
        let m = Matrix::from_rows(vec![vec![1.0, 0.3, 0.5, 0.2, 0.1, 0.7], vec![0.0, 1.0, 0.4, 0.9, 0.2, 0.3]]).unwrap();
        let p = plucker_raw(&m).unwrap();
        let lifted = lift_to_matrix(p.coords(), 2, 6).unwrap();
        let q = plucker_raw(&lifted).unwrap();
        assert!(projective_distance(q.coords(), p.coords()) < 1e-13);
    }

    #[test]
    fn n2_is_immediate() {
        let h = h_subspace(2).unwrap();
        let r = xn_search(&h, 0, 1e-10).unwrap();
        assert!(r.converged && r.tnn);
        assert!(r.h_residual < 1e-12);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn n3_search_converges() {
        let h = h_subspace(3).unwrap();
        let r = xn_search(&h, 1, 1e-10).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(r.plucker_residual < 1e-10 && r.h_residual < 1e-10);
        let x = r.matrix();
        for f in flow_invariance(&h, &x, &[0.25, 0.5, 1.0]).unwrap() {
            assert!(f.h_residual < 1e-8, "{f:?}");
            assert!(f.min_plucker > 0.0);
        }
        assert!(phi_first_order_error(&x, 1e-4).unwrap() < 1e-4);
    }
}
