//! The signed cyclic shift on `R^n`, the eigensystem of `tau = S + S^T`,
//! the chart `phi` around the fixed point `X0`, and the contractive flow
//! `exp(t tau)` read in that chart.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::flow::{euclidean_norm, ContractiveFlow, Membership};
use crate::grassmann::{classify_positivity, plucker_raw, Normalization, PluckerVector, PositivityClass};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::subsets::{k_subsets, sort_with_sign, subset_rank};

/// Residual allowed when validating a user-supplied eigenbasis.
const BASIS_TOL: f64 = 1e-9;

/// A block `C_L` of the eigenbasis coordinates with
/// `|det C_L| <= CHART_TOL * prod(row norms)` is treated as singular.
const CHART_TOL: f64 = 1e-12;

fn check_kn(k: usize, n: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::InvalidDimensions(format!("need 0 < k < n, got k={k}, n={n}")));
    }
    Ok(())
}

/// `(-1)^(k-1)`.
pub fn shift_sign(k: usize) -> i64 {
    if k % 2 == 1 {
        1
    } else {
        -1
    }
}

/// `S`, its transpose, and `tau`, all acting on column vectors.
#[derive(Clone, Debug)]
pub struct CyclicOperators<T> {
    pub k: usize,
    pub n: usize,
    pub s: Matrix<T>,
    pub s_t: Matrix<T>,
    pub tau: Matrix<T>,
}

pub fn build_operators<T: Scalar>(k: usize, n: usize) -> Result<CyclicOperators<T>> {
    check_kn(k, n)?;
    let sign = T::from_ratio(shift_sign(k), 1);
    let mut s = Matrix::zeros(n, n);
    for i in 0..n - 1 {
        s[(i, i + 1)] = T::one();
    }
    s[(n - 1, 0)] = s[(n - 1, 0)].clone() + sign;
    let s_t = s.transpose();
    let tau = s.add(&s_t)?;
    Ok(CyclicOperators { k, n, s, s_t, tau })
}

/// Closed-form spectrum of `tau` in descending order.
pub fn tau_eigenvalues(k: usize, n: usize) -> Result<Vec<f64>> {
    check_kn(k, n)?;
    Ok(modes(k, n).iter().map(|&(m, _)| 2.0 * (PI * m as f64 / n as f64).cos()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    Cos,
    Sin,
}

/// `(m, part)` for each real eigenvector, `0 <= m <= n`, `m = k-1 mod 2`,
/// ordered by `m` and then cosine before sine.
fn modes(k: usize, n: usize) -> Vec<(usize, Part)> {
    let mut out = Vec::with_capacity(n);
    let mut m = (k - 1) % 2;
    while m <= n {
        if m == 0 || m == n {
            out.push((m, Part::Cos));
        } else {
            out.push((m, Part::Cos));
            out.push((m, Part::Sin));
        }
        m += 2;
    }
    out
}

/// Orthonormal eigenvectors `u_1..u_n` of `tau` (rows of `u`) with
/// eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct TauEigensystem {
    k: usize,
    n: usize,
    lambdas: Vec<f64>,
    u: Matrix<f64>,
}

impl TauEigensystem {
    /// The closed-form basis: real and imaginary parts of
    /// `(1, zeta, .., zeta^(n-1))` with `zeta = exp(i pi m / n)`, with `u_1`
    /// negated if needed so that `u_1..u_k` has positive leading minor.
    pub fn new(k: usize, n: usize) -> Result<Self> {
        check_kn(k, n)?;
        let nf = n as f64;
        let mut data = Vec::with_capacity(n * n);
        for (m, part) in modes(k, n) {
            let scale = if m == 0 || m == n { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
            for j in 0..n {
                let theta = PI * (m * j) as f64 / nf;
                let v = match part {
                    Part::Cos => theta.cos(),
                    Part::Sin => theta.sin(),
                };
                data.push(scale * v);
            }
        }
        let u = Matrix::new(n, n, data)?;
        let lambdas = tau_eigenvalues(k, n)?;
        let mut sys = Self { k, n, lambdas, u };
        if sys.leading_minor()? < 0.0 {
            sys = sys.with_first_flipped();
        }
        Ok(sys)
    }

    /// Uses the rows of `basis` (normalized here) as `u_1..u_n`. Each row must
    /// be an eigenvector of `tau`, the rows must be orthogonal, and the
    /// resulting eigenvalues must be weakly decreasing with a gap at `k`.
    pub fn from_basis(k: usize, n: usize, basis: &Matrix<f64>) -> Result<Self> {
        check_kn(k, n)?;
        if basis.shape() != (n, n) {
            return Err(Error::InvalidDimensions(format!(
                "eigenbasis must be {n}x{n}, got {}x{}",
                basis.rows(),
                basis.cols()
            )));
        }
        let tau = build_operators::<f64>(k, n)?.tau;
        let mut rows = basis.to_rows();
        let mut lambdas = Vec::with_capacity(n);
        for (i, row) in rows.iter_mut().enumerate() {
            let norm = euclidean_norm(row);
            if norm == 0.0 {
                return Err(Error::InvalidParameter(format!("eigenbasis row {} is zero", i + 1)));
            }
            row.iter_mut().for_each(|x| *x /= norm);
            let tv: Vec<f64> = (0..n).map(|a| (0..n).map(|b| tau[(a, b)] * row[b]).sum()).collect();
            let lambda: f64 = tv.iter().zip(row.iter()).map(|(x, y)| x * y).sum();
            let resid = euclidean_norm(&tv.iter().zip(row.iter()).map(|(x, y)| x - lambda * y).collect::<Vec<_>>());
            if resid > BASIS_TOL {
                return Err(Error::InvalidParameter(format!(
                    "eigenbasis row {} is not an eigenvector of tau (residual {resid:e})",
                    i + 1
                )));
            }
            lambdas.push(lambda);
        }
        let u = Matrix::from_rows(rows)?;
        let gram = u.matmul(&u.transpose())?;
        if gram.max_abs_diff(&Matrix::identity(n)) > BASIS_TOL {
            return Err(Error::InvalidParameter("eigenbasis rows are not orthogonal".into()));
        }
        if lambdas.windows(2).any(|w| w[1] > w[0] + BASIS_TOL) {
            return Err(Error::InvalidParameter("eigenvalues must be weakly decreasing".into()));
        }
        if lambdas[k - 1] - lambdas[k] <= BASIS_TOL {
            return Err(Error::InvalidParameter("no spectral gap between u_k and u_(k+1)".into()));
        }
        Ok(Self { k, n, lambdas, u })
    }

    /// The same system with `u_1` negated.
    pub fn with_first_flipped(mut self) -> Self {
        for j in 0..self.n {
            self.u[(0, j)] = -self.u[(0, j)];
        }
        self
    }

    fn leading_minor(&self) -> Result<f64> {
        let idx: Vec<usize> = (0..self.k).collect();
        self.u.submatrix(&idx, &idx).det()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Rows `u_1..u_n`.
    pub fn basis(&self) -> &Matrix<f64> {
        &self.u
    }

    /// The `k x n` matrix with rows `u_1..u_k`, representing `X0`.
    pub fn x0(&self) -> Matrix<f64> {
        self.u.select_rows(&(0..self.k).collect::<Vec<_>>())
    }

    /// `lambda_k - lambda_(k+1)`.
    pub fn spectral_gap(&self) -> f64 {
        self.lambdas[self.k - 1] - self.lambdas[self.k]
    }

    /// `(i, j) -> lambda_(k+j) - lambda_i`, all negative.
    pub fn chart_rates(&self) -> Matrix<f64> {
        Matrix::from_fn(self.k, self.n - self.k, |i, j| self.lambdas[self.k + j] - self.lambdas[i])
    }

    /// `[I | A] U`: row `i` is `u_i + sum_j A_ij u_(k+j)`.
    pub fn chart_embed(&self, a: &ChartPoint) -> Result<Matrix<f64>> {
        self.check_chart(a)?;
        let (k, n) = (self.k, self.n);
        let coeffs = Matrix::from_fn(k, n, |i, j| {
            if j < k {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            } else {
                a.a[(i, j - k)]
            }
        });
        coeffs.matmul(&self.u)
    }

    /// The unique `A` with `phi(A) = rowspan(M)`.
    pub fn chart_invert(&self, m: &Matrix<f64>) -> Result<ChartPoint> {
        let (k, n) = (self.k, self.n);
        if m.shape() != (k, n) {
            return Err(Error::ShapeMismatch {
                op: "chart_invert",
                left: (k, n),
                right: m.shape(),
            });
        }
        let c = m.matmul(&self.u.transpose())?;
        let left: Vec<usize> = (0..k).collect();
        let right: Vec<usize> = (k..n).collect();
        let rows: Vec<usize> = (0..k).collect();
        let cl = c.submatrix(&rows, &left);
        let bound: f64 = (0..k).map(|i| euclidean_norm(c.row(i))).product();
        let det = cl.det()?;
        if !(det.abs() > CHART_TOL * bound) {
            return Err(Error::OutsideChart);
        }
        let a = cl.solve(&c.submatrix(&rows, &right)).map_err(|_| Error::OutsideChart)?;
        Ok(ChartPoint { a })
    }

    /// `A_ij -> exp(t (lambda_(k+j) - lambda_i)) A_ij`.
    pub fn flow_chart(&self, t: f64, a: &ChartPoint) -> Result<ChartPoint> {
        self.check_chart(a)?;
        let rates = self.chart_rates();
        let (r, c) = a.a.shape();
        Ok(ChartPoint {
            a: Matrix::from_fn(r, c, |i, j| (t * rates[(i, j)]).exp() * a.a[(i, j)]),
        })
    }

    /// `exp(t tau) = sum_i exp(t lambda_i) u_i^T u_i`.
    pub fn exp_tau(&self, t: f64) -> Matrix<f64> {
        let n = self.n;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            let w = (t * self.lambdas[i]).exp();
            for a in 0..n {
                let ua = w * self.u[(i, a)];
                for b in 0..n {
                    out[(a, b)] += ua * self.u[(i, b)];
                }
            }
        }
        out
    }

    /// `exp(t tau) . rowspan(M)`, represented by `M exp(t tau)`.
    pub fn flow_grassmann(&self, t: f64, m: &Matrix<f64>) -> Result<Matrix<f64>> {
        if m.cols() != self.n {
            return Err(Error::ShapeMismatch {
                op: "flow_grassmann",
                left: (self.k, self.n),
                right: m.shape(),
            });
        }
        m.matmul(&self.exp_tau(t))
    }

    fn check_chart(&self, a: &ChartPoint) -> Result<()> {
        if a.a.shape() != (self.k, self.n - self.k) {
            return Err(Error::ShapeMismatch {
                op: "chart point",
                left: (self.k, self.n - self.k),
                right: a.a.shape(),
            });
        }
        Ok(())
    }
}

/// A `k x (n-k)` matrix of chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    pub a: Matrix<f64>,
}

impl ChartPoint {
    pub fn new(a: Matrix<f64>) -> Self {
        Self { a }
    }

    pub fn zeros(k: usize, n: usize) -> Self {
        Self {
            a: Matrix::zeros(k, n - k),
        }
    }

    /// Row-major entries.
    pub fn from_flat(k: usize, n: usize, entries: &[f64]) -> Result<Self> {
        Ok(Self {
            a: Matrix::new(k, n - k, entries.to_vec())?,
        })
    }

    pub fn flat(&self) -> Vec<f64> {
        self.a.data().to_vec()
    }

    pub fn norm(&self) -> f64 {
        self.a.norm()
    }
}

/// `prod_{i<j in I} sin((j - i) pi / n)` for every k-subset `I`, unnormalized.
pub fn x0_plucker(k: usize, n: usize) -> Result<PluckerVector<f64>> {
    check_kn(k, n)?;
    let coords = k_subsets(n, k)
        .iter()
        .map(|s| {
            let mut p = 1.0;
            for a in 0..s.len() {
                for b in a + 1..s.len() {
                    p *= (PI * (s[b] - s[a]) as f64 / n as f64).sin();
                }
            }
            p
        })
        .collect();
    PluckerVector::new(k, n, coords)
}

/// The k-subsets reached from `subset` by adding `eps_a` to the `a`-th
/// element mod `n`, with the sign `(-1)^(k-1)` per wrap times the parity of
/// re-sorting. Collisions are dropped.
fn shifted_terms(subset: &[usize], n: usize, k: usize, eps: u32) -> Option<(Vec<usize>, i32)> {
    let mut wraps = 0;
    let cols: Vec<usize> = subset
        .iter()
        .enumerate()
        .map(|(a, &i)| {
            if eps >> a & 1 == 1 {
                if i + 1 == n {
                    wraps += 1;
                    0
                } else {
                    i + 1
                }
            } else {
                i
            }
        })
        .collect();
    let (sorted, parity) = sort_with_sign(&cols)?;
    let wrap_sign = if shift_sign(k) < 0 && wraps % 2 == 1 { -1 } else { 1 };
    Some((sorted, parity * wrap_sign))
}

/// The subsets `I'` obtained from `I` by increasing one element by one
/// mod `n` (skipping collisions), each with its sign. The sign is always `+1`
/// for the signed shift; it is returned so callers can check that.
pub fn shift_neighbors(subset: &[usize], n: usize) -> Vec<(Vec<usize>, i32)> {
    let k = subset.len();
    (0..k).filter_map(|a| shifted_terms(subset, n, k, 1 << a)).collect()
}

/// Plücker coordinates of `(1 + tS) . M`, computed from the minors of the
/// transformed matrix and from the multilinear expansion over `eps in {0,1}^k`.
#[derive(Clone, Debug)]
pub struct ShiftExpansion<T> {
    pub direct: PluckerVector<T>,
    pub expansion: PluckerVector<T>,
}

impl<T: Scalar> ShiftExpansion<T> {
    pub fn agree(&self, tol: f64) -> bool {
        self.direct
            .coords()
            .iter()
            .zip(self.expansion.coords())
            .all(|(a, b)| {
                let d = a.clone() - b.clone();
                if T::EXACT {
                    d.is_zero()
                } else {
                    d.to_f64().abs() <= tol
                }
            })
    }
}

pub fn shift_plucker_expansion<T: Scalar>(t: &T, m: &Matrix<T>) -> Result<ShiftExpansion<T>> {
    let (k, n) = m.shape();
    check_kn(k, n)?;
    let ops = build_operators::<T>(k, n)?;
    let g = Matrix::identity(n).add(&ops.s.scale(t))?;
    let moved = m.matmul(&g.transpose())?;
    let direct = plucker_raw(&moved)?;
    let base = plucker_raw(m)?;

    let coords = k_subsets(n, k)
        .iter()
        .map(|s| {
            let mut acc = T::zero();
            for eps in 0..(1u32 << k) {
                if let Some((cols, sign)) = shifted_terms(s, n, k, eps) {
                    let term = t.powi(eps.count_ones() as i32) * base.coords()[subset_rank(&cols, n)].clone();
                    acc = if sign > 0 { acc + term } else { acc - term };
                }
            }
            acc
        })
        .collect();
    Ok(ShiftExpansion {
        direct,
        expansion: PluckerVector::new(k, n, coords)?,
    })
}

/// `sum_{I'} Delta_{I'}` over the shift neighbors of each `I`: the first-order
/// coefficient of `Delta_I(exp(tS) X)` at `t = 0`.
pub fn shift_first_order<T: Scalar>(p: &PluckerVector<T>) -> Vec<T> {
    let n = p.n();
    p.subsets()
        .iter()
        .map(|s| {
            shift_neighbors(s, n).into_iter().fold(T::zero(), |acc, (cols, sign)| {
                let v = p.coords()[subset_rank(&cols, n)].clone();
                if sign > 0 {
                    acc + v
                } else {
                    acc - v
                }
            })
        })
        .collect()
}

/// `exp(t tau)` on `Gr(k, n)` read in chart coordinates, with region
/// `phi^-1(Gr_>0)`.
#[derive(Clone, Debug)]
pub struct GrChartFlow {
    eig: TauEigensystem,
}

impl GrChartFlow {
    pub fn new(eig: TauEigensystem) -> Self {
        Self { eig }
    }

    pub fn eigensystem(&self) -> &TauEigensystem {
        &self.eig
    }

    fn chart(&self, p: &[f64]) -> ChartPoint {
        ChartPoint::from_flat(self.eig.k, self.eig.n, p).expect("point dimension matches the chart")
    }

    /// Positivity class of `phi(A)` after max-abs normalization.
    pub fn classify(&self, p: &[f64], tol: f64) -> PositivityClass {
        let m = self.eig.chart_embed(&self.chart(p)).expect("chart shape checked");
        match plucker_raw(&m) {
            Ok(pv) => classify_positivity(&pv.normalized(Normalization::MaxAbs), tol),
            Err(_) => PositivityClass::NotTnn {
                positive_at: Vec::new(),
                negative_at: Vec::new(),
            },
        }
    }
}

impl ContractiveFlow for GrChartFlow {
    fn dim(&self) -> usize {
        self.eig.k * (self.eig.n - self.eig.k)
    }

    fn flow(&self, t: f64, p: &[f64]) -> Vec<f64> {
        self.eig.flow_chart(t, &self.chart(p)).expect("chart shape checked").flat()
    }

    fn norm(&self, p: &[f64]) -> f64 {
        euclidean_norm(p)
    }

    fn membership(&self, p: &[f64], tol: f64) -> Membership {
        match self.classify(p, tol) {
            PositivityClass::TotallyPositive { .. } => Membership::Interior,
            PositivityClass::Boundary { .. } => Membership::ClosureBoundary,
            PositivityClass::NotTnn { .. } => Membership::Outside,
        }
    }

    fn exit_search_limit(&self) -> f64 {
        60.0 / self.eig.spectral_gap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{plucker, sample_point, SampleKind};
    use crate::scalar::{rat, Rational};

    #[test]
    fn operators_shape() {
        let ops = build_operators::<Rational>(2, 4).unwrap();
        assert_eq!(ops.tau[(0, 3)], rat(-1, 1));
        assert_eq!(ops.tau[(3, 0)], rat(-1, 1));
        assert_eq!(ops.tau, ops.tau.transpose());
        assert_eq!(ops.s.matmul(&ops.s_t).unwrap(), ops.s_t.matmul(&ops.s).unwrap());
        let ops = build_operators::<f64>(1, 4).unwrap();
        assert_eq!(ops.tau[(0, 3)], 1.0);
    }

    #[test]
    fn closed_form_basis_is_orthonormal_eigenbasis() {
        for n in 2..9 {
            for k in 1..n {
                let e = TauEigensystem::new(k, n).unwrap();
                let u = e.basis();
                assert!(u.matmul(&u.transpose()).unwrap().max_abs_diff(&Matrix::identity(n)) < 1e-12);
                let tau = build_operators::<f64>(k, n).unwrap().tau;
                let d = u.matmul(&tau).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        assert!((d[(i, j)] - e.lambdas()[i] * u[(i, j)]).abs() < 1e-12);
                    }
                }
                assert!(e.spectral_gap() > 0.0);
                assert!(TauEigensystem::from_basis(k, n, u).is_ok());
            }
        }
    }

    #[test]
    fn example_eigenvalues() {
        let r2 = 2f64.sqrt();
        let l = tau_eigenvalues(2, 4).unwrap();
        for (a, b) in l.iter().zip([r2, r2, -r2, -r2]) {
            assert!((a - b).abs() < 1e-15);
        }
        let l = tau_eigenvalues(1, 4).unwrap();
        for (a, b) in l.iter().zip([2.0, 0.0, 0.0, -2.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn x0_matches_eigenvector_minors() {
        for n in 2..8 {
            for k in 1..n {
                let e = TauEigensystem::new(k, n).unwrap();
                let a = plucker(&e.x0()).unwrap();
                let b = x0_plucker(k, n).unwrap().normalized(Normalization::MaxAbs);
                assert!(a.projective_distance(&b) < 1e-12, "k={k} n={n}");
                assert!(a.coords().iter().all(|&c| c > 0.0));
            }
        }
    }

    #[test]
    fn chart_round_trip_and_flow_consistency() {
        let e = TauEigensystem::new(2, 5).unwrap();
        let a = ChartPoint::from_flat(2, 5, &[0.1, -0.3, 0.2, 0.05, 0.4, -0.2]).unwrap();
        let m = e.chart_embed(&a).unwrap();
        assert!(e.chart_invert(&m).unwrap().a.max_abs_diff(&a.a) < 1e-12);
        let t = 0.7;
        let lhs = e.chart_invert(&e.flow_grassmann(t, &m).unwrap()).unwrap();
        let rhs = e.flow_chart(t, &a).unwrap();
        assert!(lhs.a.max_abs_diff(&rhs.a) < 1e-12);
        assert!(e.chart_invert(&e.x0()).unwrap().norm() < 1e-14);
    }

    #[test]
    fn chart_rejects_nontransversal_span() {
        let e = TauEigensystem::new(2, 4).unwrap();
        let m = e.basis().select_rows(&[2, 3]);
        assert!(matches!(e.chart_invert(&m), Err(Error::OutsideChart)));
    }

    #[test]
    fn exp_tau_matches_series() {
        let e = TauEigensystem::new(3, 6).unwrap();
        let tau = build_operators::<f64>(3, 6).unwrap().tau;
        let series = tau.scale(&0.4).expm().unwrap();
        assert!(e.exp_tau(0.4).max_abs_diff(&series) < 1e-12);
    }

    #[test]
    fn shift_expansion_exact() {
        for seed in 0..5 {
            let m: Matrix<Rational> = sample_point(&SampleKind::Generic, 2, 4, seed).unwrap();
            let s = shift_plucker_expansion(&rat(1, 3), &m).unwrap();
            assert!(s.agree(0.0));
            let m: Matrix<Rational> = sample_point(&SampleKind::Generic, 3, 6, seed).unwrap();
            assert!(shift_plucker_expansion(&rat(-2, 7), &m).unwrap().agree(0.0));
        }
    }

    #[test]
    fn shift_expansion_k1() {
        let m = Matrix::from_rows(vec![vec![rat(1, 1), rat(2, 1), rat(-1, 1), rat(5, 1)]]).unwrap();
        let t = rat(1, 2);
        let s = shift_plucker_expansion(&t, &m).unwrap();
        for i in 0..4 {
            let want = m[(0, i)].clone() + t.clone() * m[(0, (i + 1) % 4)].clone();
            assert_eq!(s.direct.coords()[i], want);
        }
        let s0 = shift_plucker_expansion(&rat(0, 1), &m).unwrap();
        assert_eq!(s0.direct.coords(), m.data());
    }

    #[test]
    fn shifted_terms_carry_no_net_sign() {
        for n in 2..9 {
            for k in 1..n {
                for s in k_subsets(n, k) {
                    for eps in 0..(1u32 << k) {
                        if let Some((_, sign)) = shifted_terms(&s, n, k, eps) {
                            assert_eq!(sign, 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn chart_flow_membership() {
        let e = TauEigensystem::new(2, 4).unwrap();
        let flow = GrChartFlow::new(e.clone());
        assert_eq!(flow.membership(&[0.0; 4], 1e-9), Membership::Interior);
        let corner: Matrix<f64> = sample_point(&SampleKind::BoundaryCoordinate(Some(vec![0, 1])), 2, 4, 0).unwrap();
        let c = e.chart_invert(&corner).unwrap();
        assert_eq!(flow.membership(&c.flat(), 1e-9), Membership::ClosureBoundary);
        assert_eq!(flow.membership(&flow.flow(-0.1, &c.flat()), 1e-9), Membership::Outside);
        assert_eq!(flow.membership(&flow.flow(0.1, &c.flat()), 1e-9), Membership::Interior);
    }
}
