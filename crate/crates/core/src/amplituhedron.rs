//! The cyclically symmetric amplituhedron: the image of `Gr_>=0(k, n)`
//! under the projection by `Z0` (rows `u_1..u_(k+m)`), read in the
//! coordinates `A'` of `rowspan [Id_k | A']`.

use serde::Serialize;

use crate::cyclic::{ChartPoint, TauEigensystem};
use crate::error::{Error, Result};
use crate::flow::{euclidean_norm, ContractiveFlow, Membership};
use crate::grassmann::{classify_positivity, plucker_raw, Normalization};
use crate::matrix::Matrix;
use crate::subsets::k_subsets;

/// Minors of `Z0` must exceed this to count as positive.
const Z0_MINOR_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct AmplituhedronSpec {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    eig: TauEigensystem,
    z0: Matrix<f64>,
}

/// `gamma`-coordinates: the `k x m` matrix `A'`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplituhedronPoint {
    pub a: Matrix<f64>,
}

impl AmplituhedronPoint {
    pub fn flat(&self) -> Vec<f64> {
        self.a.data().to_vec()
    }
}

pub fn build_spec(k: usize, m: usize, n: usize) -> Result<AmplituhedronSpec> {
    if k == 0 || m == 0 || m % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "need k >= 1 and m even and positive, got k={k}, m={m}"
        )));
    }
    if k + m > n {
        return Err(Error::InvalidDimensions(format!("need k + m <= n, got {k} + {m} > {n}")));
    }
    let mut eig = TauEigensystem::new(k, n)?;
    let rows: Vec<usize> = (0..k + m).collect();
    let mut z0 = eig.basis().select_rows(&rows);
    let minors = k_subsets(n, k + m)
        .iter()
        .map(|s| z0.select_columns(s).det())
        .collect::<Result<Vec<f64>>>()?;
    if minors.iter().all(|&d| d < -Z0_MINOR_TOL) {
        eig = eig.with_first_flipped();
        z0 = eig.basis().select_rows(&rows);
    } else if !minors.iter().all(|&d| d > Z0_MINOR_TOL) {
        return Err(Error::InvalidParameter("Z0 has maximal minors of mixed sign".into()));
    }
    Ok(AmplituhedronSpec { k, m, n, eig, z0 })
}

impl AmplituhedronSpec {
    pub fn z0(&self) -> &Matrix<f64> {
        &self.z0
    }

    pub fn eigensystem(&self) -> &TauEigensystem {
        &self.eig
    }

    /// `gamma(Z0_Gr(rowspan M))`: the trailing block of `M Z0^T` after
    /// normalizing its leading `k x k` block to the identity.
    pub fn amplituhedron_map(&self, m: &Matrix<f64>, tol: f64) -> Result<AmplituhedronPoint> {
        if m.shape() != (self.k, self.n) {
            return Err(Error::ShapeMismatch {
                op: "amplituhedron_map",
                left: (self.k, self.n),
                right: m.shape(),
            });
        }
        let p = plucker_raw(m)?.normalized(Normalization::MaxAbs);
        if !classify_positivity(&p, tol).is_tnn() {
            return Err(Error::NotTotallyNonnegative);
        }
        self.project_matrix(m)
    }

    /// The same map without the positivity precondition.
    pub fn project_matrix(&self, m: &Matrix<f64>) -> Result<AmplituhedronPoint> {
        let y = m.matmul(&self.z0.transpose())?;
        let k = self.k;
        let rows: Vec<usize> = (0..k).collect();
        let left = y.select_columns(&rows);
        let right = y.select_columns(&(k..k + self.m).collect::<Vec<_>>());
        let a = left.solve(&right)?;
        Ok(AmplituhedronPoint { a })
    }

    /// `pi`: the first `m` columns of a chart point.
    pub fn chart_project(&self, a: &ChartPoint) -> Result<AmplituhedronPoint> {
        if a.a.shape() != (self.k, self.n - self.k) {
            return Err(Error::ShapeMismatch {
                op: "chart_project",
                left: (self.k, self.n - self.k),
                right: a.a.shape(),
            });
        }
        Ok(AmplituhedronPoint {
            a: a.a.select_columns(&(0..self.m).collect::<Vec<_>>()),
        })
    }

    /// `f_0(t, A')_ij = exp(t (lambda_(k+j) - lambda_i)) A'_ij`.
    pub fn flow_m(&self, t: f64, p: &AmplituhedronPoint) -> Result<AmplituhedronPoint> {
        if p.a.shape() != (self.k, self.m) {
            return Err(Error::ShapeMismatch {
                op: "flow_m",
                left: (self.k, self.m),
                right: p.a.shape(),
            });
        }
        let l = self.eig.lambdas();
        Ok(AmplituhedronPoint {
            a: Matrix::from_fn(self.k, self.m, |i, j| (t * (l[self.k + j] - l[i])).exp() * p.a[(i, j)]),
        })
    }

    /// For `k = 1`: images of the coordinate lines `e_1..e_n`, the vertices
    /// of the cyclic polytope.
    pub fn vertex_images(&self) -> Result<Vec<Vec<f64>>> {
        if self.k != 1 {
            return Err(Error::InvalidParameter("vertex images need k = 1".into()));
        }
        (0..self.n)
            .map(|j| {
                let e = Matrix::from_fn(1, self.n, |_, c| if c == j { 1.0 } else { 0.0 });
                Ok(self.project_matrix(&e)?.flat())
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HullMembership {
    Inside,
    Boundary,
    Outside,
}

/// `normal . x <= offset`, with a unit normal.
#[derive(Clone, Debug, Serialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Convex hull of a point set in `R^d` as an explicit facet list, found by
/// testing every affinely independent `d`-subset of the points.
#[derive(Clone, Debug, Serialize)]
pub struct HullOracle {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Facet>,
}

/// Unit normal to the affine span of `pts` (`d` points in `R^d`), or `None`
/// if they are affinely dependent.
fn hyperplane_normal(pts: &[&Vec<f64>], dim: usize) -> Option<Vec<f64>> {
    if dim == 1 {
        return Some(vec![1.0]);
    }
    let diffs = Matrix::from_fn(dim - 1, dim, |r, c| pts[r + 1][c] - pts[0][c]);
    let scale = diffs.max_abs().max(1.0);
    let rows: Vec<usize> = (0..dim - 1).collect();
    let normal: Vec<f64> = (0..dim)
        .map(|i| {
            let cols: Vec<usize> = (0..dim).filter(|&c| c != i).collect();
            let d = diffs.submatrix(&rows, &cols).det().unwrap_or(0.0);
            if i % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    let len = euclidean_norm(&normal);
    if len <= 1e-12 * scale.powi(dim as i32 - 1) {
        return None;
    }
    Some(normal.into_iter().map(|x| x / len).collect())
}

impl HullOracle {
    pub fn new(points: &[Vec<f64>], tol: f64) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::DegenerateHull("points must share a positive dimension".into()));
        }
        if points.len() <= dim {
            return Err(Error::DegenerateHull(format!(
                "{} points cannot span a {dim}-dimensional hull",
                points.len()
            )));
        }
        let mut facets: Vec<Facet> = Vec::new();
        for subset in k_subsets(points.len(), dim) {
            let pts: Vec<&Vec<f64>> = subset.iter().map(|&i| &points[i]).collect();
            let Some(normal) = hyperplane_normal(&pts, dim) else {
                continue;
            };
            let offset = dot(&normal, pts[0]);
            let side: Vec<f64> = points.iter().map(|p| dot(&normal, p) - offset).collect();
            let facet = if side.iter().all(|&s| s <= tol) {
                Facet { normal, offset }
            } else if side.iter().all(|&s| s >= -tol) {
                Facet {
                    normal: normal.iter().map(|x| -x).collect(),
                    offset: -offset,
                }
            } else {
                continue;
            };
            let duplicate = facets.iter().any(|f| {
                (f.offset - facet.offset).abs() <= tol
                    && f.normal.iter().zip(&facet.normal).all(|(a, b)| (a - b).abs() <= tol.max(1e-9))
            });
            if !duplicate {
                facets.push(facet);
            }
        }
        if facets.len() < dim + 1 {
            return Err(Error::DegenerateHull(format!(
                "found {} facets; the points are not full-dimensional",
                facets.len()
            )));
        }
        Ok(Self {
            dim,
            vertices: points.to_vec(),
            facets,
        })
    }

    /// Largest facet violation `normal . q - offset`; negative inside.
    pub fn max_violation(&self, q: &[f64]) -> f64 {
        self.facets
            .iter()
            .map(|f| dot(&f.normal, q) - f.offset)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn classify(&self, q: &[f64], tol: f64) -> Result<HullMembership> {
        if q.len() != self.dim {
            return Err(Error::InvalidDimensions(format!(
                "query has dimension {}, hull has {}",
                q.len(),
                self.dim
            )));
        }
        let v = self.max_violation(q);
        Ok(if v > tol {
            HullMembership::Outside
        } else if v >= -tol {
            HullMembership::Boundary
        } else {
            HullMembership::Inside
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// For `k = 1`, the hull of the vertex images, which is the whole
/// amplituhedron.
pub fn cyclic_polytope_oracle(spec: &AmplituhedronSpec, tol: f64) -> Result<HullOracle> {
    HullOracle::new(&spec.vertex_images()?, tol)
}

/// `f_0` on `Mat(1, m)` with region the interior of the cyclic polytope.
#[derive(Clone, Debug)]
pub struct AmpFlow {
    spec: AmplituhedronSpec,
    hull: HullOracle,
}

impl AmpFlow {
    pub fn new(spec: AmplituhedronSpec, tol: f64) -> Result<Self> {
        let hull = cyclic_polytope_oracle(&spec, tol)?;
        Ok(Self { spec, hull })
    }

    pub fn hull(&self) -> &HullOracle {
        &self.hull
    }

    pub fn spec(&self) -> &AmplituhedronSpec {
        &self.spec
    }
}

impl ContractiveFlow for AmpFlow {
    fn dim(&self) -> usize {
        self.spec.m
    }

    fn flow(&self, t: f64, p: &[f64]) -> Vec<f64> {
        let point = AmplituhedronPoint {
            a: Matrix::new(1, self.spec.m, p.to_vec()).expect("point dimension matches"),
        };
        self.spec.flow_m(t, &point).expect("shape checked").flat()
    }

    fn norm(&self, p: &[f64]) -> f64 {
        euclidean_norm(p)
    }

    fn membership(&self, p: &[f64], tol: f64) -> Membership {
        match self.hull.classify(p, tol).expect("dimension matches") {
            HullMembership::Inside => Membership::Interior,
            HullMembership::Boundary => Membership::ClosureBoundary,
            HullMembership::Outside => Membership::Outside,
        }
    }

    fn exit_search_limit(&self) -> f64 {
        let l = self.spec.eig.lambdas();
        60.0 / (l[0] - l[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{sample_point, SampleKind};

    #[test]
    fn example_z0() {
        let spec = build_spec(1, 2, 4).unwrap();
        let h = 0.5;
        let r = 1.0 / 2f64.sqrt();
        let want = Matrix::from_rows(vec![vec![h, h, h, h], vec![r, 0.0, -r, 0.0], vec![0.0, r, 0.0, -r]]).unwrap();
        assert!(spec.z0().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn preconditions() {
        assert!(build_spec(1, 3, 5).is_err());
        assert!(build_spec(2, 2, 3).is_err());
        assert!(build_spec(1, 2, 3).is_ok());
        assert!(build_spec(2, 2, 5).is_ok());
    }

    #[test]
    fn square_vertices_and_hull() {
        let spec = build_spec(1, 2, 4).unwrap();
        let s = 2f64.sqrt();
        let mut v = spec.vertex_images().unwrap();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = [[-s, 0.0], [0.0, -s], [0.0, s], [s, 0.0]];
        for (a, b) in v.iter().zip(want) {
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12, "{v:?}");
        }
        let hull = cyclic_polytope_oracle(&spec, 1e-9).unwrap();
        assert_eq!(hull.facets.len(), 4);
        assert_eq!(hull.classify(&[0.0, 0.0], 1e-9).unwrap(), HullMembership::Inside);
        assert_eq!(hull.classify(&[s, 0.0], 1e-9).unwrap(), HullMembership::Boundary);
        assert_eq!(hull.classify(&[2.0, 2.0], 1e-9).unwrap(), HullMembership::Outside);
    }

    #[test]
    fn diagram_commutes() {
        let spec = build_spec(2, 2, 6).unwrap();
        for seed in 0..30 {
            let m: Matrix<f64> = sample_point(&SampleKind::RandomTnn, 2, 6, seed).unwrap();
            let a = spec.eigensystem().chart_invert(&m).unwrap();
            let lhs = spec.amplituhedron_map(&m, 1e-9).unwrap();
            let rhs = spec.chart_project(&a).unwrap();
            assert!(lhs.a.max_abs_diff(&rhs.a) < 1e-9);
        }
    }

    #[test]
    fn flow_equivariance() {
        let spec = build_spec(2, 2, 5).unwrap();
        let a = ChartPoint::from_flat(2, 5, &[0.3, -0.1, 0.7, 0.2, 0.5, -0.4]).unwrap();
        for t in [-0.5, 0.0, 0.8] {
            let lhs = spec.flow_m(t, &spec.chart_project(&a).unwrap()).unwrap();
            let rhs = spec.chart_project(&spec.eigensystem().flow_chart(t, &a).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn degenerate_hull() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(HullOracle::new(&pts, 1e-9), Err(Error::DegenerateHull(_))));
    }
}
