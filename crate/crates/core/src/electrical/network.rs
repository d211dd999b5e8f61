//! Resistor networks and their response matrices.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// An undirected graph on nodes `0..nodes` with positive conductances and an
/// ordered list of boundary nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ResistorNetwork<T> {
    nodes: usize,
    boundary: Vec<usize>,
    edges: Vec<(usize, usize, T)>,
}

impl<T: Scalar> ResistorNetwork<T> {
    /// The node count is one more than the largest node mentioned.
    pub fn new(boundary: Vec<usize>, edges: Vec<(usize, usize, T)>) -> Result<Self> {
        if boundary.is_empty() {
            return Err(Error::InvalidParameter("network needs at least one boundary node".into()));
        }
        let mut sorted = boundary.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("boundary nodes must be distinct".into()));
        }
        for (u, v, c) in &edges {
            if u == v {
                return Err(Error::InvalidParameter(format!("edge {u}-{v} is a loop")));
            }
            if *c <= T::zero() {
                return Err(Error::InvalidParameter(format!("edge {u}-{v} has conductance {c} <= 0")));
            }
        }
        let nodes = edges
            .iter()
            .flat_map(|(u, v, _)| [*u, *v])
            .chain(boundary.iter().copied())
            .max()
            .map_or(0, |m| m + 1);
        Ok(Self { nodes, boundary, edges })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn edges(&self) -> &[(usize, usize, T)] {
        &self.edges
    }

    /// Weighted graph Laplacian.
    pub fn laplacian(&self) -> Matrix<T> {
        let mut l = Matrix::<T>::zeros(self.nodes, self.nodes);
        for (u, v, c) in &self.edges {
            let (u, v) = (*u, *v);
            l[(u, u)] = l[(u, u)].clone() + c.clone();
            l[(v, v)] = l[(v, v)].clone() + c.clone();
            l[(u, v)] = l[(u, v)].clone() - c.clone();
            l[(v, u)] = l[(v, u)].clone() - c.clone();
        }
        l
    }
}

/// The symmetric map from boundary voltages to boundary currents.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseMatrix<T> {
    pub matrix: Matrix<T>,
}

impl<T: Scalar> ResponseMatrix<T> {
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let m = &self.matrix;
        (0..m.rows()).all(|i| {
            (0..i).all(|j| {
                let d = m[(i, j)].clone() - m[(j, i)].clone();
                d.is_zero() || (!T::EXACT && d.to_f64().abs() <= tol)
            })
        })
    }

    pub fn row_sums_vanish(&self, tol: f64) -> bool {
        let m = &self.matrix;
        (0..m.rows()).all(|i| {
            let s = m.row(i).iter().fold(T::zero(), |a, b| a + b.clone());
            s.is_zero() || (!T::EXACT && s.to_f64().abs() <= tol)
        })
    }
}

/// `L_BB - L_BI L_II^-1 L_IB`, the Schur complement onto the boundary.
pub fn response_matrix<T: Scalar>(net: &ResistorNetwork<T>) -> Result<ResponseMatrix<T>> {
    let l = net.laplacian();
    let b = net.boundary.clone();
    let interior: Vec<usize> = (0..net.nodes).filter(|v| !b.contains(v)).collect();
    let l_bb = l.submatrix(&b, &b);
    if interior.is_empty() {
        return Ok(ResponseMatrix { matrix: l_bb });
    }
    let l_ii = l.submatrix(&interior, &interior);
    let l_ib = l.submatrix(&interior, &b);
    let x = l_ii.solve(&l_ib).map_err(|e| match e {
        Error::Singular => Error::FloatingInterior,
        other => other,
    })?;
    let l_bi = l.submatrix(&b, &interior);
    Ok(ResponseMatrix {
        matrix: l_bb.sub(&l_bi.matmul(&x)?)?,
    })
}
