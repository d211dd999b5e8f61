//! Planar electrical networks: noncrossing partitions, the vectors
//! `A_sigma` spanning `H`, the operators `u_i + d_i`, response matrices, and
//! a numeric search for points of `Gr(n-1, 2n) ∩ H`.

pub mod network;
pub mod noncrossing;
pub mod operators;
pub mod xn;

pub use network::{response_matrix, ResistorNetwork, ResponseMatrix};
pub use noncrossing::{catalan, enumerate_nc, is_noncrossing, NoncrossingPartition};
pub use operators::{
    a_sigma, basis_vector, h_subspace, phi_apply, phi_expansion, ud_apply, verify_lemma_ud, BigVector, HSubspace,
    UdReport,
};
pub use xn::{flow_invariance, lift_to_matrix, phi_first_order_error, plucker_relation_residual, xn_search, XnResult};
