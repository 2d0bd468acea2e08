//! Dense complex linear algebra over the crate scalar.

pub mod chol;
pub mod eigen;
pub mod matrix;
pub mod ops;
pub mod svd;

pub use eigen::{eig, eigvals, Spectrum};
pub use matrix::{HermitianMatrix, Matrix};
pub use ops::{
    fidelity, hermitian_function, identity_kron, matrix_function, operator_geq, partial_trace,
    permute_subsystems, positive_part, positive_part_trace, purified_distance, sandwich_trailing,
    spectral_function, sqrt_psd, support_projector, support_rank, support_threshold,
    tensor_product, tensor_product_capped, DEFAULT_DIM_CAP,
};
pub use svd::{singular_values, svd, Svd};
