//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Entropies are in bits. Nominally Hermitian inputs are symmetrized before
//! eigendecomposition, and eigenvalues in `[-1e-10, 0)` are treated as zero.

mod density;
mod eigen;
mod functions;
mod matrix;
pub mod random;

pub use density::{partial_trace, partial_trace_matrix, tensor, DensityOperator, Tensor, TOL_HERM, TOL_TRACE};
pub use eigen::{
    clamp_nonnegative, eigh, eigvalsh, hermitian_function, low_rank_factor, pivoted_cholesky, psd_spectrum, singular_values,
    singular_values_and_vectors, trace_norm_of_product, HermitianEigen, LOW_RANK_MIN_DIM, NEG_CLAMP,
};
pub use functions::{
    binary_entropy, entropy_of_spectrum, gen_overlap, gen_overlap_psd, inner, matrix_entropy,
    partial_transpose_min_eig, trace_norm, von_neumann_entropy,
};
pub(crate) use functions::h2;
pub use matrix::ComplexMatrix;
