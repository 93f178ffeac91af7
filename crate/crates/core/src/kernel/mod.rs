//! Dense complex linear algebra substrate.

mod eig;
mod json;
mod matrix;
mod rng;

pub use eig::{eig_hermitian, propagator, real_svd_left, unitary_exp, SpectralDecomposition};
pub use json::{
    matrix_from_value, matrix_value, parse_matrix, parse_vector, serialize_matrix,
    serialize_vector, vector_value,
};
pub use matrix::{
    is_hermitian, pauli, ComplexMatrix, DualElement, Hermitian, Observable, TangentVector,
    DEFAULT_TOL, I, ONE, ZERO,
};
pub use rng::{
    complex_gaussian, gapped_spectrum, gaussian_matrix, gaussian_vector, hermitian_with_spectrum,
    random_hermitian, random_hermitian_with, random_unitary_with, rng_for, GqRng,
};
