//! Seeded randomness.
//!
//! All random data is drawn from ChaCha12 seeded with `seed_from_u64(seed)`.
//! Stream splitting: the i-th independent consumer (trial `i` of a suite,
//! sample `i` of a sweep) uses the same seed on ChaCha stream `i`. A bare
//! `seed` argument means stream 0.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use super::eig::eig_hermitian;
use super::matrix::{ComplexMatrix, Hermitian};

pub type GqRng = ChaCha12Rng;

/// Generator for stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> GqRng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian: E|z|² = 1.
pub fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(h * re, h * im)
}

pub fn gaussian_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| complex_gaussian(rng))
}

pub fn gaussian_vector(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// (G + G†)/2 with G standard complex Gaussian.
pub fn random_hermitian_with(n: usize, rng: &mut impl Rng) -> Hermitian {
    Hermitian::symmetrize(&gaussian_matrix(n, rng))
}

pub fn random_hermitian(n: usize, seed: u64) -> Hermitian {
    random_hermitian_with(n, &mut rng_for(seed, 0))
}

/// Haar-ish unitary: eigenvectors of a random Hermitian matrix.
pub fn random_unitary_with(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let h = random_hermitian_with(n, rng);
    eig_hermitian(&h)
        .expect("Jacobi converges on Gaussian Hermitian input")
        .eigenvectors
}

/// Random Hermitian matrix with prescribed spectrum, U·diag(λ)·U†.
pub fn hermitian_with_spectrum(spectrum: &[f64], rng: &mut impl Rng) -> Hermitian {
    let u = random_unitary_with(spectrum.len(), rng);
    Hermitian::diagonal(spectrum)
        .conjugate_by(&u)
        .expect("dimensions agree")
}

/// Real spectrum drawn from N(0,1), redrawn until every gap exceeds `min_gap`.
pub fn gapped_spectrum(n: usize, min_gap: f64, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let mut s: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        s.sort_by(f64::total_cmp);
        if s.windows(2).all(|w| w[1] - w[0] > min_gap) {
            return s;
        }
    }
}
