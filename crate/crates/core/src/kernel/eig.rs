//! Cyclic Jacobi eigensolver for Hermitian matrices, the unitary propagator
//! built on it, and a one-sided Jacobi SVD for real matrices.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, Hermitian, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues ascending with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// V·diag(f(λ))·V†.
    pub fn apply_function(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let weights: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * weights[k] * v[(j, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_function(|l| Complex64::new(l, 0.0))
    }

    /// Orthogonal projector onto the span of eigenvectors whose eigenvalue
    /// lies within `tol` of `lambda`.
    pub fn eigenspace_projector(&self, lambda: f64, tol: f64) -> ComplexMatrix {
        self.apply_function(|l| if (l - lambda).abs() <= tol { ONE } else { ZERO })
    }
}

/// Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation `J` acts on the (p, q) plane as `D·R·D†` where `D` removes the
/// phase of `a_pq` and `R` is the real Jacobi rotation annihilating the then
/// real off-diagonal pair.
pub fn eig_hermitian(a: &Hermitian) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let mut m = a.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();

    if n > 1 && scale > 0.0 {
        let target = f64::EPSILON * scale;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&m) <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
        if !converged {
            let off = off_diagonal_norm(&m);
            if off > 1e3 * target {
                return Err(Error::NumericalFailure {
                    what: "Jacobi sweeps did not converge",
                    residual: off / scale,
                });
            }
        }
    }

    let raw: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep original column order
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
    let eigenvalues = order.iter().map(|&k| raw[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // negligible relative to both diagonal entries: annihilate directly
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = ZERO;
        m[(q, p)] = ZERO;
        return;
    }
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let jpp = Complex64::new(c, 0.0);
    let jqq = jpp;
    let jpq = phase * s;
    let jqp = -phase.conj() * s;

    let n = m.dim();
    // M ← M·J
    for i in 0..n {
        let mip = m[(i, p)];
        let miq = m[(i, q)];
        m[(i, p)] = mip * jpp + miq * jqp;
        m[(i, q)] = mip * jpq + miq * jqq;
    }
    // M ← J†·M
    for j in 0..n {
        let mpj = m[(p, j)];
        let mqj = m[(q, j)];
        m[(p, j)] = jpp.conj() * mpj + jqp.conj() * mqj;
        m[(q, j)] = jpq.conj() * mpj + jqq.conj() * mqj;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
    // V ← V·J
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * jpp + viq * jqp;
        v[(i, q)] = vip * jpq + viq * jqq;
    }
}

/// exp(−i·t·A/ħ) through the spectral decomposition of `A`.
pub fn unitary_exp(a: &Hermitian, t: f64, hbar: f64) -> Result<ComplexMatrix> {
    if !(hbar > 0.0) {
        return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
    }
    let spec = eig_hermitian(a)?;
    Ok(propagator(&spec, t, hbar))
}

/// exp(−i·t·A/ħ) from a precomputed decomposition of `A`.
pub fn propagator(spec: &SpectralDecomposition, t: f64, hbar: f64) -> ComplexMatrix {
    spec.apply_function(|l| Complex64::from_polar(1.0, -t * l / hbar))
}

/// Thin SVD of a real matrix given as a list of columns, by one-sided
/// (Hestenes) Jacobi orthogonalization.
///
/// Returns `(singular_values, left_vectors)` sorted by decreasing singular
/// value; left vectors belonging to zero singular values are returned as zero
/// columns.
pub fn real_svd_left(columns: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut cols: Vec<Vec<f64>> = columns.to_vec();
    let k = cols.len();
    let total: f64 = cols.iter().flatten().map(|x| x * x).sum();
    // columns at rounding level carry no direction worth orthogonalizing
    let floor = (f64::EPSILON * f64::EPSILON) * total;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..k {
            for j in i + 1..k {
                let alpha: f64 = cols[i].iter().map(|x| x * x).sum();
                let beta: f64 = cols[j].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                if alpha <= floor
                    || beta <= floor
                    || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(j);
                for (x, y) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let xi = *x;
                    let yj = *y;
                    *x = c * xi - s * yj;
                    *y = s * xi + c * yj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut pairs: Vec<(f64, Vec<f64>)> = cols
        .into_iter()
        .map(|c| {
            let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            let unit = if norm > 0.0 {
                c.iter().map(|x| x / norm).collect()
            } else {
                c
            };
            (norm, unit)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::matrix::pauli;

    fn projector(v: &[Complex64]) -> ComplexMatrix {
        ComplexMatrix::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    #[test]
    fn pauli_z_spectrum() {
        let s = eig_hermitian(&pauli::z()).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);
    }

    #[test]
    fn zero_matrix_gives_identity_basis() {
        let s = eig_hermitian(&Hermitian::zeros(3)).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0; 3]);
        assert_eq!(s.eigenvectors, ComplexMatrix::identity(3));
    }

    #[test]
    fn pauli_x_eigenvectors() {
        let s = eig_hermitian(&pauli::x()).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)];
        let plus = [Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
        assert!(projector(&s.eigenvector(0)).max_abs_diff(&projector(&minus)) < 1e-14);
        assert!(projector(&s.eigenvector(1)).max_abs_diff(&projector(&plus)) < 1e-14);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = unitary_exp(&Hermitian::zeros(3), 2.5, 1.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn exp_of_z_at_pi_and_half_pi() {
        // exp(−iπ·(±1)) = −1 on both eigenvalues
        let u = unitary_exp(&pauli::z(), std::f64::consts::PI, 1.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2).scale_real(-1.0)) < 1e-12);
        let half = unitary_exp(&pauli::z(), std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        let expected = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(0.0, -1.0),
            (1, 1) => Complex64::new(0.0, 1.0),
            _ => ZERO,
        });
        assert!(half.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn exp_of_x_full_period() {
        let u = unitary_exp(&pauli::x(), 2.0 * std::f64::consts::PI, 1.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-10);
    }

    #[test]
    fn nonpositive_hbar_rejected() {
        assert!(matches!(
            unitary_exp(&pauli::x(), 1.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn svd_of_rank_one() {
        let cols = vec![vec![1.0, 2.0, 2.0], vec![2.0, 4.0, 4.0]];
        let (s, u) = real_svd_left(&cols);
        assert!((s[0] - 15.0_f64.sqrt() * 3.0_f64.sqrt()).abs() < 1e-12);
        assert!(s[1].abs() < 1e-12);
        let dot: f64 = u[0].iter().zip([1.0, 2.0, 2.0]).map(|(a, b)| a * b).sum();
        assert!((dot.abs() - 3.0).abs() < 1e-12);
    }
}
