//! The (1,1)-tensors Ĵ and R̂ on u(H) and the distributions they generate.
//!
//! Hermitian matrices are vectorized in the generalized Gell-Mann basis plus
//! the normalized identity, which is orthonormal for ⟨A,B⟩ = ½·Tr(AB). The
//! images of Ĵ_ξ and R̂_ξ are read off the eigenbasis of ξ; the tests check
//! them against a singular value decomposition of the maps.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{jordan_product, lie_bracket};
use crate::error::{check_dim, Result};
use crate::kernel::{
    complex_gaussian, eig_hermitian, gapped_spectrum, hermitian_with_spectrum, matrix_value, random_hermitian_with,
    rng_for, ComplexMatrix, DualElement, Hermitian, Observable, I, ONE, ZERO,
};
use crate::report::{Expectation, ReportBuilder, VerificationReport, Witness};

/// Relative singular-value cutoff for ranks.
pub const RANK_TOL: f64 = 1e-8;
/// Minimum eigenvalue gap for sampled points.
pub const MIN_GAP: f64 = 1e-6;

/// Ĵ_ξ(A) = [A, ξ]₋.
pub fn jhat(xi: &DualElement, a: &Observable) -> Result<Hermitian> {
    lie_bracket(a, xi)
}

/// R̂_ξ(A) = A∘ξ.
pub fn rhat(xi: &DualElement, a: &Observable) -> Result<Hermitian> {
    jordan_product(a, xi)
}

/// max(‖Ĵ(R̂(A)) − R̂(Ĵ(A))‖, ‖Ĵ(R̂(A)) − ½[A, ξ²]₋‖).
pub fn commutation_defect(xi: &DualElement, a: &Observable) -> Result<f64> {
    check_dim(xi.dim(), a.dim())?;
    let jr = jhat(xi, &rhat(xi, a)?)?;
    let rj = rhat(xi, &jhat(xi, a)?)?;
    let xi2 = Hermitian::symmetrize(&(xi.matrix() * xi.matrix()));
    let half = lie_bracket(a, &xi2)?.scale(0.5);
    let d1 = jr.try_sub(&rj)?.frobenius_norm();
    let d2 = jr.try_sub(&half)?.frobenius_norm();
    Ok(d1.max(d2))
}

pub const COMMUTATION: &str = "jhat_rhat_commutation";

/// Samples [`commutation_defect`] at random (A, ξ), relative to ‖A‖·‖ξ‖².
/// Trial `i` uses stream `i` of `seed`.
pub fn verify_commutation(n: usize, trials: usize, seed: u64, tol: f64) -> VerificationReport {
    let residuals: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t as u64);
            let a = random_hermitian_with(n, &mut rng);
            let xi = random_hermitian_with(n, &mut rng);
            let scale = (a.frobenius_norm() * xi.frobenius_norm().powi(2)).max(1.0);
            commutation_defect(&xi, &a).expect("equal dims") / scale
        })
        .collect();
    let mut report = ReportBuilder::new("commutation", tol)
        .seed(seed)
        .dim(n)
        .trials(trials);
    for r in residuals {
        report.record(COMMUTATION, r);
    }
    report.finish()
}

/// Orthonormal basis of the real space of n×n Hermitian matrices: the
/// normalized identity, then for each pair j < k the symmetric and
/// antisymmetric off-diagonal generators, then the diagonal Cartan elements.
/// For n = 2 this is (I, X, Y, Z).
pub fn hermitian_basis(n: usize) -> Vec<Hermitian> {
    let mut out = Vec::with_capacity(n * n);
    out.push(Hermitian::identity(n).scale((2.0 / n as f64).sqrt()));
    for j in 0..n {
        for k in j + 1..n {
            let sym = ComplexMatrix::from_fn(n, |r, c| {
                if (r, c) == (j, k) || (r, c) == (k, j) {
                    ONE
                } else {
                    ZERO
                }
            });
            let anti = ComplexMatrix::from_fn(n, |r, c| match (r, c) {
                _ if (r, c) == (j, k) => -I,
                _ if (r, c) == (k, j) => I,
                _ => ZERO,
            });
            out.push(Hermitian::from_matrix_unchecked(sym));
            out.push(Hermitian::from_matrix_unchecked(anti));
        }
    }
    for l in 1..n {
        let c = (2.0 / (l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..n)
            .map(|i| match i {
                _ if i < l => c,
                _ if i == l => -(l as f64) * c,
                _ => 0.0,
            })
            .collect();
        out.push(Hermitian::diagonal(&diag));
    }
    out
}

/// Coordinates in [`hermitian_basis`].
pub fn vectorize(m: &Hermitian) -> Vec<f64> {
    let n = m.dim();
    let a = m.matrix();
    let mut out = Vec::with_capacity(n * n);
    out.push(m.trace() / (2.0 * n as f64).sqrt());
    for j in 0..n {
        for k in j + 1..n {
            out.push(a[(j, k)].re);
            out.push(-a[(j, k)].im);
        }
    }
    for l in 1..n {
        let c = (2.0 / (l * (l + 1)) as f64).sqrt();
        let head: f64 = (0..l).map(|i| a[(i, i)].re).sum();
        out.push(0.5 * c * (head - l as f64 * a[(l, l)].re));
    }
    out
}

pub fn unvectorize(n: usize, coords: &[f64]) -> Hermitian {
    let basis = hermitian_basis(n);
    let terms: Vec<(f64, &Hermitian)> = coords.iter().copied().zip(basis.iter()).collect();
    Hermitian::combination(&terms).expect("basis has n*n elements")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    /// Image of Ĵ: tangent spaces of unitary orbits.
    Lambda,
    /// Image of R̂.
    R,
    /// D_Λ ∩ D_R.
    Zero,
    /// D_Λ + D_R: tangent spaces of GL orbits.
    One,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 4] = [Self::Lambda, Self::R, Self::Zero, Self::One];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lambda => "lambda",
            Self::R => "r",
            Self::Zero => "zero",
            Self::One => "one",
        }
    }
}

impl std::str::FromStr for DistributionKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "lambda" => Ok(Self::Lambda),
            "r" => Ok(Self::R),
            "zero" | "0" => Ok(Self::Zero),
            "one" | "1" => Ok(Self::One),
            other => Err(format!("unknown distribution kind {other:?}")),
        }
    }
}

/// Orthonormal (Euclidean) vectors spanning a subspace of coordinate space.
#[derive(Clone, Debug, Default)]
struct Subspace {
    vectors: Vec<Vec<f64>>,
}

impl Subspace {
    fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// ‖v − Pv‖ for the orthogonal projector P onto the subspace.
    fn residual(&self, v: &[f64]) -> f64 {
        let mut r = v.to_vec();
        for u in &self.vectors {
            let c = dot(u, v);
            for (ri, ui) in r.iter_mut().zip(u) {
                *ri -= c * ui;
            }
        }
        r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The four pointwise subspaces at ξ, in the order Lambda, R, Zero, One.
///
/// With ξ = Σ λ_k v_k v_k†, the generators built from v_i v_j† + v_j v_i† and
/// i(v_i v_j† − v_j v_i†) (and √2·v_i v_i† on the diagonal) are orthonormal and
/// diagonalize both maps: Ĵ_ξ scales the (i, j) block by |λ_i − λ_j|, R̂_ξ by
/// |λ_i + λ_j|/2. Each image is the span of the blocks whose factor exceeds
/// RANK_TOL times max(largest factor, ‖ξ‖_F), the same cutoff a singular value
/// decomposition of the maps would use.
fn spectral_subspaces(xi: &DualElement) -> [Subspace; 4] {
    let spec = eig_hermitian(xi).expect("Jacobi eigensolver converges");
    let l = &spec.eigenvalues;
    let n = l.len();
    let floor = xi.frobenius_norm();
    let spread = l.last().zip(l.first()).map_or(0.0, |(hi, lo)| hi - lo);
    let top = l.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let cut_lambda = RANK_TOL * spread.max(floor);
    let cut_r = RANK_TOL * top.max(floor);
    let v: Vec<Vec<Complex64>> = (0..n).map(|k| spec.eigenvector(k)).collect();
    let outer = |i: usize, j: usize, c: Complex64| {
        ComplexMatrix::from_fn(n, |r, s| c * v[i][r] * v[j][s].conj())
    };

    let mut out: [Subspace; 4] = Default::default();
    for i in 0..n {
        for j in i..n {
            let in_lambda = (l[i] - l[j]).abs() > cut_lambda;
            let in_r = if i == j {
                l[i].abs() > cut_r
            } else {
                (0.5 * (l[i] + l[j])).abs() > cut_r
            };
            let generators: Vec<Vec<f64>> = if i == j {
                let d = outer(i, i, Complex64::new(std::f64::consts::SQRT_2, 0.0));
                vec![vectorize(&Hermitian::symmetrize(&d))]
            } else {
                let s = &outer(i, j, ONE) + &outer(j, i, ONE);
                let a = &outer(i, j, I) - &outer(j, i, I);
                vec![
                    vectorize(&Hermitian::symmetrize(&s)),
                    vectorize(&Hermitian::symmetrize(&a)),
                ]
            };
            let member = [in_lambda, in_r, in_lambda && in_r, in_lambda || in_r];
            for (sub, keep) in out.iter_mut().zip(member) {
                if keep {
                    sub.vectors.extend(generators.iter().cloned());
                }
            }
        }
    }
    out
}

fn subspace(xi: &DualElement, kind: DistributionKind) -> Subspace {
    let [lambda, r, zero, one] = spectral_subspaces(xi);
    match kind {
        DistributionKind::Lambda => lambda,
        DistributionKind::R => r,
        DistributionKind::Zero => zero,
        DistributionKind::One => one,
    }
}

/// Pointwise distribution D(ξ) with an orthonormal basis under the trace form.
#[derive(Clone, Debug)]
pub struct DistributionBasis {
    pub point: DualElement,
    pub kind: DistributionKind,
    pub basis: Vec<Hermitian>,
    pub rank: usize,
}

impl DistributionBasis {
    /// Distance from `v` to the subspace, in the trace-form norm.
    pub fn projection_residual(&self, v: &Hermitian) -> f64 {
        let sub = Subspace {
            vectors: self.basis.iter().map(vectorize).collect(),
        };
        sub.residual(&vectorize(v))
    }
}

pub fn distribution_basis(xi: &DualElement, kind: DistributionKind) -> DistributionBasis {
    let sub = subspace(xi, kind);
    let n = xi.dim();
    DistributionBasis {
        point: xi.clone(),
        kind,
        rank: sub.rank(),
        basis: sub.vectors.iter().map(|v| unvectorize(n, v)).collect(),
    }
}

/// Labels of the orbits through ξ: the spectrum (unitary orbit) and the
/// inertia (GL orbit under ξ ↦ TξT†).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitInvariants {
    pub spectrum: Vec<f64>,
    pub rank: usize,
    /// positive minus negative eigenvalue count
    pub signature: i64,
    pub positive: usize,
    pub negative: usize,
}

pub fn orbit_invariants(xi: &DualElement) -> Result<OrbitInvariants> {
    let spectrum = eig_hermitian(xi)?.eigenvalues;
    let top = spectrum.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let cutoff = RANK_TOL * top;
    let positive = spectrum.iter().filter(|&&l| l > cutoff).count();
    let negative = spectrum.iter().filter(|&&l| l < -cutoff).count();
    Ok(OrbitInvariants {
        spectrum,
        rank: positive + negative,
        signature: positive as i64 - negative as i64,
        positive,
        negative,
    })
}

// Vector fields spanning the distributions. Linear ones: V_A(ξ) = [A,ξ]₋ and
// W_A(ξ) = A∘ξ. For D_0 the quadratic family Z_A(ξ) = Ĵ_ξ(R̂_ξ(A)) = ½[A, ξ²]₋.

fn v_field(a: &Hermitian, xi: &Hermitian) -> Hermitian {
    jhat(xi, a).expect("same dimension")
}

fn w_field(a: &Hermitian, xi: &Hermitian) -> Hermitian {
    rhat(xi, a).expect("same dimension")
}

fn z_field(a: &Hermitian, xi: &Hermitian) -> Hermitian {
    jhat(xi, &rhat(xi, a).expect("dim")).expect("dim")
}

/// Derivative of Z_A at ξ in direction η: ½[A, ξη + ηξ]₋.
fn z_field_derivative(a: &Hermitian, xi: &Hermitian, eta: &Hermitian) -> Hermitian {
    let anti = jordan_product(xi, eta).expect("dim").scale(2.0);
    lie_bracket(a, &anti).expect("dim").scale(0.5)
}

/// [X, Y](ξ) = DY(ξ)·X(ξ) − DX(ξ)·Y(ξ) for linear fields X = L₁, Y = L₂.
fn linear_commutator(
    l1: impl Fn(&Hermitian) -> Hermitian,
    l2: impl Fn(&Hermitian) -> Hermitian,
    xi: &Hermitian,
) -> Hermitian {
    l2(&l1(xi)).try_sub(&l1(&l2(xi))).expect("dim")
}

fn z_commutator(a: &Hermitian, b: &Hermitian, xi: &Hermitian) -> Hermitian {
    let za = z_field(a, xi);
    let zb = z_field(b, xi);
    z_field_derivative(b, xi, &za)
        .try_sub(&z_field_derivative(a, xi, &zb))
        .expect("dim")
}

/// Sample point for the involutivity check. Even trials are generic
/// (invertible, gapped spectrum). Odd trials have one zero eigenvalue, where
/// D_R, D_0 and D_1 are proper subspaces. For `R` every point carries a pair
/// λ, −λ, which is where R̂ degenerates and closure can fail.
fn sample_point(kind: DistributionKind, n: usize, trial: usize, rng: &mut impl Rng) -> Hermitian {
    loop {
        let mut s = gapped_spectrum(n, MIN_GAP, rng);
        match kind {
            DistributionKind::R => {
                s[n - 1] = -s[0];
            }
            _ if trial % 2 == 1 => {
                let k = (0..n)
                    .min_by(|&i, &j| s[i].abs().total_cmp(&s[j].abs()))
                    .unwrap();
                s[k] = 0.0;
            }
            _ => {}
        }
        s.sort_by(f64::total_cmp);
        if s.windows(2).all(|w| w[1] - w[0] > MIN_GAP) {
            return hermitian_with_spectrum(&s, rng);
        }
    }
}

pub const CLOSURE: &str = "bracket_closure";
pub const DIMENSION_FORMULA: &str = "dimension_formula";
pub const CONTAINMENT: &str = "containment_in_d1";
pub const SPANNING: &str = "spanning_family_in_distribution";

struct TrialOutcome {
    records: Vec<(&'static str, f64)>,
    worst: (f64, Hermitian, Hermitian, Hermitian, Hermitian),
}

fn run_trial(kind: DistributionKind, n: usize, seed: u64, trial: usize) -> TrialOutcome {
    let mut rng = rng_for(seed, trial as u64);
    let xi = sample_point(kind, n, trial, &mut rng);
    let a = random_hermitian_with(n, &mut rng);
    let b = random_hermitian_with(n, &mut rng);
    let (na, nb, nx) = (a.frobenius_norm(), b.frobenius_norm(), xi.frobenius_norm());

    let [d_lambda, d_r, d_zero, d_one] = spectral_subspaces(&xi);
    let target = match kind {
        DistributionKind::Lambda => &d_lambda,
        DistributionKind::R => &d_r,
        DistributionKind::Zero => &d_zero,
        DistributionKind::One => &d_one,
    };

    let lin = |f: fn(&Hermitian, &Hermitian) -> Hermitian, m: Hermitian| move |x: &Hermitian| f(&m, x);
    let (commutators, family, degree): (Vec<Hermitian>, Vec<Hermitian>, i32) = match kind {
        DistributionKind::Lambda => (
            vec![linear_commutator(lin(v_field, a.clone()), lin(v_field, b.clone()), &xi)],
            vec![v_field(&a, &xi), v_field(&b, &xi)],
            1,
        ),
        DistributionKind::R => (
            vec![linear_commutator(lin(w_field, a.clone()), lin(w_field, b.clone()), &xi)],
            vec![w_field(&a, &xi), w_field(&b, &xi)],
            1,
        ),
        DistributionKind::One => (
            vec![
                linear_commutator(lin(v_field, a.clone()), lin(v_field, b.clone()), &xi),
                linear_commutator(lin(w_field, a.clone()), lin(w_field, b.clone()), &xi),
                linear_commutator(lin(v_field, a.clone()), lin(w_field, b.clone()), &xi),
            ],
            vec![v_field(&a, &xi), w_field(&b, &xi)],
            1,
        ),
        DistributionKind::Zero => (
            vec![z_commutator(&a, &b, &xi)],
            vec![z_field(&a, &xi), z_field(&b, &xi)],
            3,
        ),
    };

    let scale = (na * nb * nx.powi(degree)).max(1.0);
    let mut records = Vec::new();
    let mut worst = (f64::NEG_INFINITY, xi.clone(), a.clone(), b.clone(), xi.clone());
    for c in commutators {
        let r = target.residual(&vectorize(&c)) / scale;
        if r > worst.0 {
            worst = (r, xi.clone(), a.clone(), b.clone(), c);
        }
        records.push((CLOSURE, r));
    }
    let field_scale = (na.max(nb) * nx.powi(degree.min(2))).max(1.0);
    for f in family {
        records.push((SPANNING, target.residual(&vectorize(&f)) / field_scale));
    }
    let formula = (d_zero.rank() + d_one.rank()) as f64 - (d_lambda.rank() + d_r.rank()) as f64;
    records.push((DIMENSION_FORMULA, formula.abs()));
    for sub in [&d_lambda, &d_r] {
        if let Some(v) = random_unit_member(sub, &mut rng) {
            records.push((CONTAINMENT, d_one.residual(&v)));
        }
    }
    TrialOutcome { records, worst }
}

/// Gaussian combination of the basis vectors, normalized.
fn random_unit_member(sub: &Subspace, rng: &mut impl Rng) -> Option<Vec<f64>> {
    let dim = sub.vectors.first()?.len();
    let mut v = vec![0.0; dim];
    for u in &sub.vectors {
        let c = complex_gaussian(rng).re;
        for (vi, ui) in v.iter_mut().zip(u) {
            *vi += c * ui;
        }
    }
    let norm = dot(&v, &v).sqrt();
    (norm > 0.0).then(|| v.iter().map(|x| x / norm).collect())
}

/// Sampled evidence for the closure of each distribution under brackets of
/// its spanning vector fields.
///
/// Commutators of the spanning fields are computed in closed form and their
/// value at a random point is projected onto the pointwise subspace. For
/// Lambda, Zero and One the residuals must stay within `tol`; for R at least
/// one residual must exceed `10·tol` and the worst case is returned as a
/// witness. Trial `i` uses stream `i` of `seed`.
pub fn involutivity_evidence(
    kind: DistributionKind,
    n: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> VerificationReport {
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(kind, n, seed, t))
        .collect();

    let closure_expectation = match kind {
        DistributionKind::R => Expectation::Violated,
        _ => Expectation::Holds,
    };
    let mut report = ReportBuilder::new(format!("involutivity_{}", kind.name()), tol)
        .seed(seed)
        .dim(n)
        .trials(trials);
    report.tolerance_for(CLOSURE, tol, closure_expectation);
    report.tolerance_for(DIMENSION_FORMULA, 0.0, Expectation::Holds);
    let mut worst: Option<(f64, Hermitian, Hermitian, Hermitian, Hermitian)> = None;
    for o in outcomes {
        for (name, r) in o.records {
            report.record(name, r);
        }
        if worst.as_ref().is_none_or(|w| o.worst.0 > w.0) {
            worst = Some(o.worst);
        }
    }
    if let (DistributionKind::R, Some((r, xi, a, b, c))) = (kind, worst) {
        report.witness(Witness {
            check: CLOSURE.into(),
            residual: r,
            matrices: [
                ("xi".to_string(), matrix_value(xi.matrix())),
                ("a".to_string(), matrix_value(a.matrix())),
                ("b".to_string(), matrix_value(b.matrix())),
                ("commutator".to_string(), matrix_value(c.matrix())),
            ]
            .into_iter()
            .collect(),
        });
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    /// Independent route to the same subspaces: singular value decomposition
    /// of the matrices of Ĵ_ξ and R̂_ξ, sums by stacking and intersections by
    /// principal vectors.
    mod svd_oracle {
        use super::super::*;
        use crate::kernel::real_svd_left;

        pub fn image(columns: &[Vec<f64>], floor: f64) -> Subspace {
            let (sigma, left) = real_svd_left(columns);
            let cutoff = RANK_TOL * sigma.first().copied().unwrap_or(0.0).max(floor);
            Subspace {
                vectors: sigma
                    .iter()
                    .zip(left)
                    .filter(|(s, _)| **s > cutoff)
                    .map(|(_, u)| u)
                    .collect(),
            }
        }

        pub fn map_image(
            xi: &DualElement,
            f: impl Fn(&DualElement, &Hermitian) -> Result<Hermitian>,
        ) -> Subspace {
            let columns: Vec<Vec<f64>> = hermitian_basis(xi.dim())
                .iter()
                .map(|e| vectorize(&f(xi, e).unwrap()))
                .collect();
            image(&columns, xi.frobenius_norm())
        }

        pub fn sum(p: &Subspace, q: &Subspace) -> Subspace {
            let cols: Vec<Vec<f64>> = p.vectors.iter().chain(&q.vectors).cloned().collect();
            image(&cols, 1.0)
        }

        pub fn intersection(p: &Subspace, q: &Subspace) -> Subspace {
            let k = p.rank() + q.rank() - sum(p, q).rank();
            if k == 0 {
                return Subspace::default();
            }
            let cross: Vec<Vec<f64>> = q
                .vectors
                .iter()
                .map(|qv| p.vectors.iter().map(|pv| dot(pv, qv)).collect())
                .collect();
            let (_, left) = real_svd_left(&cross);
            let dim = p.vectors[0].len();
            let vectors = left
                .into_iter()
                .take(k)
                .map(|u| {
                    let mut v = vec![0.0; dim];
                    for (c, pv) in u.iter().zip(&p.vectors) {
                        for (vi, pi) in v.iter_mut().zip(pv) {
                            *vi += c * pi;
                        }
                    }
                    v
                })
                .collect();
            Subspace { vectors }
        }

        pub fn all(xi: &DualElement) -> [Subspace; 4] {
            let l = map_image(xi, jhat);
            let r = map_image(xi, rhat);
            let z = intersection(&l, &r);
            let o = sum(&l, &r);
            [l, r, z, o]
        }
    }

    #[test]
    fn spectral_subspaces_match_svd_oracle() {
        use super::*;
        for n in 1..=4 {
            for trial in 0..6 {
                for kind in DistributionKind::ALL {
                    let mut rng = rng_for(77, (n * 100 + trial) as u64);
                    let xi = sample_point(kind, n, trial, &mut rng);
                    let fast = spectral_subspaces(&xi);
                    let slow = svd_oracle::all(&xi);
                    for (k, (f, s)) in fast.iter().zip(&slow).enumerate() {
                        assert_eq!(f.rank(), s.rank(), "n={n} trial={trial} subspace {k}");
                        for v in &f.vectors {
                            assert!(s.residual(v) < 1e-9, "n={n} subspace {k}");
                        }
                        for v in &s.vectors {
                            assert!(f.residual(v) < 1e-9, "n={n} subspace {k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn spectral_basis_is_orthonormal() {
        use super::*;
        let xi = random_hermitian_with(4, &mut rng_for(5, 0));
        for sub in spectral_subspaces(&xi) {
            for (i, u) in sub.vectors.iter().enumerate() {
                for (j, w) in sub.vectors.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(u, w) - expected).abs() < 1e-12);
                }
            }
        }
    }
    #[test]
    fn commutation_suite_passes() {
        for n in [1, 2, 3, 5, 8] {
            let r = super::verify_commutation(n, 30, 9, 1e-10);
            assert!(r.passed, "{}", r.to_text());
        }
    }

    use super::*;
    use crate::algebra::trace_form;
    use crate::kernel::{pauli, random_hermitian, random_unitary_with};

    #[test]
    fn jhat_examples() {
        let a = random_hermitian(3, 1);
        assert!(jhat(&Hermitian::identity(3), &a).unwrap().frobenius_norm() < 1e-15);
        let v = jhat(&pauli::z(), &pauli::x()).unwrap();
        assert!(v.matrix().max_abs_diff(pauli::y().scale(-2.0).matrix()) < 1e-15);
        let d1 = Hermitian::diagonal(&[1.0, 2.0, 3.0]);
        let d2 = Hermitian::diagonal(&[0.0, -1.0, 4.0]);
        assert_eq!(jhat(&d1, &d2).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn rhat_examples() {
        let a = random_hermitian(3, 2);
        assert_eq!(rhat(&Hermitian::identity(3), &a).unwrap(), a);
        assert_eq!(rhat(&pauli::z(), &pauli::z()).unwrap(), pauli::u());
        assert_eq!(rhat(&Hermitian::zeros(3), &a).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn commutation_examples() {
        let xi = random_hermitian(3, 3);
        let a = random_hermitian(3, 4);
        let scale = (xi.frobenius_norm().powi(2) * a.frobenius_norm()).max(1.0);
        assert!(commutation_defect(&xi, &a).unwrap() <= 1e-10 * scale);
        assert!(commutation_defect(&Hermitian::identity(3), &a).unwrap() < 1e-14);
        assert!(commutation_defect(&xi, &xi).unwrap() < 1e-13);
    }

    #[test]
    fn basis_is_orthonormal_and_vectorize_inverts() {
        for n in 1..5 {
            let basis = hermitian_basis(n);
            assert_eq!(basis.len(), n * n);
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let g = trace_form(a, b).unwrap();
                    assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
                }
                let coords = vectorize(a);
                for (j, c) in coords.iter().enumerate() {
                    assert!((c - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
                }
            }
            let m = random_hermitian(n, 7);
            let back = unvectorize(n, &vectorize(&m));
            assert!(back.matrix().max_abs_diff(m.matrix()) < 1e-14);
        }
    }

    #[test]
    fn su2_basis_order() {
        let b = hermitian_basis(2);
        assert_eq!(b[0], pauli::u());
        assert_eq!(b[1], pauli::x());
        assert_eq!(b[2], pauli::y());
        assert_eq!(b[3], pauli::z());
    }

    #[test]
    fn ranks_at_examples() {
        let xi = Hermitian::diagonal(&[0.3, 1.7]);
        assert_eq!(distribution_basis(&xi, DistributionKind::Lambda).rank, 2);
        assert_eq!(distribution_basis(&xi, DistributionKind::One).rank, 4);
        let id = Hermitian::identity(3);
        assert_eq!(distribution_basis(&id, DistributionKind::Lambda).rank, 0);
        assert_eq!(distribution_basis(&id, DistributionKind::R).rank, 9);
        assert_eq!(distribution_basis(&id, DistributionKind::Zero).rank, 0);
        // R̂ at Z only reaches diagonal matrices
        let z = distribution_basis(&pauli::z(), DistributionKind::R);
        assert_eq!(z.rank, 2);
        assert!(z.projection_residual(&pauli::x()) > 0.99);
    }

    #[test]
    fn basis_vectors_are_orthonormal() {
        let xi = random_hermitian(3, 11);
        for kind in DistributionKind::ALL {
            let d = distribution_basis(&xi, kind);
            for (i, a) in d.basis.iter().enumerate() {
                for (j, b) in d.basis.iter().enumerate() {
                    let g = trace_form(a, b).unwrap();
                    assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn orbit_invariant_examples() {
        let inv = orbit_invariants(&pauli::z()).unwrap();
        assert_eq!(inv.spectrum, vec![-1.0, 1.0]);
        assert_eq!((inv.rank, inv.signature), (2, 0));

        let mut rng = rng_for(4, 0);
        let xi = hermitian_with_spectrum(&[-2.0, 0.0, 1.0, 3.0], &mut rng);
        let base = orbit_invariants(&xi).unwrap();
        assert_eq!((base.rank, base.signature), (3, 1));
        let t = crate::kernel::gaussian_matrix(4, &mut rng);
        let moved = orbit_invariants(&xi.conjugate_by(&t).unwrap()).unwrap();
        assert_eq!((moved.rank, moved.signature), (base.rank, base.signature));
        let u = random_unitary_with(4, &mut rng);
        let rotated = orbit_invariants(&xi.conjugate_by(&u).unwrap()).unwrap();
        for (x, y) in rotated.spectrum.iter().zip(&base.spectrum) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_is_involutive() {
        let r = involutivity_evidence(DistributionKind::Lambda, 3, 50, 0, 1e-9);
        assert!(r.passed, "{}", r.to_text());
    }

    #[test]
    fn r_has_witness() {
        let r = involutivity_evidence(DistributionKind::R, 2, 50, 0, 1e-9);
        assert!(r.check(CLOSURE).unwrap().passed, "{}", r.to_text());
        assert_eq!(r.witnesses.len(), 1);
        assert!(r.witnesses[0].residual > 1e-8);
    }

    #[test]
    fn one_is_involutive() {
        let r = involutivity_evidence(DistributionKind::One, 2, 50, 0, 1e-9);
        assert!(r.passed, "{}", r.to_text());
    }

    #[test]
    fn zero_is_involutive() {
        let r = involutivity_evidence(DistributionKind::Zero, 3, 20, 0, 1e-9);
        assert!(r.passed, "{}", r.to_text());
    }
}
