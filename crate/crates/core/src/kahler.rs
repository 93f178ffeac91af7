//! Kähler geometry of ℂⁿ ≅ ℝ²ⁿ and its link to u*(H) through the momentum
//! map ψ ↦ |ψ⟩⟨ψ|.
//!
//! Coordinates are z_k = q_k + i·p_k. With G = Σ(∂q⊗∂q + ∂p⊗∂p) the gradient
//! of a real function f is (∂f/∂q, ∂f/∂p), which we also read as the complex
//! vector ∂f/∂q + i·∂f/∂p. The Hamiltonian field is X_f = −J·grad f, so the
//! quadratic function f_A generates ψ̇ = −iAψ.

use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::lie_bracket;
use crate::dual::{hat_eval, lambda_eval, r_eval, star_eval};
use crate::error::{check_dim, Error, Result};
use crate::kernel::{
    gaussian_vector, random_hermitian_with, rng_for, unitary_exp, ComplexMatrix, DualElement,
    Hermitian, Observable, ZERO,
};
use crate::report::{ConventionSet, ReportBuilder, VerificationReport, KAPPA};

/// Norms at or below this are treated as the zero vector.
pub const NORM_TOL: f64 = 1e-12;

/// Amplitudes ψ ∈ ℂⁿ. Not necessarily normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Domain("state vector needs at least one entry".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("state vector has non-finite entries".into()));
        }
        Ok(Self { amplitudes })
    }

    /// ψ = q + i·p.
    pub fn from_real(q: &[f64], p: &[f64]) -> Result<Self> {
        check_dim(q.len(), p.len())?;
        Self::new(q.iter().zip(p).map(|(&a, &b)| Complex64::new(a, b)).collect())
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut amplitudes = vec![ZERO; n];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn random_with(n: usize, rng: &mut impl Rng) -> Self {
        Self {
            amplitudes: gaussian_vector(n, rng),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn q(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.re).collect()
    }

    pub fn p(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.im).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// ⟨self|other⟩, antilinear in the first slot.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scale(&self, c: Complex64) -> StateVector {
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * c).collect(),
        }
    }

    pub fn normalized(&self) -> Result<StateVector> {
        let n = nonzero_norm(self)?;
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    /// Aψ.
    pub fn apply(&self, a: &ComplexMatrix) -> Result<StateVector> {
        Ok(Self {
            amplitudes: a.mul_vec(&self.amplitudes)?,
        })
    }

    pub fn as_tangent(&self) -> RealTangent {
        RealTangent::from_complex(&self.amplitudes)
    }
}

/// Tangent vector (δq, δp) ∈ ℝ²ⁿ, stored as the q block followed by the p block.
#[derive(Clone, Debug, PartialEq)]
pub struct RealTangent {
    components: Vec<f64>,
}

impl RealTangent {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if !components.len().is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "real tangent needs even length, got {}",
                components.len()
            )));
        }
        if components.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("real tangent has non-finite entries".into()));
        }
        Ok(Self { components })
    }

    pub fn from_parts(dq: &[f64], dp: &[f64]) -> Result<Self> {
        check_dim(dq.len(), dp.len())?;
        Self::new(dq.iter().chain(dp).copied().collect())
    }

    pub fn from_complex(v: &[Complex64]) -> Self {
        let components = v.iter().map(|z| z.re).chain(v.iter().map(|z| z.im)).collect();
        Self { components }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        let (dq, dp) = self.parts();
        dq.iter().zip(dp).map(|(&a, &b)| Complex64::new(a, b)).collect()
    }

    /// Complex dimension n.
    pub fn dim(&self) -> usize {
        self.components.len() / 2
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn parts(&self) -> (&[f64], &[f64]) {
        self.components.split_at(self.dim())
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> RealTangent {
        Self {
            components: self.components.iter().map(|x| x * c).collect(),
        }
    }

    pub fn try_sub(&self, other: &RealTangent) -> Result<RealTangent> {
        check_dim(self.components.len(), other.components.len())?;
        Ok(Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

/// g(u, v) = Σ δq·δq' + δp·δp'.
pub fn g_eval(u: &RealTangent, v: &RealTangent) -> Result<f64> {
    check_dim(u.components.len(), v.components.len())?;
    Ok(u.components.iter().zip(&v.components).map(|(a, b)| a * b).sum())
}

/// ω(u, v) = Σ δq·δp' − δp·δq'.
pub fn omega_eval(u: &RealTangent, v: &RealTangent) -> Result<f64> {
    check_dim(u.components.len(), v.components.len())?;
    let (uq, up) = u.parts();
    let (vq, vp) = v.parts();
    Ok((0..u.dim()).map(|k| uq[k] * vp[k] - up[k] * vq[k]).sum())
}

/// J(δq, δp) = (−δp, δq), i.e. multiplication by i.
pub fn j_apply(u: &RealTangent) -> RealTangent {
    let (dq, dp) = u.parts();
    let components = dp.iter().map(|x| -x).chain(dq.iter().copied()).collect();
    RealTangent { components }
}

/// A real function on ℝ²ⁿ with an exact gradient.
pub trait ScalarField {
    fn value(&self, psi: &StateVector) -> Result<f64>;
    /// (∂f/∂q, ∂f/∂p).
    fn gradient(&self, psi: &StateVector) -> Result<RealTangent>;
}

/// f_A(ψ) = ½⟨ψ|Aψ⟩.
#[derive(Clone, Debug)]
pub struct QuadraticFunction<'a>(pub &'a Observable);

impl ScalarField for QuadraticFunction<'_> {
    fn value(&self, psi: &StateVector) -> Result<f64> {
        f_quadratic(self.0, psi)
    }

    /// grad f_A = Aψ.
    fn gradient(&self, psi: &StateVector) -> Result<RealTangent> {
        Ok(psi.apply(self.0.matrix())?.as_tangent())
    }
}

/// e_A(ψ) = ⟨ψ|Aψ⟩/⟨ψ|ψ⟩.
#[derive(Clone, Debug)]
pub struct ExpectationFunction<'a>(pub &'a Observable);

impl ScalarField for ExpectationFunction<'_> {
    fn value(&self, psi: &StateVector) -> Result<f64> {
        expectation(self.0, psi)
    }

    /// grad e_A = 2(Aψ − e_A·ψ)/⟨ψ|ψ⟩.
    fn gradient(&self, psi: &StateVector) -> Result<RealTangent> {
        let n2 = nonzero_norm(psi)?.powi(2);
        let (e, ap) = rayleigh(self.0, psi)?;
        let g: Vec<Complex64> = ap
            .amplitudes
            .iter()
            .zip(&psi.amplitudes)
            .map(|(a, x)| (a - x * e) * (2.0 / n2))
            .collect();
        Ok(RealTangent::from_complex(&g))
    }
}

pub fn f_quadratic(a: &Observable, psi: &StateVector) -> Result<f64> {
    let ap = psi.apply(a.matrix())?;
    Ok(0.5 * psi.inner(&ap)?.re)
}

/// The three products of functions built from the Kähler tensors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionBrackets {
    /// Σ ∂f₁/∂q·∂f₂/∂p − ∂f₁/∂p·∂f₂/∂q
    pub poisson: f64,
    /// Σ ∂f₁/∂q·∂f₂/∂p + ∂f₁/∂p·∂f₂/∂q
    pub symmetric: f64,
    /// 4·Σ ∂f₁/∂z·∂f₂/∂z̄ = G(df₁, df₂) + i·{f₁, f₂}
    pub hermitian: Complex64,
}

pub fn function_brackets(
    f1: &dyn ScalarField,
    f2: &dyn ScalarField,
    psi: &StateVector,
) -> Result<FunctionBrackets> {
    let g1 = f1.gradient(psi)?;
    let g2 = f2.gradient(psi)?;
    let (q1, p1) = g1.parts();
    let (q2, p2) = g2.parts();
    let mut poisson = 0.0;
    let mut symmetric = 0.0;
    let mut hermitian = ZERO;
    for k in 0..g1.dim() {
        poisson += q1[k] * p2[k] - p1[k] * q2[k];
        symmetric += q1[k] * p2[k] + p1[k] * q2[k];
        // ∂/∂z = ½(∂q − i∂p), ∂/∂z̄ = ½(∂q + i∂p)
        hermitian += Complex64::new(q1[k], -p1[k]) * Complex64::new(q2[k], p2[k]);
    }
    Ok(FunctionBrackets {
        poisson,
        symmetric,
        hermitian,
    })
}

/// μ(ψ) = |ψ⟩⟨ψ|.
pub fn momentum_map(psi: &StateVector) -> DualElement {
    let a = &psi.amplitudes;
    let m = ComplexMatrix::from_fn(psi.dim(), |i, j| a[i] * a[j].conj());
    Hermitian::symmetrize(&m)
}

/// G(df₁, df₂) from exact gradients.
pub fn metric_of_gradients(f1: &dyn ScalarField, f2: &dyn ScalarField, psi: &StateVector) -> Result<f64> {
    g_eval(&f1.gradient(psi)?, &f2.gradient(psi)?)
}

pub const PULLBACK_HAT: &str = "pullback_hat";
pub const PULLBACK_POISSON: &str = "pullback_poisson";
pub const PULLBACK_JORDAN: &str = "pullback_jordan";
pub const HERMITIAN_STAR: &str = "hermitian_bracket_star";
pub const EQUIVARIANCE: &str = "equivariance";
pub const DISPERSION_KAPPA: &str = "dispersion_kappa";
pub const DISPERSION_VARIANCE: &str = "dispersion_variance";
pub const HAMILTONIAN_FIELD: &str = "hamiltonian_field_quadratic";
pub const KAHLER_COMPATIBILITY: &str = "kahler_compatibility";

/// Residuals of the three pullback identities and of ⟨f_A|f_B⟩ = 2(Â⋆B̂)∘μ,
/// each relative to max(1, ‖A‖·‖B‖·‖ψ‖²).
fn pullback_residuals(a: &Observable, b: &Observable, psi: &StateVector) -> Result<Vec<(&'static str, f64)>> {
    check_dim(a.dim(), psi.dim())?;
    check_dim(b.dim(), psi.dim())?;
    let rho = momentum_map(psi);
    let n2 = psi.norm_sqr();
    let (na, nb) = (a.frobenius_norm(), b.frobenius_norm());
    let (fa, fb) = (QuadraticFunction(a), QuadraticFunction(b));
    let brackets = function_brackets(&fa, &fb, psi)?;
    let scale1 = (na * n2).max(1.0);
    let scale2 = (na * nb * n2).max(1.0);
    let hermitian_rhs = star_eval(a, b, &rho)? * 2.0;
    Ok(vec![
        (PULLBACK_HAT, (hat_eval(a, &rho)? - fa.value(psi)?).abs() / scale1),
        (PULLBACK_POISSON, (lambda_eval(a, b, &rho)? - brackets.poisson).abs() / scale2),
        (
            PULLBACK_JORDAN,
            (r_eval(a, b, &rho)? - metric_of_gradients(&fa, &fb, psi)?).abs() / scale2,
        ),
        (HERMITIAN_STAR, (brackets.hermitian - hermitian_rhs).norm() / scale2),
    ])
}

/// Checks μ*(Â) = f_A, μ*{Â, B̂} = {f_A, f_B} and μ*R(dÂ, dB̂) = G(df_A, df_B)
/// at ψ, plus the Hermitian-bracket relation ⟨f_A|f_B⟩ = 2(Â⋆B̂)∘μ.
pub fn pullback_checks(
    a: &Observable,
    b: &Observable,
    psi: &StateVector,
    tol: f64,
) -> Result<VerificationReport> {
    let mut report = ReportBuilder::new("momentum_map_pullback", tol).dim(psi.dim()).trials(1);
    for (name, r) in pullback_residuals(a, b, psi)? {
        report.record(name, r);
    }
    Ok(report.finish())
}

/// Random-trial version of [`pullback_checks`] together with equivariance of
/// μ, the dispersion identity G(de_A, de_A) = κ·dispersion, the Hamiltonian
/// field of f_A and the compatibility ω(u, v) = g(Ju, v). Trial `i` uses
/// stream `i` of `seed`.
pub fn verify_momentum_map(n: usize, trials: usize, seed: u64, tol: f64) -> VerificationReport {
    let per_trial: Vec<Vec<(&'static str, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t as u64);
            let a = random_hermitian_with(n, &mut rng);
            let b = random_hermitian_with(n, &mut rng);
            let h = random_hermitian_with(n, &mut rng);
            let psi = StateVector::random_with(n, &mut rng);
            let time: f64 = rng.random_range(0.0..10.0);
            let mut out = pullback_residuals(&a, &b, &psi).expect("equal dims");

            let u = unitary_exp(&h, time, 1.0).expect("Jacobi converges");
            let moved = momentum_map(&psi.apply(&u).expect("dim"));
            let conj = momentum_map(&psi).conjugate_by(&u).expect("dim");
            let equiv = moved.try_sub(&conj).expect("dim").frobenius_norm();
            out.push((EQUIVARIANCE, equiv / psi.norm_sqr().max(1.0)));

            let unit = psi.normalized().expect("gaussian vector is nonzero");
            let e = ExpectationFunction(&a);
            let grad = e.gradient(&unit).expect("dim");
            let lhs = g_eval(&grad, &grad).expect("dim");
            let disp = dispersion(&a, &unit).expect("dim");
            let a2 = Hermitian::symmetrize(&(a.matrix() * a.matrix()));
            let mean = expectation(&a, &unit).expect("dim");
            let variance = expectation(&a2, &unit).expect("dim") - mean * mean;
            out.push((DISPERSION_VARIANCE, (disp - variance).abs() / a.frobenius_norm().powi(2).max(1.0)));
            let rhs = KAPPA * disp;
            out.push((DISPERSION_KAPPA, (lhs - rhs).abs() / a.frobenius_norm().powi(2).max(1.0)));

            let field = hamiltonian_field(&QuadraticFunction(&a), &psi).expect("dim");
            let expected = psi.apply(a.matrix()).expect("dim").scale(Complex64::new(0.0, -1.0));
            let defect = field.try_sub(&expected.as_tangent()).expect("dim").norm();
            out.push((HAMILTONIAN_FIELD, defect / (a.frobenius_norm() * psi.norm()).max(1.0)));

            let v = StateVector::random_with(n, &mut rng).as_tangent();
            let w = psi.as_tangent();
            let compat = omega_eval(&v, &w).unwrap() - g_eval(&j_apply(&v), &w).unwrap();
            out.push((KAHLER_COMPATIBILITY, compat.abs() / (v.norm() * w.norm()).max(1.0)));
            out
        })
        .collect();

    let mut report = ReportBuilder::new("momentum_map", tol)
        .conventions(ConventionSet::default())
        .seed(seed)
        .dim(n)
        .trials(trials);
    for trial in per_trial {
        for (name, r) in trial {
            report.record(name, r);
        }
    }
    report.finish()
}

fn nonzero_norm(psi: &StateVector) -> Result<f64> {
    let n = psi.norm();
    if n <= NORM_TOL {
        Err(Error::Domain(format!("vector norm {n:e} is below {NORM_TOL:e}")))
    } else {
        Ok(n)
    }
}

/// (e_A(ψ), Aψ).
fn rayleigh(a: &Observable, psi: &StateVector) -> Result<(f64, StateVector)> {
    check_dim(a.dim(), psi.dim())?;
    let n2 = nonzero_norm(psi)?.powi(2);
    let ap = psi.apply(a.matrix())?;
    Ok((psi.inner(&ap)?.re / n2, ap))
}

pub fn expectation(a: &Observable, psi: &StateVector) -> Result<f64> {
    Ok(rayleigh(a, psi)?.0)
}

/// ⟨A²⟩ − ⟨A⟩², evaluated as ‖(A − e_A)ψ‖²/‖ψ‖² so it is never negative.
pub fn dispersion(a: &Observable, psi: &StateVector) -> Result<f64> {
    Ok(residual_vector(a, psi)?.0 .1.powi(2) / psi.norm_sqr())
}

/// ((e_A, ‖Aψ − e_Aψ‖), Aψ − e_Aψ).
fn residual_vector(a: &Observable, psi: &StateVector) -> Result<((f64, f64), Vec<Complex64>)> {
    let (e, ap) = rayleigh(a, psi)?;
    let r: Vec<Complex64> = ap
        .amplitudes
        .iter()
        .zip(&psi.amplitudes)
        .map(|(x, y)| x - y * e)
        .collect();
    let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(((e, norm), r))
}

/// G(df): the gradient itself, as G is the identity in these coordinates.
pub fn gradient_field(f: &dyn ScalarField, psi: &StateVector) -> Result<RealTangent> {
    f.gradient(psi)
}

/// X_f = (∂f/∂p, −∂f/∂q) = −J·grad f.
pub fn hamiltonian_field(f: &dyn ScalarField, psi: &StateVector) -> Result<RealTangent> {
    Ok(j_apply(&f.gradient(psi)?).scale(-1.0))
}

pub fn gradient_field_e(a: &Observable, psi: &StateVector) -> Result<RealTangent> {
    gradient_field(&ExpectationFunction(a), psi)
}

pub fn hamiltonian_field_e(a: &Observable, psi: &StateVector) -> Result<RealTangent> {
    hamiltonian_field(&ExpectationFunction(a), psi)
}

/// Central-difference estimate of κ in G(de_A, de_A) = κ·dispersion at n = 2:
/// random A, random unit ψ, gradient of e_A by finite differences along each
/// of the four real directions.
pub fn kappa_oracle(seed: u64) -> f64 {
    let mut rng = rng_for(seed, 0);
    let a = random_hermitian_with(2, &mut rng);
    let psi = StateVector::random_with(2, &mut rng).normalized().expect("nonzero");
    let h = 1e-5;
    let base = psi.as_tangent();
    let mut g = 0.0;
    for k in 0..4 {
        let shifted = |s: f64| {
            let mut c = base.components.clone();
            c[k] += s;
            let v = RealTangent { components: c }.to_complex();
            expectation(&a, &StateVector { amplitudes: v }).expect("nonzero")
        };
        let d = (shifted(h) - shifted(-h)) / (2.0 * h);
        g += d * d;
    }
    g / dispersion(&a, &psi).expect("nonzero")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Toward the largest eigenvalue.
    Ascent,
    /// Toward the smallest eigenvalue.
    Descent,
}

impl FromStr for Direction {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ascent" | "max" => Ok(Self::Ascent),
            "descent" | "min" => Ok(Self::Descent),
            other => Err(format!("unknown direction {other:?} (ascent or descent)")),
        }
    }
}

pub const DEFAULT_FLOW_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// 0.1/‖A‖_F, or 0.1 for A = 0.
pub fn default_step(a: &Observable) -> f64 {
    let n = a.frobenius_norm();
    if n > 0.0 {
        0.1 / n
    } else {
        0.1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub eigenvalue: f64,
    /// Unit vector.
    pub eigenvector: StateVector,
    pub iterations: usize,
    /// ‖Aψ − λψ‖ at the returned vector.
    pub residual: f64,
}

/// Projected gradient flow of e_A: ψ ← normalize(ψ ± step·grad e_A(ψ)).
///
/// Stops as soon as ‖Aψ − e_A(ψ)ψ‖ ≤ tol for unit ψ; a starting eigenvector
/// returns with zero iterations.
pub fn eigensolve_gradient_flow(
    a: &Observable,
    psi0: &StateVector,
    step: f64,
    tol: f64,
    max_iter: usize,
    direction: Direction,
) -> Result<EigenPair> {
    deflated_flow(a, psi0, &[], step, tol, max_iter, direction)
}

fn project_out(v: &mut [Complex64], found: &[StateVector]) {
    for u in found {
        let c: Complex64 = u.amplitudes.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
        for (vi, ui) in v.iter_mut().zip(&u.amplitudes) {
            *vi -= c * ui;
        }
    }
}

fn deflated_flow(
    a: &Observable,
    psi0: &StateVector,
    found: &[StateVector],
    step: f64,
    tol: f64,
    max_iter: usize,
    direction: Direction,
) -> Result<EigenPair> {
    check_dim(a.dim(), psi0.dim())?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    let sign = match direction {
        Direction::Ascent => 1.0,
        Direction::Descent => -1.0,
    };
    let mut v = psi0.amplitudes.clone();
    project_out(&mut v, found);
    let mut psi = StateVector { amplitudes: v }.normalized()?;
    let m = a.matrix();
    for iteration in 0..=max_iter {
        let mut av = m.mul_vec(&psi.amplitudes)?;
        project_out(&mut av, found);
        let e: f64 = psi.amplitudes.iter().zip(&av).map(|(x, y)| (x.conj() * y).re).sum();
        let r: Vec<Complex64> = av.iter().zip(&psi.amplitudes).map(|(x, y)| x - y * e).collect();
        let res = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if res <= tol {
            let residual = residual_vector(a, &psi)?.0 .1;
            return Ok(EigenPair {
                eigenvalue: e,
                eigenvector: psi,
                iterations: iteration,
                residual,
            });
        }
        if iteration == max_iter {
            return Err(Error::NonConvergence {
                iterations: max_iter,
                residual: res,
            });
        }
        // grad e_A = 2(Aψ − eψ) at unit ψ
        let mut next: Vec<Complex64> = psi
            .amplitudes
            .iter()
            .zip(&r)
            .map(|(x, g)| x + g * (2.0 * sign * step))
            .collect();
        project_out(&mut next, found);
        psi = StateVector { amplitudes: next }.normalized()?;
    }
    unreachable!("loop returns on its last iteration")
}

/// Successive extremal eigenpairs by deflation: each new flow runs on the
/// orthogonal complement of the vectors already found, starting from stream
/// `j` of `seed`. Reaches interior eigenvalues that the plain flow cannot.
pub fn eigensolve_deflated(
    a: &Observable,
    count: usize,
    direction: Direction,
    seed: u64,
    step: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<EigenPair>> {
    let n = a.dim();
    if count > n {
        return Err(Error::Domain(format!("cannot deflate {count} eigenpairs in dimension {n}")));
    }
    let mut found: Vec<StateVector> = Vec::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let start = StateVector::random_with(n, &mut rng_for(seed, j as u64));
        let pair = deflated_flow(a, &start, &found, step, tol, max_iter, direction)?;
        found.push(pair.eigenvector.clone());
        out.push(pair);
    }
    Ok(out)
}

/// ‖[A, μ(ψ)]₋‖: zero exactly when ψ is an eigenvector of A.
pub fn eigenvector_defect(a: &Observable, psi: &StateVector) -> Result<f64> {
    Ok(lie_bracket(a, &momentum_map(psi))?.frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{eig_hermitian, pauli, random_hermitian};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sv(v: &[(f64, f64)]) -> StateVector {
        StateVector::new(v.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    #[test]
    fn kahler_triple() {
        let eq = RealTangent::from_parts(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        let ep = RealTangent::from_parts(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(g_eval(&eq, &eq).unwrap(), 1.0);
        assert_eq!(omega_eval(&eq, &ep).unwrap(), 1.0);
        assert_eq!(omega_eval(&ep, &eq).unwrap(), -1.0);
        let mut rng = rng_for(1, 0);
        let u = StateVector::random_with(3, &mut rng).as_tangent();
        let v = StateVector::random_with(3, &mut rng).as_tangent();
        assert_eq!(j_apply(&j_apply(&u)), u.scale(-1.0));
        let d = omega_eval(&u, &v).unwrap() - g_eval(&j_apply(&u), &v).unwrap();
        assert!(d.abs() < 1e-14);
    }

    #[test]
    fn quadratic_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let unit = StateVector::random_with(3, &mut rng_for(2, 0)).normalized().unwrap();
        assert!((f_quadratic(&Hermitian::identity(3), &unit).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(f_quadratic(&pauli::z(), &StateVector::basis(2, 0)).unwrap(), 0.5);
        let plus = sv(&[(s, 0.0), (s, 0.0)]);
        assert!((f_quadratic(&pauli::x(), &plus).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bracket_examples() {
        let psi = StateVector::random_with(2, &mut rng_for(3, 0));
        let (x, y) = (pauli::x(), pauli::y());
        let fx = QuadraticFunction(&x);
        let fy = QuadraticFunction(&y);
        assert_eq!(function_brackets(&fx, &fx, &psi).unwrap().poisson, 0.0);
        let p = function_brackets(&fx, &fy, &psi).unwrap().poisson;
        let two_z = pauli::z().scale(2.0);
        assert!((p - f_quadratic(&two_z, &psi).unwrap()).abs() < 1e-14);
        let id = Hermitian::identity(2);
        let fi = QuadraticFunction(&id);
        let h = function_brackets(&fi, &fi, &psi).unwrap().hermitian;
        assert!((h - c(psi.norm_sqr(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn symmetric_bracket_in_the_real_case() {
        // real symmetric A, B and ψ = (1 + i)q give {f_A, f_B}_+ = R(dÂ, dB̂)∘μ
        let mut rng = rng_for(4, 0);
        let real = |m: Hermitian| {
            Hermitian::symmetrize(&ComplexMatrix::from_fn(3, |i, j| c(m.matrix()[(i, j)].re, 0.0)))
        };
        let a = real(random_hermitian_with(3, &mut rng));
        let b = real(random_hermitian_with(3, &mut rng));
        let q = [0.3, -1.2, 0.7];
        let psi = StateVector::from_real(&q, &q).unwrap();
        let s = function_brackets(&QuadraticFunction(&a), &QuadraticFunction(&b), &psi)
            .unwrap()
            .symmetric;
        let r = r_eval(&a, &b, &momentum_map(&psi)).unwrap();
        assert!((s - r).abs() < 1e-13, "{s} vs {r}");
    }

    #[test]
    fn momentum_map_examples() {
        assert_eq!(momentum_map(&StateVector::basis(2, 0)), Hermitian::diagonal(&[1.0, 0.0]));
        assert_eq!(momentum_map(&sv(&[(0.0, 0.0), (0.0, 0.0)])).frobenius_norm(), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = momentum_map(&sv(&[(s, 0.0), (s, 0.0)]));
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!((m.matrix()[(i, j)] - c(0.5, 0.0)).norm() < 1e-15);
        }
        let psi = StateVector::random_with(4, &mut rng_for(5, 0));
        assert!((momentum_map(&psi).trace() - psi.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn pullback_examples() {
        let mut rng = rng_for(6, 0);
        let a = random_hermitian_with(3, &mut rng);
        let b = random_hermitian_with(3, &mut rng);
        let psi = StateVector::random_with(3, &mut rng);
        let r = pullback_checks(&a, &b, &psi, 1e-9).unwrap();
        assert!(r.passed, "{}", r.to_text());

        let zero = sv(&[(0.0, 0.0); 3]);
        let r = pullback_checks(&a, &b, &zero, 0.0).unwrap();
        assert!(r.passed);

        let id = Hermitian::identity(3);
        let rho = momentum_map(&psi);
        let half = 0.5 * psi.norm_sqr();
        assert!((hat_eval(&id, &rho).unwrap() - half).abs() < 1e-14);
        assert!((f_quadratic(&id, &psi).unwrap() - half).abs() < 1e-14);
    }

    #[test]
    fn suite_passes() {
        for n in [1, 2, 5] {
            let r = verify_momentum_map(n, 30, 7, 1e-9);
            assert!(r.passed, "{}", r.to_text());
        }
    }

    #[test]
    fn expectation_examples() {
        let a = random_hermitian(4, 8);
        let spec = eig_hermitian(&a).unwrap();
        let v = StateVector::new(spec.eigenvector(2)).unwrap();
        assert!((expectation(&a, &v).unwrap() - spec.eigenvalues[2]).abs() < 1e-12);
        assert_eq!(expectation(&pauli::z(), &sv(&[(1.0, 0.0), (1.0, 0.0)])).unwrap(), 0.0);
        let psi = StateVector::random_with(4, &mut rng_for(9, 0));
        let scaled = psi.scale(c(-2.5, 0.7));
        let d = expectation(&a, &psi).unwrap() - expectation(&a, &scaled).unwrap();
        assert!(d.abs() < 1e-13);
        assert!(matches!(
            expectation(&a, &sv(&[(0.0, 0.0); 4])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn dispersion_examples() {
        let a = random_hermitian(3, 10);
        let spec = eig_hermitian(&a).unwrap();
        let v = StateVector::new(spec.eigenvector(0)).unwrap();
        assert!(dispersion(&a, &v).unwrap() < 1e-24);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = sv(&[(s, 0.0), (s, 0.0)]);
        assert!((dispersion(&pauli::z(), &plus).unwrap() - 1.0).abs() < 1e-15);
        let psi = StateVector::random_with(3, &mut rng_for(11, 0));
        assert!(dispersion(&Hermitian::identity(3), &psi).unwrap() < 1e-28);
    }

    #[test]
    fn fields_vanish_at_eigenvectors() {
        let a = random_hermitian(3, 12);
        let spec = eig_hermitian(&a).unwrap();
        let v = StateVector::new(spec.eigenvector(1)).unwrap();
        assert!(gradient_field_e(&a, &v).unwrap().norm() < 1e-12);
        assert!(hamiltonian_field_e(&a, &v).unwrap().norm() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = sv(&[(s, 0.0), (s, 0.0)]);
        assert!(gradient_field_e(&pauli::z(), &plus).unwrap().norm() > 0.5);
        assert!(hamiltonian_field_e(&pauli::z(), &plus).unwrap().norm() > 0.5);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rng_for(13, 0);
        let a = random_hermitian_with(3, &mut rng);
        let psi = StateVector::random_with(3, &mut rng);
        let grad = gradient_field_e(&a, &psi).unwrap();
        let base = psi.as_tangent();
        let h = 1e-6;
        for k in 0..6 {
            let at = |s: f64| {
                let mut comp = base.components().to_vec();
                comp[k] += s;
                let v = RealTangent::new(comp).unwrap().to_complex();
                expectation(&a, &StateVector::new(v).unwrap()).unwrap()
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            assert!((fd - grad.components()[k]).abs() < 1e-6);
        }
        let ham = hamiltonian_field_e(&a, &psi).unwrap();
        assert_eq!(ham, j_apply(&grad).scale(-1.0));
    }

    #[test]
    fn kappa_is_four() {
        for seed in 0..5 {
            let k = kappa_oracle(seed);
            assert!((k - KAPPA).abs() < 1e-6, "seed {seed}: {k}");
        }
    }

    #[test]
    fn hamiltonian_flow_of_quadratic_is_schrodinger() {
        // one small Euler step along X_{f_A} against exp(−iεA)ψ
        let mut rng = rng_for(14, 0);
        let a = random_hermitian_with(3, &mut rng);
        let psi = StateVector::random_with(3, &mut rng);
        let x = hamiltonian_field(&QuadraticFunction(&a), &psi).unwrap().to_complex();
        let err = |eps: f64| {
            let u = unitary_exp(&a, eps, 1.0).unwrap();
            let exact = psi.apply(&u).unwrap();
            exact
                .amplitudes()
                .iter()
                .zip(psi.amplitudes())
                .zip(&x)
                .map(|((e, p), v)| (e - p - v * eps).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let ratio = err(1e-3) / err(5e-4);
        assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn eigensolver_on_z() {
        let psi0 = sv(&[(0.6, 0.0), (0.8, 0.0)]);
        let z = pauli::z();
        let r = eigensolve_gradient_flow(&z, &psi0, default_step(&z), 1e-9, 100_000, Direction::Descent)
            .unwrap();
        assert!((r.eigenvalue + 1.0).abs() < 1e-9);
        assert!(r.eigenvector.amplitudes()[0].norm() < 1e-9);
        assert!(r.residual <= 1e-9);
    }

    #[test]
    fn eigensolver_against_oracle() {
        for seed in 0..10 {
            let mut rng = rng_for(seed, 0);
            let a = random_hermitian_with(5, &mut rng);
            let psi0 = StateVector::random_with(5, &mut rng);
            let oracle = eig_hermitian(&a).unwrap().eigenvalues;
            let step = default_step(&a);
            let up = eigensolve_gradient_flow(&a, &psi0, step, 1e-9, 100_000, Direction::Ascent).unwrap();
            let down = eigensolve_gradient_flow(&a, &psi0, step, 1e-9, 100_000, Direction::Descent).unwrap();
            assert!((up.eigenvalue - oracle[4]).abs() < 1e-8);
            assert!((down.eigenvalue - oracle[0]).abs() < 1e-8);
        }
    }

    #[test]
    fn eigensolver_stops_at_eigenvector() {
        let a = random_hermitian(4, 15);
        let v = StateVector::new(eig_hermitian(&a).unwrap().eigenvector(3)).unwrap();
        let r = eigensolve_gradient_flow(&a, &v, 0.1, 1e-9, 10, Direction::Descent).unwrap();
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn eigensolver_errors() {
        let z = pauli::z();
        let zero = sv(&[(0.0, 0.0), (0.0, 0.0)]);
        assert!(matches!(
            eigensolve_gradient_flow(&z, &zero, 0.1, 1e-9, 10, Direction::Ascent),
            Err(Error::Domain(_))
        ));
        let a = random_hermitian(4, 16);
        let psi0 = StateVector::random_with(4, &mut rng_for(16, 1));
        assert!(matches!(
            eigensolve_gradient_flow(&a, &psi0, 1e-6, 1e-12, 3, Direction::Ascent),
            Err(Error::NonConvergence { iterations: 3, .. })
        ));
    }

    #[test]
    fn deflation_reaches_interior_eigenvalues() {
        let a = random_hermitian(5, 17);
        let oracle = eig_hermitian(&a).unwrap().eigenvalues;
        let pairs = eigensolve_deflated(&a, 5, Direction::Descent, 3, default_step(&a), 1e-10, 200_000).unwrap();
        for (p, l) in pairs.iter().zip(&oracle) {
            assert!((p.eigenvalue - l).abs() < 1e-8, "{} vs {l}", p.eigenvalue);
        }
    }

    #[test]
    fn projective_invariance_of_the_solver() {
        let mut rng = rng_for(18, 0);
        let a = random_hermitian_with(4, &mut rng);
        let psi0 = StateVector::random_with(4, &mut rng);
        let step = default_step(&a);
        let r1 = eigensolve_gradient_flow(&a, &psi0, step, 1e-10, 100_000, Direction::Ascent).unwrap();
        let r2 = eigensolve_gradient_flow(&a, &psi0.scale(c(0.0, 3.0)), step, 1e-10, 100_000, Direction::Ascent)
            .unwrap();
        assert!((r1.eigenvalue - r2.eigenvalue).abs() < 1e-12);
        let p1 = momentum_map(&r1.eigenvector);
        let p2 = momentum_map(&r2.eigenvector);
        assert!(p1.matrix().max_abs_diff(p2.matrix()) < 1e-9);
        assert!(eigenvector_defect(&a, &r1.eigenvector).unwrap() < 1e-8);
    }
}
