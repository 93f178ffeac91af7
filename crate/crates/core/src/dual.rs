//! Tensors on the dual space u*(H).
//!
//! A dual element ξ is stored as a Hermitian matrix and paired with an
//! observable `A` by ξ(A) = ½·Tr(ξA). With that pairing:
//!
//! * Λ(dÂ, dB̂)(ξ) = ½·Tr(ξ·[A,B]₋)        (Lie–Poisson bivector)
//! * R(dÂ, dB̂)(ξ) = ½·Tr(ξ·(AB + BA))     (Jordan tensor)
//! * (Â ⋆ B̂)(ξ)   = ½·Tr(ξ·AB) = ½·(R + iΛ)(dÂ, dB̂)(ξ)

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::algebra::{jordan_product, lie_bracket};
use crate::error::{check_dim, Error, Result};
use crate::kernel::{
    eig_hermitian, gaussian_matrix, random_hermitian_with, rng_for, unitary_exp, DualElement,
    Hermitian, Observable, TangentVector,
};
use crate::report::{ConventionSet, ReportBuilder, VerificationReport};

pub const STATE_TOL: f64 = 1e-10;

/// Linear function Â on u*(H) defined by an observable.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFunction {
    pub generator: Observable,
}

impl LinearFunction {
    pub fn new(generator: Observable) -> Self {
        Self { generator }
    }

    pub fn eval(&self, xi: &DualElement) -> Result<f64> {
        hat_eval(&self.generator, xi)
    }

    /// Â ⋆ B̂ as (real generator, imaginary generator): A∘B and ½[A,B]₋.
    pub fn star(&self, other: &LinearFunction) -> Result<(LinearFunction, LinearFunction)> {
        let re = jordan_product(&self.generator, &other.generator)?;
        let im = lie_bracket(&self.generator, &other.generator)?.scale(0.5);
        Ok((LinearFunction::new(re), LinearFunction::new(im)))
    }
}

/// Â(ξ) = ½·Tr(ξA).
pub fn hat_eval(a: &Observable, xi: &DualElement) -> Result<f64> {
    Ok(0.5 * xi.matrix().trace_product(a.matrix())?.re)
}

/// Λ(dÂ, dB̂)(ξ) = Â([A,B]₋)(ξ).
pub fn lambda_eval(a: &Observable, b: &Observable, xi: &DualElement) -> Result<f64> {
    check_dim(a.dim(), xi.dim())?;
    hat_eval(&lie_bracket(a, b)?, xi)
}

/// R(dÂ, dB̂)(ξ) = ½·Tr(ξ(AB + BA)) = 2·(A∘B)^(ξ).
pub fn r_eval(a: &Observable, b: &Observable, xi: &DualElement) -> Result<f64> {
    check_dim(a.dim(), xi.dim())?;
    Ok(2.0 * hat_eval(&jordan_product(a, b)?, xi)?)
}

/// (Â ⋆ B̂)(ξ) = ½·Tr(ξAB).
pub fn star_eval(a: &Observable, b: &Observable, xi: &DualElement) -> Result<Complex64> {
    check_dim(a.dim(), xi.dim())?;
    let ab = a.matrix().try_mul(b.matrix())?;
    Ok(xi.matrix().trace_product(&ab)? * 0.5)
}

/// X_Ĥ(ξ) = [H, ξ]₋, the field whose flow is ξ ↦ e^{−itH} ξ e^{itH}.
pub fn hamiltonian_field_dual(h: &Observable, xi: &DualElement) -> Result<TangentVector> {
    lie_bracket(h, xi)
}

/// Derivative along the unitary flow generated by `h` of R(dÂ, dB̂)(ξ),
/// estimated by a central difference of width `step` with `A`, `B` and `ξ`
/// all conjugated by e^{−itH}.
pub fn r_invariance_defect(
    h: &Observable,
    a: &Observable,
    b: &Observable,
    xi: &DualElement,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    let at = |t: f64| -> Result<f64> {
        let u = unitary_exp(h, t, 1.0)?;
        r_eval(&a.conjugate_by(&u)?, &b.conjugate_by(&u)?, &xi.conjugate_by(&u)?)
    };
    Ok(((at(step)? - at(-step)?) / (2.0 * step)).abs())
}

/// Exact form of the same statement: the Leibniz rule contracted with ξ,
/// R([H,A]₋, B)(ξ) + R(A, [H,B]₋)(ξ) + R(A, B)([H,ξ]₋).
pub fn r_invariance_defect_exact(
    h: &Observable,
    a: &Observable,
    b: &Observable,
    xi: &DualElement,
) -> Result<f64> {
    let sum = r_eval(&lie_bracket(h, a)?, b, xi)?
        + r_eval(a, &lie_bracket(h, b)?, xi)?
        + r_eval(a, b, &hamiltonian_field_dual(h, xi)?)?;
    Ok(sum.abs())
}

/// True iff ξ is positive semidefinite and has unit trace, within `tol`.
pub fn is_state(xi: &DualElement, tol: f64) -> bool {
    if (xi.trace() - 1.0).abs() > tol {
        return false;
    }
    match eig_hermitian(xi) {
        Ok(s) => s.eigenvalues.first().is_some_and(|&l| l >= -tol),
        Err(_) => false,
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Hermitian);

impl DensityMatrix {
    pub fn new(xi: Hermitian) -> Result<Self> {
        if is_state(&xi, STATE_TOL) {
            Ok(Self(xi))
        } else {
            Err(Error::Domain(
                "not a density matrix (needs PSD and unit trace)".into(),
            ))
        }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(Hermitian::identity(n).scale(1.0 / n as f64))
    }

    pub fn as_dual(&self) -> &DualElement {
        &self.0
    }

    pub fn into_dual(self) -> DualElement {
        self.0
    }

    pub fn purity(&self) -> f64 {
        self.0
            .matrix()
            .trace_product(self.0.matrix())
            .expect("square")
            .re
    }
}

/// ρ = T†T / Tr(T†T) with T standard complex Gaussian.
pub fn random_state_with(n: usize, rng: &mut impl Rng) -> DensityMatrix {
    let t = gaussian_matrix(n, rng);
    let ttd = t.adjoint().try_mul(&t).expect("square");
    let tr = ttd.trace().re;
    DensityMatrix(Hermitian::symmetrize(&ttd.scale_real(1.0 / tr)))
}

pub fn random_state(n: usize, seed: u64) -> DensityMatrix {
    random_state_with(n, &mut rng_for(seed, 0))
}

pub const HAT_SYMMETRY: &str = "hat_symmetry";
pub const LAMBDA_IS_HAT_OF_BRACKET: &str = "lambda_is_hat_of_bracket";
pub const LAMBDA_ANTISYMMETRY: &str = "lambda_antisymmetry";
pub const R_SYMMETRY: &str = "r_symmetry";
pub const STAR_DECOMPOSITION: &str = "star_decomposition";
pub const FUNCTION_JACOBI: &str = "function_bracket_jacobi";
pub const R_INVARIANCE: &str = "r_invariance";
pub const FIELD_TRACELESS: &str = "hamiltonian_field_traceless";
pub const RANDOM_STATE_VALID: &str = "random_state_is_state";

/// Random-trial check of the tensors on u*(H): Â(ξ) = ξ̂(A), Λ = (bracket)^,
/// antisymmetry of Λ and symmetry of R, ⋆ = ½R + (i/2)Λ, Jacobi for the
/// function bracket, invariance of R along Hamiltonian flows, Û(X_Ĥ) = 0, and
/// validity of sampled density matrices. Trial `i` uses stream `i` of `seed`.
pub fn verify_dual_geometry(n: usize, trials: usize, seed: u64, tol: f64) -> VerificationReport {
    let per_trial: Vec<Vec<(&'static str, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t as u64);
            let a = random_hermitian_with(n, &mut rng);
            let b = random_hermitian_with(n, &mut rng);
            let c = random_hermitian_with(n, &mut rng);
            let xi = random_hermitian_with(n, &mut rng);
            dual_residuals(&a, &b, &c, &xi, &mut rng).expect("equal dims")
        })
        .collect();
    let mut report = ReportBuilder::new("dual_geometry", tol)
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

fn dual_residuals(
    a: &Observable,
    b: &Observable,
    c: &Observable,
    xi: &DualElement,
    rng: &mut impl Rng,
) -> Result<Vec<(&'static str, f64)>> {
    let (na, nb, nc, nx) = (a.frobenius_norm(), b.frobenius_norm(), c.frobenius_norm(), xi.frobenius_norm());
    let s2 = (na * nx).max(1.0);
    let s3 = (na * nb * nx).max(1.0);
    let s4 = (na * nb * nc * nx).max(1.0);
    let mut out = Vec::with_capacity(9);
    out.push((HAT_SYMMETRY, (hat_eval(a, xi)? - hat_eval(xi, a)?).abs() / s2));
    out.push((
        LAMBDA_IS_HAT_OF_BRACKET,
        (lambda_eval(a, b, xi)? - hat_eval(&lie_bracket(a, b)?, xi)?).abs() / s3,
    ));
    out.push((
        LAMBDA_ANTISYMMETRY,
        (lambda_eval(a, b, xi)? + lambda_eval(b, a, xi)?).abs() / s3,
    ));
    out.push((R_SYMMETRY, (r_eval(a, b, xi)? - r_eval(b, a, xi)?).abs() / s3));
    let split = Complex64::new(0.5 * r_eval(a, b, xi)?, 0.5 * lambda_eval(a, b, xi)?);
    out.push((STAR_DECOMPOSITION, (star_eval(a, b, xi)? - split).norm() / s3));
    let jac = lambda_eval(&lie_bracket(a, b)?, c, xi)?
        + lambda_eval(&lie_bracket(b, c)?, a, xi)?
        + lambda_eval(&lie_bracket(c, a)?, b, xi)?;
    out.push((FUNCTION_JACOBI, jac.abs() / s4));
    out.push((R_INVARIANCE, r_invariance_defect_exact(c, a, b, xi)? / s4));
    let field = hamiltonian_field_dual(a, xi)?;
    out.push((FIELD_TRACELESS, hat_eval(&Hermitian::identity(a.dim()), &field)?.abs() / s2));
    let rho = random_state_with(a.dim(), rng);
    out.push((RANDOM_STATE_VALID, if is_state(rho.as_dual(), 1e-12) { 0.0 } else { 1.0 }));
    Ok(out)
}

pub mod su2 {
    //! Coordinate tables for u(2) in the basis U, X, Y, Z.
    //!
    //! Each entry is the generator whose hat function gives the tensor
    //! component, so Λ(dx̂, dŷ) = 2ẑ is stored as `2Z`. Tensors are evaluated
    //! from their definitions: Λ(dâ, db̂) = ([a,b]₋)^, R(dâ, db̂) = (ab + ba)^
    //! and â ⋆ b̂ = (a∘b)^ + i·(½[a,b]₋)^. The R table therefore reads
    //! R(dû, dâ) = 2â and R(dâ, dâ) = 2û.

    use std::collections::BTreeMap;

    use serde_json::{json, Value};

    use super::*;
    use crate::kernel::{matrix_value, pauli};

    pub const NAMES: [&str; 4] = ["u", "x", "y", "z"];

    pub fn basis() -> [Hermitian; 4] {
        [pauli::u(), pauli::x(), pauli::y(), pauli::z()]
    }

    #[derive(Clone, Debug)]
    pub struct GoldenTables {
        pub basis: [Hermitian; 4],
        pub lambda: Vec<Vec<Hermitian>>,
        pub r: Vec<Vec<Hermitian>>,
        /// (real generator, imaginary generator)
        pub star: Vec<Vec<(Hermitian, Hermitian)>>,
    }

    impl GoldenTables {
        pub fn index(name: &str) -> Option<usize> {
            NAMES.iter().position(|n| *n == name)
        }

        /// Tables as JSON objects keyed `"a,b"` with matrix-JSON generators.
        pub fn to_json(&self) -> Value {
            let mut lambda = BTreeMap::new();
            let mut r = BTreeMap::new();
            let mut star = BTreeMap::new();
            for (i, a) in NAMES.iter().enumerate() {
                for (j, b) in NAMES.iter().enumerate() {
                    let key = format!("{a},{b}");
                    lambda.insert(key.clone(), matrix_value(self.lambda[i][j].matrix()));
                    r.insert(key.clone(), matrix_value(self.r[i][j].matrix()));
                    star.insert(
                        key,
                        json!({
                            "re": matrix_value(self.star[i][j].0.matrix()),
                            "im": matrix_value(self.star[i][j].1.matrix()),
                        }),
                    );
                }
            }
            let basis: BTreeMap<_, _> = NAMES
                .iter()
                .zip(&self.basis)
                .map(|(n, b)| (n.to_string(), matrix_value(b.matrix())))
                .collect();
            json!({ "basis": basis, "lambda": lambda, "r": r, "star": star })
        }
    }

    /// Named residuals of the worked su(2) values: the three star products
    /// Ẑ⋆Ŷ = −iX̂, X̂⋆Ŷ = iẐ, Ẑ⋆X̂ = iŶ, the Poisson coefficients
    /// Λ(dx̂, dŷ) = 2ẑ and cyclic, and Λ(dû, ·) = 0. Each residual is the
    /// largest entry difference between generators.
    pub fn golden_residuals() -> Vec<(String, f64)> {
        let t = golden_tables();
        let [u, x, y, z] = basis();
        let idx = |n: &str| GoldenTables::index(n).expect("known name");
        let diff = |a: &Hermitian, b: &Hermitian| a.matrix().max_abs_diff(b.matrix());
        let zero = Hermitian::zeros(2);
        let mut out = Vec::new();
        for (a, b, expected, label) in [
            ("z", "y", x.scale(-1.0), "Z*Y = -iX"),
            ("x", "y", z.clone(), "X*Y = iZ"),
            ("z", "x", y.clone(), "Z*X = iY"),
        ] {
            let (re, im) = &t.star[idx(a)][idx(b)];
            out.push((format!("star {label}"), diff(re, &zero).max(diff(im, &expected))));
        }
        for (a, b, expected) in [("x", "y", &z), ("y", "z", &x), ("z", "x", &y)] {
            let label = format!("lambda({a},{b}) = 2{}", expected_name(expected));
            out.push((label, diff(&t.lambda[idx(a)][idx(b)], &expected.scale(2.0))));
        }
        let centre = NAMES
            .iter()
            .map(|b| diff(&t.lambda[0][idx(b)], &zero))
            .fold(0.0, f64::max);
        out.push(("lambda(u,*) = 0".into(), centre));
        let _ = u;
        out
    }

    fn expected_name(m: &Hermitian) -> &'static str {
        let b = basis();
        NAMES[b.iter().position(|e| e == m).expect("basis element")]
    }

    pub fn golden_tables() -> GoldenTables {
        let basis = basis();
        let table = |f: &dyn Fn(&Hermitian, &Hermitian) -> Hermitian| -> Vec<Vec<Hermitian>> {
            basis
                .iter()
                .map(|a| basis.iter().map(|b| f(a, b)).collect())
                .collect()
        };
        let lambda = table(&|a, b| lie_bracket(a, b).expect("2x2"));
        let r = table(&|a, b| jordan_product(a, b).expect("2x2").scale(2.0));
        let star = basis
            .iter()
            .map(|a| {
                basis
                    .iter()
                    .map(|b| {
                        let (re, im) = LinearFunction::new(a.clone())
                            .star(&LinearFunction::new(b.clone()))
                            .expect("2x2");
                        (re.generator, im.generator)
                    })
                    .collect()
            })
            .collect();
        GoldenTables {
            basis,
            lambda,
            r,
            star,
        }
    }
}
