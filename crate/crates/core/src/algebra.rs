//! Jordan–Lie algebra of Hermitian observables.

use rayon::prelude::*;

use crate::error::{check_dim, Result};
use crate::kernel::{random_hermitian_with, rng_for, ComplexMatrix, Hermitian, I};
use crate::report::{ConventionSet, ReportBuilder, VerificationReport};

/// [A,B]₋ = −i(AB − BA).
pub fn lie_bracket(a: &Hermitian, b: &Hermitian) -> Result<Hermitian> {
    check_dim(a.dim(), b.dim())?;
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok(Hermitian::from_matrix_unchecked((&ab - &ba).scale(-I)))
}

/// A∘B = ½(AB + BA).
pub fn jordan_product(a: &Hermitian, b: &Hermitian) -> Result<Hermitian> {
    check_dim(a.dim(), b.dim())?;
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok(Hermitian::from_matrix_unchecked((&ab + &ba).scale_real(0.5)))
}

/// ⟨A, B⟩ = ½·Tr(AB).
pub fn trace_form(a: &Hermitian, b: &Hermitian) -> Result<f64> {
    Ok(0.5 * a.matrix().trace_product(b.matrix())?.re)
}

/// (A∘B)∘C − A∘(B∘C).
pub fn associator_defect(a: &Hermitian, b: &Hermitian, c: &Hermitian) -> Result<Hermitian> {
    let left = jordan_product(&jordan_product(a, b)?, c)?;
    let right = jordan_product(a, &jordan_product(b, c)?)?;
    left.try_sub(&right)
}

/// ¼·ħ·[[A,C]₋,B]₋, the right-hand side of the associator identity.
pub fn associator_rhs(a: &Hermitian, b: &Hermitian, c: &Hermitian, hbar: f64) -> Result<Hermitian> {
    Ok(lie_bracket(&lie_bracket(a, c)?, b)?.scale(0.25 * hbar))
}

fn norm_of_diff(x: &Hermitian, y: &Hermitian) -> f64 {
    (x.matrix() - y.matrix()).frobenius_norm()
}

fn scale_of(norms: &[f64]) -> f64 {
    norms.iter().product::<f64>().max(1.0)
}

pub const JACOBI: &str = "jacobi";
pub const LIE_ANTISYMMETRY: &str = "lie_antisymmetry";
pub const JORDAN_COMMUTATIVITY: &str = "jordan_commutativity";
pub const JORDAN_IDENTITY: &str = "jordan_identity";
pub const LIE_INVARIANCE: &str = "trace_form_lie_invariance";
pub const JORDAN_INVARIANCE: &str = "trace_form_jordan_invariance";
pub const LEIBNIZ: &str = "leibniz";
pub const ASSOCIATOR: &str = "associator";

type Bracket<'a> = &'a (dyn Fn(&Hermitian, &Hermitian) -> Hermitian + Sync);

/// Relative residuals of every Jordan–Lie identity for one triple, computed
/// with the supplied bracket in place of `lie_bracket`.
fn residuals(a: &Hermitian, b: &Hermitian, c: &Hermitian, lie: Bracket, hbar: f64) -> Vec<(&'static str, f64)> {
    let jor = |x: &Hermitian, y: &Hermitian| jordan_product(x, y).expect("equal dims");
    let form = |x: &Hermitian, y: &Hermitian| trace_form(x, y).expect("equal dims");
    let (na, nb, nc) = (a.frobenius_norm(), b.frobenius_norm(), c.frobenius_norm());
    let mut out = Vec::with_capacity(8);

    let jac = Hermitian::combination(&[
        (1.0, &lie(&lie(a, b), c)),
        (1.0, &lie(&lie(b, c), a)),
        (1.0, &lie(&lie(c, a), b)),
    ])
    .expect("equal dims");
    out.push((JACOBI, jac.frobenius_norm() / scale_of(&[na, nb, nc])));

    let anti = lie(a, b).try_add(&lie(b, a)).expect("equal dims");
    out.push((LIE_ANTISYMMETRY, anti.frobenius_norm() / scale_of(&[na, nb])));

    out.push((
        JORDAN_COMMUTATIVITY,
        norm_of_diff(&jor(a, b), &jor(b, a)) / scale_of(&[na, nb]),
    ));

    let a2 = jor(a, a);
    out.push((
        JORDAN_IDENTITY,
        norm_of_diff(&jor(&jor(a, b), &a2), &jor(a, &jor(b, &a2))) / scale_of(&[na, na, na, nb]),
    ));

    out.push((
        LIE_INVARIANCE,
        (form(&lie(a, b), c) - form(a, &lie(b, c))).abs() / scale_of(&[na, nb, nc]),
    ));
    out.push((
        JORDAN_INVARIANCE,
        (form(&jor(a, b), c) - form(a, &jor(b, c))).abs() / scale_of(&[na, nb, nc]),
    ));

    let leibniz = Hermitian::combination(&[
        (1.0, &lie(a, &jor(b, c))),
        (-1.0, &jor(&lie(a, b), c)),
        (-1.0, &jor(b, &lie(a, c))),
    ])
    .expect("equal dims");
    out.push((LEIBNIZ, leibniz.frobenius_norm() / scale_of(&[na, nb, nc])));

    let assoc_lhs = associator_defect(a, b, c).expect("equal dims");
    let assoc_rhs = lie(&lie(a, c), b).scale(0.25 * hbar);
    out.push((
        ASSOCIATOR,
        norm_of_diff(&assoc_lhs, &assoc_rhs) / scale_of(&[na, nb, nc]),
    ));
    out
}

/// Random-trial check of the Jordan–Lie identities: Jacobi, antisymmetry,
/// Jordan commutativity and the Jordan identity, both invariances of the
/// trace form, the Leibniz rule and the associator identity (ħ = 1).
///
/// Trial `i` draws `(A, B, C)` from stream `i` of `seed`.
pub fn verify_jordan_lie(n: usize, trials: usize, seed: u64, tol: f64) -> VerificationReport {
    let lie = |x: &Hermitian, y: &Hermitian| lie_bracket(x, y).expect("equal dims");
    verify_jordan_lie_with(n, trials, seed, tol, &lie)
}

/// As [`verify_jordan_lie`] with a caller-supplied Lie bracket. Lets tests
/// inject a known violation and confirm the detectors fire.
pub fn verify_jordan_lie_with(
    n: usize,
    trials: usize,
    seed: u64,
    tol: f64,
    lie: Bracket,
) -> VerificationReport {
    let conventions = ConventionSet::default();
    let hbar = 1.0;
    let per_trial: Vec<Vec<(&'static str, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t as u64);
            let a = random_hermitian_with(n, &mut rng);
            let b = random_hermitian_with(n, &mut rng);
            let c = random_hermitian_with(n, &mut rng);
            residuals(&a, &b, &c, lie, hbar)
        })
        .collect();

    let mut report = ReportBuilder::new("jordan_lie", tol)
        .conventions(conventions)
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

/// Commutator AB − BA as a plain matrix.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.try_mul(b)?.try_sub(&b.try_mul(a)?)
}
