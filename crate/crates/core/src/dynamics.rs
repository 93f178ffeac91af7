//! Time evolution in the Schrödinger, Heisenberg and von Neumann pictures.
//!
//! With U(t) = exp(−itH/ħ):
//!
//! * ψ(t) = U ψ₀,        iħ ψ̇ = Hψ
//! * A(t) = U† A₀ U,     Ȧ = [A, H]₋/ħ
//! * ξ(t) = U ξ₀ U†,     ξ̇ = [H, ξ]₋/ħ
//!
//! so that μ(ψ(t)) = ξ(t) when ξ₀ = μ(ψ₀), and ⟨ψ(t)|A₀ψ(t)⟩ = ⟨ψ₀|A(t)ψ₀⟩.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{jordan_product, lie_bracket};
use crate::dual::{hat_eval, lambda_eval};
use crate::error::{check_dim, Error, Result};
use crate::kahler::{
    expectation, f_quadratic, function_brackets, g_eval, hamiltonian_field, momentum_map,
    QuadraticFunction, StateVector,
};
use crate::kernel::{
    eig_hermitian, propagator, random_hermitian_with, rng_for, ComplexMatrix, Hermitian,
    Observable, SpectralDecomposition, I,
};
use crate::report::{ConventionSet, ReportBuilder, VerificationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    Schrodinger,
    Heisenberg,
    VonNeumann,
}

impl FromStr for Picture {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "schrodinger" | "schroedinger" => Ok(Self::Schrodinger),
            "heisenberg" => Ok(Self::Heisenberg),
            "vonneumann" | "von-neumann" => Ok(Self::VonNeumann),
            other => Err(format!(
                "unknown picture {other:?} (schrodinger, heisenberg or vonneumann)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Spectral propagator.
    Exact,
    /// Classic fourth-order Runge–Kutta.
    Rk4,
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Self::Exact),
            "rk4" => Ok(Self::Rk4),
            other => Err(format!("unknown method {other:?} (exact or rk4)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionSpec {
    pub hamiltonian: Observable,
    pub t_final: f64,
    pub steps: usize,
    pub hbar: f64,
    pub picture: Picture,
    pub method: Method,
}

impl EvolutionSpec {
    pub fn new(
        hamiltonian: Observable,
        t_final: f64,
        steps: usize,
        hbar: f64,
        picture: Picture,
        method: Method,
    ) -> Result<Self> {
        let spec = Self {
            hamiltonian,
            t_final,
            steps,
            hbar,
            picture,
            method,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Domain("steps must be at least 1".into()));
        }
        if !self.t_final.is_finite() {
            return Err(Error::Domain("t_final must be finite".into()));
        }
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return Err(Error::Domain(format!("hbar must be positive, got {}", self.hbar)));
        }
        Ok(())
    }

    /// `steps + 1` uniformly spaced times from 0 to `t_final`.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.t_final / self.steps as f64;
        (0..=self.steps)
            .map(|k| if k == self.steps { self.t_final } else { k as f64 * dt })
            .collect()
    }

    pub fn with_picture(&self, picture: Picture) -> Self {
        Self {
            picture,
            ..self.clone()
        }
    }

    pub fn with_method(&self, method: Method) -> Self {
        Self {
            method,
            ..self.clone()
        }
    }

    pub fn with_steps(&self, steps: usize) -> Self {
        Self {
            steps,
            ..self.clone()
        }
    }
}

/// A state in some picture: a vector for Schrödinger, a Hermitian matrix for
/// Heisenberg and von Neumann.
#[derive(Clone, Debug, PartialEq)]
pub enum Snapshot {
    Vector(StateVector),
    Matrix(Hermitian),
}

impl Snapshot {
    pub fn dim(&self) -> usize {
        match self {
            Self::Vector(v) => v.dim(),
            Self::Matrix(m) => m.dim(),
        }
    }

    fn flat(&self) -> Vec<Complex64> {
        match self {
            Self::Vector(v) => v.amplitudes().to_vec(),
            Self::Matrix(m) => m.matrix().as_slice().to_vec(),
        }
    }

    fn distance(&self, other: &Snapshot) -> f64 {
        self.flat()
            .iter()
            .zip(other.flat())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<f64>,
    pub states: Vec<T>,
}

impl<T> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&T> {
        self.states.last()
    }
}

fn propagators(spec: &EvolutionSpec) -> Result<Vec<ComplexMatrix>> {
    spec.validate()?;
    let decomposition: SpectralDecomposition = eig_hermitian(&spec.hamiltonian)?;
    Ok(spec
        .times()
        .par_iter()
        .map(|&t| propagator(&decomposition, t, spec.hbar))
        .collect())
}

/// ψ(t) = exp(−itH/ħ)ψ₀ at every sample time.
pub fn schrodinger_flow(spec: &EvolutionSpec, psi0: &StateVector) -> Result<Trajectory<StateVector>> {
    check_dim(spec.hamiltonian.dim(), psi0.dim())?;
    let states = propagators(spec)?
        .iter()
        .map(|u| psi0.apply(u))
        .collect::<Result<_>>()?;
    Ok(Trajectory {
        times: spec.times(),
        states,
    })
}

/// A(t) = U(t)† A₀ U(t).
pub fn heisenberg_flow(spec: &EvolutionSpec, a0: &Observable) -> Result<Trajectory<Hermitian>> {
    check_dim(spec.hamiltonian.dim(), a0.dim())?;
    let states = propagators(spec)?
        .iter()
        .map(|u| a0.conjugate_by(&u.adjoint()))
        .collect::<Result<_>>()?;
    Ok(Trajectory {
        times: spec.times(),
        states,
    })
}

/// ξ(t) = U(t) ξ₀ U(t)†.
pub fn vonneumann_flow(spec: &EvolutionSpec, xi0: &Hermitian) -> Result<Trajectory<Hermitian>> {
    check_dim(spec.hamiltonian.dim(), xi0.dim())?;
    let states = propagators(spec)?
        .iter()
        .map(|u| xi0.conjugate_by(u))
        .collect::<Result<_>>()?;
    Ok(Trajectory {
        times: spec.times(),
        states,
    })
}

/// Deviation of each sample from the initial value of the quantities the
/// exact flow conserves. For a vector, `trace` and `spectrum` refer to μ(ψ).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    /// |‖s(t)‖ − ‖s(0)‖|, Euclidean or Frobenius.
    pub norm: Vec<f64>,
    pub trace: Vec<f64>,
    /// max_k |λ_k(t) − λ_k(0)|.
    pub spectrum: Vec<f64>,
}

impl Drift {
    pub fn max_norm(&self) -> f64 {
        self.norm.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_trace(&self) -> f64 {
        self.trace.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_spectrum(&self) -> f64 {
        self.spectrum.iter().copied().fold(0.0, f64::max)
    }
}

fn as_matrix(s: &Snapshot) -> Hermitian {
    match s {
        Snapshot::Vector(v) => momentum_map(v),
        Snapshot::Matrix(m) => m.clone(),
    }
}

fn snapshot_norm(s: &Snapshot) -> f64 {
    match s {
        Snapshot::Vector(v) => v.norm(),
        Snapshot::Matrix(m) => m.frobenius_norm(),
    }
}

pub fn drift(trajectory: &Trajectory<Snapshot>) -> Result<Drift> {
    let Some(first) = trajectory.states.first() else {
        return Ok(Drift::default());
    };
    let m0 = as_matrix(first);
    let spec0 = eig_hermitian(&m0)?.eigenvalues;
    let (n0, t0) = (snapshot_norm(first), m0.trace());
    let mut out = Drift::default();
    for s in &trajectory.states {
        let m = as_matrix(s);
        let spectrum = eig_hermitian(&m)?.eigenvalues;
        out.norm.push((snapshot_norm(s) - n0).abs());
        out.trace.push((m.trace() - t0).abs());
        out.spectrum.push(
            spectrum
                .iter()
                .zip(&spec0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rk4Result {
    pub trajectory: Trajectory<Snapshot>,
    pub drift: Drift,
}

/// Right-hand side of the picture's linear ODE on flattened entries.
fn generator(spec: &EvolutionSpec) -> impl Fn(&[Complex64]) -> Vec<Complex64> + '_ {
    let h = spec.hamiltonian.matrix();
    let n = h.dim();
    let c = -I / spec.hbar;
    move |y: &[Complex64]| match (spec.picture, y.len() == n) {
        (Picture::Schrodinger, true) => h.mul_vec(y).expect("dim").into_iter().map(|z| z * c).collect(),
        (picture, _) => {
            let m = ComplexMatrix::from_row_major(y.to_vec()).expect("square");
            let comm = &(h * &m) - &(&m * h);
            // von Neumann: −i[H, ξ]/ħ; Heisenberg: +i[H, A]/ħ
            let sign = if picture == Picture::Heisenberg { -1.0 } else { 1.0 };
            comm.as_slice().iter().map(|z| z * c * sign).collect()
        }
    }
}

/// Fourth-order Runge–Kutta integration of the picture's equation with
/// `spec.steps` uniform steps, plus drift of the conserved quantities.
pub fn rk4_flow(spec: &EvolutionSpec, initial: &Snapshot) -> Result<Rk4Result> {
    spec.validate()?;
    check_dim(spec.hamiltonian.dim(), initial.dim())?;
    match (spec.picture, initial) {
        (Picture::Schrodinger, Snapshot::Vector(_)) => {}
        (Picture::Heisenberg | Picture::VonNeumann, Snapshot::Matrix(_)) => {}
        _ => {
            return Err(Error::Domain(format!(
                "initial value does not match the {:?} picture",
                spec.picture
            )))
        }
    }
    let f = generator(spec);
    let times = spec.times();
    let dt = spec.t_final / spec.steps as f64;
    let axpy = |y: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> {
        y.iter().zip(k).map(|(u, v)| u + v * a).collect()
    };
    let mut y = initial.flat();
    let mut states = Vec::with_capacity(times.len());
    states.push(initial.clone());
    for _ in 0..spec.steps {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, &k1, dt / 2.0));
        let k3 = f(&axpy(&y, &k2, dt / 2.0));
        let k4 = f(&axpy(&y, &k3, dt));
        for i in 0..y.len() {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
        states.push(match initial {
            Snapshot::Vector(_) => Snapshot::Vector(StateVector::new(y.clone())?),
            Snapshot::Matrix(_) => {
                Snapshot::Matrix(Hermitian::symmetrize(&ComplexMatrix::from_row_major(y.clone())?))
            }
        });
    }
    let trajectory = Trajectory { times, states };
    let drift = drift(&trajectory)?;
    Ok(Rk4Result { trajectory, drift })
}

/// Exact trajectory in the picture of `spec`, as snapshots.
pub fn exact_flow(spec: &EvolutionSpec, initial: &Snapshot) -> Result<Trajectory<Snapshot>> {
    let t = match (spec.picture, initial) {
        (Picture::Schrodinger, Snapshot::Vector(v)) => {
            let t = schrodinger_flow(spec, v)?;
            Trajectory {
                times: t.times,
                states: t.states.into_iter().map(Snapshot::Vector).collect(),
            }
        }
        (Picture::Heisenberg, Snapshot::Matrix(m)) => wrap(heisenberg_flow(spec, m)?),
        (Picture::VonNeumann, Snapshot::Matrix(m)) => wrap(vonneumann_flow(spec, m)?),
        _ => {
            return Err(Error::Domain(format!(
                "initial value does not match the {:?} picture",
                spec.picture
            )))
        }
    };
    Ok(t)
}

fn wrap(t: Trajectory<Hermitian>) -> Trajectory<Snapshot> {
    Trajectory {
        times: t.times,
        states: t.states.into_iter().map(Snapshot::Matrix).collect(),
    }
}

/// Trajectory by the method named in `spec`.
pub fn evolve(spec: &EvolutionSpec, initial: &Snapshot) -> Result<Trajectory<Snapshot>> {
    match spec.method {
        Method::Exact => exact_flow(spec, initial),
        Method::Rk4 => Ok(rk4_flow(spec, initial)?.trajectory),
    }
}

/// Largest distance between matching samples of two trajectories.
pub fn max_state_error(a: &Trajectory<Snapshot>, b: &Trajectory<Snapshot>) -> f64 {
    a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| x.distance(y))
        .fold(0.0, f64::max)
}

/// Observed order log₂(e(N)/e(2N)) of the RK4 integrator, where e is the
/// largest deviation from the exact flow over the common sample times.
pub fn rk4_convergence_order(spec: &EvolutionSpec, initial: &Snapshot) -> Result<f64> {
    let coarse = spec.with_method(Method::Rk4);
    let fine = spec.with_steps(spec.steps * 2);
    let exact = exact_flow(&coarse, initial)?;
    let e1 = max_state_error(&rk4_flow(&coarse, initial)?.trajectory, &exact);
    let fine_traj = rk4_flow(&fine, initial)?.trajectory;
    // every other fine sample lands on a coarse sample time
    let thinned = Trajectory {
        times: fine_traj.times.iter().step_by(2).copied().collect(),
        states: fine_traj.states.into_iter().step_by(2).collect(),
    };
    let e2 = max_state_error(&thinned, &exact);
    Ok((e1 / e2).log2())
}

pub const MU_VONNEUMANN: &str = "mu_schrodinger_equals_vonneumann";
pub const HEISENBERG_DUALITY: &str = "heisenberg_schrodinger_expectation";
pub const PULLBACK_ALONG_FLOW: &str = "hat_pullback_along_flow";
pub const DUAL_FLOW_BRACKET: &str = "dual_flow_poisson_bracket";
pub const SCHRODINGER_BRACKET: &str = "schrodinger_poisson_bracket";

/// μ-relatedness of the pictures at every sample of `spec`:
///
/// * μ(ψ(t)) = ξ(t) with ξ₀ = μ(ψ₀),
/// * ⟨ψ(t)|Aψ(t)⟩ = ⟨ψ₀|A(t)ψ₀⟩,
/// * f_A(ψ(t)) = Â(μ(ψ(t))),
/// * d/dt Â(ξ(t)) = Λ(dÂ, dĤ)(ξ(t))/ħ,
/// * ħ·d/dt f_A(ψ(t)) = {f_A, f_H}(ψ(t)).
///
/// The Schrödinger side uses `spec.method`; the other pictures are exact, so
/// an RK4 run measures integrator error.
pub fn mu_relatedness_check(
    spec: &EvolutionSpec,
    psi0: &StateVector,
    observable: &Observable,
    tol: f64,
) -> Result<VerificationReport> {
    check_dim(spec.hamiltonian.dim(), observable.dim())?;
    let h = &spec.hamiltonian;
    let psi_traj: Vec<StateVector> = match spec.method {
        Method::Exact => schrodinger_flow(spec, psi0)?.states,
        Method::Rk4 => rk4_flow(&spec.with_picture(Picture::Schrodinger), &Snapshot::Vector(psi0.clone()))?
            .trajectory
            .states
            .into_iter()
            .map(|s| match s {
                Snapshot::Vector(v) => v,
                Snapshot::Matrix(_) => unreachable!("Schrödinger picture yields vectors"),
            })
            .collect(),
    };
    let xi_traj = vonneumann_flow(spec, &momentum_map(psi0))?.states;
    let a_traj = heisenberg_flow(spec, observable)?.states;

    let n2 = psi0.norm_sqr();
    let (na, nh) = (observable.frobenius_norm(), h.frobenius_norm());
    let state_scale = n2.max(1.0);
    let value_scale = (na * n2).max(1.0);
    let rate_scale = (na * nh * n2 / spec.hbar).max(1.0);

    let mut report = ReportBuilder::new("mu_relatedness", tol)
        .conventions(ConventionSet::with_hbar(spec.hbar))
        .dim(psi0.dim())
        .trials(spec.steps + 1);
    for ((psi, xi), at) in psi_traj.iter().zip(&xi_traj).zip(&a_traj) {
        let rho = momentum_map(psi);
        report.record(MU_VONNEUMANN, rho.try_sub(xi)?.frobenius_norm() / state_scale);

        let schr = psi.inner(&psi.apply(observable.matrix())?)?.re;
        let heis = psi0.inner(&psi0.apply(at.matrix())?)?.re;
        report.record(HEISENBERG_DUALITY, (schr - heis).abs() / value_scale);

        let f = f_quadratic(observable, psi)?;
        report.record(PULLBACK_ALONG_FLOW, (f - hat_eval(observable, &rho)?).abs() / value_scale);

        // exact derivative of Â along ξ̇ = [H, ξ]₋/ħ
        let xi_dot = lie_bracket(h, xi)?.scale(1.0 / spec.hbar);
        let rate = hat_eval(observable, &xi_dot)?;
        let bracket = lambda_eval(observable, h, xi)? / spec.hbar;
        report.record(DUAL_FLOW_BRACKET, (rate - bracket).abs() / rate_scale);

        // df_A(ψ̇) with ψ̇ = X_{f_H}/ħ
        let fa = QuadraticFunction(observable);
        let fh = QuadraticFunction(h);
        let psi_dot = hamiltonian_field(&fh, psi)?.scale(1.0 / spec.hbar);
        let df = g_eval(&crate::kahler::gradient_field(&fa, psi)?, &psi_dot)?;
        let pb = function_brackets(&fa, &fh, psi)?.poisson / spec.hbar;
        report.record(SCHRODINGER_BRACKET, (df - pb).abs() / rate_scale);
    }
    Ok(report.finish())
}

pub const NORM: &str = "norm";
pub const TRACE: &str = "trace";
pub const SPECTRUM: &str = "spectrum";
pub const ENERGY: &str = "energy";
pub const PURITY: &str = "purity";
pub const JORDAN_PRESERVED: &str = "jordan_product_preserved";
pub const LIE_PRESERVED: &str = "lie_bracket_preserved";

/// Seed of the probe observables used for the product-preservation checks.
pub const PROBE_SEED: u64 = 0;

/// Maximum deviation over a trajectory of the quantities a unitary flow
/// conserves, relative to their initial size, plus spot checks that
/// conjugation by U(t) preserves A∘B and [A,B]₋ for two probe observables.
///
/// Energy is e_H(ψ) for a vector and Ĥ(ξ) = ½Tr(ξH) for a matrix; purity is
/// Tr(ρ²) of ρ = μ(ψ)/‖ψ‖² or of the matrix itself.
pub fn conserved_report(
    spec: &EvolutionSpec,
    trajectory: &Trajectory<Snapshot>,
    tol: f64,
) -> Result<VerificationReport> {
    let h = &spec.hamiltonian;
    let mut report = ReportBuilder::new("conservation", tol)
        .conventions(ConventionSet::with_hbar(spec.hbar))
        .dim(h.dim())
        .trials(trajectory.len());
    let Some(first) = trajectory.states.first() else {
        return Ok(report.finish());
    };
    let d = drift(trajectory)?;
    let size = snapshot_norm(first).max(1.0);
    for &x in &d.norm {
        report.record(NORM, x / size);
    }
    if matches!(first, Snapshot::Matrix(_)) {
        for (&t, &s) in d.trace.iter().zip(&d.spectrum) {
            report.record(TRACE, t / size);
            report.record(SPECTRUM, s / size);
        }
    } else {
        for &s in &d.spectrum {
            report.record(SPECTRUM, s / size.powi(2));
        }
    }

    let energy = |s: &Snapshot| -> Result<f64> {
        match s {
            Snapshot::Vector(v) => expectation(h, v),
            Snapshot::Matrix(m) => hat_eval(h, m),
        }
    };
    let purity = |s: &Snapshot| -> Result<f64> {
        let m = match s {
            Snapshot::Vector(v) => momentum_map(&v.normalized()?),
            Snapshot::Matrix(m) => m.clone(),
        };
        Ok(m.matrix().trace_product(m.matrix())?.re)
    };
    let (e0, p0) = (energy(first)?, purity(first)?);
    let e_scale = (h.frobenius_norm() * size).max(1.0);
    for s in &trajectory.states {
        report.record(ENERGY, (energy(s)? - e0).abs() / e_scale);
        report.record(PURITY, (purity(s)? - p0).abs() / size.powi(2));
    }

    let mut rng = rng_for(PROBE_SEED, 0);
    let a = random_hermitian_with(h.dim(), &mut rng);
    let b = random_hermitian_with(h.dim(), &mut rng);
    let scale = (a.frobenius_norm() * b.frobenius_norm()).max(1.0);
    let decomposition = eig_hermitian(h)?;
    for &t in &trajectory.times {
        let u = propagator(&decomposition, t, spec.hbar);
        let (ua, ub) = (a.conjugate_by(&u)?, b.conjugate_by(&u)?);
        let jordan = jordan_product(&a, &b)?.conjugate_by(&u)?.try_sub(&jordan_product(&ua, &ub)?)?;
        let lie = lie_bracket(&a, &b)?.conjugate_by(&u)?.try_sub(&lie_bracket(&ua, &ub)?)?;
        report.record(JORDAN_PRESERVED, jordan.frobenius_norm() / scale);
        report.record(LIE_PRESERVED, lie.frobenius_norm() / scale);
    }
    Ok(report.finish())
}

/// Trajectory as CSV.
///
/// Vector trajectories: `t`, then `re_k,im_k` for each amplitude, then `norm`
/// (‖ψ‖) and `energy` (e_H). Matrix trajectories: `t`, then `re_i_j,im_i_j`
/// row-major, then `trace`, `purity` (Tr M²) and `energy` (½Tr(MH)).
pub fn trajectory_csv(trajectory: &Trajectory<Snapshot>, hamiltonian: &Observable) -> Result<String> {
    let mut out = String::new();
    let Some(first) = trajectory.states.first() else {
        return Ok(out);
    };
    let n = first.dim();
    let mut header = vec!["t".to_string()];
    match first {
        Snapshot::Vector(_) => {
            for k in 0..n {
                header.push(format!("re_{k}"));
                header.push(format!("im_{k}"));
            }
            header.extend(["norm".into(), "energy".into()]);
        }
        Snapshot::Matrix(_) => {
            for i in 0..n {
                for j in 0..n {
                    header.push(format!("re_{i}_{j}"));
                    header.push(format!("im_{i}_{j}"));
                }
            }
            header.extend(["trace".into(), "purity".into(), "energy".into()]);
        }
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for (t, s) in trajectory.times.iter().zip(&trajectory.states) {
        let mut row = vec![*t];
        for z in s.flat() {
            row.push(z.re);
            row.push(z.im);
        }
        match s {
            Snapshot::Vector(v) => {
                row.push(v.norm());
                row.push(expectation(hamiltonian, v)?);
            }
            Snapshot::Matrix(m) => {
                row.push(m.trace());
                row.push(m.matrix().trace_product(m.matrix())?.re);
                row.push(hat_eval(hamiltonian, m)?);
            }
        }
        let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        writeln!(out, "{}", cells.join(",")).expect("writing to a String");
    }
    Ok(out)
}
