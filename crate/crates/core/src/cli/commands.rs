use std::fs;
use std::path::Path;

use geoquant::distributions::{
    distribution_basis, involutivity_evidence, orbit_invariants,
    DistributionKind,
};
use geoquant::dual::{
    is_state, lambda_eval, r_eval, star_eval, su2, STATE_TOL,
};
use geoquant::dynamics::{
    conserved_report, drift, evolve as run_flow, mu_relatedness_check, trajectory_csv,
    EvolutionSpec, Picture, Snapshot,
};
use geoquant::kahler::{
    default_step, dispersion, eigensolve_gradient_flow, Direction,
    StateVector,
};
use geoquant::kernel::{
    eig_hermitian, matrix_value, parse_matrix, parse_vector, random_hermitian, random_hermitian_with,
    rng_for, vector_value, Hermitian,
};
use geoquant::report::{Expectation, ReportBuilder, VerificationReport};
use geoquant::suites::standard_suites;
use geoquant::Error;
use serde_json::{json, Value};

use super::{
    DistributionsArgs, EigenArgs, EvolveArgs, InputError, Outcome, StarArgs, VerifyArgs,
};

fn read(path: &Path) -> Result<Vec<u8>, InputError> {
    fs::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(Error) -> InputError + '_ {
    move |e| InputError(format!("{}: {e}", path.display()))
}

fn read_hermitian(path: &Path) -> Result<Hermitian, InputError> {
    let m = parse_matrix(&read(path)?).map_err(with_path(path))?;
    Hermitian::new(m).map_err(with_path(path))
}

fn read_state(path: &Path) -> Result<StateVector, InputError> {
    let v = parse_vector(&read(path)?).map_err(with_path(path))?;
    StateVector::new(v).map_err(with_path(path))
}

fn same_dim(expected: usize, found: usize, what: &str) -> Result<(), InputError> {
    if expected == found {
        Ok(())
    } else {
        Err(InputError(format!(
            "{what} has dimension {found}, expected {expected}"
        )))
    }
}

fn involutivity_reports(n: usize, trials: usize, seed: u64, tol: f64, out: &mut Outcome) {
    if n < 2 {
        out.warnings
            .push("involutivity evidence needs dimension 2 or more; skipped".into());
        return;
    }
    for kind in DistributionKind::ALL {
        out.push_report(involutivity_evidence(kind, n, trials, seed, tol));
    }
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome, InputError> {
    let mut out = Outcome::new("verify");
    if args.dim < 2 {
        out.warnings
            .push("involutivity evidence needs dimension 2 or more; skipped".into());
    }
    for r in standard_suites(args.dim, args.trials, args.seed, args.tol) {
        out.push_report(r);
    }
    let maxima: serde_json::Map<String, Value> = out
        .reports
        .iter()
        .flat_map(|r| {
            r.checks
                .iter()
                .map(move |c| (format!("{}.{}", r.suite, c.name), json!(c.max_residual)))
        })
        .collect();
    out.set("max_residuals", Value::Object(maxima));
    Ok(out)
}

pub fn evolve(args: &EvolveArgs) -> Result<Outcome, InputError> {
    let h = read_hermitian(&args.hamiltonian)?;
    let n = h.dim();
    let spec = EvolutionSpec::new(h.clone(), args.t, args.steps, args.hbar, args.picture, args.method)?;
    let mut out = Outcome::new("evolve");
    let initial = match args.picture {
        Picture::Schrodinger => Snapshot::Vector(read_state(&args.initial)?),
        _ => Snapshot::Matrix(read_hermitian(&args.initial)?),
    };
    same_dim(n, initial.dim(), &args.initial.display().to_string())?;
    if let (Picture::VonNeumann, Snapshot::Matrix(xi)) = (args.picture, &initial) {
        if !is_state(xi, STATE_TOL) {
            out.warnings.push(
                "initial dual element is not a density matrix; evolving it anyway".into(),
            );
        }
    }
    if args.check_mu && args.picture != Picture::Schrodinger {
        return Err(InputError("--check-mu needs --picture schrodinger".into()));
    }
    let observable = match &args.observable {
        Some(p) => {
            let a = read_hermitian(p)?;
            same_dim(n, a.dim(), &p.display().to_string())?;
            Some(a)
        }
        None if args.check_mu => Some(random_hermitian(n, args.seed)),
        None => None,
    };

    let trajectory = run_flow(&spec, &initial)?;
    let csv = trajectory_csv(&trajectory, &h)?;
    out.push_report(conserved_report(&spec, &trajectory, args.tol)?);
    // Conservation is a summary; only --check-mu decides the exit code.
    out.passed = true;
    if args.check_mu {
        let (Snapshot::Vector(psi0), Some(a)) = (&initial, &observable) else {
            unreachable!("checked above")
        };
        out.push_report(mu_relatedness_check(&spec, psi0, a, args.tol)?);
    }

    let d = drift(&trajectory)?;
    out.set("picture", json!(args.picture));
    out.set("method", json!(args.method));
    out.set("dim", json!(n));
    out.set("t_final", json!(args.t));
    out.set("steps", json!(args.steps));
    out.set("hbar", json!(args.hbar));
    out.set("samples", json!(trajectory.len()));
    out.set(
        "max_drift",
        json!({"norm": d.max_norm(), "trace": d.max_trace(), "spectrum": d.max_spectrum()}),
    );
    out.set(
        "final_state",
        match trajectory.last().expect("at least two samples") {
            Snapshot::Vector(v) => vector_value(v.amplitudes()),
            Snapshot::Matrix(m) => matrix_value(m.matrix()),
        },
    );
    match &args.csv {
        Some(path) => {
            fs::write(path, csv).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            out.set("csv", json!(path.display().to_string()));
        }
        None => out.stdout_csv = Some(csv),
    }
    Ok(out)
}

pub const ORACLE_EIGENVALUE: &str = "oracle_eigenvalue";
pub const FINAL_DISPERSION: &str = "final_dispersion";
pub const EIGEN_RESIDUAL: &str = "eigen_residual";

pub fn eigen(args: &EigenArgs) -> Result<Outcome, InputError> {
    let a = read_hermitian(&args.operator)?;
    let n = a.dim();
    let step = args.step.unwrap_or_else(|| default_step(&a));
    let start = StateVector::random_with(n, &mut rng_for(args.seed, 0));
    let spectrum = eig_hermitian(&a)?.eigenvalues;
    let oracle = match args.direction {
        Direction::Ascent => spectrum.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Direction::Descent => spectrum.iter().copied().fold(f64::INFINITY, f64::min),
    };

    let mut out = Outcome::new("eigen");
    out.set("dim", json!(n));
    out.set("direction", json!(args.direction));
    out.set("seed", json!(args.seed));
    out.set("step", json!(step));
    out.set("max_iter", json!(args.max_iter));
    out.set("oracle_eigenvalue", json!(oracle));

    let mut report = ReportBuilder::new("eigen", args.tol).seed(args.seed).dim(n).trials(1);
    match eigensolve_gradient_flow(&a, &start, step, args.tol, args.max_iter, args.direction) {
        Ok(pair) => {
            let disp = dispersion(&a, &pair.eigenvector)?;
            let gap = (pair.eigenvalue - oracle).abs();
            report.tolerance_for(ORACLE_EIGENVALUE, args.oracle_tol, Expectation::Holds);
            report.tolerance_for(FINAL_DISPERSION, args.oracle_tol, Expectation::Holds);
            report.record(ORACLE_EIGENVALUE, gap);
            report.record(FINAL_DISPERSION, disp);
            report.record(EIGEN_RESIDUAL, pair.residual);
            out.set("eigenvalue", json!(pair.eigenvalue));
            out.set("oracle_gap", json!(gap));
            out.set("iterations", json!(pair.iterations));
            out.set("residual", json!(pair.residual));
            out.set("dispersion", json!(disp));
            out.set("eigenvector", vector_value(pair.eigenvector.amplitudes()));
        }
        Err(Error::NonConvergence { iterations, residual }) => {
            report.record(EIGEN_RESIDUAL, residual);
            out.set("iterations", json!(iterations));
            out.set("residual", json!(residual));
            out.set("error", json!(format!("no convergence after {iterations} iterations")));
        }
        Err(e) => return Err(e.into()),
    }
    out.push_report(report.finish());
    Ok(out)
}

pub fn star(args: &StarArgs) -> Result<Outcome, InputError> {
    let a = read_hermitian(&args.a)?;
    let b = read_hermitian(&args.b)?;
    let xi = read_hermitian(&args.xi)?;
    same_dim(a.dim(), b.dim(), &args.b.display().to_string())?;
    same_dim(a.dim(), xi.dim(), &args.xi.display().to_string())?;
    let s = star_eval(&a, &b, &xi)?;
    let r = r_eval(&a, &b, &xi)?;
    let lambda = lambda_eval(&a, &b, &xi)?;
    let defect = (s - geoquant::Complex64::new(0.5 * r, 0.5 * lambda)).norm();
    let scale = (a.frobenius_norm() * b.frobenius_norm() * xi.frobenius_norm()).max(1.0);

    let mut out = Outcome::new("star");
    let mut report = ReportBuilder::new("star_decomposition", args.tol).dim(a.dim()).trials(1);
    report.record(geoquant::dual::STAR_DECOMPOSITION, defect / scale);
    out.push_report(report.finish());
    out.set("star", json!({"re": s.re, "im": s.im}));
    out.set("jordan_part", json!(0.5 * r));
    out.set("lie_part", json!(0.5 * lambda));
    out.set("r", json!(r));
    out.set("lambda", json!(lambda));
    Ok(out)
}

pub fn distributions(args: &DistributionsArgs) -> Result<Outcome, InputError> {
    let xi = match &args.xi {
        Some(p) => read_hermitian(p)?,
        None => random_hermitian_with(args.dim, &mut rng_for(args.seed, u64::MAX)),
    };
    let n = xi.dim();
    let mut out = Outcome::new("distributions");
    out.set("dim", json!(n));
    out.set("point", matrix_value(xi.matrix()));
    let ranks: serde_json::Map<String, Value> = DistributionKind::ALL
        .iter()
        .map(|&k| (k.name().to_string(), json!(distribution_basis(&xi, k).rank)))
        .collect();
    out.set("ranks", Value::Object(ranks));
    out.set("orbit_invariants", json!(orbit_invariants(&xi)?));
    involutivity_reports(n, args.trials, args.seed, args.tol, &mut out);
    Ok(out)
}

pub const SU2_TOL: f64 = 1e-12;

pub fn su2demo() -> Outcome {
    let mut out = Outcome::new("su2demo");
    let mut report = ReportBuilder::new("su2_golden", SU2_TOL).dim(2).trials(1);
    for (name, r) in su2::golden_residuals() {
        report.record(&name, r);
    }
    let report: VerificationReport = report.finish();
    out.set("tables", su2::golden_tables().to_json());
    out.push_report(report);
    out
}
