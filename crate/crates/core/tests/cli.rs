mod common;

use common::*;
use geoquant::kernel::{eig_hermitian, pauli, random_hermitian, ComplexMatrix, Hermitian};
use geoquant::Complex64;
use serde_json::Value;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn verify_small_run_passes_and_validates() {
    let (code, v) = run_json(&["verify", "--dim", "3", "--trials", "20", "--seed", "5"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    assert_eq!(v["command"], "verify");
    assert_eq!(v["passed"], true);
    let suites: Vec<&str> = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["suite"].as_str().unwrap())
        .collect();
    for expected in [
        "jordan_lie",
        "dual_geometry",
        "commutation",
        "involutivity_lambda",
        "involutivity_r",
        "involutivity_zero",
        "involutivity_one",
        "momentum_map",
    ] {
        assert!(suites.contains(&expected), "missing {expected} in {suites:?}");
    }
    for r in v["reports"].as_array().unwrap() {
        assert_eq!(r["seed"], 5);
        assert_eq!(r["dim"], 3);
        assert_eq!(r["conventions"]["hbar"], 1.0);
    }
}

#[test]
fn verify_documented_example_exits_zero() {
    let r = run(&["verify", "--dim", "4", "--trials", "200", "--seed", "1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.starts_with("verify : PASS"));
}

#[test]
fn verify_rejects_zero_dim() {
    let r = run(&["verify", "--dim", "0"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--dim"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn verify_rejects_bad_tolerance_and_unknown_flags() {
    assert_eq!(run(&["verify", "--tol", "-1"]).code, 2);
    assert_eq!(run(&["verify", "--tol", "nan"]).code, 2);
    assert_eq!(run(&["verify", "--bogus"]).code, 2);
    assert_eq!(run(&[]).code, 2);
}

#[test]
fn help_exits_zero_and_documents_defaults() {
    let r = run(&["verify", "--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("[default: 4]"));
    assert!(r.stdout.contains("[default: 100]"));
    assert!(r.stdout.contains("[default: 0.000000001]") || r.stdout.contains("[default: 1e-9]"));
    let top = run(&["--help"]);
    assert!(top.stdout.contains("Exit codes"));
}

#[test]
fn verify_dim_one_skips_involutivity_with_warning() {
    let (code, v) = run_json(&["verify", "--dim", "1", "--trials", "5"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    assert!(v["warnings"][0].as_str().unwrap().contains("involutivity"));
}

#[test]
fn text_and_json_carry_the_same_residuals() {
    let args = ["verify", "--dim", "2", "--trials", "10", "--seed", "3"];
    let text = run(&args).stdout;
    let (_, v) = run_json(&args);
    let mut from_json = Vec::new();
    for r in v["reports"].as_array().unwrap() {
        for ch in r["checks"].as_array().unwrap() {
            from_json.push(ch["max_residual"].as_f64().unwrap());
        }
    }
    let from_text: Vec<f64> = text
        .lines()
        .filter_map(|l| l.split("max_residual ").nth(1))
        .map(|rest| rest.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(from_json.len(), from_text.len());
    for (a, b) in from_json.iter().zip(&from_text) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn runs_are_deterministic_and_thread_count_independent() {
    let args = ["verify", "--dim", "3", "--trials", "16", "--seed", "11", "--json"];
    let one = bin().args(args).arg("--threads").arg("1").output().unwrap();
    let env = bin().args(args).env("GEOQUANT_THREADS", "3").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, env.stdout);
}

#[test]
fn zero_threads_is_a_usage_error() {
    assert_eq!(run(&["verify", "--threads", "0"]).code, 2);
    let r: Run = bin()
        .args(["su2demo"])
        .env("GEOQUANT_THREADS", "zero")
        .output()
        .unwrap()
        .into();
    assert_eq!(r.code, 2);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let r = run(&["su2demo", "--json", "--output", s(&out)]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_valid(&v);
}

#[test]
fn su2demo_asserts_golden_values() {
    let (code, v) = run_json(&["su2demo"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let checks = v["reports"][0]["checks"].as_array().unwrap();
    for name in ["star Z*Y = -iX", "star X*Y = iZ", "star Z*X = iY"] {
        let ch = checks.iter().find(|c| c["name"] == name).expect(name);
        assert_eq!(ch["max_residual"], 0.0);
        assert_eq!(ch["passed"], true);
    }
    // X̂ ⋆ Ŷ has generator iZ: real part zero, imaginary part Z
    let xy = &v["data"]["tables"]["star"]["x,y"];
    assert_eq!(xy["im"]["data"][0][0][0], 1.0);
    assert_eq!(xy["im"]["data"][1][1][0], -1.0);
    assert_eq!(xy["re"]["data"][0][0][0], 0.0);
    let text = run(&["su2demo"]);
    assert!(text.stdout.contains("star Z*Y = -iX"));
}

#[test]
fn eigen_pauli_z_descent() {
    let dir = tempfile::tempdir().unwrap();
    let z = write_matrix(dir.path(), "z.json", pauli::z().matrix());
    let (code, v) = run_json(&["eigen", "--operator", s(&z), "--direction", "descent"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let lambda = v["data"]["eigenvalue"].as_f64().unwrap();
    assert!((lambda + 1.0).abs() <= 1e-9, "{lambda}");
    assert!(v["data"]["dispersion"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn eigen_random_8x8_ascent_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let a = random_hermitian(8, 2024);
    let path = write_matrix(dir.path(), "a.json", a.matrix());
    let oracle = *eig_hermitian(&a).unwrap().eigenvalues.last().unwrap();
    let (code, v) = run_json(&["eigen", "--operator", s(&path), "--seed", "7"]);
    assert_eq!(code, 0);
    let lambda = v["data"]["eigenvalue"].as_f64().unwrap();
    assert!((lambda - oracle).abs() <= 1e-8, "{lambda} vs {oracle}");
    assert_eq!(v["data"]["oracle_eigenvalue"].as_f64().unwrap().to_bits(), oracle.to_bits());
    assert_eq!(v["data"]["eigenvector"]["dim"], 8);
}

#[test]
fn eigen_rejects_non_hermitian_input() {
    let dir = tempfile::tempdir().unwrap();
    let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]])
        .unwrap();
    let p = write_matrix(dir.path(), "bad.json", &m);
    let r = run(&["eigen", "--operator", s(&p)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not Hermitian"), "{}", r.stderr);
}

#[test]
fn eigen_reports_non_convergence_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let a = random_hermitian(6, 1);
    let p = write_matrix(dir.path(), "a.json", a.matrix());
    let (code, v) = run_json(&["eigen", "--operator", s(&p), "--max-iter", "2"]);
    assert_eq!(code, 1);
    assert_valid(&v);
    assert_eq!(v["passed"], false);
    assert!(v["data"]["error"].as_str().unwrap().contains("no convergence"));
}

#[test]
fn parse_errors_exit_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{\"dim\": 2, \"data\": [[[1,0],[0,0]]]}").unwrap();
    let r = run(&["eigen", "--operator", s(&p)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("broken.json"), "{}", r.stderr);
}

fn xz_files(dir: &std::path::Path) -> (std::path::PathBuf, std::path::PathBuf, std::path::PathBuf) {
    (
        write_matrix(dir, "z.json", pauli::z().matrix()),
        write_matrix(dir, "x.json", pauli::x().matrix()),
        write_vector(dir, "e1.json", &[c(1.0, 0.0), c(0.0, 0.0)]),
    )
}

#[test]
fn evolve_z_keeps_unit_norm_in_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (z, _, e1) = xz_files(dir.path());
    let r = run(&["evolve", "--hamiltonian", s(&z), "--initial", s(&e1), "--t", "1", "--steps", "10"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut lines = r.stdout.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let norm_col = header.iter().position(|h| *h == "norm").unwrap();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    for row in &rows {
        assert!((row[norm_col] - 1.0).abs() <= 1e-10);
    }
    // e^{-itZ} e₁ = e^{-it} e₁
    let last = rows.last().unwrap();
    assert!((last[0] - 1.0).abs() < 1e-15);
    assert!((last[1] - 1f64.cos()).abs() < 1e-12);
    assert!((last[2] + 1f64.sin()).abs() < 1e-12);
    assert!(r.stderr.contains("suite conservation : PASS"), "{}", r.stderr);
}

#[test]
fn evolve_with_csv_file_and_mu_check() {
    let dir = tempfile::tempdir().unwrap();
    let h = write_matrix(dir.path(), "h.json", random_hermitian(4, 3).matrix());
    let psi = write_vector(dir.path(), "psi.json", &[c(0.5, 0.1), c(-0.2, 0.3), c(0.0, 1.0), c(0.4, 0.0)]);
    let csv = dir.path().join("traj.csv");
    let (code, v) = run_json(&[
        "evolve", "--hamiltonian", s(&h), "--initial", s(&psi), "--t", "7.5", "--steps", "40",
        "--check-mu", "--csv", s(&csv),
    ]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let suites: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["suite"].as_str().unwrap()).collect();
    assert_eq!(suites, ["conservation", "mu_relatedness"]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 42);
}

#[test]
fn evolve_rk4_reports_drift_but_exits_zero_without_mu_check() {
    let dir = tempfile::tempdir().unwrap();
    let (_, x, e1) = xz_files(dir.path());
    let (code, v) = run_json(&[
        "evolve", "--hamiltonian", s(&x), "--initial", s(&e1), "--t", "10", "--steps", "5",
        "--method", "rk4", "--csv", s(&dir.path().join("t.csv")),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["reports"][0]["passed"], false);
    assert!(v["data"]["max_drift"]["norm"].as_f64().unwrap() > 1e-3);
}

#[test]
fn evolve_vonneumann_non_state_warns_and_proceeds() {
    let dir = tempfile::tempdir().unwrap();
    let (z, x, _) = xz_files(dir.path());
    let r = run(&[
        "evolve", "--picture", "vonneumann", "--hamiltonian", s(&x), "--initial", s(&z),
        "--steps", "3", "--csv", s(&dir.path().join("vn.csv")),
    ]);
    assert_eq!(r.code, 0);
    assert!(r.stderr.contains("warning"), "{}", r.stderr);
    assert!(r.stdout.contains("suite conservation : PASS"));
}

#[test]
fn evolve_heisenberg_picture_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (z, x, _) = xz_files(dir.path());
    let (code, v) = run_json(&[
        "evolve", "--picture", "heisenberg", "--hamiltonian", s(&x), "--initial", s(&z),
        "--t", "1.5707963267948966", "--csv", s(&dir.path().join("h.csv")),
    ]);
    assert_eq!(code, 0);
    // Z(π/2) under H = X is e^{iX π/2} Z e^{-iX π/2} = -Z
    let fin = &v["data"]["final_state"]["data"];
    assert!((fin[0][0][0].as_f64().unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn evolve_input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let (z, _, e1) = xz_files(dir.path());
    let missing = dir.path().join("nope.json");
    let r = run(&["evolve", "--hamiltonian", s(&missing), "--initial", s(&e1)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("nope.json"));

    let h3 = write_matrix(dir.path(), "h3.json", random_hermitian(3, 0).matrix());
    assert_eq!(run(&["evolve", "--hamiltonian", s(&h3), "--initial", s(&e1)]).code, 2);
    assert_eq!(
        run(&["evolve", "--picture", "vonneumann", "--hamiltonian", s(&z), "--initial", s(&z), "--check-mu"]).code,
        2
    );
    assert_eq!(run(&["evolve", "--picture", "sideways", "--hamiltonian", s(&z), "--initial", s(&e1)]).code, 2);
}

#[test]
fn star_of_identity_with_itself_is_real() {
    let dir = tempfile::tempdir().unwrap();
    let i = write_matrix(dir.path(), "i.json", &ComplexMatrix::identity(3));
    let xi = write_matrix(dir.path(), "xi.json", random_hermitian(3, 9).matrix());
    let (code, v) = run_json(&["star", "--a", s(&i), "--b", s(&i), "--xi", s(&xi)]);
    assert_eq!(code, 0);
    assert_valid(&v);
    assert_eq!(v["data"]["star"]["im"], 0.0);
    assert_eq!(v["data"]["lie_part"], 0.0);
    let trace = Hermitian::new(
        geoquant::kernel::parse_matrix(std::fs::read(&xi).unwrap().as_slice()).unwrap(),
    )
    .unwrap()
    .trace();
    assert!((v["data"]["star"]["re"].as_f64().unwrap() - 0.5 * trace).abs() < 1e-12);
}

#[test]
fn star_of_paulis_matches_golden_value() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_matrix(dir.path(), "x.json", pauli::x().matrix());
    let y = write_matrix(dir.path(), "y.json", pauli::y().matrix());
    let z = write_matrix(dir.path(), "z.json", pauli::z().matrix());
    // (X̂⋆Ŷ)(ξ = Z) = i·Ẑ(Z) = i·½Tr(Z²) = i
    let (code, v) = run_json(&["star", "--a", s(&x), "--b", s(&y), "--xi", s(&z)]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["star"]["re"], 0.0);
    assert_eq!(v["data"]["star"]["im"], 1.0);
    assert_eq!(v["data"]["lambda"], 2.0);
}

#[test]
fn distributions_at_identity() {
    let dir = tempfile::tempdir().unwrap();
    let i = write_matrix(dir.path(), "i.json", &ComplexMatrix::identity(3));
    let (code, v) = run_json(&["distributions", "--xi", s(&i), "--trials", "10"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    assert_eq!(v["data"]["ranks"]["lambda"], 0);
    assert_eq!(v["data"]["ranks"]["r"], 9);
    assert_eq!(v["data"]["ranks"]["zero"], 0);
    assert_eq!(v["data"]["ranks"]["one"], 9);
    assert_eq!(v["data"]["orbit_invariants"]["signature"], 3);
    assert_eq!(v["reports"].as_array().unwrap().len(), 4);
}

#[test]
fn distributions_random_point_has_generic_ranks() {
    let (code, v) = run_json(&["distributions", "--dim", "4", "--trials", "10", "--seed", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["ranks"]["lambda"], 12);
    assert_eq!(v["data"]["ranks"]["r"], 16);
    assert_eq!(v["data"]["ranks"]["zero"], 12);
    assert_eq!(v["data"]["ranks"]["one"], 16);
}
