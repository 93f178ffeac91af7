#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use geoquant::kernel::{serialize_matrix, serialize_vector, ComplexMatrix};
use geoquant::Complex64;
use serde_json::Value;

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_geoquant"));
    c.env_remove("GEOQUANT_THREADS");
    c
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl From<Output> for Run {
    fn from(o: Output) -> Self {
        Run {
            code: o.status.code().expect("exited normally"),
            stdout: String::from_utf8(o.stdout).expect("utf8"),
            stderr: String::from_utf8(o.stderr).expect("utf8"),
        }
    }
}

pub fn run(args: &[&str]) -> Run {
    bin().args(args).output().expect("binary runs").into()
}

pub fn run_json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let r = run(&all);
    let v: Value = serde_json::from_str(&r.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}\n{}", r.stdout, r.stderr));
    (r.code, v)
}

pub fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).expect("schema file")).expect("schema JSON")
}

pub fn assert_valid(instance: &Value) {
    let schema = schema();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

pub fn write_matrix(dir: &Path, name: &str, m: &ComplexMatrix) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serialize_matrix(m)).unwrap();
    p
}

pub fn write_vector(dir: &Path, name: &str, v: &[Complex64]) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serialize_vector(v)).unwrap();
    p
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
