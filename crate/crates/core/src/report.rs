//! Conventions and verification reports shared by every identity suite.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Sign and normalization choices used throughout the crate. Immutable once
/// built; every report carries a copy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConventionSet {
    pub hbar: f64,
    pub lie_bracket: String,
    pub jordan_product: String,
    pub pairing: String,
    pub star_product: String,
    /// G(de_A, de_A) = kappa · dispersion(A, ψ) / ‖ψ‖².
    pub kappa: f64,
    /// ⟨f₁|f₂⟩ = hermitian_constant · 2·(f̂₁ ⋆ f̂₂)∘μ for quadratic f.
    pub hermitian_bracket_constant: f64,
    pub dual_flow: String,
    pub heisenberg_flow: String,
    pub hamiltonian_field: String,
    pub documentation: String,
}

/// Frozen from the n = 2 finite-difference oracle in the test suite.
pub const KAPPA: f64 = 4.0;

impl ConventionSet {
    pub fn with_hbar(hbar: f64) -> Self {
        Self {
            hbar,
            ..Self::default()
        }
    }
}

impl Default for ConventionSet {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            lie_bracket: "[A,B]_- = -i(AB - BA)".into(),
            jordan_product: "A o B = (AB + BA)/2".into(),
            pairing: "xi(A) = Tr(xi A)/2 with xi Hermitian".into(),
            star_product: "(A * B)(xi) = Tr(xi A B)/2 = (R + i Lambda)/2".into(),
            kappa: KAPPA,
            hermitian_bracket_constant: 1.0,
            dual_flow: "d xi/dt = [H, xi]_- / hbar".into(),
            heisenberg_flow: "dA/dt = [A, H]_- / hbar".into(),
            hamiltonian_field: "X_f = (df/dp, -df/dq) = -J grad f; X_{f_A} = -i A psi".into(),
            documentation: "Hermitian representation for observables, dual elements and states; \
                            associator identity holds with hbar = 1"
                .into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    /// Residual must stay at or below tolerance.
    Holds,
    /// Residual must exceed ten times the tolerance somewhere.
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub expectation: Expectation,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub check: String,
    pub residual: f64,
    /// Named inputs in matrix JSON.
    pub matrices: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub conventions: ConventionSet,
    pub seed: Option<u64>,
    pub dim: Option<usize>,
    pub trials: Option<usize>,
    pub tolerance: f64,
    pub checks: Vec<CheckResult>,
    pub witnesses: Vec<Witness>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self, name: &str) -> f64 {
        self.check(name).map_or(f64::NAN, |c| c.max_residual)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Human-readable rendering carrying the same numbers as the JSON form.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "suite {} : {}\n",
            self.suite,
            if self.passed { "PASS" } else { "FAIL" }
        );
        let field = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "  seed {}  dim {}  trials {}  tol {:e}  hbar {}\n",
            field(self.seed.map(|s| s.to_string())),
            field(self.dim.map(|s| s.to_string())),
            field(self.trials.map(|s| s.to_string())),
            self.tolerance,
            self.conventions.hbar
        ));
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {:<32} {:?} max_residual {:e} tol {:e} samples {}\n",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.expectation,
                c.max_residual,
                c.tolerance,
                c.samples
            ));
        }
        for w in &self.witnesses {
            out.push_str(&format!(
                "  witness for {}: residual {:e}\n",
                w.check, w.residual
            ));
            for (name, m) in &w.matrices {
                out.push_str(&format!("    {name} = {m}\n"));
            }
        }
        out
    }
}

/// Accumulates residuals per named check, keeping the maximum.
#[derive(Debug)]
pub struct ReportBuilder {
    suite: String,
    conventions: ConventionSet,
    seed: Option<u64>,
    dim: Option<usize>,
    trials: Option<usize>,
    tolerance: f64,
    checks: Vec<CheckResult>,
    witnesses: Vec<Witness>,
}

impl ReportBuilder {
    pub fn new(suite: impl Into<String>, tolerance: f64) -> Self {
        Self {
            suite: suite.into(),
            conventions: ConventionSet::default(),
            seed: None,
            dim: None,
            trials: None,
            tolerance,
            checks: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn conventions(mut self, c: ConventionSet) -> Self {
        self.conventions = c;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn dim(mut self, dim: usize) -> Self {
        self.dim = Some(dim);
        self
    }

    pub fn trials(mut self, trials: usize) -> Self {
        self.trials = Some(trials);
        self
    }

    fn entry(&mut self, name: &str, expectation: Expectation) -> &mut CheckResult {
        if let Some(i) = self.checks.iter().position(|c| c.name == name) {
            return &mut self.checks[i];
        }
        self.checks.push(CheckResult {
            name: name.to_string(),
            expectation,
            max_residual: 0.0,
            tolerance: self.tolerance,
            samples: 0,
            passed: true,
        });
        self.checks.last_mut().unwrap()
    }

    /// Record a residual for an identity expected to hold.
    pub fn record(&mut self, name: &str, residual: f64) {
        self.record_as(name, residual, Expectation::Holds);
    }

    pub fn record_as(&mut self, name: &str, residual: f64, expectation: Expectation) {
        let e = self.entry(name, expectation);
        e.samples += 1;
        // a NaN residual sticks so the check fails
        if !e.max_residual.is_nan() && (residual.is_nan() || residual > e.max_residual) {
            e.max_residual = residual;
        }
    }

    /// Declare a check with a custom tolerance.
    pub fn tolerance_for(&mut self, name: &str, tol: f64, expectation: Expectation) {
        let e = self.entry(name, expectation);
        e.tolerance = tol;
    }

    pub fn witness(&mut self, w: Witness) {
        self.witnesses.push(w);
    }

    pub fn finish(mut self) -> VerificationReport {
        for c in &mut self.checks {
            c.passed = match c.expectation {
                Expectation::Holds => c.max_residual <= c.tolerance,
                Expectation::Violated => c.max_residual > 10.0 * c.tolerance,
            };
        }
        let passed = self.checks.iter().all(|c| c.passed);
        VerificationReport {
            suite: self.suite,
            conventions: self.conventions,
            seed: self.seed,
            dim: self.dim,
            trials: self.trials,
            tolerance: self.tolerance,
            checks: self.checks,
            witnesses: self.witnesses,
            passed,
        }
    }
}
