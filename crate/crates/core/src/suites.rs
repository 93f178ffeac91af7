//! The standard identity suites run by `geoquant verify` and the C API.

use crate::algebra::verify_jordan_lie;
use crate::distributions::{involutivity_evidence, verify_commutation, DistributionKind};
use crate::dual::verify_dual_geometry;
use crate::kahler::verify_momentum_map;
use crate::report::VerificationReport;

/// Jordan-Lie, dual geometry, Ĵ/R̂ commutation, involutivity of the four
/// distributions (dimension 2 and up only) and the momentum map, all with the
/// same dimension, trial count, seed and tolerance.
pub fn standard_suites(n: usize, trials: usize, seed: u64, tol: f64) -> Vec<VerificationReport> {
    let mut out = vec![
        verify_jordan_lie(n, trials, seed, tol),
        verify_dual_geometry(n, trials, seed, tol),
        verify_commutation(n, trials, seed, tol),
    ];
    if n >= 2 {
        out.extend(
            DistributionKind::ALL
                .iter()
                .map(|&k| involutivity_evidence(k, n, trials, seed, tol)),
        );
    }
    out.push(verify_momentum_map(n, trials, seed, tol));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_list_depends_on_dimension() {
        assert_eq!(standard_suites(1, 3, 0, 1e-9).len(), 4);
        let all = standard_suites(2, 3, 0, 1e-9);
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|r| r.passed));
    }
}
