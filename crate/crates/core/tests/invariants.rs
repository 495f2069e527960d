//! The full property suite at the sample sizes the module invariants name
//! (50-plus effects per property and dimension, hundreds of dominated
//! samples, separating pairs and probe round-trips).

use effectscope::hermitian::Tolerances;
use effectscope::suite::{run_check, CheckConfig};

#[test]
fn full_suite_at_invariant_scale() {
    let cfg = CheckConfig {
        seed: 42,
        dims: vec![2, 3, 4],
        trials: 50,
        tol: Tolerances::default(),
    };
    let report = run_check(&cfg).expect("suite runs");
    for property in &report.properties {
        println!(
            "PROPERTY {:34} {}  cases={:6}  worst={:+.3e}",
            property.name,
            if property.passed { "PASS" } else { "FAIL" },
            property.cases,
            property.worst_excess
        );
        assert!(
            property.passed,
            "{} failed: {:?}",
            property.name, property.counterexample
        );
    }
    assert!(report.all_passed);
}
