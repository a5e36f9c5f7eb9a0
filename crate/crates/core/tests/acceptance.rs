//! The acceptance gate: runs the full-scale suite and prints one
//! pass/fail line per criterion (visible with `--nocapture`, or on any
//! failure).

use zeroscan::validate::{run_suite, SuiteMode, DEFAULT_SEED};

#[test]
fn acceptance() {
    let report = run_suite(SuiteMode::Full, DEFAULT_SEED).expect("suite must run to completion");
    for criterion in &report.criteria {
        println!("{}", criterion.render_line());
    }
    assert_eq!(report.criteria.len(), 10);
    assert!(report.all_passed(), "\n{}", report.render());
}
