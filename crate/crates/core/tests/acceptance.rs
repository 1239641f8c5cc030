//! Runs the fifteen acceptance checks and prints one line per check.

use crystalkit::quiverdeg::{AdaptedQuiver, ExtTables};
use crystalkit::suite::{run_check, SuiteConfig};

#[test]
fn all_checks() {
    let cfg = SuiteConfig::default();
    let mut failed = Vec::new();
    for id in 1..=15u8 {
        let outcome = run_check(id, &cfg);
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{status} {id:>2} {}: {}", outcome.title, outcome.detail);
        if !outcome.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed checks: {failed:?}");
}

#[test]
fn corrupted_tables_fail_the_table_check() {
    let q = AdaptedQuiver::standard_a5().unwrap();
    let mut t = ExtTables::standard(&q).unwrap();
    t.m[0][0] += 1;
    let cfg = SuiteConfig { tables: Some(t), ..SuiteConfig::default() };
    let outcome = run_check(15, &cfg);
    println!("negative control: {outcome}");
    assert!(!outcome.passed);
}

#[test]
fn each_table_perturbation_is_detected() {
    let q = AdaptedQuiver::standard_a5().unwrap();
    let base = ExtTables::standard(&q).unwrap();
    let mut variants: Vec<ExtTables> = Vec::new();
    let mut t = base.clone();
    t.w[0][0] += 1;
    variants.push(t);
    let mut t = base.clone();
    t.n[2][0] += 1;
    variants.push(t);
    let mut t = base.clone();
    t.x_prime[5] += 1;
    variants.push(t);
    for t in variants {
        let cfg = SuiteConfig { tables: Some(t), ..SuiteConfig::default() };
        assert!(!run_check(15, &cfg).passed);
    }
}
