mod common;

use common::oracle::{assembly_deviation, gauss};

fn check(pair: &str, nu: f64) {
    let (m, r) = assembly_deviation(pair, nu);
    assert!(m <= 1e-12, "{pair}, nu = {nu}: matrix deviation {m:e}");
    assert!(r <= 1e-12, "{pair}, nu = {nu}: rhs deviation {r:e}");
}

#[test]
fn gauss_rule_integrates_polynomials() {
    let g = gauss(5);
    for p in 0..10 {
        let s: f64 = g.iter().map(|(x, w)| w * x.powi(p)).sum();
        assert!((s - 1.0 / (p as f64 + 1.0)).abs() < 1e-14);
    }
}

#[test]
fn p1p1_matches_oracle() {
    check("P1/P1", 1e-3);
    check("P1/P1", 2.0);
}

#[test]
fn p2p1_matches_oracle() {
    check("P2/P1", 1e-3);
    check("P2/P1", 2.0);
}

#[test]
fn remaining_pairs_match_oracle() {
    for pair in ["P2/P2", "P3/P3", "P3/P2"] {
        check(pair, 1e-3);
        check(pair, 2.0);
    }
}
