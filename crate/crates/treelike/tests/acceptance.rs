//! Acceptance gate: one test per criterion, each printing a pass/fail line.
//!
//! Everything here is exact; the only tolerances are the stated runtime
//! budgets, asserted where given.

use std::time::Instant;

use treelike::measure::{det_is_pm_power_of_two, enumerate_measures};
use treelike::ncode::NCode;
use treelike::ring::linear_relations_match_families;
use treelike::subclass::{enumerate_induced, enumerate_subclasses, f_recurrence, support_of};
use treelike::tree::factorial_u128;
use treelike::verify;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("[{}] {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn c01_measure_counts() {
    let t0 = Instant::now();
    let counts: Vec<usize> = (1..=3u8).map(|n| enumerate_measures(n).len()).collect();
    let elapsed = t0.elapsed();
    report(
        "c01 measure counts",
        counts == [4, 36, 512] && elapsed.as_secs() < 10,
        &format!("n=1..3 -> {counts:?} in {elapsed:?} (budget 10s)"),
    );
}

#[test]
fn c02_two_color_table() {
    let t0 = Instant::now();
    let suite = verify::appendix_a();
    let elapsed = t0.elapsed();
    let detail: Vec<String> =
        suite.lines.iter().map(|l| format!("{}: {}", l.label, l.detail)).collect();
    report(
        "c02 two-color table",
        suite.pass() && elapsed.as_secs() < 60,
        &format!("{} in {elapsed:?} (budget 60s)", detail.join("; ")),
    );
}

#[test]
fn c03_worked_example() {
    let suite = verify::example_4_2();
    let detail: Vec<String> = suite
        .lines
        .iter()
        .map(|l| format!("{} {}", if l.pass { "ok" } else { "FAIL" }, l.label))
        .collect();
    report("c03 eight-color worked example", suite.pass(), &detail.join("; "));
}

#[test]
fn c04_intro_values() {
    let result = verify::intro_formula_checks();
    report(
        "c04 closed-formula values",
        result.is_ok(),
        &result.err().unwrap_or_else(|| "-1/128 and -1/512 via both routes".into()),
    );
}

#[test]
fn c05_subclass_counts() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    for (n, want) in [(1u8, 2u128), (2, 9), (3, 61), (4, 551)] {
        let got = enumerate_subclasses(n).len() as u128;
        let rec = f_recurrence(n as u32);
        ok &= got == want && rec == want;
        details.push(format!("n={n}: {got}"));
    }
    for n in 1..=3u8 {
        let got = enumerate_induced(n).len() as u128;
        ok &= got == (1u128 << n) * factorial_u128(n as u128);
        details.push(format!("induced n={n}: {got}"));
    }
    // The infinite two-color subclasses carry the six table names.
    let names: std::collections::BTreeSet<String> = enumerate_measures(2)
        .iter()
        .map(support_of)
        .filter(|s| !s.is_finite())
        .filter_map(|s| s.table_name())
        .filter(|name| name != "dT3(1)")
        .collect();
    ok &= names
        == ["nt-1", "nr-2", "ord", "nt-2", "nr-1", "rev"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    let elapsed = t0.elapsed();
    ok &= elapsed.as_secs() < 60;
    details.push(format!("{elapsed:?} (budget 60s)"));
    report("c05 subclass counts", ok, &details.join(", "));
}

#[test]
fn c06_relation_soundness() {
    use treelike::ring::{verify_linear_relations, verify_quadratic_relations};
    let mut ok = true;
    let mut details = Vec::new();
    for n in 1..=2u8 {
        let mut bad = 0usize;
        for mu in enumerate_measures(n) {
            bad += verify_linear_relations(n, &mu).iter().filter(|c| !c.pass).count();
            bad += verify_quadratic_relations(n, &mu).iter().filter(|c| !c.pass).count();
        }
        ok &= bad == 0;
        details.push(format!("n={n} relation instances: {bad} failures"));
    }
    for n in 1..=2u8 {
        let stats = verify::additivity_sweep(n, 7);
        ok &= stats.failures.is_empty();
        details.push(format!(
            "n={n} additivity: {} diagrams, {} checks, {} failures",
            stats.diagrams,
            stats.checks,
            stats.failures.len()
        ));
    }
    report("c06 relation soundness", ok, &details.join("; "));
}

#[test]
fn c07_derived_relations() {
    let mut ok = true;
    let mut details = Vec::new();
    for n in 2..=3u8 {
        let matched = linear_relations_match_families(n).unwrap();
        ok &= matched;
        details.push(format!("n={n}: span {}", if matched { "equal" } else { "DIFFERS" }));
    }
    report("c07 derived linear relations", ok, &details.join(", "));
}

#[test]
fn c08_value_shapes() {
    let mut ok = true;
    let mut details = Vec::new();
    for n in 1..=2u8 {
        let violations = verify::value_shape_violations(n, 6);
        ok &= violations.is_empty();
        details.push(format!("n={n}: {} value violations", violations.len()));
    }
    for n in 1..=3u8 {
        let bad = NCode::enumerate(n).iter().filter(|c| !det_is_pm_power_of_two(c)).count();
        ok &= bad == 0;
        details.push(format!("n={n}: {bad} non-power dets"));
    }
    report("c08 dyadic value shapes", ok, &details.join(", "));
}

#[test]
fn c09_regularity_landscape() {
    let mut ok = verify::regularity_landscape().is_ok();
    let mut details =
        vec!["one regular measure at n=1 with values (-1/2, -1/2), none at n=2,3".to_string()];
    for n in 1..=2u8 {
        let missing = verify::witness_sweep(n, 3, 3);
        ok &= missing.is_empty();
        details.push(format!("n={n}: {} bases without a vanishing extension", missing.len()));
    }
    report("c09 regularity landscape", ok, &details.join("; "));
}

#[test]
fn c10_category_laws() {
    let suite = verify::category_laws();
    let detail: Vec<String> = suite
        .lines
        .iter()
        .map(|l| format!("{} ({})", l.label, l.detail))
        .collect();
    report("c10 category laws", suite.pass(), &detail.join("; "));
}

#[test]
fn c11_gram_nondegeneracy() {
    let mut ok = true;
    let mut details = Vec::new();
    for n in 1..=2u8 {
        let reports = verify::gram_sweep(n, 4, 8);
        let bad = reports.iter().filter(|(_, nondeg)| !nondeg).count();
        ok &= bad == 0 && !reports.is_empty();
        details.push(format!("n={n}: {} objects checked, {bad} degenerate", reports.len()));
    }
    report("c11 gram nondegeneracy", ok, &details.join("; "));
}

#[test]
fn c12_growth() {
    let g = verify::growth_report(6, 5);
    let mut ok = true;
    let mut details = Vec::new();
    // (2m-3)!! = 1, 1, 3, 15, 105, 945, ... with the empty product for m <= 2.
    let double_factorial = |m: u32| -> u128 {
        (1..=(2 * m as i64 - 3)).filter(|k| k % 2 == 1).map(|k| k as u128).product()
    };
    for &(m, sum) in &g.top_multiplicities {
        let want = double_factorial(m);
        ok &= sum == want;
        details.push(format!("m={m}: {sum} (want {want})"));
    }
    for &(m, dim) in &g.end_dims {
        let bound = double_factorial(m).pow(2);
        ok &= dim >= bound;
        details.push(format!("dim End at m={m}: {dim} >= {bound}"));
    }
    report("c12 growth", ok, &details.join(", "));
}

#[test]
fn c13_automorphism_oracle() {
    let mut ok = true;
    let mut details = Vec::new();
    for n in 1..=2u8 {
        let violations = verify::automorphism_oracle_violations(n, 6);
        ok &= violations.is_empty();
        details.push(format!("n={n}: {} violations", violations.len()));
    }
    report("c13 automorphism counts", ok, &details.join(", "));
}
