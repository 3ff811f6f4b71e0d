//! Named verification suites, shared by the CLI and the acceptance tests.
//!
//! Each suite produces one line per check; a suite passes when every line
//! does. The heavy pieces (the additivity sweep over all small amalgamation
//! diagrams, the Gram sweep) are parallelized and deterministic.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::amalgam::{enumerate_amalgamations, AmalgamationDiagram};
use crate::category::{
    aut_power_violations, hom_basis, point_power_multiplicities, trace, AmalgCounter, Composer,
    HomElement,
};
use crate::dyadic::Dyadic;
use crate::measure::{enumerate_measures, Measure};
use crate::ncode::{example_tree_n8, NCode};
use crate::ring::{
    extension_chain, linear_relations_match_families, verify_linear_relations,
    verify_quadratic_relations, Generator,
};
use crate::subclass::{
    enumerate_induced, enumerate_subclasses, f_recurrence, support_of, verify_restriction,
    InducedSubclassSpec, Subclass,
};
use crate::tree::{enumerate_structures, ColoredTree, Structure};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteLine {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub lines: Vec<SuiteLine>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.to_string(), lines: Vec::new() }
    }

    fn check(&mut self, label: &str, pass: bool, detail: String) {
        self.lines.push(SuiteLine { label: label.to_string(), pass, detail });
    }

    pub fn pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }
}

pub const SUITE_NAMES: [&str; 5] =
    ["appendix-a", "example-4-2", "counts", "relations", "category-laws"];

/// Sizes the global worker pool used by the parallel sweeps. Only the first
/// call takes effect.
pub fn configure_threads(jobs: usize) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()
}

pub fn run_suite(name: &str) -> Option<SuiteReport> {
    match name {
        "appendix-a" => Some(appendix_a()),
        "example-4-2" => Some(example_4_2()),
        "counts" => Some(counts()),
        "relations" => Some(relations()),
        "category-laws" => Some(category_laws()),
        _ => None,
    }
}

/// The 36 two-color measures: (B(1), C(1,1), C(1,2), B(2), C(2,1), C(2,2))
/// as (numerator, log2 denominator), plus the support name.
pub fn two_color_table() -> Vec<([(i64, u32); 6], &'static str)> {
    const H: u32 = 1; // halves
    const Q: u32 = 2; // quarters
    vec![
        ([(-1, H), (-1, H), (-1, H), (0, 0), (0, 0), (-1, 0)], "dT3(1)"),
        ([(-1, H), (-1, H), (-1, H), (0, 0), (0, 0), (0, 0)], "dT3(1)"),
        ([(-1, H), (-1, H), (0, 0), (0, 0), (0, 0), (-1, H)], "dT3(1)"),
        ([(-1, H), (-1, H), (0, 0), (0, 0), (0, 0), (0, 0)], "dT3(1)"),
        ([(0, 0), (-1, 0), (0, 0), (-1, H), (-1, H), (-1, H)], "dT3(1)"),
        ([(0, 0), (-1, H), (0, 0), (-1, H), (0, 0), (-1, H)], "dT3(1)"),
        ([(0, 0), (0, 0), (0, 0), (-1, H), (-1, H), (-1, H)], "dT3(1)"),
        ([(0, 0), (0, 0), (0, 0), (-1, H), (0, 0), (-1, H)], "dT3(1)"),
        ([(-1, 0), (-1, 0), (-1, 0), (1, 0), (0, 0), (0, 0)], "nt-1"),
        ([(1, H), (0, 0), (1, H), (-1, H), (0, 0), (-1, H)], "nr-2"),
        ([(-1, Q), (-1, Q), (-1, Q), (-1, H), (0, 0), (-1, H)], "ord"),
        ([(1, 0), (0, 0), (0, 0), (-1, 0), (-1, 0), (-1, 0)], "nt-2"),
        ([(-1, H), (-1, H), (0, 0), (1, H), (1, H), (0, 0)], "nr-1"),
        ([(-1, H), (-1, H), (0, 0), (-1, Q), (-1, Q), (-1, Q)], "rev"),
        ([(0, 0), (-2, 0), (0, 0), (0, 0), (-1, 0), (-1, 0)], "Trivial"),
        ([(0, 0), (-1, 0), (-1, 0), (0, 0), (0, 0), (0, 0)], "Trivial"),
        ([(0, 0), (-1, 0), (0, 0), (0, 0), (0, 0), (-1, 0)], "Trivial"),
        ([(0, 0), (-1, 0), (-1, 0), (0, 0), (0, 0), (-2, 0)], "Trivial"),
        ([(0, 0), (-1, 0), (0, 0), (0, 0), (0, 0), (0, 0)], "Trivial"),
        ([(0, 0), (-1, H), (0, 0), (0, 0), (1, H), (0, 0)], "Trivial"),
        ([(0, 0), (0, 0), (0, 0), (0, 0), (-1, 0), (-1, 0)], "Trivial"),
        ([(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (-1, 0)], "Trivial"),
        ([(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0)], "Trivial"),
        ([(0, 0), (0, 0), (1, H), (0, 0), (0, 0), (-1, H)], "Trivial"),
        ([(0, 0), (0, 0), (0, 0), (0, 0), (1, H), (0, 0)], "Trivial"),
        ([(0, 0), (0, 0), (1, H), (0, 0), (0, 0), (0, 0)], "Trivial"),
        ([(0, 0), (-2, 0), (0, 0), (1, 0), (0, 0), (0, 0)], "Trivial"),
        ([(0, 0), (-1, 0), (0, 0), (1, 0), (1, 0), (0, 0)], "Trivial"),
        ([(0, 0), (0, 0), (0, 0), (1, 0), (0, 0), (0, 0)], "Trivial"),
        ([(0, 0), (0, 0), (0, 0), (1, 0), (1, 0), (0, 0)], "Trivial"),
        ([(1, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0)], "Trivial"),
        ([(1, 0), (0, 0), (1, 0), (0, 0), (0, 0), (-1, 0)], "Trivial"),
        ([(1, 0), (0, 0), (0, 0), (0, 0), (0, 0), (-2, 0)], "Trivial"),
        ([(1, 0), (0, 0), (1, 0), (0, 0), (0, 0), (0, 0)], "Trivial"),
        ([(1, 0), (0, 0), (0, 0), (2, 0), (2, 0), (0, 0)], "Trivial"),
        ([(2, 0), (0, 0), (2, 0), (1, 0), (0, 0), (0, 0)], "Trivial"),
    ]
}

/// Value tuple used to key measures against the table rows.
pub fn measure_value_tuple(mu: &Measure) -> Vec<Dyadic> {
    vec![
        mu.b_value(1),
        mu.c_value(1, 1),
        mu.c_value(1, 2),
        mu.b_value(2),
        mu.c_value(2, 1),
        mu.c_value(2, 2),
    ]
}

/// The support name in the table's vocabulary.
pub fn support_name(s: &Subclass) -> String {
    if s.is_finite() {
        "Trivial".to_string()
    } else {
        s.table_name().unwrap_or_else(|| "?".to_string())
    }
}

/// Reproduces the 36-row two-color table: every enumerated measure matches
/// a unique row on all six generator columns and on the support column.
pub fn appendix_a() -> SuiteReport {
    let mut report = SuiteReport::new("appendix-a");
    let measures = enumerate_measures(2);
    report.check("enumeration size", measures.len() == 36, format!("{}", measures.len()));
    let mut expected: BTreeMap<String, &'static str> = BTreeMap::new();
    for (values, support) in two_color_table() {
        let key = values
            .iter()
            .map(|&(m, e)| Dyadic::from_fraction(m, e).to_string())
            .collect::<Vec<_>>()
            .join(",");
        expected.insert(key, support);
    }
    report.check("table rows are distinct", expected.len() == 36, format!("{}", expected.len()));
    let mut matched = 0;
    let mut support_ok = 0;
    for mu in &measures {
        let key = measure_value_tuple(mu)
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",");
        match expected.get(key.as_str()) {
            None => {}
            Some(&support) => {
                matched += 1;
                if support_name(&support_of(mu)) == support {
                    support_ok += 1;
                }
            }
        }
    }
    report.check("value tuples matched", matched == 36, format!("{matched}/36"));
    report.check("supports matched", support_ok == 36, format!("{support_ok}/36"));
    let by_support: BTreeMap<String, usize> =
        measures.iter().map(|m| support_name(&support_of(m))).fold(BTreeMap::new(), |mut acc, s| {
            *acc.entry(s).or_insert(0) += 1;
            acc
        });
    report.check(
        "support multiset",
        by_support.get("dT3(1)") == Some(&8)
            && by_support.get("Trivial") == Some(&22)
            && ["nt-1", "nr-2", "ord", "nt-2", "nr-1", "rev"]
                .iter()
                .all(|n| by_support.get(*n) == Some(&1)),
        format!("{by_support:?}"),
    );
    // Supports really are supports: membership agrees with vanishing on
    // every structure with at most four leaves.
    let small: Vec<ColoredTree> =
        (0..=4u32).flat_map(|m| enumerate_structures(2, m).0).collect();
    let mut mismatches = 0usize;
    for mu in &measures {
        let support = support_of(mu);
        for t in &small {
            if support.is_member(t) != !mu.evaluate(t).unwrap().is_zero() {
                mismatches += 1;
            }
        }
    }
    report.check(
        "support matches vanishing on <= 4-leaf trees",
        mismatches == 0,
        format!("{mismatches} mismatches over {} structures", small.len()),
    );
    report
}

/// The worked eight-color example, end to end.
pub fn example_4_2() -> SuiteReport {
    let mut report = SuiteReport::new("example-4-2");
    let tree = example_tree_n8();
    let code = tree.ncode();
    let beta_ok = (1..=8u8).all(|i| code.beta(i) == [4u8, 5].contains(&i));
    report.check("beta vector", beta_ok, "beta = 1 exactly on {4,5}".into());
    let chi_rows: [[u8; 8]; 8] = [
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [1, 1, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 1],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
    ];
    let chi_ok = (1..=8u8).all(|i| {
        (1..=8u8).all(|j| code.chi(i, j) == (chi_rows[i as usize - 1][j as usize - 1] == 1))
    });
    report.check("chi table", chi_ok, "8x8 table as printed".into());
    let d_expect: [[i64; 8]; 8] = [
        [-1, 0, 1, -1, -1, 0, 0, 0],
        [0, 2, 1, -1, -1, 0, 0, 0],
        [0, 0, -1, -1, -1, 0, 0, 0],
        [0, 0, 0, 1, -1, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, -1, -1, 2, 0, 0],
        [0, 0, 0, -1, -1, 1, -1, 0],
        [0, 0, 0, -1, -1, 1, 0, 2],
    ];
    let d_ok = crate::measure::d_matrix(&code) == d_expect.map(|r| r.to_vec()).to_vec();
    report.check("D matrix", d_ok, "8x8 integer matrix".into());
    let mu = Measure::from_code(&code).expect("example code solves");
    let s: Vec<String> = (1..=8).map(|i| mu.s_value(i).to_string()).collect();
    let s_ok = s == ["-8", "4", "-4", "2", "1", "2", "-2", "1"];
    report.check("solution vector", s_ok, format!("s = ({})", s.join(", ")));
    let a = mu.generator_value(&Generator::A);
    report.check("value on the one-leaf class", a.to_string() == "4", a.to_string());
    let zero_tree = ColoredTree::parse("(2 * (1 * (3 * *)))", 8).unwrap();
    let v0 = mu.evaluate(&zero_tree).unwrap();
    report.check("first evaluation", v0.is_zero(), format!("{v0}"));
    let eight_tree = ColoredTree::parse("(4 (5 * *) (5 * *))", 8).unwrap();
    let v8 = mu.evaluate(&eight_tree).unwrap();
    report.check("second evaluation", v8.to_string() == "8", format!("{v8}"));
    report
}

/// Counting checks: measures, subclasses, induced subclasses, labeled
/// structures.
pub fn counts() -> SuiteReport {
    let mut report = SuiteReport::new("counts");
    for (n, want) in [(1u8, 4usize), (2, 36), (3, 512)] {
        let got = NCode::enumerate(n).len();
        report.check(&format!("measures n={n}"), got == want, format!("{got} (want {want})"));
    }
    for (n, want) in [(1u32, 2u128), (2, 9), (3, 61), (4, 551)] {
        let got = enumerate_subclasses(n as u8).len() as u128;
        let rec = f_recurrence(n);
        report.check(
            &format!("subclasses n={n}"),
            got == want && rec == want,
            format!("enumerated {got}, recurrence {rec} (want {want})"),
        );
    }
    for n in 1..=3u8 {
        let got = enumerate_induced(n).len() as u128;
        let want = (1u128 << n) * crate::tree::factorial_u128(n as u128);
        report.check(&format!("induced n={n}"), got == want, format!("{got} (want {want})"));
    }
    for (m, want) in [(2u32, 1u128), (3, 3), (4, 15), (5, 105), (6, 945)] {
        let (_, labeled) = enumerate_structures(1, m);
        report.check(
            &format!("labeled structures m={m}"),
            labeled == want,
            format!("{labeled} (want {want})"),
        );
    }
    report
}

/// Relation soundness: every one- and two-color measure satisfies every
/// linear and quadratic family instance; derived linear relations span the
/// families; measure additivity holds on every small diagram.
pub fn relations() -> SuiteReport {
    let mut report = SuiteReport::new("relations");
    for n in 1..=2u8 {
        let measures = enumerate_measures(n);
        let mut bad = 0usize;
        for mu in &measures {
            bad += verify_linear_relations(n, mu).iter().filter(|c| !c.pass).count();
            bad += verify_quadratic_relations(n, mu).iter().filter(|c| !c.pass).count();
        }
        report.check(
            &format!("linear+quadratic instances n={n}"),
            bad == 0,
            format!("{bad} failures over {} measures", measures.len()),
        );
    }
    for n in 2..=3u8 {
        let ok = linear_relations_match_families(n).unwrap();
        report.check(
            &format!("derived relations span n={n}"),
            ok,
            "integer span equals the eight families".into(),
        );
    }
    let stats = additivity_sweep(2, 7);
    report.check(
        "additivity on all diagrams with <= 7 total leaves",
        stats.failures.is_empty(),
        format!(
            "{} diagrams, {} measure checks, {} failures",
            stats.diagrams,
            stats.checks,
            stats.failures.len()
        ),
    );
    report
}

/// Identity, associativity, and trace laws on small objects under every
/// measure.
pub fn category_laws() -> SuiteReport {
    let mut report = SuiteReport::new("category-laws");
    for n in 1..=2u8 {
        let measures = enumerate_measures(n);
        let objects: Vec<ColoredTree> =
            (0..=3u32).flat_map(|m| enumerate_structures(n, m).0).collect();
        let mut composer = Composer::new(n, 10);
        let mut identity_bad = 0usize;
        let mut identity_checked = 0usize;
        for x in &objects {
            for y in &objects {
                let idx = HomElement::identity(x);
                let idy = HomElement::identity(y);
                for b in hom_basis(x, y, n, 8).unwrap() {
                    let f = HomElement::basis(x, y, &b);
                    // The triple enumeration is cached per basis pair, so
                    // checking every measure only re-evaluates coefficients.
                    for mu in &measures {
                        identity_checked += 1;
                        if composer.compose(mu, &idy, &f).unwrap() != f
                            || composer.compose(mu, &f, &idx).unwrap() != f
                        {
                            identity_bad += 1;
                        }
                    }
                }
            }
        }
        report.check(
            &format!("identity law n={n}"),
            identity_bad == 0,
            format!("{identity_checked} checks"),
        );

        let assoc = associativity_sample(n, &measures, 24);
        report.check(
            &format!("associativity n={n}"),
            assoc.1 == 0,
            format!("{} sampled triples, {} failures", assoc.0, assoc.1),
        );

        let mut trace_bad = 0usize;
        for x in &objects {
            let id = HomElement::identity(x);
            for mu in &measures {
                if trace(mu, &id).unwrap() != mu.evaluate(x).unwrap() {
                    trace_bad += 1;
                }
            }
        }
        report.check(
            &format!("trace of identity n={n}"),
            trace_bad == 0,
            "trace(id_X) = measure of X".into(),
        );
    }
    report
}

/// Deterministic pseudorandom associativity test: (h g) f = h (g f) for
/// sampled basis triples among objects with at most three leaves.
pub fn associativity_sample(n: u8, measures: &[Measure], samples: u32) -> (u32, u32) {
    let objects: Vec<ColoredTree> =
        (0..=3u32).flat_map(|m| enumerate_structures(n, m).0).collect();
    let mut state = 0x9e3779b97f4a7c15u64 ^ (n as u64);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut composer = Composer::new(n, 12);
    let mut ran = 0;
    let mut failures = 0;
    for _ in 0..samples {
        let x = &objects[(next() % objects.len() as u64) as usize];
        let y = &objects[(next() % objects.len() as u64) as usize];
        let z = &objects[(next() % objects.len() as u64) as usize];
        let w = &objects[(next() % objects.len() as u64) as usize];
        let fs = hom_basis(x, y, n, 8).unwrap();
        let gs = hom_basis(y, z, n, 8).unwrap();
        let hs = hom_basis(z, w, n, 8).unwrap();
        if fs.is_empty() || gs.is_empty() || hs.is_empty() {
            continue;
        }
        let f = HomElement::basis(x, y, &fs[(next() % fs.len() as u64) as usize]);
        let g = HomElement::basis(y, z, &gs[(next() % gs.len() as u64) as usize]);
        let h = HomElement::basis(z, w, &hs[(next() % hs.len() as u64) as usize]);
        for mu in measures {
            ran += 1;
            let gf = composer.compose(mu, &g, &f).unwrap();
            let left = composer.compose(mu, &h, &gf).unwrap();
            let hg = composer.compose(mu, &h, &g).unwrap();
            let right = composer.compose(mu, &hg, &f).unwrap();
            if left != right {
                failures += 1;
            }
        }
    }
    (ran, failures)
}

pub struct AdditivityStats {
    pub diagrams: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

/// Checks the additivity axiom mu(Z -> X) = sum_k mu(Y -> Z'_k) for every
/// diagram (up to diagram isomorphism) with at most `max_total` total
/// leaves, under every measure with `n` colors.
pub fn additivity_sweep(n: u8, max_total: u32) -> AdditivityStats {
    let classes: Vec<Vec<ColoredTree>> =
        (0..=max_total).map(|m| enumerate_structures(n, m).0).collect();
    let measures = enumerate_measures(n);

    // Per class and base size: leaf subsets grouped by the canonical form
    // of the restriction, computed once.
    type Groups = BTreeMap<String, Vec<(Vec<u32>, ColoredTree)>>;
    let grouped: Vec<Vec<Vec<Groups>>> = (0..=max_total)
        .map(|m| {
            classes[m as usize]
                .iter()
                .map(|t| {
                    (0..=m)
                        .map(|zsize| {
                            let mut g: Groups = BTreeMap::new();
                            for (u, z) in subsets_with_restriction(t, zsize) {
                                g.entry(z.canonicalize().to_text()).or_default().push((u, z));
                            }
                            g
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    // Enumerate diagrams up to diagram isomorphism.
    let mut pairs: Vec<(u32, u32, usize, usize)> = Vec::new();
    for mx in 0..=max_total {
        for my in 0..=max_total {
            for xi in 0..classes[mx as usize].len() {
                for yi in 0..classes[my as usize].len() {
                    pairs.push((mx, my, xi, yi));
                }
            }
        }
    }

    let diagram_lists: Vec<Vec<AmalgamationDiagram>> = pairs
        .par_iter()
        .map(|&(mx, my, xi, yi)| {
            let x = &classes[mx as usize][xi];
            let y = &classes[my as usize][yi];
            let mut local: BTreeMap<String, AmalgamationDiagram> = BTreeMap::new();
            let zmin = (mx + my).saturating_sub(max_total);
            for zsize in zmin..=mx.min(my) {
                let gx = &grouped[mx as usize][xi][zsize as usize];
                let gy = &grouped[my as usize][yi][zsize as usize];
                for (canon, x_subsets) in gx {
                    let Some(y_subsets) = gy.get(canon) else { continue };
                    for (u, zx) in x_subsets {
                        for (v, zy) in y_subsets {
                            for phi in zx.isomorphisms(zy) {
                                let left_emb: Vec<u32> = u.clone();
                                let right_emb: Vec<u32> =
                                    phi.iter().map(|&q| v[q as usize]).collect();
                                let key = diagram_key(x, y, zx, &left_emb, &right_emb);
                                local.entry(key).or_insert_with(|| AmalgamationDiagram {
                                    base: zx.clone(),
                                    left: x.clone(),
                                    right: y.clone(),
                                    left_emb,
                                    right_emb,
                                });
                            }
                        }
                    }
                }
            }
            local.into_values().collect()
        })
        .collect();
    let diagrams: Vec<AmalgamationDiagram> = diagram_lists.into_iter().flatten().collect();

    let results: Vec<(usize, Vec<String>)> = diagrams
        .par_iter()
        .map(|diagram| {
            let lhs_chain =
                extension_chain(&diagram.base, &diagram.left, &diagram.left_emb).unwrap();
            let amalgs = enumerate_amalgamations(diagram, n, max_total).unwrap();
            let rhs_chains: Vec<Vec<Generator>> = amalgs
                .iter()
                .map(|a| extension_chain(&diagram.right, &a.total, &a.from_right).unwrap())
                .collect();
            let mut failures = Vec::new();
            for mu in &measures {
                let lhs = mu.chain_product(&lhs_chain);
                let mut rhs = Dyadic::zero();
                for chain in &rhs_chains {
                    rhs += &mu.chain_product(chain);
                }
                if lhs != rhs {
                    failures.push(format!(
                        "measure {}: X={} Y={} Z={}: {lhs} != {rhs}",
                        mu.key(),
                        diagram.left,
                        diagram.right,
                        diagram.base
                    ));
                }
            }
            (measures.len(), failures)
        })
        .collect();

    let mut stats =
        AdditivityStats { diagrams: diagrams.len(), checks: 0, failures: Vec::new() };
    for (checks, fails) in results {
        stats.checks += checks;
        stats.failures.extend(fails);
    }
    stats
}

/// All leaf subsets of a given size with their restrictions.
fn subsets_with_restriction(t: &ColoredTree, size: u32) -> Vec<(Vec<u32>, ColoredTree)> {
    let m = t.leaf_count();
    let mut out = Vec::new();
    let mut subset = Vec::new();
    fn rec(
        t: &ColoredTree,
        m: u32,
        size: u32,
        start: u32,
        subset: &mut Vec<u32>,
        out: &mut Vec<(Vec<u32>, ColoredTree)>,
    ) {
        if subset.len() == size as usize {
            let restriction = t.restrict(&subset.iter().copied().collect()).unwrap();
            out.push((subset.clone(), restriction));
            return;
        }
        for p in start..m {
            if m - p < size - subset.len() as u32 {
                break;
            }
            subset.push(p);
            rec(t, m, size, p + 1, subset, out);
            subset.pop();
        }
    }
    rec(t, m, size, 0, &mut subset, &mut out);
    out
}

/// Canonical key of a span diagram up to diagram isomorphism: minimize the
/// tagged canonical forms of both legs over reparametrizations of the base.
fn diagram_key(
    x: &ColoredTree,
    y: &ColoredTree,
    z: &ColoredTree,
    left_emb: &[u32],
    right_emb: &[u32],
) -> String {
    let mut best: Option<String> = None;
    for gamma in z.isomorphisms(z) {
        let tag_side = |t: &ColoredTree, emb: &[u32]| -> String {
            let mut tags = vec![0u32; t.leaf_count() as usize];
            for (k, &zk) in gamma.iter().enumerate() {
                tags[emb[zk as usize] as usize] = k as u32 + 1;
            }
            match t.node_with_labels_opt(&tags) {
                None => "()".to_string(),
                Some(mut node) => {
                    node.canonicalize_labeled();
                    crate::tree::ColoredTree { root: Some(node) }
                        .to_text_labeled(&|l| format!("{l}"))
                }
            }
        };
        let candidate = format!("{}|{}", tag_side(x, left_emb), tag_side(y, right_emb));
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
    }
    best.unwrap()
}

/// Brute-force automorphism count: leaf permutations preserving S and the
/// meet colors. Independent of the recursive product formula.
pub fn brute_force_automorphisms(t: &ColoredTree) -> u128 {
    let s = Structure::from_tree(t);
    let m = t.leaf_count() as usize;
    let mut perm: Vec<u32> = (0..m as u32).collect();
    let mut count = 0u128;
    fn permute(perm: &mut Vec<u32>, k: usize, visit: &mut dyn FnMut(&[u32])) {
        if k == perm.len() {
            visit(perm);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            permute(perm, k + 1, visit);
            perm.swap(k, i);
        }
    }
    permute(&mut perm, 0, &mut |p| {
        let ok = s
            .s_triples
            .iter()
            .all(|&(a, b, c)| {
                s.s_triples.contains(&(p[a as usize], p[b as usize], p[c as usize]))
            })
            && s.meet_colors.iter().all(|(&(a, b), &col)| {
                let (x, y) = (p[a as usize], p[b as usize]);
                let key = if x < y { (x, y) } else { (y, x) };
                s.meet_colors.get(&key) == Some(&col)
            });
        if ok {
            count += 1;
        }
    });
    count
}

/// Structures (n colors, up to max_leaves) where the recursive automorphism
/// count disagrees with brute force or is not a power of two.
pub fn automorphism_oracle_violations(n: u8, max_leaves: u32) -> Vec<String> {
    let mut out = Vec::new();
    for m in 0..=max_leaves {
        for t in enumerate_structures(n, m).0 {
            let fast = t.automorphism_count();
            let brute = brute_force_automorphisms(&t);
            if fast != brute {
                out.push(format!("{t}: recursive {fast} != brute force {brute}"));
            }
            if !fast.is_power_of_two() {
                out.push(format!("{t}: |Aut| = {fast} is not a power of two"));
            }
        }
    }
    out.extend(
        aut_power_violations(n, max_leaves)
            .into_iter()
            .map(|(t, c)| format!("{t}: reported violation {c}")),
    );
    out
}

/// Measure values on all structures up to max_leaves that are not zero or
/// plus/minus a power of two.
pub fn value_shape_violations(n: u8, max_leaves: u32) -> Vec<String> {
    let measures = enumerate_measures(n);
    let mut out = Vec::new();
    for m in 0..=max_leaves {
        for t in enumerate_structures(n, m).0 {
            for mu in &measures {
                let v = mu.evaluate(&t).unwrap();
                if !v.is_zero() && !v.is_pm_power_of_two() {
                    out.push(format!("{} on {t}: {v}", mu.key()));
                }
            }
        }
    }
    out
}

/// Non-regular measures and small bases for which no vanishing extension
/// exists within the given number of added leaves (expected empty).
pub fn witness_sweep(n: u8, max_base_leaves: u32, added: u32) -> Vec<String> {
    let measures = enumerate_measures(n);
    let bases: Vec<ColoredTree> =
        (0..=max_base_leaves).flat_map(|m| enumerate_structures(n, m).0).collect();
    let mut out = Vec::new();
    for mu in &measures {
        if mu.is_regular() {
            continue;
        }
        for base in &bases {
            if mu.quasi_regularity_witness(base, added).unwrap().is_none() {
                out.push(format!("{} from base {base}", mu.key()));
            }
        }
    }
    out
}

/// Gram reports for every induced subclass (all orders and repeat sets) and
/// every member object up to the leaf bound. End bases are enumerated once
/// per object and filtered per subclass.
pub fn gram_sweep(n: u8, max_object_leaves: u32, max_total: u32) -> Vec<(String, bool)> {
    let specs = enumerate_induced(n);
    let objects: Vec<ColoredTree> =
        (0..=max_object_leaves).flat_map(|m| enumerate_structures(n, m).0).collect();
    let bases: Vec<_> = objects
        .par_iter()
        .map(|x| hom_basis(x, x, n, max_total).expect("object within bounds"))
        .collect();
    let mut out = Vec::new();
    for spec in &specs {
        let subclass = spec.subclass();
        let mu = spec.extension_measure();
        for (x, basis) in objects.iter().zip(&bases) {
            if !subclass.is_member(x) {
                continue;
            }
            let report = crate::category::gram_from_basis(&mu, x, basis, Some(&subclass))
                .expect("gram within bounds");
            out.push((
                format!(
                    "order {:?} repeats {:?} object {}: dim {} rank {}",
                    spec.order, spec.repeats, report.object, report.dim, report.rank
                ),
                report.nondegenerate,
            ));
        }
    }
    out
}

/// Growth data for the one-color class: multiplicity sums at full size per
/// tensor power of the point, and the exact dimension of its endomorphism
/// space.
pub struct GrowthReport {
    pub top_multiplicities: Vec<(u32, u128)>,
    pub end_dims: Vec<(u32, u128)>,
}

pub fn growth_report(max_power_mult: u32, max_power_end: u32) -> GrowthReport {
    let mut top = Vec::new();
    for m in 1..=max_power_mult {
        let mult = point_power_multiplicities(1, m, 2 * max_power_mult).unwrap();
        let sum: u128 =
            mult.iter().filter(|(t, _)| t.leaf_count() == m).map(|(_, k)| k).sum();
        top.push((m, sum));
    }
    let counter = AmalgCounter::new(1, 2 * max_power_end);
    let mut dims = Vec::new();
    for m in 1..=max_power_end {
        let mult = point_power_multiplicities(1, m, 2 * max_power_end).unwrap();
        let mut dim = 0u128;
        for (x, kx) in &mult {
            for (y, ky) in &mult {
                dim += kx * ky * counter.count(x, y);
            }
        }
        dims.push((m, dim));
    }
    GrowthReport { top_multiplicities: top, end_dims: dims }
}

/// Restriction consistency: measures with infinite support agree with the
/// closed induced formula on member trees.
pub fn restriction_failures(n: u8, max_leaves: u32) -> Vec<String> {
    verify_restriction(n, max_leaves)
        .into_iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} on {}: {} != {}", c.measure, c.tree, c.full_value, c.induced_value))
        .collect()
}

/// Exactly one regular measure for one color, none for two or three.
pub fn regularity_landscape() -> Result<(), String> {
    let one = enumerate_measures(1);
    let regular: Vec<&Measure> = one.iter().filter(|m| m.is_regular()).collect();
    if regular.len() != 1 {
        return Err(format!("expected 1 regular one-color measure, found {}", regular.len()));
    }
    let mu = regular[0];
    if mu.b_value(1).to_string() != "-1/2" || mu.c_value(1, 1).to_string() != "-1/2" {
        return Err("regular one-color measure has unexpected values".into());
    }
    for n in 2..=3u8 {
        let count = enumerate_measures(n).iter().filter(|m| m.is_regular()).count();
        if count != 0 {
            return Err(format!("{count} regular measures for n = {n}"));
        }
    }
    Ok(())
}

/// Self-amalgamation counts of the three-leaf tree with equal colors over
/// its two-leaf restriction: n + 3 classes for each ambient n.
pub fn self_amalgamation_counts(max_n: u8) -> Vec<(u8, usize)> {
    (1..=max_n)
        .map(|n| {
            let x = ColoredTree::parse("(1 * (1 * *))", n).unwrap();
            let d = AmalgamationDiagram::new(
                ColoredTree::parse("(1 * *)", n).unwrap(),
                x.clone(),
                x,
                vec![1, 2],
                vec![1, 2],
            )
            .unwrap();
            (n, enumerate_amalgamations(&d, n, 8).unwrap().len())
        })
        .collect()
}

/// Separated pairs have a unique amalgamation, and non-separated pairs have
/// at least two; exhaustive up to the leaf bound.
pub fn separatedness_violations(n: u8, max_leaves: u32) -> Vec<String> {
    let mut out = Vec::new();
    for m in 2..=max_leaves {
        for t in enumerate_structures(n, m).0 {
            for a in 0..m {
                for b in a + 1..m {
                    let d = crate::amalgam::deletion_diagram(&t, a, b);
                    let amalgs = enumerate_amalgamations(&d, n, max_leaves.max(m)).unwrap();
                    let separated = crate::amalgam::are_separated(&t, a, b);
                    if separated != (amalgs.len() == 1) {
                        out.push(format!("{t} leaves {a},{b}: {} classes", amalgs.len()));
                    } else if separated && !amalgs[0].total.is_isomorphic(&t) {
                        out.push(format!("{t} leaves {a},{b}: unique class differs"));
                    }
                }
            }
        }
    }
    out
}

/// The two intro examples of the closed induced formula, with both routes.
pub fn intro_formula_checks() -> Result<(), String> {
    let spec = InducedSubclassSpec::natural(3, [1u8, 2, 3].into_iter().collect());
    let mu = spec.extension_measure();
    let cases =
        [("(2 (3 * *) (3 * *))", "-1/128"), ("(1 * (2 * (3 * *)))", "-1/512")];
    for (text, want) in cases {
        let t = ColoredTree::parse(text, 3).unwrap();
        let closed = spec.value(&t).map_err(|e| e.to_string())?;
        let chained = mu.evaluate(&t).map_err(|e| e.to_string())?;
        if closed.to_string() != want {
            return Err(format!("closed formula on {text}: {closed} != {want}"));
        }
        if chained.to_string() != want {
            return Err(format!("generator chain on {text}: {chained} != {want}"));
        }
    }
    Ok(())
}

/// Hom dimension symmetry on small objects.
pub fn hom_symmetry_violations(n: u8) -> Vec<String> {
    let objects: Vec<ColoredTree> =
        (0..=3u32).flat_map(|m| enumerate_structures(n, m).0).collect();
    let mut out = Vec::new();
    for x in &objects {
        for y in &objects {
            let xy = hom_basis(x, y, n, 8).unwrap().len();
            let yx = hom_basis(y, x, n, 8).unwrap().len();
            if xy != yx {
                out.push(format!("dim Hom({x},{y}) = {xy} != {yx}"));
            }
        }
    }
    out
}

/// Additivity of the induced measures inside their own subclasses: for
/// every diagram of member structures, the closed formula satisfies the
/// additivity axiom restricted to member totals.
pub fn induced_additivity_failures(n: u8, max_total: u32) -> Vec<String> {
    let mut out = Vec::new();
    for spec in enumerate_induced(n) {
        let subclass = spec.subclass();
        let classes: Vec<Vec<ColoredTree>> = (0..=max_total)
            .map(|m| {
                enumerate_structures(n, m)
                    .0
                    .into_iter()
                    .filter(|t| subclass.is_member(t))
                    .collect()
            })
            .collect();
        for mx in 0..=max_total {
            for my in 0..=max_total {
                for x in &classes[mx as usize] {
                    for y in &classes[my as usize] {
                        let zmin = (mx + my).saturating_sub(max_total);
                        for zsize in zmin..=mx.min(my) {
                            for (u, zx) in subsets_with_restriction(x, zsize) {
                                for (v, zy) in subsets_with_restriction(y, zsize) {
                                    if zx.canonicalize() != zy.canonicalize() {
                                        continue;
                                    }
                                    for phi in zx.isomorphisms(&zy) {
                                        let right_emb: Vec<u32> =
                                            phi.iter().map(|&q| v[q as usize]).collect();
                                        let diagram = AmalgamationDiagram {
                                            base: zx.clone(),
                                            left: x.clone(),
                                            right: y.clone(),
                                            left_emb: u.clone(),
                                            right_emb,
                                        };
                                        // mu(Z -> X) = mu(X)/mu(Z);
                                        // sum over member totals of mu(Z')/mu(Y).
                                        let lhs = spec
                                            .value(x)
                                            .unwrap()
                                            .div_exact(&spec.value(&zx).unwrap())
                                            .unwrap();
                                        let mut rhs = Dyadic::zero();
                                        for amalg in
                                            enumerate_amalgamations(&diagram, n, max_total)
                                                .unwrap()
                                        {
                                            if subclass.is_member(&amalg.total) {
                                                rhs += &spec
                                                    .value(&amalg.total)
                                                    .unwrap()
                                                    .div_exact(&spec.value(y).unwrap())
                                                    .unwrap();
                                            }
                                        }
                                        if lhs != rhs {
                                            out.push(format!(
                                                "order {:?} repeats {:?}: X={x} Y={y} Z={zx}: {lhs} != {rhs}",
                                                spec.order, spec.repeats
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_quick() {
        assert!(appendix_a().pass(), "{:?}", appendix_a());
        assert!(example_4_2().pass(), "{:?}", example_4_2());
    }

    #[test]
    fn self_amalgamation_has_n_plus_3_classes() {
        assert_eq!(self_amalgamation_counts(3), vec![(1, 4), (2, 5), (3, 6)]);
    }

    #[test]
    fn intro_formula() {
        intro_formula_checks().unwrap();
    }

    #[test]
    fn regularity() {
        regularity_landscape().unwrap();
    }

    #[test]
    fn small_additivity_sweep() {
        let stats = additivity_sweep(2, 5);
        assert!(stats.diagrams > 100, "found {} diagrams", stats.diagrams);
        assert!(stats.failures.is_empty(), "{:?}", &stats.failures[..stats.failures.len().min(3)]);
    }

    #[test]
    fn automorphism_oracle_small() {
        assert!(automorphism_oracle_violations(2, 5).is_empty());
    }

    #[test]
    fn hom_symmetry_small() {
        assert!(hom_symmetry_violations(1).is_empty());
    }

    #[test]
    fn induced_additivity_small() {
        assert!(induced_additivity_failures(1, 5).is_empty());
        assert!(induced_additivity_failures(2, 5).is_empty());
    }
}
