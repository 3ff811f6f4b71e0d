//! Generators of the measure ring and relations between them.
//!
//! Marked structures (one-point extensions) generate the ring. Deleting any
//! leaf separated from the marked one does not change the class, so every
//! marked structure reduces to one of five generator shapes, drawn here
//! with the marked leaf as `@` and colors listed by increasing distance
//! from the root:
//!
//!   A          @                       the unique one-leaf class
//!
//!   B(i)       i                       two leaves under one node
//!             / \
//!            @   *
//!
//!   C(i,j)     i          D(i,j)     i
//!             / \                   / \
//!            @   j                 *   j
//!               / \                   / \
//!              *   *                 @   *
//!
//!   E(i,j,k)   i
//!             / \
//!            *   j
//!               / \
//!              @   k
//!                 / \
//!                *   *
//!
//! Linear relations arise from deletion diagrams of pairs of marked
//! structures over their common part; this module derives them by direct
//! amalgamation enumeration and compares the integer span with the known
//! generating families. Quadratic relations are evaluated per measure.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::amalgam::{
    enumerate_amalgamations, is_embedding, AmalgamError, AmalgamationDiagram,
};
use crate::dyadic::Dyadic;
use crate::measure::Measure;
use crate::tree::ColoredTree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("marked leaf {leaf} is not a leaf of the tree")]
    BadMark { leaf: u32 },
    #[error("the empty structure has no marked leaf")]
    EmptyTree,
    #[error("leaf map is not a structure-preserving embedding")]
    NotAnEmbedding,
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
}

/// One of the five irreducible marked-structure classes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Generator {
    A,
    B(u8),
    C(u8, u8),
    D(u8, u8),
    E(u8, u8, u8),
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Generator::A => write!(f, "A"),
            Generator::B(i) => write!(f, "B({i})"),
            Generator::C(i, j) => write!(f, "C({i},{j})"),
            Generator::D(i, j) => write!(f, "D({i},{j})"),
            Generator::E(i, j, k) => write!(f, "E({i},{j},{k})"),
        }
    }
}

impl Generator {
    /// All generator instances with colors in 1..=n.
    pub fn all(n: u8) -> Vec<Generator> {
        let mut out = vec![Generator::A];
        for i in 1..=n {
            out.push(Generator::B(i));
        }
        for i in 1..=n {
            for j in 1..=n {
                out.push(Generator::C(i, j));
            }
        }
        for i in 1..=n {
            for j in 1..=n {
                out.push(Generator::D(i, j));
            }
        }
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    out.push(Generator::E(i, j, k));
                }
            }
        }
        out
    }

    /// The concrete marked tree of this class: (tree, marked leaf position).
    pub fn marked_tree(&self, n: u8) -> (ColoredTree, u32) {
        let parse = |s: &str| ColoredTree::parse(s, n).unwrap();
        match *self {
            Generator::A => (parse("*"), 0),
            Generator::B(i) => (parse(&format!("({i} * *)")), 0),
            Generator::C(i, j) => (parse(&format!("({i} * ({j} * *))")), 0),
            Generator::D(i, j) => (parse(&format!("({i} * ({j} * *))")), 1),
            Generator::E(i, j, k) => (parse(&format!("({i} * ({j} * ({k} * *)))")), 1),
        }
    }
}

/// A one-point extension: a tree together with its marked leaf.
#[derive(Clone, Debug)]
pub struct MarkedStructure {
    pub tree: ColoredTree,
    pub marked: u32,
}

/// Reduces a marked structure to its generator class by repeatedly deleting
/// leaves separated from the mark. Any maximal deletion sequence gives the
/// same class; this one removes the lowest-position separated leaf first.
pub fn reduce_marked(m: &MarkedStructure) -> Result<Generator, RingError> {
    let mut tree = m.tree.clone();
    let mut mark = m.marked;
    if tree.is_empty() {
        return Err(RingError::EmptyTree);
    }
    if mark >= tree.leaf_count() {
        return Err(RingError::BadMark { leaf: mark });
    }
    loop {
        let count = tree.leaf_count();
        if count < 2 {
            break;
        }
        // One flat index per deletion step; a leaf is separated from the
        // mark when their neighbor nodes are neither equal nor adjacent.
        let flat = tree.flatten();
        let na = flat.parent[flat.leaves[mark as usize]].expect("two leaves have parents");
        let victim = (0..count).find(|&b| {
            if b == mark {
                return false;
            }
            let nb = flat.parent[flat.leaves[b as usize]].unwrap();
            nb != na && flat.parent[na] != Some(nb) && flat.parent[nb] != Some(na)
        });
        match victim {
            Some(b) => {
                let keep: BTreeSet<u32> = (0..count).filter(|&p| p != b).collect();
                tree = tree.restrict(&keep).unwrap();
                if b < mark {
                    mark -= 1;
                }
            }
            None => break,
        }
    }
    Ok(classify_irreducible(&tree, mark))
}

/// Pattern-matches an irreducible marked tree onto its generator symbol.
fn classify_irreducible(tree: &ColoredTree, mark: u32) -> Generator {
    let m = tree.leaf_count();
    let flat = tree.flatten();
    let color_at_depth = |d: u32| -> u8 {
        (0..flat.parent.len())
            .find(|&v| flat.depth[v] == d && flat.color[v].is_some())
            .map(|v| flat.color[v].unwrap().get())
            .expect("irreducible tree has a node at each depth along its spine")
    };
    match m {
        1 => Generator::A,
        2 => Generator::B(color_at_depth(0)),
        3 => {
            let (i, j) = (color_at_depth(0), color_at_depth(1));
            let mark_parent = flat.parent[flat.leaves[mark as usize]].unwrap();
            if flat.depth[mark_parent] == 0 {
                Generator::C(i, j)
            } else {
                Generator::D(i, j)
            }
        }
        4 => {
            let (i, j, k) = (color_at_depth(0), color_at_depth(1), color_at_depth(2));
            let mark_parent = flat.parent[flat.leaves[mark as usize]].unwrap();
            assert_eq!(
                flat.depth[mark_parent], 1,
                "irreducible 4-leaf class marks the middle leaf"
            );
            Generator::E(i, j, k)
        }
        _ => panic!("marked structure failed to reduce to a generator ({m} leaves)"),
    }
}

/// The generator classes of the one-point extensions along some completion
/// of `map : sub -> sup` to all of sup. The product of their values under
/// any measure is the measure of the embedding; the order of removal does
/// not matter for that product.
pub fn extension_chain(
    sub: &ColoredTree,
    sup: &ColoredTree,
    map: &[u32],
) -> Result<Vec<Generator>, RingError> {
    if !is_embedding(sub, sup, map) {
        return Err(RingError::NotAnEmbedding);
    }
    let mut chain = Vec::new();
    let mut current = sup.clone();
    let mut image: BTreeSet<u32> = map.iter().copied().collect();
    while current.leaf_count() > sub.leaf_count() {
        let m = current.leaf_count();
        let extra = (0..m).rev().find(|p| !image.contains(p)).unwrap();
        chain.push(reduce_marked(&MarkedStructure { tree: current.clone(), marked: extra })?);
        let keep: BTreeSet<u32> = (0..m).filter(|&p| p != extra).collect();
        current = current.restrict(&keep).unwrap();
        image = image.iter().map(|&p| if p > extra { p - 1 } else { p }).collect();
    }
    Ok(chain)
}

/// A formal integer combination of generator monomials of degree <= 2.
/// The empty monomial is the constant 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct LinComb {
    terms: BTreeMap<Vec<Generator>, i64>,
}

impl LinComb {
    pub fn zero() -> Self {
        LinComb::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut l = LinComb::zero();
        l.add_term(&[], c);
        l
    }

    pub fn generator(g: Generator) -> Self {
        let mut l = LinComb::zero();
        l.add_term(&[g], 1);
        l
    }

    pub fn add_term(&mut self, monomial: &[Generator], coeff: i64) {
        let mut key = monomial.to_vec();
        key.sort();
        let entry = self.terms.entry(key).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&monomial.iter().copied().collect::<Vec<_>>());
        }
        self.terms.retain(|_, c| *c != 0);
    }

    pub fn sub(&self, other: &LinComb) -> LinComb {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m, -c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Generator], i64)> {
        self.terms.iter().map(|(m, &c)| (m.as_slice(), c))
    }

    /// Sign-normalized form: the leading coefficient is positive.
    pub fn normalized(&self) -> LinComb {
        match self.terms.iter().next() {
            Some((_, &c)) if c < 0 => {
                let mut out = LinComb::zero();
                for (m, c) in &self.terms {
                    out.add_term(m, -c);
                }
                out
            }
            _ => self.clone(),
        }
    }

    pub fn evaluate(&self, mu: &Measure) -> Dyadic {
        let mut total = Dyadic::zero();
        for (monomial, coeff) in &self.terms {
            let mut v = Dyadic::from_int(*coeff);
            for g in monomial {
                v = &v * &mu.generator_value(g);
            }
            total += &v;
        }
        total
    }
}

impl std::fmt::Display for LinComb {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let mono = if m.is_empty() {
                "1".to_string()
            } else {
                m.iter().map(|g| g.to_string()).collect::<Vec<_>>().join("*")
            };
            if first {
                match *c {
                    1 if !m.is_empty() => write!(f, "{mono}")?,
                    -1 if !m.is_empty() => write!(f, "-{mono}")?,
                    c => write!(f, "{c}{}", if m.is_empty() { String::new() } else { format!("*{mono}") })?,
                }
                first = false;
            } else {
                let sign = if *c >= 0 { " + " } else { " - " };
                let mag = c.abs();
                if m.is_empty() {
                    write!(f, "{sign}{mag}")?;
                } else if mag == 1 {
                    write!(f, "{sign}{mono}")?;
                } else {
                    write!(f, "{sign}{mag}*{mono}")?;
                }
            }
        }
        Ok(())
    }
}

/// One derived relation: lhs = rhs with a note on the diagram it came from.
#[derive(Clone, Debug)]
pub struct RelationRecord {
    pub kind: RelationKind,
    pub lhs: LinComb,
    pub rhs: LinComb,
    pub provenance: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RelationKind {
    Linear,
    Quadratic,
}

impl RelationRecord {
    pub fn normalized_difference(&self) -> LinComb {
        self.lhs.sub(&self.rhs).normalized()
    }
}

/// Derives every minimal linear relation: for each ordered pair of
/// irreducible marked structures whose unmarked parts are isomorphic,
/// enumerate the amalgamations of the two trees over that common part and
/// reduce each total back to a generator. Trivial identities are dropped.
pub fn derive_linear_relations(n: u8) -> Result<Vec<RelationRecord>, RingError> {
    let instances: Vec<(Generator, ColoredTree, u32)> = Generator::all(n)
        .into_iter()
        .map(|g| {
            let (t, mark) = g.marked_tree(n);
            (g, t, mark)
        })
        .collect();

    let mut seen: BTreeSet<LinComb> = BTreeSet::new();
    let mut out = Vec::new();
    for (g1, t1, a1) in &instances {
        let m1 = t1.leaf_count();
        let keep1: BTreeSet<u32> = (0..m1).filter(|&p| p != *a1).collect();
        let z1 = t1.restrict(&keep1).unwrap();
        for (g2, t2, a2) in &instances {
            let m2 = t2.leaf_count();
            let keep2: BTreeSet<u32> = (0..m2).filter(|&p| p != *a2).collect();
            let z2 = t2.restrict(&keep2).unwrap();
            for iso in z1.isomorphisms(&z2) {
                // Embed z1 into t1 directly and into t2 through the iso.
                let left_emb: Vec<u32> =
                    keep1.iter().copied().collect::<Vec<_>>();
                let right_emb: Vec<u32> = iso
                    .iter()
                    .map(|&q| keep2.iter().copied().collect::<Vec<_>>()[q as usize])
                    .collect();
                let diagram = AmalgamationDiagram::new(
                    z1.clone(),
                    t1.clone(),
                    t2.clone(),
                    left_emb,
                    right_emb,
                )
                .map_err(RingError::Amalgam)?;
                let amalgs = enumerate_amalgamations(&diagram, n, 8)?;
                if amalgs.len() < 2 {
                    continue; // separated pair: trivial identity
                }
                let mut rhs = LinComb::zero();
                for amalg in &amalgs {
                    let covered: BTreeSet<u32> = amalg.from_right.iter().copied().collect();
                    let missing: Vec<u32> = (0..amalg.total.leaf_count())
                        .filter(|p| !covered.contains(p))
                        .collect();
                    match missing.as_slice() {
                        [] => rhs.add_term(&[], 1),
                        [p] => {
                            let g = reduce_marked(&MarkedStructure {
                                tree: amalg.total.clone(),
                                marked: *p,
                            })?;
                            rhs.add_term(&[g], 1);
                        }
                        _ => unreachable!("right leg misses exactly the marked leaf"),
                    }
                }
                let lhs = LinComb::generator(*g1);
                let record = RelationRecord {
                    kind: RelationKind::Linear,
                    lhs,
                    rhs,
                    provenance: format!("deletion diagram of {g1} against {g2}"),
                };
                let norm = record.normalized_difference();
                if !norm.is_zero() && seen.insert(norm) {
                    out.push(record);
                }
            }
        }
    }
    Ok(out)
}

/// The eight known generating families of linear relations, instantiated
/// over all admissible color tuples.
pub fn linear_families(n: u8) -> Vec<RelationRecord> {
    let mut out = Vec::new();
    let mut push = |name: String, lhs: LinComb, rhs: LinComb| {
        out.push(RelationRecord { kind: RelationKind::Linear, lhs, rhs, provenance: name });
    };
    // A = 1 + sum_i B(i)
    {
        let mut rhs = LinComb::constant(1);
        for i in 1..=n {
            rhs.add_term(&[Generator::B(i)], 1);
        }
        push("A".into(), LinComb::generator(Generator::A), rhs);
    }
    for i in 1..=n {
        // B(i) = 1 + C(i,i) + D(i,i) + sum_p D(i,p)
        let mut rhs = LinComb::constant(1);
        rhs.add_term(&[Generator::C(i, i)], 1);
        rhs.add_term(&[Generator::D(i, i)], 1);
        for p in 1..=n {
            rhs.add_term(&[Generator::D(i, p)], 1);
        }
        push(format!("B({i}) self"), LinComb::generator(Generator::B(i)), rhs);
        // 0 = 1 + sum_p D(i,p) + E(i,i,i)
        let mut rhs = LinComb::constant(1);
        for p in 1..=n {
            rhs.add_term(&[Generator::D(i, p)], 1);
        }
        rhs.add_term(&[Generator::E(i, i, i)], 1);
        push(format!("E({i},{i},{i})"), LinComb::zero(), rhs);
    }
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            // B(i) = C(i,j) + D(j,i)
            let mut rhs = LinComb::generator(Generator::C(i, j));
            rhs.add_term(&[Generator::D(j, i)], 1);
            push(format!("B({i}) vs {j}"), LinComb::generator(Generator::B(i)), rhs);
            // C(i,i) = C(i,j) + E(j,i,i)
            let mut rhs = LinComb::generator(Generator::C(i, j));
            rhs.add_term(&[Generator::E(j, i, i)], 1);
            push(format!("C({i},{i}) vs {j}"), LinComb::generator(Generator::C(i, i)), rhs);
            // D(i,i) = D(j,i) + E(i,i,j)
            let mut rhs = LinComb::generator(Generator::D(j, i));
            rhs.add_term(&[Generator::E(i, i, j)], 1);
            push(format!("D({i},{i}) vs {j}"), LinComb::generator(Generator::D(i, i)), rhs);
            // E(i,j,i) = 0
            push(
                format!("E({i},{j},{i})"),
                LinComb::generator(Generator::E(i, j, i)),
                LinComb::zero(),
            );
            for k in 1..=n {
                if k == i || k == j {
                    continue;
                }
                // C(i,j) = C(i,k) + E(k,i,j)
                let mut rhs = LinComb::generator(Generator::C(i, k));
                rhs.add_term(&[Generator::E(k, i, j)], 1);
                push(
                    format!("C({i},{j}) vs {k}"),
                    LinComb::generator(Generator::C(i, j)),
                    rhs,
                );
            }
        }
    }
    out
}

/// Integer row space of a set of degree-<=1 relations, as the Hermite
/// normal form over the monomial basis (constant first, then generators).
pub fn linear_span_hnf(records: &[RelationRecord], n: u8) -> Vec<Vec<i64>> {
    let mut basis: Vec<Vec<Generator>> = vec![vec![]];
    basis.extend(Generator::all(n).into_iter().map(|g| vec![g]));
    let index: BTreeMap<Vec<Generator>, usize> =
        basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for r in records {
        let mut row = vec![0i64; basis.len()];
        for (m, c) in r.normalized_difference().terms() {
            row[index[m]] += c;
        }
        if row.iter().any(|&c| c != 0) {
            rows.push(row);
        }
    }
    hermite_normal_form(rows)
}

/// Row-style Hermite normal form over the integers (positive pivots, entries
/// above each pivot reduced).
fn hermite_normal_form(mut rows: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    if rows.is_empty() {
        return rows;
    }
    let cols = rows[0].len();
    let mut pivot_row = 0;
    for col in 0..cols {
        // Euclidean elimination in this column below pivot_row.
        loop {
            let mut best: Option<usize> = None;
            for (r, row) in rows.iter().enumerate().skip(pivot_row) {
                if row[col] != 0
                    && best.is_none_or(|b| row[col].abs() < rows[b][col].abs())
                {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            rows.swap(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..rows.len() {
                if rows[r][col] != 0 {
                    let q = rows[r][col] / rows[pivot_row][col];
                    for c in 0..cols {
                        rows[r][c] -= q * rows[pivot_row][c];
                    }
                    if rows[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < rows.len() && rows[pivot_row][col] != 0 {
            if rows[pivot_row][col] < 0 {
                for c in 0..cols {
                    rows[pivot_row][c] = -rows[pivot_row][c];
                }
            }
            // Reduce entries above the pivot.
            for r in 0..pivot_row {
                let q = rows[r][col].div_euclid(rows[pivot_row][col]);
                if q != 0 {
                    for c in 0..cols {
                        rows[r][c] -= q * rows[pivot_row][c];
                    }
                }
            }
            pivot_row += 1;
        }
    }
    rows.truncate(pivot_row);
    rows
}

/// True when the derived linear relations and the known families generate
/// the same integer span of degree-<=1 combinations.
pub fn linear_relations_match_families(n: u8) -> Result<bool, RingError> {
    let derived = derive_linear_relations(n)?;
    let families = linear_families(n);
    Ok(linear_span_hnf(&derived, n) == linear_span_hnf(&families, n))
}

/// One evaluated relation instance in a verification report.
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub colors: Vec<u8>,
    pub lhs: Dyadic,
    pub rhs: Dyadic,
    pub pass: bool,
}

/// Evaluates the four quadratic families and the reduced constraints for a
/// measure, reporting every instance.
pub fn verify_quadratic_relations(n: u8, mu: &Measure) -> Vec<RelationCheck> {
    assert_eq!(n, mu.n());
    let g = |gen: Generator| mu.generator_value(&gen);
    let mut out = Vec::new();
    let mut check = |relation: &str, colors: Vec<u8>, lhs: Dyadic, rhs: Dyadic| {
        out.push(RelationCheck { relation: relation.into(), colors, pass: lhs == rhs, lhs, rhs });
    };
    use Generator::{B, C, D, E};
    for i in 1..=n {
        for j in 1..=n {
            check(
                "C(i,j)B(j) = D(i,j)B(i)",
                vec![i, j],
                &g(C(i, j)) * &g(B(j)),
                &g(D(i, j)) * &g(B(i)),
            );
            for k in 1..=n {
                check(
                    "C(i,j)C(j,k) = E(i,j,k)C(i,k)",
                    vec![i, j, k],
                    &g(C(i, j)) * &g(C(j, k)),
                    &g(E(i, j, k)) * &g(C(i, k)),
                );
                check(
                    "D(j,k)D(i,j) = E(i,j,k)D(i,k)",
                    vec![i, j, k],
                    &g(D(j, k)) * &g(D(i, j)),
                    &g(E(i, j, k)) * &g(D(i, k)),
                );
                for l in 1..=n {
                    check(
                        "E(i,j,k)E(i,k,l) = E(j,k,l)E(i,j,l)",
                        vec![i, j, k, l],
                        &g(E(i, j, k)) * &g(E(i, k, l)),
                        &g(E(j, k, l)) * &g(E(i, j, l)),
                    );
                }
            }
        }
    }
    // Reduced constraints with S(i) = B(i) + C(i,i) - D(i,i).
    for i in 1..=n {
        let s = mu.s_value(i);
        check(
            "S(i) = B(i) + C(i,i) - D(i,i)",
            vec![i],
            s.clone(),
            &(&g(B(i)) + &g(C(i, i))) - &g(D(i, i)),
        );
        check("B(i)(B(i)-S(i)) = 0", vec![i], &g(B(i)) * &(&g(B(i)) - &s), Dyadic::zero());
        check(
            "C(i,i)(C(i,i)-S(i)) = 0",
            vec![i],
            &g(C(i, i)) * &(&g(C(i, i)) - &s),
            Dyadic::zero(),
        );
        for j in 1..=n {
            if i == j {
                continue;
            }
            check(
                "C(i,j)C(j,i) = 0",
                vec![i, j],
                &g(C(i, j)) * &g(C(j, i)),
                Dyadic::zero(),
            );
            check(
                "C(i,j)(C(i,j)-S(i)) = 0",
                vec![i, j],
                &g(C(i, j)) * &(&g(C(i, j)) - &s),
                Dyadic::zero(),
            );
            check(
                "C(i,j)B(j) = (B(j)-C(j,i))B(i)",
                vec![i, j],
                &g(C(i, j)) * &g(B(j)),
                &(&g(B(j)) - &g(C(j, i))) * &g(B(i)),
            );
            for k in 1..=n {
                if k == i || k == j {
                    continue;
                }
                check(
                    "C(i,j)C(j,k) = (C(j,k)-C(j,i))C(i,k)",
                    vec![i, j, k],
                    &g(C(i, j)) * &g(C(j, k)),
                    &(&g(C(j, k)) - &g(C(j, i))) * &g(C(i, k)),
                );
            }
        }
    }
    out
}

/// Every linear-family instance evaluated under a measure.
pub fn verify_linear_relations(n: u8, mu: &Measure) -> Vec<RelationCheck> {
    linear_families(n)
        .iter()
        .map(|rec| {
            let lhs = rec.lhs.evaluate(mu);
            let rhs = rec.rhs.evaluate(mu);
            RelationCheck {
                relation: rec.provenance.clone(),
                colors: Vec::new(),
                pass: lhs == rhs,
                lhs,
                rhs,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::are_separated;

    fn t(text: &str, n: u8) -> ColoredTree {
        ColoredTree::parse(text, n).unwrap()
    }

    #[test]
    fn reduce_basic_shapes() {
        let one = MarkedStructure { tree: t("*", 1), marked: 0 };
        assert_eq!(reduce_marked(&one).unwrap(), Generator::A);

        // Balanced 4-leaf tree with a top leaf marked reduces to D(4,5).
        let balanced = t("(4 (5 * *) (5 * *))", 5);
        for mark in 0..4 {
            assert_eq!(
                reduce_marked(&MarkedStructure { tree: balanced.clone(), marked: mark }).unwrap(),
                Generator::D(4, 5)
            );
        }

        // Middle leaf of the 4-leaf caterpillar is E(i,j,k).
        let cat = t("(1 * (2 * (3 * *)))", 3);
        assert_eq!(
            reduce_marked(&MarkedStructure { tree: cat.clone(), marked: 1 }).unwrap(),
            Generator::E(1, 2, 3)
        );
        assert_eq!(
            reduce_marked(&MarkedStructure { tree: cat.clone(), marked: 0 }).unwrap(),
            Generator::C(1, 2)
        );
        assert_eq!(
            reduce_marked(&MarkedStructure { tree: cat, marked: 3 }).unwrap(),
            Generator::D(2, 3)
        );
    }

    #[test]
    fn reduction_is_order_independent() {
        // Exhaustive over small trees: reduce via the default order and via
        // the reversed deletion order; compare.
        fn reduce_reversed(tree: &ColoredTree, mark: u32) -> Generator {
            let mut tree = tree.clone();
            let mut mark = mark;
            loop {
                let count = tree.leaf_count();
                let victim =
                    (0..count).rev().find(|&b| b != mark && are_separated(&tree, mark, b));
                match victim {
                    Some(b) => {
                        let keep: BTreeSet<u32> = (0..count).filter(|&p| p != b).collect();
                        tree = tree.restrict(&keep).unwrap();
                        if b < mark {
                            mark -= 1;
                        }
                    }
                    None => break,
                }
            }
            classify_irreducible(&tree, mark)
        }
        for n in 1..=2u8 {
            for m in 1..=6u32 {
                let (trees, _) = crate::tree::enumerate_structures(n, m);
                for tree in trees {
                    for mark in 0..m {
                        let a = reduce_marked(&MarkedStructure { tree: tree.clone(), marked: mark })
                            .unwrap();
                        let b = reduce_reversed(&tree, mark);
                        assert_eq!(a, b, "{tree} mark {mark}");
                    }
                }
            }
        }
    }

    #[test]
    fn extension_chain_of_the_empty_embedding_ends_in_a() {
        let tree = t("(1 * (2 * *))", 2);
        let chain = extension_chain(&ColoredTree::empty(), &tree, &[]).unwrap();
        assert_eq!(chain.len(), 3);
        assert_eq!(*chain.last().unwrap(), Generator::A);
    }

    #[test]
    fn derived_linear_relations_span_the_families() {
        for n in 1..=2u8 {
            assert!(linear_relations_match_families(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn n1_relations_reduce_to_three() {
        let families = linear_families(1);
        let set: BTreeSet<LinComb> =
            families.iter().map(|r| r.normalized_difference()).collect();
        // A = 1 + B; B = 1 + C + 2D; 0 = 1 + D + E.
        assert_eq!(set.len(), 3);
        let mut b_rel = LinComb::generator(Generator::B(1));
        b_rel.add_term(&[], -1);
        b_rel.add_term(&[Generator::C(1, 1)], -1);
        b_rel.add_term(&[Generator::D(1, 1)], -2);
        assert!(set.contains(&b_rel.normalized()));
    }
}
