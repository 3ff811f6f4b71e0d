//! Measures: solved from n-codes, evaluated on structures and embeddings.
//!
//! A code fixes which of B(i), C(i,i), C(i,j) equal S(i) and which vanish;
//! the S(i) then solve the integer linear system D s = 1 whose matrix has
//!
//!   d_ii = 2 - 3 chi(i,i) - beta(i),    d_ij = chi(j,i) - beta(j)  (i != j).
//!
//! det(D) is always plus or minus a power of two, so the solution lands in
//! Z[1/2]; a non-dyadic determinant would mean an implementation bug and is
//! treated as a hard internal error.


use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::ncode::{LabeledDirectedTree, NCode, NCodeError};
use crate::ring::{extension_chain, Generator, RingError};
use crate::tree::ColoredTree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error(transparent)]
    Code(#[from] NCodeError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("tree uses color {color} but the measure has n = {n}")]
    ColorOutOfRange { color: u8, n: u8 },
    #[error("stored values disagree with the code's solution")]
    InconsistentSerialization,
    #[error("the measure is regular; no vanishing extension exists")]
    RegularMeasure,
}

/// A measure, determined by its n-code / labeled directed tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Measure {
    n: u8,
    code: NCode,
    tree: LabeledDirectedTree,
    s: Vec<Dyadic>,
    b: Vec<Dyadic>,
    c: Vec<Vec<Dyadic>>,
    /// All generator values, indexed by `generator_index`.
    table: Vec<Dyadic>,
}

/// Dense index of generator symbols for a fixed color count.
fn generator_index(g: &Generator, n: usize) -> usize {
    match *g {
        Generator::A => 0,
        Generator::B(i) => i as usize,
        Generator::C(i, j) => n + (i as usize - 1) * n + j as usize,
        Generator::D(i, j) => n + n * n + (i as usize - 1) * n + j as usize,
        Generator::E(i, j, k) => {
            n + 2 * n * n
                + ((i as usize - 1) * n + (j as usize - 1)) * n
                + k as usize
        }
    }
}

impl Measure {
    /// Solves the linear system attached to a code.
    pub fn from_code(code: &NCode) -> Result<Self, MeasureError> {
        let tree = LabeledDirectedTree::from_ncode(code)?;
        let n = code.n() as usize;
        let d = build_d_matrix(code);
        let det = det_i128(d.clone());
        assert!(
            det != 0 && (det.unsigned_abs()).is_power_of_two(),
            "det(D) = {det} is not plus or minus a power of two; this is a bug"
        );
        let log2 = det.unsigned_abs().trailing_zeros() as i64;
        let sign = det.signum();
        let s: Vec<Dyadic> = (0..n)
            .map(|col| {
                let mut m = d.clone();
                for row in m.iter_mut() {
                    row[col] = 1;
                }
                let det_col = det_i128(m);
                Dyadic::new(BigInt::from(det_col * sign), -log2)
            })
            .collect();
        let b: Vec<Dyadic> = (0..n)
            .map(|i| if code.beta(i as u8 + 1) { s[i].clone() } else { Dyadic::zero() })
            .collect();
        let c: Vec<Vec<Dyadic>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if code.chi(i as u8 + 1, j as u8 + 1) {
                            s[i].clone()
                        } else {
                            Dyadic::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut mu =
            Measure { n: code.n(), code: code.clone(), tree, s, b, c, table: Vec::new() };
        mu.table = Generator::all(mu.n).iter().map(|g| mu.compute_generator(g)).collect();
        debug_assert!(Generator::all(mu.n)
            .iter()
            .enumerate()
            .all(|(k, g)| generator_index(g, n) == k));
        Ok(mu)
    }

    pub fn from_tree(tree: &LabeledDirectedTree) -> Result<Self, MeasureError> {
        Measure::from_code(&tree.ncode())
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn code(&self) -> &NCode {
        &self.code
    }

    pub fn tree(&self) -> &LabeledDirectedTree {
        &self.tree
    }

    /// Stable identity used for ordering and golden files.
    pub fn key(&self) -> String {
        self.tree.canonical_text()
    }

    pub fn s_value(&self, i: u8) -> Dyadic {
        self.s[i as usize - 1].clone()
    }

    pub fn b_value(&self, i: u8) -> Dyadic {
        self.b[i as usize - 1].clone()
    }

    pub fn c_value(&self, i: u8, j: u8) -> Dyadic {
        self.c[i as usize - 1][j as usize - 1].clone()
    }

    /// Value of a generator class (precomputed at construction).
    pub fn generator_value(&self, g: &Generator) -> Dyadic {
        self.table[generator_index(g, self.n as usize)].clone()
    }

    /// B and C are stored; A, D, E are derived through the linear relations.
    fn compute_generator(&self, g: &Generator) -> Dyadic {
        match *g {
            Generator::A => {
                let mut a = Dyadic::one();
                for b in &self.b {
                    a += b;
                }
                a
            }
            Generator::B(i) => self.b_value(i),
            Generator::C(i, j) => self.c_value(i, j),
            Generator::D(x, y) => {
                if x != y {
                    &self.b_value(y) - &self.c_value(y, x)
                } else {
                    // 2 D(i,i) = B(i) - 1 - C(i,i) - sum_{p != i} D(i,p)
                    let i = x;
                    let mut v = &self.b_value(i) - &Dyadic::one();
                    v = &v - &self.c_value(i, i);
                    for p in 1..=self.n {
                        if p != i {
                            v = &v - &self.compute_generator(&Generator::D(i, p));
                        }
                    }
                    v.half()
                }
            }
            Generator::E(x, y, z) => {
                if x == z {
                    if x == y {
                        // E(i,i,i) = -1 - sum_p D(i,p)
                        let mut v = -Dyadic::one();
                        for p in 1..=self.n {
                            v = &v - &self.compute_generator(&Generator::D(x, p));
                        }
                        v
                    } else {
                        Dyadic::zero()
                    }
                } else if y == z {
                    // E(j,i,i) = C(i,i) - C(i,j)
                    &self.c_value(y, y) - &self.c_value(y, x)
                } else if x == y {
                    // E(i,i,j) = D(i,i) - D(j,i)
                    &self.compute_generator(&Generator::D(x, x))
                        - &self.compute_generator(&Generator::D(z, x))
                } else {
                    // E(k,i,j) = C(i,j) - C(i,k)
                    &self.c_value(y, z) - &self.c_value(y, x)
                }
            }
        }
    }

    /// Nonzero on every embedding?
    pub fn is_regular(&self) -> bool {
        Generator::all(self.n).iter().all(|g| !self.generator_value(g).is_zero())
    }

    /// The measure of a structure (of the embedding from the empty one).
    pub fn evaluate(&self, t: &ColoredTree) -> Result<Dyadic, MeasureError> {
        self.check_colors(t)?;
        let chain = extension_chain(&ColoredTree::empty(), t, &[])?;
        Ok(self.chain_product(&chain))
    }

    /// The measure of an embedding, as the product of generator values over
    /// any one-point-extension chain completing it.
    pub fn evaluate_embedding(
        &self,
        sub: &ColoredTree,
        sup: &ColoredTree,
        map: &[u32],
    ) -> Result<Dyadic, MeasureError> {
        self.check_colors(sup)?;
        let chain = extension_chain(sub, sup, map)?;
        Ok(self.chain_product(&chain))
    }

    pub fn chain_product(&self, chain: &[Generator]) -> Dyadic {
        let mut v = Dyadic::one();
        for g in chain {
            v = &v * &self.generator_value(g);
        }
        v
    }

    fn check_colors(&self, t: &ColoredTree) -> Result<(), MeasureError> {
        let c = t.max_color();
        if c > self.n {
            return Err(MeasureError::ColorOutOfRange { color: c, n: self.n });
        }
        Ok(())
    }

    /// Searches extensions of `base` by up to `added_leaves` leaves for one
    /// whose embedding has measure zero. Regular measures are rejected.
    pub fn quasi_regularity_witness(
        &self,
        base: &ColoredTree,
        added_leaves: u32,
    ) -> Result<Option<ColoredTree>, MeasureError> {
        if self.is_regular() {
            return Err(MeasureError::RegularMeasure);
        }
        self.check_colors(base)?;
        let identity: Vec<u32> = (0..base.leaf_count()).collect();
        let mut level: Vec<(ColoredTree, Vec<u32>)> = vec![(base.clone(), identity)];
        for _ in 0..added_leaves {
            let mut next = Vec::new();
            for (t, map) in &level {
                for (ext, pos_map) in t.one_point_extensions(self.n) {
                    let new_map: Vec<u32> = map.iter().map(|&p| pos_map[p as usize]).collect();
                    if self.evaluate_embedding(base, &ext, &new_map)?.is_zero() {
                        return Ok(Some(ext));
                    }
                    next.push((ext, new_map));
                }
            }
            level = next;
        }
        Ok(None)
    }
}

fn build_d_matrix(code: &NCode) -> Vec<Vec<i128>> {
    let n = code.n() as usize;
    let v = |b: bool| b as i128;
    (1..=n as u8)
        .map(|i| {
            (1..=n as u8)
                .map(|j| {
                    if i == j {
                        2 - 3 * v(code.chi(i, i)) - v(code.beta(i))
                    } else {
                        v(code.chi(j, i)) - v(code.beta(j))
                    }
                })
                .collect()
        })
        .collect()
}

/// The integer matrix D s = 1 attached to a code (row i, column j).
pub fn d_matrix(code: &NCode) -> Vec<Vec<i64>> {
    build_d_matrix(code).into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect()
}

/// Fraction-free (Bareiss) determinant.
fn det_i128(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let swap = (k + 1..n).find(|&r| m[r][k] != 0);
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// True when the determinant of the code's D matrix is plus or minus a
/// power of two (checked explicitly by the verification suites).
pub fn det_is_pm_power_of_two(code: &NCode) -> bool {
    let det = det_i128(build_d_matrix(code));
    det != 0 && det.unsigned_abs().is_power_of_two()
}

/// All (2n+2)^n measures, ordered by the canonical text of their labeled
/// directed trees.
pub fn enumerate_measures(n: u8) -> Vec<Measure> {
    let mut out: Vec<Measure> = NCode::enumerate(n)
        .iter()
        .map(|code| Measure::from_code(code).expect("enumerated codes are valid"))
        .collect();
    out.sort_by_key(|m| m.key());
    out
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    n: u8,
    tree: LabeledDirectedTree,
    beta: Vec<u8>,
    chi: Vec<Vec<u8>>,
    #[serde(rename = "S")]
    s: Vec<Dyadic>,
    #[serde(rename = "B")]
    b: Vec<Dyadic>,
    #[serde(rename = "C")]
    c: Vec<Vec<Dyadic>>,
}

impl Serialize for Measure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = MeasureRepr {
            n: self.n,
            tree: self.tree.clone(),
            beta: self.code.beta_row().iter().map(|&b| b as u8).collect(),
            chi: self
                .code
                .chi_table()
                .iter()
                .map(|row| row.iter().map(|&b| b as u8).collect())
                .collect(),
            s: self.s.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(deserializer)?;
        let measure = Measure::from_tree(&repr.tree).map_err(D::Error::custom)?;
        let beta: Vec<u8> = measure.code.beta_row().iter().map(|&b| b as u8).collect();
        let chi: Vec<Vec<u8>> = measure
            .code
            .chi_table()
            .iter()
            .map(|row| row.iter().map(|&b| b as u8).collect())
            .collect();
        if repr.n != measure.n
            || repr.beta != beta
            || repr.chi != chi
            || repr.s != measure.s
            || repr.b != measure.b
            || repr.c != measure.c
        {
            return Err(D::Error::custom(MeasureError::InconsistentSerialization));
        }
        Ok(measure)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::ncode::example_tree_n8;

    fn t(text: &str, n: u8) -> ColoredTree {
        ColoredTree::parse(text, n).unwrap()
    }

    #[test]
    fn the_four_one_color_measures() {
        let measures = enumerate_measures(1);
        assert_eq!(measures.len(), 4);
        let mut triples: BTreeSet<(String, String, String)> = BTreeSet::new();
        for m in &measures {
            triples.insert((
                m.b_value(1).to_string(),
                m.c_value(1, 1).to_string(),
                m.s_value(1).to_string(),
            ));
        }
        let expect: BTreeSet<(String, String, String)> = [
            ("0", "0", "1/2"),
            ("0", "-1", "-1"),
            ("1", "0", "1"),
            ("-1/2", "-1/2", "-1/2"),
        ]
        .iter()
        .map(|&(a, b, c)| (a.into(), b.into(), c.into()))
        .collect();
        assert_eq!(triples, expect);
        // Exactly one is regular: (B, C) = (-1/2, -1/2).
        let regular: Vec<&Measure> = measures.iter().filter(|m| m.is_regular()).collect();
        assert_eq!(regular.len(), 1);
        assert_eq!(regular[0].b_value(1).to_string(), "-1/2");
        assert_eq!(regular[0].generator_value(&Generator::D(1, 1)).to_string(), "-1/2");
        assert_eq!(regular[0].generator_value(&Generator::E(1, 1, 1)).to_string(), "-1/2");
        assert_eq!(regular[0].generator_value(&Generator::A).to_string(), "1/2");
    }

    #[test]
    fn measure_counts() {
        assert_eq!(enumerate_measures(2).len(), 36);
        assert_eq!(enumerate_measures(3).len(), 512);
    }

    #[test]
    fn eight_color_example_solution() {
        let mu = Measure::from_tree(&example_tree_n8()).unwrap();
        let s: Vec<String> = (1..=8).map(|i| mu.s_value(i).to_string()).collect();
        assert_eq!(s, ["-8", "4", "-4", "2", "1", "2", "-2", "1"]);
        assert_eq!(mu.generator_value(&Generator::A).to_string(), "4");
        // The two worked evaluations.
        let zero_tree = t("(2 * (1 * (3 * *)))", 8);
        assert!(mu.evaluate(&zero_tree).unwrap().is_zero());
        let eight_tree = t("(4 (5 * *) (5 * *))", 8);
        assert_eq!(mu.evaluate(&eight_tree).unwrap().to_string(), "8");
    }

    #[test]
    fn eight_color_example_d_matrix() {
        let code = example_tree_n8().ncode();
        let expect: [[i64; 8]; 8] = [
            [-1, 0, 1, -1, -1, 0, 0, 0],
            [0, 2, 1, -1, -1, 0, 0, 0],
            [0, 0, -1, -1, -1, 0, 0, 0],
            [0, 0, 0, 1, -1, 0, 0, 0],
            [0, 0, 0, 0, 1, 0, 0, 0],
            [0, 0, 0, -1, -1, 2, 0, 0],
            [0, 0, 0, -1, -1, 1, -1, 0],
            [0, 0, 0, -1, -1, 1, 0, 2],
        ];
        let got = d_matrix(&code);
        for i in 0..8 {
            assert_eq!(got[i], expect[i], "row {}", i + 1);
        }
    }

    #[test]
    fn empty_structure_has_measure_one() {
        let mu = &enumerate_measures(1)[0];
        assert_eq!(mu.evaluate(&ColoredTree::empty()).unwrap(), Dyadic::one());
    }

    #[test]
    fn embedding_evaluation() {
        let measures = enumerate_measures(1);
        let regular = measures.iter().find(|m| m.is_regular()).unwrap();
        // Identity embedding.
        let k = t("(1 * *)", 1);
        assert_eq!(regular.evaluate_embedding(&k, &k, &[0, 1]).unwrap(), Dyadic::one());
        // Point into the cherry = B(1) = -1/2.
        assert_eq!(
            regular.evaluate_embedding(&t("*", 1), &k, &[0]).unwrap().to_string(),
            "-1/2"
        );
        // Empty into anything = the measure of the structure.
        assert_eq!(
            regular.evaluate_embedding(&ColoredTree::empty(), &k, &[]).unwrap(),
            regular.evaluate(&k).unwrap()
        );
    }

    #[test]
    fn quasi_regularity_witness_for_b_zero() {
        let measures = enumerate_measures(1);
        let zero_b = measures
            .iter()
            .find(|m| m.b_value(1).is_zero() && m.c_value(1, 1).is_zero())
            .unwrap();
        let witness = zero_b.quasi_regularity_witness(&t("*", 1), 2).unwrap().unwrap();
        assert_eq!(witness.canonicalize().to_text(), "(1 * *)");
        // The regular measure is rejected.
        let regular = measures.iter().find(|m| m.is_regular()).unwrap();
        assert_eq!(
            regular.quasi_regularity_witness(&t("*", 1), 2).unwrap_err(),
            MeasureError::RegularMeasure
        );
    }

    #[test]
    fn serde_round_trip_and_tamper_detection() {
        let mu = &enumerate_measures(2)[7];
        let json = serde_json::to_string(mu).unwrap();
        let back: Measure = serde_json::from_str(&json).unwrap();
        assert_eq!(&back, mu);
        // Tampering with a stored value is caught.
        let bad = json.replace("\"S\":[{\"m\":\"", "\"S\":[{\"m\":\"9");
        assert!(serde_json::from_str::<Measure>(&bad).is_err());
    }

    #[test]
    fn dets_are_pm_powers_of_two() {
        for n in 1..=3u8 {
            for code in NCode::enumerate(n) {
                assert!(det_is_pm_power_of_two(&code));
            }
        }
    }
}
