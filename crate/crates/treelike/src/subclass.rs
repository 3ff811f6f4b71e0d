//! Subclasses closed under isomorphism, substructure, and amalgamation,
//! and the regular measures induced on supports.
//!
//! A subclass containing three-leaf trees is determined by which X_{i,j}
//! (root color i, upper node color j) it contains, recorded in the table
//! eps(i,j), together with the set of colors that appear at all. The table
//! obeys three closure rules for pairwise distinct appearing colors:
//! transitivity of eps, both-directions forcing the diagonals, and no pair
//! of appearing colors with both directions missing.

use std::collections::BTreeSet;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::measure::{Measure, MeasureError};
use crate::ncode::NCode;
use crate::tree::ColoredTree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubclassError {
    #[error("eps table violates closure rule: {0}")]
    Closure(&'static str),
    #[error("tree is not a member of the subclass")]
    NotAMember,
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// A subclass recorded by its appearing colors and three-leaf table.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Subclass {
    n: u8,
    appearing: Vec<bool>,
    eps: Vec<Vec<bool>>,
}

impl Subclass {
    pub fn new(n: u8, appearing: Vec<bool>, eps: Vec<Vec<bool>>) -> Result<Self, SubclassError> {
        assert_eq!(appearing.len(), n as usize);
        assert!(eps.len() == n as usize && eps.iter().all(|r| r.len() == n as usize));
        let s = Subclass { n, appearing, eps };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), SubclassError> {
        let n = self.n;
        for i in 1..=n {
            for j in 1..=n {
                if self.eps(i, j) && !(self.appears(i) && self.appears(j)) {
                    return Err(SubclassError::Closure("eps between non-appearing colors"));
                }
            }
        }
        for i in 1..=n {
            for j in 1..=n {
                if i == j || !self.appears(i) || !self.appears(j) {
                    continue;
                }
                if !self.eps(i, j) && !self.eps(j, i) {
                    return Err(SubclassError::Closure(
                        "appearing colors need a three-leaf tree in one order",
                    ));
                }
                if self.eps(i, j) && self.eps(j, i) && !(self.eps(i, i) && self.eps(j, j)) {
                    return Err(SubclassError::Closure(
                        "both orders force both diagonal trees",
                    ));
                }
                for k in 1..=n {
                    if k != i && k != j && self.eps(i, j) && self.eps(j, k) && !self.eps(i, k) {
                        return Err(SubclassError::Closure("eps is not transitive"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn appears(&self, i: u8) -> bool {
        self.appearing[i as usize - 1]
    }

    pub fn eps(&self, i: u8, j: u8) -> bool {
        self.eps[i as usize - 1][j as usize - 1]
    }

    pub fn appearing_colors(&self) -> Vec<u8> {
        (1..=self.n).filter(|&i| self.appears(i)).collect()
    }

    /// Finite subclasses are exactly those with no repeatable color.
    pub fn is_finite(&self) -> bool {
        (1..=self.n).all(|i| !self.eps(i, i))
    }

    /// Membership: trees with at most two leaves only need their colors to
    /// appear; larger trees need every three-leaf restriction in the table.
    pub fn is_member(&self, t: &ColoredTree) -> bool {
        if t.max_color() > self.n {
            return false;
        }
        let m = t.leaf_count();
        if m <= 1 {
            return true;
        }
        if (1..=self.n).any(|c| {
            !self.appears(c) && t.color_counts(self.n)[c as usize - 1] > 0
        }) {
            return false;
        }
        if m == 2 {
            return true;
        }
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    let sub = t.restrict(&[a, b, c].into_iter().collect()).unwrap();
                    let flat = sub.flatten();
                    let mut colors: Vec<(u32, u8)> = (0..flat.parent.len())
                        .filter_map(|v| flat.color[v].map(|col| (flat.depth[v], col.get())))
                        .collect();
                    colors.sort();
                    let (i, j) = (colors[0].1, colors[1].1);
                    if !self.eps(i, j) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The table names used for two colors, plus the one- and zero-color
    /// degenerate cases.
    pub fn table_name(&self) -> Option<String> {
        let app = self.appearing_colors();
        if app.is_empty() {
            return Some("T<=1".to_string());
        }
        if (1..=self.n).all(|i| (1..=self.n).all(|j| !self.eps(i, j))) {
            return Some("T<=2".to_string());
        }
        if app.len() == 1 {
            let k = app[0];
            return self.eps(k, k).then(|| "dT3(1)".to_string());
        }
        if app.len() == 2 {
            let (a, b) = (app[0], app[1]);
            let pattern =
                (self.eps(a, b), self.eps(b, a), self.eps(a, a), self.eps(b, b));
            let name = match pattern {
                (true, false, true, false) => "nt-1",
                (true, false, false, true) => "nr-2",
                (true, false, true, true) => "ord",
                (false, true, false, true) => "nt-2",
                (false, true, true, false) => "nr-1",
                (false, true, true, true) => "rev",
                (true, true, true, true) => "dT3(2)",
                _ => return None,
            };
            return Some(name.to_string());
        }
        if app.len() == self.n as usize
            && (1..=self.n).all(|i| (1..=self.n).all(|j| self.eps(i, j)))
        {
            return Some(format!("dT3({})", self.n));
        }
        None
    }
}

impl Serialize for Subclass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Subclass", 4)?;
        s.serialize_field("n", &self.n)?;
        let eps: Vec<Vec<u8>> =
            self.eps.iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect();
        s.serialize_field("epsilon", &eps)?;
        let appearing: Vec<u8> = self.appearing.iter().map(|&b| b as u8).collect();
        s.serialize_field("appearing", &appearing)?;
        s.serialize_field("name", &self.table_name())?;
        s.end()
    }
}

/// All subclasses in which every one of the n colors appears; their number
/// satisfies the recurrence checked by `f_recurrence`.
pub fn enumerate_subclasses(n: u8) -> Vec<Subclass> {
    assert!(n >= 1);
    let pairs: Vec<(u8, u8)> =
        (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    // Off-diagonal choices per unordered pair: (1,0), (0,1), (1,1).
    let mut choice = vec![0u8; pairs.len()];
    loop {
        let mut eps = vec![vec![false; n as usize]; n as usize];
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            let (ij, ji) = match choice[idx] {
                0 => (true, false),
                1 => (false, true),
                _ => (true, true),
            };
            eps[i as usize - 1][j as usize - 1] = ij;
            eps[j as usize - 1][i as usize - 1] = ji;
        }
        let transitive = (1..=n).all(|i| {
            (1..=n).all(|j| {
                (1..=n).all(|k| {
                    i == j
                        || j == k
                        || i == k
                        || !(eps[i as usize - 1][j as usize - 1]
                            && eps[j as usize - 1][k as usize - 1])
                        || eps[i as usize - 1][k as usize - 1]
                })
            })
        });
        if transitive {
            // Diagonals: forced to 1 where both directions are present.
            let forced: Vec<bool> = (1..=n)
                .map(|i| {
                    (1..=n).any(|j| {
                        j != i
                            && eps[i as usize - 1][j as usize - 1]
                            && eps[j as usize - 1][i as usize - 1]
                    })
                })
                .collect();
            let free: Vec<usize> =
                (0..n as usize).filter(|&i| !forced[i]).collect();
            for mask in 0u32..1 << free.len() {
                let mut eps2 = eps.clone();
                for (bit, &i) in free.iter().enumerate() {
                    eps2[i][i] = mask >> bit & 1 == 1;
                }
                for (i, &f) in forced.iter().enumerate() {
                    if f {
                        eps2[i][i] = true;
                    }
                }
                out.push(
                    Subclass::new(n, vec![true; n as usize], eps2)
                        .expect("construction satisfies the closure rules"),
                );
            }
        }
        // Next choice vector.
        let mut k = 0;
        loop {
            if k == choice.len() {
                out.sort();
                return out;
            }
            choice[k] += 1;
            if choice[k] < 3 {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// f(n) = n f(n-1) + sum_{m=0}^{n-1} C(n,m) f(m), f(0) = 1, f(1) = 2.
pub fn f_recurrence(n: u32) -> u128 {
    let mut f: Vec<u128> = vec![1, 2];
    for k in 2..=n as usize {
        let mut v = k as u128 * f[k - 1];
        for m in 0..k {
            v += binomial(k as u128, m as u128) * f[m];
        }
        f.push(v);
    }
    f[n as usize]
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut r = 1u128;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// The support of a measure: colors with nonzero B, three-leaf trees with
/// nonzero measure.
pub fn support_of(mu: &Measure) -> Subclass {
    let n = mu.n();
    let appearing: Vec<bool> = (1..=n).map(|i| !mu.b_value(i).is_zero()).collect();
    let mut eps = vec![vec![false; n as usize]; n as usize];
    for i in 1..=n {
        for j in 1..=n {
            let text = format!("({i} * ({j} * *))");
            let x_ij = ColoredTree::parse(&text, n).unwrap();
            eps[i as usize - 1][j as usize - 1] = !mu.evaluate(&x_ij).unwrap().is_zero();
        }
    }
    Subclass::new(n, appearing, eps).expect("supports satisfy the closure rules")
}

/// An induced subclass: a total order on the colors plus the set allowed to
/// repeat along root-leaf paths.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct InducedSubclassSpec {
    pub n: u8,
    /// The colors listed from lowest to highest in the induced order.
    pub order: Vec<u8>,
    pub repeats: BTreeSet<u8>,
}

impl InducedSubclassSpec {
    pub fn new(n: u8, order: Vec<u8>, repeats: BTreeSet<u8>) -> Self {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..=n).collect::<Vec<_>>(), "order must permute 1..=n");
        assert!(repeats.iter().all(|c| (1..=n).contains(c)));
        InducedSubclassSpec { n, order, repeats }
    }

    /// Natural order 1 < 2 < ... < n with the given repeat set.
    pub fn natural(n: u8, repeats: BTreeSet<u8>) -> Self {
        InducedSubclassSpec::new(n, (1..=n).collect(), repeats)
    }

    /// Rank of a color in the order (1-based; rank 1 is the lowest).
    pub fn rank(&self, color: u8) -> u8 {
        self.order.iter().position(|&c| c == color).unwrap() as u8 + 1
    }

    pub fn subclass(&self) -> Subclass {
        let n = self.n;
        let mut eps = vec![vec![false; n as usize]; n as usize];
        for i in 1..=n {
            for j in 1..=n {
                eps[i as usize - 1][j as usize - 1] = if i == j {
                    self.repeats.contains(&i)
                } else {
                    self.rank(i) < self.rank(j)
                };
            }
        }
        Subclass::new(n, vec![true; n as usize], eps)
            .expect("induced specs satisfy the closure rules")
    }

    /// The measure on the whole class whose support is this subclass.
    pub fn extension_measure(&self) -> Measure {
        let n = self.n;
        let beta = vec![true; n as usize];
        let chi: Vec<Vec<bool>> = (1..=n)
            .map(|i| {
                (1..=n)
                    .map(|j| {
                        if i == j {
                            self.repeats.contains(&i)
                        } else {
                            self.rank(i) < self.rank(j)
                        }
                    })
                    .collect()
            })
            .collect();
        let code = NCode::new(n, beta, chi).expect("induced codes satisfy the identities");
        Measure::from_code(&code).expect("induced codes solve")
    }

    /// Closed-form value of the induced regular measure on a member tree.
    pub fn value(&self, t: &ColoredTree) -> Result<Dyadic, SubclassError> {
        if !self.subclass().is_member(t) {
            return Err(SubclassError::NotAMember);
        }
        if t.leaf_count() == 0 {
            return Ok(Dyadic::one());
        }
        // Relabel colors to the natural order and apply the formula.
        let counts = t.color_counts(self.n);
        let mut v = vec![0u32; self.n as usize]; // by rank
        for c in 1..=self.n {
            v[self.rank(c) as usize - 1] = counts[c as usize - 1];
        }
        let repeat_by_rank: Vec<bool> =
            self.order.iter().map(|c| self.repeats.contains(c)).collect();
        let mut total = Dyadic::one();
        let mut below = 0u32; // sum of v over lower ranks
        for i in 0..self.n as usize {
            let p = if repeat_by_rank[i] {
                Dyadic::from_fraction(-1, 1)
            } else {
                Dyadic::one()
            };
            let one_plus_p = &Dyadic::one() + &p;
            for _ in 0..v[i] {
                total = &total * &p;
            }
            for _ in 0..1 + below {
                total = &total * &one_plus_p;
            }
            below += v[i];
        }
        Ok(total)
    }
}

/// All 2^n n! induced subclass specs.
pub fn enumerate_induced(n: u8) -> Vec<InducedSubclassSpec> {
    let mut perms = Vec::new();
    let mut order: Vec<u8> = (1..=n).collect();
    permutations(&mut order, 0, &mut perms);
    let colors: Vec<u8> = (1..=n).collect();
    let mut out = Vec::new();
    for perm in &perms {
        for mask in 0u32..1 << n {
            let repeats: BTreeSet<u8> =
                colors.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &c)| c).collect();
            out.push(InducedSubclassSpec::new(n, perm.clone(), repeats));
        }
    }
    out
}

fn permutations(v: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// One comparison of a measure against the induced regular measure of its
/// support.
#[derive(Clone, Debug, Serialize)]
pub struct RestrictionCheck {
    pub measure: String,
    pub tree: String,
    pub full_value: Dyadic,
    pub induced_value: Dyadic,
    pub pass: bool,
}

/// For every measure with infinite support, compares its values on member
/// trees (up to `max_leaves`) against the closed formula of the support's
/// induced regular measure, after reordering colors to the natural order.
pub fn verify_restriction(n: u8, max_leaves: u32) -> Vec<RestrictionCheck> {
    use crate::measure::enumerate_measures;
    use crate::tree::enumerate_structures;

    let mut out = Vec::new();
    for mu in enumerate_measures(n) {
        let support = support_of(&mu);
        if support.is_finite() {
            continue;
        }
        let spec = spec_of_support(&support);
        let relabel = |t: &ColoredTree| {
            // Map appearing color c to its rank among appearing colors.
            t.map_colors(&|c| spec_rank(&support, &spec, c))
        };
        for m in 0..=max_leaves {
            for t in enumerate_structures(n, m).0 {
                if !support.is_member(&t) {
                    continue;
                }
                let full = mu.evaluate(&t).unwrap();
                let induced = spec.value(&relabel(&t)).unwrap();
                out.push(RestrictionCheck {
                    measure: mu.key(),
                    tree: t.to_text(),
                    pass: full == induced,
                    full_value: full,
                    induced_value: induced,
                });
            }
        }
    }
    out
}

/// The (order, repeats) spec of an infinite support, over its appearing
/// colors relabeled 1..k by the induced order.
fn spec_of_support(support: &Subclass) -> InducedSubclassSpec {
    let appearing = support.appearing_colors();
    let k = appearing.len() as u8;
    // Sort appearing colors by the tournament: c before d iff eps(c,d).
    let mut ordered = appearing.clone();
    ordered.sort_by(|&c, &d| {
        if support.eps(c, d) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    let repeats: BTreeSet<u8> = ordered
        .iter()
        .enumerate()
        .filter(|(_, &c)| support.eps(c, c))
        .map(|(rank, _)| rank as u8 + 1)
        .collect();
    InducedSubclassSpec::new(k, (1..=k).collect(), repeats)
}

fn spec_rank(support: &Subclass, _spec: &InducedSubclassSpec, color: u8) -> u8 {
    let appearing = support.appearing_colors();
    let mut ordered = appearing.clone();
    ordered.sort_by(|&c, &d| {
        if support.eps(c, d) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    ordered.iter().position(|&c| c == color).map(|p| p as u8 + 1).unwrap_or(0)
}
