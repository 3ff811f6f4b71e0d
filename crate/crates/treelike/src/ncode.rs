//! n-codes and edge-labeled directed rooted trees.
//!
//! An n-code is a pair (beta, chi) of {0,1}-valued functions, beta on colors
//! and chi on ordered color pairs, subject to three identities for pairwise
//! distinct i, j, k:
//!
//!   chi(i,j)*chi(j,i) = 0
//!   beta(i)*beta(j)   = beta(i)*chi(j,i) + beta(j)*chi(i,j)
//!   chi(i,k)*chi(j,k) = chi(i,j)*chi(j,k) + chi(j,i)*chi(i,k)
//!
//! Codes are in bijection with directed rooted trees on n+1 vertices whose
//! edges are labeled bijectively by {1,...,n}, with a distinguished vertex:
//! chi(i,i) records whether edge i points towards the root, chi(i,j) whether
//! edge i lies on the path from the root to edge j, and beta(i) whether edge
//! i lies on the path from the root to the distinguished vertex.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NCodeError {
    #[error("code tables have the wrong shape for n = {n}")]
    Shape { n: u8 },
    #[error("code violates identity {identity} at colors {colors:?}")]
    Identity { identity: &'static str, colors: Vec<u8> },
    #[error("edge-labeled graph is not a tree on n+1 vertices")]
    NotATree,
    #[error("vertex {0} is not in the tree")]
    BadVertex(u32),
    #[error("code does not come from any labeled directed tree")]
    NoPreimage,
}

/// The pair (beta, chi); colors are 1-indexed in the API.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NCode {
    n: u8,
    beta: Vec<bool>,
    chi: Vec<Vec<bool>>,
}

impl NCode {
    pub fn new(n: u8, beta: Vec<bool>, chi: Vec<Vec<bool>>) -> Result<Self, NCodeError> {
        if beta.len() != n as usize
            || chi.len() != n as usize
            || chi.iter().any(|row| row.len() != n as usize)
        {
            return Err(NCodeError::Shape { n });
        }
        let code = NCode { n, beta, chi };
        code.validate()?;
        Ok(code)
    }

    fn validate(&self) -> Result<(), NCodeError> {
        let v = |b: bool| b as i32;
        let n = self.n;
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                if self.chi(i, j) && self.chi(j, i) {
                    return Err(NCodeError::Identity {
                        identity: "chi(i,j)chi(j,i) = 0",
                        colors: vec![i, j],
                    });
                }
                if v(self.beta(i)) * v(self.beta(j))
                    != v(self.beta(i)) * v(self.chi(j, i)) + v(self.beta(j)) * v(self.chi(i, j))
                {
                    return Err(NCodeError::Identity {
                        identity: "beta(i)beta(j) = beta(i)chi(j,i) + beta(j)chi(i,j)",
                        colors: vec![i, j],
                    });
                }
                for k in 1..=n {
                    if k == i || k == j {
                        continue;
                    }
                    if v(self.chi(i, k)) * v(self.chi(j, k))
                        != v(self.chi(i, j)) * v(self.chi(j, k))
                            + v(self.chi(j, i)) * v(self.chi(i, k))
                    {
                        return Err(NCodeError::Identity {
                            identity: "chi(i,k)chi(j,k) = chi(i,j)chi(j,k) + chi(j,i)chi(i,k)",
                            colors: vec![i, j, k],
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn beta(&self, i: u8) -> bool {
        self.beta[i as usize - 1]
    }

    pub fn chi(&self, i: u8, j: u8) -> bool {
        self.chi[i as usize - 1][j as usize - 1]
    }

    pub fn beta_row(&self) -> &[bool] {
        &self.beta
    }

    pub fn chi_table(&self) -> &[Vec<bool>] {
        &self.chi
    }

    /// All valid n-codes, in lexicographic bit order.
    pub fn enumerate(n: u8) -> Vec<NCode> {
        assert!((1..=4).contains(&n), "code enumeration is meant for n <= 4");
        let bits = n as u32 + (n as u32) * (n as u32);
        let mut out = Vec::new();
        for mask in 0..(1u64 << bits) {
            let take = |k: u32| mask >> k & 1 == 1;
            let beta: Vec<bool> = (0..n as u32).map(take).collect();
            let chi: Vec<Vec<bool>> = (0..n as u32)
                .map(|i| (0..n as u32).map(|j| take(n as u32 + i * n as u32 + j)).collect())
                .collect();
            if let Ok(code) = NCode::new(n, beta, chi) {
                out.push(code);
            }
        }
        out
    }
}

#[derive(Clone, Serialize, Deserialize, PartialEq, Eq, Debug)]
pub struct DirectedEdge {
    pub from: u32,
    pub to: u32,
    pub label: u8,
}

/// A directed rooted tree on n+1 vertices with edges labeled bijectively by
/// {1,...,n} and a distinguished vertex.
#[derive(Clone, Serialize, Deserialize, PartialEq, Eq, Debug)]
pub struct LabeledDirectedTree {
    pub n: u8,
    pub edges: Vec<DirectedEdge>,
    pub root: u32,
    pub distinguished: u32,
}

impl LabeledDirectedTree {
    pub fn new(
        n: u8,
        edges: Vec<DirectedEdge>,
        root: u32,
        distinguished: u32,
    ) -> Result<Self, NCodeError> {
        let t = LabeledDirectedTree { n, edges, root, distinguished };
        t.index()?;
        Ok(t)
    }

    /// Rooted index: per edge label the far endpoint and the label path from
    /// the root to it, plus the label path to the distinguished vertex.
    fn index(&self) -> Result<Index, NCodeError> {
        let n = self.n as usize;
        if self.edges.len() != n {
            return Err(NCodeError::NotATree);
        }
        let mut labels: Vec<bool> = vec![false; n];
        let mut vertices: BTreeMap<u32, Vec<(u32, u8)>> = BTreeMap::new();
        for e in &self.edges {
            let l = e.label as usize;
            if l == 0 || l > n || labels[l - 1] {
                return Err(NCodeError::NotATree);
            }
            labels[l - 1] = true;
            vertices.entry(e.from).or_default().push((e.to, e.label));
            vertices.entry(e.to).or_default().push((e.from, e.label));
        }
        if n == 0 {
            return if self.root == self.distinguished {
                Ok(Index { far: Vec::new(), anc: Vec::new(), beta_path: Vec::new() })
            } else {
                Err(NCodeError::BadVertex(self.distinguished))
            };
        }
        if vertices.len() != n + 1 {
            return Err(NCodeError::NotATree);
        }
        if !vertices.contains_key(&self.root) {
            return Err(NCodeError::BadVertex(self.root));
        }
        if !vertices.contains_key(&self.distinguished) {
            return Err(NCodeError::BadVertex(self.distinguished));
        }
        // BFS from the root; record the label path to every vertex.
        let mut path_to: BTreeMap<u32, Vec<u8>> = BTreeMap::new();
        path_to.insert(self.root, Vec::new());
        let mut queue = vec![self.root];
        let mut far = vec![0u32; n];
        while let Some(v) = queue.pop() {
            let base = path_to[&v].clone();
            for &(w, l) in &vertices[&v] {
                if path_to.contains_key(&w) {
                    continue;
                }
                let mut p = base.clone();
                p.push(l);
                far[l as usize - 1] = w;
                path_to.insert(w, p);
                queue.push(w);
            }
        }
        if path_to.len() != n + 1 {
            return Err(NCodeError::NotATree);
        }
        let anc: Vec<Vec<u8>> = (0..n).map(|i| path_to[&far[i]].clone()).collect();
        let beta_path = path_to[&self.distinguished].clone();
        Ok(Index { far, anc, beta_path })
    }

    /// The code of this tree.
    pub fn ncode(&self) -> NCode {
        let idx = self.index().expect("tree was validated on construction");
        let n = self.n as usize;
        let towards_root: Vec<bool> = (0..n)
            .map(|i| {
                // Edge i+1 points towards the root when its `from` endpoint
                // is the far one.
                let e = self.edges.iter().find(|e| e.label as usize == i + 1).unwrap();
                e.from == idx.far[i]
            })
            .collect();
        let beta: Vec<bool> = (0..n).map(|i| idx.beta_path.contains(&(i as u8 + 1))).collect();
        let chi: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            towards_root[i]
                        } else {
                            idx.anc[j].contains(&(i as u8 + 1))
                        }
                    })
                    .collect()
            })
            .collect();
        NCode::new(self.n, beta, chi).expect("codes of trees always satisfy the identities")
    }

    /// The unique tree with the given code, in canonical vertex numbering
    /// (root = 0, far endpoint of edge i = i).
    pub fn from_ncode(code: &NCode) -> Result<Self, NCodeError> {
        let n = code.n();
        // Ancestor sets A(j) = { i != j : chi(i,j) = 1 }.
        let anc: Vec<Vec<u8>> = (1..=n)
            .map(|j| (1..=n).filter(|&i| i != j && code.chi(i, j)).collect())
            .collect();
        // Parent edge of j: the ancestor with the largest ancestor set.
        let mut parent: Vec<u32> = Vec::with_capacity(n as usize);
        for j in 1..=n {
            let a = &anc[j as usize - 1];
            if a.is_empty() {
                parent.push(0);
                continue;
            }
            let &p = a.iter().max_by_key(|&&i| anc[i as usize - 1].len()).unwrap();
            // Ancestor sets along a branch must nest.
            let pa = &anc[p as usize - 1];
            if pa.len() + 1 != a.len() || !pa.iter().all(|i| a.contains(i)) {
                return Err(NCodeError::NoPreimage);
            }
            parent.push(p as u32);
        }
        let edges: Vec<DirectedEdge> = (1..=n)
            .map(|i| {
                let near = parent[i as usize - 1];
                let far = i as u32;
                if code.chi(i, i) {
                    DirectedEdge { from: far, to: near, label: i }
                } else {
                    DirectedEdge { from: near, to: far, label: i }
                }
            })
            .collect();
        // Distinguished vertex: far endpoint of the deepest beta-edge.
        let b: Vec<u8> = (1..=n).filter(|&i| code.beta(i)).collect();
        let distinguished = if b.is_empty() {
            0
        } else {
            let &deepest = b.iter().max_by_key(|&&i| anc[i as usize - 1].len()).unwrap();
            let a = &anc[deepest as usize - 1];
            if a.len() + 1 != b.len() || !a.iter().all(|i| b.contains(i)) {
                return Err(NCodeError::NoPreimage);
            }
            deepest as u32
        };
        let tree = LabeledDirectedTree::new(n, edges, 0, distinguished)?;
        if &tree.ncode() != code {
            return Err(NCodeError::NoPreimage);
        }
        Ok(tree)
    }

    /// Stable text form used to key measures: canonical vertex numbering,
    /// edges sorted by label.
    pub fn canonical_text(&self) -> String {
        let canon = LabeledDirectedTree::from_ncode(&self.ncode())
            .expect("valid trees round-trip through their code");
        let mut parts: Vec<String> = canon
            .edges
            .iter()
            .map(|e| format!("{}:{}->{}", e.label, e.from, e.to))
            .collect();
        parts.sort();
        format!("root 0; v {}; {}", canon.distinguished, parts.join(" "))
    }
}

struct Index {
    /// label-1 -> far endpoint vertex
    far: Vec<u32>,
    /// label-1 -> labels on the path from the root to that edge (inclusive)
    anc: Vec<Vec<u8>>,
    /// labels on the path from the root to the distinguished vertex
    beta_path: Vec<u8>,
}

/// The worked 8-color example tree (root at the bottom vertex, distinguished
/// vertex at the top middle); used by tests and the verification suites.
pub fn example_tree_n8() -> LabeledDirectedTree {
    LabeledDirectedTree::new(
        8,
        vec![
            DirectedEdge { from: 7, to: 2, label: 1 },
            DirectedEdge { from: 2, to: 4, label: 2 },
            DirectedEdge { from: 2, to: 0, label: 3 },
            DirectedEdge { from: 0, to: 1, label: 4 },
            DirectedEdge { from: 1, to: 8, label: 5 },
            DirectedEdge { from: 0, to: 3, label: 6 },
            DirectedEdge { from: 5, to: 3, label: 7 },
            DirectedEdge { from: 3, to: 6, label: 8 },
        ],
        0,
        8,
    )
    .unwrap()
}
