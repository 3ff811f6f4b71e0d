//! Node-colored rooted binary trees and the structures they realize.
//!
//! A tree is either empty, a single leaf, or a node carrying a color with
//! exactly two unordered children. Leaves are unlabeled in the abstract
//! structure; concretely we address them by their position (0-based,
//! left-to-right) in the serialized form.
//!
//! The structure realized by a tree is its leaf set together with the
//! ternary relation S — S(a,b,c) holds when a,b,c are distinct and the
//! simple path from the root to a avoids the simple path from b to c —
//! and the color of the meet (deepest common ancestor) of each leaf pair.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A node color in `{1, ..., n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Color(u8);

impl Color {
    /// Panics if `value` is zero; range against the ambient color count is
    /// checked where the ambient count is known (parsing, enumeration).
    pub fn new(value: u8) -> Self {
        assert!(value >= 1, "colors start at 1");
        Color(value)
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("color {color} out of range 1..={n} at byte {pos}")]
    ColorRange { color: u64, n: u8, pos: usize },
    #[error("leaf {leaf} not present (tree has {count} leaves)")]
    LeafRange { leaf: u32, count: u32 },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub(crate) enum Node {
    Leaf(u32),
    Branch(Color, Box<Node>, Box<Node>),
}

impl Node {
    pub(crate) fn leaf_count(&self) -> u32 {
        match self {
            Node::Leaf(_) => 1,
            Node::Branch(_, a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    /// Orders subtrees by shape only: leaves first, then by color and
    /// (already canonical) children. Leaf labels do not participate.
    pub(crate) fn shape_cmp(&self, other: &Node) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Node::Leaf(_), Node::Leaf(_)) => Equal,
            (Node::Leaf(_), Node::Branch(..)) => Less,
            (Node::Branch(..), Node::Leaf(_)) => Greater,
            (Node::Branch(c1, a1, b1), Node::Branch(c2, a2, b2)) => c1
                .cmp(c2)
                .then_with(|| a1.shape_cmp(a2))
                .then_with(|| b1.shape_cmp(b2)),
        }
    }

    /// Recursively sorts children by shape.
    pub(crate) fn canonicalize_shape(&mut self) {
        if let Node::Branch(_, a, b) = self {
            a.canonicalize_shape();
            b.canonicalize_shape();
            if a.shape_cmp(b) == std::cmp::Ordering::Greater {
                std::mem::swap(a, b);
            }
        }
    }

    /// Recursively sorts children with leaf labels as tie-breakers; equal
    /// encodings then mean label-preserving isomorphism.
    pub(crate) fn canonicalize_labeled(&mut self) {
        if let Node::Branch(_, a, b) = self {
            a.canonicalize_labeled();
            b.canonicalize_labeled();
            if **a > **b {
                std::mem::swap(a, b);
            }
        }
    }

    fn collect_labels(&self, out: &mut Vec<u32>) {
        match self {
            Node::Leaf(l) => out.push(*l),
            Node::Branch(_, a, b) => {
                a.collect_labels(out);
                b.collect_labels(out);
            }
        }
    }

    pub(crate) fn relabel_positional(&mut self, next: &mut u32) {
        match self {
            Node::Leaf(l) => {
                *l = *next;
                *next += 1;
            }
            Node::Branch(_, a, b) => {
                a.relabel_positional(next);
                b.relabel_positional(next);
            }
        }
    }

    pub(crate) fn max_color(&self) -> u8 {
        match self {
            Node::Leaf(_) => 0,
            Node::Branch(c, a, b) => c.get().max(a.max_color()).max(b.max_color()),
        }
    }

    fn fmt_text(&self, f: &mut String) {
        match self {
            Node::Leaf(_) => f.push('*'),
            Node::Branch(c, a, b) => {
                f.push('(');
                f.push_str(&c.to_string());
                f.push(' ');
                a.fmt_text(f);
                f.push(' ');
                b.fmt_text(f);
                f.push(')');
            }
        }
    }

    fn fmt_text_labeled(&self, f: &mut String, label: &dyn Fn(u32) -> String) {
        match self {
            Node::Leaf(l) => f.push_str(&label(*l)),
            Node::Branch(c, a, b) => {
                f.push('(');
                f.push_str(&c.to_string());
                f.push(' ');
                a.fmt_text_labeled(f, label);
                f.push(' ');
                b.fmt_text_labeled(f, label);
                f.push(')');
            }
        }
    }
}

/// A node-colored rooted binary tree; `None` is the empty structure.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ColoredTree {
    pub(crate) root: Option<Node>,
}

/// Flat index of a tree, used for path computations.
pub(crate) struct Flat {
    pub parent: Vec<Option<usize>>,
    pub color: Vec<Option<Color>>,
    pub depth: Vec<u32>,
    /// leaf position -> vertex index
    pub leaves: Vec<usize>,
    /// vertex index -> leaf label (original label, not position)
    pub leaf_label: Vec<Option<u32>>,
}

impl Flat {
    pub fn ancestors(&self, mut v: usize) -> Vec<usize> {
        let mut path = vec![v];
        while let Some(p) = self.parent[v] {
            path.push(p);
            v = p;
        }
        path
    }

    /// Deepest common ancestor of two vertices.
    pub fn meet(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        a
    }

    /// Vertices on the simple path between two vertices, inclusive.
    pub fn path_between(&self, a: usize, b: usize) -> Vec<usize> {
        let m = self.meet(a, b);
        let mut path = Vec::new();
        let mut v = a;
        while v != m {
            path.push(v);
            v = self.parent[v].unwrap();
        }
        path.push(m);
        let mut tail = Vec::new();
        let mut w = b;
        while w != m {
            tail.push(w);
            w = self.parent[w].unwrap();
        }
        path.extend(tail.into_iter().rev());
        path
    }
}

impl ColoredTree {
    pub fn empty() -> Self {
        ColoredTree { root: None }
    }

    pub fn leaf() -> Self {
        ColoredTree { root: Some(Node::Leaf(0)) }
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn leaf_count(&self) -> u32 {
        self.root.as_ref().map_or(0, Node::leaf_count)
    }

    pub fn max_color(&self) -> u8 {
        self.root.as_ref().map_or(0, Node::max_color)
    }

    /// Parses the text grammar `tree := "*" | "(" color tree tree ")"` with
    /// `"()"` for the empty structure. Colors must lie in `1..=n`.
    pub fn parse(text: &str, n: u8) -> Result<Self, TreeError> {
        let bytes = text.as_bytes();
        let mut pos = 0;
        skip_ws(bytes, &mut pos);
        if bytes.get(pos) == Some(&b'(') {
            let mut look = pos + 1;
            skip_ws(bytes, &mut look);
            if bytes.get(look) == Some(&b')') {
                pos = look + 1;
                skip_ws(bytes, &mut pos);
                return if pos == bytes.len() {
                    Ok(ColoredTree::empty())
                } else {
                    Err(TreeError::Syntax { pos, msg: "trailing input".into() })
                };
            }
        }
        let node = parse_node(bytes, &mut pos, n)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(TreeError::Syntax { pos, msg: "trailing input".into() });
        }
        let mut next = 0;
        let mut node = node;
        node.relabel_positional(&mut next);
        Ok(ColoredTree { root: Some(node) })
    }

    /// The isomorphism-class representative: children sorted recursively by
    /// shape, leaf positions reassigned left-to-right. Idempotent.
    pub fn canonicalize(&self) -> Self {
        match &self.root {
            None => ColoredTree::empty(),
            Some(node) => {
                let mut node = node.clone();
                node.canonicalize_shape();
                let mut next = 0;
                node.relabel_positional(&mut next);
                ColoredTree { root: Some(node) }
            }
        }
    }

    pub fn is_isomorphic(&self, other: &ColoredTree) -> bool {
        self.canonicalize() == other.canonicalize()
    }

    /// Flat parent/color index; leaf positions follow in-order labels sorted
    /// ascending (for positional trees these are 0..m).
    pub(crate) fn flatten(&self) -> Flat {
        let mut flat = Flat {
            parent: Vec::new(),
            color: Vec::new(),
            depth: Vec::new(),
            leaves: Vec::new(),
            leaf_label: Vec::new(),
        };
        fn walk(node: &Node, parent: Option<usize>, depth: u32, flat: &mut Flat, acc: &mut Vec<(u32, usize)>) {
            let idx = flat.parent.len();
            flat.parent.push(parent);
            flat.depth.push(depth);
            match node {
                Node::Leaf(l) => {
                    flat.color.push(None);
                    flat.leaf_label.push(Some(*l));
                    acc.push((*l, idx));
                }
                Node::Branch(c, a, b) => {
                    flat.color.push(Some(*c));
                    flat.leaf_label.push(None);
                    walk(a, Some(idx), depth + 1, flat, acc);
                    walk(b, Some(idx), depth + 1, flat, acc);
                }
            }
        }
        let mut acc = Vec::new();
        if let Some(node) = &self.root {
            walk(node, None, 0, &mut flat, &mut acc);
        }
        acc.sort();
        flat.leaves = acc.into_iter().map(|(_, idx)| idx).collect();
        flat
    }

    /// S(a,b,c): true iff the three leaf positions are distinct and the
    /// root-to-a path avoids the simple path from b to c.
    pub fn relation_s(&self, a: u32, b: u32, c: u32) -> bool {
        if a == b || b == c || a == c {
            return false;
        }
        let m = self.leaf_count();
        if a >= m || b >= m || c >= m {
            return false;
        }
        let flat = self.flatten();
        let pa: BTreeSet<usize> = flat.ancestors(flat.leaves[a as usize]).into_iter().collect();
        let bc = flat.path_between(flat.leaves[b as usize], flat.leaves[c as usize]);
        bc.iter().all(|v| !pa.contains(v))
    }

    /// Color of the meet of two distinct leaves.
    pub fn meet_color(&self, a: u32, b: u32) -> Option<Color> {
        if a == b {
            return None;
        }
        let m = self.leaf_count();
        if a >= m || b >= m {
            return None;
        }
        let flat = self.flatten();
        flat.color[flat.meet(flat.leaves[a as usize], flat.leaves[b as usize])]
    }

    /// The induced substructure on a set of leaf positions, realized as a
    /// tree: pairwise meets keep their colors, unary nodes are suppressed.
    /// Leaves of the result are ordered by their original positions.
    pub fn restrict(&self, subset: &BTreeSet<u32>) -> Result<ColoredTree, TreeError> {
        let m = self.leaf_count();
        if let Some(&bad) = subset.iter().find(|&&l| l >= m) {
            return Err(TreeError::LeafRange { leaf: bad, count: m });
        }
        match &self.root {
            None => Ok(ColoredTree::empty()),
            Some(node) => {
                fn project(node: &Node, keep: &BTreeSet<u32>) -> Option<Node> {
                    match node {
                        Node::Leaf(l) => keep.contains(l).then(|| Node::Leaf(*l)),
                        Node::Branch(c, a, b) => match (project(a, keep), project(b, keep)) {
                            (Some(a2), Some(b2)) => {
                                Some(Node::Branch(*c, Box::new(a2), Box::new(b2)))
                            }
                            (Some(a2), None) => Some(a2),
                            (None, Some(b2)) => Some(b2),
                            (None, None) => None,
                        },
                    }
                }
                match project(node, subset) {
                    None => Ok(ColoredTree::empty()),
                    Some(mut proj) => {
                        let mut next = 0;
                        proj.relabel_positional(&mut next);
                        Ok(ColoredTree { root: Some(proj) })
                    }
                }
            }
        }
    }

    /// Order of the automorphism group of the realized structure: doubles at
    /// every node whose two child subtrees are isomorphic, so always a power
    /// of two.
    pub fn automorphism_count(&self) -> u128 {
        fn count(node: &Node) -> u128 {
            match node {
                Node::Leaf(_) => 1,
                Node::Branch(_, a, b) => {
                    let (ca, cb) = (count(a), count(b));
                    let mut a2 = (**a).clone();
                    let mut b2 = (**b).clone();
                    a2.canonicalize_shape();
                    b2.canonicalize_shape();
                    let same = a2.shape_cmp(&b2) == std::cmp::Ordering::Equal;
                    ca * cb * if same { 2 } else { 1 }
                }
            }
        }
        self.root.as_ref().map_or(1, count)
    }

    /// All isomorphisms onto `other`, as maps leaf-position -> leaf-position.
    pub fn isomorphisms(&self, other: &ColoredTree) -> Vec<Vec<u32>> {
        fn go(u: &Node, v: &Node) -> Vec<Vec<(u32, u32)>> {
            match (u, v) {
                (Node::Leaf(a), Node::Leaf(b)) => vec![vec![(*a, *b)]],
                (Node::Branch(c1, a1, b1), Node::Branch(c2, a2, b2)) if c1 == c2 => {
                    let mut out = Vec::new();
                    for (x, y) in [(a2, b2), (b2, a2)] {
                        for m1 in go(a1, x) {
                            for m2 in go(b1, y) {
                                let mut m = m1.clone();
                                m.extend_from_slice(&m2);
                                out.push(m);
                            }
                        }
                    }
                    out
                }
                _ => Vec::new(),
            }
        }
        match (&self.root, &other.root) {
            (None, None) => vec![vec![]],
            (Some(u), Some(v)) => {
                let m = self.leaf_count() as usize;
                let mut seen = BTreeSet::new();
                let mut out = Vec::new();
                for pairs in go(u, v) {
                    let mut map = vec![0u32; m];
                    for (a, b) in pairs {
                        map[a as usize] = b;
                    }
                    if seen.insert(map.clone()) {
                        out.push(map);
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// All single-leaf extensions: a new node of each color subdividing each
    /// vertex position (including a new root). Each result comes with the
    /// map from old leaf positions to their positions in the extension; the
    /// new leaf occupies the one position not in the map's image.
    pub fn one_point_extensions(&self, n: u8) -> Vec<(ColoredTree, Vec<u32>)> {
        let m = self.leaf_count();
        match &self.root {
            None => vec![(ColoredTree::leaf(), Vec::new())],
            Some(node) => {
                fn rec(node: &Node, n: u8, new_label: u32, out: &mut Vec<Node>) {
                    for c in 1..=n {
                        out.push(Node::Branch(
                            Color::new(c),
                            Box::new(node.clone()),
                            Box::new(Node::Leaf(new_label)),
                        ));
                    }
                    if let Node::Branch(c, a, b) = node {
                        let mut sub = Vec::new();
                        rec(a, n, new_label, &mut sub);
                        for a2 in sub {
                            out.push(Node::Branch(*c, Box::new(a2), b.clone()));
                        }
                        let mut sub = Vec::new();
                        rec(b, n, new_label, &mut sub);
                        for b2 in sub {
                            out.push(Node::Branch(*c, a.clone(), Box::new(b2)));
                        }
                    }
                }
                let mut nodes = Vec::new();
                rec(node, n, m, &mut nodes);
                nodes
                    .into_iter()
                    .map(|node| {
                        let (tree, map) = ColoredTree::from_labeled(node);
                        // Drop the new leaf (label m) from the map.
                        (tree, map[..m as usize].to_vec())
                    })
                    .collect()
            }
        }
    }

    /// Wraps a node whose leaves carry arbitrary distinct labels; returns the
    /// positional tree plus the map label -> position (indexed by label,
    /// which must be 0..m).
    pub(crate) fn from_labeled(node: Node) -> (ColoredTree, Vec<u32>) {
        let mut labels = Vec::new();
        node.collect_labels(&mut labels);
        let mut map = vec![0u32; labels.len()];
        for (pos, &label) in labels.iter().enumerate() {
            map[label as usize] = pos as u32;
        }
        let mut node = node;
        let mut next = 0;
        node.relabel_positional(&mut next);
        (ColoredTree { root: Some(node) }, map)
    }

    /// Root path of each leaf by position: (preorder vertex id, color),
    /// ending at the leaf itself (color 0).
    pub(crate) fn leaf_paths(&self) -> Vec<Vec<(u32, u8)>> {
        fn walk(
            node: &Node,
            prefix: &mut Vec<(u32, u8)>,
            next_id: &mut u32,
            out: &mut Vec<(u32, Vec<(u32, u8)>)>,
        ) {
            let id = *next_id;
            *next_id += 1;
            match node {
                Node::Leaf(l) => {
                    prefix.push((id, 0));
                    out.push((*l, prefix.clone()));
                    prefix.pop();
                }
                Node::Branch(c, a, b) => {
                    prefix.push((id, c.get()));
                    walk(a, prefix, next_id, out);
                    walk(b, prefix, next_id, out);
                    prefix.pop();
                }
            }
        }
        match &self.root {
            None => Vec::new(),
            Some(node) => {
                let mut labeled = Vec::new();
                let mut prefix = Vec::new();
                let mut next_id = 0;
                walk(node, &mut prefix, &mut next_id, &mut labeled);
                labeled.sort_by_key(|(l, _)| *l);
                labeled.into_iter().map(|(_, p)| p).collect()
            }
        }
    }

    /// Number of nodes of each color (index c-1 for color c).
    pub fn color_counts(&self, n: u8) -> Vec<u32> {
        fn walk(node: &Node, counts: &mut [u32]) {
            if let Node::Branch(c, a, b) = node {
                counts[c.get() as usize - 1] += 1;
                walk(a, counts);
                walk(b, counts);
            }
        }
        let mut counts = vec![0u32; n as usize];
        if let Some(node) = &self.root {
            walk(node, &mut counts);
        }
        counts
    }

    /// Applies a color substitution to every node.
    pub fn map_colors(&self, f: &dyn Fn(u8) -> u8) -> ColoredTree {
        fn walk(node: &Node, f: &dyn Fn(u8) -> u8) -> Node {
            match node {
                Node::Leaf(l) => Node::Leaf(*l),
                Node::Branch(c, a, b) => Node::Branch(
                    Color::new(f(c.get())),
                    Box::new(walk(a, f)),
                    Box::new(walk(b, f)),
                ),
            }
        }
        ColoredTree { root: self.root.as_ref().map(|node| walk(node, f)) }
    }

    /// Strips arbitrary leaf labels, returning the positional tree plus the
    /// original labels in leaf order.
    pub(crate) fn from_labeled_relaxed(node: Node) -> (ColoredTree, Vec<u32>) {
        let mut labels = Vec::new();
        node.collect_labels(&mut labels);
        let mut node = node;
        let mut next = 0;
        node.relabel_positional(&mut next);
        (ColoredTree { root: Some(node) }, labels)
    }

    pub(crate) fn into_node(self) -> Option<Node> {
        self.root
    }

    /// Clone of the underlying node with leaf at position p labeled
    /// `labels[p]`. None when the tree is empty or sizes mismatch.
    pub(crate) fn node_with_labels(&self, labels: &[u32]) -> Option<Node> {
        if labels.len() != self.leaf_count() as usize {
            return None;
        }
        fn go(node: &Node, labels: &[u32], next: &mut usize) -> Node {
            match node {
                Node::Leaf(_) => {
                    let l = labels[*next];
                    *next += 1;
                    Node::Leaf(l)
                }
                Node::Branch(c, a, b) => {
                    let a2 = go(a, labels, next);
                    let b2 = go(b, labels, next);
                    Node::Branch(*c, Box::new(a2), Box::new(b2))
                }
            }
        }
        let mut next = 0;
        self.root.as_ref().map(|node| go(node, labels, &mut next))
    }

    /// Like `node_with_labels` but passes the empty tree through.
    pub(crate) fn node_with_labels_opt(&self, labels: &[u32]) -> Option<Node> {
        if self.is_empty() {
            None
        } else {
            self.node_with_labels(labels)
        }
    }

    /// Serialized text; leaves print as `*`.
    pub fn to_text(&self) -> String {
        match &self.root {
            None => "()".to_string(),
            Some(node) => {
                let mut s = String::new();
                node.fmt_text(&mut s);
                s
            }
        }
    }

    pub(crate) fn to_text_labeled(&self, label: &dyn Fn(u32) -> String) -> String {
        match &self.root {
            None => "()".to_string(),
            Some(node) => {
                let mut s = String::new();
                node.fmt_text_labeled(&mut s, label);
                s
            }
        }
    }

    pub(crate) fn leaf_labels(&self) -> Vec<u32> {
        let mut out = Vec::new();
        if let Some(node) = &self.root {
            node.collect_labels(&mut out);
        }
        out
    }
}

impl fmt::Display for ColoredTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_node(bytes: &[u8], pos: &mut usize, n: u8) -> Result<Node, TreeError> {
    skip_ws(bytes, pos);
    match bytes.get(*pos) {
        Some(b'*') => {
            *pos += 1;
            Ok(Node::Leaf(0))
        }
        Some(b'(') => {
            *pos += 1;
            skip_ws(bytes, pos);
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if *pos == start {
                return Err(TreeError::Syntax { pos: *pos, msg: "expected color".into() });
            }
            let color: u64 = std::str::from_utf8(&bytes[start..*pos])
                .unwrap()
                .parse()
                .map_err(|_| TreeError::Syntax { pos: start, msg: "bad color".into() })?;
            if color == 0 || color > n as u64 {
                return Err(TreeError::ColorRange { color, n, pos: start });
            }
            let a = parse_node(bytes, pos, n)?;
            let b = parse_node(bytes, pos, n)?;
            skip_ws(bytes, pos);
            if bytes.get(*pos) != Some(&b')') {
                return Err(TreeError::Syntax { pos: *pos, msg: "expected ')'".into() });
            }
            *pos += 1;
            Ok(Node::Branch(Color::new(color as u8), Box::new(a), Box::new(b)))
        }
        _ => Err(TreeError::Syntax { pos: *pos, msg: "expected '*' or '('".into() }),
    }
}

/// A structure in its own right: leaf ids with the relation S and the meet
/// colors. Round-trips with the realizing tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Structure {
    pub leaves: BTreeSet<u32>,
    pub s_triples: BTreeSet<(u32, u32, u32)>,
    pub meet_colors: BTreeMap<(u32, u32), Color>,
}

impl Structure {
    pub fn from_tree(tree: &ColoredTree) -> Self {
        let m = tree.leaf_count();
        let leaves: BTreeSet<u32> = (0..m).collect();
        let mut s_triples = BTreeSet::new();
        let mut meet_colors = BTreeMap::new();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if tree.relation_s(a, b, c) {
                        s_triples.insert((a, b, c));
                    }
                }
            }
        }
        for a in 0..m {
            for b in a + 1..m {
                if let Some(col) = tree.meet_color(a, b) {
                    meet_colors.insert((a, b), col);
                }
            }
        }
        Structure { leaves, s_triples, meet_colors }
    }

    fn meet(&self, a: u32, b: u32) -> Color {
        let key = if a < b { (a, b) } else { (b, a) };
        self.meet_colors[&key]
    }

    /// Rebuilds the realizing tree. Two leaves lie in the same child subtree
    /// of the root exactly when some third leaf c has S(c,a,b); recursing on
    /// the two blocks reconstructs the whole tree. Leaf ids map to positions
    /// in ascending order.
    pub fn to_tree(&self) -> ColoredTree {
        fn build(leaves: &[u32], s: &Structure) -> Node {
            if leaves.len() == 1 {
                return Node::Leaf(leaves[0]);
            }
            // Partition into the root's two blocks.
            let mut blocks: Vec<Vec<u32>> = vec![vec![leaves[0]]];
            for &l in &leaves[1..] {
                let same = |x: u32, y: u32| {
                    leaves.iter().any(|&c| c != x && c != y && s.s_triples.contains(&(c, x, y)))
                };
                let mut placed = false;
                for block in blocks.iter_mut() {
                    if same(block[0], l) {
                        block.push(l);
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    blocks.push(vec![l]);
                }
            }
            assert_eq!(blocks.len(), 2, "structure does not realize a binary tree");
            let color = s.meet(blocks[0][0], blocks[1][0]);
            let a = build(&blocks[0], s);
            let b = build(&blocks[1], s);
            Node::Branch(color, Box::new(a), Box::new(b))
        }
        if self.leaves.is_empty() {
            return ColoredTree::empty();
        }
        let leaves: Vec<u32> = self.leaves.iter().copied().collect();
        if leaves.len() == 1 {
            return ColoredTree::leaf();
        }
        let mut node = build(&leaves, self);
        let mut next = 0;
        node.relabel_positional(&mut next);
        ColoredTree { root: Some(node) }
    }
}

/// All isomorphism classes with exactly `m` leaves and colors in `1..=n`,
/// canonical and sorted, plus the count of leaf-labeled structures.
pub fn enumerate_structures(n: u8, m: u32) -> (Vec<ColoredTree>, u128) {
    assert!(n >= 1);
    let mut level: Vec<ColoredTree> = vec![ColoredTree::empty()];
    for _ in 0..m {
        let mut next: BTreeSet<ColoredTree> = BTreeSet::new();
        for t in &level {
            for (ext, _) in t.one_point_extensions(n) {
                next.insert(ext.canonicalize());
            }
        }
        level = next.into_iter().collect();
    }
    let labeled: u128 = level
        .iter()
        .map(|t| factorial_u128(t.leaf_count() as u128) / t.automorphism_count())
        .sum();
    (level, labeled)
}

pub fn factorial_u128(k: u128) -> u128 {
    (1..=k).product::<u128>().max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(text: &str, n: u8) -> ColoredTree {
        ColoredTree::parse(text, n).unwrap()
    }

    #[test]
    fn parse_basic_forms() {
        assert_eq!(t("*", 1).leaf_count(), 1);
        assert_eq!(t("()", 1).leaf_count(), 0);
        let four = t("(1 * (3 * (2 * *)))", 3);
        assert_eq!(four.leaf_count(), 4);
        assert_eq!(four.to_text(), "(1 * (3 * (2 * *)))");
        let balanced = t("(4 (5 * *) (5 * *))", 5);
        assert_eq!(balanced.leaf_count(), 4);
    }

    #[test]
    fn parse_errors_report_position() {
        match ColoredTree::parse("(1 * ", 2) {
            Err(TreeError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match ColoredTree::parse("(3 * *)", 2) {
            Err(TreeError::ColorRange { color: 3, n: 2, .. }) => {}
            other => panic!("expected color error, got {other:?}"),
        }
    }

    #[test]
    fn canonicalize_is_swap_invariant_and_idempotent() {
        let a = t("(1 (2 * *) *)", 2);
        let b = t("(1 * (2 * *))", 2);
        assert_eq!(a.canonicalize(), b.canonicalize());
        let c = a.canonicalize();
        assert_eq!(c.canonicalize(), c);
    }

    #[test]
    fn canonical_order_is_numeric_on_colors() {
        // String comparison would put color 12 before 3.
        let tr = t("(1 (12 * *) (3 * *))", 12);
        assert_eq!(tr.canonicalize().to_text(), "(1 (3 * *) (12 * *))");
    }

    #[test]
    fn isomorphism_examples() {
        assert!(t("(1 (2 * *) *)", 2).is_isomorphic(&t("(1 * (2 * *))", 2)));
        assert!(!t("(1 * *)", 2).is_isomorphic(&t("(2 * *)", 2)));
    }

    #[test]
    fn relation_s_on_figure_trees() {
        // Left example: leaves a,b,c,d in positions 0,1,2,3.
        let left = t("(1 * (3 * (2 * *)))", 3);
        assert!(left.relation_s(0, 1, 2));
        assert!(left.relation_s(1, 2, 3));
        assert!(!left.relation_s(2, 0, 3));
        // Repeated arguments are false.
        assert!(!left.relation_s(0, 0, 2));
        // Right example: leaves e,f,a,b in positions 0,1,2,3.
        let right = t("(3 (4 * *) (1 * *))", 4);
        assert!(right.relation_s(0, 2, 3));
        assert!(right.relation_s(2, 0, 1));
        assert!(!right.relation_s(2, 3, 1));
    }

    #[test]
    fn restrict_examples() {
        let amalgamated = t("(3 (1 * (3 * (2 * *))) (4 * *))", 4);
        let sub = amalgamated.restrict(&[0u32, 1].into_iter().collect()).unwrap();
        assert_eq!(sub.to_text(), "(1 * *)");
        // Restricting to all leaves gives the canonical form.
        let full: BTreeSet<u32> = (0..amalgamated.leaf_count()).collect();
        assert_eq!(amalgamated.restrict(&full).unwrap().canonicalize(), amalgamated.canonicalize());
        // Out-of-range leaves are rejected.
        assert!(amalgamated.restrict(&[9u32].into_iter().collect()).is_err());
    }

    #[test]
    fn restrict_is_functorial_small() {
        let (trees, _) = enumerate_structures(2, 5);
        for tr in trees {
            let m = tr.leaf_count();
            let u: BTreeSet<u32> = (0..m).filter(|x| x % 2 == 0).collect();
            let v: BTreeSet<u32> = u.iter().copied().filter(|x| x / 2 % 2 == 0).collect();
            let inner = tr.restrict(&u).unwrap();
            // v's positions inside restrict(t, u): rank of each v-element in u.
            let reindexed: BTreeSet<u32> =
                v.iter().map(|x| u.iter().position(|y| y == x).unwrap() as u32).collect();
            assert_eq!(
                inner.restrict(&reindexed).unwrap().canonicalize(),
                tr.restrict(&v).unwrap().canonicalize()
            );
        }
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(t("*", 1).automorphism_count(), 1);
        assert_eq!(t("(1 * *)", 1).automorphism_count(), 2);
        assert_eq!(t("(1 (2 * *) (2 * *))", 2).automorphism_count(), 8);
        assert_eq!(t("(1 (2 * *) (3 * *))", 3).automorphism_count(), 4);
    }

    /// Brute-force automorphisms: every leaf permutation preserving S and
    /// meet colors.
    fn brute_automorphisms(tr: &ColoredTree) -> u128 {
        let s = Structure::from_tree(tr);
        let m = tr.leaf_count() as usize;
        let mut perm: Vec<u32> = (0..m as u32).collect();
        let mut count = 0u128;
        permute(&mut perm, 0, &mut |p| {
            let ok = s
                .s_triples
                .iter()
                .all(|&(a, b, c)| s.s_triples.contains(&(p[a as usize], p[b as usize], p[c as usize])))
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

    #[test]
    fn automorphism_count_matches_brute_force() {
        for n in 1..=2u8 {
            for m in 1..=5u32 {
                let (trees, _) = enumerate_structures(n, m);
                for tr in trees {
                    assert_eq!(tr.automorphism_count(), brute_automorphisms(&tr), "{tr}");
                }
            }
        }
    }

    #[test]
    fn canonical_equality_matches_brute_force_isomorphism() {
        // All pairs with <= 4 leaves, n = 2 (5-leaf pairs are covered by the
        // acceptance-scale run of the same oracle).
        let mut all = Vec::new();
        for m in 0..=4u32 {
            all.extend(enumerate_structures(2, m).0);
        }
        for a in &all {
            for b in &all {
                let brute = !a.isomorphisms(b).is_empty();
                assert_eq!(a.is_isomorphic(b), brute);
            }
        }
        // isomorphisms() count equals the automorphism count on itself.
        for a in &all {
            assert_eq!(a.isomorphisms(a).len() as u128, a.automorphism_count());
        }
    }

    #[test]
    fn enumeration_counts() {
        let (classes, labeled) = enumerate_structures(1, 4);
        assert_eq!(labeled, 15); // (2m-3)!! for m = 4
        assert_eq!(classes.len(), 2);
        let (classes, _) = enumerate_structures(2, 2);
        assert_eq!(classes.len(), 2);
        let (classes, _) = enumerate_structures(2, 3);
        assert_eq!(classes.len(), 4);
        let (classes, labeled) = enumerate_structures(2, 5);
        assert_eq!(labeled, 105 * 16); // (2m-3)!! * n^(m-1)
        assert!(classes.iter().all(|t| t.leaf_count() == 5));
    }

    #[test]
    fn structure_round_trip() {
        for n in 1..=2u8 {
            for m in 0..=5u32 {
                let (trees, _) = enumerate_structures(n, m);
                for tr in trees {
                    let s = Structure::from_tree(&tr);
                    assert_eq!(s.to_tree().canonicalize(), tr.canonicalize(), "{tr}");
                }
            }
        }
    }
}
