//! Phylogenetic trees as sets of pairwise-compatible splits.
//!
//! A tree is rooted at leaf 1 for every structural purpose: each edge label
//! (the side of a split away from leaf 1) is a cluster, the clusters form a
//! laminar family, and the vertex adjacent to leaf 1 is the cluster of all
//! other leaves. Singleton splits (leaf edges) are never stored.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::TreeError;
use crate::rat::Rat;
use crate::split::{labels_compatible, subset_less, Coloring, LabelSet, Split, MAX_LEAVES};
use crate::tropical::RatMatrix;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PhyloTree {
    leaves: LabelSet,
    splits: BTreeMap<Split, Rat>,
}

impl std::fmt::Debug for PhyloTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.splits.iter().map(|(s, l)| format!("{:?}:{}", s.members(), l)).collect();
        write!(f, "PhyloTree{:?}[{}]", self.leaves, parts.join(", "))
    }
}

/// Builds the tree on `{1, …, leaves}` whose internal edges induce exactly
/// `splits`.
pub fn tree_from_splits(leaves: usize, splits: impl IntoIterator<Item = (Split, Rat)>) -> Result<PhyloTree, TreeError> {
    if !(2..=MAX_LEAVES).contains(&leaves) {
        return Err(TreeError::LeafCount(leaves));
    }
    PhyloTree::with_leaf_set(LabelSet::full(leaves), splits)
}

impl PhyloTree {
    /// The star tree on `{1, …, leaves}`.
    pub fn star(leaves: usize) -> Result<PhyloTree, TreeError> {
        tree_from_splits(leaves, [])
    }

    /// Validates and builds a tree over an arbitrary leaf set containing 1.
    pub fn with_leaf_set(
        leaves: LabelSet,
        splits: impl IntoIterator<Item = (Split, Rat)>,
    ) -> Result<PhyloTree, TreeError> {
        if !leaves.contains(1) {
            return Err(TreeError::MissingLeafOne);
        }
        if leaves.len() < 2 {
            return Err(TreeError::LeafCount(leaves.len()));
        }
        let mut map = BTreeMap::new();
        for (split, length) in splits {
            if split.universe() != leaves {
                return Err(TreeError::MismatchedLeafSets);
            }
            if split.is_singleton() {
                return Err(TreeError::SingletonSplit(split.members().to_vec()));
            }
            if !length.is_positive() {
                return Err(TreeError::NonPositiveLength {
                    members: split.members().to_vec(),
                    length: length.to_string(),
                });
            }
            if map.insert(split, length).is_some() {
                return Err(TreeError::DuplicateSplit(split.members().to_vec()));
            }
        }
        let keys: Vec<&Split> = map.keys().collect();
        for (i, a) in keys.iter().enumerate() {
            for b in &keys[i + 1..] {
                if !labels_compatible(a.members(), b.members()) {
                    return Err(TreeError::IncompatibleSplits(a.members().to_vec(), b.members().to_vec()));
                }
            }
        }
        Ok(PhyloTree { leaves, splits: map })
    }

    /// Unchecked constructor for split sets already known to be valid.
    pub(crate) fn from_clusters(leaves: LabelSet, clusters: impl IntoIterator<Item = LabelSet>) -> PhyloTree {
        let splits = clusters.into_iter().map(|m| (Split::from_parts(leaves, m), Rat::one())).collect();
        PhyloTree { leaves, splits }
    }

    pub fn leaves(&self) -> LabelSet {
        self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn splits(&self) -> impl Iterator<Item = &Split> + '_ {
        self.splits.keys()
    }

    pub fn lengths(&self) -> &BTreeMap<Split, Rat> {
        &self.splits
    }

    pub fn split_count(&self) -> usize {
        self.splits.len()
    }

    pub fn length(&self, split: &Split) -> Option<&Rat> {
        self.splits.get(split)
    }

    /// Edge labels in canonical order.
    pub fn clusters(&self) -> Vec<LabelSet> {
        self.splits.keys().map(Split::members).collect()
    }

    pub fn is_trivalent(&self) -> bool {
        self.splits.len() + 3 == self.leaf_count().max(3)
    }

    /// Same topology with every length replaced.
    pub fn with_lengths(&self, lengths: impl IntoIterator<Item = Rat>) -> Result<PhyloTree, TreeError> {
        let splits: Vec<(Split, Rat)> = self.splits.keys().copied().zip(lengths).collect();
        if splits.len() != self.splits.len() {
            return Err(TreeError::InvalidSplit { members: vec![], reason: "length vector has the wrong size" });
        }
        PhyloTree::with_leaf_set(self.leaves, splits)
    }

    pub fn unit_lengths(&self) -> PhyloTree {
        PhyloTree::from_clusters(self.leaves, self.clusters())
    }

    /// Same split set, ignoring lengths.
    pub fn same_topology(&self, other: &PhyloTree) -> bool {
        self.leaves == other.leaves && self.splits.keys().eq(other.splits.keys())
    }

    pub fn all_bicolored(&self, coloring: &Coloring) -> bool {
        self.leaves == coloring.universe() && self.splits.keys().all(|s| coloring.is_bicolored(s))
    }

    /// Maximal proper sub-clusters of `cluster`, with uncovered leaves as
    /// singletons, in increasing mask order.
    fn children(&self, cluster: LabelSet) -> Vec<LabelSet> {
        let inner: Vec<LabelSet> =
            self.splits.keys().map(Split::members).filter(|m| m.is_subset(cluster) && *m != cluster).collect();
        let maximal: Vec<LabelSet> =
            inner.iter().copied().filter(|m| !inner.iter().any(|o| o != m && m.is_subset(*o))).collect();
        let covered = maximal.iter().fold(LabelSet::EMPTY, |acc, m| acc | *m);
        let mut out = maximal;
        out.extend(cluster.minus(covered).iter().map(LabelSet::singleton));
        out.sort_by_key(|m| m.bits());
        out
    }

    /// Explicit vertex/edge structure.
    pub fn topology(&self) -> Topology {
        let mut vertices: Vec<Vertex> = self.leaves.iter().map(Vertex::Leaf).collect();
        let leaf_index = |label: usize| self.leaves.iter().position(|l| l == label).unwrap();
        let mut edges = Vec::new();
        if self.leaf_count() == 2 {
            edges.push(TopologyEdge { a: 0, b: 1, split: None, length: None });
            return Topology { vertices, edges };
        }
        let root = self.leaves.minus(LabelSet::singleton(1));
        let mut clusters = vec![root];
        clusters.extend(self.clusters());
        let first_internal = vertices.len();
        vertices.extend(clusters.iter().map(|&below| Vertex::Internal { below }));
        // Smallest cluster strictly containing `set`.
        let parent_of = |set: LabelSet| {
            clusters
                .iter()
                .enumerate()
                .filter(|(_, c)| set.is_subset(**c) && **c != set)
                .min_by_key(|(_, c)| c.len())
                .map(|(i, _)| first_internal + i)
                .expect("root cluster contains everything")
        };
        edges.push(TopologyEdge { a: leaf_index(1), b: first_internal, split: None, length: None });
        for label in root.iter() {
            edges.push(TopologyEdge {
                a: leaf_index(label),
                b: parent_of(LabelSet::singleton(label)),
                split: None,
                length: None,
            });
        }
        for (split, length) in &self.splits {
            let v = first_internal + 1 + clusters[1..].iter().position(|c| *c == split.members()).unwrap();
            edges.push(TopologyEdge {
                a: v,
                b: parent_of(split.members()),
                split: Some(*split),
                length: Some(length.clone()),
            });
        }
        Topology { vertices, edges }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Vertex {
    Leaf(usize),
    /// Internal vertex, identified by the leaves on its side away from leaf 1.
    Internal {
        below: LabelSet,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologyEdge {
    pub a: usize,
    pub b: usize,
    /// `None` for leaf edges.
    pub split: Option<Split>,
    pub length: Option<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<TopologyEdge>,
}

impl Topology {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.a == v || e.b == v).count()
    }

    pub fn internal_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().enumerate().filter(|(_, v)| matches!(v, Vertex::Internal { .. })).map(|(i, _)| i)
    }
}

/// Result of cutting a trivalent tree at the vertex next to leaf 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub m0: LabelSet,
    /// The part containing the largest label.
    pub m1: LabelSet,
    /// Subtree induced on `{1} ∪ m0`.
    pub t0: PhyloTree,
    /// Subtree induced on `{1} ∪ m1`.
    pub t1: PhyloTree,
}

/// Splits a trivalent tree along leaf 1.
pub fn decompose_at_leaf_one(tree: &PhyloTree) -> Result<Decomposition, TreeError> {
    if !tree.is_trivalent() || tree.leaf_count() < 3 {
        return Err(TreeError::NotTrivalent);
    }
    let root = tree.leaves.minus(LabelSet::singleton(1));
    let (m0, m1) = two_children(tree, root)?;
    Ok(Decomposition { m0, m1, t0: induced_subtree(tree, m0), t1: induced_subtree(tree, m1) })
}

fn two_children(tree: &PhyloTree, cluster: LabelSet) -> Result<(LabelSet, LabelSet), TreeError> {
    let children = tree.children(cluster);
    let [a, b] = children[..] else {
        return Err(TreeError::NotTrivalent);
    };
    let top = cluster.max().expect("non-empty cluster");
    Ok(if b.contains(top) { (a, b) } else { (b, a) })
}

/// The subtree on `{1} ∪ part`, keeping lengths of the edges strictly inside.
fn induced_subtree(tree: &PhyloTree, part: LabelSet) -> PhyloTree {
    let leaves = part | LabelSet::singleton(1);
    let splits = tree
        .splits
        .iter()
        .filter(|(s, _)| s.members().is_subset(part) && s.members() != part && s.members().len() >= 2)
        .map(|(s, l)| (Split::from_parts(leaves, s.members()), l.clone()))
        .collect();
    PhyloTree { leaves, splits }
}

/// The recursive shelling order on trivalent trees over the same leaf set:
/// compare the parts holding the largest label, then the subtrees on those
/// parts, then the remaining subtrees.
pub fn tree_order(a: &PhyloTree, b: &PhyloTree) -> Result<Ordering, TreeError> {
    if a.leaves != b.leaves {
        return Err(TreeError::MismatchedLeafSets);
    }
    if !a.is_trivalent() || !b.is_trivalent() {
        return Err(TreeError::NotTrivalent);
    }
    let root = a.leaves.minus(LabelSet::singleton(1));
    cluster_order(a, b, root)
}

fn cluster_order(a: &PhyloTree, b: &PhyloTree, cluster: LabelSet) -> Result<Ordering, TreeError> {
    if cluster.len() < 2 {
        return Ok(Ordering::Equal);
    }
    let (a0, a1) = two_children(a, cluster)?;
    let (b0, b1) = two_children(b, cluster)?;
    if a1 != b1 {
        return Ok(if subset_less(a1, b1) { Ordering::Less } else { Ordering::Greater });
    }
    match cluster_order(a, b, a1)? {
        Ordering::Equal => cluster_order(a, b, a0),
        other => {
            debug_assert_eq!(a0, b0);
            Ok(other)
        }
    }
}

/// `true` iff `a` comes strictly before `b` in [`tree_order`].
pub fn tree_less(a: &PhyloTree, b: &PhyloTree) -> Result<bool, TreeError> {
    Ok(tree_order(a, b)? == Ordering::Less)
}

/// A key whose lexicographic order equals [`tree_order`] among trivalent
/// trees over one leaf set: for each internal cluster in pre-order, the mask
/// of its child holding the largest label (that child first, then the other).
pub fn tree_order_key(tree: &PhyloTree) -> Result<Vec<u64>, TreeError> {
    if !tree.is_trivalent() {
        return Err(TreeError::NotTrivalent);
    }
    let mut key = Vec::with_capacity(tree.leaf_count());
    let mut stack = vec![tree.leaves.minus(LabelSet::singleton(1))];
    while let Some(cluster) = stack.pop() {
        if cluster.len() < 2 {
            continue;
        }
        let (c0, c1) = two_children(tree, cluster)?;
        key.push(c1.bits());
        stack.push(c0);
        stack.push(c1);
    }
    Ok(key)
}

/// Path-length metric, indexed by position in the sorted leaf set. Leaf edge
/// lengths default to 0.
pub fn tree_metric(tree: &PhyloTree, leaf_lengths: Option<&BTreeMap<usize, Rat>>) -> RatMatrix {
    let labels = tree.leaves.to_vec();
    let k = labels.len();
    let mut m = RatMatrix::zeros(k, k);
    let zero = Rat::zero();
    let pendant = |l: usize| leaf_lengths.and_then(|map| map.get(&l)).unwrap_or(&zero);
    for i in 0..k {
        for j in i + 1..k {
            let (li, lj) = (labels[i], labels[j]);
            let mut total = pendant(li) + pendant(lj);
            for (split, length) in &tree.splits {
                if split.members().contains(li) != split.members().contains(lj) {
                    total += length;
                }
            }
            m.set(i, j, total.clone());
            m.set(j, i, total);
        }
    }
    m
}

/// Recovers the internal splits and their lengths from a tree metric on
/// `{1, …, k}` via isolation indices. Exponential in `k`; intended for
/// `k ≤ 16`.
pub fn tree_from_metric(metric: &RatMatrix) -> Result<PhyloTree, TreeError> {
    let k = metric.rows();
    if metric.cols() != k {
        return Err(TreeError::NotTreeMetric("metric is not square"));
    }
    if !(2..=16).contains(&k) {
        return Err(TreeError::LeafCount(k));
    }
    let leaves = LabelSet::full(k);
    let d = |i: usize, j: usize| metric.get(i - 1, j - 1);
    let two = Rat::from_int(2);
    let mut splits = Vec::new();
    for bits in 1u64..(1 << (k - 1)) {
        let members = LabelSet::from_bits(bits << 1);
        if members.len() < 2 || members.len() > k - 2 {
            continue;
        }
        let rest = leaves.minus(members);
        let mut best: Option<Rat> = None;
        for i in rest.iter() {
            for j in rest.iter().filter(|&j| j >= i) {
                for x in members.iter() {
                    for y in members.iter().filter(|&y| y >= x) {
                        let cross = std::cmp::max(d(i, x) + d(j, y), d(i, y) + d(j, x));
                        let value = cross - d(i, j) - d(x, y);
                        if best.as_ref().map_or(true, |b| value < *b) {
                            best = Some(value);
                        }
                    }
                }
            }
        }
        let index = best.expect("both sides non-empty") / &two;
        if index.is_negative() {
            return Err(TreeError::NotTreeMetric("negative isolation index"));
        }
        if index.is_positive() {
            splits.push((Split::from_parts(leaves, members), index));
        }
    }
    PhyloTree::with_leaf_set(leaves, splits)
}

/// Every unrooted trivalent tree on `{1, …, leaves}` exactly once, with unit
/// lengths, by inserting leaves `4, 5, …` into every edge in turn (leaf edges
/// by label, leaf 1 first, then internal edges in canonical order).
pub fn enumerate_trivalent_trees(leaves: usize) -> TrivalentTrees {
    assert!((3..=MAX_LEAVES).contains(&leaves), "need 3..=64 leaves");
    TrivalentTrees { target: leaves, stack: vec![(4, Vec::new())] }
}

pub struct TrivalentTrees {
    target: usize,
    stack: Vec<(usize, Vec<LabelSet>)>,
}

impl Iterator for TrivalentTrees {
    type Item = PhyloTree;

    fn next(&mut self) -> Option<PhyloTree> {
        loop {
            let (next_leaf, clusters) = self.stack.pop()?;
            if next_leaf > self.target {
                return Some(PhyloTree::from_clusters(LabelSet::full(self.target), clusters));
            }
            let current = next_leaf - 1;
            let mut edges: Vec<LabelSet> = vec![LabelSet::range(2, current)];
            edges.extend((2..=current).map(LabelSet::singleton));
            edges.extend(clusters.iter().copied());
            let grown = LabelSet::full(next_leaf);
            let new_leaf = LabelSet::singleton(next_leaf);
            let children: Vec<Vec<LabelSet>> = edges
                .iter()
                .map(|&edge| {
                    let mut set: BTreeSet<u64> = clusters
                        .iter()
                        .map(|&s| if edge.is_subset(s) { (s | new_leaf).bits() } else { s.bits() })
                        .collect();
                    set.insert(edge.bits());
                    set.insert((edge | new_leaf).bits());
                    let mut out: Vec<LabelSet> = set
                        .into_iter()
                        .map(LabelSet::from_bits)
                        .filter(|m| m.len() >= 2 && m.len() + 2 <= grown.len())
                        .collect();
                    out.sort_by(|a, b| a.cmp_lex(*b));
                    out
                })
                .collect();
            for child in children.into_iter().rev() {
                self.stack.push((next_leaf + 1, child));
            }
        }
    }
}

/// Trivalent trees on `n + d` leaves all of whose splits are bicolored: the
/// facets of the complex of collinear configurations. Empty when
/// `n + d < 4`.
pub fn enumerate_facets(coloring: Coloring) -> impl Iterator<Item = PhyloTree> {
    let leaves = coloring.leaves();
    let trees = (leaves >= 4).then(|| enumerate_trivalent_trees(leaves));
    trees.into_iter().flatten().filter(move |t| t.all_bicolored(&coloring))
}

/// `(2k - 5)!!`, the number of trivalent trees on `k ≥ 3` leaves.
pub fn trivalent_tree_count(leaves: usize) -> u128 {
    (3..=leaves).map(|k| (2 * k - 5) as u128).product()
}
