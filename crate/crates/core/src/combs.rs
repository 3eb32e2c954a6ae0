//! Combs and the closed formula for the top homology rank.
//!
//! A comb is a caterpillar `1, c_1, …, c_{N-2}, N` whose second leaf is
//! unmarked, whose second-to-last leaf is marked, and in which any two
//! consecutive leaves of the same color appear in increasing order.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rat::Rat;
use crate::split::{Coloring, LabelSet, Split};
use crate::tree::PhyloTree;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Comb {
    sequence: Vec<usize>,
}

impl Comb {
    /// The full leaf sequence `1, c_1, …, c_{N-2}, N`.
    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    /// Builds a comb from its middle labels `c_1, …, c_{N-2}` if they satisfy
    /// the comb conditions for `coloring`.
    pub fn from_middle(coloring: Coloring, middle: &[usize]) -> Option<Comb> {
        let leaves = coloring.leaves();
        if leaves < 4 || middle.len() + 2 != leaves {
            return None;
        }
        let set: LabelSet = middle.iter().copied().collect();
        if set != LabelSet::range(2, leaves - 1) || set.len() != middle.len() {
            return None;
        }
        is_comb_sequence(coloring, middle).then(|| {
            let mut sequence = Vec::with_capacity(leaves);
            sequence.push(1);
            sequence.extend_from_slice(middle);
            sequence.push(leaves);
            Comb { sequence }
        })
    }

    /// The caterpillar with splits `{c_k, …, c_{N-2}, N}` for `k = 2..N-2`,
    /// unit lengths.
    pub fn to_tree(&self) -> PhyloTree {
        let leaves = self.sequence.len();
        let universe = LabelSet::full(leaves);
        let splits = (2..leaves - 1).map(|k| {
            let members: LabelSet = self.sequence[k..].iter().copied().collect();
            (Split::from_parts(universe, members), Rat::one())
        });
        PhyloTree::with_leaf_set(universe, splits).expect("caterpillar splits are nested")
    }

    /// Reads a comb off a tree, if the tree is a caterpillar with cherries
    /// `{1, c_1}` and `{c_{N-2}, N}` satisfying the comb conditions.
    pub fn from_tree(tree: &PhyloTree, coloring: Coloring) -> Option<Comb> {
        let leaves = coloring.leaves();
        if tree.leaves() != coloring.universe() || !tree.is_trivalent() || leaves < 4 {
            return None;
        }
        let mut chain = tree.clusters();
        chain.sort_by_key(|c| std::cmp::Reverse(c.len()));
        let last = LabelSet::singleton(leaves);
        let mut outer = coloring.universe().minus(LabelSet::singleton(1));
        let mut middle = Vec::with_capacity(leaves - 2);
        for cluster in chain.into_iter().chain(std::iter::once(last)) {
            let peeled = outer.minus(cluster);
            if !cluster.is_subset(outer) || !cluster.contains(leaves) || peeled.len() != 1 {
                return None;
            }
            middle.extend(peeled.iter());
            outer = cluster;
        }
        Comb::from_middle(coloring, &middle)
    }
}

fn is_comb_sequence(coloring: Coloring, middle: &[usize]) -> bool {
    let (Some(&first), Some(&last)) = (middle.first(), middle.last()) else {
        return false;
    };
    !coloring.is_marked(first)
        && coloring.is_marked(last)
        && middle.windows(2).all(|w| coloring.is_marked(w[0]) != coloring.is_marked(w[1]) || w[0] < w[1])
}

/// Every comb for `coloring`, in lexicographic order of leaf sequences.
pub fn enumerate_combs(coloring: Coloring) -> Vec<Comb> {
    let mut out = Vec::new();
    walk_combs(coloring, &mut |middle| {
        out.push(Comb::from_middle(coloring, middle).expect("walk yields combs"));
    });
    out
}

/// Number of combs, without materializing them.
pub fn count_combs(coloring: Coloring) -> u64 {
    let mut count = 0;
    walk_combs(coloring, &mut |_| count += 1);
    count
}

fn walk_combs(coloring: Coloring, visit: &mut dyn FnMut(&[usize])) {
    let leaves = coloring.leaves();
    if leaves < 4 {
        return;
    }
    let mut middle = Vec::with_capacity(leaves - 2);
    extend_comb(coloring, LabelSet::range(2, leaves - 1), &mut middle, visit);
}

fn extend_comb(coloring: Coloring, remaining: LabelSet, middle: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if remaining.is_empty() {
        if middle.last().is_some_and(|&l| coloring.is_marked(l)) {
            visit(middle);
        }
        return;
    }
    for label in remaining.iter() {
        let allowed = match middle.last() {
            None => !coloring.is_marked(label),
            Some(&prev) => coloring.is_marked(prev) != coloring.is_marked(label) || prev < label,
        };
        if allowed {
            middle.push(label);
            extend_comb(coloring, remaining.minus(LabelSet::singleton(label)), middle, visit);
            middle.pop();
        }
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// `Σ_i (-1)^{k-i} C(k, i) i^m`, which equals `k! · S(m, k)`.
fn surjections(m: u32, k: u32) -> BigInt {
    (0..=k).fold(BigInt::zero(), |acc, i| {
        let term = binomial(k, i) * BigInt::from(i).pow(m);
        if (k - i) % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

/// Stirling number of the second kind `S(m, k)`.
pub fn stirling2(m: u32, k: u32) -> BigInt {
    if k > m {
        return BigInt::zero();
    }
    surjections(m, k) / factorial(k)
}

/// `Σ_{k=1}^{min(n-1, d-1)} (k!)^2 S(n-1, k) S(d-1, k)`.
pub fn rank_formula_stirling(coloring: Coloring) -> BigInt {
    let (n, d) = (coloring.n as u32 - 1, coloring.d as u32 - 1);
    (1..=n.min(d)).map(|k| factorial(k).pow(2) * stirling2(n, k) * stirling2(d, k)).sum()
}

/// The same sum with each `k! S(m, k)` written as an alternating sum.
pub fn rank_formula_alternating(coloring: Coloring) -> BigInt {
    let (n, d) = (coloring.n as u32 - 1, coloring.d as u32 - 1);
    (1..=n.min(d)).map(|k| surjections(n, k) * surjections(d, k)).sum()
}

/// Rank of the top homology of the complex for `coloring`.
pub fn homology_rank_formula(coloring: Coloring) -> BigInt {
    let value = rank_formula_stirling(coloring);
    assert_eq!(value, rank_formula_alternating(coloring), "the two forms of the rank formula disagree");
    value
}
