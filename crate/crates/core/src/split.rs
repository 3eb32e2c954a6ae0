//! Leaf label sets, splits and leaf colorings.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::TreeError;

/// Largest supported leaf label.
pub const MAX_LEAVES: usize = 64;

/// A set of leaf labels drawn from `1..=64`, stored as a bitmask with label
/// `i` at bit `i - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LabelSet(u64);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn from_bits(bits: u64) -> Self {
        LabelSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// `{1, …, n}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_LEAVES);
        if n == MAX_LEAVES {
            LabelSet(u64::MAX)
        } else {
            LabelSet((1u64 << n) - 1)
        }
    }

    /// `{lo, …, hi}`; empty when `lo > hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        if lo > hi {
            return LabelSet::EMPTY;
        }
        LabelSet(LabelSet::full(hi).0 & !LabelSet::full(lo - 1).0)
    }

    pub fn singleton(label: usize) -> Self {
        assert!((1..=MAX_LEAVES).contains(&label), "label {label} out of range");
        LabelSet(1u64 << (label - 1))
    }

    pub fn contains(self, label: usize) -> bool {
        (1..=MAX_LEAVES).contains(&label) && self.0 >> (label - 1) & 1 == 1
    }

    pub fn insert(&mut self, label: usize) {
        *self = *self | LabelSet::singleton(label);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros() as usize)
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn is_subset(self, other: LabelSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: LabelSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn minus(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & !other.0)
    }

    /// Labels in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let low = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(low + 1)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Compares sorted label lists lexicographically (`{2,3} < {2,3,4} < {2,4}`).
    pub fn cmp_lex(self, other: LabelSet) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl std::ops::BitOr for LabelSet {
    type Output = LabelSet;
    fn bitor(self, rhs: LabelSet) -> LabelSet {
        LabelSet(self.0 | rhs.0)
    }
}

impl std::ops::BitAnd for LabelSet {
    type Output = LabelSet;
    fn bitand(self, rhs: LabelSet) -> LabelSet {
        LabelSet(self.0 & rhs.0)
    }
}

impl FromIterator<usize> for LabelSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(LabelSet::EMPTY, |acc, l| acc | LabelSet::singleton(l))
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for LabelSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// The order on subsets used by the shelling: `A < B` iff the largest label
/// of the symmetric difference lies in `B`. Equal sets are not less.
///
/// With labels as bit positions this is numeric comparison of the masks.
pub fn subset_less(a: LabelSet, b: LabelSet) -> bool {
    a.0 < b.0
}

/// A bipartition of a leaf set, stored as its edge label: the part that does
/// not contain leaf 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Split {
    universe: LabelSet,
    members: LabelSet,
}

impl Split {
    /// A split of `universe` (which must contain leaf 1) with the given edge
    /// label.
    pub fn with_universe(universe: LabelSet, members: LabelSet) -> Result<Split, TreeError> {
        if !universe.contains(1) {
            return Err(TreeError::MissingLeafOne);
        }
        if members.contains(1) {
            return Err(TreeError::InvalidSplit { members: members.to_vec(), reason: "edge label contains leaf 1" });
        }
        if members.is_empty() {
            return Err(TreeError::InvalidSplit { members: vec![], reason: "edge label is empty" });
        }
        if !members.is_subset(universe) {
            return Err(TreeError::InvalidSplit {
                members: members.to_vec(),
                reason: "edge label has labels outside the leaf set",
            });
        }
        Ok(Split { universe, members })
    }

    /// A split of `{1, …, leaves}`.
    pub fn new(leaves: usize, members: impl IntoIterator<Item = usize>) -> Result<Split, TreeError> {
        if !(2..=MAX_LEAVES).contains(&leaves) {
            return Err(TreeError::LeafCount(leaves));
        }
        let mut set = LabelSet::EMPTY;
        for m in members {
            if m == 0 || m > leaves {
                return Err(TreeError::InvalidSplit { members: vec![m], reason: "label out of range" });
            }
            set.insert(m);
        }
        Split::with_universe(LabelSet::full(leaves), set)
    }

    pub(crate) fn from_parts(universe: LabelSet, members: LabelSet) -> Split {
        debug_assert!(universe.contains(1) && !members.contains(1) && members.is_subset(universe));
        Split { universe, members }
    }

    pub fn universe(&self) -> LabelSet {
        self.universe
    }

    /// The edge label.
    pub fn members(&self) -> LabelSet {
        self.members
    }

    /// The part containing leaf 1.
    pub fn complement(&self) -> LabelSet {
        self.universe.minus(self.members)
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1 || self.complement().len() == 1
    }

    pub fn compatible_with(&self, other: &Split) -> Result<bool, TreeError> {
        if self.universe != other.universe {
            return Err(TreeError::MismatchedLeafSets);
        }
        Ok(labels_compatible(self.members, other.members))
    }
}

/// Edge labels (neither containing leaf 1) are compatible iff nested or
/// disjoint; this is the four-intersection test with `A' ∩ B' ∋ 1` removed.
pub(crate) fn labels_compatible(a: LabelSet, b: LabelSet) -> bool {
    a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b)
}

/// Compatibility of two splits over the same leaf set.
pub fn compatible(a: &Split, b: &Split) -> Result<bool, TreeError> {
    a.compatible_with(b)
}

impl Ord for Split {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members.cmp_lex(other.members).then_with(|| self.universe.0.cmp(&other.universe.0))
    }
}

impl PartialOrd for Split {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{:?}", self.complement(), self.members)
    }
}

/// Marked leaves `1..=n` (points) and unmarked leaves `n+1..=n+d`; leaf
/// `n + i` carries direction `e_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Coloring {
    pub n: usize,
    pub d: usize,
}

impl Coloring {
    pub fn new(n: usize, d: usize) -> Result<Coloring, TreeError> {
        if n == 0 || d == 0 {
            return Err(TreeError::EmptyColor { n, d });
        }
        if n + d > MAX_LEAVES {
            return Err(TreeError::LeafCount(n + d));
        }
        Ok(Coloring { n, d })
    }

    pub fn leaves(&self) -> usize {
        self.n + self.d
    }

    pub fn universe(&self) -> LabelSet {
        LabelSet::full(self.leaves())
    }

    pub fn marked(&self) -> LabelSet {
        LabelSet::full(self.n)
    }

    pub fn unmarked(&self) -> LabelSet {
        LabelSet::range(self.n + 1, self.n + self.d)
    }

    pub fn is_marked(&self, label: usize) -> bool {
        label <= self.n
    }

    /// Both sides of the split contain a marked and an unmarked leaf.
    pub fn is_bicolored(&self, split: &Split) -> bool {
        self.labels_bicolored(split.members())
    }

    pub(crate) fn labels_bicolored(&self, members: LabelSet) -> bool {
        let rest = self.universe().minus(members);
        let (marked, unmarked) = (self.marked(), self.unmarked());
        !(members & marked).is_empty()
            && !(members & unmarked).is_empty()
            && !(rest & marked).is_empty()
            && !(rest & unmarked).is_empty()
    }
}

/// Free-function form of [`Coloring::is_bicolored`]; errors if the split is
/// not over `{1, …, n + d}`.
pub fn is_bicolored(split: &Split, coloring: &Coloring) -> Result<bool, TreeError> {
    if split.universe() != coloring.universe() {
        return Err(TreeError::MismatchedLeafSets);
    }
    Ok(coloring.is_bicolored(split))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, m: &[usize]) -> Split {
        Split::new(n, m.iter().copied()).unwrap()
    }

    #[test]
    fn compatibility_examples() {
        assert!(compatible(&s(6, &[2, 3]), &s(6, &[4, 5])).unwrap());
        assert!(compatible(&s(6, &[2, 3]), &s(6, &[2, 3, 4])).unwrap());
        assert!(!compatible(&s(6, &[2, 3]), &s(6, &[3, 4])).unwrap());
        assert_eq!(compatible(&s(6, &[2, 3]), &s(7, &[2, 3])), Err(TreeError::MismatchedLeafSets));
    }

    /// Four-intersection definition, independent of the nested/disjoint shortcut.
    fn compatible_by_definition(a: &Split, b: &Split) -> bool {
        let (a1, a2) = (a.members(), a.complement());
        let (b1, b2) = (b.members(), b.complement());
        [(a1, b1), (a1, b2), (a2, b1), (a2, b2)].iter().any(|(x, y)| x.is_disjoint(*y))
    }

    #[test]
    fn compatibility_matches_definition_exhaustively() {
        let n = 6;
        let all: Vec<Split> = (1u64..1 << (n - 1))
            .map(|bits| Split::with_universe(LabelSet::full(n), LabelSet::from_bits(bits << 1)).unwrap())
            .collect();
        for a in &all {
            for b in &all {
                let c = compatible(a, b).unwrap();
                assert_eq!(c, compatible_by_definition(a, b), "{a:?} {b:?}");
                assert_eq!(c, compatible(b, a).unwrap());
                if b.is_singleton() {
                    assert!(c);
                }
            }
        }
    }

    #[test]
    fn bicolored_examples() {
        let c = Coloring::new(5, 3).unwrap();
        assert!(is_bicolored(&s(8, &[2, 4, 5, 8]), &c).unwrap());
        let c = Coloring::new(3, 3).unwrap();
        assert!(!is_bicolored(&s(6, &[2, 3]), &c).unwrap());
        for leaf in 2..=6 {
            assert!(!c.is_bicolored(&s(6, &[leaf])));
        }
        assert!(!c.is_bicolored(&s(6, &[2, 3, 4, 5, 6])));
    }

    #[test]
    fn subset_order_examples() {
        let set = |v: &[usize]| v.iter().copied().collect::<LabelSet>();
        assert!(subset_less(set(&[1, 3]), set(&[2, 3])));
        assert!(!subset_less(set(&[2, 3]), set(&[1, 3])));
        assert!(!subset_less(set(&[2, 3]), set(&[2, 3])));
    }

    fn subset_less_by_definition(a: LabelSet, b: LabelSet) -> bool {
        let sym = a.minus(b) | b.minus(a);
        sym.max().is_some_and(|m| b.contains(m))
    }

    #[test]
    fn subset_order_is_strict_total_order() {
        let sets: Vec<LabelSet> = (0u64..1 << 6).map(LabelSet::from_bits).collect();
        for &a in &sets {
            for &b in &sets {
                assert_eq!(subset_less(a, b), subset_less_by_definition(a, b));
                if a != b {
                    assert!(subset_less(a, b) ^ subset_less(b, a));
                } else {
                    assert!(!subset_less(a, b));
                }
                for &c in &sets {
                    if subset_less(a, b) && subset_less(b, c) {
                        assert!(subset_less(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn split_validation() {
        assert!(Split::new(5, [1, 2]).is_err());
        assert!(Split::new(5, []).is_err());
        assert!(Split::new(5, [6]).is_err());
        assert!(Split::new(1, [1]).is_err());
        assert!(s(5, &[2]).is_singleton());
        assert!(s(5, &[2, 3, 4, 5]).is_singleton());
        assert!(!s(5, &[4, 5]).is_singleton());
    }

    #[test]
    fn label_set_basics() {
        let x: LabelSet = [5, 2, 9].into_iter().collect();
        assert_eq!(x.to_vec(), vec![2, 5, 9]);
        assert_eq!(x.max(), Some(9));
        assert_eq!(x.min(), Some(2));
        assert_eq!(LabelSet::range(3, 5).to_vec(), vec![3, 4, 5]);
        assert!(LabelSet::range(4, 3).is_empty());
        assert_eq!(LabelSet::full(64).len(), 64);
        assert_eq!(s(6, &[2, 3]).cmp(&s(6, &[2, 3, 4])), Ordering::Less);
        assert_eq!(s(6, &[2, 3, 4]).cmp(&s(6, &[2, 4])), Ordering::Less);
    }
}
