//! The flag complex of bicolored splits.
//!
//! Vertices are the non-singleton bicolored splits of `{1, …, n + d}` in
//! canonical order; a vertex set is a face iff its splits are pairwise
//! compatible. Faces are stored as sorted vertex-index lists, which also fixes
//! the orientation used by the boundary maps.

use std::collections::HashMap;

use crate::error::ComplexError;
use crate::split::{labels_compatible, Coloring, LabelSet, Split};
use crate::tree::PhyloTree;

/// Sorted vertex indices.
pub type Face = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn new(len: usize) -> Self {
        BitRow(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn and(&self, other: &BitRow) -> BitRow {
        BitRow(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn minus(&self, other: &BitRow) -> BitRow {
        BitRow(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            let mut rest = bits;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let low = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + low)
            })
        })
    }

    /// Ones strictly above `i`.
    fn above(&self, i: usize) -> BitRow {
        let mut out = self.clone();
        for w in 0..out.0.len() {
            let lo = w * 64;
            if lo + 63 <= i {
                out.0[w] = 0;
            } else if lo <= i {
                let keep = i - lo + 1;
                out.0[w] &= if keep >= 64 { 0 } else { !0u64 << keep };
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct CollinearComplex {
    coloring: Coloring,
    vertices: Vec<Split>,
    index: HashMap<LabelSet, u32>,
    adjacency: Vec<BitRow>,
}

/// The complex on all bicolored splits for this coloring. Empty when
/// `n = 1` or `d = 1`.
pub fn build_complex(coloring: Coloring) -> CollinearComplex {
    let universe = coloring.universe();
    let leaves = coloring.leaves();
    let mut vertices: Vec<Split> = if leaves < 4 {
        Vec::new()
    } else {
        (1u64..1 << (leaves - 1))
            .map(|bits| LabelSet::from_bits(bits << 1))
            .filter(|m| m.len() >= 2 && m.len() + 2 <= leaves && coloring.labels_bicolored(*m))
            .map(|m| Split::from_parts(universe, m))
            .collect()
    };
    vertices.sort();
    let index = vertices.iter().enumerate().map(|(i, s)| (s.members(), i as u32)).collect();
    let adjacency = vertices
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut row = BitRow::new(vertices.len());
            for (j, b) in vertices.iter().enumerate() {
                if i != j && labels_compatible(a.members(), b.members()) {
                    row.set(j);
                }
            }
            row
        })
        .collect();
    CollinearComplex { coloring, vertices, index, adjacency }
}

impl CollinearComplex {
    pub fn coloring(&self) -> Coloring {
        self.coloring
    }

    pub fn vertices(&self) -> &[Split] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_index(&self, split: &Split) -> Option<u32> {
        (split.universe() == self.coloring.universe()).then(|| self.index.get(&split.members()).copied()).flatten()
    }

    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        self.adjacency[a as usize].get(b as usize)
    }

    /// Whether the vertex set spans a face (is pairwise compatible).
    pub fn is_face(&self, face: &[u32]) -> bool {
        face.iter().enumerate().all(|(i, &a)| face[i + 1..].iter().all(|&b| self.adjacent(a, b)))
    }

    /// Expected facet size `n + d - 3`.
    pub fn facet_size(&self) -> usize {
        self.coloring.leaves().saturating_sub(3)
    }

    /// The vertex indices of a tree's splits, or `None` if some split is not
    /// a vertex.
    pub fn face_of_tree(&self, tree: &PhyloTree) -> Option<Face> {
        let mut face: Face = tree.splits().map(|s| self.vertex_index(s)).collect::<Option<_>>()?;
        face.sort_unstable();
        Some(face)
    }

    pub fn tree_of_face(&self, face: &[u32]) -> PhyloTree {
        PhyloTree::from_clusters(self.coloring.universe(), face.iter().map(|&v| self.vertices[v as usize].members()))
    }

    /// Number of faces of each dimension `0, 1, …`, stopping as soon as the
    /// running total passes `cap`.
    pub fn face_counts(&self, cap: Option<usize>) -> Result<Vec<usize>, ComplexError> {
        let mut counts = Vec::new();
        let mut total = 0usize;
        let mut over = false;
        self.walk_cliques(&mut |size, _| {
            if counts.len() < size {
                counts.resize(size, 0);
            }
            counts[size - 1] += 1;
            total += 1;
            over = cap.is_some_and(|c| total > c);
            !over
        });
        match cap {
            Some(cap) if over => Err(ComplexError::FaceCap { counts, total, cap }),
            _ => Ok(counts),
        }
    }

    /// All non-empty faces grouped by dimension, each list sorted
    /// lexicographically.
    pub fn faces(&self, cap: Option<usize>) -> Result<Vec<Vec<Face>>, ComplexError> {
        self.face_counts(cap)?;
        let mut by_dim: Vec<Vec<Face>> = Vec::new();
        self.walk_cliques(&mut |size, face| {
            if by_dim.len() < size {
                by_dim.resize(size, Vec::new());
            }
            by_dim[size - 1].push(face.to_vec());
            true
        });
        for faces in &mut by_dim {
            faces.sort_unstable();
        }
        Ok(by_dim)
    }

    /// Depth-first clique extension by increasing vertex index; `visit`
    /// returns `false` to stop.
    fn walk_cliques(&self, visit: &mut dyn FnMut(usize, &[u32]) -> bool) {
        let mut all = BitRow::new(self.vertices.len());
        for v in 0..self.vertices.len() {
            all.set(v);
        }
        let mut face = Vec::new();
        self.extend_clique(&all, &mut face, visit);
    }

    fn extend_clique(
        &self,
        candidates: &BitRow,
        face: &mut Vec<u32>,
        visit: &mut dyn FnMut(usize, &[u32]) -> bool,
    ) -> bool {
        for v in candidates.ones() {
            face.push(v as u32);
            if !visit(face.len(), face) {
                return false;
            }
            let next = candidates.and(&self.adjacency[v]).above(v);
            if !next.is_empty() && !self.extend_clique(&next, face, visit) {
                return false;
            }
            face.pop();
        }
        true
    }

    /// Maximal faces (maximal cliques of the compatibility graph), sorted.
    pub fn maximal_faces(&self) -> Vec<Face> {
        let mut out = Vec::new();
        let n = self.vertices.len();
        if n == 0 {
            return out;
        }
        let mut all = BitRow::new(n);
        for v in 0..n {
            all.set(v);
        }
        self.bron_kerbosch(&mut Vec::new(), all, BitRow::new(n), &mut out);
        for f in &mut out {
            f.sort_unstable();
        }
        out.sort_unstable();
        out
    }

    fn bron_kerbosch(&self, r: &mut Vec<u32>, mut p: BitRow, mut x: BitRow, out: &mut Vec<Face>) {
        if p.is_empty() {
            if x.is_empty() {
                out.push(r.clone());
            }
            return;
        }
        let pivot =
            p.ones().chain(x.ones()).max_by_key(|&u| p.and(&self.adjacency[u]).ones().count()).expect("p is non-empty");
        let branch: Vec<usize> = p.minus(&self.adjacency[pivot]).ones().collect();
        for v in branch {
            r.push(v as u32);
            self.bron_kerbosch(r, p.and(&self.adjacency[v]), x.and(&self.adjacency[v]), out);
            r.pop();
            p.0[v / 64] &= !(1 << (v % 64));
            x.set(v);
        }
    }

    /// Checks that every maximal face has `n + d - 3` vertices.
    pub fn check_pure(&self) -> Result<(), ComplexError> {
        let mut sizes: Vec<usize> = self.maximal_faces().iter().map(Vec::len).collect();
        sizes.sort_unstable();
        sizes.dedup();
        if sizes.iter().any(|&s| s != self.facet_size()) {
            return Err(ComplexError::NotPure(sizes));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enumerate_facets;

    fn complex(n: usize, d: usize) -> CollinearComplex {
        build_complex(Coloring::new(n, d).unwrap())
    }

    #[test]
    fn small_complexes() {
        let c = complex(2, 2);
        assert_eq!(c.vertex_count(), 2);
        assert_eq!(c.maximal_faces(), vec![vec![0], vec![1]]);
        assert_eq!(c.face_counts(None).unwrap(), vec![2]);
        for d in 1..=5 {
            assert!(complex(1, d).is_empty());
            assert!(complex(d, 1).is_empty());
        }
    }

    /// Bicolored bipartitions of [6] with n = d = 3 counted straight from the
    /// definition over all 2^5 - 1 edge labels.
    #[test]
    fn vertex_count_three_three() {
        let c = Coloring::new(3, 3).unwrap();
        let mut count = 0;
        for bits in 1u32..32 {
            let b: Vec<usize> = (2..=6).filter(|l| bits >> (l - 2) & 1 == 1).collect();
            let a: Vec<usize> = (1..=6).filter(|l| !b.contains(l)).collect();
            let two_colors = |side: &[usize]| side.iter().any(|&l| l <= 3) && side.iter().any(|&l| l > 3);
            if (2..=4).contains(&b.len()) && two_colors(&a) && two_colors(&b) {
                count += 1;
            }
        }
        assert_eq!(count, 18);
        assert_eq!(build_complex(c).vertex_count(), 18);
    }

    #[test]
    fn face_counts_match_clique_counts() {
        assert_eq!(complex(3, 3).face_counts(None).unwrap(), vec![18, 54, 42]);
        assert_eq!(complex(3, 4).face_counts(None).unwrap(), vec![42, 258, 492, 288]);
        let faces = complex(3, 3).faces(None).unwrap();
        assert!(faces.iter().flatten().all(|f| complex(3, 3).is_face(f)));
    }

    #[test]
    fn cap_is_enforced() {
        let err = complex(3, 4).face_counts(Some(100)).unwrap_err();
        assert!(matches!(err, ComplexError::FaceCap { cap: 100, total: 101, .. }), "{err:?}");
        assert!(complex(3, 4).faces(Some(1080)).is_ok());
    }

    #[test]
    fn maximal_cliques_are_the_facets() {
        for (n, d) in [(2, 2), (2, 3), (3, 3), (3, 4), (2, 5)] {
            let cx = complex(n, d);
            let mut facets: Vec<Face> = enumerate_facets(cx.coloring()).map(|t| cx.face_of_tree(&t).unwrap()).collect();
            facets.sort();
            assert_eq!(cx.maximal_faces(), facets, "({n},{d})");
            cx.check_pure().unwrap();
        }
    }

    #[test]
    fn tree_face_round_trip() {
        let cx = complex(3, 3);
        for t in enumerate_facets(cx.coloring()) {
            let f = cx.face_of_tree(&t).unwrap();
            assert!(cx.tree_of_face(&f).same_topology(&t));
        }
    }

    #[test]
    fn bitrow_above() {
        let mut r = BitRow::new(130);
        for i in [0, 5, 63, 64, 65, 127, 128, 129] {
            r.set(i);
        }
        assert_eq!(r.above(5).ones().collect::<Vec<_>>(), vec![63, 64, 65, 127, 128, 129]);
        assert_eq!(r.above(63).ones().collect::<Vec<_>>(), vec![64, 65, 127, 128, 129]);
        assert_eq!(r.above(64).ones().collect::<Vec<_>>(), vec![65, 127, 128, 129]);
        assert_eq!(r.above(128).ones().collect::<Vec<_>>(), vec![129]);
    }
}
