//! The relative evaluation map from trees on `n + d` leaves to configurations
//! of `n` points in `TP^{d-1}`, and its inverse.
//!
//! A split `A|B` (leaf 1 in `A`) pushes every marked point in `B` away from
//! the first point by `u = Σ e_i` over unmarked leaves `n + i ∈ B`. A tree
//! contributes the length-weighted sum over its splits. Entry `(i, j)` of the
//! result is therefore the total length of the clusters holding both marked
//! leaf `j` and unmarked leaf `n + i`: the depth, seen from leaf 1, of the
//! vertex where their paths meet. [`canonical_tree`] inverts the map by
//! peeling those depths off level by level.

use serde::Serialize;

use crate::error::EvalError;
use crate::rat::Rat;
use crate::split::{Coloring, LabelSet, Split};
use crate::tree::PhyloTree;
use crate::tropical::{normalize_point, tropical_rank_le2, ProjectivePoint, RankVerdict, RatMatrix};

/// The direction of the edge `split` as it leaves the side of leaf 1: the
/// sum of `e_i` over unmarked leaves `n + i` in the edge label.
pub fn edge_direction(split: &Split, coloring: &Coloring) -> Vec<Rat> {
    (1..=coloring.d).map(|i| if split.members().contains(coloring.n + i) { Rat::one() } else { Rat::zero() }).collect()
}

fn check_universe(tree_leaves: LabelSet, coloring: &Coloring) -> Result<(), EvalError> {
    if tree_leaves != coloring.universe() {
        return Err(EvalError::Shape {
            expected: format!("leaf set 1..={}", coloring.leaves()),
            found: format!("{tree_leaves:?}"),
        });
    }
    Ok(())
}

/// `d × n` image of a single split. Zero for singleton and non-bicolored
/// splits.
pub fn pi_split(split: &Split, coloring: &Coloring) -> Result<RatMatrix, EvalError> {
    check_universe(split.universe(), coloring)?;
    let mut m = RatMatrix::zeros(coloring.d, coloring.n);
    if split.is_singleton() || !coloring.is_bicolored(split) {
        return Ok(m);
    }
    let u = edge_direction(split, coloring);
    for j in split.members().iter().filter(|&j| j <= coloring.n) {
        for (i, ui) in u.iter().enumerate() {
            m.set(i, j - 1, ui.clone());
        }
    }
    Ok(m)
}

/// Length-weighted sum of [`pi_split`] over the tree's splits: the marked
/// points relative to the first one.
pub fn pi_tree(tree: &PhyloTree, coloring: &Coloring) -> Result<RatMatrix, EvalError> {
    check_universe(tree.leaves(), coloring)?;
    let mut m = RatMatrix::zeros(coloring.d, coloring.n);
    for (split, length) in tree.lengths() {
        m = m.add(&pi_split(split, coloring)?.scale(length));
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasepointMode {
    Absolute,
    /// Point 1 sits at the origin and the others are offsets from it.
    RelativeToFirst,
}

/// `n` points of `TP^{d-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointConfig {
    pub mode: BasepointMode,
    points: Vec<ProjectivePoint>,
}

impl PointConfig {
    pub fn new(points: Vec<ProjectivePoint>, mode: BasepointMode) -> Result<PointConfig, EvalError> {
        let Some(first) = points.first() else {
            return Err(EvalError::Shape { expected: "at least one point".into(), found: "none".into() });
        };
        let d = first.dim();
        if let Some(bad) = points.iter().find(|p| p.dim() != d) {
            return Err(EvalError::Shape {
                expected: format!("dimension {d}"),
                found: format!("dimension {}", bad.dim()),
            });
        }
        if mode == BasepointMode::RelativeToFirst && first.coords().iter().any(|c| !c.is_zero()) {
            return Err(EvalError::Shape { expected: "first point at the origin".into(), found: format!("{first:?}") });
        }
        Ok(PointConfig { mode, points })
    }

    /// Columns of `m` as absolute points.
    pub fn from_matrix(m: &RatMatrix) -> PointConfig {
        let points = (0..m.cols()).map(|c| normalize_point(&m.column(c))).collect();
        PointConfig { mode: BasepointMode::Absolute, points }
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn d(&self) -> usize {
        self.points[0].dim()
    }

    pub fn to_matrix(&self) -> RatMatrix {
        RatMatrix::from_columns(self.points.iter().map(|p| p.coords().to_vec()).collect())
    }

    /// The same configuration translated so that point 1 is the origin.
    pub fn relative(&self) -> PointConfig {
        let base: Vec<Rat> = self.points[0].coords().iter().map(|c| -c).collect();
        PointConfig {
            mode: BasepointMode::RelativeToFirst,
            points: self.points.iter().map(|p| p.translate(&base)).collect(),
        }
    }
}

/// A tree with coloring and the image of the first marked point; together
/// they determine the parametrized line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedLine {
    pub tree: PhyloTree,
    pub coloring: Coloring,
    pub basepoint: ProjectivePoint,
}

/// Positions of the marked points: point `j` is the basepoint moved by column
/// `j` of [`pi_tree`].
pub fn ev_points(line: &MarkedLine) -> Result<PointConfig, EvalError> {
    if line.basepoint.dim() != line.coloring.d {
        return Err(EvalError::Shape {
            expected: format!("basepoint of dimension {}", line.coloring.d),
            found: format!("dimension {}", line.basepoint.dim()),
        });
    }
    let offsets = pi_tree(&line.tree, &line.coloring)?;
    let points = (0..line.coloring.n).map(|j| line.basepoint.translate(&offsets.column(j))).collect();
    Ok(PointConfig { mode: BasepointMode::Absolute, points })
}

/// Offsets from point 1, each column shifted so its smallest entry is 0.
/// This is the representative that [`pi_tree`] produces.
pub fn relative_matrix(pc: &PointConfig) -> RatMatrix {
    let base = pc.points[0].coords();
    let cols = pc
        .points
        .iter()
        .map(|p| {
            let diff: Vec<Rat> = p.coords().iter().zip(base).map(|(a, b)| a - b).collect();
            let low = diff.iter().min().expect("d >= 1").clone();
            diff.into_iter().map(|x| x - &low).collect()
        })
        .collect();
    RatMatrix::from_columns(cols)
}

/// The unique tree with bicolored splits and positive lengths whose image is
/// the configuration, plus the first point as basepoint.
pub fn canonical_tree(pc: &PointConfig) -> Result<MarkedLine, EvalError> {
    let coloring = Coloring::new(pc.n(), pc.d())?;
    if let RankVerdict::NotCollinear(w) = tropical_rank_le2(&pc.to_matrix()) {
        return Err(EvalError::NotCollinear(w));
    }
    let rel = relative_matrix(pc);
    let mut splits = Vec::new();
    let root = coloring.universe().minus(LabelSet::singleton(1));
    peel(&rel, &coloring, root, &Rat::zero(), &mut splits)?;
    let tree = PhyloTree::with_leaf_set(coloring.universe(), splits)?;
    if pi_tree(&tree, &coloring)? != rel {
        return Err(EvalError::Inconsistent);
    }
    Ok(MarkedLine { tree, coloring, basepoint: pc.points[0].clone() })
}

/// Finds the child clusters of the vertex `cluster` (at distance `depth` from
/// leaf 1): a marked and an unmarked leaf share a child iff their meeting
/// depth exceeds `depth`.
fn peel(
    rel: &RatMatrix,
    coloring: &Coloring,
    cluster: LabelSet,
    depth: &Rat,
    out: &mut Vec<(Split, Rat)>,
) -> Result<(), EvalError> {
    let labels = cluster.to_vec();
    let mut parent: Vec<usize> = (0..labels.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let meet = |a: usize, b: usize| -> Option<&Rat> {
        let (j, u) = if coloring.is_marked(a) { (a, b) } else { (b, a) };
        (coloring.is_marked(j) && !coloring.is_marked(u)).then(|| rel.get(u - coloring.n - 1, j - 1))
    };
    for x in 0..labels.len() {
        for y in x + 1..labels.len() {
            if meet(labels[x], labels[y]).is_some_and(|v| v > depth) {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx] = ry;
            }
        }
    }
    let mut groups: Vec<LabelSet> = vec![LabelSet::EMPTY; labels.len()];
    for x in 0..labels.len() {
        let r = find(&mut parent, x);
        groups[r].insert(labels[x]);
    }
    for child in groups.into_iter().filter(|g| g.len() >= 2) {
        if child == cluster {
            return Err(EvalError::Inconsistent);
        }
        let mut lowest: Option<&Rat> = None;
        for a in child.iter() {
            for b in child.iter() {
                if let Some(v) = meet(a, b) {
                    if lowest.map_or(true, |l| v < l) {
                        lowest = Some(v);
                    }
                }
            }
        }
        let child_depth = lowest.expect("a component with two labels joins a marked and an unmarked leaf").clone();
        out.push((Split::from_parts(coloring.universe(), child), &child_depth - depth));
        peel(rel, coloring, child, &child_depth, out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{enumerate_facets, tree_from_splits};
    use crate::tropical::tropical_rank_le2;

    fn split(n: usize, m: &[usize]) -> Split {
        Split::new(n, m.iter().copied()).unwrap()
    }

    fn cols_matrix(cols: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_columns(cols.iter().map(|c| c.iter().map(|&v| Rat::from_int(v)).collect()).collect())
    }

    #[test]
    fn split_example_from_the_five_point_line() {
        let c = Coloring::new(5, 3).unwrap();
        let s = split(8, &[2, 4, 5, 8]);
        let expect = cols_matrix(&[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0], &[0, 0, 1], &[0, 0, 1]]);
        assert_eq!(pi_split(&s, &c).unwrap(), expect);
        assert_eq!(edge_direction(&s, &c), vec![Rat::zero(), Rat::zero(), Rat::one()]);
    }

    #[test]
    fn degenerate_splits_map_to_zero() {
        let c = Coloring::new(5, 3).unwrap();
        assert!(pi_split(&split(8, &[3]), &c).unwrap().is_zero());
        // B = {6, 7}: no marked ends
        assert!(pi_split(&split(8, &[6, 7]), &c).unwrap().is_zero());
        // B = {2, 3}: only marked ends
        assert!(pi_split(&split(8, &[2, 3]), &c).unwrap().is_zero());
        // A = {1, 2} holds no unmarked end
        assert!(pi_split(&split(8, &[3, 4, 5, 6, 7, 8]), &c).unwrap().is_zero());
    }

    #[test]
    fn zero_exactly_on_non_bicolored() {
        let c = Coloring::new(3, 3).unwrap();
        for bits in 1u64..1 << 5 {
            let s = Split::with_universe(c.universe(), LabelSet::from_bits(bits << 1)).unwrap();
            let zero = pi_split(&s, &c).unwrap().is_zero();
            assert_eq!(zero, s.is_singleton() || !c.is_bicolored(&s), "{s:?}");
        }
    }

    #[test]
    fn tree_map_linearity() {
        let c = Coloring::new(5, 3).unwrap();
        assert!(pi_tree(&PhyloTree::star(8).unwrap(), &c).unwrap().is_zero());
        let s = split(8, &[2, 4, 5, 8]);
        let t = tree_from_splits(8, [(s, Rat::from_int(2))]).unwrap();
        assert_eq!(pi_tree(&t, &c).unwrap(), pi_split(&s, &c).unwrap().scale(&Rat::from_int(2)));
        for f in enumerate_facets(Coloring::new(3, 3).unwrap()).take(10) {
            let c = Coloring::new(3, 3).unwrap();
            let lengths: Vec<Rat> = (1..=3).map(|k| Rat::new(k, 3)).collect();
            let t = f.with_lengths(lengths.clone()).unwrap();
            let t2 = f.with_lengths(lengths.iter().map(|l| l * &Rat::from_int(2))).unwrap();
            assert_eq!(pi_tree(&t2, &c).unwrap(), pi_tree(&t, &c).unwrap().scale(&Rat::from_int(2)));
            assert!(tropical_rank_le2(&pi_tree(&t, &c).unwrap()).is_collinear());
        }
    }

    #[test]
    fn evaluation_examples() {
        let c = Coloring::new(5, 3).unwrap();
        let line = MarkedLine { tree: PhyloTree::star(8).unwrap(), coloring: c, basepoint: ProjectivePoint::origin(3) };
        let pc = ev_points(&line).unwrap();
        assert!(pc.points().iter().all(|p| p == &ProjectivePoint::origin(3)));

        let t = tree_from_splits(8, [(split(8, &[2, 4, 5, 8]), Rat::one())]).unwrap();
        let line = MarkedLine { tree: t, coloring: c, basepoint: ProjectivePoint::origin(3) };
        let pc = ev_points(&line).unwrap();
        assert_eq!(pc.to_matrix(), cols_matrix(&[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0], &[0, 0, 1], &[0, 0, 1]]));

        // shifting the basepoint shifts every point
        let w = vec![Rat::zero(), Rat::new(-3, 2), Rat::from_int(4)];
        let moved = MarkedLine { basepoint: normalize_point(&w), ..line.clone() };
        let shifted = ev_points(&moved).unwrap();
        for (p, q) in pc.points().iter().zip(shifted.points()) {
            assert_eq!(&p.translate(&w), q);
        }
    }

    #[test]
    fn canonical_tree_examples() {
        let p = normalize_point(&[Rat::from_int(2), Rat::new(1, 3), Rat::zero()]);
        let pc = PointConfig::new(vec![p.clone(); 4], BasepointMode::Absolute).unwrap();
        let line = canonical_tree(&pc).unwrap();
        assert_eq!(line.tree.split_count(), 0);
        assert_eq!(line.basepoint, p);

        let pc = PointConfig::from_matrix(&cols_matrix(&[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0], &[0, 0, 1], &[0, 0, 1]]));
        let line = canonical_tree(&pc).unwrap();
        let splits: Vec<(Vec<usize>, Rat)> =
            line.tree.lengths().iter().map(|(s, l)| (s.members().to_vec(), l.clone())).collect();
        assert_eq!(splits, vec![(vec![2, 4, 5, 8], Rat::one())]);
    }

    #[test]
    fn canonical_tree_rejects_non_collinear() {
        let m = RatMatrix::from_i64_rows(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]]);
        let err = canonical_tree(&PointConfig::from_matrix(&m)).unwrap_err();
        assert!(matches!(err, EvalError::NotCollinear(_)));
    }

    #[test]
    fn repeated_points_give_a_non_trivalent_tree() {
        // points 1, 2 equal; 3, 4 equal and displaced along e_2
        let pc = PointConfig::from_matrix(&cols_matrix(&[&[0, 0, 0], &[0, 0, 0], &[0, 2, 0], &[0, 2, 0]]));
        let line = canonical_tree(&pc).unwrap();
        assert!(!line.tree.is_trivalent());
        assert!(line.tree.all_bicolored(&line.coloring));
        assert_eq!(ev_points(&line).unwrap(), pc);
    }

    #[test]
    fn round_trip_over_small_facets() {
        for (n, d) in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 2)] {
            let c = Coloring::new(n, d).unwrap();
            for (k, f) in enumerate_facets(c).enumerate() {
                let lengths: Vec<Rat> =
                    (0..f.split_count()).map(|i| Rat::new(((k * 7 + i * 3) % 11 + 1) as i64, (i + 1) as i64)).collect();
                let t = f.with_lengths(lengths).unwrap();
                let basepoint = normalize_point(&(0..d).map(|i| Rat::new(i as i64 * 5 - 3, 7)).collect::<Vec<_>>());
                let line = MarkedLine { tree: t, coloring: c, basepoint };
                let back = canonical_tree(&ev_points(&line).unwrap()).unwrap();
                assert_eq!(back, line);
            }
        }
    }
}
