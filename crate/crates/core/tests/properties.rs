use std::collections::BTreeSet;

use proptest::prelude::*;

use tropline::complex::build_complex;
use tropline::evaluation::{ev_points, pi_split, pi_tree, relative_matrix, MarkedLine};
use tropline::linalg::{rank_over_rationals, SparseIntMatrix};
use tropline::tree::tree_order_key;
use tropline::{enumerate_facets, enumerate_trivalent_trees, tree_order, tropical_rank_le2, Coloring, Rat, RatMatrix};

fn rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=3).prop_map(|(p, q)| Rat::new(p, q))
}

fn matrix() -> impl Strategy<Value = RatMatrix> {
    (1usize..=6, 1usize..=6)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(rat(), c), r))
        .prop_map(RatMatrix::from_rows)
}

fn permuted(m: &RatMatrix, rows: &[usize], cols: &[usize]) -> RatMatrix {
    RatMatrix::from_rows(rows.iter().map(|&r| cols.iter().map(|&c| m.get(r, c).clone()).collect()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn rank_is_transpose_invariant(m in matrix()) {
        prop_assert_eq!(tropical_rank_le2(&m).is_collinear(), tropical_rank_le2(&m.transpose()).is_collinear());
    }

    /// Adding a constant to a row or a column is tropical scaling.
    #[test]
    fn rank_ignores_row_and_column_shifts(m in matrix(), shift in rat(), pick in 0usize..6, by_row in any::<bool>()) {
        let mut shifted = m.clone();
        if by_row {
            let r = pick % m.rows();
            for c in 0..m.cols() {
                shifted.set(r, c, m.get(r, c) + &shift);
            }
        } else {
            let c = pick % m.cols();
            for r in 0..m.rows() {
                shifted.set(r, c, m.get(r, c) + &shift);
            }
        }
        prop_assert_eq!(tropical_rank_le2(&m).is_collinear(), tropical_rank_le2(&shifted).is_collinear());
    }

    #[test]
    fn rank_ignores_permutations(m in matrix(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<usize> = (0..m.rows()).collect();
        let mut cols: Vec<usize> = (0..m.cols()).collect();
        rows.shuffle(&mut rng);
        cols.shuffle(&mut rng);
        let p = permuted(&m, &rows, &cols);
        prop_assert_eq!(tropical_rank_le2(&m).is_collinear(), tropical_rank_le2(&p).is_collinear());
    }

    /// The image of the evaluation map is collinear, and relative coordinates
    /// of the evaluated points reproduce it for any basepoint.
    #[test]
    fn evaluation_square_commutes(
        (n, d) in (2usize..=4, 2usize..=4),
        pick in any::<prop::sample::Index>(),
        lengths in prop::collection::vec((1i64..=9, 1i64..=4), 8),
        base in prop::collection::vec(rat(), 4),
    ) {
        let c = Coloring::new(n, d).unwrap();
        let facets: Vec<_> = enumerate_facets(c).collect();
        let facet = pick.get(&facets);
        let tree = facet.with_lengths(lengths.iter().take(facet.split_count()).map(|&(p, q)| Rat::new(p, q))).unwrap();
        let image = pi_tree(&tree, &c).unwrap();
        prop_assert!(tropical_rank_le2(&image).is_collinear());
        let basepoint = tropline::normalize_point(&base[..d]);
        let line = MarkedLine { tree, coloring: c, basepoint };
        let points = ev_points(&line).unwrap();
        prop_assert_eq!(relative_matrix(&points), image);
    }
}

/// On every facet the rays `pi_split(S)` are linearly independent.
#[test]
fn evaluation_is_injective_on_facets() {
    for total in 4..=7 {
        for n in 2..total - 1 {
            let c = Coloring::new(n, total - n).unwrap();
            for facet in enumerate_facets(c) {
                let rows: Vec<Vec<i64>> = facet
                    .splits()
                    .map(|s| {
                        let m = pi_split(s, &c).unwrap();
                        (0..m.rows())
                            .flat_map(|r| m.row(r).iter().map(|x| x.numer().try_into().unwrap()).collect::<Vec<i64>>())
                            .collect()
                    })
                    .collect();
                assert_eq!(rank_over_rationals(&SparseIntMatrix::from_dense(&rows)), facet.split_count());
            }
        }
    }
}

/// Maximal cliques of the compatibility graph are the bicolored trivalent
/// trees, and all have `n + d - 3` vertices.
#[test]
fn flag_complex_is_pure_and_matches_facets() {
    for total in 4..=10 {
        for n in 2..=total - 2 {
            let c = Coloring::new(n, total - n).unwrap();
            let complex = build_complex(c);
            complex.check_pure().unwrap_or_else(|e| panic!("({n},{}): {e}", total - n));
            if total <= 8 {
                let cliques: BTreeSet<Vec<u32>> = complex.maximal_faces().into_iter().collect();
                let facets: BTreeSet<Vec<u32>> =
                    enumerate_facets(c).map(|t| complex.face_of_tree(&t).unwrap()).collect();
                assert_eq!(cliques, facets);
            }
        }
    }
}

#[test]
fn order_key_matches_comparator() {
    for leaves in 4..=7 {
        let trees: Vec<_> = enumerate_trivalent_trees(leaves).collect();
        let keys: Vec<_> = trees.iter().map(|t| tree_order_key(t).unwrap()).collect();
        for (i, a) in trees.iter().enumerate().step_by(if leaves == 7 { 7 } else { 1 }) {
            for (j, b) in trees.iter().enumerate() {
                assert_eq!(tree_order(a, b).unwrap(), keys[i].cmp(&keys[j]));
            }
        }
    }
}
