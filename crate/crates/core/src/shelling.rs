//! Shelling orders on the facets of the collinear complex.
//!
//! An order `C_1, C_2, …` of the facets is a shelling when for every pair
//! `C' < C` there are an earlier facet `C'' < C` and a vertex `x ∈ C` with
//! `x ∉ C'` and `C ∖ x ⊂ C''`. Since all facets have the same size, `C''`
//! shares the ridge `C ∖ x` with `C`, so the verifier indexes ridges by their
//! earliest facet and answers each existential directly.

use std::collections::HashMap;

use serde::Serialize;

use crate::complex::{CollinearComplex, Face};
use crate::error::ComplexError;
use crate::exec::Execution;
use crate::split::Coloring;
use crate::tree::{enumerate_facets, tree_order_key, PhyloTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellingStatus {
    Verified,
    /// Positions (0-based, in the checked order) of the first pair with no
    /// witness, scanning later facets first and then earlier ones.
    Counterexample {
        earlier: usize,
        later: usize,
    },
}

/// Vertex `x` of a facet together with the earliest facet that contains the
/// ridge `facet ∖ x`, when that facet comes earlier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Restriction {
    pub vertex: u32,
    pub earlier: usize,
}

#[derive(Debug, Clone)]
pub struct ShellingReport {
    order: Vec<PhyloTree>,
    faces: Vec<Face>,
    restrictions: Vec<Vec<Restriction>>,
    status: ShellingStatus,
}

impl ShellingReport {
    pub fn order(&self) -> &[PhyloTree] {
        &self.order
    }

    /// Facets of [`Self::order`] as sorted vertex-index lists.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn status(&self) -> ShellingStatus {
        self.status
    }

    pub fn is_verified(&self) -> bool {
        self.status == ShellingStatus::Verified
    }

    /// Restriction set of the facet at `pos`: the vertices `x` for which
    /// `C ∖ x` lies in an earlier facet.
    pub fn restriction(&self, pos: usize) -> &[Restriction] {
        &self.restrictions[pos]
    }

    /// A witness `(C'', x)` for the pair at positions `earlier < later`:
    /// `C''` precedes `C`, `x ∉ C'` and `C ∖ x ⊂ C''`.
    pub fn witness(&self, earlier: usize, later: usize) -> Option<Restriction> {
        if earlier >= later || later >= self.faces.len() {
            return None;
        }
        let c_prime = &self.faces[earlier];
        self.restrictions[later].iter().copied().find(|r| c_prime.binary_search(&r.vertex).is_err())
    }
}

/// Facets of the complex for `coloring`, sorted by the recursive tree order.
pub fn sort_facets(coloring: Coloring) -> Vec<PhyloTree> {
    let mut keyed: Vec<(Vec<u64>, PhyloTree)> =
        enumerate_facets(coloring).map(|t| (tree_order_key(&t).expect("facets are trivalent"), t)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, t)| t).collect()
}

/// Checks the shelling condition for `order`, which must list every facet
/// of the (pure) complex exactly once.
pub fn verify_shelling(
    complex: &CollinearComplex,
    order: &[PhyloTree],
    exec: Execution,
) -> Result<ShellingReport, ComplexError> {
    complex.check_pure()?;
    let faces = order_faces(complex, order)?;

    // earliest position containing each ridge
    let mut first_with_ridge: HashMap<Face, usize> = HashMap::new();
    for (pos, face) in faces.iter().enumerate() {
        for skip in 0..face.len() {
            first_with_ridge.entry(ridge(face, skip)).or_insert(pos);
        }
    }

    let restrictions: Vec<Vec<Restriction>> = exec.map_range(faces.len(), |pos| {
        let face = &faces[pos];
        (0..face.len())
            .filter_map(|skip| {
                let earlier = first_with_ridge[&ridge(face, skip)];
                (earlier < pos).then_some(Restriction { vertex: face[skip], earlier })
            })
            .collect()
    });

    // facet positions containing each vertex, ascending
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); complex.vertex_count()];
    for (pos, face) in faces.iter().enumerate() {
        for &v in face {
            containing[v as usize].push(pos);
        }
    }

    // A pair (C', C) fails iff C' contains every vertex of C's restriction set.
    let failure = exec.find_map_first(faces.len(), |later| {
        let restricted: Vec<u32> = restrictions[later].iter().map(|r| r.vertex).collect();
        let first_bad = match restricted.iter().min_by_key(|&&v| containing[v as usize].len()) {
            None => (later > 0).then_some(0),
            Some(&pivot) => containing[pivot as usize]
                .iter()
                .copied()
                .take_while(|&p| p < later)
                .find(|&p| restricted.iter().all(|v| faces[p].binary_search(v).is_ok())),
        };
        first_bad.map(|earlier| ShellingStatus::Counterexample { earlier, later })
    });

    Ok(ShellingReport {
        order: order.to_vec(),
        faces,
        restrictions,
        status: failure.unwrap_or(ShellingStatus::Verified),
    })
}

fn ridge(face: &[u32], skip: usize) -> Face {
    face.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()
}

fn order_faces(complex: &CollinearComplex, order: &[PhyloTree]) -> Result<Vec<Face>, ComplexError> {
    let faces: Vec<Face> = order
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.leaves() != complex.coloring().universe() {
                return Err(ComplexError::NotAPermutation(format!("entry {} has the wrong leaf set", i + 1)));
            }
            complex
                .face_of_tree(t)
                .ok_or_else(|| ComplexError::NotAPermutation(format!("entry {} is not a face of the complex", i + 1)))
        })
        .collect::<Result<_, _>>()?;
    let mut sorted = faces.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        let pos = faces.iter().position(|f| *f == w[0]).unwrap_or(0);
        return Err(ComplexError::NotAPermutation(format!("entry {} is repeated", pos + 1)));
    }
    let facets = complex.maximal_faces();
    if sorted != facets {
        let missing = facets.iter().filter(|f| sorted.binary_search(f).is_err()).count();
        let extra = sorted.iter().filter(|f| facets.binary_search(f).is_err()).count();
        return Err(ComplexError::NotAPermutation(format!("{missing} facets missing, {extra} entries are not facets")));
    }
    Ok(faces)
}

/// Facets whose restriction set is the whole facet, in shelling order.
pub fn homology_facets(report: &ShellingReport) -> Result<Vec<PhyloTree>, ComplexError> {
    if !report.is_verified() {
        return Err(ComplexError::NotShelling);
    }
    Ok(report
        .faces
        .iter()
        .zip(&report.restrictions)
        .zip(&report.order)
        .filter(|((face, r), _)| !face.is_empty() && r.len() == face.len())
        .map(|(_, t)| t.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::tree::tree_less;

    fn coloring(n: usize, d: usize) -> Coloring {
        Coloring::new(n, d).unwrap()
    }

    /// Straight from the definition, over all triples.
    fn naive_is_shelling(faces: &[Face]) -> bool {
        (1..faces.len()).all(|j| {
            (0..j).all(|i| {
                (0..j).any(|k| {
                    faces[j].iter().any(|x| {
                        !faces[i].contains(x) && faces[j].iter().filter(|v| *v != x).all(|v| faces[k].contains(v))
                    })
                })
            })
        })
    }

    #[test]
    fn sorted_facets_are_increasing() {
        let order = sort_facets(coloring(3, 3));
        assert_eq!(order.len(), 42);
        for w in order.windows(2) {
            assert!(tree_less(&w[0], &w[1]).unwrap());
        }
    }

    #[test]
    fn two_isolated_vertices() {
        let c = build_complex(coloring(2, 2));
        let order = sort_facets(coloring(2, 2));
        let report = verify_shelling(&c, &order, Execution::Sequential).unwrap();
        assert!(report.is_verified());
        assert_eq!(homology_facets(&report).unwrap().len(), 1);
    }

    #[test]
    fn sorted_order_shells_small_cases() {
        for (n, d, h) in [(2, 3, 1), (3, 2, 1), (3, 3, 5), (2, 4, 1)] {
            let c = build_complex(coloring(n, d));
            let order = sort_facets(coloring(n, d));
            for exec in [Execution::Sequential, Execution::Parallel] {
                let report = verify_shelling(&c, &order, exec).unwrap();
                assert!(report.is_verified(), "({n},{d})");
                assert!(naive_is_shelling(report.faces()));
                assert_eq!(homology_facets(&report).unwrap().len(), h, "({n},{d})");
                for later in 1..order.len() {
                    for earlier in 0..later {
                        let w = report.witness(earlier, later).unwrap();
                        assert!(w.earlier < later);
                        assert!(!report.faces()[earlier].contains(&w.vertex));
                        let face = &report.faces()[later];
                        assert!(face.iter().filter(|v| **v != w.vertex).all(|v| report.faces()[w.earlier].contains(v)));
                    }
                }
            }
        }
    }

    #[test]
    fn verifier_matches_definition_on_shuffled_orders() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let c = build_complex(coloring(3, 3));
        let mut order = sort_facets(coloring(3, 3));
        let mut seen_failure = false;
        for _ in 0..40 {
            order.shuffle(&mut rng);
            let report = verify_shelling(&c, &order, Execution::Sequential).unwrap();
            assert_eq!(report.is_verified(), naive_is_shelling(report.faces()));
            if let ShellingStatus::Counterexample { earlier, later } = report.status() {
                seen_failure = true;
                assert!(report.witness(earlier, later).is_none());
                // every earlier pair in scan order has a witness
                for j in 1..later {
                    for i in 0..j {
                        assert!(report.witness(i, j).is_some());
                    }
                }
                for i in 0..earlier {
                    assert!(report.witness(i, later).is_some());
                }
            }
        }
        assert!(seen_failure);
    }

    #[test]
    fn rejects_non_permutations() {
        let c = build_complex(coloring(3, 3));
        let mut order = sort_facets(coloring(3, 3));
        let last = order.pop().unwrap();
        assert!(matches!(verify_shelling(&c, &order, Execution::Sequential), Err(ComplexError::NotAPermutation(_))));
        order.push(order[0].clone());
        assert!(matches!(verify_shelling(&c, &order, Execution::Sequential), Err(ComplexError::NotAPermutation(_))));
        order.pop();
        order.push(last);
        assert!(verify_shelling(&c, &order, Execution::Sequential).is_ok());
    }

    #[test]
    fn homology_facets_needs_verified_report() {
        let c = build_complex(coloring(3, 3));
        let mut order = sort_facets(coloring(3, 3));
        order.reverse();
        order.swap(0, 20);
        let report = verify_shelling(&c, &order, Execution::Sequential).unwrap();
        if !report.is_verified() {
            assert!(matches!(homology_facets(&report), Err(ComplexError::NotShelling)));
        }
    }
}
