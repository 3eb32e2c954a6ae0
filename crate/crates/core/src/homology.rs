//! Reduced simplicial homology of the collinear complex from exact boundary
//! matrices.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::combs::{count_combs, homology_rank_formula};
use crate::complex::{CollinearComplex, Face};
use crate::error::ComplexError;
use crate::exec::Execution;
use crate::linalg::{rank_over_rationals, smith_invariants, SparseIntMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficients {
    Rationals,
    /// Also reports torsion, via Smith normal form.
    Integers,
}

/// Torsion coefficients `Z/t` of `H_dim`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Torsion {
    pub dim: usize,
    pub factors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    pub coefficients: Coefficients,
    pub face_counts: Vec<usize>,
    /// Reduced Betti numbers in dimensions `0..=n+d-4`.
    pub betti: Vec<usize>,
    /// `None` over the rationals.
    pub torsion: Option<Vec<Torsion>>,
    #[serde(serialize_with = "crate::report::big_number")]
    pub rank_formula: BigInt,
    pub comb_count: u64,
}

impl HomologyReport {
    pub fn top_rank(&self) -> usize {
        self.betti.last().copied().unwrap_or(0)
    }

    /// Top rank equals the formula and the comb count, lower Betti numbers
    /// vanish, and no torsion was found.
    pub fn consistent(&self) -> bool {
        let top = self.top_rank();
        let below = &self.betti[..self.betti.len().saturating_sub(1)];
        BigInt::from(top) == self.rank_formula
            && top as u64 == self.comb_count
            && below.iter().all(|&b| b == 0)
            && self.torsion.as_ref().map_or(true, Vec::is_empty)
    }
}

/// Boundary map `C_k → C_{k-1}` stored transposed (one row per `k`-face),
/// with the sign `(-1)^i` for dropping the `i`-th vertex.
fn boundary(upper: &[Face], lower: &[Face]) -> SparseIntMatrix {
    let index: HashMap<&[u32], usize> = lower.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
    let mut m = SparseIntMatrix::new(upper.len(), lower.len());
    let mut facet = Vec::new();
    for (r, face) in upper.iter().enumerate() {
        for skip in 0..face.len() {
            facet.clear();
            facet.extend(face.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
            let sign = if skip % 2 == 0 { 1 } else { -1 };
            m.add_entry(r, index[facet.as_slice()], sign);
        }
    }
    m
}

/// Rank of `∂_k` and, over the integers, its invariant factors.
struct BoundaryRank {
    rank: usize,
    torsion: Vec<BigInt>,
}

/// Reduced Betti numbers (and torsion over the integers) of a nonempty
/// complex. Refuses complexes with more than `cap` faces.
pub fn betti_numbers(
    complex: &CollinearComplex,
    coeff: Coefficients,
    cap: Option<usize>,
    exec: Execution,
) -> Result<HomologyReport, ComplexError> {
    if complex.is_empty() {
        return Err(ComplexError::Empty);
    }
    let faces = complex.faces(cap)?;
    let face_counts: Vec<usize> = faces.iter().map(Vec::len).collect();
    let top = complex.facet_size() - 1;
    let dims = top.max(face_counts.len() - 1);

    // ranks[k] = rank of ∂_k for k = 1..=dims; ∂_0 is the augmentation
    let ranks: Vec<BoundaryRank> = exec.map_range(dims, |i| {
        let k = i + 1;
        let Some(upper) = faces.get(k) else {
            return BoundaryRank { rank: 0, torsion: Vec::new() };
        };
        let m = boundary(upper, &faces[k - 1]);
        match coeff {
            Coefficients::Rationals => BoundaryRank { rank: rank_over_rationals(&m), torsion: Vec::new() },
            Coefficients::Integers => {
                let inv = smith_invariants(&m);
                BoundaryRank { rank: inv.len(), torsion: inv.into_iter().filter(|f| !f.is_one()).collect() }
            }
        }
    });
    let rank_of = |k: usize| -> usize {
        match k {
            0 => 1,
            k if k <= dims => ranks[k - 1].rank,
            _ => 0,
        }
    };
    let betti: Vec<usize> =
        (0..=dims).map(|k| face_counts.get(k).copied().unwrap_or(0) - rank_of(k) - rank_of(k + 1)).collect();
    let torsion = (coeff == Coefficients::Integers).then(|| {
        (0..dims)
            .filter(|&k| !ranks[k].torsion.is_empty())
            .map(|k| Torsion { dim: k, factors: ranks[k].torsion.iter().map(BigInt::to_string).collect() })
            .collect()
    });
    let coloring = complex.coloring();
    Ok(HomologyReport {
        coefficients: coeff,
        face_counts,
        betti,
        torsion,
        rank_formula: homology_rank_formula(coloring),
        comb_count: count_combs(coloring),
    })
}

/// Reduced Euler characteristic `Σ (-1)^i f_i - 1` equals
/// `(-1)^{n+d-4}` times the top rank.
pub fn euler_check(report: &HomologyReport, complex: &CollinearComplex) -> bool {
    let chi: i64 = report
        .face_counts
        .iter()
        .enumerate()
        .map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) })
        .sum::<i64>()
        - 1;
    let top = complex.facet_size() as i64 - 1;
    let sign = if top.rem_euclid(2) == 0 { 1 } else { -1 };
    chi == sign * report.top_rank() as i64
}
