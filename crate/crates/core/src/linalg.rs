//! Exact rank and Smith normal form of sparse integer matrices.
//!
//! Both routines first eliminate on unit (`±1`) pivots. A unit pivot is
//! unimodular, so entries stay integral and the invariant factors are
//! untouched apart from a leading 1 per pivot. Whatever remains is handled
//! densely: fraction-free Bareiss elimination for the rank over `Q`, and a
//! classical Smith reduction over `Z` for the invariant factors.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-major sparse matrix over `Z`; each row is sorted by column and holds
/// no explicit zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(u32, BigInt)>>,
}

impl SparseIntMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn from_dense(dense: &[Vec<i64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let data = dense
            .iter()
            .map(|r| {
                r.iter().enumerate().filter(|(_, v)| **v != 0).map(|(c, v)| (c as u32, BigInt::from(*v))).collect()
            })
            .collect();
        SparseIntMatrix { rows, cols, data }
    }

    /// Adds `value` at `(r, c)`.
    pub fn add_entry(&mut self, r: usize, c: usize, value: i64) {
        assert!(r < self.rows && c < self.cols, "entry out of bounds");
        let row = &mut self.data[r];
        match row.binary_search_by_key(&(c as u32), |(col, _)| *col) {
            Ok(pos) => {
                row[pos].1 += value;
                if row[pos].1.is_zero() {
                    row.remove(pos);
                }
            }
            Err(pos) => {
                if value != 0 {
                    row.insert(pos, (c as u32, BigInt::from(value)));
                }
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                out[r][*c as usize] = v.clone();
            }
        }
        out
    }
}

/// `row_a - factor * row_b` on sorted sparse rows.
fn axpy(row_a: &[(u32, BigInt)], factor: &BigInt, row_b: &[(u32, BigInt)]) -> Vec<(u32, BigInt)> {
    let mut out = Vec::with_capacity(row_a.len() + row_b.len());
    let (mut i, mut j) = (0, 0);
    while i < row_a.len() || j < row_b.len() {
        let take_a = j >= row_b.len() || (i < row_a.len() && row_a[i].0 < row_b[j].0);
        let take_b = i >= row_a.len() || (j < row_b.len() && row_b[j].0 < row_a[i].0);
        if take_a {
            out.push(row_a[i].clone());
            i += 1;
        } else if take_b {
            out.push((row_b[j].0, -(factor * &row_b[j].1)));
            j += 1;
        } else {
            let v = &row_a[i].1 - factor * &row_b[j].1;
            if !v.is_zero() {
                out.push((row_a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Outcome of unit-pivot elimination: the number of pivots and the residual
/// block (rows and columns untouched by any pivot).
struct UnitReduction {
    pivots: usize,
    residual: Vec<Vec<BigInt>>,
}

fn eliminate_unit_pivots(m: &SparseIntMatrix) -> UnitReduction {
    let mut rows = m.data.clone();
    let mut active = vec![true; m.rows];
    let mut col_alive = vec![true; m.cols];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); m.cols];
    for (r, row) in rows.iter().enumerate() {
        for (c, _) in row {
            col_rows[*c as usize].push(r as u32);
        }
    }
    let mut pivots = 0;
    loop {
        let mut progressed = false;
        let mut order: Vec<usize> = (0..m.rows).filter(|&r| active[r] && !rows[r].is_empty()).collect();
        order.sort_by_key(|&r| rows[r].len());
        for p in order {
            if !active[p] {
                continue;
            }
            // Unit entry whose column touches the fewest rows.
            let Some((pc, pv)) = rows[p]
                .iter()
                .filter(|(_, v)| v.abs().is_one())
                .min_by_key(|(c, _)| col_rows[*c as usize].len())
                .cloned()
            else {
                continue;
            };
            let pivot_row = std::mem::take(&mut rows[p]);
            active[p] = false;
            col_alive[pc as usize] = false;
            let mut targets = std::mem::take(&mut col_rows[pc as usize]);
            targets.sort_unstable();
            targets.dedup();
            for r in targets {
                let r = r as usize;
                if !active[r] {
                    continue;
                }
                let Ok(pos) = rows[r].binary_search_by_key(&pc, |(c, _)| *c) else {
                    continue;
                };
                // pivot is ±1, so the multiplier a_rc / pv is integral
                let factor = &rows[r][pos].1 * &pv;
                let before: Vec<u32> = rows[r].iter().map(|(c, _)| *c).collect();
                rows[r] = axpy(&rows[r], &factor, &pivot_row);
                for (c, _) in &rows[r] {
                    if before.binary_search(c).is_err() {
                        col_rows[*c as usize].push(r as u32);
                    }
                }
            }
            pivots += 1;
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    let live_cols: Vec<usize> = (0..m.cols).filter(|&c| col_alive[c]).collect();
    let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let residual = (0..m.rows)
        .filter(|&r| active[r] && !rows[r].is_empty())
        .map(|r| {
            let mut dense = vec![BigInt::zero(); live_cols.len()];
            for (c, v) in &rows[r] {
                dense[col_pos[&(*c as usize)]] = v.clone();
            }
            dense
        })
        .collect();
    UnitReduction { pivots, residual }
}

/// Rank of a dense integer matrix over `Q` by fraction-free elimination.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Rank over `Q`.
pub fn rank_over_rationals(m: &SparseIntMatrix) -> usize {
    let reduced = eliminate_unit_pivots(m);
    reduced.pivots + bareiss_rank(reduced.residual)
}

/// Nonzero invariant factors `d_1 | d_2 | …` of a dense integer matrix.
pub fn dense_smith_invariants(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    if !a[r][c].is_zero() && best.map_or(true, |(br, bc)| a[r][c].abs() < a[br][bc].abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((br, bc)) = best else {
                return finish_invariants(out);
            };
            a.swap(t, br);
            for row in a.iter_mut() {
                row.swap(t, bc);
            }
            let pivot = a[t][t].clone();
            let mut clean = true;
            for r in t + 1..rows {
                if a[r][t].is_zero() {
                    continue;
                }
                let q = a[r][t].div_floor(&pivot);
                for c in t..cols {
                    let v = &q * &a[t][c];
                    a[r][c] -= v;
                }
                clean &= a[r][t].is_zero();
            }
            for c in t + 1..cols {
                if a[t][c].is_zero() {
                    continue;
                }
                let q = a[t][c].div_floor(&pivot);
                for r in t..rows {
                    let v = &q * &a[r][t];
                    a[r][c] -= v;
                }
                clean &= a[t][c].is_zero();
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole trailing block
            let offender = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| !(&a[r][c] % &pivot).is_zero()));
            match offender {
                Some(r) => {
                    for c in t..cols {
                        let v = a[r][c].clone();
                        a[t][c] += v;
                    }
                }
                None => {
                    out.push(pivot.abs());
                    break;
                }
            }
        }
    }
    finish_invariants(out)
}

fn finish_invariants(mut out: Vec<BigInt>) -> Vec<BigInt> {
    out.sort();
    out
}

/// Nonzero invariant factors over `Z`, ascending.
pub fn smith_invariants(m: &SparseIntMatrix) -> Vec<BigInt> {
    let reduced = eliminate_unit_pivots(m);
    let mut factors = vec![BigInt::one(); reduced.pivots];
    factors.extend(dense_smith_invariants(reduced.residual));
    factors.sort();
    factors
}
