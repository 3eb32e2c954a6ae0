//! Min-plus linear algebra over exact rationals.
//!
//! A `d × n` [`RatMatrix`] holds `n` points of tropical projective space
//! `TP^{d-1}` as its columns. The columns are tropically collinear iff every
//! `3 × 3` minor is tropically singular, i.e. the minimum over the six
//! permutation sums is attained at least twice.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::exec::Execution;
use crate::rat::{ParseRatError, Rat};

/// Dense `rows × cols` matrix of rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix must be at least 1x1");
        RatMatrix { rows, cols, entries: vec![Rat::zero(); rows * cols] }
    }

    /// Builds a matrix from row vectors. Panics on ragged or empty input.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        assert!(r >= 1, "matrix needs at least one row");
        let c = rows[0].len();
        assert!(c >= 1, "matrix needs at least one column");
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Rat::from_int(v)).collect()).collect())
    }

    pub fn from_columns(cols: Vec<Vec<Rat>>) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<Rat> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).clone());
            }
        }
        RatMatrix { rows: self.cols, cols: self.rows, entries }
    }

    pub fn scale(&self, k: &Rat) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| e * k).collect() }
    }

    /// Entrywise sum. Panics on shape mismatch.
    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rat::is_zero)
    }

    pub fn minor3(&self, rows: [usize; 3], cols: [usize; 3]) -> [[Rat; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.get(rows[i], cols[j]).clone()))
    }

    /// Renders the matrix in the whitespace-separated text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(Rat::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let line: Vec<String> = self.row(r).iter().map(Rat::to_string).collect();
            write!(f, "{}", line.join(" "))?;
        }
        write!(f, "]")
    }
}

/// A matrix text-format error, located by 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseMatrixError {
    #[error("line {line}, column {column}: {source}")]
    Entry {
        line: usize,
        column: usize,
        #[source]
        source: ParseRatError,
    },
    #[error("line {line}: expected {expected} entries, found {found}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("no matrix rows found")]
    Empty,
}

impl FromStr for RatMatrix {
    type Err = ParseMatrixError;

    /// One row per line, entries separated by whitespace. Blank lines and
    /// lines whose first non-blank character is `#` are skipped.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let trimmed = line.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut row = Vec::new();
            let mut offset = 0;
            for token in line.split_whitespace() {
                let at = line[offset..].find(token).map(|p| p + offset).unwrap_or(offset);
                offset = at + token.len();
                let value = token.parse::<Rat>().map_err(|source| ParseMatrixError::Entry {
                    line: idx + 1,
                    column: line[..at].chars().count() + 1,
                    source,
                })?;
                row.push(value);
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(ParseMatrixError::Ragged { line: idx + 1, expected: first.len(), found: row.len() });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(ParseMatrixError::Empty);
        }
        Ok(RatMatrix::from_rows(rows))
    }
}

/// A point of `TP^{d-1}` in its canonical representative (first coordinate 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ProjectivePoint(Vec<Rat>);

impl ProjectivePoint {
    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn origin(d: usize) -> Self {
        ProjectivePoint(vec![Rat::zero(); d])
    }

    /// Coordinatewise sum, renormalized.
    pub fn translate(&self, v: &[Rat]) -> ProjectivePoint {
        assert_eq!(self.0.len(), v.len(), "dimension mismatch");
        normalize_point(&self.0.iter().zip(v).map(|(a, b)| a + b).collect::<Vec<_>>())
    }
}

/// Subtracts the first coordinate from every coordinate.
pub fn normalize_point(v: &[Rat]) -> ProjectivePoint {
    assert!(!v.is_empty(), "point needs at least one coordinate");
    let base = v[0].clone();
    ProjectivePoint(v.iter().map(|x| x - &base).collect())
}

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// The six permutation sums `Σ_i m[i][σ(i)]`, in lexicographic order of `σ`.
pub fn permutation_sums3(m: &[[Rat; 3]; 3]) -> [Rat; 6] {
    PERMS3.map(|p| &m[0][p[0]] + &m[1][p[1]] + &m[2][p[2]])
}

/// True iff the tropical determinant (min over permutation sums) is attained
/// by at least two permutations.
pub fn trop_det3_is_singular(m: &[[Rat; 3]; 3]) -> bool {
    let sums = permutation_sums3(m);
    let min = sums.iter().min().expect("six sums");
    sums.iter().filter(|s| *s == min).count() >= 2
}

/// A tropically nonsingular `3 × 3` minor, by 1-based row and column labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinorWitness {
    pub rows: [usize; 3],
    pub cols: [usize; 3],
}

impl fmt::Display for MinorWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rows {:?}, cols {:?}", self.rows, self.cols)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankVerdict {
    Collinear,
    NotCollinear(MinorWitness),
}

impl RankVerdict {
    pub fn is_collinear(&self) -> bool {
        matches!(self, RankVerdict::Collinear)
    }

    pub fn witness(&self) -> Option<&MinorWitness> {
        match self {
            RankVerdict::Collinear => None,
            RankVerdict::NotCollinear(w) => Some(w),
        }
    }
}

fn triples(k: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Decides tropical rank ≤ 2 by scanning all `3 × 3` minors.
pub fn tropical_rank_le2(m: &RatMatrix) -> RankVerdict {
    tropical_rank_le2_with(m, Execution::default())
}

/// As [`tropical_rank_le2`]; the witness is the lexicographically first
/// nonsingular minor in (row-triple, column-triple) order under either mode.
pub fn tropical_rank_le2_with(m: &RatMatrix, exec: Execution) -> RankVerdict {
    let row_triples = triples(m.rows());
    let col_triples = triples(m.cols());
    if row_triples.is_empty() || col_triples.is_empty() {
        return RankVerdict::Collinear;
    }
    let per_row = col_triples.len();
    let hit = exec.find_map_first(row_triples.len() * per_row, |k| {
        let rows = row_triples[k / per_row];
        let cols = col_triples[k % per_row];
        (!trop_det3_is_singular(&m.minor3(rows, cols))).then_some((rows, cols))
    });
    match hit {
        None => RankVerdict::Collinear,
        Some((rows, cols)) => {
            RankVerdict::NotCollinear(MinorWitness { rows: rows.map(|r| r + 1), cols: cols.map(|c| c + 1) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3(rows: [[i64; 3]; 3]) -> [[Rat; 3]; 3] {
        rows.map(|r| r.map(Rat::from_int))
    }

    #[test]
    fn permutation_sums_of_examples() {
        let sums = permutation_sums3(&m3([[0, 0, 1], [0, 1, 0], [1, 0, 0]]));
        let expect: Vec<Rat> = [1, 0, 0, 1, 1, 3].into_iter().map(Rat::from_int).collect();
        assert_eq!(sums.to_vec(), expect);
        let sums = permutation_sums3(&m3([[0, 1, 2], [1, 0, 2], [2, 2, 0]]));
        let expect: Vec<Rat> = [0, 4, 2, 5, 5, 4].into_iter().map(Rat::from_int).collect();
        assert_eq!(sums.to_vec(), expect);
    }

    #[test]
    fn singularity_examples() {
        assert!(trop_det3_is_singular(&m3([[0; 3]; 3])));
        assert!(trop_det3_is_singular(&m3([[0, 0, 1], [0, 1, 0], [1, 0, 0]])));
        assert!(!trop_det3_is_singular(&m3([[0, 1, 2], [1, 0, 2], [2, 2, 0]])));
    }

    #[test]
    fn rank_examples() {
        let two_rows = RatMatrix::from_i64_rows(&[&[0, 5, -3, 7], &[1, 1, 9, 2]]);
        assert_eq!(tropical_rank_le2(&two_rows), RankVerdict::Collinear);
        let m = RatMatrix::from_i64_rows(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]]);
        assert_eq!(tropical_rank_le2(&m), RankVerdict::NotCollinear(MinorWitness { rows: [1, 2, 3], cols: [1, 2, 3] }));
        // columns 0, e3, 0, e3, e3
        let line = RatMatrix::from_i64_rows(&[&[0, 0, 0, 0, 0], &[0, 0, 0, 0, 0], &[0, 1, 0, 1, 1]]);
        assert!(tropical_rank_le2(&line).is_collinear());
    }

    #[test]
    fn witness_is_lexicographically_first() {
        // Any minor using both zero rows is singular; rows 1,3,4 are not.
        let m = RatMatrix::from_i64_rows(&[&[0, 0, 0], &[0, 0, 0], &[0, 1, 2], &[1, 0, 2]]);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let v = tropical_rank_le2_with(&m, exec);
            assert_eq!(v.witness().unwrap(), &MinorWitness { rows: [1, 3, 4], cols: [1, 2, 3] });
        }
    }

    #[test]
    fn normalize_examples() {
        let p = |v: [i64; 3]| v.map(Rat::from_int).to_vec();
        assert_eq!(normalize_point(&p([0, 0, 0])).coords(), p([0, 0, 0]).as_slice());
        assert_eq!(normalize_point(&p([5, 5, 5])).coords(), p([0, 0, 0]).as_slice());
        assert_eq!(normalize_point(&p([1, 2, 4])).coords(), p([0, 1, 3]).as_slice());
    }

    #[test]
    fn parse_text_format() {
        let m: RatMatrix = "# comment\n0 1/2 -3\n\n  # another\n2.5 0 7\n".parse().unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 3);
        assert_eq!(m.get(0, 1), &Rat::new(1, 2));
        assert_eq!(m.get(1, 0), &Rat::new(5, 2));
        let back: RatMatrix = m.to_text().parse().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn parse_errors_are_located() {
        let err = "0 0 0\n1 1/0 2\n".parse::<RatMatrix>().unwrap_err();
        assert!(matches!(err, ParseMatrixError::Entry { line: 2, column: 3, .. }), "{err:?}");
        let err = "0 0 0\n1 1\n".parse::<RatMatrix>().unwrap_err();
        assert_eq!(err, ParseMatrixError::Ragged { line: 2, expected: 3, found: 2 });
        assert_eq!("# only\n\n".parse::<RatMatrix>().unwrap_err(), ParseMatrixError::Empty);
    }
}
