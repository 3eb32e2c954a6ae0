//! The end-to-end check for one `(d, n)`: shelling, homology, combs and the
//! closed formula, collected into one serializable report.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::combs::{count_combs, homology_rank_formula};
use crate::complex::build_complex;
use crate::error::ComplexError;
use crate::exec::Execution;
use crate::homology::{betti_numbers, euler_check, Coefficients, Torsion};
use crate::shelling::{homology_facets, sort_facets, verify_shelling, ShellingStatus};
use crate::split::Coloring;

/// Writes a big integer as a JSON number when it fits in `u64`, otherwise
/// as a decimal string.
pub(crate) fn big_number<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub d: usize,
    pub n: usize,
    pub face_counts: Vec<usize>,
    pub betti: Vec<usize>,
    pub torsion: Vec<Torsion>,
    #[serde(serialize_with = "big_number")]
    pub rank_formula: BigInt,
    pub comb_count: u64,
    pub homology_facet_count: usize,
    pub shelling: ShellingStatus,
    pub euler_characteristic_ok: bool,
    pub consistent: bool,
}

impl VerifyReport {
    /// Everything except `d` and `n`, for comparing `(d, n)` with `(n, d)`.
    pub fn same_invariants(&self, other: &VerifyReport) -> bool {
        self.face_counts == other.face_counts
            && self.betti == other.betti
            && self.torsion == other.torsion
            && self.rank_formula == other.rank_formula
            && self.comb_count == other.comb_count
            && self.homology_facet_count == other.homology_facet_count
            && (self.shelling == ShellingStatus::Verified) == (other.shelling == ShellingStatus::Verified)
            && self.consistent == other.consistent
    }
}

/// Runs every check for `coloring`. Homology is computed over the integers,
/// so torsion is reported; complexes with more than `cap` faces are refused.
pub fn verify(coloring: Coloring, cap: Option<usize>, exec: Execution) -> Result<VerifyReport, ComplexError> {
    let (n, d) = (coloring.n, coloring.d);
    let rank_formula = homology_rank_formula(coloring);
    let comb_count = count_combs(coloring);
    let complex = build_complex(coloring);
    if complex.is_empty() {
        let top_dims = (n + d).saturating_sub(3);
        let consistent = rank_formula.is_zero() && comb_count == 0;
        return Ok(VerifyReport {
            d,
            n,
            face_counts: Vec::new(),
            betti: vec![0; top_dims],
            torsion: Vec::new(),
            rank_formula,
            comb_count,
            homology_facet_count: 0,
            shelling: ShellingStatus::Verified,
            euler_characteristic_ok: true,
            consistent,
        });
    }
    // fail on the cap before any expensive work
    complex.face_counts(cap)?;
    let order = sort_facets(coloring);
    let shelling = verify_shelling(&complex, &order, exec)?;
    let homology_facet_count = match homology_facets(&shelling) {
        Ok(h) => h.len(),
        Err(_) => 0,
    };
    let homology = betti_numbers(&complex, Coefficients::Integers, cap, exec)?;
    let euler_ok = euler_check(&homology, &complex);
    let consistent =
        shelling.is_verified() && homology.consistent() && homology_facet_count == homology.top_rank() && euler_ok;
    Ok(VerifyReport {
        d,
        n,
        face_counts: homology.face_counts,
        betti: homology.betti,
        torsion: homology.torsion.unwrap_or_default(),
        rank_formula,
        comb_count,
        homology_facet_count,
        shelling: shelling.status(),
        euler_characteristic_ok: euler_ok,
        consistent,
    })
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d = {}, n = {}", self.d, self.n)?;
        writeln!(f, "face counts:          {:?}", self.face_counts)?;
        writeln!(f, "reduced Betti:        {:?}", self.betti)?;
        if self.torsion.is_empty() {
            writeln!(f, "torsion:              none")?;
        } else {
            for t in &self.torsion {
                writeln!(f, "torsion in H_{}:       {}", t.dim, t.factors.join(", "))?;
            }
        }
        writeln!(f, "rank formula:         {}", self.rank_formula)?;
        writeln!(f, "comb count:           {}", self.comb_count)?;
        writeln!(f, "homology facets:      {}", self.homology_facet_count)?;
        match self.shelling {
            ShellingStatus::Verified => writeln!(f, "shelling:             verified")?,
            ShellingStatus::Counterexample { earlier, later } => {
                writeln!(f, "shelling:             fails at facets {earlier} < {later}")?
            }
        }
        writeln!(f, "Euler characteristic: {}", if self.euler_characteristic_ok { "ok" } else { "mismatch" })?;
        write!(f, "consistent:           {}", self.consistent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_reports() {
        let r = verify(Coloring::new(3, 3).unwrap(), None, Execution::default()).unwrap();
        assert!(r.consistent);
        assert_eq!(r.betti, vec![0, 0, 5]);
        assert_eq!(r.homology_facet_count, 5);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["shelling"], "verified");
        assert_eq!(json["rank_formula"], 5);
        assert_eq!(json["torsion"], serde_json::json!([]));
    }

    #[test]
    fn degenerate_report() {
        let r = verify(Coloring::new(5, 1).unwrap(), None, Execution::Sequential).unwrap();
        assert!(r.consistent);
        assert_eq!(r.rank_formula, BigInt::zero());
        assert_eq!(r.betti, vec![0, 0, 0]);
    }

    #[test]
    fn cap_is_enforced() {
        let err = verify(Coloring::new(3, 3).unwrap(), Some(10), Execution::Sequential).unwrap_err();
        assert!(matches!(err, ComplexError::FaceCap { .. }));
    }

    #[test]
    fn transposed_reports_agree() {
        let a = verify(Coloring::new(2, 4).unwrap(), None, Execution::Sequential).unwrap();
        let b = verify(Coloring::new(4, 2).unwrap(), None, Execution::Sequential).unwrap();
        assert!(a.same_invariants(&b));
    }
}
