//! JSON form of trees shared by the library and the command line:
//! `{"N": 6, "n": 3, "d": 3, "splits": [{"members": [2, 4], "length": "1/2"}]}`.
//! Members exclude leaf 1; lengths are positive rationals written as strings.

use serde::{Deserialize, Serialize};

use crate::error::TreeError;
use crate::rat::Rat;
use crate::split::{Coloring, Split};
use crate::tree::{tree_from_splits, PhyloTree};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitJson {
    pub members: Vec<usize>,
    pub length: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    #[serde(rename = "N")]
    pub leaves: usize,
    pub n: usize,
    pub d: usize,
    pub splits: Vec<SplitJson>,
}

impl TreeJson {
    /// Splits in canonical order.
    pub fn from_tree(tree: &PhyloTree, coloring: Coloring) -> Result<TreeJson, TreeError> {
        if tree.leaves() != coloring.universe() {
            return Err(TreeError::MismatchedLeafSets);
        }
        let splits = tree
            .lengths()
            .iter()
            .map(|(s, l)| SplitJson { members: s.members().to_vec(), length: l.clone() })
            .collect();
        Ok(TreeJson { leaves: coloring.leaves(), n: coloring.n, d: coloring.d, splits })
    }

    pub fn coloring(&self) -> Result<Coloring, TreeError> {
        if self.n + self.d != self.leaves {
            return Err(TreeError::LeafCount(self.leaves));
        }
        Coloring::new(self.n, self.d)
    }

    pub fn to_tree(&self) -> Result<(PhyloTree, Coloring), TreeError> {
        let coloring = self.coloring()?;
        let splits = self
            .splits
            .iter()
            .map(|s| Ok((Split::new(self.leaves, s.members.iter().copied())?, s.length.clone())))
            .collect::<Result<Vec<_>, TreeError>>()?;
        Ok((tree_from_splits(self.leaves, splits)?, coloring))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"N":8,"n":5,"d":3,"splits":[{"members":[2,4,5,8],"length":"3/2"}]}"#;
        let parsed: TreeJson = serde_json::from_str(text).unwrap();
        let (tree, coloring) = parsed.to_tree().unwrap();
        assert_eq!(tree.split_count(), 1);
        assert_eq!(tree.length(&Split::new(8, [2, 4, 5, 8]).unwrap()), Some(&Rat::new(3, 2)));
        let back = TreeJson::from_tree(&tree, coloring).unwrap();
        assert_eq!(back, parsed);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn rejects_bad_input() {
        let bad_count: TreeJson = serde_json::from_str(r#"{"N":7,"n":5,"d":3,"splits":[]}"#).unwrap();
        assert!(bad_count.to_tree().is_err());
        let with_leaf_one: TreeJson =
            serde_json::from_str(r#"{"N":6,"n":3,"d":3,"splits":[{"members":[1,2],"length":"1"}]}"#).unwrap();
        assert!(with_leaf_one.to_tree().is_err());
        let zero: TreeJson =
            serde_json::from_str(r#"{"N":6,"n":3,"d":3,"splits":[{"members":[2,4],"length":"0"}]}"#).unwrap();
        assert!(matches!(zero.to_tree(), Err(TreeError::NonPositiveLength { .. })));
        assert!(serde_json::from_str::<TreeJson>(r#"{"N":6,"n":3,"d":3,"splits":[{"members":[2,4],"length":"1/0"}]}"#)
            .is_err());
    }
}
