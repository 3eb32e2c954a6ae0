//! Tropical collinearity of point configurations and the topology of the
//! space of collinear configurations.
//!
//! * [`tropical`]: exact min-plus rank tests on rational matrices.
//! * [`split`], [`tree`]: splits, phylogenetic trees, enumeration and the
//!   recursive tree order used for shelling.
//! * [`evaluation`]: the relative evaluation map from trees to point
//!   configurations and its inverse (the canonical tropical line).
//! * [`complex`], [`shelling`], [`homology`], [`combs`]: the flag complex of
//!   bicolored splits, its shelling, and its top homology computed three ways.

pub mod cli;
pub mod combs;
pub mod complex;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod homology;
pub mod io;
pub mod linalg;
pub mod rat;
pub mod report;
pub mod shelling;
pub mod split;
pub mod tree;
pub mod tropical;

pub use error::{ComplexError, EvalError, TreeError};
pub use exec::Execution;
pub use rat::Rat;
pub use split::{compatible, is_bicolored, subset_less, Coloring, LabelSet, Split};
pub use tree::{
    decompose_at_leaf_one, enumerate_facets, enumerate_trivalent_trees, tree_from_splits, tree_less, tree_metric,
    tree_order, PhyloTree,
};
pub use tropical::{
    normalize_point, trop_det3_is_singular, tropical_rank_le2, ProjectivePoint, RankVerdict, RatMatrix,
};
