use thiserror::Error;

use crate::tropical::MinorWitness;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("leaf count {0} outside the supported range 2..=64")]
    LeafCount(usize),
    #[error("leaf set must contain leaf 1")]
    MissingLeafOne,
    #[error("invalid split {members:?}: {reason}")]
    InvalidSplit { members: Vec<usize>, reason: &'static str },
    #[error("splits are over different leaf sets")]
    MismatchedLeafSets,
    #[error("splits {0:?} and {1:?} are incompatible")]
    IncompatibleSplits(Vec<usize>, Vec<usize>),
    #[error("split {members:?} has non-positive length {length}")]
    NonPositiveLength { members: Vec<usize>, length: String },
    #[error("split {0:?} is a singleton split; leaf edges are implicit")]
    SingletonSplit(Vec<usize>),
    #[error("split {0:?} listed twice")]
    DuplicateSplit(Vec<usize>),
    #[error("tree is not trivalent")]
    NotTrivalent,
    #[error("coloring needs n >= 1 and d >= 1, got n={n}, d={d}")]
    EmptyColor { n: usize, d: usize },
    #[error("metric is not a tree metric: {0}")]
    NotTreeMetric(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("points are not tropically collinear (nonsingular minor at {0})")]
    NotCollinear(MinorWitness),
    #[error("expected {expected}, got {found}")]
    Shape { expected: String, found: String },
    #[error("reconstructed tree does not reproduce the configuration")]
    Inconsistent,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("face counts {counts:?} (total {total}) exceed the cap of {cap} faces")]
    FaceCap { counts: Vec<usize>, total: usize, cap: usize },
    #[error("shelling order is not a permutation of the facets: {0}")]
    NotAPermutation(String),
    #[error("complex is not pure: facet sizes {0:?}")]
    NotPure(Vec<usize>),
    #[error("facet order is not a verified shelling")]
    NotShelling,
    #[error("complex has no vertices")]
    Empty,
    #[error(transparent)]
    Tree(#[from] TreeError),
}
