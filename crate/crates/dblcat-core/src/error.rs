use thiserror::Error;

/// Errors from the finite-set kernel: malformed carriers, non-total maps,
/// and mismatched boundaries in limit/colimit constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("duplicate label {label:?} in finite set")]
    DuplicateLabel { label: String },
    #[error("map is not total: no value for {label:?}")]
    NotTotal { label: String },
    #[error("map sends {label:?} to {value:?}, which is outside the codomain")]
    ValueOutsideCodomain { label: String, value: String },
    #[error("map key {label:?} is not in the domain")]
    KeyOutsideDomain { label: String },
    #[error("composition mismatch: codomain {found:?} does not match expected domain {expected:?}")]
    CompositionMismatch { expected: String, found: String },
    #[error("pullback legs must share a codomain (left has {left:?}, right has {right:?})")]
    CodomainMismatch { left: String, right: String },
    #[error("coequalizer requires a parallel pair (domains and codomains must agree)")]
    NotParallel,
    #[error("invalid section: composing with it does not give the identity at {label:?}")]
    InvalidSection { label: String },
    #[error("span legs must share their domain (left apex {left:?}, right apex {right:?})")]
    ApexMismatch { left: String, right: String },
    #[error("relation pair ({src:?}, {tgt:?}) lies outside the carrier sets")]
    PairOutsideCarrier { src: String, tgt: String },
    #[error("label {label:?} contains the reserved separator {sep:?}")]
    ReservedSeparator { label: String, sep: char },
}

/// Errors from double-category operations: frame mismatches and
/// constructions requested from an instance that cannot supply them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DblError {
    #[error("vertical composition mismatch: bottom of the first cell is {upper:?}, top of the second is {lower:?}")]
    VerticalFrameMismatch { upper: String, lower: String },
    #[error("horizontal composition mismatch: {detail}")]
    HorizontalFrameMismatch { detail: String },
    #[error("boundary mismatch: {detail}")]
    BoundaryMismatch { detail: String },
    #[error("cell is not valid in this double category: {detail}")]
    InvalidCell { detail: String },
    #[error("{op} is not supported by the {instance} instance")]
    Unsupported { instance: String, op: String },
    #[error("no factorization found: {detail}")]
    NoFactorization { detail: String },
    #[error("factorization is not unique: {detail}")]
    AmbiguousFactorization { detail: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}
