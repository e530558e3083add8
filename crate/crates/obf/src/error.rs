//! Error types.

use crate::ids::{CircleId, ElliId, LeafId};
use thiserror::Error;

/// Errors raised while interrogating or rewriting a single slice.
#[derive(Debug, Error)]
pub enum SliceError {
    #[error("reference to unknown id: {0}")]
    DanglingReference(String),
    #[error("rotation data is not realizable in a planar page: component through {witness} has Euler characteristic {chi}, expected 2")]
    NonPlanar { witness: String, chi: i64 },
    #[error("island {0} has no placement anchor")]
    MissingAnchor(String),
    #[error("placement anchor for island {island} is invalid: {reason}")]
    BadAnchor { island: String, reason: String },
    #[error("island {0} has several page walks; an explicit outer walk is required")]
    AmbiguousOuter(String),
    #[error("unknown leaf {0}")]
    UnknownLeaf(LeafId),
    #[error("leaf {0} is not a b-arc")]
    NotABArc(LeafId),
    #[error("unknown elliptic point {0}")]
    UnknownElliptic(ElliId),
    #[error("unknown circle {0}")]
    UnknownCircle(CircleId),
    #[error("elliptic point {elliptic} carries {found} leaf ends in one slice, expected exactly 1")]
    Radiality { elliptic: ElliId, found: usize },
    #[error("puncture {0} carries {1} leaf ends in one slice, expected exactly 1")]
    PunctureDegree(crate::ids::PunctureId, usize),
    #[error("b-arc {0} must join elliptic points of opposite sign")]
    BArcSigns(LeafId),
    #[error("describing arc is invalid: {0}")]
    InvalidArc(String),
    #[error("describing-arc sides are inconsistent with the declared sign {0}")]
    SignInconsistent(crate::ids::Sign),
    #[error("resolution would produce an illegal leaf: {0}")]
    IllegalResolution(String),
    #[error("forbidden self-saddle: describing arc meets one leaf from both sides")]
    ForbiddenSelfSaddle,
}

/// Errors raised by movie-level computations and moves.
#[derive(Debug, Error)]
pub enum MovieError {
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error("movie fails validation: {0}")]
    InvalidMovie(String),
    #[error("surface is closed; the requested invariant needs a braided boundary")]
    ClosedSurface,
    #[error("forbidden degenerate region at event {0}")]
    ForbiddenDegenerate(crate::ids::EventId),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("aa-tile is not in destabilizable position: {0}")]
    NotDestabilizable(String),
    #[error("b-arc {0} is essential; the pocket must be empty of leaves and punctures")]
    BArcEssential(LeafId),
    #[error("vertex {0} carries an a-arc in some slice")]
    PreconditionAArc(ElliId),
    #[error("vertex {0} is not strongly essential")]
    NotStronglyEssential(ElliId),
    #[error("vertex {0} is not in the deformation candidate set")]
    NotInVSet(ElliId),
    #[error("vertex {0} has no non-strongly-essential b-arc")]
    NoNonEssentialBArc(ElliId),
    #[error("input foliation is not essential: {0}")]
    NotEssentialInput(String),
    #[error("complexity did not strictly decrease: before {before}, after {after}")]
    ComplexityNotDecreased { before: String, after: String },
    #[error("iteration cap {0} exceeded; this is a bug, not a success")]
    IterationCapExceeded(usize),
    #[error("one FDTC value per binding circle is required: got {got}, page has {expected}")]
    ArityMismatch { got: usize, expected: usize },
    #[error("nesting-level recursion revisited slice {slice} leaf {leaf}: input data is malformed")]
    NestingCycle { slice: usize, leaf: LeafId },
}
