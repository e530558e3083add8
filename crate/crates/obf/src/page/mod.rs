//! The page model: planar slice diagrams, face tracing, b-arc classification
//! and saddle resolution.

mod classify;
mod diagram;
mod saddle;
mod trace;

pub use classify::{barc_classify, barc_classify_traced, BArcClass, BArcSide};
pub use diagram::{
    check_wellformed, leaf_kind, oriented_ends, punct, Dart, Elliptic, EndPt, EndPt2, Frame,
    IslandKey, LeafKind, LeafShape, Page, Side, Slice, SliceDiagram,
};
pub use saddle::{attach_for_sign, saddle_resolve, Attach, DescribingArc, Resolution};
pub use trace::{canonicalize, trace_faces, Face, FaceId, FaceMap};

#[cfg(test)]
mod tests;
