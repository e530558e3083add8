//! Combinatorial workbench for open book foliations on planar pages.
//!
//! The crate represents movie presentations of surfaces embedded in a planar
//! open book: a sequence of slice diagrams joined by saddle events and closed
//! up by a monodromy relabeling. On top of that it computes the region
//! decomposition, the singular-leaf graphs, the self-linking number,
//! strong-essentiality data and a well-founded complexity; implements the
//! surface moves (b-arc foliation change, braid destabilization, pocket
//! clearing); and runs the reduction that terminates in a surface all of
//! whose low-valence negative vertices are strongly essential.
//!
//! Start with [`fixtures`] for ready-made movies and the `examples/`
//! directory for end-to-end usage.

pub mod analysis;
pub mod error;
pub mod euler;
pub mod fixtures;
pub mod movie;
pub mod moves;
pub mod ids;
pub mod page;
pub mod regions;

pub use error::{MovieError, SliceError};
pub use ids::{CircleId, ElliId, EventId, LeafId, PunctureId, Sign};
