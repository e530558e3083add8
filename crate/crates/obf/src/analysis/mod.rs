//! Invariants and verdicts: singular graphs, the overtwisted-disc test,
//! self-linking, strong essentiality, twist-coefficient bounds, branches,
//! nesting levels and the reduction complexity.

mod complexity;
mod graphs;
mod invariants;

pub use complexity::{
    arc_nesting_level, branch, branch_in_graph, disc_complexity, nesting_level, vertex_sequence,
    Branch, Complexity, ComplexityReport, ComplexitySeq,
};
pub use graphs::{
    build_graph, build_graph_from, is_transverse_ot_disc, GraphEdge, Node, OtdVerdict,
    SingularGraph,
};
pub use invariants::{
    deformation_candidates, fdtc_bounds, foliation_essential, low_valence_strongly_essential,
    negative_graph, neighbours, self_linking, strongly_essential_elliptic, tightness_criterion,
    FdtcBounds, TightnessVerdict,
};
