//! Branches, nesting levels and the well-founded complexity driving the
//! reduction.
//!
//! The complexity of a surface is the pair (number of valence-one
//! non-strongly-essential vertices, minimal per-vertex nesting sequence),
//! ordered lexicographically with sequences compared from the highest nesting
//! level downward. The order has no infinite descending chains, which is what
//! makes the reduction terminate.

use crate::error::MovieError;
use crate::ids::{ElliId, LeafId};
use crate::movie::Movie;
use crate::page::{barc_classify_traced, trace_faces, BArcSide, FaceMap, Frame, LeafKind, Slice};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::graphs::{Node, SingularGraph};
use super::invariants::{deformation_candidates, strongly_essential_elliptic};

/// The branch of a candidate vertex: the maximal connected subgraph of the
/// negative graph containing it whose other vertices all have valence at most
/// two and are not strongly essential.
#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub root: ElliId,
    pub vertices: BTreeSet<ElliId>,
    /// Indices into the edge list of the graph the branch was cut from.
    pub edges: Vec<usize>,
}

/// Pure-graph branch computation, with the non-strongly-essential vertices
/// supplied explicitly.
pub fn branch_in_graph(
    g: &SingularGraph,
    v: &ElliId,
    non_strongly_essential: &BTreeSet<ElliId>,
) -> Branch {
    let admissible = |w: &ElliId| -> bool {
        w == v || (g.valence(w) <= 2 && non_strongly_essential.contains(w))
    };
    let mut vertices: BTreeSet<ElliId> = BTreeSet::new();
    let mut queue = vec![v.clone()];
    while let Some(w) = queue.pop() {
        if !vertices.insert(w.clone()) {
            continue;
        }
        for e in &g.edges {
            let other = match (&e.ends[0], &e.ends[1]) {
                (Node::Elliptic(a), Node::Elliptic(b)) if *a == w => Some(b),
                (Node::Elliptic(a), Node::Elliptic(b)) if *b == w => Some(a),
                _ => None,
            };
            if let Some(o) = other {
                if admissible(o) && !vertices.contains(o) {
                    queue.push(o.clone());
                }
            }
        }
    }
    let edges = g
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)|

            matches!((&e.ends[0], &e.ends[1]),
                (Node::Elliptic(a), Node::Elliptic(b))
                    if vertices.contains(a) && vertices.contains(b)))
        .map(|(i, _)| i)
        .collect();
    Branch {
        root: v.clone(),
        vertices,
        edges,
    }
}

/// Branch of a valence-one non-strongly-essential vertex of the movie's
/// negative graph.
pub fn branch(movie: &Movie, gmm: &SingularGraph, v: &ElliId) -> Result<Branch, MovieError> {
    let candidates = deformation_candidates(movie, gmm)?;
    if !candidates.contains(v) {
        return Err(MovieError::NotInVSet(v.clone()));
    }
    let mut nse = BTreeSet::new();
    for w in &gmm.vertices {
        if !strongly_essential_elliptic(movie, w)? {
            nse.insert(w.clone());
        }
    }
    Ok(branch_in_graph(gmm, v, &nse))
}

/// The disc side used for nesting: the unique pocket side of a
/// non-strongly-essential b-arc, preferring (on a one-circle page, where both
/// sides are discs) the side that actually carries branch vertices.
fn nesting_pocket<'a>(
    class: &'a crate::page::BArcClass,
    branch_set: &BTreeSet<ElliId>,
) -> Option<&'a BArcSide> {
    let sides = class.sides.as_ref()?;
    let pockets: Vec<&BArcSide> = sides.iter().filter(|s| s.is_pocket()).collect();
    match pockets.len() {
        0 => None,
        1 => Some(pockets[0]),
        _ => pockets
            .iter()
            .find(|s| s.interior_elliptics.iter().any(|e| branch_set.contains(e)))
            .copied()
            .or(Some(pockets[0])),
    }
}

/// Nesting level of one non-strongly-essential b-arc within a slice, with
/// respect to a set of branch vertices. Branch vertices on the pocket's
/// binding arc raise the level by one above the deepest b-arc hanging at
/// them; an empty pocket has level zero.
pub fn arc_nesting_level(
    frame: &Frame,
    slice: &Slice,
    slice_index: usize,
    fm: &FaceMap,
    branch_set: &BTreeSet<ElliId>,
    leaf: &LeafId,
    visited: &mut BTreeSet<LeafId>,
) -> Result<u64, MovieError> {
    if !visited.insert(leaf.clone()) {
        return Err(MovieError::NestingCycle {
            slice: slice_index,
            leaf: leaf.clone(),
        });
    }
    let class = barc_classify_traced(frame, slice, fm, leaf).map_err(MovieError::Slice)?;
    let pocket = match nesting_pocket(&class, branch_set) {
        Some(p) => p,
        None => {
            return Err(MovieError::PreconditionFailed(format!(
                "leaf {leaf} is strongly essential; nesting level undefined"
            )))
        }
    };
    let on_alpha: Vec<&ElliId> = pocket
        .interior_elliptics
        .iter()
        .filter(|e| branch_set.contains(*e))
        .collect();
    if on_alpha.is_empty() {
        visited.remove(leaf);
        return Ok(0);
    }
    let mut deepest: u64 = 0;
    for u in on_alpha {
        if let Some((lid, shape)) = slice.leaf_at_elliptic(u) {
            if crate::page::leaf_kind(shape) == LeafKind::B {
                let sub =
                    arc_nesting_level(frame, slice, slice_index, fm, branch_set, lid, visited)?;
                deepest = deepest.max(sub);
            }
        }
    }
    visited.remove(leaf);
    Ok(deepest + 1)
}

/// Nesting level of a branch vertex: the maximum over all slices of the
/// levels of the non-strongly-essential b-arcs ending at it.
pub fn nesting_level(movie: &Movie, branch: &Branch, w: &ElliId) -> Result<u64, MovieError> {
    if !branch.vertices.contains(w) {
        return Err(MovieError::NotInVSet(w.clone()));
    }
    let bound = movie.k().max(1);
    let mut best: Option<u64> = None;
    for i in 0..bound {
        let slice = &movie.slices[i];
        let Some((lid, shape)) = slice.leaf_at_elliptic(w) else {
            continue;
        };
        if crate::page::leaf_kind(shape) != LeafKind::B {
            continue;
        }
        let fm = trace_faces(&movie.frame, slice).map_err(MovieError::Slice)?;
        let class = barc_classify_traced(&movie.frame, slice, &fm, lid).map_err(MovieError::Slice)?;
        if class.strongly_essential {
            continue;
        }
        let mut visited = BTreeSet::new();
        let lvl = arc_nesting_level(
            &movie.frame,
            slice,
            i,
            &fm,
            &branch.vertices,
            lid,
            &mut visited,
        )?;
        best = Some(best.map_or(lvl, |b: u64| b.max(lvl)));
    }
    best.ok_or_else(|| MovieError::NoNonEssentialBArc(w.clone()))
}

/// A finitely-supported sequence of vertex counts per nesting level,
/// compared lexicographically from the highest level downward.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ComplexitySeq(pub Vec<u64>);

impl ComplexitySeq {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl PartialOrd for ComplexitySeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ComplexitySeq {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.0.len().max(other.0.len());
        for level in (0..n).rev() {
            let a = self.0.get(level).copied().unwrap_or(0);
            let b = other.0.get(level).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl std::fmt::Display for ComplexitySeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(...,0")?;
        for c in self.0.iter().rev() {
            write!(f, ",{c}")?;
        }
        write!(f, ")")
    }
}

/// The full complexity: candidate count first, then the minimal sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Complexity {
    pub v_count: u64,
    pub seq: ComplexitySeq,
}

impl PartialOrd for Complexity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Complexity {
    fn cmp(&self, other: &Self) -> Ordering {
        self.v_count
            .cmp(&other.v_count)
            .then_with(|| self.seq.cmp(&other.seq))
    }
}

impl std::fmt::Display for Complexity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.v_count, self.seq)
    }
}

/// Complexity data of the whole movie.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexityReport {
    pub complexity: Complexity,
    /// Per-candidate sequences, sorted by vertex id.
    pub per_vertex: Vec<(ElliId, ComplexitySeq)>,
    /// The candidate realizing the minimum (smallest id wins ties).
    pub minimizer: Option<ElliId>,
}

/// Sequence of one candidate vertex: counts of its branch vertices per
/// nesting level.
pub fn vertex_sequence(
    movie: &Movie,
    gmm: &SingularGraph,
    v: &ElliId,
) -> Result<ComplexitySeq, MovieError> {
    let b = branch(movie, gmm, v)?;
    let mut counts: Vec<u64> = Vec::new();
    for w in &b.vertices {
        let lvl = nesting_level(movie, &b, w)? as usize;
        if counts.len() <= lvl {
            counts.resize(lvl + 1, 0);
        }
        counts[lvl] += 1;
    }
    Ok(ComplexitySeq(counts))
}

/// Compute the complexity of the movie from its negative graph.
pub fn disc_complexity(movie: &Movie, gmm: &SingularGraph) -> Result<ComplexityReport, MovieError> {
    let candidates = deformation_candidates(movie, gmm)?;
    let mut per_vertex = Vec::new();
    for v in &candidates {
        per_vertex.push((v.clone(), vertex_sequence(movie, gmm, v)?));
    }
    per_vertex.sort_by(|a, b| a.0.cmp(&b.0));
    let minimizer = per_vertex
        .iter()
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
        .map(|(v, _)| v.clone());
    let seq = minimizer
        .as_ref()
        .and_then(|v| {
            per_vertex
                .iter()
                .find(|(w, _)| w == v)
                .map(|(_, s)| s.clone())
        })
        .unwrap_or_default();
    Ok(ComplexityReport {
        complexity: Complexity {
            v_count: candidates.len() as u64,
            seq,
        },
        per_vertex,
        minimizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::Sign;

    #[test]
    fn sequences_compare_from_the_highest_level() {
        // (...,0,0,1,1,4) > (...,0,0,9,42)
        let a = ComplexitySeq(vec![4, 1, 1]);
        let b = ComplexitySeq(vec![42, 9]);
        assert_eq!(a.cmp(&b), Ordering::Greater);
        assert_eq!(a.cmp(&a.clone()), Ordering::Equal);
        let zero = ComplexitySeq(vec![]);
        assert!(zero < b);
        assert!(Complexity {
            v_count: 0,
            seq: zero
        } < Complexity {
            v_count: 1,
            seq: ComplexitySeq(vec![])
        });
    }

    #[test]
    fn branches_of_the_three_root_figure() {
        // a tree with one valence-three strongly essential hub `s`:
        //    v - a - b - s - c - u       w - s
        let mk = |edges: &[(&str, &str)]| SingularGraph {
            sign: Sign::Neg,
            vertices: edges
                .iter()
                .flat_map(|(a, b)| [ElliId::new(*a), ElliId::new(*b)])
                .collect(),
            edges: edges
                .iter()
                .enumerate()
                .map(|(i, (a, b))| super::super::graphs::GraphEdge {
                    event: crate::ids::EventId::new(format!("h{i}")),
                    ends: [
                        Node::Elliptic(ElliId::new(*a)),
                        Node::Elliptic(ElliId::new(*b)),
                    ],
                })
                .collect(),
        };
        let g = mk(&[
            ("v", "a"),
            ("a", "b"),
            ("b", "s"),
            ("s", "c"),
            ("c", "u"),
            ("s", "w"),
        ]);
        let nse: BTreeSet<ElliId> = ["v", "a", "b", "c", "u", "w"]
            .iter()
            .map(|s| ElliId::new(*s))
            .collect();
        let names = |b: &Branch| -> BTreeSet<String> {
            b.vertices.iter().map(|v| v.to_string()).collect()
        };
        let bv = branch_in_graph(&g, &ElliId::new("v"), &nse);
        assert_eq!(
            names(&bv),
            ["v", "a", "b"].iter().map(|s| s.to_string()).collect()
        );
        let bu = branch_in_graph(&g, &ElliId::new("u"), &nse);
        assert_eq!(
            names(&bu),
            ["u", "c"].iter().map(|s| s.to_string()).collect()
        );
        let bw = branch_in_graph(&g, &ElliId::new("w"), &nse);
        assert_eq!(names(&bw), ["w"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn isolated_candidate_with_strongly_essential_neighbour() {
        let g = SingularGraph {
            sign: Sign::Neg,
            vertices: [ElliId::new("v"), ElliId::new("s")].into_iter().collect(),
            edges: vec![super::super::graphs::GraphEdge {
                event: crate::ids::EventId::new("h"),
                ends: [
                    Node::Elliptic(ElliId::new("v")),
                    Node::Elliptic(ElliId::new("s")),
                ],
            }],
        };
        let nse: BTreeSet<ElliId> = [ElliId::new("v")].into_iter().collect();
        let b = branch_in_graph(&g, &ElliId::new("v"), &nse);
        assert_eq!(b.vertices.len(), 1);
        assert!(b.vertices.contains(&ElliId::new("v")));
    }

    #[test]
    fn chain_of_admissible_vertices_is_swallowed() {
        let g = SingularGraph {
            sign: Sign::Neg,
            vertices: ["v", "x1", "x2", "x3"]
                .iter()
                .map(|s| ElliId::new(*s))
                .collect(),
            edges: vec![
                super::super::graphs::GraphEdge {
                    event: crate::ids::EventId::new("h0"),
                    ends: [
                        Node::Elliptic(ElliId::new("v")),
                        Node::Elliptic(ElliId::new("x1")),
                    ],
                },
                super::super::graphs::GraphEdge {
                    event: crate::ids::EventId::new("h1"),
                    ends: [
                        Node::Elliptic(ElliId::new("x1")),
                        Node::Elliptic(ElliId::new("x2")),
                    ],
                },
                super::super::graphs::GraphEdge {
                    event: crate::ids::EventId::new("h2"),
                    ends: [
                        Node::Elliptic(ElliId::new("x2")),
                        Node::Elliptic(ElliId::new("x3")),
                    ],
                },
            ],
        };
        let nse: BTreeSet<ElliId> = ["v", "x1", "x2", "x3"]
            .iter()
            .map(|s| ElliId::new(*s))
            .collect();
        let b = branch_in_graph(&g, &ElliId::new("v"), &nse);
        assert_eq!(b.vertices.len(), 4);
        assert_eq!(b.edges.len(), 3);
    }
}
