//! The singular-leaf graphs of a movie.
//!
//! For each sign the graph collects the elliptic points of that sign sitting
//! on ab- or bb-tiles, plus one edge per hyperbolic point of that sign in an
//! aa/ab/bb tile. The edge runs along the separatrices that leave (negative
//! sign) or enter (positive sign) the saddle: combinatorially, it joins the
//! sink endpoints of the two consumed leaves for a negative point and their
//! source endpoints for a positive one. A separatrix landing on the braid
//! boundary contributes a valence-one fake vertex.

use crate::error::MovieError;
use crate::ids::{ElliId, EventId, Sign};
use crate::movie::Movie;
use crate::page::{oriented_ends, EndPt, LeafShape};
use crate::regions::{region_decomposition, RegionDecomposition, RegionType};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// A node of a singular graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Node {
    Elliptic(ElliId),
    /// A separatrix end on the braid boundary, tagged by event and slot.
    Fake(EventId, u8),
}

/// One edge, owned by a hyperbolic point.
#[derive(Clone, Debug, Serialize)]
pub struct GraphEdge {
    pub event: EventId,
    pub ends: [Node; 2],
}

/// The graph of same-sign elliptic and hyperbolic points joined by
/// separatrices.
#[derive(Clone, Debug, Serialize)]
pub struct SingularGraph {
    pub sign: Sign,
    pub vertices: BTreeSet<ElliId>,
    pub edges: Vec<GraphEdge>,
}

impl SingularGraph {
    pub fn fake_vertices(&self) -> Vec<&Node> {
        self.edges
            .iter()
            .flat_map(|e| e.ends.iter())
            .filter(|n| matches!(n, Node::Fake(..)))
            .collect()
    }

    pub fn has_fake_vertices(&self) -> bool {
        !self.fake_vertices().is_empty()
    }

    /// Valence of an elliptic vertex (loop edges count twice).
    pub fn valence(&self, v: &ElliId) -> usize {
        self.edges
            .iter()
            .flat_map(|e| e.ends.iter())
            .filter(|n| matches!(n, Node::Elliptic(x) if x == v))
            .count()
    }

    fn all_nodes(&self) -> BTreeSet<Node> {
        let mut nodes: BTreeSet<Node> = self
            .vertices
            .iter()
            .map(|v| Node::Elliptic(v.clone()))
            .collect();
        for e in &self.edges {
            nodes.extend(e.ends.iter().cloned());
        }
        nodes
    }

    pub fn is_connected(&self) -> bool {
        let nodes: Vec<Node> = self.all_nodes().into_iter().collect();
        if nodes.is_empty() {
            return true;
        }
        let idx: BTreeMap<&Node, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut uf: Vec<usize> = (0..nodes.len()).collect();
        fn find(uf: &mut Vec<usize>, x: usize) -> usize {
            if uf[x] != x {
                let r = find(uf, uf[x]);
                uf[x] = r;
            }
            uf[x]
        }
        for e in &self.edges {
            let (a, b) = (idx[&e.ends[0]], idx[&e.ends[1]]);
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            if ra != rb {
                uf[ra] = rb;
            }
        }
        let mut roots = BTreeSet::new();
        for i in 0..nodes.len() {
            roots.insert(find(&mut uf, i));
        }
        roots.len() == 1
    }

    /// Connected and acyclic (counting fake vertices as genuine nodes).
    pub fn is_tree(&self) -> bool {
        let nodes = self.all_nodes();
        self.is_connected() && self.edges.len() + 1 == nodes.len().max(1)
    }

    /// Homeomorphic to a circle: connected, at least one edge, every node of
    /// valence exactly two (fake vertices always have valence one, so their
    /// presence rules this out).
    pub fn is_circle(&self) -> bool {
        if self.edges.is_empty() || self.has_fake_vertices() {
            return false;
        }
        if !self.is_connected() {
            return false;
        }
        self.vertices.iter().all(|v| self.valence(v) == 2)
    }
}

/// Build the singular graph of the given sign.
pub fn build_graph(movie: &Movie, sign: Sign) -> Result<SingularGraph, MovieError> {
    let rd = region_decomposition(movie)?;
    Ok(build_graph_from(movie, &rd, sign))
}

/// Build the graph reusing an existing region decomposition.
pub fn build_graph_from(movie: &Movie, rd: &RegionDecomposition, sign: Sign) -> SingularGraph {
    let tiles = [RegionType::Aa, RegionType::Ab, RegionType::Bb];
    let mut vertices: BTreeSet<ElliId> = BTreeSet::new();
    for r in &rd.regions {
        if matches!(r.kind, RegionType::Ab | RegionType::Bb) {
            for e in &r.elliptics {
                if movie.frame.elliptics[e].sign == sign {
                    vertices.insert(e.clone());
                }
            }
        }
    }

    let mut edges = Vec::new();
    for (i, ev) in movie.events.iter().enumerate() {
        if ev.sign != sign {
            continue;
        }
        let region = &rd.regions[i];
        if !tiles.contains(&region.kind) {
            continue;
        }
        let slice = &movie.slices[i];
        // separatrix endpoint of one consumed leaf: the sink for negative
        // saddles, the source for positive ones
        let node_of = |leaf: &crate::ids::LeafId, slot: u8| -> Node {
            let shape = slice.leaf(leaf).expect("validated");
            let (tail, head) = oriented_ends(&movie.frame, shape).expect("validated");
            let end = match sign {
                Sign::Neg => head,
                Sign::Pos => tail,
            };
            match end {
                EndPt::E(e) => Node::Elliptic(e),
                EndPt::P(_) => Node::Fake(ev.id.clone(), slot),
            }
        };
        let [a, b] = &ev.arc.ends;
        let ends = [node_of(&a.leaf, 0), node_of(&b.leaf, 1)];
        for n in &ends {
            if let Node::Elliptic(e) = n {
                vertices.insert(e.clone());
            }
        }
        edges.push(GraphEdge {
            event: ev.id.clone(),
            ends,
        });
    }

    SingularGraph {
        sign,
        vertices,
        edges,
    }
}

/// Per-condition verdict for the transverse-overtwisted-disc test.
#[derive(Clone, Debug, Serialize)]
pub struct OtdVerdict {
    pub negative_graph_tree_without_fakes: bool,
    pub positive_graph_circle: bool,
    pub no_c_circles: bool,
    pub single_braid_boundary: bool,
    pub verdict: bool,
}

/// Decide whether the movie presents a transverse overtwisted disc.
pub fn is_transverse_ot_disc(movie: &Movie) -> Result<OtdVerdict, MovieError> {
    let rd = region_decomposition(movie)?;
    let gmm = build_graph_from(movie, &rd, Sign::Neg);
    let gpp = build_graph_from(movie, &rd, Sign::Pos);
    let no_c = movie
        .slices
        .iter()
        .all(|s| s.leaves.values().all(|l| matches!(l, LeafShape::Arc(..))));
    let surf = crate::euler::euler_characteristic(movie)?;
    let single = !surf.closed && surf.boundary_components == 1 && surf.components == 1;
    let cond1 = gmm.is_tree() && !gmm.has_fake_vertices();
    let cond2 = gpp.is_circle();
    Ok(OtdVerdict {
        negative_graph_tree_without_fakes: cond1,
        positive_graph_circle: cond2,
        no_c_circles: no_c,
        single_braid_boundary: single,
        verdict: cond1 && cond2 && no_c && single,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn otd_negative_graph_is_a_single_vertex() {
        let m = fixtures::overtwisted_disc();
        let g = build_graph(&m, Sign::Neg).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert!(g.vertices.contains(&ElliId::new("v")));
        assert!(g.edges.is_empty());
        assert!(g.is_tree());
        assert!(!g.has_fake_vertices());
    }

    #[test]
    fn otd_positive_graph_is_a_circle() {
        let m = fixtures::overtwisted_disc();
        let g = build_graph(&m, Sign::Pos).unwrap();
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(g.edges.len(), 2);
        assert!(g.is_circle());
    }

    #[test]
    fn sphere_negative_graph_is_one_edge() {
        let m = fixtures::sphere();
        let g = build_graph(&m, Sign::Neg).unwrap();
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(g.edges.len(), 1);
        assert!(!g.has_fake_vertices());
        assert!(g.is_tree());
    }

    #[test]
    fn otd_verdicts() {
        let v = is_transverse_ot_disc(&fixtures::overtwisted_disc()).unwrap();
        assert!(v.verdict, "{v:?}");
        let v = is_transverse_ot_disc(&fixtures::sphere()).unwrap();
        assert!(!v.verdict);
        assert!(!v.single_braid_boundary);
        let v = is_transverse_ot_disc(&fixtures::trivial_disc()).unwrap();
        assert!(!v.verdict); // positive graph is empty, not a circle
    }
}
