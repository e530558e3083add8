//! Surface topology from the movie: Euler characteristic, connectivity,
//! boundary structure.
//!
//! The primary computation stratifies the surface by page slices: elliptic
//! points, puncture points and leaf interiors of each regular slice, the two
//! product collars of each interval, and the singular fiber of each event.
//! Compactly-supported Euler characteristics add up over the strata. The
//! closed-form count `e - h` is checked against this stratified sum and used
//! as a cross-check, not a replacement.

use crate::error::MovieError;
use crate::ids::{LeafId, PunctureId};
use crate::movie::Movie;
use crate::page::{EndPt, LeafShape};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Topological report on the surface a movie presents.
#[derive(Clone, Debug, Serialize)]
pub struct SurfaceReport {
    pub chi: i64,
    pub components: usize,
    pub closed: bool,
    /// Number of boundary circles (cycles of the strand permutation).
    pub boundary_components: usize,
    pub is_disc: bool,
    /// The shortcut count `e - h`, equal to `chi` on valid movies.
    pub chi_fast: i64,
}

fn arcs_in(slice: &crate::page::Slice) -> i64 {
    slice
        .leaves
        .values()
        .filter(|s| matches!(s, LeafShape::Arc(..)))
        .count() as i64
}

/// Euler characteristic and connectivity via the stratified count.
pub fn euler_characteristic(movie: &Movie) -> Result<SurfaceReport, MovieError> {
    movie.require_valid()?;
    let k = movie.k();
    let p = movie.frame.punctures.len() as i64;
    let (ep, en, hp, hn) = movie.counts();
    let e = (ep + en) as i64;
    let h = (hp + hn) as i64;

    // strata of the k distinct regular slices
    let bound = k.max(1);
    let mut chi: i64 = e;
    for i in 0..bound {
        chi += p - arcs_in(&movie.slices[i]);
    }

    if k == 0 {
        // one product collar all the way around
        chi += arcs_in(&movie.slices[0]) - p;
    }

    for (i, ev) in movie.events.iter().enumerate() {
        let slice = &movie.slices[i];
        let a_before = arcs_in(slice);
        let a_after = arcs_in(&movie.slices[i + 1]);
        // two open product collars on either side of the singular fiber
        chi += (a_before - p) + (a_after - p);
        // the singular fiber: punctures, the saddle point, untouched leaf
        // interiors, and the pinched singular leaf
        let [x, y] = &ev.arc.ends;
        let self_saddle = x.leaf == y.leaf;
        let consumed: BTreeSet<&LeafId> = [&x.leaf, &y.leaf].into_iter().collect();
        let untouched_arcs = slice
            .leaves
            .iter()
            .filter(|(id, s)| !consumed.contains(id) && matches!(s, LeafShape::Arc(..)))
            .count() as i64;
        let mut pinched: i64 = 0;
        for l in &consumed {
            let cuts = if self_saddle { 2 } else { 1 };
            pinched += match slice.leaf(l).expect("validated") {
                LeafShape::Arc(..) => 1 + cuts,
                LeafShape::Circle { .. } => cuts,
            };
        }
        chi += p + 1 - untouched_arcs - pinched;
    }

    let chi_fast = e - h;

    // connectivity: one node per leaf occurrence, elliptic point and strand
    // piece; saddles, shared endpoints and strand continuity connect them
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    enum Node {
        Leaf(usize, LeafId),
        Elliptic(crate::ids::ElliId),
        Strand(usize, PunctureId),
    }
    let glue_leaf = |l: &LeafId| {
        movie
            .gluing
            .leaves
            .get(l)
            .cloned()
            .unwrap_or_else(|| l.clone())
    };
    let norm = |i: usize, l: &LeafId| -> Node {
        if i >= bound {
            Node::Leaf(0, glue_leaf(l))
        } else {
            Node::Leaf(i, l.clone())
        }
    };
    let mut nodes: BTreeSet<Node> = BTreeSet::new();
    for i in 0..bound {
        for l in movie.slices[i].leaves.keys() {
            nodes.insert(Node::Leaf(i, l.clone()));
        }
        for pct in &movie.frame.punctures {
            nodes.insert(Node::Strand(i, pct.clone()));
        }
    }
    for el in movie.frame.elliptics.keys() {
        nodes.insert(Node::Elliptic(el.clone()));
    }
    let list: Vec<Node> = nodes.iter().cloned().collect();
    let idx: BTreeMap<&Node, usize> = list.iter().enumerate().map(|(n, x)| (x, n)).collect();
    let mut uf: Vec<usize> = (0..list.len()).collect();
    fn find(uf: &mut Vec<usize>, x: usize) -> usize {
        if uf[x] != x {
            let r = find(uf, uf[x]);
            uf[x] = r;
        }
        uf[x]
    }
    let union = |uf: &mut Vec<usize>, a: &Node, b: &Node| {
        let (x, y) = (idx[a], idx[b]);
        let (rx, ry) = (find(uf, x), find(uf, y));
        if rx != ry {
            uf[rx] = ry;
        }
    };

    for i in 0..bound {
        for (l, shape) in &movie.slices[i].leaves {
            let me = Node::Leaf(i, l.clone());
            if let LeafShape::Arc(a, b) = shape {
                for end in [a, b] {
                    match end {
                        EndPt::E(el) => union(&mut uf, &me, &Node::Elliptic(el.clone())),
                        EndPt::P(pt) => union(&mut uf, &me, &Node::Strand(i, pt.clone())),
                    }
                }
            }
            // flow to the next slice
            if k > 0 && movie.slices[i + 1].leaves.contains_key(l) {
                let next = norm(i + 1, l);
                union(&mut uf, &me, &next);
            } else if k == 0 {
                let next = norm(1, l);
                union(&mut uf, &me, &next);
            }
        }
        // strand continuity across the interval
        for pt in &movie.frame.punctures {
            let next_strand = if i + 1 < bound {
                Node::Strand(i + 1, pt.clone())
            } else {
                Node::Strand(0, movie.gluing.strand_image(pt))
            };
            union(&mut uf, &Node::Strand(i, pt.clone()), &next_strand);
        }
    }
    for (i, ev) in movie.events.iter().enumerate() {
        let a = norm(i, &ev.arc.ends[0].leaf);
        let b = norm(i, &ev.arc.ends[1].leaf);
        union(&mut uf, &a, &b);
        for o in &ev.outputs {
            let on = norm(i + 1, o);
            union(&mut uf, &a, &on);
        }
    }
    let mut roots = BTreeSet::new();
    for n in 0..list.len() {
        roots.insert(find(&mut uf, n));
    }
    let components = roots.len();

    // boundary circles = cycles of the strand permutation
    let mut seen: BTreeSet<PunctureId> = BTreeSet::new();
    let mut boundary_components = 0;
    for pt in &movie.frame.punctures {
        if seen.contains(pt) {
            continue;
        }
        boundary_components += 1;
        let mut cur = pt.clone();
        while seen.insert(cur.clone()) {
            cur = movie.gluing.strand_image(&cur);
        }
    }

    let closed = movie.frame.punctures.is_empty();
    Ok(SurfaceReport {
        chi,
        components,
        closed,
        boundary_components,
        is_disc: chi == 1 && components == 1 && boundary_components == 1,
        chi_fast,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn sphere_is_closed_with_chi_two() {
        let r = euler_characteristic(&fixtures::sphere()).unwrap();
        assert_eq!(r.chi, 2);
        assert_eq!(r.chi_fast, 2);
        assert!(r.closed);
        assert_eq!(r.components, 1);
        assert!(!r.is_disc);
    }

    #[test]
    fn overtwisted_disc_is_a_disc() {
        let r = euler_characteristic(&fixtures::overtwisted_disc()).unwrap();
        assert_eq!(r.chi, 1);
        assert_eq!(r.chi_fast, 1);
        assert_eq!(r.boundary_components, 1);
        assert!(r.is_disc);
    }

    #[test]
    fn trivial_disc_is_a_disc() {
        let r = euler_characteristic(&fixtures::trivial_disc()).unwrap();
        assert_eq!(r.chi, 1);
        assert!(r.is_disc);
        assert_eq!(r.components, 1);
    }

    #[test]
    fn stratified_count_matches_fast_count() {
        for m in [
            fixtures::trivial_disc(),
            fixtures::sphere(),
            fixtures::overtwisted_disc(),
        ] {
            let r = euler_characteristic(&m).unwrap();
            assert_eq!(r.chi, r.chi_fast);
        }
    }
}
