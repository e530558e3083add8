//! Region decomposition of a movie.
//!
//! Every hyperbolic event owns one region, typed by the kinds of the leaves
//! its saddle consumes and produces (aa/ab/bb tiles, ac/bc annuli, cc pants).
//! Leaves are grouped into families: a family is one leaf worldline, alive
//! from the event that creates it to the event that consumes it, possibly
//! wrapping through the gluing. A region is degenerate when some of its
//! boundary families coincide.

use crate::error::MovieError;
use crate::ids::{ElliId, EventId, LeafId, Sign};
use crate::movie::Movie;
use crate::page::{leaf_kind, EndPt, LeafKind, LeafShape};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// The six region types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum RegionType {
    Aa,
    Ab,
    Bb,
    Ac,
    Bc,
    Cc,
}

impl std::fmt::Display for RegionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegionType::Aa => "aa",
            RegionType::Ab => "ab",
            RegionType::Bb => "bb",
            RegionType::Ac => "ac",
            RegionType::Bc => "bc",
            RegionType::Cc => "cc",
        })
    }
}

/// A leaf family, named by its smallest member `(slice, leaf)`.
pub type FamilyId = (usize, LeafId);

/// One region of the decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct Region {
    pub event: EventId,
    pub index: usize,
    pub kind: RegionType,
    pub sign: Sign,
    pub degenerate: bool,
    /// Families of the leaves the saddle consumes (γ-end slots).
    pub before: Vec<FamilyId>,
    /// Families of the leaves the saddle produces.
    pub after: Vec<FamilyId>,
    /// Elliptic endpoints of all leaves involved.
    pub elliptics: BTreeSet<ElliId>,
}

/// The full decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct RegionDecomposition {
    pub regions: Vec<Region>,
    /// Member lists of every family.
    pub families: BTreeMap<FamilyId, Vec<(usize, LeafId)>>,
    /// Families never touched by any event (product annuli of the movie).
    pub eternal: BTreeSet<FamilyId>,
}

impl RegionDecomposition {
    pub fn region_of_event(&self, id: &EventId) -> Option<&Region> {
        self.regions.iter().find(|r| &r.event == id)
    }

    /// Pairs of regions sharing a boundary family.
    pub fn adjacency(&self) -> Vec<(usize, usize, FamilyId)> {
        let mut producers: BTreeMap<&FamilyId, usize> = BTreeMap::new();
        let mut out = Vec::new();
        for r in &self.regions {
            for f in &r.after {
                producers.insert(f, r.index);
            }
        }
        for r in &self.regions {
            for f in &r.before {
                if let Some(&p) = producers.get(f) {
                    out.push((p, r.index, f.clone()));
                }
            }
        }
        out
    }
}

/// Compute leaf families of a valid movie. Slice `k` is identified with slice
/// `0` through the gluing, so members are indexed by slices `0..k` only (all
/// of them for a movie with no events).
pub fn leaf_families(movie: &Movie) -> BTreeMap<FamilyId, Vec<(usize, LeafId)>> {
    let k = movie.k();
    let bound = if k == 0 { 1 } else { k };
    let mut nodes: Vec<(usize, LeafId)> = Vec::new();
    for i in 0..bound {
        for l in movie.slices[i].leaves.keys() {
            nodes.push((i, l.clone()));
        }
    }
    let idx: BTreeMap<&(usize, LeafId), usize> =
        nodes.iter().enumerate().map(|(n, x)| (x, n)).collect();
    let mut uf: Vec<usize> = (0..nodes.len()).collect();
    fn find(uf: &mut Vec<usize>, x: usize) -> usize {
        if uf[x] != x {
            let r = find(uf, uf[x]);
            uf[x] = r;
        }
        uf[x]
    }
    let union = |uf: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(uf, a), find(uf, b));
        if ra != rb {
            uf[ra] = rb;
        }
    };
    // flow between consecutive slices: untouched leaves keep their id; the
    // step into slice k wraps through the gluing onto slice 0
    for i in 0..k {
        for l in movie.slices[i].leaves.keys() {
            if !movie.slices[i + 1].leaves.contains_key(l) {
                continue;
            }
            let a = idx[&(i, l.clone())];
            let b = if i + 1 < k {
                idx[&(i + 1, l.clone())]
            } else {
                let target = movie
                    .gluing
                    .leaves
                    .get(l)
                    .cloned()
                    .unwrap_or_else(|| l.clone());
                idx[&(0usize, target)]
            };
            union(&mut uf, a, b);
        }
    }
    // a movie without events is one full turn of the identity flow
    if k == 0 {
        for l in movie.slices[0].leaves.keys() {
            let target = movie
                .gluing
                .leaves
                .get(l)
                .cloned()
                .unwrap_or_else(|| l.clone());
            let (a, b) = (idx[&(0, l.clone())], idx[&(0usize, target)]);
            union(&mut uf, a, b);
        }
    }
    // name families by their smallest member
    let mut members: BTreeMap<usize, Vec<(usize, LeafId)>> = BTreeMap::new();
    for (n, node) in nodes.iter().enumerate() {
        members.entry(find(&mut uf, n)).or_default().push(node.clone());
    }
    members
        .into_values()
        .map(|mut v| {
            v.sort();
            (v[0].clone(), v)
        })
        .collect()
}

/// Compute the region decomposition of a movie.
pub fn region_decomposition(movie: &Movie) -> Result<RegionDecomposition, MovieError> {
    for ev in &movie.events {
        let [a, b] = &ev.arc.ends;
        if a.leaf == b.leaf && a.side != b.side {
            return Err(MovieError::ForbiddenDegenerate(ev.id.clone()));
        }
    }
    movie.require_valid()?;

    let families = leaf_families(movie);
    let mut family_of: BTreeMap<(usize, LeafId), FamilyId> = BTreeMap::new();
    for (fid, mem) in &families {
        for m in mem {
            family_of.insert(m.clone(), fid.clone());
        }
    }
    let k = movie.k();
    let fam_at = |i: usize, l: &LeafId| -> FamilyId {
        if i == k && k > 0 {
            // slice k is the glued copy of slice 0
            let target = movie
                .gluing
                .leaves
                .get(l)
                .cloned()
                .unwrap_or_else(|| l.clone());
            family_of[&(0usize, target)].clone()
        } else {
            family_of[&(i, l.clone())].clone()
        }
    };

    let mut touched: BTreeSet<FamilyId> = BTreeSet::new();
    let mut regions = Vec::new();
    for (i, ev) in movie.events.iter().enumerate() {
        let slice = &movie.slices[i];
        let [a, b] = &ev.arc.ends;
        let self_saddle = a.leaf == b.leaf;
        let kind_of = |l: &LeafId| leaf_kind(slice.leaf(l).expect("validated"));
        let (kind, degenerate_self) = if self_saddle {
            match kind_of(&a.leaf) {
                LeafKind::A => (RegionType::Aa, true),
                LeafKind::B => (RegionType::Bc, true),
                LeafKind::C => (RegionType::Cc, false),
            }
        } else {
            let mut ks = [kind_of(&a.leaf), kind_of(&b.leaf)];
            ks.sort();
            (
                match ks {
                    [LeafKind::A, LeafKind::A] => RegionType::Aa,
                    [LeafKind::A, LeafKind::B] => RegionType::Ab,
                    [LeafKind::B, LeafKind::B] => RegionType::Bb,
                    [LeafKind::A, LeafKind::C] => RegionType::Ac,
                    [LeafKind::B, LeafKind::C] => RegionType::Bc,
                    [LeafKind::C, LeafKind::C] => RegionType::Cc,
                    _ => unreachable!("kinds are sorted"),
                },
                false,
            )
        };

        let before: Vec<FamilyId> = if self_saddle {
            if kind == RegionType::Cc {
                vec![fam_at(i, &a.leaf)]
            } else {
                vec![fam_at(i, &a.leaf), fam_at(i, &a.leaf)]
            }
        } else {
            vec![fam_at(i, &a.leaf), fam_at(i, &b.leaf)]
        };
        let after: Vec<FamilyId> = ev.outputs.iter().map(|o| fam_at(i + 1, o)).collect();
        touched.extend(before.iter().cloned());
        touched.extend(after.iter().cloned());

        // identified boundary slots make a region degenerate
        let mut slot_set = BTreeSet::new();
        let mut repeated = false;
        for f in before.iter().chain(after.iter()) {
            if !slot_set.insert(f.clone()) {
                repeated = true;
            }
        }
        let degenerate = degenerate_self || (repeated && !(self_saddle && kind == RegionType::Cc));

        let mut elliptics = BTreeSet::new();
        let mut add_ends = |shape: &LeafShape| {
            if let LeafShape::Arc(x, y) = shape {
                for end in [x, y] {
                    if let EndPt::E(e) = end {
                        elliptics.insert(e.clone());
                    }
                }
            }
        };
        add_ends(slice.leaf(&a.leaf).unwrap());
        add_ends(slice.leaf(&b.leaf).unwrap());
        for o in &ev.outputs {
            add_ends(movie.slices[i + 1].leaf(o).unwrap());
        }

        regions.push(Region {
            event: ev.id.clone(),
            index: i,
            kind,
            sign: ev.sign,
            degenerate,
            before,
            after,
            elliptics,
        });
    }

    let eternal: BTreeSet<FamilyId> = families
        .keys()
        .filter(|f| !touched.contains(*f))
        .cloned()
        .collect();

    Ok(RegionDecomposition {
        regions,
        families,
        eternal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn overtwisted_disc_has_two_positive_ab_tiles() {
        let m = fixtures::overtwisted_disc();
        let rd = region_decomposition(&m).unwrap();
        assert_eq!(rd.regions.len(), 2);
        for r in &rd.regions {
            assert_eq!(r.kind, RegionType::Ab);
            assert_eq!(r.sign, Sign::Pos);
            assert!(!r.degenerate);
        }
        assert!(rd.eternal.is_empty());
    }

    #[test]
    fn sphere_has_two_bb_tiles_of_opposite_sign() {
        let m = fixtures::sphere();
        let rd = region_decomposition(&m).unwrap();
        assert_eq!(rd.regions.len(), 2);
        let signs: BTreeSet<Sign> = rd.regions.iter().map(|r| r.sign).collect();
        assert_eq!(signs.len(), 2);
        for r in &rd.regions {
            assert_eq!(r.kind, RegionType::Bb);
        }
    }

    #[test]
    fn every_leaf_lies_on_at_most_two_regions() {
        for m in [fixtures::overtwisted_disc(), fixtures::sphere()] {
            let rd = region_decomposition(&m).unwrap();
            let mut uses: BTreeMap<FamilyId, usize> = BTreeMap::new();
            for r in &rd.regions {
                for f in r.before.iter().chain(r.after.iter()) {
                    *uses.entry(f.clone()).or_default() += 1;
                }
            }
            for (f, n) in uses {
                assert!(n <= 2, "family {f:?} used {n} times");
            }
        }
    }

    #[test]
    fn trivial_disc_has_one_eternal_family() {
        let m = fixtures::trivial_disc();
        let rd = region_decomposition(&m).unwrap();
        assert!(rd.regions.is_empty());
        assert_eq!(rd.eternal.len(), 1);
    }
}
