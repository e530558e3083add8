//! Saddle resolution: rewriting a slice across one hyperbolic event.
//!
//! A describing arc attaches to one or two leaves, each on a named side. The
//! sides encode the sign: a positive event attaches on the left of both
//! leaves, a negative one on the right of both (the in-page shadow of the
//! positive surface normal points right of every oriented leaf). The
//! resolution is band surgery on the leaves; endpoints are conserved.

use super::diagram::*;
use super::trace::{canonicalize, trace_faces};
use crate::error::SliceError;
use crate::ids::{LeafId, Sign};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// One attachment point of a describing arc.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attach {
    pub leaf: LeafId,
    pub side: Side,
}

impl Attach {
    pub fn new(leaf: &str, side: Side) -> Self {
        Attach {
            leaf: LeafId::new(leaf),
            side,
        }
    }
    pub fn dart(&self) -> Dart {
        Dart::Leaf {
            leaf: self.leaf.clone(),
            side: self.side,
        }
    }
}

/// A describing arc: two attachment points in a common face. When both ends
/// lie on one leaf (same side), `ends[0]` is the attachment nearer the leaf's
/// source endpoint. `islands_in` lists islands of the ambient face that the
/// arc separates off into the newly created pocket, when the resolution
/// creates one; it is empty in the common case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescribingArc {
    pub ends: [Attach; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub islands_in: Vec<IslandKey>,
}

impl DescribingArc {
    pub fn new(a: Attach, b: Attach) -> Self {
        DescribingArc {
            ends: [a, b],
            islands_in: Vec::new(),
        }
    }
}

/// Outcome of a resolution.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub slice: Slice,
    pub consumed: Vec<LeafId>,
    pub produced: Vec<LeafId>,
}

/// The number of output leaves a resolution produces, by case.
fn arity(slice: &Slice, arc: &DescribingArc) -> Result<usize, SliceError> {
    let l1 = &arc.ends[0].leaf;
    let l2 = &arc.ends[1].leaf;
    let k1 = slice.kind_of(l1)?;
    let k2 = slice.kind_of(l2)?;
    Ok(if l1 == l2 {
        2 // split: arc -> arc + circle, or circle -> circle + circle
    } else {
        match (k1, k2) {
            (LeafKind::C, LeafKind::C) => 1,
            (LeafKind::C, _) | (_, LeafKind::C) => 1,
            _ => 2,
        }
    })
}

/// Find the describing-arc attachments joining `l1` and `l2` with the given
/// sign, if the two required sides lie in a common face.
pub fn attach_for_sign(
    frame: &Frame,
    slice: &Slice,
    l1: &LeafId,
    l2: &LeafId,
    sign: Sign,
) -> Result<DescribingArc, SliceError> {
    let side = match sign {
        Sign::Pos => Side::L,
        Sign::Neg => Side::R,
    };
    let arc = DescribingArc::new(
        Attach {
            leaf: l1.clone(),
            side,
        },
        Attach {
            leaf: l2.clone(),
            side,
        },
    );
    let fm = trace_faces(frame, slice)?;
    let f1 = fm.face_of(&arc.ends[0].dart());
    let f2 = fm.face_of(&arc.ends[1].dart());
    match (f1, f2) {
        (Some(a), Some(b)) if a == b => Ok(arc),
        _ => Err(SliceError::InvalidArc(format!(
            "sides {side:?} of {l1} and {l2} do not share a face"
        ))),
    }
}

/// Resolve one saddle event. `outputs` names the produced leaves (one or two
/// ids, depending on the case).
pub fn saddle_resolve(
    frame: &Frame,
    slice: &Slice,
    arc: &DescribingArc,
    sign: Sign,
    outputs: &[LeafId],
) -> Result<Resolution, SliceError> {
    let [e0, e1] = &arc.ends;
    let s0 = slice.leaf(&e0.leaf)?.clone();
    let s1 = slice.leaf(&e1.leaf)?.clone();
    let self_saddle = e0.leaf == e1.leaf;

    // Observation sign rule: positive events attach on both left sides,
    // negative ones on both right sides.
    let want = match sign {
        Sign::Pos => Side::L,
        Sign::Neg => Side::R,
    };
    if e0.side != e1.side {
        if self_saddle {
            return Err(SliceError::ForbiddenSelfSaddle);
        }
        return Err(SliceError::SignInconsistent(sign));
    }
    if e0.side != want {
        return Err(SliceError::SignInconsistent(sign));
    }

    // attachments must share a face
    let fm = trace_faces(frame, slice)?;
    let f0 = fm
        .face_of(&e0.dart())
        .ok_or_else(|| SliceError::InvalidArc(format!("{:?} borders a hole", e0.dart())))?;
    let f1 = fm
        .face_of(&e1.dart())
        .ok_or_else(|| SliceError::InvalidArc(format!("{:?} borders a hole", e1.dart())))?;
    if f0 != f1 {
        return Err(SliceError::InvalidArc(
            "describing-arc endpoints lie in different faces".into(),
        ));
    }

    let need = arity(slice, arc)?;
    if outputs.len() != need {
        return Err(SliceError::InvalidArc(format!(
            "resolution produces {need} leaves, {} output ids given",
            outputs.len()
        )));
    }
    for o in outputs {
        if slice.leaves.contains_key(o) {
            return Err(SliceError::InvalidArc(format!(
                "output id {o} already names a leaf"
            )));
        }
    }

    // the rewritten leaf table, plus a remap table for darts on consumed leaves
    let mut new_leaves = slice.leaves.clone();
    new_leaves.remove(&e0.leaf);
    new_leaves.remove(&e1.leaf);
    let mut remap: BTreeMap<Dart, Dart> = BTreeMap::new();
    let map_both = |remap: &mut BTreeMap<Dart, Dart>, old: &LeafId, new: &LeafId| {
        for s in [Side::L, Side::R] {
            remap.insert(
                Dart::Leaf {
                    leaf: old.clone(),
                    side: s,
                },
                Dart::Leaf {
                    leaf: new.clone(),
                    side: s,
                },
            );
        }
    };
    // default anchor used for islands_in, decided per case below
    let mut pocket_anchor: Option<Dart> = None;

    if self_saddle {
        match &s0 {
            LeafShape::Arc(..) => {
                // arc splits into the same-endpoint arc and a closed mid piece
                let (a, b) = match &s0 {
                    LeafShape::Arc(a, b) => (a.clone(), b.clone()),
                    _ => unreachable!(),
                };
                let ccw = e0.side == Side::L;
                new_leaves.insert(outputs[0].clone(), LeafShape::Arc(a, b));
                new_leaves.insert(outputs[1].clone(), LeafShape::Circle { ccw });
                map_both(&mut remap, &e0.leaf, &outputs[0]);
                pocket_anchor = Some(Dart::Leaf {
                    leaf: outputs[1].clone(),
                    side: e0.side,
                });
            }
            LeafShape::Circle { ccw } => {
                // circle splits into two circles
                let inner_side = if *ccw { Side::L } else { Side::R };
                let second_ccw = if e0.side == inner_side { *ccw } else { !*ccw };
                new_leaves.insert(outputs[0].clone(), LeafShape::Circle { ccw: *ccw });
                new_leaves.insert(outputs[1].clone(), LeafShape::Circle { ccw: second_ccw });
                map_both(&mut remap, &e0.leaf, &outputs[0]);
                let second_inner = if second_ccw { Side::L } else { Side::R };
                pocket_anchor = Some(Dart::Leaf {
                    leaf: outputs[1].clone(),
                    side: second_inner,
                });
            }
        }
    } else {
        match (&s0, &s1) {
            (LeafShape::Arc(..), LeafShape::Arc(..)) => {
                let (from0, to0) = oriented_ends(frame, &s0)?;
                let (from1, to1) = oriented_ends(frame, &s1)?;
                let o0 = LeafShape::Arc(from0, to1);
                let o1 = LeafShape::Arc(from1, to0);
                for o in [&o0, &o1] {
                    if let LeafShape::Arc(EndPt::P(p), EndPt::P(q)) = o {
                        return Err(SliceError::IllegalResolution(format!(
                            "saddle would join punctures {p} and {q}"
                        )));
                    }
                }
                new_leaves.insert(outputs[0].clone(), o0);
                new_leaves.insert(outputs[1].clone(), o1);
                map_both(&mut remap, &e0.leaf, &outputs[0]);
                map_both(&mut remap, &e1.leaf, &outputs[1]);
                // a face split: islands designated in go to the side cut off
                // along the band
                pocket_anchor = Some(Dart::Leaf {
                    leaf: match sign {
                        Sign::Pos => outputs[0].clone(),
                        Sign::Neg => outputs[1].clone(),
                    },
                    side: e0.side,
                });
            }
            (LeafShape::Arc(a, b), LeafShape::Circle { ccw })
            | (LeafShape::Circle { ccw }, LeafShape::Arc(a, b)) => {
                // the arc absorbs the circle; endpoints unchanged
                new_leaves.insert(outputs[0].clone(), LeafShape::Arc(a.clone(), b.clone()));
                let (arc_end, circ_end) = if matches!(s0, LeafShape::Arc(..)) {
                    (e0, e1)
                } else {
                    (e1, e0)
                };
                let inner = if *ccw { Side::L } else { Side::R };
                remap.insert(
                    Dart::Leaf {
                        leaf: circ_end.leaf.clone(),
                        side: inner,
                    },
                    Dart::Leaf {
                        leaf: outputs[0].clone(),
                        side: arc_end.side,
                    },
                );
                remap.insert(
                    Dart::Leaf {
                        leaf: circ_end.leaf.clone(),
                        side: inner.flip(),
                    },
                    Dart::Leaf {
                        leaf: outputs[0].clone(),
                        side: arc_end.side.flip(),
                    },
                );
                map_both(&mut remap, &arc_end.leaf, &outputs[0]);
            }
            (LeafShape::Circle { ccw }, LeafShape::Circle { .. }) => {
                new_leaves.insert(outputs[0].clone(), LeafShape::Circle { ccw: *ccw });
                map_both(&mut remap, &e0.leaf, &outputs[0]);
                map_both(&mut remap, &e1.leaf, &outputs[0]);
            }
        }
    }

    // rebuild placement
    let remap_dart = |d: &Dart| -> Dart { remap.get(d).cloned().unwrap_or_else(|| d.clone()) };

    let consumed: BTreeSet<&LeafId> = [&e0.leaf, &e1.leaf].into_iter().collect();
    let old_islands = fm.islands();

    // abstract connectivity of the rewritten slice
    let new_islands = island_classes(frame, &new_leaves);

    // entity -> new island key
    let new_island_of = |d: &Dart| -> Option<IslandKey> {
        match d {
            Dart::Seg { circle, .. } => new_islands.get(&Entity::Circle(circle.clone())).cloned(),
            Dart::Leaf { leaf, .. } => new_islands.get(&Entity::Leaf(leaf.clone())).cloned(),
        }
    };

    let root_circle = frame.page.root().clone();
    let new_root = new_islands
        .get(&Entity::Circle(root_circle))
        .cloned()
        .expect("root circle island");

    let mut anchors: BTreeMap<IslandKey, Dart> = BTreeMap::new();

    // inherited anchors
    for k in &old_islands {
        let Some(a) = slice.anchors.get(k) else {
            continue;
        };
        // where did this island go?
        let ent = match k {
            IslandKey::Circle(c) => Entity::Circle(c.clone()),
            IslandKey::CCircle(l) => {
                if consumed.contains(l) {
                    continue;
                }
                Entity::Leaf(l.clone())
            }
        };
        let Some(nk) = new_islands.get(&ent).cloned() else {
            continue;
        };
        if nk == new_root || anchors.contains_key(&nk) {
            continue;
        }
        let nd = remap_dart(a);
        if new_island_of(&nd) == Some(nk.clone()) {
            continue; // anchor collapsed into the island itself
        }
        anchors.insert(nk, nd);
    }

    // produced circles without an anchor yet
    for o in outputs {
        if let Some(LeafShape::Circle { .. }) = new_leaves.get(o) {
            let nk = new_islands
                .get(&Entity::Leaf(o.clone()))
                .cloned()
                .expect("output island");
            if nk == new_root || anchors.contains_key(&nk) {
                continue;
            }
            // drop it where a consumed circle sat, or beside the other output
            let fallback = outputs
                .iter()
                .find(|x| *x != o && new_leaves.contains_key(*x))
                .map(|x| Dart::Leaf {
                    leaf: x.clone(),
                    side: e0.side,
                })
                .or_else(|| {
                    [&e0.leaf, &e1.leaf]
                        .into_iter()
                        .find(|l| slice.anchors.contains_key(&IslandKey::CCircle((*l).clone())))
                        .map(|l| remap_dart(&slice.anchors[&IslandKey::CCircle(l.clone())]))
                });
            if let Some(d) = fallback {
                if new_island_of(&d) != Some(nk.clone()) {
                    anchors.insert(nk, d);
                }
            }
        }
    }

    // islands designated into the new pocket
    if !arc.islands_in.is_empty() {
        let target = pocket_anchor.clone().ok_or_else(|| {
            SliceError::InvalidArc("this resolution does not create a pocket".into())
        })?;
        for k in &arc.islands_in {
            let ent = match k {
                IslandKey::Circle(c) => Entity::Circle(c.clone()),
                IslandKey::CCircle(l) => Entity::Leaf(l.clone()),
            };
            let nk = new_islands
                .get(&ent)
                .cloned()
                .ok_or_else(|| SliceError::DanglingReference(format!("{k:?}")))?;
            if nk != new_root {
                anchors.insert(nk, target.clone());
            }
        }
    }

    // outers: keep the ones whose darts survive
    let mut outers: BTreeMap<IslandKey, Dart> = BTreeMap::new();
    for (k, d) in &slice.outers {
        let ent = match k {
            IslandKey::Circle(c) => Entity::Circle(c.clone()),
            IslandKey::CCircle(l) => Entity::Leaf(l.clone()),
        };
        if let Some(nk) = new_islands.get(&ent) {
            let nd = remap_dart(d);
            if new_island_of(&nd) == Some(nk.clone()) {
                outers.insert(nk.clone(), nd);
            }
        }
    }

    // every non-root island must end up anchored; try to repair omissions by
    // hanging the island off an output leaf
    let all_new: BTreeSet<IslandKey> = new_islands.values().cloned().collect();
    for nk in &all_new {
        if *nk == new_root || anchors.contains_key(nk) {
            continue;
        }
        let mut fixed = false;
        for o in outputs {
            for s in [Side::L, Side::R] {
                let d = Dart::Leaf {
                    leaf: o.clone(),
                    side: s,
                };
                if new_leaves.contains_key(o) && new_island_of(&d) != Some(nk.clone()) {
                    anchors.insert(nk.clone(), d);
                    fixed = true;
                    break;
                }
            }
            if fixed {
                break;
            }
        }
        if !fixed {
            return Err(SliceError::MissingAnchor(format!("{nk:?}")));
        }
    }

    let mut out = Slice {
        orders: slice.orders.clone(),
        leaves: new_leaves,
        anchors,
        outers,
    };
    canonicalize(frame, &mut out)?;
    Ok(Resolution {
        slice: out,
        consumed: consumed.into_iter().cloned().collect(),
        produced: outputs.to_vec(),
    })
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Entity {
    Circle(crate::ids::CircleId),
    Punct(crate::ids::PunctureId),
    Leaf(LeafId),
}

/// Connected components of a leaf table over the page, keyed like
/// [`IslandKey`]. Returns a map from every entity to its island key.
fn island_classes(
    frame: &Frame,
    leaves: &BTreeMap<LeafId, LeafShape>,
) -> BTreeMap<Entity, IslandKey> {
    let mut items: Vec<Entity> = frame
        .page
        .circles
        .iter()
        .map(|c| Entity::Circle(c.clone()))
        .collect();
    items.extend(frame.punctures.iter().map(|p| Entity::Punct(p.clone())));
    items.extend(leaves.keys().map(|l| Entity::Leaf(l.clone())));
    let idx: BTreeMap<&Entity, usize> = items.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut uf: Vec<usize> = (0..items.len()).collect();
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
    for (l, shape) in leaves {
        let li = idx[&Entity::Leaf(l.clone())];
        if let LeafShape::Arc(a, b) = shape {
            for end in [a, b] {
                let other = match end {
                    EndPt::E(e) => frame
                        .elliptics
                        .get(e)
                        .map(|el| Entity::Circle(el.circle.clone())),
                    EndPt::P(p) => Some(Entity::Punct(p.clone())),
                };
                if let Some(o) = other {
                    if let Some(&oi) = idx.get(&o) {
                        union(&mut uf, li, oi);
                    }
                }
            }
        }
    }
    // name each class
    let mut key_of_root: BTreeMap<usize, IslandKey> = BTreeMap::new();
    for (i, e) in items.iter().enumerate() {
        let r = find(&mut uf, i);
        let cand = match e {
            Entity::Circle(c) => Some(IslandKey::Circle(c.clone())),
            Entity::Leaf(l) => match leaves.get(l) {
                Some(LeafShape::Circle { .. }) => Some(IslandKey::CCircle(l.clone())),
                _ => None,
            },
            Entity::Punct(_) => None,
        };
        if let Some(k) = cand {
            key_of_root
                .entry(r)
                .and_modify(|cur| {
                    let better = match (&k, &*cur) {
                        (IslandKey::Circle(_), IslandKey::CCircle(_)) => true,
                        (IslandKey::Circle(a), IslandKey::Circle(b)) => a < b,
                        (IslandKey::CCircle(_), IslandKey::Circle(_)) => false,
                        (IslandKey::CCircle(a), IslandKey::CCircle(b)) => a < b,
                    };
                    if better {
                        *cur = k.clone();
                    }
                })
                .or_insert(k);
        }
    }
    let mut out = BTreeMap::new();
    for (i, e) in items.iter().enumerate() {
        let r = find(&mut uf, i);
        if let Some(k) = key_of_root.get(&r) {
            out.insert(e.clone(), k.clone());
        }
    }
    out
}
