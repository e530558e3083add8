//! Positive braid stabilization and destabilization.
//!
//! A destabilizable aa-tile is one whose positive elliptic point and one of
//! whose strands appear nowhere else in the movie: the strand makes a single
//! trivial loop around the binding there. Removing the tile, the elliptic
//! point and the looping strand shortens the braid by one without changing
//! the self-linking number. Stabilization inserts exactly that pattern next
//! to an existing a-arc.

use super::{fresh_elliptic_id, fresh_event_id, fresh_leaf_id, used_leaf_ids, CountSummary, MoveRecord};
use crate::error::MovieError;
use crate::ids::{ElliId, EventId, LeafId, PunctureId, Sign};
use crate::movie::{rename_slice, Gluing, HyperbolicEvent, Movie};
use crate::page::{Attach, Dart, DescribingArc, Elliptic, EndPt, LeafShape, Side};
use std::collections::BTreeMap;

/// Stabilize the braid once along the a-arc `l` (which must end at a positive
/// elliptic point and be alive in the final slice). Returns the new movie and
/// the ids of the inserted elliptic point, strand and event.
pub fn stabilize(
    movie: &Movie,
    l: &LeafId,
) -> Result<(Movie, (ElliId, PunctureId, EventId)), MovieError> {
    movie.require_valid()?;
    let k = movie.k();
    let last = &movie.slices[k];
    let (e_pt, p_strand) = match last.leaf(l).map_err(MovieError::Slice)? {
        LeafShape::Arc(EndPt::E(e), EndPt::P(p)) | LeafShape::Arc(EndPt::P(p), EndPt::E(e)) => {
            (e.clone(), p.clone())
        }
        _ => {
            return Err(MovieError::PreconditionFailed(format!(
                "{l} is not an a-arc in the final slice"
            )))
        }
    };
    if movie.frame.elliptics[&e_pt].sign != Sign::Pos {
        return Err(MovieError::PreconditionFailed(
            "stabilization needs an a-arc at a positive elliptic point".into(),
        ));
    }

    // pick a binding segment on the face of the arc's left side
    let fm = crate::page::trace_faces(&movie.frame, last).map_err(MovieError::Slice)?;
    let lface = fm
        .face_of(&Dart::Leaf {
            leaf: l.clone(),
            side: Side::L,
        })
        .ok_or_else(|| MovieError::PreconditionFailed("arc borders no page face".into()))?;
    let mut slot: Option<(crate::ids::CircleId, Option<ElliId>)> = None;
    'outer: for w in &fm.faces[lface].walks {
        if let Some(walk) = fm.walk(w) {
            for d in walk {
                if let Dart::Seg {
                    circle,
                    after,
                    side: Side::L,
                } = d
                {
                    slot = Some((circle.clone(), after.clone()));
                    break 'outer;
                }
            }
        }
    }
    let (circle, after) = slot.ok_or_else(|| {
        MovieError::PreconditionFailed("no binding segment borders the target face".into())
    })?;

    let omega = fresh_elliptic_id(movie, "st_o");
    let q = PunctureId::new(format!("st_q_{}", movie.frame.punctures.len()));
    let mut used = used_leaf_ids(movie);
    let st_in = fresh_leaf_id(&mut used, "st_in");
    let st_omega = fresh_leaf_id(&mut used, "st_loop");
    let st_out = fresh_leaf_id(&mut used, "st_out");
    let ev_id = fresh_event_id(movie, "st_h");

    let mut frame = movie.frame.clone();
    frame.elliptics.insert(
        omega.clone(),
        Elliptic {
            circle: circle.clone(),
            sign: Sign::Pos,
        },
    );
    frame.punctures.insert(q.clone());

    // thread the new elliptic point and dangling arc through every slice
    let mut initial = movie.slices[0].clone();
    let insert_omega = |s: &mut crate::page::Slice| {
        let order = s.orders.get_mut(&circle).expect("circle order");
        match &after {
            None => order.push(omega.clone()),
            Some(x) => {
                let pos = order.iter().position(|e| e == x).expect("anchor elliptic") + 1;
                order.insert(pos, omega.clone());
            }
        }
        s.leaves.insert(
            st_in.clone(),
            LeafShape::Arc(EndPt::E(omega.clone()), EndPt::P(q.clone())),
        );
    };
    insert_omega(&mut initial);

    let mut events: Vec<HyperbolicEvent> = movie.events.clone();
    events.push(HyperbolicEvent {
        id: ev_id.clone(),
        sign: Sign::Pos,
        arc: DescribingArc::new(
            Attach {
                leaf: st_in.clone(),
                side: Side::L,
            },
            Attach {
                leaf: l.clone(),
                side: Side::L,
            },
        ),
        outputs: vec![st_omega.clone(), st_out.clone()],
    });

    // gluing: the loop output wraps onto the dangling input; the refooted
    // arc inherits the old target of `l`
    let mut leaves = movie.gluing.leaves.clone();
    let old_target = leaves.remove(l).unwrap_or_else(|| l.clone());
    leaves.insert(st_omega.clone(), st_in.clone());
    leaves.insert(st_out.clone(), old_target);
    let mut strands = movie.gluing.strands.clone();
    let sigma_p = movie.gluing.strand_image(&p_strand);
    strands.insert(p_strand.clone(), q.clone());
    strands.insert(q.clone(), sigma_p);

    let new = Movie::from_initial(frame, initial, events, Gluing { leaves, strands })
        .map_err(|e| MovieError::PreconditionFailed(format!("stabilized movie: {e}")))?;
    new.require_valid()?;
    Ok((new, (omega, q, ev_id)))
}

/// Remove a destabilizable aa-tile. `event` indexes the tile's event.
pub fn destabilize(movie: &Movie, event: usize) -> Result<(Movie, MoveRecord), MovieError> {
    movie.require_valid()?;
    let k = movie.k();
    if event >= k {
        return Err(MovieError::NotDestabilizable("event index out of range".into()));
    }
    let ev = movie.events[event].clone();
    if ev.sign != Sign::Pos {
        return Err(MovieError::NotDestabilizable(
            "only positive tiles destabilize".into(),
        ));
    }
    let slice = &movie.slices[event];
    let [a0, a1] = &ev.arc.ends;
    if a0.leaf == a1.leaf {
        return Err(MovieError::NotDestabilizable("self-saddle".into()));
    }
    let ends = |l: &LeafId| -> Result<(ElliId, PunctureId), MovieError> {
        match slice.leaf(l).map_err(MovieError::Slice)? {
            LeafShape::Arc(EndPt::E(e), EndPt::P(p)) | LeafShape::Arc(EndPt::P(p), EndPt::E(e)) => {
                Ok((e.clone(), p.clone()))
            }
            _ => Err(MovieError::NotDestabilizable(format!(
                "{l} is not an a-arc"
            ))),
        }
    };
    let (x1, q1) = ends(&a0.leaf)?;
    let (x2, q2) = ends(&a1.leaf)?;

    let mut last_err = None;
    for (omega, qa, l_omega, l_other) in [
        (x1.clone(), q1.clone(), a0.leaf.clone(), a1.leaf.clone()),
        (x2.clone(), q2.clone(), a1.leaf.clone(), a0.leaf.clone()),
    ] {
        match try_destabilize(movie, event, &ev, &omega, &qa, &l_omega, &l_other) {
            Ok(new) => {
                let record = MoveRecord {
                    kind: "destabilize".into(),
                    targets: vec![ev.id.to_string(), omega.to_string(), qa.to_string()],
                    before: CountSummary::of(movie),
                    after: CountSummary::of(&new),
                };
                return Ok((new, record));
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

fn try_destabilize(
    movie: &Movie,
    event: usize,
    ev: &HyperbolicEvent,
    omega: &ElliId,
    qa: &PunctureId,
    l_omega: &LeafId,
    l_other: &LeafId,
) -> Result<Movie, MovieError> {
    if movie.frame.elliptics[omega].sign != Sign::Pos {
        return Err(MovieError::NotDestabilizable(format!(
            "{omega} is not positive"
        )));
    }
    // the elliptic point must be inert outside this tile
    let at = movie.events_at(omega);
    if at.len() != 1 || at[0].0 != event {
        return Err(MovieError::NotDestabilizable(format!(
            "{omega} meets other hyperbolic points"
        )));
    }

    // outputs: the loop arc at omega carries the other strand; the surviving
    // arc carries qa
    let _k = movie.k();
    let after = &movie.slices[event + 1];
    let mut o_omega = None;
    let mut o_e = None;
    for o in &ev.outputs {
        match after.leaf(o).map_err(MovieError::Slice)? {
            LeafShape::Arc(EndPt::E(e), _) | LeafShape::Arc(_, EndPt::E(e)) if e == omega => {
                o_omega = Some(o.clone())
            }
            _ => o_e = Some(o.clone()),
        }
    }
    let (o_omega, o_e) = match (o_omega, o_e) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(MovieError::NotDestabilizable("tile outputs malformed".into())),
    };
    let pb = match after.leaf(&o_omega).map_err(MovieError::Slice)? {
        LeafShape::Arc(EndPt::E(_), EndPt::P(p)) | LeafShape::Arc(EndPt::P(p), EndPt::E(_)) => {
            p.clone()
        }
        _ => return Err(MovieError::NotDestabilizable("loop output malformed".into())),
    };

    // the strand's loop portion must consist of the two loop arcs only: no
    // event before the tile touches qa, none after it touches pb
    let touches = |i: usize, p: &PunctureId| -> bool {
        movie.events[i].arc.ends.iter().any(|a| {
            matches!(
                movie.slices[i].leaf(&a.leaf),
                Ok(LeafShape::Arc(x, y))
                    if [x, y].iter().any(|end| **end == EndPt::P(p.clone()))
            )
        })
    };
    for i in 0..event {
        if touches(i, qa) {
            return Err(MovieError::NotDestabilizable(format!(
                "strand {qa} is braided before the tile"
            )));
        }
    }
    for i in event + 1..movie.k() {
        if touches(i, &pb) {
            return Err(MovieError::NotDestabilizable(format!(
                "strand {pb} is braided after the tile"
            )));
        }
    }

    // frame without the loop
    let mut frame = movie.frame.clone();
    frame.elliptics.remove(omega);
    frame.punctures.remove(qa);

    let strip_order = |s: &mut crate::page::Slice| {
        for order in s.orders.values_mut() {
            order.retain(|e| e != omega);
        }
    };
    let drop_dart_remap = |s: &crate::page::Slice, dead: &LeafId, swap: &LeafId| -> crate::page::Slice {
        let mut s = s.clone();
        let fix = |d: &mut Dart| {
            if let Dart::Leaf { leaf, side } = d {
                if leaf == dead {
                    *d = Dart::Leaf {
                        leaf: swap.clone(),
                        side: *side,
                    };
                }
            }
        };
        for d in s.anchors.values_mut() {
            fix(d);
        }
        for d in s.outers.values_mut() {
            fix(d);
        }
        s
    };

    // early slices: drop the loop arc, rename the survivor to its post-tile id
    let rename_early: BTreeMap<LeafId, LeafId> =
        [(l_other.clone(), o_e.clone())].into_iter().collect();
    let no_strands: BTreeMap<PunctureId, PunctureId> = BTreeMap::new();
    let mut slices: Vec<crate::page::Slice> = Vec::new();
    for s in &movie.slices[..=event] {
        let mut s = drop_dart_remap(s, l_omega, l_other);
        s.leaves.remove(l_omega);
        strip_order(&mut s);
        slices.push(rename_slice(&s, &rename_early, &no_strands));
    }
    // late slices: drop the loop output, rewire the strand
    let strand_fix: BTreeMap<PunctureId, PunctureId> =
        [(qa.clone(), pb.clone())].into_iter().collect();
    for s in &movie.slices[event + 2..] {
        let mut s = drop_dart_remap(s, &o_omega, &o_e);
        s.leaves.remove(&o_omega);
        strip_order(&mut s);
        slices.push(rename_slice(&s, &BTreeMap::new(), &strand_fix));
    }

    // events: drop the tile; earlier events may reference the renamed leaf
    let mut events: Vec<HyperbolicEvent> = Vec::new();
    for (i, e) in movie.events.iter().enumerate() {
        if i == event {
            continue;
        }
        let mut e = e.clone();
        if i < event {
            for a in &mut e.arc.ends {
                if a.leaf == *l_other {
                    a.leaf = o_e.clone();
                }
            }
            for o in &mut e.outputs {
                if o == l_other {
                    *o = o_e.clone();
                }
            }
        }
        events.push(e);
    }

    // gluing: drop the loop pair, retarget entries at the renamed leaf
    let mut leaves: BTreeMap<LeafId, LeafId> = BTreeMap::new();
    for (from, to) in &movie.gluing.leaves {
        if from == &o_omega || to == l_omega {
            continue;
        }
        let from = if from == l_other { o_e.clone() } else { from.clone() };
        let to = if to == l_other { o_e.clone() } else { to.clone() };
        leaves.insert(from, to);
    }
    // the old glue forces strand(pb) = qa and the loop's wrap strand(qa);
    // removing the loop splices qa out: pb continues where qa went
    let mut strands: BTreeMap<PunctureId, PunctureId> = BTreeMap::new();
    for p in &frame.punctures {
        let img = if p == &pb {
            movie.gluing.strand_image(qa)
        } else {
            movie.gluing.strand_image(p)
        };
        if img != *p {
            strands.insert(p.clone(), img);
        }
    }

    let new = Movie::from_initial(frame, slices[0].clone(), events, Gluing { leaves, strands })
        .map_err(|e| MovieError::NotDestabilizable(format!("rewritten movie: {e}")))?;
    new.require_valid()?;
    Ok(new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::page::canonicalize;

    #[test]
    fn stabilize_then_destabilize_roundtrips() {
        let m = fixtures::overtwisted_disc();
        // the final slice carries a2 = a(u2, p)
        let (stab, (omega, q, ev_id)) = stabilize(&m, &LeafId::new("a2")).unwrap();
        assert!(stab.validate().ok());
        let (ep, en, hp, hn) = stab.counts();
        assert_eq!((ep, en, hp, hn), (3, 1, 3, 0));
        assert_eq!(stab.frame.punctures.len(), 2);
        // self-linking is preserved by positive stabilization
        assert_eq!(crate::analysis::self_linking(&stab).unwrap(), 1);
        // the added strand keeps the boundary connected
        let surf = crate::euler::euler_characteristic(&stab).unwrap();
        assert_eq!(surf.boundary_components, 1);
        assert!(surf.is_disc);
        let _ = (omega, q);

        let idx = stab.events.iter().position(|e| e.id == ev_id).unwrap();
        let (back, rec) = destabilize(&stab, idx).unwrap();
        assert!(back.validate().ok());
        assert_eq!(back.counts(), m.counts());
        assert_eq!(rec.before.e_pos, 3);
        assert_eq!(rec.after.e_pos, 2);
        // the round trip reproduces the original movie up to one leaf rename
        let mut renamed = back.clone();
        let map: BTreeMap<LeafId, LeafId> =
            [(LeafId::new("st_out"), LeafId::new("a2"))].into_iter().collect();
        renamed = renamed.relabel_leaves(&map);
        let mut m2 = m.clone();
        for s in &mut m2.slices {
            canonicalize(&m2.frame, s).unwrap();
        }
        for s in &mut renamed.slices {
            canonicalize(&renamed.frame, s).unwrap();
        }
        assert_eq!(renamed, m2);
    }

    #[test]
    fn ab_tile_is_not_destabilizable() {
        let m = fixtures::overtwisted_disc();
        assert!(matches!(
            destabilize(&m, 0),
            Err(MovieError::NotDestabilizable(_))
        ));
    }
}
