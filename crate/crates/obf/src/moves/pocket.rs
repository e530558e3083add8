//! Pocket clearing and pocket cancellation.
//!
//! A valence-one negative vertex whose outer spoke is boundary-parallel
//! encloses a pocket of leaves. Clearing the pocket replaces its contents by
//! one copy per positive spoke, parked beside the spoke endpoints, with new
//! saddle pairs switching the live copy as the movie passes each positive
//! event. Afterwards the pocket is empty, the spoke is inessential, and the
//! vertex cancels against its negative event, dropping one vertex of the
//! negative graph.

use super::wheel::{remove_separating_spokes, spokes_avoid_pocket, wheel_at, Wheel};
use super::{fresh_leaf_id, CountSummary, MoveRecord};
use crate::error::MovieError;
use crate::ids::{ElliId, EventId, LeafId, PunctureId, Sign};
use crate::movie::{Gluing, HyperbolicEvent, Movie};
use crate::page::{
    barc_classify, Attach, Dart, DescribingArc, Elliptic, EndPt, IslandKey, LeafShape, Side,
};
use std::collections::{BTreeMap, BTreeSet};

/// Outcome of the composite deformation.
#[derive(Clone, Debug)]
pub struct DeformOutcome {
    pub movie: Movie,
    pub records: Vec<MoveRecord>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum InsertSide {
    After,
    Before,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FeetDir {
    Fwd,
    Rev,
}

/// One top-level item of the pocket, in foot order.
#[derive(Clone, Debug)]
enum PocketItem {
    AFoot {
        foot: usize,
        leaf: LeafId,
    },
    BPair {
        from: usize,
        to: usize,
        leaf: LeafId,
        inner: Vec<PocketItem>,
    },
}

struct PocketData {
    /// Slice index the pocket is read from (0 or k-1).
    slice: usize,
    /// Feet on the binding arc, ordered from the spoke's positive endpoint
    /// towards the center.
    feet: Vec<ElliId>,
    items: Vec<PocketItem>,
    leaves: BTreeMap<LeafId, LeafShape>,
    punctures: BTreeSet<PunctureId>,
    circles: Vec<LeafId>,
    /// Transition triggers: after firing these positive events the live copy
    /// advances by one.
    triggers: Vec<usize>,
}

fn copy_elliptic(x: &ElliId, i: usize) -> ElliId {
    ElliId::new(format!("{x}@{i}"))
}
fn copy_puncture(q: &PunctureId, i: usize) -> PunctureId {
    PunctureId::new(format!("{q}@{i}"))
}
fn copy_leaf(l: &LeafId, i: usize) -> LeafId {
    LeafId::new(format!("{l}@{i}"))
}

/// Read the pocket of the given spoke and derive the construction data.
fn read_pocket(wheel: &Wheel, spoke_index: usize) -> Result<PocketData, MovieError> {
    let movie = &wheel.movie;
    let m = wheel.m();
    let slice_idx = if spoke_index == 0 {
        0
    } else {
        movie.k() - 1
    };
    let slice = &movie.slices[slice_idx];
    let (b_id, omega) = &wheel.spokes[spoke_index];
    let class = barc_classify(&movie.frame, slice, b_id).map_err(MovieError::Slice)?;
    let pocket = class.pocket().ok_or_else(|| {
        MovieError::PreconditionFailed(format!("spoke {b_id} is not boundary-parallel"))
    })?;

    // feet: walk the binding circle from the spoke's positive endpoint
    // towards the center through the pocket side
    let circle = movie.frame.circle_of(omega).map_err(MovieError::Slice)?.clone();
    let order = slice.orders[&circle].clone();
    let kk = order.len();
    let pos = order.iter().position(|e| e == omega).unwrap();
    let forward = pocket.segments.contains(&Some(omega.clone()));
    let mut feet = Vec::new();
    let mut cur = pos;
    loop {
        cur = if forward { (cur + 1) % kk } else { (cur + kk - 1) % kk };
        let e = &order[cur];
        if *e == wheel.center {
            break;
        }
        if !pocket.interior_elliptics.contains(e) {
            return Err(MovieError::PreconditionFailed(format!(
                "unexpected elliptic {e} on the pocket arc"
            )));
        }
        feet.push(e.clone());
    }

    // pocket leaves and their item tree
    let leaves: BTreeMap<LeafId, LeafShape> = pocket
        .leaves
        .iter()
        .map(|l| (l.clone(), slice.leaves[l].clone()))
        .collect();
    let mut circles = Vec::new();
    for (l, s) in &leaves {
        if matches!(s, LeafShape::Circle { .. }) {
            circles.push(l.clone());
        }
    }
    let items = parse_items(slice, &feet, 0, feet.len())?;

    let triggers: Vec<usize> = if spoke_index == 0 {
        wheel.positive_events[1..].to_vec()
    } else {
        wheel.positive_events[..m - 1].to_vec()
    };

    Ok(PocketData {
        slice: slice_idx,
        feet,
        items,
        leaves,
        punctures: pocket.punctures.clone(),
        circles,
        triggers,
    })
}

fn parse_items(
    slice: &crate::page::Slice,
    feet: &[ElliId],
    lo: usize,
    hi: usize,
) -> Result<Vec<PocketItem>, MovieError> {
    let mut items = Vec::new();
    let mut j = lo;
    while j < hi {
        let (lid, shape) = slice.leaf_at_elliptic(&feet[j]).ok_or_else(|| {
            MovieError::PreconditionFailed(format!("foot {} has no leaf", feet[j]))
        })?;
        match shape {
            LeafShape::Arc(a, b) => {
                let other = if *a == EndPt::E(feet[j].clone()) { b } else { a };
                match other {
                    EndPt::P(_) => {
                        items.push(PocketItem::AFoot {
                            foot: j,
                            leaf: lid.clone(),
                        });
                        j += 1;
                    }
                    EndPt::E(e2) => {
                        let j2 = feet.iter().position(|f| f == e2).ok_or_else(|| {
                            MovieError::PreconditionFailed(format!(
                                "pocket b-arc {lid} leaves the pocket arc"
                            ))
                        })?;
                        if j2 <= j || j2 >= hi {
                            return Err(MovieError::PreconditionFailed(format!(
                                "pocket b-arc {lid} is not nested"
                            )));
                        }
                        let inner = parse_items(slice, feet, j + 1, j2)?;
                        items.push(PocketItem::BPair {
                            from: j,
                            to: j2,
                            leaf: lid.clone(),
                            inner,
                        });
                        j = j2 + 1;
                    }
                }
            }
            LeafShape::Circle { .. } => {
                return Err(MovieError::PreconditionFailed(
                    "foot carries a closed leaf".into(),
                ))
            }
        }
    }
    Ok(items)
}

/// Clear the pocket at the valence-one vertex `v`. Requires the interior
/// spokes to be non-separating (run [`remove_separating_spokes`] first) and
/// the spoke endpoints to avoid the pocket arc.
pub fn evacuate_pocket(movie: &Movie, v: &ElliId) -> Result<(Movie, MoveRecord), MovieError> {
    let wheel = wheel_at(movie, v)?;
    let m = wheel.m();
    // (P1)
    for t in 1..m {
        let (lid, _) = &wheel.spokes[t];
        let s = wheel.positive_events[t - 1] + 1;
        let class = barc_classify(&wheel.movie.frame, &wheel.movie.slices[s], lid)
            .map_err(MovieError::Slice)?;
        if class.separating {
            return Err(MovieError::PreconditionFailed(format!(
                "interior spoke {lid} separates; clear separating spokes first"
            )));
        }
    }
    if !spokes_avoid_pocket(&wheel.movie, v)? {
        return Err(MovieError::PreconditionFailed(
            "a spoke endpoint lies on the pocket arc".into(),
        ));
    }

    // forward pocket at slice 0, or mirrored pocket before the negative event
    let spoke_index = {
        let class0 = barc_classify(&wheel.movie.frame, &wheel.movie.slices[0], wheel.b0())
            .map_err(MovieError::Slice)?;
        if class0.pocket().is_some() {
            0
        } else {
            let (lid, _) = &wheel.spokes[m];
            let s = wheel.movie.k() - 1;
            let cl = barc_classify(&wheel.movie.frame, &wheel.movie.slices[s], lid)
                .map_err(MovieError::Slice)?;
            if cl.pocket().is_some() {
                m
            } else {
                return Err(MovieError::NotStronglyEssential(v.clone()));
            }
        }
    };
    let pocket = read_pocket(&wheel, spoke_index)?;
    if pocket.feet.is_empty() {
        if pocket.leaves.is_empty() && pocket.punctures.is_empty() {
            // nothing to clear
            let rec = MoveRecord {
                kind: "evacuate-pocket".into(),
                targets: vec![v.to_string()],
                before: CountSummary::of(&wheel.movie),
                after: CountSummary::of(&wheel.movie),
            };
            return Ok((wheel.movie, rec));
        }
        return Err(MovieError::PreconditionFailed(
            "pocket holds closed leaves but no feet; unsupported".into(),
        ));
    }

    let before = CountSummary::of(movie);
    let mut last_err = None;
    for side in [InsertSide::After, InsertSide::Before] {
        for dir in [FeetDir::Fwd, FeetDir::Rev] {
            match build_evacuated(&wheel, &pocket, side, dir) {
                Ok(out) => {
                    let rec = MoveRecord {
                        kind: "evacuate-pocket".into(),
                        targets: vec![v.to_string()],
                        before,
                        after: CountSummary::of(&out),
                    };
                    return Ok((out, rec));
                }
                Err(e) => last_err = Some(e),
            }
        }
    }
    Err(last_err.unwrap())
}

fn refoot_shape(
    shape: &LeafShape,
    feet: &BTreeSet<ElliId>,
    punctures: &BTreeSet<PunctureId>,
    i: usize,
) -> LeafShape {
    let map_end = |e: &EndPt| match e {
        EndPt::E(x) if feet.contains(x) => EndPt::E(copy_elliptic(x, i)),
        EndPt::P(p) if punctures.contains(p) => EndPt::P(copy_puncture(p, i)),
        other => other.clone(),
    };
    match shape {
        LeafShape::Arc(a, b) => LeafShape::Arc(map_end(a), map_end(b)),
        c => c.clone(),
    }
}

fn build_evacuated(
    wheel: &Wheel,
    pocket: &PocketData,
    side: InsertSide,
    dir: FeetDir,
) -> Result<Movie, MovieError> {
    let movie = &wheel.movie;
    let m = wheel.m();
    let k = movie.k();
    let _n = pocket.feet.len();
    let feet_set: BTreeSet<ElliId> = pocket.feet.iter().cloned().collect();

    // frame: replace the feet and pocket strands by per-copy versions
    let mut frame = movie.frame.clone();
    for x in &pocket.feet {
        frame.elliptics.remove(x);
    }
    for q in &pocket.punctures {
        frame.punctures.remove(q);
    }
    for i in 1..=m {
        let omega_i = &wheel.spokes[i].1;
        let circ = movie.frame.circle_of(omega_i).map_err(MovieError::Slice)?.clone();
        for x in &pocket.feet {
            frame.elliptics.insert(
                copy_elliptic(x, i),
                Elliptic {
                    circle: circ.clone(),
                    sign: movie.frame.elliptics[x].sign,
                },
            );
        }
        for q in &pocket.punctures {
            frame.punctures.insert(copy_puncture(q, i));
        }
    }

    // order edits applied to every slice
    let pocket_circle = movie
        .frame
        .circle_of(&pocket.feet[0])
        .map_err(MovieError::Slice)?
        .clone();
    let edit_orders = |s: &mut crate::page::Slice| -> Result<(), MovieError> {
        let order = s.orders.get_mut(&pocket_circle).expect("pocket circle");
        order.retain(|e| !feet_set.contains(e));
        for i in 1..=m {
            let omega_i = &wheel.spokes[i].1;
            let circ = movie.frame.circle_of(omega_i).map_err(MovieError::Slice)?.clone();
            let order = s.orders.get_mut(&circ).expect("spoke circle");
            let pos = order
                .iter()
                .position(|e| e == omega_i)
                .ok_or_else(|| MovieError::PreconditionFailed("spoke endpoint missing".into()))?;
            let mut ft: Vec<ElliId> = pocket.feet.iter().map(|x| copy_elliptic(x, i)).collect();
            if dir == FeetDir::Rev {
                ft.reverse();
            }
            let at = match side {
                InsertSide::After => pos + 1,
                InsertSide::Before => pos,
            };
            for (off, f) in ft.into_iter().enumerate() {
                order.insert(at + off, f);
            }
        }
        Ok(())
    };

    // initial slice: live box keeps its original leaf ids refooted to copy 1,
    // frozen boxes carry per-copy snapshots of the pocket
    let mut initial = movie.slices[0].clone();
    edit_orders(&mut initial)?;
    let remap_anchor_darts = |s: &mut crate::page::Slice, i: usize| {
        let fix = |d: &mut Dart| {
            if let Dart::Seg {
                after: Some(x),
                side,
                ..
            } = d.clone()
            {
                if feet_set.contains(&x) {
                    let omega_i = &wheel.spokes[i].1;
                    *d = Dart::Seg {
                        circle: movie.frame.elliptics[omega_i].circle.clone(),
                        after: Some(copy_elliptic(&x, i)),
                        side,
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
    };
    // refoot live leaves present in slice 0
    {
        let live_leaves: Vec<LeafId> = movie.slices[0]
            .leaves
            .keys()
            .filter(|l| is_pocket_family(movie, pocket, 0, l))
            .cloned()
            .collect();
        for l in live_leaves {
            let shape = initial.leaves[&l].clone();
            initial
                .leaves
                .insert(l.clone(), refoot_shape(&shape, &feet_set, &pocket.punctures, 1));
        }
        remap_anchor_darts(&mut initial, 1);
    }
    // frozen copies
    for i in 1..=m {
        if i == live_at_start(pocket, m) {
            continue;
        }
        for (l, shape) in &pocket.leaves {
            initial.leaves.insert(
                copy_leaf(l, i),
                refoot_shape(shape, &feet_set, &pocket.punctures, i),
            );
        }
        // anchors of pocket circles, per copy
        for c in &pocket.circles {
            if let Some(d) = movie.slices[pocket.slice].anchors.get(&IslandKey::CCircle(c.clone()))
            {
                let dd = match d {
                    Dart::Leaf { leaf, side } if pocket.leaves.contains_key(leaf) => Dart::Leaf {
                        leaf: copy_leaf(leaf, i),
                        side: *side,
                    },
                    other => other.clone(),
                };
                initial.anchors.insert(IslandKey::CCircle(copy_leaf(c, i)), dd);
            }
        }
    }

    // assemble events with transitions
    let mut used = super::used_leaf_ids(movie);
    for i in 1..=m {
        for l in pocket.leaves.keys() {
            used.insert(copy_leaf(l, i));
        }
    }
    let mut live_ids: BTreeMap<LeafId, LeafId> = BTreeMap::new(); // original -> current
    for l in movie.slices[0].leaves.keys() {
        if is_pocket_family(movie, pocket, 0, l) {
            live_ids.insert(l.clone(), l.clone());
        }
    }
    let mut box_ids: BTreeMap<usize, BTreeMap<LeafId, LeafId>> = BTreeMap::new(); // copy -> base leaf -> current id
    let mut box_puncts: BTreeMap<usize, BTreeMap<PunctureId, PunctureId>> = BTreeMap::new();
    for i in 1..=m {
        if i == live_at_start(pocket, m) {
            continue;
        }
        box_ids.insert(
            i,
            pocket
                .leaves
                .keys()
                .map(|l| (l.clone(), copy_leaf(l, i)))
                .collect(),
        );
        box_puncts.insert(
            i,
            pocket
                .punctures
                .iter()
                .map(|q| (q.clone(), copy_puncture(q, i)))
                .collect(),
        );
    }

    let mut current = initial.clone();
    crate::page::canonicalize(&frame, &mut current).map_err(MovieError::Slice)?;
    let initial = current.clone();
    let mut events: Vec<HyperbolicEvent> = Vec::new();
    let mut live = live_at_start(pocket, m);
    let emit = |ev: HyperbolicEvent,
                    current: &mut crate::page::Slice,
                    events: &mut Vec<HyperbolicEvent>|
     -> Result<(), MovieError> {
        let res = crate::page::saddle_resolve(&frame, current, &ev.arc, ev.sign, &ev.outputs)
            .map_err(|e| {
                MovieError::PreconditionFailed(format!("event {} does not resolve: {e}", ev.id))
            })?;
        *current = res.slice;
        events.push(ev);
        Ok(())
    };

    for idx in 0..k {
        let ev = &movie.events[idx];
        // remap attachments through the live box's renaming
        let mut ev2 = ev.clone();
        for a in &mut ev2.arc.ends {
            if let Some(cur) = live_ids.get(&a.leaf) {
                a.leaf = cur.clone();
            }
        }
        let consumed: Vec<LeafId> = ev2.arc.ends.iter().map(|a| a.leaf.clone()).collect();
        emit(ev2.clone(), &mut current, &mut events)?;
        // track pocket-family ids through the event
        let mut touched_live = false;
        for (orig, cur) in live_ids.clone() {
            if consumed.contains(&cur) {
                live_ids.remove(&orig);
                touched_live = true;
            }
        }
        if touched_live || ev
            .outputs
            .iter()
            .any(|o| is_pocket_family(movie, pocket, idx + 1, o))
        {
            for o in &ev.outputs {
                if is_pocket_family(movie, pocket, idx + 1, o) {
                    live_ids.insert(o.clone(), o.clone());
                }
            }
        }

        // transition?
        if pocket.triggers.contains(&idx) {
            let target = live + 1;
            transition(
                &frame,
                &mut current,
                &mut events,
                &mut used,
                &pocket.items,
                &pocket.feet,
                live,
                target,
                &mut live_ids,
                &mut box_ids,
                &mut box_puncts,
                movie,
                pocket,
            )?;
            live = target;
        }
    }

    // gluing
    let mut leaves: BTreeMap<LeafId, LeafId> = BTreeMap::new();
    for (from, to) in &movie.gluing.leaves {
        let from_is_pocket = live_ids.contains_key(from);
        if from_is_pocket || is_pocket_slice0_leaf(movie, pocket, to) {
            continue; // handled below
        }
        leaves.insert(from.clone(), to.clone());
    }
    // live box wraps onto the box occupying its start position
    for (orig_final, cur) in &live_ids {
        let t_orig = movie
            .gluing
            .leaves
            .get(orig_final)
            .cloned()
            .unwrap_or_else(|| orig_final.clone());
        let target = if m == 1 { t_orig } else { copy_leaf(&t_orig, m) };
        if *cur != target {
            leaves.insert(cur.clone(), target);
        }
    }
    // frozen boxes wrap positionally
    for (i, ids) in &box_ids {
        for (base, cur) in ids {
            let target = if *i == 1 { base.clone() } else { copy_leaf(base, *i) };
            if *cur != target {
                leaves.insert(cur.clone(), target);
            }
        }
    }
    let mut strands: BTreeMap<PunctureId, PunctureId> = BTreeMap::new();
    for p in &frame.punctures {
        strands.insert(p.clone(), p.clone());
    }
    for (p, q) in &movie.gluing.strands {
        if frame.punctures.contains(p) && frame.punctures.contains(q) {
            strands.insert(p.clone(), q.clone());
        }
    }
    for q in &pocket.punctures {
        // live strands: named q@1 throughout, wrap onto the final box's role
        let t = movie.gluing.strand_image(q);
        let target = if m == 1 {
            copy_puncture(&t, 1)
        } else {
            copy_puncture(&t, m)
        };
        strands.insert(copy_puncture(q, 1), target);
    }
    for (i, ids) in &box_puncts {
        for (base, cur) in ids {
            strands.insert(cur.clone(), copy_puncture(base, *i));
        }
    }
    let strands: BTreeMap<PunctureId, PunctureId> = strands
        .into_iter()
        .filter(|(a, b)| a != b)
        .collect();

    let out = Movie::from_initial(frame, initial, events, Gluing { leaves, strands })
        .map_err(|e| MovieError::PreconditionFailed(format!("cleared movie: {e}")))?;
    out.require_valid()?;
    Ok(out)
}

fn live_at_start(_pocket: &PocketData, _m: usize) -> usize {
    1
}

/// Does the leaf id belong to the pocket's family system at the given slice?
/// Pocket families are exactly the leaves whose endpoints involve pocket feet
/// or pocket strands, plus the pocket's closed leaves.
fn is_pocket_family(movie: &Movie, pocket: &PocketData, slice: usize, l: &LeafId) -> bool {
    let bound = movie.k().max(1);
    let s = &movie.slices[slice.min(bound)];
    match s.leaves.get(l) {
        None => false,
        Some(LeafShape::Circle { .. }) => {
            // a closed leaf is pocket material iff it is one of the pocket's
            // circles at the pocket slice or flows from one; approximated by
            // membership of the original circle set
            pocket.circles.contains(l)
        }
        Some(LeafShape::Arc(a, b)) => {
            let feet: BTreeSet<&ElliId> = pocket.feet.iter().collect();
            [a, b].iter().any(|e| match e {
                EndPt::E(x) => feet.contains(x),
                EndPt::P(p) => pocket.punctures.contains(p),
            })
        }
    }
}

fn is_pocket_slice0_leaf(movie: &Movie, pocket: &PocketData, l: &LeafId) -> bool {
    is_pocket_family(movie, pocket, 0, l)
}

#[allow(clippy::too_many_arguments)]
fn transition(
    frame: &crate::page::Frame,
    current: &mut crate::page::Slice,
    events: &mut Vec<HyperbolicEvent>,
    used: &mut BTreeSet<LeafId>,
    items: &[PocketItem],
    feet: &[ElliId],
    source: usize,
    target: usize,
    live_ids: &mut BTreeMap<LeafId, LeafId>,
    box_ids: &mut BTreeMap<usize, BTreeMap<LeafId, LeafId>>,
    box_puncts: &mut BTreeMap<usize, BTreeMap<PunctureId, PunctureId>>,
    movie: &Movie,
    pocket: &PocketData,
) -> Result<(), MovieError> {
    let tgt_ids = box_ids.remove(&target).ok_or_else(|| {
        MovieError::PreconditionFailed(format!("no frozen box at copy {target}"))
    })?;
    let tgt_puncts = box_puncts.remove(&target).unwrap_or_default();
    let mut new_src_ids: BTreeMap<LeafId, LeafId> = BTreeMap::new();

    transfer_items(
        frame, current, events, used, items, feet, source, target, live_ids, &tgt_ids,
        &mut new_src_ids, movie,
    )?;

    // closed pocket leaves ride along: the frozen copies' circles now belong
    // to the source box
    for c in &pocket.circles {
        if let Some(cur) = tgt_ids.get(c) {
            new_src_ids.insert(c.clone(), cur.clone());
        }
    }
    box_ids.insert(source, new_src_ids);
    box_puncts.insert(source, tgt_puncts);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn transfer_items(
    frame: &crate::page::Frame,
    current: &mut crate::page::Slice,
    events: &mut Vec<HyperbolicEvent>,
    used: &mut BTreeSet<LeafId>,
    items: &[PocketItem],
    feet: &[ElliId],
    source: usize,
    target: usize,
    live_ids: &mut BTreeMap<LeafId, LeafId>,
    tgt_ids: &BTreeMap<LeafId, LeafId>,
    new_src_ids: &mut BTreeMap<LeafId, LeafId>,
    movie: &Movie,
) -> Result<(), MovieError> {
    let foot_of = |j: usize, copy: usize| copy_elliptic(&feet[j], copy);
    let live_leg = |current: &crate::page::Slice, j: usize| -> Result<LeafId, MovieError> {
        current
            .leaf_at_elliptic(&foot_of(j, source))
            .map(|(l, _)| l.clone())
            .ok_or_else(|| {
                MovieError::PreconditionFailed(format!("no live leg at foot {}", feet[j]))
            })
    };
    let fire = |current: &mut crate::page::Slice,
                    events: &mut Vec<HyperbolicEvent>,
                    used: &mut BTreeSet<LeafId>,
                    sign: Sign,
                    a: &LeafId,
                    b: &LeafId,
                    base: &str|
     -> Result<[LeafId; 2], MovieError> {
        let side = match sign {
            Sign::Pos => Side::L,
            Sign::Neg => Side::R,
        };
        let o1 = fresh_leaf_id(used, &format!("{base}.x"));
        let o2 = fresh_leaf_id(used, &format!("{base}.y"));
        let ev = HyperbolicEvent {
            id: EventId::new(format!("mv_{}", events.len())),
            sign,
            arc: DescribingArc::new(
                Attach {
                    leaf: a.clone(),
                    side,
                },
                Attach {
                    leaf: b.clone(),
                    side,
                },
            ),
            outputs: vec![o1.clone(), o2.clone()],
        };
        let res = crate::page::saddle_resolve(frame, current, &ev.arc, ev.sign, &ev.outputs)
            .map_err(|e| {
                MovieError::PreconditionFailed(format!("leg transfer does not resolve: {e}"))
            })?;
        *current = res.slice;
        events.push(ev);
        Ok([o1, o2])
    };
    // after firing, identify which output landed at which foot
    let output_at = |current: &crate::page::Slice, outs: &[LeafId; 2], e: &ElliId| -> Option<LeafId> {
        outs.iter()
            .find(|o| match current.leaves.get(*o) {
                Some(LeafShape::Arc(a, b)) => {
                    [a, b].iter().any(|x| **x == EndPt::E(e.clone()))
                }
                _ => false,
            })
            .cloned()
    };
    // update the live rename table: the original id whose current name was
    // `old` now continues as `new`
    let relabel_live =
        |live_ids: &mut BTreeMap<LeafId, LeafId>, old: &LeafId, new: &LeafId| {
            if let Some(orig) = live_ids
                .iter()
                .find(|(_, cur)| *cur == old)
                .map(|(o, _)| o.clone())
            {
                live_ids.insert(orig, new.clone());
            }
        };

    for item in items {
        match item {
            PocketItem::AFoot { foot, leaf } => {
                let frozen = tgt_ids
                    .get(leaf)
                    .ok_or_else(|| {
                        MovieError::PreconditionFailed(format!("frozen copy of {leaf} missing"))
                    })?
                    .clone();
                let leg = live_leg(current, *foot)?;
                let sign = frame.sign_of(&foot_of(*foot, target)).map_err(MovieError::Slice)?;
                let outs = fire(current, events, used, sign, &frozen, &leg, leaf.as_str())?;
                let landed = output_at(current, &outs, &foot_of(*foot, source))
                    .ok_or_else(|| MovieError::PreconditionFailed("transfer landed nowhere".into()))?;
                let moved = outs.iter().find(|o| **o != landed).unwrap().clone();
                new_src_ids.insert(leaf.clone(), landed);
                relabel_live(live_ids, &leg, &moved);
            }
            PocketItem::BPair {
                from,
                to,
                leaf,
                inner,
            } => {
                let frozen = tgt_ids
                    .get(leaf)
                    .ok_or_else(|| {
                        MovieError::PreconditionFailed(format!("frozen copy of {leaf} missing"))
                    })?
                    .clone();
                let sign_from = frame
                    .sign_of(&foot_of(*from, target))
                    .map_err(MovieError::Slice)?;
                // (a) open: join the frozen arc with the live leg at the near foot
                let leg_from = live_leg(current, *from)?;
                let outs = fire(current, events, used, sign_from, &frozen, &leg_from, leaf.as_str())?;
                let moved = output_at(current, &outs, &foot_of(*from, target))
                    .ok_or_else(|| MovieError::PreconditionFailed("open transfer failed".into()))?;
                relabel_live(live_ids, &leg_from, &moved);
                // (b) the enclosed items
                transfer_items(
                    frame, current, events, used, inner, feet, source, target, live_ids, tgt_ids,
                    new_src_ids, movie,
                )?;
                // (c) close: the spanning arc meets the live leg at the far foot
                let spanning = output_at(current, &outs, &foot_of(*from, source))
                    .ok_or_else(|| MovieError::PreconditionFailed("spanning arc lost".into()))?;
                let leg_to = live_leg(current, *to)?;
                let outs2 = fire(
                    current,
                    events,
                    used,
                    sign_from.flip(),
                    &spanning,
                    &leg_to,
                    leaf.as_str(),
                )?;
                let closed = outs2
                    .iter()
                    .find(|o| match current.leaves.get(*o) {
                        Some(LeafShape::Arc(a, b)) => {
                            let f = EndPt::E(foot_of(*from, source));
                            let t = EndPt::E(foot_of(*to, source));
                            (*a == f && *b == t) || (*a == t && *b == f)
                        }
                        _ => false,
                    })
                    .cloned()
                    .ok_or_else(|| MovieError::PreconditionFailed("closing arc malformed".into()))?;
                let moved2 = outs2.iter().find(|o| **o != closed).unwrap().clone();
                new_src_ids.insert(leaf.clone(), closed);
                relabel_live(live_ids, &leg_to, &moved2);
            }
        }
    }
    Ok(())
}

/// Cancel the vertex at an inessential spoke: the spoke's pocket must be
/// bare. Removes the spoke's two endpoint elliptic points together with the
/// events creating and consuming the spoke, and splices the remaining leaf
/// worldlines together.
pub fn flatten_empty_pocket(movie: &Movie, b0: &LeafId) -> Result<(Movie, MoveRecord), MovieError> {
    movie.require_valid()?;
    // b0 must live in slice 0
    if !movie.slices[0].leaves.contains_key(b0) {
        return Err(MovieError::Slice(crate::error::SliceError::UnknownLeaf(
            b0.clone(),
        )));
    }
    let class = barc_classify(&movie.frame, &movie.slices[0], b0).map_err(MovieError::Slice)?;
    let bare = class
        .sides
        .as_ref()
        .map(|s| s.iter().any(|side| side.is_pocket() && side.is_bare()))
        .unwrap_or(false);
    if !bare {
        return Err(MovieError::BArcEssential(b0.clone()));
    }
    let (v, omega0) = match movie.slices[0].leaves[b0].clone() {
        LeafShape::Arc(EndPt::E(a), EndPt::E(b)) => {
            if movie.frame.elliptics[&a].sign == Sign::Neg {
                (a, b)
            } else {
                (b, a)
            }
        }
        _ => return Err(MovieError::Slice(crate::error::SliceError::NotABArc(b0.clone()))),
    };

    // birth and death events of the spoke's family
    let k = movie.k();
    if k < 2 {
        return Err(MovieError::PreconditionFailed(
            "cancellation needs at least two events".into(),
        ));
    }
    let death = movie
        .events
        .iter()
        .position(|e| e.arc.ends.iter().any(|a| &a.leaf == b0))
        .ok_or_else(|| MovieError::PreconditionFailed("the spoke is never consumed".into()))?;
    // the family wraps: its birth is the producer of the leaf gluing onto b0
    let birth = {
        let pre = movie
            .gluing
            .leaves
            .iter()
            .find(|(_, to)| *to == b0)
            .map(|(from, _)| from.clone())
            .unwrap_or_else(|| b0.clone());
        movie
            .events
            .iter()
            .position(|e| e.outputs.contains(&pre))
            .ok_or_else(|| {
                MovieError::PreconditionFailed("the spoke has no creating event".into())
            })?
    };
    if birth == death {
        return Err(MovieError::PreconditionFailed(
            "the spoke's creator and consumer coincide".into(),
        ));
    }

    // per-slice rewrite: drop the arcs at v and omega0, sew their partners
    let sew_id = |a: &LeafId, b: &LeafId| LeafId::new(format!("{a}+{b}"));
    let arcs_at = |s: &crate::page::Slice| -> Result<((LeafId, EndPt), (LeafId, EndPt)), MovieError> {
        let (lv, sv) = s
            .leaf_at_elliptic(&v)
            .ok_or_else(|| MovieError::PreconditionFailed(format!("{v} has no leaf")))?;
        let (lo, so) = s
            .leaf_at_elliptic(&omega0)
            .ok_or_else(|| MovieError::PreconditionFailed(format!("{omega0} has no leaf")))?;
        let far = |shape: &LeafShape, here: &ElliId| -> Result<EndPt, MovieError> {
            match shape {
                LeafShape::Arc(a, b) => Ok(if *a == EndPt::E(here.clone()) {
                    b.clone()
                } else {
                    a.clone()
                }),
                _ => Err(MovieError::PreconditionFailed(
                    "closed leaf at a spoke endpoint".into(),
                )),
            }
        };
        Ok(((lv.clone(), far(sv, &v)?), (lo.clone(), far(so, &omega0)?)))
    };

    let rewrite_slice = |s: &crate::page::Slice| -> Result<crate::page::Slice, MovieError> {
        let ((lv, fv), (lo, fo)) = arcs_at(s)?;
        let mut out = s.clone();
        // strip the cancelled endpoints from the binding order
        for order in out.orders.values_mut() {
            order.retain(|e| *e != v && *e != omega0);
        }
        out.leaves.remove(&lv);
        if lv == lo {
            // the spoke itself: simply deleted
        } else {
            out.leaves.remove(&lo);
            out.leaves.insert(sew_id(&lv, &lo), LeafShape::Arc(fv, fo));
        }
        // anchors referencing the dropped leaves move to the sewn one
        let replacement = if lv == lo { None } else { Some(sew_id(&lv, &lo)) };
        let fix = |d: &mut Dart| {
            if let Dart::Leaf { leaf, side } = d {
                if *leaf == lv || *leaf == lo {
                    if let Some(r) = &replacement {
                        *d = Dart::Leaf {
                            leaf: r.clone(),
                            side: *side,
                        };
                    }
                }
            }
        };
        let mut anchors = out.anchors.clone();
        for d in anchors.values_mut() {
            fix(d);
        }
        out.anchors = anchors;
        let mut outers = out.outers.clone();
        for d in outers.values_mut() {
            fix(d);
        }
        out.outers = outers;
        Ok(out)
    };

    // events: drop birth and death, rewire references to the two arcs
    let mut events: Vec<HyperbolicEvent> = Vec::new();
    for (i, ev) in movie.events.iter().enumerate() {
        if i == birth || i == death {
            continue;
        }
        let ((lv, _), (lo, _)) = arcs_at(&movie.slices[i])?;
        let sewn = sew_id(&lv, &lo);
        let mut ev2 = ev.clone();
        let mut self_hit = 0;
        for a in &mut ev2.arc.ends {
            if a.leaf == lv || a.leaf == lo {
                a.leaf = sewn.clone();
                self_hit += 1;
            }
        }
        if self_hit == 2 {
            return Err(MovieError::PreconditionFailed(
                "an event meets both cancelled arcs; unsupported".into(),
            ));
        }
        // outputs that are arcs at v or omega0 become sewn leaves
        let next = &movie.slices[i + 1];
        let ((lv2, _), (lo2, _)) = arcs_at(next)?;
        for o in &mut ev2.outputs {
            if *o == lv2 || *o == lo2 {
                *o = sew_id(&lv2, &lo2);
            }
        }
        events.push(ev2);
    }

    // glue: surviving entries, with sewn composites wired through the death
    // of the negative event
    let final_idx = movie.k();
    let ((lv_end, _), (lo_end, _)) = arcs_at(&movie.slices[final_idx])?;
    let ((lv_0, _), (lo_0, _)) = arcs_at(&movie.slices[0])?;
    let glue_img = |l: &LeafId| {
        movie
            .gluing
            .leaves
            .get(l)
            .cloned()
            .unwrap_or_else(|| l.clone())
    };
    let mut leaves: BTreeMap<LeafId, LeafId> = BTreeMap::new();
    for (from, to) in &movie.gluing.leaves {
        if [from, to].iter().any(|l| **l == lv_end || **l == lo_end || **l == lv_0 || **l == lo_0)
        {
            continue;
        }
        leaves.insert(from.clone(), to.clone());
    }
    if lv_end != lo_end {
        let sewn_end = sew_id(&lv_end, &lo_end);
        let (tv, to_) = (glue_img(&lv_end), glue_img(&lo_end));
        let target = if tv == lo_0 || to_ == lv_0 || tv == lv_0 || to_ == lo_0 {
            // wraps onto the spoke configuration at slice 0: the partners sew
            if lv_0 == lo_0 {
                None
            } else {
                Some(sew_id(&lv_0, &lo_0))
            }
        } else {
            Some(sew_id(&tv, &to_))
        };
        if let Some(t) = target {
            if sewn_end != t {
                leaves.insert(sewn_end, t);
            }
        }
    }

    let mut frame = movie.frame.clone();
    frame.elliptics.remove(&v);
    frame.elliptics.remove(&omega0);

    let initial = rewrite_slice(&movie.slices[0])?;
    let before = CountSummary::of(movie);
    let out = Movie::from_initial(
        frame,
        initial,
        events,
        Gluing {
            leaves,
            strands: movie.gluing.strands.clone(),
        },
    )
    .map_err(|e| MovieError::PreconditionFailed(format!("cancelled movie: {e}")))?;
    out.require_valid()?;
    let record = MoveRecord {
        kind: "flatten-empty-pocket".into(),
        targets: vec![b0.to_string(), v.to_string(), omega0.to_string()],
        before,
        after: CountSummary::of(&out),
    };
    Ok((out, record))
}

/// The composite deformation at `v`: clear separating spokes, evacuate the
/// pocket, cancel the inessential spoke.
pub fn deform_at(movie: &Movie, v: &ElliId) -> Result<DeformOutcome, MovieError> {
    let (m1, mut records) = remove_separating_spokes(movie, v)?;
    if !spokes_avoid_pocket(&m1, v)? {
        return Err(MovieError::PreconditionFailed(
            "a spoke endpoint lies on the pocket arc".into(),
        ));
    }
    let (m2, rec) = evacuate_pocket(&m1, v)?;
    records.push(rec);
    // find the cleared spoke: the wheel's outer arc whose pocket is now bare
    let wheel = wheel_at(&m2, v)?;
    let is_bare = |movie: &Movie, slice: usize, l: &LeafId| -> Result<bool, MovieError> {
        let class = barc_classify(&movie.frame, &movie.slices[slice], l)
            .map_err(MovieError::Slice)?;
        Ok(class
            .sides
            .as_ref()
            .map(|s| s.iter().any(|x| x.is_pocket() && x.is_bare()))
            .unwrap_or(false))
    };
    let target_movie;
    let b0;
    if is_bare(&wheel.movie, 0, wheel.b0())? {
        b0 = wheel.b0().clone();
        target_movie = wheel.movie;
    } else {
        // the bare pocket sits just before the negative event: rotate it to 0
        let rotated = wheel.movie.rotate_to(wheel.movie.k() - 1)?;
        let l = rotated.slices[0]
            .leaf_at_elliptic(v)
            .map(|(l, _)| l.clone())
            .ok_or_else(|| MovieError::PreconditionFailed("lost the spoke".into()))?;
        if !is_bare(&rotated, 0, &l)? {
            return Err(MovieError::PreconditionFailed(
                "pocket clearing left no bare spoke".into(),
            ));
        }
        b0 = l;
        target_movie = rotated;
    }
    let (m3, rec) = flatten_empty_pocket(&target_movie, &b0)?;
    records.push(rec);
    Ok(DeformOutcome { movie: m3, records })
}
