//! The b-arc foliation change.
//!
//! Two same-sign ab/bb tiles meeting along a single separating b-arc can be
//! re-foliated: the shared b-arc disappears and the two saddles reconnect the
//! same outside leaves through a different intermediate leaf. The hyperbolic
//! count is unchanged, the singular-leaf valence at the two endpoints of the
//! shared arc drops by one each, and every other region is untouched. Two
//! outcomes exist (the intermediate leaf can be of type a or b); the
//! implementation picks the first that embeds.

use super::{fresh_event_id, fresh_leaf_id, used_leaf_ids, CountSummary, MoveRecord};
use crate::error::MovieError;
use crate::ids::{EventId, LeafId};
use crate::movie::{HyperbolicEvent, Movie};
use crate::page::{attach_for_sign, oriented_ends, EndPt};
use crate::regions::{region_decomposition, RegionType};

/// Apply the foliation change to the regions owned by events `r1` and `r2`
/// (indices into the event list). Returns the rewritten movie, rotated so
/// that the two replacement tiles are its first two events, together with
/// their event ids.
pub fn barc_foliation_change(
    movie: &Movie,
    r1: usize,
    r2: usize,
) -> Result<(Movie, MoveRecord, [EventId; 2]), MovieError> {
    let rd = region_decomposition(movie)?;
    let k = movie.k();
    if r1 >= k || r2 >= k || r1 == r2 {
        return Err(MovieError::PreconditionFailed(
            "region indices out of range".into(),
        ));
    }
    for idx in [r1, r2] {
        let kind = rd.regions[idx].kind;
        if !matches!(kind, RegionType::Ab | RegionType::Bb) {
            return Err(MovieError::PreconditionFailed(format!(
                "(i): region of event {} has type {}, need ab or bb",
                movie.events[idx].id, kind
            )));
        }
    }
    let eps = movie.events[r1].sign;
    if movie.events[r2].sign != eps {
        return Err(MovieError::PreconditionFailed(
            "(ii): the two regions carry opposite signs".into(),
        ));
    }
    let fams = |i: usize| {
        let r = &rd.regions[i];
        let mut v: Vec<_> = r.before.iter().chain(r.after.iter()).cloned().collect();
        v.sort();
        v.dedup();
        v
    };
    let f1 = fams(r1);
    let f2 = fams(r2);
    let shared: Vec<_> = f1.iter().filter(|f| f2.contains(f)).cloned().collect();
    if shared.len() != 1 {
        return Err(MovieError::PreconditionFailed(format!(
            "(iii): regions share {} leaves, need exactly one",
            shared.len()
        )));
    }
    let shared_fam = &shared[0];
    let (producer, consumer) = if rd.regions[r1].after.contains(shared_fam)
        && rd.regions[r2].before.contains(shared_fam)
    {
        (r1, r2)
    } else if rd.regions[r2].after.contains(shared_fam)
        && rd.regions[r1].before.contains(shared_fam)
    {
        (r2, r1)
    } else {
        return Err(MovieError::PreconditionFailed(
            "(iii): the shared leaf is not passed from one region to the other".into(),
        ));
    };

    // rotate so the producer is event 0
    let rotated = movie.rotate_to(producer)?;
    let j = (consumer + k - producer) % k;
    let b_id: LeafId = {
        // the shared arc's id right after the producer fires
        rotated.events[0]
            .outputs
            .iter()
            .find(|o| {
                rotated.events[j]
                    .arc
                    .ends
                    .iter()
                    .any(|a| &a.leaf == *o)
                    && rotated.slices[j].leaves.contains_key(*o)
            })
            .cloned()
            .ok_or_else(|| {
                MovieError::PreconditionFailed("(iii): shared leaf not found after rotation".into())
            })?
    };
    {
        let class = crate::page::barc_classify(&rotated.frame, &rotated.slices[1], &b_id)
            .map_err(MovieError::Slice)?;
        if !class.separating {
            return Err(MovieError::PreconditionFailed(
                "(iii): the shared b-arc is not separating".into(),
            ));
        }
    }

    let e0 = rotated.events[0].clone();
    let ej = rotated.events[j].clone();
    let l2 = ej
        .arc
        .ends
        .iter()
        .map(|a| a.leaf.clone())
        .find(|l| *l != b_id)
        .ok_or_else(|| {
            MovieError::PreconditionFailed("consumer only touches the shared arc".into())
        })?;
    if !rotated.slices[0].leaves.contains_key(&l2) {
        return Err(MovieError::PreconditionFailed(format!(
            "side leaf {l2} of the consumer is not alive at the producer's slice"
        )));
    }

    let mut last_err = None;
    for roles in [[0usize, 1], [1, 0]] {
        let b_minus = e0.arc.ends[roles[0]].leaf.clone();
        let l1 = e0.arc.ends[roles[1]].leaf.clone();
        if b_minus == l1 {
            continue;
        }
        match attempt(&rotated, j, &e0, &ej, &b_id, &b_minus, &l1, &l2, eps) {
            Ok(out) => {
                let before = CountSummary::of(movie);
                let after = CountSummary::of(&out.0);
                return Ok((
                    out.0,
                    MoveRecord {
                        kind: "barc-foliation-change".into(),
                        targets: vec![e0.id.to_string(), ej.id.to_string()],
                        before,
                        after,
                    },
                    out.1,
                ));
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| {
        MovieError::PreconditionFailed("no re-foliation of the pair embeds".into())
    }))
}

#[allow(clippy::too_many_arguments)]
fn attempt(
    movie: &Movie,
    j: usize,
    e0: &HyperbolicEvent,
    ej: &HyperbolicEvent,
    b_id: &LeafId,
    b_minus: &LeafId,
    l1: &LeafId,
    l2: &LeafId,
    eps: crate::ids::Sign,
) -> Result<(Movie, [EventId; 2]), MovieError> {
    let slice0 = &movie.slices[0];
    let ends_of = |slice: &crate::page::Slice, l: &LeafId| -> Result<(EndPt, EndPt), MovieError> {
        oriented_ends(&movie.frame, slice.leaf(l).map_err(MovieError::Slice)?)
            .map_err(MovieError::Slice)
    };

    // the leaves the outside world still expects to see produced
    let mut remaining: Vec<(LeafId, (EndPt, EndPt))> = Vec::new();
    for o in e0.outputs.iter().filter(|o| *o != b_id) {
        remaining.push((o.clone(), ends_of(&movie.slices[1], o)?));
    }
    for o in &ej.outputs {
        remaining.push((o.clone(), ends_of(&movie.slices[j + 1], o)?));
    }

    let (t_bm, h_bm) = ends_of(slice0, b_minus)?;
    let (t_l2, h_l2) = ends_of(slice0, l2)?;
    let out_a = (t_bm.clone(), h_l2.clone());
    let out_b = (t_l2.clone(), h_bm.clone());
    let pick = |ends: &(EndPt, EndPt), pool: &mut Vec<(LeafId, (EndPt, EndPt))>| -> Option<LeafId> {
        pool.iter()
            .position(|(_, e)| e == ends)
            .map(|p| pool.remove(p).0)
    };
    let mut used = used_leaf_ids(movie);
    let name_a = pick(&out_a, &mut remaining);
    let name_b = pick(&out_b, &mut remaining);
    let (shared_new, first_outputs) = match (name_a, name_b) {
        (Some(a), None) => {
            let f = fresh_leaf_id(&mut used, &format!("{b_id}~"));
            (f.clone(), vec![a, f])
        }
        (None, Some(b)) => {
            let f = fresh_leaf_id(&mut used, &format!("{b_id}~"));
            (f.clone(), vec![f, b])
        }
        _ => {
            return Err(MovieError::PreconditionFailed(
                "replacement saddle does not leave exactly one intermediate leaf".into(),
            ));
        }
    };

    let ev1_id = fresh_event_id(movie, &format!("{}~", e0.id));
    let arc1 = attach_for_sign(&movie.frame, slice0, b_minus, l2, eps).map_err(|e| {
        MovieError::PreconditionFailed(format!("first replacement saddle untraceable: {e}"))
    })?;
    let ev1 = HyperbolicEvent {
        id: ev1_id.clone(),
        sign: eps,
        arc: arc1,
        outputs: first_outputs,
    };
    let mid = crate::page::saddle_resolve(&movie.frame, slice0, &ev1.arc, eps, &ev1.outputs)
        .map_err(|e| MovieError::PreconditionFailed(format!("first replacement saddle: {e}")))?
        .slice;

    let (t_sh, h_sh) = oriented_ends(
        &movie.frame,
        mid.leaf(&shared_new).map_err(MovieError::Slice)?,
    )
    .map_err(MovieError::Slice)?;
    let (t_l1, h_l1) = ends_of(slice0, l1)?;
    let n_c = pick(&(t_sh, h_l1), &mut remaining);
    let n_d = pick(&(t_l1, h_sh), &mut remaining);
    let second_outputs = match (n_c, n_d) {
        (Some(c), Some(d)) if remaining.is_empty() => vec![c, d],
        _ => {
            return Err(MovieError::PreconditionFailed(
                "second replacement saddle does not reproduce the outside leaves".into(),
            ));
        }
    };
    let ev2_id = fresh_event_id(movie, &format!("{}~", ej.id));
    let arc2 = attach_for_sign(&movie.frame, &mid, &shared_new, l1, eps).map_err(|e| {
        MovieError::PreconditionFailed(format!("second replacement saddle untraceable: {e}"))
    })?;
    let ev2 = HyperbolicEvent {
        id: ev2_id.clone(),
        sign: eps,
        arc: arc2,
        outputs: second_outputs,
    };

    let mut events = vec![ev1, ev2];
    for (i, ev) in movie.events.iter().enumerate() {
        if i != 0 && i != j {
            events.push(ev.clone());
        }
    }
    let new_movie = Movie::from_initial(
        movie.frame.clone(),
        movie.slices[0].clone(),
        events,
        movie.gluing.clone(),
    )
    .map_err(|e| MovieError::PreconditionFailed(format!("rewritten movie does not replay: {e}")))?;
    new_movie.require_valid()?;
    Ok((new_movie, [ev1_id, ev2_id]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opposite_signs_are_rejected() {
        let m = crate::fixtures::sphere();
        match barc_foliation_change(&m, 0, 1) {
            Err(MovieError::PreconditionFailed(msg)) => {
                assert!(msg.contains("(ii)"), "{msg}");
            }
            other => panic!("expected sign precondition failure, got {other:?}"),
        }
    }

    /// The overtwisted disc's two tiles share a non-separating b-arc:
    /// precondition (iii) fails.
    #[test]
    fn nonseparating_shared_arc_is_rejected() {
        let m = crate::fixtures::overtwisted_disc();
        match barc_foliation_change(&m, 0, 1) {
            Err(MovieError::PreconditionFailed(msg)) => {
                assert!(msg.contains("separating") || msg.contains("(iii)"), "{msg}");
            }
            other => panic!("expected precondition failure, got {other:?}"),
        }
    }
}
