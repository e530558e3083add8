//! Movie presentations: a cyclic sequence of slices joined by saddle events
//! and closed up by a relabeling bijection.
//!
//! Time is a discrete index. Event `i` happens between slice `i` and slice
//! `i+1`; the final slice is identified with slice `0` by the gluing, which
//! renames leaves (and braid strands) while fixing every elliptic point.

use crate::error::MovieError;
use crate::ids::{ElliId, EventId, LeafId, PunctureId, Sign};
use crate::page::{
    canonicalize, check_wellformed, saddle_resolve, trace_faces, Dart, DescribingArc, EndPt,
    Frame, IslandKey, LeafShape, Slice,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// One hyperbolic event: a signed describing arc with names for the leaves it
/// produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicEvent {
    pub id: EventId,
    pub sign: Sign,
    pub arc: DescribingArc,
    pub outputs: Vec<LeafId>,
}

/// The relabeling that glues the final slice back to slice 0. Elliptic points
/// are fixed; leaves are renamed by `leaves`; braid strands continue by the
/// permutation `strands` (identity entries may be omitted).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    pub leaves: BTreeMap<LeafId, LeafId>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub strands: BTreeMap<PunctureId, PunctureId>,
}

impl Gluing {
    pub fn strand_image(&self, p: &PunctureId) -> PunctureId {
        self.strands.get(p).cloned().unwrap_or_else(|| p.clone())
    }
}

/// A movie presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Movie {
    pub frame: Frame,
    pub slices: Vec<Slice>,
    pub events: Vec<HyperbolicEvent>,
    pub gluing: Gluing,
}

/// One validation check with its outcome.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of validating a movie; carries every check, passed or failed.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

impl Movie {
    /// Number of events (= number of intervals).
    pub fn k(&self) -> usize {
        self.events.len()
    }

    /// Build a movie by replaying events from the initial slice. The final
    /// slice is produced by the replay; the gluing must close it up.
    pub fn from_initial(
        frame: Frame,
        initial: Slice,
        events: Vec<HyperbolicEvent>,
        gluing: Gluing,
    ) -> Result<Movie, MovieError> {
        let mut initial = initial;
        canonicalize(&frame, &mut initial).map_err(MovieError::Slice)?;
        let mut slices = vec![initial];
        for ev in &events {
            let cur = slices.last().unwrap();
            let res = saddle_resolve(&frame, cur, &ev.arc, ev.sign, &ev.outputs)
                .map_err(MovieError::Slice)?;
            slices.push(res.slice);
        }
        let movie = Movie {
            frame,
            slices,
            events,
            gluing,
        };
        Ok(movie)
    }

    /// Counts `(e+, e-, h+, h-)`.
    pub fn counts(&self) -> (usize, usize, usize, usize) {
        let (ep, en) = self.frame.elliptic_counts();
        let hp = self.events.iter().filter(|e| e.sign == Sign::Pos).count();
        (ep, en, hp, self.events.len() - hp)
    }

    /// Apply the gluing to the final slice: rename leaves and strands.
    pub fn glued_final(&self) -> Result<Slice, MovieError> {
        let last = self.slices.last().ok_or_else(|| {
            MovieError::InvalidMovie("movie has no slices".into())
        })?;
        let mut leaf_map = self.gluing.leaves.clone();
        for l in last.leaves.keys() {
            leaf_map.entry(l.clone()).or_insert_with(|| l.clone());
        }
        let mut strand_map = self.gluing.strands.clone();
        for p in &self.frame.punctures {
            strand_map.entry(p.clone()).or_insert_with(|| p.clone());
        }
        Ok(rename_slice(last, &leaf_map, &strand_map))
    }

    /// Run the full validator.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();

        if self.slices.len() != self.events.len() + 1 {
            rep.push(
                "event-count",
                false,
                format!(
                    "{} slices and {} events; expected one event per interval",
                    self.slices.len(),
                    self.events.len()
                ),
            );
            return rep;
        }
        rep.push("event-count", true, "one event per interval");

        // per-slice structure and planarity
        let mut slices_ok = true;
        for (i, s) in self.slices.iter().enumerate() {
            let wf = check_wellformed(&self.frame, s)
                .and_then(|_| trace_faces(&self.frame, s).map(|_| ()));
            match wf {
                Ok(()) => rep.push(format!("slice[{i}]"), true, "well-formed and planar"),
                Err(e) => {
                    slices_ok = false;
                    rep.push(format!("slice[{i}]"), false, e.to_string());
                }
            }
        }
        if !slices_ok {
            return rep;
        }

        // forbidden self-saddles and the Observation sign rule, then replay
        for (i, ev) in self.events.iter().enumerate() {
            let [a, b] = &ev.arc.ends;
            if a.leaf == b.leaf && a.side != b.side {
                rep.push(
                    format!("event[{i}]({})", ev.id),
                    false,
                    "forbidden: describing arc meets one leaf from both sides",
                );
                continue;
            }
            let expected = match ev.sign {
                Sign::Pos => crate::page::Side::L,
                Sign::Neg => crate::page::Side::R,
            };
            if a.side != expected || b.side != expected {
                rep.push(
                    format!("event[{i}]({})", ev.id),
                    false,
                    format!(
                        "sign {} requires attachment on both {:?} sides",
                        ev.sign, expected
                    ),
                );
                continue;
            }
            match saddle_resolve(&self.frame, &self.slices[i], &ev.arc, ev.sign, &ev.outputs) {
                Err(e) => rep.push(format!("event[{i}]({})", ev.id), false, e.to_string()),
                Ok(res) => {
                    let mut stored = self.slices[i + 1].clone();
                    let canon = canonicalize(&self.frame, &mut stored);
                    if canon.is_err() {
                        rep.push(
                            format!("event[{i}]({})", ev.id),
                            false,
                            "stored successor slice does not trace".to_string(),
                        );
                    } else if stored == res.slice {
                        rep.push(format!("event[{i}]({})", ev.id), true, "replay matches");
                    } else {
                        rep.push(
                            format!("event[{i}]({})", ev.id),
                            false,
                            "stored slice differs from the resolved one",
                        );
                    }
                }
            }
        }

        // leaf-id discipline: every id is born at most once, and an event
        // never reuses a name alive in the slice it fires from
        let mut born: BTreeSet<LeafId> = BTreeSet::new();
        let mut id_ok = true;
        for (i, ev) in self.events.iter().enumerate() {
            for o in &ev.outputs {
                if self.slices[i].leaves.contains_key(o) || !born.insert(o.clone()) {
                    rep.push(
                        "leaf-ids",
                        false,
                        format!("output {o} of event {i} reuses an id"),
                    );
                    id_ok = false;
                }
            }
        }
        if id_ok {
            rep.push("leaf-ids", true, "each leaf id is born at most once");
        }

        // gluing
        match self.glued_final() {
            Err(e) => rep.push("gluing", false, e.to_string()),
            Ok(mut glued) => {
                let mut first = self.slices[0].clone();
                let ok1 = canonicalize(&self.frame, &mut glued).is_ok();
                let ok2 = canonicalize(&self.frame, &mut first).is_ok();
                if ok1 && ok2 && glued == first {
                    rep.push("gluing", true, "relabeled final slice equals slice 0");
                } else {
                    rep.push(
                        "gluing",
                        false,
                        "relabeled final slice differs from slice 0",
                    );
                }
            }
        }

        // strand permutation must be a bijection of the puncture set
        let mut strands_ok = true;
        let mut image: BTreeSet<PunctureId> = BTreeSet::new();
        for p in &self.frame.punctures {
            let q = self.gluing.strand_image(p);
            if !self.frame.punctures.contains(&q) || !image.insert(q) {
                strands_ok = false;
            }
        }
        rep.push(
            "strands",
            strands_ok,
            if strands_ok {
                "strand map is a permutation"
            } else {
                "strand map is not a permutation of the punctures"
            },
        );

        rep
    }

    /// Fail unless the movie validates.
    pub fn require_valid(&self) -> Result<(), MovieError> {
        let rep = self.validate();
        match rep.first_failure() {
            None => Ok(()),
            Some(c) => Err(MovieError::InvalidMovie(format!("{}: {}", c.name, c.detail))),
        }
    }

    /// Leaf ids alive in slice `i`.
    pub fn leaves_at(&self, i: usize) -> impl Iterator<Item = &LeafId> {
        self.slices[i].leaves.keys()
    }

    /// The leaf at elliptic point `e` in slice `i`.
    pub fn leaf_at(&self, i: usize, e: &ElliId) -> Option<(&LeafId, &LeafShape)> {
        self.slices[i].leaf_at_elliptic(e)
    }

    /// Events whose singular leaf passes through the elliptic point `e`,
    /// i.e. `e` is an endpoint of a consumed leaf. Returns `(index, sign)`.
    pub fn events_at(&self, e: &ElliId) -> Vec<(usize, Sign)> {
        let mut out = Vec::new();
        for (i, ev) in self.events.iter().enumerate() {
            let slice = &self.slices[i];
            let mut hit = false;
            for a in &ev.arc.ends {
                if let Ok(shape) = slice.leaf(&a.leaf) {
                    if let LeafShape::Arc(x, y) = shape {
                        for end in [x, y] {
                            if end == &EndPt::E(e.clone()) {
                                hit = true;
                            }
                        }
                    }
                }
            }
            if hit {
                out.push((i, ev.sign));
            }
        }
        out
    }

    /// Rotate the movie so that the event at `start` becomes event 0.
    pub fn rotate_to(&self, start: usize) -> Result<Movie, MovieError> {
        let k = self.k();
        if start >= k {
            return Err(MovieError::PreconditionFailed(format!(
                "rotation start {start} out of range 0..{k}"
            )));
        }
        if start == 0 {
            return Ok(self.clone());
        }
        // rename the early part (slices 0..=start, events 0..start) through
        // the inverse gluing, then append it after the old final slice
        let mut inv_leaves: BTreeMap<LeafId, LeafId> = BTreeMap::new();
        for (from, to) in &self.gluing.leaves {
            inv_leaves.insert(to.clone(), from.clone());
        }
        // the rename must stay injective on the early ids: an id that is both
        // alive in the early part and the target of an inverse-glue rename
        // would collide with its renamed sibling, so it moves to a fresh name
        let mut early_ids: BTreeSet<LeafId> = BTreeSet::new();
        for s in &self.slices[..=start] {
            early_ids.extend(s.leaves.keys().cloned());
        }
        for ev in &self.events[..start] {
            early_ids.extend(ev.outputs.iter().cloned());
        }
        let mut all_ids: BTreeSet<LeafId> = early_ids.clone();
        for s in &self.slices {
            all_ids.extend(s.leaves.keys().cloned());
        }
        let images: BTreeSet<LeafId> = early_ids
            .iter()
            .filter_map(|l| inv_leaves.get(l).cloned())
            .collect();
        for id in &early_ids {
            if images.contains(id) && !inv_leaves.contains_key(id) {
                let mut n = 0usize;
                let fresh = loop {
                    let cand = LeafId::new(format!("{id}~r{n}"));
                    if !all_ids.contains(&cand) {
                        break cand;
                    }
                    n += 1;
                };
                all_ids.insert(fresh.clone());
                inv_leaves.insert(id.clone(), fresh);
            }
        }
        let mut inv_strands: BTreeMap<PunctureId, PunctureId> = BTreeMap::new();
        for p in &self.frame.punctures {
            inv_strands.insert(self.gluing.strand_image(p), p.clone());
        }
        let total_leaf = |l: &LeafId| inv_leaves.get(l).cloned().unwrap_or_else(|| l.clone());

        let mut slices: Vec<Slice> = self.slices[start..].to_vec();
        for s in &self.slices[1..=start] {
            let mut map: BTreeMap<LeafId, LeafId> = BTreeMap::new();
            for l in s.leaves.keys() {
                map.insert(l.clone(), total_leaf(l));
            }
            slices.push(rename_slice(s, &map, &inv_strands));
        }

        let mut events: Vec<HyperbolicEvent> = self.events[start..].to_vec();
        for ev in &self.events[..start] {
            let mut ev = ev.clone();
            for a in &mut ev.arc.ends {
                a.leaf = total_leaf(&a.leaf);
            }
            for k in &mut ev.arc.islands_in {
                if let IslandKey::CCircle(l) = k {
                    *k = IslandKey::CCircle(total_leaf(l));
                }
            }
            for o in &mut ev.outputs {
                *o = total_leaf(o);
            }
            events.push(ev);
        }

        // new gluing: final slice is the renamed old slice `start`; map each
        // of its leaves back to the name it carries in the new slice 0
        let mut leaves = BTreeMap::new();
        for l in self.slices[start].leaves.keys() {
            let renamed = total_leaf(l);
            if renamed != *l {
                leaves.insert(renamed, l.clone());
            }
        }
        let gluing = Gluing {
            leaves,
            strands: self.gluing.strands.clone(),
        };

        Ok(Movie {
            frame: self.frame.clone(),
            slices,
            events,
            gluing,
        })
    }

    /// Rename leaves consistently across all slices, events and the gluing.
    pub fn relabel_leaves(&self, map: &BTreeMap<LeafId, LeafId>) -> Movie {
        let f = |l: &LeafId| map.get(l).cloned().unwrap_or_else(|| l.clone());
        let id_strands: BTreeMap<PunctureId, PunctureId> = BTreeMap::new();
        let slices = self
            .slices
            .iter()
            .map(|s| {
                let m: BTreeMap<LeafId, LeafId> =
                    s.leaves.keys().map(|l| (l.clone(), f(l))).collect();
                rename_slice(s, &m, &id_strands)
            })
            .collect();
        let events = self
            .events
            .iter()
            .map(|ev| {
                let mut ev = ev.clone();
                for a in &mut ev.arc.ends {
                    a.leaf = f(&a.leaf);
                }
                for k in &mut ev.arc.islands_in {
                    if let IslandKey::CCircle(l) = k {
                        *k = IslandKey::CCircle(f(l));
                    }
                }
                for o in &mut ev.outputs {
                    *o = f(o);
                }
                ev
            })
            .collect();
        let gluing = Gluing {
            leaves: self
                .gluing
                .leaves
                .iter()
                .map(|(a, b)| (f(a), f(b)))
                .collect(),
            strands: self.gluing.strands.clone(),
        };
        Movie {
            frame: self.frame.clone(),
            slices,
            events,
            gluing,
        }
    }

    /// Index of the slice in which the given leaf id first appears.
    pub fn birth_slice(&self, l: &LeafId) -> Option<usize> {
        self.slices.iter().position(|s| s.leaves.contains_key(l))
    }
}

/// Rename leaves and punctures in one slice.
pub fn rename_slice(
    slice: &Slice,
    leaf_map: &BTreeMap<LeafId, LeafId>,
    strand_map: &BTreeMap<PunctureId, PunctureId>,
) -> Slice {
    let fl = |l: &LeafId| leaf_map.get(l).cloned().unwrap_or_else(|| l.clone());
    let fp = |p: &PunctureId| strand_map.get(p).cloned().unwrap_or_else(|| p.clone());
    let rend = |e: &EndPt| match e {
        EndPt::E(x) => EndPt::E(x.clone()),
        EndPt::P(p) => EndPt::P(fp(p)),
    };
    let rdart = |d: &Dart| match d {
        Dart::Leaf { leaf, side } => Dart::Leaf {
            leaf: fl(leaf),
            side: *side,
        },
        other => other.clone(),
    };
    let rkey = |k: &IslandKey| match k {
        IslandKey::CCircle(l) => IslandKey::CCircle(fl(l)),
        other => other.clone(),
    };
    Slice {
        orders: slice.orders.clone(),
        leaves: slice
            .leaves
            .iter()
            .map(|(id, shape)| {
                let shape = match shape {
                    LeafShape::Arc(a, b) => LeafShape::Arc(rend(a), rend(b)),
                    c => c.clone(),
                };
                (fl(id), shape)
            })
            .collect(),
        anchors: slice
            .anchors
            .iter()
            .map(|(k, d)| (rkey(k), rdart(d)))
            .collect(),
        outers: slice
            .outers
            .iter()
            .map(|(k, d)| (rkey(k), rdart(d)))
            .collect(),
    }
}
