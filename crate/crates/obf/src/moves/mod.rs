//! Surface moves: b-arc foliation change, braid (de)stabilization, the
//! pocket-clearing pipeline and the composite deformation at a vertex.

mod destab;
mod folchange;
mod pocket;
mod wheel;

pub use destab::{destabilize, stabilize};
pub use folchange::barc_foliation_change;
pub use pocket::{deform_at, evacuate_pocket, flatten_empty_pocket, DeformOutcome};
pub use wheel::{remove_separating_spokes, spokes_avoid_pocket, Wheel};

use crate::ids::{ElliId, EventId, LeafId};
use crate::movie::Movie;
use serde::Serialize;
use std::collections::BTreeSet;

/// Audit record carried along with every move.
#[derive(Clone, Debug, Serialize)]
pub struct MoveRecord {
    pub kind: String,
    pub targets: Vec<String>,
    pub before: CountSummary,
    pub after: CountSummary,
}

/// Summary counts of a movie.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountSummary {
    pub e_pos: usize,
    pub e_neg: usize,
    pub h_pos: usize,
    pub h_neg: usize,
    pub punctures: usize,
}

impl CountSummary {
    pub fn of(movie: &Movie) -> Self {
        let (e_pos, e_neg, h_pos, h_neg) = movie.counts();
        CountSummary {
            e_pos,
            e_neg,
            h_pos,
            h_neg,
            punctures: movie.frame.punctures.len(),
        }
    }
}

/// A leaf id not used anywhere in the movie, derived from `base`.
pub(crate) fn fresh_leaf_id(used: &mut BTreeSet<LeafId>, base: &str) -> LeafId {
    let mut n = 0usize;
    loop {
        let cand = if n == 0 {
            LeafId::new(base)
        } else {
            LeafId::new(format!("{base}.{n}"))
        };
        if used.insert(cand.clone()) {
            return cand;
        }
        n += 1;
    }
}

pub(crate) fn used_leaf_ids(movie: &Movie) -> BTreeSet<LeafId> {
    let mut used: BTreeSet<LeafId> = BTreeSet::new();
    for s in &movie.slices {
        used.extend(s.leaves.keys().cloned());
    }
    for ev in &movie.events {
        used.extend(ev.outputs.iter().cloned());
    }
    used
}

pub(crate) fn fresh_event_id(movie: &Movie, base: &str) -> EventId {
    let used: BTreeSet<&EventId> = movie.events.iter().map(|e| &e.id).collect();
    let mut n = 0usize;
    loop {
        let cand = if n == 0 {
            EventId::new(base)
        } else {
            EventId::new(format!("{base}.{n}"))
        };
        if !used.contains(&cand) {
            return cand;
        }
        n += 1;
    }
}

pub(crate) fn fresh_elliptic_id(movie: &Movie, base: &str) -> ElliId {
    let mut n = 0usize;
    loop {
        let cand = if n == 0 {
            ElliId::new(base)
        } else {
            ElliId::new(format!("{base}.{n}"))
        };
        if !movie.frame.elliptics.contains_key(&cand) {
            return cand;
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests;
