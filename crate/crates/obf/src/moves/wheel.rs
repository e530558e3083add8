//! The local star of a valence-one negative vertex: its single negative
//! event, the fan of positive events, and the spoke b-arcs between them.

use super::{destabilize, barc_foliation_change, MoveRecord};
use crate::error::MovieError;
use crate::ids::{ElliId, LeafId, Sign};
use crate::movie::Movie;
use crate::page::{barc_classify, EndPt, LeafShape};
use crate::regions::{region_decomposition, RegionType};

/// The wheel at a valence-one negative elliptic point, extracted on a movie
/// rotated so that the negative event is last.
#[derive(Clone, Debug)]
pub struct Wheel {
    pub movie: Movie,
    pub center: ElliId,
    /// Indices of the positive events at the center, increasing.
    pub positive_events: Vec<usize>,
    /// Spoke leaf and far endpoint per window: entry 0 covers the slices
    /// before the first positive event (the arc produced by the negative
    /// event), entry `t` the window after the `t`-th positive event.
    pub spokes: Vec<(LeafId, ElliId)>,
}

impl Wheel {
    pub fn m(&self) -> usize {
        self.positive_events.len()
    }

    /// Far endpoint of the initial spoke.
    pub fn omega0(&self) -> &ElliId {
        &self.spokes[0].1
    }

    /// The initial spoke (the arc alive in slice 0).
    pub fn b0(&self) -> &LeafId {
        &self.spokes[0].0
    }
}

/// Extract the wheel at `v`, rotating the movie so the negative event is the
/// final one.
pub fn wheel_at(movie: &Movie, v: &ElliId) -> Result<Wheel, MovieError> {
    movie.require_valid()?;
    let sign = movie
        .frame
        .elliptics
        .get(v)
        .ok_or_else(|| MovieError::Slice(crate::error::SliceError::UnknownElliptic(v.clone())))?
        .sign;
    if sign != Sign::Neg {
        return Err(MovieError::PreconditionFailed(format!(
            "{v} is not a negative elliptic point"
        )));
    }
    let events = movie.events_at(v);
    let negatives: Vec<usize> = events
        .iter()
        .filter(|(_, s)| *s == Sign::Neg)
        .map(|(i, _)| *i)
        .collect();
    if negatives.len() != 1 {
        return Err(MovieError::PreconditionFailed(format!(
            "{v} meets {} negative hyperbolic points, need exactly one",
            negatives.len()
        )));
    }
    let k = movie.k();
    let movie = movie.rotate_to((negatives[0] + 1) % k)?;

    let events = movie.events_at(v);
    let positive_events: Vec<usize> = events
        .iter()
        .filter(|(_, s)| *s == Sign::Pos)
        .map(|(i, _)| *i)
        .collect();
    if positive_events.is_empty() {
        return Err(MovieError::PreconditionFailed(format!(
            "{v} meets no positive hyperbolic point"
        )));
    }
    if events.len() != positive_events.len() + 1 || events.last().map(|(i, _)| *i) != Some(k - 1) {
        return Err(MovieError::PreconditionFailed(
            "unexpected event pattern at the wheel center".into(),
        ));
    }

    // spoke per window
    let mut spokes = Vec::new();
    let mut window_starts = vec![0usize];
    window_starts.extend(positive_events.iter().map(|i| i + 1));
    for s in window_starts {
        let (lid, shape) = movie.slices[s].leaf_at_elliptic(v).ok_or_else(|| {
            MovieError::PreconditionFailed(format!("{v} carries no leaf in slice {s}"))
        })?;
        let far = match shape {
            LeafShape::Arc(EndPt::E(a), EndPt::E(b)) => {
                if a == v {
                    b.clone()
                } else {
                    a.clone()
                }
            }
            _ => {
                return Err(MovieError::PreconditionFailed(format!(
                    "{v} carries a non-b-arc leaf in slice {s}"
                )))
            }
        };
        spokes.push((lid.clone(), far));
    }

    Ok(Wheel {
        movie,
        center: v.clone(),
        positive_events,
        spokes,
    })
}

/// Check that no spoke endpoint lies on the binding arc of the initial
/// spoke's pocket. On planar pages this holds whenever the interior spokes
/// are non-separating; a failure signals corrupted input.
pub fn spokes_avoid_pocket(movie: &Movie, v: &ElliId) -> Result<bool, MovieError> {
    let wheel = wheel_at(movie, v)?;
    let class = barc_classify(&wheel.movie.frame, &wheel.movie.slices[0], wheel.b0())
        .map_err(MovieError::Slice)?;
    let Some(pocket) = class.pocket() else {
        // no pocket: the initial spoke is strongly essential, nothing to hit
        return Ok(true);
    };
    for (_, omega) in &wheel.spokes[1..] {
        if pocket.interior_elliptics.contains(omega) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Repeatedly remove separating interior spokes at `v` by a foliation change
/// followed by a destabilization, until every spoke strictly between the
/// first and last positive event is non-separating.
pub fn remove_separating_spokes(
    movie: &Movie,
    v: &ElliId,
) -> Result<(Movie, Vec<MoveRecord>), MovieError> {
    let mut current = movie.clone();
    let mut records = Vec::new();
    let cap = wheel_at(&current, v)?.m() + 1;
    for _ in 0..cap {
        let wheel = wheel_at(&current, v)?;
        let m = wheel.m();
        // interior windows are 1..m-1 (between consecutive positive events)
        let mut target: Option<usize> = None;
        for t in 1..m {
            let (lid, _) = &wheel.spokes[t];
            let slice_idx = wheel.positive_events[t - 1] + 1;
            let class = barc_classify(&wheel.movie.frame, &wheel.movie.slices[slice_idx], lid)
                .map_err(MovieError::Slice)?;
            if class.separating {
                target = Some(t);
                break;
            }
        }
        let Some(t) = target else {
            return Ok((wheel.movie, records));
        };
        let (changed, rec1, new_ids) = barc_foliation_change(
            &wheel.movie,
            wheel.positive_events[t - 1],
            wheel.positive_events[t],
        )?;
        records.push(rec1);
        // one of the two replacement tiles is an aa-tile in destabilizable
        // position; remove it
        let rd = region_decomposition(&changed)?;
        let aa_idx = (0..2)
            .find(|&i| {
                changed
                    .events
                    .get(i)
                    .map(|e| new_ids.contains(&e.id))
                    .unwrap_or(false)
                    && rd.regions[i].kind == RegionType::Aa
            })
            .ok_or_else(|| {
                MovieError::PreconditionFailed(
                    "foliation change did not produce an aa-tile".into(),
                )
            })?;
        let (destabbed, rec2) = destabilize(&changed, aa_idx)?;
        records.push(rec2);
        current = destabbed;
    }
    Err(MovieError::PreconditionFailed(format!(
        "separating spokes at {v} did not clear within the iteration cap"
    )))
}
