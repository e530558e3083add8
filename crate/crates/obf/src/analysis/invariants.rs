//! Self-linking, strong essentiality, the low-valence condition, twist-
//! coefficient bounds and the tightness criterion.

use crate::error::MovieError;
use crate::ids::{CircleId, ElliId, Sign};
use crate::movie::Movie;
use crate::page::barc_classify;
use crate::regions::RegionDecomposition;
use num_rational::Rational64;
use serde::Serialize;

use super::graphs::{build_graph_from, Node, SingularGraph};

/// Self-linking number of the braided boundary with respect to the surface:
/// `-(e+ - e-) + (h+ - h-)`.
pub fn self_linking(movie: &Movie) -> Result<i64, MovieError> {
    movie.require_valid()?;
    if movie.frame.punctures.is_empty() {
        return Err(MovieError::ClosedSurface);
    }
    let (ep, en, hp, hn) = movie.counts();
    Ok(-(ep as i64 - en as i64) + (hp as i64 - hn as i64))
}

/// An elliptic point is strongly essential when every b-arc ending at it, in
/// every slice, is strongly essential. Slices where its leaf is an a-arc
/// contribute vacuously.
pub fn strongly_essential_elliptic(movie: &Movie, v: &ElliId) -> Result<bool, MovieError> {
    if !movie.frame.elliptics.contains_key(v) {
        return Err(MovieError::Slice(crate::error::SliceError::UnknownElliptic(
            v.clone(),
        )));
    }
    let bound = movie.k().max(1);
    for i in 0..bound {
        let slice = &movie.slices[i];
        if let Some((lid, shape)) = slice.leaf_at_elliptic(v) {
            if crate::page::leaf_kind(shape) == crate::page::LeafKind::B {
                let c = barc_classify(&movie.frame, slice, lid).map_err(MovieError::Slice)?;
                if !c.strongly_essential {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// All b-arcs of all slices essential?
pub fn foliation_essential(movie: &Movie) -> Result<bool, MovieError> {
    let bound = movie.k().max(1);
    for i in 0..bound {
        let slice = &movie.slices[i];
        for (lid, shape) in &slice.leaves {
            if crate::page::leaf_kind(shape) == crate::page::LeafKind::B {
                let c = barc_classify(&movie.frame, slice, lid).map_err(MovieError::Slice)?;
                if !c.essential {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The terminal condition of the reduction: every valence <= 1 elliptic
/// vertex of the negative graph is strongly essential. Fake vertices are not
/// elliptic points and are ignored here (a graph with fake vertices is
/// rejected earlier by the reduction's preconditions).
pub fn low_valence_strongly_essential(
    movie: &Movie,
    gmm: &SingularGraph,
) -> Result<bool, MovieError> {
    for v in &gmm.vertices {
        if gmm.valence(v) <= 1 && !strongly_essential_elliptic(movie, v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Twist-coefficient bounds read off at a strongly essential elliptic point
/// with no a-arcs: counts of positive and negative hyperbolic points joined
/// to it bound the coefficient of its binding circle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FdtcBounds {
    pub circle: CircleId,
    pub lower: i64,
    pub upper: i64,
}

pub fn fdtc_bounds(movie: &Movie, v: &ElliId) -> Result<FdtcBounds, MovieError> {
    movie.require_valid()?;
    let el = movie
        .frame
        .elliptics
        .get(v)
        .ok_or_else(|| MovieError::Slice(crate::error::SliceError::UnknownElliptic(v.clone())))?
        .clone();
    let bound = movie.k().max(1);
    for i in 0..bound {
        if let Some((_, shape)) = movie.slices[i].leaf_at_elliptic(v) {
            if crate::page::leaf_kind(shape) == crate::page::LeafKind::A {
                return Err(MovieError::PreconditionAArc(v.clone()));
            }
        }
    }
    if !strongly_essential_elliptic(movie, v)? {
        return Err(MovieError::NotStronglyEssential(v.clone()));
    }
    let events = movie.events_at(v);
    let p = events.iter().filter(|(_, s)| *s == Sign::Pos).count() as i64;
    let n = events.len() as i64 - p;
    let (lower, upper) = match el.sign {
        Sign::Pos => (-n, p),
        Sign::Neg => (-p, n),
    };
    Ok(FdtcBounds {
        circle: el.circle,
        lower,
        upper,
    })
}

/// Verdict of the tightness criterion on a vector of twist coefficients, one
/// per binding circle: the criterion holds when every value exceeds one.
#[derive(Clone, Debug, Serialize)]
pub struct TightnessVerdict {
    pub criterion_met: bool,
    /// Circles whose coefficient is <= 1.
    pub witnesses: Vec<CircleId>,
}

pub fn tightness_criterion(
    page: &crate::page::Page,
    fdtc: &[(CircleId, Rational64)],
) -> Result<TightnessVerdict, MovieError> {
    if fdtc.len() != page.r() {
        return Err(MovieError::ArityMismatch {
            got: fdtc.len(),
            expected: page.r(),
        });
    }
    let one = Rational64::from_integer(1);
    let witnesses: Vec<CircleId> = fdtc
        .iter()
        .filter(|(_, v)| *v <= one)
        .map(|(c, _)| c.clone())
        .collect();
    Ok(TightnessVerdict {
        criterion_met: witnesses.is_empty(),
        witnesses,
    })
}

/// The candidate set of the reduction: valence-one elliptic vertices of the
/// negative graph that are not strongly essential.
pub fn deformation_candidates(
    movie: &Movie,
    gmm: &SingularGraph,
) -> Result<Vec<ElliId>, MovieError> {
    let mut out = Vec::new();
    for v in &gmm.vertices {
        if gmm.valence(v) == 1 && !strongly_essential_elliptic(movie, v)? {
            out.push(v.clone());
        }
    }
    Ok(out)
}

/// Negative graph built together with its decomposition, a convenience used
/// across the analysis layer.
pub fn negative_graph(movie: &Movie) -> Result<(RegionDecomposition, SingularGraph), MovieError> {
    let rd = crate::regions::region_decomposition(movie)?;
    let g = build_graph_from(movie, &rd, Sign::Neg);
    Ok((rd, g))
}

/// Elliptic neighbours of a vertex in a singular graph.
pub fn neighbours(g: &SingularGraph, v: &ElliId) -> Vec<ElliId> {
    let mut out = Vec::new();
    for e in &g.edges {
        match (&e.ends[0], &e.ends[1]) {
            (Node::Elliptic(a), Node::Elliptic(b)) if a == v => out.push(b.clone()),
            (Node::Elliptic(a), Node::Elliptic(b)) if b == v => out.push(a.clone()),
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn self_linking_values() {
        assert_eq!(self_linking(&fixtures::overtwisted_disc()).unwrap(), 1);
        assert_eq!(self_linking(&fixtures::trivial_disc()).unwrap(), -1);
        assert!(matches!(
            self_linking(&fixtures::sphere()),
            Err(MovieError::ClosedSurface)
        ));
    }

    #[test]
    fn otd_vertex_is_strongly_essential() {
        let m = fixtures::overtwisted_disc();
        assert!(strongly_essential_elliptic(&m, &ElliId::new("v")).unwrap());
        // vacuous truth for a vertex carrying only a-arcs
        let t = fixtures::trivial_disc();
        assert!(strongly_essential_elliptic(&t, &ElliId::new("e")).unwrap());
    }

    #[test]
    fn otd_satisfies_low_valence_condition() {
        let m = fixtures::overtwisted_disc();
        let (_, g) = negative_graph(&m).unwrap();
        assert!(low_valence_strongly_essential(&m, &g).unwrap());
        assert!(deformation_candidates(&m, &g).unwrap().is_empty());
    }

    #[test]
    fn fdtc_bounds_on_the_otd_vertex() {
        let m = fixtures::overtwisted_disc();
        // v is negative, strongly essential, carries only b-arcs, and meets
        // two positive hyperbolic points: bounds [-2, 0] on its circle
        let b = fdtc_bounds(&m, &ElliId::new("v")).unwrap();
        assert_eq!(b.circle, CircleId::new("C1"));
        assert_eq!((b.lower, b.upper), (-2, 0));
        // a-arcs around u2 disqualify it
        assert!(matches!(
            fdtc_bounds(&m, &ElliId::new("u2")),
            Err(MovieError::PreconditionAArc(_))
        ));
    }

    #[test]
    fn tightness_on_the_published_vectors() {
        let page = crate::page::Page::new(["A", "B", "C", "D"]);
        let r = |n: i64, d: i64| Rational64::new(n, d);
        // (h, i, 1, 1) with h, i > 0: not met, two witnesses
        let v = tightness_criterion(
            &page,
            &[
                (CircleId::new("A"), r(2, 1)),
                (CircleId::new("B"), r(3, 1)),
                (CircleId::new("C"), r(1, 1)),
                (CircleId::new("D"), r(1, 1)),
            ],
        )
        .unwrap();
        assert!(!v.criterion_met);
        assert_eq!(v.witnesses, vec![CircleId::new("C"), CircleId::new("D")]);
        // (1, 2, 2, 3): not met, first circle at 1
        let v = tightness_criterion(
            &page,
            &[
                (CircleId::new("A"), r(1, 1)),
                (CircleId::new("B"), r(2, 1)),
                (CircleId::new("C"), r(2, 1)),
                (CircleId::new("D"), r(3, 1)),
            ],
        )
        .unwrap();
        assert!(!v.criterion_met);
        assert_eq!(v.witnesses, vec![CircleId::new("A")]);
        // all > 1: met
        let page2 = crate::page::Page::new(["A", "B"]);
        let v = tightness_criterion(
            &page2,
            &[(CircleId::new("A"), r(3, 2)), (CircleId::new("B"), r(2, 1))],
        )
        .unwrap();
        assert!(v.criterion_met);
        // arity mismatch
        assert!(matches!(
            tightness_criterion(&page2, &[(CircleId::new("A"), r(2, 1))]),
            Err(MovieError::ArityMismatch { .. })
        ));
    }
}
