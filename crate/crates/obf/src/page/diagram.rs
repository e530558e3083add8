//! Combinatorial slice diagrams.
//!
//! A slice records the intersection of the surface with one regular page of a
//! planar open book. Arcs are stored as isotopy classes: each binding circle
//! carries a cyclic order of its elliptic points, leaves are named arcs or
//! circles, and floating pieces (binding circles not connected through
//! b-arcs, closed leaves) are positioned by anchors into faces. Realizability
//! is decided by face tracing, not geometry.
//!
//! Orientation conventions, fixed once for the whole crate:
//! * the page lies on the left of a binding circle traversed in its positive
//!   direction (the direction its cyclic order lists elliptic points);
//! * every leaf is oriented out of positive elliptic points and into negative
//!   ones, so a b-arc always runs from its positive end to its negative end;
//! * the in-page shadow of the positive surface normal points to the right of
//!   an oriented leaf. A hyperbolic point is positive exactly when its
//!   describing arc attaches on the left side of both leaves it joins.

use crate::error::SliceError;
use crate::ids::{CircleId, ElliId, LeafId, PunctureId, Sign};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// The planar page: an ordered list of binding circles. The first circle is
/// drawn outermost; its hole is the unbounded region of the plane. Genus is
/// zero by construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub circles: Vec<CircleId>,
}

impl Page {
    pub fn new<I: IntoIterator<Item = C>, C: Into<String>>(circles: I) -> Self {
        Page {
            circles: circles.into_iter().map(|c| CircleId::new(c)).collect(),
        }
    }

    pub fn r(&self) -> usize {
        self.circles.len()
    }

    pub fn root(&self) -> &CircleId {
        &self.circles[0]
    }

    pub fn contains(&self, c: &CircleId) -> bool {
        self.circles.contains(c)
    }
}

/// An elliptic point (one transverse binding intersection), fixed for the
/// whole movie.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elliptic {
    pub circle: CircleId,
    pub sign: Sign,
}

/// Endpoint of an arc leaf.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EndPt {
    E(ElliId),
    P(PunctureId),
}

impl fmt::Debug for EndPt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndPt::E(e) => write!(f, "{e}"),
            EndPt::P(p) => write!(f, "{p}*"),
        }
    }
}

/// Shape of one leaf inside a slice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeafShape {
    /// An a-arc or b-arc; the endpoint pair is unordered, orientation is
    /// derived from elliptic signs.
    Arc(EndPt, EndPt),
    /// A closed leaf. `ccw: true` means the traversal direction has the
    /// enclosed disc on its left.
    Circle { ccw: bool },
}

impl LeafShape {
    pub fn arc(a: impl Into<EndPt2>, b: impl Into<EndPt2>) -> LeafShape {
        LeafShape::Arc(a.into().0, b.into().0)
    }
}

/// Small conversion helper so fixtures can write `LeafShape::arc("v", punct("p"))`.
pub struct EndPt2(pub EndPt);
impl From<&str> for EndPt2 {
    fn from(s: &str) -> Self {
        EndPt2(EndPt::E(ElliId::new(s)))
    }
}
impl From<EndPt> for EndPt2 {
    fn from(e: EndPt) -> Self {
        EndPt2(e)
    }
}

/// Endpoint constructor for punctures.
pub fn punct(p: &str) -> EndPt {
    EndPt::P(PunctureId::new(p))
}

/// Classification of a leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LeafKind {
    /// binding-to-braid arc
    A,
    /// binding-to-binding arc
    B,
    /// closed leaf
    C,
}

/// Which side of an oriented edge a dart names: `L` is the left side when the
/// edge is traversed in its positive direction.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

impl fmt::Debug for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::L => "L",
            Side::R => "R",
        })
    }
}

/// A side of one edge of the diagram. Darts name faces: every face of the
/// traced diagram is the face lying on the named side of the edge.
///
/// For a binding segment, `after` is the elliptic point the segment starts at
/// (`None` on a circle without elliptic points, which consists of a single
/// closed segment). Side `L` of a segment is the page side.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dart {
    Leaf {
        leaf: LeafId,
        side: Side,
    },
    Seg {
        circle: CircleId,
        after: Option<ElliId>,
        side: Side,
    },
}

impl Dart {
    pub fn leaf(id: &str, side: Side) -> Dart {
        Dart::Leaf {
            leaf: LeafId::new(id),
            side,
        }
    }
    pub fn seg(circle: &str, after: Option<&str>, side: Side) -> Dart {
        Dart::Seg {
            circle: CircleId::new(circle),
            after: after.map(ElliId::new),
            side,
        }
    }
}

impl fmt::Debug for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dart::Leaf { leaf, side } => write!(f, "{leaf}/{side:?}"),
            Dart::Seg {
                circle,
                after: Some(e),
                side,
            } => write!(f, "{circle}@{e}/{side:?}"),
            Dart::Seg {
                circle,
                after: None,
                side,
            } => write!(f, "{circle}@/{side:?}"),
        }
    }
}

/// A connected component of the diagram: either a group of binding circles
/// joined through arc leaves (keyed by its smallest circle) or a single
/// closed leaf.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IslandKey {
    Circle(CircleId),
    CCircle(LeafId),
}

impl fmt::Debug for IslandKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IslandKey::Circle(c) => write!(f, "isl:{c}"),
            IslandKey::CCircle(l) => write!(f, "isl:{l}"),
        }
    }
}

/// Movie-wide point data: the page, the elliptic table and the puncture set.
/// Slices of one movie all share a frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub page: Page,
    pub elliptics: BTreeMap<ElliId, Elliptic>,
    pub punctures: BTreeSet<PunctureId>,
}

impl Frame {
    pub fn new(page: Page) -> Frame {
        Frame {
            page,
            elliptics: BTreeMap::new(),
            punctures: BTreeSet::new(),
        }
    }

    pub fn with_elliptic(mut self, id: &str, circle: &str, sign: Sign) -> Self {
        self.elliptics.insert(
            ElliId::new(id),
            Elliptic {
                circle: CircleId::new(circle),
                sign,
            },
        );
        self
    }

    pub fn with_puncture(mut self, id: &str) -> Self {
        self.punctures.insert(PunctureId::new(id));
        self
    }

    pub fn sign_of(&self, e: &ElliId) -> Result<Sign, SliceError> {
        self.elliptics
            .get(e)
            .map(|el| el.sign)
            .ok_or_else(|| SliceError::UnknownElliptic(e.clone()))
    }

    pub fn circle_of(&self, e: &ElliId) -> Result<&CircleId, SliceError> {
        self.elliptics
            .get(e)
            .map(|el| &el.circle)
            .ok_or_else(|| SliceError::UnknownElliptic(e.clone()))
    }

    /// Count of elliptic points by sign.
    pub fn elliptic_counts(&self) -> (usize, usize) {
        let pos = self
            .elliptics
            .values()
            .filter(|e| e.sign == Sign::Pos)
            .count();
        (pos, self.elliptics.len() - pos)
    }
}

/// One slice: the leaves of the surface in a single regular page, together
/// with the embedding data (cyclic orders and island anchors).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Slice {
    /// Cyclic order of elliptic points around each binding circle, listed in
    /// the circle's positive direction.
    pub orders: BTreeMap<CircleId, Vec<ElliId>>,
    pub leaves: BTreeMap<LeafId, LeafShape>,
    /// For every island other than the one containing the first page circle:
    /// a dart of another island naming the face the island floats in.
    pub anchors: BTreeMap<IslandKey, Dart>,
    /// Explicit outward-facing walks, only needed when an island has more
    /// than one page walk.
    pub outers: BTreeMap<IslandKey, Dart>,
}

impl Slice {
    pub fn leaf(&self, id: &LeafId) -> Result<&LeafShape, SliceError> {
        self.leaves
            .get(id)
            .ok_or_else(|| SliceError::UnknownLeaf(id.clone()))
    }

    /// The unique leaf ending at elliptic point `e`, when the slice is
    /// well-formed.
    pub fn leaf_at_elliptic(&self, e: &ElliId) -> Option<(&LeafId, &LeafShape)> {
        self.leaves.iter().find(|(_, shape)| match shape {
            LeafShape::Arc(a, b) => {
                a == &EndPt::E(e.clone()) || b == &EndPt::E(e.clone())
            }
            LeafShape::Circle { .. } => false,
        })
    }

    pub fn leaf_at_puncture(&self, p: &PunctureId) -> Option<(&LeafId, &LeafShape)> {
        self.leaves.iter().find(|(_, shape)| match shape {
            LeafShape::Arc(a, b) => {
                a == &EndPt::P(p.clone()) || b == &EndPt::P(p.clone())
            }
            LeafShape::Circle { .. } => false,
        })
    }

    pub fn kind_of(&self, id: &LeafId) -> Result<LeafKind, SliceError> {
        Ok(leaf_kind(self.leaf(id)?))
    }
}

/// Classify a leaf from its endpoint structure.
pub fn leaf_kind(shape: &LeafShape) -> LeafKind {
    match shape {
        LeafShape::Circle { .. } => LeafKind::C,
        LeafShape::Arc(EndPt::E(_), EndPt::E(_)) => LeafKind::B,
        LeafShape::Arc(_, _) => LeafKind::A,
    }
}

/// Derived orientation of an arc leaf: out of positive elliptic points, into
/// negative ones. Returns `(tail, head)`.
pub fn oriented_ends(frame: &Frame, shape: &LeafShape) -> Result<(EndPt, EndPt), SliceError> {
    match shape {
        LeafShape::Circle { .. } => Err(SliceError::InvalidArc(
            "closed leaves have no endpoints".into(),
        )),
        LeafShape::Arc(a, b) => match (a, b) {
            (EndPt::E(e1), EndPt::E(e2)) => {
                let (s1, s2) = (frame.sign_of(e1)?, frame.sign_of(e2)?);
                match (s1, s2) {
                    (Sign::Pos, Sign::Neg) => Ok((a.clone(), b.clone())),
                    (Sign::Neg, Sign::Pos) => Ok((b.clone(), a.clone())),
                    _ => Err(SliceError::BArcSigns(LeafId::new("?"))),
                }
            }
            (EndPt::E(e), EndPt::P(_)) => match frame.sign_of(e)? {
                Sign::Pos => Ok((a.clone(), b.clone())),
                Sign::Neg => Ok((b.clone(), a.clone())),
            },
            (EndPt::P(_), EndPt::E(e)) => match frame.sign_of(e)? {
                Sign::Pos => Ok((b.clone(), a.clone())),
                Sign::Neg => Ok((a.clone(), b.clone())),
            },
            (EndPt::P(_), EndPt::P(_)) => Err(SliceError::IllegalResolution(
                "arc joining two punctures is not a leaf type".into(),
            )),
        },
    }
}

/// A self-contained single-page diagram, used for slice-level workflows and
/// tests that do not need a whole movie.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceDiagram {
    pub frame: Frame,
    pub slice: Slice,
}

impl SliceDiagram {
    pub fn new(frame: Frame, slice: Slice) -> Self {
        SliceDiagram { frame, slice }
    }
}

/// Structural well-formedness: every id resolves, every elliptic point and
/// puncture carries exactly one leaf end, and b-arcs join opposite signs.
pub fn check_wellformed(frame: &Frame, slice: &Slice) -> Result<(), SliceError> {
    for c in slice.orders.keys() {
        if !frame.page.contains(c) {
            return Err(SliceError::UnknownCircle(c.clone()));
        }
    }
    let mut elli_degree: BTreeMap<&ElliId, usize> = BTreeMap::new();
    let mut punct_degree: BTreeMap<&PunctureId, usize> = BTreeMap::new();
    for (id, shape) in &slice.leaves {
        match shape {
            LeafShape::Circle { .. } => {}
            LeafShape::Arc(a, b) => {
                for end in [a, b] {
                    match end {
                        EndPt::E(e) => {
                            frame.sign_of(e)?;
                            *elli_degree.entry(e).or_default() += 1;
                        }
                        EndPt::P(p) => {
                            if !frame.punctures.contains(p) {
                                return Err(SliceError::DanglingReference(p.to_string()));
                            }
                            *punct_degree.entry(p).or_default() += 1;
                        }
                    }
                }
                if let (EndPt::E(e1), EndPt::E(e2)) = (a, b) {
                    if e1 == e2 || frame.sign_of(e1)? == frame.sign_of(e2)? {
                        return Err(SliceError::BArcSigns(id.clone()));
                    }
                }
                if let (EndPt::P(_), EndPt::P(_)) = (a, b) {
                    return Err(SliceError::IllegalResolution(format!(
                        "leaf {id} joins two punctures"
                    )));
                }
            }
        }
    }
    for (e, _) in frame.elliptics.iter() {
        let d = elli_degree.get(e).copied().unwrap_or(0);
        if d != 1 {
            return Err(SliceError::Radiality {
                elliptic: e.clone(),
                found: d,
            });
        }
        // every elliptic must appear in its circle's cyclic order
        let circ = frame.circle_of(e)?;
        let order = slice
            .orders
            .get(circ)
            .ok_or_else(|| SliceError::UnknownCircle(circ.clone()))?;
        if !order.contains(e) {
            return Err(SliceError::DanglingReference(format!(
                "elliptic {e} missing from the cyclic order of {circ}"
            )));
        }
    }
    for p in frame.punctures.iter() {
        let d = punct_degree.get(p).copied().unwrap_or(0);
        if d != 1 {
            return Err(SliceError::PunctureDegree(p.clone(), d));
        }
    }
    for (c, order) in &slice.orders {
        for e in order {
            let circ = frame.circle_of(e)?;
            if circ != c {
                return Err(SliceError::DanglingReference(format!(
                    "elliptic {e} listed on circle {c} but lies on {circ}"
                )));
            }
        }
        let set: BTreeSet<_> = order.iter().collect();
        if set.len() != order.len() {
            return Err(SliceError::DanglingReference(format!(
                "duplicate elliptic in cyclic order of {c}"
            )));
        }
    }
    // orders must cover all page circles
    for c in &frame.page.circles {
        if !slice.orders.contains_key(c) {
            return Err(SliceError::UnknownCircle(c.clone()));
        }
    }
    Ok(())
}
