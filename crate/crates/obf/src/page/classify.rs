//! Homotopical classification of b-arcs.
//!
//! A b-arc is separating when cutting the page along it (ignoring all other
//! leaves) disconnects the page; on a planar page this happens exactly when
//! both endpoints lie on one binding circle. It is strongly essential when
//! neither side of the cut is a disc, i.e. both sides contain another binding
//! circle, and essential when no side is a disc free of punctures.

use super::diagram::*;
use super::trace::{trace_faces, FaceId, FaceMap};
use crate::error::SliceError;
use crate::ids::{CircleId, ElliId, LeafId, PunctureId};
use std::collections::{BTreeMap, BTreeSet};

/// Contents of one side of a separating b-arc.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BArcSide {
    /// Binding circles other than the one the arc ends on.
    pub circles: BTreeSet<CircleId>,
    pub punctures: BTreeSet<PunctureId>,
    /// Elliptic points interior to the binding arc on this side (the arc's
    /// own endpoints excluded).
    pub interior_elliptics: BTreeSet<ElliId>,
    /// Other leaves lying on this side.
    pub leaves: BTreeSet<LeafId>,
    /// Binding segments of the cut circle on this side.
    pub segments: BTreeSet<Option<ElliId>>,
}

impl BArcSide {
    /// A disc side: witnesses boundary-parallelism of the arc in the page.
    pub fn is_pocket(&self) -> bool {
        self.circles.is_empty()
    }

    /// A disc side with no punctures: witnesses parallelism in the punctured
    /// page, i.e. the arc is not even essential.
    pub fn is_empty_pocket_of_punctures(&self) -> bool {
        self.circles.is_empty() && self.punctures.is_empty()
    }

    /// True when nothing of the surface lies on this side.
    pub fn is_bare(&self) -> bool {
        self.circles.is_empty()
            && self.punctures.is_empty()
            && self.interior_elliptics.is_empty()
            && self.leaves.is_empty()
    }
}

/// Result of classifying one b-arc.
#[derive(Clone, Debug)]
pub struct BArcClass {
    pub separating: bool,
    pub essential: bool,
    pub strongly_essential: bool,
    /// Present when the arc separates: the contents of the two sides,
    /// `sides[0]` being the side on the left of the oriented arc.
    pub sides: Option<[BArcSide; 2]>,
}

impl BArcClass {
    /// The disc side cobounded by a boundary-parallel arc, when unique. If
    /// both sides are discs (an arc on a one-circle page), the left side is
    /// returned.
    pub fn pocket(&self) -> Option<&BArcSide> {
        let sides = self.sides.as_ref()?;
        sides.iter().find(|s| s.is_pocket())
    }
}

/// Classify the b-arc `barc` in the slice.
pub fn barc_classify(
    frame: &Frame,
    slice: &Slice,
    barc: &LeafId,
) -> Result<BArcClass, SliceError> {
    let fm = trace_faces(frame, slice)?;
    barc_classify_traced(frame, slice, &fm, barc)
}

/// Same as [`barc_classify`] but reuses an existing face trace.
pub fn barc_classify_traced(
    frame: &Frame,
    slice: &Slice,
    fm: &FaceMap,
    barc: &LeafId,
) -> Result<BArcClass, SliceError> {
    let shape = slice.leaf(barc)?;
    let (v, w) = match shape {
        LeafShape::Arc(EndPt::E(a), EndPt::E(b)) => (a.clone(), b.clone()),
        _ => return Err(SliceError::NotABArc(barc.clone())),
    };
    let cut_circle = frame.circle_of(&v)?.clone();

    // group faces by reachability without crossing the cut arc
    let faces: Vec<&FaceId> = fm.faces.keys().collect();
    let fidx: BTreeMap<&FaceId, usize> = faces.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mut uf: Vec<usize> = (0..faces.len()).collect();
    fn find(uf: &mut Vec<usize>, x: usize) -> usize {
        if uf[x] != x {
            let r = find(uf, uf[x]);
            uf[x] = r;
        }
        uf[x]
    }
    for (lid, lshape) in &slice.leaves {
        if lid == barc {
            continue;
        }
        if matches!(lshape, LeafShape::Circle { .. } | LeafShape::Arc(..)) {
            let a = fm.face_of(&Dart::Leaf {
                leaf: lid.clone(),
                side: Side::L,
            });
            let b = fm.face_of(&Dart::Leaf {
                leaf: lid.clone(),
                side: Side::R,
            });
            if let (Some(fa), Some(fb)) = (a, b) {
                let (ia, ib) = (fidx[fa], fidx[fb]);
                let (ra, rb) = (find(&mut uf, ia), find(&mut uf, ib));
                if ra != rb {
                    uf[ra] = rb;
                }
            }
        }
    }

    let left = fm
        .face_of(&Dart::Leaf {
            leaf: barc.clone(),
            side: Side::L,
        })
        .ok_or_else(|| SliceError::DanglingReference(format!("{barc} left face")))?;
    let right = fm
        .face_of(&Dart::Leaf {
            leaf: barc.clone(),
            side: Side::R,
        })
        .ok_or_else(|| SliceError::DanglingReference(format!("{barc} right face")))?;
    let lroot = find(&mut uf, fidx[left]);
    let rroot = find(&mut uf, fidx[right]);
    let separating = lroot != rroot;

    if !separating {
        return Ok(BArcClass {
            separating: false,
            essential: true,
            strongly_essential: true,
            sides: None,
        });
    }

    let mut sides = [BArcSide::default(), BArcSide::default()];
    let side_of = |uf: &mut Vec<usize>, f: &FaceId| -> Option<usize> {
        let r = find(uf, fidx[f]);
        if r == lroot {
            Some(0)
        } else if r == rroot {
            Some(1)
        } else {
            None
        }
    };

    // circles and segments
    for c in &frame.page.circles {
        let order = slice.orders.get(c).cloned().unwrap_or_default();
        let afters: Vec<Option<ElliId>> = if order.is_empty() {
            vec![None]
        } else {
            order.iter().cloned().map(Some).collect()
        };
        for after in afters {
            let d = Dart::Seg {
                circle: c.clone(),
                after: after.clone(),
                side: Side::L,
            };
            if let Some(f) = fm.face_of(&d) {
                if let Some(s) = side_of(&mut uf, f) {
                    if *c == cut_circle {
                        sides[s].segments.insert(after.clone());
                    } else {
                        sides[s].circles.insert(c.clone());
                    }
                }
            }
        }
    }

    // interior elliptic points on the cut circle
    let order = slice.orders.get(&cut_circle).cloned().unwrap_or_default();
    let k = order.len();
    for s in 0..2 {
        let mut ells = BTreeSet::new();
        for after in &sides[s].segments {
            if let Some(start) = after {
                let i = order.iter().position(|x| x == start).unwrap();
                for e in [&order[i], &order[(i + 1) % k]] {
                    if *e != v && *e != w {
                        ells.insert(e.clone());
                    }
                }
            }
        }
        sides[s].interior_elliptics = ells;
    }

    // punctures and other leaves
    for (lid, lshape) in &slice.leaves {
        if lid == barc {
            continue;
        }
        let d = Dart::Leaf {
            leaf: lid.clone(),
            side: Side::L,
        };
        if let Some(f) = fm.face_of(&d) {
            if let Some(s) = side_of(&mut uf, f) {
                sides[s].leaves.insert(lid.clone());
                if let LeafShape::Arc(a, b) = lshape {
                    for end in [a, b] {
                        if let EndPt::P(p) = end {
                            sides[s].punctures.insert(p.clone());
                        }
                    }
                }
            }
        }
    }

    let strongly_essential = !sides[0].is_pocket() && !sides[1].is_pocket();
    let essential = !sides[0].is_empty_pocket_of_punctures()
        && !sides[1].is_empty_pocket_of_punctures();

    Ok(BArcClass {
        separating,
        essential,
        strongly_essential,
        sides: Some(sides),
    })
}
