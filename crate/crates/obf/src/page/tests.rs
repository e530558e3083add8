use super::diagram::*;
use super::*;
use crate::error::SliceError;
use crate::ids::{LeafId, Sign};
use std::collections::BTreeMap;

fn slice_of(orders: &[(&str, &[&str])], leaves: &[(&str, LeafShape)]) -> Slice {
    Slice {
        orders: orders
            .iter()
            .map(|(c, es)| {
                (
                    crate::ids::CircleId::new(*c),
                    es.iter().map(|e| crate::ids::ElliId::new(*e)).collect(),
                )
            })
            .collect(),
        leaves: leaves
            .iter()
            .map(|(id, s)| (LeafId::new(*id), s.clone()))
            .collect(),
        anchors: BTreeMap::new(),
        outers: BTreeMap::new(),
    }
}

#[test]
fn empty_disc_page_has_one_face() {
    let frame = Frame::new(Page::new(["C1"]));
    let slice = slice_of(&[("C1", &[])], &[]);
    let fm = trace_faces(&frame, &slice).unwrap();
    assert_eq!(fm.chi, 1);
    assert_eq!(fm.faces.len(), 1);
    let face = fm.faces.values().next().unwrap();
    assert_eq!(face.walks.len(), 1);
}

#[test]
fn empty_annulus_page() {
    let frame = Frame::new(Page::new(["C1", "C2"]));
    let mut slice = slice_of(&[("C1", &[]), ("C2", &[])], &[]);
    // C2 floats in the page face of C1
    slice.anchors.insert(
        IslandKey::Circle("C2".into()),
        Dart::seg("C1", None, Side::L),
    );
    let fm = trace_faces(&frame, &slice).unwrap();
    assert_eq!(fm.chi, 0);
    assert_eq!(fm.faces.len(), 1);
    assert_eq!(fm.faces.values().next().unwrap().walks.len(), 2);
}

#[test]
fn missing_anchor_is_rejected() {
    let frame = Frame::new(Page::new(["C1", "C2"]));
    let slice = slice_of(&[("C1", &[]), ("C2", &[])], &[]);
    assert!(matches!(
        trace_faces(&frame, &slice),
        Err(SliceError::MissingAnchor(_))
    ));
}

#[test]
fn spanning_barc_cuts_annulus_into_a_disc() {
    let frame = Frame::new(Page::new(["C1", "C2"]))
        .with_elliptic("v", "C1", Sign::Pos)
        .with_elliptic("w", "C2", Sign::Neg);
    let slice = slice_of(&[("C1", &["v"]), ("C2", &["w"])], &[("b", LeafShape::arc("v", "w"))]);
    let fm = trace_faces(&frame, &slice).unwrap();
    assert_eq!(fm.chi, 0);
    assert_eq!(fm.faces.len(), 1);
    assert_eq!(fm.faces.values().next().unwrap().walks.len(), 1);
}

#[test]
fn interleaved_barcs_are_nonplanar() {
    // two b-arcs crossing in the cyclic order v1 v2 v3 v4 on one circle
    let frame = Frame::new(Page::new(["C1"]))
        .with_elliptic("v1", "C1", Sign::Pos)
        .with_elliptic("v2", "C1", Sign::Pos)
        .with_elliptic("v3", "C1", Sign::Neg)
        .with_elliptic("v4", "C1", Sign::Neg);
    let crossing = slice_of(
        &[("C1", &["v1", "v2", "v3", "v4"])],
        &[
            ("b1", LeafShape::arc("v1", "v3")),
            ("b2", LeafShape::arc("v2", "v4")),
        ],
    );
    match trace_faces(&frame, &crossing) {
        Err(SliceError::NonPlanar { .. }) => {}
        other => panic!("expected NonPlanar, got {other:?}"),
    }
    // nested order is fine: v1 v2 v4 v3 pairs (v1,v3) outside (v2,v4)
    let nested = slice_of(
        &[("C1", &["v1", "v2", "v4", "v3"])],
        &[
            ("b1", LeafShape::arc("v1", "v3")),
            ("b2", LeafShape::arc("v2", "v4")),
        ],
    );
    let fm = trace_faces(&frame, &nested).unwrap();
    assert_eq!(fm.chi, 1);
    assert_eq!(fm.faces.len(), 3);
}

#[test]
fn face_trace_is_stable_under_relabeling() {
    let frame = Frame::new(Page::new(["C1"]))
        .with_elliptic("v1", "C1", Sign::Pos)
        .with_elliptic("v2", "C1", Sign::Neg);
    let slice = slice_of(
        &[("C1", &["v1", "v2"])],
        &[
            ("b", LeafShape::arc("v1", "v2")),
        ],
    );
    // relabel the leaf and compare face counts and walk shapes
    let fm1 = trace_faces(&frame, &slice).unwrap();
    let mut slice2 = slice.clone();
    let shape = slice2.leaves.remove(&LeafId::new("b")).unwrap();
    slice2.leaves.insert(LeafId::new("edge"), shape);
    let fm2 = trace_faces(&frame, &slice2).unwrap();
    assert_eq!(fm1.faces.len(), fm2.faces.len());
    let mut w1: Vec<usize> = fm1.faces.values().map(|f| f.walks.len()).collect();
    let mut w2: Vec<usize> = fm2.faces.values().map(|f| f.walks.len()).collect();
    w1.sort();
    w2.sort();
    assert_eq!(w1, w2);
}

// -- b-arc classification ---------------------------------------------------

#[test]
fn spanning_barc_is_not_separating() {
    let frame = Frame::new(Page::new(["C1", "C2"]))
        .with_elliptic("v", "C1", Sign::Pos)
        .with_elliptic("w", "C2", Sign::Neg);
    let slice = slice_of(&[("C1", &["v"]), ("C2", &["w"])], &[("b", LeafShape::arc("v", "w"))]);
    let c = barc_classify(&frame, &slice, &LeafId::new("b")).unwrap();
    assert!(!c.separating);
    assert!(c.strongly_essential);
    assert!(c.essential);
}

/// Same-circle b-arc with a puncture in its pocket: boundary-parallel in the
/// page but not in the punctured page.
#[test]
fn pocketed_puncture_makes_barc_essential_but_not_strongly() {
    let frame = Frame::new(Page::new(["C1", "C2"]))
        .with_elliptic("v", "C1", Sign::Pos)
        .with_elliptic("w", "C1", Sign::Neg)
        .with_elliptic("x", "C1", Sign::Pos)
        .with_puncture("p");
    // order around C1: v, x, w -- so x sits on the binding arc between v and w
    let mut slice = slice_of(
        &[("C1", &["v", "x", "w"]), ("C2", &[])],
        &[
            ("b", LeafShape::arc("v", "w")),
            ("a", LeafShape::arc("x", punct("p"))),
        ],
    );
    slice
        .anchors
        .insert(IslandKey::Circle("C2".into()), Dart::leaf("b", Side::L));
    // anchor C2 on whichever side of b is not the pocket
    if trace_faces(&frame, &slice).is_err()
        || barc_classify(&frame, &slice, &LeafId::new("b"))
            .map(|c| c.pocket().is_none())
            .unwrap_or(true)
    {
        slice
            .anchors
            .insert(IslandKey::Circle("C2".into()), Dart::leaf("b", Side::R));
    }
    trace_faces(&frame, &slice).expect("fixture should trace");
    let c = barc_classify(&frame, &slice, &LeafId::new("b")).unwrap();
    assert!(c.separating);
    assert!(!c.strongly_essential);
    assert!(c.essential);
    let pocket = c.pocket().unwrap();
    assert!(pocket.punctures.contains(&crate::ids::PunctureId::new("p")));
    assert!(pocket
        .interior_elliptics
        .contains(&crate::ids::ElliId::new("x")));
}

/// Same-circle b-arc with a bare pocket: not even essential.
#[test]
fn bare_pocket_barc_is_inessential() {
    let frame = Frame::new(Page::new(["C1", "C2"]))
        .with_elliptic("v", "C1", Sign::Pos)
        .with_elliptic("w", "C1", Sign::Neg);
    let mut slice = slice_of(
        &[("C1", &["v", "w"]), ("C2", &[])],
        &[("b", LeafShape::arc("v", "w"))],
    );
    slice.anchors.insert(
        IslandKey::Circle("C2".into()),
        Dart::leaf("b", Side::L),
    );
    if trace_faces(&frame, &slice).is_err() {
        slice.anchors.insert(
            IslandKey::Circle("C2".into()),
            Dart::leaf("b", Side::R),
        );
    }
    let c = barc_classify(&frame, &slice, &LeafId::new("b")).unwrap();
    assert!(c.separating);
    assert!(!c.essential);
    assert!(!c.strongly_essential);
    assert!(c.pocket().unwrap().is_bare());
}

// -- saddle resolution --------------------------------------------------------

#[test]
fn aa_saddle_swaps_pairings() {
    let frame = Frame::new(Page::new(["C1"]))
        .with_elliptic("e1", "C1", Sign::Pos)
        .with_elliptic("e2", "C1", Sign::Pos)
        .with_puncture("p1")
        .with_puncture("p2");
    let slice = slice_of(
        &[("C1", &["e1", "e2"])],
        &[
            ("a1", LeafShape::arc("e1", punct("p1"))),
            ("a2", LeafShape::arc("e2", punct("p2"))),
        ],
    );
    let arc = attach_for_sign(&frame, &slice, &LeafId::new("a1"), &LeafId::new("a2"), Sign::Pos)
        .unwrap();
    let res = saddle_resolve(
        &frame,
        &slice,
        &arc,
        Sign::Pos,
        &[LeafId::new("a3"), LeafId::new("a4")],
    )
    .unwrap();
    let a3 = res.slice.leaf(&LeafId::new("a3")).unwrap();
    let a4 = res.slice.leaf(&LeafId::new("a4")).unwrap();
    assert_eq!(
        a3,
        &LeafShape::Arc(EndPt::E("e1".into()), EndPt::P("p2".into()))
    );
    assert_eq!(
        a4,
        &LeafShape::Arc(EndPt::E("e2".into()), EndPt::P("p1".into()))
    );
}

#[test]
fn ab_saddle_exchanges_elliptic_endpoints() {
    let frame = Frame::new(Page::new(["C1", "C2"]))
        .with_elliptic("v", "C1", Sign::Neg)
        .with_elliptic("u1", "C2", Sign::Pos)
        .with_elliptic("u2", "C2", Sign::Pos)
        .with_puncture("p");
    let slice = slice_of(
        &[("C1", &["v"]), ("C2", &["u1", "u2"])],
        &[
            ("b", LeafShape::arc("u1", "v")),
            ("a", LeafShape::arc("u2", punct("p"))),
        ],
    );
    let arc =
        attach_for_sign(&frame, &slice, &LeafId::new("b"), &LeafId::new("a"), Sign::Pos).unwrap();
    let res = saddle_resolve(
        &frame,
        &slice,
        &arc,
        Sign::Pos,
        &[LeafId::new("b2"), LeafId::new("a2")],
    )
    .unwrap();
    // the b-arc keeps v but moves to u2; the a-arc moves to u1
    assert_eq!(
        res.slice.leaf(&LeafId::new("b2")).unwrap(),
        &LeafShape::Arc(EndPt::E("u1".into()), EndPt::P("p".into()))
    );
    assert_eq!(
        res.slice.leaf(&LeafId::new("a2")).unwrap(),
        &LeafShape::Arc(EndPt::E("u2".into()), EndPt::E("v".into()))
    );
}

#[test]
fn barc_self_saddle_emits_a_circle() {
    let frame = Frame::new(Page::new(["C1", "C2"]))
        .with_elliptic("v", "C1", Sign::Pos)
        .with_elliptic("w", "C2", Sign::Neg);
    let slice = slice_of(&[("C1", &["v"]), ("C2", &["w"])], &[("b", LeafShape::arc("v", "w"))]);
    let arc =
        attach_for_sign(&frame, &slice, &LeafId::new("b"), &LeafId::new("b"), Sign::Pos).unwrap();
    let res = saddle_resolve(
        &frame,
        &slice,
        &arc,
        Sign::Pos,
        &[LeafId::new("b2"), LeafId::new("c1")],
    )
    .unwrap();
    assert_eq!(
        res.slice.leaf(&LeafId::new("b2")).unwrap(),
        &LeafShape::Arc(EndPt::E("v".into()), EndPt::E("w".into()))
    );
    assert!(matches!(
        res.slice.leaf(&LeafId::new("c1")).unwrap(),
        LeafShape::Circle { .. }
    ));
    // the result is planar and the new circle is an anchored island
    trace_faces(&frame, &res.slice).unwrap();
}

#[test]
fn mixed_side_self_saddle_is_forbidden() {
    let frame = Frame::new(Page::new(["C1", "C2"]))
        .with_elliptic("v", "C1", Sign::Pos)
        .with_elliptic("w", "C2", Sign::Neg);
    let slice = slice_of(&[("C1", &["v"]), ("C2", &["w"])], &[("b", LeafShape::arc("v", "w"))]);
    let arc = DescribingArc::new(Attach::new("b", Side::L), Attach::new("b", Side::R));
    match saddle_resolve(
        &frame,
        &slice,
        &arc,
        Sign::Pos,
        &[LeafId::new("x"), LeafId::new("y")],
    ) {
        Err(SliceError::ForbiddenSelfSaddle) => {}
        other => panic!("expected ForbiddenSelfSaddle, got {other:?}"),
    }
}

#[test]
fn mixed_sign_elliptics_cannot_aa_saddle() {
    let frame = Frame::new(Page::new(["C1"]))
        .with_elliptic("e1", "C1", Sign::Pos)
        .with_elliptic("e2", "C1", Sign::Neg)
        .with_puncture("p1")
        .with_puncture("p2");
    let slice = slice_of(
        &[("C1", &["e1", "e2"])],
        &[
            ("a1", LeafShape::arc("e1", punct("p1"))),
            ("a2", LeafShape::arc(punct("p2"), "e2")),
        ],
    );
    for sign in [Sign::Pos, Sign::Neg] {
        if let Ok(arc) =
            attach_for_sign(&frame, &slice, &LeafId::new("a1"), &LeafId::new("a2"), sign)
        {
            match saddle_resolve(
                &frame,
                &slice,
                &arc,
                sign,
                &[LeafId::new("x"), LeafId::new("y")],
            ) {
                Err(SliceError::IllegalResolution(_)) => {}
                other => panic!("expected IllegalResolution, got {other:?}"),
            }
        }
    }
}
