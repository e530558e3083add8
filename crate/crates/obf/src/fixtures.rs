//! Ready-made movies used by tests, examples and documentation.

use crate::ids::{LeafId, Sign};
use crate::movie::{Gluing, HyperbolicEvent, Movie};
use crate::page::{attach_for_sign, punct, Frame, LeafShape, Page, Slice};
use std::collections::BTreeMap;

fn ev(id: &str, sign: Sign, arc: crate::page::DescribingArc, outputs: &[&str]) -> HyperbolicEvent {
    HyperbolicEvent {
        id: crate::ids::EventId::new(id),
        sign,
        arc,
        outputs: outputs.iter().map(|o| LeafId::new(*o)).collect(),
    }
}

/// The disc bounded by the standard transverse unknot: one positive elliptic
/// point, one strand, no events. Self-linking number -1.
pub fn trivial_disc() -> Movie {
    let frame = Frame::new(Page::new(["C1"]))
        .with_elliptic("e", "C1", Sign::Pos)
        .with_puncture("p");
    let mut slice = Slice::default();
    slice.orders.insert("C1".into(), vec!["e".into()]);
    slice
        .leaves
        .insert(LeafId::new("a"), LeafShape::arc("e", punct("p")));
    Movie::from_initial(frame, slice, Vec::new(), Gluing::default()).expect("trivial disc")
}

/// A two-sphere embedded in the disc open book: two positive and two negative
/// elliptic points, one positive and one negative hyperbolic point. Euler
/// characteristic 2, no boundary.
pub fn sphere() -> Movie {
    let frame = Frame::new(Page::new(["C1"]))
        .with_elliptic("v1", "C1", Sign::Pos)
        .with_elliptic("w1", "C1", Sign::Neg)
        .with_elliptic("v2", "C1", Sign::Pos)
        .with_elliptic("w2", "C1", Sign::Neg);
    let mut slice = Slice::default();
    slice.orders.insert(
        "C1".into(),
        vec!["v1".into(), "w1".into(), "v2".into(), "w2".into()],
    );
    slice
        .leaves
        .insert(LeafId::new("b1"), LeafShape::arc("v1", "w1"));
    slice
        .leaves
        .insert(LeafId::new("b2"), LeafShape::arc("v2", "w2"));

    let a1 = attach_for_sign(
        &frame,
        &slice,
        &LeafId::new("b1"),
        &LeafId::new("b2"),
        Sign::Pos,
    )
    .expect("positive attachment");
    let e1 = ev("h+", Sign::Pos, a1, &["b3", "b4"]);

    // resolve once to find the attachment data of the second event
    let mid = crate::page::saddle_resolve(&frame, &slice, &e1.arc, Sign::Pos, &e1.outputs)
        .expect("first saddle")
        .slice;
    let a2 = attach_for_sign(
        &frame,
        &mid,
        &LeafId::new("b3"),
        &LeafId::new("b4"),
        Sign::Neg,
    )
    .expect("negative attachment");
    let e2 = ev("h-", Sign::Neg, a2, &["b5", "b6"]);

    let mut leaves = BTreeMap::new();
    leaves.insert(LeafId::new("b5"), LeafId::new("b1"));
    leaves.insert(LeafId::new("b6"), LeafId::new("b2"));
    Movie::from_initial(
        frame,
        slice,
        vec![e1, e2],
        Gluing {
            leaves,
            strands: BTreeMap::new(),
        },
    )
    .expect("sphere movie")
}

/// The minimal transverse overtwisted disc, presented over the annulus page:
/// one negative and two positive elliptic points, two positive hyperbolic
/// points, one strand. Self-linking number +1.
pub fn overtwisted_disc() -> Movie {
    let frame = Frame::new(Page::new(["C1", "C2"]))
        .with_elliptic("v", "C1", Sign::Neg)
        .with_elliptic("u1", "C2", Sign::Pos)
        .with_elliptic("u2", "C2", Sign::Pos)
        .with_puncture("p");
    let mut slice = Slice::default();
    slice.orders.insert("C1".into(), vec!["v".into()]);
    slice
        .orders
        .insert("C2".into(), vec!["u1".into(), "u2".into()]);
    slice
        .leaves
        .insert(LeafId::new("b0"), LeafShape::arc("u1", "v"));
    slice
        .leaves
        .insert(LeafId::new("a0"), LeafShape::arc("u2", punct("p")));

    let a1 = attach_for_sign(
        &frame,
        &slice,
        &LeafId::new("b0"),
        &LeafId::new("a0"),
        Sign::Pos,
    )
    .expect("attachment g1");
    let e1 = ev("g1", Sign::Pos, a1, &["a1", "b1"]);
    let mid = crate::page::saddle_resolve(&frame, &slice, &e1.arc, Sign::Pos, &e1.outputs)
        .expect("first saddle")
        .slice;
    let a2 = attach_for_sign(
        &frame,
        &mid,
        &LeafId::new("b1"),
        &LeafId::new("a1"),
        Sign::Pos,
    )
    .expect("attachment g2");
    let e2 = ev("g2", Sign::Pos, a2, &["a2", "b2"]);

    let mut leaves = BTreeMap::new();
    leaves.insert(LeafId::new("a2"), LeafId::new("a0"));
    leaves.insert(LeafId::new("b2"), LeafId::new("b0"));
    Movie::from_initial(
        frame,
        slice,
        vec![e1, e2],
        Gluing {
            leaves,
            strands: BTreeMap::new(),
        },
    )
    .expect("overtwisted disc movie")
}

/// Pocket contents of a [`wheel_fixture`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PocketShape {
    /// `n` a-arcs, each ending on its own strand inside the pocket. The
    /// strands are threaded through the rest of the braid, so the surface is
    /// a disc and the foliation is essential.
    AFeet(usize),
    /// One b-arc between an opposite-sign pair of feet, bridged into the rest
    /// of the surface by a saddle pair. The pocket holds no strand, so the
    /// arc is inessential; the surface is still a disc.
    BPair,
}

/// A disc movie with a valence-one negative vertex `v` whose initial spoke
/// `b0` is boundary-parallel and encloses the requested pocket. The wheel has
/// `m` positive events; the resulting complexity candidate set is `{v}` for
/// a-feet pockets and `{v, x2}` for the b-pair pocket.
///
/// Layout: `v`, the pocket feet, `O0` and `Y` sit on the outer circle; each
/// spoke endpoint `O1..Om` has its own circle; the second negative vertex `z`
/// sits on a final circle.
pub fn wheel_fixture(m: usize, pocket: PocketShape) -> Movie {
    // the pocket must sit on the side of the spoke away from the describing
    // arcs; try both chiralities of the outer circle
    build_wheel_fixture(m, pocket, false)
        .or_else(|_| build_wheel_fixture(m, pocket, true))
        .expect("wheel fixture embeds in one chirality")
}

fn build_wheel_fixture(
    m: usize,
    pocket: PocketShape,
    flip: bool,
) -> Result<Movie, String> {
    assert!(m >= 1, "the wheel needs at least one positive event");
    use crate::ids::ElliId;
    use crate::page::{Dart, IslandKey, Side};

    let mut circles: Vec<String> = vec!["C1".into()];
    for i in 1..=m {
        circles.push(format!("CO{i}"));
    }
    circles.push("CZ".into());
    let mut frame = Frame::new(Page::new(circles.clone()));
    frame = frame
        .with_elliptic("v", "C1", Sign::Neg)
        .with_elliptic("O0", "C1", Sign::Pos)
        .with_elliptic("Y", "C1", Sign::Pos)
        .with_elliptic("z", "CZ", Sign::Neg);
    for i in 1..=m {
        frame = frame.with_elliptic(&format!("O{i}"), &format!("CO{i}"), Sign::Pos);
        frame = frame.with_puncture(&format!("p{i}"));
    }

    let mut slice = Slice::default();
    let mut c1_order: Vec<ElliId> = vec!["v".into()];
    let feet: Vec<String>;
    match pocket {
        PocketShape::AFeet(n) => {
            assert!(n >= 1);
            feet = (1..=n).map(|j| format!("x{j}")).collect();
            for (j, x) in feet.iter().enumerate() {
                frame = frame.with_elliptic(x, "C1", Sign::Pos);
                frame = frame.with_puncture(&format!("q{}", j + 1));
            }
        }
        PocketShape::BPair => {
            feet = vec!["x1".into(), "x2".into()];
            frame = frame.with_elliptic("x1", "C1", Sign::Pos);
            frame = frame.with_elliptic("x2", "C1", Sign::Neg);
        }
    }
    // pocket arc runs O0 -> x1 .. xn -> v; the chirality decides on which
    // side of the spoke it comes to lie
    if flip {
        c1_order.push("Y".into());
        c1_order.push("O0".into());
        for x in feet.iter() {
            c1_order.push(ElliId::new(x.clone()));
        }
    } else {
        for x in feet.iter().rev() {
            c1_order.push(ElliId::new(x.clone()));
        }
        c1_order.push("O0".into());
        c1_order.push("Y".into());
    }
    slice.orders.insert("C1".into(), c1_order);
    for i in 1..=m {
        slice
            .orders
            .insert(format!("CO{i}").into(), vec![ElliId::new(format!("O{i}"))]);
    }
    slice.orders.insert("CZ".into(), vec!["z".into()]);

    slice
        .leaves
        .insert(LeafId::new("b0"), LeafShape::arc("O0", "v"));
    slice
        .leaves
        .insert(LeafId::new("bz"), LeafShape::arc("Y", "z"));
    for i in 1..=m {
        slice.leaves.insert(
            LeafId::new(format!("a{i}")),
            LeafShape::arc(
                crate::page::EndPt2::from(format!("O{i}").as_str()),
                punct(&format!("p{i}")),
            ),
        );
    }
    match pocket {
        PocketShape::AFeet(n) => {
            for j in 1..=n {
                slice.leaves.insert(
                    LeafId::new(format!("ax{j}")),
                    LeafShape::arc(
                        crate::page::EndPt2::from(format!("x{j}").as_str()),
                        punct(&format!("q{j}")),
                    ),
                );
            }
        }
        PocketShape::BPair => {
            slice
                .leaves
                .insert(LeafId::new("bx"), LeafShape::arc("x1", "x2"));
        }
    }
    // the spoke circles float on the non-pocket side of the outer circle
    let free_seg = if flip { "Y" } else { "O0" };
    for i in 1..=m {
        slice.anchors.insert(
            IslandKey::Circle(format!("CO{i}").into()),
            Dart::seg("C1", Some(free_seg), Side::L),
        );
    }

    // assemble events, resolving as we go so attachments can be derived
    let mut movie_events: Vec<HyperbolicEvent> = Vec::new();
    let mut cur = slice.clone();
    let mut glue: BTreeMap<LeafId, LeafId> = BTreeMap::new();
    let push = |cur: &mut Slice,
                movie_events: &mut Vec<HyperbolicEvent>,
                id: &str,
                sign: Sign,
                l1: &str,
                l2: &str,
                outs: &[&str]|
     -> Result<(), String> {
        let arc = attach_for_sign(&frame, cur, &LeafId::new(l1), &LeafId::new(l2), sign)
            .map_err(|e| format!("fixture event {id}: {e}"))?;
        let e = ev(id, sign, arc, outs);
        let res = crate::page::saddle_resolve(&frame, cur, &e.arc, sign, &e.outputs)
            .map_err(|e2| format!("fixture event {id}: {e2}"))?;
        *cur = res.slice;
        movie_events.push(e);
        Ok(())
    };
    // the cross rule decides which output name lands at which endpoint;
    // normalize so `name` is the leaf ending at `witness`
    let fix_at = |cur: &mut Slice, movie_events: &mut Vec<HyperbolicEvent>, name: &str, witness: &str| {
        let at = cur
            .leaf_at_elliptic(&ElliId::new(witness))
            .map(|(l, _)| l.clone());
        let want = LeafId::new(name);
        if at.as_ref() != Some(&want) {
            let e = movie_events.last_mut().unwrap();
            let other = e
                .outputs
                .iter()
                .find(|o| **o != want)
                .cloned()
                .expect("two outputs");
            e.outputs.swap(0, 1);
            let a = cur.leaves.remove(&want).unwrap();
            let b = cur.leaves.remove(&other).unwrap();
            cur.leaves.insert(want, b);
            cur.leaves.insert(other, a);
        }
    };

    // the wheel's positive fan
    for i in 1..=m {
        let spoke_in = if i == 1 { "b0".to_string() } else { format!("s{}", i - 1) };
        push(
            &mut cur,
            &mut movie_events,
            &format!("h{i}"),
            Sign::Pos,
            &spoke_in,
            &format!("a{i}"),
            &[&format!("m{i}"), &format!("s{i}")],
        )?;
        fix_at(&mut cur, &mut movie_events, &format!("s{i}"), "v");
    }

    match pocket {
        PocketShape::AFeet(n) => {
            // thread the pocket strands through the first dangling arc
            let mut carrier = "m1".to_string();
            for j in 1..=n {
                push(
                    &mut cur,
                    &mut movie_events,
                    &format!("hc{j}"),
                    Sign::Pos,
                    &format!("ax{j}"),
                    &carrier,
                    &[&format!("cx{j}"), &format!("cc{j}")],
                )?;
                fix_at(&mut cur, &mut movie_events, &format!("cx{j}"), &format!("x{j}"));
                carrier = format!("cc{j}");
            }
            push(
                &mut cur,
                &mut movie_events,
                "hy",
                Sign::Pos,
                "bz",
                &carrier,
                &["ay", "bzz"],
            )?;
            fix_at(&mut cur, &mut movie_events, "ay", "Y");
        }
        PocketShape::BPair => {
            // bridge the pocket arc into the braid and back
            push(
                &mut cur,
                &mut movie_events,
                "hb",
                Sign::Pos,
                "bx",
                "bz",
                &["e1", "e2"],
            )?;
            fix_at(&mut cur, &mut movie_events, "e1", "x1");
            push(
                &mut cur,
                &mut movie_events,
                "hb2",
                Sign::Neg,
                "e1",
                "e2",
                &["bx2", "bz1"],
            )?;
            fix_at(&mut cur, &mut movie_events, "bx2", "x1");
            push(
                &mut cur,
                &mut movie_events,
                "hy",
                Sign::Pos,
                "bz1",
                "m1",
                &["ay", "bzz"],
            )?;
            fix_at(&mut cur, &mut movie_events, "ay", "Y");
        }
    }

    // the negative event and the closing saddle
    push(
        &mut cur,
        &mut movie_events,
        "hneg",
        Sign::Neg,
        &format!("s{m}"),
        "bzz",
        &["b0f", "bz3"],
    )?;
    fix_at(&mut cur, &mut movie_events, "b0f", "v");
    push(
        &mut cur,
        &mut movie_events,
        "hw",
        Sign::Pos,
        "bz3",
        "ay",
        &["aw", "bzf"],
    )?;
    fix_at(&mut cur, &mut movie_events, "bzf", "Y");

    // gluing by matching shapes at the final slice
    let first = slice.clone();
    for (l, shape) in &cur.leaves {
        if first.leaves.get(l) == Some(shape) {
            continue;
        }
        // find the slice-0 leaf with the same endpoints up to strands
        let target = first
            .leaves
            .iter()
            .find(|(_, s0)| match (shape, s0) {
                (LeafShape::Arc(a, b), LeafShape::Arc(c, d)) => {
                    let es = |e: &crate::page::EndPt| matches!(e, crate::page::EndPt::E(_));
                    let elliptics_match = {
                        let mut s1: Vec<_> = [a, b].iter().filter(|e| es(e)).cloned().collect();
                        let mut s2: Vec<_> = [c, d].iter().filter(|e| es(e)).cloned().collect();
                        s1.sort();
                        s2.sort();
                        s1 == s2
                    };
                    let arity = [a, b].iter().filter(|e| !es(e)).count()
                        == [c, d].iter().filter(|e| !es(e)).count();
                    elliptics_match && arity
                }
                _ => false,
            })
            .map(|(id, _)| id.clone())
            .ok_or_else(|| format!("no glue target for {l} ({shape:?})"))?;
        glue.insert(l.clone(), target);
    }
    // strand permutation forced by the leaf matching
    let mut strands: BTreeMap<crate::ids::PunctureId, crate::ids::PunctureId> = BTreeMap::new();
    for (from, to) in &glue {
        if let (Some(LeafShape::Arc(a, b)), Some(LeafShape::Arc(c, d))) =
            (cur.leaves.get(from), first.leaves.get(to))
        {
            let p1 = [a, b].iter().find_map(|e| match e {
                crate::page::EndPt::P(p) => Some(p.clone()),
                _ => None,
            });
            let p2 = [c, d].iter().find_map(|e| match e {
                crate::page::EndPt::P(p) => Some(p.clone()),
                _ => None,
            });
            if let (Some(p1), Some(p2)) = (p1, p2) {
                if p1 != p2 {
                    strands.insert(p1, p2);
                }
            }
        }
    }

    let movie = Movie::from_initial(frame, slice, movie_events, Gluing { leaves: glue, strands })
        .map_err(|e| format!("wheel fixture: {e}"))?;
    movie
        .require_valid()
        .map_err(|e| format!("wheel fixture: {e}"))?;
    Ok(movie)
}

/// A single slice reproducing the nested-pocket picture used to test nesting
/// levels: the b-arc `b` at `w` encloses three branch vertices, one of which
/// carries an arc that itself encloses another, giving `b` nesting level two.
/// Arcs at the non-branch pair `d1, d2` nest further material but must not
/// contribute. Returns the diagram, the branch vertex set, and the arc `b`.
pub fn nested_arcs_slice() -> (
    crate::page::SliceDiagram,
    std::collections::BTreeSet<crate::ids::ElliId>,
    LeafId,
) {
    use crate::ids::ElliId;
    use crate::page::{Dart, IslandKey, Side, SliceDiagram};
    let frame = Frame::new(Page::new(["C1", "C2"]))
        .with_elliptic("w", "C1", Sign::Neg)
        .with_elliptic("z", "C1", Sign::Pos)
        .with_elliptic("u1", "C1", Sign::Neg)
        .with_elliptic("y1", "C1", Sign::Pos)
        .with_elliptic("u2", "C1", Sign::Neg)
        .with_elliptic("y2", "C1", Sign::Pos)
        .with_elliptic("u3", "C1", Sign::Neg)
        .with_elliptic("y3", "C1", Sign::Pos)
        .with_elliptic("d1", "C1", Sign::Pos)
        .with_elliptic("d2", "C1", Sign::Neg)
        .with_elliptic("g1", "C1", Sign::Pos)
        .with_elliptic("g2", "C1", Sign::Neg);
    let mut slice = Slice::default();
    slice.orders.insert(
        "C1".into(),
        ["w", "u3", "y3", "u1", "u2", "y2", "y1", "d1", "g1", "g2", "d2", "z"]
            .iter()
            .map(|e| ElliId::new(*e))
            .collect(),
    );
    slice.orders.insert("C2".into(), vec![]);
    for (id, a, b) in [
        ("b", "z", "w"),
        ("b3", "y3", "u3"),
        ("b1", "y1", "u1"),
        ("b2", "y2", "u2"),
        ("d", "d1", "d2"),
        ("g", "g1", "g2"),
    ] {
        slice.leaves.insert(LeafId::new(id), LeafShape::arc(a, b));
    }
    let branch: std::collections::BTreeSet<ElliId> = ["w", "u1", "u2", "u3"]
        .iter()
        .map(|e| ElliId::new(*e))
        .collect();
    // anchor the empty circle on whichever side of `b` is away from the
    // nested pocket, so the pocket side is unambiguous
    for side in [Side::L, Side::R] {
        let mut s = slice.clone();
        s.anchors
            .insert(IslandKey::Circle("C2".into()), Dart::leaf("b", side));
        if crate::page::trace_faces(&frame, &s).is_ok() {
            if let Ok(c) = crate::page::barc_classify(&frame, &s, &LeafId::new("b")) {
                if c.pocket()
                    .map(|p| p.interior_elliptics.contains(&ElliId::new("u1")))
                    .unwrap_or(false)
                {
                    return (SliceDiagram::new(frame, s), branch, LeafId::new("b"));
                }
            }
        }
    }
    panic!("nested-arcs fixture failed to embed");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_disc_validates() {
        let m = trivial_disc();
        let rep = m.validate();
        assert!(rep.ok(), "{:?}", rep.first_failure());
        assert_eq!(m.counts(), (1, 0, 0, 0));
    }

    #[test]
    fn sphere_validates() {
        let m = sphere();
        let rep = m.validate();
        assert!(rep.ok(), "{:?}", rep.first_failure());
        assert_eq!(m.counts(), (2, 2, 1, 1));
    }

    #[test]
    fn overtwisted_disc_validates() {
        let m = overtwisted_disc();
        let rep = m.validate();
        assert!(rep.ok(), "{:?}", rep.first_failure());
        assert_eq!(m.counts(), (2, 1, 2, 0));
    }

    #[test]
    fn corrupted_event_order_fails_validation() {
        let mut m = sphere();
        m.events.swap(0, 1);
        assert!(!m.validate().ok());
    }

    #[test]
    fn rotation_preserves_validity() {
        for m in [sphere(), overtwisted_disc()] {
            for start in 0..m.k() {
                let r = m.rotate_to(start).unwrap();
                let rep = r.validate();
                assert!(rep.ok(), "rotate {start}: {:?}", rep.first_failure());
                assert_eq!(r.counts(), m.counts());
            }
        }
    }

    #[test]
    fn wheel_fixtures_validate_and_are_discs() {
        for m in 1..=3 {
            for pocket in [PocketShape::AFeet(1), PocketShape::AFeet(2), PocketShape::BPair] {
                let w = wheel_fixture(m, pocket);
                let rep = w.validate();
                assert!(rep.ok(), "m={m} {pocket:?}: {:?}", rep.first_failure());
                let surf = crate::euler::euler_characteristic(&w).unwrap();
                assert!(surf.is_disc, "m={m} {pocket:?}: {surf:?}");
                assert_eq!(crate::analysis::self_linking(&w).unwrap(), 1);
                // v is a valence-one candidate
                let (_, g) = crate::analysis::negative_graph(&w).unwrap();
                assert!(g.is_tree(), "m={m} {pocket:?}");
                assert!(!g.has_fake_vertices());
                let cands = crate::analysis::deformation_candidates(&w, &g).unwrap();
                assert!(
                    cands.contains(&crate::ids::ElliId::new("v")),
                    "m={m} {pocket:?}: candidates {cands:?}"
                );
                // a-feet pockets give essential foliations
                if matches!(pocket, PocketShape::AFeet(_)) {
                    assert!(crate::analysis::foliation_essential(&w).unwrap());
                }
            }
        }
    }

    #[test]
    fn nested_arcs_levels() {
        use crate::analysis::arc_nesting_level;
        use std::collections::BTreeSet;
        let (diag, branch, b) = nested_arcs_slice();
        let fm = crate::page::trace_faces(&diag.frame, &diag.slice).unwrap();
        let level = |leaf: &str| {
            let mut visited = BTreeSet::new();
            arc_nesting_level(
                &diag.frame,
                &diag.slice,
                0,
                &fm,
                &branch,
                &LeafId::new(leaf),
                &mut visited,
            )
            .unwrap()
        };
        assert_eq!(level("b2"), 0);
        assert_eq!(level("b3"), 0);
        assert_eq!(level("b1"), 1);
        assert_eq!(level(b.as_str()), 2);
        // the non-branch pair and its nested arc do not contribute
        assert_eq!(level("d"), 0);
    }

    #[test]
    fn relabeled_movie_still_validates() {
        let m = overtwisted_disc();
        let map: BTreeMap<LeafId, LeafId> = m
            .slices
            .iter()
            .flat_map(|s| s.leaves.keys())
            .map(|l| (l.clone(), LeafId::new(format!("x_{l}"))))
            .collect();
        let r = m.relabel_leaves(&map);
        let rep = r.validate();
        assert!(rep.ok(), "{:?}", rep.first_failure());
    }
}
