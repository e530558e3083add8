use super::*;
use crate::analysis::{
    deformation_candidates, disc_complexity, low_valence_strongly_essential, negative_graph,
    self_linking,
};
use crate::euler::euler_characteristic;
use crate::fixtures::{wheel_fixture, PocketShape};
use crate::ids::ElliId;

#[test]
fn evacuate_keeps_the_surface_a_disc_and_empties_the_pocket() {
    for m in 1..=3 {
        for pocket in [PocketShape::AFeet(1), PocketShape::AFeet(2), PocketShape::BPair] {
            let w = wheel_fixture(m, pocket);
            let v = ElliId::new("v");
            let (cleared, _) = evacuate_pocket(&w, &v)
                .unwrap_or_else(|e| panic!("m={m} {pocket:?}: {e}"));
            let rep = cleared.validate();
            assert!(rep.ok(), "m={m} {pocket:?}: {:?}", rep.first_failure());
            let surf = euler_characteristic(&cleared).unwrap();
            assert!(surf.is_disc, "m={m} {pocket:?}: {surf:?}");
            assert_eq!(self_linking(&cleared).unwrap(), 1, "m={m} {pocket:?}");
            // the initial spoke of the wheel is now inessential
            let wheel = super::wheel::wheel_at(&cleared, &v).unwrap();
            let class = crate::page::barc_classify(
                &wheel.movie.frame,
                &wheel.movie.slices[0],
                wheel.b0(),
            )
            .unwrap();
            assert!(
                class
                    .sides
                    .as_ref()
                    .map(|s| s.iter().any(|x| x.is_pocket() && x.is_bare()))
                    .unwrap_or(false),
                "m={m} {pocket:?}: spoke pocket not bare: {class:?}"
            );
        }
    }
}

#[test]
fn evacuate_blowup_counts_match_the_local_replacement() {
    // a-arc pocket: each foot is replaced by m positive elliptic points and
    // m-1 positive hyperbolic points
    for m in 1..=3usize {
        for n in 1..=2usize {
            let w = wheel_fixture(m, PocketShape::AFeet(n));
            let v = ElliId::new("v");
            let (before_ep, before_en, before_hp, before_hn) = w.counts();
            let (cleared, _) = evacuate_pocket(&w, &v).unwrap();
            let (ep, en, hp, hn) = cleared.counts();
            assert_eq!(ep - before_ep, n * (m - 1), "m={m} n={n} elliptics");
            assert_eq!(en, before_en, "m={m} n={n}");
            assert_eq!(hp - before_hp, n * (m - 1), "m={m} n={n} hyperbolics");
            assert_eq!(hn, before_hn, "m={m} n={n}");
        }
    }
    // b-arc pocket pair: m positive and m negative elliptic points, m-1
    // positive and m-1 negative hyperbolic points, signs alternating
    for m in 1..=3usize {
        let w = wheel_fixture(m, PocketShape::BPair);
        let v = ElliId::new("v");
        let (before_ep, before_en, before_hp, before_hn) = w.counts();
        let (cleared, _) = evacuate_pocket(&w, &v).unwrap();
        let (ep, en, hp, hn) = cleared.counts();
        assert_eq!(ep - before_ep, m - 1, "m={m} positive elliptics");
        assert_eq!(en - before_en, m - 1, "m={m} negative elliptics");
        assert_eq!(hp - before_hp, m - 1, "m={m} positive hyperbolics");
        assert_eq!(hn - before_hn, m - 1, "m={m} negative hyperbolics");
    }
}

#[test]
fn deform_at_drops_the_vertex_and_preserves_the_invariants() {
    for m in 1..=3 {
        for pocket in [PocketShape::AFeet(1), PocketShape::AFeet(2), PocketShape::BPair] {
            let w = wheel_fixture(m, pocket);
            let v = ElliId::new("v");
            let (_, g_before) = negative_graph(&w).unwrap();
            let cands_before = deformation_candidates(&w, &g_before).unwrap();
            let c_before = disc_complexity(&w, &g_before).unwrap();
            let out = deform_at(&w, &v).unwrap_or_else(|e| panic!("m={m} {pocket:?}: {e}"));
            let d = &out.movie;
            assert!(d.validate().ok(), "m={m} {pocket:?}");
            assert!(!d.frame.elliptics.contains_key(&v), "v must vanish");
            assert_eq!(self_linking(d).unwrap(), 1, "m={m} {pocket:?}");
            let surf = euler_characteristic(d).unwrap();
            assert!(surf.is_disc, "m={m} {pocket:?}: {surf:?}");
            let (_, g_after) = negative_graph(d).unwrap();
            assert!(g_after.is_tree(), "m={m} {pocket:?}");
            assert!(!g_after.has_fake_vertices());
            // valence-one count never grows
            let lv = |g: &crate::analysis::SingularGraph| {
                g.vertices.iter().filter(|x| g.valence(x) <= 1).count()
            };
            assert!(
                lv(&g_after) <= lv(&g_before),
                "m={m} {pocket:?}: valence-one count grew"
            );
            // complexity strictly decreases when v is the minimizer
            let cands_after = deformation_candidates(d, &g_after).unwrap();
            let c_after = disc_complexity(d, &g_after).unwrap();
            if c_before.minimizer.as_ref() == Some(&v) {
                assert!(
                    c_after.complexity < c_before.complexity,
                    "m={m} {pocket:?}: {} !< {}",
                    c_after.complexity,
                    c_before.complexity
                );
            }
            let _ = (cands_before, cands_after);
        }
    }
}

#[test]
fn deformed_afeet_wheel_satisfies_the_terminal_condition() {
    for m in 1..=2 {
        let w = wheel_fixture(m, PocketShape::AFeet(1));
        let out = deform_at(&w, &ElliId::new("v")).unwrap();
        let (_, g) = negative_graph(&out.movie).unwrap();
        assert!(
            low_valence_strongly_essential(&out.movie, &g).unwrap(),
            "m={m}"
        );
    }
}
