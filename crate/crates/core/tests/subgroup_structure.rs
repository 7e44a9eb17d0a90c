//! Structural facts about the construction that the refutation leans on:
//! which elements land in which subgroup, orbit shapes, the regular
//! subgroup census, and the witness arc sets.

use std::collections::BTreeSet;

use dci8_core::abstract_group::to_abstract;
use dci8_core::construction::{build, ConstructionParams};
use dci8_core::dci::{
    babai_refutation, cayley_arcs, connection_set, cross_validate_certificate,
    find_regular_subgroups, verify_certificate, ConnectionSets, PipelineConfig, RegularEmbedding,
    WitnessKind,
};
use dci8_core::group::PermGroup;
use dci8_core::orbital::{arcs_of_colors, digraph_automorphisms, orbital_coloring, ArcSet};
use dci8_core::perm::Permutation;

fn params(k: usize, r: usize) -> ConstructionParams {
    ConstructionParams::new(k, r).unwrap()
}

#[test]
fn tau2_fifth_power_avoids_the_first_regular_group() {
    let b = build(params(3, 1));
    assert!(b.r1.contains(&b.tau1).unwrap());
    assert!(!b.r1.contains(&b.tau2.power(5)).unwrap());
    assert!(b.h_group.contains(&b.tau2.compose(&b.h).unwrap()).unwrap());
}

#[test]
fn order_eight_elements_of_r2_avoid_r1_entirely() {
    for (k, r) in [(1, 1), (3, 1), (1, 3)] {
        let b = build(params(k, r));
        let eights = b.r2.elements_of_order(8, 1000).unwrap();
        assert!(!eights.is_empty());
        for p in &eights {
            assert!(
                !b.r1.contains(p).unwrap(),
                "(k={}, r={}): an order-8 element of R2 lies in R1",
                k,
                r
            );
        }
    }
}

#[test]
fn h_group_has_no_element_of_order_16() {
    let b = build(params(3, 1));
    assert!(b.h_group.elements_of_order(16, 100).unwrap().is_empty());
}

#[test]
fn orbit_shapes() {
    let b = build(params(3, 1));
    assert_eq!(b.r1.orbits(), vec![(0..24).collect::<Vec<_>>()]);

    let rho_only = PermGroup::new(24, vec![b.rho1.clone()]).unwrap();
    let orbits = rho_only.orbits();
    assert_eq!(orbits.len(), 8);
    assert!(orbits.iter().all(|o| o.len() == 3));
}

#[test]
fn regularity_boundaries() {
    let b = build(params(3, 1));
    assert!(b.r1.is_regular());
    assert!(b.r2.is_regular());
    assert!(!b.h_group.is_regular(), "order 16 on 24 points");
    assert!(!b.g.is_regular(), "order 48 on 24 points");
}

#[test]
fn regular_subgroup_census_at_degree_24() {
    let b = build(params(3, 1));
    let subs = find_regular_subgroups(&b.g, 100_000).unwrap();
    assert!(subs.iter().any(|s| s.is_same_group(&b.r1).unwrap()));
    assert!(subs.iter().any(|s| s.is_same_group(&b.r2).unwrap()));
    for s in &subs {
        assert!(s.is_regular());
        assert!(s.is_subgroup_of(&b.g).unwrap());
    }
    // the census is stable; freeze it so changes surface loudly
    assert_eq!(subs.len(), 2);
}

#[test]
fn connection_sets_of_simple_arc_sets() {
    let tau = Permutation::from_cycles(&[vec![0, 1, 2, 3, 4, 5, 6, 7]], 8).unwrap();
    let c8 = PermGroup::new(8, vec![tau]).unwrap();
    let (table, elems) = to_abstract(&c8, 100).unwrap();
    let emb = RegularEmbedding::of(&c8, 0, &elems).unwrap();

    let empty = ArcSet::new(8);
    assert!(connection_set(&emb, &empty).is_empty());

    let cycle = ArcSet::from_arcs(8, (0..8).map(|u| (u, (u + 1) % 8))).unwrap();
    let s = connection_set(&emb, &cycle);
    assert_eq!(s, BTreeSet::from([1]));
    // and the Cayley arcs of that set reproduce the cycle
    assert_eq!(cayley_arcs(&table, &s).unwrap(), cycle);
}

#[test]
fn witness_union_has_exactly_the_ambient_symmetry() {
    let cert = babai_refutation(params(3, 1), &PipelineConfig::default()).unwrap();
    assert_eq!(cert.witness.kind, WitnessKind::Digraph);

    let b = build(params(3, 1));
    let coloring = orbital_coloring(&b.g);
    let colors: Vec<u16> = cert.witness.colors.iter().map(|&c| c as u16).collect();
    let arcs = arcs_of_colors(&coloring, &colors).unwrap();
    let aut = digraph_automorphisms(&arcs, 10_000_000).unwrap();
    assert_eq!(aut.order(), 48);
    assert!(aut.is_same_group(&b.g).unwrap());
}

#[test]
fn colored_fallback_certificates_verify() {
    // force the fallback by giving the subset search no budget
    let cfg = PipelineConfig {
        witness_cap: 0,
        ..PipelineConfig::default()
    };
    let cert = babai_refutation(params(1, 1), &cfg).unwrap();
    assert_eq!(cert.witness.kind, WitnessKind::Colored);
    let (ConnectionSets::PerColor(s), ConnectionSets::PerColor(t)) =
        (&cert.witness.s, &cert.witness.t)
    else {
        panic!("colored witness must carry per-color families");
    };
    assert_eq!(s.len(), t.len());
    assert_eq!(s.len(), cert.witness.colors.len());
    for (sc, tc) in s.iter().zip(t) {
        assert_eq!(sc.len(), tc.len());
    }
    let report = verify_certificate(&cert);
    assert!(report.passed, "reasons: {:?}", report.reasons);
}

#[test]
fn corrupted_witness_fails_cross_validation() {
    let cfg = PipelineConfig::default();
    let mut cert = babai_refutation(params(1, 1), &cfg).unwrap();
    if let ConnectionSets::Single(s) = &mut cert.witness.s {
        // replace the set with one from a different isomorphism class
        *s = vec![1];
    }
    let cv = cross_validate_certificate(&cert, &cfg).unwrap();
    assert!(!cv.matched);
}
