//! Acceptance suite: each test runs one criterion end to end, asserts its
//! tolerances, and prints a single pass line.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dci8_core::abstract_group::{
    abstract_automorphisms, abstract_isomorphism, regular_representation, small_group_catalog,
    to_abstract, AbstractGroup,
};
use dci8_core::construction::{build, verify_bundle, ConstructionParams};
use dci8_core::dci::{
    babai_refutation, certificate_to_json, classify_conjugacy, cross_validate, dci_brute,
    find_regular_subgroups, verify_certificate, PipelineConfig,
};
use dci8_core::group::{are_conjugate_subgroups, exhaustive_closure, PermGroup};
use dci8_core::orbital::{brute_two_closure, two_closure};
use dci8_core::perm::Permutation;

const SMALL_PARAMS: [(usize, usize); 4] = [(1, 1), (3, 1), (5, 1), (1, 3)];

fn params(k: usize, r: usize) -> ConstructionParams {
    ConstructionParams::new(k, r).unwrap()
}

#[test]
fn criterion_1_construction_identities() {
    for (k, r) in SMALL_PARAMS {
        let start = Instant::now();
        let bundle = build(params(k, r));
        let report = verify_bundle(&bundle).unwrap_or_else(|e| {
            panic!("(k={}, r={}): {}", k, r, e);
        });
        assert!(report.all_passed());
        assert_eq!(bundle.h_group.order(), 16, "|H| must be exactly 16");
        assert_eq!(
            bundle.tau2.conjugate(&bundle.h).unwrap(),
            bundle.tau2.power(5),
            "conjugation by h must quint tau2 exactly"
        );
        let elapsed = start.elapsed();
        assert!(
            elapsed < Duration::from_secs(1),
            "(k={}, r={}) took {:?}",
            k,
            r,
            elapsed
        );
    }
    println!(
        "criterion 1 (construction identities): PASS — all six checks on {:?}",
        SMALL_PARAMS
    );
}

#[test]
fn criterion_2_nonconjugacy() {
    for (k, r) in SMALL_PARAMS {
        let start = Instant::now();
        let bundle = build(params(k, r));
        assert_eq!(bundle.g.order(), 16 * (k * r) as u128);
        let conjugator =
            are_conjugate_subgroups(&bundle.g, &bundle.r2, &bundle.r1, 100_000).unwrap();
        assert!(
            conjugator.is_none(),
            "(k={}, r={}): found unexpected conjugator",
            k,
            r
        );
        let elapsed = start.elapsed();
        assert!(
            elapsed < Duration::from_secs(5),
            "(k={}, r={}) took {:?}",
            k,
            r,
            elapsed
        );
    }
    println!(
        "criterion 2 (non-conjugacy): PASS — exhausted all 16kr elements for {:?}",
        SMALL_PARAMS
    );
}

#[test]
fn criterion_3_two_closedness() {
    // every in-budget degree, including the largest at 56
    for (k, r) in [(1, 1), (3, 1), (5, 1), (7, 1), (1, 3)] {
        let start = Instant::now();
        let bundle = build(params(k, r));
        let closure = two_closure(&bundle.g).unwrap();
        assert_eq!(bundle.g.order(), 16 * (k * r) as u128);
        assert!(
            closure.is_same_group(&bundle.g).unwrap(),
            "(k={}, r={}): closure order {}",
            k,
            r,
            closure.order()
        );
        let elapsed = start.elapsed();
        assert!(
            elapsed < Duration::from_secs(60),
            "(k={}, r={}) took {:?}",
            k,
            r,
            elapsed
        );
    }

    // degree-8 case against the factorial oracle
    let start = Instant::now();
    let bundle = build(params(1, 1));
    let fast = two_closure(&bundle.g).unwrap();
    let brute = brute_two_closure(&bundle.g).unwrap();
    assert!(fast.is_same_group(&brute).unwrap());
    assert_eq!(fast.order(), 16);
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "brute oracle took {:?}",
        elapsed
    );
    println!("criterion 3 (2-closedness): PASS — closure equals G up to degree 56, factorial oracle agrees at degree 8");
}

#[test]
fn criterion_4_index_two_property() {
    let start = Instant::now();
    // pool: (group, involutory automorphism) pairs over orders <= 12
    let mut pool: Vec<(String, AbstractGroup, Vec<usize>)> = Vec::new();
    for (name, table) in small_group_catalog() {
        if table.order() > 12 || table.order() < 2 {
            continue;
        }
        for alpha in abstract_automorphisms(&table).unwrap() {
            let is_involution = alpha.iter().enumerate().any(|(x, &y)| x != y)
                && (0..table.order()).all(|x| alpha[alpha[x]] == x);
            if is_involution {
                pool.push((name.clone(), table.clone(), alpha));
            }
        }
    }
    assert!(pool.len() >= 20, "pool has only {} instances", pool.len());

    // a seeded sample of at least 20 instances
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut picked = Vec::new();
    let mut remaining: Vec<usize> = (0..pool.len()).collect();
    while picked.len() < 24 && !remaining.is_empty() {
        let at = rng.gen_range(0..remaining.len());
        picked.push(remaining.swap_remove(at));
    }

    for idx in picked {
        let (name, table, alpha) = &pool[idx];
        let regular = regular_representation(table);
        let sigma = Permutation::from_images(alpha.clone()).unwrap();
        let mut gens = regular.generators().to_vec();
        gens.push(sigma);
        let g = PermGroup::new(table.order(), gens).unwrap();
        assert_eq!(
            g.order(),
            2 * table.order() as u128,
            "{}: regular subgroup must have index 2",
            name
        );
        let closure = two_closure(&g).unwrap();
        assert!(
            closure.is_same_group(&g).unwrap(),
            "{}: group with index-2 regular subgroup must be 2-closed",
            name
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {:?}", elapsed);
    println!("criterion 4 (index-2 property): PASS — 24 sampled instances all 2-closed");
}

#[test]
fn criterion_5_regular_representations_are_two_closed() {
    let start = Instant::now();
    let catalog = small_group_catalog();
    let mut count = 0;
    for (name, table) in &catalog {
        let regular = regular_representation(table);
        let closure = two_closure(&regular).unwrap();
        assert!(
            closure.is_same_group(&regular).unwrap(),
            "{}: regular representation is not 2-closed (closure order {})",
            name,
            closure.order()
        );
        count += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {:?}", elapsed);
    println!(
        "criterion 5 (regular representations 2-closed): PASS — {} catalog groups",
        count
    );
}

#[test]
fn criterion_6_babai_pipeline() {
    for (k, r) in [(1, 1), (3, 1)] {
        let start = Instant::now();
        let p = params(k, r);
        let cert = babai_refutation(p, &PipelineConfig::default()).unwrap();
        let report = verify_certificate(&cert);
        assert!(
            report.passed,
            "(k={}, r={}): verification reasons {:?}",
            k, r, report.reasons
        );

        // at least two conjugacy classes of regular subgroups isomorphic to R
        let bundle = build(p);
        let (r_table, _) = to_abstract(&bundle.r1, 100_000).unwrap();
        let subs = find_regular_subgroups(&bundle.g, 100_000).unwrap();
        let isomorphic_to_r: Vec<PermGroup> = subs
            .into_iter()
            .filter(|sub| {
                let (table, _) = to_abstract(sub, 100_000).unwrap();
                abstract_isomorphism(&table, &r_table).unwrap().is_some()
            })
            .collect();
        let classes = classify_conjugacy(&bundle.g, &isomorphic_to_r, 100_000).unwrap();
        assert!(
            classes.len() >= 2,
            "(k={}, r={}): only {} classes",
            k,
            r,
            classes.len()
        );
        let elapsed = start.elapsed();
        assert!(
            elapsed < Duration::from_secs(300),
            "(k={}, r={}) took {:?}",
            k,
            r,
            elapsed
        );
    }
    println!("criterion 6 (refutation pipeline): PASS — verified certificates and >= 2 regular classes for (1,1) and (3,1)");
}

#[test]
fn criterion_7_c8_cross_check() {
    let start = Instant::now();
    let violations = dci_brute(&AbstractGroup::cyclic(8), 7).unwrap();
    assert!(
        !violations.is_empty(),
        "the order-8 cyclic group must fail DCI"
    );

    let cv = cross_validate(params(1, 1), &PipelineConfig::default()).unwrap();
    assert!(
        cv.matched,
        "pipeline witness must appear among brute violations"
    );

    for n in [2usize, 3, 5] {
        let clean = dci_brute(&AbstractGroup::cyclic(n), n - 1).unwrap();
        assert!(
            clean.is_empty(),
            "C{} is DCI but oracle found {:?}",
            n,
            clean
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(600), "took {:?}", elapsed);
    println!(
        "criterion 7 (order-8 cyclic cross-check): PASS — {} violating pairs, prime cyclics clean",
        violations.len()
    );
}

#[test]
fn criterion_8_determinism() {
    let cfg = PipelineConfig {
        seed: 0,
        ..PipelineConfig::default()
    };
    let first = certificate_to_json(&babai_refutation(params(3, 1), &cfg).unwrap());
    let second = certificate_to_json(&babai_refutation(params(3, 1), &cfg).unwrap());
    assert_eq!(
        first, second,
        "certificates must be byte-identical across runs"
    );
    println!("criterion 8 (determinism): PASS — byte-identical certificates at seed 0");
}

#[test]
fn criterion_9_oracle_agreement() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut accepted = 0;
    while accepted < 50 {
        let degree = rng.gen_range(4..=8);
        let gen_count = rng.gen_range(1..=2);
        let gens: Vec<Permutation> = (0..gen_count)
            .map(|_| {
                let mut images: Vec<usize> = (0..degree).collect();
                for i in (1..degree).rev() {
                    let j = rng.gen_range(0..=i);
                    images.swap(i, j);
                }
                Permutation::from_images(images).unwrap()
            })
            .collect();
        let closure = match exhaustive_closure(&gens, 2000) {
            Ok(c) => c,
            Err(_) => continue, // larger than the sample budget, resample
        };
        let group = PermGroup::new(degree, gens).unwrap();
        assert_eq!(group.order(), closure.len() as u128);
        let fast = two_closure(&group).unwrap();
        let brute = brute_two_closure(&group).unwrap();
        assert!(
            fast.is_same_group(&brute).unwrap(),
            "closure mismatch at degree {} order {}",
            degree,
            group.order()
        );
        accepted += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {:?}", elapsed);
    println!("criterion 9 (oracle agreement): PASS — 50 random instances, chain and closure oracles agree");
}
