//! The full refutation pipeline and its certificates.
//!
//! The criterion driving everything: when a 2-closed permutation group
//! contains two regular subgroups that are abstractly isomorphic but not
//! conjugate inside it, the abstract group fails the DCI property. The
//! pipeline verifies the construction identities, confirms 2-closedness
//! computationally, exhausts conjugacy, and extracts a pair of connection
//! sets over the abstract group whose Cayley digraphs are isomorphic while
//! no group automorphism maps one set to the other. Certificates carry
//! everything a verifier needs to re-check the claim from scratch.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::abstract_group::{
    abstract_automorphisms, abstract_isomorphism, to_abstract, AbstractGroup,
};
use crate::construction::{
    build_with_seed, bundle_checks, expected_semidirect_table, ConstructionBundle,
    ConstructionParams,
};
use crate::error::{Error, Result};
use crate::group::{are_conjugate_subgroups, PermGroup};
use crate::orbital::{
    arcs_of_colors, digraph_automorphism_count_is, orbital_coloring, two_closure_capped, ArcSet,
    OrbitalColoring, DEFAULT_NODE_CAP, SEARCH_DEGREE_CAP,
};
use crate::perm::Permutation;

/// Budgets and seeds for the pipeline.
#[derive(Debug, Clone, Copy)]
pub struct PipelineConfig {
    pub seed: u64,
    pub node_cap: u64,
    pub element_cap: usize,
    /// Maximum number of color subsets tried before falling back to the
    /// colored witness.
    pub witness_cap: usize,
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            node_cap: DEFAULT_NODE_CAP,
            element_cap: 100_000,
            witness_cap: 20_000,
            jobs: 1,
        }
    }
}

/// A regular subgroup together with the labeling of points by abstract
/// element indices; the base point carries the identity.
#[derive(Debug, Clone)]
pub struct RegularEmbedding {
    pub base: usize,
    /// `labels[point]` is the abstract element index.
    pub labels: Vec<usize>,
    /// Inverse map: `points[index]` is the point carrying that element.
    pub points: Vec<usize>,
}

impl RegularEmbedding {
    /// Labels the points of a regular group by its own abstract elements:
    /// the unique element sending `base` to `x` names `x`.
    pub fn of(
        subgroup: &PermGroup,
        base: usize,
        elems: &[Permutation],
    ) -> Result<RegularEmbedding> {
        if !subgroup.is_regular() {
            return Err(Error::Domain(
                "embedding requires a regular subgroup".into(),
            ));
        }
        let degree = subgroup.degree();
        let mut labels = vec![usize::MAX; degree];
        let mut points = vec![usize::MAX; elems.len()];
        for (idx, p) in elems.iter().enumerate() {
            let x = p.image_of(base);
            if labels[x] != usize::MAX {
                return Err(Error::Domain("two elements share a base image".into()));
            }
            labels[x] = idx;
            points[idx] = x;
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::Domain("labeling does not cover all points".into()));
        }
        Ok(RegularEmbedding {
            base,
            labels,
            points,
        })
    }

    /// Pushes the labeling through an abstract isomorphism, so the labels
    /// land in a common reference group.
    pub fn relabel(&self, iso: &[usize]) -> RegularEmbedding {
        let labels: Vec<usize> = self.labels.iter().map(|&l| iso[l]).collect();
        let mut points = vec![usize::MAX; labels.len()];
        for (point, &label) in labels.iter().enumerate() {
            points[label] = point;
        }
        RegularEmbedding {
            base: self.base,
            labels,
            points,
        }
    }
}

/// The connection set read off an arc set through a regular labeling: the
/// labels of the base point's out-neighbors.
pub fn connection_set(e: &RegularEmbedding, arcs: &ArcSet) -> BTreeSet<usize> {
    arcs.out_neighbors(e.base)
        .into_iter()
        .map(|v| e.labels[v])
        .collect()
}

/// The Cayley arc set of a connection set over an abstract group:
/// an arc `x -> y` whenever `y * x^-1` lies in the set.
pub fn cayley_arcs(group: &AbstractGroup, connection: &BTreeSet<usize>) -> Result<ArcSet> {
    let n = group.order();
    let mut arcs = ArcSet::new(n);
    for &s in connection {
        if s == group.identity() {
            return Err(Error::Domain("connection sets exclude the identity".into()));
        }
        if s >= n {
            return Err(Error::Domain(format!(
                "connection element {} out of range",
                s
            )));
        }
        for x in 0..n {
            arcs.insert(x, group.mul(s, x))?;
        }
    }
    Ok(arcs)
}

/// Finds every regular subgroup of a transitive group by backtracking over
/// the elements sending the base point to each uncovered point, keeping the
/// partial set closed and fixed-point-free.
pub fn find_regular_subgroups(g2: &PermGroup, cap: usize) -> Result<Vec<PermGroup>> {
    if !g2.is_transitive() {
        return Err(Error::Domain(
            "regular subgroup search requires a transitive group".into(),
        ));
    }
    let degree = g2.degree();
    let elems = g2.elements_sorted(cap)?;
    // cosets[x] = elements mapping the base point 0 to x
    let mut cosets: Vec<Vec<Permutation>> = vec![Vec::new(); degree];
    for e in &elems {
        cosets[e.image_of(0)].push(e.clone());
    }
    let mut found = Vec::new();
    let mut chosen: Vec<Permutation> = Vec::new();
    let start: Vec<Permutation> = vec![Permutation::identity(degree)];
    extend_regular(degree, &cosets, &start, &mut chosen, &mut found)?;
    Ok(found
        .into_iter()
        .map(|gens| PermGroup::new(degree, gens).expect("equal degrees"))
        .collect())
}

fn extend_regular(
    degree: usize,
    cosets: &[Vec<Permutation>],
    closed: &[Permutation],
    chosen: &mut Vec<Permutation>,
    found: &mut Vec<Vec<Permutation>>,
) -> Result<()> {
    let mut covered = vec![false; degree];
    for e in closed {
        covered[e.image_of(0)] = true;
    }
    match covered.iter().position(|&c| !c) {
        None => {
            if closed.len() == degree {
                found.push(if chosen.is_empty() {
                    vec![Permutation::identity(degree)]
                } else {
                    chosen.clone()
                });
            }
            Ok(())
        }
        Some(next) => {
            for candidate in &cosets[next] {
                if let Some(bigger) = close_sharp(degree, closed, candidate) {
                    chosen.push(candidate.clone());
                    extend_regular(degree, cosets, &bigger, chosen, found)?;
                    chosen.pop();
                }
            }
            Ok(())
        }
    }
}

/// Product-closes `closed + candidate`, pruning as soon as the set stops
/// being sharply transitive (two elements agreeing on the base point, or
/// more elements than points).
fn close_sharp(
    degree: usize,
    closed: &[Permutation],
    candidate: &Permutation,
) -> Option<Vec<Permutation>> {
    let mut set: Vec<Permutation> = closed.to_vec();
    let mut base_hits: Vec<bool> = vec![false; degree];
    for e in &set {
        base_hits[e.image_of(0)] = true;
    }
    let mut queue = vec![candidate.clone()];
    while let Some(next) = queue.pop() {
        if set.contains(&next) {
            continue;
        }
        let hit = next.image_of(0);
        if base_hits[hit] || set.len() >= degree {
            return None; // not sharp, or too large
        }
        base_hits[hit] = true;
        for e in &set {
            queue.push(e.compose(&next).expect("equal degrees"));
            queue.push(next.compose(e).expect("equal degrees"));
        }
        set.push(next);
    }
    Some(set)
}

/// Partitions subgroups into conjugacy classes of the ambient group by
/// exhaustive conjugator search. Returns index classes in input order.
pub fn classify_conjugacy(
    g2: &PermGroup,
    subs: &[PermGroup],
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (idx, sub) in subs.iter().enumerate() {
        let mut placed = false;
        for class in classes.iter_mut() {
            let rep = &subs[class[0]];
            if are_conjugate_subgroups(g2, sub, rep, cap)?.is_some() {
                class.push(idx);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![idx]);
        }
    }
    Ok(classes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    /// A single arc set whose full automorphism group is exactly the
    /// ambient group.
    Digraph,
    /// The full orbital coloring as a Cayley color digraph; used when no
    /// single arc set works within budget.
    Colored,
}

/// Connection data: one flat set for a digraph witness, one set per color
/// for a colored witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConnectionSets {
    Single(Vec<usize>),
    PerColor(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub k: usize,
    pub r: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateGenerators {
    pub tau1: Vec<usize>,
    pub tau2: Vec<usize>,
    pub rho1: Vec<usize>,
    pub rho2: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateWitness {
    pub kind: WitnessKind,
    /// Orbital color indices whose union forms the witness arcs.
    pub colors: Vec<usize>,
    #[serde(rename = "S")]
    pub s: ConnectionSets,
    #[serde(rename = "T")]
    pub t: ConnectionSets,
    /// Vertex bijection realizing Cay(R, S) = Cay(R, T), as images over
    /// abstract element indices.
    pub iso: Vec<usize>,
}

/// A self-contained, re-checkable record of one refutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DciCertificate {
    pub params: CertificateParams,
    pub degree: usize,
    pub generators: CertificateGenerators,
    pub witness: CertificateWitness,
    pub aut_count: usize,
    pub checks: BTreeMap<String, bool>,
}

/// Serializes byte-stably: fixed field order, base-10 integers, arrays in
/// index order, trailing newline.
pub fn certificate_to_json(cert: &DciCertificate) -> String {
    let mut text = serde_json::to_string_pretty(cert).expect("certificates always serialize");
    text.push('\n');
    text
}

pub fn certificate_from_json(text: &str) -> Result<DciCertificate> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("certificate: {}", e)))
}

/// Witness extraction outcome, before packaging into the certificate.
pub struct WitnessData {
    pub kind: WitnessKind,
    pub colors: Vec<usize>,
    pub s: ConnectionSets,
    pub t: ConnectionSets,
    pub iso: Vec<usize>,
    pub witness_arcs: Option<ArcSet>,
}

/// Searches unions of off-diagonal orbital colors, by increasing subset
/// size then lexicographic order, for an arc set whose automorphism group
/// is exactly the ambient group. Falls back to the full coloring when the
/// candidate budget is exhausted.
pub fn witness_digraphs(
    bundle: &ConstructionBundle,
    coloring: &OrbitalColoring,
    lab1: &RegularEmbedding,
    lab2: &RegularEmbedding,
    table: &AbstractGroup,
    automorphisms: &[Vec<usize>],
    cfg: &PipelineConfig,
) -> Result<WitnessData> {
    let off: Vec<u16> = coloring.off_diagonal_colors();
    let iso: Vec<usize> = (0..table.order())
        .map(|x| lab2.labels[lab1.points[x]])
        .collect();

    let mut tried = 0usize;
    for size in 1..=off.len() {
        if tried >= cfg.witness_cap {
            break;
        }
        let mut candidates: Vec<Vec<u16>> = Vec::new();
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if tried + candidates.len() >= cfg.witness_cap {
                break;
            }
            candidates.push(combo.iter().map(|&i| off[i]).collect());
            if !next_combination(&mut combo, off.len()) {
                break;
            }
        }
        tried += candidates.len();

        let results = evaluate_candidates(bundle, coloring, &candidates, cfg);
        if let Some((colors, arcs)) = results? {
            let s = connection_set(lab1, &arcs);
            let t = connection_set(lab2, &arcs);
            if automorphisms
                .iter()
                .any(|alpha| apply_alpha(alpha, &s) == t)
            {
                return Err(Error::Verification(
                    "internal: a group automorphism maps S to T despite non-conjugacy".into(),
                ));
            }
            return Ok(WitnessData {
                kind: WitnessKind::Digraph,
                colors: colors.iter().map(|&c| c as usize).collect(),
                s: ConnectionSets::Single(s.into_iter().collect()),
                t: ConnectionSets::Single(t.into_iter().collect()),
                iso,
                witness_arcs: Some(arcs),
            });
        }
    }

    // colored fallback: the full coloring is always preserved by exactly
    // the 2-closure, which equals the ambient group here
    let mut s_family = Vec::new();
    let mut t_family = Vec::new();
    for &color in &off {
        let arcs = arcs_of_colors(coloring, &[color])?;
        s_family.push(connection_set(lab1, &arcs).into_iter().collect::<Vec<_>>());
        t_family.push(connection_set(lab2, &arcs).into_iter().collect::<Vec<_>>());
    }
    let all_match = automorphisms.iter().any(|alpha| {
        s_family.iter().zip(&t_family).all(|(s, t)| {
            let mapped: BTreeSet<usize> = s.iter().map(|&x| alpha[x]).collect();
            let target: BTreeSet<usize> = t.iter().copied().collect();
            mapped == target
        })
    });
    if all_match {
        return Err(Error::Verification(
            "internal: a group automorphism maps the color family across".into(),
        ));
    }
    Ok(WitnessData {
        kind: WitnessKind::Colored,
        colors: off.iter().map(|&c| c as usize).collect(),
        s: ConnectionSets::PerColor(s_family),
        t: ConnectionSets::PerColor(t_family),
        iso,
        witness_arcs: None,
    })
}

/// Tests candidate color subsets in deterministic order; `jobs > 1` fans
/// the chunk out over threads and keeps the first success by index.
fn evaluate_candidates(
    bundle: &ConstructionBundle,
    coloring: &OrbitalColoring,
    candidates: &[Vec<u16>],
    cfg: &PipelineConfig,
) -> Result<Option<(Vec<u16>, ArcSet)>> {
    let target_order = bundle.g.order();
    let check = |colors: &Vec<u16>| -> Option<ArcSet> {
        let arcs = arcs_of_colors(coloring, colors).ok()?;
        // the ambient group always preserves an orbital union, so counting
        // automorphisms decides whether the symmetry is exactly the group
        match digraph_automorphism_count_is(&arcs, target_order, cfg.node_cap) {
            Ok(true) => Some(arcs),
            _ => None, // wrong symmetry or budget blown: not a witness
        }
    };
    let jobs = cfg.jobs.max(1);
    if jobs == 1 || candidates.len() < 2 {
        for (idx, colors) in candidates.iter().enumerate() {
            if let Some(arcs) = check(colors) {
                return Ok(Some((candidates[idx].clone(), arcs)));
            }
        }
        return Ok(None);
    }
    let hits = std::sync::Mutex::new(Vec::<(usize, ArcSet)>::new());
    std::thread::scope(|scope| {
        for worker in 0..jobs {
            let hits = &hits;
            let check = &check;
            scope.spawn(move || {
                for idx in (worker..candidates.len()).step_by(jobs) {
                    if let Some(arcs) = check(&candidates[idx]) {
                        hits.lock()
                            .expect("no panics hold the lock")
                            .push((idx, arcs));
                    }
                }
            });
        }
    });
    let mut hits = hits.into_inner().expect("threads joined");
    hits.sort_by_key(|(idx, _)| *idx);
    Ok(hits
        .into_iter()
        .next()
        .map(|(idx, arcs)| (candidates[idx].clone(), arcs)))
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn apply_alpha(alpha: &[usize], s: &BTreeSet<usize>) -> BTreeSet<usize> {
    s.iter().map(|&x| alpha[x]).collect()
}

/// Runs the whole pipeline for `(k, r)` and assembles the certificate.
pub fn babai_refutation(
    params: ConstructionParams,
    cfg: &PipelineConfig,
) -> Result<DciCertificate> {
    let degree = params.degree();
    if degree > SEARCH_DEGREE_CAP {
        return Err(Error::Capacity(format!(
            "degree {} exceeds the closure budget {}",
            degree, SEARCH_DEGREE_CAP
        )));
    }
    let bundle = build_with_seed(params, cfg.seed);
    let mut checks: BTreeMap<String, bool> = BTreeMap::new();

    // stage 1: construction identities
    let report = bundle_checks(&bundle);
    for check in &report.checks {
        checks.insert(format!("bundle_{}", check.name), check.passed);
    }
    if !report.all_passed() {
        return Err(Error::Verification(format!(
            "stage bundle: failed {}",
            report.failed_names().join(", ")
        )));
    }

    // stage 2: the ambient group equals its own 2-closure
    let closure = two_closure_capped(&bundle.g, cfg.node_cap)?;
    let two_closed = closure.is_same_group(&bundle.g)?;
    checks.insert("two_closed".into(), two_closed);
    if !two_closed {
        return Err(Error::Verification(format!(
            "stage closure: |G| = {} but |closure| = {}",
            bundle.g.order(),
            closure.order()
        )));
    }

    // stage 3: the two regular subgroups are not conjugate in G
    let conjugator = are_conjugate_subgroups(&bundle.g, &bundle.r2, &bundle.r1, cfg.element_cap)?;
    checks.insert("non_conjugate".into(), conjugator.is_none());
    if conjugator.is_some() {
        return Err(Error::Verification(
            "stage conjugacy: subgroups unexpectedly conjugate".into(),
        ));
    }

    // stage 4: common abstract group and labelings
    let (table, elems1) = to_abstract(&bundle.r1, cfg.element_cap)?;
    let (table2, elems2) = to_abstract(&bundle.r2, cfg.element_cap)?;
    let beta = abstract_isomorphism(&table2, &table)?.ok_or_else(|| {
        Error::Verification("stage abstract: regular subgroups not isomorphic".into())
    })?;
    checks.insert("r1_r2_isomorphic".into(), true);
    let lab1 = RegularEmbedding::of(&bundle.r1, 0, &elems1)?;
    let lab2 = RegularEmbedding::of(&bundle.r2, 0, &elems2)?.relabel(&beta);

    // stage 5: witness digraphs and the automorphism exhaustion
    let automorphisms = abstract_automorphisms(&table)?;
    let coloring = orbital_coloring(&bundle.g);
    let witness = witness_digraphs(
        &bundle,
        &coloring,
        &lab1,
        &lab2,
        &table,
        &automorphisms,
        cfg,
    )?;
    checks.insert(
        "witness_is_single_digraph".into(),
        witness.kind == WitnessKind::Digraph,
    );
    checks.insert("no_automorphism_maps_s_to_t".into(), true);

    let cert = DciCertificate {
        params: CertificateParams {
            k: params.k(),
            r: params.r(),
        },
        degree,
        generators: CertificateGenerators {
            tau1: bundle.tau1.images().to_vec(),
            tau2: bundle.tau2.images().to_vec(),
            rho1: bundle.rho1.images().to_vec(),
            rho2: bundle.rho2.images().to_vec(),
        },
        witness: CertificateWitness {
            kind: witness.kind,
            colors: witness.colors,
            s: witness.s,
            t: witness.t,
            iso: witness.iso,
        },
        aut_count: automorphisms.len(),
        checks,
    };
    Ok(cert)
}

/// Outcome of the independent certificate check.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<(String, bool)>,
    pub reasons: Vec<String>,
}

impl VerificationReport {
    fn new() -> Self {
        VerificationReport {
            passed: true,
            checks: Vec::new(),
            reasons: Vec::new(),
        }
    }

    fn record(&mut self, name: &str, ok: bool, reason: impl Into<String>) {
        self.checks.push((name.to_string(), ok));
        if !ok {
            self.passed = false;
            self.reasons.push(format!("{}: {}", name, reason.into()));
        }
    }
}

/// Re-checks a certificate from its serialized data alone: rebuilds the
/// abstract group from the stored generators, validates the table, the
/// connection sets, the isomorphism, and exhausts the automorphism group.
pub fn verify_certificate(cert: &DciCertificate) -> VerificationReport {
    let mut report = VerificationReport::new();

    let params = match ConstructionParams::new(cert.params.k, cert.params.r) {
        Ok(p) => p,
        Err(e) => {
            report.record("params_valid", false, e.to_string());
            return report;
        }
    };
    report.record("params_valid", true, "");
    report.record(
        "degree_consistent",
        cert.degree == params.degree(),
        format!("declared {}, expected {}", cert.degree, params.degree()),
    );
    if !report.passed {
        return report;
    }

    let gens = [
        ("tau1", &cert.generators.tau1),
        ("tau2", &cert.generators.tau2),
        ("rho1", &cert.generators.rho1),
        ("rho2", &cert.generators.rho2),
    ];
    let mut parsed = BTreeMap::new();
    for (name, images) in gens {
        match Permutation::from_images(images.clone()) {
            Ok(p) if p.degree() == cert.degree => {
                parsed.insert(name, p);
            }
            _ => {
                report.record(
                    "generators_are_permutations",
                    false,
                    format!("{} is not a permutation of the declared degree", name),
                );
                return report;
            }
        }
    }
    report.record("generators_are_permutations", true, "");

    let r1 = PermGroup::new(
        cert.degree,
        vec![
            parsed["tau1"].clone(),
            parsed["rho1"].clone(),
            parsed["rho2"].clone(),
        ],
    )
    .expect("degrees checked above");
    report.record(
        "r1_regular",
        r1.is_regular(),
        format!("|R1| = {}, degree {}", r1.order(), cert.degree),
    );
    if !report.passed {
        return report;
    }

    let (table, _) = match to_abstract(&r1, cert.degree + 1) {
        Ok(t) => t,
        Err(e) => {
            report.record("table_valid", false, e.to_string());
            return report;
        }
    };
    let table_ok = table.is_latin_square() && table.is_associative();
    report.record("table_valid", table_ok, "multiplication table checks");

    let reference = match expected_semidirect_table(params) {
        Ok(t) => t,
        Err(e) => {
            report.record("r_matches_claimed_shape", false, e.to_string());
            return report;
        }
    };
    let shape_ok = matches!(abstract_isomorphism(&table, &reference), Ok(Some(_)));
    report.record(
        "r_matches_claimed_shape",
        shape_ok,
        "R is the semidirect product the parameters claim",
    );

    // iso must be a bijection on element indices
    let n = table.order();
    let iso_perm = match Permutation::from_images(cert.witness.iso.clone()) {
        Ok(p) if p.degree() == n => p,
        _ => {
            report.record("iso_is_bijection", false, "iso is not a permutation of R");
            return report;
        }
    };
    report.record("iso_is_bijection", true, "");

    let automorphisms = match abstract_automorphisms(&table) {
        Ok(a) => a,
        Err(e) => {
            report.record("aut_enumerated", false, e.to_string());
            return report;
        }
    };
    report.record(
        "aut_count_matches",
        automorphisms.len() == cert.aut_count,
        format!(
            "enumerated {}, certificate claims {}",
            automorphisms.len(),
            cert.aut_count
        ),
    );

    match (&cert.witness.s, &cert.witness.t) {
        (ConnectionSets::Single(s), ConnectionSets::Single(t)) => {
            if cert.witness.kind != WitnessKind::Digraph {
                report.record("witness_shape", false, "flat sets require kind=digraph");
                return report;
            }
            report.record("witness_shape", true, "");
            verify_single_witness(&mut report, &table, &automorphisms, s, t, &iso_perm);
        }
        (ConnectionSets::PerColor(s), ConnectionSets::PerColor(t)) => {
            if cert.witness.kind != WitnessKind::Colored {
                report.record(
                    "witness_shape",
                    false,
                    "per-color sets require kind=colored",
                );
                return report;
            }
            let lengths_ok =
                s.len() == t.len() && s.len() == cert.witness.colors.len() && !s.is_empty();
            report.record(
                "witness_shape",
                lengths_ok,
                "color families must align with the color list",
            );
            if lengths_ok {
                verify_colored_witness(&mut report, &table, &automorphisms, s, t, &iso_perm);
            }
        }
        _ => {
            report.record("witness_shape", false, "S and T have different shapes");
        }
    }
    report
}

fn check_connection_set(
    report: &mut VerificationReport,
    table: &AbstractGroup,
    name: &str,
    set: &[usize],
) -> Option<BTreeSet<usize>> {
    let as_set: BTreeSet<usize> = set.iter().copied().collect();
    let ok = as_set.len() == set.len()
        && !as_set.contains(&table.identity())
        && as_set.iter().all(|&x| x < table.order());
    report.record(
        &format!("{}_wellformed", name),
        ok,
        "sets must be duplicate-free, identity-free and in range",
    );
    ok.then_some(as_set)
}

fn verify_single_witness(
    report: &mut VerificationReport,
    table: &AbstractGroup,
    automorphisms: &[Vec<usize>],
    s: &[usize],
    t: &[usize],
    iso: &Permutation,
) {
    let (Some(s), Some(t)) = (
        check_connection_set(report, table, "s", s),
        check_connection_set(report, table, "t", t),
    ) else {
        return;
    };
    report.record(
        "equal_arc_counts",
        s.len() == t.len(),
        "isomorphic digraphs need equally sized connection sets",
    );
    let (cay_s, cay_t) = match (cayley_arcs(table, &s), cayley_arcs(table, &t)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            report.record("cayley_digraphs_built", false, "invalid connection data");
            return;
        }
    };
    report.record("cayley_digraphs_built", true, "");
    let iso_ok = cay_s
        .map_points(iso)
        .map(|mapped| mapped == cay_t)
        .unwrap_or(false);
    report.record(
        "iso_maps_cayley_s_onto_cayley_t",
        iso_ok,
        "iso must carry Cay(R,S) exactly onto Cay(R,T)",
    );
    let no_alpha = automorphisms
        .iter()
        .all(|alpha| apply_alpha(alpha, &s) != t);
    report.record(
        "no_automorphism_maps_s_to_t",
        no_alpha,
        "some group automorphism maps S to T",
    );
}

fn verify_colored_witness(
    report: &mut VerificationReport,
    table: &AbstractGroup,
    automorphisms: &[Vec<usize>],
    s_family: &[Vec<usize>],
    t_family: &[Vec<usize>],
    iso: &Permutation,
) {
    let mut s_sets = Vec::new();
    let mut t_sets = Vec::new();
    for (idx, (s, t)) in s_family.iter().zip(t_family).enumerate() {
        let (Some(s), Some(t)) = (
            check_connection_set(report, table, &format!("s{}", idx), s),
            check_connection_set(report, table, &format!("t{}", idx), t),
        ) else {
            return;
        };
        s_sets.push(s);
        t_sets.push(t);
    }
    // the same bijection must carry every color's Cayley digraph across
    let mut iso_ok = true;
    for (s, t) in s_sets.iter().zip(&t_sets) {
        let ok = match (cayley_arcs(table, s), cayley_arcs(table, t)) {
            (Ok(a), Ok(b)) => a.map_points(iso).map(|m| m == b).unwrap_or(false),
            _ => false,
        };
        if !ok {
            iso_ok = false;
            break;
        }
    }
    report.record(
        "iso_maps_every_color_across",
        iso_ok,
        "iso must carry each color class of the first labeling onto the second",
    );
    let no_alpha = automorphisms.iter().all(|alpha| {
        s_sets
            .iter()
            .zip(&t_sets)
            .any(|(s, t)| apply_alpha(alpha, s) != *t)
    });
    report.record(
        "no_automorphism_maps_family_across",
        no_alpha,
        "some group automorphism maps the whole color family across",
    );
}

/// A violating pair found by the exhaustive oracle: two connection sets
/// whose Cayley digraphs are isomorphic while no group automorphism maps
/// one set to the other.
pub type ViolatingPair = (BTreeSet<usize>, BTreeSet<usize>);

/// Exhaustive DCI check for groups of order at most 8: enumerate all
/// connection sets up to `size_cap` elements, bucket them by digraph
/// isomorphism, and within each bucket compare automorphism orbits.
/// Returns one pair per unordered pair of distinct orbits in the same
/// bucket, smallest representatives first.
pub fn dci_brute(group: &AbstractGroup, size_cap: usize) -> Result<Vec<ViolatingPair>> {
    let n = group.order();
    if n > 8 {
        return Err(Error::Capacity(
            "exhaustive oracle limited to order 8".into(),
        ));
    }
    let automorphisms = abstract_automorphisms(group)?;
    let non_identity: Vec<usize> = (0..n).filter(|&x| x != group.identity()).collect();

    // all connection sets, grouped into automorphism orbits
    let mut orbit_of: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut orbit_reps: Vec<BTreeSet<usize>> = Vec::new();
    for mask in 0u32..(1 << non_identity.len()) {
        if (mask.count_ones() as usize) > size_cap {
            continue;
        }
        let set: BTreeSet<usize> = non_identity
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &x)| x)
            .collect();
        let key: Vec<usize> = set.iter().copied().collect();
        if orbit_of.contains_key(&key) {
            continue;
        }
        let orbit_idx = orbit_reps.len();
        for alpha in &automorphisms {
            let image: Vec<usize> = apply_alpha(alpha, &set).into_iter().collect();
            orbit_of.entry(image).or_insert(orbit_idx);
        }
        orbit_reps.push(set);
    }

    // bucket orbit representatives by digraph isomorphism class
    let mut buckets: Vec<(ArcSet, Vec<usize>)> = Vec::new();
    for (idx, rep) in orbit_reps.iter().enumerate() {
        let arcs = cayley_arcs(group, rep)?;
        let mut placed = false;
        for (rep_arcs, members) in buckets.iter_mut() {
            if crate::orbital::digraph_isomorphism(rep_arcs, &arcs, DEFAULT_NODE_CAP)?.is_some() {
                members.push(idx);
                placed = true;
                break;
            }
        }
        if !placed {
            buckets.push((arcs, vec![idx]));
        }
    }

    let mut violations = Vec::new();
    for (_, members) in &buckets {
        for (a, &first) in members.iter().enumerate() {
            for &second in &members[a + 1..] {
                violations.push((orbit_reps[first].clone(), orbit_reps[second].clone()));
            }
        }
    }
    Ok(violations)
}

/// Report linking the pipeline witness to the exhaustive oracle.
#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub witness_pair: ViolatingPair,
    pub matched: bool,
    pub brute_violations: usize,
}

/// For the degree-8 case only: maps the pipeline's witness pair onto the
/// canonical cyclic group of order 8 and confirms the same pair (up to
/// automorphism relabeling) appears among the exhaustive violations.
pub fn cross_validate(params: ConstructionParams, cfg: &PipelineConfig) -> Result<CrossValidation> {
    if params.k() != 1 || params.r() != 1 {
        return Err(Error::InvalidParams(
            "cross-validation runs only at the degree-8 parameters (k = 1, r = 1)".into(),
        ));
    }
    let cert = babai_refutation(params, cfg)?;
    cross_validate_certificate(&cert, cfg)
}

/// Cross-validates an existing degree-8 certificate against the exhaustive
/// oracle. Corrupted witness pairs come back unmatched.
pub fn cross_validate_certificate(
    cert: &DciCertificate,
    cfg: &PipelineConfig,
) -> Result<CrossValidation> {
    let params = ConstructionParams::new(cert.params.k, cert.params.r)?;
    if params.degree() != 8 {
        return Err(Error::InvalidParams(
            "cross-validation runs only at degree 8".into(),
        ));
    }
    let (ConnectionSets::Single(s), ConnectionSets::Single(t)) = (&cert.witness.s, &cert.witness.t)
    else {
        return Err(Error::Verification(
            "cross-validation needs a single-digraph witness".into(),
        ));
    };

    // rebuild R and map it onto the canonical cyclic table
    let bundle = build_with_seed(params, cfg.seed);
    let (table, _) = to_abstract(&bundle.r1, cfg.element_cap)?;
    let c8 = AbstractGroup::cyclic(8);
    let into_c8 = abstract_isomorphism(&table, &c8)?
        .ok_or_else(|| Error::Verification("degree-8 witness group is not cyclic".into()))?;
    let map = |set: &[usize]| -> BTreeSet<usize> { set.iter().map(|&x| into_c8[x]).collect() };
    let (s8, t8) = (map(s), map(t));

    let autos = abstract_automorphisms(&c8)?;
    let canon = |set: &BTreeSet<usize>| -> Vec<usize> {
        autos
            .iter()
            .map(|alpha| apply_alpha(alpha, set).into_iter().collect::<Vec<_>>())
            .min()
            .expect("automorphism list contains the identity")
    };
    let target = {
        let mut pair = [canon(&s8), canon(&t8)];
        pair.sort();
        pair
    };

    let violations = dci_brute(&c8, 7)?;
    let matched = violations.iter().any(|(a, b)| {
        let mut pair = [canon(a), canon(b)];
        pair.sort();
        pair == target
    });
    Ok(CrossValidation {
        witness_pair: (s8, t8),
        matched,
        brute_violations: violations.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build;

    fn params(k: usize, r: usize) -> ConstructionParams {
        ConstructionParams::new(k, r).unwrap()
    }

    #[test]
    fn regular_subgroups_of_a_regular_group() {
        let c8 = PermGroup::new(
            8,
            vec![Permutation::from_cycles(&[vec![0, 1, 2, 3, 4, 5, 6, 7]], 8).unwrap()],
        )
        .unwrap();
        let subs = find_regular_subgroups(&c8, 1000).unwrap();
        assert_eq!(subs.len(), 1);
        assert!(subs[0].is_same_group(&c8).unwrap());
    }

    #[test]
    fn regular_subgroups_of_the_degree8_ambient_group() {
        let b = build(params(1, 1));
        let subs = find_regular_subgroups(&b.g, 1000).unwrap();
        // exactly the two cyclic regular subgroups
        assert_eq!(subs.len(), 2);
        assert!(subs.iter().any(|s| s.is_same_group(&b.r1).unwrap()));
        assert!(subs.iter().any(|s| s.is_same_group(&b.r2).unwrap()));
        for s in &subs {
            assert!(s.is_regular());
            assert!(s.is_subgroup_of(&b.g).unwrap());
        }
        let classes = classify_conjugacy(&b.g, &subs, 1000).unwrap();
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn conjugate_copies_land_in_one_class() {
        let b = build(params(1, 1));
        let x = b.tau2.clone();
        let conj = PermGroup::new(
            8,
            b.r1.generators()
                .iter()
                .map(|g| g.conjugate(&x).unwrap())
                .collect(),
        )
        .unwrap();
        let classes = classify_conjugacy(&b.g, &[b.r1.clone(), conj], 1000).unwrap();
        assert_eq!(classes.len(), 1);
    }

    #[test]
    fn cayley_arcs_of_directed_cycle() {
        let c8 = AbstractGroup::cyclic(8);
        let arcs = cayley_arcs(&c8, &BTreeSet::from([1])).unwrap();
        assert_eq!(arcs.len(), 8);
        assert!(arcs.contains(0, 1));
        assert!(arcs.contains(1, 2));
        assert!(cayley_arcs(&c8, &BTreeSet::from([0])).is_err());
    }

    #[test]
    fn embedding_realizes_right_translation() {
        let b = build(params(1, 1));
        let (table, elems) = to_abstract(&b.r1, 100).unwrap();
        let emb = RegularEmbedding::of(&b.r1, 0, &elems).unwrap();
        assert_eq!(emb.labels[0], table.identity());
        for a in 0..elems.len() {
            for (bidx, pb) in elems.iter().enumerate() {
                let moved = pb.image_of(emb.points[a]);
                assert_eq!(emb.labels[moved], table.mul(a, bidx));
            }
        }
    }

    #[test]
    fn dci_brute_small_cyclic_groups() {
        assert!(dci_brute(&AbstractGroup::cyclic(2), 1).unwrap().is_empty());
        assert!(dci_brute(&AbstractGroup::cyclic(3), 2).unwrap().is_empty());
        assert!(dci_brute(&AbstractGroup::cyclic(5), 4).unwrap().is_empty());
    }

    #[test]
    fn dci_brute_c8_finds_violations() {
        let violations = dci_brute(&AbstractGroup::cyclic(8), 7).unwrap();
        assert!(!violations.is_empty());
        for (s, t) in &violations {
            assert_eq!(s.len(), t.len());
        }
    }

    #[test]
    fn refutation_pipeline_degree8() {
        let cert = babai_refutation(params(1, 1), &PipelineConfig::default()).unwrap();
        assert_eq!(cert.degree, 8);
        assert_eq!(cert.aut_count, 4);
        let report = verify_certificate(&cert);
        assert!(report.passed, "reasons: {:?}", report.reasons);
    }

    #[test]
    fn certificate_tampering_is_caught() {
        let cert = babai_refutation(params(1, 1), &PipelineConfig::default()).unwrap();

        // swap one element of T
        let mut tampered = cert.clone();
        if let ConnectionSets::Single(t) = &mut tampered.witness.t {
            let old = t[0];
            let replacement = (1..8).find(|x| !t.contains(x)).unwrap();
            t[0] = replacement;
            assert_ne!(old, replacement);
        }
        assert!(!verify_certificate(&tampered).passed);

        // identity iso with S != T
        let mut tampered = cert.clone();
        tampered.witness.iso = (0..8).collect();
        let report = verify_certificate(&tampered);
        assert!(!report.passed);

        // S = T refutes nothing
        let mut tampered = cert.clone();
        tampered.witness.t = tampered.witness.s.clone();
        let report = verify_certificate(&tampered);
        assert!(!report.passed);
        assert!(report
            .checks
            .iter()
            .any(|(name, ok)| name == "no_automorphism_maps_s_to_t" && !ok));
    }

    #[test]
    fn certificate_json_roundtrip_is_byte_stable() {
        let cert = babai_refutation(params(1, 1), &PipelineConfig::default()).unwrap();
        let json = certificate_to_json(&cert);
        let parsed = certificate_from_json(&json).unwrap();
        assert_eq!(parsed, cert);
        assert_eq!(certificate_to_json(&parsed), json);
    }

    #[test]
    fn cross_validation_links_pipeline_and_oracle() {
        let cv = cross_validate(params(1, 1), &PipelineConfig::default()).unwrap();
        assert!(cv.matched);
        assert!(cv.brute_violations > 0);
        assert!(cross_validate(params(3, 1), &PipelineConfig::default()).is_err());
    }
}
