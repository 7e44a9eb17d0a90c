//! Orbital colorings, 2-closures and digraph symmetry.
//!
//! The orbital coloring of a group paints every ordered pair of points by
//! its orbit under the group action; the color-preserving automorphisms of
//! that coloring form the 2-closure. Arc sets pick out unions of
//! off-diagonal color classes and give single-digraph witnesses.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{decode, Permutation};
use crate::refine::{all_color_automorphisms, first_color_isomorphism, PairColoring};

/// Default node budget for the backtracking searches.
pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

/// Degree ceiling for closure and digraph searches.
pub const SEARCH_DEGREE_CAP: usize = 64;

/// The coloring of ordered pairs by group orbitals. Colors are numbered by
/// first appearance in a row-major scan, so the numbering is stable across
/// runs and platforms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitalColoring {
    degree: usize,
    color_count: usize,
    matrix: Vec<u16>,
}

impl OrbitalColoring {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn color_count(&self) -> usize {
        self.color_count
    }

    #[inline]
    pub fn of(&self, u: usize, v: usize) -> u16 {
        self.matrix[u * self.degree + v]
    }

    /// True iff the color occurs on the diagonal (diagonal classes never
    /// mix with off-diagonal ones).
    pub fn is_diagonal_color(&self, color: u16) -> bool {
        (0..self.degree).any(|u| self.of(u, u) == color)
    }

    /// Off-diagonal colors, ascending.
    pub fn off_diagonal_colors(&self) -> Vec<u16> {
        (0..self.color_count as u16)
            .filter(|&c| !self.is_diagonal_color(c))
            .collect()
    }

    /// All pairs of one color class, row-major order.
    pub fn class_pairs(&self, color: u16) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.degree {
            for v in 0..self.degree {
                if self.of(u, v) == color {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn to_pair_coloring(&self) -> PairColoring {
        PairColoring {
            n: self.degree,
            matrix: self.matrix.clone(),
        }
    }
}

/// Computes the orbital coloring of `g` by flooding pair orbits from each
/// unvisited pair in row-major order.
pub fn orbital_coloring(g: &PermGroup) -> OrbitalColoring {
    let n = g.degree();
    let mut matrix = vec![u16::MAX; n * n];
    let mut next_color: u16 = 0;
    let mut queue: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if matrix[u * n + v] != u16::MAX {
                continue;
            }
            let color = next_color;
            next_color += 1;
            matrix[u * n + v] = color;
            queue.clear();
            queue.push((u, v));
            let mut head = 0;
            while head < queue.len() {
                let (a, b) = queue[head];
                head += 1;
                for gen in g.generators() {
                    let (x, y) = (gen.image_of(a), gen.image_of(b));
                    if matrix[x * n + y] == u16::MAX {
                        matrix[x * n + y] = color;
                        queue.push((x, y));
                    }
                }
            }
        }
    }
    OrbitalColoring {
        degree: n,
        color_count: next_color as usize,
        matrix,
    }
}

/// The full group of color-preserving permutations of the coloring.
pub fn color_automorphisms(c: &OrbitalColoring, node_cap: u64) -> Result<PermGroup> {
    if c.degree > SEARCH_DEGREE_CAP {
        return Err(Error::Capacity(format!(
            "automorphism search limited to degree {}",
            SEARCH_DEGREE_CAP
        )));
    }
    let found = all_color_automorphisms(&c.to_pair_coloring(), node_cap)?;
    Ok(reduce_to_group(c.degree, found))
}

/// Greedy generator reduction: keep an element only when it is not already
/// generated by the kept ones.
fn reduce_to_group(degree: usize, elems: Vec<Permutation>) -> PermGroup {
    let mut gens: Vec<Permutation> = Vec::new();
    let mut group = PermGroup::trivial(degree);
    for e in elems {
        if !group.contains(&e).expect("equal degrees") {
            gens.push(e);
            group = PermGroup::new(degree, gens.clone()).expect("equal degrees");
        }
    }
    group
}

/// The 2-closure: the automorphism group of the orbital coloring. Always
/// contains `g`.
pub fn two_closure(g: &PermGroup) -> Result<PermGroup> {
    two_closure_capped(g, DEFAULT_NODE_CAP)
}

pub fn two_closure_capped(g: &PermGroup, node_cap: u64) -> Result<PermGroup> {
    color_automorphisms(&orbital_coloring(g), node_cap)
}

/// Definitional oracle for small degrees: filter all `degree!` permutations
/// for orbital preservation.
pub fn brute_two_closure(g: &PermGroup) -> Result<PermGroup> {
    let n = g.degree();
    if n > 8 {
        return Err(Error::Capacity(
            "brute-force closure limited to degree 8".into(),
        ));
    }
    let coloring = orbital_coloring(g);
    let mut kept = Vec::new();
    let mut images: Vec<usize> = (0..n).collect();
    loop {
        if preserves_coloring(&coloring, &images) {
            kept.push(
                Permutation::from_images(images.clone()).expect("permutation by construction"),
            );
        }
        if !next_permutation(&mut images) {
            break;
        }
    }
    Ok(reduce_to_group(n, kept))
}

fn preserves_coloring(c: &OrbitalColoring, images: &[usize]) -> bool {
    let n = c.degree();
    for u in 0..n {
        for v in 0..n {
            if c.of(u, v) != c.of(images[u], images[v]) {
                return false;
            }
        }
    }
    true
}

/// Lexicographic next permutation; false when wrapped around.
fn next_permutation(arr: &mut [usize]) -> bool {
    if arr.len() < 2 {
        return false;
    }
    let mut i = arr.len() - 1;
    while i > 0 && arr[i - 1] >= arr[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = arr.len() - 1;
    while arr[j] <= arr[i - 1] {
        j -= 1;
    }
    arr.swap(i - 1, j);
    arr[i..].reverse();
    true
}

/// A loop-free set of ordered arcs on `0..degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcSet {
    degree: usize,
    arcs: BTreeSet<(usize, usize)>,
}

impl ArcSet {
    pub fn new(degree: usize) -> Self {
        ArcSet {
            degree,
            arcs: BTreeSet::new(),
        }
    }

    pub fn from_arcs<I: IntoIterator<Item = (usize, usize)>>(
        degree: usize,
        arcs: I,
    ) -> Result<Self> {
        let mut set = ArcSet::new(degree);
        for (u, v) in arcs {
            set.insert(u, v)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.degree || v >= self.degree {
            return Err(Error::PointOutOfRange {
                point: u.max(v),
                degree: self.degree,
            });
        }
        if u == v {
            return Err(Error::Domain("loops are not allowed in arc sets".into()));
        }
        self.arcs.insert((u, v));
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.arcs.contains(&(u, v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    /// Out-neighbors of `u`, ascending.
    pub fn out_neighbors(&self, u: usize) -> Vec<usize> {
        self.arcs
            .range((u, 0)..(u, self.degree))
            .map(|&(_, v)| v)
            .collect()
    }

    /// Image of the arc set under a permutation of its points.
    pub fn map_points(&self, p: &Permutation) -> Result<ArcSet> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, p.degree()));
        }
        ArcSet::from_arcs(
            self.degree,
            self.arcs
                .iter()
                .map(|&(u, v)| (p.image_of(u), p.image_of(v))),
        )
    }

    fn to_pair_coloring(&self) -> PairColoring {
        // fixed semantics: 0 = diagonal, 1 = arc, 2 = non-arc
        let n = self.degree;
        let mut matrix = vec![2u16; n * n];
        for u in 0..n {
            matrix[u * n + u] = 0;
        }
        for &(u, v) in &self.arcs {
            matrix[u * n + v] = 1;
        }
        PairColoring { n, matrix }
    }

    /// DOT rendering; vertices are labeled by coordinate triples when
    /// `(k, r)` is supplied.
    pub fn to_dot(&self, kr: Option<(usize, usize)>) -> String {
        let mut out = String::from("digraph witness {\n");
        for v in 0..self.degree {
            let label = match kr {
                Some((k, r)) => decode(v, k, r)
                    .map(|c| c.to_string())
                    .unwrap_or_else(|_| v.to_string()),
                None => v.to_string(),
            };
            out.push_str(&format!("  {} [label=\"{}\"];\n", v, label));
        }
        for &(u, v) in &self.arcs {
            out.push_str(&format!("  {} -> {};\n", u, v));
        }
        out.push_str("}\n");
        out
    }

    /// Adjacency-list text: the degree, then one `u v` line per arc.
    pub fn to_adjacency_text(&self) -> String {
        let mut out = format!("{}\n", self.degree);
        for &(u, v) in &self.arcs {
            out.push_str(&format!("{} {}\n", u, v));
        }
        out
    }
}

/// Union of chosen off-diagonal color classes as an arc set.
pub fn arcs_of_colors(c: &OrbitalColoring, colors: &[u16]) -> Result<ArcSet> {
    for &color in colors {
        if color as usize >= c.color_count() {
            return Err(Error::Domain(format!("no color {}", color)));
        }
        if c.is_diagonal_color(color) {
            return Err(Error::Domain(format!(
                "color {} is diagonal and cannot enter an arc set",
                color
            )));
        }
    }
    let mut set = ArcSet::new(c.degree());
    for u in 0..c.degree() {
        for v in 0..c.degree() {
            if u != v && colors.contains(&c.of(u, v)) {
                set.insert(u, v)?;
            }
        }
    }
    Ok(set)
}

/// Decides whether the arc set has exactly `target` automorphisms, giving
/// up as soon as more than `target` are found. Cheaper than a full
/// enumeration when the answer is no.
pub fn digraph_automorphism_count_is(a: &ArcSet, target: u128, node_cap: u64) -> Result<bool> {
    if a.degree() > SEARCH_DEGREE_CAP {
        return Err(Error::Capacity(format!(
            "automorphism search limited to degree {}",
            SEARCH_DEGREE_CAP
        )));
    }
    let cap = usize::try_from(target).unwrap_or(usize::MAX);
    let (found, complete) =
        crate::refine::color_automorphisms_capped(&a.to_pair_coloring(), node_cap, cap)?;
    Ok(complete && found.len() as u128 == target)
}

/// All permutations mapping the arc set onto itself.
pub fn digraph_automorphisms(a: &ArcSet, node_cap: u64) -> Result<PermGroup> {
    if a.degree() > SEARCH_DEGREE_CAP {
        return Err(Error::Capacity(format!(
            "automorphism search limited to degree {}",
            SEARCH_DEGREE_CAP
        )));
    }
    let found = all_color_automorphisms(&a.to_pair_coloring(), node_cap)?;
    Ok(reduce_to_group(a.degree(), found))
}

/// A permutation carrying the arcs of `a` exactly onto the arcs of `b`, if
/// one exists.
pub fn digraph_isomorphism(a: &ArcSet, b: &ArcSet, node_cap: u64) -> Result<Option<Permutation>> {
    if a.degree() != b.degree() {
        return Err(Error::DegreeMismatch(a.degree(), b.degree()));
    }
    if a.degree() > SEARCH_DEGREE_CAP {
        return Err(Error::Capacity(format!(
            "isomorphism search limited to degree {}",
            SEARCH_DEGREE_CAP
        )));
    }
    if a.len() != b.len() {
        return Ok(None);
    }
    first_color_isomorphism(&a.to_pair_coloring(), &b.to_pair_coloring(), node_cap)
}
