//! Finitely generated permutation groups backed by a stabilizer chain
//! (base and strong generating set).
//!
//! The chain is built on demand and cached; after construction every query
//! is read-only. Chain construction sifts random generator products first
//! and then runs a deterministic Schreier-generator fixpoint pass, so the
//! finished chain is exact regardless of what the random phase found.

use std::collections::HashSet;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// How many consecutive successful random sifts end the warm-up phase.
const RANDOM_SIFT_STREAK: u32 = 16;
const RANDOM_SIFT_MAX_ROUNDS: u32 = 256;

#[derive(Debug, Clone)]
struct Level {
    base: usize,
    /// Strong generators whose sift depth is exactly this level. The full
    /// generating set of this level's stabilizer subgroup is the union of
    /// `gens` over this and all deeper levels.
    gens: Vec<Permutation>,
    /// `transversal[x]` maps the base point to `x`; paired with its inverse.
    transversal: Vec<Option<(Permutation, Permutation)>>,
    /// Orbit of the base point, ascending.
    orbit: Vec<usize>,
}

impl Level {
    fn new(degree: usize, base: usize) -> Self {
        Level {
            base,
            gens: Vec::new(),
            transversal: vec![None; degree],
            orbit: Vec::new(),
        }
    }
}

/// Base, strong generators and transversals for a permutation group.
#[derive(Debug, Clone)]
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    /// Builds a chain for the group generated by `gens`.
    pub fn build(degree: usize, gens: &[Permutation], seed: u64) -> StabilizerChain {
        let mut chain = StabilizerChain {
            degree,
            levels: Vec::new(),
        };
        let clean: Vec<Permutation> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in &clean {
            chain.insert_generator(g.clone());
        }
        if clean.len() > 1 {
            chain.random_warmup(&clean, seed);
        }
        chain.complete();
        chain
    }

    fn random_warmup(&mut self, gens: &[Permutation], seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<Permutation> = gens.to_vec();
        let mut streak = 0u32;
        let mut rounds = 0u32;
        while streak < RANDOM_SIFT_STREAK && rounds < RANDOM_SIFT_MAX_ROUNDS {
            rounds += 1;
            let a = &pool[rng.gen_range(0..pool.len())];
            let b = &pool[rng.gen_range(0..pool.len())];
            let w = a.compose(b).expect("equal degrees");
            let (_, residue) = self.strip_from(0, w);
            if residue.is_identity() {
                streak += 1;
            } else {
                streak = 0;
                pool.push(residue.clone());
                self.insert_generator(residue);
            }
        }
    }

    /// Strips `p` through levels `start..`, returning the level where
    /// sifting stopped and the residue. A residue of identity means
    /// membership in the subgroup at `start`.
    fn strip_from(&self, start: usize, p: Permutation) -> (usize, Permutation) {
        let mut residue = p;
        for i in start..self.levels.len() {
            let level = &self.levels[i];
            let x = residue.image_of(level.base);
            match &level.transversal[x] {
                None => return (i, residue),
                Some((_, u_inv)) => {
                    residue = residue.compose(u_inv).expect("equal degrees");
                }
            }
        }
        (self.levels.len(), residue)
    }

    /// Inserts a generator at its sift depth and refreshes the orbits it
    /// can influence. Does not restore the Schreier condition; `complete`
    /// does that.
    fn insert_generator(&mut self, p: Permutation) -> bool {
        let (lvl, residue) = self.strip_from(0, p);
        if residue.is_identity() {
            return false;
        }
        if lvl == self.levels.len() {
            let base = residue.min_moved_point().expect("non-identity residue");
            self.levels.push(Level::new(self.degree, base));
        }
        self.levels[lvl].gens.push(residue);
        for i in 0..=lvl {
            self.recompute_orbit(i);
        }
        true
    }

    /// Generators of the stabilizer subgroup at `level`: everything stored
    /// at this level or deeper.
    fn level_gens(&self, level: usize) -> Vec<Permutation> {
        self.levels[level..]
            .iter()
            .flat_map(|l| l.gens.iter().cloned())
            .collect()
    }

    fn recompute_orbit(&mut self, level: usize) {
        let gens = self.level_gens(level);
        let base = self.levels[level].base;
        let degree = self.degree;
        let mut transversal: Vec<Option<(Permutation, Permutation)>> = vec![None; degree];
        let id = Permutation::identity(degree);
        transversal[base] = Some((id.clone(), id));
        let mut queue = vec![base];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            let u_x = transversal[x]
                .as_ref()
                .expect("queued point has rep")
                .0
                .clone();
            for s in &gens {
                let y = s.image_of(x);
                if transversal[y].is_none() {
                    let u_y = u_x.compose(s).expect("equal degrees");
                    let u_y_inv = u_y.inverse();
                    transversal[y] = Some((u_y, u_y_inv));
                    queue.push(y);
                }
            }
        }
        queue.sort_unstable();
        self.levels[level].orbit = queue;
        self.levels[level].transversal = transversal;
    }

    /// Deterministic fixpoint pass: recompute every orbit, then sift every
    /// Schreier generator of every level; any failure becomes a new strong
    /// generator and the scan restarts. At the fixpoint the chain is an
    /// exact base and strong generating set.
    fn complete(&mut self) {
        loop {
            for i in 0..self.levels.len() {
                self.recompute_orbit(i);
            }
            match self.find_failing_schreier_generator() {
                None => return,
                Some((lvl, residue)) => {
                    if lvl == self.levels.len() {
                        let base = residue.min_moved_point().expect("non-identity residue");
                        self.levels.push(Level::new(self.degree, base));
                    }
                    self.levels[lvl].gens.push(residue);
                }
            }
        }
    }

    fn find_failing_schreier_generator(&self) -> Option<(usize, Permutation)> {
        for i in 0..self.levels.len() {
            let gens = self.level_gens(i);
            let level = &self.levels[i];
            for &x in &level.orbit {
                let (u_x, _) = level.transversal[x].as_ref().expect("orbit point");
                for s in &gens {
                    let y = s.image_of(x);
                    let (_, u_y_inv) = level.transversal[y].as_ref().expect("orbit closed");
                    let schreier = u_x
                        .compose(s)
                        .and_then(|p| p.compose(u_y_inv))
                        .expect("equal degrees");
                    if schreier.is_identity() {
                        continue;
                    }
                    let (lvl, residue) = self.strip_from(i + 1, schreier);
                    if !residue.is_identity() {
                        return Some((lvl, residue));
                    }
                }
            }
        }
        None
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Base points, outermost first.
    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Orbit sizes per level; their product is the group order.
    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// True iff `p` sifts to the identity.
    pub fn contains(&self, p: &Permutation) -> bool {
        if p.degree() != self.degree {
            return false;
        }
        let (_, residue) = self.strip_from(0, p.clone());
        residue.is_identity()
    }

    /// Every group element, by transversal products. The enumeration order
    /// is fixed by the chain structure.
    fn all_elements(&self) -> Vec<Permutation> {
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &x in &level.orbit {
                let (u_x, _) = level.transversal[x].as_ref().expect("orbit point");
                for e in &out {
                    next.push(e.compose(u_x).expect("equal degrees"));
                }
            }
            out = next;
        }
        out
    }
}

/// A finitely generated permutation group with a lazily built chain.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    seed: u64,
    chain: OnceLock<StabilizerChain>,
}

impl PermGroup {
    /// Group generated by `gens`; all generators must share `degree`.
    /// An empty list yields the trivial group.
    pub fn new(degree: usize, gens: Vec<Permutation>) -> Result<Self> {
        Self::new_seeded(degree, gens, 0)
    }

    pub fn new_seeded(degree: usize, gens: Vec<Permutation>, seed: u64) -> Result<Self> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }
        Ok(PermGroup {
            degree,
            generators: gens,
            seed,
            chain: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            seed: 0,
            chain: OnceLock::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn chain(&self) -> &StabilizerChain {
        self.chain
            .get_or_init(|| StabilizerChain::build(self.degree, &self.generators, self.seed))
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    /// Membership via sifting.
    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, p.degree()));
        }
        Ok(self.chain().contains(p))
    }

    /// All elements, failing if the order exceeds `cap`.
    pub fn elements(&self, cap: usize) -> Result<Vec<Permutation>> {
        if self.order() > cap as u128 {
            return Err(Error::Capacity(format!(
                "group order {} exceeds cap {}",
                self.order(),
                cap
            )));
        }
        Ok(self.chain().all_elements())
    }

    /// All elements sorted by image array; canonical regardless of how the
    /// chain was built.
    pub fn elements_sorted(&self, cap: usize) -> Result<Vec<Permutation>> {
        let mut elems = self.elements(cap)?;
        elems.sort_unstable();
        Ok(elems)
    }

    /// Orbits on points, each ascending, ordered by minimum point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut orbits = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < orbit.len() {
                let x = orbit[head];
                head += 1;
                for g in &self.generators {
                    let y = g.image_of(x);
                    if !seen[y] {
                        seen[y] = true;
                        orbit.push(y);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbits().len() == 1
    }

    /// Regular: transitive with order equal to the degree.
    pub fn is_regular(&self) -> bool {
        self.is_transitive() && self.order() == self.degree as u128
    }

    /// All elements of order exactly `m`.
    pub fn elements_of_order(&self, m: u64, cap: usize) -> Result<Vec<Permutation>> {
        Ok(self
            .elements_sorted(cap)?
            .into_iter()
            .filter(|p| p.order() == m)
            .collect())
    }

    /// True iff every generator of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &PermGroup) -> Result<bool> {
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equality as subgroups of the symmetric group: same order and mutual
    /// generator membership.
    pub fn is_same_group(&self, other: &PermGroup) -> Result<bool> {
        Ok(self.order() == other.order() && self.is_subgroup_of(other)?)
    }
}

/// Searches `g` exhaustively for an element conjugating `a` onto `b`,
/// i.e. some `x` with `a^x = b`. Both must be subgroups of `g`.
pub fn are_conjugate_subgroups(
    g: &PermGroup,
    a: &PermGroup,
    b: &PermGroup,
    cap: usize,
) -> Result<Option<Permutation>> {
    if !(a.is_subgroup_of(g)? && b.is_subgroup_of(g)?) {
        return Err(Error::Domain(
            "conjugacy test requires both subgroups inside the ambient group".into(),
        ));
    }
    if a.order() != b.order() {
        return Ok(None);
    }
    for x in g.elements_sorted(cap)? {
        if conjugates_onto(a, b, &x)? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

fn conjugates_onto(a: &PermGroup, b: &PermGroup, x: &Permutation) -> Result<bool> {
    for gen in a.generators() {
        if !b.contains(&gen.conjugate(x)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Breadth-first closure of a generator set; the independent oracle used to
/// cross-check chain orders. Fails once more than `cap` elements appear.
pub fn exhaustive_closure(gens: &[Permutation], cap: usize) -> Result<Vec<Permutation>> {
    let degree = gens.first().map_or(0, |g| g.degree());
    for g in gens {
        if g.degree() != degree {
            return Err(Error::DegreeMismatch(degree, g.degree()));
        }
    }
    let id = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::new();
    seen.insert(id.clone());
    let mut out = vec![id];
    let mut head = 0;
    while head < out.len() {
        let current = out[head].clone();
        head += 1;
        for g in gens {
            let next = current.compose(g)?;
            if !seen.contains(&next) {
                if out.len() + 1 > cap {
                    return Err(Error::Capacity(format!("closure exceeds cap {}", cap)));
                }
                seen.insert(next.clone());
                out.push(next);
            }
        }
    }
    Ok(out)
}
