//! Backtracking search for color-preserving bijections between square
//! pair-colorings, by lockstep ordered-partition refinement.
//!
//! The same engine answers both questions we need: enumerate every
//! automorphism of one coloring, or find a single isomorphism between two
//! colorings. Cells are refined by out/in color counts against every cell;
//! the branching rule individualizes the minimum point of the smallest
//! nontrivial cell, so the search order (and therefore every output) is
//! deterministic.

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// A full coloring of ordered pairs over `0..n`.
#[derive(Debug, Clone)]
pub(crate) struct PairColoring {
    pub n: usize,
    /// Row-major `n * n` matrix.
    pub matrix: Vec<u16>,
}

impl PairColoring {
    #[inline]
    fn of(&self, u: usize, v: usize) -> u16 {
        self.matrix[u * self.n + v]
    }
}

type Cells = Vec<Vec<usize>>;

struct Searcher<'a> {
    src: &'a PairColoring,
    dst: &'a PairColoring,
    collect_all: bool,
    nodes: u64,
    node_cap: u64,
    /// Abandon the search once more than this many maps are found.
    found_cap: usize,
    truncated: bool,
    found: Vec<Permutation>,
    done: bool,
}

/// Per-vertex refinement signature: for every cell, the multiset of
/// (color, out-count, in-count) triples it induces. Plain sorted vectors
/// keep comparisons canonical on both sides of the search.
type Signature = Vec<(u16, u32, u32)>;

fn vertex_signature(coloring: &PairColoring, cells: &Cells, u: usize) -> Vec<Signature> {
    let mut sigs = Vec::with_capacity(cells.len());
    for cell in cells {
        let mut counts: Vec<(u16, u32, u32)> = Vec::new();
        for &w in cell {
            let out = coloring.of(u, w);
            let inn = coloring.of(w, u);
            bump(&mut counts, out, true);
            bump(&mut counts, inn, false);
        }
        counts.sort_unstable();
        sigs.push(counts);
    }
    sigs
}

fn bump(counts: &mut Vec<(u16, u32, u32)>, color: u16, is_out: bool) {
    match counts.iter_mut().find(|(c, _, _)| *c == color) {
        Some(entry) => {
            if is_out {
                entry.1 += 1;
            } else {
                entry.2 += 1;
            }
        }
        None => counts.push(if is_out { (color, 1, 0) } else { (color, 0, 1) }),
    }
}

/// One lockstep refinement round. Returns false when the two partitions
/// cannot correspond (prune).
fn refine_round(
    src: &PairColoring,
    dst: &PairColoring,
    p: &mut Cells,
    q: &mut Cells,
) -> Option<bool> {
    let mut changed = false;
    let mut new_p: Cells = Vec::with_capacity(p.len());
    let mut new_q: Cells = Vec::with_capacity(q.len());
    for (cell_p, cell_q) in p.iter().zip(q.iter()) {
        if cell_p.len() != cell_q.len() {
            return None;
        }
        if cell_p.len() == 1 {
            new_p.push(cell_p.clone());
            new_q.push(cell_q.clone());
            continue;
        }
        let mut groups_p: Vec<(Vec<Signature>, Vec<usize>)> = Vec::new();
        for &u in cell_p {
            let sig = vertex_signature(src, p, u);
            match groups_p.iter_mut().find(|(s, _)| *s == sig) {
                Some((_, members)) => members.push(u),
                None => groups_p.push((sig, vec![u])),
            }
        }
        let mut groups_q: Vec<(Vec<Signature>, Vec<usize>)> = Vec::new();
        for &u in cell_q {
            let sig = vertex_signature(dst, q, u);
            match groups_q.iter_mut().find(|(s, _)| *s == sig) {
                Some((_, members)) => members.push(u),
                None => groups_q.push((sig, vec![u])),
            }
        }
        if groups_p.len() != groups_q.len() {
            return None;
        }
        groups_p.sort_by(|a, b| a.0.cmp(&b.0));
        groups_q.sort_by(|a, b| a.0.cmp(&b.0));
        for ((sig_p, members_p), (sig_q, members_q)) in groups_p.iter().zip(groups_q.iter()) {
            if sig_p != sig_q || members_p.len() != members_q.len() {
                return None;
            }
        }
        if groups_p.len() > 1 {
            changed = true;
        }
        for ((_, members_p), (_, members_q)) in groups_p.into_iter().zip(groups_q) {
            new_p.push(members_p);
            new_q.push(members_q);
        }
    }
    *p = new_p;
    *q = new_q;
    Some(changed)
}

impl<'a> Searcher<'a> {
    fn recurse(&mut self, mut p: Cells, mut q: Cells) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(Error::Budget(self.nodes));
        }
        loop {
            match refine_round(self.src, self.dst, &mut p, &mut q) {
                None => return Ok(()), // incompatible, prune
                Some(true) => continue,
                Some(false) => break,
            }
        }
        // find the smallest nontrivial cell
        let target = p
            .iter()
            .enumerate()
            .filter(|(_, cell)| cell.len() > 1)
            .min_by_key(|(idx, cell)| (cell.len(), *idx))
            .map(|(idx, _)| idx);
        match target {
            None => {
                // all singletons: candidate bijection
                let mut images = vec![0usize; self.src.n];
                for (cell_p, cell_q) in p.iter().zip(q.iter()) {
                    images[cell_p[0]] = cell_q[0];
                }
                let perm = Permutation::from_images(images).expect("cells partition the points");
                if self.is_color_preserving(&perm) {
                    self.found.push(perm);
                    if !self.collect_all {
                        self.done = true;
                    } else if self.found.len() > self.found_cap {
                        self.truncated = true;
                        self.done = true;
                    }
                }
                Ok(())
            }
            Some(t) => {
                let u = p[t][0];
                let candidates = q[t].clone();
                for w in candidates {
                    let (np, nq) = individualize(&p, &q, t, u, w);
                    self.recurse(np, nq)?;
                    if self.done {
                        return Ok(());
                    }
                }
                Ok(())
            }
        }
    }

    fn is_color_preserving(&self, perm: &Permutation) -> bool {
        let n = self.src.n;
        for u in 0..n {
            let pu = perm.image_of(u);
            for v in 0..n {
                if self.src.of(u, v) != self.dst.of(pu, perm.image_of(v)) {
                    return false;
                }
            }
        }
        true
    }
}

fn individualize(p: &Cells, q: &Cells, t: usize, u: usize, w: usize) -> (Cells, Cells) {
    let mut np = Vec::with_capacity(p.len() + 1);
    let mut nq = Vec::with_capacity(q.len() + 1);
    for (idx, (cell_p, cell_q)) in p.iter().zip(q.iter()).enumerate() {
        if idx == t {
            np.push(vec![u]);
            nq.push(vec![w]);
            np.push(cell_p.iter().copied().filter(|&x| x != u).collect());
            nq.push(cell_q.iter().copied().filter(|&x| x != w).collect());
        } else {
            np.push(cell_p.clone());
            nq.push(cell_q.clone());
        }
    }
    (np, nq)
}

fn run(
    src: &PairColoring,
    dst: &PairColoring,
    collect_all: bool,
    node_cap: u64,
    found_cap: usize,
) -> Result<(Vec<Permutation>, bool)> {
    if src.n != dst.n {
        return Ok((Vec::new(), true));
    }
    if src.n == 0 {
        return Ok((vec![Permutation::identity(0)], true));
    }
    let mut searcher = Searcher {
        src,
        dst,
        collect_all,
        nodes: 0,
        node_cap,
        found_cap,
        truncated: false,
        found: Vec::new(),
        done: false,
    };
    let p: Cells = vec![(0..src.n).collect()];
    let q: Cells = vec![(0..dst.n).collect()];
    searcher.recurse(p, q)?;
    Ok((searcher.found, !searcher.truncated))
}

/// Every permutation preserving the coloring, in deterministic search order.
pub(crate) fn all_color_automorphisms(
    coloring: &PairColoring,
    node_cap: u64,
) -> Result<Vec<Permutation>> {
    Ok(run(coloring, coloring, true, node_cap, usize::MAX)?.0)
}

/// Like [`all_color_automorphisms`] but gives up once more than
/// `found_cap` automorphisms exist. The boolean reports whether the
/// enumeration ran to completion.
pub(crate) fn color_automorphisms_capped(
    coloring: &PairColoring,
    node_cap: u64,
    found_cap: usize,
) -> Result<(Vec<Permutation>, bool)> {
    run(coloring, coloring, true, node_cap, found_cap)
}

/// The first color-preserving bijection from `src` onto `dst`, if any.
pub(crate) fn first_color_isomorphism(
    src: &PairColoring,
    dst: &PairColoring,
    node_cap: u64,
) -> Result<Option<Permutation>> {
    Ok(run(src, dst, false, node_cap, usize::MAX)?
        .0
        .into_iter()
        .next())
}
