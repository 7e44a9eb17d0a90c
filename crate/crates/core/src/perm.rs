//! Permutations on `0..n` and the coordinate encoding for points of
//! `Z8 x Zk x Zr`.
//!
//! Action convention used across the whole crate: permutations act on the
//! right, written `x^p`, and composition is left-to-right, so
//! `x^(p*q) = (x^p)^q`. Conjugation is `p^g = g^-1 * p * g`. Every
//! permutation carries its degree; operations on mixed degrees are hard
//! errors, never implicit extensions.

use std::fmt;

use crate::error::{Error, Result};

/// A coordinate triple `(i, j, l)` with `i` mod 8, `j` mod `k`, `l` mod `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TripleCoord {
    pub i: usize,
    pub j: usize,
    pub ell: usize,
}

impl TripleCoord {
    pub fn new(i: usize, j: usize, ell: usize) -> Self {
        TripleCoord { i, j, ell }
    }
}

impl fmt::Display for TripleCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i, self.j, self.ell)
    }
}

/// Flattens a triple to a point as `i + 8*j + 8*k*l`.
///
/// This is the single canonical layout used by file formats and
/// certificates; it is bijective onto `0..8*k*r`.
pub fn encode(c: TripleCoord, k: usize, r: usize) -> Result<usize> {
    if k == 0 || r == 0 {
        return Err(Error::InvalidParams("k and r must be positive".into()));
    }
    if c.i >= 8 || c.j >= k || c.ell >= r {
        return Err(Error::Domain(format!(
            "coordinate {} out of range for (k, r) = ({}, {})",
            c, k, r
        )));
    }
    Ok(c.i + 8 * c.j + 8 * k * c.ell)
}

/// Inverse of [`encode`].
pub fn decode(p: usize, k: usize, r: usize) -> Result<TripleCoord> {
    if k == 0 || r == 0 {
        return Err(Error::InvalidParams("k and r must be positive".into()));
    }
    if p >= 8 * k * r {
        return Err(Error::PointOutOfRange {
            point: p,
            degree: 8 * k * r,
        });
    }
    Ok(TripleCoord {
        i: p % 8,
        j: (p / 8) % k,
        ell: p / (8 * k),
    })
}

/// A bijection on `0..degree`, stored as its image array: `images[x]` is
/// the image of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from its image array, rejecting non-bijections.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n {
                return Err(Error::PointOutOfRange {
                    point: y,
                    degree: n,
                });
            }
            if seen[y] {
                return Err(Error::InvalidPermutation(format!(
                    "image {} appears twice",
                    y
                )));
            }
            seen[y] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds the permutation whose nontrivial cycles are exactly `cycles`.
    /// Cycles must be disjoint and every point must be below `degree`.
    pub fn from_cycles(cycles: &[Vec<usize>], degree: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for &p in cycle {
                if p >= degree {
                    return Err(Error::PointOutOfRange { point: p, degree });
                }
                if used[p] {
                    return Err(Error::InvalidPermutation(format!(
                        "point {} repeated across cycles",
                        p
                    )));
                }
                used[p] = true;
            }
            if cycle.len() < 2 {
                continue;
            }
            for w in 0..cycle.len() {
                images[cycle[w]] = cycle[(w + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// The image `x^p`.
    #[inline]
    pub fn image_of(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn into_images(self) -> Vec<usize> {
        self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Left-to-right composition: the result maps `x` to `(x^self)^other`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(Permutation {
            images: self.images.iter().map(|&y| other.images[y]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        Permutation { images }
    }

    /// Conjugation `g^-1 * self * g`.
    pub fn conjugate(&self, g: &Permutation) -> Result<Permutation> {
        if self.degree() != g.degree() {
            return Err(Error::DegreeMismatch(self.degree(), g.degree()));
        }
        let ginv = g.inverse();
        ginv.compose(self)?.compose(g)
    }

    /// `self^e` for any integer exponent, negative meaning inverse powers.
    pub fn power(&self, e: i64) -> Permutation {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut result = Permutation::identity(self.degree());
        for _ in 0..e.unsigned_abs() {
            result = result.compose(&base).expect("equal degrees");
        }
        result
    }

    /// The multiplicative order, computed as the lcm of cycle lengths.
    pub fn order(&self) -> u64 {
        let mut acc: u64 = 1;
        for cycle in self.cycles_with_fixed() {
            acc = lcm(acc, cycle.len() as u64);
        }
        acc
    }

    /// Nontrivial cycles, each starting at its minimum point, sorted by
    /// that minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.cycles_with_fixed()
            .into_iter()
            .filter(|c| c.len() > 1)
            .collect()
    }

    fn cycles_with_fixed(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Sorted multiset of nontrivial cycle lengths.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        lens.sort_unstable();
        lens
    }

    /// The smallest point moved by this permutation, if any.
    pub fn min_moved_point(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|(x, &y)| *x != y)
            .map(|(x, _)| x)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (idx, p) in cycle.iter().enumerate() {
                if idx > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}
