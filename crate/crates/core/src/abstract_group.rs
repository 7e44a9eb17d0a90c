//! Abstract finite groups as multiplication tables over element indices,
//! with isomorphism and automorphism search by backtracking over generator
//! images, plus a catalog of named small groups.
//!
//! Table convention matches the permutation side: `mul(a, b)` is "a then
//! b", so `to_abstract` of a permutation group satisfies
//! `mul(a, b) = index(compose(elem_a, elem_b))`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;

/// Backtracking ceiling for isomorphism and automorphism searches.
pub const ABSTRACT_ORDER_CAP: usize = 64;

/// A finite group given by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractGroup {
    order: usize,
    /// Row-major: `table[a * order + b]` is the index of `a * b`.
    table: Vec<usize>,
    identity: usize,
}

impl AbstractGroup {
    /// Validates and wraps a multiplication table. Associativity is checked
    /// exhaustively up to order 64.
    pub fn from_table(order: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 || table.len() != order * order {
            return Err(Error::InvalidParams(format!(
                "table length {} does not match order {}",
                table.len(),
                order
            )));
        }
        if let Some(&bad) = table.iter().find(|&&x| x >= order) {
            return Err(Error::InvalidParams(format!(
                "table entry {} out of range",
                bad
            )));
        }
        let g = AbstractGroup {
            order,
            table,
            identity: 0,
        };
        let identity = (0..order)
            .find(|&e| (0..order).all(|a| g.raw_mul(e, a) == a && g.raw_mul(a, e) == a))
            .ok_or_else(|| Error::InvalidParams("table has no identity".into()))?;
        let g = AbstractGroup { identity, ..g };
        if !g.is_latin_square() {
            return Err(Error::InvalidParams("table is not a Latin square".into()));
        }
        if order <= ABSTRACT_ORDER_CAP && !g.is_associative() {
            return Err(Error::InvalidParams("table is not associative".into()));
        }
        Ok(g)
    }

    fn raw_mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        (0..self.order)
            .find(|&b| self.mul(a, b) == self.identity)
            .expect("Latin square row contains the identity")
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    pub fn is_latin_square(&self) -> bool {
        let n = self.order;
        for a in 0..n {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for b in 0..n {
                let rb = self.raw_mul(a, b);
                let cb = self.raw_mul(b, a);
                if row[rb] || col[cb] {
                    return false;
                }
                row[rb] = true;
                col[cb] = true;
            }
        }
        true
    }

    pub fn is_associative(&self) -> bool {
        let n = self.order;
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Smallest-index greedy generating set.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut generated = self.closure(&gens);
        while let Some(next) = generated.iter().position(|&inside| !inside) {
            gens.push(next);
            generated = self.closure(&gens);
        }
        gens
    }

    /// Membership mask of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.order];
        inside[self.identity] = true;
        let mut queue = vec![self.identity];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    queue.push(y);
                }
            }
        }
        inside
    }

    /// Cyclic group of order `n`, identity at index 0.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = (a + b) % n;
            }
        }
        AbstractGroup {
            order: n,
            table,
            identity: 0,
        }
    }

    /// Direct product; element `(a, b)` is indexed as `a * other.order + b`.
    pub fn direct_product(&self, other: &AbstractGroup) -> Self {
        let n = self.order * other.order;
        let mut table = vec![0; n * n];
        for a1 in 0..self.order {
            for b1 in 0..other.order {
                for a2 in 0..self.order {
                    for b2 in 0..other.order {
                        let x = a1 * other.order + b1;
                        let y = a2 * other.order + b2;
                        table[x * n + y] = self.mul(a1, a2) * other.order + other.mul(b1, b2);
                    }
                }
            }
        }
        AbstractGroup {
            order: n,
            table,
            identity: self.identity * other.order + other.identity,
        }
    }

    /// Split metacyclic group `C_m x| C_n` where the generator of `C_n`
    /// acts on `C_m` by multiplication by `s`; requires `s^n = 1 (mod m)`
    /// and `gcd(s, m) = 1`. Element `(a, i)` is indexed `a * n + i` and
    /// `(a, i)(b, j) = (a + s^i b, i + j)`.
    pub fn semidirect_cyclic(m: usize, n: usize, s: usize) -> Result<Self> {
        if m == 0 || n == 0 || gcd(s % m.max(1), m) != 1 {
            return Err(Error::InvalidParams(
                "semidirect action must be a unit of the base".into(),
            ));
        }
        let mut spow = vec![1usize % m.max(1); n + 1];
        for i in 1..=n {
            spow[i] = spow[i - 1] * s % m;
        }
        if spow[n] != 1 % m {
            return Err(Error::InvalidParams(format!(
                "action {}^{} is not trivial mod {}",
                s, n, m
            )));
        }
        let order = m * n;
        let mut table = vec![0; order * order];
        for a in 0..m {
            for (i, &si) in spow.iter().enumerate().take(n) {
                for b in 0..m {
                    for j in 0..n {
                        let x = a * n + i;
                        let y = b * n + j;
                        table[x * order + y] = ((a + si * b) % m) * n + (i + j) % n;
                    }
                }
            }
        }
        Ok(AbstractGroup {
            order,
            table,
            identity: 0,
        })
    }

    /// Dihedral group of order `2n` (symmetries of the `n`-gon).
    pub fn dihedral(n: usize) -> Self {
        Self::semidirect_cyclic(n, 2, if n == 1 { 1 } else { n - 1 })
            .expect("inversion is always an involution")
    }

    /// Dicyclic group of order `4n`: generators `a` of order `2n` and `b`
    /// with `b^2 = a^n`, `b^-1 a b = a^-1`. `n = 2` gives the quaternion
    /// group, `n = 4` the generalized quaternion group of order 16.
    pub fn dicyclic(n: usize) -> Self {
        assert!(n >= 1);
        let m = 2 * n;
        let order = 4 * n;
        // element (i, e) = a^i b^e, indexed i * 2 + e
        let mut table = vec![0; order * order];
        for i in 0..m {
            for e in 0..2 {
                for j in 0..m {
                    for f in 0..2 {
                        let x = i * 2 + e;
                        let y = j * 2 + f;
                        let (ri, re) = if e == 0 {
                            ((i + j) % m, f)
                        } else if f == 0 {
                            ((i + m - j % m) % m, 1)
                        } else {
                            ((i + m - j % m + n) % m, 0)
                        };
                        table[x * order + y] = ri * 2 + re;
                    }
                }
            }
        }
        AbstractGroup {
            order,
            table,
            identity: 0,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Converts a permutation group of order at most `cap` to its abstract
/// multiplication table. Elements are indexed in lexicographic order of
/// their image arrays, which puts the identity at index 0 and makes the
/// table canonical for the underlying element set.
pub fn to_abstract(g: &PermGroup, cap: usize) -> Result<(AbstractGroup, Vec<Permutation>)> {
    let elems = g.elements_sorted(cap)?;
    let order = elems.len();
    let index: HashMap<&Permutation, usize> =
        elems.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut table = vec![0; order * order];
    for (a, pa) in elems.iter().enumerate() {
        for (b, pb) in elems.iter().enumerate() {
            let prod = pa.compose(pb)?;
            table[a * order + b] = *index
                .get(&prod)
                .ok_or_else(|| Error::Domain("element set not closed".into()))?;
        }
    }
    debug_assert!(elems[0].is_identity());
    Ok((
        AbstractGroup {
            order,
            table,
            identity: 0,
        },
        elems,
    ))
}

/// Right-regular representation on element indices: each generator `g`
/// becomes the permutation `x -> x * g`.
pub fn regular_representation(g: &AbstractGroup) -> PermGroup {
    let gens = g
        .generating_set()
        .into_iter()
        .map(|gen| {
            Permutation::from_images((0..g.order()).map(|x| g.mul(x, gen)).collect())
                .expect("rows of a Latin square are bijections")
        })
        .collect();
    PermGroup::new(g.order(), gens).expect("equal degrees by construction")
}

/// Extends generator images to a full homomorphism by closing products,
/// returning the total map when it is a bijective homomorphism.
fn extend_homomorphism(
    g1: &AbstractGroup,
    g2: &AbstractGroup,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<usize>> {
    let n = g1.order();
    let mut map = vec![usize::MAX; n];
    map[g1.identity()] = g2.identity();
    let mut queue = vec![g1.identity()];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for (&g, &img) in gens.iter().zip(images) {
            let y = g1.mul(x, g);
            let fy = g2.mul(map[x], img);
            if map[y] == usize::MAX {
                map[y] = fy;
                queue.push(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    if map.contains(&usize::MAX) {
        return None; // gens do not generate g1
    }
    let mut hit = vec![false; g2.order()];
    for &v in &map {
        if hit[v] {
            return None;
        }
        hit[v] = true;
    }
    for a in 0..n {
        for b in 0..n {
            if map[g1.mul(a, b)] != g2.mul(map[a], map[b]) {
                return None;
            }
        }
    }
    Some(map)
}

fn search_isomorphisms(
    g1: &AbstractGroup,
    g2: &AbstractGroup,
    collect_all: bool,
) -> Vec<Vec<usize>> {
    if g1.order() != g2.order() {
        return Vec::new();
    }
    let mut orders1: Vec<usize> = (0..g1.order()).map(|a| g1.element_order(a)).collect();
    let mut orders2: Vec<usize> = (0..g2.order()).map(|a| g2.element_order(a)).collect();
    let by_element1 = orders1.clone();
    let by_element2 = orders2.clone();
    orders1.sort_unstable();
    orders2.sort_unstable();
    if orders1 != orders2 {
        return Vec::new();
    }

    let gens = g1.generating_set();
    let mut found = Vec::new();
    let mut images = vec![0usize; gens.len()];
    backtrack_images(
        g1,
        g2,
        &gens,
        &by_element1,
        &by_element2,
        &mut images,
        0,
        collect_all,
        &mut found,
    );
    found
}

#[allow(clippy::too_many_arguments)]
fn backtrack_images(
    g1: &AbstractGroup,
    g2: &AbstractGroup,
    gens: &[usize],
    orders1: &[usize],
    orders2: &[usize],
    images: &mut Vec<usize>,
    depth: usize,
    collect_all: bool,
    found: &mut Vec<Vec<usize>>,
) {
    if depth == gens.len() {
        if let Some(map) = extend_homomorphism(g1, g2, gens, images) {
            found.push(map);
        }
        return;
    }
    let want = orders1[gens[depth]];
    for candidate in 0..g2.order() {
        if orders2[candidate] != want {
            continue;
        }
        images[depth] = candidate;
        backtrack_images(
            g1,
            g2,
            gens,
            orders1,
            orders2,
            images,
            depth + 1,
            collect_all,
            found,
        );
        if !collect_all && !found.is_empty() {
            return;
        }
    }
}

/// An isomorphism `g1 -> g2` as an index map, if one exists. Both orders
/// must be at most [`ABSTRACT_ORDER_CAP`].
pub fn abstract_isomorphism(g1: &AbstractGroup, g2: &AbstractGroup) -> Result<Option<Vec<usize>>> {
    if g1.order() > ABSTRACT_ORDER_CAP || g2.order() > ABSTRACT_ORDER_CAP {
        return Err(Error::Capacity(format!(
            "isomorphism search limited to order {}",
            ABSTRACT_ORDER_CAP
        )));
    }
    Ok(search_isomorphisms(g1, g2, false).into_iter().next())
}

/// The full automorphism group as explicit index bijections, in the
/// deterministic order of the generator-image backtracking.
pub fn abstract_automorphisms(g: &AbstractGroup) -> Result<Vec<Vec<usize>>> {
    if g.order() > ABSTRACT_ORDER_CAP {
        return Err(Error::Capacity(format!(
            "automorphism search limited to order {}",
            ABSTRACT_ORDER_CAP
        )));
    }
    Ok(search_isomorphisms(g, g, true))
}

/// Named groups of order at most 16: all abelian types plus the dihedral,
/// dicyclic, semidihedral and modular families and the alternating group
/// A4. Used by the regular-representation closure checks and the CLI's
/// brute-force oracle names.
pub fn small_group_catalog() -> Vec<(String, AbstractGroup)> {
    let c = AbstractGroup::cyclic;
    let mut out: Vec<(String, AbstractGroup)> = Vec::new();
    for n in 1..=16 {
        out.push((format!("c{}", n), c(n)));
    }
    let abelian: [(&str, &[usize]); 8] = [
        ("c2xc2", &[2, 2]),
        ("c2xc4", &[2, 4]),
        ("c2xc2xc2", &[2, 2, 2]),
        ("c3xc3", &[3, 3]),
        ("c2xc6", &[2, 6]),
        ("c2xc8", &[2, 8]),
        ("c4xc4", &[4, 4]),
        ("c2xc2xc4", &[2, 2, 4]),
    ];
    for (name, factors) in abelian {
        let mut g = c(factors[0]);
        for &f in &factors[1..] {
            g = g.direct_product(&c(f));
        }
        out.push((name.to_string(), g));
    }
    let mut g = c(2);
    for _ in 0..3 {
        g = g.direct_product(&c(2));
    }
    out.push(("c2xc2xc2xc2".to_string(), g));

    for n in 3..=8 {
        out.push((format!("d{}", n), AbstractGroup::dihedral(n)));
    }
    out.push(("q8".to_string(), AbstractGroup::dicyclic(2)));
    out.push(("dic3".to_string(), AbstractGroup::dicyclic(3)));
    out.push(("q16".to_string(), AbstractGroup::dicyclic(4)));
    out.push((
        "m16".to_string(),
        AbstractGroup::semidirect_cyclic(8, 2, 5).expect("5^2 = 1 mod 8"),
    ));
    out.push((
        "sd16".to_string(),
        AbstractGroup::semidirect_cyclic(8, 2, 3).expect("3^2 = 1 mod 8"),
    ));
    out.push((
        "c4sc4".to_string(),
        AbstractGroup::semidirect_cyclic(4, 4, 3).expect("3^4 = 1 mod 4"),
    ));
    out.push((
        "c2xd4".to_string(),
        AbstractGroup::cyclic(2).direct_product(&AbstractGroup::dihedral(4)),
    ));
    out.push((
        "c2xq8".to_string(),
        AbstractGroup::cyclic(2).direct_product(&AbstractGroup::dicyclic(2)),
    ));

    let a4 = {
        let gens = vec![
            Permutation::from_cycles(&[vec![0, 1, 2]], 4).unwrap(),
            Permutation::from_cycles(&[vec![0, 1], vec![2, 3]], 4).unwrap(),
        ];
        let g = PermGroup::new(4, gens).unwrap();
        to_abstract(&g, 12).expect("A4 has order 12").0
    };
    out.push(("a4".to_string(), a4));
    out
}

/// Parses names like `c8` or `c2xc4` into direct products of cyclic groups.
pub fn group_by_name(name: &str) -> Result<AbstractGroup> {
    let catalog = small_group_catalog();
    if let Some((_, g)) = catalog.iter().find(|(n, _)| n == name) {
        return Ok(g.clone());
    }
    // fall back to generic cyclic-product names not in the catalog
    let mut acc: Option<AbstractGroup> = None;
    for part in name.split('x') {
        let n: usize = part
            .strip_prefix('c')
            .and_then(|digits| digits.parse().ok())
            .ok_or_else(|| Error::Parse(format!("unknown group name '{}'", name)))?;
        if n == 0 {
            return Err(Error::Parse(format!("unknown group name '{}'", name)));
        }
        let factor = AbstractGroup::cyclic(n);
        acc = Some(match acc {
            None => factor,
            Some(g) => g.direct_product(&factor),
        });
    }
    acc.ok_or_else(|| Error::Parse(format!("unknown group name '{}'", name)))
}
