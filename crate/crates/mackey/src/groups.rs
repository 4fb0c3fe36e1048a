//! Finite groups given by multiplication tables.
//!
//! Every group carries an eagerly built catalog of its subgroups, their
//! conjugacy classes, normalizers and left coset data. Subgroups are referred
//! to by their index in [`FiniteGroup::subgroups`].

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("empty multiplication table")]
    Empty,
    #[error("table is not square or has an entry out of range at row {0}")]
    BadTable(usize),
    #[error("no identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("multiplication is not associative on ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),
    #[error("element list is not a subgroup")]
    NotASubgroup,
    #[error("unknown group name {0:?}")]
    UnknownGroup(String),
}

/// A subgroup together with its normalizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subgroup {
    pub elements: Vec<usize>,
    pub normalizer: Vec<usize>,
    pub weyl_order: usize,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }
}

/// Left cosets gH of a subgroup. Coset 0 is H itself with representative the
/// identity; the other cosets are ordered by their least element, which is
/// also their representative.
#[derive(Debug, Clone)]
pub struct Cosets {
    pub reps: Vec<usize>,
    pub coset_of: Vec<usize>,
}

/// An abstract finite group with its subgroup catalog.
#[derive(Debug)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    mult: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    subgroups: Vec<Subgroup>,
    index: BTreeMap<Vec<usize>, usize>,
    class_reps: Vec<usize>,
    class_of: Vec<usize>,
    class_sizes: Vec<usize>,
    to_rep: Vec<usize>,
    cosets: Vec<Cosets>,
    sub_groups: Vec<OnceLock<(Arc<FiniteGroup>, Vec<usize>)>>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mult == other.mult
    }
}

impl Eq for FiniteGroup {}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    order: usize,
    mult: Vec<Vec<usize>>,
}

pub fn make_group(table: &[Vec<usize>]) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::from_table("", table)
}

impl FiniteGroup {
    pub fn from_table(name: &str, table: &[Vec<usize>]) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        for (r, row) in table.iter().enumerate() {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(GroupError::BadTable(r));
            }
        }
        let mult: Vec<usize> = table.iter().flatten().copied().collect();
        let m = |a: usize, b: usize| mult[a * n + b];
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| m(e, x) == x && m(x, e) == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverse = vec![0; n];
        for (a, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..n)
                .find(|&b| m(a, b) == identity && m(b, a) == identity)
                .ok_or(GroupError::NoInverse(a))?;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = m(a, b);
                for c in 0..n {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(GroupError::NonAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(Self::build(name.to_string(), n, mult, identity, inverse))
    }

    fn build(name: String, n: usize, mult: Vec<usize>, identity: usize, inverse: Vec<usize>) -> Self {
        let mut g = FiniteGroup {
            name,
            order: n,
            mult,
            identity,
            inverse,
            subgroups: Vec::new(),
            index: BTreeMap::new(),
            class_reps: Vec::new(),
            class_of: Vec::new(),
            class_sizes: Vec::new(),
            to_rep: Vec::new(),
            cosets: Vec::new(),
            sub_groups: Vec::new(),
        };
        g.enumerate_subgroups();
        g
    }

    fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut elems = vec![self.identity];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &s in gens {
                let y = self.mul(x, s);
                if !seen[y] {
                    seen[y] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        elems
    }

    fn enumerate_subgroups(&mut self) {
        let n = self.order;
        let mut found: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
        let mut frontier: Vec<Vec<usize>> = Vec::new();
        for g in 0..n {
            let c = self.closure(&[g]);
            if found.insert(c.clone(), ()).is_none() {
                frontier.push(c);
            }
        }
        let cyclic: Vec<Vec<usize>> = found.keys().cloned().collect();
        while let Some(h) = frontier.pop() {
            for c in &cyclic {
                if c.iter().all(|x| h.binary_search(x).is_ok()) {
                    continue;
                }
                let mut gens = h.clone();
                gens.extend_from_slice(c);
                let j = self.closure(&gens);
                if found.insert(j.clone(), ()).is_none() {
                    frontier.push(j);
                }
            }
        }
        let mut subs: Vec<Vec<usize>> = found.into_keys().collect();
        subs.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        self.index = subs.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();

        let mut class_of = vec![usize::MAX; subs.len()];
        let mut class_reps = Vec::new();
        let mut class_sizes = Vec::new();
        let mut to_rep = vec![self.identity; subs.len()];
        for s in 0..subs.len() {
            if class_of[s] != usize::MAX {
                continue;
            }
            // subs is sorted by (size, elements) so the first member met is the least.
            let c = class_reps.len();
            class_reps.push(s);
            let mut size = 0;
            for g in 0..n {
                let conj = self.conjugate_list(g, &subs[s]);
                let t = self.index[&conj];
                if class_of[t] == usize::MAX {
                    class_of[t] = c;
                    size += 1;
                    // conj = g s g^-1, so g^-1 carries t back to s.
                    to_rep[t] = self.inverse[g];
                }
            }
            class_sizes.push(size);
        }

        let mut subgroups = Vec::with_capacity(subs.len());
        let mut cosets = Vec::with_capacity(subs.len());
        for s in &subs {
            let normalizer: Vec<usize> =
                (0..n).filter(|&g| self.conjugate_list(g, s) == *s).collect();
            let weyl_order = normalizer.len() / s.len();
            subgroups.push(Subgroup { elements: s.clone(), normalizer, weyl_order });
            cosets.push(self.left_cosets(s));
        }
        self.sub_groups = (0..subs.len()).map(|_| OnceLock::new()).collect();
        self.subgroups = subgroups;
        self.class_of = class_of;
        self.class_reps = class_reps;
        self.class_sizes = class_sizes;
        self.to_rep = to_rep;
        self.cosets = cosets;
    }

    fn left_cosets(&self, h: &[usize]) -> Cosets {
        let mut coset_of = vec![usize::MAX; self.order];
        let mut reps = vec![self.identity];
        for &x in h {
            coset_of[x] = 0;
        }
        for g in 0..self.order {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(g);
            for &x in h {
                coset_of[self.mul(g, x)] = c;
            }
        }
        Cosets { reps, coset_of }
    }

    fn conjugate_list(&self, g: usize, s: &[usize]) -> Vec<usize> {
        let gi = self.inverse[g];
        let mut v: Vec<usize> = s.iter().map(|&x| self.mul(self.mul(g, x), gi)).collect();
        v.sort_unstable();
        v
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inverse
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mult.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn subgroup(&self, s: usize) -> &Subgroup {
        &self.subgroups[s]
    }

    /// Index of the subgroup with the given (unsorted) element list.
    pub fn subgroup_index(&self, elements: &[usize]) -> Result<usize, GroupError> {
        let mut v = elements.to_vec();
        v.sort_unstable();
        v.dedup();
        self.index.get(&v).copied().ok_or(GroupError::NotASubgroup)
    }

    /// Subgroup catalog indices of the conjugacy class representatives,
    /// ordered by subgroup order. The first is the trivial subgroup and the
    /// last is the whole group.
    pub fn class_reps(&self) -> &[usize] {
        &self.class_reps
    }

    pub fn num_classes(&self) -> usize {
        self.class_reps.len()
    }

    pub fn class_of(&self, s: usize) -> usize {
        self.class_of[s]
    }

    pub fn class_size(&self, c: usize) -> usize {
        self.class_sizes[c]
    }

    pub fn class_rep(&self, c: usize) -> usize {
        self.class_reps[c]
    }

    /// An element g with g·s·g⁻¹ equal to the representative of the class of s.
    pub fn conjugator_to_rep(&self, s: usize) -> usize {
        self.to_rep[s]
    }

    pub fn trivial_subgroup(&self) -> usize {
        0
    }

    pub fn whole_group(&self) -> usize {
        self.subgroups.len() - 1
    }

    /// Index of g·s·g⁻¹.
    pub fn conjugate(&self, g: usize, s: usize) -> usize {
        self.index[&self.conjugate_list(g, &self.subgroups[s].elements)]
    }

    pub fn is_subgroup_of(&self, a: usize, b: usize) -> bool {
        let sb = &self.subgroups[b];
        self.subgroups[a].elements.iter().all(|&x| sb.contains(x))
    }

    pub fn intersection(&self, a: usize, b: usize) -> usize {
        let sb = &self.subgroups[b];
        let v: Vec<usize> =
            self.subgroups[a].elements.iter().copied().filter(|&x| sb.contains(x)).collect();
        self.index[&v]
    }

    pub fn cosets(&self, s: usize) -> &Cosets {
        &self.cosets[s]
    }

    pub fn index_of(&self, s: usize) -> usize {
        self.order / self.subgroups[s].order()
    }

    /// Subgroup classes as (representative, class size) pairs.
    pub fn subgroup_classes(&self) -> Vec<(Subgroup, usize)> {
        self.class_reps
            .iter()
            .zip(&self.class_sizes)
            .map(|(&s, &k)| (self.subgroups[s].clone(), k))
            .collect()
    }

    /// The subgroup s as a group in its own right, with the embedding of its
    /// elements (in sorted order) into this group.
    pub fn subgroup_group(&self, s: usize) -> (Arc<FiniteGroup>, Vec<usize>) {
        self.sub_groups[s]
            .get_or_init(|| {
                let elems = self.subgroups[s].elements.clone();
                let pos: BTreeMap<usize, usize> =
                    elems.iter().enumerate().map(|(i, &x)| (x, i)).collect();
                let k = elems.len();
                let mut mult = Vec::with_capacity(k * k);
                for &a in &elems {
                    for &b in &elems {
                        mult.push(pos[&self.mul(a, b)]);
                    }
                }
                let inverse = elems.iter().map(|&a| pos[&self.inv(a)]).collect();
                let name = format!("{}<{}>", self.name, s);
                let g = FiniteGroup::build(name, k, mult, pos[&self.identity], inverse);
                (Arc::new(g), elems)
            })
            .clone()
    }

    /// N(H)/H with the map sending each normalizer element to its coset.
    pub fn weyl_group(&self, s: usize) -> Result<(FiniteGroup, BTreeMap<usize, usize>), GroupError> {
        if s >= self.subgroups.len() {
            return Err(GroupError::NotASubgroup);
        }
        let sub = &self.subgroups[s];
        let cos = &self.cosets[s];
        let mut labels = BTreeMap::new();
        let mut reps = Vec::new();
        let mut label_of_coset = BTreeMap::new();
        for &g in &sub.normalizer {
            let c = cos.coset_of[g];
            let next = label_of_coset.len();
            let l = *label_of_coset.entry(c).or_insert_with(|| {
                reps.push(g);
                next
            });
            labels.insert(g, l);
        }
        let w = reps.len();
        let mut mult = Vec::with_capacity(w * w);
        for &a in &reps {
            for &b in &reps {
                mult.push(labels[&self.mul(a, b)]);
            }
        }
        let inverse = reps.iter().map(|&a| labels[&self.inv(a)]).collect();
        let ident = labels[&self.identity];
        let g = FiniteGroup::build(format!("W({})", s), w, mult, ident, inverse);
        Ok((g, labels))
    }

    /// One representative per double coset H g K, in order of least element.
    pub fn double_cosets(&self, h: usize, k: usize) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        let mut reps = Vec::new();
        for g in 0..self.order {
            if seen[g] {
                continue;
            }
            reps.push(g);
            for &a in &self.subgroups[h].elements {
                let ag = self.mul(a, g);
                for &b in &self.subgroups[k].elements {
                    seen[self.mul(ag, b)] = true;
                }
            }
        }
        reps
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GroupJson { order: self.order, mult: self.table() }).unwrap()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, GroupError> {
        let g: GroupJson = serde_json::from_value(v.clone()).map_err(|_| GroupError::Empty)?;
        if g.mult.len() != g.order {
            return Err(GroupError::BadTable(0));
        }
        FiniteGroup::from_table("custom", &g.mult)
    }
}

pub fn cyclic_group(n: usize) -> FiniteGroup {
    let t: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteGroup::from_table(&format!("C{}", n), &t).unwrap()
}

/// All permutations of {0..n-1} in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// The group generated by a list of permutations under composition
/// (p·q)(x) = p(q(x)), with elements listed in lexicographic order.
pub fn permutation_group(name: &str, perms: &[Vec<usize>]) -> FiniteGroup {
    let pos: BTreeMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let t: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            perms
                .iter()
                .map(|q| {
                    let pq: Vec<usize> = q.iter().map(|&x| p[x]).collect();
                    pos[&pq]
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(name, &t).unwrap()
}

pub fn symmetric_group(n: usize) -> FiniteGroup {
    permutation_group(&format!("S{}", n), &permutations(n))
}

fn dihedral8() -> FiniteGroup {
    // r^a s^b encoded as a + 4b; s r s = r^-1.
    let t: Vec<Vec<usize>> = (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (a, b) = (x % 4, x / 4);
                    let (c, d) = (y % 4, y / 4);
                    let c = if b == 1 { (4 - c) % 4 } else { c };
                    (a + c) % 4 + 4 * ((b + d) % 2)
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table("D8", &t).unwrap()
}

fn quaternion8() -> FiniteGroup {
    // ±1, ±i, ±j, ±k encoded as 2*unit + sign with units 1,i,j,k = 0..3.
    const TAB: [[(usize, bool); 4]; 4] = [
        [(0, false), (1, false), (2, false), (3, false)],
        [(1, false), (0, true), (3, false), (2, true)],
        [(2, false), (3, true), (0, true), (1, false)],
        [(3, false), (2, false), (1, true), (0, true)],
    ];
    let t: Vec<Vec<usize>> = (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (u, su) = (x / 2, x % 2 == 1);
                    let (v, sv) = (y / 2, y % 2 == 1);
                    let (w, sw) = TAB[u][v];
                    2 * w + usize::from(su ^ sv ^ sw)
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table("Q8", &t).unwrap()
}

fn klein4() -> FiniteGroup {
    let t: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
    FiniteGroup::from_table("V4", &t).unwrap()
}

pub const CATALOG: &[&str] = &["C1", "C2", "C3", "C4", "V4", "S3", "D8", "Q8"];

/// Built-in groups by name.
pub fn catalog_group(name: &str) -> Result<Arc<FiniteGroup>, GroupError> {
    let g = match name {
        "C1" | "e" | "1" => cyclic_group(1),
        "V4" | "C2xC2" => klein4(),
        "S3" => symmetric_group(3),
        "D8" => dihedral8(),
        "Q8" => quaternion8(),
        _ => match name.strip_prefix('C').and_then(|s| s.parse::<usize>().ok()) {
            Some(n) if (1..=64).contains(&n) => cyclic_group(n),
            _ => return Err(GroupError::UnknownGroup(name.to_string())),
        },
    };
    Ok(Arc::new(g))
}
