//! Finite G-sets, equivariant maps and the diagram calculus on them.
//!
//! A [`GSet`] is a flat action table. Points of constructed sets follow fixed
//! encodings: a product X×Y lists (x, y) as `x * |Y| + y`, an induced set
//! G×_H Z lists (coset, z) as `coset * |Z| + z`, and tuple sets (norms and
//! powers) use little-endian base-|T| digits.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde_json::{json, Value};
use thiserror::Error;

use crate::groups::FiniteGroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GSetError {
    #[error("action table is not a group action: {0}")]
    NotAnAction(String),
    #[error("map is not equivariant at point {0}")]
    NotEquivariant(usize),
    #[error("maps do not share a target")]
    TargetMismatch,
    #[error("maps are not composable")]
    Composability,
    #[error("diagram has the wrong shape: {0}")]
    ShapeMismatch(String),
    #[error("objects live over different groups")]
    GroupMismatch,
    #[error("malformed G-set description: {0}")]
    Parse(String),
}

pub fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// One orbit of a G-set. The stabilizer of `base` is exactly the class
/// representative `sub`, and `points[c] = reps[c]·base` for the cosets of `sub`.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub class: usize,
    pub sub: usize,
    pub base: usize,
    pub points: Vec<usize>,
}

#[derive(Debug)]
pub struct Decomposition {
    pub orbits: Vec<Orbit>,
    /// For each point, its orbit and coset index.
    pub loc: Vec<(usize, usize)>,
}

#[derive(Clone)]
pub struct GSet {
    group: Arc<FiniteGroup>,
    size: usize,
    act: Arc<Vec<usize>>,
    decomp: Arc<OnceLock<Decomposition>>,
}

impl fmt::Debug for GSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GSet(size {}, orbit type {:?})", self.size, self.orbit_type())
    }
}

impl GSet {
    /// A validated G-set from one permutation per group element.
    pub fn new(group: Arc<FiniteGroup>, action: &[Vec<usize>]) -> Result<Self, GSetError> {
        if action.len() != group.order() {
            return Err(GSetError::NotAnAction("one permutation per element required".into()));
        }
        let size = action.first().map_or(0, |p| p.len());
        let mut act = Vec::with_capacity(group.order() * size);
        for p in action {
            if p.len() != size || p.iter().any(|&x| x >= size) {
                return Err(GSetError::NotAnAction("permutation out of range".into()));
            }
            act.extend_from_slice(p);
        }
        let x = Self::from_table(group, size, act);
        x.validate()?;
        Ok(x)
    }

    pub(crate) fn from_table(group: Arc<FiniteGroup>, size: usize, act: Vec<usize>) -> Self {
        GSet { group, size, act: Arc::new(act), decomp: Arc::new(OnceLock::new()) }
    }

    pub(crate) fn from_fn(group: Arc<FiniteGroup>, size: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut act = Vec::with_capacity(group.order() * size);
        for g in group.elements() {
            for x in 0..size {
                act.push(f(g, x));
            }
        }
        Self::from_table(group, size, act)
    }

    pub fn action_table(&self) -> &[usize] {
        &self.act
    }

    pub fn validate(&self) -> Result<(), GSetError> {
        let g = &self.group;
        for x in 0..self.size {
            if self.act(g.identity(), x) != x {
                return Err(GSetError::NotAnAction(format!("identity moves {}", x)));
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                let ab = g.mul(a, b);
                for x in 0..self.size {
                    if self.act(ab, x) != self.act(a, self.act(b, x)) {
                        return Err(GSetError::NotAnAction(format!("({},{}) at {}", a, b, x)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.act[g * self.size + x]
    }

    pub fn empty(group: &Arc<FiniteGroup>) -> Self {
        Self::from_table(group.clone(), 0, Vec::new())
    }

    pub fn point(group: &Arc<FiniteGroup>) -> Self {
        Self::from_table(group.clone(), 1, vec![0; group.order()])
    }

    /// n points with trivial action.
    pub fn trivial(group: &Arc<FiniteGroup>, n: usize) -> Self {
        Self::from_fn(group.clone(), n, |_, x| x)
    }

    /// The standard orbit G/H; point c is the coset reps[c]·H.
    pub fn orbit(group: &Arc<FiniteGroup>, sub: usize) -> Self {
        let cos = group.cosets(sub);
        let m = cos.reps.len();
        Self::from_fn(group.clone(), m, |g, c| cos.coset_of[group.mul(g, cos.reps[c])])
    }

    pub fn stabilizer(&self, x: usize) -> usize {
        let s: Vec<usize> = self.group.elements().filter(|&g| self.act(g, x) == x).collect();
        self.group.subgroup_index(&s).expect("stabilizer is a subgroup")
    }

    pub fn fixed_points(&self, sub: usize) -> Vec<usize> {
        let elems = &self.group.subgroup(sub).elements;
        (0..self.size).filter(|&x| elems.iter().all(|&h| self.act(h, x) == x)).collect()
    }

    pub fn decomposition(&self) -> &Decomposition {
        self.decomp.get_or_init(|| {
            let g = &self.group;
            let mut loc = vec![(usize::MAX, 0); self.size];
            let mut orbits = Vec::new();
            for x in 0..self.size {
                if loc[x].0 != usize::MAX {
                    continue;
                }
                let s = self.stabilizer(x);
                let base = self.act(g.conjugator_to_rep(s), x);
                let class = g.class_of(s);
                let sub = g.class_rep(class);
                let cos = g.cosets(sub);
                let points: Vec<usize> = cos.reps.iter().map(|&r| self.act(r, base)).collect();
                for (c, &p) in points.iter().enumerate() {
                    loc[p] = (orbits.len(), c);
                }
                orbits.push(Orbit { class, sub, base, points });
            }
            Decomposition { orbits, loc }
        })
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.decomposition().orbits
    }

    /// Number of orbits of each stabilizer class.
    pub fn orbit_type(&self) -> Vec<usize> {
        let mut t = vec![0; self.group.num_classes()];
        for o in self.orbits() {
            t[o.class] += 1;
        }
        t
    }

    /// (class index, multiplicity, base point of each orbit) per class present.
    pub fn orbit_decompose(&self) -> Vec<(usize, usize, Vec<usize>)> {
        let mut by: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for o in self.orbits() {
            by.entry(o.class).or_default().push(o.base);
        }
        by.into_iter().map(|(c, v)| (c, v.len(), v)).collect()
    }

    /// An element g with x = g·base of the orbit of x.
    pub fn translator(&self, x: usize) -> usize {
        let (o, c) = self.decomposition().loc[x];
        self.group.cosets(self.orbits()[o].sub).reps[c]
    }

    /// Disjoint union with its inclusions.
    pub fn coproduct(group: &Arc<FiniteGroup>, parts: &[GSet]) -> (GSet, Vec<GMap>) {
        let size: usize = parts.iter().map(|p| p.size).sum();
        let mut act = vec![0; group.order() * size];
        let mut offs = Vec::with_capacity(parts.len());
        let mut off = 0;
        for p in parts {
            for g in group.elements() {
                for x in 0..p.size {
                    act[g * size + off + x] = off + p.act(g, x);
                }
            }
            offs.push(off);
            off += p.size;
        }
        let u = Self::from_table(group.clone(), size, act);
        let incl = parts
            .iter()
            .zip(offs)
            .map(|(p, o)| GMap::new_unchecked(p.clone(), u.clone(), (0..p.size).map(|x| x + o).collect()))
            .collect();
        (u, incl)
    }

    pub fn sum(&self, other: &GSet) -> GSet {
        Self::coproduct(&self.group, &[self.clone(), other.clone()]).0
    }

    /// n disjoint copies.
    pub fn multiple(&self, n: usize) -> GSet {
        Self::coproduct(&self.group, &vec![self.clone(); n]).0
    }

    pub fn product(&self, other: &GSet) -> GSet {
        let m = other.size;
        Self::from_fn(self.group.clone(), self.size * m, |g, p| self.act(g, p / m) * m + other.act(g, p % m))
    }

    pub fn proj1(&self, other: &GSet) -> GMap {
        let pr = self.product(other);
        let m = other.size;
        GMap::new_unchecked(pr, self.clone(), (0..self.size * m).map(|p| p / m).collect())
    }

    pub fn proj2(&self, other: &GSet) -> GMap {
        let pr = self.product(other);
        let m = other.size;
        GMap::new_unchecked(pr, other.clone(), (0..self.size * m).map(|p| p % m).collect())
    }

    /// Maps T → X with g·φ = g∘φ∘g⁻¹; φ is encoded by its values in base |X|.
    pub fn power_set(x: &GSet, t: &GSet) -> GSet {
        let n = x.size;
        let k = t.size;
        let total = n.checked_pow(k as u32).expect("power set too large");
        let grp = x.group.clone();
        Self::from_fn(grp.clone(), total, |g, code| {
            let phi = decode(code, n, k);
            let gi = grp.inv(g);
            let out: Vec<usize> = (0..k).map(|s| x.act(g, phi[t.act(gi, s)])).collect();
            encode(&out, n)
        })
    }

    /// Res to the subgroup `sub`, as a set over the subgroup's own group.
    pub fn restrict(&self, sub: usize) -> GSet {
        let (h, emb) = self.group.subgroup_group(sub);
        Self::from_fn(h, self.size, |a, x| self.act(emb[a], x))
    }

    /// G×_H Z for an H-set Z over the group of subgroup `sub`.
    pub fn induce(group: &Arc<FiniteGroup>, sub: usize, z: &GSet) -> GSet {
        let (_, emb) = group.subgroup_group(sub);
        let local = local_index(group, &emb);
        let cos = group.cosets(sub);
        let m = z.size;
        Self::from_fn(group.clone(), cos.reps.len() * m, |g, p| {
            let (c, x) = (p / m, p % m);
            let gr = group.mul(g, cos.reps[c]);
            let c2 = cos.coset_of[gr];
            let h = group.mul(group.inv(cos.reps[c2]), gr);
            c2 * m + z.act(local[h], x)
        })
    }

    /// The set-level norm N_H^G T: tuples indexed by G/H with the twisted action.
    pub fn norm_set(group: &Arc<FiniteGroup>, sub: usize, t: &GSet) -> GSet {
        let (_, emb) = group.subgroup_group(sub);
        let local = local_index(group, &emb);
        let cos = group.cosets(sub);
        let m = cos.reps.len();
        let k = t.size;
        let total = k.checked_pow(m as u32).expect("norm set too large");
        let twist: Vec<Vec<(usize, usize)>> = group
            .elements()
            .map(|g| {
                let gi = group.inv(g);
                (0..m)
                    .map(|i| {
                        let j = cos.coset_of[group.mul(gi, cos.reps[i])];
                        let h = group.mul(group.mul(group.inv(cos.reps[i]), g), cos.reps[j]);
                        (j, local[h])
                    })
                    .collect()
            })
            .collect();
        Self::from_fn(group.clone(), total, |g, code| {
            let x = decode(code, k, m);
            let y: Vec<usize> = twist[g].iter().map(|&(j, h)| t.act(h, x[j])).collect();
            encode(&y, k)
        })
    }

    pub fn to_json(&self) -> Value {
        let mut action = serde_json::Map::new();
        for g in self.group.elements() {
            let perm: Vec<usize> = (0..self.size).map(|x| self.act(g, x)).collect();
            action.insert(g.to_string(), json!(perm));
        }
        json!({"size": self.size, "action": action})
    }

    pub fn from_json(group: &Arc<FiniteGroup>, v: &Value) -> Result<GSet, GSetError> {
        let size = v["size"].as_u64().ok_or_else(|| GSetError::Parse("size".into()))? as usize;
        let act = v["action"].as_object().ok_or_else(|| GSetError::Parse("action".into()))?;
        let mut perms = Vec::with_capacity(group.order());
        for g in group.elements() {
            let p = act.get(&g.to_string()).and_then(|p| p.as_array()).ok_or_else(|| GSetError::Parse(format!("action of {}", g)))?;
            let perm: Option<Vec<usize>> = p.iter().map(|x| x.as_u64().map(|x| x as usize)).collect();
            let perm = perm.ok_or_else(|| GSetError::Parse("permutation".into()))?;
            if perm.len() != size {
                return Err(GSetError::Parse("permutation length".into()));
            }
            perms.push(perm);
        }
        if size == 0 {
            return Ok(GSet::empty(group));
        }
        GSet::new(group.clone(), &perms)
    }

    /// A disjoint union of standard orbits G/H_c, one per listed class.
    pub fn from_orbit_classes(group: &Arc<FiniteGroup>, classes: &[usize]) -> GSet {
        let parts: Vec<GSet> = classes.iter().map(|&c| GSet::orbit(group, group.class_rep(c))).collect();
        Self::coproduct(group, &parts).0
    }
}

pub(crate) fn local_index(group: &FiniteGroup, emb: &[usize]) -> Vec<usize> {
    let mut local = vec![usize::MAX; group.order()];
    for (i, &g) in emb.iter().enumerate() {
        local[g] = i;
    }
    local
}

pub(crate) fn decode(mut code: usize, base: usize, len: usize) -> Vec<usize> {
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push(code % base);
        code /= base;
    }
    v
}

pub(crate) fn encode(digits: &[usize], base: usize) -> usize {
    digits.iter().rev().fold(0, |acc, &d| acc * base + d)
}

/// An equivariant map of G-sets.
#[derive(Clone, Debug)]
pub struct GMap {
    pub source: GSet,
    pub target: GSet,
    pub points: Arc<Vec<usize>>,
}

impl GMap {
    pub fn new(source: GSet, target: GSet, points: Vec<usize>) -> Result<Self, GSetError> {
        if !same_group(source.group(), target.group()) {
            return Err(GSetError::GroupMismatch);
        }
        if points.len() != source.size() || points.iter().any(|&y| y >= target.size()) {
            return Err(GSetError::ShapeMismatch("point array".into()));
        }
        let f = Self::new_unchecked(source, target, points);
        f.check_equivariant()?;
        Ok(f)
    }

    pub(crate) fn new_unchecked(source: GSet, target: GSet, points: Vec<usize>) -> Self {
        GMap { source, target, points: Arc::new(points) }
    }

    pub fn check_equivariant(&self) -> Result<(), GSetError> {
        for g in self.source.group().elements() {
            for x in 0..self.source.size() {
                if self.points[self.source.act(g, x)] != self.target.act(g, self.points[x]) {
                    return Err(GSetError::NotEquivariant(x));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.points[x]
    }

    pub fn identity(x: &GSet) -> GMap {
        Self::new_unchecked(x.clone(), x.clone(), (0..x.size()).collect())
    }

    pub fn to_point(x: &GSet) -> GMap {
        Self::new_unchecked(x.clone(), GSet::point(x.group()), vec![0; x.size()])
    }

    pub fn from_empty(y: &GSet) -> GMap {
        Self::new_unchecked(GSet::empty(y.group()), y.clone(), Vec::new())
    }

    /// The fold map from n copies of X to X.
    pub fn fold(x: &GSet, n: usize) -> GMap {
        let u = x.multiple(n);
        let m = x.size();
        Self::new_unchecked(u, x.clone(), (0..n * m).map(|p| p % m).collect())
    }

    /// self followed by g.
    pub fn then(&self, g: &GMap) -> GMap {
        assert_eq!(self.target.size(), g.source.size(), "maps are not composable");
        Self::new_unchecked(self.source.clone(), g.target.clone(), self.points.iter().map(|&x| g.points[x]).collect())
    }

    pub fn compose(&self, g: &GMap) -> Result<GMap, GSetError> {
        if self.target.size() != g.source.size() {
            return Err(GSetError::Composability);
        }
        Ok(self.then(g))
    }

    pub fn is_bijective(&self) -> bool {
        if self.source.size() != self.target.size() {
            return false;
        }
        let mut seen = vec![false; self.target.size()];
        for &y in self.points.iter() {
            if seen[y] {
                return false;
            }
            seen[y] = true;
        }
        true
    }

    pub fn inverse(&self) -> Option<GMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.target.size()];
        for (x, &y) in self.points.iter().enumerate() {
            inv[y] = x;
        }
        Some(Self::new_unchecked(self.target.clone(), self.source.clone(), inv))
    }

    /// Sorted preimages of every target point.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut f = vec![Vec::new(); self.target.size()];
        for (x, &y) in self.points.iter().enumerate() {
            f[y].push(x);
        }
        f
    }

    /// Largest fiber size.
    pub fn degree(&self) -> usize {
        self.fibers().iter().map(|v| v.len()).max().unwrap_or(0)
    }

    pub fn product(&self, g: &GMap) -> GMap {
        let src = self.source.product(&g.source);
        let tgt = self.target.product(&g.target);
        let m = g.source.size();
        let mt = g.target.size();
        let pts = (0..src.size()).map(|p| self.points[p / m] * mt + g.points[p % m]).collect();
        Self::new_unchecked(src, tgt, pts)
    }

    /// f ⊔ g between the disjoint unions.
    pub fn coproduct(maps: &[GMap], group: &Arc<FiniteGroup>) -> GMap {
        let srcs: Vec<GSet> = maps.iter().map(|f| f.source.clone()).collect();
        let tgts: Vec<GSet> = maps.iter().map(|f| f.target.clone()).collect();
        let (s, _) = GSet::coproduct(group, &srcs);
        let (t, _) = GSet::coproduct(group, &tgts);
        let mut pts = Vec::with_capacity(s.size());
        let mut off = 0;
        for f in maps {
            pts.extend(f.points.iter().map(|&y| y + off));
            off += f.target.size();
        }
        Self::new_unchecked(s, t, pts)
    }

    /// Copairing [f_1, ..., f_n]: ⊔ X_i → Y.
    pub fn copair(maps: &[GMap], target: &GSet) -> GMap {
        let group = target.group().clone();
        let srcs: Vec<GSet> = maps.iter().map(|f| f.source.clone()).collect();
        let (s, _) = GSet::coproduct(&group, &srcs);
        let pts = maps.iter().flat_map(|f| f.points.iter().copied()).collect();
        Self::new_unchecked(s, target.clone(), pts)
    }

    pub fn restrict(&self, sub: usize) -> GMap {
        Self::new_unchecked(self.source.restrict(sub), self.target.restrict(sub), self.points.to_vec())
    }

    /// G×_H f for a map f of H-sets.
    pub fn induce(&self, group: &Arc<FiniteGroup>, sub: usize) -> GMap {
        let src = GSet::induce(group, sub, &self.source);
        let tgt = GSet::induce(group, sub, &self.target);
        let m = self.source.size();
        let mt = self.target.size();
        let pts = (0..src.size()).map(|p| (p / m) * mt + self.points[p % m]).collect();
        Self::new_unchecked(src, tgt, pts)
    }

    pub fn to_json(&self) -> Value {
        json!(self.points.as_slice())
    }
}

/// A pullback square P → X, P → Y over a common Z; P lists pairs (x, y)
/// in lexicographic order.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub set: GSet,
    pub p1: GMap,
    pub p2: GMap,
    pub pairs: Vec<(usize, usize)>,
}

pub fn pullback(f: &GMap, g: &GMap) -> Result<Pullback, GSetError> {
    if f.target.size() != g.target.size() || !same_group(f.target.group(), g.target.group()) {
        return Err(GSetError::TargetMismatch);
    }
    Ok(pullback_unchecked(f, g))
}

pub(crate) fn pullback_unchecked(f: &GMap, g: &GMap) -> Pullback {
    let gf = g.fibers();
    let mut pairs = Vec::new();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    for x in 0..f.source.size() {
        for &y in &gf[f.points[x]] {
            index.insert((x, y), pairs.len());
            pairs.push((x, y));
        }
    }
    let (xs, ys) = (&f.source, &g.source);
    let set = GSet::from_fn(f.source.group().clone(), pairs.len(), |a, p| {
        let (x, y) = pairs[p];
        index[&(xs.act(a, x), ys.act(a, y))]
    });
    let p1 = GMap::new_unchecked(set.clone(), xs.clone(), pairs.iter().map(|p| p.0).collect());
    let p2 = GMap::new_unchecked(set.clone(), ys.clone(), pairs.iter().map(|p| p.1).collect());
    Pullback { set, p1, p2, pairs }
}

/// The exponential diagram of (i: X → Y, j: Y → Z):
///
/// ```text
///   X <-e- A -top-> Π
///   |i     |q       |p
///   Y ==== Y --j--> Z
/// ```
/// with A = Y ×_Z Π.
#[derive(Clone, Debug)]
pub struct ExponentialDiagram {
    pub i: GMap,
    pub j: GMap,
    pub pi: GSet,
    pub p: GMap,
    pub a: GSet,
    pub e: GMap,
    pub top: GMap,
    pub q: GMap,
    /// (z, section) for each point of Π; sections list values on the sorted fiber of j.
    pub sections: Vec<(usize, Vec<usize>)>,
}

pub fn exponential_diagram(i: &GMap, j: &GMap) -> Result<ExponentialDiagram, GSetError> {
    if i.target.size() != j.source.size() || !same_group(i.target.group(), j.source.group()) {
        return Err(GSetError::Composability);
    }
    Ok(exponential_unchecked(i, j))
}

pub(crate) fn exponential_unchecked(i: &GMap, j: &GMap) -> ExponentialDiagram {
    let group = j.target.group().clone();
    let fi = i.fibers();
    let fj = j.fibers();
    let mut posj = vec![0; j.source.size()];
    for f in &fj {
        for (k, &y) in f.iter().enumerate() {
            posj[y] = k;
        }
    }
    let mut sections: Vec<(usize, Vec<usize>)> = Vec::new();
    for (z, fib) in fj.iter().enumerate() {
        let mut cur = vec![0usize; fib.len()];
        if fib.iter().any(|&y| fi[y].is_empty()) {
            continue;
        }
        loop {
            sections.push((z, fib.iter().zip(&cur).map(|(&y, &c)| fi[y][c]).collect()));
            let mut k = 0;
            while k < fib.len() {
                cur[k] += 1;
                if cur[k] < fi[fib[k]].len() {
                    break;
                }
                cur[k] = 0;
                k += 1;
            }
            if k == fib.len() {
                break;
            }
        }
    }
    let index: HashMap<&(usize, Vec<usize>), usize> = sections.iter().enumerate().map(|(k, s)| (s, k)).collect();
    let (xs, ys, zs) = (&i.source, &j.source, &j.target);
    let mut act = Vec::with_capacity(group.order() * sections.len());
    for g in group.elements() {
        let gi = group.inv(g);
        for (z, s) in &sections {
            let z2 = zs.act(g, *z);
            let s2: Vec<usize> = fj[z2].iter().map(|&y2| xs.act(g, s[posj[ys.act(gi, y2)]])).collect();
            act.push(index[&(z2, s2)]);
        }
    }
    let pi = GSet::from_table(group.clone(), sections.len(), act);
    let p = GMap::new_unchecked(pi.clone(), zs.clone(), sections.iter().map(|s| s.0).collect());
    let pb = pullback_unchecked(j, &p);
    let e = GMap::new_unchecked(
        pb.set.clone(),
        xs.clone(),
        pb.pairs.iter().map(|&(y, k)| sections[k].1[posj[y]]).collect(),
    );
    ExponentialDiagram { i: i.clone(), j: j.clone(), pi, p, a: pb.set, e, top: pb.p2, q: pb.p1, sections }
}

/// Decides whether (e: A → X, top: A → Π', p: Π' → Z) is exponential over
/// (i, j), with A → Y taken to be i∘e. On success returns the comparison
/// isomorphism Π' → Π_{i,j}X.
pub fn is_exponential(i: &GMap, j: &GMap, e: &GMap, top: &GMap, p: &GMap) -> Result<Option<GMap>, GSetError> {
    if i.target.size() != j.source.size()
        || e.target.size() != i.source.size()
        || top.source.size() != e.source.size()
        || p.source.size() != top.target.size()
        || p.target.size() != j.target.size()
    {
        return Err(GSetError::ShapeMismatch("exponential square".into()));
    }
    let a_size = e.source.size();
    let q: Vec<usize> = (0..a_size).map(|a| i.points[e.points[a]]).collect();
    for a in 0..a_size {
        if j.points[q[a]] != p.points[top.points[a]] {
            return Ok(None);
        }
    }
    let canon = exponential_unchecked(i, j);
    let fj = j.fibers();
    let mut over: HashMap<(usize, usize), usize> = HashMap::new();
    for a in 0..a_size {
        if over.insert((q[a], top.points[a]), a).is_some() {
            return Ok(None);
        }
    }
    let expected: usize = (0..p.source.size()).map(|t| fj[p.points[t]].len()).sum();
    if expected != a_size {
        return Ok(None);
    }
    let index: HashMap<&(usize, Vec<usize>), usize> = canon.sections.iter().enumerate().map(|(k, s)| (s, k)).collect();
    let mut phi = Vec::with_capacity(p.source.size());
    for t in 0..p.source.size() {
        let z = p.points[t];
        let s: Vec<usize> = fj[z].iter().map(|&y| e.points[over[&(y, t)]]).collect();
        phi.push(index[&(z, s)]);
    }
    let phi = GMap::new_unchecked(p.source.clone(), canon.pi.clone(), phi);
    if !phi.is_bijective() || phi.check_equivariant().is_err() {
        return Ok(None);
    }
    Ok(Some(phi))
}

/// Equivariant bijection X → Y if one exists.
pub fn iso_test(x: &GSet, y: &GSet) -> Option<GMap> {
    if x.size() != y.size() || !same_group(x.group(), y.group()) || x.orbit_type() != y.orbit_type() {
        return None;
    }
    let group = x.group();
    let mut pool: BTreeMap<usize, Vec<&Orbit>> = BTreeMap::new();
    for o in y.orbits().iter().rev() {
        pool.entry(o.class).or_default().push(o);
    }
    let mut pts = vec![0; x.size()];
    for o in x.orbits() {
        let t = pool.get_mut(&o.class).and_then(|v| v.pop())?;
        for (c, &r) in group.cosets(o.sub).reps.iter().enumerate() {
            pts[o.points[c]] = y.act(r, t.base);
        }
    }
    Some(GMap::new_unchecked(x.clone(), y.clone(), pts))
}

/// All equivariant maps X → Y.
pub fn hom_set(x: &GSet, y: &GSet) -> Vec<GMap> {
    let group = x.group();
    let choices: Vec<Vec<usize>> = x.orbits().iter().map(|o| y.fixed_points(o.sub)).collect();
    let mut out = Vec::new();
    if choices.iter().any(|c| c.is_empty()) {
        return out;
    }
    let mut cur = vec![0usize; choices.len()];
    loop {
        let mut pts = vec![0; x.size()];
        for (k, o) in x.orbits().iter().enumerate() {
            let t = choices[k][cur[k]];
            for (c, &r) in group.cosets(o.sub).reps.iter().enumerate() {
                pts[o.points[c]] = y.act(r, t);
            }
        }
        out.push(GMap::new_unchecked(x.clone(), y.clone(), pts));
        let mut k = 0;
        while k < cur.len() {
            cur[k] += 1;
            if cur[k] < choices[k].len() {
                break;
            }
            cur[k] = 0;
            k += 1;
        }
        if k == cur.len() {
            break;
        }
    }
    out
}

/// One G-set per isomorphism class with at most `max_size` points, as
/// disjoint unions of standard orbits; includes the empty set.
pub fn gsets_up_to(group: &Arc<FiniteGroup>, max_size: usize) -> Vec<GSet> {
    fn rec(group: &Arc<FiniteGroup>, start: usize, room: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        for c in start..group.num_classes() {
            let k = group.index_of(group.class_rep(c));
            if k <= room {
                cur.push(c);
                rec(group, c, room - k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(group, 0, max_size, &mut Vec::new(), &mut out);
    out.iter().map(|cl| GSet::from_orbit_classes(group, cl)).collect()
}

/// Δ_V: V → N_H^G Res V, v ↦ (r_i⁻¹·v)_i.
pub fn diagonal_map(v: &GSet, sub: usize) -> GMap {
    let group = v.group().clone();
    let res = v.restrict(sub);
    let n = GSet::norm_set(&group, sub, &res);
    let reps = &group.cosets(sub).reps;
    let pts = (0..v.size())
        .map(|x| {
            let t: Vec<usize> = reps.iter().map(|&r| v.act(group.inv(r), x)).collect();
            encode(&t, v.size())
        })
        .collect();
    GMap::new_unchecked(v.clone(), n, pts)
}

/// π_H: Res_H N_H^G T → T, the identity-coset coordinate.
pub fn norm_projection(group: &Arc<FiniteGroup>, sub: usize, t: &GSet) -> GMap {
    let n = GSet::norm_set(group, sub, t).restrict(sub);
    let k = t.size().max(1);
    GMap::new_unchecked(n.clone(), t.clone(), (0..n.size()).map(|c| c % k).collect())
}

/// ev: X^T × T → X.
pub fn evaluation_map(x: &GSet, t: &GSet) -> GMap {
    let pw = GSet::power_set(x, t);
    let src = pw.product(t);
    let k = t.size();
    let pts = (0..src.size())
        .map(|p| {
            let phi = decode(p / k, x.size(), k);
            phi[p % k]
        })
        .collect();
    GMap::new_unchecked(src, x.clone(), pts)
}

/// coev: V → (V×T)^T, v ↦ (t ↦ (v, t)).
pub fn coevaluation_map(v: &GSet, t: &GSet) -> GMap {
    let vt = v.product(t);
    let pw = GSet::power_set(&vt, t);
    let k = t.size();
    let pts = (0..v.size())
        .map(|x| {
            let phi: Vec<usize> = (0..k).map(|s| x * k + s).collect();
            encode(&phi, vt.size())
        })
        .collect();
    GMap::new_unchecked(v.clone(), pw, pts)
}

/// η_Z: Z → Res_H(G×_H Z), z ↦ [1, z], for an H-set Z.
pub fn induction_unit(group: &Arc<FiniteGroup>, sub: usize, z: &GSet) -> GMap {
    let ind = GSet::induce(group, sub, z).restrict(sub);
    GMap::new_unchecked(z.clone(), ind, (0..z.size()).collect())
}

/// ε_X: G×_H Res_H X → X, [g, x] ↦ g·x.
pub fn induction_counit(x: &GSet, sub: usize) -> GMap {
    let group = x.group().clone();
    let ind = GSet::induce(&group, sub, &x.restrict(sub));
    let m = x.size();
    let reps = &group.cosets(sub).reps;
    let pts = (0..ind.size()).map(|p| x.act(reps[p / m], p % m)).collect();
    GMap::new_unchecked(ind, x.clone(), pts)
}

fn pair_index(pb: &Pullback) -> HashMap<(usize, usize), usize> {
    pb.pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect()
}

/// Pulls the exponential diagram of (i, j) back along k: W → Z and tests it
/// against the exponential diagram of the pulled-back maps.
pub fn pullback_stability_holds(i: &GMap, j: &GMap, k: &GMap) -> Result<bool, GSetError> {
    let ed = exponential_diagram(i, j)?;
    let pj = pullback(j, k)?;
    let q = pullback(i, &pj.p1)?;
    let pi2 = pullback(&ed.p, k)?;
    let a2 = pullback(&ed.top, &pi2.p1)?;
    let pj_at = pair_index(&pj);
    let q_at = pair_index(&q);
    let e2: Vec<usize> = a2
        .pairs
        .iter()
        .map(|&(a, t)| {
            let w = pi2.pairs[t].1;
            q_at[&(ed.e.points[a], pj_at[&(ed.q.points[a], w)])]
        })
        .collect();
    let e2 = GMap::new_unchecked(a2.set.clone(), q.set.clone(), e2);
    Ok(is_exponential(&q.p2, &pj.p2, &e2, &a2.p2, &pi2.p2)?.is_some())
}

/// Pentagon pasting for V →i X →j Y →k Z: the distributor of (j, k) pulled
/// back along i, followed by a second distributor, is one for (j∘i, k).
pub fn pentagon_pasting_holds(i: &GMap, j: &GMap, k: &GMap) -> Result<bool, GSetError> {
    let outer = exponential_diagram(j, k)?;
    let p = pullback(i, &outer.e)?;
    let inner = exponential_diagram(&p.p2, &outer.top)?;
    let e = inner.e.then(&p.p1);
    Ok(is_exponential(&i.then(j), k, &e, &inner.top, &inner.p.then(&outer.p))?.is_some())
}

/// Rectangle pasting for V →i X →j Y →k Z: stacking the distributors of (i, j)
/// and (Π → Y, k) gives one for (i, k∘j).
pub fn rectangle_pasting_holds(i: &GMap, j: &GMap, k: &GMap) -> Result<bool, GSetError> {
    let lower = exponential_diagram(i, j)?;
    let upper = exponential_diagram(&lower.p, k)?;
    let sq = pullback(&lower.top, &upper.e)?;
    let e = sq.p1.then(&lower.e);
    let top = sq.p2.then(&upper.top);
    Ok(is_exponential(i, &j.then(k), &e, &top, &upper.p)?.is_some())
}

/// Runs the three lemmas over every chain of maps between representatives of
/// G-sets whose sizes sum to at most `bound`.
pub fn check_exponential_lemmas(group: &Arc<FiniteGroup>, bound: usize) -> crate::mackey::Report {
    let mut report = crate::mackey::Report::new("exponential-lemmas");
    for name in ["pullback stability", "pentagon pasting", "rectangle pasting"] {
        report.declare(name);
    }
    let sets = gsets_up_to(group, bound);
    let describe = |maps: &[&GMap]| {
        maps.iter().map(|m| format!("{:?}", m.points)).collect::<Vec<_>>().join(" ")
    };
    for z in &sets {
        for y in sets.iter().filter(|y| y.size() + z.size() <= bound) {
            for k in hom_set(y, z) {
                for x in sets.iter().filter(|x| x.size() + y.size() + z.size() <= bound) {
                    for j in hom_set(x, y) {
                        let room = bound - x.size() - y.size() - z.size();
                        for v in sets.iter().filter(|v| v.size() <= room) {
                            for i in hom_set(v, x) {
                                let ok = pentagon_pasting_holds(&i, &j, &k).unwrap_or(false);
                                report.record("pentagon pasting", ok, || describe(&[&i, &j, &k]));
                                let ok = rectangle_pasting_holds(&i, &j, &k).unwrap_or(false);
                                report.record("rectangle pasting", ok, || describe(&[&i, &j, &k]));
                            }
                        }
                    }
                }
                for w in sets.iter().filter(|w| w.size() + y.size() + z.size() <= bound) {
                    let room = bound - w.size() - y.size() - z.size();
                    for h in hom_set(w, z) {
                        for x in sets.iter().filter(|x| x.size() <= room) {
                            for i in hom_set(x, y) {
                                let ok = pullback_stability_holds(&i, &k, &h).unwrap_or(false);
                                report.record("pullback stability", ok, || describe(&[&i, &k, &h]));
                            }
                        }
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::catalog_group;

    #[test]
    fn norm_of_two_points_over_c2() {
        let g = catalog_group("C2").unwrap();
        let (_, _) = g.subgroup_group(0);
        let e = g.subgroup_group(0).0;
        let two = GSet::trivial(&e, 2);
        let n = GSet::norm_set(&g, 0, &two);
        n.validate().unwrap();
        assert_eq!(n.size(), 4);
        assert_eq!(n.orbit_type(), vec![1, 2]);
    }

    #[test]
    fn binomial_exponential_object() {
        let g = catalog_group("C2").unwrap();
        let free = GSet::orbit(&g, 0);
        let fold = GMap::fold(&free, 2);
        let j = GMap::to_point(&free);
        let d = exponential_diagram(&fold, &j).unwrap();
        d.pi.validate().unwrap();
        assert_eq!(d.pi.size(), 4);
        assert_eq!(d.pi.orbit_type(), vec![1, 2]);
        assert!(is_exponential(&fold, &j, &d.e, &d.top, &d.p).unwrap().is_some());
    }

    #[test]
    fn constructions_are_actions() {
        for name in ["C2", "C3", "S3", "D8"] {
            let g = catalog_group(name).unwrap();
            for x in gsets_up_to(&g, 4) {
                x.validate().unwrap();
                for s in 0..g.subgroups().len() {
                    let r = x.restrict(s);
                    r.validate().unwrap();
                    GSet::induce(&g, s, &r).validate().unwrap();
                    if x.size() <= 2 {
                        let n = GSet::norm_set(&g, s, &r);
                        n.validate().unwrap();
                        assert_eq!(n.fixed_points(g.whole_group()).len(), r.fixed_points(r.group().whole_group()).len());
                    }
                }
            }
        }
    }
}
