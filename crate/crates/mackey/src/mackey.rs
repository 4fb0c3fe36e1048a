//! Mackey functors over a finite group.
//!
//! A [`MackeyFunctor`] stores one abelian group per conjugacy class of
//! subgroups (its value at the standard orbit G/H) and the restriction and
//! transfer matrices along every map between standard orbits. Values and
//! structure maps at arbitrary G-sets are assembled through orbit
//! decompositions. Inner automorphisms act trivially by construction: a map
//! between orbits is determined by the coset it sends the base point to.
//!
//! Concrete functors are built from a [`MackeyModel`], which knows how to
//! evaluate on arbitrary G-sets in its own coordinates.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::abelian::{add_assign, add_scaled, int_json, is_zero_vec, sub_vec, unit_vec, zero_vec, AbHom, FgAb, Int, IntMatrix};
use crate::groups::FiniteGroup;
use crate::gsets::{gsets_up_to, hom_set, induction_counit, pullback_unchecked, same_group, GMap, GSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MackeyError {
    #[error("objects live over different groups")]
    GroupMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid module: {0}")]
    BadModule(String),
}

/// Outcome of a verification suite: one entry per checked condition.
#[derive(Debug, Clone, Serialize, Default)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub condition: String,
    pub instances: usize,
    pub failure: Option<String>,
}

impl Report {
    pub fn new(suite: &str) -> Self {
        Report { suite: suite.to_string(), checks: Vec::new() }
    }

    fn entry(&mut self, condition: &str) -> &mut CheckResult {
        if let Some(k) = self.checks.iter().position(|c| c.condition == condition) {
            return &mut self.checks[k];
        }
        self.checks.push(CheckResult { condition: condition.to_string(), instances: 0, failure: None });
        self.checks.last_mut().unwrap()
    }

    /// Records one instance; the first failure of each condition is kept.
    pub fn record(&mut self, condition: &str, ok: bool, describe: impl FnOnce() -> String) -> bool {
        let e = self.entry(condition);
        e.instances += 1;
        if !ok && e.failure.is_none() {
            e.failure = Some(describe());
        }
        ok
    }

    pub fn declare(&mut self, condition: &str) {
        self.entry(condition);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failure.is_none())
    }

    pub fn failed(&self, condition: &str) -> bool {
        self.checks.iter().any(|c| c.condition == condition && c.failure.is_some())
    }

    pub fn first_failure(&self) -> Option<String> {
        self.checks.iter().find_map(|c| c.failure.as_ref().map(|f| format!("{}: {}", c.condition, f)))
    }

    pub fn merge(&mut self, other: Report) {
        for c in other.checks {
            let e = self.entry(&c.condition);
            e.instances += c.instances;
            if e.failure.is_none() {
                e.failure = c.failure;
            }
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap()
    }
}

/// Something that evaluates like a Mackey functor on arbitrary G-sets.
pub trait MackeyModel: Send + Sync {
    fn group(&self) -> &Arc<FiniteGroup>;
    fn eval(&self, x: &GSet) -> FgAb;
    /// Matrix of eval(Y) → eval(X) for f: X → Y.
    fn restriction(&self, f: &GMap) -> IntMatrix;
    /// Matrix of eval(X) → eval(Y) for f: X → Y.
    fn transfer(&self, f: &GMap) -> IntMatrix;
    fn label(&self) -> String;
}

/// Key of a map between standard orbits G/R_a → G/R_b sending the identity
/// coset to the coset `coset` of R_b.
pub type OrbitKey = (usize, usize, usize);

#[derive(Clone, Debug)]
pub struct OrbitMaps {
    pub res: IntMatrix,
    pub tr: IntMatrix,
}

/// Levelwise Mackey functor.
#[derive(Clone)]
pub struct MackeyFunctor {
    group: Arc<FiniteGroup>,
    levels: Vec<Arc<FgAb>>,
    maps: HashMap<OrbitKey, OrbitMaps>,
    label: String,
    cover: Option<Arc<Cover>>,
}

impl fmt::Debug for MackeyFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MackeyFunctor({}, levels {:?})", self.label, self.levels)
    }
}

/// Layout of an evaluation at a G-set: one block per orbit.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: Arc<FgAb>,
    pub offsets: Vec<usize>,
    pub classes: Vec<usize>,
}

/// The map G/R_a → G/R_b with key (a, b, c).
pub fn orbit_map(group: &Arc<FiniteGroup>, key: OrbitKey) -> GMap {
    let (a, b, c) = key;
    let ra = group.class_rep(a);
    let rb = group.class_rep(b);
    let src = GSet::orbit(group, ra);
    let tgt = GSet::orbit(group, rb);
    let cb = group.cosets(rb);
    let rc = cb.reps[c];
    let pts = group.cosets(ra).reps.iter().map(|&s| cb.coset_of[group.mul(s, rc)]).collect();
    GMap::new_unchecked(src, tgt, pts)
}

/// All orbit map keys, in a fixed order.
pub fn orbit_keys(group: &Arc<FiniteGroup>) -> Vec<OrbitKey> {
    let mut keys = Vec::new();
    for a in 0..group.num_classes() {
        for b in 0..group.num_classes() {
            let target = GSet::orbit(group, group.class_rep(b));
            for c in target.fixed_points(group.class_rep(a)) {
                keys.push((a, b, c));
            }
        }
    }
    keys
}

impl MackeyFunctor {
    pub fn from_model(model: &dyn MackeyModel) -> Self {
        let group = model.group().clone();
        let levels = (0..group.num_classes())
            .map(|c| Arc::new(model.eval(&GSet::orbit(&group, group.class_rep(c)))))
            .collect();
        let mut maps = HashMap::new();
        for key in orbit_keys(&group) {
            let f = orbit_map(&group, key);
            maps.insert(key, OrbitMaps { res: model.restriction(&f), tr: model.transfer(&f) });
        }
        MackeyFunctor { group, levels, maps, label: model.label(), cover: None }
    }

    pub fn from_parts(group: Arc<FiniteGroup>, levels: Vec<Arc<FgAb>>, maps: HashMap<OrbitKey, OrbitMaps>, label: &str) -> Self {
        MackeyFunctor { group, levels, maps, label: label.to_string(), cover: None }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// A generating cover known to be good for this functor, if any.
    pub fn cover_hint(&self) -> Option<&Arc<Cover>> {
        self.cover.as_ref()
    }

    pub fn with_cover(mut self, cover: Cover) -> Self {
        self.cover = Some(Arc::new(cover));
        self
    }

    pub fn level(&self, class: usize) -> &Arc<FgAb> {
        &self.levels[class]
    }

    pub fn levels(&self) -> &[Arc<FgAb>] {
        &self.levels
    }

    pub fn orbit_maps(&self) -> &HashMap<OrbitKey, OrbitMaps> {
        &self.maps
    }

    pub fn orbit_maps_mut(&mut self) -> &mut HashMap<OrbitKey, OrbitMaps> {
        &mut self.maps
    }

    pub fn eval(&self, x: &GSet) -> Evaluation {
        assert!(same_group(x.group(), &self.group), "G-set over a different group");
        let classes: Vec<usize> = x.orbits().iter().map(|o| o.class).collect();
        let mut offsets = Vec::with_capacity(classes.len() + 1);
        let mut off = 0;
        for &c in &classes {
            offsets.push(off);
            off += self.levels[c].num_gens();
        }
        offsets.push(off);
        let value = if classes.len() == 1 {
            self.levels[classes[0]].clone()
        } else {
            let parts: Vec<&FgAb> = classes.iter().map(|&c| &*self.levels[c]).collect();
            Arc::new(FgAb::direct_sum(&parts))
        };
        Evaluation { value, offsets, classes }
    }

    pub fn value(&self, x: &GSet) -> Arc<FgAb> {
        self.eval(x).value
    }

    /// For each orbit of the source, (orbit of target, key of the induced orbit map).
    fn blocks(&self, f: &GMap) -> Vec<(usize, OrbitKey)> {
        let x = &f.source;
        let y = &f.target;
        let dy = y.decomposition();
        x.orbits()
            .iter()
            .map(|o| {
                let (b, c) = dy.loc[f.apply(o.base)];
                (b, (o.class, dy.orbits[b].class, c))
            })
            .collect()
    }

    pub fn restriction_matrix(&self, f: &GMap) -> IntMatrix {
        let ex = self.eval(&f.source);
        let ey = self.eval(&f.target);
        let mut m = IntMatrix::zeros(ey.value.num_gens(), ex.value.num_gens());
        for (a, (b, key)) in self.blocks(f).into_iter().enumerate() {
            m.set_block(ey.offsets[b], ex.offsets[a], &self.maps[&key].res);
        }
        m
    }

    pub fn transfer_matrix(&self, f: &GMap) -> IntMatrix {
        let ex = self.eval(&f.source);
        let ey = self.eval(&f.target);
        let mut m = IntMatrix::zeros(ex.value.num_gens(), ey.value.num_gens());
        for (a, (b, key)) in self.blocks(f).into_iter().enumerate() {
            m.set_block(ex.offsets[a], ey.offsets[b], &self.maps[&key].tr);
        }
        m
    }

    pub fn restriction(&self, f: &GMap) -> Result<AbHom, MackeyError> {
        if !same_group(f.source.group(), &self.group) {
            return Err(MackeyError::GroupMismatch);
        }
        let m = self.restriction_matrix(f);
        AbHom::new_unchecked(self.value(&f.target), self.value(&f.source), m).map_err(|e| MackeyError::ShapeMismatch(e.to_string()))
    }

    pub fn transfer(&self, f: &GMap) -> Result<AbHom, MackeyError> {
        if !same_group(f.source.group(), &self.group) {
            return Err(MackeyError::GroupMismatch);
        }
        let m = self.transfer_matrix(f);
        AbHom::new_unchecked(self.value(&f.source), self.value(&f.target), m).map_err(|e| MackeyError::ShapeMismatch(e.to_string()))
    }

    pub fn apply_restriction(&self, f: &GMap, v: &[Int]) -> Vec<Int> {
        let ex = self.eval(&f.source);
        let ey = self.eval(&f.target);
        let mut out = zero_vec(ex.value.num_gens());
        for (a, (b, key)) in self.blocks(f).into_iter().enumerate() {
            let part = &v[ey.offsets[b]..ey.offsets[b + 1]];
            if is_zero_vec(part) {
                continue;
            }
            let img = self.maps[&key].res.apply(part);
            out[ex.offsets[a]..ex.offsets[a + 1]].clone_from_slice(&img);
        }
        out
    }

    pub fn apply_transfer(&self, f: &GMap, v: &[Int]) -> Vec<Int> {
        let ex = self.eval(&f.source);
        let ey = self.eval(&f.target);
        let mut out = zero_vec(ey.value.num_gens());
        for (a, (b, key)) in self.blocks(f).into_iter().enumerate() {
            let part = &v[ex.offsets[a]..ex.offsets[a + 1]];
            if is_zero_vec(part) {
                continue;
            }
            let img = self.maps[&key].tr.apply(part);
            let seg = &mut out[ey.offsets[b]..ey.offsets[b + 1]];
            for (s, t) in seg.iter_mut().zip(img) {
                *s += t;
            }
        }
        out
    }

    /// Restriction M(G/H) → M(G/K) along the projection G/K → G/H, K ≤ H.
    pub fn res(&self, k: usize, h: usize) -> AbHom {
        self.restriction(&subgroup_projection(&self.group, k, h)).unwrap()
    }

    pub fn tr(&self, k: usize, h: usize) -> AbHom {
        self.transfer(&subgroup_projection(&self.group, k, h)).unwrap()
    }

    /// c_g: M(G/H) → M(G/gHg⁻¹).
    pub fn conj(&self, g: usize, h: usize) -> AbHom {
        let group = &self.group;
        let ghg = group.conjugate(g, h);
        let src = GSet::orbit(group, ghg);
        let tgt = GSet::orbit(group, h);
        let ct = group.cosets(h);
        let pts = group.cosets(ghg).reps.iter().map(|&x| ct.coset_of[group.mul(x, g)]).collect();
        self.restriction(&GMap::new_unchecked(src, tgt, pts)).unwrap()
    }

    pub fn to_json(&self) -> Value {
        let group = &self.group;
        let mut levels = Vec::new();
        for c in 0..group.num_classes() {
            levels.push(json!({
                "subgroup": group.subgroup(group.class_rep(c)).elements,
                "value": self.levels[c].to_json(),
            }));
        }
        let mut keys: Vec<&OrbitKey> = self.maps.keys().collect();
        keys.sort();
        let mat = |m: &IntMatrix| m.to_rows().iter().map(|r| r.iter().map(int_json).collect::<Vec<_>>()).collect::<Vec<_>>();
        let maps: Vec<Value> = keys
            .into_iter()
            .map(|k| json!({"source": k.0, "target": k.1, "coset": k.2, "res": mat(&self.maps[k].res), "tr": mat(&self.maps[k].tr)}))
            .collect();
        json!({"label": self.label, "levels": levels, "orbit_maps": maps})
    }
}

/// G/K → G/H for K ≤ H.
pub fn subgroup_projection(group: &Arc<FiniteGroup>, k: usize, h: usize) -> GMap {
    assert!(group.is_subgroup_of(k, h), "not a subgroup");
    let src = GSet::orbit(group, k);
    let tgt = GSet::orbit(group, h);
    let ch = group.cosets(h);
    let pts = group.cosets(k).reps.iter().map(|&r| ch.coset_of[r]).collect();
    GMap::new_unchecked(src, tgt, pts)
}

/// Matrix converting model coordinates at X into levelwise coordinates.
pub fn model_to_levelwise(model: &dyn MackeyModel, x: &GSet) -> IntMatrix {
    let incl = orbit_inclusions(x);
    let blocks: Vec<IntMatrix> = incl.iter().map(|i| model.restriction(i)).collect();
    let rows = blocks.first().map_or(model.eval(x).num_gens(), |b| b.rows());
    let cols: usize = blocks.iter().map(|b| b.cols()).sum();
    let mut m = IntMatrix::zeros(rows, cols);
    let mut off = 0;
    for b in &blocks {
        m.set_block(0, off, b);
        off += b.cols();
    }
    m
}

/// Matrix converting levelwise coordinates at X into model coordinates.
pub fn levelwise_to_model(model: &dyn MackeyModel, x: &GSet) -> IntMatrix {
    let incl = orbit_inclusions(x);
    let blocks: Vec<IntMatrix> = incl.iter().map(|i| model.transfer(i)).collect();
    let cols = model.eval(x).num_gens();
    let rows: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut m = IntMatrix::zeros(rows, cols);
    let mut off = 0;
    for b in &blocks {
        m.set_block(off, 0, b);
        off += b.rows();
    }
    m
}

/// ι_a: G/R_a → X, gR_a ↦ g·base_a, for every orbit.
pub fn orbit_inclusions(x: &GSet) -> Vec<GMap> {
    let group = x.group();
    x.orbits()
        .iter()
        .map(|o| {
            let src = GSet::orbit(group, o.sub);
            GMap::new_unchecked(src, x.clone(), o.points.clone())
        })
        .collect()
}

/// Basis of the Burnside group A(Z) of G-sets over Z: one element per
/// isomorphism class of orbits over Z, written (class c, point of Z^{R_c})
/// with the point minimal under the normalizer of R_c.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    pub set: GSet,
    pub elems: Vec<(usize, usize)>,
    lookup: HashMap<(usize, usize), usize>,
}

impl SpanBasis {
    pub fn new(z: &GSet) -> Self {
        let group = z.group().clone();
        let mut elems = Vec::new();
        let mut lookup = HashMap::new();
        for c in (0..group.num_classes()).rev() {
            let r = group.class_rep(c);
            let norm = &group.subgroup(r).normalizer;
            for x in z.fixed_points(r) {
                if lookup.contains_key(&(c, x)) {
                    continue;
                }
                let idx = elems.len();
                elems.push((c, x));
                for &n in norm {
                    lookup.insert((c, z.act(n, x)), idx);
                }
            }
        }
        SpanBasis { set: z.clone(), elems, lookup }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Basis index of the orbit G/S → Z, gS ↦ g·x (S fixes x).
    pub fn classify(&self, s: usize, x: usize) -> usize {
        let group = self.set.group();
        let n = group.conjugator_to_rep(s);
        self.lookup[&(group.class_of(s), self.set.act(n, x))]
    }

    /// Class of a G-set W → Z as a vector.
    pub fn vector_of(&self, map: &GMap) -> Vec<Int> {
        let mut v = zero_vec(self.len());
        for o in map.source.orbits() {
            v[self.classify(o.sub, map.apply(o.base))] += 1;
        }
        v
    }

    /// The standard orbit and its map to Z for a basis element.
    pub fn orbit_of(&self, idx: usize) -> GMap {
        let group = self.set.group();
        let (c, x) = self.elems[idx];
        let r = group.class_rep(c);
        let src = GSet::orbit(group, r);
        let pts = group.cosets(r).reps.iter().map(|&g| self.set.act(g, x)).collect();
        GMap::new_unchecked(src, self.set.clone(), pts)
    }

    /// The G-set over Z represented by a nonnegative vector.
    pub fn realize(&self, v: &[Int]) -> GMap {
        let mut parts = Vec::new();
        for (k, n) in v.iter().enumerate() {
            let n: usize = n.try_into().expect("nonnegative multiplicity");
            for _ in 0..n {
                parts.push(self.orbit_of(k));
            }
        }
        if parts.is_empty() {
            return GMap::from_empty(&self.set);
        }
        GMap::copair(&parts, &self.set)
    }

    /// Pullback of a basis element of `target` along h: self.set → target.set.
    pub fn pullback_basis(&self, target: &SpanBasis, h: &GMap, idx: usize) -> Vec<Int> {
        let group = self.set.group();
        let (c, z) = target.elems[idx];
        let r = group.class_rep(c);
        let relems = &group.subgroup(r).elements;
        let mut out = zero_vec(self.len());
        let mut seen = vec![false; self.set.size()];
        for w in 0..self.set.size() {
            if h.apply(w) != z || seen[w] {
                continue;
            }
            let mut stab = Vec::new();
            for &g in relems {
                let gw = self.set.act(g, w);
                seen[gw] = true;
                if gw == w {
                    stab.push(g);
                }
            }
            let s = group.subgroup_index(&stab).unwrap();
            out[self.classify(s, w)] += 1;
        }
        out
    }

    pub fn restriction_matrix(&self, target: &SpanBasis, h: &GMap) -> IntMatrix {
        let rows = (0..target.len()).map(|k| self.pullback_basis(target, h, k)).collect();
        IntMatrix::from_rows(rows, self.len())
    }

    pub fn transfer_matrix(&self, target: &SpanBasis, h: &GMap) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.len(), target.len());
        let group = self.set.group();
        for (k, &(c, x)) in self.elems.iter().enumerate() {
            let j = target.classify(group.class_rep(c), h.apply(x));
            *m.entry_mut(k, j) += 1;
        }
        m
    }
}

/// Translation between levelwise coordinates of [−, T] at X and G-sets over X×T.
#[derive(Clone, Debug)]
pub struct RepresentableCoords {
    pub t: GSet,
    pub level_bases: Vec<SpanBasis>,
}

impl RepresentableCoords {
    pub fn new(t: &GSet) -> Self {
        let group = t.group();
        let level_bases = (0..group.num_classes()).map(|c| SpanBasis::new(&GSet::orbit(group, group.class_rep(c)).product(t))).collect();
        RepresentableCoords { t: t.clone(), level_bases }
    }

    fn offsets(&self, x: &GSet) -> Vec<usize> {
        let mut offs = vec![0];
        for o in x.orbits() {
            offs.push(offs.last().unwrap() + self.level_bases[o.class].len());
        }
        offs
    }

    pub fn dim(&self, x: &GSet) -> usize {
        *self.offsets(x).last().unwrap()
    }

    /// The G-set over X×T of a nonnegative levelwise vector.
    pub fn realize(&self, x: &GSet, v: &[Int]) -> GMap {
        let xt = x.product(&self.t);
        let k = self.t.size();
        let offs = self.offsets(x);
        let mut parts = Vec::new();
        for (a, o) in x.orbits().iter().enumerate() {
            let basis = &self.level_bases[o.class];
            for (idx, n) in v[offs[a]..offs[a + 1]].iter().enumerate() {
                let n: usize = n.try_into().expect("nonnegative multiplicity");
                if n == 0 {
                    continue;
                }
                let orb = basis.orbit_of(idx);
                let pts: Vec<usize> = orb.points.iter().map(|&p| o.points[p / k] * k + p % k).collect();
                let m = GMap::new_unchecked(orb.source.clone(), xt.clone(), pts);
                for _ in 0..n {
                    parts.push(m.clone());
                }
            }
        }
        if parts.is_empty() {
            return GMap::from_empty(&xt);
        }
        GMap::copair(&parts, &xt)
    }

    /// Levelwise vector of a G-set W → X×T.
    pub fn classify(&self, x: &GSet, w: &GMap) -> Vec<Int> {
        let offs = self.offsets(x);
        let k = self.t.size();
        let d = x.decomposition();
        let mut v = zero_vec(*offs.last().unwrap());
        for o in w.source.orbits() {
            let p = w.apply(o.base);
            let (b, c) = d.loc[p / k];
            let basis = &self.level_bases[x.orbits()[b].class];
            v[offs[b] + basis.classify(o.sub, c * k + p % k)] += 1;
        }
        v
    }
}

/// A surjection [−, S] → M, determined by the element ξ ∈ M(S) it sends the
/// identity span to.
#[derive(Clone, Debug)]
pub struct Cover {
    pub set: GSet,
    pub xi: Vec<Int>,
}

impl Cover {
    /// The hint of `m` if present, otherwise a greedy cover.
    pub fn of(m: &MackeyFunctor) -> Cover {
        match m.cover_hint() {
            Some(c) => (**c).clone(),
            None => Cover::greedy(m),
        }
    }

    /// Adds level generators from the top level down until everything is hit.
    pub fn greedy(m: &MackeyFunctor) -> Cover {
        let group = m.group().clone();
        let mut cover = Cover { set: GSet::empty(&group), xi: Vec::new() };
        for c in (0..group.num_classes()).rev() {
            let orbit = GSet::orbit(&group, group.class_rep(c));
            let level = m.level(c).clone();
            for k in 0..level.num_gens() {
                let images = CoverImages::new(m, &cover).images(&orbit);
                let hom = AbHom::new_unchecked(Arc::new(FgAb::free(images.rows())), level.clone(), images).unwrap();
                if hom.solve(&unit_vec(level.num_gens(), k)).is_ok() {
                    continue;
                }
                let (set, incl) = GSet::coproduct(&group, &[cover.set.clone(), orbit.clone()]);
                let mut xi = zero_vec(m.value(&set).num_gens());
                let old = m.apply_transfer(&incl[0], &cover.xi);
                add_assign(&mut xi, &old);
                let new = m.apply_transfer(&incl[1], &unit_vec(level.num_gens(), k));
                add_assign(&mut xi, &new);
                cover = Cover { set, xi };
            }
        }
        cover
    }
}

impl Cover {
    /// The restricted cover Res S with ξ pulled back along the counit G×_H Res S → S.
    pub fn restrict(&self, m: &Arc<MackeyFunctor>, sub: usize) -> Cover {
        self.restrict_with(m, &RestrictionModel::new(m, sub), sub)
    }

    fn restrict_with(&self, m: &MackeyFunctor, model: &RestrictionModel, sub: usize) -> Cover {
        let set = self.set.restrict(sub);
        let eps = induction_counit(&self.set, sub);
        let xi = model_to_levelwise(model, &set).apply(&m.apply_restriction(&eps, &self.xi));
        Cover { set, xi }
    }
}

/// The map [−, S](D) → M(D) of a cover, in span coordinates.
pub struct CoverImages<'a> {
    pub m: &'a MackeyFunctor,
    pub cover: &'a Cover,
    pub coords: RepresentableCoords,
}

impl<'a> CoverImages<'a> {
    pub fn new(m: &'a MackeyFunctor, cover: &'a Cover) -> Self {
        CoverImages { m, cover, coords: RepresentableCoords::new(&cover.set) }
    }

    /// t_k r_h ξ for the span D ←k W →h S.
    pub fn span_image(&self, k: &GMap, h: &GMap) -> Vec<Int> {
        self.m.apply_transfer(k, &self.m.apply_restriction(h, &self.cover.xi))
    }

    /// The span D ← W → S of a nonnegative coordinate vector.
    pub fn realize(&self, d: &GSet, v: &[Int]) -> (GMap, GMap) {
        let w = self.coords.realize(d, v);
        (w.then(&d.proj1(&self.cover.set)), w.then(&d.proj2(&self.cover.set)))
    }

    /// Rows: images of the basis spans.
    pub fn images(&self, d: &GSet) -> IntMatrix {
        let n = self.coords.dim(d);
        let cols = self.m.value(d).num_gens();
        let rows = (0..n)
            .map(|k| {
                let (a, b) = self.realize(d, &unit_vec(n, k));
                self.span_image(&a, &b)
            })
            .collect();
        IntMatrix::from_rows(rows, cols)
    }
}

/// [−, T]: X ↦ A(X×T).
pub struct RepresentableModel {
    group: Arc<FiniteGroup>,
    t: GSet,
}

impl RepresentableModel {
    pub fn new(t: &GSet) -> Self {
        RepresentableModel { group: t.group().clone(), t: t.clone() }
    }

    pub fn basis(&self, x: &GSet) -> SpanBasis {
        SpanBasis::new(&x.product(&self.t))
    }
}

impl MackeyModel for RepresentableModel {
    fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    fn eval(&self, x: &GSet) -> FgAb {
        FgAb::free(self.basis(x).len())
    }

    fn restriction(&self, f: &GMap) -> IntMatrix {
        let h = f.product(&GMap::identity(&self.t));
        self.basis(&f.source).restriction_matrix(&self.basis(&f.target), &h)
    }

    fn transfer(&self, f: &GMap) -> IntMatrix {
        let h = f.product(&GMap::identity(&self.t));
        self.basis(&f.source).transfer_matrix(&self.basis(&f.target), &h)
    }

    fn label(&self) -> String {
        format!("[-,T] with T of orbit type {:?}", self.t.orbit_type())
    }
}

pub fn burnside_mackey(group: &Arc<FiniteGroup>) -> MackeyFunctor {
    representable_mackey(&GSet::point(group)).with_label("burnside")
}

pub fn representable_mackey(t: &GSet) -> MackeyFunctor {
    let m = MackeyFunctor::from_model(&RepresentableModel::new(t));
    let label = format!("representable{:?}", t.orbit_type());
    let coords = RepresentableCoords::new(t);
    let diag = GMap::new_unchecked(t.clone(), t.product(t), (0..t.size()).map(|p| p * t.size() + p).collect());
    let xi = coords.classify(t, &diag);
    m.with_label(&label).with_cover(Cover { set: t.clone(), xi })
}

/// A G-module structure on Z^rank: g·v = v·act[g].
#[derive(Clone, Debug)]
pub struct ZModule {
    pub group: Arc<FiniteGroup>,
    pub rank: usize,
    pub act: Vec<IntMatrix>,
}

impl ZModule {
    pub fn new(group: &Arc<FiniteGroup>, act: Vec<IntMatrix>) -> Result<Self, MackeyError> {
        if act.len() != group.order() {
            return Err(MackeyError::BadModule("one matrix per element".into()));
        }
        let rank = act[0].rows();
        if act.iter().any(|m| m.rows() != rank || m.cols() != rank) {
            return Err(MackeyError::BadModule("square matrices of equal size".into()));
        }
        if act[group.identity()] != IntMatrix::identity(rank) {
            return Err(MackeyError::BadModule("identity acts nontrivially".into()));
        }
        for a in group.elements() {
            for b in group.elements() {
                if act[group.mul(a, b)] != act[b].mul(&act[a]) {
                    return Err(MackeyError::BadModule(format!("not an action at ({}, {})", a, b)));
                }
            }
        }
        Ok(ZModule { group: group.clone(), rank, act })
    }

    pub fn trivial(group: &Arc<FiniteGroup>, rank: usize) -> Self {
        ZModule { group: group.clone(), rank, act: vec![IntMatrix::identity(rank); group.order()] }
    }

    /// The permutation module Z{X}.
    pub fn permutation(x: &GSet) -> Self {
        let n = x.size();
        let act = x
            .group()
            .elements()
            .map(|g| {
                let mut m = IntMatrix::zeros(n, n);
                for p in 0..n {
                    m.set(p, x.act(g, p), Int::one());
                }
                m
            })
            .collect();
        ZModule { group: x.group().clone(), rank: n, act }
    }

    pub fn apply(&self, g: usize, v: &[Int]) -> Vec<Int> {
        self.act[g].apply(v)
    }

    /// A basis of the fixed sublattice of the subgroup s with a left inverse.
    fn fixed_basis(&self, s: usize) -> (IntMatrix, IntMatrix) {
        let elems = &self.group.subgroup(s).elements;
        let r = self.rank;
        let mut cols: Vec<IntMatrix> = Vec::new();
        for &h in elems {
            let mut d = self.act[h].clone();
            for i in 0..r {
                *d.entry_mut(i, i) -= 1;
            }
            cols.push(d);
        }
        let mut big = IntMatrix::zeros(r, r * cols.len());
        for (k, d) in cols.iter().enumerate() {
            big.set_block(0, k * r, d);
        }
        let snf = crate::abelian::smith_normal_form(&big.transpose());
        let basis: Vec<Vec<Int>> = (snf.rank..r).map(|i| (0..r).map(|j| snf.v.get(j, i).clone()).collect()).collect();
        let b = IntMatrix::from_rows(basis, r);
        let left = right_inverse(&b);
        (b, left)
    }
}

/// C with B·C = I for a matrix whose rows span a saturated lattice.
fn right_inverse(b: &IntMatrix) -> IntMatrix {
    let k = b.rows();
    let r = b.cols();
    if k == 0 {
        return IntMatrix::zeros(r, 0);
    }
    let snf = crate::abelian::smith_normal_form(b);
    let mut d = IntMatrix::zeros(r, k);
    for i in 0..k {
        d.set(i, i, Int::one());
    }
    snf.v.mul(&d).mul(&snf.u)
}

/// The fixed-point functor X ↦ Map_G(X, L).
pub struct FixedPointModel {
    module: ZModule,
    fixed: Vec<(IntMatrix, IntMatrix)>,
}

impl FixedPointModel {
    pub fn new(module: &ZModule) -> Self {
        let fixed = (0..module.group.subgroups().len()).map(|s| module.fixed_basis(s)).collect();
        FixedPointModel { module: module.clone(), fixed }
    }

    fn offsets(&self, x: &GSet) -> Vec<usize> {
        let mut offs = vec![0];
        for o in x.orbits() {
            offs.push(offs.last().unwrap() + self.fixed[o.sub].0.rows());
        }
        offs
    }

    /// Value of φ at a point, as a vector of L.
    fn value_at(&self, x: &GSet, offs: &[usize], v: &[Int], p: usize) -> Vec<Int> {
        let (o, _) = x.decomposition().loc[p];
        let orb = &x.orbits()[o];
        let base = self.fixed[orb.sub].0.apply(&v[offs[o]..offs[o + 1]]);
        self.module.apply(x.translator(p), &base)
    }

    fn coords(&self, x: &GSet, o: usize, val: &[Int]) -> Vec<Int> {
        self.fixed[x.orbits()[o].sub].1.apply(val)
    }
}

impl MackeyModel for FixedPointModel {
    fn group(&self) -> &Arc<FiniteGroup> {
        &self.module.group
    }

    fn eval(&self, x: &GSet) -> FgAb {
        FgAb::free(*self.offsets(x).last().unwrap())
    }

    fn restriction(&self, f: &GMap) -> IntMatrix {
        let (x, y) = (&f.source, &f.target);
        let (ox, oy) = (self.offsets(x), self.offsets(y));
        let mut m = IntMatrix::zeros(*oy.last().unwrap(), *ox.last().unwrap());
        for k in 0..*oy.last().unwrap() {
            let e = unit_vec(*oy.last().unwrap(), k);
            for (a, orb) in x.orbits().iter().enumerate() {
                let val = self.value_at(y, &oy, &e, f.apply(orb.base));
                for (j, c) in self.coords(x, a, &val).into_iter().enumerate() {
                    m.set(k, ox[a] + j, c);
                }
            }
        }
        m
    }

    fn transfer(&self, f: &GMap) -> IntMatrix {
        let (x, y) = (&f.source, &f.target);
        let (ox, oy) = (self.offsets(x), self.offsets(y));
        let mut m = IntMatrix::zeros(*ox.last().unwrap(), *oy.last().unwrap());
        let fibers = f.fibers();
        for k in 0..*ox.last().unwrap() {
            let e = unit_vec(*ox.last().unwrap(), k);
            for (b, orb) in y.orbits().iter().enumerate() {
                let mut val = zero_vec(self.module.rank);
                for &p in &fibers[orb.base] {
                    let w = self.value_at(x, &ox, &e, p);
                    add_scaled(&mut val, &Int::one(), &w);
                }
                for (j, c) in self.coords(y, b, &val).into_iter().enumerate() {
                    m.set(k, oy[b] + j, c);
                }
            }
        }
        m
    }

    fn label(&self) -> String {
        format!("fixed points of a rank {} module", self.module.rank)
    }
}

pub fn fixedpoint_mackey(module: &ZModule) -> MackeyFunctor {
    MackeyFunctor::from_model(&FixedPointModel::new(module)).with_label("fixedpoint")
}

/// Res_H^G M: Z ↦ M(G×_H Z).
pub struct RestrictionModel {
    parent: Arc<MackeyFunctor>,
    sub: usize,
    group: Arc<FiniteGroup>,
}

impl RestrictionModel {
    pub fn new(m: &Arc<MackeyFunctor>, sub: usize) -> Self {
        RestrictionModel { parent: m.clone(), sub, group: m.group().subgroup_group(sub).0 }
    }
}

impl MackeyModel for RestrictionModel {
    fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    fn eval(&self, x: &GSet) -> FgAb {
        (*self.parent.value(&GSet::induce(self.parent.group(), self.sub, x))).clone()
    }

    fn restriction(&self, f: &GMap) -> IntMatrix {
        self.parent.restriction_matrix(&f.induce(self.parent.group(), self.sub))
    }

    fn transfer(&self, f: &GMap) -> IntMatrix {
        self.parent.transfer_matrix(&f.induce(self.parent.group(), self.sub))
    }

    fn label(&self) -> String {
        format!("Res({})", self.parent.label())
    }
}

pub fn mackey_restriction(m: &Arc<MackeyFunctor>, sub: usize) -> MackeyFunctor {
    let model = RestrictionModel::new(m, sub);
    let res = MackeyFunctor::from_model(&model);
    match m.cover_hint() {
        Some(c) => {
            let cover = c.restrict_with(m, &model, sub);
            res.with_cover(cover)
        }
        None => res,
    }
}

/// Ind_H^G M: X ↦ M(Res X).
pub struct InductionModel {
    inner: Arc<MackeyFunctor>,
    sub: usize,
    group: Arc<FiniteGroup>,
}

impl InductionModel {
    pub fn new(group: &Arc<FiniteGroup>, sub: usize, m: &Arc<MackeyFunctor>) -> Self {
        InductionModel { inner: m.clone(), sub, group: group.clone() }
    }
}

impl MackeyModel for InductionModel {
    fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    fn eval(&self, x: &GSet) -> FgAb {
        (*self.inner.value(&x.restrict(self.sub))).clone()
    }

    fn restriction(&self, f: &GMap) -> IntMatrix {
        self.inner.restriction_matrix(&f.restrict(self.sub))
    }

    fn transfer(&self, f: &GMap) -> IntMatrix {
        self.inner.transfer_matrix(&f.restrict(self.sub))
    }

    fn label(&self) -> String {
        format!("Ind({})", self.inner.label())
    }
}

pub fn mackey_induction(group: &Arc<FiniteGroup>, sub: usize, m: &Arc<MackeyFunctor>) -> MackeyFunctor {
    MackeyFunctor::from_model(&InductionModel::new(group, sub, m))
}

/// M ⊗ [−, T] realized as X ↦ M(X×T).
pub struct ShiftModel {
    inner: Arc<MackeyFunctor>,
    t: GSet,
}

impl ShiftModel {
    pub fn new(m: &Arc<MackeyFunctor>, t: &GSet) -> Self {
        ShiftModel { inner: m.clone(), t: t.clone() }
    }
}

impl MackeyModel for ShiftModel {
    fn group(&self) -> &Arc<FiniteGroup> {
        self.inner.group()
    }

    fn eval(&self, x: &GSet) -> FgAb {
        (*self.inner.value(&x.product(&self.t))).clone()
    }

    fn restriction(&self, f: &GMap) -> IntMatrix {
        self.inner.restriction_matrix(&f.product(&GMap::identity(&self.t)))
    }

    fn transfer(&self, f: &GMap) -> IntMatrix {
        self.inner.transfer_matrix(&f.product(&GMap::identity(&self.t)))
    }

    fn label(&self) -> String {
        format!("{} shifted", self.inner.label())
    }
}

pub fn shift_tensor(m: &Arc<MackeyFunctor>, t: &GSet) -> MackeyFunctor {
    MackeyFunctor::from_model(&ShiftModel::new(m, t))
}

/// Φ^H M = M(G/H) modulo transfers from proper subgroups, for a class index.
pub struct GeometricFixedPoints {
    pub class: usize,
    pub value: Arc<FgAb>,
    pub projection: AbHom,
    /// Action of each normalizer element on the level, as matrices.
    pub weyl_action: Vec<(usize, IntMatrix)>,
}

pub fn geometric_fixed_points(m: &MackeyFunctor, class: usize) -> GeometricFixedPoints {
    let group = m.group();
    let r = group.class_rep(class);
    let level = m.level(class).clone();
    let mut image: Vec<Vec<Int>> = Vec::new();
    for (key, om) in m.orbit_maps() {
        if key.1 == class && group.subgroup(group.class_rep(key.0)).order() < group.subgroup(r).order() {
            image.extend(om.tr.to_rows());
        }
    }
    image.sort();
    let value = Arc::new(level.quotient(&image));
    let projection = AbHom { source: level.clone(), target: value.clone(), matrix: IntMatrix::identity(level.num_gens()) };
    let cos = group.cosets(r);
    let mut weyl_action = Vec::new();
    for &n in &group.subgroup(r).normalizer {
        let key = (class, class, cos.coset_of[n]);
        weyl_action.push((n, m.orbit_maps()[&key].res.clone()));
    }
    GeometricFixedPoints { class, value, projection, weyl_action }
}

impl GeometricFixedPoints {
    /// Φ^H M / W(H).
    pub fn weyl_coinvariants(&self) -> Arc<FgAb> {
        let n = self.value.num_gens();
        let mut rels = Vec::new();
        for (_, a) in &self.weyl_action {
            for k in 0..n {
                let e = unit_vec(n, k);
                rels.push(sub_vec(&a.apply(&e), &e));
            }
        }
        Arc::new(self.value.quotient(&rels))
    }
}

/// A B_G(T)-Mackey functor: one Mackey functor over the stabilizer of the
/// base point of each orbit of T.
#[derive(Clone)]
pub struct BGTMackeyFunctor {
    pub base: GSet,
    pub components: Vec<Arc<MackeyFunctor>>,
}

/// The fiber of an object over T above the base point of orbit k of T.
pub fn fiber_over(base: &GSet, k: usize, y: &GMap) -> (GSet, Vec<usize>) {
    let orb = &base.orbits()[k];
    let pts: Vec<usize> = (0..y.source.size()).filter(|&p| y.apply(p) == orb.base).collect();
    let res = y.source.restrict(orb.sub);
    (res.subset(&pts), pts)
}

impl GSet {
    /// The invariant subset on the listed points, in the given order.
    pub fn subset(&self, pts: &[usize]) -> GSet {
        let mut pos = vec![usize::MAX; self.size()];
        for (i, &p) in pts.iter().enumerate() {
            pos[p] = i;
        }
        GSet::from_fn(self.group().clone(), pts.len(), |g, i| pos[self.act(g, pts[i])])
    }
}

impl BGTMackeyFunctor {
    pub fn new(base: &GSet, components: Vec<Arc<MackeyFunctor>>) -> Result<Self, MackeyError> {
        if components.len() != base.orbits().len() {
            return Err(MackeyError::ShapeMismatch("one component per orbit".into()));
        }
        for (c, o) in components.iter().zip(base.orbits()) {
            let (h, _) = base.group().subgroup_group(o.sub);
            if !same_group(c.group(), &h) {
                return Err(MackeyError::GroupMismatch);
            }
        }
        Ok(BGTMackeyFunctor { base: base.clone(), components })
    }

    /// The restriction of a G-Mackey functor to every orbit of T.
    pub fn constant(base: &GSet, m: &Arc<MackeyFunctor>) -> Self {
        let components = base.orbits().iter().map(|o| Arc::new(mackey_restriction(m, o.sub))).collect();
        BGTMackeyFunctor { base: base.clone(), components }
    }

    fn fibers(&self, y: &GMap) -> Vec<(GSet, Vec<usize>)> {
        (0..self.components.len()).map(|k| fiber_over(&self.base, k, y)).collect()
    }

    pub fn eval(&self, y: &GMap) -> Arc<FgAb> {
        let fibers = self.fibers(y);
        let vals: Vec<Arc<FgAb>> = fibers.iter().zip(&self.components).map(|((f, _), m)| m.value(f)).collect();
        let refs: Vec<&FgAb> = vals.iter().map(|v| &**v).collect();
        Arc::new(FgAb::direct_sum(&refs))
    }

    fn fiber_map(&self, f: &GMap, fx: &(GSet, Vec<usize>), fy: &(GSet, Vec<usize>)) -> GMap {
        let mut pos = HashMap::new();
        for (i, &p) in fy.1.iter().enumerate() {
            pos.insert(p, i);
        }
        GMap::new_unchecked(fx.0.clone(), fy.0.clone(), fx.1.iter().map(|&p| pos[&f.apply(p)]).collect())
    }

    /// Restriction along f: X → Y over T (structure maps x: X → T, y: Y → T).
    pub fn restriction_matrix(&self, f: &GMap, x: &GMap, y: &GMap) -> IntMatrix {
        let (fx, fy) = (self.fibers(x), self.fibers(y));
        let blocks: Vec<IntMatrix> = (0..self.components.len())
            .map(|k| self.components[k].restriction_matrix(&self.fiber_map(f, &fx[k], &fy[k])))
            .collect();
        IntMatrix::block_diag(&blocks.iter().collect::<Vec<_>>())
    }

    pub fn transfer_matrix(&self, f: &GMap, x: &GMap, y: &GMap) -> IntMatrix {
        let (fx, fy) = (self.fibers(x), self.fibers(y));
        let blocks: Vec<IntMatrix> = (0..self.components.len())
            .map(|k| self.components[k].transfer_matrix(&self.fiber_map(f, &fx[k], &fy[k])))
            .collect();
        IntMatrix::block_diag(&blocks.iter().collect::<Vec<_>>())
    }
}

/// i_*N: the B_G(V)-functor (Y → V) ↦ N(Y ×_V U → U), over one orbit of V.
struct PushModel {
    n: BGTMackeyFunctor,
    i: GMap,
    sub: usize,
    base_point: usize,
    group: Arc<FiniteGroup>,
}

impl PushModel {
    fn over(&self, z: &GSet) -> (GMap, GMap) {
        let g = self.i.source.group().clone();
        let ind = GSet::induce(&g, self.sub, z);
        let m = z.size();
        let reps = &g.cosets(self.sub).reps;
        let to_v = GMap::new_unchecked(
            ind.clone(),
            self.i.target.clone(),
            (0..ind.size()).map(|p| self.i.target.act(reps[p / m.max(1)], self.base_point)).collect(),
        );
        let pb = pullback_unchecked(&to_v, &self.i);
        (to_v, pb.p2)
    }
}

impl MackeyModel for PushModel {
    fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    fn eval(&self, z: &GSet) -> FgAb {
        (*self.n.eval(&self.over(z).1)).clone()
    }

    fn restriction(&self, f: &GMap) -> IntMatrix {
        let g = self.i.source.group().clone();
        let (sx, px) = self.over(&f.source);
        let (sy, py) = self.over(&f.target);
        let h = lift_over(&g, self.sub, f, &sx, &sy, &self.i, &px, &py);
        self.n.restriction_matrix(&h, &px, &py)
    }

    fn transfer(&self, f: &GMap) -> IntMatrix {
        let g = self.i.source.group().clone();
        let (sx, px) = self.over(&f.source);
        let (sy, py) = self.over(&f.target);
        let h = lift_over(&g, self.sub, f, &sx, &sy, &self.i, &px, &py);
        self.n.transfer_matrix(&h, &px, &py)
    }

    fn label(&self) -> String {
        "pushforward".into()
    }
}

#[allow(clippy::too_many_arguments)]
fn lift_over(g: &Arc<FiniteGroup>, sub: usize, f: &GMap, sx: &GMap, sy: &GMap, i: &GMap, px: &GMap, py: &GMap) -> GMap {
    let ind = f.induce(g, sub);
    let pbx = pullback_unchecked(sx, i);
    let pby = pullback_unchecked(sy, i);
    let index: HashMap<(usize, usize), usize> = pby.pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let pts = pbx.pairs.iter().map(|&(a, u)| index[&(ind.apply(a), u)]).collect();
    GMap::new_unchecked(px.source.clone(), py.source.clone(), pts)
}

/// The additive push-forward i_*N along i: U → V.
pub fn push_forward(i: &GMap, n: &BGTMackeyFunctor) -> BGTMackeyFunctor {
    let v = &i.target;
    let comps = v
        .orbits()
        .iter()
        .map(|o| {
            let model = PushModel { n: n.clone(), i: i.clone(), sub: o.sub, base_point: o.base, group: v.group().subgroup_group(o.sub).0 };
            Arc::new(MackeyFunctor::from_model(&model))
        })
        .collect();
    BGTMackeyFunctor { base: v.clone(), components: comps }
}

/// i^*M for i: U → V: (W → U) ↦ M(W → V).
pub fn pull_back(i: &GMap, m: &BGTMackeyFunctor) -> BGTMackeyFunctor {
    let u = &i.source;
    let g = u.group().clone();
    let comps = u
        .orbits()
        .iter()
        .map(|o| {
            let model = PullModel { m: m.clone(), i: i.clone(), sub: o.sub, base_point: o.base, group: g.subgroup_group(o.sub).0 };
            Arc::new(MackeyFunctor::from_model(&model))
        })
        .collect();
    BGTMackeyFunctor { base: u.clone(), components: comps }
}

struct PullModel {
    m: BGTMackeyFunctor,
    i: GMap,
    sub: usize,
    base_point: usize,
    group: Arc<FiniteGroup>,
}

impl PullModel {
    fn over(&self, z: &GSet) -> GMap {
        let g = self.i.source.group().clone();
        let ind = GSet::induce(&g, self.sub, z);
        let m = z.size().max(1);
        let reps = &g.cosets(self.sub).reps;
        GMap::new_unchecked(
            ind.clone(),
            self.i.target.clone(),
            (0..ind.size()).map(|p| self.i.apply(self.i.source.act(reps[p / m], self.base_point))).collect(),
        )
    }
}

impl MackeyModel for PullModel {
    fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    fn eval(&self, z: &GSet) -> FgAb {
        (*self.m.eval(&self.over(z))).clone()
    }

    fn restriction(&self, f: &GMap) -> IntMatrix {
        let g = self.i.source.group().clone();
        self.m.restriction_matrix(&f.induce(&g, self.sub), &self.over(&f.source), &self.over(&f.target))
    }

    fn transfer(&self, f: &GMap) -> IntMatrix {
        let g = self.i.source.group().clone();
        self.m.transfer_matrix(&f.induce(&g, self.sub), &self.over(&f.source), &self.over(&f.target))
    }

    fn label(&self) -> String {
        "pullback".into()
    }
}

/// A levelwise map of Mackey functors.
#[derive(Clone)]
pub struct MackeyMorphism {
    pub source: Arc<MackeyFunctor>,
    pub target: Arc<MackeyFunctor>,
    pub levels: Vec<IntMatrix>,
}

impl MackeyMorphism {
    pub fn identity(m: &Arc<MackeyFunctor>) -> Self {
        let levels = m.levels().iter().map(|l| IntMatrix::identity(l.num_gens())).collect();
        MackeyMorphism { source: m.clone(), target: m.clone(), levels }
    }

    /// The matrix at X, block diagonal over the orbits of X.
    pub fn at(&self, x: &GSet) -> IntMatrix {
        let blocks: Vec<&IntMatrix> = x.orbits().iter().map(|o| &self.levels[o.class]).collect();
        if blocks.is_empty() {
            return IntMatrix::zeros(0, 0);
        }
        IntMatrix::block_diag(&blocks)
    }

    pub fn apply(&self, x: &GSet, v: &[Int]) -> Vec<Int> {
        self.at(x).apply(v)
    }

    /// Well-definedness at each level and naturality for every orbit map.
    pub fn check(&self) -> Report {
        let mut report = Report::new("mackey-morphism");
        let group = self.source.group().clone();
        for c in 0..group.num_classes() {
            let ok = AbHom::new(self.source.level(c).clone(), self.target.level(c).clone(), self.levels[c].clone()).is_ok();
            report.record("well-defined", ok, || format!("level {c}"));
        }
        for key in orbit_keys(&group) {
            let (a, b, _) = key;
            let sm = &self.source.orbit_maps()[&key];
            let tm = &self.target.orbit_maps()[&key];
            let res_l = sm.res.mul(&self.levels[a]);
            let res_r = self.levels[b].mul(&tm.res);
            let ok = (0..res_l.rows()).all(|r| self.target.level(a).equal(res_l.row(r), res_r.row(r)));
            report.record("restriction", ok, || format!("orbit map {key:?}"));
            let tr_l = sm.tr.mul(&self.levels[b]);
            let tr_r = self.levels[a].mul(&tm.tr);
            let ok = (0..tr_l.rows()).all(|r| self.target.level(b).equal(tr_l.row(r), tr_r.row(r)));
            report.record("transfer", ok, || format!("orbit map {key:?}"));
        }
        report
    }
}

/// Built-in examples over a group.
pub fn builtin_examples(group: &Arc<FiniteGroup>) -> Vec<(String, Arc<MackeyFunctor>)> {
    vec![
        ("burnside".into(), Arc::new(burnside_mackey(group))),
        ("representable:G/e".into(), Arc::new(representable_mackey(&GSet::orbit(group, group.trivial_subgroup())))),
        ("fixedpoint:trivial".into(), Arc::new(fixedpoint_mackey(&ZModule::trivial(group, 1)))),
        ("fixedpoint:regular".into(), Arc::new(fixedpoint_mackey(&ZModule::permutation(&GSet::orbit(group, group.trivial_subgroup()))))),
    ]
}

fn hom_equal(target: &FgAb, a: &IntMatrix, b: &IntMatrix) -> bool {
    a.rows() == b.rows() && (0..a.rows()).all(|i| target.equal(a.row(i), b.row(i)))
}

/// Exhaustive verification of the Mackey axioms on all diagrams whose objects
/// have at most `bound` points in total.
pub fn check_mackey_axioms(m: &MackeyFunctor, bound: usize) -> Report {
    let group = m.group().clone();
    let mut rep = Report::new("mackey-axioms");
    for c in ["well-defined", "identity", "functoriality", "pullback", "additivity", "conjugation"] {
        rep.declare(c);
    }
    let objs = gsets_up_to(&group, bound);
    let mut maps: BTreeMap<(usize, usize), Vec<GMap>> = BTreeMap::new();
    for (a, x) in objs.iter().enumerate() {
        for (b, y) in objs.iter().enumerate() {
            if x.size() + y.size() <= bound {
                maps.insert((a, b), hom_set(x, y));
            }
        }
    }
    for ((a, b), fs) in &maps {
        let (vx, vy) = (m.value(&objs[*a]), m.value(&objs[*b]));
        for f in fs {
            let r = m.restriction_matrix(f);
            let t = m.transfer_matrix(f);
            let ok = vy.relations().iter().all(|rel| vx.is_zero(&r.apply(rel))) && vx.relations().iter().all(|rel| vy.is_zero(&t.apply(rel)));
            rep.record("well-defined", ok, || format!("map {:?} between objects {} and {}", f.points, a, b));
        }
    }
    for (a, x) in objs.iter().enumerate() {
        if 2 * x.size() > bound {
            continue;
        }
        let id = GMap::identity(x);
        let v = m.value(x);
        let i = IntMatrix::identity(v.num_gens());
        rep.record("identity", hom_equal(&v, &m.restriction_matrix(&id), &i) && hom_equal(&v, &m.transfer_matrix(&id), &i), || format!("object {}", a));
    }
    for ((a, b), fs) in &maps {
        for ((b2, c), gs) in &maps {
            if b2 != b || objs[*a].size() + objs[*b].size() + objs[*c].size() > bound {
                continue;
            }
            let (vx, vz) = (m.value(&objs[*a]), m.value(&objs[*c]));
            for f in fs {
                for g in gs {
                    let gf = f.then(g);
                    let r_ok = hom_equal(&vx, &m.restriction_matrix(&gf), &m.restriction_matrix(g).mul(&m.restriction_matrix(f)));
                    let t_ok = hom_equal(&vz, &m.transfer_matrix(&gf), &m.transfer_matrix(f).mul(&m.transfer_matrix(g)));
                    rep.record("functoriality", r_ok && t_ok, || format!("f = {:?}, g = {:?}", f.points, g.points));
                }
            }
        }
    }
    for ((a, c), fs) in &maps {
        for ((b, c2), gs) in &maps {
            if c2 != c || objs[*a].size() + objs[*b].size() + objs[*c].size() > bound {
                continue;
            }
            let vy = m.value(&objs[*b]);
            for f in fs {
                for g in gs {
                    let pb = pullback_unchecked(f, g);
                    let lhs = m.transfer_matrix(f).mul(&m.restriction_matrix(g));
                    let rhs = m.restriction_matrix(&pb.p1).mul(&m.transfer_matrix(&pb.p2));
                    rep.record("pullback", hom_equal(&vy, &lhs, &rhs), || format!("square over object {}: f = {:?}, g = {:?}", c, f.points, g.points));
                }
            }
        }
    }
    for (a, x) in objs.iter().enumerate() {
        for (b, y) in objs.iter().enumerate() {
            if x.size() + y.size() > bound || b < a {
                continue;
            }
            let (u, inc) = GSet::coproduct(&group, &[x.clone(), y.clone()]);
            let r1 = m.restriction_matrix(&inc[0]);
            let r2 = m.restriction_matrix(&inc[1]);
            let mut comb = IntMatrix::zeros(r1.rows(), r1.cols() + r2.cols());
            comb.set_block(0, 0, &r1);
            comb.set_block(0, r1.cols(), &r2);
            let vx = m.value(x);
            let vy = m.value(y);
            let sum = Arc::new(FgAb::direct_sum(&[&vx, &vy]));
            let h = AbHom { source: m.value(&u), target: sum, matrix: comb };
            let ok = h.is_isomorphism().unwrap_or(false);
            rep.record("additivity", ok, || format!("objects {} and {}", a, b));
        }
    }
    for c in 0..group.num_classes() {
        let r = group.class_rep(c);
        let lvl = m.level(c);
        for &h in &group.subgroup(r).elements {
            let ch = m.conj(h, r);
            rep.record("conjugation", ch.equals(&AbHom::identity(lvl)), || format!("inner element {} on class {}", h, c));
        }
        for &x in &group.subgroup(r).normalizer {
            for &y in &group.subgroup(r).normalizer {
                let lhs = m.conj(group.mul(x, y), r);
                let rhs = m.conj(y, r).then(&m.conj(x, r));
                rep.record("conjugation", lhs.equals(&rhs), || format!("elements {} and {} on class {}", x, y, c));
            }
        }
    }
    rep
}

/// Zero test helper used by element-level checks.
pub fn is_zero_element(v: &FgAb, x: &[Int]) -> bool {
    v.is_zero(x) || x.iter().all(|c| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::int;
    use crate::groups::catalog_group;

    #[test]
    fn burnside_c2() {
        let g = catalog_group("C2").unwrap();
        let a = burnside_mackey(&g);
        assert_eq!(a.level(1).num_gens(), 2);
        assert_eq!(a.level(0).num_gens(), 1);
        let tr = a.tr(0, 1);
        assert_eq!(tr.apply(&[int(1)]), vec![int(0), int(1)]);
        assert!(check_mackey_axioms(&a, 5).passed());
        let res = a.res(0, 1);
        assert_eq!(res.apply(&[int(1), int(0)]), vec![int(1)]);
        assert_eq!(res.apply(&[int(0), int(1)]), vec![int(2)]);
        assert!(check_mackey_axioms(&a, 4).passed());
    }

    #[test]
    fn fixed_point_trivial_c2() {
        let g = catalog_group("C2").unwrap();
        let m = fixedpoint_mackey(&ZModule::trivial(&g, 1));
        assert_eq!(m.res(0, 1).apply(&[int(1)]), vec![int(1)]);
        assert_eq!(m.tr(0, 1).apply(&[int(1)]), vec![int(2)]);
    }

    #[test]
    fn corrupted_transfer_fails() {
        let g = catalog_group("C2").unwrap();
        let mut a = burnside_mackey(&g);
        let key = (0, 1, 0);
        a.orbit_maps_mut().get_mut(&key).unwrap().tr = IntMatrix::from_i64(&[vec![1, 1]]);
        let rep = check_mackey_axioms(&a, 5);
        assert!(rep.failed("pullback"));
    }

    #[test]
    fn phi_of_burnside() {
        let g = catalog_group("C2").unwrap();
        let a = burnside_mackey(&g);
        let phi = geometric_fixed_points(&a, 1);
        assert_eq!(phi.value.free_rank(), 1);
        assert!(phi.value.is_free());
    }
}
