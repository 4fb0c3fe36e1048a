//! Multiplicative push-forwards F(i, N), with the G-symmetric powers F(T, M)
//! and the norms N^{G,H}M as special cases.
//!
//! Elements are classes of pairs (Y → X, y) with Y over V and y ∈ N(Y ×_V U).
//! As for the free Tambara functor, N is presented by a cover and the
//! generators are connected pairs whose element is the restriction of ξ along
//! a labelling Y ×_V U → S_N over U.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use thiserror::Error;

use crate::abelian::{unit_vec, zero_vec, AbError, AbHom, FgAb, Int, IntMatrix};
use crate::free_tambara::{
    combo_add, combo_add_scaled, difference_combo, set_key, simplex_relations, Bispan, Combo, Domain, FreeTambara, SetKey,
};
use crate::groups::FiniteGroup;
use crate::gsets::{
    exponential_unchecked, induction_counit, induction_unit, pullback_unchecked, ExponentialDiagram, GMap, GSet, Pullback,
};
use crate::mackey::{
    geometric_fixed_points, levelwise_to_model, mackey_induction, mackey_restriction, model_to_levelwise, BGTMackeyFunctor,
    fiber_over, shift_tensor, Cover, InductionModel, MackeyError, MackeyFunctor, MackeyModel, MackeyMorphism, RestrictionModel, ShiftModel, SpanBasis,
};
use crate::tambara::{res_tambara, NormProvider, TambaraFunctor};

/// Coefficients over U together with a cover S_N → U and ξ ∈ N(S_N).
pub trait Coefficients: Send + Sync {
    fn base(&self) -> &GSet;
    fn cover_set(&self) -> &GSet;
    fn cover_map(&self) -> &GMap;
    /// N(D) for d: D → U.
    fn value(&self, d: &GMap) -> Arc<FgAb>;
    /// t_k r_h ξ ∈ N(D) for the span D ←k W →h S_N over U.
    fn image(&self, d: &GMap, k: &GMap, h: &GMap) -> Vec<Int>;
}

/// const_U M: (D → U) ↦ M(D), covered by S × U.
pub struct ConstantCoefficients {
    pub m: Arc<MackeyFunctor>,
    pub cover: Cover,
    u: GSet,
    s_n: GSet,
    s_map: GMap,
    to_s: GMap,
}

impl ConstantCoefficients {
    pub fn new(m: &Arc<MackeyFunctor>, cover: Cover, u: &GSet) -> Self {
        let s_n = cover.set.product(u);
        let s_map = cover.set.proj2(u);
        let to_s = cover.set.proj1(u);
        ConstantCoefficients { m: m.clone(), cover, u: u.clone(), s_n, s_map, to_s }
    }
}

impl Coefficients for ConstantCoefficients {
    fn base(&self) -> &GSet {
        &self.u
    }

    fn cover_set(&self) -> &GSet {
        &self.s_n
    }

    fn cover_map(&self) -> &GMap {
        &self.s_map
    }

    fn value(&self, d: &GMap) -> Arc<FgAb> {
        self.m.value(&d.source)
    }

    fn image(&self, _d: &GMap, k: &GMap, h: &GMap) -> Vec<Int> {
        let m = &self.m;
        m.apply_transfer(k, &m.apply_restriction(&h.then(&self.to_s), &self.cover.xi))
    }
}

/// A B_G(U)-Mackey functor covered orbitwise by G×_{H_a} S_a.
pub struct FiberedCoefficients {
    pub bgt: BGTMackeyFunctor,
    s_n: GSet,
    s_map: GMap,
    xi: Vec<Int>,
}

impl FiberedCoefficients {
    pub fn new(bgt: BGTMackeyFunctor, covers: &[Cover]) -> Self {
        let u = bgt.base.clone();
        let group = u.group().clone();
        let parts: Vec<GSet> = u.orbits().iter().zip(covers).map(|(o, c)| GSet::induce(&group, o.sub, &c.set)).collect();
        let (s_n, _) = GSet::coproduct(&group, &parts);
        let mut pts = Vec::with_capacity(s_n.size());
        let mut xi = Vec::new();
        for (o, c) in u.orbits().iter().zip(covers) {
            let m = c.set.size();
            for p in 0..group.cosets(o.sub).reps.len() * m {
                pts.push(o.points[p / m]);
            }
            xi.extend(c.xi.iter().cloned());
        }
        let s_map = GMap::new_unchecked(s_n.clone(), u, pts);
        FiberedCoefficients { bgt, s_n, s_map, xi }
    }
}

impl Coefficients for FiberedCoefficients {
    fn base(&self) -> &GSet {
        &self.bgt.base
    }

    fn cover_set(&self) -> &GSet {
        &self.s_n
    }

    fn cover_map(&self) -> &GMap {
        &self.s_map
    }

    fn value(&self, d: &GMap) -> Arc<FgAb> {
        self.bgt.eval(d)
    }

    fn image(&self, d: &GMap, k: &GMap, h: &GMap) -> Vec<Int> {
        let w = k.then(d);
        let r = self.bgt.restriction_matrix(h, &w, &self.s_map).apply(&self.xi);
        self.bgt.transfer_matrix(k, &w, d).apply(&r)
    }
}

/// A connected pair G/K → X with labels on the fiber of i over the image
/// of the identity coset (in sorted fiber order).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey {
    pub class: usize,
    pub point: usize,
    pub labels: Vec<usize>,
}

/// A pair Y →j X with labels on D = Y ×_V U (pullback order) in S_N.
#[derive(Clone, Debug)]
pub struct Pair {
    pub y: GSet,
    pub j: Vec<usize>,
    pub labels: Vec<usize>,
}

impl Pair {
    pub fn j_map(&self, x: &GSet) -> GMap {
        GMap::new_unchecked(self.y.clone(), x.clone(), self.j.clone())
    }
}

/// F(i, N)(X → V) as a presented group on pair keys.
pub struct PairLevel {
    pub x: GSet,
    pub xv: GMap,
    pub gens: Vec<PairKey>,
    index: HashMap<PairKey, usize>,
    pub value: Arc<FgAb>,
}

impl PairLevel {
    pub fn index_of(&self, key: &PairKey) -> usize {
        self.index[key]
    }

    pub fn vector(&self, c: &Combo<PairKey>) -> Vec<Int> {
        let mut v = zero_vec(self.gens.len());
        for (k, a) in c {
            v[self.index[k]] += a;
        }
        v
    }

    pub fn combo(&self, v: &[Int]) -> Combo<PairKey> {
        let mut c = Combo::new();
        for (k, a) in v.iter().enumerate() {
            combo_add(&mut c, self.gens[k].clone(), a);
        }
        c
    }
}

type LevelKey = (SetKey, Vec<usize>);

/// The multiplicative push-forward along i: U → V.
pub struct PushForward {
    i: GMap,
    coeff: Arc<dyn Coefficients>,
    fib: Vec<Vec<usize>>,
    pos: Vec<usize>,
    domains: Mutex<HashMap<LevelKey, Arc<Domain>>>,
    levels: Mutex<HashMap<LevelKey, Arc<PairLevel>>>,
}

impl PushForward {
    pub fn new(i: &GMap, coeff: Arc<dyn Coefficients>) -> Result<Self, MackeyError> {
        if coeff.base().size() != i.source.size() || coeff.base().action_table() != i.source.action_table() {
            return Err(MackeyError::ShapeMismatch("coefficients live over another base".into()));
        }
        let fib = i.fibers();
        let mut pos = vec![0; i.source.size()];
        for f in &fib {
            for (k, &u) in f.iter().enumerate() {
                pos[u] = k;
            }
        }
        Ok(PushForward { i: i.clone(), coeff, fib, pos, domains: Mutex::new(HashMap::new()), levels: Mutex::new(HashMap::new()) })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.i.source.group()
    }

    pub fn map(&self) -> &GMap {
        &self.i
    }

    pub fn coefficients(&self) -> &Arc<dyn Coefficients> {
        &self.coeff
    }

    fn yv(&self, y: &GSet, j: &[usize], xv: &GMap) -> GMap {
        GMap::new_unchecked(y.clone(), self.i.target.clone(), j.iter().map(|&p| xv.apply(p)).collect())
    }

    /// D = Y ×_V U.
    pub fn fiber_product(&self, y: &GSet, j: &[usize], xv: &GMap) -> Pullback {
        pullback_unchecked(&self.yv(y, j, xv), &self.i)
    }

    fn offsets(&self, yv: &GMap) -> Vec<usize> {
        let mut off = Vec::with_capacity(yv.source.size() + 1);
        let mut t = 0;
        for y in 0..yv.source.size() {
            off.push(t);
            t += self.fib[yv.apply(y)].len();
        }
        off.push(t);
        off
    }

    pub fn keys(&self, pair: &Pair, xv: &GMap) -> Vec<PairKey> {
        let group = self.group().clone();
        let yv = self.yv(&pair.y, &pair.j, xv);
        let off = self.offsets(&yv);
        let mut out = Vec::with_capacity(pair.y.orbits().len());
        for o in pair.y.orbits() {
            let mut best: Option<(usize, Vec<usize>)> = None;
            let mut tried = BTreeSet::new();
            for &n in &group.subgroup(o.sub).normalizer {
                let y = pair.y.act(n, o.base);
                if !tried.insert(y) {
                    continue;
                }
                let cand = (pair.j[y], pair.labels[off[y]..off[y + 1]].to_vec());
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
            let (point, labels) = best.unwrap();
            out.push(PairKey { class: o.class, point, labels });
        }
        out
    }

    pub fn combo(&self, pair: &Pair, xv: &GMap) -> Combo<PairKey> {
        let mut c = Combo::new();
        for k in self.keys(pair, xv) {
            combo_add(&mut c, k, &Int::from(1));
        }
        c
    }

    pub fn materialize(&self, key: &PairKey, x: &GSet, xv: &GMap) -> Pair {
        let group = self.group();
        let k = group.class_rep(key.class);
        let y = GSet::orbit(group, k);
        let reps = &group.cosets(k).reps;
        let j: Vec<usize> = reps.iter().map(|&g| x.act(g, key.point)).collect();
        let s_n = self.coeff.cover_set();
        let mut labels = Vec::new();
        for (c, &g) in reps.iter().enumerate() {
            let v = xv.apply(j[c]);
            let gi = group.inv(g);
            for &u in &self.fib[v] {
                let u0 = self.i.source.act(gi, u);
                labels.push(s_n.act(g, key.labels[self.pos[u0]]));
            }
        }
        Pair { y, j, labels }
    }

    /// Keys of all connected labelled pairs over X.
    pub fn enumerate(&self, x: &GSet, xv: &GMap) -> Vec<PairKey> {
        let group = self.group().clone();
        let u_set = &self.i.source;
        let s_n = self.coeff.cover_set();
        let s_map = self.coeff.cover_map();
        let mut keys = BTreeSet::new();
        for c in 0..group.num_classes() {
            let k = group.class_rep(c);
            let kel = &group.subgroup(k).elements;
            for x0 in x.fixed_points(k) {
                let fiber = &self.fib[xv.apply(x0)];
                // K-orbits on the fiber: representative, and for each point (element, orbit).
                let mut orbit_of: HashMap<usize, (usize, usize)> = HashMap::new();
                let mut reps: Vec<usize> = Vec::new();
                for &u in fiber {
                    if orbit_of.contains_key(&u) {
                        continue;
                    }
                    let r = reps.len();
                    reps.push(u);
                    for &g in kel {
                        orbit_of.entry(u_set.act(g, u)).or_insert((g, r));
                    }
                }
                let choices: Vec<Vec<usize>> = reps
                    .iter()
                    .map(|&u| {
                        let stab: Vec<usize> = kel.iter().copied().filter(|&g| u_set.act(g, u) == u).collect();
                        let st = group.subgroup_index(&stab).unwrap();
                        s_n.fixed_points(st).into_iter().filter(|&s| s_map.apply(s) == u).collect()
                    })
                    .collect();
                let mut pick = vec![0usize; reps.len()];
                if choices.iter().any(|c| c.is_empty()) {
                    continue;
                }
                loop {
                    let labels = fiber
                        .iter()
                        .map(|u| {
                            let (g, r) = orbit_of[u];
                            s_n.act(g, choices[r][pick[r]])
                        })
                        .collect();
                    let key = PairKey { class: c, point: x0, labels };
                    keys.insert(self.keys(&self.materialize(&key, x, xv), xv).remove(0));
                    let mut t = 0;
                    while t < pick.len() {
                        pick[t] += 1;
                        if pick[t] < choices[t].len() {
                            break;
                        }
                        pick[t] = 0;
                        t += 1;
                    }
                    if t == pick.len() {
                        break;
                    }
                }
            }
        }
        keys.into_iter().collect()
    }

    /// P(D) → N(D) for the D of a shape Y → X.
    pub fn domain(&self, y: &GSet, j: &[usize], xv: &GMap) -> Arc<Domain> {
        let d = self.fiber_product(y, j, xv);
        let key = (set_key(&d.set), d.p2.points.to_vec());
        if let Some(dom) = self.domains.lock().unwrap().get(&key) {
            return dom.clone();
        }
        let q = pullback_unchecked(&d.p2, self.coeff.cover_map());
        let coeff = self.coeff.clone();
        let dmap = d.p2.clone();
        let dom = Arc::new(Domain::new(SpanBasis::new(&q.set), q.p1, q.p2, coeff.value(&dmap), |k, h| coeff.image(&dmap, k, h)));
        self.domains.lock().unwrap().insert(key, dom.clone());
        dom
    }

    /// Class of (Y → X, c) for a nonnegative lift c ∈ P(D).
    pub fn eval_shape(&self, y: &GSet, j: &[usize], xv: &GMap, c: &[Int]) -> Combo<PairKey> {
        let d = self.fiber_product(y, j, xv);
        let dom = self.domain(y, j, xv);
        let (k, h) = dom.realize(c);
        let exp = exponential_unchecked(&k, &d.p1);
        let pj: Vec<usize> = exp.p.points.iter().map(|&p| j[p]).collect();
        let d2 = self.fiber_product(&exp.pi, &pj, xv);
        let index: HashMap<(usize, usize), usize> = d2.pairs.iter().enumerate().map(|(t, &p)| (p, t)).collect();
        let mut labels = vec![0; d2.set.size()];
        for a in 0..exp.a.size() {
            let u = d.pairs[exp.q.apply(a)].1;
            labels[index[&(exp.top.apply(a), u)]] = h.apply(exp.e.apply(a));
        }
        self.combo(&Pair { y: exp.pi.clone(), j: pj, labels }, xv)
    }

    pub fn pair_class(&self, y: &GSet, j: &[usize], xv: &GMap, c: &[Int]) -> Combo<PairKey> {
        let degree = self.fiber_product(y, j, xv).p1.degree();
        difference_combo(degree, c, |a| self.eval_shape(y, j, xv, a))
    }

    /// Class of (Y → X, u) for u ∈ N(Y ×_V U).
    pub fn element(&self, y: &GSet, j: &[usize], xv: &GMap, u: &[Int]) -> Combo<PairKey> {
        let lift = self.domain(y, j, xv).lift(u);
        self.pair_class(y, j, xv, &lift)
    }

    /// The element y = r_h ξ ∈ N(D) carried by a pair.
    pub fn pair_element(&self, pair: &Pair, xv: &GMap) -> Vec<Int> {
        let d = self.fiber_product(&pair.y, &pair.j, xv);
        let h = GMap::new_unchecked(d.set.clone(), self.coeff.cover_set().clone(), pair.labels.clone());
        self.coeff.image(&d.p2, &GMap::identity(&d.set), &h)
    }

    pub fn relation_instances(&self, x: &GSet, xv: &GMap, index: &HashMap<PairKey, usize>) -> Vec<Vec<Int>> {
        let basis = SpanBasis::new(x);
        let mut rows = BTreeSet::new();
        for idx in 0..basis.len() {
            let orb = basis.orbit_of(idx);
            let y = orb.source.clone();
            let j = orb.points.to_vec();
            let dom = self.domain(&y, &j, xv);
            if dom.kernel.is_empty() {
                continue;
            }
            let degree = self.fiber_product(&y, &j, xv).p1.degree();
            let rs = simplex_relations(dom.dim(), &dom.kernel, degree, |c| {
                let mut v = zero_vec(index.len());
                for (k, a) in self.eval_shape(&y, &j, xv, c) {
                    v[index[&k]] += a;
                }
                v
            });
            rows.extend(rs);
        }
        rows.into_iter().collect()
    }

    pub fn level(&self, x: &GSet, xv: &GMap) -> Arc<PairLevel> {
        let key = (set_key(x), xv.points.to_vec());
        if let Some(l) = self.levels.lock().unwrap().get(&key) {
            return l.clone();
        }
        let gens = self.enumerate(x, xv);
        let index: HashMap<PairKey, usize> = gens.iter().enumerate().map(|(k, g)| (g.clone(), k)).collect();
        let rows = self.relation_instances(x, xv, &index);
        let value = Arc::new(FgAb::new(gens.len(), rows));
        let level = Arc::new(PairLevel { x: x.clone(), xv: xv.clone(), gens, index, value });
        self.levels.lock().unwrap().insert(key, level.clone());
        level
    }

    /// Transfer along f: X → X' over V (xv' is the structure map of X').
    pub fn transfer(&self, f: &GMap, xv_target: &GMap, c: &Combo<PairKey>) -> Combo<PairKey> {
        let xv = f.then(xv_target);
        let mut out = Combo::new();
        for (k, a) in c {
            let mut p = self.materialize(k, &f.source, &xv);
            p.j = p.j.iter().map(|&q| f.apply(q)).collect();
            combo_add_scaled(&mut out, a, &self.combo(&p, xv_target));
        }
        out
    }

    /// Restriction along f: X' → X over V (xv is the structure map of X).
    pub fn restriction(&self, f: &GMap, xv: &GMap, c: &Combo<PairKey>) -> Combo<PairKey> {
        let xv_source = f.then(xv);
        let mut out = Combo::new();
        for (k, a) in c {
            let p = self.materialize(k, &f.target, xv);
            combo_add_scaled(&mut out, a, &self.combo(&self.pullback_pair(&p, f, xv), &xv_source));
        }
        out
    }

    pub fn pullback_pair(&self, p: &Pair, f: &GMap, xv: &GMap) -> Pair {
        let yv = self.yv(&p.y, &p.j, xv);
        let off = self.offsets(&yv);
        let pb = pullback_unchecked(&p.j_map(&f.target), f);
        let mut labels = Vec::new();
        for &(y, _) in &pb.pairs {
            labels.extend_from_slice(&p.labels[off[y]..off[y + 1]]);
        }
        Pair { y: pb.set.clone(), j: pb.p2.points.to_vec(), labels }
    }

    /// Coproduct of pairs over the same X.
    pub fn coproduct(&self, parts: &[Pair]) -> Pair {
        let group = self.group();
        let ys: Vec<GSet> = parts.iter().map(|p| p.y.clone()).collect();
        let (y, _) = GSet::coproduct(group, &ys);
        let mut j = Vec::new();
        let mut labels = Vec::new();
        for p in parts {
            j.extend_from_slice(&p.j);
            labels.extend_from_slice(&p.labels);
        }
        Pair { y, j, labels }
    }

    /// The pair of a nonnegative combination.
    pub fn realize(&self, x: &GSet, xv: &GMap, c: &Combo<PairKey>) -> Pair {
        let mut parts = Vec::new();
        for (k, a) in c {
            let p = self.materialize(k, x, xv);
            let n: usize = a.try_into().expect("nonnegative multiplicity");
            for _ in 0..n {
                parts.push(p.clone());
            }
        }
        self.coproduct(&parts)
    }
}

/// F(i, N) over V = pt as a Mackey model.
pub struct PushModel {
    engine: Arc<PushForward>,
    label: String,
}

impl PushModel {
    pub fn new(engine: &Arc<PushForward>, label: &str) -> Self {
        PushModel { engine: engine.clone(), label: label.to_string() }
    }
}

impl MackeyModel for PushModel {
    fn group(&self) -> &Arc<FiniteGroup> {
        self.engine.group()
    }

    fn eval(&self, x: &GSet) -> FgAb {
        (*self.engine.level(x, &GMap::to_point(x)).value).clone()
    }

    fn restriction(&self, f: &GMap) -> IntMatrix {
        let xv = GMap::to_point(&f.target);
        let src = self.engine.level(&f.source, &GMap::to_point(&f.source));
        let tgt = self.engine.level(&f.target, &xv);
        let rows = tgt
            .gens
            .iter()
            .map(|k| {
                let p = self.engine.materialize(k, &f.target, &xv);
                src.vector(&self.engine.combo(&self.engine.pullback_pair(&p, f, &xv), &src.xv))
            })
            .collect();
        IntMatrix::from_rows(rows, src.gens.len())
    }

    fn transfer(&self, f: &GMap) -> IntMatrix {
        let xv = GMap::to_point(&f.target);
        let src = self.engine.level(&f.source, &GMap::to_point(&f.source));
        let tgt = self.engine.level(&f.target, &xv);
        let rows = src
            .gens
            .iter()
            .map(|k| tgt.vector(&self.engine.transfer(f, &xv, &[(k.clone(), Int::from(1))].into_iter().collect())))
            .collect();
        IntMatrix::from_rows(rows, tgt.gens.len())
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// The engine of F(T, M): push forward along T → pt with constant coefficients.
pub fn power_engine(t: &GSet, m: &Arc<MackeyFunctor>) -> Arc<PushForward> {
    power_engine_with(t, m, Cover::of(m))
}

pub fn power_engine_with(t: &GSet, m: &Arc<MackeyFunctor>, cover: Cover) -> Arc<PushForward> {
    let coeff = Arc::new(ConstantCoefficients::new(m, cover, t));
    Arc::new(PushForward::new(&GMap::to_point(t), coeff).expect("matching base"))
}

pub fn power_mackey(t: &GSet, m: &Arc<MackeyFunctor>) -> MackeyFunctor {
    MackeyFunctor::from_model(&PushModel::new(&power_engine(t, m), &format!("F(T,{})", m.label())))
}

pub fn power_level(t: &GSet, m: &Arc<MackeyFunctor>, x: &GSet) -> Arc<FgAb> {
    power_engine(t, m).level(x, &GMap::to_point(x)).value.clone()
}

/// The engine of N^{G,H}M for M over the subgroup `sub` (a class representative).
pub fn norm_engine(group: &Arc<FiniteGroup>, sub: usize, m: &Arc<MackeyFunctor>) -> Result<Arc<PushForward>, MackeyError> {
    let u = GSet::orbit(group, sub);
    if u.orbits()[0].sub != sub {
        return Err(MackeyError::ShapeMismatch("norms are taken from class representatives".into()));
    }
    let bgt = BGTMackeyFunctor::new(&u, vec![m.clone()])?;
    let coeff = Arc::new(FiberedCoefficients::new(bgt, &[Cover::of(m)]));
    Ok(Arc::new(PushForward::new(&GMap::to_point(&u), coeff)?))
}

pub fn norm_mackey(group: &Arc<FiniteGroup>, sub: usize, m: &Arc<MackeyFunctor>) -> Result<MackeyFunctor, MackeyError> {
    let e = norm_engine(group, sub, m)?;
    Ok(MackeyFunctor::from_model(&PushModel::new(&e, &format!("N({})", m.label()))))
}

pub fn norm_level(group: &Arc<FiniteGroup>, sub: usize, m: &Arc<MackeyFunctor>, x: &GSet) -> Result<Arc<FgAb>, MackeyError> {
    Ok(norm_engine(group, sub, m)?.level(x, &GMap::to_point(x)).value.clone())
}

/// The identification of const_U R at D → U with R(D): matrices from the
/// fibered coordinates to levelwise R(D) and back.
pub fn constant_value_maps(r: &Arc<MackeyFunctor>, base: &GSet, d: &GMap) -> (IntMatrix, IntMatrix) {
    let group = r.group().clone();
    let dim = r.value(&d.source).num_gens();
    let mut to = IntMatrix::zeros(0, dim);
    let mut from_t = IntMatrix::zeros(0, dim);
    for (k, o) in base.orbits().iter().enumerate() {
        let (fib, pts) = fiber_over(base, k, d);
        let ind = GSet::induce(&group, o.sub, &fib);
        let m = fib.size().max(1);
        let reps = &group.cosets(o.sub).reps;
        let phi = GMap::new_unchecked(ind.clone(), d.source.clone(), (0..ind.size()).map(|p| d.source.act(reps[p / m], pts[p % m])).collect());
        let model = RestrictionModel::new(r, o.sub);
        to = to.vstack(&levelwise_to_model(&model, &fib).mul(&r.transfer_matrix(&phi)));
        from_t = from_t.vstack(&r.restriction_matrix(&phi).mul(&model_to_levelwise(&model, &fib)).transpose());
    }
    (to, from_t.transpose())
}

/// The engine of F(i, N) for a B_G(U)-functor with one cover per orbit of U.
pub fn pushforward_engine(i: &GMap, n: BGTMackeyFunctor, covers: &[Cover]) -> Result<Arc<PushForward>, MackeyError> {
    if covers.len() != n.components.len() {
        return Err(MackeyError::ShapeMismatch("one cover per component".into()));
    }
    let coeff = Arc::new(FiberedCoefficients::new(n, covers));
    Ok(Arc::new(PushForward::new(i, coeff)?))
}

pub fn mult_pushforward_level(i: &GMap, n: &BGTMackeyFunctor, x: &GSet, xv: &GMap) -> Result<Arc<FgAb>, MackeyError> {
    let covers: Vec<Cover> = n.components.iter().map(|c| Cover::of(c)).collect();
    Ok(pushforward_engine(i, n.clone(), &covers)?.level(x, xv).value.clone())
}

/// The exponential diagram of (f: W → V×T, π₁: V×T → V).
pub fn distributor(f: &GMap, v: &GSet, t: &GSet) -> Result<ExponentialDiagram, MackeyError> {
    let vt = v.product(t);
    if f.target.action_table() != vt.action_table() || f.target.size() != vt.size() {
        return Err(MackeyError::ShapeMismatch("f must land in V×T".into()));
    }
    Ok(exponential_unchecked(f, &v.proj1(t)))
}

/// A(X) → F(∅, M)(X), W ↦ (W → X).
pub fn empty_power_comparison(engine: &PushForward, x: &GSet) -> Result<AbHom, AbError> {
    let group = engine.group();
    let xv = GMap::to_point(x);
    let level = engine.level(x, &xv);
    let a = crate::mackey::burnside_mackey(group);
    let coords = crate::mackey::RepresentableCoords::new(&GSet::point(group));
    let dim = coords.dim(x);
    let rows = (0..dim)
        .map(|k| {
            let w = coords.realize(x, &unit_vec(dim, k)).then(&x.proj1(&coords.t));
            level.vector(&engine.combo(&Pair { y: w.source.clone(), j: w.points.to_vec(), labels: vec![] }, &xv))
        })
        .collect();
    AbHom::new(a.value(x), level.value.clone(), IntMatrix::from_rows(rows, level.gens.len()))
}

/// F(pt, M)(X) → M(X), (Y → X, u) ↦ t_j(u).
pub fn point_power_comparison(engine: &PushForward, m: &MackeyFunctor, x: &GSet) -> Result<AbHom, AbError> {
    let xv = GMap::to_point(x);
    let level = engine.level(x, &xv);
    let target = m.value(x);
    let rows = level
        .gens
        .iter()
        .map(|k| {
            let p = engine.materialize(k, x, &xv);
            m.apply_transfer(&p.j_map(x), &engine.pair_element(&p, &xv))
        })
        .collect();
    AbHom::new(level.value.clone(), target.clone(), IntMatrix::from_rows(rows, target.num_gens()))
}

/// T(M ⊗ [−, T]) covered by S×T with ξ' = slant(r_π ξ) = t_{1×Δ} r_π ξ.
pub fn shifted_free_tambara(m: &Arc<MackeyFunctor>, cover: &Cover, t: &GSet) -> FreeTambara {
    let shifted = Arc::new(shift_tensor(m, t));
    let st = cover.set.product(t);
    let k = t.size();
    let stt = st.product(t);
    let delta = GMap::new_unchecked(st.clone(), stt, (0..st.size()).map(|p| p * k + p % k).collect());
    let xi = m.apply_transfer(&delta, &m.apply_restriction(&cover.set.proj1(t), &cover.xi));
    let xi = model_to_levelwise(&ShiftModel::new(m, t), &st).apply(&xi);
    FreeTambara::with_cover(&shifted, Cover { set: st, xi })
}

/// Θ^T: F(T, M)(X) → T(M ⊗ [−, T])(X), (Y → X, u) ↦ (Y×T → Y → X, slant u),
/// for `ft` built by [`shifted_free_tambara`] from the engine's cover.
pub fn theta_power(engine: &PushForward, ft: &FreeTambara, t: &GSet, x: &GSet) -> Result<AbHom, AbError> {
    let xv = GMap::to_point(x);
    let level = engine.level(x, &xv);
    let target = ft.level(x, t.size());
    let rows = level
        .gens
        .iter()
        .map(|key| {
            let p = engine.materialize(key, x, &xv);
            let d = engine.fiber_product(&p.y, &p.j, &xv);
            let b = Bispan { u: d.set.clone(), v: p.y.clone(), x: x.clone(), i: d.p1.points.to_vec(), j: p.j.clone(), h: p.labels };
            target.vector(&b.combo())
        })
        .collect();
    AbHom::new(level.value.clone(), target.value.clone(), IntMatrix::from_rows(rows, target.gens.len()))
}

/// Θ^{G,H}: N^{G,H}M(X) → Sym_{[G:H]}(Ind M)(X), (Y → X, u) ↦ (Y×G/H → Y → X, G×_H u).
pub fn theta_norm(engine: &PushForward, sub: usize, m: &Arc<MackeyFunctor>, ft_ind: &FreeTambara, x: &GSet) -> Result<AbHom, AbError> {
    let group = engine.group().clone();
    let xv = GMap::to_point(x);
    let level = engine.level(x, &xv);
    let n = group.index_of(sub);
    let target = ft_ind.level(x, n);
    let model = InductionModel::new(&group, sub, m);
    let rows = level
        .gens
        .iter()
        .map(|key| {
            let p = engine.materialize(key, x, &xv);
            let d = engine.fiber_product(&p.y, &p.j, &xv);
            let u = engine.pair_element(&p, &xv);
            // The fiber over eH is Res Y, the points (y, eH) of D.
            let fiber: Vec<usize> = (0..d.set.size()).filter(|&q| d.pairs[q].1 == 0).collect();
            let res_d = d.set.restrict(sub);
            let incl = GMap::new_unchecked(res_d.subset(&fiber), res_d, fiber);
            let ind = m.apply_transfer(&incl, &u);
            let lw = model_to_levelwise(&model, &d.set).apply(&ind);
            let shape = Bispan {
                u: d.set.clone(),
                v: p.y.clone(),
                x: x.clone(),
                i: d.p1.points.to_vec(),
                j: p.j.clone(),
                h: vec![0; d.set.size()],
            };
            target.vector(&ft_ind.element(&shape, &lw))
        })
        .collect();
    AbHom::new(level.value.clone(), target.value.clone(), IntMatrix::from_rows(rows, target.gens.len()))
}

pub fn induced_free_tambara(group: &Arc<FiniteGroup>, sub: usize, m: &Arc<MackeyFunctor>) -> FreeTambara {
    FreeTambara::new(&Arc::new(mackey_induction(group, sub, m)))
}

/// A ⊗ B ⊗ ... on generator tuples in mixed radix (first factor most significant).
pub fn tensor_product(parts: &[&FgAb]) -> FgAb {
    let dims: Vec<usize> = parts.iter().map(|p| p.num_gens()).collect();
    let total: usize = dims.iter().product();
    let mut rows = BTreeSet::new();
    for (t, p) in parts.iter().enumerate() {
        for rel in p.relations() {
            for code in 0..total {
                let digits = mixed_digits(code, &dims);
                if digits[t] != 0 {
                    continue;
                }
                let mut row = zero_vec(total);
                for (k, a) in rel.iter().enumerate() {
                    let mut d = digits.clone();
                    d[t] = k;
                    row[mixed_code(&d, &dims)] += a;
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.insert(row);
                }
            }
        }
    }
    FgAb::new(total, rows.into_iter().collect())
}

pub fn mixed_digits(mut code: usize, dims: &[usize]) -> Vec<usize> {
    let mut d = vec![0; dims.len()];
    for t in (0..dims.len()).rev() {
        d[t] = code % dims[t];
        code /= dims[t];
    }
    d
}

pub fn mixed_code(d: &[usize], dims: &[usize]) -> usize {
    d.iter().zip(dims).fold(0, |acc, (&x, &n)| acc * n + x)
}

/// μ^T: ⊗_i Φ^{H_i}M → Φ^G F(T, M), ⊗[u_i] ↦ [(pt = pt, ×u_i)].
pub fn mu_power(engine: &Arc<PushForward>, m: &MackeyFunctor, t: &GSet) -> Result<AbHom, AbError> {
    let group = engine.group().clone();
    let top = group.num_classes() - 1;
    let phis: Vec<Arc<FgAb>> = t.orbits().iter().map(|o| geometric_fixed_points(m, o.class).value).collect();
    let refs: Vec<&FgAb> = phis.iter().map(|p| &**p).collect();
    let source = Arc::new(tensor_product(&refs));
    let dims: Vec<usize> = phis.iter().map(|p| p.num_gens()).collect();
    let f = MackeyFunctor::from_model(&PushModel::new(engine, "F(T,M)"));
    let target = geometric_fixed_points(&f, top).value;
    let pt = GSet::point(&group);
    let xv = GMap::to_point(&pt);
    let level = engine.level(&pt, &xv);
    let rows = (0..source.num_gens())
        .map(|code| {
            let digits = mixed_digits(code, &dims);
            let mut u = Vec::new();
            for (o, &k) in t.orbits().iter().zip(&digits) {
                u.extend(unit_vec(m.level(o.class).num_gens(), k));
            }
            level.vector(&engine.element(&pt, &[0], &xv, &u))
        })
        .collect();
    AbHom::new(source, target, IntMatrix::from_rows(rows, level.gens.len()))
}

/// μ^{G,H}: Φ^H M → Φ^G N^{G,H}M, [u] ↦ [(pt = pt, u)].
pub fn mu_norm(engine: &Arc<PushForward>, m: &MackeyFunctor) -> Result<AbHom, AbError> {
    let group = engine.group().clone();
    let top = group.num_classes() - 1;
    let htop = m.group().num_classes() - 1;
    let source = geometric_fixed_points(m, htop).value;
    let f = MackeyFunctor::from_model(&PushModel::new(engine, "N(M)"));
    let target = geometric_fixed_points(&f, top).value;
    let pt = GSet::point(&group);
    let xv = GMap::to_point(&pt);
    let level = engine.level(&pt, &xv);
    let n = source.num_gens();
    let rows = (0..n).map(|k| level.vector(&engine.element(&pt, &[0], &xv, &unit_vec(n, k)))).collect();
    AbHom::new(source, target, IntMatrix::from_rows(rows, level.gens.len()))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormPowerError {
    #[error("formal differences have no pair formula")]
    NotPurePair,
    #[error(transparent)]
    Mackey(#[from] MackeyError),
    #[error(transparent)]
    Ab(#[from] AbError),
}

/// (Y1 → X1, y1) × (Y2 → X2, y2) ↦ (Y1×Y2 → X1×X2, (r y1, r y2)) for power
/// engines over T1, T2 and T1 ⊔ T2 sharing one cover.
pub fn pair_product(p1: &Pair, t1: usize, x2: &GSet, p2: &Pair, t2: usize) -> Pair {
    let y = p1.y.product(&p2.y);
    let n2 = p2.y.size();
    let t = t1 + t2;
    let mut j = Vec::with_capacity(y.size());
    let mut labels = Vec::with_capacity(y.size() * t);
    for a in 0..p1.y.size() {
        for b in 0..n2 {
            j.push(p1.j[a] * x2.size() + p2.j[b]);
            for s in 0..t1 {
                labels.push(p1.labels[a * t1 + s] / t1 * t + s);
            }
            for s in 0..t2 {
                labels.push(p2.labels[b * t2 + s] / t2 * t + t1 + s);
            }
        }
    }
    Pair { y, j, labels }
}

/// F(T1, M)(X1) ⊗ F(T2, M)(X2) → F(T1 ⊔ T2, M)(X1 × X2).
pub fn power_pairing(t1: &GSet, t2: &GSet, m: &Arc<MackeyFunctor>, x1: &GSet, x2: &GSet) -> Result<AbHom, AbError> {
    let group = m.group().clone();
    let cover = Cover::of(m);
    let e1 = power_engine_with(t1, m, cover.clone());
    let e2 = power_engine_with(t2, m, cover.clone());
    let (t, _) = GSet::coproduct(&group, &[t1.clone(), t2.clone()]);
    let e = power_engine_with(&t, m, cover);
    let (xv1, xv2) = (GMap::to_point(x1), GMap::to_point(x2));
    let (l1, l2) = (e1.level(x1, &xv1), e2.level(x2, &xv2));
    let x = x1.product(x2);
    let xv = GMap::to_point(&x);
    let level = e.level(&x, &xv);
    let source = Arc::new(tensor_product(&[&l1.value, &l2.value]));
    let mut rows = Vec::with_capacity(source.num_gens());
    for k1 in &l1.gens {
        let p1 = e1.materialize(k1, x1, &xv1);
        for k2 in &l2.gens {
            let p2 = e2.materialize(k2, x2, &xv2);
            rows.push(level.vector(&e.combo(&pair_product(&p1, t1.size(), x2, &p2, t2.size()), &xv)));
        }
    }
    AbHom::new(source, level.value.clone(), IntMatrix::from_rows(rows, level.gens.len()))
}

/// The pair of ξ for a cover of a push-forward functor whose orbit blocks are
/// single generators.
fn cover_pair(engine: &PushForward, f: &MackeyFunctor, cover: &Cover) -> Result<Pair, NormPowerError> {
    let s = &cover.set;
    let ev = f.eval(s);
    let mut parts = Vec::with_capacity(s.orbits().len());
    for (a, o) in s.orbits().iter().enumerate() {
        let block = &cover.xi[ev.offsets[a]..ev.offsets[a + 1]];
        let hot: Vec<usize> = (0..block.len()).filter(|&k| !block[k].is_zero()).collect();
        if hot.len() != 1 || block[hot[0]] != Int::from(1) {
            return Err(NormPowerError::NotPurePair);
        }
        let orbit = GSet::orbit(engine.group(), o.sub);
        let ov = GMap::to_point(&orbit);
        let key = engine.level(&orbit, &ov).gens[hot[0]].clone();
        let mut p = engine.materialize(&key, &orbit, &ov);
        p.j = p.j.iter().map(|&c| o.points[c]).collect();
        parts.push(p);
    }
    Ok(engine.coproduct(&parts))
}

/// The collapse F(T1, F(T2, M)) → F(T1 × T2, M) on nested pure pairs:
/// (V → X, (W → V×T1, x)) ↦ (D(W, f, V) → X, r_{e×1} x).
pub struct PowerComposite {
    pub inner: Arc<PushForward>,
    pub inner_functor: Arc<MackeyFunctor>,
    pub outer: Arc<PushForward>,
    pub target: Arc<PushForward>,
    t1: GSet,
    t2: GSet,
    cover_set: GSet,
    xi_pair: Pair,
}

impl PowerComposite {
    pub fn new(t1: &GSet, t2: &GSet, m: &Arc<MackeyFunctor>) -> Result<Self, NormPowerError> {
        let cover = Cover::of(m);
        let inner = power_engine_with(t2, m, cover.clone());
        let inner_functor = Arc::new(MackeyFunctor::from_model(&PushModel::new(&inner, "F(T2,M)")));
        let outer_cover = Cover::greedy(&inner_functor);
        let xi_pair = cover_pair(&inner, &inner_functor, &outer_cover)?;
        let cover_set = outer_cover.set.clone();
        let outer = power_engine_with(t1, &inner_functor, outer_cover);
        let target = power_engine_with(&t1.product(t2), m, cover);
        Ok(PowerComposite { inner, inner_functor, outer, target, t1: t1.clone(), t2: t2.clone(), cover_set, xi_pair })
    }

    /// The collapse of a nonnegative combination of outer generators at X.
    pub fn collapse(&self, x: &GSet, c: &Combo<PairKey>) -> Result<Combo<PairKey>, NormPowerError> {
        if c.values().any(|a| a < &Int::zero()) {
            return Err(NormPowerError::NotPurePair);
        }
        let xv = GMap::to_point(x);
        let outer = self.outer.realize(x, &xv, c);
        let (n1, n2) = (self.t1.size(), self.t2.size());
        let yt = outer.y.product(&self.t1);
        let s = self.cover_set.clone();
        let h = GMap::new_unchecked(yt.clone(), s.clone(), outer.labels.iter().map(|&l| l / n1).collect());
        let inner = self.inner.pullback_pair(&self.xi_pair, &h, &GMap::to_point(&s));
        let f = GMap::new_unchecked(inner.y.clone(), yt.clone(), inner.j.clone());
        let exp = exponential_unchecked(&f, &outer.y.proj1(&self.t1));
        let mut over: HashMap<(usize, usize), usize> = HashMap::new();
        for a in 0..exp.a.size() {
            over.insert((exp.top.apply(a), exp.q.apply(a) % n1), a);
        }
        let n = n1 * n2;
        let mut labels = Vec::with_capacity(exp.pi.size() * n);
        for p in 0..exp.pi.size() {
            for t1 in 0..n1 {
                let w = exp.e.apply(over[&(p, t1)]);
                for t2 in 0..n2 {
                    labels.push(inner.labels[w * n2 + t2] / n2 * n + t1 * n2 + t2);
                }
            }
        }
        let j = exp.p.points.iter().map(|&v| outer.j[v]).collect();
        Ok(self.target.combo(&Pair { y: exp.pi.clone(), j, labels }, &xv))
    }

    pub fn hom(&self, x: &GSet) -> Result<AbHom, NormPowerError> {
        let xv = GMap::to_point(x);
        let src = self.outer.level(x, &xv);
        let tgt = self.target.level(x, &xv);
        let mut rows = Vec::with_capacity(src.gens.len());
        for k in &src.gens {
            let c = [(k.clone(), Int::from(1))].into_iter().collect();
            rows.push(tgt.vector(&self.collapse(x, &c)?));
        }
        Ok(AbHom::new(src.value.clone(), tgt.value.clone(), IntMatrix::from_rows(rows, tgt.gens.len()))?)
    }
}

/// Norms on N^{G,H}R for a Tambara functor R over H:
/// n_f(V → X, u) = (Π → X', n_{Res top} r_{Res e} u) with (e, top, Π) the
/// exponential diagram of (j, f).
struct NormNorms {
    engine: Arc<PushForward>,
    model: PushModel,
    r: Arc<TambaraFunctor>,
    sub: usize,
}

impl NormNorms {
    fn norm_pair(&self, f: &GMap, pair: &Pair) -> Combo<PairKey> {
        let sub = self.sub;
        let xv = GMap::to_point(&f.source);
        let u = self.engine.pair_element(pair, &xv);
        let exp = exponential_unchecked(&pair.j_map(&f.source), f);
        let w = self.r.restriction(&exp.e.restrict(sub), &u);
        let w = self.r.norm(&exp.top.restrict(sub), &w);
        self.engine.element(&exp.pi, &exp.p.points, &GMap::to_point(&f.target), &w)
    }

    fn norm_combo(&self, f: &GMap, c: &Combo<PairKey>) -> Combo<PairKey> {
        let keys: Vec<PairKey> = c.keys().cloned().collect();
        let coeffs: Vec<Int> = c.values().cloned().collect();
        let xv = GMap::to_point(&f.source);
        difference_combo(f.degree(), &coeffs, |a| {
            let mut pos = Combo::new();
            for (k, n) in keys.iter().zip(a) {
                combo_add(&mut pos, k.clone(), n);
            }
            self.norm_pair(f, &self.engine.realize(&f.source, &xv, &pos))
        })
    }
}

impl NormProvider for NormNorms {
    fn norm_positive(&self, _m: &MackeyFunctor, f: &GMap, x: &[Int]) -> Vec<Int> {
        let src = self.engine.level(&f.source, &GMap::to_point(&f.source));
        let tgt = self.engine.level(&f.target, &GMap::to_point(&f.target));
        let c = src.combo(&levelwise_to_model(&self.model, &f.source).apply(x));
        model_to_levelwise(&self.model, &f.target).apply(&tgt.vector(&self.norm_combo(f, &c)))
    }
}

/// N^{G,H}R as a Tambara functor together with its pair engine.
pub struct NormTambara {
    pub group: Arc<FiniteGroup>,
    pub sub: usize,
    pub r: Arc<TambaraFunctor>,
    pub engine: Arc<PushForward>,
    pub functor: Arc<TambaraFunctor>,
}

impl NormTambara {
    pub fn new(group: &Arc<FiniteGroup>, sub: usize, r: &Arc<TambaraFunctor>) -> Result<Self, MackeyError> {
        let engine = norm_engine(group, sub, r.underlying())?;
        let label = format!("N({})", r.label());
        let under = Arc::new(MackeyFunctor::from_model(&PushModel::new(&engine, &label)));
        let norms = NormNorms { engine: engine.clone(), model: PushModel::new(&engine, &label), r: r.clone(), sub };
        let functor = Arc::new(TambaraFunctor::new(under, Arc::new(norms), &label));
        Ok(NormTambara { group: group.clone(), sub, r: r.clone(), engine, functor })
    }

    pub fn model(&self) -> PushModel {
        PushModel::new(&self.engine, self.functor.label())
    }

    /// Levelwise vector of a combination at X.
    pub fn levelwise(&self, x: &GSet, c: &Combo<PairKey>) -> Vec<Int> {
        let level = self.engine.level(x, &GMap::to_point(x));
        model_to_levelwise(&self.model(), x).apply(&level.vector(c))
    }

    /// Generators of N R(X) in levelwise coordinates.
    pub fn generator_vectors(&self, x: &GSet) -> Vec<(PairKey, Vec<Int>)> {
        let level = self.engine.level(x, &GMap::to_point(x));
        level.gens.iter().map(|k| (k.clone(), self.levelwise(x, &[(k.clone(), Int::from(1))].into_iter().collect()))).collect()
    }

    /// (Y1 → X, u1)·(Y2 → X, u2) = (Y1 ×_X Y2 → X, r u1 · r u2).
    pub fn pairing_product(&self, x: &GSet, a: &PairKey, b: &PairKey) -> Combo<PairKey> {
        let sub = self.sub;
        let xv = GMap::to_point(x);
        let (p1, p2) = (self.engine.materialize(a, x, &xv), self.engine.materialize(b, x, &xv));
        let (u1, u2) = (self.engine.pair_element(&p1, &xv), self.engine.pair_element(&p2, &xv));
        let pb = pullback_unchecked(&p1.j_map(x), &p2.j_map(x));
        let v1 = self.r.restriction(&pb.p1.restrict(sub), &u1);
        let v2 = self.r.restriction(&pb.p2.restrict(sub), &u2);
        let w = self.r.product(&pb.set.restrict(sub), &v1, &v2);
        let j: Vec<usize> = pb.pairs.iter().map(|&(y, _)| p1.j[y]).collect();
        self.engine.element(&pb.set, &j, &xv, &w)
    }
}

/// η_R(X): R(X) → Res N R(X) = N R(G×_H X), u ↦ (G×_H X = G×_H X, n_η u).
pub fn adjunction_unit(nr: &NormTambara, x: &GSet, u: &[Int]) -> Vec<Int> {
    let (group, sub) = (&nr.group, nr.sub);
    let ind = GSet::induce(group, sub, x);
    let eta = induction_unit(group, sub, x);
    let w = nr.r.norm(&eta, u);
    let ids: Vec<usize> = (0..ind.size()).collect();
    let c = nr.engine.element(&ind, &ids, &GMap::to_point(&ind), &w);
    let res = RestrictionModel::new(nr.functor.underlying(), sub);
    model_to_levelwise(&res, x).apply(&nr.levelwise(&ind, &c))
}

pub fn adjunction_unit_hom(nr: &NormTambara, x: &GSet) -> Result<AbHom, AbError> {
    let source = nr.r.value(x);
    let target = mackey_restriction(nr.functor.underlying(), nr.sub).value(x);
    let n = source.num_gens();
    let rows = (0..n).map(|k| adjunction_unit(nr, x, &unit_vec(n, k))).collect();
    AbHom::new(source, target.clone(), IntMatrix::from_rows(rows, target.num_gens()))
}

/// The counit N^{G,H} Res R → R for R over G.
pub struct Counit {
    pub r: Arc<TambaraFunctor>,
    pub sub: usize,
    pub res: Arc<TambaraFunctor>,
    pub engine: Arc<PushForward>,
    model: RestrictionModel,
}

impl Counit {
    pub fn new(r: &Arc<TambaraFunctor>, sub: usize) -> Result<Self, MackeyError> {
        let res = Arc::new(res_tambara(r, sub));
        let engine = norm_engine(r.group(), sub, res.underlying())?;
        let model = RestrictionModel::new(r.underlying(), sub);
        Ok(Counit { r: r.clone(), sub, res, engine, model })
    }

    /// (V → X, u) ↦ t_j n_ε(u) for a pair of the engine.
    pub fn apply_pair(&self, x: &GSet, pair: &Pair) -> Vec<Int> {
        let xv = GMap::to_point(x);
        let u = self.engine.pair_element(pair, &xv);
        let u = levelwise_to_model(&self.model, &pair.y.restrict(self.sub)).apply(&u);
        let v = self.r.norm(&induction_counit(&pair.y, self.sub), &u);
        self.r.transfer(&pair.j_map(x), &v)
    }

    /// ε(X) in model coordinates of N Res R(X).
    pub fn hom(&self, x: &GSet) -> Result<AbHom, AbError> {
        let xv = GMap::to_point(x);
        let level = self.engine.level(x, &xv);
        let target = self.r.value(x);
        let rows = level.gens.iter().map(|k| self.apply_pair(x, &self.engine.materialize(k, x, &xv))).collect();
        AbHom::new(level.value.clone(), target.clone(), IntMatrix::from_rows(rows, target.num_gens()))
    }

    /// ε as a map of Mackey functors.
    pub fn morphism(&self) -> Result<(Arc<MackeyFunctor>, MackeyMorphism), AbError> {
        let group = self.r.group().clone();
        let model = PushModel::new(&self.engine, "N(Res R)");
        let source = Arc::new(MackeyFunctor::from_model(&model));
        let mut levels = Vec::with_capacity(group.num_classes());
        for c in 0..group.num_classes() {
            let orbit = GSet::orbit(&group, group.class_rep(c));
            let to_model = levelwise_to_model(&model, &orbit);
            levels.push(to_model.mul(&self.hom(&orbit)?.matrix));
        }
        Ok((source.clone(), MackeyMorphism { source, target: self.r.underlying().clone(), levels }))
    }
}

/// Res(ε_R) ∘ η_{Res R} = 1 on every generator of Res R(X), for an H-set X.
pub fn triangle_restriction(counit: &Counit, nres: &NormTambara, x: &GSet) -> Result<bool, AbError> {
    let (group, sub) = (counit.r.group().clone(), counit.sub);
    let ind = GSet::induce(&group, sub, x);
    let eps = counit.hom(&ind)?;
    let res_value = counit.res.value(x);
    let lw = model_to_levelwise(&counit.model, x);
    let to_model = levelwise_to_model(&PushModel::new(&counit.engine, "N"), &ind);
    let to_res = levelwise_to_model(&RestrictionModel::new(nres.functor.underlying(), sub), x);
    for k in 0..res_value.num_gens() {
        let u = unit_vec(res_value.num_gens(), k);
        let eta = adjunction_unit(nres, x, &u);
        let back = lw.apply(&eps.apply(&to_model.apply(&to_res.apply(&eta))));
        if !res_value.equal(&back, &u) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// ε_{N R} ∘ N(η_R) = 1 on every generator of N R(X).
pub fn triangle_norm(nr: &NormTambara, counit: &Counit, x: &GSet) -> Result<bool, AbError> {
    let sub = nr.sub;
    let xv = GMap::to_point(x);
    let value = nr.functor.value(x);
    let eps = counit.hom(x)?;
    let target_level = counit.engine.level(x, &xv);
    for (k, lw) in nr.generator_vectors(x) {
        let p = nr.engine.materialize(&k, x, &xv);
        let u = nr.engine.pair_element(&p, &xv);
        let res_y = p.y.restrict(sub);
        let eta = adjunction_unit(nr, &res_y, &u);
        let c = counit.engine.element(&p.y, &p.j, &xv, &eta);
        let back = eps.apply(&target_level.vector(&c));
        if !value.equal(&back, &lw) {
            return Ok(false);
        }
    }
    Ok(true)
}
