//! Tambara functors: Mackey functors with multiplicative norms.
//!
//! Norms are procedures on element vectors. A [`NormProvider`] only has to
//! handle nonnegative combinations of generators; norms of arbitrary vectors
//! are obtained from those by finite differences, which is exact because a
//! norm along a map whose fibers have at most d points is polynomial of
//! degree at most d.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::abelian::{add_scaled, neg_vec, unit_vec, zero_vec, AbError, AbHom, FgAb, Int, IntMatrix};
use crate::free_tambara::{universal_extension_hom, Combo, FreeTambara};
use crate::groups::FiniteGroup;
use crate::gsets::{exponential_unchecked, gsets_up_to, hom_set, pullback_unchecked, GMap, GSet, Pullback};
use crate::mackey::{
    burnside_mackey, levelwise_to_model, mackey_restriction, model_to_levelwise, BGTMackeyFunctor, Cover, MackeyFunctor,
    MackeyMorphism, RepresentableCoords, Report, RestrictionModel,
};
use crate::norm_power::{constant_value_maps, pushforward_engine, PairLevel, PushForward};

/// Norms on nonnegative combinations of generators.
pub trait NormProvider: Send + Sync {
    /// n_f(x) for f: X → Y and x ≥ 0 coordinatewise, in levelwise coordinates.
    fn norm_positive(&self, m: &MackeyFunctor, f: &GMap, x: &[Int]) -> Vec<Int>;
}

type NormKey = (Vec<usize>, Vec<usize>, Vec<usize>, Vec<Int>);

pub struct TambaraFunctor {
    underlying: Arc<MackeyFunctor>,
    norms: Arc<dyn NormProvider>,
    label: String,
    cache: Mutex<HashMap<NormKey, Vec<Int>>>,
}

impl fmt::Debug for TambaraFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TambaraFunctor({})", self.label)
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// Weights w_i with p(a − b) = Σ_i w_i p(a + i·b) for every polynomial p of
/// degree ≤ d; w_i = (−1)^i C(d+1, i+1).
pub fn difference_weights(d: usize) -> Vec<BigInt> {
    (0..=d).map(|i| if i % 2 == 0 { binomial(d + 1, i + 1) } else { -binomial(d + 1, i + 1) }).collect()
}

/// p(a − b) from values p(a + i·b), i = 0..=d, for a polynomial p of degree ≤ d.
pub fn extend_norm_to_differences(d: usize, mut value_at: impl FnMut(usize) -> Vec<Int>) -> Vec<Int> {
    let mut out: Option<Vec<Int>> = None;
    for (i, w) in difference_weights(d).iter().enumerate() {
        let v = value_at(i);
        let acc = out.get_or_insert_with(|| zero_vec(v.len()));
        add_scaled(acc, w, &v);
    }
    out.unwrap()
}

impl TambaraFunctor {
    pub fn new(underlying: Arc<MackeyFunctor>, norms: Arc<dyn NormProvider>, label: &str) -> Self {
        TambaraFunctor { underlying, norms, label: label.to_string(), cache: Mutex::new(HashMap::new()) }
    }

    pub fn underlying(&self) -> &Arc<MackeyFunctor> {
        &self.underlying
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.underlying.group()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn norm_provider(&self) -> &Arc<dyn NormProvider> {
        &self.norms
    }

    fn positive(&self, f: &GMap, x: &[Int]) -> Vec<Int> {
        let key = (f.source.action_table().to_vec(), f.target.action_table().to_vec(), f.points.to_vec(), x.to_vec());
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = self.norms.norm_positive(&self.underlying, f, x);
        self.cache.lock().unwrap().insert(key, v.clone());
        v
    }

    /// n_f(x) for any x in eval(R, X).
    pub fn norm(&self, f: &GMap, x: &[Int]) -> Vec<Int> {
        if x.iter().all(|c| !c.is_negative()) {
            return self.positive(f, x);
        }
        let a: Vec<Int> = x.iter().map(|c| if c.is_positive() { c.clone() } else { Int::zero() }).collect();
        let b: Vec<Int> = x.iter().map(|c| if c.is_negative() { -c } else { Int::zero() }).collect();
        let d = f.degree();
        extend_norm_to_differences(d, |i| {
            let v: Vec<Int> = a.iter().zip(&b).map(|(p, q)| p + BigInt::from(i) * q).collect();
            self.positive(f, &v)
        })
    }

    pub fn restriction(&self, f: &GMap, y: &[Int]) -> Vec<Int> {
        self.underlying.apply_restriction(f, y)
    }

    pub fn transfer(&self, f: &GMap, x: &[Int]) -> Vec<Int> {
        self.underlying.apply_transfer(f, x)
    }

    pub fn value(&self, x: &GSet) -> Arc<FgAb> {
        self.underlying.value(x)
    }

    /// Multiplicative unit of R(X): the norm along ∅ → X.
    pub fn one(&self, x: &GSet) -> Vec<Int> {
        self.norm(&GMap::from_empty(x), &[])
    }

    /// x·y = n_∇(x ⊔ y) for the fold X ⊔ X → X.
    pub fn product(&self, x: &GSet, a: &[Int], b: &[Int]) -> Vec<Int> {
        let fold = GMap::fold(x, 2);
        let mut v = a.to_vec();
        v.extend_from_slice(b);
        self.norm(&fold, &v)
    }
}

/// Dependent-product norms on the Burnside functor.
pub struct BurnsideNorms {
    coords: RepresentableCoords,
}

impl BurnsideNorms {
    pub fn new(group: &Arc<FiniteGroup>) -> Self {
        BurnsideNorms { coords: RepresentableCoords::new(&GSet::point(group)) }
    }
}

impl NormProvider for BurnsideNorms {
    fn norm_positive(&self, _m: &MackeyFunctor, f: &GMap, x: &[Int]) -> Vec<Int> {
        let w = self.coords.realize(&f.source, x);
        let d = exponential_unchecked(&w, f);
        self.coords.classify(&f.target, &d.p)
    }
}

pub fn burnside_tambara(group: &Arc<FiniteGroup>) -> TambaraFunctor {
    TambaraFunctor::new(Arc::new(burnside_mackey(group)), Arc::new(BurnsideNorms::new(group)), "burnside")
}

/// Norms of Res_H^G R: precompose with G×_H(−).
struct RestrictedNorms {
    parent: Arc<TambaraFunctor>,
    model: RestrictionModel,
    sub: usize,
}

impl NormProvider for RestrictedNorms {
    fn norm_positive(&self, _m: &MackeyFunctor, f: &GMap, x: &[Int]) -> Vec<Int> {
        let g = self.parent.group().clone();
        let sub = self.sub;
        let to_model = levelwise_to_model(&self.model, &f.source);
        let xm = to_model.apply(x);
        let y = self.parent.norm(&f.induce(&g, sub), &xm);
        model_to_levelwise(&self.model, &f.target).apply(&y)
    }
}

pub fn res_tambara(r: &Arc<TambaraFunctor>, sub: usize) -> TambaraFunctor {
    let under = Arc::new(mackey_restriction(r.underlying(), sub));
    let model = RestrictionModel::new(r.underlying(), sub);
    TambaraFunctor::new(under, Arc::new(RestrictedNorms { parent: r.clone(), model, sub }), &format!("Res({})", r.label()))
}

/// Sample elements of a value: 0, ±generators and sums of two generators.
pub fn sample_elements(v: &FgAb, limit: usize) -> Vec<Vec<Int>> {
    let n = v.num_gens();
    let mut out = vec![zero_vec(n)];
    for k in 0..n {
        out.push(unit_vec(n, k));
        out.push(neg_vec(&unit_vec(n, k)));
    }
    for k in 0..n {
        for l in k..n {
            let mut e = unit_vec(n, k);
            e[l] += 1;
            out.push(e);
        }
    }
    if n > 0 {
        let mut e = unit_vec(n, 0);
        e[n - 1] -= 2;
        out.push(e);
    }
    out.truncate(limit.max(1));
    out
}

fn same(v: &FgAb, a: &[Int], b: &[Int]) -> bool {
    v.equal(a, b)
}

/// Norm functoriality, pullback compatibility, the distributive law and
/// multiplicativity on all diagrams with at most `bound` points in total.
pub fn check_tambara_axioms(r: &TambaraFunctor, bound: usize) -> Report {
    check_tambara_axioms_with(r, bound, 12)
}

pub fn check_tambara_axioms_with(r: &TambaraFunctor, bound: usize, samples: usize) -> Report {
    let group = r.group().clone();
    let mut rep = Report::new("tambara-axioms");
    for c in ["functoriality", "pullback", "distributive", "multiplicative"] {
        rep.declare(c);
    }
    let objs = gsets_up_to(&group, bound);
    let m = r.underlying();
    let mut maps: HashMap<(usize, usize), Vec<GMap>> = HashMap::new();
    for (a, x) in objs.iter().enumerate() {
        for (b, y) in objs.iter().enumerate() {
            if x.size() + y.size() <= bound {
                maps.insert((a, b), hom_set(x, y));
            }
        }
    }
    let elems: Vec<Vec<Vec<Int>>> = objs.iter().map(|x| sample_elements(&m.value(x), samples)).collect();
    for (a, x) in objs.iter().enumerate() {
        if 2 * x.size() > bound {
            continue;
        }
        let id = GMap::identity(x);
        let v = m.value(x);
        for e in &elems[a] {
            rep.record("functoriality", same(&v, &r.norm(&id, e), e), || format!("identity on object {} at {:?}", a, e));
        }
    }
    let mut keys: Vec<&(usize, usize)> = maps.keys().collect();
    keys.sort();
    for &&(a, b) in &keys {
        for &&(b2, c) in &keys {
            if b2 != b || objs[a].size() + objs[b].size() + objs[c].size() > bound {
                continue;
            }
            let vz = m.value(&objs[c]);
            for f in &maps[&(a, b)] {
                for g in &maps[&(b, c)] {
                    let gf = f.then(g);
                    for e in &elems[a] {
                        let lhs = r.norm(&gf, e);
                        let rhs = r.norm(g, &r.norm(f, e));
                        rep.record("functoriality", same(&vz, &lhs, &rhs), || format!("f = {:?}, g = {:?}, x = {:?}", f.points, g.points, e));
                    }
                }
            }
        }
    }
    for &&(a, c) in &keys {
        for &&(b, c2) in &keys {
            if c2 != c || objs[a].size() + objs[b].size() + objs[c].size() > bound {
                continue;
            }
            let vy = m.value(&objs[b]);
            for f in &maps[&(a, c)] {
                for g in &maps[&(b, c)] {
                    let pb = pullback_unchecked(f, g);
                    for e in &elems[a] {
                        let lhs = r.restriction(g, &r.norm(f, e));
                        let rhs = r.norm(&pb.p2, &r.restriction(&pb.p1, e));
                        rep.record("pullback", same(&vy, &lhs, &rhs), || format!("f = {:?}, g = {:?}, x = {:?}", f.points, g.points, e));
                    }
                }
            }
        }
    }
    for &&(a, b) in &keys {
        for &&(b2, c) in &keys {
            if b2 != b || objs[a].size() + objs[b].size() + objs[c].size() > bound {
                continue;
            }
            let vz = m.value(&objs[c]);
            for i in &maps[&(a, b)] {
                for j in &maps[&(b, c)] {
                    let d = exponential_unchecked(i, j);
                    for e in &elems[a] {
                        let lhs = r.norm(j, &r.transfer(i, e));
                        let rhs = r.transfer(&d.p, &r.norm(&d.top, &r.restriction(&d.e, e)));
                        rep.record("distributive", same(&vz, &lhs, &rhs), || format!("i = {:?}, j = {:?}, x = {:?}", i.points, j.points, e));
                    }
                }
            }
        }
    }
    for &&(a, b) in &keys {
        let vy = m.value(&objs[b]);
        for f in &maps[&(a, b)] {
            let one_x = r.one(&objs[a]);
            let one_y = r.one(&objs[b]);
            rep.record("multiplicative", same(&vy, &r.norm(f, &one_x), &one_y), || format!("unit along {:?}", f.points));
            for e1 in elems[a].iter().take(5) {
                for e2 in elems[a].iter().take(5) {
                    let lhs = r.norm(f, &r.product(&objs[a], e1, e2));
                    let rhs = r.product(&objs[b], &r.norm(f, e1), &r.norm(f, e2));
                    rep.record("multiplicative", same(&vy, &lhs, &rhs), || format!("f = {:?}, x = {:?}, y = {:?}", f.points, e1, e2));
                }
            }
        }
    }
    rep
}

/// Norms that send everything to a fixed vector, for negative tests.
pub struct ConstantNorms(pub Vec<Int>);

impl NormProvider for ConstantNorms {
    fn norm_positive(&self, m: &MackeyFunctor, f: &GMap, _x: &[Int]) -> Vec<Int> {
        let n = m.value(&f.target).num_gens();
        let mut v = zero_vec(n);
        for (a, b) in v.iter_mut().zip(&self.0) {
            *a = b.clone();
        }
        v
    }
}

/// The polynomial-degree witness: (d+1)-fold differences of p(t) = n_f(a + t b) vanish.
pub fn difference_vanishes(r: &TambaraFunctor, f: &GMap, a: &[Int], b: &[Int]) -> bool {
    let d = f.degree();
    let v = r.value(&f.target);
    let mut acc = zero_vec(v.num_gens());
    for i in 0..=d + 1 {
        let x: Vec<Int> = a.iter().zip(b).map(|(p, q)| p + BigInt::from(i) * q).collect();
        let s = if (d + 1 - i) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        add_scaled(&mut acc, &(s * binomial(d + 1, i)), &r.norm(f, &x));
    }
    v.is_zero(&acc)
}

/// A pure pair (Y → X, y ∈ R(Y ×_V U)) of i_⋆(const_U R) at X over V, with
/// `d` the pullback of Y → V along i and y in levelwise coordinates of R(D).
pub struct MultPair {
    pub d: Pullback,
    pub j: GMap,
    pub y: Vec<Int>,
}

impl MultPair {
    /// The pair (Y → X, y) for Y → X → V and i: U → V.
    pub fn new(j: &GMap, xv: &GMap, i: &GMap, y: Vec<Int>) -> Self {
        MultPair { d: pullback_unchecked(&j.then(xv), i), j: j.clone(), y }
    }
}

/// A family of maps μ_i: i_⋆(const_U R) → const_V R, evaluated on pure pairs.
pub trait MuFamily: Send + Sync {
    fn underlying(&self) -> &Arc<MackeyFunctor>;
    /// μ_i of a pair, as an element of R(X).
    fn apply(&self, i: &GMap, pair: &MultPair) -> Vec<Int>;
}

/// μ_i(Y → X, y) = t_j n_π(y) for π: Y ×_V U → Y.
pub struct TambaraMu {
    r: Arc<TambaraFunctor>,
}

pub fn multiplicative_structure(r: &Arc<TambaraFunctor>) -> TambaraMu {
    TambaraMu { r: r.clone() }
}

impl MuFamily for TambaraMu {
    fn underlying(&self) -> &Arc<MackeyFunctor> {
        self.r.underlying()
    }

    fn apply(&self, _i: &GMap, pair: &MultPair) -> Vec<Int> {
        self.r.transfer(&pair.j, &self.r.norm(&pair.d.p1, &pair.y))
    }
}

/// μ_i at X → V as a homomorphism out of the presentation of F(i, const_U R)(X).
pub fn mu_hom(mu: &dyn MuFamily, i: &GMap, x: &GSet, xv: &GMap) -> Result<AbHom, AbError> {
    mu_level(mu, i, x, xv).map(|(_, _, h)| h)
}

fn mu_level(mu: &dyn MuFamily, i: &GMap, x: &GSet, xv: &GMap) -> Result<(Arc<PushForward>, Arc<PairLevel>, AbHom), AbError> {
    let r = mu.underlying();
    let n = BGTMackeyFunctor::constant(&i.source, r);
    let covers: Vec<Cover> = n.components.iter().map(|c| Cover::of(c)).collect();
    let engine = pushforward_engine(i, n, &covers).map_err(|e| AbError::Shape(e.to_string()))?;
    let level = engine.level(x, xv);
    let target = r.value(x);
    let rows = level
        .gens
        .iter()
        .map(|key| {
            let p = engine.materialize(key, x, xv);
            let d = engine.fiber_product(&p.y, &p.j, xv);
            let (to, _) = constant_value_maps(r, &i.source, &d.p2);
            let y = to.apply(&engine.pair_element(&p, xv));
            mu.apply(i, &MultPair { d, j: p.j_map(x), y })
        })
        .collect();
    let h = AbHom::new(level.value.clone(), target.clone(), IntMatrix::from_rows(rows, target.num_gens()))?;
    Ok((engine, level, h))
}

/// μ_i on sample pure pairs agrees with μ_i on their classes.
fn mu_consistent(mu: &dyn MuFamily, objs: &[GSet], i: &GMap, x: &GSet, xv: &GMap, bound: usize) -> bool {
    let Ok((engine, level, h)) = mu_level(mu, i, x, xv) else {
        return false;
    };
    let r = mu.underlying();
    let value = r.value(x);
    for y in objs.iter().filter(|y| y.size() <= bound) {
        for j in hom_set(y, x) {
            let p = MultPair::new(&j, xv, i, vec![]);
            let (_, from) = constant_value_maps(r, &i.source, &p.d.p2);
            for e in sample_elements(&r.value(&p.d.set), 8) {
                let class = engine.element(y, &j.points, xv, &from.apply(&e));
                let via_class = h.apply(&level.vector(&class));
                let pair = MultPair { d: p.d.clone(), j: j.clone(), y: e };
                if !value.equal(&mu.apply(i, &pair), &via_class) {
                    return false;
                }
            }
        }
    }
    true
}

fn orbit_levels(v: &GSet) -> Vec<(GSet, GMap)> {
    let group = v.group();
    let mut out = Vec::new();
    for c in 0..group.num_classes() {
        let x = GSet::orbit(group, group.class_rep(c));
        for xv in hom_set(&x, v) {
            out.push((x.clone(), xv));
        }
    }
    out
}

/// Pure pairs (Y → X, basis element of R(Y ×_V U)) with |Y| ≤ bound.
fn basis_pairs(r: &MackeyFunctor, objs: &[GSet], x: &GSet, xv: &GMap, i: &GMap, bound: usize) -> Vec<MultPair> {
    let mut out = Vec::new();
    for y in objs.iter().filter(|y| y.size() <= bound) {
        for j in hom_set(y, x) {
            let d = pullback_unchecked(&j.then(xv), i);
            let n = r.value(&d.set).num_gens();
            for k in 0..n {
                out.push(MultPair { d: d.clone(), j: j.clone(), y: unit_vec(n, k) });
            }
        }
    }
    out
}

fn pair_index(pb: &Pullback) -> HashMap<(usize, usize), usize> {
    pb.pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect()
}

fn maps_up_to(objs: &[GSet], total: usize) -> Vec<GMap> {
    let mut out = Vec::new();
    for a in objs {
        for b in objs.iter().filter(|b| a.size() + b.size() <= total) {
            out.extend(hom_set(a, b));
        }
    }
    out
}

/// Conditions (i)–(iv) of a multiplicative Mackey functor and the
/// well-definedness of each μ_i, on diagrams with at most `bound` points.
pub fn verify_multiplicative(mu: &dyn MuFamily, bound: usize) -> Report {
    let r = mu.underlying().clone();
    let group = r.group().clone();
    let mut rep = Report::new("multiplicative");
    for c in ["well-defined", "(i) identity", "(ii) composition", "(iii) pullback", "(iv) exponential"] {
        rep.declare(c);
    }
    let objs = gsets_up_to(&group, bound);
    let maps = maps_up_to(&objs, bound);
    let pt = GSet::point(&group);
    let pair_bound = bound.min(3);

    for i in &maps {
        for (x, xv) in orbit_levels(&i.target) {
            let ok = mu_consistent(mu, &objs, i, &x, &xv, pair_bound);
            rep.record("well-defined", ok, || format!("{:?} at {:?}", i.points, xv.points));
        }
    }

    let id = GMap::identity(&pt);
    for (x, xv) in orbit_levels(&pt) {
        for p in basis_pairs(&r, &objs, &x, &xv, &id, pair_bound) {
            let expect = r.apply_transfer(&p.d.p1.then(&p.j), &p.y);
            let ok = r.value(&x).equal(&mu.apply(&id, &p), &expect);
            rep.record("(i) identity", ok, || format!("pair over {:?}", p.j.points));
        }
    }

    for i in &maps {
        for j in maps.iter().filter(|j| j.source.size() == i.target.size() && j.source.action_table() == i.target.action_table()) {
            if i.source.size() + i.target.size() + j.target.size() > bound {
                continue;
            }
            let ji = i.then(j);
            for (x, xw) in orbit_levels(&j.target) {
                let value = r.value(&x);
                for p in basis_pairs(&r, &objs, &x, &xw, &ji, pair_bound) {
                    let lhs = mu.apply(&ji, &p);
                    let yv = pullback_unchecked(&p.j.then(&xw), j);
                    let inner = pullback_unchecked(&yv.p2, i);
                    let at = pair_index(&p.d);
                    let phi = GMap::new_unchecked(
                        inner.set.clone(),
                        p.d.set.clone(),
                        inner.pairs.iter().map(|&(q, u)| at[&(yv.pairs[q].0, u)]).collect(),
                    );
                    let y2 = r.apply_restriction(&phi, &p.y);
                    let inner_pair = MultPair { d: inner, j: GMap::identity(&yv.set), y: y2 };
                    let mid = mu.apply(i, &inner_pair);
                    let rhs = mu.apply(j, &MultPair { d: yv, j: p.j.clone(), y: mid });
                    rep.record("(ii) composition", value.equal(&lhs, &rhs), || {
                        format!("i {:?} j {:?} pair {:?}", i.points, j.points, p.j.points)
                    });
                }
            }
        }
    }

    for i in &maps {
        for j in maps.iter().filter(|j| j.target.size() == i.target.size() && j.target.action_table() == i.target.action_table()) {
            if i.source.size() + i.target.size() + j.source.size() > bound {
                continue;
            }
            let pb = pullback_unchecked(j, i);
            let at_p = pair_index(&pb);
            for (x, xw) in orbit_levels(&j.source) {
                let value = r.value(&x);
                for p in basis_pairs(&r, &objs, &x, &xw, &pb.p1, pair_bound) {
                    let lhs = mu.apply(&pb.p1, &p);
                    let yw = p.j.then(&xw);
                    let d2 = pullback_unchecked(&yw.then(j), i);
                    let at = pair_index(&p.d);
                    let phi = GMap::new_unchecked(
                        d2.set.clone(),
                        p.d.set.clone(),
                        d2.pairs.iter().map(|&(y, u)| at[&(y, at_p[&(yw.points[y], u)])]).collect(),
                    );
                    let y2 = r.apply_restriction(&phi, &p.y);
                    let rhs = mu.apply(i, &MultPair { d: d2, j: p.j.clone(), y: y2 });
                    rep.record("(iii) pullback", value.equal(&lhs, &rhs), || {
                        format!("i {:?} j {:?} pair {:?}", i.points, j.points, p.j.points)
                    });
                }
            }
        }
    }

    for j in &maps {
        for i in maps.iter().filter(|i| i.source.size() == j.target.size() && i.source.action_table() == j.target.action_table()) {
            if j.source.size() + j.target.size() + i.target.size() > bound {
                continue;
            }
            let ed = exponential_unchecked(j, i);
            let ij = j.then(i);
            for (x, xv) in orbit_levels(&i.target) {
                let value = r.value(&x);
                for p in basis_pairs(&r, &objs, &x, &xv, &ij, pair_bound) {
                    let yv = p.j.then(&xv);
                    let yu = pullback_unchecked(&yv, i);
                    let at_u = pair_index(&yu);
                    let k = GMap::new_unchecked(
                        p.d.set.clone(),
                        yu.set.clone(),
                        p.d.pairs.iter().map(|&(y, w)| at_u[&(y, j.points[w])]).collect(),
                    );
                    let lhs = mu.apply(i, &MultPair { d: yu, j: p.j.clone(), y: r.apply_transfer(&k, &p.y) });
                    let xd = pullback_unchecked(&xv, &ed.p);
                    let yd = pullback_unchecked(&yv, &ed.p);
                    let at_xd = pair_index(&xd);
                    let jd = GMap::new_unchecked(
                        yd.set.clone(),
                        xd.set.clone(),
                        yd.pairs.iter().map(|&(y, t)| at_xd[&(p.j.points[y], t)]).collect(),
                    );
                    let dd = pullback_unchecked(&yd.p2, &ed.top);
                    let at_w = pair_index(&p.d);
                    let phi = GMap::new_unchecked(
                        dd.set.clone(),
                        p.d.set.clone(),
                        dd.pairs.iter().map(|&(q, a)| at_w[&(yd.pairs[q].0, ed.e.points[a])]).collect(),
                    );
                    let y2 = r.apply_restriction(&phi, &p.y);
                    let inner = mu.apply(&ed.top, &MultPair { d: dd, j: jd, y: y2 });
                    let rhs = r.apply_transfer(&xd.p1, &inner);
                    rep.record("(iv) exponential", value.equal(&lhs, &rhs), || {
                        format!("j {:?} i {:?} pair {:?}", j.points, i.points, p.j.points)
                    });
                }
            }
        }
    }
    rep
}

/// n_i(u) = μ_i(V = V, u).
pub struct MultiplicativeNorms {
    mu: Arc<dyn MuFamily>,
}

impl NormProvider for MultiplicativeNorms {
    fn norm_positive(&self, _m: &MackeyFunctor, f: &GMap, x: &[Int]) -> Vec<Int> {
        let r = self.mu.underlying();
        let id = GMap::identity(&f.target);
        let d = pullback_unchecked(&id, f);
        let y = r.apply_restriction(&d.p2, x);
        self.mu.apply(f, &MultPair { d, j: id, y })
    }
}

/// The Tambara functor whose norms are read off from a multiplicative structure.
pub fn tambara_from_multiplicative(mu: Arc<dyn MuFamily>) -> TambaraFunctor {
    let under = mu.underlying().clone();
    TambaraFunctor::new(under, Arc::new(MultiplicativeNorms { mu }), "from μ")
}

/// Norms recovered from {μ_i} agree with R's on sample elements of every
/// map with at most `bound` points.
pub fn multiplicative_round_trip(r: &TambaraFunctor, mu: Arc<dyn MuFamily>, bound: usize) -> Report {
    let back = tambara_from_multiplicative(mu);
    let mut rep = Report::new("multiplicative-round-trip");
    rep.declare("norms");
    let objs = gsets_up_to(r.group(), bound);
    for f in maps_up_to(&objs, bound) {
        let v = r.value(&f.target);
        for e in sample_elements(&r.value(&f.source), 12) {
            let ok = v.equal(&back.norm(&f, &e), &r.norm(&f, &e));
            rep.record("norms", ok, || format!("{:?} at {:?}", f.points, e));
        }
    }
    rep
}

/// An action m: T(M) → M of the free Tambara monad, given levelwise.
pub trait MonadAction: Send + Sync {
    fn free(&self) -> &Arc<FreeTambara>;
    /// m: Sym_n(M)(X) → M(X).
    fn action(&self, x: &GSet, n: usize) -> Result<AbHom, AbError>;
}

/// The universal extension of a map of Mackey functors M → R into a Tambara functor R.
pub struct UniversalAction {
    ft: Arc<FreeTambara>,
    r: Arc<TambaraFunctor>,
    f0: MackeyMorphism,
    cache: Mutex<HashMap<(Vec<usize>, usize), AbHom>>,
}

impl UniversalAction {
    pub fn new(ft: &Arc<FreeTambara>, r: &Arc<TambaraFunctor>, f0: MackeyMorphism) -> Self {
        UniversalAction { ft: ft.clone(), r: r.clone(), f0, cache: Mutex::new(HashMap::new()) }
    }

    /// The structure map T(R) → R of a Tambara functor.
    pub fn of(r: &Arc<TambaraFunctor>) -> Self {
        let ft = Arc::new(FreeTambara::new(r.underlying()));
        Self::new(&ft, r, MackeyMorphism::identity(r.underlying()))
    }
}

impl MonadAction for UniversalAction {
    fn free(&self) -> &Arc<FreeTambara> {
        &self.ft
    }

    fn action(&self, x: &GSet, n: usize) -> Result<AbHom, AbError> {
        let key = (x.action_table().to_vec(), n);
        if let Some(h) = self.cache.lock().unwrap().get(&key) {
            return Ok(h.clone());
        }
        let h = universal_extension_hom(&self.ft, &self.r, &self.f0, x, n)?;
        self.cache.lock().unwrap().insert(key, h.clone());
        Ok(h)
    }
}

/// m applied to a combination of bispan classes of mixed degrees.
pub fn act_combo(m: &dyn MonadAction, x: &GSet, c: &Combo) -> Result<Vec<Int>, AbError> {
    let ft = m.free();
    let mut out = zero_vec(ft.mackey().value(x).num_gens());
    for (n, part) in ft.split_degrees(c) {
        let v = m.action(x, n)?.apply(&ft.vector(x, n, &part));
        add_scaled(&mut out, &Int::one(), &v);
    }
    Ok(out)
}

/// n_f := m ∘ n_f ∘ θ.
pub struct ActionNorms {
    m: Arc<dyn MonadAction>,
}

impl NormProvider for ActionNorms {
    fn norm_positive(&self, _m: &MackeyFunctor, f: &GMap, x: &[Int]) -> Vec<Int> {
        let ft = self.m.free();
        let c = ft.norm(f, &ft.theta(&f.source, x));
        act_combo(&*self.m, &f.target, &c).expect("action defined on every level")
    }
}

pub fn tambara_from_action(m: Arc<dyn MonadAction>) -> TambaraFunctor {
    let under = m.free().mackey().clone();
    TambaraFunctor::new(under, Arc::new(ActionNorms { m }), "from m")
}

/// Unit and associativity of a monad action, then the Tambara axioms for the
/// norms it induces, on diagrams with at most `bound` points. Degrees of the
/// free functor are capped at `max_degree`.
pub fn monad_algebra_check(m: Arc<dyn MonadAction>, bound: usize, max_degree: usize) -> Report {
    let ft = m.free().clone();
    let under = ft.mackey().clone();
    let group = under.group().clone();
    let mut rep = Report::new("monad-algebra");
    for c in ["well-defined", "unit", "associativity", "extracted norms"] {
        rep.declare(c);
    }
    let objs = gsets_up_to(&group, bound);
    for x in &objs {
        for n in 0..=max_degree {
            let ok = m.action(x, n).is_ok();
            rep.record("well-defined", ok, || format!("degree {} at {:?}", n, x.orbit_type()));
        }
        let v = under.value(x);
        for k in 0..v.num_gens() {
            let u = unit_vec(v.num_gens(), k);
            let back = act_combo(&*m, x, &ft.theta(x, &u));
            let ok = back.map_or(false, |b| v.equal(&b, &u));
            rep.record("unit", ok, || format!("generator {} at {:?}", k, x.orbit_type()));
        }
    }
    for i in maps_up_to(&objs, bound) {
        for z in objs.iter().filter(|z| i.source.size() + i.target.size() + z.size() <= bound) {
            for j in hom_set(&i.target, z) {
                let deg = i.degree().max(1);
                for n in 0..=max_degree {
                    if n * deg > max_degree {
                        continue;
                    }
                    let level = ft.level(&i.source, n);
                    let mut elems: Vec<Combo> = level.gens.iter().map(|g| Combo::from([(g.clone(), Int::one())])).collect();
                    for a in 0..level.gens.len() {
                        for b in a + 1..level.gens.len() {
                            elems.push(Combo::from([(level.gens[a].clone(), Int::one()), (level.gens[b].clone(), Int::one())]));
                        }
                    }
                    for e in elems {
                        let lhs = act_combo(&*m, z, &ft.transfer(&j, &ft.norm(&i, &e)));
                        let rhs = act_combo(&*m, &i.source, &e)
                            .and_then(|w| act_combo(&*m, z, &ft.transfer(&j, &ft.norm(&i, &ft.theta(&i.source, &w)))));
                        let ok = matches!((&lhs, &rhs), (Ok(a), Ok(b)) if under.value(z).equal(a, b));
                        rep.record("associativity", ok, || format!("i {:?} j {:?} degree {}", i.points, j.points, n));
                    }
                }
            }
        }
    }
    let extracted = tambara_from_action(m);
    let ax = check_tambara_axioms_with(&extracted, bound, 6);
    rep.record("extracted norms", ax.passed(), || ax.first_failure().unwrap_or_default());
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::int;
    use crate::groups::catalog_group;

    #[test]
    fn counit_norm_value() {
        let g = catalog_group("C2").unwrap();
        let a = burnside_tambara(&g);
        let free = GSet::orbit(&g, 0);
        let f = GMap::to_point(&free);
        // 2 in A(C2/e) = 2·[C2/e → C2/e]
        let n = a.norm(&f, &[int(2)]);
        assert_eq!(n, vec![int(2), int(1)]);
        let n = a.norm(&f, &[int(-1)]);
        let v = a.value(&GSet::point(&g));
        // n(-1) = 1 - [C2/e] in A(C2)... its square is n(1) = 1.
        let sq = a.product(&GSet::point(&g), &n, &n);
        assert!(v.equal(&sq, &[int(1), int(0)]));
    }

    #[test]
    fn burnside_axioms_small() {
        let g = catalog_group("C2").unwrap();
        let a = burnside_tambara(&g);
        let rep = check_tambara_axioms(&a, 5);
        assert!(rep.passed(), "{:?}", rep.first_failure());
    }

    #[test]
    fn constant_norms_fail() {
        let g = catalog_group("C2").unwrap();
        let a = burnside_mackey(&g);
        let t = TambaraFunctor::new(Arc::new(a), Arc::new(ConstantNorms(vec![int(1)])), "bad");
        assert!(check_tambara_axioms(&t, 4).failed("functoriality"));
    }
}
