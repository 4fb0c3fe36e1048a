//! The free Tambara functor T(M) and its graded pieces Sym_n(M).
//!
//! M is presented through a cover [−, S] → M that sends the identity span to
//! ξ ∈ M(S). Every element of M(U) lifts to A(U×S), and the class of a pair
//! (U → V → X, u) is a polynomial function of the lift. So Sym_n(M)(X) is the
//! free abelian group on connected bispans X ← V ← U → S whose fibers over V
//! have n points, modulo the rows saying that this polynomial function only
//! depends on u. Those rows are finitely many: a polynomial of degree ≤ n is
//! determined by its values on a simplex.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::{Arc, Mutex};

use num_traits::{One, Signed, Zero};

use crate::abelian::{add_assign, is_zero_vec, sub_vec, unit_vec, zero_vec, AbError, AbHom, FgAb, Int, IntMatrix, Solver};
use crate::groups::FiniteGroup;
use crate::gsets::{exponential_unchecked, pullback_unchecked, GMap, GSet};
use crate::mackey::{
    burnside_mackey, geometric_fixed_points, BGTMackeyFunctor, Cover, GeometricFixedPoints, MackeyFunctor, MackeyModel, MackeyMorphism,
    RepresentableCoords, Report, SpanBasis,
};
use crate::tambara::{difference_weights, TambaraFunctor};

/// A connected bispan X ← G/K ← U → S up to isomorphism: the class of K,
/// the image of the identity coset in X, and the K-orbits of the fiber over
/// it as (stabilizer, label) pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BispanKey {
    pub class: usize,
    pub point: usize,
    pub fiber: Vec<(usize, usize)>,
}

impl BispanKey {
    pub fn degree(&self, group: &FiniteGroup) -> usize {
        let k = group.subgroup(group.class_rep(self.class)).order();
        self.fiber.iter().map(|&(l, _)| k / group.subgroup(l).order()).sum()
    }
}

/// A formal combination of generator keys over a fixed X.
pub type Combo<K = BispanKey> = BTreeMap<K, Int>;

pub fn combo_add<K: Ord + Clone>(a: &mut Combo<K>, key: K, c: &Int) {
    if c.is_zero() {
        return;
    }
    let e = a.entry(key.clone()).or_insert_with(Int::zero);
    *e += c;
    if e.is_zero() {
        a.remove(&key);
    }
}

pub fn combo_add_scaled<K: Ord + Clone>(a: &mut Combo<K>, c: &Int, b: &Combo<K>) {
    for (k, v) in b {
        combo_add(a, k.clone(), &(c * v));
    }
}

pub fn combo_sub<K: Ord + Clone>(a: &Combo<K>, b: &Combo<K>) -> Combo<K> {
    let mut out = a.clone();
    combo_add_scaled(&mut out, &-Int::one(), b);
    out
}

/// A bispan X ←j V ←i U →h S, as point arrays.
#[derive(Clone, Debug)]
pub struct Bispan {
    pub u: GSet,
    pub v: GSet,
    pub x: GSet,
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub h: Vec<usize>,
}

impl Bispan {
    pub fn i_map(&self) -> GMap {
        GMap::new_unchecked(self.u.clone(), self.v.clone(), self.i.clone())
    }

    pub fn j_map(&self) -> GMap {
        GMap::new_unchecked(self.v.clone(), self.x.clone(), self.j.clone())
    }

    /// X = X = X labelled by h.
    pub fn identity(x: &GSet, h: Vec<usize>) -> Bispan {
        let id: Vec<usize> = (0..x.size()).collect();
        Bispan { u: x.clone(), v: x.clone(), x: x.clone(), i: id.clone(), j: id, h }
    }

    /// The standard bispan of a key; labels are points of `s`.
    pub fn materialize(key: &BispanKey, x: &GSet, s: &GSet) -> Bispan {
        let group = x.group();
        let k = group.class_rep(key.class);
        let kc = group.cosets(k);
        let v = GSet::orbit(group, k);
        let j = kc.reps.iter().map(|&g| x.act(g, key.point)).collect();
        let parts: Vec<GSet> = key.fiber.iter().map(|&(l, _)| GSet::orbit(group, l)).collect();
        let (u, incl) = GSet::coproduct(group, &parts);
        let mut i = vec![0; u.size()];
        let mut h = vec![0; u.size()];
        for (t, &(l, lab)) in key.fiber.iter().enumerate() {
            for (c, &g) in group.cosets(l).reps.iter().enumerate() {
                let p = incl[t].apply(c);
                i[p] = kc.coset_of[g];
                h[p] = s.act(g, lab);
            }
        }
        Bispan { u, v, x: x.clone(), i, j, h }
    }

    /// One canonical key per orbit of V.
    pub fn keys(&self) -> Vec<BispanKey> {
        let group = self.v.group().clone();
        let mut fib = vec![Vec::new(); self.v.size()];
        for (p, &q) in self.i.iter().enumerate() {
            fib[q].push(p);
        }
        let mut stab: HashMap<usize, usize> = HashMap::new();
        let mut out = Vec::with_capacity(self.v.orbits().len());
        for o in self.v.orbits() {
            let sub = group.subgroup(o.sub);
            let mut best: Option<(usize, Vec<(usize, usize)>)> = None;
            let mut tried = BTreeSet::new();
            for &n in &sub.normalizer {
                let y = self.v.act(n, o.base);
                if !tried.insert(y) {
                    continue;
                }
                let mut seen = HashSet::new();
                let mut types = Vec::new();
                for &f in &fib[y] {
                    if seen.contains(&f) {
                        continue;
                    }
                    let mut t: Option<(usize, usize)> = None;
                    for &kk in &sub.elements {
                        let p = self.u.act(kk, f);
                        if seen.insert(p) {
                            let st = *stab.entry(p).or_insert_with(|| self.u.stabilizer(p));
                            let cand = (st, self.h[p]);
                            if t.is_none_or(|b| cand < b) {
                                t = Some(cand);
                            }
                        }
                    }
                    types.push(t.unwrap());
                }
                types.sort_unstable();
                let cand = (self.j[y], types);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
            let (point, fiber) = best.unwrap();
            out.push(BispanKey { class: o.class, point, fiber });
        }
        out
    }

    pub fn combo(&self) -> Combo {
        let mut c = Combo::new();
        for k in self.keys() {
            combo_add(&mut c, k, &Int::one());
        }
        c
    }

    pub fn coproduct(parts: &[Bispan], x: &GSet) -> Bispan {
        let group = x.group();
        let us: Vec<GSet> = parts.iter().map(|b| b.u.clone()).collect();
        let vs: Vec<GSet> = parts.iter().map(|b| b.v.clone()).collect();
        let (u, _) = GSet::coproduct(group, &us);
        let (v, _) = GSet::coproduct(group, &vs);
        let (mut i, mut j, mut h) = (Vec::new(), Vec::new(), Vec::new());
        let mut voff = 0;
        for b in parts {
            i.extend(b.i.iter().map(|&q| q + voff));
            j.extend(b.j.iter().copied());
            h.extend(b.h.iter().copied());
            voff += b.v.size();
        }
        Bispan { u, v, x: x.clone(), i, j, h }
    }

    /// Restriction along f: X' → X by two pullbacks.
    pub fn pullback(&self, f: &GMap) -> Bispan {
        let pv = pullback_unchecked(&self.j_map(), f);
        let pu = pullback_unchecked(&self.i_map(), &pv.p1);
        Bispan {
            h: pu.pairs.iter().map(|&(u, _)| self.h[u]).collect(),
            i: pu.p2.points.to_vec(),
            j: pv.p2.points.to_vec(),
            u: pu.set,
            v: pv.set,
            x: f.source.clone(),
        }
    }

    pub fn transfer(&self, f: &GMap) -> Bispan {
        let mut b = self.clone();
        b.j = self.j.iter().map(|&p| f.apply(p)).collect();
        b.x = f.target.clone();
        b
    }

    /// The norm along f: X → Y: exponential diagram of (j, f), then pull U back along e.
    pub fn norm(&self, f: &GMap) -> Bispan {
        let d = exponential_unchecked(&self.j_map(), f);
        let pb = pullback_unchecked(&self.i_map(), &d.e);
        Bispan {
            h: pb.pairs.iter().map(|&(u, _)| self.h[u]).collect(),
            i: pb.pairs.iter().map(|&(_, a)| d.top.apply(a)).collect(),
            j: d.p.points.to_vec(),
            u: pb.set,
            v: d.pi,
            x: f.target.clone(),
        }
    }
}

/// A(D ×_? S) → N(D) for a cover: span basis, images, lifting and kernel.
pub struct Domain {
    pub basis: SpanBasis,
    pub to_base: GMap,
    pub to_cover: GMap,
    pub value: Arc<FgAb>,
    solver: Solver,
    pub kernel: Vec<Vec<Int>>,
}

impl Domain {
    /// `image(k, h)` is the image of the span D ←k W →h S of an orbit W.
    pub fn new(basis: SpanBasis, to_base: GMap, to_cover: GMap, value: Arc<FgAb>, image: impl Fn(&GMap, &GMap) -> Vec<Int>) -> Self {
        let rows = (0..basis.len())
            .map(|k| {
                let w = basis.orbit_of(k);
                image(&w.then(&to_base), &w.then(&to_cover))
            })
            .collect();
        let images = IntMatrix::from_rows(rows, value.num_gens());
        let solver = Solver::new(&images, value.relations());
        let kernel = solver.kernel();
        Domain { basis, to_base, to_cover, value, solver, kernel }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn lift(&self, u: &[Int]) -> Vec<Int> {
        self.solver.solve(u).expect("cover is surjective")
    }

    /// The span D ← W → S of a nonnegative vector.
    pub fn realize(&self, c: &[Int]) -> (GMap, GMap) {
        let w = self.basis.realize(c);
        (w.then(&self.to_base), w.then(&self.to_cover))
    }
}

pub fn cover_domain(m: &MackeyFunctor, cover: &Cover, d: &GSet) -> Domain {
    let q = d.product(&cover.set);
    Domain::new(SpanBasis::new(&q), d.proj1(&cover.set), d.proj2(&cover.set), m.value(d), |k, h| {
        m.apply_transfer(k, &m.apply_restriction(h, &cover.xi))
    })
}

/// All vectors in N^n with lo ≤ sum ≤ hi.
pub fn bounded_vectors(n: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, cur: &mut Vec<usize>, total: usize, lo: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            if total >= lo {
                out.push(cur.clone());
            }
            return;
        }
        for a in 0..=left {
            cur.push(a);
            rec(n, left - a, cur, total + a, lo, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if lo <= hi {
        rec(n, hi, &mut Vec::with_capacity(n), 0, lo, &mut out);
    }
    out
}

/// Rows Q(v + Σ m_j k_j⁺) − Q(v + Σ m_j k_j⁻) for |m| ≥ 1 and |v| + |m| ≤ degree,
/// which force a polynomial Q of that degree to be invariant under the kernel.
pub fn simplex_relations(dim: usize, kernel: &[Vec<Int>], degree: usize, mut eval: impl FnMut(&[Int]) -> Vec<Int>) -> Vec<Vec<Int>> {
    let mut rows = BTreeSet::new();
    if kernel.is_empty() || degree == 0 {
        return Vec::new();
    }
    let pos: Vec<Vec<Int>> = kernel.iter().map(|k| k.iter().map(|x| if x.is_positive() { x.clone() } else { Int::zero() }).collect()).collect();
    let neg: Vec<Vec<Int>> = kernel.iter().map(|k| k.iter().map(|x| if x.is_negative() { -x } else { Int::zero() }).collect()).collect();
    for m in bounded_vectors(kernel.len(), 1, degree) {
        let mt: usize = m.iter().sum();
        let mut kp = zero_vec(dim);
        let mut kn = zero_vec(dim);
        for (j, &c) in m.iter().enumerate() {
            for _ in 0..c {
                add_assign(&mut kp, &pos[j]);
                add_assign(&mut kn, &neg[j]);
            }
        }
        for v in bounded_vectors(dim, 0, degree - mt) {
            let mut a = kp.clone();
            let mut b = kn.clone();
            for (t, &c) in v.iter().enumerate() {
                a[t] += c;
                b[t] += c;
            }
            let r = sub_vec(&eval(&a), &eval(&b));
            if !is_zero_vec(&r) {
                rows.insert(r);
            }
        }
    }
    rows.into_iter().collect()
}

/// Q(a − b) = Σ_t w_t Q(a + t·b) for a polynomial Q of the given degree.
pub fn difference_combo<K: Ord + Clone>(degree: usize, c: &[Int], mut eval: impl FnMut(&[Int]) -> Combo<K>) -> Combo<K> {
    if c.iter().all(|x| !x.is_negative()) {
        return eval(c);
    }
    let a: Vec<Int> = c.iter().map(|x| if x.is_positive() { x.clone() } else { Int::zero() }).collect();
    let b: Vec<Int> = c.iter().map(|x| if x.is_negative() { -x } else { Int::zero() }).collect();
    let mut out = Combo::new();
    for (t, w) in difference_weights(degree).iter().enumerate() {
        let arg: Vec<Int> = a.iter().zip(&b).map(|(x, y)| x + y * Int::from(t)).collect();
        combo_add_scaled(&mut out, w, &eval(&arg));
    }
    out
}

pub(crate) type SetKey = (usize, Vec<usize>);

pub(crate) fn set_key(x: &GSet) -> SetKey {
    (x.size(), x.action_table().to_vec())
}

/// Canonical (stabilizer, label) types of K-orbits labelled in `s`, with sizes.
pub fn fiber_types(group: &FiniteGroup, k: usize, s: &GSet) -> Vec<((usize, usize), usize)> {
    let sub = group.subgroup(k);
    let mut types = BTreeSet::new();
    for l in 0..group.subgroups().len() {
        if !group.is_subgroup_of(l, k) {
            continue;
        }
        for lab in s.fixed_points(l) {
            let t = sub.elements.iter().map(|&g| (group.conjugate(g, l), s.act(g, lab))).min().unwrap();
            types.insert(t);
        }
    }
    types.into_iter().map(|t| (t, sub.order() / group.subgroup(t.0).order())).collect()
}

/// Multisets of types whose sizes add up to n, as sorted lists.
pub fn multisets<T: Clone>(types: &[(T, usize)], n: usize) -> Vec<Vec<T>> {
    fn rec<T: Clone>(types: &[(T, usize)], start: usize, left: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for t in start..types.len() {
            if types[t].1 <= left {
                cur.push(types[t].0.clone());
                rec(types, t, left - types[t].1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(types, 0, n, &mut Vec::new(), &mut out);
    out
}

/// Keys of all connected bispans over X with fibers of size n labelled in s.
pub fn enumerate_bispans(x: &GSet, s: &GSet, n: usize) -> Vec<BispanKey> {
    let group = x.group().clone();
    let mut keys = BTreeSet::new();
    for c in 0..group.num_classes() {
        let k = group.class_rep(c);
        let types = fiber_types(&group, k, s);
        let fibers = multisets(&types, n);
        for p in x.fixed_points(k) {
            for fiber in &fibers {
                let key = BispanKey { class: c, point: p, fiber: fiber.clone() };
                keys.insert(Bispan::materialize(&key, x, s).keys().remove(0));
            }
        }
    }
    keys.into_iter().collect()
}

/// Sym_n(M)(X) as a presented group on bispan keys.
pub struct SymLevel {
    pub x: GSet,
    pub degree: usize,
    pub gens: Vec<BispanKey>,
    index: HashMap<BispanKey, usize>,
    pub value: Arc<FgAb>,
}

impl SymLevel {
    pub fn index_of(&self, key: &BispanKey) -> usize {
        self.index[key]
    }

    pub fn vector(&self, c: &Combo) -> Vec<Int> {
        let mut v = zero_vec(self.gens.len());
        for (k, a) in c {
            v[self.index[k]] += a;
        }
        v
    }

    pub fn combo(&self, v: &[Int]) -> Combo {
        let mut c = Combo::new();
        for (k, a) in v.iter().enumerate() {
            combo_add(&mut c, self.gens[k].clone(), a);
        }
        c
    }
}

/// The free Tambara functor on M, evaluated lazily on bispan combinations.
pub struct FreeTambara {
    m: Arc<MackeyFunctor>,
    cover: Cover,
    domains: Mutex<HashMap<SetKey, Arc<Domain>>>,
    levels: Mutex<HashMap<(SetKey, usize), Arc<SymLevel>>>,
}

impl FreeTambara {
    pub fn new(m: &Arc<MackeyFunctor>) -> Self {
        Self::with_cover(m, Cover::of(m))
    }

    pub fn with_cover(m: &Arc<MackeyFunctor>, cover: Cover) -> Self {
        FreeTambara { m: m.clone(), cover, domains: Mutex::new(HashMap::new()), levels: Mutex::new(HashMap::new()) }
    }

    pub fn mackey(&self) -> &Arc<MackeyFunctor> {
        &self.m
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.m.group()
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn domain(&self, d: &GSet) -> Arc<Domain> {
        let key = set_key(d);
        if let Some(dom) = self.domains.lock().unwrap().get(&key) {
            return dom.clone();
        }
        let dom = Arc::new(cover_domain(&self.m, &self.cover, d));
        self.domains.lock().unwrap().insert(key, dom.clone());
        dom
    }

    /// Class of (U → V → X, c) for a nonnegative lift c ∈ A(U×S).
    pub fn eval_shape(&self, shape: &Bispan, c: &[Int]) -> Combo {
        let dom = self.domain(&shape.u);
        let (k, h) = dom.realize(c);
        let d = exponential_unchecked(&k, &shape.i_map());
        Bispan {
            h: d.e.points.iter().map(|&w| h.apply(w)).collect(),
            i: d.top.points.to_vec(),
            j: d.p.points.iter().map(|&p| shape.j[p]).collect(),
            u: d.a,
            v: d.pi,
            x: shape.x.clone(),
        }
        .combo()
    }

    /// Class of (U → V → X, c) for an arbitrary lift.
    pub fn pair_class(&self, shape: &Bispan, c: &[Int]) -> Combo {
        let degree = shape.i_map().degree();
        difference_combo(degree, c, |a| self.eval_shape(shape, a))
    }

    /// Class of (U → V → X, u) for u ∈ M(U); the labels of `shape` are ignored.
    pub fn element(&self, shape: &Bispan, u: &[Int]) -> Combo {
        let lift = self.domain(&shape.u).lift(u);
        self.pair_class(shape, &lift)
    }

    /// θ(v) = class of (X = X = X, v).
    pub fn theta(&self, x: &GSet, v: &[Int]) -> Combo {
        self.element(&Bispan::identity(x, vec![0; x.size()]), v)
    }

    pub fn generators(&self, x: &GSet, n: usize) -> Vec<BispanKey> {
        enumerate_bispans(x, &self.cover.set, n)
    }

    /// Relation rows of Sym_n(M)(X) in the given generator order.
    pub fn relation_instances(&self, x: &GSet, n: usize, index: &HashMap<BispanKey, usize>) -> Vec<Vec<Int>> {
        let pt = GSet::point(self.group());
        let mut rows = BTreeSet::new();
        for shape_key in enumerate_bispans(x, &pt, n) {
            let shape = Bispan::materialize(&shape_key, x, &pt);
            let dom = self.domain(&shape.u);
            if dom.kernel.is_empty() {
                continue;
            }
            let rs = simplex_relations(dom.dim(), &dom.kernel, n, |c| {
                let mut v = zero_vec(index.len());
                for (k, a) in self.eval_shape(&shape, c) {
                    v[index[&k]] += a;
                }
                v
            });
            rows.extend(rs);
        }
        rows.into_iter().collect()
    }

    pub fn level(&self, x: &GSet, n: usize) -> Arc<SymLevel> {
        let key = (set_key(x), n);
        if let Some(l) = self.levels.lock().unwrap().get(&key) {
            return l.clone();
        }
        let gens = self.generators(x, n);
        let index: HashMap<BispanKey, usize> = gens.iter().enumerate().map(|(k, g)| (g.clone(), k)).collect();
        let rows = self.relation_instances(x, n, &index);
        let value = Arc::new(FgAb::new(gens.len(), rows));
        let level = Arc::new(SymLevel { x: x.clone(), degree: n, gens, index, value });
        self.levels.lock().unwrap().insert(key, level.clone());
        level
    }

    pub fn materialize(&self, key: &BispanKey, x: &GSet) -> Bispan {
        Bispan::materialize(key, x, &self.cover.set)
    }

    /// The bispan of a nonnegative combination.
    pub fn realize(&self, x: &GSet, c: &Combo) -> Bispan {
        let mut parts = Vec::new();
        for (k, a) in c {
            let b = self.materialize(k, x);
            let n: usize = a.try_into().expect("nonnegative multiplicity");
            for _ in 0..n {
                parts.push(b.clone());
            }
        }
        Bispan::coproduct(&parts, x)
    }

    pub fn transfer(&self, f: &GMap, c: &Combo) -> Combo {
        let mut out = Combo::new();
        for (k, a) in c {
            combo_add_scaled(&mut out, a, &self.materialize(k, &f.source).transfer(f).combo());
        }
        out
    }

    pub fn restriction(&self, f: &GMap, c: &Combo) -> Combo {
        let mut out = Combo::new();
        for (k, a) in c {
            combo_add_scaled(&mut out, a, &self.materialize(k, &f.target).pullback(f).combo());
        }
        out
    }

    pub fn norm(&self, f: &GMap, c: &Combo) -> Combo {
        let keys: Vec<BispanKey> = c.keys().cloned().collect();
        let coeffs: Vec<Int> = c.values().cloned().collect();
        difference_combo(f.degree(), &coeffs, |a| {
            let mut pos = Combo::new();
            for (k, n) in keys.iter().zip(a) {
                combo_add(&mut pos, k.clone(), n);
            }
            self.realize(&f.source, &pos).norm(f).combo()
        })
    }

    pub fn one(&self, x: &GSet) -> Combo {
        self.norm(&GMap::from_empty(x), &Combo::new())
    }

    pub fn product(&self, x: &GSet, a: &Combo, b: &Combo) -> Combo {
        let (_, incl) = GSet::coproduct(x.group(), &[x.clone(), x.clone()]);
        let mut both = self.transfer(&incl[0], a);
        combo_add_scaled(&mut both, &Int::one(), &self.transfer(&incl[1], b));
        self.norm(&GMap::fold(x, 2), &both)
    }

    pub fn split_degrees(&self, c: &Combo) -> BTreeMap<usize, Combo> {
        let mut out: BTreeMap<usize, Combo> = BTreeMap::new();
        for (k, a) in c {
            combo_add(out.entry(k.degree(self.group())).or_default(), k.clone(), a);
        }
        out
    }

    pub fn is_zero(&self, x: &GSet, c: &Combo) -> bool {
        self.split_degrees(c).into_iter().all(|(n, part)| {
            let level = self.level(x, n);
            level.value.is_zero(&level.vector(&part))
        })
    }

    pub fn equal(&self, x: &GSet, a: &Combo, b: &Combo) -> bool {
        self.is_zero(x, &combo_sub(a, b))
    }

    /// Vector of a homogeneous combination in Sym_n(M)(X).
    pub fn vector(&self, x: &GSet, n: usize, c: &Combo) -> Vec<Int> {
        self.level(x, n).vector(c)
    }
}

/// Sym_n(M) as a Mackey model: transfers by composition, restrictions by pullback.
pub struct SymModel {
    ft: Arc<FreeTambara>,
    n: usize,
}

impl SymModel {
    pub fn new(ft: &Arc<FreeTambara>, n: usize) -> Self {
        SymModel { ft: ft.clone(), n }
    }
}

impl MackeyModel for SymModel {
    fn group(&self) -> &Arc<FiniteGroup> {
        self.ft.group()
    }

    fn eval(&self, x: &GSet) -> FgAb {
        (*self.ft.level(x, self.n).value).clone()
    }

    fn restriction(&self, f: &GMap) -> IntMatrix {
        let src = self.ft.level(&f.source, self.n);
        let tgt = self.ft.level(&f.target, self.n);
        let rows = tgt.gens.iter().map(|k| src.vector(&self.ft.materialize(k, &f.target).pullback(f).combo())).collect();
        IntMatrix::from_rows(rows, src.gens.len())
    }

    fn transfer(&self, f: &GMap) -> IntMatrix {
        let src = self.ft.level(&f.source, self.n);
        let tgt = self.ft.level(&f.target, self.n);
        let rows = src.gens.iter().map(|k| tgt.vector(&self.ft.materialize(k, &f.source).transfer(f).combo())).collect();
        IntMatrix::from_rows(rows, tgt.gens.len())
    }

    fn label(&self) -> String {
        format!("Sym{}({})", self.n, self.ft.mackey().label())
    }
}

pub fn sym_power_mackey(ft: &Arc<FreeTambara>, n: usize) -> MackeyFunctor {
    MackeyFunctor::from_model(&SymModel::new(ft, n))
}

pub fn sym_power_level(m: &Arc<MackeyFunctor>, x: &GSet, n: usize) -> Arc<SymLevel> {
    FreeTambara::new(m).level(x, n)
}

/// A(X) → T⁰(M)(X), W ↦ (∅ → W → X).
pub fn t0_comparison(ft: &FreeTambara, x: &GSet) -> Result<AbHom, AbError> {
    let group = ft.group();
    let a = burnside_mackey(group);
    let coords = RepresentableCoords::new(&GSet::point(group));
    let level = ft.level(x, 0);
    let dim = coords.dim(x);
    let rows = (0..dim)
        .map(|k| {
            let w = coords.realize(x, &unit_vec(dim, k)).then(&x.proj1(&coords.t));
            let b = Bispan { u: GSet::empty(group), v: w.source.clone(), x: x.clone(), i: vec![], j: w.points.to_vec(), h: vec![] };
            level.vector(&b.combo())
        })
        .collect();
    AbHom::new(a.value(x), level.value.clone(), IntMatrix::from_rows(rows, level.gens.len()))
}

/// θ: M(X) → T¹(M)(X).
pub fn t1_comparison(ft: &FreeTambara, x: &GSet) -> Result<AbHom, AbError> {
    let value = ft.mackey().value(x);
    let level = ft.level(x, 1);
    let n = value.num_gens();
    let rows = (0..n).map(|k| level.vector(&ft.theta(x, &unit_vec(n, k)))).collect();
    AbHom::new(value, level.value.clone(), IntMatrix::from_rows(rows, level.gens.len()))
}

/// t_j n_i r_h F₀(ξ) ∈ R(X) for the bispan of a key.
pub fn universal_extension(ft: &FreeTambara, r: &TambaraFunctor, f0: &MackeyMorphism, x: &GSet, key: &BispanKey) -> Vec<Int> {
    let cover = ft.cover();
    let xi = f0.apply(&cover.set, &cover.xi);
    let b = ft.materialize(key, x);
    let h = GMap::new_unchecked(b.u.clone(), cover.set.clone(), b.h.clone());
    let u = r.restriction(&h, &xi);
    r.transfer(&b.j_map(), &r.norm(&b.i_map(), &u))
}

/// The universal extension Sym_n(M)(X) → R(X) as a checked homomorphism.
pub fn universal_extension_hom(ft: &FreeTambara, r: &TambaraFunctor, f0: &MackeyMorphism, x: &GSet, n: usize) -> Result<AbHom, AbError> {
    let level = ft.level(x, n);
    let target = r.value(x);
    let rows = level.gens.iter().map(|k| universal_extension(ft, r, f0, x, k)).collect();
    AbHom::new(level.value.clone(), target.clone(), IntMatrix::from_rows(rows, target.num_gens()))
}

/// A generator of the symmetric algebra on ⊕_c Φ^{H_c}M / W: (class, level generator).
pub type AlgebraGen = (usize, usize);

/// The degree-n piece of the symmetric algebra on ⊕_c Φ^{H_c}(M)/W(H_c),
/// where the summand of class c sits in degree [G:H_c].
pub struct SymAlgebraPiece {
    pub degree: usize,
    pub monomials: Vec<Vec<AlgebraGen>>,
    index: HashMap<Vec<AlgebraGen>, usize>,
    pub value: Arc<FgAb>,
}

impl SymAlgebraPiece {
    pub fn new(m: &MackeyFunctor, n: usize) -> Self {
        let group = m.group();
        let mut types = Vec::new();
        let mut coinv = Vec::new();
        for c in 0..group.num_classes() {
            let q = geometric_fixed_points(m, c).weyl_coinvariants();
            let d = group.index_of(group.class_rep(c));
            for k in 0..q.num_gens() {
                types.push(((c, k), d));
            }
            coinv.push((q, d));
        }
        let monomials = multisets(&types, n);
        let index: HashMap<Vec<AlgebraGen>, usize> = monomials.iter().enumerate().map(|(k, mono)| (mono.clone(), k)).collect();
        let mut rows = BTreeSet::new();
        for (c, (q, d)) in coinv.iter().enumerate() {
            if *d > n {
                continue;
            }
            for rest in multisets(&types, n - d) {
                for rel in q.relations() {
                    let mut row = zero_vec(monomials.len());
                    for (k, a) in rel.iter().enumerate() {
                        if a.is_zero() {
                            continue;
                        }
                        let mut mono = rest.clone();
                        mono.push((c, k));
                        mono.sort_unstable();
                        row[index[&mono]] += a;
                    }
                    if !is_zero_vec(&row) {
                        rows.insert(row);
                    }
                }
            }
        }
        let value = Arc::new(FgAb::new(monomials.len(), rows.into_iter().collect()));
        SymAlgebraPiece { degree: n, monomials, index, value }
    }

    pub fn index_of(&self, mono: &[AlgebraGen]) -> usize {
        self.index[mono]
    }

    /// The product of linear forms, one per factor: (class, coefficients on the level generators).
    pub fn product_of_linear(&self, factors: &[(usize, Vec<Int>)]) -> Vec<Int> {
        let mut terms: BTreeMap<Vec<AlgebraGen>, Int> = BTreeMap::new();
        terms.insert(Vec::new(), Int::one());
        for (c, lin) in factors {
            let mut next = BTreeMap::new();
            for (mono, a) in &terms {
                for (k, b) in lin.iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    let mut m2 = mono.clone();
                    m2.push((*c, k));
                    m2.sort_unstable();
                    *next.entry(m2).or_insert_with(Int::zero) += a * b;
                }
            }
            terms = next;
        }
        let mut v = zero_vec(self.monomials.len());
        for (mono, a) in terms {
            v[self.index[&mono]] += a;
        }
        v
    }
}

/// Ξ from the symmetric algebra to Φ^G Sym_n(M), its left inverse ξ, and checks.
pub struct PhiComparison {
    pub algebra: SymAlgebraPiece,
    pub fixed_points: GeometricFixedPoints,
    pub big_xi: AbHom,
    pub small_xi: AbHom,
}

/// Monomial of orbit summands ⊔_t G/H_{c_t} → pt with unit elements e_{k_t}.
fn monomial_shape(group: &Arc<FiniteGroup>, mono: &[AlgebraGen], m: &MackeyFunctor) -> (Bispan, Vec<Int>) {
    let parts: Vec<GSet> = mono.iter().map(|&(c, _)| GSet::orbit(group, group.class_rep(c))).collect();
    let (u, _) = GSet::coproduct(group, &parts);
    let pt = GSet::point(group);
    let mut elem = Vec::new();
    for &(c, k) in mono {
        elem.extend(unit_vec(m.level(c).num_gens(), k));
    }
    let shape = Bispan { i: vec![0; u.size()], h: vec![0; u.size()], u, v: pt.clone(), x: pt, j: vec![0] };
    (shape, elem)
}

pub fn phi_free_tambara(ft: &Arc<FreeTambara>, n: usize) -> Result<PhiComparison, AbError> {
    let m = ft.mackey().clone();
    let group = m.group().clone();
    let top = group.num_classes() - 1;
    let algebra = SymAlgebraPiece::new(&m, n);
    let sym = sym_power_mackey(ft, n);
    let fixed_points = geometric_fixed_points(&sym, top);
    let pt = GSet::point(&group);
    let level = ft.level(&pt, n);
    let rows = algebra
        .monomials
        .iter()
        .map(|mono| {
            let (shape, elem) = monomial_shape(&group, mono, &m);
            level.vector(&ft.element(&shape, &elem))
        })
        .collect();
    let big_xi = AbHom::new(algebra.value.clone(), fixed_points.value.clone(), IntMatrix::from_rows(rows, level.gens.len()))?;
    let cover = ft.cover();
    let rows = level
        .gens
        .iter()
        .map(|key| {
            if key.class != top {
                return zero_vec(algebra.monomials.len());
            }
            let b = ft.materialize(key, &pt);
            let h = GMap::new_unchecked(b.u.clone(), cover.set.clone(), b.h.clone());
            let u = m.apply_restriction(&h, &cover.xi);
            let ev = m.eval(&b.u);
            let factors: Vec<(usize, Vec<Int>)> =
                ev.classes.iter().enumerate().map(|(t, &c)| (c, u[ev.offsets[t]..ev.offsets[t + 1]].to_vec())).collect();
            algebra.product_of_linear(&factors)
        })
        .collect();
    let small_xi = AbHom::new(fixed_points.value.clone(), algebra.value.clone(), IntMatrix::from_rows(rows, algebra.monomials.len()))?;
    Ok(PhiComparison { algebra, fixed_points, big_xi, small_xi })
}

impl PhiComparison {
    pub fn check(&self) -> Report {
        let mut report = Report::new("phi-free-tambara");
        let iso = self.big_xi.is_isomorphism().unwrap_or(false);
        report.record("Xi is an isomorphism", iso, || "Ξ is not invertible".into());
        let comp = self.big_xi.then(&self.small_xi);
        let n = self.algebra.monomials.len();
        for k in 0..n {
            let e = unit_vec(n, k);
            let ok = self.algebra.value.equal(&comp.apply(&e), &e);
            report.record("left inverse", ok, || format!("monomial {:?}", self.algebra.monomials[k]));
        }
        report
    }
}

/// An object (H, φ) of O(G; n): H is a class representative and φ(h) is the
/// permutation of {0..n} attached to the h-th element of H.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitObject {
    pub class: usize,
    pub sub: usize,
    pub phi: Vec<Vec<usize>>,
}

/// The coset (g, σ)H^φ of a morphism (L, λ) → (H, φ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitMorphism {
    pub source: usize,
    pub target: usize,
    pub g: usize,
    pub sigma: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct OrbitCategory {
    pub degree: usize,
    pub objects: Vec<OrbitObject>,
    pub morphisms: Vec<OrbitMorphism>,
}

fn compose_perm(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&j| p[j]).collect()
}

fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        out[j] = i;
    }
    out
}

/// All homomorphisms from a subgroup into Σ_n.
fn homs_to_symmetric(group: &FiniteGroup, sub: usize, n: usize) -> Vec<Vec<Vec<usize>>> {
    let els = &group.subgroup(sub).elements;
    let pos = |g: usize| els.binary_search(&g).unwrap();
    let mut gens: Vec<usize> = Vec::new();
    let mut span: BTreeSet<usize> = [group.identity()].into();
    for &h in els {
        if span.contains(&h) {
            continue;
        }
        gens.push(h);
        let mut frontier: Vec<usize> = span.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for &s in &gens {
                let y = group.mul(x, s);
                if span.insert(y) {
                    frontier.push(y);
                }
            }
        }
    }
    let perms = crate::groups::permutations(n);
    let id: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    loop {
        let mut img: Vec<Option<Vec<usize>>> = vec![None; els.len()];
        img[pos(group.identity())] = Some(id.clone());
        let mut queue = vec![group.identity()];
        let mut ok = true;
        while let Some(x) = queue.pop() {
            let px = img[pos(x)].clone().unwrap();
            for (t, &s) in gens.iter().enumerate() {
                let y = group.mul(x, s);
                let py = compose_perm(&px, &perms[choice[t]]);
                match &img[pos(y)] {
                    Some(q) if *q != py => ok = false,
                    Some(_) => {}
                    None => {
                        img[pos(y)] = Some(py);
                        queue.push(y);
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            out.push(img.into_iter().map(Option::unwrap).collect());
        }
        let mut t = 0;
        loop {
            if t == choice.len() {
                return out;
            }
            choice[t] += 1;
            if choice[t] < perms.len() {
                break;
            }
            choice[t] = 0;
            t += 1;
        }
    }
}

fn conjugate_hom(group: &FiniteGroup, sub: usize, phi: &[Vec<usize>], g: usize, sigma: &[usize]) -> Vec<Vec<usize>> {
    let els = &group.subgroup(sub).elements;
    let si = invert_perm(sigma);
    let gi = group.inv(g);
    els.iter()
        .map(|&l| {
            let k = group.mul(group.mul(gi, l), g);
            compose_perm(&compose_perm(sigma, &phi[els.binary_search(&k).unwrap()]), &si)
        })
        .collect()
}

/// The category O(G; n), objects up to isomorphism and all morphisms between
/// the chosen representatives.
pub fn enumerate_ogn(group: &Arc<FiniteGroup>, n: usize) -> OrbitCategory {
    let perms = crate::groups::permutations(n);
    let mut objects = Vec::new();
    for class in 0..group.num_classes() {
        let sub = group.class_rep(class);
        let normalizer: Vec<usize> = group.elements().filter(|&g| group.conjugate(g, sub) == sub).collect();
        let mut seen: HashSet<Vec<Vec<usize>>> = HashSet::new();
        for phi in homs_to_symmetric(group, sub, n) {
            if seen.contains(&phi) {
                continue;
            }
            for &g in &normalizer {
                for s in &perms {
                    seen.insert(conjugate_hom(group, sub, &phi, g, s));
                }
            }
            objects.push(OrbitObject { class, sub, phi });
        }
    }
    let mut morphisms = Vec::new();
    for (a, src) in objects.iter().enumerate() {
        let l_els = &group.subgroup(src.sub).elements;
        for (b, tgt) in objects.iter().enumerate() {
            let h = group.subgroup(tgt.sub);
            let mut found: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
            for g in group.elements() {
                let gi = group.inv(g);
                if !l_els.iter().all(|&l| h.contains(group.mul(group.mul(gi, l), g))) {
                    continue;
                }
                for s in &perms {
                    let si = invert_perm(s);
                    let ok = l_els.iter().enumerate().all(|(t, &l)| {
                        let k = group.mul(group.mul(gi, l), g);
                        let pk = &tgt.phi[h.elements.binary_search(&k).unwrap()];
                        src.phi[t] == compose_perm(&compose_perm(s, pk), &si)
                    });
                    if !ok {
                        continue;
                    }
                    let key = h
                        .elements
                        .iter()
                        .enumerate()
                        .map(|(t, &x)| (group.mul(g, x), compose_perm(s, &tgt.phi[t])))
                        .min()
                        .unwrap();
                    found.insert(key);
                }
            }
            for (g, sigma) in found {
                morphisms.push(OrbitMorphism { source: a, target: b, g, sigma });
            }
        }
    }
    OrbitCategory { degree: n, objects, morphisms }
}

/// U = G ×_H {0..n} through φ, with [k, j] at c·n + j for k in coset c.
fn twisted_set(group: &Arc<FiniteGroup>, ob: &OrbitObject, n: usize) -> GSet {
    let cos = group.cosets(ob.sub);
    let els = group.subgroup(ob.sub).elements.clone();
    GSet::from_fn(group.clone(), cos.reps.len() * n, |g, p| {
        let (c, j) = (p / n, p % n);
        let gr = group.mul(g, cos.reps[c]);
        let c2 = cos.coset_of[gr];
        let h = group.mul(group.inv(cos.reps[c2]), gr);
        c2 * n + ob.phi[els.binary_search(&h).unwrap()][j]
    })
}

/// colim over O(G; n) of Ind_H^G (Res_H^G M)^{⊗φ}, evaluated at X.
pub fn extended_power_colimit(m: &Arc<MackeyFunctor>, x: &GSet, n: usize) -> FgAb {
    let group = m.group().clone();
    let cat = enumerate_ogn(&group, n);
    struct Node {
        u: GSet,
        xo: GSet,
        xv: GMap,
        engine: Arc<crate::norm_power::PushForward>,
        level: Arc<crate::norm_power::PairLevel>,
    }
    let nodes: Vec<Node> = cat
        .objects
        .iter()
        .map(|ob| {
            let u = twisted_set(&group, ob, n);
            let orbit = GSet::orbit(&group, ob.sub);
            let i = GMap::new_unchecked(u.clone(), orbit.clone(), (0..u.size()).map(|p| p / n.max(1)).collect());
            let bgt = BGTMackeyFunctor::constant(&u, m);
            let covers: Vec<Cover> = bgt.components.iter().map(|c| Cover::of(c)).collect();
            let engine = crate::norm_power::pushforward_engine(&i, bgt, &covers).expect("constant coefficients");
            let xo = x.product(&orbit);
            let xv = x.proj2(&orbit);
            let level = engine.level(&xo, &xv);
            Node { u, xo, xv, engine, level }
        })
        .collect();
    let mut offsets = vec![0];
    for nd in &nodes {
        offsets.push(offsets.last().unwrap() + nd.level.gens.len());
    }
    let total = *offsets.last().unwrap();
    let mut rows = Vec::new();
    for f in &cat.morphisms {
        let (a, b) = (&nodes[f.source], &nodes[f.target]);
        let (ob_b, sub_a) = (&cat.objects[f.target], cat.objects[f.source].sub);
        let cos_a = group.cosets(sub_a);
        let cos_b = group.cosets(ob_b.sub);
        let els_b = &group.subgroup(ob_b.sub).elements;
        let si = invert_perm(&f.sigma);
        let q: Vec<usize> = cos_a.reps.iter().map(|&k| cos_b.coset_of[group.mul(k, f.g)]).collect();
        let p_map = |u: usize| {
            let (c, j) = (u / n, u % n);
            let kg = group.mul(cos_a.reps[c], f.g);
            let c2 = cos_b.coset_of[kg];
            let h = group.mul(group.inv(cos_b.reps[c2]), kg);
            c2 * n + ob_b.phi[els_b.binary_search(&h).unwrap()][si[j]]
        };
        let above: HashMap<(usize, usize), usize> = (0..a.u.size()).map(|u| ((u / n, p_map(u)), u)).collect();
        let (ma, mb) = (q.len(), cos_b.reps.len());
        for (k, key) in a.level.gens.iter().enumerate() {
            let pair = a.engine.materialize(key, &a.xo, &a.xv);
            let d = a.engine.fiber_product(&pair.y, &pair.j, &a.xv);
            let coeff = a.engine.pair_element(&pair, &a.xv);
            let (to, _) = crate::norm_power::constant_value_maps(m, &a.u, &d.p2);
            let val = to.apply(&coeff);
            let j2: Vec<usize> = pair.j.iter().map(|&t| (t / ma) * mb + q[t % ma]).collect();
            let d2 = b.engine.fiber_product(&pair.y, &j2, &b.xv);
            let d_index: HashMap<(usize, usize), usize> = d.pairs.iter().enumerate().map(|(t, &pr)| (pr, t)).collect();
            let psi: Vec<usize> = d2
                .pairs
                .iter()
                .map(|&(y, ub)| d_index[&(y, above[&(pair.j[y] % ma, ub)])])
                .collect();
            let psi = GMap::new_unchecked(d2.set.clone(), d.set.clone(), psi);
            let val2 = m.apply_restriction(&psi, &val);
            let (_, from) = crate::norm_power::constant_value_maps(m, &b.u, &d2.p2);
            let combo = b.engine.element(&pair.y, &j2, &b.xv, &from.apply(&val2));
            let image = b.level.vector(&combo);
            let mut row = zero_vec(total);
            row[offsets[f.source] + k] += 1;
            for (t, c) in image.into_iter().enumerate() {
                row[offsets[f.target] + t] -= c;
            }
            rows.push(row);
        }
    }
    let parts: Vec<&FgAb> = nodes.iter().map(|nd| nd.level.value.as_ref()).collect();
    FgAb::direct_sum(&parts).quotient(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::cyclic_group;
    use crate::mackey::{burnside_mackey, fixedpoint_mackey, ZModule};

    fn c2() -> Arc<FiniteGroup> {
        Arc::new(cyclic_group(2))
    }

    #[test]
    fn sym2_burnside_c2_point() {
        let g = c2();
        let ft = Arc::new(FreeTambara::new(&Arc::new(burnside_mackey(&g))));
        let l = ft.level(&GSet::point(&g), 2);
        assert_eq!(l.gens.len(), 3);
        assert!(l.value.is_free());
        let phi = phi_free_tambara(&ft, 2).unwrap();
        assert_eq!(phi.algebra.value.free_rank(), 2);
        assert!(phi.check().passed());
    }

    #[test]
    fn endpoints_fixed_point_z() {
        let g = c2();
        let m = Arc::new(fixedpoint_mackey(&ZModule::trivial(&g, 1)));
        let ft = FreeTambara::new(&m);
        for c in 0..g.num_classes() {
            let x = GSet::orbit(&g, g.class_rep(c));
            assert!(t0_comparison(&ft, &x).unwrap().is_isomorphism().unwrap());
            assert!(t1_comparison(&ft, &x).unwrap().is_isomorphism().unwrap());
        }
    }

    #[test]
    fn trivial_group_powers_of_z() {
        let g = Arc::new(cyclic_group(1));
        let m = Arc::new(fixedpoint_mackey(&ZModule::trivial(&g, 1)));
        let ft = FreeTambara::new(&m);
        for n in 0..4 {
            let v = ft.level(&GSet::point(&g), n).value.clone();
            assert_eq!((v.free_rank(), v.invariant_factors().len()), (1, 0), "n = {n}");
        }
    }
}
