use std::sync::Arc;

use mackey::abelian::{int, scale_vec, Int};
use mackey::groups::{catalog_group, FiniteGroup};
use mackey::gsets::{GMap, GSet};
use mackey::mackey::MackeyFunctor;
use mackey::tambara::{
    burnside_tambara, check_tambara_axioms, monad_algebra_check, multiplicative_round_trip, multiplicative_structure,
    res_tambara, verify_multiplicative, MultPair, MuFamily, TambaraMu, UniversalAction,
};
use proptest::prelude::*;

const GROUPS: &[&str] = &["C2", "C3", "C4", "V4", "S3"];

struct Doubled(TambaraMu);

impl MuFamily for Doubled {
    fn underlying(&self) -> &Arc<MackeyFunctor> {
        self.0.underlying()
    }
    fn apply(&self, i: &GMap, p: &MultPair) -> Vec<Int> {
        scale_vec(&int(2), &self.0.apply(i, p))
    }
}

/// Transfers in place of norms.
struct Additive(Arc<MackeyFunctor>);

impl MuFamily for Additive {
    fn underlying(&self) -> &Arc<MackeyFunctor> {
        &self.0
    }
    fn apply(&self, _i: &GMap, p: &MultPair) -> Vec<Int> {
        self.0.apply_transfer(&p.d.p1.then(&p.j), &p.y)
    }
}

/// The class [X] in A(pt).
fn class_of(g: &Arc<FiniteGroup>, x: &GSet) -> Vec<Int> {
    burnside_tambara(g).transfer(&GMap::to_point(x), &burnside_tambara(g).one(x))
}

#[test]
fn multiplicative_presentation_of_burnside_c2() {
    let g = catalog_group("C2").unwrap();
    let bt = Arc::new(burnside_tambara(&g));
    let rep = verify_multiplicative(&multiplicative_structure(&bt), 4);
    assert!(rep.passed(), "{:?}", rep.first_failure());
    let counts: Vec<usize> = rep.checks.iter().map(|c| c.instances).collect();
    assert_eq!(counts, [104, 18, 141, 145, 141]);
    assert!(multiplicative_round_trip(&bt, Arc::new(multiplicative_structure(&bt)), 4).passed());
}

#[test]
fn corrupted_families_are_rejected() {
    let g = catalog_group("C2").unwrap();
    let bt = Arc::new(burnside_tambara(&g));
    let doubled = verify_multiplicative(&Doubled(multiplicative_structure(&bt)), 3);
    assert!(doubled.failed("(i) identity"));
    let additive = verify_multiplicative(&Additive(bt.underlying().clone()), 4);
    assert!(!additive.passed());
}

#[test]
fn burnside_is_an_algebra_over_the_free_monad() {
    for name in ["C2", "C3"] {
        let g = catalog_group(name).unwrap();
        let bt = Arc::new(burnside_tambara(&g));
        let rep = monad_algebra_check(Arc::new(UniversalAction::of(&bt)), 4, 3);
        assert!(rep.passed(), "{}: {:?}", name, rep.first_failure());
        assert!(rep.checks.iter().all(|c| c.instances > 0));
    }
}

#[test]
fn restrictions_are_tambara() {
    let g = catalog_group("S3").unwrap();
    let bt = Arc::new(burnside_tambara(&g));
    for c in 0..g.num_classes() {
        let r = res_tambara(&bt, g.class_rep(c));
        assert!(check_tambara_axioms(&r, 3).passed(), "class {}", c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn products_of_classes_are_classes_of_products(gi in 0..GROUPS.len(), a in prop::collection::vec(0usize..4, 1..3), b in prop::collection::vec(0usize..4, 1..3)) {
        let g = catalog_group(GROUPS[gi]).unwrap();
        let pick = |p: &[usize]| GSet::from_orbit_classes(&g, &p.iter().map(|k| k % g.num_classes()).collect::<Vec<_>>());
        let (x, y) = (pick(&a), pick(&b));
        let bt = burnside_tambara(&g);
        let pt = GSet::point(&g);
        let lhs = bt.product(&pt, &class_of(&g, &x), &class_of(&g, &y));
        prop_assert_eq!(lhs, class_of(&g, &x.product(&y)));
    }

    // The norm of k points along G/H → pt is the class of Map_H(G, k).
    #[test]
    fn norms_of_points_are_coinduced_sets(gi in 0..GROUPS.len(), c in 0usize..4, k in 0usize..4) {
        let g = catalog_group(GROUPS[gi]).unwrap();
        let sub = g.class_rep(c % g.num_classes());
        if k.pow(g.index_of(sub) as u32) > 32 {
            return Ok(());
        }
        let (h, _) = g.subgroup_group(sub);
        let bt = burnside_tambara(&g);
        let orbit = GSet::orbit(&g, sub);
        let points = scale_vec(&int(k as i64), &bt.one(&orbit));
        let lhs = bt.norm(&GMap::to_point(&orbit), &points);
        prop_assert_eq!(lhs, class_of(&g, &GSet::norm_set(&g, sub, &GSet::trivial(&h, k))));
    }
}
