use std::sync::Arc;

use mackey::abelian::{int, unit_vec, FgAb, Int};
use mackey::groups::{catalog_group, FiniteGroup};
use mackey::gsets::{hom_set, GMap, GSet};
use mackey::mackey::{
    burnside_mackey, check_mackey_axioms, fixedpoint_mackey, geometric_fixed_points, mackey_induction, mackey_restriction,
    representable_mackey, MackeyFunctor, ZModule,
};
use mackey::tambara::burnside_tambara;
use proptest::prelude::*;

const GROUPS: &[&str] = &["C2", "C3", "C4", "V4", "S3", "D8", "Q8"];

fn group(gi: usize) -> Arc<FiniteGroup> {
    catalog_group(GROUPS[gi % GROUPS.len()]).unwrap()
}

fn set_from(g: &Arc<FiniteGroup>, picks: &[usize]) -> GSet {
    let classes: Vec<usize> = picks.iter().map(|p| p % g.num_classes()).collect();
    GSet::from_orbit_classes(g, &classes)
}

/// Number of H-orbits of a G-set, counted directly from the action.
fn orbit_count(x: &GSet, sub: usize) -> usize {
    let els = &x.group().subgroup(sub).elements;
    let mut seen = vec![false; x.size()];
    let mut count = 0;
    for p in 0..x.size() {
        if !seen[p] {
            count += 1;
            for &h in els {
                seen[x.act(h, p)] = true;
            }
        }
    }
    count
}

#[test]
fn burnside_levels_count_subgroup_classes() {
    for gi in 0..GROUPS.len() {
        let g = group(gi);
        let a = burnside_mackey(&g);
        for c in 0..g.num_classes() {
            let (h, _) = g.subgroup_group(g.class_rep(c));
            assert!(a.level(c).is_free());
            assert_eq!(a.level(c).free_rank(), h.num_classes(), "{} class {}", GROUPS[gi], c);
        }
    }
}

#[test]
fn burnside_ring_of_c2_multiplies_like_sets() {
    let g = catalog_group("C2").unwrap();
    let a = burnside_mackey(&g);
    let free = GSet::orbit(&g, 0);
    let pt = GSet::point(&g);
    // [C2/e] = tr(1); tr(1)·tr(1) = tr(res tr(1)) and res tr(1) = 2 at C2/e.
    let one_free = unit_vec(1, 0);
    let to_pt = GMap::to_point(&free);
    let tr = a.apply_transfer(&to_pt, &one_free);
    let back = a.apply_restriction(&to_pt, &tr);
    assert_eq!(back, vec![int(2)]);
    assert_eq!(a.value(&pt).free_rank(), 2);
}

#[test]
fn fixed_point_functors() {
    for gi in 0..GROUPS.len() {
        let g = group(gi);
        let z = fixedpoint_mackey(&ZModule::trivial(&g, 1));
        let reg = fixedpoint_mackey(&ZModule::permutation(&GSet::orbit(&g, g.trivial_subgroup())));
        for c in 0..g.num_classes() {
            let sub = g.class_rep(c);
            assert_eq!(z.level(c).free_rank(), 1);
            assert_eq!(reg.level(c).free_rank(), g.index_of(g.trivial_subgroup()) / g.subgroup(sub).order());
        }
    }
}

#[test]
fn geometric_fixed_points_of_burnside_are_z() {
    for gi in 0..GROUPS.len() {
        let g = group(gi);
        let a = burnside_mackey(&g);
        for c in 0..g.num_classes() {
            let phi = geometric_fixed_points(&a, c);
            assert!(phi.value.isomorphic(&FgAb::free(1)), "{} class {}", GROUPS[gi], c);
        }
    }
}

#[test]
fn geometric_fixed_points_of_z_over_c2() {
    let g = catalog_group("C2").unwrap();
    let z = fixedpoint_mackey(&ZModule::trivial(&g, 1));
    assert_eq!(geometric_fixed_points(&z, 1).value.describe(), "Z/2");
    assert_eq!(geometric_fixed_points(&z, 0).value.describe(), "Z");
}

#[test]
fn induction_and_restriction_levels() {
    let g = catalog_group("S3").unwrap();
    let a = Arc::new(burnside_mackey(&g));
    for c in 0..g.num_classes() {
        let sub = g.class_rep(c);
        let (h, _) = g.subgroup_group(sub);
        let res = mackey_restriction(&a, sub);
        for k in 0..h.num_classes() {
            let (kk, _) = h.subgroup_group(h.class_rep(k));
            assert_eq!(res.level(k).free_rank(), kk.num_classes());
        }
        // Ind_H^G A_H (G/K) = A_H(Res_H G/K) = A(G/H × G/K).
        let ind = mackey_induction(&g, sub, &Arc::new(burnside_mackey(&h)));
        for k in 0..g.num_classes() {
            let prod = GSet::orbit(&g, sub).product(&GSet::orbit(&g, g.class_rep(k)));
            assert_eq!(ind.level(k).free_rank(), a.value(&prod).free_rank());
        }
        assert!(check_mackey_axioms(&ind, 3).passed());
    }
}

fn examples(g: &Arc<FiniteGroup>, t: &GSet) -> Vec<MackeyFunctor> {
    vec![burnside_mackey(g), representable_mackey(t), fixedpoint_mackey(&ZModule::permutation(t))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn representable_levels_count_orbits(gi in 0usize..7, picks in prop::collection::vec(0usize..6, 1..3)) {
        let g = group(gi);
        let t = set_from(&g, &picks);
        let m = representable_mackey(&t);
        for c in 0..g.num_classes() {
            let sub = g.class_rep(c);
            let x = GSet::orbit(&g, sub).product(&t);
            // One generator per orbit G/K of G/H × T and class of subgroups of K.
            let expect: usize = x.orbits().iter().map(|o| g.subgroup_group(o.sub).0.num_classes()).sum();
            prop_assert_eq!(m.level(c).free_rank(), expect);
            prop_assert!(m.level(c).is_free());
        }
        prop_assert_eq!(orbit_count(&t, g.whole_group()), t.orbits().len());
    }

    #[test]
    fn values_are_additive(gi in 0usize..7, a in prop::collection::vec(0usize..6, 1..3), b in prop::collection::vec(0usize..6, 1..3), t in prop::collection::vec(0usize..6, 1..2)) {
        let g = group(gi);
        let (x, y, tt) = (set_from(&g, &a), set_from(&g, &b), set_from(&g, &t));
        for m in examples(&g, &tt) {
            let (vx, vy, vs) = (m.value(&x), m.value(&y), m.value(&x.sum(&y)));
            prop_assert_eq!(vs.free_rank(), vx.free_rank() + vy.free_rank());
            prop_assert_eq!(vs.invariant_factors().len(), vx.invariant_factors().len() + vy.invariant_factors().len());
        }
    }

    #[test]
    fn transfer_then_restriction_along_orbit_maps(gi in 0usize..5, c1 in 0usize..6, c2 in 0usize..6, k in 0usize..12) {
        let g = group(gi);
        let sa = g.class_rep(c1 % g.num_classes());
        let sb = g.class_rep(c2 % g.num_classes());
        let (x, y) = (GSet::orbit(&g, sa), GSet::orbit(&g, sb));
        let homs = hom_set(&x, &y);
        if homs.is_empty() {
            return Ok(());
        }
        let f = &homs[k % homs.len()];
        let a = burnside_mackey(&g);
        let one = burnside_tambara(&g).one(&x);
        let back = a.apply_restriction(f, &a.apply_transfer(f, &one));
        // |X ×_Y X| = deg(f)·|X|
        let total = a.apply_transfer(&GMap::to_point(&x), &back);
        let direct = a.apply_transfer(&GMap::to_point(&x), &one);
        prop_assert_eq!(cardinality(&a, &g, &total), cardinality(&a, &g, &direct) * int(f.degree() as i64));
    }
}

/// |X| for an element of A(pt), via the marks of the trivial subgroup.
fn cardinality(a: &MackeyFunctor, g: &Arc<FiniteGroup>, v: &[Int]) -> Int {
    let free = GSet::orbit(g, g.trivial_subgroup());
    a.apply_restriction(&GMap::to_point(&free), v)[0].clone()
}
