use std::sync::Arc;

use mackey::groups::{catalog_group, FiniteGroup};
use mackey::gsets::{
    exponential_diagram, hom_set, is_exponential, pentagon_pasting_holds, pullback,
    pullback_stability_holds, rectangle_pasting_holds, GMap, GSet,
};
use proptest::prelude::*;

const GROUPS: &[&str] = &["C2", "C3", "C4", "V4", "S3"];

fn set_from(g: &Arc<FiniteGroup>, picks: &[usize]) -> GSet {
    let classes: Vec<usize> = picks.iter().map(|p| p % g.num_classes()).collect();
    GSet::from_orbit_classes(g, &classes)
}

/// A small G-set of each shape, restricted to sizes a brute-force oracle can handle.
fn small_set(g: &Arc<FiniteGroup>, picks: &[usize], max: usize) -> GSet {
    let mut picks = picks.to_vec();
    loop {
        let x = set_from(g, &picks);
        if x.size() <= max || picks.len() <= 1 {
            return x;
        }
        picks.pop();
    }
}

fn pick_map(x: &GSet, y: &GSet, k: usize) -> Option<GMap> {
    let homs = hom_set(x, y);
    (!homs.is_empty()).then(|| homs[k % homs.len()].clone())
}

fn fixed_point_count(y: &GSet, sub: usize) -> usize {
    let els = &y.group().subgroup(sub).elements;
    (0..y.size()).filter(|&p| els.iter().all(|&h| y.act(h, p) == p)).count()
}

#[test]
fn exponential_is_rejected_when_corrupted() {
    let g = catalog_group("C2").unwrap();
    let x = GSet::orbit(&g, 0).multiple(2);
    let y = GSet::orbit(&g, 0);
    let pt = GSet::point(&g);
    let i = hom_set(&x, &y)[0].clone();
    let j = GMap::to_point(&y);
    let ed = exponential_diagram(&i, &j).unwrap();
    assert!(is_exponential(&i, &j, &ed.e, &ed.top, &ed.p).unwrap().is_some());
    // Doubling Π gives a square that is a pullback in the wrong way.
    let pi2 = ed.pi.sum(&ed.pi);
    let p2 = GMap::copair(&[ed.p.clone(), ed.p.clone()], &pt);
    let e2 = GMap::copair(&[ed.e.clone(), ed.e.clone()], &x);
    let top2 = GMap::coproduct(&[ed.top.clone(), ed.top.clone()], &g);
    assert_eq!(top2.target.size(), pi2.size());
    assert!(is_exponential(&i, &j, &e2, &top2, &p2).unwrap().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn maps_from_an_orbit_are_fixed_points(gi in 0..GROUPS.len(), c in 0usize..4, picks in prop::collection::vec(0usize..4, 1..4)) {
        let g = catalog_group(GROUPS[gi]).unwrap();
        let sub = g.class_rep(c % g.num_classes());
        let y = small_set(&g, &picks, 12);
        let x = GSet::orbit(&g, sub);
        prop_assert_eq!(hom_set(&x, &y).len(), fixed_point_count(&y, sub));
    }

    #[test]
    fn pullback_counts_fiber_pairs(gi in 0..GROUPS.len(), a in prop::collection::vec(0usize..4, 1..3), b in prop::collection::vec(0usize..4, 1..3), z in prop::collection::vec(0usize..4, 1..3), k1 in 0usize..50, k2 in 0usize..50) {
        let g = catalog_group(GROUPS[gi]).unwrap();
        let (x, y, zz) = (small_set(&g, &a, 8), small_set(&g, &b, 8), small_set(&g, &z, 6));
        if let (Some(f), Some(h)) = (pick_map(&x, &zz, k1), pick_map(&y, &zz, k2)) {
            let pb = pullback(&f, &h).unwrap();
            let brute: usize = (0..zz.size())
                .map(|t| (0..x.size()).filter(|&p| f.apply(p) == t).count() * (0..y.size()).filter(|&q| h.apply(q) == t).count())
                .sum();
            prop_assert_eq!(pb.set.size(), brute);
            for p in 0..pb.set.size() {
                prop_assert_eq!(f.apply(pb.p1.apply(p)), h.apply(pb.p2.apply(p)));
            }
            prop_assert!(pb.p1.check_equivariant().is_ok() && pb.p2.check_equivariant().is_ok());
        }
    }

    #[test]
    fn exponential_counts_sections(gi in 0..GROUPS.len(), a in prop::collection::vec(0usize..4, 1..3), b in prop::collection::vec(0usize..4, 1..3), z in prop::collection::vec(0usize..4, 1..2), k1 in 0usize..50, k2 in 0usize..50) {
        let g = catalog_group(GROUPS[gi]).unwrap();
        let (x, y, zz) = (small_set(&g, &a, 6), small_set(&g, &b, 6), small_set(&g, &z, 6));
        if let (Some(i), Some(j)) = (pick_map(&x, &y, k1), pick_map(&y, &zz, k2)) {
            let ed = exponential_diagram(&i, &j).unwrap();
            let expect: usize = (0..zz.size())
                .map(|t| (0..y.size()).filter(|&q| j.apply(q) == t).map(|q| (0..x.size()).filter(|&p| i.apply(p) == q).count()).product::<usize>())
                .sum();
            prop_assert_eq!(ed.pi.size(), expect);
            prop_assert!(is_exponential(&i, &j, &ed.e, &ed.top, &ed.p).unwrap().is_some());
        }
    }

    #[test]
    fn exponential_lemmas_on_random_chains(gi in 0..GROUPS.len(), sets in prop::collection::vec(prop::collection::vec(0usize..4, 1..3), 4), ks in prop::collection::vec(0usize..100, 3)) {
        let g = catalog_group(GROUPS[gi]).unwrap();
        let s: Vec<GSet> = sets.iter().map(|p| small_set(&g, p, 4)).collect();
        if let (Some(i), Some(j), Some(k)) = (pick_map(&s[0], &s[1], ks[0]), pick_map(&s[1], &s[2], ks[1]), pick_map(&s[3], &s[2], ks[2])) {
            prop_assert!(pullback_stability_holds(&i, &j, &k).unwrap());
        }
        if let (Some(i), Some(j), Some(k)) = (pick_map(&s[0], &s[1], ks[0]), pick_map(&s[1], &s[2], ks[1]), pick_map(&s[2], &s[3], ks[2])) {
            prop_assert!(pentagon_pasting_holds(&i, &j, &k).unwrap());
            prop_assert!(rectangle_pasting_holds(&i, &j, &k).unwrap());
        }
    }

    #[test]
    fn norm_fixed_points_are_subgroup_fixed_points(gi in 0..GROUPS.len(), c in 0usize..4, picks in prop::collection::vec(0usize..4, 1..3)) {
        let g = catalog_group(GROUPS[gi]).unwrap();
        let sub = g.class_rep(c % g.num_classes());
        if g.index_of(sub) > 3 {
            return Ok(());
        }
        let (h, _) = g.subgroup_group(sub);
        let t = small_set(&h, &picks, 3);
        let n = GSet::norm_set(&g, sub, &t);
        prop_assert_eq!(fixed_point_count(&n, g.whole_group()), fixed_point_count(&t, h.whole_group()));
        prop_assert_eq!(n.size(), t.size().pow(g.index_of(sub) as u32));
    }

    #[test]
    fn products_and_sums_have_expected_sizes(gi in 0..GROUPS.len(), a in prop::collection::vec(0usize..4, 1..3), b in prop::collection::vec(0usize..4, 1..3)) {
        let g = catalog_group(GROUPS[gi]).unwrap();
        let (x, y) = (small_set(&g, &a, 8), small_set(&g, &b, 8));
        let p = x.product(&y);
        prop_assert_eq!(p.size(), x.size() * y.size());
        prop_assert!(p.validate().is_ok());
        prop_assert_eq!(x.sum(&y).orbits().len(), x.orbits().len() + y.orbits().len());
        for c in 0..g.num_classes() {
            let sub = g.class_rep(c);
            prop_assert_eq!(fixed_point_count(&p, sub), fixed_point_count(&x, sub) * fixed_point_count(&y, sub));
        }
    }
}
