use std::sync::Arc;

use mackey::groups::{catalog_group, FiniteGroup};
use mackey::gsets::{GMap, GSet};
use mackey::mackey::{
    burnside_mackey, check_mackey_axioms, fixedpoint_mackey, mackey_restriction, representable_mackey, BGTMackeyFunctor, Cover,
    MackeyFunctor, ZModule,
};
use mackey::norm_power::{
    empty_power_comparison, induced_free_tambara, mu_power, mult_pushforward_level, norm_engine, norm_level, norm_mackey,
    point_power_comparison, power_engine, power_engine_with, power_mackey, shifted_free_tambara, theta_norm, theta_power,
    PowerComposite,
};
use proptest::prelude::*;

fn levels(m: &MackeyFunctor) -> Vec<String> {
    (0..m.group().num_classes()).map(|c| m.level(c).describe()).collect()
}

fn free(g: &Arc<FiniteGroup>) -> Arc<MackeyFunctor> {
    Arc::new(representable_mackey(&GSet::orbit(g, g.trivial_subgroup())))
}

#[test]
fn powers_of_the_free_functor() {
    let c2 = catalog_group("C2").unwrap();
    assert_eq!(levels(&power_mackey(&GSet::trivial(&c2, 2), &free(&c2))), ["Z^4", "Z^2"]);
    assert_eq!(levels(&power_mackey(&GSet::orbit(&c2, 0), &free(&c2))), ["Z^4", "Z^5"]);
    let c3 = catalog_group("C3").unwrap();
    assert_eq!(levels(&power_mackey(&GSet::orbit(&c3, 0), &free(&c3))), ["Z^27", "Z^14"]);
    assert_eq!(levels(&power_mackey(&GSet::trivial(&c3, 2), &free(&c3))), ["Z^9", "Z^3"]);
    let s3 = catalog_group("S3").unwrap();
    assert_eq!(levels(&power_mackey(&GSet::trivial(&s3, 2), &free(&s3))), ["Z^36", "Z^18", "Z^12", "Z^6"]);
}

#[test]
fn norms_from_the_trivial_subgroup() {
    let expect: [(&str, Vec<&str>); 3] =
        [("C2", vec!["Z^4", "Z^5"]), ("C3", vec!["Z^8", "Z^6"]), ("S3", vec!["Z^64", "Z^44", "Z^28", "Z^29"])];
    for (name, want) in expect {
        let g = catalog_group(name).unwrap();
        let (h, _) = g.subgroup_group(g.trivial_subgroup());
        let two = Arc::new(representable_mackey(&GSet::trivial(&h, 2)));
        let n = norm_mackey(&g, g.trivial_subgroup(), &two).unwrap();
        assert_eq!(levels(&n), want, "{}", name);
        assert!(check_mackey_axioms(&n, 2).passed());
    }
}

#[test]
fn norm_of_restriction_is_a_power() {
    for name in ["C2", "C3", "S3"] {
        let g = catalog_group(name).unwrap();
        let a = Arc::new(burnside_mackey(&g));
        for c in 0..g.num_classes() {
            let sub = g.class_rep(c);
            if g.index_of(sub) > 3 {
                continue;
            }
            let n = norm_mackey(&g, sub, &Arc::new(mackey_restriction(&a, sub))).unwrap();
            assert_eq!(levels(&n), levels(&power_mackey(&GSet::orbit(&g, sub), &a)), "{} class {}", name, c);
        }
    }
}

#[test]
fn norms_compose() {
    let g = catalog_group("C4").unwrap();
    let mid = g.class_rep(1);
    let (k, _) = g.subgroup_group(mid);
    let (e, _) = k.subgroup_group(k.trivial_subgroup());
    let expect = [vec!["Z", "Z^2", "Z^3"], vec!["Z^16", "Z^14", "Z^11"]];
    for (m, want) in [Arc::new(burnside_mackey(&e)), Arc::new(representable_mackey(&GSet::trivial(&e, 2)))].into_iter().zip(expect) {
        let inner = Arc::new(norm_mackey(&k, k.trivial_subgroup(), &m).unwrap());
        let twice = norm_mackey(&g, mid, &inner).unwrap();
        let once = norm_mackey(&g, g.trivial_subgroup(), &m).unwrap();
        assert_eq!(levels(&twice), want);
        assert_eq!(levels(&once), want);
    }
}

#[test]
fn powers_of_norms_are_norms_of_powers() {
    let g = catalog_group("C2").unwrap();
    let (h, _) = g.subgroup_group(0);
    let t = GSet::orbit(&g, 0);
    let expect = [vec!["Z", "Z^2"], vec!["Z^16", "Z^14"]];
    for (m, want) in [Arc::new(burnside_mackey(&h)), Arc::new(representable_mackey(&GSet::trivial(&h, 2)))].into_iter().zip(expect) {
        let lhs = power_mackey(&t, &Arc::new(norm_mackey(&g, 0, &m).unwrap()));
        let rhs = norm_mackey(&g, 0, &Arc::new(power_mackey(&t.restrict(0), &m))).unwrap();
        assert_eq!(levels(&lhs), want);
        assert_eq!(levels(&rhs), want);
    }
}

#[test]
fn pushforward_along_simple_maps() {
    let g = catalog_group("C2").unwrap();
    let pt = GSet::point(&g);
    let a = Arc::new(burnside_mackey(&g));
    let (h, _) = g.subgroup_group(0);
    let u = GSet::orbit(&g, 0);
    for x in [GSet::point(&g), GSet::orbit(&g, 0)] {
        let xv = GMap::to_point(&x);
        let id = mult_pushforward_level(&GMap::identity(&pt), &BGTMackeyFunctor::constant(&pt, &a), &x, &xv).unwrap();
        assert!(id.isomorphic(&a.value(&x)));
        let empty = BGTMackeyFunctor::new(&GSet::empty(&g), vec![]).unwrap();
        let e = mult_pushforward_level(&GMap::from_empty(&pt), &empty, &x, &xv).unwrap();
        assert!(e.isomorphic(&a.value(&x)));
        let along = mult_pushforward_level(&GMap::to_point(&u), &BGTMackeyFunctor::constant(&u, &a), &x, &xv).unwrap();
        let n = norm_level(&g, 0, &Arc::new(burnside_mackey(&h)), &x).unwrap();
        assert!(along.isomorphic(&n));
    }
}

#[test]
fn comparison_maps_are_isomorphisms() {
    for name in ["C2", "C3"] {
        let g = catalog_group(name).unwrap();
        for m in [Arc::new(burnside_mackey(&g)), free(&g), Arc::new(fixedpoint_mackey(&ZModule::trivial(&g, 1)))] {
            for x in [GSet::point(&g), GSet::orbit(&g, 0)] {
                let e0 = power_engine(&GSet::empty(&g), &m);
                assert!(empty_power_comparison(&e0, &x).unwrap().is_isomorphism().unwrap());
                let p1 = power_engine(&GSet::point(&g), &m);
                assert!(point_power_comparison(&p1, &m, &x).unwrap().is_isomorphism().unwrap());
            }
            for t in [GSet::trivial(&g, 2), GSet::orbit(&g, 0)] {
                assert!(mu_power(&power_engine(&t, &m), &m, &t).unwrap().is_isomorphism().unwrap());
            }
        }
    }
}

#[test]
fn theta_maps_are_injective() {
    for name in ["C2", "S3"] {
        let g = catalog_group(name).unwrap();
        for m in [Arc::new(burnside_mackey(&g)), Arc::new(fixedpoint_mackey(&ZModule::trivial(&g, 1)))] {
            for t in [GSet::point(&g), GSet::trivial(&g, 2)] {
                let cover = Cover::of(&m);
                let ft = shifted_free_tambara(&m, &cover, &t);
                let e = power_engine_with(&t, &m, cover);
                for x in [GSet::point(&g), GSet::orbit(&g, 0)] {
                    assert!(theta_power(&e, &ft, &t, &x).unwrap().is_injective(), "{} |T|={}", name, t.size());
                }
            }
        }
        for c in 0..g.num_classes() {
            let sub = g.class_rep(c);
            if g.index_of(sub) > 3 {
                continue;
            }
            let (h, _) = g.subgroup_group(sub);
            let m = Arc::new(burnside_mackey(&h));
            let e = norm_engine(&g, sub, &m).unwrap();
            let ft = induced_free_tambara(&g, sub, &m);
            assert!(theta_norm(&e, sub, &m, &ft, &GSet::point(&g)).unwrap().is_injective(), "{} class {}", name, c);
        }
    }
}

#[test]
fn powers_compose() {
    let g = catalog_group("C2").unwrap();
    for m in [Arc::new(burnside_mackey(&g)), free(&g)] {
        let comp = PowerComposite::new(&GSet::orbit(&g, 0), &GSet::trivial(&g, 2), &m).unwrap();
        for x in [GSet::point(&g), GSet::orbit(&g, 0)] {
            assert!(comp.hom(&x).unwrap().is_isomorphism().unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    // F(T, [-, Z]) is represented by the G-set of functions T → Z.
    #[test]
    fn powers_of_representables(gi in 0usize..2, t in prop::collection::vec(0usize..2, 0..3), z in prop::collection::vec(0usize..2, 1..3)) {
        let g = catalog_group(["C2", "C3"][gi]).unwrap();
        let (tt, zz) = (GSet::from_orbit_classes(&g, &t), GSet::from_orbit_classes(&g, &z));
        if zz.size().pow(tt.size() as u32) > 27 {
            return Ok(());
        }
        let f = power_mackey(&tt, &Arc::new(representable_mackey(&zz)));
        prop_assert_eq!(levels(&f), levels(&representable_mackey(&GSet::power_set(&zz, &tt))));
    }
}
