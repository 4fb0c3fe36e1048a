use std::sync::Arc;

use mackey::free_tambara::{enumerate_ogn, extended_power_colimit, phi_free_tambara, sym_power_level, sym_power_mackey, FreeTambara};
use mackey::groups::catalog_group;
use mackey::gsets::{gsets_up_to, GSet};
use mackey::mackey::{burnside_mackey, check_mackey_axioms, fixedpoint_mackey, representable_mackey, MackeyFunctor, ZModule};
use proptest::prelude::*;

fn functor(name: &str, which: &str) -> Arc<MackeyFunctor> {
    let g = catalog_group(name).unwrap();
    Arc::new(match which {
        "A" => burnside_mackey(&g),
        "free" => representable_mackey(&GSet::orbit(&g, g.trivial_subgroup())),
        "Z" => fixedpoint_mackey(&ZModule::trivial(&g, 1)),
        _ => unreachable!(),
    })
}

fn levels(m: &Arc<MackeyFunctor>, n: usize) -> Vec<String> {
    let g = m.group().clone();
    (0..g.num_classes()).map(|c| sym_power_level(m, &GSet::orbit(&g, g.class_rep(c)), n).value.describe()).collect()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

// Values below agree with the orbit-category colimit and with the
// geometric fixed point count.
#[test]
fn symmetric_powers_over_c2() {
    let expect: [(&str, usize, [&str; 2]); 7] = [
        ("A", 2, ["Z", "Z^3"]),
        ("A", 3, ["Z", "Z^3"]),
        ("free", 2, ["Z^3", "Z^3"]),
        ("free", 3, ["Z^4", "Z^2"]),
        ("Z", 1, ["Z", "Z"]),
        ("Z", 2, ["Z", "Z^2"]),
        ("Z", 3, ["Z", "Z/2 + Z"]),
    ];
    for (which, n, want) in expect {
        assert_eq!(levels(&functor("C2", which), n), want, "{} degree {}", which, n);
    }
}

#[test]
fn symmetric_powers_over_c3_and_s3() {
    assert_eq!(levels(&functor("C3", "free"), 3), ["Z^10", "Z^5"]);
    assert_eq!(levels(&functor("C3", "Z"), 3), ["Z", "Z^2"]);
    assert_eq!(levels(&functor("S3", "A"), 2), ["Z", "Z^3", "Z^2", "Z^6"]);
    assert_eq!(levels(&functor("S3", "Z"), 2), ["Z", "Z^2", "Z", "Z/3 + Z^2"]);
}

#[test]
fn geometric_fixed_points_with_torsion() {
    let expect = [(1, "Z/2"), (2, "Z/2 + Z"), (3, "Z/2 + Z/2")];
    let ft = Arc::new(FreeTambara::new(&functor("C2", "Z")));
    for (n, want) in expect {
        let cmp = phi_free_tambara(&ft, n).unwrap();
        assert_eq!(cmp.fixed_points.value.describe(), want);
        assert!(cmp.check().passed());
    }
}

#[test]
fn colimit_over_s3() {
    for which in ["A", "Z"] {
        let m = functor("S3", which);
        let g = m.group().clone();
        for c in 0..g.num_classes() {
            let x = GSet::orbit(&g, g.class_rep(c));
            let a = sym_power_level(&m, &x, 2);
            assert!(a.value.isomorphic(&extended_power_colimit(&m, &x, 2)), "{} at class {}", which, c);
        }
    }
}

#[test]
fn symmetric_powers_are_mackey_functors() {
    for which in ["A", "free", "Z"] {
        let ft = Arc::new(FreeTambara::new(&functor("C2", which)));
        for n in 0..=3 {
            let rep = check_mackey_axioms(&sym_power_mackey(&ft, n), 3);
            assert!(rep.passed(), "{} degree {}: {:?}", which, n, rep.first_failure());
        }
    }
}

/// For abelian G, objects of O(G; n) are pairs (H, isomorphism class of an
/// H-set of size n), since conjugation acts trivially.
#[test]
fn orbit_category_object_counts() {
    for name in ["C1", "C2", "C3", "C4", "V4"] {
        let g = catalog_group(name).unwrap();
        for n in 0..=3 {
            let expect: usize = (0..g.num_classes())
                .map(|c| {
                    let (h, _) = g.subgroup_group(g.class_rep(c));
                    gsets_up_to(&h, n).iter().filter(|t| t.size() == n).count()
                })
                .sum();
            assert_eq!(enumerate_ogn(&g, n).objects.len(), expect, "{} n={}", name, n);
        }
    }
}

#[test]
fn orbit_category_has_identities() {
    for name in ["C2", "S3"] {
        let g = catalog_group(name).unwrap();
        for n in 0..=2 {
            let cat = enumerate_ogn(&g, n);
            for a in 0..cat.objects.len() {
                let id: Vec<usize> = (0..n).collect();
                let ends: Vec<_> = cat.morphisms.iter().filter(|f| f.source == a && f.target == a).collect();
                assert!(ends.iter().any(|f| f.sigma == id || g.subgroup(cat.objects[a].sub).contains(f.g)), "{} n={} object {}", name, n, a);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // Over the trivial orbit Sym_n is the ordinary symmetric power of Z^r.
    #[test]
    fn bottom_level_is_a_classical_symmetric_power(gi in 0usize..3, which in 0usize..3, n in 0usize..3) {
        let name = ["C2", "C3", "S3"][gi];
        let m = functor(name, ["A", "free", "Z"][which]);
        let g = m.group().clone();
        let r = m.level(0).free_rank();
        let v = sym_power_level(&m, &GSet::orbit(&g, g.trivial_subgroup()), n);
        prop_assert!(v.value.is_free());
        prop_assert_eq!(v.value.free_rank(), binomial(n + r - 1, n));
    }
}
