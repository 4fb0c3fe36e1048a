//! Acceptance suite. Each test prints one line of the form
//! `criterion NN PASS|FAIL <name> (<seconds>s)` and fails on any mismatch.
//! All comparisons are exact: invariant factors, ranks or invertibility.

use std::sync::Arc;
use std::time::Instant;

use mackey::abelian::{int, scale_vec, add_assign, Int};
use mackey::free_tambara::{extended_power_colimit, phi_free_tambara, sym_power_level, t0_comparison, t1_comparison, FreeTambara};
use mackey::groups::{catalog_group, FiniteGroup, CATALOG};
use mackey::gsets::{check_exponential_lemmas, gsets_up_to, GMap, GSet};
use mackey::mackey::{
    builtin_examples, burnside_mackey, check_mackey_axioms, fixedpoint_mackey, mackey_restriction, representable_mackey,
    MackeyFunctor, ZModule,
};
use mackey::norm_power::{mu_norm, norm_engine, norm_mackey, power_mackey, triangle_norm, triangle_restriction, Counit, NormTambara};
use mackey::tambara::{burnside_tambara, check_tambara_axioms, multiplicative_round_trip, multiplicative_structure, verify_multiplicative};

fn report(n: usize, name: &str, start: Instant, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {:02} {} {} ({:.1}s)", n, status, name, start.elapsed().as_secs_f64());
    assert!(failures.is_empty(), "criterion {}: {}", n, failures.join("; "));
}

fn group(name: &str) -> Arc<FiniteGroup> {
    catalog_group(name).unwrap()
}

fn orbits(g: &Arc<FiniteGroup>) -> Vec<GSet> {
    (0..g.num_classes()).map(|c| GSet::orbit(g, g.class_rep(c))).collect()
}

/// Disjoint unions of at most `k` standard orbits, one per multiset of classes.
fn orbit_sums(g: &Arc<FiniteGroup>, k: usize) -> Vec<GSet> {
    fn rec(g: &Arc<FiniteGroup>, from: usize, left: usize, acc: &mut Vec<usize>, out: &mut Vec<GSet>) {
        if !acc.is_empty() {
            out.push(GSet::from_orbit_classes(g, acc));
        }
        if left == 0 {
            return;
        }
        for c in from..g.num_classes() {
            acc.push(c);
            rec(g, c, left - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(g, 0, k, &mut Vec::new(), &mut out);
    out
}

fn same_levels(a: &MackeyFunctor, b: &MackeyFunctor, xs: &[GSet]) -> Option<String> {
    xs.iter().find_map(|x| {
        let (va, vb) = (a.value(x), b.value(x));
        (va.invariant_factors() != vb.invariant_factors() || va.free_rank() != vb.free_rank())
            .then(|| format!("{} vs {} at {:?}", va.describe(), vb.describe(), x.orbit_type()))
    })
}

#[test]
fn criterion_01_exponential_lemmas() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for name in ["C2", "C3", "C4", "V4", "S3"] {
        let rep = check_exponential_lemmas(&group(name), 8);
        for c in ["pullback stability", "pentagon pasting", "rectangle pasting"] {
            if rep.checks.iter().all(|k| k.condition != c || k.instances == 0) {
                failures.push(format!("{}: no instances of {}", name, c));
            }
        }
        if let Some(f) = rep.first_failure() {
            failures.push(format!("{}: {:?}", name, f));
        }
    }
    report(1, "exponential-diagram lemmas, total size <= 8", start, &failures);
}

#[test]
fn criterion_02_grading_endpoints() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for name in ["C2", "C3"] {
        let g = group(name);
        let ms = [
            ("A", burnside_mackey(&g)),
            ("[-,G/e]", representable_mackey(&GSet::orbit(&g, g.trivial_subgroup()))),
            ("Z", fixedpoint_mackey(&ZModule::trivial(&g, 1))),
        ];
        for (label, m) in ms {
            let ft = FreeTambara::new(&Arc::new(m));
            for x in orbits(&g) {
                for (deg, hom) in [(0, t0_comparison(&ft, &x)), (1, t1_comparison(&ft, &x))] {
                    if !matches!(hom.map(|h| h.is_isomorphism()), Ok(Ok(true))) {
                        failures.push(format!("{} {} degree {} at {:?}", name, label, deg, x.orbit_type()));
                    }
                }
            }
        }
    }
    report(2, "T^0(M) = A and T^1(M) = M", start, &failures);
}

/// Number of monomials of total degree n in generators of the given degrees.
fn monomial_count(degrees: &[usize], n: usize) -> usize {
    let mut ways = vec![0usize; n + 1];
    ways[0] = 1;
    for &d in degrees {
        for k in d..=n {
            ways[k] += ways[k - d];
        }
    }
    ways[n]
}

#[test]
fn criterion_03_geometric_fixed_points() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (name, max_n) in [("C2", 4), ("S3", 2)] {
        let g = group(name);
        let a = Arc::new(burnside_mackey(&g));
        for c in 0..g.num_classes() {
            let h = g.class_rep(c);
            let (hg, _) = g.subgroup_group(h);
            let m = Arc::new(mackey_restriction(&a, h));
            // Φ^K(A) = Z with trivial Weyl action, one generator per class of K ≤ H in degree [H:K].
            let degrees: Vec<usize> = (0..hg.num_classes()).map(|k| hg.index_of(hg.class_rep(k))).collect();
            let ft = Arc::new(FreeTambara::new(&m));
            for n in 0..=max_n {
                let cmp = match phi_free_tambara(&ft, n) {
                    Ok(cmp) => cmp,
                    Err(e) => {
                        failures.push(format!("{} class {} n={}: {}", name, c, n, e));
                        continue;
                    }
                };
                let expect = monomial_count(&degrees, n);
                let got = cmp.fixed_points.value.free_rank();
                if got != expect || cmp.algebra.value.free_rank() != expect || !cmp.check().passed() {
                    failures.push(format!("{} class {} n={}: rank {} expected {}", name, c, n, got, expect));
                }
            }
        }
    }
    let g = group("C2");
    let ft = Arc::new(FreeTambara::new(&Arc::new(burnside_mackey(&g))));
    let rank = phi_free_tambara(&ft, 2).map(|c| c.fixed_points.value.free_rank()).unwrap_or(0);
    if rank != 2 {
        failures.push(format!("C2 degree 2 top rank {} expected 2", rank));
    }
    report(3, "geometric fixed points of Sym_n", start, &failures);
}

#[test]
fn criterion_04_colimit_oracle() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for name in ["C2", "C3"] {
        let g = group(name);
        let ms = [("A", burnside_mackey(&g)), ("[-,G/e]", representable_mackey(&GSet::orbit(&g, g.trivial_subgroup())))];
        for (label, m) in ms {
            let m = Arc::new(m);
            for n in 0..=3 {
                for x in orbits(&g) {
                    let a = sym_power_level(&m, &x, n);
                    let b = extended_power_colimit(&m, &x, n);
                    if a.value.invariant_factors() != b.invariant_factors() || a.value.free_rank() != b.free_rank() {
                        failures.push(format!("{} {} n={} at {:?}: {} vs {}", name, label, n, x.orbit_type(), a.value.describe(), b.describe()));
                    }
                }
            }
        }
    }
    report(4, "Sym_n agrees with the orbit-category colimit", start, &failures);
}

#[test]
fn criterion_05_representable_closed_forms() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for name in ["C2", "S3"] {
        let g = group(name);
        let xs = orbit_sums(&g, 4);
        let small = gsets_up_to(&g, 3);
        for t in &small {
            for z in &small {
                let lhs = power_mackey(t, &Arc::new(representable_mackey(z)));
                let rhs = representable_mackey(&GSet::power_set(z, t));
                if let Some(f) = same_levels(&lhs, &rhs, &xs) {
                    failures.push(format!("{} power T={:?} Z={:?}: {}", name, t.orbit_type(), z.orbit_type(), f));
                }
            }
        }
        for c in 0..g.num_classes() {
            let h = g.class_rep(c);
            let (hg, _) = g.subgroup_group(h);
            for x in gsets_up_to(&hg, 3) {
                let lhs = match norm_mackey(&g, h, &Arc::new(representable_mackey(&x))) {
                    Ok(m) => m,
                    Err(e) => {
                        failures.push(format!("{} norm class {}: {}", name, c, e));
                        continue;
                    }
                };
                let rhs = representable_mackey(&GSet::norm_set(&g, h, &x));
                if let Some(f) = same_levels(&lhs, &rhs, &xs) {
                    failures.push(format!("{} norm class {} X={:?}: {}", name, c, x.orbit_type(), f));
                }
            }
        }
    }
    let g = group("C2");
    let (e, _) = g.subgroup_group(g.trivial_subgroup());
    let n2 = norm_mackey(&g, g.trivial_subgroup(), &Arc::new(representable_mackey(&GSet::trivial(&e, 2)))).unwrap();
    let rank = n2.value(&GSet::point(&g)).free_rank();
    if rank != 5 {
        failures.push(format!("N_e^C2([-,2])(pt) has rank {} expected 5", rank));
    }
    report(5, "representable powers and norms", start, &failures);
}

#[test]
fn criterion_06_norm_fixed_points() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for name in ["C2", "C3", "S3"] {
        let g = group(name);
        for c in 0..g.num_classes() {
            let h = g.class_rep(c);
            let (hg, _) = g.subgroup_group(h);
            let mut ms = vec![("A".to_string(), burnside_mackey(&hg))];
            for z in gsets_up_to(&hg, 3).into_iter().filter(|z| !z.is_empty()) {
                ms.push((format!("[-,{:?}]", z.orbit_type()), representable_mackey(&z)));
            }
            for (label, m) in ms {
                let m = Arc::new(m);
                let ok = norm_engine(&g, h, &m).ok().and_then(|e| mu_norm(&e, &m).ok()).map(|mu| mu.is_isomorphism());
                if !matches!(ok, Some(Ok(true))) {
                    failures.push(format!("{} class {} {}", name, c, label));
                }
            }
        }
    }
    report(6, "norms on geometric fixed points", start, &failures);
}

#[test]
fn criterion_07_adjunction_triangles() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for name in ["C2", "S3"] {
        let g = group(name);
        let bt = Arc::new(burnside_tambara(&g));
        for c in 0..g.num_classes() {
            let sub = g.class_rep(c);
            let (h, _) = g.subgroup_group(sub);
            let rh = Arc::new(burnside_tambara(&h));
            let counit = Counit::new(&bt, sub).unwrap();
            let nres = NormTambara::new(&g, sub, &counit.res).unwrap();
            for x in gsets_up_to(&h, 4) {
                if !triangle_restriction(&counit, &nres, &x).unwrap_or(false) {
                    failures.push(format!("{} class {} Res(ε)∘η at {:?}", name, c, x.orbit_type()));
                }
            }
            let nr = NormTambara::new(&g, sub, &rh).unwrap();
            let counit_n = Counit::new(&nr.functor, sub).unwrap();
            for x in gsets_up_to(&g, 4) {
                if !triangle_norm(&nr, &counit_n, &x).unwrap_or(false) {
                    failures.push(format!("{} class {} ε∘N(η) at {:?}", name, c, x.orbit_type()));
                }
            }
        }
    }
    let g = group("C2");
    let bt = Arc::new(burnside_tambara(&g));
    let counit = Counit::new(&bt, g.trivial_subgroup()).unwrap();
    let pt = GSet::point(&g);
    let xv = GMap::to_point(&pt);
    let level = counit.engine.level(&pt, &xv);
    let two = counit.engine.element(&pt, &[0], &xv, &[int(2)]);
    let got = counit.hom(&pt).unwrap().apply(&level.vector(&two));
    let free = GSet::orbit(&g, g.trivial_subgroup());
    let to_pt = GMap::to_point(&free);
    let mut expect: Vec<Int> = scale_vec(&int(2), &bt.one(&pt));
    add_assign(&mut expect, &bt.transfer(&to_pt, &bt.one(&free)));
    if !bt.value(&pt).equal(&got, &expect) {
        failures.push(format!("counit of [2] is {:?}", got));
    }
    report(7, "norm-restriction adjunction triangles", start, &failures);
}

#[test]
fn criterion_08_multiplicative_equivalence() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for name in ["C2", "S3"] {
        let g = group(name);
        let bt = Arc::new(burnside_tambara(&g));
        let mu = Arc::new(multiplicative_structure(&bt));
        let rep = verify_multiplicative(mu.as_ref(), 4);
        if let Some(f) = rep.first_failure() {
            failures.push(format!("{}: {:?}", name, f));
        }
        if rep.checks.iter().any(|c| c.instances == 0) {
            failures.push(format!("{}: a condition had no instances", name));
        }
        let rt = multiplicative_round_trip(&bt, mu, 4);
        if let Some(f) = rt.first_failure() {
            failures.push(format!("{} round trip: {:?}", name, f));
        }
    }
    report(8, "multiplicative Mackey structure of the Burnside functor", start, &failures);
}

#[test]
fn criterion_09_green_structure() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let g = group("C2");
    let (h, _) = g.subgroup_group(g.trivial_subgroup());
    let nr = NormTambara::new(&g, g.trivial_subgroup(), &Arc::new(burnside_tambara(&h))).unwrap();
    let mut pairs = 0;
    for x in orbit_sums(&g, 4) {
        let gens = nr.generator_vectors(&x);
        let value = nr.functor.value(&x);
        for (ka, va) in &gens {
            for (kb, vb) in &gens {
                pairs += 1;
                let p1 = nr.functor.product(&x, va, vb);
                let p2 = nr.levelwise(&x, &nr.pairing_product(&x, ka, kb));
                if !value.equal(&p1, &p2) {
                    failures.push(format!("{:?}: {:?} * {:?}", x.orbit_type(), ka, kb));
                }
            }
        }
    }
    if pairs == 0 {
        failures.push("no generator pairs".into());
    }
    report(9, "two products on the norm agree", start, &failures);
}

#[test]
fn criterion_10_axiom_suites() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for name in CATALOG {
        let g = group(name);
        for (label, m) in builtin_examples(&g) {
            if let Some(f) = check_mackey_axioms(&m, 6).first_failure() {
                failures.push(format!("{} {}: {:?}", name, label, f));
            }
        }
        if let Some(f) = check_tambara_axioms(&burnside_tambara(&g), 6).first_failure() {
            failures.push(format!("{} burnside tambara: {:?}", name, f));
        }
    }
    report(10, "Mackey and Tambara axiom suites, bound 6", start, &failures);
}
