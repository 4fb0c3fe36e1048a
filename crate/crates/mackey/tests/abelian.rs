use std::sync::Arc;

use mackey::abelian::{int, AbHom, FgAb, Int, IntMatrix};
use proptest::prelude::*;

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn det(m: &[Vec<i128>]) -> i128 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .map(|c| {
            let minor: Vec<Vec<i128>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, &x)| x).collect()).collect();
            let sign = if c % 2 == 0 { 1 } else { -1 };
            sign * m[0][c] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors (> 1) and rank from gcds of k×k minors.
fn determinantal(rows: &[Vec<i64>], cols: usize) -> (Vec<i128>, usize) {
    let mut prev = 1i128;
    let mut factors = Vec::new();
    let mut rank = 0;
    for k in 1..=rows.len().min(cols) {
        let mut d = 0i128;
        for rs in subsets(rows.len(), k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| rows[r][c] as i128).collect()).collect();
                d = gcd(d, det(&sub));
            }
        }
        if d == 0 {
            break;
        }
        rank = k;
        let f = d / prev;
        if f > 1 {
            factors.push(f);
        }
        prev = d;
    }
    (factors, rank)
}

fn to_int(rows: &[Vec<i64>]) -> Vec<Vec<Int>> {
    rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

fn matrix() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..5, 0usize..4).prop_flat_map(|(cols, r)| (Just(cols), prop::collection::vec(prop::collection::vec(-6i64..7, cols), r)))
}

#[test]
fn presentations_by_hand() {
    let z6 = FgAb::new(1, to_int(&[vec![6]]));
    let z2z3 = FgAb::new(2, to_int(&[vec![2, 0], vec![0, 3]]));
    assert!(z6.isomorphic(&z2z3));
    assert_eq!(z2z3.describe(), "Z/6");
    let mixed = FgAb::new(3, to_int(&[vec![2, 4, 0], vec![0, 6, 0]]));
    assert_eq!(mixed.invariant_factors(), &[int(2), int(6)]);
    assert_eq!(mixed.free_rank(), 1);
    assert!(FgAb::new(2, to_int(&[vec![1, 1]])).isomorphic(&FgAb::free(1)));
}

#[test]
fn ill_defined_hom_is_rejected() {
    let z2 = Arc::new(FgAb::new(1, to_int(&[vec![2]])));
    let z = Arc::new(FgAb::free(1));
    assert!(AbHom::new(z2.clone(), z.clone(), IntMatrix::from_i64(&[vec![1]])).is_err());
    assert!(AbHom::new(z, z2, IntMatrix::from_i64(&[vec![1]])).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn invariant_factors_match_minors((cols, rows) in matrix()) {
        let a = FgAb::new(cols, to_int(&rows));
        let (factors, rank) = determinantal(&rows, cols);
        let got: Vec<i128> = a.invariant_factors().iter().map(|d| d.to_string().parse().unwrap()).collect();
        prop_assert_eq!(got, factors);
        prop_assert_eq!(a.free_rank(), cols - rank);
    }

    #[test]
    fn factors_form_a_divisor_chain((cols, rows) in matrix()) {
        let a = FgAb::new(cols, to_int(&rows));
        for w in a.invariant_factors().windows(2) {
            prop_assert!((&w[1] % &w[0]) == int(0));
        }
    }

    #[test]
    fn row_operations_preserve_the_group((cols, rows) in matrix(), i in 0usize..4, j in 0usize..4, c in -3i64..4) {
        let a = FgAb::new(cols, to_int(&rows));
        let mut moved = rows.clone();
        if moved.len() > 1 {
            let (i, j) = (i % moved.len(), j % moved.len());
            if i != j {
                let src = moved[j].clone();
                for (x, y) in moved[i].iter_mut().zip(src) {
                    *x += c * y;
                }
            }
            let last = moved.len() - 1;
            moved.swap(0, last);
        }
        // column operation: add c times column 0 to the last column
        for r in moved.iter_mut() {
            if cols > 1 {
                r[cols - 1] += c * r[0];
            }
        }
        prop_assert!(a.isomorphic(&FgAb::new(cols, to_int(&moved))));
    }

    #[test]
    fn relations_are_zero_and_sums_add((cols, rows) in matrix(), (cols2, rows2) in matrix()) {
        let a = FgAb::new(cols, to_int(&rows));
        for r in a.relations() {
            prop_assert!(a.is_zero(r));
        }
        let b = FgAb::new(cols2, to_int(&rows2));
        let s = FgAb::direct_sum(&[&a, &b]);
        prop_assert_eq!(s.free_rank(), a.free_rank() + b.free_rank());
        let order = |g: &FgAb| g.invariant_factors().iter().fold(int(1), |acc, d| acc * d);
        prop_assert_eq!(order(&s), order(&a) * order(&b));
    }

    #[test]
    fn quotient_kills_the_extra_relation((cols, rows) in matrix(), extra in prop::collection::vec(-4i64..5, 4)) {
        let a = FgAb::new(cols, to_int(&rows));
        let v: Vec<Int> = extra[..cols].iter().map(|&x| int(x)).collect();
        let q = a.quotient(std::slice::from_ref(&v));
        prop_assert!(q.is_zero(&v));
        prop_assert!(q.free_rank() <= a.free_rank());
    }

    #[test]
    fn identity_and_composites((cols, rows) in matrix()) {
        let a = Arc::new(FgAb::new(cols, to_int(&rows)));
        let id = AbHom::identity(&a);
        prop_assert!(id.is_isomorphism().unwrap());
        prop_assert!(id.then(&id).equals(&id));
        let zero = AbHom::zero(&a, &a);
        prop_assert_eq!(zero.is_injective(), a.is_trivial());
    }
}
