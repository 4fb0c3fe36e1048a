//! Finitely generated abelian groups over the integers.
//!
//! Vectors are rows: a homomorphism A → B is a matrix with one row per
//! generator of A, acting by v ↦ v·M. A presentation is a list of relation
//! rows; its value is Z^gens modulo their row span.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

pub type Int = BigInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbError {
    #[error("matrix does not send relations to relations")]
    IllDefinedHom,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("element is not in the image")]
    NoSolution,
}

pub fn int(x: i64) -> Int {
    Int::from(x)
}

pub fn int_json(x: &Int) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn zero_vec(n: usize) -> Vec<Int> {
    vec![Int::zero(); n]
}

pub fn unit_vec(n: usize, k: usize) -> Vec<Int> {
    let mut v = zero_vec(n);
    v[k] = Int::one();
    v
}

pub fn add_assign(a: &mut [Int], b: &[Int]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

pub fn add_scaled(a: &mut [Int], c: &Int, b: &[Int]) {
    if c.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x += c * y;
        }
    }
}

pub fn sub_vec(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg_vec(a: &[Int]) -> Vec<Int> {
    a.iter().map(|x| -x).collect()
}

pub fn scale_vec(c: &Int, a: &[Int]) -> Vec<Int> {
    a.iter().map(|x| c * x).collect()
}

pub fn is_zero_vec(a: &[Int]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_string()).collect()).collect();
        write!(f, "IntMatrix{:?}", rows)
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        IntMatrix { rows: r, cols, data }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect(), cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        *out.entry_mut(i, j) += a * b;
                    }
                }
            }
        }
        out
    }

    /// v·A.
    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.rows, "vector length");
        let mut out = zero_vec(self.cols);
        for (i, a) in v.iter().enumerate() {
            if !a.is_zero() {
                add_scaled(&mut out, a, self.row(i));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(blocks: &[&IntMatrix]) -> IntMatrix {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(r, c);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(ro + i, co + j, b.get(i, j).clone());
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &IntMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.to_rows();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        if n == 0 {
            return Int::one();
        }
        sign * &a[n - 1][n - 1]
    }
}

/// Result of a Smith normal form computation: u·a·v = d.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl Snf {
    /// The nonzero diagonal entries, each dividing the next.
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct Elim {
    w: Vec<Vec<Int>>,
    u: Option<Vec<Vec<Int>>>,
    v: Option<Vec<Vec<Int>>>,
    vinv: Option<Vec<Vec<Int>>>,
    m: usize,
    n: usize,
}

impl Elim {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.w.swap(a, b);
        if let Some(u) = &mut self.u {
            u.swap(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in &mut self.w {
            r.swap(a, b);
        }
        if let Some(v) = &mut self.v {
            for r in v.iter_mut() {
                r.swap(a, b);
            }
        }
        if let Some(vi) = &mut self.vinv {
            vi.swap(a, b);
        }
    }

    /// row_i -= q·row_t
    fn row_op(&mut self, i: usize, t: usize, q: &Int, from: usize) {
        let (ri, rt) = two_mut(&mut self.w, i, t);
        for k in from..ri.len() {
            if !rt[k].is_zero() {
                ri[k] -= q * &rt[k];
            }
        }
        if let Some(u) = &mut self.u {
            let (ui, ut) = two_mut(u, i, t);
            for k in 0..ui.len() {
                if !ut[k].is_zero() {
                    ui[k] -= q * &ut[k];
                }
            }
        }
    }

    /// col_k -= q·col_t
    fn col_op(&mut self, k: usize, t: usize, q: &Int, from: usize) {
        for r in self.w[from..].iter_mut() {
            if !r[t].is_zero() {
                let d = q * &r[t];
                r[k] -= d;
            }
        }
        if let Some(v) = &mut self.v {
            for r in v.iter_mut() {
                if !r[t].is_zero() {
                    let d = q * &r[t];
                    r[k] -= d;
                }
            }
        }
        if let Some(vi) = &mut self.vinv {
            let (rt, rk) = two_mut(vi, t, k);
            for x in 0..rt.len() {
                if !rk[x].is_zero() {
                    rt[x] += q * &rk[x];
                }
            }
        }
    }

    fn negate_col(&mut self, t: usize) {
        for r in &mut self.w {
            r[t] = -&r[t];
        }
        if let Some(v) = &mut self.v {
            for r in v.iter_mut() {
                r[t] = -&r[t];
            }
        }
        if let Some(vi) = &mut self.vinv {
            for x in vi[t].iter_mut() {
                *x = -&*x;
            }
        }
    }

    fn run(&mut self, chain: bool) -> usize {
        let (m, n) = (self.m, self.n);
        let mut t = 0;
        while t < m.min(n) {
            let Some((r, c)) = self.min_entry(t) else { break };
            self.swap_rows(t, r);
            self.swap_cols(t, c);
            loop {
                let mut clean = true;
                for i in t + 1..m {
                    if self.w[i][t].is_zero() {
                        continue;
                    }
                    let q = &self.w[i][t] / &self.w[t][t];
                    self.row_op(i, t, &q, t);
                    if !self.w[i][t].is_zero() {
                        clean = false;
                    }
                }
                for k in t + 1..n {
                    if self.w[t][k].is_zero() {
                        continue;
                    }
                    let q = &self.w[t][k] / &self.w[t][t];
                    self.col_op(k, t, &q, t);
                    if !self.w[t][k].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    let mut best: Option<(usize, usize)> = None;
                    let mut best_abs = self.w[t][t].abs();
                    for i in t + 1..m {
                        let a = self.w[i][t].abs();
                        if !a.is_zero() && a < best_abs {
                            best_abs = a;
                            best = Some((i, t));
                        }
                    }
                    for k in t + 1..n {
                        let a = self.w[t][k].abs();
                        if !a.is_zero() && a < best_abs {
                            best_abs = a;
                            best = Some((t, k));
                        }
                    }
                    match best {
                        Some((i, k)) if k == t => self.swap_rows(t, i),
                        Some((_, k)) => self.swap_cols(t, k),
                        None => {}
                    }
                    continue;
                }
                if chain {
                    let p = self.w[t][t].clone();
                    let bad = (t + 1..m).find(|&i| (t + 1..n).any(|k| !(&self.w[i][k] % &p).is_zero()));
                    if let Some(i) = bad {
                        let minus_one = -Int::one();
                        self.row_op(t, i, &minus_one, t);
                        continue;
                    }
                }
                break;
            }
            if self.w[t][t].is_negative() {
                self.negate_col(t);
            }
            t += 1;
        }
        t
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, Int)> = None;
        for i in t..self.m {
            for k in t..self.n {
                let a = &self.w[i][k];
                if a.is_zero() {
                    continue;
                }
                let a = a.abs();
                if best.as_ref().map_or(true, |b| a < b.2) {
                    let one = a.is_one();
                    best = Some((i, k, a));
                    if one {
                        let b = best.unwrap();
                        return Some((b.0, b.1));
                    }
                }
            }
        }
        best.map(|b| (b.0, b.1))
    }
}

fn two_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (x, y) = v.split_at_mut(b);
        (&mut x[a], &mut y[0])
    } else {
        let (x, y) = v.split_at_mut(a);
        (&mut y[0], &mut x[b])
    }
}

fn ident_rows(n: usize) -> Vec<Vec<Int>> {
    (0..n).map(|i| unit_vec(n, i)).collect()
}

fn rows_to_matrix(rows: Vec<Vec<Int>>, cols: usize) -> IntMatrix {
    IntMatrix::from_rows(rows, cols)
}

/// Full Smith normal form with both transforms.
pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows(), a.cols());
    let mut e = Elim { w: a.to_rows(), u: Some(ident_rows(m)), v: Some(ident_rows(n)), vinv: None, m, n };
    let rank = e.run(true);
    Snf {
        u: rows_to_matrix(e.u.unwrap(), m),
        d: rows_to_matrix(e.w, n),
        v: rows_to_matrix(e.v.unwrap(), n),
        rank,
    }
}

/// Normalizes a list of positive diagonal entries to invariant factors
/// (each dividing the next), dropping units.
pub fn invariant_factors_of(diag: &[Int]) -> Vec<Int> {
    let mut d: Vec<Int> = diag.iter().filter(|x| !x.is_zero()).map(|x| x.abs()).collect();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d.retain(|x| !x.is_one());
    d
}

/// Drops zero and duplicate rows.
fn clean_rows(rows: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for r in rows {
        if is_zero_vec(r) {
            continue;
        }
        let key = if r.iter().find(|x| !x.is_zero()).unwrap().is_negative() { neg_vec(r) } else { r.clone() };
        if seen.insert(key.clone()) {
            out.push(key);
        }
    }
    out
}

/// Row-reduces to at most `cols` rows spanning the same lattice, working on
/// one column at a time with a gcd-style pivot so the dense stage stays small.
fn reduce_lattice(rows: Vec<Vec<Int>>, cols: usize) -> Vec<Vec<Int>> {
    if rows.len() <= cols {
        return rows;
    }
    let mut pending: Vec<Vec<Int>> = rows;
    let mut basis: Vec<Vec<Int>> = Vec::new();
    for c in 0..cols {
        let (mut with, without): (Vec<Vec<Int>>, Vec<Vec<Int>>) = pending.into_iter().partition(|r| !r[c].is_zero());
        pending = without;
        while with.len() > 1 {
            let (pi, _) = with.iter().enumerate().min_by_key(|(_, r)| r[c].abs()).unwrap();
            let piv = with.swap_remove(pi);
            let mut next = Vec::with_capacity(with.len() + 1);
            for mut r in with {
                let q = &r[c] / &piv[c];
                add_scaled(&mut r, &-q, &piv);
                if r[c].is_zero() {
                    if !is_zero_vec(&r) {
                        pending.push(r);
                    }
                } else {
                    next.push(r);
                }
            }
            next.push(piv);
            with = next;
        }
        basis.extend(with);
        if pending.is_empty() {
            break;
        }
    }
    basis
}

/// Row-style Hermite normal form: a basis of the row lattice in echelon form
/// with positive pivots and entries above each pivot reduced into [0, pivot).
pub fn hermite_basis(rows: &[Vec<Int>], cols: usize) -> Vec<Vec<Int>> {
    let mut pending: Vec<Vec<Int>> = clean_rows(rows);
    let mut basis: Vec<(usize, Vec<Int>)> = Vec::new();
    for c in 0..cols {
        let (mut with, without): (Vec<Vec<Int>>, Vec<Vec<Int>>) = pending.into_iter().partition(|r| !r[c].is_zero());
        pending = without;
        while with.len() > 1 {
            let (pi, _) = with.iter().enumerate().min_by_key(|(_, r)| r[c].abs()).unwrap();
            let piv = with.swap_remove(pi);
            let mut next = Vec::with_capacity(with.len() + 1);
            for mut r in with {
                let q = &r[c] / &piv[c];
                add_scaled(&mut r, &-q, &piv);
                if r[c].is_zero() {
                    if !is_zero_vec(&r) {
                        pending.push(r);
                    }
                } else {
                    next.push(r);
                }
            }
            next.push(piv);
            with = next;
        }
        if let Some(mut piv) = with.pop() {
            if piv[c].is_negative() {
                piv = neg_vec(&piv);
            }
            for (_, b) in basis.iter_mut() {
                let q = b[c].div_floor(&piv[c]);
                if !q.is_zero() {
                    add_scaled(b, &-q, &piv);
                }
            }
            basis.push((c, piv));
        }
    }
    basis.into_iter().map(|(_, r)| r).collect()
}

/// Repeated solving of y·A ≡ b modulo a relation lattice, and the kernel of A.
pub struct Solver {
    snf: Snf,
    k: usize,
    rows: usize,
}

impl Solver {
    /// A has `a.rows()` rows mapping into a group with the given relation rows.
    pub fn new(a: &IntMatrix, relations: &[Vec<Int>]) -> Self {
        let mut rows = a.to_rows();
        rows.extend(relations.iter().cloned());
        let s = IntMatrix::from_rows(rows, a.cols());
        Solver { rows: s.rows(), snf: smith_normal_form(&s), k: a.rows() }
    }

    pub fn solve(&self, b: &[Int]) -> Option<Vec<Int>> {
        let snf = &self.snf;
        let bv = snf.v.apply(b);
        let mut y = zero_vec(self.rows);
        for (t, val) in bv.iter().enumerate() {
            if t < snf.rank {
                let d = snf.d.get(t, t);
                if !(val % d).is_zero() {
                    return None;
                }
                y[t] = val / d;
            } else if !val.is_zero() {
                return None;
            }
        }
        let full = snf.u.apply(&y);
        Some(full[..self.k].to_vec())
    }

    /// A reduced basis of {y : y·A ≡ 0}.
    pub fn kernel(&self) -> Vec<Vec<Int>> {
        let raw: Vec<Vec<Int>> = (self.snf.rank..self.rows).map(|i| self.snf.u.row(i)[..self.k].to_vec()).collect();
        hermite_basis(&raw, self.k)
    }
}

/// A finitely generated abelian group given by generators and relations.
#[derive(Clone)]
pub struct FgAb {
    gens: usize,
    relations: Vec<Vec<Int>>,
    diag: Vec<Int>,
    p: Option<IntMatrix>,
    pinv: Option<IntMatrix>,
    invariant_factors: Vec<Int>,
    free_rank: usize,
}

impl fmt::Debug for FgAb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FgAb(gens {}, {})", self.gens, self.describe())
    }
}

impl FgAb {
    pub fn free(n: usize) -> Self {
        FgAb {
            gens: n,
            relations: Vec::new(),
            diag: zero_vec(n),
            p: None,
            pinv: None,
            invariant_factors: Vec::new(),
            free_rank: n,
        }
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    pub fn new(gens: usize, relations: Vec<Vec<Int>>) -> Self {
        for r in &relations {
            assert_eq!(r.len(), gens, "relation length");
        }
        let cleaned = clean_rows(&relations);
        if cleaned.is_empty() {
            let mut f = Self::free(gens);
            f.relations = relations;
            return f;
        }
        let reduced = reduce_lattice(cleaned, gens);
        let m = reduced.len();
        let mut e = Elim { w: reduced, u: None, v: Some(ident_rows(gens)), vinv: Some(ident_rows(gens)), m, n: gens };
        let rank = e.run(false);
        let mut diag = zero_vec(gens);
        for (t, d) in diag.iter_mut().enumerate().take(rank) {
            *d = e.w[t][t].clone();
        }
        let invariant_factors = invariant_factors_of(&diag);
        FgAb {
            gens,
            relations,
            free_rank: gens - rank,
            diag,
            p: Some(rows_to_matrix(e.v.unwrap(), gens)),
            pinv: Some(rows_to_matrix(e.vinv.unwrap(), gens)),
            invariant_factors,
        }
    }

    pub fn from_invariants(factors: &[Int], free_rank: usize) -> Self {
        let n = factors.len() + free_rank;
        let rows = factors.iter().enumerate().map(|(i, d)| scale_vec(d, &unit_vec(n, i))).collect();
        Self::new(n, rows)
    }

    /// Blockwise direct sum; the diagonal form is assembled without a new SNF.
    pub fn direct_sum(parts: &[&FgAb]) -> Self {
        let gens: usize = parts.iter().map(|p| p.gens).sum();
        if parts.iter().all(|p| p.p.is_none()) {
            let mut f = Self::free(gens);
            let mut off = 0;
            for p in parts {
                for r in &p.relations {
                    let mut row = zero_vec(gens);
                    row[off..off + p.gens].clone_from_slice(r);
                    f.relations.push(row);
                }
                off += p.gens;
            }
            return f;
        }
        let mut relations = Vec::new();
        let mut diag = Vec::with_capacity(gens);
        let ids: Vec<IntMatrix> = parts.iter().map(|p| IntMatrix::identity(p.gens)).collect();
        let mut off = 0;
        for p in parts {
            for r in &p.relations {
                let mut row = zero_vec(gens);
                row[off..off + p.gens].clone_from_slice(r);
                relations.push(row);
            }
            diag.extend(p.diag.iter().cloned());
            off += p.gens;
        }
        let pm: Vec<&IntMatrix> = parts.iter().zip(&ids).map(|(p, id)| p.p.as_ref().unwrap_or(id)).collect();
        let pim: Vec<&IntMatrix> = parts.iter().zip(&ids).map(|(p, id)| p.pinv.as_ref().unwrap_or(id)).collect();
        let invariant_factors = invariant_factors_of(&diag);
        let free_rank = parts.iter().map(|p| p.free_rank).sum();
        FgAb {
            gens,
            relations,
            diag,
            p: Some(IntMatrix::block_diag(&pm)),
            pinv: Some(IntMatrix::block_diag(&pim)),
            invariant_factors,
            free_rank,
        }
    }

    pub fn num_gens(&self) -> usize {
        self.gens
    }

    pub fn relations(&self) -> &[Vec<Int>] {
        &self.relations
    }

    pub fn invariant_factors(&self) -> &[Int] {
        &self.invariant_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn isomorphic(&self, other: &FgAb) -> bool {
        self.free_rank == other.free_rank && self.invariant_factors == other.invariant_factors
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z/{}", d)).collect();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    fn to_diag(&self, v: &[Int]) -> Vec<Int> {
        match &self.p {
            Some(p) => p.apply(v),
            None => v.to_vec(),
        }
    }

    fn from_diag(&self, y: &[Int]) -> Vec<Int> {
        match &self.pinv {
            Some(p) => p.apply(y),
            None => y.to_vec(),
        }
    }

    /// Canonical coordinates: a vector of residues (free coordinates kept
    /// as integers) that is equal for two vectors iff they agree in the group.
    pub fn coords(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.gens, "element length");
        if self.p.is_none() {
            return v.to_vec();
        }
        let y = self.to_diag(v);
        y.into_iter()
            .zip(&self.diag)
            .filter(|(_, d)| !d.is_one())
            .map(|(x, d)| if d.is_zero() { x } else { x.mod_floor(d) })
            .collect()
    }

    pub fn normal_form(&self, v: &[Int]) -> Vec<Int> {
        if self.p.is_none() {
            return v.to_vec();
        }
        let y: Vec<Int> = self
            .to_diag(v)
            .into_iter()
            .zip(&self.diag)
            .map(|(x, d)| if d.is_zero() { x } else { x.mod_floor(d) })
            .collect();
        self.from_diag(&y)
    }

    pub fn is_zero(&self, v: &[Int]) -> bool {
        if self.p.is_none() {
            return is_zero_vec(v);
        }
        let y = self.to_diag(v);
        y.iter().zip(&self.diag).all(|(x, d)| if d.is_zero() { x.is_zero() } else { (x % d).is_zero() })
    }

    pub fn equal(&self, a: &[Int], b: &[Int]) -> bool {
        self.is_zero(&sub_vec(a, b))
    }

    /// Order of the element, None if infinite.
    pub fn order_of(&self, v: &[Int]) -> Option<Int> {
        let y = self.to_diag(v);
        let mut ord = Int::one();
        for (x, d) in y.iter().zip(&self.diag) {
            if d.is_zero() {
                if !x.is_zero() {
                    return None;
                }
            } else {
                let r = x.mod_floor(d);
                if !r.is_zero() {
                    ord = ord.lcm(&(d / r.gcd(d)));
                }
            }
        }
        Some(ord)
    }

    pub fn quotient(&self, extra: &[Vec<Int>]) -> FgAb {
        let mut rels = self.relations.clone();
        rels.extend(extra.iter().cloned());
        FgAb::new(self.gens, rels)
    }

    pub fn relation_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.relations.clone(), self.gens)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "gens": self.gens,
            "relations": self.relations.iter().map(|r| r.iter().map(int_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "invariant_factors": self.invariant_factors.iter().map(int_json).collect::<Vec<_>>(),
            "free_rank": self.free_rank,
        })
    }
}

/// A homomorphism given by its matrix on generators.
#[derive(Clone, Debug)]
pub struct AbHom {
    pub source: Arc<FgAb>,
    pub target: Arc<FgAb>,
    pub matrix: IntMatrix,
}

impl AbHom {
    pub fn new(source: Arc<FgAb>, target: Arc<FgAb>, matrix: IntMatrix) -> Result<Self, AbError> {
        let h = Self::new_unchecked(source, target, matrix)?;
        if !h.is_well_defined() {
            return Err(AbError::IllDefinedHom);
        }
        Ok(h)
    }

    pub fn new_unchecked(source: Arc<FgAb>, target: Arc<FgAb>, matrix: IntMatrix) -> Result<Self, AbError> {
        if matrix.rows() != source.num_gens() || matrix.cols() != target.num_gens() {
            return Err(AbError::Shape(format!(
                "{}x{} matrix for {} -> {} generators",
                matrix.rows(),
                matrix.cols(),
                source.num_gens(),
                target.num_gens()
            )));
        }
        Ok(AbHom { source, target, matrix })
    }

    pub fn identity(a: &Arc<FgAb>) -> Self {
        AbHom { source: a.clone(), target: a.clone(), matrix: IntMatrix::identity(a.num_gens()) }
    }

    pub fn zero(a: &Arc<FgAb>, b: &Arc<FgAb>) -> Self {
        AbHom { source: a.clone(), target: b.clone(), matrix: IntMatrix::zeros(a.num_gens(), b.num_gens()) }
    }

    pub fn is_well_defined(&self) -> bool {
        self.source.relations().iter().all(|r| self.target.is_zero(&self.matrix.apply(r)))
    }

    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        self.matrix.apply(v)
    }

    /// self followed by other.
    pub fn then(&self, other: &AbHom) -> AbHom {
        AbHom { source: self.source.clone(), target: other.target.clone(), matrix: self.matrix.mul(&other.matrix) }
    }

    /// Equality as homomorphisms (generator images agree in the target).
    pub fn equals(&self, other: &AbHom) -> bool {
        (0..self.source.num_gens()).all(|i| self.target.equal(self.matrix.row(i), other.matrix.row(i)))
    }

    pub fn is_zero_map(&self) -> bool {
        (0..self.source.num_gens()).all(|i| self.target.is_zero(self.matrix.row(i)))
    }

    /// The cokernel with the projection from the target.
    pub fn cokernel(&self) -> Result<(Arc<FgAb>, AbHom), AbError> {
        if !self.is_well_defined() {
            return Err(AbError::IllDefinedHom);
        }
        let q = Arc::new(self.target.quotient(&self.matrix.to_rows()));
        let pr = AbHom { source: self.target.clone(), target: q.clone(), matrix: IntMatrix::identity(self.target.num_gens()) };
        Ok((q, pr))
    }

    fn stacked(&self) -> IntMatrix {
        let rel = self.target.relation_matrix();
        if rel.rows() == 0 {
            self.matrix.clone()
        } else {
            self.matrix.vstack(&rel)
        }
    }

    pub fn is_surjective(&self) -> bool {
        self.target.quotient(&self.matrix.to_rows()).is_trivial()
    }

    /// Generators of the kernel, as vectors on source generators.
    pub fn kernel(&self) -> Vec<Vec<Int>> {
        let s = self.stacked();
        let snf = smith_normal_form(&s);
        let k = self.source.num_gens();
        (snf.rank..s.rows()).map(|i| snf.u.row(i)[..k].to_vec()).filter(|z| !is_zero_vec(z)).collect()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().iter().all(|z| self.source.is_zero(z))
    }

    pub fn is_isomorphism(&self) -> Result<bool, AbError> {
        if !self.is_well_defined() {
            return Err(AbError::IllDefinedHom);
        }
        // Surjective endomorphisms of finitely generated abelian groups are injective.
        Ok(self.source.isomorphic(&self.target) && self.is_surjective())
    }

    /// Some preimage of b.
    pub fn solve(&self, b: &[Int]) -> Result<Vec<Int>, AbError> {
        let s = self.stacked();
        let snf = smith_normal_form(&s);
        let bv = snf.v.apply(b);
        let mut y = zero_vec(s.rows());
        for (t, val) in bv.iter().enumerate() {
            if t < snf.rank {
                let d = snf.d.get(t, t);
                if !(val % d).is_zero() {
                    return Err(AbError::NoSolution);
                }
                y[t] = val / d;
            } else if !val.is_zero() {
                return Err(AbError::NoSolution);
            }
        }
        let full = snf.u.apply(&y);
        Ok(full[..self.source.num_gens()].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(a: &IntMatrix) -> Snf {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.u.det().abs().is_one());
        assert!(s.v.det().abs().is_one());
        let d = s.diagonal();
        for w in d.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
        s
    }

    #[test]
    fn snf_examples() {
        let s = check_snf(&IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diagonal(), vec![int(2), int(4)]);
        let s = check_snf(&IntMatrix::from_i64(&[vec![2, 0], vec![0, 6]]));
        assert_eq!(s.diagonal(), vec![int(2), int(6)]);
        let s = check_snf(&IntMatrix::from_i64(&[vec![6, 0], vec![0, 4]]));
        assert_eq!(s.diagonal(), vec![int(2), int(12)]);
        check_snf(&IntMatrix::identity(3));
        check_snf(&IntMatrix::zeros(2, 3));
    }

    #[test]
    fn presentations() {
        let a = FgAb::new(2, vec![vec![int(2), int(4)], vec![int(6), int(8)]]);
        assert_eq!(a.invariant_factors(), &[int(2), int(4)]);
        assert_eq!(a.free_rank(), 0);
        let v = vec![int(5), int(7)];
        assert_eq!(a.normal_form(&a.normal_form(&v)), a.normal_form(&v));
        assert!(a.is_zero(&[int(2), int(4)]));
        assert!(!a.is_zero(&[int(1), int(0)]));
    }

    #[test]
    fn homs() {
        let z = Arc::new(FgAb::free(1));
        let two = AbHom::new(z.clone(), z.clone(), IntMatrix::from_i64(&[vec![2]])).unwrap();
        assert!(!two.is_isomorphism().unwrap());
        let (c, _) = two.cokernel().unwrap();
        assert_eq!(c.invariant_factors(), &[int(2)]);
        assert!(AbHom::identity(&z).is_isomorphism().unwrap());
        let z2 = Arc::new(FgAb::free(2));
        let u = AbHom::new(z2.clone(), z2.clone(), IntMatrix::from_i64(&[vec![2, 1], vec![1, 1]])).unwrap();
        assert!(u.is_isomorphism().unwrap());
        assert_eq!(two.solve(&[int(6)]).unwrap(), vec![int(3)]);
        assert!(two.solve(&[int(3)]).is_err());
        assert!(two.is_injective());
        let z4 = Arc::new(FgAb::new(1, vec![vec![int(4)]]));
        let z2t = Arc::new(FgAb::new(1, vec![vec![int(2)]]));
        let m = AbHom::new(z4, z2t.clone(), IntMatrix::from_i64(&[vec![1]])).unwrap();
        assert!(!m.is_injective());
        assert!(m.is_surjective());
        assert!(AbHom::new(z2t, z.clone(), IntMatrix::from_i64(&[vec![1]])).is_err());
    }
}
