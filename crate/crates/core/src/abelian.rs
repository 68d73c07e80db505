//! Exact integer linear algebra: sparse Smith normal form for invariant
//! factors, a dense transform-carrying variant, modular rank bounds, and the
//! abelianization / class-2 nilpotent quotient invariants of presentations.
//!
//! All arithmetic is arbitrary precision; the sparse eliminator picks pivots
//! minimizing |entry| then fill, which keeps coefficient growth tame on the
//! relation matrices this crate produces (thousands of rows, entries mostly
//! in {-1, 0, 1}).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::words::Presentation;

/// Invariants of a finitely generated abelian group: free rank plus the
/// torsion coefficients in a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianInvariants {
    pub fn free(rank: usize) -> Self {
        AbelianInvariants {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// From the (nonzero) invariant factors of a relation matrix over `ngens`
    /// generators: factors of 1 drop out, factors > 1 are torsion.
    pub fn from_invariant_factors(factors: Vec<BigInt>, ngens: usize) -> Self {
        let rank = factors.len();
        let torsion: Vec<BigInt> = factors
            .into_iter()
            .filter(|d| d.magnitude() > &1u32.into())
            .collect();
        AbelianInvariants {
            free_rank: ngens - rank,
            torsion,
        }
    }

    pub fn is_free_of_rank(&self, r: usize) -> bool {
        self.free_rank == r && self.torsion.is_empty()
    }

    pub fn torsion_exponents_divide(&self, m: &BigInt) -> bool {
        self.torsion.iter().all(|t| (m % t).is_zero())
    }
}

impl std::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Sparse integer matrix: rows as ordered column -> entry maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    pub nrows: usize,
    pub ncols: usize,
    rows: Vec<BTreeMap<usize, BigInt>>,
}

impl SparseIntMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseIntMatrix {
            nrows,
            ncols,
            rows: vec![BTreeMap::new(); nrows],
        }
    }

    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseIntMatrix::zero(nrows, ncols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    m.set(i, j, BigInt::from(v));
                }
            }
        }
        m
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(i < self.nrows && j < self.ncols);
        if v.is_zero() {
            self.rows[i].remove(&j);
        } else {
            self.rows[i].insert(j, v);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &BigInt) {
        if v.is_zero() {
            return;
        }
        let entry = self.rows[i].entry(j).or_insert_with(BigInt::zero);
        *entry += v;
        if entry.is_zero() {
            self.rows[i].remove(&j);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.rows[i].get(&j).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, BigInt> {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Sparse triplet dump, one `row col value` line per entry.
    pub fn dump_triplets(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} {} {}", self.nrows, self.ncols, self.nnz());
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                let _ = writeln!(out, "{i} {j} {v}");
            }
        }
        out
    }
}

/// Invariant factors (diagonal of the Smith form, nonzero entries only,
/// divisibility chain) of a sparse matrix. No transforms are carried.
pub fn snf_invariants(m: &SparseIntMatrix) -> Vec<BigInt> {
    // working copy with column index: col -> set of rows with a nonzero there
    let mut rows: Vec<BTreeMap<usize, BigInt>> = m.rows.clone();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.ncols];
    for (i, r) in rows.iter().enumerate() {
        for j in r.keys() {
            col_rows[*j].insert(i);
        }
    }
    let mut row_live: Vec<bool> = rows.iter().map(|r| !r.is_empty()).collect();
    let mut diag: Vec<BigInt> = Vec::new();

    loop {
        // pivot choice: minimal |entry|, then sparser row, then sparser column
        let mut best: Option<(usize, usize)> = None;
        let mut best_key: Option<(BigInt, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            if !row_live[i] {
                continue;
            }
            for (j, v) in r {
                let key = (v.abs(), r.len(), col_rows[*j].len());
                if best_key.as_ref().is_none_or(|bk| key < *bk) {
                    best_key = Some(key);
                    best = Some((i, *j));
                }
            }
            // an entry of absolute value 1 in a singleton row cannot be beaten
            if let Some((bi, _)) = best {
                if bi == i && best_key.as_ref().unwrap().0.is_one() && r.len() == 1 {
                    break;
                }
            }
        }
        let Some((pi, pj)) = best else { break };

        // clear the pivot column by row operations (gcd descent)
        loop {
            let pval = rows[pi].get(&pj).unwrap().clone();
            let others: Vec<usize> = col_rows[pj]
                .iter()
                .copied()
                .filter(|&r| r != pi && row_live[r])
                .collect();
            if others.is_empty() {
                break;
            }
            let mut improved_pivot = false;
            for r in others {
                let val = rows[r].get(&pj).cloned().unwrap_or_else(BigInt::zero);
                if val.is_zero() {
                    col_rows[pj].remove(&r);
                    continue;
                }
                let q = div_round(&val, &pval);
                if !q.is_zero() {
                    row_axpy(&mut rows, &mut col_rows, r, pi, &-q);
                }
                let rem = rows[r].get(&pj).cloned().unwrap_or_else(BigInt::zero);
                if !rem.is_zero() {
                    // remainder strictly smaller in |.|: swap roles and restart
                    rows.swap(pi, r);
                    let (a, b) = (row_live[pi], row_live[r]);
                    row_live[pi] = b;
                    row_live[r] = a;
                    fix_col_index_after_swap(&rows, &mut col_rows, pi, r);
                    improved_pivot = true;
                    break;
                }
            }
            if !improved_pivot && col_rows[pj].iter().all(|&r| r == pi || !row_live[r]) {
                break;
            }
        }

        // clear the pivot row by column operations
        let pivot_cols: Vec<usize> = rows[pi].keys().copied().filter(|&j| j != pj).collect();
        loop {
            let pval = rows[pi].get(&pj).unwrap().clone();
            let mut remainder_somewhere = false;
            for &j in &pivot_cols {
                let val = rows[pi].get(&j).cloned().unwrap_or_else(BigInt::zero);
                if val.is_zero() {
                    continue;
                }
                let q = div_round(&val, &pval);
                if !q.is_zero() {
                    col_axpy(&mut rows, &mut col_rows, j, pj, &-q, &row_live);
                }
                let rem = rows[pi].get(&j).cloned().unwrap_or_else(BigInt::zero);
                if !rem.is_zero() {
                    // swap columns j <-> pj
                    col_swap(&mut rows, &mut col_rows, j, pj, &row_live);
                    remainder_somewhere = true;
                    break;
                }
            }
            if !remainder_somewhere {
                break;
            }
        }
        // column ops may have reintroduced entries into the pivot column
        if col_rows[pj].iter().any(|&r| r != pi && row_live[r]) {
            // rare: go around again with the same pivot position
            let pval = rows[pi].get(&pj).unwrap().clone();
            let others: Vec<usize> = col_rows[pj]
                .iter()
                .copied()
                .filter(|&r| r != pi && row_live[r])
                .collect();
            let mut clean = true;
            for r in others {
                let val = rows[r].get(&pj).cloned().unwrap_or_else(BigInt::zero);
                if val.is_zero() {
                    continue;
                }
                if (&val % &pval).is_zero() {
                    let q = &val / &pval;
                    row_axpy(&mut rows, &mut col_rows, r, pi, &-q);
                } else {
                    clean = false;
                }
            }
            if !clean {
                // keep eliminating; retry the full loop (pivot still present)
                continue;
            }
            if !rows[pi].iter().any(|(j, _)| *j != pj)
                && col_rows[pj].iter().all(|&r| r == pi || !row_live[r])
            {
                // fallthrough to retire pivot
            } else {
                continue;
            }
        }
        if rows[pi].keys().any(|&j| j != pj) {
            continue;
        }

        // retire the pivot
        diag.push(rows[pi].get(&pj).unwrap().abs());
        rows[pi].clear();
        col_rows[pj].clear();
        row_live[pi] = false;
    }

    normalize_divisibility_chain(&mut diag);
    diag
}

/// Convenience: invariant factors of a dense row list.
pub fn snf_invariants_of_rows(rows: &[Vec<BigInt>], ncols: usize) -> Vec<BigInt> {
    let mut m = SparseIntMatrix::zero(rows.len(), ncols);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            if !v.is_zero() {
                m.set(i, j, v.clone());
            }
        }
    }
    snf_invariants(&m)
}

fn fix_col_index_after_swap(
    rows: &[BTreeMap<usize, BigInt>],
    col_rows: &mut [BTreeSet<usize>],
    a: usize,
    b: usize,
) {
    for r in [a, b] {
        // remove stale presence, re-add actual
        for set in col_rows.iter_mut() {
            set.remove(&r);
        }
        for j in rows[r].keys() {
            col_rows[*j].insert(r);
        }
    }
}

fn row_axpy(
    rows: &mut [BTreeMap<usize, BigInt>],
    col_rows: &mut [BTreeSet<usize>],
    dst: usize,
    src: usize,
    scale: &BigInt,
) {
    let src_row = rows[src].clone();
    for (j, v) in src_row {
        let add = &v * scale;
        let entry = rows[dst].entry(j).or_insert_with(BigInt::zero);
        *entry += add;
        if entry.is_zero() {
            rows[dst].remove(&j);
            col_rows[j].remove(&dst);
        } else {
            col_rows[j].insert(dst);
        }
    }
}

fn col_axpy(
    rows: &mut [BTreeMap<usize, BigInt>],
    col_rows: &mut [BTreeSet<usize>],
    dst: usize,
    src: usize,
    scale: &BigInt,
    row_live: &[bool],
) {
    let src_rows: Vec<usize> = col_rows[src].iter().copied().collect();
    for r in src_rows {
        if !row_live[r] && rows[r].is_empty() {
            continue;
        }
        let v = rows[r].get(&src).cloned().unwrap_or_else(BigInt::zero);
        if v.is_zero() {
            continue;
        }
        let add = &v * scale;
        let entry = rows[r].entry(dst).or_insert_with(BigInt::zero);
        *entry += add;
        if entry.is_zero() {
            rows[r].remove(&dst);
            col_rows[dst].remove(&r);
        } else {
            col_rows[dst].insert(r);
        }
    }
}

fn col_swap(
    rows: &mut [BTreeMap<usize, BigInt>],
    col_rows: &mut [BTreeSet<usize>],
    a: usize,
    b: usize,
    _row_live: &[bool],
) {
    let touched: BTreeSet<usize> = col_rows[a].union(&col_rows[b]).copied().collect();
    for r in touched {
        let va = rows[r].remove(&a);
        let vb = rows[r].remove(&b);
        col_rows[a].remove(&r);
        col_rows[b].remove(&r);
        if let Some(v) = va {
            rows[r].insert(b, v);
            col_rows[b].insert(r);
        }
        if let Some(v) = vb {
            rows[r].insert(a, v);
            col_rows[a].insert(r);
        }
    }
}

/// Rounded division: quotient minimizing |a - q*b|.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let two_r = r.abs() * 2;
    if two_r > b.abs() {
        if (r.sign() == b.sign()) || r.is_zero() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}


/// Unimodular two-row transform sending (d[k][k], d[i][k]) to (gcd, 0):
/// rows (k, i) become (s k + t i, -(b/g) k + (a/g) i) with s a + t b = g.
fn bezout_rows(d: &mut IntMatrix, u: &mut IntMatrix, k: usize, i: usize) {
    let a = d[(k, k)].clone();
    let b = d[(i, k)].clone();
    if (&b % &a).is_zero() {
        let q = &b / &a;
        for j in 0..d.ncols {
            let t = &d[(k, j)] * &q;
            d[(i, j)] -= t;
        }
        for j in 0..u.ncols {
            let t = &u[(k, j)] * &q;
            u[(i, j)] -= t;
        }
        return;
    }
    let e = a.extended_gcd(&b);
    let (g, s, t) = (e.gcd, e.x, e.y);
    let (ca, cb) = (&a / &g, &b / &g);
    for j in 0..d.ncols {
        let rk = d[(k, j)].clone();
        let ri = d[(i, j)].clone();
        d[(k, j)] = &s * &rk + &t * &ri;
        d[(i, j)] = &rk * -&cb + &ri * &ca;
    }
    for j in 0..u.ncols {
        let rk = u[(k, j)].clone();
        let ri = u[(i, j)].clone();
        u[(k, j)] = &s * &rk + &t * &ri;
        u[(i, j)] = &rk * -&cb + &ri * &ca;
    }
}

/// Column version of the Bezout transform: (d[k][k], d[k][j]) -> (gcd, 0).
fn bezout_cols(d: &mut IntMatrix, v: &mut IntMatrix, k: usize, j: usize) {
    let a = d[(k, k)].clone();
    let b = d[(k, j)].clone();
    if (&b % &a).is_zero() {
        let q = &b / &a;
        for i in 0..d.nrows {
            let t = &d[(i, k)] * &q;
            d[(i, j)] -= t;
        }
        for i in 0..v.nrows {
            let t = &v[(i, k)] * &q;
            v[(i, j)] -= t;
        }
        return;
    }
    let e = a.extended_gcd(&b);
    let (g, s, t) = (e.gcd, e.x, e.y);
    let (ca, cb) = (&a / &g, &b / &g);
    for i in 0..d.nrows {
        let ck = d[(i, k)].clone();
        let cj = d[(i, j)].clone();
        d[(i, k)] = &s * &ck + &t * &cj;
        d[(i, j)] = &ck * -&cb + &cj * &ca;
    }
    for i in 0..v.nrows {
        let ck = v[(i, k)].clone();
        let cj = v[(i, j)].clone();
        v[(i, k)] = &s * &ck + &t * &cj;
        v[(i, j)] = &ck * -&cb + &cj * &ca;
    }
}

/// Enforce d_i | d_{i+1} on a diagonal of nonzero entries.
fn normalize_divisibility_chain(diag: &mut [BigInt]) {
    let n = diag.len();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in i + 1..n {
                if !(&diag[j] % &diag[i]).is_zero() {
                    let g = diag[i].gcd(&diag[j]);
                    let l = (&diag[i] * &diag[j]) / &g;
                    diag[i] = g;
                    diag[j] = l;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    diag.sort();
}

/// Dense integer matrix used by the transform-carrying Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<BigInt>, // row-major
}

impl IntMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        IntMatrix {
            nrows,
            ncols,
            entries: vec![BigInt::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = IntMatrix::zero(nrows, ncols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = BigInt::from(v);
            }
        }
        m
    }

    pub fn from_sparse(s: &SparseIntMatrix) -> Self {
        let mut m = IntMatrix::zero(s.nrows, s.ncols);
        for i in 0..s.nrows {
            for (j, v) in s.row(i) {
                m[(i, *j)] = v.clone();
            }
        }
        m
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, rhs.nrows);
        let mut out = IntMatrix::zero(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.ncols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let add = a * b;
                        out[(i, j)] += add;
                    }
                }
            }
        }
        out
    }

    /// Determinant by fraction-free Gaussian elimination (Bareiss).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.entries.clone();
        let idx = |i: usize, j: usize| i * n + j;
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[idx(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&p| !a[idx(p, k)].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.swap(idx(k, j), idx(p, j));
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[idx(k, k)] * &a[idx(i, j)] - &a[idx(i, k)] * &a[idx(k, j)]) / &prev;
                    a[idx(i, j)] = v;
                }
                a[idx(i, k)] = BigInt::zero();
            }
            prev = a[idx(k, k)].clone();
        }
        sign * a[idx(n - 1, n - 1)].clone()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.ncols + j]
    }
}

/// Smith normal form with unimodular transforms: `u * a * v` is diagonal
/// with a divisibility chain; `|det u| = |det v| = 1`.
pub struct SmithDecomposition {
    pub diag: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.nrows, a.ncols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    let row_add = |d: &mut IntMatrix, u: &mut IntMatrix, dst: usize, src: usize, c: &BigInt| {
        for j in 0..d.ncols {
            let t = &d[(src, j)] * c;
            d[(dst, j)] += t;
        }
        for j in 0..u.ncols {
            let t = &u[(src, j)] * c;
            u[(dst, j)] += t;
        }
    };
    let col_add = |d: &mut IntMatrix, v: &mut IntMatrix, dst: usize, src: usize, c: &BigInt| {
        for i in 0..d.nrows {
            let t = &d[(i, src)] * c;
            d[(i, dst)] += t;
        }
        for i in 0..v.nrows {
            let t = &v[(i, src)] * c;
            v[(i, dst)] += t;
        }
    };

    let mut k = 0;
    while k < m.min(n) {
        // find a pivot: smallest nonzero |entry| in the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                if !d[(i, j)].is_zero()
                    && pivot.is_none_or(|(pi, pj)| d[(i, j)].abs() < d[(pi, pj)].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        // move pivot to (k, k)
        if pi != k {
            for j in 0..n {
                let (lo, hi) = (k.min(pi), k.max(pi));
                let tmp = d[(lo, j)].clone();
                d[(lo, j)] = d[(hi, j)].clone();
                d[(hi, j)] = tmp;
            }
            for j in 0..m {
                let (lo, hi) = (k.min(pi), k.max(pi));
                let tmp = u[(lo, j)].clone();
                u[(lo, j)] = u[(hi, j)].clone();
                u[(hi, j)] = tmp;
            }
        }
        if pj != k {
            for i in 0..m {
                let (lo, hi) = (k.min(pj), k.max(pj));
                let tmp = d[(i, lo)].clone();
                d[(i, lo)] = d[(i, hi)].clone();
                d[(i, hi)] = tmp;
            }
            for i in 0..n {
                let (lo, hi) = (k.min(pj), k.max(pj));
                let tmp = v[(i, lo)].clone();
                v[(i, lo)] = v[(i, hi)].clone();
                v[(i, hi)] = tmp;
            }
        }
        // clean row/column k with Bezout two-row/two-column transforms (one
        // gcd step per entry), folding non-divisible trailing entries into
        // row k and recleaning until the pivot divides everything
        loop {
            loop {
                let mut changed = false;
                for i in k + 1..m {
                    if d[(i, k)].is_zero() {
                        continue;
                    }
                    bezout_rows(&mut d, &mut u, k, i);
                    changed = true;
                }
                for j in k + 1..n {
                    if d[(k, j)].is_zero() {
                        continue;
                    }
                    bezout_cols(&mut d, &mut v, k, j);
                    changed = true;
                }
                let col_clean = (k + 1..m).all(|i| d[(i, k)].is_zero());
                let row_clean = (k + 1..n).all(|j| d[(k, j)].is_zero());
                if col_clean && row_clean {
                    break;
                }
                if !changed {
                    unreachable!("elimination made no progress");
                }
            }
            // divisibility: fold a row containing an entry the pivot does not
            // divide into row k, then clean again (the pivot drops to a gcd)
            let pk = d[(k, k)].clone();
            let mut folded = false;
            'scan: for i in k + 1..m {
                for j in k + 1..n {
                    if !(&d[(i, j)] % &pk).is_zero() {
                        row_add(&mut d, &mut u, k, i, &BigInt::one());
                        folded = true;
                        break 'scan;
                    }
                }
            }
            if !folded {
                break;
            }
        }
        if d[(k, k)].is_negative() {
            for i in 0..m {
                let t = -d[(i, k)].clone();
                d[(i, k)] = t;
            }
            // keep u*a*v = d: negating a column of d means negating a column of v
            for i in 0..n {
                let t = -v[(i, k)].clone();
                v[(i, k)] = t;
            }
        }
        k += 1;
    }
    let diag: Vec<BigInt> = (0..m.min(n))
        .map(|i| d[(i, i)].clone())
        .filter(|x| !x.is_zero())
        .collect();
    SmithDecomposition { diag, u, v, d }
}

/// One integer solution of `m x = b`, if any exists, via the Smith form:
/// with u m v = d, solve d y = u b and set x = v y.
pub fn solve_integer_system(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.nrows);
    let dec = smith_normal_form(m);
    let rank = dec.diag.len();
    let mut ub = vec![BigInt::zero(); m.nrows];
    for i in 0..m.nrows {
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() && !dec.u[(i, j)].is_zero() {
                ub[i] += &dec.u[(i, j)] * bj;
            }
        }
    }
    let mut y = vec![BigInt::zero(); m.ncols];
    for (i, ubi) in ub.iter().enumerate() {
        if i < rank {
            let d = &dec.d[(i, i)];
            if (ubi % d) != BigInt::zero() {
                return None;
            }
            y[i] = ubi / d;
        } else if !ubi.is_zero() {
            return None;
        }
    }
    let mut x = vec![BigInt::zero(); m.ncols];
    for i in 0..m.ncols {
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() {
                x[i] += &dec.v[(i, j)] * yj;
            }
        }
    }
    Some(x)
}

/// Rank of the matrix over Z/p by sparse Gaussian elimination.
pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> usize {
    assert!(p >= 2);
    // reduce entries mod p
    let mut rows: Vec<BTreeMap<usize, u64>> = Vec::with_capacity(m.nrows);
    for i in 0..m.nrows {
        let mut r = BTreeMap::new();
        for (j, v) in m.row(i) {
            let mut x = (v % BigInt::from(p)).to_string().parse::<i64>().unwrap();
            if x < 0 {
                x += p as i64;
            }
            if x != 0 {
                r.insert(*j, x as u64);
            }
        }
        rows.push(r);
    }
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.ncols];
    for (i, r) in rows.iter().enumerate() {
        for j in r.keys() {
            col_rows[*j].insert(i);
        }
    }
    let inv = |a: u64| -> u64 { mod_pow(a, p - 2, p) }; // p prime
    let mut rank = 0;
    let mut row_done = vec![false; m.nrows];
    loop {
        // Markowitz-ish pivot: minimize (row_nnz - 1) * (col_nnz - 1)
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            if row_done[i] || r.is_empty() {
                continue;
            }
            for j in r.keys() {
                let score = (r.len() - 1) * (col_rows[*j].len().saturating_sub(1));
                if best.is_none_or(|(_, _, s)| score < s) {
                    best = Some((i, *j, score));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        rank += 1;
        let pval = rows[pi][&pj];
        let pinv = inv(pval);
        let prow: Vec<(usize, u64)> = rows[pi].iter().map(|(j, v)| (*j, *v)).collect();
        let targets: Vec<usize> = col_rows[pj]
            .iter()
            .copied()
            .filter(|&r| r != pi && !row_done[r])
            .collect();
        for t in targets {
            let Some(&tv) = rows[t].get(&pj) else {
                continue;
            };
            let c = (tv as u128 * pinv as u128 % p as u128) as u64; // t -= c * pivot_row
            for &(j, v) in &prow {
                let sub = (c as u128 * v as u128 % p as u128) as u64;
                let entry = rows[t].entry(j).or_insert(0);
                *entry = (*entry + p - sub) % p;
                if *entry == 0 {
                    rows[t].remove(&j);
                    col_rows[j].remove(&t);
                } else {
                    col_rows[j].insert(t);
                }
            }
        }
        // retire pivot row and column
        for j in rows[pi].keys() {
            col_rows[*j].remove(&pi);
        }
        rows[pi].clear();
        row_done[pi] = true;
        col_rows[pj].clear();
    }
    rank
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u64 = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Relation exponent matrix of a presentation (relators x generators).
pub fn relation_matrix(p: &Presentation) -> SparseIntMatrix {
    let mut m = SparseIntMatrix::zero(p.relators.len(), p.ngens());
    for (i, r) in p.relators.iter().enumerate() {
        for (j, e) in r.exponent_vector(p.ngens()).into_iter().enumerate() {
            if e != 0 {
                m.set(i, j, BigInt::from(e));
            }
        }
    }
    m
}

/// Abelianization invariants of a presentation via Smith normal form of its
/// relation exponent matrix.
pub fn abelian_invariants(p: &Presentation) -> AbelianInvariants {
    let m = relation_matrix(p);
    AbelianInvariants::from_invariant_factors(snf_invariants(&m), p.ngens())
}

/// Bounds on the free rank from ranks over Z/p: `free_rank <= ngens - rank_p`
/// for every p, with equality when p exceeds all torsion exponents. Returns
/// per-prime upper bounds; agreement across primes is the caller's signal.
pub fn free_rank_mod_p(p: &Presentation, primes: &[u64]) -> Vec<(u64, usize)> {
    let m = relation_matrix(p);
    primes
        .iter()
        .map(|&q| (q, p.ngens() - rank_mod_p(&m, q)))
        .collect()
}

/// Class-2 nilpotent quotient data of a word: exponent vector plus the basic
/// commutator vector over `c_{ij} = [g_i, g_j]`, `i < j`, with the
/// convention `[a, b] = a^-1 b^-1 a b`.
pub fn class2_collect(w: &crate::words::Word, ngens: usize) -> (Vec<i64>, Vec<i64>) {
    let k = ngens;
    let a = w.exponent_vector(k);
    let mut b = vec![0i64; k * (k - 1) / 2];
    let letters = w.letters();
    for t in 0..letters.len() {
        for u in t + 1..letters.len() {
            let (gt, gu) = (letters[t].gen, letters[u].gen);
            if gt > gu {
                // a later, smaller-indexed letter moves left past this one:
                // g_j^d g_i^e = g_i^e g_j^d c_{ij}^{-d e}
                let et = if letters[t].inverse { -1 } else { 1 };
                let eu = if letters[u].inverse { -1 } else { 1 };
                b[pair_index(gu, gt, k)] -= et * eu;
            }
        }
    }
    (a, b)
}

/// Index of `c_{ij}` (`i < j`) in the flattened basic-commutator basis.
pub fn pair_index(i: usize, j: usize, k: usize) -> usize {
    assert!(i < j && j < k);
    // pairs (0,1), (0,2), .., (0,k-1), (1,2), ..
    i * k - i * (i + 1) / 2 + (j - i - 1)
}

/// Invariants of the class-2 quotient of a presentation: the abelianization
/// together with the commutator section `[G,G] gamma_3 / gamma_3`.
///
/// The commutator section is `C / L` where `C` is free abelian on the basic
/// commutators `c_{ij}` and `L` is the image of the relator normal closure
/// in `C`: (a) the commutators `[r, g_l]` of relators with generators, and
/// (b) for integer combinations `x` with cancelling exponent parts, the
/// collected c-part `Q(x) = x.B + binomial and pairwise collection terms`,
/// generated over a kernel basis together with the polar forms of Q.
pub fn class2_quotient_invariants(p: &Presentation) -> (AbelianInvariants, AbelianInvariants) {
    let k = p.ngens();
    let kk = k * (k - 1) / 2;
    let m = p.relators.len();
    let mut a_rows: Vec<Vec<i64>> = Vec::with_capacity(m);
    let mut b_rows: Vec<Vec<i64>> = Vec::with_capacity(m);
    for r in &p.relators {
        let (a, b) = class2_collect(r, k);
        a_rows.push(a);
        b_rows.push(b);
    }
    let ab = abelian_invariants(p);

    // collection cross-term of two exponents: (a,b)(a',b') has c-part
    // b + b' + P(a,a') with P(a,a')_{ij} = -a_j a'_i for i < j
    let p_term = |u: &[i64], w: &[i64]| -> Vec<BigInt> {
        let mut row = vec![BigInt::zero(); kk];
        for i in 0..k {
            if w[i] == 0 {
                continue;
            }
            for j in i + 1..k {
                if u[j] != 0 {
                    row[pair_index(i, j, k)] -= BigInt::from(u[j]) * BigInt::from(w[i]);
                }
            }
        }
        row
    };

    let mut l_rows: Vec<Vec<BigInt>> = Vec::new();
    // (a) conjugation corrections [r, g_l]
    for a in &a_rows {
        for l in 0..k {
            let mut row = vec![BigInt::zero(); kk];
            let mut nonzero = false;
            for (i, &ai) in a.iter().enumerate() {
                if ai == 0 || i == l {
                    continue;
                }
                let (lo, hi, sign) = if i < l { (i, l, 1) } else { (l, i, -1) };
                row[pair_index(lo, hi, k)] += BigInt::from(sign * ai);
                nonzero = true;
            }
            if nonzero {
                l_rows.push(row);
            }
        }
    }
    // (b) collected c-parts of exponent-cancelling relator combinations
    if m > 0 {
        let a_mat = {
            let mut mm = IntMatrix::zero(m, k);
            for (i, row) in a_rows.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    mm[(i, j)] = BigInt::from(*v);
                }
            }
            mm
        };
        let dec = smith_normal_form(&a_mat);
        let rank = dec.diag.len();
        // rows of u beyond the rank form a basis of the left kernel of a_mat
        let kernel: Vec<Vec<BigInt>> = (rank..m)
            .map(|i| (0..m).map(|r| dec.u[(i, r)].clone()).collect())
            .collect();
        // nonzero-exponent relators are the only quadratic contributors
        let quad: Vec<usize> = (0..m)
            .filter(|&r| a_rows[r].iter().any(|&v| v != 0))
            .collect();
        let pairwise: Vec<Vec<Vec<BigInt>>> = quad
            .iter()
            .map(|&l| {
                quad.iter()
                    .map(|&mm2| p_term(&a_rows[l], &a_rows[mm2]))
                    .collect()
            })
            .collect();
        let q_of = |x: &[BigInt]| -> Vec<BigInt> {
            let mut row = vec![BigInt::zero(); kk];
            for (r, br) in b_rows.iter().enumerate() {
                if x[r].is_zero() {
                    continue;
                }
                for (j, &bv) in br.iter().enumerate() {
                    if bv != 0 {
                        row[j] += &x[r] * BigInt::from(bv);
                    }
                }
            }
            for (li, &l) in quad.iter().enumerate() {
                let xl = &x[l];
                if xl.is_zero() {
                    continue;
                }
                // binomial term C(x_l, 2) * P(a_l, a_l)
                let binom: BigInt = (xl * (xl - BigInt::one())) / 2;
                if !binom.is_zero() {
                    for (j, v) in pairwise[li][li].iter().enumerate() {
                        if !v.is_zero() {
                            row[j] += &binom * v;
                        }
                    }
                }
                // ordered pairwise terms x_l x_m * P(a_l, a_m), l < m
                for (mi, &mm2) in quad.iter().enumerate().skip(li + 1) {
                    let xm = &x[mm2];
                    if xm.is_zero() {
                        continue;
                    }
                    let c = xl * xm;
                    for (j, v) in pairwise[li][mi].iter().enumerate() {
                        if !v.is_zero() {
                            row[j] += &c * v;
                        }
                    }
                }
            }
            row
        };
        for x in &kernel {
            l_rows.push(q_of(x));
        }
        // polar forms close the set {Q(x)} into a subgroup:
        // polar(x, y) = sum_l x_l y_l P(a_l, a_l)
        //             + sum_{l<m} (x_l y_m + y_l x_m) P(a_l, a_m)
        for i in 0..kernel.len() {
            for j in i + 1..kernel.len() {
                let (x, y) = (&kernel[i], &kernel[j]);
                let mut row = vec![BigInt::zero(); kk];
                for (li, &l) in quad.iter().enumerate() {
                    for (mi, &mm2) in quad.iter().enumerate() {
                        if mi < li {
                            continue;
                        }
                        let c = if li == mi {
                            &x[l] * &y[l]
                        } else {
                            &x[l] * &y[mm2] + &y[l] * &x[mm2]
                        };
                        if c.is_zero() {
                            continue;
                        }
                        for (t, v) in pairwise[li][mi].iter().enumerate() {
                            if !v.is_zero() {
                                row[t] += &c * v;
                            }
                        }
                    }
                }
                if row.iter().any(|v| !v.is_zero()) {
                    l_rows.push(row);
                }
            }
        }
    }
    let comm = AbelianInvariants::from_invariant_factors(snf_invariants_of_rows(&l_rows, kk), kk);
    (ab, comm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn snf_diag_2_3_gives_1_6() {
        let m = SparseIntMatrix::from_rows_i64(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(snf_invariants(&m), vec![big(1), big(6)]);
    }

    #[test]
    fn snf_zero_matrix_has_no_factors() {
        let m = SparseIntMatrix::zero(9, 4);
        assert!(snf_invariants(&m).is_empty());
    }

    #[test]
    fn snf_with_transforms_reconstructs() {
        let a = IntMatrix::from_rows_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let dec = smith_normal_form(&a);
        assert_eq!(dec.u.det().abs(), big(1));
        assert_eq!(dec.v.det().abs(), big(1));
        let uav = dec.u.mul(&a).mul(&dec.v);
        assert_eq!(uav, dec.d);
        // det = 624; gcd of entries 2, gcd of 2x2 minors 4
        assert_eq!(dec.diag, vec![big(2), big(2), big(156)]);
        // sparse route agrees
        let s = SparseIntMatrix::from_rows_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        assert_eq!(snf_invariants(&s), dec.diag);
    }

    #[test]
    fn integer_system_solver() {
        let m = IntMatrix::from_rows_i64(&[vec![2, 4], vec![0, 3]]);
        let b = vec![big(6), big(3)];
        let x = solve_integer_system(&m, &b).unwrap();
        assert_eq!(&m[(0, 0)] * &x[0] + &m[(0, 1)] * &x[1], big(6));
        assert_eq!(&m[(1, 0)] * &x[0] + &m[(1, 1)] * &x[1], big(3));
        // 2x = 1 has no integer solution
        let m1 = IntMatrix::from_rows_i64(&[vec![2]]);
        assert!(solve_integer_system(&m1, &[big(1)]).is_none());
        // inconsistent overdetermined system
        let m2 = IntMatrix::from_rows_i64(&[vec![1], vec![1]]);
        assert!(solve_integer_system(&m2, &[big(0), big(1)]).is_none());
    }

    #[test]
    fn rank_mod_p_on_small_matrix() {
        let m = SparseIntMatrix::from_rows_i64(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        assert_eq!(rank_mod_p(&m, 101), 2);
        assert_eq!(rank_mod_p(&m, 2), 2);
    }

    #[test]
    fn heisenberg_abelianization() {
        // <c1,c2,c3 | [c1,c2]c3^-1, [c1,c3], [c2,c3]>
        let c1 = Word::gen(0);
        let c2 = Word::gen(1);
        let c3 = Word::gen(2);
        let p = Presentation::new(
            vec!["c1".into(), "c2".into(), "c3".into()],
            vec![
                Word::comm(&c1, &c2).mul(&c3.inverse()),
                Word::comm(&c1, &c3),
                Word::comm(&c2, &c3),
            ],
        );
        let inv = abelian_invariants(&p);
        assert_eq!(inv.free_rank, 2);
        assert!(inv.torsion.is_empty());
        let (ab, comm) = class2_quotient_invariants(&p);
        assert!(ab.is_free_of_rank(2));
        assert!(comm.is_free_of_rank(1));
    }

    #[test]
    fn class2_of_free_groups() {
        let p = Presentation::free(&["a", "b"]);
        let (ab, comm) = class2_quotient_invariants(&p);
        assert!(ab.is_free_of_rank(2));
        assert!(comm.is_free_of_rank(1));
        let p3 = Presentation::free(&["a", "b", "c"]);
        let (ab, comm) = class2_quotient_invariants(&p3);
        assert!(ab.is_free_of_rank(3));
        assert!(comm.is_free_of_rank(3));
    }

    #[test]
    fn class2_with_power_relator() {
        // <g1, g2 | g1^2>: commutator section is Z/2
        let p = Presentation::new(vec!["g1".into(), "g2".into()], vec![Word::gen(0).pow(2)]);
        let (ab, comm) = class2_quotient_invariants(&p);
        assert_eq!(ab.free_rank, 1);
        assert_eq!(ab.torsion, vec![big(2)]);
        assert_eq!(comm.free_rank, 0);
        assert_eq!(comm.torsion, vec![big(2)]);
    }

    #[test]
    fn class2_collection_matches_heisenberg_matrices() {
        // oracle: evaluate words in UT3(Z) and compare with collected coordinates
        #[derive(Clone, PartialEq)]
        struct Ut3([i64; 3]); // (a, b, c): [[1,a,c],[0,1,b],[0,0,1]]
        impl crate::words::GroupElement for Ut3 {
            fn mul(&self, r: &Self) -> Self {
                Ut3([
                    self.0[0] + r.0[0],
                    self.0[1] + r.0[1],
                    self.0[2] + r.0[2] + self.0[0] * r.0[1],
                ])
            }
            fn inv(&self) -> Self {
                Ut3([-self.0[0], -self.0[1], self.0[0] * self.0[1] - self.0[2]])
            }
        }
        use crate::words::{evaluate_word, Convention};
        let x = Ut3([1, 0, 0]);
        let y = Ut3([0, 1, 0]);
        let id = Ut3([0, 0, 0]);
        // random-ish words over {x, y}
        let words = [
            vec![1, 2, 1, 2],
            vec![-1, 2, 2, 1, -2],
            vec![2, 1, -2, -1, 2, 1],
            vec![-2, -1, 2, 1, 1, 2, -1],
        ];
        for w in words {
            let w = Word::from_signed(&w);
            let m =
                evaluate_word(&w, &[x.clone(), y.clone()], &id, Convention::LeftToRight).unwrap();
            let (a, b) = class2_collect(&w, 2);
            assert_eq!(m.0[0], a[0]);
            assert_eq!(m.0[1], a[1]);
            // x^a1 y^a2 z^b has top-right entry a1*a2 + b, with z = [x, y]
            assert_eq!(m.0[2], a[0] * a[1] + b[0], "word {w:?}");
        }
    }

    #[test]
    fn dump_triplets_shape() {
        let m = SparseIntMatrix::from_rows_i64(&[vec![0, 5], vec![7, 0]]);
        let d = m.dump_triplets();
        assert!(d.contains("0 1 5"));
        assert!(d.contains("1 0 7"));
    }
}
