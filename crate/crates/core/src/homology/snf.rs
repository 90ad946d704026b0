//! Smith normal form over ℤ.
//!
//! Boundary matrices of order complexes are sparse with ±1 entries, so most
//! of the rank is peeled off by eliminating unit pivots on a sparse
//! representation in checked `i64`. Whatever is left is reduced densely
//! over `BigInt`, always pivoting on an entry of smallest magnitude.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Integer matrix stored by columns as `(row, value)` pairs, rows ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.columns[j].push((i, v));
                }
            }
        }
        m
    }

    /// Build from per-column entries; zero entries are dropped.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = columns.len();
        let columns = columns
            .into_iter()
            .map(|mut c| {
                c.retain(|&(_, v)| v != 0);
                c.sort_unstable();
                assert!(c.iter().all(|&(r, _)| r < rows), "row index out of range");
                c
            })
            .collect();
        Self { rows, cols, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.columns[j]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.columns[j].iter().find(|&&(r, _)| r == i).map_or(0, |&(_, v)| v)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                out[i][j] = v;
            }
        }
        out
    }

    /// `self * rhs`, or `None` on overflow or shape mismatch.
    pub fn checked_mul(&self, rhs: &SparseMatrix) -> Option<SparseMatrix> {
        if self.cols != rhs.rows {
            return None;
        }
        let mut columns = Vec::with_capacity(rhs.cols);
        for col in &rhs.columns {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(k, b) in col {
                for &(i, a) in &self.columns[k] {
                    let e = acc.entry(i).or_insert(0);
                    *e = e.checked_add(a.checked_mul(b)?)?;
                }
            }
            columns.push(acc.into_iter().filter(|&(_, v)| v != 0).collect());
        }
        Some(SparseMatrix { rows: self.rows, cols: rhs.cols, columns })
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }
}

/// Nonzero diagonal of the Smith normal form, `d_1 | d_2 | …`, all positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub invariant_factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> impl Iterator<Item = &BigInt> + '_ {
        self.invariant_factors.iter().filter(|d| !d.is_one())
    }
}

/// Smith normal form via sparse unit-pivot elimination followed by a dense
/// reduction of the remainder. Falls back to the dense route on the whole
/// matrix if the sparse phase would overflow `i64`.
pub fn smith_normal_form(m: &SparseMatrix) -> SmithForm {
    match eliminate_unit_pivots(m) {
        Some((units, rest)) => {
            let mut factors = vec![BigInt::one(); units];
            factors.extend(dense_invariant_factors(rest));
            SmithForm { invariant_factors: factors }
        }
        None => {
            let dense = m.to_dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
            SmithForm { invariant_factors: dense_invariant_factors(dense) }
        }
    }
}

/// Smith normal form of a dense matrix, entirely over `BigInt`.
pub fn smith_normal_form_dense(m: &[Vec<i64>]) -> SmithForm {
    let dense = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    SmithForm { invariant_factors: dense_invariant_factors(dense) }
}

// Returns the number of unit pivots removed and the remaining dense block.
fn eliminate_unit_pivots(m: &SparseMatrix) -> Option<(usize, Vec<Vec<BigInt>>)> {
    let mut rows: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); m.rows];
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (j, col) in m.columns.iter().enumerate() {
        for &(i, v) in col {
            rows[i].insert(j, v);
            cols[j].insert(i);
        }
    }
    let mut row_alive = vec![true; m.rows];
    let mut col_alive = vec![true; m.cols];
    let mut units = 0;
    let mut progress = true;
    while progress {
        progress = false;
        for c in 0..m.cols {
            if !col_alive[c] {
                continue;
            }
            if cols[c].is_empty() {
                col_alive[c] = false;
                continue;
            }
            // unit entry in the sparsest row
            let Some(r) = cols[c].iter().copied().filter(|&r| rows[r][&c].abs() == 1).min_by_key(|&r| rows[r].len())
            else {
                continue;
            };
            let pivot = rows[r][&c];
            let pivot_row: Vec<(usize, i64)> = rows[r].iter().map(|(&j, &v)| (j, v)).collect();
            let others: Vec<usize> = cols[c].iter().copied().filter(|&i| i != r).collect();
            for i in others {
                // row_i -= (a_ic / pivot) * row_r, and 1/pivot = pivot
                let factor = rows[i][&c].checked_mul(pivot)?;
                for &(j, v) in &pivot_row {
                    let delta = factor.checked_mul(v)?;
                    let entry = rows[i].entry(j).or_insert(0);
                    *entry = entry.checked_sub(delta)?;
                    if *entry == 0 {
                        rows[i].remove(&j);
                        cols[j].remove(&i);
                    } else {
                        cols[j].insert(i);
                    }
                }
            }
            // column c now holds only the pivot; drop row r and column c
            for &(j, _) in &pivot_row {
                cols[j].remove(&r);
            }
            rows[r].clear();
            row_alive[r] = false;
            col_alive[c] = false;
            units += 1;
            progress = true;
        }
    }
    let live_rows: Vec<usize> = (0..m.rows).filter(|&i| row_alive[i] && !rows[i].is_empty()).collect();
    let live_cols: Vec<usize> = (0..m.cols).filter(|&j| col_alive[j] && !cols[j].is_empty()).collect();
    let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    let rest = live_rows
        .iter()
        .map(|&i| {
            let mut row = vec![BigInt::zero(); live_cols.len()];
            for (&j, &v) in &rows[i] {
                row[col_pos[&j]] = BigInt::from(v);
            }
            row
        })
        .collect();
    Some((units, rest))
}

fn dense_invariant_factors(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut factors = Vec::new();
    for t in 0..nrows.min(ncols) {
        let Some((pi, pj)) = min_entry(&a, t) else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            // clear column t below the pivot
            for i in (t + 1)..nrows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                let pivot_row = a[t].clone();
                for (x, p) in a[i][t..].iter_mut().zip(&pivot_row[t..]) {
                    *x -= &q * p;
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            // clear row t right of the pivot
            for j in (t + 1)..ncols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a[t..].iter_mut() {
                    let p = row[t].clone();
                    row[j] -= &q * p;
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a smaller remainder appeared in row or column t: re-pivot on it
                let (pi, pj) = min_entry(&a, t).expect("nonzero entries remain");
                a.swap(t, pi);
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
                continue;
            }
            // pivot must divide the rest of the block
            let bad = ((t + 1)..nrows).find(|&i| a[i][(t + 1)..].iter().any(|x| !x.is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    let row = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(row) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        factors.push(a[t][t].abs());
    }
    factors
}

fn min_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
                if x.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}
