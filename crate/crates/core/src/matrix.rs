//! Dense matrices of truncated series, with rank, determinant and solve.
//!
//! Elimination never divides by a non-unit. Unit pivots are used whenever one
//! is available; otherwise rank uses division-free cross multiplication and
//! the determinant finishes the remaining block by Laplace expansion.

// Elimination updates row i from row k in place; index loops read clearer.
#![allow(clippy::needless_range_loop)]

use std::fmt;

use num_traits::One;

use crate::error::{Result, WebError};
use crate::series::{Rational, TruncatedSeries};

#[derive(Clone, PartialEq, Eq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TruncatedSeries>,
}

/// One pivot chosen during rank elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotRecord {
    pub row: usize,
    pub col: usize,
    pub valuation: usize,
    pub order: usize,
    pub unit: bool,
}

/// Outcome of [`SeriesMatrix::rank`]: the generic rank plus how it was decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDecision {
    pub rank: usize,
    pub pivots: Vec<PivotRecord>,
    /// Precision at which the leftover block was declared zero, if any was left.
    pub zero_precision: Option<usize>,
}

impl SeriesMatrix {
    pub fn zeros(rows: usize, cols: usize, order: usize) -> Self {
        Self { rows, cols, entries: vec![TruncatedSeries::zero(order); rows * cols] }
    }

    pub fn identity(n: usize, order: usize) -> Self {
        let mut m = Self::zeros(n, n, order);
        for i in 0..n {
            m.set(i, i, TruncatedSeries::one(order));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<TruncatedSeries>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Self { rows: nrows, cols: ncols, entries: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &TruncatedSeries {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: TruncatedSeries) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[TruncatedSeries] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<TruncatedSeries>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[TruncatedSeries] {
        &self.entries
    }

    /// Working precision: the minimum of the entry orders.
    pub fn order(&self) -> usize {
        self.entries.iter().map(TruncatedSeries::order).min().unwrap_or(usize::MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TruncatedSeries::is_zero)
    }

    pub fn map(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&TruncatedSeries) -> Result<TruncatedSeries>) -> Result<Self> {
        Ok(Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn derive_x(&self) -> Result<Self> {
        self.try_map(TruncatedSeries::derive_x)
    }

    pub fn derive_y(&self) -> Result<Self> {
        self.try_map(TruncatedSeries::derive_y)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let order = self.order().min(other.order());
        let mut out = Self::zeros(self.rows, other.cols, order);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add_ref(&a.mul_ref(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul_row(&self, row: &[TruncatedSeries]) -> Vec<TruncatedSeries> {
        assert_eq!(row.len(), self.rows);
        let order = row.iter().map(TruncatedSeries::order).chain([self.order()]).min().unwrap_or(0);
        (0..self.cols)
            .map(|j| {
                row.iter().enumerate().fold(TruncatedSeries::zero(order), |acc, (k, r)| {
                    if r.is_zero() || self.get(k, j).is_zero() {
                        acc
                    } else {
                        acc.add_ref(&r.mul_ref(self.get(k, j)))
                    }
                })
            })
            .collect()
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[TruncatedSeries]) -> Vec<TruncatedSeries> {
        assert_eq!(v.len(), self.cols);
        let order = v.iter().map(TruncatedSeries::order).chain([self.order()]).min().unwrap_or(0);
        (0..self.rows)
            .map(|i| {
                v.iter().enumerate().fold(TruncatedSeries::zero(order), |acc, (k, x)| {
                    if x.is_zero() || self.get(i, k).is_zero() {
                        acc
                    } else {
                        acc.add_ref(&self.get(i, k).mul_ref(x))
                    }
                })
            })
            .collect()
    }

    pub fn trace(&self) -> TruncatedSeries {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).fold(TruncatedSeries::zero(self.order()), |acc, i| acc.add_ref(self.get(i, i)))
    }

    /// Determinant over the series ring, exact at the working precision.
    pub fn determinant(&self) -> Result<TruncatedSeries> {
        if self.rows != self.cols {
            return Err(WebError::Dimension(format!("determinant of {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let order = self.order();
        if n == 0 {
            return Ok(TruncatedSeries::one(order));
        }
        let mut a = self.to_rows();
        let mut det = TruncatedSeries::one(order);
        let mut negate = false;
        for k in 0..n {
            let Some((pr, pc)) = find_unit(&a, k) else {
                let block: Vec<Vec<TruncatedSeries>> = a[k..].iter().map(|r| r[k..].to_vec()).collect();
                det = det.mul_ref(&laplace_determinant(&block, order));
                return Ok(if negate { det.neg_ref() } else { det });
            };
            if pr != k {
                a.swap(pr, k);
                negate = !negate;
            }
            if pc != k {
                for row in a.iter_mut() {
                    row.swap(pc, k);
                }
                negate = !negate;
            }
            let pivot = a[k][k].clone();
            det = det.mul_ref(&pivot);
            let inv = pivot.invert()?;
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].mul_ref(&inv);
                for j in k + 1..n {
                    if !a[k][j].is_zero() {
                        a[i][j] = a[i][j].sub_ref(&f.mul_ref(&a[k][j]));
                    }
                }
            }
        }
        Ok(if negate { det.neg_ref() } else { det })
    }

    /// Rank over the fraction field of the series ring, with zero-tests at
    /// the working precision of each entry.
    pub fn rank(&self) -> Result<RankDecision> {
        let (nr, nc) = (self.rows, self.cols);
        let mut a = self.to_rows();
        let mut row_id: Vec<usize> = (0..nr).collect();
        let mut col_id: Vec<usize> = (0..nc).collect();
        let mut pivots = Vec::new();
        let mut k = 0;
        while k < nr.min(nc) {
            // Pick the remaining entry of least valuation; units first.
            let mut best: Option<(usize, usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(k) {
                for (j, e) in row.iter().enumerate().skip(k) {
                    if let Some(v) = e.valuation() {
                        if best.is_none_or(|(_, _, bv)| v < bv) {
                            best = Some((i, j, v));
                        }
                    }
                }
            }
            let Some((pr, pc, val)) = best else { break };
            a.swap(pr, k);
            row_id.swap(pr, k);
            for row in a.iter_mut() {
                row.swap(pc, k);
            }
            col_id.swap(pc, k);
            let pivot = a[k][k].clone();
            pivots.push(PivotRecord { row: row_id[k], col: col_id[k], valuation: val, order: pivot.order(), unit: val == 0 });
            if val == 0 {
                let inv = pivot.invert()?;
                for i in k + 1..nr {
                    if a[i][k].is_zero() {
                        continue;
                    }
                    let f = a[i][k].mul_ref(&inv);
                    for j in k + 1..nc {
                        if !a[k][j].is_zero() {
                            a[i][j] = a[i][j].sub_ref(&f.mul_ref(&a[k][j]));
                        }
                    }
                }
            } else {
                for i in k + 1..nr {
                    let f = a[i][k].clone();
                    if f.is_zero() {
                        continue;
                    }
                    for j in k + 1..nc {
                        a[i][j] = pivot.mul_ref(&a[i][j]).sub_ref(&f.mul_ref(&a[k][j]));
                    }
                }
            }
            k += 1;
        }
        let leftover: Vec<&TruncatedSeries> = a.iter().skip(k).flat_map(|r| r.iter().skip(k)).collect();
        let zero_precision = leftover.iter().map(|e| e.order()).min();
        if zero_precision == Some(0) {
            return Err(WebError::PrecisionExhausted { context: format!("rank decision after {k} pivots has no known coefficients left") });
        }
        Ok(RankDecision { rank: k, pivots, zero_precision })
    }

    /// Solves `self * u = rhs` for a matrix invertible at the origin.
    pub fn solve(&self, rhs: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>> {
        let n = self.rows;
        if n != self.cols || rhs.len() != n {
            return Err(WebError::Dimension("solve needs a square system".into()));
        }
        let mut a = self.to_rows();
        let mut b = rhs.to_vec();
        for k in 0..n {
            let pr = (k..n).find(|&i| a[i][k].is_unit()).ok_or(WebError::NotAUnit)?;
            a.swap(pr, k);
            b.swap(pr, k);
            let inv = a[k][k].invert()?;
            for j in k..n {
                a[k][j] = a[k][j].mul_ref(&inv);
            }
            b[k] = b[k].mul_ref(&inv);
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in k..n {
                    if !a[k][j].is_zero() {
                        a[i][j] = a[i][j].sub_ref(&f.mul_ref(&a[k][j]));
                    }
                }
                b[i] = b[i].sub_ref(&f.mul_ref(&b[k]));
            }
        }
        Ok(b)
    }
}

fn find_unit(a: &[Vec<TruncatedSeries>], k: usize) -> Option<(usize, usize)> {
    // Prefer constant pivots with small size.
    let n = a.len();
    let mut best: Option<(usize, usize, u64)> = None;
    for (i, row) in a.iter().enumerate().take(n).skip(k) {
        for (j, e) in row.iter().enumerate().skip(k) {
            if e.is_unit() {
                let w = e.max_bits();
                if best.is_none_or(|(_, _, bw)| w < bw) {
                    best = Some((i, j, w));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Division-free determinant by expansion over column subsets.
fn laplace_determinant(block: &[Vec<TruncatedSeries>], order: usize) -> TruncatedSeries {
    let n = block.len();
    let mut dp: Vec<Option<TruncatedSeries>> = vec![None; 1 << n];
    dp[0] = Some(TruncatedSeries::one(order));
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize;
        let row = &block[k - 1];
        let mut acc = TruncatedSeries::zero(order);
        for c in 0..n {
            if mask & (1 << c) == 0 || row[c].is_zero() {
                continue;
            }
            let Some(minor) = &dp[mask & !(1 << c)] else { continue };
            if minor.is_zero() {
                continue;
            }
            let above = (mask >> (c + 1)).count_ones();
            let term = row[c].mul_ref(minor);
            acc = if above % 2 == 0 { acc.add_ref(&term) } else { acc.sub_ref(&term) };
        }
        dp[mask] = Some(acc);
    }
    dp[(1 << n) - 1].take().unwrap_or_else(|| TruncatedSeries::one(order))
}

impl fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SeriesMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

/// Exact Gaussian elimination over the rationals; returns the inverse of a
/// square matrix or `None` when it is singular.
pub fn rational_inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { num_traits::Zero::zero() }));
            r
        })
        .collect();
    for k in 0..n {
        let pr = (k..n).find(|&i| !num_traits::Zero::is_zero(&a[i][k]))?;
        a.swap(pr, k);
        let inv = a[k][k].recip();
        for v in a[k].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..n {
            if i == k || num_traits::Zero::is_zero(&a[i][k]) {
                continue;
            }
            let f = a[i][k].clone();
            let pivot_row = a[k].clone();
            for (v, p) in a[i].iter_mut().zip(&pivot_row) {
                *v = &*v - &f * p;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Rank and nullspace basis of a rational matrix (rows x cols).
pub fn rational_nullspace(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    use num_traits::Zero;
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(pr, r);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = &*v - &f * p;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rational::zero(); cols];
            v[fc] = Rational::one();
            for (pi, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[pi][fc].clone();
            }
            v
        })
        .collect()
}

/// Rank of a rational matrix.
pub fn rational_rank(m: &[Vec<Rational>], cols: usize) -> usize {
    cols - rational_nullspace(m, cols).len()
}
