//! Dense bit-packed matrices over GF(2).
//!
//! Rows are stored as `u64` words, bit `j % 64` of word `j / 64` holding
//! column `j`. Padding bits past `n_cols` are always zero, so derived
//! equality and hashing are entrywise.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n_rows: usize,
    n_cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        let stride = n_cols.div_ceil(WORD);
        Self {
            n_rows,
            n_cols,
            stride,
            words: vec![0; n_rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// The exchange matrix `J_n` (ones on the anti-diagonal).
    pub fn exchange(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, n - 1 - i, true);
        }
        m
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from nested 0/1 rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), n_cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), n_cols, "ragged row {i}");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix whose column `j` is given by the low `n_rows` bits of `cols[j]`.
    pub fn from_columns(n_rows: usize, cols: &[u64]) -> Self {
        debug_assert!(n_rows <= WORD);
        Self::from_fn(n_rows, cols.len(), |i, j| cols[j] >> i & 1 == 1)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        self.words[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        let w = &mut self.words[i * self.stride + j / WORD];
        let bit = 1u64 << (j % WORD);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        self.words[i * self.stride + j / WORD] ^= 1u64 << (j % WORD);
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row_words(i).iter().all(|&w| w == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In-place `row[dst] ^= row[src]`, i.e. left multiplication by `E_{src,dst}`.
    #[inline]
    pub fn add_row(&mut self, src: usize, dst: usize) {
        debug_assert!(src != dst);
        let s = self.stride;
        let (a, b) = (src * s, dst * s);
        for k in 0..s {
            let v = self.words[a + k];
            self.words[b + k] ^= v;
        }
    }

    /// Checked row addition returning a new matrix.
    pub fn row_add(&self, src: usize, dst: usize) -> Result<Self> {
        for idx in [src, dst] {
            if idx >= self.n_rows {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    bound: self.n_rows,
                });
            }
        }
        if src == dst {
            return Err(Error::SameRow(src));
        }
        let mut out = self.clone();
        out.add_row(src, dst);
        Ok(out)
    }

    /// In-place `col[dst] ^= col[src]`, i.e. right multiplication by `E_{dst,src}`.
    pub fn add_col(&mut self, src: usize, dst: usize) {
        debug_assert!(src != dst);
        for i in 0..self.n_rows {
            if self.get(i, src) {
                self.flip(i, dst);
            }
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.words.swap(a * s + k, b * s + k);
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |i, j| self.get(j, i))
    }

    pub fn mat_mul(&self, rhs: &Self) -> Result<Self> {
        if self.n_cols != rhs.n_rows {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: rhs.n_rows,
            });
        }
        let mut out = Self::zeros(self.n_rows, rhs.n_cols);
        let s = out.stride;
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                if self.get(i, k) {
                    let src = rhs.row_words(k);
                    let dst = &mut out.words[i * s..(i + 1) * s];
                    for (d, &w) in dst.iter_mut().zip(src) {
                        *d ^= w;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Copies the entries at the given rows and columns, in the given orders.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// Column `j` as a bit mask over rows; only valid for `n_rows <= 64`.
    pub fn column_bits(&self, j: usize) -> u64 {
        debug_assert!(self.n_rows <= WORD);
        (0..self.n_rows).fold(0, |acc, i| acc | (self.get(i, j) as u64) << i)
    }

    /// Row `i` as a bit mask over columns; only valid for `n_cols <= 64`.
    pub fn row_bits(&self, i: usize) -> u64 {
        debug_assert!(self.n_cols <= WORD);
        if self.stride == 0 {
            0
        } else {
            self.words[i * self.stride]
        }
    }

    /// Reduces rows in place to reduced row-echelon form; returns the pivot columns.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..self.n_cols {
            if rank == self.n_rows {
                break;
            }
            let Some(r) = (rank..self.n_rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(r, rank);
            for other in 0..self.n_rows {
                if other != rank && self.get(other, c) {
                    self.add_row(rank, other);
                }
            }
            pivots.push(c);
            rank += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.n_rows
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        let n = self.n_rows;
        let mut work = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let r = (c..n).find(|&r| work.get(r, c)).ok_or(Error::Singular)?;
            work.swap_rows(r, c);
            inv.swap_rows(r, c);
            for other in 0..n {
                if other != c && work.get(other, c) {
                    work.add_row(c, other);
                    inv.add_row(c, other);
                }
            }
        }
        Ok(inv)
    }

    /// Reduced column-echelon form.
    ///
    /// The pivot of a column is its topmost one; columns are ordered by
    /// increasing pivot row, every pivot row has a single one, and zero
    /// columns come last. Two matrices with the same column space map to the
    /// same form.
    pub fn rcef(&self) -> Self {
        let mut t = self.transpose();
        t.rref_in_place();
        t.transpose()
    }

    /// True iff every entry with `i + j > n - 1` is zero.
    pub fn is_northwest(&self) -> bool {
        let n = self.n_rows;
        (0..n).all(|i| ((n - i)..self.n_cols).all(|j| !self.get(i, j)))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n_rows).all(|i| (0..i.min(self.n_cols)).all(|j| !self.get(i, j)))
    }

    /// A random invertible `n x n` matrix, resampled until full rank;
    /// deterministic in `seed`.
    pub fn random_invertible(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_invertible_with(n, &mut rng)
    }

    pub fn random_invertible_with(n: usize, rng: &mut impl RngCore) -> Self {
        assert!(n >= 1, "matrix dimension must be positive");
        loop {
            let m = Self::random_with(n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    pub fn random_with(n_rows: usize, n_cols: usize, rng: &mut impl RngCore) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        let tail = n_cols % WORD;
        for i in 0..n_rows {
            for k in 0..m.stride {
                let mut w = rng.next_u64();
                if k + 1 == m.stride && tail != 0 {
                    w &= (1u64 << tail) - 1;
                }
                m.words[i * m.stride + k] = w;
            }
        }
        m
    }
}

impl fmt::Display for BitMatrix {
    /// One line per row of `0`/`1` characters.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            if i + 1 < self.n_rows {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{} [", self.n_rows, self.n_cols)?;
        for i in 0..self.n_rows {
            if i > 0 {
                f.write_str(" ")?;
            }
            for j in 0..self.n_cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
        }
        f.write_str("]")
    }
}

/// Output of [`upl_decompose`]: an upper-triangular operator with permuted
/// columns and the row labels under which it satisfies the first sorting
/// invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UplResult {
    pub v: BitMatrix,
    pub labels: Vec<usize>,
}

/// Splits an invertible `a` as `V · W` with `W` north-west triangular.
///
/// Follows the tuned LU elimination: columns are processed right to left,
/// each pivot is the bottom-most one of its column, and the row operations
/// are accumulated into `U` as column operations. The returned `v` is `U`
/// with columns permuted by the labels, so that row `i` with label `k`
/// has `v[i,k] = 1` and `v[j,k] = 0` for all `j > i`.
pub fn upl_decompose(a: &BitMatrix) -> Result<UplResult> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        });
    }
    let n = a.n_rows();
    let mut a = a.clone();
    let mut u = BitMatrix::identity(n);
    for i in (0..n).rev() {
        let Some(pivot) = (0..n).rev().find(|&r| a.get(r, i)) else {
            // zero column: only possible for singular input
            return Err(Error::Singular);
        };
        for j in 0..n {
            if j != pivot && a.get(j, i) {
                a.add_row(pivot, j);
                u.add_col(j, pivot);
            }
        }
        for j in (0..i).rev() {
            if a.get(pivot, j) {
                a.add_col(i, j);
            }
        }
    }

    let mut labels = vec![0; n];
    for (i, label) in labels.iter_mut().enumerate() {
        let j = (0..n).find(|&j| a.get(i, j)).ok_or(Error::Singular)?;
        *label = n - j - 1;
    }
    let mut inv_labels = vec![usize::MAX; n];
    for (i, &l) in labels.iter().enumerate() {
        if inv_labels[l] != usize::MAX {
            return Err(Error::Singular);
        }
        inv_labels[l] = i;
    }
    let rows: Vec<usize> = (0..n).collect();
    let v = u.submatrix(&rows, &inv_labels);
    Ok(UplResult { v, labels })
}

/// Fast reduced column-echelon form for up to 64 columns of at most 64 bits.
///
/// Same convention as [`BitMatrix::rcef`] with bit `i` standing for row `i`.
pub fn rcef_columns(cols: &mut [u64]) {
    let mut done = 0;
    while done < cols.len() {
        // pick the remaining column with the topmost pivot
        let mut best = done;
        let mut best_tz = u32::MAX;
        for (k, &c) in cols.iter().enumerate().skip(done) {
            if c != 0 && c.trailing_zeros() < best_tz {
                best_tz = c.trailing_zeros();
                best = k;
            }
        }
        if best_tz == u32::MAX {
            break;
        }
        cols.swap(done, best);
        let pivot_col = cols[done];
        let bit = 1u64 << best_tz;
        for (k, c) in cols.iter_mut().enumerate() {
            if k != done && *c & bit != 0 {
                *c ^= pivot_col;
            }
        }
        done += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_mul(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
        BitMatrix::from_fn(a.n_rows(), b.n_cols(), |i, j| {
            (0..a.n_cols()).fold(false, |acc, k| acc ^ (a.get(i, k) & b.get(k, j)))
        })
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn row_add_examples() {
        let i2 = BitMatrix::identity(2);
        let r = i2.row_add(0, 1).unwrap();
        assert_eq!(r, BitMatrix::from_rows(&[[1, 0], [1, 1]]));
        assert_eq!(r.row_add(0, 1).unwrap(), i2);
        assert_eq!(i2.row_add(1, 1), Err(Error::SameRow(1)));
        assert!(matches!(i2.row_add(0, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn row_add_preserves_invertibility() {
        for seed in 0..20 {
            let m = BitMatrix::random_invertible(8, seed);
            let r = m.row_add((seed % 8) as usize, ((seed + 3) % 8) as usize).unwrap();
            assert_eq!(r.rank(), 8);
        }
    }

    #[test]
    fn mat_mul_examples() {
        let m = BitMatrix::random_invertible(5, 3);
        assert_eq!(BitMatrix::identity(5).mat_mul(&m).unwrap(), m);
        let e01 = BitMatrix::from_rows(&[[1, 0], [1, 1]]);
        assert_eq!(e01.mat_mul(&BitMatrix::identity(2)).unwrap(), e01);
        assert!(BitMatrix::zeros(2, 3).mat_mul(&BitMatrix::zeros(2, 3)).is_err());
        let mut r = rng(9);
        for _ in 0..20 {
            let a = BitMatrix::random_with(6, 6, &mut r);
            let b = BitMatrix::random_with(6, 6, &mut r);
            assert_eq!(a.mat_mul(&b).unwrap(), naive_mul(&a, &b));
        }
        // wide matrices cross word boundaries
        let a = BitMatrix::random_with(7, 130, &mut r);
        let b = BitMatrix::random_with(130, 70, &mut r);
        assert_eq!(a.mat_mul(&b).unwrap(), naive_mul(&a, &b));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(BitMatrix::from_rows(&[[1, 1], [1, 1]]).rank(), 1);
        let stacked = BitMatrix::from_rows(&[[1, 0], [0, 1], [1, 1], [0, 0]]);
        assert_eq!(stacked.rank(), 2);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(BitMatrix::identity(4).inverse().unwrap(), BitMatrix::identity(4));
        let u = BitMatrix::from_rows(&[[1, 1], [0, 1]]);
        assert_eq!(u.inverse().unwrap(), u);
        assert_eq!(BitMatrix::from_rows(&[[1, 1], [1, 1]]).inverse(), Err(Error::Singular));
        assert!(matches!(BitMatrix::zeros(2, 3).inverse(), Err(Error::NotSquare { .. })));
        for seed in 0..10 {
            let m = BitMatrix::random_invertible(8, seed);
            let inv = m.inverse().unwrap();
            assert_eq!(m.mat_mul(&inv).unwrap(), BitMatrix::identity(8));
        }
    }

    #[test]
    fn rcef_root_is_fixed() {
        let root = BitMatrix::from_rows(&[[1, 0], [0, 1], [0, 0], [0, 0]]);
        assert_eq!(root.rcef(), root);
    }

    #[test]
    fn rcef_convention() {
        // columns (top to bottom) 0110 and 1100 span {0110, 1100, 1010}
        let m = BitMatrix::from_rows(&[[0, 1], [1, 1], [1, 0], [0, 0]]);
        let r = m.rcef();
        assert_eq!(r, BitMatrix::from_rows(&[[1, 0], [0, 1], [1, 1], [0, 0]]));
        // zero columns go last
        let z = BitMatrix::from_rows(&[[0, 0, 1], [0, 1, 1]]);
        assert_eq!(z.rcef(), BitMatrix::from_rows(&[[1, 0, 0], [0, 1, 0]]));
    }

    #[test]
    fn rcef_matches_column_routine() {
        let mut r = rng(4);
        for _ in 0..200 {
            let m = BitMatrix::random_with(8, 4, &mut r);
            let mut cols: Vec<u64> = (0..4).map(|j| m.column_bits(j)).collect();
            rcef_columns(&mut cols);
            assert_eq!(BitMatrix::from_columns(8, &cols), m.rcef());
        }
    }

    #[test]
    fn northwest_examples() {
        assert!(BitMatrix::exchange(5).is_northwest());
        assert!(!BitMatrix::identity(3).is_northwest());
        assert!(BitMatrix::identity(1).is_northwest());
    }

    #[test]
    fn upl_identity_gives_exchange() {
        for n in 1..6 {
            let res = upl_decompose(&BitMatrix::identity(n)).unwrap();
            assert_eq!(res.v, BitMatrix::exchange(n));
            assert_eq!(res.labels, (0..n).rev().collect::<Vec<_>>());
        }
        let one = upl_decompose(&BitMatrix::identity(1)).unwrap();
        assert_eq!(one.labels, vec![0]);
    }

    #[test]
    fn upl_rejects_singular() {
        let s = BitMatrix::from_rows(&[[1, 1], [1, 1]]);
        assert_eq!(upl_decompose(&s), Err(Error::Singular));
    }

    #[test]
    fn random_invertible_is_deterministic() {
        assert_eq!(BitMatrix::random_invertible(1, 7), BitMatrix::identity(1));
        assert_eq!(BitMatrix::random_invertible(9, 42), BitMatrix::random_invertible(9, 42));
        for seed in 0..100 {
            assert_eq!(BitMatrix::random_invertible(16, seed).rank(), 16);
        }
    }

    #[test]
    fn display_rows() {
        let m = BitMatrix::from_rows(&[[1, 0, 1], [0, 1, 1]]);
        assert_eq!(alloc::format!("{m}"), "101\n011");
    }
}
