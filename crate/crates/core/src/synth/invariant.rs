use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// A matrix whose rows carry labels, read blockwise in groups of `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledOperator {
    pub a: BitMatrix,
    pub labels: Vec<usize>,
    pub p: usize,
}

impl LabeledOperator {
    pub fn new(a: BitMatrix, labels: Vec<usize>, p: usize) -> Result<Self> {
        validate(&a, &labels, p)?;
        Ok(Self { a, labels, p })
    }

    pub fn check(&self, which: u8) -> Result<bool> {
        check_invariant(which, &self.a, &self.labels, self.p)
    }

    /// Label set of block `i`, sorted.
    pub fn block_labels(&self, i: usize) -> Vec<usize> {
        block_labels(&self.labels, self.p, i)
    }
}

pub(crate) fn block_labels(labels: &[usize], p: usize, i: usize) -> Vec<usize> {
    let mut k = labels[i * p..(i + 1) * p].to_vec();
    k.sort_unstable();
    k
}

fn validate(a: &BitMatrix, labels: &[usize], p: usize) -> Result<()> {
    let n = a.n_rows();
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: n,
            cols: a.n_cols(),
        });
    }
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    let mut seen = alloc::vec![false; n];
    for &l in labels {
        if l >= n || seen[l] {
            return Err(Error::Precondition(format!("labels are not a permutation (label {l})")));
        }
        seen[l] = true;
    }
    if p == 0 || n % p != 0 {
        return Err(Error::Precondition(format!("block size {p} does not divide {n}")));
    }
    Ok(())
}

/// Evaluates sorting invariant `which` (1 to 4).
///
/// * 1: row `i` with label `k` has `a[i,k] = 1` and `a[j,k] = 0` for `j > i`.
/// * 2: 1, and `a[j,k] = 0` whenever `j < i` and row `j` has a label below `k`.
/// * 3: for block `b_i` with label set `K`, `a[b_j, K] = 0` for `j > i` and
///   `a[b_i, K]` is invertible.
/// * 4: 3, and `a[b_j, K] = 0` whenever `j < i` and `min K_j < min K`.
///
/// Invariants 1 and 2 need `p = 1`, where they coincide with 3 and 4.
pub fn check_invariant(which: u8, a: &BitMatrix, labels: &[usize], p: usize) -> Result<bool> {
    validate(a, labels, p)?;
    match which {
        1 | 2 if p != 1 => return Err(Error::Precondition(format!("invariant {which} needs p = 1"))),
        1..=4 => {}
        _ => return Err(Error::Precondition(format!("no invariant {which}"))),
    }
    let ordered = which == 2 || which == 4;
    let m = a.n_rows() / p;
    let sets: Vec<Vec<usize>> = (0..m).map(|i| block_labels(labels, p, i)).collect();
    let zero_on = |block: usize, cols: &[usize]| {
        (block * p..(block + 1) * p).all(|r| cols.iter().all(|&k| !a.get(r, k)))
    };
    for (i, k) in sets.iter().enumerate() {
        if !(i + 1..m).all(|j| zero_on(j, k)) {
            return Ok(false);
        }
        let rows: Vec<usize> = (i * p..(i + 1) * p).collect();
        if !a.submatrix(&rows, k).is_invertible() {
            return Ok(false);
        }
        if ordered && !(0..i).filter(|&j| sets[j][0] < k[0]).all(|j| zero_on(j, k)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff block `(I, J)` is zero whenever `I + J > m - 1`.
pub fn is_block_northwest(a: &BitMatrix, p: usize) -> bool {
    let n = a.n_rows();
    if p == 0 || n % p != 0 {
        return false;
    }
    let m = n / p;
    (0..n).all(|i| (0..a.n_cols()).all(|j| i / p + j / p <= m - 1 || !a.get(i, j)))
}

pub fn is_block_diagonal(a: &BitMatrix, p: usize) -> bool {
    (0..a.n_rows()).all(|i| (0..a.n_cols()).all(|j| i / p == j / p || !a.get(i, j)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> BitMatrix {
        let rows: Vec<Vec<u8>> = rows.iter().map(|r| r.bytes().map(|b| b - b'0').collect()).collect();
        BitMatrix::from_rows(&rows)
    }

    #[test]
    fn identity_satisfies_everything() {
        let id = BitMatrix::identity(6);
        let labels: Vec<usize> = (0..6).collect();
        for w in 1..=4 {
            assert!(check_invariant(w, &id, &labels, 1).unwrap());
        }
        for p in [2, 3] {
            assert!(check_invariant(3, &id, &labels, p).unwrap());
            assert!(check_invariant(4, &id, &labels, p).unwrap());
        }
    }

    #[test]
    fn permuted_upper_triangular_example() {
        let a = m(&["11110", "11010", "11001", "10001", "10000"]);
        assert!(check_invariant(1, &a, &[2, 3, 1, 4, 0], 1).unwrap());
        assert!(!check_invariant(1, &a, &[3, 2, 1, 4, 0], 1).unwrap());
    }

    #[test]
    fn ordered_examples() {
        let a = m(&["00010", "10101", "01000", "00100", "10000"]);
        assert!(check_invariant(2, &a, &[3, 4, 1, 2, 0], 1).unwrap());
        let nw = m(&["10111", "00010", "01100", "01000", "10000"]);
        assert!(nw.is_northwest());
        assert!(check_invariant(2, &nw, &[4, 3, 2, 1, 0], 1).unwrap());
        assert!(check_invariant(4, &nw, &[4, 3, 2, 1, 0], 1).unwrap());
    }

    #[test]
    fn block_examples() {
        let a = m(&["011111", "101110", "001010", "101001", "001000", "000001"]);
        assert!(check_invariant(3, &a, &[1, 3, 4, 0, 2, 5], 2).unwrap());
        assert!(!check_invariant(3, &a, &[4, 0, 1, 3, 2, 5], 2).unwrap());
        let b = m(&["011110", "101101", "111000", "010100", "110000", "010000"]);
        assert!(check_invariant(4, &b, &[4, 5, 2, 3, 0, 1], 2).unwrap());
        assert!(is_block_northwest(&b, 2));
    }

    #[test]
    fn rejects_bad_arguments() {
        let id = BitMatrix::identity(4);
        assert!(check_invariant(1, &id, &[0, 1, 2, 3], 2).is_err());
        assert!(check_invariant(3, &id, &[0, 1, 2, 3], 3).is_err());
        assert!(check_invariant(3, &id, &[0, 1, 1, 3], 2).is_err());
        assert!(check_invariant(5, &id, &[0, 1, 2, 3], 1).is_err());
    }
}
