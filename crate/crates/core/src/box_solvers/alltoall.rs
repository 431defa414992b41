//! Analytic local solvers for blocks whose pair graph is complete.
//!
//! After the top `p x p` block `A1` is invertible, the lower block `A2` is
//! tracked through `B = A2 · A1^-1`:
//!
//! * `CNOT(s, p+r)` (top row into bottom row) flips `B[r,s]`;
//! * `CNOT(p+c, p+t)` adds row `c` of `B` to row `t`;
//! * `CNOT(c, t)` inside the top block adds column `t` of `B` to column `c`.
//!
//! Zeroing `B` zeroes `A2`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{CnotCircuit, CnotGate};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AllToAllMode {
    /// Matching decomposition of `B`: depth `1 + p` for Problem 1.
    #[default]
    Basic,
    /// Rank-one correction, duplicate halving and a 2x2 clean-up:
    /// depth `3 + p/2 + ceil(log2 p)` for Problem 1.
    Improved,
}

/// Result of an analytic solve.
#[derive(Debug, Clone)]
pub struct AllToAllOutcome {
    pub circuit: CnotCircuit,
    /// Set when improved mode found no correction and used basic mode.
    pub fell_back: bool,
}

pub fn ceil_log2(p: usize) -> usize {
    if p <= 1 {
        0
    } else {
        (usize::BITS - (p - 1).leading_zeros()) as usize
    }
}

pub fn p1_bound(p: usize, mode: AllToAllMode) -> usize {
    match mode {
        AllToAllMode::Basic => 1 + p,
        AllToAllMode::Improved => 3 + p / 2 + ceil_log2(p),
    }
}

pub fn p2_bound(p: usize, mode: AllToAllMode) -> usize {
    p1_bound(p, mode) + 1
}

/// Splits the ones of `b` into partial permutations (no row or column
/// repeated within a layer). The number of layers is the largest row or
/// column weight.
pub fn matching_decomposition(b: &BitMatrix) -> Vec<Vec<(usize, usize)>> {
    let (nr, nc) = (b.n_rows(), b.n_cols());
    let n = nr.max(nc);
    let mut real = vec![vec![false; n]; n];
    let mut row_deg = vec![0usize; n];
    let mut col_deg = vec![0usize; n];
    for i in 0..nr {
        for j in 0..nc {
            if b.get(i, j) {
                real[i][j] = true;
                row_deg[i] += 1;
                col_deg[j] += 1;
            }
        }
    }
    let k = row_deg.iter().chain(&col_deg).copied().max().unwrap_or(0);
    // pad to a k-regular bipartite multigraph
    let mut dummy = vec![vec![0usize; n]; n];
    let mut j = 0;
    for i in 0..n {
        while row_deg[i] < k {
            while col_deg[j] == k {
                j += 1;
            }
            let add = (k - row_deg[i]).min(k - col_deg[j]);
            dummy[i][j] += add;
            row_deg[i] += add;
            col_deg[j] += add;
        }
    }

    let mut layers = Vec::with_capacity(k);
    for _ in 0..k {
        let matched = perfect_matching(n, |i, j| real[i][j] || dummy[i][j] > 0, |i, j| real[i][j]);
        let mut layer = Vec::new();
        for (j, &i) in matched.iter().enumerate() {
            if real[i][j] {
                real[i][j] = false;
                layer.push((i, j));
            } else {
                dummy[i][j] -= 1;
            }
        }
        layer.sort_unstable();
        layers.push(layer);
    }
    layers
}

/// Kuhn's augmenting paths; returns `match_of_col[j] = row`. Edges flagged
/// by `prefer` are tried first.
fn perfect_matching(
    n: usize,
    edge: impl Fn(usize, usize) -> bool,
    prefer: impl Fn(usize, usize) -> bool,
) -> Vec<usize> {
    fn augment(
        i: usize,
        order: &[Vec<usize>],
        seen: &mut [bool],
        match_col: &mut [usize],
    ) -> bool {
        for &j in &order[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if match_col[j] == usize::MAX || augment(match_col[j], order, seen, match_col) {
                match_col[j] = i;
                return true;
            }
        }
        false
    }
    let order: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut v: Vec<usize> = (0..n).filter(|&j| edge(i, j)).collect();
            v.sort_by_key(|&j| !prefer(i, j));
            v
        })
        .collect();
    let mut match_col = vec![usize::MAX; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        let ok = augment(i, &order, &mut seen, &mut match_col);
        debug_assert!(ok, "regular bipartite multigraph has a perfect matching");
    }
    match_col
}

fn push_layer(m: &mut BitMatrix, circ: &mut CnotCircuit, gates: &[(usize, usize)]) {
    for &(c, t) in gates {
        m.add_row(c, t);
        circ.push(CnotGate::raw(c, t));
    }
}

fn row_bits(m: &BitMatrix, i: usize, cols: usize) -> u64 {
    m.row_bits(i) & if cols == 64 { u64::MAX } else { (1u64 << cols) - 1 }
}

/// One layer adding rows of `A2` to dependent rows of `A1` so that `A1`
/// becomes invertible. Requires the first `p` columns of `m` to have rank `p`.
fn lift_rank(m: &mut BitMatrix, circ: &mut CnotCircuit, p: usize) -> Result<()> {
    // xor basis keyed by leading bit
    let mut basis: BTreeMap<u32, u64> = BTreeMap::new();
    let reduce = |basis: &BTreeMap<u32, u64>, mut v: u64| {
        while v != 0 {
            let hb = 63 - v.leading_zeros();
            match basis.get(&hb) {
                Some(&b) => v ^= b,
                None => break,
            }
        }
        v
    };
    let mut dependent = Vec::new();
    for d in 0..p {
        let v = reduce(&basis, row_bits(m, d, p));
        if v == 0 {
            dependent.push(d);
        } else {
            basis.insert(63 - v.leading_zeros(), v);
        }
    }
    let mut chosen = Vec::new();
    for r in 0..p {
        if chosen.len() == dependent.len() {
            break;
        }
        let v = reduce(&basis, row_bits(m, p + r, p));
        if v != 0 {
            basis.insert(63 - v.leading_zeros(), v);
            chosen.push(r);
        }
    }
    if chosen.len() < dependent.len() {
        return Err(Error::Singular);
    }
    let gates: Vec<(usize, usize)> = dependent.iter().zip(&chosen).map(|(&d, &r)| (p + r, d)).collect();
    push_layer(m, circ, &gates);
    Ok(())
}

fn find_correction(b: &BitMatrix) -> Option<(BitMatrix, u64, u64)> {
    let p = b.n_rows();
    if p > 20 {
        return None;
    }
    let half = p / 2;
    for v2 in 0u64..(1 << p) {
        let c = BitMatrix::from_fn(p, p, |i, j| b.get(i, j) ^ (v2 >> i & 1 == 1));
        let mut v1 = 0u64;
        for j in 0..p {
            let w = (0..p).filter(|&i| c.get(i, j)).count();
            if w > half {
                v1 |= 1 << j;
            }
        }
        let bp = BitMatrix::from_fn(p, p, |i, j| c.get(i, j) ^ (v1 >> j & 1 == 1));
        if (0..p).all(|i| bp.row_bits(i).count_ones() as usize <= half) {
            return Some((bp, v1, v2));
        }
    }
    None
}

fn flip_layers(b: &BitMatrix, p: usize) -> Vec<Vec<(usize, usize)>> {
    matching_decomposition(b)
        .into_iter()
        .map(|layer| layer.into_iter().map(|(r, s)| (s, p + r)).collect())
        .collect()
}

/// Zeroes rows `[p, 2p)` in columns `[0, p)` of `m`, given an invertible
/// top-left block, without touching the other columns of the top rows
/// beyond top-internal operations.
fn zero_lower(m: &mut BitMatrix, circ: &mut CnotCircuit, p: usize, mode: AllToAllMode) -> Result<bool> {
    let top: Vec<usize> = (0..p).collect();
    let bottom: Vec<usize> = (p..2 * p).collect();
    let a1 = m.submatrix(&top, &top);
    let a2 = m.submatrix(&bottom, &top);
    let mut b = a2.mat_mul(&a1.inverse()?)?;

    let mut fell_back = false;
    if mode == AllToAllMode::Improved {
        if let Some((bp, _, _)) = find_correction(&b) {
            for layer in flip_layers(&bp, p) {
                push_layer(m, circ, &layer);
            }
            for i in 0..p {
                for j in 0..p {
                    if bp.get(i, j) {
                        b.flip(i, j);
                    }
                }
            }
            // halve duplicated rows and columns in parallel
            loop {
                let mut gates = Vec::new();
                let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
                for i in 0..p {
                    let r = b.row_bits(i);
                    if r != 0 {
                        groups.entry(r).or_default().push(i);
                    }
                }
                for rows in groups.values() {
                    for pair in rows.chunks_exact(2) {
                        gates.push((p + pair[0], p + pair[1]));
                    }
                }
                let mut cgroups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
                for j in 0..p {
                    let c = b.column_bits(j);
                    if c != 0 {
                        cgroups.entry(c).or_default().push(j);
                    }
                }
                for cols in cgroups.values() {
                    for pair in cols.chunks_exact(2) {
                        gates.push((pair[0], pair[1]));
                    }
                }
                if gates.is_empty() {
                    break;
                }
                for &(c, t) in &gates {
                    if c >= p {
                        b.add_row(c - p, t - p);
                    } else {
                        b.add_col(t, c);
                    }
                }
                push_layer(m, circ, &gates);
            }
        } else {
            fell_back = true;
        }
    }
    for layer in flip_layers(&b, p) {
        push_layer(m, circ, &layer);
    }
    if !m.submatrix(&bottom, &top).is_zero() {
        return Err(Error::SolverMismatch("analytic solver left a nonzero lower block".into()));
    }
    Ok(fell_back)
}

/// Problem 1 on a complete pair graph: `C·b = [B3; 0]`.
pub fn alltoall_solve_p1_outcome(b: &BitMatrix, mode: AllToAllMode) -> Result<AllToAllOutcome> {
    let p = b.n_cols();
    if b.n_rows() != 2 * p {
        return Err(Error::DimensionMismatch {
            expected: 2 * p,
            found: b.n_rows(),
        });
    }
    if p > 64 || b.rank() != p {
        return Err(Error::Singular);
    }
    let mut m = b.clone();
    let mut circuit = CnotCircuit::new(2 * p);
    lift_rank(&mut m, &mut circuit, p)?;
    let fell_back = zero_lower(&mut m, &mut circuit, p, mode)?;
    Ok(AllToAllOutcome { circuit, fell_back })
}

pub fn alltoall_solve_p1(b: &BitMatrix, mode: AllToAllMode) -> Result<CnotCircuit> {
    alltoall_solve_p1_outcome(b, mode).map(|o| o.circuit)
}

/// Checks `b = [B1 B3; B2 0]` with `B2`, `B3` invertible.
pub fn check_p2_shape(b: &BitMatrix) -> Result<usize> {
    if !b.is_square() || b.n_rows() % 2 != 0 {
        return Err(Error::Precondition("Problem 2 needs a square matrix of even size".into()));
    }
    let p = b.n_rows() / 2;
    let top: Vec<usize> = (0..p).collect();
    let bottom: Vec<usize> = (p..2 * p).collect();
    if !b.submatrix(&bottom, &bottom).is_zero() {
        return Err(Error::Precondition("lower right block is not zero".into()));
    }
    if !b.submatrix(&bottom, &top).is_invertible() || !b.submatrix(&top, &bottom).is_invertible() {
        return Err(Error::Precondition("off-diagonal blocks must be invertible".into()));
    }
    Ok(p)
}

/// Problem 2 on a complete pair graph: `C·b` block diagonal.
pub fn alltoall_solve_p2_outcome(b: &BitMatrix, mode: AllToAllMode) -> Result<AllToAllOutcome> {
    let p = check_p2_shape(b)?;
    let mut m = b.clone();
    let mut circuit = CnotCircuit::new(2 * p);
    let down: Vec<(usize, usize)> = (0..p).map(|i| (i, p + i)).collect();
    let up: Vec<(usize, usize)> = (0..p).map(|i| (p + i, i)).collect();
    push_layer(&mut m, &mut circuit, &down);
    push_layer(&mut m, &mut circuit, &up);
    let fell_back = zero_lower(&mut m, &mut circuit, p, mode)?;
    let top: Vec<usize> = (0..p).collect();
    let bottom: Vec<usize> = (p..2 * p).collect();
    if !m.submatrix(&top, &bottom).is_zero() {
        return Err(Error::SolverMismatch("analytic solver left a nonzero upper block".into()));
    }
    Ok(AllToAllOutcome { circuit, fell_back })
}

pub fn alltoall_solve_p2(b: &BitMatrix, mode: AllToAllMode) -> Result<CnotCircuit> {
    alltoall_solve_p2_outcome(b, mode).map(|o| o.circuit)
}
