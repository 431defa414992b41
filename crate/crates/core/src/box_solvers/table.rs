//! Breadth-first depth tables over canonical local states.
//!
//! A state is a small matrix stored column by column, one byte per column
//! (bit `i` = row `i`, so at most 8 rows). Keys pack the canonical columns
//! little-endian into a `u64`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use alloc::format;

use hashbrown::hash_map::Entry;
use hashbrown::HashMap;

use crate::circuit::{CnotCircuit, CnotGate};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::topology::{oriented_matchings, ConnectivityGraph, Move};

/// Backpointer stored for the root.
pub const ROOT_MOVE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableKind {
    /// Zero the lower block of a full-rank `2p x p` matrix. Root `[I; 0]`.
    P1,
    /// Block anti-diagonal to block diagonal. Root `[I 0; 0 I]`, halves
    /// canonicalized separately.
    P2,
    /// Single block to identity.
    P3,
    /// Like `P1` with root `[0; I]`.
    P1Lower,
    /// Root `[0; I]`, using only layers that keep the top subspace fixed
    /// (no gate from the first block into the second).
    FixTop,
    /// Root `[I; 0]`, using only layers with no gate from the second block
    /// into the first.
    FixBottom,
}

impl TableKind {
    pub const ALL: [TableKind; 6] = [
        TableKind::P1,
        TableKind::P2,
        TableKind::P3,
        TableKind::P1Lower,
        TableKind::FixTop,
        TableKind::FixBottom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableKind::P1 => "P1",
            TableKind::P2 => "P2",
            TableKind::P3 => "P3",
            TableKind::P1Lower => "P1Lower",
            TableKind::FixTop => "FixTop",
            TableKind::FixBottom => "FixBottom",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Number of matrix rows (= local qubits).
    pub fn rows(self, p: usize) -> usize {
        if self == TableKind::P3 {
            p
        } else {
            2 * p
        }
    }

    pub fn cols(self, p: usize) -> usize {
        if self == TableKind::P2 {
            2 * p
        } else {
            p
        }
    }

    fn root(self, p: usize) -> [u8; 8] {
        let mut c = [0u8; 8];
        for i in 0..p {
            match self {
                TableKind::P1 | TableKind::FixBottom | TableKind::P3 => c[i] = 1 << i,
                TableKind::P1Lower | TableKind::FixTop => c[i] = 1 << (p + i),
                TableKind::P2 => {
                    c[i] = 1 << i;
                    c[p + i] = 1 << (p + i);
                }
            }
        }
        c
    }

    fn allows(self, m: &Move, p: usize) -> bool {
        match self {
            TableKind::FixTop => m.gates().iter().all(|g| !(g.control < p && g.target >= p)),
            TableKind::FixBottom => m.gates().iter().all(|g| !(g.control >= p && g.target < p)),
            _ => true,
        }
    }

    fn canon(self, p: usize, cols: &mut [u8]) {
        match self {
            TableKind::P3 => {}
            TableKind::P2 => {
                let (l, r) = cols.split_at_mut(p);
                rcef_bytes(l);
                rcef_bytes(r);
            }
            _ => rcef_bytes(cols),
        }
    }
}

/// Reduced column-echelon form of byte columns: pivots are topmost ones,
/// columns ordered by pivot, zero columns last.
pub fn rcef_bytes(cols: &mut [u8]) {
    let n = cols.len();
    for done in 0..n {
        let mut best = done;
        let mut best_tz = 8;
        for (k, &c) in cols.iter().enumerate().skip(done) {
            if c != 0 && c.trailing_zeros() < best_tz {
                best_tz = c.trailing_zeros();
                best = k;
            }
        }
        if best_tz == 8 {
            return;
        }
        cols.swap(done, best);
        let pivot = cols[done];
        let bit = 1u8 << best_tz;
        for k in 0..n {
            if k != done && cols[k] & bit != 0 {
                cols[k] ^= pivot;
            }
        }
    }
}

#[inline]
fn pack(cols: &[u8]) -> u64 {
    cols.iter().enumerate().fold(0, |k, (i, &c)| k | (c as u64) << (8 * i))
}

#[inline]
fn unpack(key: u64) -> [u8; 8] {
    key.to_le_bytes()
}

fn rank_bytes(cols: &[u8]) -> usize {
    let mut c = [0u8; 8];
    c[..cols.len()].copy_from_slice(cols);
    rcef_bytes(&mut c[..cols.len()]);
    c[..cols.len()].iter().filter(|&&x| x != 0).count()
}

/// Statistics reported once per BFS level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BfsProgress {
    pub depth: usize,
    pub explored: usize,
    pub frontier: usize,
}

#[derive(Default)]
pub struct BfsOptions<'a> {
    /// Maximum number of stored states.
    pub budget: Option<usize>,
    pub progress: Option<&'a mut dyn FnMut(&BfsProgress)>,
}

/// Moves available to a table of `kind` on `graph`, in table order.
pub fn table_moves(kind: TableKind, p: usize, graph: &ConnectivityGraph) -> Result<Vec<Move>> {
    let rows = kind.rows(p);
    if p == 0 || rows > 8 || kind.cols(p) > 8 {
        return Err(Error::Unsupported(format!("{} tables need 1 <= p and at most 8 rows/columns, got p={p}", kind.name())));
    }
    if graph.n() != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            found: graph.n(),
        });
    }
    Ok(oriented_matchings(graph)
        .into_iter()
        .filter(|m| kind.allows(m, p))
        .collect())
}

/// Minimal layer counts from every reachable canonical state to the root.
#[derive(Debug, Clone)]
pub struct DepthTable {
    kind: TableKind,
    p: usize,
    fingerprint: String,
    moves: Vec<Move>,
    entries: HashMap<u64, (u8, u32)>,
    counts_by_depth: Vec<u64>,
}

pub fn bfs_table(kind: TableKind, p: usize, graph: &ConnectivityGraph, opts: BfsOptions<'_>) -> Result<DepthTable> {
    let moves = table_moves(kind, p, graph)?;
    let luts: Vec<[u8; 256]> = moves
        .iter()
        .map(|m| {
            let mut t = [0u8; 256];
            for (b, out) in t.iter_mut().enumerate() {
                *out = m.apply_bits(b as u64) as u8;
            }
            t
        })
        .collect();
    let ncols = kind.cols(p);
    let mut root = kind.root(p);
    kind.canon(p, &mut root[..ncols]);
    let root_key = pack(&root[..ncols]);

    let BfsOptions { budget, mut progress } = opts;
    let mut entries: HashMap<u64, (u8, u32)> = HashMap::new();
    entries.insert(root_key, (0, ROOT_MOVE));
    let mut frontier = vec![root_key];
    let mut depth = 0usize;
    while !frontier.is_empty() {
        if let Some(cb) = progress.as_mut() {
            cb(&BfsProgress {
                depth,
                explored: entries.len(),
                frontier: frontier.len(),
            });
        }
        let mut next = Vec::new();
        for &key in &frontier {
            let cols = unpack(key);
            for (mi, lut) in luts.iter().enumerate() {
                let mut c = [0u8; 8];
                for j in 0..ncols {
                    c[j] = lut[cols[j] as usize];
                }
                kind.canon(p, &mut c[..ncols]);
                let k = pack(&c[..ncols]);
                if let Entry::Vacant(e) = entries.entry(k) {
                    e.insert((depth as u8 + 1, mi as u32));
                    next.push(k);
                }
            }
            if let Some(b) = budget {
                if entries.len() > b {
                    return Err(Error::BudgetExceeded {
                        budget: b,
                        explored: entries.len(),
                        depth: depth + 1,
                    });
                }
            }
        }
        frontier = next;
        depth += 1;
    }
    let mut t = DepthTable {
        kind,
        p,
        fingerprint: graph.fingerprint(),
        moves,
        entries,
        counts_by_depth: Vec::new(),
    };
    t.counts_by_depth = t.compute_counts();
    Ok(t)
}

impl DepthTable {
    /// Rebuilds a table from stored records, regenerating the move list
    /// from `graph`. Every record is checked for a valid move id.
    pub fn from_records(
        kind: TableKind,
        p: usize,
        graph: &ConnectivityGraph,
        records: impl IntoIterator<Item = (u64, u8, u32)>,
    ) -> Result<Self> {
        let moves = table_moves(kind, p, graph)?;
        let mut entries = HashMap::new();
        let mut roots = 0;
        for (key, depth, mv) in records {
            if depth == 0 {
                roots += 1;
                if mv != ROOT_MOVE {
                    return Err(Error::SolverMismatch("root record carries a move".into()));
                }
            } else if mv as usize >= moves.len() {
                return Err(Error::SolverMismatch(format!("move id {mv} out of range")));
            }
            entries.insert(key, (depth, mv));
        }
        if roots != 1 {
            return Err(Error::SolverMismatch(format!("{roots} root records")));
        }
        let mut t = Self {
            kind,
            p,
            fingerprint: graph.fingerprint(),
            moves,
            entries,
            counts_by_depth: Vec::new(),
        };
        t.counts_by_depth = t.compute_counts();
        Ok(t)
    }

    fn compute_counts(&self) -> Vec<u64> {
        let mut counts: Vec<u64> = Vec::new();
        for (&key, &(d, _)) in &self.entries {
            if self.kind == TableKind::P2 && !self.is_instance(key) {
                continue;
            }
            let d = d as usize;
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += 1;
        }
        counts
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    /// Number of stored canonical states (for P2 this includes
    /// non-instance states).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Histogram of depths; for P2 only instance-shaped states are counted.
    pub fn counts_by_depth(&self) -> &[u64] {
        &self.counts_by_depth
    }

    pub fn total(&self) -> u64 {
        self.counts_by_depth.iter().sum()
    }

    /// Largest depth in `counts_by_depth`.
    pub fn max_depth(&self) -> usize {
        self.counts_by_depth.len().saturating_sub(1)
    }

    pub fn get(&self, key: u64) -> Option<(u8, u32)> {
        self.entries.get(&key).copied()
    }

    /// All records `(key, depth, move id)` in unspecified order.
    pub fn records(&self) -> impl Iterator<Item = (u64, u8, u32)> + '_ {
        self.entries.iter().map(|(&k, &(d, m))| (k, d, m))
    }

    /// P2 states of the form (complement of top, top).
    pub fn is_instance(&self, key: u64) -> bool {
        let p = self.p;
        let c = unpack(key);
        let top: Vec<u8> = (0..p).map(|i| 1u8 << i).collect();
        if c[p..2 * p] != top[..] {
            return false;
        }
        let shifted: Vec<u8> = c[..p].iter().map(|&x| x >> p).collect();
        rank_bytes(&shifted) == p
    }

    fn columns_of(&self, m: &BitMatrix) -> Result<[u8; 8]> {
        let (rows, cols) = (self.kind.rows(self.p), self.kind.cols(self.p));
        if m.n_rows() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: m.n_rows(),
            });
        }
        if m.n_cols() != cols {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: m.n_cols(),
            });
        }
        let mut c = [0u8; 8];
        for (j, slot) in c.iter_mut().enumerate().take(cols) {
            *slot = m.column_bits(j) as u8;
        }
        Ok(c)
    }

    fn key_of_cols(&self, cols: &[u8; 8]) -> u64 {
        let ncols = self.kind.cols(self.p);
        let mut c = *cols;
        self.kind.canon(self.p, &mut c[..ncols]);
        pack(&c[..ncols])
    }

    /// Canonical key of a local matrix.
    pub fn key_of(&self, m: &BitMatrix) -> Result<u64> {
        Ok(self.key_of_cols(&self.columns_of(m)?))
    }

    pub fn depth_of(&self, m: &BitMatrix) -> Result<usize> {
        let key = self.key_of(m)?;
        self.get(key).map(|(d, _)| d as usize).ok_or(Error::MissingState {
            table: self.kind.name(),
            key,
        })
    }

    /// Follows backpointers from `m` to the root. The returned local
    /// circuit has one layer per step and `depth(m)` layers in total.
    pub fn trace(&self, m: &BitMatrix) -> Result<CnotCircuit> {
        let ncols = self.kind.cols(self.p);
        let mut cols = self.columns_of(m)?;
        let mut circ = CnotCircuit::new(self.kind.rows(self.p));
        let mut expected: Option<u8> = None;
        loop {
            let key = self.key_of_cols(&cols);
            let (d, mv) = self.get(key).ok_or(Error::MissingState {
                table: self.kind.name(),
                key,
            })?;
            if let Some(e) = expected {
                if d != e {
                    return Err(Error::SolverMismatch(format!(
                        "{} table: depth {d} after a step from depth {}",
                        self.kind.name(),
                        e + 1
                    )));
                }
            }
            if d == 0 {
                return Ok(circ);
            }
            let mv = &self.moves[mv as usize];
            for c in cols.iter_mut().take(ncols) {
                *c = mv.apply_bits(*c as u64) as u8;
            }
            for &g in mv.gates() {
                circ.push(CnotGate::raw(g.control, g.target));
            }
            expected = Some(d - 1);
        }
    }

    /// Local matrix of a stored state (columns of its canonical key).
    pub fn state_matrix(&self, key: u64) -> BitMatrix {
        let c = unpack(key);
        let ncols = self.kind.cols(self.p);
        let cols: Vec<u64> = c[..ncols].iter().map(|&x| x as u64).collect();
        BitMatrix::from_columns(self.kind.rows(self.p), &cols)
    }
}

/// Gaussian binomial coefficient `(n choose k)_2`.
pub fn gaussian_binomial_2(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (1u128 << (n - i)) - 1;
        den *= (1u128 << (i + 1)) - 1;
    }
    num / den
}

/// Order of `GL(n, 2)`.
pub fn gl_order(n: u32) -> u128 {
    (0..n).map(|i| (1u128 << n) - (1u128 << i)).product()
}
