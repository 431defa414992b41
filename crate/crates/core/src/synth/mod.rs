//! The synthesis driver: UPL split, two label-sorting sweeps over block
//! pairs, then per-block reduction to the identity.
//!
//! All work happens in positional coordinates where the layout's blocks
//! are concatenated, so block `i` occupies positions `[ip, (i+1)p)`. The
//! driver reduces the operator to the identity and returns the reversed
//! gate list, which implements the operator.

mod invariant;
mod network;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use invariant::{check_invariant, is_block_diagonal, is_block_northwest, LabeledOperator};
pub use network::{sorting_network, SortingNetwork};

use crate::box_solvers::{BlockSolver, LineSolver, LocalBounds};
use crate::circuit::{CnotCircuit, CnotGate};
use crate::error::{Error, Result};
use crate::gf2::{upl_decompose, BitMatrix};
use crate::topology::{ArchSpec, BlockLineLayout};
use invariant::block_labels;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    /// Evaluate the sorting invariant after every round (cubic cost).
    pub check_invariants: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            check_invariants: cfg!(debug_assertions),
        }
    }
}

/// A layout viewed through a position order that may be finer than its
/// own blocks. Each block must occupy consecutive positions.
#[derive(Debug, Clone)]
pub struct Frame<'a> {
    pub layout: &'a BlockLineLayout,
    order: Vec<usize>,
    pos_of: Vec<usize>,
}

impl<'a> Frame<'a> {
    pub fn own(layout: &'a BlockLineLayout) -> Self {
        Self::new(layout, layout.order()).expect("a layout's own order is consistent")
    }

    pub fn new(layout: &'a BlockLineLayout, order: Vec<usize>) -> Result<Self> {
        let n = layout.n();
        if order.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: order.len(),
            });
        }
        let mut pos_of = vec![usize::MAX; n];
        for (k, &q) in order.iter().enumerate() {
            if q >= n || pos_of[q] != usize::MAX {
                return Err(Error::Layout(format!("position order repeats qubit {q}")));
            }
            pos_of[q] = k;
        }
        let p = layout.p;
        for (i, b) in layout.blocks.iter().enumerate() {
            if b.iter().any(|&q| pos_of[q] / p != i) {
                return Err(Error::Layout(format!("block {i} is not at positions [{}, {})", i * p, (i + 1) * p)));
            }
        }
        Ok(Self { layout, order, pos_of })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Positions of the local vertices of pair `(i, i+1)`.
    pub fn pair_positions(&self, i: usize) -> Vec<usize> {
        self.layout.pair_maps[i].iter().map(|&q| self.pos_of[q]).collect()
    }

    /// Positions of the intra-block vertices of block `i`.
    pub fn block_positions(&self, i: usize) -> Vec<usize> {
        self.layout.block_maps[i].iter().map(|&q| self.pos_of[q]).collect()
    }

    /// `P·a·Pᵀ`: the operator in positional coordinates.
    pub fn to_positions(&self, a: &BitMatrix) -> BitMatrix {
        self.permute(a, &self.order)
    }

    fn permute(&self, a: &BitMatrix, order: &[usize]) -> BitMatrix {
        a.submatrix(order, order)
    }

    /// Positional gates as qubit gates.
    pub fn to_qubits(&self, gates: &[CnotGate]) -> Vec<CnotGate> {
        gates
            .iter()
            .map(|g| CnotGate::raw(self.order[g.control], self.order[g.target]))
            .collect()
    }
}

/// Applies a local circuit through `map` (local vertex to position) and
/// records the positional gates.
fn apply_local(local: &CnotCircuit, map: &[usize], targets: &mut [&mut BitMatrix], out: &mut Vec<CnotGate>) {
    for g in local.gates() {
        let (c, t) = (map[g.control], map[g.target]);
        for m in targets.iter_mut() {
            m.add_row(c, t);
        }
        out.push(CnotGate::raw(c, t));
    }
}

/// Which sweep a pair operation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Problem 1 on the `p` smallest labels of the pair.
    One,
    /// Problem 2 on the label sets of the two blocks.
    Two,
}

/// Sorts the labels of blocks `top` and `top + 1`: the top block receives
/// the smaller labels. `map` sends local pair vertices to positions.
/// Returns the positional gates, already applied to `op.a`.
pub fn sort_two_block_labels(
    op: &mut LabeledOperator,
    top: usize,
    map: &[usize],
    sweep: Sweep,
    solver: &dyn BlockSolver,
) -> Result<Vec<CnotGate>> {
    let mut gates = Vec::new();
    sort_pair(op, top, map, sweep, solver, &mut [], &mut gates)?;
    Ok(gates)
}

fn sort_pair(
    op: &mut LabeledOperator,
    top: usize,
    map: &[usize],
    sweep: Sweep,
    solver: &dyn BlockSolver,
    also: &mut [&mut BitMatrix],
    gates: &mut Vec<CnotGate>,
) -> Result<()> {
    let p = op.p;
    let (t0, b0) = (top * p, (top + 1) * p);
    let local = match sweep {
        Sweep::One => {
            let mut all = op.labels[t0..b0 + p].to_vec();
            all.sort_unstable();
            let b = BitMatrix::from_fn(2 * p, p, |l, c| op.a.get(map[l], all[c]));
            let c = solver.solve_p1(&b)?;
            op.labels[t0..b0 + p].copy_from_slice(&all);
            c
        }
        Sweep::Two => {
            let kt = block_labels(&op.labels, p, top);
            let kb = block_labels(&op.labels, p, top + 1);
            if kt[0] < kb[0] {
                return Ok(());
            }
            let cols: Vec<usize> = kb.iter().chain(&kt).copied().collect();
            let b = BitMatrix::from_fn(2 * p, 2 * p, |l, c| op.a.get(map[l], cols[c]));
            let c = solver.solve_p2(&b)?;
            op.labels[t0..b0].copy_from_slice(&kb);
            op.labels[b0..b0 + p].copy_from_slice(&kt);
            c
        }
    };
    let mut targets: Vec<&mut BitMatrix> = Vec::with_capacity(also.len() + 1);
    targets.push(&mut op.a);
    for m in also.iter_mut() {
        targets.push(&mut **m);
    }
    apply_local(&local, map, &mut targets, gates);
    Ok(())
}

fn check_round(op: &LabeledOperator, which: u8, round: usize) -> Result<()> {
    let which = if op.p == 1 { which - 2 } else { which };
    if op.check(which)? {
        Ok(())
    } else {
        Err(Error::SolverMismatch(format!("invariant {which} violated after round {round}")))
    }
}

/// Step 1: sorts labels of `v` with Problem-1 solves, mirroring gates on `a`.
fn sweep_one(
    v: &mut LabeledOperator,
    a: &mut BitMatrix,
    frame: &Frame<'_>,
    solver: &dyn BlockSolver,
    opts: &SynthOptions,
    gates: &mut Vec<CnotGate>,
) -> Result<()> {
    let m = frame.layout.m;
    if opts.check_invariants {
        check_round(v, 3, 0)?;
    }
    for (r, round) in sorting_network(m).rounds.iter().enumerate() {
        for &(i, _) in round {
            let map = frame.pair_positions(i);
            sort_pair(v, i, &map, Sweep::One, solver, &mut [&mut *a], gates)?;
        }
        if opts.check_invariants {
            check_round(v, 3, r + 1)?;
        }
    }
    Ok(())
}

/// Step 2 from reversed labels; ends block diagonal.
fn sweep_two(
    a: BitMatrix,
    frame: &Frame<'_>,
    solver: &dyn BlockSolver,
    opts: &SynthOptions,
    gates: &mut Vec<CnotGate>,
) -> Result<BitMatrix> {
    let n = a.n_rows();
    let p = frame.layout.p;
    let mut op = LabeledOperator {
        a,
        labels: (0..n).map(|i| n - 1 - i).collect(),
        p,
    };
    if opts.check_invariants {
        check_round(&op, 4, 0)?;
    }
    for (r, round) in sorting_network(frame.layout.m).rounds.iter().enumerate() {
        for &(i, _) in round {
            let map = frame.pair_positions(i);
            sort_pair(&mut op, i, &map, Sweep::Two, solver, &mut [], gates)?;
        }
        if opts.check_invariants {
            check_round(&op, 4, r + 1)?;
        }
    }
    if opts.check_invariants && !is_block_diagonal(&op.a, p) {
        return Err(Error::SolverMismatch("step 2 did not reach a block-diagonal matrix".into()));
    }
    Ok(op.a)
}

/// Step 3: every diagonal block to the identity.
fn sweep_three(a: &mut BitMatrix, frame: &Frame<'_>, solver: &dyn BlockSolver, gates: &mut Vec<CnotGate>) -> Result<()> {
    for i in 0..frame.layout.m {
        let map = frame.block_positions(i);
        let local = a.submatrix(&map, &map);
        let c = solver.solve_p3(&local)?;
        apply_local(&c, &map, &mut [&mut *a], gates);
    }
    Ok(())
}

/// Makes each anti-diagonal block of a block north-west matrix (blocks of
/// the frame's layout) equal to the exchange matrix, using Problem-3
/// solves inside each block. The result is block north-west for every
/// block size dividing the layout's. Returns positional gates.
pub fn re_block(a: &mut BitMatrix, frame: &Frame<'_>, solver: &dyn BlockSolver) -> Result<Vec<CnotGate>> {
    let (p, m) = (frame.layout.p, frame.layout.m);
    if !is_block_northwest(a, p) {
        return Err(Error::Precondition(format!("matrix is not block north-west at block size {p}")));
    }
    let mut gates = Vec::new();
    for i in 0..m {
        let j = m - 1 - i;
        let map = frame.block_positions(i);
        // local (l, l') entry: row map[l], column of the reversed anti-diagonal block
        let local = BitMatrix::from_fn(p, p, |l, l2| {
            let c = map[l2] - i * p;
            a.get(map[l], j * p + (p - 1 - c))
        });
        if !local.is_invertible() {
            return Err(Error::Precondition(format!("anti-diagonal block {i} is singular")));
        }
        let c = solver.solve_p3(&local)?;
        apply_local(&c, &map, &mut [&mut *a], &mut gates);
    }
    Ok(gates)
}

fn finish(a: &BitMatrix, frame: &Frame<'_>, gates: &[CnotGate]) -> Result<CnotCircuit> {
    if *a != BitMatrix::identity(a.n_rows()) {
        return Err(Error::SolverMismatch("reduction did not reach the identity".into()));
    }
    let mut qubit_gates = frame.to_qubits(gates);
    qubit_gates.reverse();
    CnotCircuit::from_gates(a.n_rows(), qubit_gates)
}

fn upl_labeled(a: &BitMatrix, p: usize) -> Result<LabeledOperator> {
    let upl = upl_decompose(a)?;
    Ok(LabeledOperator {
        a: upl.v,
        labels: upl.labels,
        p,
    })
}

/// Synthesizes `a` on `layout`. The circuit implements `a` (its simulation
/// equals `a`) and uses only edges of `layout.graph`.
pub fn synth(a: &BitMatrix, layout: &BlockLineLayout, solver: &dyn BlockSolver, opts: &SynthOptions) -> Result<CnotCircuit> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        });
    }
    if a.n_rows() != layout.n() {
        return Err(Error::DimensionMismatch {
            expected: layout.n(),
            found: a.n_rows(),
        });
    }
    if solver.p() != layout.p {
        return Err(Error::SolverMismatch(format!(
            "solver block size {} on a layout with block size {}",
            solver.p(),
            layout.p
        )));
    }
    let frame = Frame::own(layout);
    let mut work = frame.to_positions(a);
    if !work.is_invertible() {
        return Err(Error::Singular);
    }
    let mut gates = Vec::new();
    let mut v = upl_labeled(&work, layout.p)?;
    sweep_one(&mut v, &mut work, &frame, solver, opts, &mut gates)?;
    if opts.check_invariants && !is_block_northwest(&work, layout.p) {
        return Err(Error::SolverMismatch("step 1 did not reach a block north-west matrix".into()));
    }
    let mut work = sweep_two(work, &frame, solver, opts, &mut gates)?;
    sweep_three(&mut work, &frame, solver, &mut gates)?;
    finish(&work, &frame, &gates)
}

/// Nearest-neighbour synthesis on a line of `n` qubits, depth at most `5n`.
pub fn synth_lnn(a: &BitMatrix) -> Result<CnotCircuit> {
    let layout = ArchSpec::Line { n: a.n_rows() }.build()?;
    synth(a, &layout, &LineSolver, &SynthOptions::default())
}

/// Step 1 at the coarse granularity, re-blocking, then steps 2 and 3 at the
/// fine granularity. Positions follow the fine layout's order, in which
/// every coarse block must be a run of consecutive fine blocks.
pub fn synth_combined(
    a: &BitMatrix,
    coarse: &BlockLineLayout,
    coarse_solver: &dyn BlockSolver,
    fine: &BlockLineLayout,
    fine_solver: &dyn BlockSolver,
    opts: &SynthOptions,
) -> Result<CnotCircuit> {
    if coarse.n() != fine.n() || a.n_rows() != fine.n() || !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: fine.n(),
            found: a.n_rows(),
        });
    }
    if coarse.p % fine.p != 0 {
        return Err(Error::Layout(format!(
            "fine block size {} does not divide coarse block size {}",
            fine.p, coarse.p
        )));
    }
    if coarse_solver.p() != coarse.p || fine_solver.p() != fine.p {
        return Err(Error::SolverMismatch("solver block sizes do not match the layouts".into()));
    }
    let fine_frame = Frame::own(fine);
    let coarse_frame = Frame::new(coarse, fine.order())?;
    let mut work = fine_frame.to_positions(a);
    if !work.is_invertible() {
        return Err(Error::Singular);
    }
    let mut gates = Vec::new();
    let mut v = upl_labeled(&work, coarse.p)?;
    sweep_one(&mut v, &mut work, &coarse_frame, coarse_solver, opts, &mut gates)?;
    gates.extend(re_block(&mut work, &coarse_frame, coarse_solver)?);
    if opts.check_invariants && !is_block_northwest(&work, fine.p) {
        return Err(Error::SolverMismatch("re-blocking did not reach a block north-west matrix".into()));
    }
    let mut work = sweep_two(work, &fine_frame, fine_solver, opts, &mut gates)?;
    sweep_three(&mut work, &fine_frame, fine_solver, &mut gates)?;
    finish(&work, &fine_frame, &gates)
}

/// `m1·d1 + d*(coarse) + m2·d2 + d*(fine)`.
pub fn combined_bound(coarse_m: usize, coarse: LocalBounds, fine_m: usize, fine: LocalBounds) -> Option<usize> {
    Some(coarse_m * coarse.d1? + coarse.d_star? + fine_m * fine.d2? + fine.d_star?)
}
