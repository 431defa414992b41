use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::alltoall::{
    alltoall_solve_p1_outcome, alltoall_solve_p2_outcome, check_p2_shape, p1_bound, p2_bound, AllToAllMode,
};
use super::closed::{box_p1_closed, box_p2_closed};
use super::table::{bfs_table, BfsOptions, DepthTable, TableKind};
use crate::circuit::CnotCircuit;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::synth::{synth, SynthOptions};
use crate::topology::{ArchSpec, BlockLineLayout, ConnectivityGraph};

/// Worst-case local depths `d1`, `d2`, `d*` of a solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LocalBounds {
    pub d1: Option<usize>,
    pub d2: Option<usize>,
    pub d_star: Option<usize>,
}

impl LocalBounds {
    /// `m·(d1 + d2) + d*`.
    pub fn total(&self, m: usize) -> Option<usize> {
        Some(m * (self.d1? + self.d2?) + self.d_star?)
    }
}

/// Local solvers for the three block problems. Circuits are on local
/// vertices: `2p` for Problems 1 and 2, `p` for Problem 3.
pub trait BlockSolver {
    fn p(&self) -> usize;
    /// `b` is `2p x p` of rank `p`; result `C` gives `C·b = [B3; 0]`.
    fn solve_p1(&self, b: &BitMatrix) -> Result<CnotCircuit>;
    /// `b = [B1 B3; B2 0]`; result `C` gives `C·b` block diagonal.
    fn solve_p2(&self, b: &BitMatrix) -> Result<CnotCircuit>;
    /// `a` invertible `p x p`; result `C` gives `C·a = I`.
    fn solve_p3(&self, a: &BitMatrix) -> Result<CnotCircuit>;
    fn bounds(&self) -> LocalBounds;
}

/// Supplies depth tables; implementations may cache.
pub trait TableSource {
    fn table(&self, kind: TableKind, p: usize, graph: &ConnectivityGraph) -> Result<Arc<DepthTable>>;
}

/// Builds every requested table from scratch.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreshTables;

impl TableSource for FreshTables {
    fn table(&self, kind: TableKind, p: usize, graph: &ConnectivityGraph) -> Result<Arc<DepthTable>> {
        bfs_table(kind, p, graph, BfsOptions::default()).map(Arc::new)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum P2Method {
    /// Exact table for `p <= 3`, split solver above.
    #[default]
    Auto,
    Exact,
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Strategy {
    pub alltoall_mode: AllToAllMode,
    pub p2_method: P2Method,
}

/// Which problems a solver must handle; unneeded tables are not built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Needs {
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
}

impl Needs {
    pub const ALL: Needs = Needs {
        p1: true,
        p2: true,
        p3: true,
    };
}

fn missing(what: &str) -> Error {
    Error::Unsupported(format!("solver was built without {what}"))
}

fn check_p1_post(b: &BitMatrix, c: &CnotCircuit) -> Result<()> {
    let p = b.n_cols();
    let mut out = b.clone();
    c.apply_to(&mut out);
    let top: Vec<usize> = (0..p).collect();
    let bottom: Vec<usize> = (p..2 * p).collect();
    if out.submatrix(&bottom, &top).is_zero() {
        Ok(())
    } else {
        Err(Error::SolverMismatch("Problem 1 result has a nonzero lower block".into()))
    }
}

fn check_p2_post(b: &BitMatrix, c: &CnotCircuit) -> Result<()> {
    let p = b.n_rows() / 2;
    let mut out = b.clone();
    c.apply_to(&mut out);
    let top: Vec<usize> = (0..p).collect();
    let bottom: Vec<usize> = (p..2 * p).collect();
    if out.submatrix(&bottom, &top).is_zero() && out.submatrix(&top, &bottom).is_zero() {
        Ok(())
    } else {
        Err(Error::SolverMismatch("Problem 2 result is not block diagonal".into()))
    }
}

fn check_p3_post(a: &BitMatrix, c: &CnotCircuit) -> Result<()> {
    let mut out = a.clone();
    c.apply_to(&mut out);
    if out == BitMatrix::identity(a.n_rows()) {
        Ok(())
    } else {
        Err(Error::SolverMismatch("Problem 3 result is not the identity".into()))
    }
}

/// Closed-form boxes for single-qubit blocks on a line.
#[derive(Debug, Clone, Copy, Default)]
pub struct LineSolver;

impl BlockSolver for LineSolver {
    fn p(&self) -> usize {
        1
    }

    fn solve_p1(&self, b: &BitMatrix) -> Result<CnotCircuit> {
        if b.n_rows() != 2 || b.n_cols() != 1 {
            return Err(Error::UnexpectedBox(format!("{b:?}")));
        }
        match (b.get(0, 0), b.get(1, 0)) {
            (true, false) => Ok(CnotCircuit::new(2)),
            (x, true) => box_p1_closed(&BitMatrix::from_rows(&[[1, x as u8], [0, 1]])),
            _ => Err(Error::Singular),
        }
    }

    fn solve_p2(&self, b: &BitMatrix) -> Result<CnotCircuit> {
        if *b == BitMatrix::identity(2) {
            return box_p2_closed(b, true);
        }
        check_p2_shape(b)?;
        box_p2_closed(&BitMatrix::from_rows(&[[1, b.get(0, 0) as u8], [0, 1]]), false)
    }

    fn solve_p3(&self, a: &BitMatrix) -> Result<CnotCircuit> {
        if *a == BitMatrix::identity(1) {
            Ok(CnotCircuit::new(1))
        } else {
            Err(Error::Singular)
        }
    }

    fn bounds(&self) -> LocalBounds {
        LocalBounds {
            d1: Some(2),
            d2: Some(3),
            d_star: Some(0),
        }
    }
}

/// Problem 2 for `p = 4` from four smaller tables: move one half into
/// place with a full table, then the other half with a table whose layers
/// keep the first half's subspace fixed. Both orders are tried.
#[derive(Debug, Clone)]
pub struct SplitP2 {
    p: usize,
    p1: Arc<DepthTable>,
    fix_top: Arc<DepthTable>,
    p1_lower: Arc<DepthTable>,
    fix_bottom: Arc<DepthTable>,
    counts_by_depth: Vec<u64>,
}

impl SplitP2 {
    pub fn new(
        p1: Arc<DepthTable>,
        fix_top: Arc<DepthTable>,
        p1_lower: Arc<DepthTable>,
        fix_bottom: Arc<DepthTable>,
    ) -> Result<Self> {
        let p = p1.p();
        let kinds = [
            (&p1, TableKind::P1),
            (&fix_top, TableKind::FixTop),
            (&p1_lower, TableKind::P1Lower),
            (&fix_bottom, TableKind::FixBottom),
        ];
        for (t, k) in kinds {
            if t.kind() != k || t.p() != p || t.fingerprint() != p1.fingerprint() {
                return Err(Error::SolverMismatch(format!("split solver needs a {} table", k.name())));
            }
        }
        if p * p > 24 {
            return Err(Error::Unsupported(format!("split solver histogram at p={p}")));
        }
        let mut s = Self {
            p,
            p1,
            fix_top,
            p1_lower,
            fix_bottom,
            counts_by_depth: Vec::new(),
        };
        let mut counts: Vec<u64> = Vec::new();
        for x in 0u64..(1 << (p * p)) {
            let d = s.solve(&instance(p, x))?.depth();
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += 1;
        }
        s.counts_by_depth = counts;
        Ok(s)
    }

    /// Depth histogram over all `2^(p²)` instance classes.
    pub fn counts_by_depth(&self) -> &[u64] {
        &self.counts_by_depth
    }

    pub fn max_depth(&self) -> usize {
        self.counts_by_depth.len().saturating_sub(1)
    }

    pub fn solve(&self, b: &BitMatrix) -> Result<CnotCircuit> {
        let p = check_p2_shape(b)?;
        if p != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                found: p,
            });
        }
        let rows: Vec<usize> = (0..2 * p).collect();
        let left: Vec<usize> = (0..p).collect();
        let right: Vec<usize> = (p..2 * p).collect();
        let l = b.submatrix(&rows, &left);
        let r = b.submatrix(&rows, &right);

        let first = self.p1.trace(&l)?;
        let mut r1 = r.clone();
        first.apply_to(&mut r1);
        let mut a = first;
        a.extend(&self.fix_top.trace(&r1)?);

        let first = self.p1_lower.trace(&r)?;
        let mut l2 = l;
        first.apply_to(&mut l2);
        let mut c = first;
        c.extend(&self.fix_bottom.trace(&l2)?);

        Ok(if c.depth() < a.depth() { c } else { a })
    }
}

/// `[X I; I 0]` with `X` read row-major from the bits of `x`.
pub fn instance(p: usize, x: u64) -> BitMatrix {
    BitMatrix::from_fn(2 * p, 2 * p, |i, j| {
        if i < p && j < p {
            x >> (i * p + j) & 1 == 1
        } else {
            (i < p && j == i + p) || (i >= p && j + p == i)
        }
    })
}

#[derive(Debug, Clone)]
enum P2Solver {
    Table(Arc<DepthTable>),
    Split(Box<SplitP2>),
}

/// Solver backed by depth tables on the layout's local graphs.
#[derive(Debug, Clone)]
pub struct TableSolver {
    p: usize,
    p1: Option<Arc<DepthTable>>,
    p2: Option<P2Solver>,
    p3: Option<Arc<DepthTable>>,
}

impl TableSolver {
    pub fn new(layout: &BlockLineLayout, method: P2Method, needs: Needs, source: &dyn TableSource) -> Result<Self> {
        let p = layout.p;
        let pair = &layout.local_graph;
        let p1 = if needs.p1 || (needs.p2 && p > 3 && method != P2Method::Exact) {
            Some(source.table(TableKind::P1, p, pair)?)
        } else {
            None
        };
        let p2 = if needs.p2 {
            let exact = match method {
                P2Method::Auto => p <= 3,
                P2Method::Exact => true,
                P2Method::Split => false,
            };
            Some(if exact {
                P2Solver::Table(source.table(TableKind::P2, p, pair)?)
            } else {
                P2Solver::Split(Box::new(SplitP2::new(
                    p1.clone().expect("built above"),
                    source.table(TableKind::FixTop, p, pair)?,
                    source.table(TableKind::P1Lower, p, pair)?,
                    source.table(TableKind::FixBottom, p, pair)?,
                )?))
            })
        } else {
            None
        };
        let p3 = if needs.p3 {
            Some(source.table(TableKind::P3, p, &layout.intra_graph)?)
        } else {
            None
        };
        Ok(Self { p, p1, p2, p3 })
    }

    pub fn split(&self) -> Option<&SplitP2> {
        match &self.p2 {
            Some(P2Solver::Split(s)) => Some(s),
            _ => None,
        }
    }
}

impl BlockSolver for TableSolver {
    fn p(&self) -> usize {
        self.p
    }

    fn solve_p1(&self, b: &BitMatrix) -> Result<CnotCircuit> {
        let c = self.p1.as_ref().ok_or_else(|| missing("Problem 1"))?.trace(b)?;
        check_p1_post(b, &c)?;
        Ok(c)
    }

    fn solve_p2(&self, b: &BitMatrix) -> Result<CnotCircuit> {
        check_p2_shape(b)?;
        let c = match self.p2.as_ref().ok_or_else(|| missing("Problem 2"))? {
            P2Solver::Table(t) => t.trace(b)?,
            P2Solver::Split(s) => s.solve(b)?,
        };
        check_p2_post(b, &c)?;
        Ok(c)
    }

    fn solve_p3(&self, a: &BitMatrix) -> Result<CnotCircuit> {
        if !a.is_invertible() {
            return Err(Error::Singular);
        }
        let c = self.p3.as_ref().ok_or_else(|| missing("Problem 3"))?.trace(a)?;
        check_p3_post(a, &c)?;
        Ok(c)
    }

    fn bounds(&self) -> LocalBounds {
        LocalBounds {
            d1: self.p1.as_ref().map(|t| t.max_depth()),
            d2: self.p2.as_ref().map(|s| match s {
                P2Solver::Table(t) => t.max_depth(),
                P2Solver::Split(s) => s.max_depth(),
            }),
            d_star: self.p3.as_ref().map(|t| t.max_depth()),
        }
    }
}

enum BlockP3 {
    Table(Arc<DepthTable>),
    /// Full synthesis of the block on a chain of smaller complete blocks.
    Recursive {
        layout: Box<BlockLineLayout>,
        solver: Box<dyn BlockSolver>,
    },
}

/// Analytic Problem 1/2 solver for complete pair graphs.
pub struct AllToAllSolver {
    p: usize,
    mode: AllToAllMode,
    p3: Option<BlockP3>,
}

impl AllToAllSolver {
    /// Problem 3 uses a table on `K_p` for `p <= 4`, otherwise a recursive
    /// synthesis on `blocks-full` with the largest block size `q <= 4`
    /// dividing `p`.
    pub fn new(p: usize, mode: AllToAllMode, need_p3: bool, source: &dyn TableSource) -> Result<Self> {
        let p3 = if !need_p3 {
            None
        } else if p <= 4 {
            Some(BlockP3::Table(source.table(TableKind::P3, p, &ConnectivityGraph::complete(p))?))
        } else {
            let q = (1..=4).rev().find(|q| p % q == 0).unwrap_or(1);
            let arch = if q == 1 {
                ArchSpec::Line { n: p }
            } else {
                ArchSpec::BlocksFull { p: q, m: p / q }
            };
            let layout = arch.build()?;
            let solver = build_solver(&layout, &Strategy { alltoall_mode: mode, p2_method: P2Method::Auto }, Needs::ALL, source)?;
            Some(BlockP3::Recursive {
                layout: Box::new(layout),
                solver,
            })
        };
        Ok(Self { p, mode, p3 })
    }

    pub fn mode(&self) -> AllToAllMode {
        self.mode
    }
}

impl BlockSolver for AllToAllSolver {
    fn p(&self) -> usize {
        self.p
    }

    fn solve_p1(&self, b: &BitMatrix) -> Result<CnotCircuit> {
        let c = alltoall_solve_p1_outcome(b, self.mode)?.circuit;
        check_p1_post(b, &c)?;
        Ok(c)
    }

    fn solve_p2(&self, b: &BitMatrix) -> Result<CnotCircuit> {
        let c = alltoall_solve_p2_outcome(b, self.mode)?.circuit;
        check_p2_post(b, &c)?;
        Ok(c)
    }

    fn solve_p3(&self, a: &BitMatrix) -> Result<CnotCircuit> {
        if !a.is_invertible() {
            return Err(Error::Singular);
        }
        let c = match self.p3.as_ref().ok_or_else(|| missing("Problem 3"))? {
            BlockP3::Table(t) => t.trace(a)?,
            BlockP3::Recursive { layout, solver } => {
                // synth returns a circuit implementing `a`; its reverse reduces `a` to I
                synth(a, layout, solver.as_ref(), &SynthOptions::default())?.reverse()
            }
        };
        check_p3_post(a, &c)?;
        Ok(c)
    }

    fn bounds(&self) -> LocalBounds {
        let (d1, d2) = match self.mode {
            // improved mode may fall back to basic
            AllToAllMode::Improved => (
                p1_bound(self.p, AllToAllMode::Improved).max(p1_bound(self.p, AllToAllMode::Basic)),
                p2_bound(self.p, AllToAllMode::Improved).max(p2_bound(self.p, AllToAllMode::Basic)),
            ),
            AllToAllMode::Basic => (p1_bound(self.p, self.mode), p2_bound(self.p, self.mode)),
        };
        let d_star = self.p3.as_ref().and_then(|p3| match p3 {
            BlockP3::Table(t) => Some(t.max_depth()),
            BlockP3::Recursive { layout, solver } => solver.bounds().total(layout.m),
        });
        LocalBounds {
            d1: Some(d1),
            d2: Some(d2),
            d_star,
        }
    }
}

/// Default solver for a layout: closed-form boxes for `p = 1`, analytic
/// solves for complete pair graphs with `p >= 4`, tables otherwise.
pub fn build_solver(
    layout: &BlockLineLayout,
    strategy: &Strategy,
    needs: Needs,
    source: &dyn TableSource,
) -> Result<Box<dyn BlockSolver>> {
    let p = layout.p;
    if p == 1 {
        return Ok(Box::new(LineSolver));
    }
    let complete = layout.local_graph.edge_count() == p * (2 * p - 1);
    if complete && p >= 4 {
        return Ok(Box::new(AllToAllSolver::new(p, strategy.alltoall_mode, needs.p3, source)?));
    }
    if p > 4 {
        return Err(Error::Unsupported(format!(
            "no local solver for block size {p} on a non-complete pair graph"
        )));
    }
    Ok(Box::new(TableSolver::new(layout, strategy.p2_method, needs, source)?))
}
