//! Local solvers for adjacent block pairs and single blocks.
//!
//! * Problem 1: zero the lower block of a full-rank `2p x p` matrix.
//! * Problem 2: turn `[B1 B3; B2 0]` into a block-diagonal matrix.
//! * Problem 3: reduce an invertible `p x p` block to the identity.

pub mod alltoall;
pub mod closed;
pub mod solver;
pub mod table;

pub use alltoall::{
    alltoall_solve_p1, alltoall_solve_p1_outcome, alltoall_solve_p2, alltoall_solve_p2_outcome, ceil_log2,
    matching_decomposition, p1_bound, p2_bound, AllToAllMode, AllToAllOutcome,
};
pub use closed::{box_p1_closed, box_p2_closed};
pub use solver::{
    build_solver, instance, AllToAllSolver, BlockSolver, FreshTables, LineSolver, LocalBounds, Needs, P2Method,
    SplitP2, Strategy, TableSolver, TableSource,
};
pub use table::{
    bfs_table, gaussian_binomial_2, gl_order, rcef_bytes, table_moves, BfsOptions, BfsProgress, DepthTable,
    TableKind, ROOT_MOVE,
};
