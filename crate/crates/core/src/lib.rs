//! Depth-bounded synthesis of CNOT circuits on block-line architectures.
//!
//! An invertible matrix over GF(2) is reduced to the identity by sweeps of
//! local operations on pairs of neighbouring qubit blocks, each solved by a
//! closed-form box, a breadth-first depth table or an analytic all-to-all
//! construction.
//!
//! ```
//! use gf2synth_core::{synth_lnn, BitMatrix};
//!
//! let a = BitMatrix::random_invertible(8, 7);
//! let circuit = synth_lnn(&a).unwrap();
//! assert_eq!(circuit.simulate(), a);
//! assert!(circuit.depth() <= 5 * 8);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod box_solvers;
pub mod circuit;
pub mod error;
pub mod gf2;
pub mod synth;
pub mod topology;

pub use box_solvers::{
    AllToAllMode, BlockSolver, DepthTable, FreshTables, LocalBounds, Needs, P2Method, Strategy,
    TableKind, TableSource,
};
pub use circuit::{CnotCircuit, CnotGate, Violation};
pub use error::{Error, Result};
pub use gf2::{upl_decompose, BitMatrix, UplResult};
pub use synth::{
    check_invariant, sorting_network, synth, synth_combined, synth_lnn, LabeledOperator, SortingNetwork,
    SynthOptions,
};
pub use topology::{oriented_matchings, ArchSpec, BlockLineLayout, ConnectivityGraph, Move};
