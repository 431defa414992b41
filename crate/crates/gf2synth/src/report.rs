//! Run reports with verdicts recomputed outside the synthesizer.

use std::collections::HashSet;

use gf2synth_core::{BitMatrix, CnotCircuit, ConnectivityGraph};
use serde::Serialize;

use crate::cache::sha256_hex;
use crate::formats::write_matrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub functional: bool,
    pub compliance: bool,
    pub violations: usize,
    /// `None` when no bound is known for the architecture.
    pub depth_bound: Option<bool>,
}

impl Verdicts {
    pub fn passed(&self) -> bool {
        self.functional && self.compliance && self.depth_bound != Some(false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub digest: String,
    pub arch: String,
    pub strategy: String,
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub depth: usize,
    pub gates: usize,
    pub bound: Option<usize>,
    pub elapsed_ms: f64,
    pub verdicts: Verdicts,
}

/// SHA-256 of the matrix in canonical text form.
pub fn matrix_digest(a: &BitMatrix) -> String {
    sha256_hex(write_matrix(a).as_bytes())
}

/// Runs every basis vector through the gates as a bit state and compares
/// the images with the columns of `a`.
pub fn implements(circuit: &CnotCircuit, a: &BitMatrix) -> bool {
    let n = circuit.n_qubits();
    if !a.is_square() || a.n_rows() != n {
        return false;
    }
    (0..n).all(|j| {
        let mut state = vec![false; n];
        state[j] = true;
        for g in circuit.gates() {
            if state[g.control] {
                state[g.target] = !state[g.target];
            }
        }
        (0..n).all(|i| state[i] == a.get(i, j))
    })
}

/// Number of gates not on an edge of `graph`.
pub fn off_graph_gates(circuit: &CnotCircuit, graph: &ConnectivityGraph) -> usize {
    let edges: HashSet<(usize, usize)> = graph.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
    circuit
        .gates()
        .iter()
        .filter(|g| {
            let (c, t) = (g.control, g.target);
            c >= graph.n() || t >= graph.n() || !edges.contains(&(c.min(t), c.max(t)))
        })
        .count()
}

/// As-soon-as-possible layer count.
pub fn asap_depth(circuit: &CnotCircuit) -> usize {
    let mut ready = vec![0usize; circuit.n_qubits()];
    let mut depth = 0;
    for g in circuit.gates() {
        let layer = ready[g.control].max(ready[g.target]) + 1;
        ready[g.control] = layer;
        ready[g.target] = layer;
        depth = depth.max(layer);
    }
    depth
}

pub fn verdicts(circuit: &CnotCircuit, a: &BitMatrix, graph: &ConnectivityGraph, bound: Option<usize>) -> Verdicts {
    let violations = off_graph_gates(circuit, graph);
    Verdicts {
        functional: implements(circuit, a),
        compliance: violations == 0 && circuit.n_qubits() == graph.n(),
        violations,
        depth_bound: bound.map(|b| asap_depth(circuit) <= b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gf2synth_core::{synth_lnn, CnotGate};

    #[test]
    fn agrees_with_core_checks() {
        for seed in 0..20 {
            let a = BitMatrix::random_invertible(10, seed);
            let c = synth_lnn(&a).unwrap();
            assert!(implements(&c, &a));
            assert_eq!(asap_depth(&c), c.depth());
            assert_eq!(off_graph_gates(&c, &ConnectivityGraph::path(10)), 0);
            let v = verdicts(&c, &a, &ConnectivityGraph::path(10), Some(50));
            assert!(v.passed());
        }
    }

    #[test]
    fn detects_damage() {
        let a = BitMatrix::random_invertible(6, 3);
        let c = synth_lnn(&a).unwrap();
        let mut gates = c.gates().to_vec();
        gates.remove(gates.len() / 2);
        let short = CnotCircuit::from_gates(6, gates).unwrap();
        assert!(!implements(&short, &a));
        let mut far = c.clone();
        far.push(CnotGate::new(0, 5).unwrap());
        far.push(CnotGate::new(0, 5).unwrap());
        assert!(implements(&far, &a));
        assert_eq!(off_graph_gates(&far, &ConnectivityGraph::path(6)), 2);
        assert_eq!(verdicts(&c, &a, &ConnectivityGraph::path(6), Some(0)).depth_bound, Some(false));
    }

    #[test]
    fn digest_is_stable() {
        let d = matrix_digest(&BitMatrix::identity(2));
        assert_eq!(d, sha256_hex(b"10\n01\n"));
        assert_eq!(d.len(), 64);
    }
}
