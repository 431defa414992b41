//! CNOT-only circuits: simulation, ASAP depth and connectivity checks.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::topology::ConnectivityGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CnotGate {
    pub control: usize,
    pub target: usize,
}

impl CnotGate {
    pub fn new(control: usize, target: usize) -> Result<Self> {
        if control == target {
            return Err(Error::InvalidGate(control));
        }
        Ok(Self { control, target })
    }

    /// Unchecked constructor for internal use where `control != target` is known.
    #[inline]
    pub(crate) const fn raw(control: usize, target: usize) -> Self {
        Self { control, target }
    }

    pub fn touches(&self, q: usize) -> bool {
        self.control == q || self.target == q
    }
}

/// An ordered gate list; gate 0 is applied first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnotCircuit {
    n_qubits: usize,
    gates: Vec<CnotGate>,
}

/// A gate that is not an edge of the connectivity graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub index: usize,
    pub gate: CnotGate,
}

impl CnotCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<CnotGate>) -> Result<Self> {
        for g in &gates {
            if g.control == g.target {
                return Err(Error::InvalidGate(g.control));
            }
            for q in [g.control, g.target] {
                if q >= n_qubits {
                    return Err(Error::IndexOutOfRange {
                        index: q,
                        bound: n_qubits,
                    });
                }
            }
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[CnotGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: CnotGate) {
        assert!(gate.control < self.n_qubits && gate.target < self.n_qubits);
        assert_ne!(gate.control, gate.target);
        self.gates.push(gate);
    }

    pub fn extend(&mut self, other: &CnotCircuit) {
        assert_eq!(self.n_qubits, other.n_qubits);
        self.gates.extend_from_slice(&other.gates);
    }

    /// The operator the circuit implements: `E_{g_N} ... E_{g_1}`.
    pub fn simulate(&self) -> BitMatrix {
        let mut m = BitMatrix::identity(self.n_qubits);
        self.apply_to(&mut m);
        m
    }

    /// Left-multiplies `m` by the circuit's operator (row `target ^= row control`).
    pub fn apply_to(&self, m: &mut BitMatrix) {
        for g in &self.gates {
            m.add_row(g.control, g.target);
        }
    }

    /// ASAP layer count.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let l = 1 + level[g.control].max(level[g.target]);
            level[g.control] = l;
            level[g.target] = l;
            depth = depth.max(l);
        }
        depth
    }

    /// ASAP layers; each layer's gates act on pairwise disjoint qubits.
    pub fn layers(&self) -> Vec<Vec<CnotGate>> {
        let mut level = vec![0usize; self.n_qubits];
        let mut layers: Vec<Vec<CnotGate>> = Vec::new();
        for g in &self.gates {
            let l = level[g.control].max(level[g.target]);
            level[g.control] = l + 1;
            level[g.target] = l + 1;
            if layers.len() <= l {
                layers.push(Vec::new());
            }
            layers[l].push(*g);
        }
        layers
    }

    pub fn reverse(&self) -> Self {
        let mut gates = self.gates.clone();
        gates.reverse();
        Self {
            n_qubits: self.n_qubits,
            gates,
        }
    }

    pub fn check_compliance(&self, graph: &ConnectivityGraph) -> Result<Vec<Violation>> {
        if graph.n() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: graph.n(),
            });
        }
        Ok(self
            .gates
            .iter()
            .enumerate()
            .filter(|(_, g)| !graph.has_edge(g.control, g.target))
            .map(|(index, &gate)| Violation { index, gate })
            .collect())
    }

    /// Relabels qubits through `map` (local index to global index).
    pub fn mapped(&self, map: &[usize], n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: self
                .gates
                .iter()
                .map(|g| CnotGate::raw(map[g.control], map[g.target]))
                .collect(),
        }
    }
}
