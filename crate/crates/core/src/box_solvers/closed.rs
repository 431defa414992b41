//! Two-qubit boxes for the nearest-neighbour line (block size 1).

use alloc::format;

use crate::circuit::{CnotCircuit, CnotGate};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

fn circuit(gates: &[(usize, usize)]) -> CnotCircuit {
    let mut c = CnotCircuit::new(2);
    for &(a, b) in gates {
        c.push(CnotGate::raw(a, b));
    }
    c
}

fn is(b: &BitMatrix, rows: [[u8; 2]; 2]) -> bool {
    *b == BitMatrix::from_rows(&rows)
}

fn unexpected(b: &BitMatrix) -> Error {
    Error::UnexpectedBox(format!("{b:?}"))
}

/// Step-1 box on rows `(i, i+1)` restricted to their label columns `(k, k')`.
///
/// The result `C` gives `C·b = [[*, 1], [1, 0]]`.
pub fn box_p1_closed(b: &BitMatrix) -> Result<CnotCircuit> {
    if is(b, [[1, 1], [0, 1]]) {
        Ok(circuit(&[(0, 1)]))
    } else if is(b, [[1, 0], [0, 1]]) {
        Ok(circuit(&[(1, 0), (0, 1)]))
    } else {
        Err(unexpected(b))
    }
}

/// Step-2 box. With ordered labels there is nothing to do; otherwise
/// `C·b = [[0, 1], [1, 0]]`.
pub fn box_p2_closed(b: &BitMatrix, labels_ordered: bool) -> Result<CnotCircuit> {
    if labels_ordered {
        return if is(b, [[1, 0], [0, 1]]) {
            Ok(CnotCircuit::new(2))
        } else {
            Err(unexpected(b))
        };
    }
    if is(b, [[1, 1], [0, 1]]) {
        Ok(circuit(&[(0, 1), (1, 0)]))
    } else if is(b, [[1, 0], [0, 1]]) {
        Ok(circuit(&[(0, 1), (1, 0), (0, 1)]))
    } else {
        Err(unexpected(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: [[u8; 2]; 2]) -> BitMatrix {
        BitMatrix::from_rows(&rows)
    }

    #[test]
    fn p1_boxes() {
        for b in [m([[1, 1], [0, 1]]), m([[1, 0], [0, 1]])] {
            let c = box_p1_closed(&b).unwrap();
            let mut out = b.clone();
            c.apply_to(&mut out);
            assert!(out.get(0, 1) && out.get(1, 0) && !out.get(1, 1));
        }
        assert_eq!(box_p1_closed(&m([[1, 1], [0, 1]])).unwrap().len(), 1);
        assert_eq!(box_p1_closed(&m([[1, 0], [0, 1]])).unwrap().depth(), 2);
        assert!(box_p1_closed(&m([[0, 1], [1, 0]])).is_err());
    }

    #[test]
    fn p2_boxes() {
        assert!(box_p2_closed(&m([[1, 0], [0, 1]]), true).unwrap().is_empty());
        assert!(box_p2_closed(&m([[1, 1], [0, 1]]), true).is_err());
        for (b, len) in [(m([[1, 1], [0, 1]]), 2), (m([[1, 0], [0, 1]]), 3)] {
            let c = box_p2_closed(&b, false).unwrap();
            assert_eq!(c.len(), len);
            let mut out = b.clone();
            c.apply_to(&mut out);
            assert_eq!(out, m([[0, 1], [1, 0]]));
        }
        assert!(box_p2_closed(&m([[1, 1], [1, 1]]), false).is_err());
    }
}
