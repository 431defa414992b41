//! Plain-text matrix and circuit files.
//!
//! Matrix: one row per line of `0`/`1` characters (spaces allowed between
//! digits). Circuit: a `qubits <n>` header followed by `CNOT <control>
//! <target>` lines. Both accept blank lines and `#` comments.

use std::fmt::Write as _;

use gf2synth_core::{BitMatrix, CnotCircuit, CnotGate};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("empty input")]
    Empty,
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn parse_matrix(text: &str) -> Result<BitMatrix, FormatError> {
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (no, line) in content_lines(text) {
        let mut row = Vec::new();
        for ch in line.chars().filter(|c| !c.is_whitespace()) {
            match ch {
                '0' => row.push(0),
                '1' => row.push(1),
                other => return Err(syntax(no, format!("unexpected character `{other}`"))),
            }
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(syntax(no, format!("row has {} entries, expected {}", row.len(), first.len())));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(BitMatrix::from_rows(&rows))
}

pub fn write_matrix(m: &BitMatrix) -> String {
    let mut s = String::with_capacity(m.n_rows() * (m.n_cols() + 1));
    for i in 0..m.n_rows() {
        for j in 0..m.n_cols() {
            s.push(if m.get(i, j) { '1' } else { '0' });
        }
        s.push('\n');
    }
    s
}

pub fn parse_circuit(text: &str) -> Result<CnotCircuit, FormatError> {
    let mut lines = content_lines(text);
    let (no, header) = lines.next().ok_or(FormatError::Empty)?;
    let n = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["qubits", n] => n.parse::<usize>().map_err(|_| syntax(no, format!("bad qubit count `{n}`")))?,
        _ => return Err(syntax(no, "expected `qubits <n>`")),
    };
    let mut gates = Vec::new();
    for (no, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let (c, t) = match parts[..] {
            [op, c, t] if op.eq_ignore_ascii_case("cnot") => (c, t),
            _ => return Err(syntax(no, "expected `CNOT <control> <target>`")),
        };
        let idx = |s: &str| -> Result<usize, FormatError> {
            let q = s.parse::<usize>().map_err(|_| syntax(no, format!("bad qubit `{s}`")))?;
            if q >= n {
                return Err(syntax(no, format!("qubit {q} out of range for {n} qubits")));
            }
            Ok(q)
        };
        let gate = CnotGate::new(idx(c)?, idx(t)?).map_err(|e| syntax(no, e.to_string()))?;
        gates.push(gate);
    }
    CnotCircuit::from_gates(n, gates).map_err(|e| syntax(no, e.to_string()))
}

pub fn write_circuit(c: &CnotCircuit) -> String {
    let mut s = format!("qubits {}\n", c.n_qubits());
    for g in c.gates() {
        let _ = writeln!(s, "CNOT {} {}", g.control, g.target);
    }
    s
}
