//! Connectivity graphs, block-line layouts and depth-1 move sets.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::circuit::CnotGate;
use crate::error::{Error, Result};

/// Undirected simple graph on `n` qubits, stored as adjacency bitsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityGraph {
    n: usize,
    stride: usize,
    adj: Vec<u64>,
}

impl ConnectivityGraph {
    pub fn new(n: usize) -> Self {
        let stride = n.div_ceil(64).max(1);
        Self {
            n,
            stride,
            adj: vec![0; n * stride],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 1..n {
            g.insert(i - 1, i);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.insert(n - 1, 0);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for a in 0..n {
            for b in a + 1..n {
                g.insert(a, b);
            }
        }
        g
    }

    /// `rows x cols` grid, vertex `(r, c)` numbered `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut g = Self::new(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let q = r * cols + c;
                if c + 1 < cols {
                    g.insert(q, q + 1);
                }
                if r + 1 < rows {
                    g.insert(q, q + cols);
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::Layout(format!("self-loop on vertex {a}")));
        }
        for v in [a, b] {
            if v >= self.n {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    bound: self.n,
                });
            }
        }
        self.insert(a, b);
        Ok(())
    }

    fn insert(&mut self, a: usize, b: usize) {
        self.adj[a * self.stride + b / 64] |= 1 << (b % 64);
        self.adj[b * self.stride + a / 64] |= 1 << (a % 64);
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.adj[a * self.stride + b / 64] >> (b % 64) & 1 == 1
    }

    /// Sorted edge list with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.has_edge(v, u))
    }

    /// Neighbour mask of `v`; only valid for `n <= 64`.
    pub fn neighbor_mask(&self, v: usize) -> u64 {
        debug_assert!(self.n <= 64);
        self.adj[v * self.stride]
    }

    /// Subgraph induced by `vertices`, relabelled `vertices[i] -> i`.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut g = Self::new(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.insert(i, j);
                }
            }
        }
        g
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut g = self.clone();
        for (w, o) in g.adj.iter_mut().zip(&other.adj) {
            *w |= o;
        }
        Ok(g)
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.n == other.n && other.edges().iter().all(|&(a, b)| self.has_edge(a, b))
    }

    pub fn is_connected_on(&self, vertices: &[usize]) -> bool {
        if vertices.is_empty() {
            return true;
        }
        let mut seen = vec![false; vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for (j, &b) in vertices.iter().enumerate() {
                if !seen[j] && self.has_edge(vertices[i], b) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Adjacency fingerprint in the given vertex order: `n:` followed by each
    /// vertex's neighbour mask in hex.
    pub fn fingerprint(&self) -> String {
        let mut s = format!("{}:", self.n);
        for v in 0..self.n {
            if v > 0 {
                s.push('.');
            }
            let mut words: Vec<u64> = self.adj[v * self.stride..(v + 1) * self.stride].to_vec();
            while words.len() > 1 && *words.last().unwrap() == 0 {
                words.pop();
            }
            for (k, w) in words.iter().enumerate().rev() {
                if k + 1 == words.len() {
                    s.push_str(&format!("{w:x}"));
                } else {
                    s.push_str(&format!("{w:016x}"));
                }
            }
        }
        s
    }
}

/// One depth-1 layer: CNOTs on pairwise disjoint qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    gates: Vec<CnotGate>,
}

impl Move {
    pub fn new(mut gates: Vec<CnotGate>) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::Precondition("empty move".to_string()));
        }
        let mut used: Vec<usize> = Vec::new();
        for g in &gates {
            if g.control == g.target {
                return Err(Error::InvalidGate(g.control));
            }
            for q in [g.control, g.target] {
                if used.contains(&q) {
                    return Err(Error::Precondition(format!("qubit {q} used twice in a move")));
                }
                used.push(q);
            }
        }
        gates.sort();
        Ok(Self { gates })
    }

    pub fn gates(&self) -> &[CnotGate] {
        &self.gates
    }

    /// Image of a column vector (bit `i` = row `i`) under this layer.
    #[inline]
    pub fn apply_bits(&self, mut v: u64) -> u64 {
        for g in &self.gates {
            v ^= (v >> g.control & 1) << g.target;
        }
        v
    }
}

/// Every non-empty matching of `g`, each expanded into all control/target
/// orientations. Order is deterministic: matchings by edge-inclusion
/// recursion over the sorted edge list, then orientation masks ascending.
pub fn oriented_matchings(g: &ConnectivityGraph) -> Vec<Move> {
    assert!(g.n() <= 64, "move enumeration limited to 64 vertices");
    let edges = g.edges();
    let mut matchings: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut current = Vec::new();
    collect_matchings(&edges, 0, 0, &mut current, &mut matchings);
    let mut moves = Vec::new();
    for m in matchings {
        for mask in 0u64..(1 << m.len()) {
            let gates = m
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| {
                    if mask >> i & 1 == 0 {
                        CnotGate::raw(a, b)
                    } else {
                        CnotGate::raw(b, a)
                    }
                })
                .collect();
            moves.push(Move::new(gates).expect("matching edges are disjoint"));
        }
    }
    moves
}

fn collect_matchings(
    edges: &[(usize, usize)],
    idx: usize,
    used: u64,
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if idx == edges.len() {
        if !current.is_empty() {
            out.push(current.clone());
        }
        return;
    }
    collect_matchings(edges, idx + 1, used, current, out);
    let (a, b) = edges[idx];
    let bits = (1u64 << a) | (1u64 << b);
    if used & bits == 0 {
        current.push((a, b));
        collect_matchings(edges, idx + 1, used | bits, current, out);
        current.pop();
    }
}

/// Architecture descriptors accepted by [`ArchSpec::build`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArchSpec {
    Line { n: usize },
    Ladder { width: usize, len: usize, diagonals: bool },
    Grid { rows: usize, cols: usize, diagonals: bool },
    BlocksFull { p: usize, m: usize },
    /// `rows x cols` grid with two extra edges joining consecutive row bands,
    /// alternately at the right and left ends.
    AlteredGrid { rows: usize, cols: usize },
}

impl fmt::Display for ArchSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ArchSpec::Line { n } => write!(f, "line:{n}"),
            ArchSpec::Ladder { width, len, diagonals: false } => write!(f, "ladder:{width}x{len}"),
            ArchSpec::Ladder { width, len, diagonals: true } => write!(f, "ladder-diag:{width}x{len}"),
            ArchSpec::Grid { rows, cols, diagonals: false } => write!(f, "grid:{rows}x{cols}"),
            ArchSpec::Grid { rows, cols, diagonals: true } => write!(f, "grid-diag:{rows}x{cols}"),
            ArchSpec::BlocksFull { p, m } => write!(f, "blocks-full:p={p},m={m}"),
            ArchSpec::AlteredGrid { rows, cols } => write!(f, "altered-grid:{rows}x{cols}"),
        }
    }
}

fn parse_num(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| Error::InvalidArchitecture(format!("bad {what} `{s}`")))
}

fn parse_dims(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once('x')
        .ok_or_else(|| Error::InvalidArchitecture(format!("expected <a>x<b>, got `{s}`")))?;
    Ok((parse_num(a, "dimension")?, parse_num(b, "dimension")?))
}

impl FromStr for ArchSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArchitecture(format!("missing `:` in `{s}`")))?;
        match kind.trim() {
            "line" => Ok(ArchSpec::Line {
                n: parse_num(args, "qubit count")?,
            }),
            "ladder" | "ladder-diag" => {
                let (width, len) = parse_dims(args)?;
                Ok(ArchSpec::Ladder {
                    width,
                    len,
                    diagonals: kind.trim() == "ladder-diag",
                })
            }
            "grid" | "grid-diag" => {
                let (rows, cols) = parse_dims(args)?;
                Ok(ArchSpec::Grid {
                    rows,
                    cols,
                    diagonals: kind.trim() == "grid-diag",
                })
            }
            "altered-grid" => {
                let (rows, cols) = parse_dims(args)?;
                Ok(ArchSpec::AlteredGrid { rows, cols })
            }
            "blocks-full" => {
                let (mut p, mut m) = (None, None);
                for part in args.split(',') {
                    let (key, value) = part
                        .split_once('=')
                        .ok_or_else(|| Error::InvalidArchitecture(format!("bad parameter `{part}`")))?;
                    match key.trim() {
                        "p" => p = Some(parse_num(value, "block size")?),
                        "m" => m = Some(parse_num(value, "block count")?),
                        other => {
                            return Err(Error::InvalidArchitecture(format!("unknown parameter `{other}`")))
                        }
                    }
                }
                match (p, m) {
                    (Some(p), Some(m)) => Ok(ArchSpec::BlocksFull { p, m }),
                    _ => Err(Error::InvalidArchitecture("blocks-full needs p and m".to_string())),
                }
            }
            other => Err(Error::InvalidArchitecture(format!("unknown architecture `{other}`"))),
        }
    }
}

impl ArchSpec {
    pub fn n_qubits(&self) -> usize {
        match *self {
            ArchSpec::Line { n } => n,
            ArchSpec::Ladder { width, len, .. } => width * len,
            ArchSpec::Grid { rows, cols, .. } | ArchSpec::AlteredGrid { rows, cols } => rows * cols,
            ArchSpec::BlocksFull { p, m } => p * m,
        }
    }

    /// The block layout used for a plain (single-granularity) synthesis.
    pub fn build(&self) -> Result<BlockLineLayout> {
        match *self {
            ArchSpec::Line { n } => line_layout(n),
            ArchSpec::Ladder { width, len, diagonals } => ladder_layout(width, len, diagonals),
            ArchSpec::Grid { rows, cols, diagonals } => grid_layout(rows, cols, diagonals),
            ArchSpec::BlocksFull { p, m } => blocks_full_layout(p, m),
            ArchSpec::AlteredGrid { rows, cols } => {
                let graph = altered_grid_graph(rows, cols)?;
                snake_ladder_layout(rows, cols, graph, *self)
            }
        }
    }

    /// Coarse/fine layout pair on the same qubits, for architectures that
    /// support two-granularity synthesis: `grid:2x<c>` (2x2 tiles, then
    /// width-2 ladder) and the altered grid.
    pub fn combined_layouts(&self) -> Result<(BlockLineLayout, BlockLineLayout)> {
        match *self {
            ArchSpec::Grid {
                rows: 2,
                cols,
                diagonals: false,
            } => Ok((grid_layout(2, cols, false)?, ladder_layout(2, cols, false)?)),
            ArchSpec::AlteredGrid { rows, cols } => {
                let graph = altered_grid_graph(rows, cols)?;
                let coarse = tile_layout(rows, cols, graph.clone(), false, *self)?;
                let fine = snake_ladder_layout(rows, cols, graph, *self)?;
                Ok((coarse, fine))
            }
            _ => Err(Error::Unsupported(format!("no combined layouts for {self}"))),
        }
    }
}

/// Qubits partitioned into `m` blocks of `p` arranged on a line, with the
/// local embeddings used to run block-level solvers on each adjacent pair.
#[derive(Debug, Clone)]
pub struct BlockLineLayout {
    pub arch: ArchSpec,
    pub p: usize,
    pub m: usize,
    pub blocks: Vec<Vec<usize>>,
    pub graph: ConnectivityGraph,
    /// Graph on `2p` local vertices; `[0, p)` is the first block of a pair.
    pub local_graph: ConnectivityGraph,
    /// Graph on `p` local vertices describing one block.
    pub intra_graph: ConnectivityGraph,
    /// `pair_maps[i][l]` is the global qubit of local vertex `l` for blocks `i, i+1`.
    pub pair_maps: Vec<Vec<usize>>,
    /// `block_maps[i][l]` is the global qubit of intra-block vertex `l` of block `i`.
    pub block_maps: Vec<Vec<usize>>,
    /// Whether every pair embedding is an isomorphism onto the induced subgraph.
    pub exact: bool,
}

impl BlockLineLayout {
    /// Validates the block structure and computes the embeddings.
    pub fn new(
        arch: ArchSpec,
        graph: ConnectivityGraph,
        blocks: Vec<Vec<usize>>,
        local_graph: ConnectivityGraph,
        intra_graph: ConnectivityGraph,
    ) -> Result<Self> {
        let m = blocks.len();
        if m == 0 {
            return Err(Error::Layout("no blocks".to_string()));
        }
        let p = blocks[0].len();
        if p == 0 || blocks.iter().any(|b| b.len() != p) {
            return Err(Error::Layout("blocks must be non-empty and of equal size".to_string()));
        }
        let n = graph.n();
        if n != p * m {
            return Err(Error::Layout(format!("{m} blocks of {p} do not cover {n} qubits")));
        }
        let mut seen = vec![false; n];
        for &q in blocks.iter().flatten() {
            if q >= n || seen[q] {
                return Err(Error::Layout(format!("qubit {q} repeated or out of range")));
            }
            seen[q] = true;
        }
        if local_graph.n() != 2 * p || intra_graph.n() != p {
            return Err(Error::Layout("local graph sizes do not match block size".to_string()));
        }
        for (i, b) in blocks.iter().enumerate() {
            if !graph.is_connected_on(b) {
                return Err(Error::Layout(format!("block {i} is not connected")));
            }
        }

        let mut exact = true;
        let mut pair_maps = Vec::with_capacity(m.saturating_sub(1));
        for i in 0..m.saturating_sub(1) {
            let cands: Vec<&[usize]> = (0..2 * p)
                .map(|l| if l < p { &blocks[i][..] } else { &blocks[i + 1][..] })
                .collect();
            let map = find_embedding(&local_graph, &graph, &cands).ok_or_else(|| {
                Error::Layout(format!("local graph does not embed into blocks {i},{}", i + 1))
            })?;
            let pair: Vec<usize> = blocks[i].iter().chain(&blocks[i + 1]).copied().collect();
            if graph.induced(&pair).edge_count() != local_graph.edge_count() {
                exact = false;
            }
            if !(0..p).any(|a| (p..2 * p).any(|b| local_graph.has_edge(a, b))) {
                return Err(Error::Layout("local graph has no edge between the two blocks".to_string()));
            }
            pair_maps.push(map);
        }
        let mut block_maps = Vec::with_capacity(m);
        for (i, b) in blocks.iter().enumerate() {
            let cands: Vec<&[usize]> = (0..p).map(|_| &b[..]).collect();
            let map = find_embedding(&intra_graph, &graph, &cands)
                .ok_or_else(|| Error::Layout(format!("intra-block graph does not embed into block {i}")))?;
            if graph.induced(b).edge_count() != intra_graph.edge_count() {
                exact = false;
            }
            block_maps.push(map);
        }
        Ok(Self {
            arch,
            p,
            m,
            blocks,
            graph,
            local_graph,
            intra_graph,
            pair_maps,
            block_maps,
            exact,
        })
    }

    pub fn n(&self) -> usize {
        self.p * self.m
    }

    /// Local-to-global map and local graph for the pair `(i, i+1)`.
    pub fn pair_embedding(&self, i: usize) -> Result<(&[usize], &ConnectivityGraph)> {
        self.pair_maps
            .get(i)
            .map(|m| (&m[..], &self.local_graph))
            .ok_or(Error::IndexOutOfRange {
                index: i,
                bound: self.pair_maps.len(),
            })
    }

    /// Concatenated blocks: position `k` holds qubit `order()[k]`.
    pub fn order(&self) -> Vec<usize> {
        self.blocks.iter().flatten().copied().collect()
    }
}

/// Backtracking search for an injective edge-preserving map from `pattern`
/// into `host`, where pattern vertex `v` must land in `candidates[v]`.
fn find_embedding(
    pattern: &ConnectivityGraph,
    host: &ConnectivityGraph,
    candidates: &[&[usize]],
) -> Option<Vec<usize>> {
    fn go(
        v: usize,
        pattern: &ConnectivityGraph,
        host: &ConnectivityGraph,
        candidates: &[&[usize]],
        map: &mut Vec<usize>,
    ) -> bool {
        if v == pattern.n() {
            return true;
        }
        for &q in candidates[v] {
            if map.contains(&q) {
                continue;
            }
            if (0..v).all(|u| !pattern.has_edge(u, v) || host.has_edge(map[u], q)) {
                map.push(q);
                if go(v + 1, pattern, host, candidates, map) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    let mut map = Vec::with_capacity(pattern.n());
    go(0, pattern, host, candidates, &mut map).then_some(map)
}

fn line_layout(n: usize) -> Result<BlockLineLayout> {
    if n == 0 {
        return Err(Error::InvalidArchitecture("empty line".to_string()));
    }
    BlockLineLayout::new(
        ArchSpec::Line { n },
        ConnectivityGraph::path(n),
        (0..n).map(|q| vec![q]).collect(),
        ConnectivityGraph::path(2),
        ConnectivityGraph::new(1),
    )
}

/// Local pair graph of a `width`-rail ladder: column 0 holds `[0, width)`,
/// column 1 holds `[width, 2 width)`.
pub fn ladder_pair_graph(width: usize, diagonals: bool) -> ConnectivityGraph {
    let mut g = ConnectivityGraph::new(2 * width);
    for r in 0..width {
        g.insert(r, width + r);
        if r + 1 < width {
            g.insert(r, r + 1);
            g.insert(width + r, width + r + 1);
            if diagonals {
                g.insert(r, width + r + 1);
                g.insert(r + 1, width + r);
            }
        }
    }
    g
}

fn ladder_graph(width: usize, len: usize, diagonals: bool) -> ConnectivityGraph {
    let mut g = ConnectivityGraph::grid(width, len);
    if diagonals {
        for r in 0..width.saturating_sub(1) {
            for c in 0..len.saturating_sub(1) {
                let q = r * len + c;
                g.insert(q, q + len + 1);
                g.insert(q + 1, q + len);
            }
        }
    }
    g
}

fn ladder_layout(width: usize, len: usize, diagonals: bool) -> Result<BlockLineLayout> {
    if width == 0 || len == 0 {
        return Err(Error::InvalidArchitecture("empty ladder".to_string()));
    }
    let blocks = (0..len).map(|c| (0..width).map(|r| r * len + c).collect()).collect();
    BlockLineLayout::new(
        ArchSpec::Ladder { width, len, diagonals },
        ladder_graph(width, len, diagonals),
        blocks,
        ladder_pair_graph(width, diagonals),
        ConnectivityGraph::path(width),
    )
}

/// Local pair graph of two 2x2 tiles side by side (a 2x4 grid). Tile 0 is
/// `(r, c) -> 2r + c`, tile 1 is `(r, c) -> 4 + 2r + c`.
pub fn tile_pair_graph(diagonals: bool) -> ConnectivityGraph {
    let idx = |r: usize, c: usize| if c < 2 { 2 * r + c } else { 4 + 2 * r + (c - 2) };
    let mut g = ConnectivityGraph::new(8);
    for c in 0..4 {
        g.insert(idx(0, c), idx(1, c));
        if c + 1 < 4 {
            g.insert(idx(0, c), idx(0, c + 1));
            g.insert(idx(1, c), idx(1, c + 1));
            if diagonals {
                g.insert(idx(0, c), idx(1, c + 1));
                g.insert(idx(1, c), idx(0, c + 1));
            }
        }
    }
    g
}

pub fn tile_graph(diagonals: bool) -> ConnectivityGraph {
    if diagonals {
        ConnectivityGraph::complete(4)
    } else {
        ConnectivityGraph::from_edges(4, &[(0, 1), (2, 3), (0, 2), (1, 3)]).unwrap()
    }
}

/// Tiles in serpentine order: band 0 left to right, band 1 right to left, ...
fn serpentine_tiles(rows: usize, cols: usize) -> Vec<Vec<usize>> {
    let mut blocks = Vec::new();
    for band in 0..rows / 2 {
        let tiles: Vec<usize> = if band % 2 == 0 {
            (0..cols / 2).collect()
        } else {
            (0..cols / 2).rev().collect()
        };
        for t in tiles {
            let (r, c) = (2 * band, 2 * t);
            blocks.push(vec![r * cols + c, r * cols + c + 1, (r + 1) * cols + c, (r + 1) * cols + c + 1]);
        }
    }
    blocks
}

fn check_even(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 || rows % 2 != 0 || cols % 2 != 0 {
        return Err(Error::InvalidArchitecture(format!(
            "grid dimensions {rows}x{cols} must be positive and even"
        )));
    }
    Ok(())
}

/// Grid with diagonals: both diagonals inside every tile, across every
/// horizontal tile junction of a band, and across the vertical junction at
/// each serpentine turn.
fn grid_diag_graph(rows: usize, cols: usize) -> ConnectivityGraph {
    let mut g = ConnectivityGraph::grid(rows, cols);
    let mut square = |r: usize, c: usize| {
        let q = r * cols + c;
        g.insert(q, q + cols + 1);
        g.insert(q + 1, q + cols);
    };
    for band in 0..rows / 2 {
        for c in 0..cols - 1 {
            square(2 * band, c);
        }
        if band + 1 < rows / 2 {
            let c = if band % 2 == 0 { cols - 2 } else { 0 };
            square(2 * band + 1, c);
        }
    }
    g
}

fn tile_layout(
    rows: usize,
    cols: usize,
    graph: ConnectivityGraph,
    diagonals: bool,
    arch: ArchSpec,
) -> Result<BlockLineLayout> {
    check_even(rows, cols)?;
    BlockLineLayout::new(
        arch,
        graph,
        serpentine_tiles(rows, cols),
        tile_pair_graph(diagonals),
        tile_graph(diagonals),
    )
}

fn grid_layout(rows: usize, cols: usize, diagonals: bool) -> Result<BlockLineLayout> {
    check_even(rows, cols)?;
    let graph = if diagonals {
        grid_diag_graph(rows, cols)
    } else {
        ConnectivityGraph::grid(rows, cols)
    };
    tile_layout(rows, cols, graph, diagonals, ArchSpec::Grid { rows, cols, diagonals })
}

fn altered_grid_graph(rows: usize, cols: usize) -> Result<ConnectivityGraph> {
    check_even(rows, cols)?;
    let mut g = ConnectivityGraph::grid(rows, cols);
    for band in 0..rows / 2 - 1 {
        let c = if band % 2 == 0 { cols - 1 } else { 0 };
        let r = 2 * band;
        g.insert(r * cols + c, (r + 2) * cols + c);
        g.insert((r + 1) * cols + c, (r + 3) * cols + c);
    }
    Ok(g)
}

/// Width-2 ladder snaking through the row bands of a grid.
fn snake_ladder_layout(
    rows: usize,
    cols: usize,
    graph: ConnectivityGraph,
    arch: ArchSpec,
) -> Result<BlockLineLayout> {
    check_even(rows, cols)?;
    let mut blocks = Vec::new();
    for band in 0..rows / 2 {
        let columns: Vec<usize> = if band % 2 == 0 {
            (0..cols).collect()
        } else {
            (0..cols).rev().collect()
        };
        for c in columns {
            blocks.push(vec![2 * band * cols + c, (2 * band + 1) * cols + c]);
        }
    }
    BlockLineLayout::new(arch, graph, blocks, ladder_pair_graph(2, false), ConnectivityGraph::path(2))
}

fn blocks_full_layout(p: usize, m: usize) -> Result<BlockLineLayout> {
    if p == 0 || m == 0 {
        return Err(Error::InvalidArchitecture("blocks-full needs p, m > 0".to_string()));
    }
    let n = p * m;
    let mut graph = ConnectivityGraph::new(n);
    for i in 0..m {
        let hi = if i + 1 < m { (i + 2) * p } else { (i + 1) * p };
        for a in i * p..hi {
            for b in a + 1..hi {
                graph.insert(a, b);
            }
        }
    }
    BlockLineLayout::new(
        ArchSpec::BlocksFull { p, m },
        graph,
        (0..m).map(|i| (i * p..(i + 1) * p).collect()).collect(),
        ConnectivityGraph::complete(2 * p),
        ConnectivityGraph::complete(p),
    )
}
