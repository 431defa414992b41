//! Depth-table files and a caching [`TableSource`].
//!
//! File layout: magic `GF2TBL01`, `u32` LE header length, JSON header,
//! `u64` LE record count, then 13-byte records (key `u64` LE, depth `u8`,
//! move id `u32` LE) sorted by key.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use gf2synth_core::box_solvers::{bfs_table, BfsOptions, BfsProgress};
use gf2synth_core::{ConnectivityGraph, DepthTable, Error, TableKind, TableSource};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MAGIC: &[u8; 8] = b"GF2TBL01";
pub const ENV_CACHE_DIR: &str = "GF2SYNTH_CACHE";
const RECORD_LEN: usize = 13;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableHeader {
    pub kind: String,
    pub p: usize,
    pub fingerprint: String,
    pub counts_by_depth: Vec<u64>,
    pub states: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad table header: {0}")]
    Header(#[from] serde_json::Error),
    #[error("not a table file (bad magic)")]
    Magic,
    #[error("table file does not match the request: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Core(#[from] Error),
}

pub fn write_table(t: &DepthTable, w: impl Write) -> io::Result<()> {
    let mut w = BufWriter::new(w);
    let header = TableHeader {
        kind: t.kind().name().to_string(),
        p: t.p(),
        fingerprint: t.fingerprint().to_string(),
        counts_by_depth: t.counts_by_depth().to_vec(),
        states: t.len() as u64,
    };
    let json = serde_json::to_vec(&header)?;
    w.write_all(MAGIC)?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    let mut records: Vec<(u64, u8, u32)> = t.records().collect();
    records.sort_unstable_by_key(|r| r.0);
    w.write_all(&(records.len() as u64).to_le_bytes())?;
    for (key, depth, mv) in records {
        w.write_all(&key.to_le_bytes())?;
        w.write_all(&[depth])?;
        w.write_all(&mv.to_le_bytes())?;
    }
    w.flush()
}

pub fn read_header(r: &mut impl Read) -> Result<TableHeader, CacheError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CacheError::Magic);
    }
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let mut json = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut json)?;
    Ok(serde_json::from_slice(&json)?)
}

/// Loads a table for `(kind, p, graph)`, rejecting files built for another
/// graph or whose records disagree with the header histogram.
pub fn read_table(
    r: impl Read,
    kind: TableKind,
    p: usize,
    graph: &ConnectivityGraph,
) -> Result<DepthTable, CacheError> {
    let mut r = BufReader::new(r);
    let header = read_header(&mut r)?;
    let fingerprint = graph.fingerprint();
    if header.kind != kind.name() || header.p != p || header.fingerprint != fingerprint {
        return Err(CacheError::Mismatch(format!(
            "file holds {} p={} on {}, wanted {} p={p} on {fingerprint}",
            header.kind,
            header.p,
            header.fingerprint,
            kind.name()
        )));
    }
    let mut count = [0u8; 8];
    r.read_exact(&mut count)?;
    let count = u64::from_le_bytes(count);
    if count != header.states {
        return Err(CacheError::Mismatch(format!("{count} records, header says {}", header.states)));
    }
    let mut records = Vec::with_capacity(count as usize);
    let mut buf = [0u8; RECORD_LEN];
    for _ in 0..count {
        r.read_exact(&mut buf)?;
        let key = u64::from_le_bytes(buf[0..8].try_into().expect("8 bytes"));
        let mv = u32::from_le_bytes(buf[9..13].try_into().expect("4 bytes"));
        records.push((key, buf[8], mv));
    }
    if r.read(&mut buf)? != 0 {
        return Err(CacheError::Mismatch("trailing bytes after records".into()));
    }
    let t = DepthTable::from_records(kind, p, graph, records)?;
    if t.counts_by_depth() != header.counts_by_depth.as_slice() {
        return Err(CacheError::Mismatch("histogram differs from header".into()));
    }
    Ok(t)
}

pub fn save_table(t: &DepthTable, path: &Path) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    write_table(t, fs::File::create(&tmp)?)?;
    fs::rename(&tmp, path)
}

pub fn load_table(path: &Path, kind: TableKind, p: usize, graph: &ConnectivityGraph) -> Result<DepthTable, CacheError> {
    read_table(fs::File::open(path)?, kind, p, graph)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

type Slot = Arc<Mutex<Option<Arc<DepthTable>>>>;

/// Process-local memory cache backed by an optional directory. Concurrent
/// requests for the same table wait for a single build.
#[derive(Debug, Default)]
pub struct TableCache {
    dir: Option<PathBuf>,
    budget: Option<usize>,
    progress: bool,
    slots: Mutex<HashMap<(TableKind, usize, String), Slot>>,
}

impl TableCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self {
            dir,
            ..Self::default()
        }
    }

    /// Directory from `GF2SYNTH_CACHE`, if set and non-empty.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(ENV_CACHE_DIR).filter(|v| !v.is_empty()).map(PathBuf::from))
    }

    /// Shared instance configured from the environment.
    pub fn shared() -> &'static TableCache {
        static SHARED: OnceLock<TableCache> = OnceLock::new();
        SHARED.get_or_init(TableCache::from_env)
    }

    pub fn with_budget(mut self, budget: Option<usize>) -> Self {
        self.budget = budget;
        self
    }

    /// Print BFS level statistics to stderr while building.
    pub fn with_progress(mut self, on: bool) -> Self {
        self.progress = on;
        self
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(&self, kind: TableKind, p: usize, graph: &ConnectivityGraph) -> Option<PathBuf> {
        let fp = sha256_hex(graph.fingerprint().as_bytes());
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{}-p{p}-{}.gf2tbl", kind.name(), &fp[..16])))
    }

    fn build(&self, kind: TableKind, p: usize, graph: &ConnectivityGraph) -> Result<DepthTable, Error> {
        let name = kind.name();
        let mut report = |s: &BfsProgress| {
            eprintln!("{name} p={p}: depth {} explored {} frontier {}", s.depth, s.explored, s.frontier);
        };
        let opts = BfsOptions {
            budget: self.budget,
            progress: if self.progress { Some(&mut report) } else { None },
        };
        bfs_table(kind, p, graph, opts)
    }
}

impl TableSource for TableCache {
    fn table(&self, kind: TableKind, p: usize, graph: &ConnectivityGraph) -> Result<Arc<DepthTable>, Error> {
        let slot = {
            let mut slots = self.slots.lock().unwrap_or_else(|e| e.into_inner());
            slots.entry((kind, p, graph.fingerprint())).or_default().clone()
        };
        let mut slot = slot.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = slot.as_ref() {
            return Ok(t.clone());
        }
        let path = self.path_for(kind, p, graph);
        if let Some(path) = path.as_ref().filter(|p| p.exists()) {
            match load_table(path, kind, p, graph) {
                Ok(t) => {
                    let t = Arc::new(t);
                    *slot = Some(t.clone());
                    return Ok(t);
                }
                Err(e) => eprintln!("warning: ignoring cached table {}: {e}", path.display()),
            }
        }
        let t = Arc::new(self.build(kind, p, graph)?);
        if let Some(path) = path {
            if let Err(e) = save_table(&t, &path) {
                eprintln!("warning: could not write {}: {e}", path.display());
            }
        }
        *slot = Some(t.clone());
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gf2synth_core::topology::ladder_pair_graph;

    #[test]
    fn file_round_trip() {
        let g = ladder_pair_graph(2, true);
        let t = bfs_table(TableKind::P2, 2, &g, BfsOptions::default()).unwrap();
        let mut bytes = Vec::new();
        write_table(&t, &mut bytes).unwrap();
        assert_eq!(&bytes[..8], MAGIC);
        let back = read_table(&bytes[..], TableKind::P2, 2, &g).unwrap();
        assert_eq!(back.counts_by_depth(), &[0, 0, 2, 10, 4]);
        let mut a: Vec<_> = t.records().collect();
        let mut b: Vec<_> = back.records().collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_other_graphs_and_damage() {
        let g = ladder_pair_graph(2, false);
        let t = bfs_table(TableKind::P1, 2, &g, BfsOptions::default()).unwrap();
        let mut bytes = Vec::new();
        write_table(&t, &mut bytes).unwrap();
        let other = ladder_pair_graph(2, true);
        assert!(matches!(read_table(&bytes[..], TableKind::P1, 2, &other), Err(CacheError::Mismatch(_))));
        assert!(matches!(read_table(&bytes[..], TableKind::P2, 2, &g), Err(CacheError::Mismatch(_))));
        let truncated = &bytes[..bytes.len() - 3];
        assert!(matches!(read_table(truncated, TableKind::P1, 2, &g), Err(CacheError::Io(_))));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(read_table(&bad[..], TableKind::P1, 2, &g), Err(CacheError::Magic)));
        let mut wrong_depth = bytes.clone();
        let first_record = bytes.len() - 35 * RECORD_LEN;
        wrong_depth[first_record + 8] ^= 0x40;
        assert!(read_table(&wrong_depth[..], TableKind::P1, 2, &g).is_err());
    }

    #[test]
    fn directory_cache_reuses_files() {
        let dir = tempfile::tempdir().unwrap();
        let g = ladder_pair_graph(2, false);
        let cache = TableCache::new(Some(dir.path().to_path_buf()));
        let t = cache.table(TableKind::P1, 2, &g).unwrap();
        let path = cache.path_for(TableKind::P1, 2, &g).unwrap();
        assert!(path.exists());
        let again = cache.table(TableKind::P1, 2, &g).unwrap();
        assert!(Arc::ptr_eq(&t, &again));
        let fresh = TableCache::new(Some(dir.path().to_path_buf()));
        assert_eq!(fresh.table(TableKind::P1, 2, &g).unwrap().counts_by_depth(), t.counts_by_depth());
    }

    #[test]
    fn budget_applies_to_builds() {
        let cache = TableCache::new(None).with_budget(Some(10));
        let err = cache.table(TableKind::P1, 3, &ladder_pair_graph(3, false)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }
}
