//! One PASS/FAIL line per acceptance criterion. Lines go straight to the
//! process stdout so they show up even when test output is captured.
//!
//! The long tier (`cargo test --test acceptance -- --ignored`) holds the
//! exact Problem 2 enumerations at block size 4.

use std::collections::HashSet;
use std::fmt::Display;
use std::io::Write;
use std::sync::Arc;

use gf2synth::cache::TableCache;
use gf2synth::plan::Plan;
use gf2synth::report::{asap_depth, implements, off_graph_gates};
use gf2synth_core::box_solvers::{
    alltoall_solve_p1_outcome, alltoall_solve_p2_outcome, bfs_table, instance, BfsOptions, SplitP2,
};
use gf2synth_core::topology::{ladder_pair_graph, tile_graph, tile_pair_graph};
use gf2synth_core::{
    oriented_matchings, AllToAllMode, ArchSpec, BitMatrix, ConnectivityGraph, DepthTable, P2Method, Strategy,
    SynthOptions, TableKind, TableSource,
};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// State budget for the exact block-size-4 Problem 2 searches; keeps the
/// visited set near 1 GiB.
const LONG_BUDGET: usize = 55_000_000;

fn line(id: &str, ok: bool, detail: impl Display) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{id} {} {detail}", if ok { "PASS" } else { "FAIL" });
    let _ = out.flush();
}

fn table(kind: TableKind, p: usize, g: &ConnectivityGraph) -> Arc<DepthTable> {
    TableCache::shared().table(kind, p, g).unwrap()
}

fn k(p: usize) -> ConnectivityGraph {
    ConnectivityGraph::complete(2 * p)
}

fn split(p: usize, g: &ConnectivityGraph) -> SplitP2 {
    SplitP2::new(
        table(TableKind::P1, p, g),
        table(TableKind::FixTop, p, g),
        table(TableKind::P1Lower, p, g),
        table(TableKind::FixBottom, p, g),
    )
    .unwrap()
}

/// Full-rank `2p x p` column spaces: injective maps over `|GL(p)|`.
fn subspace_count(p: u32) -> u128 {
    let falling = |n: u32| (0..p).map(|i| (1u128 << n) - (1u128 << i)).product::<u128>();
    falling(2 * p) / falling(p)
}

fn seeded(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn full_rank(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> BitMatrix {
    loop {
        let m = BitMatrix::random_with(rows, cols, rng);
        if m.rank() == cols {
            return m;
        }
    }
}

#[test]
fn c1_canonical_state_totals() {
    let mut notes = Vec::new();
    let mut ok = true;
    let p1 = [
        (2, ladder_pair_graph(2, false), 35u64),
        (3, ladder_pair_graph(3, false), 1395),
        (4, tile_pair_graph(false), 200787),
    ];
    for (p, g, expected) in &p1 {
        let total = table(TableKind::P1, *p, g).total();
        let good = total == *expected && total as u128 == subspace_count(*p as u32);
        ok &= good;
        notes.push(format!("P1 p={p} {total}"));
    }
    for (p, g, expected) in [(2, ladder_pair_graph(2, false), 16u64), (3, ladder_pair_graph(3, false), 512)] {
        let total = table(TableKind::P2, p, &g).total();
        ok &= total == expected;
        notes.push(format!("P2 p={p} {total}"));
    }
    // block size 4: distinct instance classes, each solved by the split solver
    let classes: HashSet<(BitMatrix, BitMatrix)> = (0u64..1 << 16)
        .map(|x| {
            let b = instance(4, x);
            let rows: Vec<usize> = (0..8).collect();
            (
                b.submatrix(&rows, &[0, 1, 2, 3]).rcef(),
                b.submatrix(&rows, &[4, 5, 6, 7]).rcef(),
            )
        })
        .collect();
    let covered: u64 = split(4, &tile_pair_graph(false)).counts_by_depth().iter().sum();
    ok &= classes.len() == 65536 && covered == 65536;
    notes.push(format!("P2 p=4 {} classes, {covered} solved (split)", classes.len()));
    line("C1", ok, notes.join("; "));
    assert!(ok);
}

#[test]
fn c2_depth_histograms() {
    let rows: Vec<(&str, TableKind, usize, ConnectivityGraph, Vec<u64>)> = vec![
        ("ladder2 P1", TableKind::P1, 2, ladder_pair_graph(2, false), vec![1, 3, 14, 15, 2]),
        ("ladder2 P2", TableKind::P2, 2, ladder_pair_graph(2, false), vec![0, 0, 1, 7, 8]),
        ("ladder2-diag P1", TableKind::P1, 2, ladder_pair_graph(2, true), vec![1, 6, 19, 9]),
        ("ladder2-diag P2", TableKind::P2, 2, ladder_pair_graph(2, true), vec![0, 0, 2, 10, 4]),
        ("K6 P1", TableKind::P1, 3, k(3), vec![1, 33, 649, 712]),
        ("K6 P2", TableKind::P2, 3, k(3), vec![0, 0, 6, 250, 256]),
        ("ladder3 P1", TableKind::P1, 3, ladder_pair_graph(3, false), vec![1, 7, 91, 538, 736, 22]),
    ];
    let mut bad = Vec::new();
    for (name, kind, p, g, expected) in &rows {
        let got = table(*kind, *p, g).counts_by_depth().to_vec();
        if &got != expected {
            bad.push(format!("{name}: {got:?} != {expected:?}"));
        }
    }
    let ok = bad.is_empty();
    line("C2", ok, if ok { format!("{} histograms exact", rows.len()) } else { bad.join("; ") });
    assert!(ok);
}

#[test]
fn c3_grid_p1_histogram() {
    let got = table(TableKind::P1, 4, &tile_pair_graph(false)).counts_by_depth().to_vec();
    let expected = vec![1, 3, 57, 1873, 29293, 136771, 32733, 56];
    let ok = got == expected;
    line("C3a", ok, format!("grid P1 {got:?}"));
    assert!(ok);
}

#[test]
#[ignore = "long tier: exact block-size-4 Problem 2 enumeration"]
fn c3_grid_p2_histogram() {
    let g = tile_pair_graph(false);
    let opts = BfsOptions {
        budget: Some(LONG_BUDGET),
        progress: None,
    };
    let (ok, detail) = match bfs_table(TableKind::P2, 4, &g, opts) {
        Ok(t) => {
            let c = t.counts_by_depth();
            let ok = t.max_depth() == 9 && c.get(6..10) == Some(&[25, 5263, 55203, 5045][..]);
            (ok, format!("grid P2 {c:?}"))
        }
        Err(e) => {
            let s = split(4, &g);
            (false, format!("grid P2 exact: {e}; split solver gives max {} {:?}", s.max_depth(), s.counts_by_depth()))
        }
    };
    line("C3b", ok, detail);
    assert!(ok);
}

/// `max / p == num / den`.
fn coefficient(max: usize, p: usize, num: usize, den: usize) -> bool {
    max * den == num * p
}

#[test]
fn c4_step_coefficients() {
    // (row, kind, p, graph, coefficient num/den)
    let rows: Vec<(&str, TableKind, usize, ConnectivityGraph, usize, usize)> = vec![
        ("ladder2 step1", TableKind::P1, 2, ladder_pair_graph(2, false), 2, 1),
        ("ladder2 step2", TableKind::P2, 2, ladder_pair_graph(2, false), 2, 1),
        ("ladder2-diag step1", TableKind::P1, 2, ladder_pair_graph(2, true), 3, 2),
        ("ladder2-diag step2", TableKind::P2, 2, ladder_pair_graph(2, true), 2, 1),
        ("ladder3 step1", TableKind::P1, 3, ladder_pair_graph(3, false), 5, 3),
        ("ladder3 step2", TableKind::P2, 3, ladder_pair_graph(3, false), 2, 1),
        ("ladder3-diag step1", TableKind::P1, 3, ladder_pair_graph(3, true), 4, 3),
        ("ladder3-diag step2", TableKind::P2, 3, ladder_pair_graph(3, true), 5, 3),
        ("K6 step1", TableKind::P1, 3, k(3), 1, 1),
        ("K6 step2", TableKind::P2, 3, k(3), 4, 3),
        ("ladder4 step1", TableKind::P1, 4, ladder_pair_graph(4, false), 3, 2),
        ("ladder4-diag step1", TableKind::P1, 4, ladder_pair_graph(4, true), 5, 4),
        ("grid step1", TableKind::P1, 4, tile_pair_graph(false), 7, 4),
        ("grid-diag step1", TableKind::P1, 4, tile_pair_graph(true), 3, 2),
        ("K8 step1", TableKind::P1, 4, k(4), 3, 4),
    ];
    let mut bad = Vec::new();
    for (name, kind, p, g, num, den) in &rows {
        let max = table(*kind, *p, g).max_depth();
        if !coefficient(max, *p, *num, *den) {
            bad.push(format!("{name}: {max}/{p} != {num}/{den}"));
        }
    }
    let ok = bad.is_empty();
    line("C4a", ok, if ok { format!("{} coefficients exact", rows.len()) } else { bad.join("; ") });
    assert!(ok);
}

#[test]
#[ignore = "long tier: exact block-size-4 Problem 2 enumeration"]
fn c4_step2_coefficients_block_size_four() {
    let rows: Vec<(&str, ConnectivityGraph, usize, usize)> = vec![
        ("ladder4 step2", ladder_pair_graph(4, false), 7, 4),
        ("ladder4-diag step2", ladder_pair_graph(4, true), 5, 4),
        ("grid step2", tile_pair_graph(false), 9, 4),
        ("K8 step2", k(4), 1, 1),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, g, num, den) in &rows {
        let opts = BfsOptions {
            budget: Some(LONG_BUDGET),
            progress: None,
        };
        match bfs_table(TableKind::P2, 4, g, opts) {
            Ok(t) => {
                let good = coefficient(t.max_depth(), 4, *num, *den);
                ok &= good;
                notes.push(format!("{name}: {}/4", t.max_depth()));
            }
            Err(e) => {
                ok = false;
                let s = split(4, g);
                notes.push(format!("{name}: exact failed ({e}); split max {}/4 vs {num}/{den}", s.max_depth()));
            }
        }
    }
    line("C4b", ok, notes.join("; "));
    assert!(ok);
}

fn c5_configs(n: usize) -> Vec<(String, bool)> {
    let mut v: Vec<String> = vec![format!("line:{n}"), format!("ladder:2x{}", n / 2), format!("ladder-diag:2x{}", n / 2)];
    if n % 3 == 0 {
        v.push(format!("ladder:3x{}", n / 3));
        v.push(format!("ladder-diag:3x{}", n / 3));
        v.push(format!("blocks-full:p=3,m={}", n / 3));
    }
    v.push(format!("ladder:4x{}", n / 4));
    v.push(format!("ladder-diag:4x{}", n / 4));
    v.push(format!("grid:2x{}", n / 2));
    v.push(format!("grid-diag:2x{}", n / 2));
    if n % 8 == 0 && n >= 16 {
        v.push(format!("grid:4x{}", n / 4));
        v.push(format!("grid-diag:4x{}", n / 4));
        v.push(format!("altered-grid:4x{}", n / 4));
    }
    v.push(format!("blocks-full:p=2,m={}", n / 2));
    v.push(format!("blocks-full:p=4,m={}", n / 4));
    if n >= 16 {
        v.push(format!("blocks-full:p=8,m={}", n / 8));
    }
    let mut out: Vec<(String, bool)> = v.into_iter().map(|d| (d, false)).collect();
    out.push((format!("grid:2x{}", n / 2), true));
    if n >= 16 && n % 8 == 0 {
        out.push((format!("altered-grid:4x{}", n / 4), true));
    }
    out
}

#[test]
fn c5_end_to_end() {
    const TRIALS: u64 = 500;
    let opts = SynthOptions {
        check_invariants: false,
    };
    let mut bad = Vec::new();
    let (mut configs, mut operators, mut worst) = (0, 0, 0.0f64);
    for n in [8, 16, 24] {
        for (desc, combined) in c5_configs(n) {
            let arch: ArchSpec = desc.parse().unwrap();
            let plan = match Plan::build(&arch, combined, &Strategy::default(), TableCache::shared()) {
                Ok(p) => p,
                Err(e) => {
                    bad.push(format!("{desc}: {e}"));
                    continue;
                }
            };
            let Some(bound) = plan.bound() else {
                bad.push(format!("{desc}: no bound"));
                continue;
            };
            configs += 1;
            for t in 0..TRIALS {
                let a = BitMatrix::random_invertible(n, (n as u64) << 20 | t);
                let c = match plan.synth(&a, &opts) {
                    Ok(c) => c,
                    Err(e) => {
                        bad.push(format!("{desc} trial {t}: {e}"));
                        break;
                    }
                };
                operators += 1;
                let d = asap_depth(&c);
                worst = worst.max(d as f64 / bound as f64);
                if !implements(&c, &a) || off_graph_gates(&c, plan.graph()) != 0 || d > bound {
                    bad.push(format!("{desc} trial {t}: depth {d} bound {bound}"));
                    break;
                }
            }
        }
    }
    let ok = bad.is_empty();
    let detail = format!("{configs} configurations, {operators} operators, max depth/bound {worst:.3}");
    line("C5", ok, if ok { detail } else { format!("{detail}; {}", bad.join("; ")) });
    assert!(ok);
}

#[test]
fn c6_lnn_baseline() {
    let mut worst = (0usize, 0usize);
    let mut ok = true;
    for n in [16, 32] {
        for t in 0..500u64 {
            let a = BitMatrix::random_invertible(n, 0x6000 + (n as u64) * 1000 + t);
            let c = gf2synth_core::synth_lnn(&a).unwrap();
            let d = asap_depth(&c);
            ok &= implements(&c, &a) && off_graph_gates(&c, &ConnectivityGraph::path(n)) == 0 && d <= 5 * n;
            if d * worst.1.max(1) > worst.0 * n {
                worst = (d, n);
            }
        }
    }
    line("C6", ok, format!("1000 operators, worst depth {} at n={} (bound {})", worst.0, worst.1, 5 * worst.1));
    assert!(ok);
}

fn ceil_log2(p: usize) -> usize {
    let mut k = 0;
    while 1 << k < p {
        k += 1;
    }
    k
}

#[test]
fn c7_all_to_all_blocks() {
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [4usize, 8] {
        let mut rng = seeded(p as u64);
        let g = k(p);
        let improved = (3 + p / 2 + ceil_log2(p), 4 + p / 2 + ceil_log2(p));
        let mut worst = [(0usize, 0usize); 2];
        let mut fallbacks = 0;
        for _ in 0..1000 {
            let b1 = full_rank(2 * p, p, &mut rng);
            let (x, b2, b3) = (
                BitMatrix::random_with(p, p, &mut rng),
                BitMatrix::random_invertible_with(p, &mut rng),
                BitMatrix::random_invertible_with(p, &mut rng),
            );
            let b2m = BitMatrix::from_fn(2 * p, 2 * p, |i, j| match (i < p, j < p) {
                (true, true) => x.get(i, j),
                (true, false) => b3.get(i, j - p),
                (false, true) => b2.get(i - p, j),
                (false, false) => false,
            });
            for (slot, mode) in [AllToAllMode::Basic, AllToAllMode::Improved].into_iter().enumerate() {
                let o1 = alltoall_solve_p1_outcome(&b1, mode).unwrap();
                let o2 = alltoall_solve_p2_outcome(&b2m, mode).unwrap();
                fallbacks += o1.fell_back as usize + o2.fell_back as usize;
                let (mut r1, mut r2) = (b1.clone(), b2m.clone());
                o1.circuit.apply_to(&mut r1);
                o2.circuit.apply_to(&mut r2);
                let lower_zero = (p..2 * p).all(|i| (0..p).all(|j| !r1.get(i, j)));
                let diag = (0..2 * p).all(|i| (0..2 * p).all(|j| (i < p) == (j < p) || !r2.get(i, j)));
                let compliant = off_graph_gates(&o1.circuit, &g) == 0 && off_graph_gates(&o2.circuit, &g) == 0;
                let (d1, d2) = (asap_depth(&o1.circuit), asap_depth(&o2.circuit));
                let (l1, l2) = if slot == 0 { (1 + p, 2 + p) } else { improved };
                ok &= lower_zero && diag && compliant && d1 <= l1 && d2 <= l2;
                worst[slot] = (worst[slot].0.max(d1), worst[slot].1.max(d2));
            }
        }
        notes.push(format!(
            "p={p} basic max {}/{} (<= {}/{}), improved max {}/{} (<= {}/{}), {fallbacks} fallbacks",
            worst[0].0,
            worst[0].1,
            1 + p,
            2 + p,
            worst[1].0,
            worst[1].1,
            improved.0,
            improved.1
        ));

        let ms: &[usize] = if p == 4 { &[16, 24, 32] } else { &[16, 24] };
        // basic mode carries the (2 + 3/p)n total; improved mode is held to
        // the slope of its own local bounds
        let improved_slope = (improved.0 + improved.1) as f64 / p as f64;
        for (mode, limit) in [
            (AllToAllMode::Basic, 2.0 + 3.0 / p as f64 + 0.05),
            (AllToAllMode::Improved, improved_slope + 0.05),
        ] {
            let strategy = Strategy {
                alltoall_mode: mode,
                p2_method: P2Method::Auto,
            };
            let mut worst_slope = 0.0f64;
            for &m in ms {
                let arch = ArchSpec::BlocksFull { p, m };
                let plan = Plan::build(&arch, false, &strategy, TableCache::shared()).unwrap();
                let Plan::Single { solver, .. } = &plan else { unreachable!() };
                let d_star = solver.bounds().d_star.unwrap();
                let n = p * m;
                for t in 0..8u64 {
                    let a = BitMatrix::random_invertible(n, 0x7000 + (n as u64) * 100 + t);
                    let c = plan
                        .synth(
                            &a,
                            &SynthOptions {
                                check_invariants: false,
                            },
                        )
                        .unwrap();
                    ok &= implements(&c, &a);
                    let slope = (asap_depth(&c) as f64 - d_star as f64) / n as f64;
                    worst_slope = worst_slope.max(slope);
                }
            }
            ok &= worst_slope <= limit;
            notes.push(format!("p={p} {mode:?} slope {worst_slope:.3} (<= {limit:.3})"));
        }
    }
    line("C7", ok, notes.join("; "));
    assert!(ok);
}

#[test]
fn c8_combined_layout() {
    let d_star_4 = table(TableKind::P3, 4, &tile_graph(false)).max_depth();
    let d_star_2 = table(TableKind::P3, 2, &ConnectivityGraph::path(2)).max_depth();
    let constant = d_star_4 + d_star_2;
    let mut ok = true;
    let mut notes = Vec::new();
    for cols in [8, 16] {
        let arch = ArchSpec::Grid {
            rows: 2,
            cols,
            diagonals: false,
        };
        let plan = Plan::build(&arch, true, &Strategy::default(), TableCache::shared()).unwrap();
        let n = 2 * cols;
        let limit = 15 * n / 4 + constant;
        let mut worst = 0;
        for t in 0..200u64 {
            let a = BitMatrix::random_invertible(n, 0x8000 + (n as u64) * 1000 + t);
            let c = plan
                .synth(
                    &a,
                    &SynthOptions {
                        check_invariants: false,
                    },
                )
                .unwrap();
            let d = asap_depth(&c);
            ok &= implements(&c, &a) && off_graph_gates(&c, plan.graph()) == 0 && d <= limit;
            worst = worst.max(d);
        }
        notes.push(format!("2x{cols}: max depth {worst} <= {limit}"));
    }
    line("C8", ok, format!("C = {d_star_4} + {d_star_2}; {}", notes.join("; ")));
    assert!(ok);
}

fn root(kind: TableKind, p: usize) -> BitMatrix {
    BitMatrix::from_fn(kind.rows(p), kind.cols(p), |i, j| match kind {
        TableKind::P1Lower | TableKind::FixTop => i == j + p,
        _ => i == j,
    })
}

fn column_spaces(m: &BitMatrix, kind: TableKind, p: usize) -> Vec<BitMatrix> {
    let rows: Vec<usize> = (0..m.n_rows()).collect();
    match kind {
        TableKind::P3 => vec![m.clone()],
        TableKind::P2 => vec![
            m.submatrix(&rows, &(0..p).collect::<Vec<_>>()).rcef(),
            m.submatrix(&rows, &(p..2 * p).collect::<Vec<_>>()).rcef(),
        ],
        _ => vec![m.rcef()],
    }
}

/// Walks stored moves from `key`; true iff the root is reached after
/// exactly `depth` layers with depth dropping by one per layer.
fn replays(t: &DepthTable, key: u64) -> bool {
    let Some((depth, _)) = t.get(key) else { return false };
    let mut m = t.state_matrix(key);
    for step in 0..depth {
        let Some((d, mv)) = t.key_of(&m).ok().and_then(|k| t.get(k)) else { return false };
        if d != depth - step {
            return false;
        }
        for g in t.moves()[mv as usize].gates() {
            m.add_row(g.control, g.target);
        }
    }
    t.key_of(&m).ok().and_then(|k| t.get(k)).map(|e| e.0) == Some(0)
        && column_spaces(&m, t.kind(), t.p()) == column_spaces(&root(t.kind(), t.p()), t.kind(), t.p())
}

#[test]
fn c9_properties() {
    let mut rng = seeded(9);
    let mut notes = Vec::new();

    // rcef: exhaustive over 4x2 with every invertible column operation, sampled above
    let gl2: Vec<BitMatrix> = (0u64..16)
        .map(|x| BitMatrix::from_fn(2, 2, |i, j| x >> (2 * i + j) & 1 == 1))
        .filter(|q| q.is_invertible())
        .collect();
    let mut rcef_ok = (0u64..256).all(|x| {
        let m = BitMatrix::from_fn(4, 2, |i, j| x >> (2 * i + j) & 1 == 1);
        let r = m.rcef();
        r.rcef() == r && gl2.iter().all(|q| m.mat_mul(q).unwrap().rcef() == r)
    });
    for _ in 0..2000 {
        let m = BitMatrix::random_with(8, 4, &mut rng);
        let q = BitMatrix::random_invertible_with(4, &mut rng);
        let r = m.rcef();
        rcef_ok &= r.rcef() == r && m.mat_mul(&q).unwrap().rcef() == r;
    }
    notes.push(format!("rcef {}", if rcef_ok { "ok" } else { "broken" }));

    let graphs = [ladder_pair_graph(4, true), tile_pair_graph(true), k(4)];
    let moves_ok = graphs.iter().all(|g| {
        oriented_matchings(g)
            .iter()
            .all(|mv| (0u64..1 << g.n()).all(|v| mv.apply_bits(mv.apply_bits(v)) == v))
    });
    notes.push(format!("move involution {}", if moves_ok { "ok" } else { "broken" }));

    let checked = SynthOptions {
        check_invariants: true,
    };
    let mut invariant_ok = true;
    for desc in ["line:9", "ladder:2x6", "ladder-diag:3x4", "grid:4x4", "blocks-full:p=4,m=4", "altered-grid:4x4"] {
        let arch: ArchSpec = desc.parse().unwrap();
        let plan = Plan::build(&arch, false, &Strategy::default(), TableCache::shared()).unwrap();
        for t in 0..20u64 {
            let a = BitMatrix::random_invertible(arch.n_qubits(), 0x9000 + t);
            match plan.synth(&a, &checked) {
                Ok(c) => invariant_ok &= c.simulate() == a,
                Err(_) => invariant_ok = false,
            }
        }
    }
    let plan = Plan::build(&"grid:2x8".parse().unwrap(), true, &Strategy::default(), TableCache::shared()).unwrap();
    for t in 0..20u64 {
        invariant_ok &= plan.synth(&BitMatrix::random_invertible(16, 0x9100 + t), &checked).is_ok();
    }
    notes.push(format!("invariants {}", if invariant_ok { "held every round" } else { "violated" }));

    let mut replay_ok = true;
    let mut replayed = 0usize;
    let small = [
        (1, ConnectivityGraph::path(2)),
        (2, ladder_pair_graph(2, false)),
        (2, ladder_pair_graph(2, true)),
        (2, k(2)),
    ];
    for (p, g) in &small {
        for kind in TableKind::ALL {
            let g = if kind == TableKind::P3 { g.induced(&(0..*p).collect::<Vec<_>>()) } else { g.clone() };
            let t = table(kind, *p, &g);
            for (key, _, _) in t.records() {
                replay_ok &= replays(&t, key);
                replayed += 1;
            }
        }
    }
    let sampled: Vec<(TableKind, usize, ConnectivityGraph)> = vec![
        (TableKind::P1, 3, ladder_pair_graph(3, false)),
        (TableKind::P2, 3, ladder_pair_graph(3, true)),
        (TableKind::P2, 3, k(3)),
        (TableKind::P3, 3, ConnectivityGraph::path(3)),
        (TableKind::P1, 4, tile_pair_graph(false)),
        (TableKind::FixTop, 4, tile_pair_graph(false)),
        (TableKind::P1, 4, ladder_pair_graph(4, true)),
    ];
    for (kind, p, g) in &sampled {
        let t = table(*kind, *p, g);
        let keys: Vec<u64> = t.records().map(|r| r.0).collect();
        for _ in 0..500 {
            replay_ok &= replays(&t, keys[rng.next_u32() as usize % keys.len()]);
            replayed += 1;
        }
    }
    notes.push(format!("{replayed} table entries replayed {}", if replay_ok { "to the root" } else { "with errors" }));

    let ok = rcef_ok && moves_ok && invariant_ok && replay_ok;
    line("C9", ok, notes.join("; "));
    assert!(ok);
}
