//! Layouts and solvers for an architecture, ready to synthesize.

use gf2synth_core::box_solvers::build_solver;
use gf2synth_core::synth::combined_bound;
use gf2synth_core::{
    synth, synth_combined, ArchSpec, BitMatrix, BlockLineLayout, BlockSolver, CnotCircuit, ConnectivityGraph, Needs,
    Result, Strategy, SynthOptions, TableSource,
};

pub enum Plan {
    Single {
        layout: BlockLineLayout,
        solver: Box<dyn BlockSolver>,
    },
    Combined {
        coarse: BlockLineLayout,
        coarse_solver: Box<dyn BlockSolver>,
        fine: BlockLineLayout,
        fine_solver: Box<dyn BlockSolver>,
    },
}

impl Plan {
    pub fn build(arch: &ArchSpec, combined: bool, strategy: &Strategy, source: &dyn TableSource) -> Result<Self> {
        if combined {
            let (coarse, fine) = arch.combined_layouts()?;
            let coarse_solver = build_solver(
                &coarse,
                strategy,
                Needs {
                    p1: true,
                    p2: false,
                    p3: true,
                },
                source,
            )?;
            let fine_solver = build_solver(
                &fine,
                strategy,
                Needs {
                    p1: false,
                    p2: true,
                    p3: true,
                },
                source,
            )?;
            Ok(Plan::Combined {
                coarse,
                coarse_solver,
                fine,
                fine_solver,
            })
        } else {
            let layout = arch.build()?;
            let solver = build_solver(&layout, strategy, Needs::ALL, source)?;
            Ok(Plan::Single { layout, solver })
        }
    }

    /// The layout whose blocks the final steps run on.
    pub fn layout(&self) -> &BlockLineLayout {
        match self {
            Plan::Single { layout, .. } => layout,
            Plan::Combined { fine, .. } => fine,
        }
    }

    pub fn graph(&self) -> &ConnectivityGraph {
        &self.layout().graph
    }

    pub fn n(&self) -> usize {
        self.layout().n()
    }

    /// Worst-case depth from the local solver bounds.
    pub fn bound(&self) -> Option<usize> {
        match self {
            Plan::Single { layout, solver } => solver.bounds().total(layout.m),
            Plan::Combined {
                coarse,
                coarse_solver,
                fine,
                fine_solver,
            } => combined_bound(coarse.m, coarse_solver.bounds(), fine.m, fine_solver.bounds()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Plan::Single { layout, .. } => format!("single p={} m={}", layout.p, layout.m),
            Plan::Combined { coarse, fine, .. } => {
                format!("combined p={} m={} then p={} m={}", coarse.p, coarse.m, fine.p, fine.m)
            }
        }
    }

    pub fn synth(&self, a: &BitMatrix, opts: &SynthOptions) -> Result<CnotCircuit> {
        match self {
            Plan::Single { layout, solver } => synth(a, layout, solver.as_ref(), opts),
            Plan::Combined {
                coarse,
                coarse_solver,
                fine,
                fine_solver,
            } => synth_combined(a, coarse, coarse_solver.as_ref(), fine, fine_solver.as_ref(), opts),
        }
    }
}

/// Resolves a family such as `grid:4xc` or `blocks-full:p=4,m=k` to the
/// member with `n` qubits. A descriptor without a variable must match `n`.
pub fn resolve_family(family: &str, n: usize) -> std::result::Result<ArchSpec, String> {
    if let Ok(arch) = family.parse::<ArchSpec>() {
        return if arch.n_qubits() == n {
            Ok(arch)
        } else {
            Err(format!("{family} has {} qubits, not {n}", arch.n_qubits()))
        };
    }
    let (kind, args) = family
        .split_once(':')
        .ok_or_else(|| format!("missing `:` in `{family}`"))?;
    let mut found = None;
    for (i, ch) in args.char_indices().filter(|(_, c)| c.is_ascii_alphabetic()) {
        let substitute = |v: usize| format!("{kind}:{}{v}{}", &args[..i], &args[i + ch.len_utf8()..]);
        if substitute(1).parse::<ArchSpec>().is_err() && substitute(2).parse::<ArchSpec>().is_err() {
            continue;
        }
        if found.is_some() {
            return Err(format!("more than one free variable in `{family}`"));
        }
        found = Some(i);
        for v in 1..=n {
            if let Ok(arch) = substitute(v).parse::<ArchSpec>() {
                if arch.n_qubits() == n {
                    return Ok(arch);
                }
            }
        }
    }
    match found {
        Some(_) => Err(format!("no member of `{family}` has {n} qubits")),
        None => Err(format!("`{family}` is neither an architecture nor a family")),
    }
}
