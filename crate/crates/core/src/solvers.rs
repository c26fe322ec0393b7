//! The three Petford–Welsh variants.
//!
//! * [`sequential_pw`]: one uniformly chosen bad vertex is recolored per step.
//! * [`naive_parallel_pw`]: every bad vertex recolors simultaneously each
//!   round, all against the round-start coloring.
//! * [`mppw`]: two phases. Phase 1 runs damped synchronous rounds with `2k`
//!   colors; phase 2 uses the phase-1 color classes as a cyclic firing
//!   schedule while searching for a `k`-coloring.
//!
//! Inside a synchronous round each vertex draws from its own substream keyed
//! by `(seed, phase, round, vertex)`, so the outcome of a round does not
//! depend on the order in which vertices are visited.

use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::kernel::{Coloring, ConflictState, KernelError, Recolorer};
use crate::seed::{self, Rng};

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sequential,
    Naive,
    Mppw,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sequential => "sequential",
            Algorithm::Naive => "naive",
            Algorithm::Mppw => "mppw",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" | "seq" => Ok(Algorithm::Sequential),
            "naive" => Ok(Algorithm::Naive),
            "mppw" | "imppw" => Ok(Algorithm::Mppw),
            other => Err(format!("unknown solver `{other}` (sequential, naive, mppw)")),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Target number of colors.
    pub k: usize,
    /// Basis `b` of the recoloring weights `b^(-S_i)`.
    pub basis: f64,
    /// Iterations (sequential) or rounds (parallel). `mppw` gives half to
    /// each phase.
    pub max_steps: u64,
    /// Per-round firing probability of a bad vertex in `mppw` phase 1.
    pub phase1_recolor_prob: f64,
    pub seed: u64,
    pub trace: bool,
}

impl SolverParams {
    pub fn new(k: usize) -> Self {
        SolverParams {
            k,
            basis: 4.0,
            max_steps: 1000,
            phase1_recolor_prob: 0.6,
            seed: 0,
            trace: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn with_basis(mut self, basis: f64) -> Self {
        self.basis = basis;
        self
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.k < 2 {
            return Err(SolverError::InvalidParams(format!("k = {} < 2", self.k)));
        }
        if !(self.basis.is_finite() && self.basis > 1.0) {
            return Err(SolverError::InvalidParams(format!("basis {} not > 1", self.basis)));
        }
        let p = self.phase1_recolor_prob;
        if !(p > 0.0 && p <= 1.0) {
            return Err(SolverError::InvalidParams(format!(
                "phase-1 recolor probability {p} outside (0, 1]"
            )));
        }
        Ok(())
    }
}

/// One line of a run trace, recorded after every step (and once before the
/// first one, at step 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    /// 1 for single-phase solvers and `mppw` phase 1, 2 for `mppw` phase 2.
    pub phase: u8,
    pub energy: usize,
    pub bad_count: usize,
}

/// `step,phase,energy,bad_count` with a header line.
pub fn trace_to_csv(trace: &[TraceRecord]) -> String {
    let mut out = String::from("step,phase,energy,bad_count\n");
    for r in trace {
        let _ = writeln!(out, "{},{},{},{}", r.step, r.phase, r.energy, r.bad_count);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub success: bool,
    /// Iterations for the sequential solver, rounds for the parallel ones
    /// (phase-2 rounds for `mppw`).
    pub steps: u64,
    pub best_energy: usize,
    pub best_coloring: Coloring,
    /// `mppw` phase-1 rounds; 0 for the other solvers.
    pub phase1_steps: u64,
    /// Whether `mppw` phase 1 reached a proper `2k`-coloring.
    pub phase1_proper: bool,
    pub trace: Option<Vec<TraceRecord>>,
}

impl RunResult {
    /// All parallel rounds (or sequential iterations) spent by the run.
    pub fn total_steps(&self) -> u64 {
        self.steps + self.phase1_steps
    }
}

/// Output of `mppw` phase 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Outcome {
    /// Lowest-energy `2k`-coloring seen.
    pub coloring: Coloring,
    pub energy: usize,
    pub steps: u64,
    pub trace: Option<Vec<TraceRecord>>,
}

// substream tags
const SEQUENTIAL: u64 = 0x0053_4551;
const NAIVE: u64 = 0x004E_4149;
const PHASE1: u64 = 0x0050_4831;
const PHASE2: u64 = 0x0050_4832;
const INIT: u64 = u64::MAX;

/// Seeds the per-vertex generators of one synchronous round.
#[derive(Debug, Clone, Copy)]
pub struct RoundStream {
    pub seed: u64,
    pub tag: u64,
    pub round: u64,
}

impl RoundStream {
    pub fn rng(&self, v: usize) -> Rng {
        seed::substream(&[self.seed, self.tag, self.round, v as u64])
    }
}

/// Computes the recolorings of one synchronous round.
///
/// Every candidate for which `gate` returns true draws a new color against
/// `coloring` as it stands; nothing is applied here, so no draw can see
/// another draw of the same round. Returns `(vertex, new_color)` pairs in
/// candidate order.
pub fn synchronous_round<G>(
    g: &Graph,
    coloring: &Coloring,
    candidates: &[usize],
    recolorer: &mut Recolorer,
    stream: RoundStream,
    mut gate: G,
) -> Vec<(usize, usize)>
where
    G: FnMut(usize, &mut Rng) -> bool,
{
    let colors = coloring.as_slice();
    candidates
        .iter()
        .filter_map(|&v| {
            let mut rng = stream.rng(v);
            gate(v, &mut rng).then(|| (v, recolorer.draw(g, colors, v, &mut rng)))
        })
        .collect()
}

struct Tracker {
    phase: u8,
    best_energy: usize,
    best: Coloring,
    trace: Option<Vec<TraceRecord>>,
}

impl Tracker {
    fn new(phase: u8, c: &Coloring, st: &ConflictState, trace: bool) -> Self {
        let mut t = Tracker {
            phase,
            best_energy: st.energy(),
            best: c.clone(),
            trace: trace.then(Vec::new),
        };
        t.record(0, st);
        t
    }

    fn record(&mut self, step: u64, st: &ConflictState) {
        if let Some(tr) = &mut self.trace {
            tr.push(TraceRecord {
                step,
                phase: self.phase,
                energy: st.energy(),
                bad_count: st.bad_count(),
            });
        }
    }

    fn observe(&mut self, step: u64, c: &Coloring, st: &ConflictState) {
        if st.energy() < self.best_energy {
            self.best_energy = st.energy();
            self.best.clone_from(c);
        }
        self.record(step, st);
    }
}

/// Sequential Petford–Welsh: pick a bad vertex uniformly, resample its color.
pub fn sequential_pw(g: &Graph, params: &SolverParams) -> Result<RunResult, SolverError> {
    params.validate()?;
    let mut rng = seed::substream(&[params.seed, SEQUENTIAL]);
    let mut c = Coloring::uniform(g.n(), params.k, &mut rng);
    let mut st = ConflictState::new(g, &c);
    let mut rec = Recolorer::new(params.basis, params.k, g.max_degree())?;
    let mut tracker = Tracker::new(1, &c, &st, params.trace);

    let mut steps = 0;
    while st.energy() > 0 && steps < params.max_steps {
        let v = st.random_bad(&mut rng).expect("positive energy implies a bad vertex");
        let new = rec.draw(g, c.as_slice(), v, &mut rng);
        st.recolor(g, &mut c, v, new);
        steps += 1;
        tracker.observe(steps, &c, &st);
    }
    Ok(finish(tracker, steps, 0, false))
}

fn finish(tracker: Tracker, steps: u64, phase1_steps: u64, phase1_proper: bool) -> RunResult {
    RunResult {
        success: tracker.best_energy == 0,
        steps,
        best_energy: tracker.best_energy,
        best_coloring: tracker.best,
        phase1_steps,
        phase1_proper,
        trace: tracker.trace,
    }
}

/// Synchronous rounds in which every bad vertex recolors.
pub fn naive_parallel_pw(g: &Graph, params: &SolverParams) -> Result<RunResult, SolverError> {
    params.validate()?;
    let mut init = seed::substream(&[params.seed, NAIVE, INIT]);
    let mut c = Coloring::uniform(g.n(), params.k, &mut init);
    let mut st = ConflictState::new(g, &c);
    let mut rec = Recolorer::new(params.basis, params.k, g.max_degree())?;
    let mut tracker = Tracker::new(1, &c, &st, params.trace);

    let mut round = 0;
    while st.energy() > 0 && round < params.max_steps {
        let stream = RoundStream {
            seed: params.seed,
            tag: NAIVE,
            round,
        };
        let bad = st.bad_vertices().to_vec();
        for (v, new) in synchronous_round(g, &c, &bad, &mut rec, stream, |_, _| true) {
            st.recolor(g, &mut c, v, new);
        }
        round += 1;
        tracker.observe(round, &c, &st);
    }
    Ok(finish(tracker, round, 0, false))
}

/// Phase-1 budget of `mppw`.
pub fn phase1_budget(max_steps: u64) -> u64 {
    max_steps / 2
}

/// Phase-2 budget of `mppw`.
pub fn phase2_budget(max_steps: u64) -> u64 {
    max_steps / 2
}

/// `mppw` phase 1: damped synchronous rounds over `2k` colors, for at most
/// `phase1_budget(max_steps)` rounds.
pub fn mppw_phase1(g: &Graph, params: &SolverParams) -> Result<Phase1Outcome, SolverError> {
    params.validate()?;
    let colors = 2 * params.k;
    let budget = phase1_budget(params.max_steps);
    let mut init = seed::substream(&[params.seed, PHASE1, INIT]);
    let mut c = Coloring::uniform(g.n(), colors, &mut init);
    let mut st = ConflictState::new(g, &c);
    let mut rec = Recolorer::new(params.basis, colors, g.max_degree())?;
    let mut tracker = Tracker::new(1, &c, &st, params.trace);
    let fire = params.phase1_recolor_prob;

    let mut round = 0;
    while st.energy() > 0 && round < budget {
        let stream = RoundStream {
            seed: params.seed,
            tag: PHASE1,
            round,
        };
        let bad = st.bad_vertices().to_vec();
        let moves = synchronous_round(g, &c, &bad, &mut rec, stream, |_, rng| {
            rng.random_bool(fire)
        });
        for (v, new) in moves {
            st.recolor(g, &mut c, v, new);
        }
        round += 1;
        tracker.observe(round, &c, &st);
    }
    Ok(Phase1Outcome {
        energy: tracker.best_energy,
        coloring: tracker.best,
        steps: round,
        trace: tracker.trace,
    })
}

/// Two-phase massively parallel Petford–Welsh.
///
/// Phase-2 round `r` lets exactly the bad vertices `v` with
/// `schedule(v) = r mod 2k` recolor, where `schedule` is the phase-1
/// coloring. If phase 1 ran out of budget its best coloring is still used as
/// the schedule.
pub fn mppw(g: &Graph, params: &SolverParams) -> Result<RunResult, SolverError> {
    let phase1 = mppw_phase1(g, params)?;
    let schedule = phase1.coloring.as_slice();
    let period = 2 * params.k as u64;
    let phase1_proper = phase1.energy == 0;
    let budget = phase2_budget(params.max_steps);

    let mut init = seed::substream(&[params.seed, PHASE2, INIT]);
    let mut c = Coloring::uniform(g.n(), params.k, &mut init);
    let mut st = ConflictState::new(g, &c);
    let mut rec = Recolorer::new(params.basis, params.k, g.max_degree())?;
    let mut tracker = Tracker::new(2, &c, &st, params.trace);

    let mut round = 0;
    while st.energy() > 0 && round < budget {
        let slot = (round % period) as usize;
        let firing: Vec<usize> = st
            .bad_vertices()
            .iter()
            .copied()
            .filter(|&v| schedule[v] == slot)
            .collect();
        if params.trace && phase1_proper {
            assert!(
                is_independent(g, &firing),
                "phase-2 round {round} fired adjacent vertices"
            );
        }
        let stream = RoundStream {
            seed: params.seed,
            tag: PHASE2,
            round,
        };
        for (v, new) in synchronous_round(g, &c, &firing, &mut rec, stream, |_, _| true) {
            st.recolor(g, &mut c, v, new);
        }
        round += 1;
        tracker.observe(round, &c, &st);
    }

    let mut result = finish(tracker, round, phase1.steps, phase1_proper);
    if let (Some(p1), Some(p2)) = (phase1.trace, result.trace.take()) {
        result.trace = Some(p1.into_iter().chain(p2).collect());
    }
    Ok(result)
}

/// True when no two listed vertices are adjacent.
pub fn is_independent(g: &Graph, vertices: &[usize]) -> bool {
    let mut mark = vec![false; g.n()];
    for &v in vertices {
        mark[v] = true;
    }
    vertices
        .iter()
        .all(|&v| g.neighbors(v).iter().all(|&u| !mark[u]))
}

pub fn solve(algorithm: Algorithm, g: &Graph, params: &SolverParams) -> Result<RunResult, SolverError> {
    match algorithm {
        Algorithm::Sequential => sequential_pw(g, params),
        Algorithm::Naive => naive_parallel_pw(g, params),
        Algorithm::Mppw => mppw(g, params),
    }
}
