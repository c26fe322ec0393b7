//! Batch experiments: grids of planted instances, one solver run per
//! sampled graph, aggregated step statistics per grid point.
//!
//! Every sample's graph and solver seeds are derived from
//! `(master_seed, point index, sample index)`, so a sweep gives the same
//! rows no matter how many worker threads execute it.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::graphgen::{self, degree_to_p, expected_average_degree};
use crate::seed;
use crate::solvers::{self, Algorithm, SolverError, SolverParams};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error("need at least 3 rows to locate a peak, got {0}")]
    TooFewRows(usize),
    #[error("unknown preset `{0}` (known: {known})", known = PRESETS.join(", "))]
    UnknownPreset(String),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `G(n, k, p)`; the point parameter is `p`.
    Partite,
    /// `R(n, k, d)`; the point parameter is the degree `d`.
    Regular,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Partite => "partite",
            Family::Regular => "regular",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "partite" => Ok(Family::Partite),
            "regular" => Ok(Family::Regular),
            other => Err(format!("unknown family `{other}` (partite, regular)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    /// `p` for the partite family, `d` for the regular family.
    pub p_or_d: f64,
    /// Overrides `SweepConfig::samples_per_point` for this point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl GridPoint {
    pub fn partite(n: usize, k: usize, p: f64) -> Self {
        GridPoint {
            family: Family::Partite,
            n,
            k,
            p_or_d: p,
            samples: None,
        }
    }

    pub fn regular(n: usize, k: usize, d: usize) -> Self {
        GridPoint {
            family: Family::Regular,
            n,
            k,
            p_or_d: d as f64,
            samples: None,
        }
    }

    /// Partite point with the `p` that gives expected average degree `dbar`.
    pub fn partite_at_degree(n: usize, k: usize, dbar: f64) -> Result<Self, GraphError> {
        Ok(Self::partite(n, k, degree_to_p(n, k, dbar)?))
    }

    /// Edge probability of the point; for regular graphs the `p` of a
    /// partite graph with the same expected average degree.
    pub fn edge_probability(&self) -> f64 {
        match self.family {
            Family::Partite => self.p_or_d,
            Family::Regular => {
                self.p_or_d * self.k as f64 / (self.n as f64 * (self.k as f64 - 1.0))
            }
        }
    }

    pub fn average_degree(&self) -> f64 {
        match self.family {
            Family::Partite => expected_average_degree(self.n, self.k, self.p_or_d),
            Family::Regular => self.p_or_d,
        }
    }

    fn check(&self) -> Result<(), String> {
        if self.k < 2 || self.k > self.n {
            return Err(format!("k = {} invalid for n = {}", self.k, self.n));
        }
        match self.family {
            Family::Partite => {
                if !(0.0..=1.0).contains(&self.p_or_d) {
                    return Err(format!("p = {} outside [0, 1]", self.p_or_d));
                }
            }
            Family::Regular => {
                let d = self.p_or_d;
                if d < 0.0 || d.fract() != 0.0 {
                    return Err(format!("degree {d} is not a non-negative integer"));
                }
                graphgen::check_regular(self.n, self.k, d as usize).map_err(|e| e.to_string())?;
            }
        }
        Ok(())
    }

    fn generate(&self, seed: u64) -> Result<Graph, GraphError> {
        match self.family {
            Family::Partite => graphgen::generate_partite(self.n, self.k, self.p_or_d, seed),
            Family::Regular => {
                graphgen::generate_regular(self.n, self.k, self.p_or_d as usize, seed)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub name: String,
    pub grid: Vec<GridPoint>,
    pub solver: Algorithm,
    pub b_values: Vec<f64>,
    pub samples_per_point: usize,
    /// `None` selects the default budget: 1000 rounds for the parallel
    /// solvers, `200 n` iterations for the sequential one.
    pub max_steps: Option<u64>,
    pub phase1_recolor_prob: f64,
    pub master_seed: u64,
    pub workers: usize,
    /// Keep every sample's step count in the rows.
    #[serde(default)]
    pub keep_raw: bool,
}

impl SweepConfig {
    pub fn new(name: impl Into<String>, grid: Vec<GridPoint>, solver: Algorithm) -> Self {
        SweepConfig {
            name: name.into(),
            grid,
            solver,
            b_values: vec![4.0],
            samples_per_point: DEFAULT_SAMPLES,
            max_steps: None,
            phase1_recolor_prob: 0.6,
            master_seed: 0,
            workers: 1,
            keep_raw: false,
        }
    }

    /// Budget used at a point with `n` vertices.
    pub fn effective_max_steps(&self, n: usize) -> u64 {
        self.max_steps.unwrap_or(match self.solver {
            Algorithm::Sequential => 200 * n as u64,
            Algorithm::Naive | Algorithm::Mppw => 1000,
        })
    }

    pub fn samples_at(&self, point: &GridPoint) -> usize {
        point.samples.unwrap_or(self.samples_per_point)
    }

    /// Multiplies every sample count by `factor`, keeping at least one.
    pub fn scaled(mut self, factor: f64) -> Self {
        fn scale(s: usize, factor: f64) -> usize {
            ((s as f64 * factor).round() as usize).max(1)
        }
        self.samples_per_point = scale(self.samples_per_point, factor);
        for p in &mut self.grid {
            p.samples = p.samples.map(|s| scale(s, factor));
        }
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.grid.is_empty() {
            return Err(HarnessError::EmptyGrid);
        }
        if self.samples_per_point == 0 || self.grid.iter().any(|p| p.samples == Some(0)) {
            return Err(HarnessError::InvalidConfig("samples per point must be >= 1".into()));
        }
        if self.b_values.is_empty() {
            return Err(HarnessError::InvalidConfig("no basis values".into()));
        }
        if let Some(b) = self.b_values.iter().find(|b| !(b.is_finite() && **b > 1.0)) {
            return Err(HarnessError::InvalidConfig(format!("basis {b} not > 1")));
        }
        let p = self.phase1_recolor_prob;
        if !(p > 0.0 && p <= 1.0) {
            return Err(HarnessError::InvalidConfig(format!(
                "phase-1 recolor probability {p} outside (0, 1]"
            )));
        }
        Ok(())
    }
}

/// Default samples per grid point for desk-scale runs.
pub const DEFAULT_SAMPLES: usize = 300;

/// Critical-region coordinates of a `G(n, k, p)` parameter triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalMetrics {
    /// `2 p n / k`, conjectured to sit near `16/3` in the critical region.
    pub conjecture_old: f64,
    /// `n p (k - 1) / k`.
    pub avg_degree: f64,
    /// `n p / (k - 1.5)`, observed near 4.3 in the critical region.
    pub conjecture_new: f64,
    n: usize,
    k: usize,
    p: f64,
}

impl CriticalMetrics {
    /// `n p / (k - offset)`; `offset = 1.5` gives `conjecture_new`.
    pub fn shifted_density(&self, offset: f64) -> f64 {
        self.n as f64 * self.p / (self.k as f64 - offset)
    }
}

pub fn critical_metrics(n: usize, k: usize, p: f64) -> CriticalMetrics {
    let (nf, kf) = (n as f64, k as f64);
    CriticalMetrics {
        conjecture_old: 2.0 * p * nf / kf,
        avg_degree: expected_average_degree(n, k, p),
        conjecture_new: nf * p / (kf - 1.5),
        n,
        k,
        p,
    }
}

/// One aggregated line of sweep output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub p_or_d: f64,
    /// Edge probability used for the metric columns.
    pub p: f64,
    pub b: f64,
    pub solver: Algorithm,
    pub avg_degree: f64,
    pub conj_old: f64,
    pub conj_new: f64,
    pub samples: usize,
    pub mean_steps: f64,
    pub median_steps: f64,
    pub q90_steps: f64,
    pub min_steps: f64,
    pub max_steps: f64,
    pub success_rate: f64,
    pub mean_final_energy: f64,
    /// Set when the point could not be run; the statistics are then NaN.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_steps: Option<Vec<u64>>,
}

impl SweepRow {
    pub fn metrics(&self) -> CriticalMetrics {
        critical_metrics(self.n, self.k, self.p)
    }

    fn new(point: &GridPoint, b: f64, solver: Algorithm) -> Self {
        let p = point.edge_probability();
        let m = critical_metrics(point.n, point.k, p);
        SweepRow {
            family: point.family,
            n: point.n,
            k: point.k,
            p_or_d: point.p_or_d,
            p,
            b,
            solver,
            avg_degree: point.average_degree(),
            conj_old: m.conjecture_old,
            conj_new: m.conjecture_new,
            samples: 0,
            mean_steps: f64::NAN,
            median_steps: f64::NAN,
            q90_steps: f64::NAN,
            min_steps: f64::NAN,
            max_steps: f64::NAN,
            success_rate: f64::NAN,
            mean_final_energy: f64::NAN,
            error: None,
            raw_steps: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    steps: u64,
    success: bool,
    energy: usize,
}

/// Attempts at generating one sample graph before the point is flagged.
const GENERATION_ATTEMPTS: u64 = 8;

fn run_sample(
    config: &SweepConfig,
    point: &GridPoint,
    point_idx: usize,
    sample_idx: usize,
) -> Result<Vec<Outcome>, String> {
    let sample_seed = seed::mix(&[config.master_seed, point_idx as u64, sample_idx as u64]);
    let mut graph = None;
    let mut last_err = String::new();
    for attempt in 0..GENERATION_ATTEMPTS {
        match point.generate(seed::mix(&[sample_seed, 1, attempt])) {
            Ok(g) => {
                graph = Some(g);
                break;
            }
            Err(e @ GraphError::RepairFailed { .. }) => last_err = e.to_string(),
            Err(e) => return Err(e.to_string()),
        }
    }
    let Some(g) = graph else {
        return Err(last_err);
    };

    let max_steps = config.effective_max_steps(point.n);
    config
        .b_values
        .iter()
        .map(|&b| {
            let params = SolverParams {
                k: point.k,
                basis: b,
                max_steps,
                phase1_recolor_prob: config.phase1_recolor_prob,
                seed: seed::mix(&[sample_seed, 2]),
                trace: false,
            };
            let r = solvers::solve(config.solver, &g, &params).map_err(|e| e.to_string())?;
            Ok(Outcome {
                steps: if r.success { r.total_steps() } else { max_steps },
                success: r.success,
                energy: r.best_energy,
            })
        })
        .collect()
}

/// Runs every grid point and returns one row per `(point, b)` in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, HarnessError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;

    let checks: Vec<Result<(), String>> = config.grid.iter().map(GridPoint::check).collect();
    let jobs: Vec<(usize, usize)> = config
        .grid
        .iter()
        .enumerate()
        .filter(|(i, _)| checks[*i].is_ok())
        .flat_map(|(i, p)| (0..config.samples_at(p)).map(move |s| (i, s)))
        .collect();

    let results: Vec<Result<Vec<Outcome>, String>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, s)| run_sample(config, &config.grid[i], i, s))
            .collect()
    });

    let mut per_point: Vec<Vec<Result<Vec<Outcome>, String>>> =
        config.grid.iter().map(|_| Vec::new()).collect();
    for (&(i, _), r) in jobs.iter().zip(results) {
        per_point[i].push(r);
    }

    let mut rows = Vec::with_capacity(config.grid.len() * config.b_values.len());
    for (i, point) in config.grid.iter().enumerate() {
        let failure = match &checks[i] {
            Err(e) => Some(e.clone()),
            Ok(()) => per_point[i].iter().find_map(|r| r.as_ref().err().cloned()),
        };
        for (bi, &b) in config.b_values.iter().enumerate() {
            let mut row = SweepRow::new(point, b, config.solver);
            if let Some(e) = &failure {
                row.error = Some(e.clone());
                rows.push(row);
                continue;
            }
            let outcomes: Vec<Outcome> = per_point[i]
                .iter()
                .map(|r| r.as_ref().expect("failures handled above")[bi])
                .collect();
            fill_stats(&mut row, &outcomes, config.keep_raw);
            rows.push(row);
        }
    }
    Ok(rows)
}

fn fill_stats(row: &mut SweepRow, outcomes: &[Outcome], keep_raw: bool) {
    let count = outcomes.len();
    let mut steps: Vec<u64> = outcomes.iter().map(|o| o.steps).collect();
    let cf = count as f64;
    row.samples = count;
    row.mean_steps = steps.iter().map(|&s| s as f64).sum::<f64>() / cf;
    row.success_rate = outcomes.iter().filter(|o| o.success).count() as f64 / cf;
    row.mean_final_energy = outcomes.iter().map(|o| o.energy as f64).sum::<f64>() / cf;
    if keep_raw {
        row.raw_steps = Some(steps.clone());
    }
    steps.sort_unstable();
    let sorted: Vec<f64> = steps.iter().map(|&s| s as f64).collect();
    row.median_steps = quantile(&sorted, 0.5);
    row.q90_steps = quantile(&sorted, 0.9);
    row.min_steps = sorted[0];
    row.max_steps = sorted[count - 1];
}

/// Linear-interpolation quantile of sorted data (the common "type 7").
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub const CSV_HEADER: &str = "family,n,k,p_or_d,b,solver,avg_degree,conj_old,conj_new,samples,mean_steps,median_steps,q90_steps,success_rate,mean_final_energy";

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.family.name(),
            r.n,
            r.k,
            r.p_or_d,
            r.b,
            r.solver,
            r.avg_degree,
            r.conj_old,
            r.conj_new,
            r.samples,
            r.mean_steps,
            r.median_steps,
            r.q90_steps,
            r.success_rate,
            r.mean_final_energy
        );
    }
    out
}

/// Per-row raw step lists, one line per row: `row_index,steps...`.
pub fn raw_steps_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    for (i, r) in rows.iter().enumerate() {
        let _ = write!(out, "{i}");
        for s in r.raw_steps.iter().flatten() {
            let _ = write!(out, ",{s}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

pub fn report_json(config: &SweepConfig, rows: &[SweepRow]) -> Result<String, HarnessError> {
    let report = SweepReport {
        config: config.clone(),
        rows: rows.to_vec(),
    };
    Ok(serde_json::to_string_pretty(&report)?)
}

/// Horizontal coordinate used to locate a peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    AvgDegree,
    ConjectureOld,
    ConjectureNew,
    /// Edge probability.
    P,
    /// `n p / (k - offset)`.
    ShiftedDensity(f64),
}

impl Axis {
    pub fn value(self, row: &SweepRow) -> f64 {
        match self {
            Axis::AvgDegree => row.avg_degree,
            Axis::ConjectureOld => row.conj_old,
            Axis::ConjectureNew => row.conj_new,
            Axis::P => row.p,
            Axis::ShiftedDensity(offset) => row.metrics().shifted_density(offset),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub x: f64,
    pub mean_steps: f64,
    /// The maximum sits at the first or last row, so no interpolation was
    /// possible.
    pub boundary: bool,
}

/// Locates the maximum of `mean_steps` along `axis`, refined by the parabola
/// through the maximal row and its two neighbors. Rows without statistics
/// are ignored. When several rows share the maximum, the middle one of them
/// is used.
pub fn find_peak(rows: &[SweepRow], axis: Axis) -> Result<Peak, HarnessError> {
    let mut pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.samples > 0 && r.mean_steps.is_finite())
        .map(|r| (axis.value(r), r.mean_steps))
        .collect();
    find_peak_xy(&mut pts)
}

/// [`find_peak`] on raw `(x, y)` pairs.
pub fn find_peak_xy(pts: &mut [(f64, f64)]) -> Result<Peak, HarnessError> {
    if pts.len() < 3 {
        return Err(HarnessError::TooFewRows(pts.len()));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    // censored sweeps can produce a flat top; take the middle of the tied run
    let ymax = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].1 == ymax).collect();
    let imax = tied[(tied.len() - 1) / 2];
    if imax == 0 || imax == pts.len() - 1 {
        let (x, y) = pts[imax];
        return Ok(Peak {
            x,
            mean_steps: y,
            boundary: true,
        });
    }
    let [(x0, y0), (x1, y1), (x2, y2)] = [pts[imax - 1], pts[imax], pts[imax + 1]];
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    let x = if a < 0.0 {
        (-b / (2.0 * a)).clamp(x0, x2)
    } else {
        x1
    };
    let y = y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
    Ok(Peak {
        x,
        mean_steps: y,
        boundary: false,
    })
}

pub const PRESETS: [&str; 4] = ["fig1", "fig2", "fig34", "fig5-8"];

/// `start, start + step, ...` up to and including `end` (with a small
/// tolerance for accumulated rounding).
pub fn linear_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let count = ((end - start) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| start + step * i as f64).collect()
}

/// Grid configurations for the four published experiments, at full sample
/// size. Shrink with [`SweepConfig::scaled`].
pub fn preset(name: &str) -> Result<SweepConfig, HarnessError> {
    let cfg = match name {
        // Steps against n for fixed p: the hard band sits near n p ~ 7.
        "fig1" => {
            let mut grid = Vec::new();
            for p in [0.1, 0.05] {
                for n in (20..=300).step_by(10) {
                    grid.push(GridPoint::partite(n, 3, p));
                }
            }
            let mut c = SweepConfig::new("fig1", grid, Algorithm::Mppw);
            c.samples_per_point = 10_000;
            c
        }
        "fig2" => {
            let mut grid = Vec::new();
            for (n, samples) in [(90, 10_000), (120, 10_000), (300, 10_000), (3000, 2000)] {
                for d in linear_grid(2.0, 9.0, 0.3) {
                    let mut pt = GridPoint::partite_at_degree(n, 3, d)
                        .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
                    pt.samples = Some(samples);
                    grid.push(pt);
                }
            }
            let mut c = SweepConfig::new("fig2", grid, Algorithm::Mppw);
            c.samples_per_point = 10_000;
            c
        }
        "fig34" => {
            let mut grid = Vec::new();
            for d in [3.2, 4.4, 8.0] {
                grid.push(
                    GridPoint::partite_at_degree(120, 3, d)
                        .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?,
                );
            }
            for d in 2..=8 {
                grid.push(GridPoint::regular(120, 3, d));
            }
            let mut c = SweepConfig::new("fig34", grid, Algorithm::Mppw);
            c.b_values = (2..=10).map(f64::from).collect();
            c.samples_per_point = 1000;
            c
        }
        "fig5-8" => {
            let mut grid = Vec::new();
            for n in [60, 120, 240] {
                for k in 3..=8 {
                    for x in linear_grid(2.0, 8.0, 0.25) {
                        grid.push(GridPoint::partite(n, k, x * (k as f64 - 1.5) / n as f64));
                    }
                }
            }
            let mut c = SweepConfig::new("fig5-8", grid, Algorithm::Mppw);
            c.samples_per_point = 5000;
            c
        }
        other => return Err(HarnessError::UnknownPreset(other.to_string())),
    };
    Ok(cfg)
}
