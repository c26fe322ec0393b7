//! Coloring data model, bad-edge energy, and the recoloring distribution.
//!
//! A vertex `v` with `S_i` neighbors of color `i` is recolored to `i` with
//! probability proportional to `b^(-S_i)`, where `b = exp(1 / T)`. Weights
//! are evaluated after subtracting `min S` so high-degree vertices do not
//! underflow.

use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("color {color} of vertex {vertex} is not below {num_colors}")]
    ColorOutOfRange {
        vertex: usize,
        color: usize,
        num_colors: usize,
    },
    #[error("a coloring needs at least one color")]
    NoColors,
    #[error("empty neighbor-count vector")]
    EmptyCounts,
    #[error("basis must be finite and > 1, got {0}")]
    BadBasis(f64),
    #[error("temperature must be finite and > 0, got {0}")]
    BadTemperature(f64),
    #[error("coloring text line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Assignment of a color in `0..num_colors` to every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
    num_colors: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>, num_colors: usize) -> Result<Self, KernelError> {
        if num_colors == 0 {
            return Err(KernelError::NoColors);
        }
        if let Some((vertex, &color)) = colors.iter().enumerate().find(|(_, &c)| c >= num_colors) {
            return Err(KernelError::ColorOutOfRange {
                vertex,
                color,
                num_colors,
            });
        }
        Ok(Coloring { colors, num_colors })
    }

    /// Independent uniform color for each vertex.
    pub fn uniform<R: Rng + ?Sized>(n: usize, num_colors: usize, rng: &mut R) -> Self {
        assert!(num_colors > 0, "a coloring needs at least one color");
        let colors = (0..n).map(|_| rng.random_range(0..num_colors)).collect();
        Coloring { colors, num_colors }
    }

    #[inline]
    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.colors
    }

    /// `C` on the first line, then one color per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.num_colors);
        for c in &self.colors {
            let _ = writeln!(out, "{c}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, KernelError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let parse = |(i, l): (usize, &str)| {
            l.trim().parse::<usize>().map_err(|_| KernelError::Parse {
                line: i + 1,
                msg: format!("expected an integer, got `{}`", l.trim()),
            })
        };
        let num_colors = match lines.next() {
            Some(line) => parse(line)?,
            None => return Err(KernelError::Parse { line: 0, msg: "empty input".into() }),
        };
        let colors = lines.map(parse).collect::<Result<Vec<_>, _>>()?;
        Coloring::new(colors, num_colors)
    }
}

/// Number of monochromatic edges.
pub fn energy(g: &Graph, c: &Coloring) -> usize {
    g.edges().filter(|&(u, v)| c.color(u) == c.color(v)).count()
}

/// `S[i]` = number of neighbors of `v` with color `i`, for `i < num_colors`.
pub fn neighbor_color_counts(g: &Graph, c: &Coloring, v: usize, num_colors: usize) -> Vec<u32> {
    let mut counts = vec![0; num_colors];
    count_neighbor_colors(g, c.as_slice(), v, &mut counts);
    counts
}

#[inline]
fn count_neighbor_colors(g: &Graph, colors: &[usize], v: usize, out: &mut [u32]) {
    out.fill(0);
    for &u in g.neighbors(v) {
        if let Some(slot) = out.get_mut(colors[u]) {
            *slot += 1;
        }
    }
}

/// Normalized recoloring distribution `p_i ∝ b^(-S_i)`.
pub fn color_distribution(counts: &[u32], b: f64) -> Result<Vec<f64>, KernelError> {
    check_basis(b)?;
    if counts.is_empty() {
        return Err(KernelError::EmptyCounts);
    }
    let min = *counts.iter().min().unwrap();
    let spread = (*counts.iter().max().unwrap() - min) as usize;
    let table = PowerTable::new(b, spread);
    let mut dist = vec![0.0; counts.len()];
    table.distribution_into(counts, &mut dist);
    Ok(dist)
}

/// Draws an index according to `dist` using one uniform variate.
pub fn sample_color<R: Rng + ?Sized>(dist: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the final partial sum
    dist.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Cached `b^(-j)` for `j = 0..=max`.
#[derive(Debug, Clone)]
struct PowerTable {
    powers: Vec<f64>,
}

impl PowerTable {
    fn new(b: f64, max: usize) -> Self {
        let powers = (0..=max).map(|j| b.powi(-(j as i32))).collect();
        PowerTable { powers }
    }

    #[inline]
    fn weight(&self, j: u32) -> f64 {
        self.powers.get(j as usize).copied().unwrap_or(0.0)
    }

    fn distribution_into(&self, counts: &[u32], out: &mut [f64]) {
        let min = counts.iter().copied().min().unwrap_or(0);
        let mut total = 0.0;
        for (w, &s) in out.iter_mut().zip(counts) {
            *w = self.weight(s - min);
            total += *w;
        }
        for w in out.iter_mut() {
            *w /= total;
        }
    }
}

/// Reusable buffers for drawing new colors inside solver loops.
///
/// Produces exactly what `neighbor_color_counts`, `color_distribution` and
/// `sample_color` produce when called one after the other.
#[derive(Debug, Clone)]
pub struct Recolorer {
    table: PowerTable,
    counts: Vec<u32>,
    dist: Vec<f64>,
}

impl Recolorer {
    pub fn new(b: f64, num_colors: usize, max_degree: usize) -> Result<Self, KernelError> {
        check_basis(b)?;
        if num_colors == 0 {
            return Err(KernelError::NoColors);
        }
        Ok(Recolorer {
            table: PowerTable::new(b, max_degree),
            counts: vec![0; num_colors],
            dist: vec![0.0; num_colors],
        })
    }

    /// Samples a new color for `v` against the colors in `colors`.
    #[inline]
    pub fn draw<R: Rng + ?Sized>(
        &mut self,
        g: &Graph,
        colors: &[usize],
        v: usize,
        rng: &mut R,
    ) -> usize {
        count_neighbor_colors(g, colors, v, &mut self.counts);
        self.table.distribution_into(&self.counts, &mut self.dist);
        sample_color(&self.dist, rng)
    }
}

fn check_basis(b: f64) -> Result<(), KernelError> {
    if b.is_finite() && b > 1.0 {
        Ok(())
    } else {
        Err(KernelError::BadBasis(b))
    }
}

pub fn basis_from_temperature(t: f64) -> Result<f64, KernelError> {
    if t.is_finite() && t > 0.0 {
        Ok((1.0 / t).exp())
    } else {
        Err(KernelError::BadTemperature(t))
    }
}

pub fn temperature_from_basis(b: f64) -> Result<f64, KernelError> {
    check_basis(b)?;
    Ok(1.0 / b.ln())
}

/// Both parameterizations of the recoloring distribution, kept consistent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureBasis {
    basis: f64,
    temperature: f64,
}

impl TemperatureBasis {
    pub fn from_basis(b: f64) -> Result<Self, KernelError> {
        Ok(TemperatureBasis {
            basis: b,
            temperature: temperature_from_basis(b)?,
        })
    }

    pub fn from_temperature(t: f64) -> Result<Self, KernelError> {
        Ok(TemperatureBasis {
            basis: basis_from_temperature(t)?,
            temperature: t,
        })
    }

    pub fn basis(&self) -> f64 {
        self.basis
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }
}

/// Indexable set of vertices with O(1) insert, remove and uniform pick.
#[derive(Debug, Clone)]
struct VertexSet {
    items: Vec<usize>,
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl VertexSet {
    fn new(n: usize) -> Self {
        VertexSet {
            items: Vec::new(),
            pos: vec![ABSENT; n],
        }
    }

    fn insert(&mut self, v: usize) {
        if self.pos[v] == ABSENT {
            self.pos[v] = self.items.len();
            self.items.push(v);
        }
    }

    fn remove(&mut self, v: usize) {
        let p = self.pos[v];
        if p != ABSENT {
            self.items.swap_remove(p);
            if let Some(&moved) = self.items.get(p) {
                self.pos[moved] = p;
            }
            self.pos[v] = ABSENT;
        }
    }
}

/// Outcome of a single recoloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub vertex: usize,
    pub old: usize,
    pub new: usize,
    /// `E - E' = S[old] - S[new]`.
    pub delta_e: i64,
}

/// Incrementally maintained bad-edge bookkeeping for one coloring.
#[derive(Debug, Clone)]
pub struct ConflictState {
    energy: usize,
    /// monochromatic edges incident to each vertex
    conflicts: Vec<u32>,
    bad: VertexSet,
}

impl ConflictState {
    pub fn new(g: &Graph, c: &Coloring) -> Self {
        let n = g.n();
        let mut conflicts = vec![0u32; n];
        let mut energy = 0;
        for (u, v) in g.edges() {
            if c.color(u) == c.color(v) {
                energy += 1;
                conflicts[u] += 1;
                conflicts[v] += 1;
            }
        }
        let mut bad = VertexSet::new(n);
        for v in (0..n).filter(|&v| conflicts[v] > 0) {
            bad.insert(v);
        }
        ConflictState {
            energy,
            conflicts,
            bad,
        }
    }

    pub fn energy(&self) -> usize {
        self.energy
    }

    pub fn is_bad(&self, v: usize) -> bool {
        self.conflicts[v] > 0
    }

    pub fn conflicts(&self, v: usize) -> u32 {
        self.conflicts[v]
    }

    /// Current bad vertices, in internal (history-dependent) order.
    pub fn bad_vertices(&self) -> &[usize] {
        &self.bad.items
    }

    pub fn bad_count(&self) -> usize {
        self.bad.items.len()
    }

    /// Uniformly random bad vertex, if any.
    pub fn random_bad<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        if self.bad.items.is_empty() {
            None
        } else {
            Some(self.bad.items[rng.random_range(0..self.bad.items.len())])
        }
    }

    /// Sets `v` to `new_color`, updating energy and bad vertices in
    /// O(deg v).
    pub fn recolor(&mut self, g: &Graph, c: &mut Coloring, v: usize, new_color: usize) -> Move {
        assert!(new_color < c.num_colors, "color {new_color} out of range");
        let old = c.colors[v];
        if old == new_color {
            return Move {
                vertex: v,
                old,
                new: new_color,
                delta_e: 0,
            };
        }
        let mut delta_e = 0i64;
        for &u in g.neighbors(v) {
            let cu = c.colors[u];
            if cu == old {
                delta_e += 1;
                self.conflicts[u] -= 1;
                self.conflicts[v] -= 1;
                if self.conflicts[u] == 0 {
                    self.bad.remove(u);
                }
            } else if cu == new_color {
                delta_e -= 1;
                self.conflicts[u] += 1;
                self.conflicts[v] += 1;
                self.bad.insert(u);
            }
        }
        if self.conflicts[v] > 0 {
            self.bad.insert(v);
        } else {
            self.bad.remove(v);
        }
        self.energy = (self.energy as i64 - delta_e) as usize;
        c.colors[v] = new_color;
        Move {
            vertex: v,
            old,
            new: new_color,
            delta_e,
        }
    }
}

/// Equal when energies, per-vertex conflict counts and bad *sets* agree;
/// the internal order of the bad list is ignored.
impl PartialEq for ConflictState {
    fn eq(&self, other: &Self) -> bool {
        let sorted = |s: &VertexSet| {
            let mut v = s.items.clone();
            v.sort_unstable();
            v
        };
        self.energy == other.energy
            && self.conflicts == other.conflicts
            && sorted(&self.bad) == sorted(&other.bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use crate::graphgen;
    use crate::seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn col(colors: &[usize], k: usize) -> Coloring {
        Coloring::new(colors.to_vec(), k).unwrap()
    }

    #[test]
    fn coloring_validation() {
        assert_eq!(
            Coloring::new(vec![0, 3], 3),
            Err(KernelError::ColorOutOfRange {
                vertex: 1,
                color: 3,
                num_colors: 3
            })
        );
        assert_eq!(Coloring::new(vec![], 0), Err(KernelError::NoColors));
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&named::complete(3), &col(&[0, 0, 0], 3)), 3);
        assert_eq!(energy(&named::path(3), &col(&[0, 0, 0], 3)), 2);
        let g = graphgen::generate_partite(30, 3, 0.4, 8).unwrap();
        let planted = Coloring::new(g.planted().unwrap().to_vec(), 3).unwrap();
        assert_eq!(energy(&g, &planted), 0);
    }

    #[test]
    fn neighbor_counts_examples() {
        let g = named::empty(4);
        assert_eq!(neighbor_color_counts(&g, &col(&[0, 1, 2, 0], 3), 2, 3), vec![0, 0, 0]);

        let star = named::star(3);
        let c = col(&[2, 0, 0, 1], 3);
        assert_eq!(neighbor_color_counts(&star, &c, 0, 3), vec![2, 1, 0]);

        let g = graphgen::generate_partite(9, 3, 1.0, 0).unwrap();
        let planted = Coloring::new(g.planted().unwrap().to_vec(), 3).unwrap();
        for v in 0..9 {
            let s = neighbor_color_counts(&g, &planted, v, 3);
            for (i, &si) in s.iter().enumerate() {
                assert_eq!(si, if i == planted.color(v) { 0 } else { 3 });
            }
        }
    }

    #[test]
    fn distribution_examples() {
        let p = color_distribution(&[2, 0, 1], 4.0).unwrap();
        let want = [1.0 / 21.0, 16.0 / 21.0, 4.0 / 21.0];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let p = color_distribution(&[0, 0, 0], 7.5).unwrap();
        assert!(p.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-12));
        let p = color_distribution(&[5, 5, 6], 4.0).unwrap();
        let want = [4.0 / 9.0, 4.0 / 9.0, 1.0 / 9.0];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn distribution_errors() {
        assert_eq!(color_distribution(&[], 4.0), Err(KernelError::EmptyCounts));
        assert_eq!(color_distribution(&[1], 1.0), Err(KernelError::BadBasis(1.0)));
        assert!(color_distribution(&[1], f64::INFINITY).is_err());
    }

    #[test]
    fn high_degree_does_not_underflow() {
        let p = color_distribution(&[900, 1000, 950], 10.0).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((p[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_samples() {
        let mut rng = seed::rng_from(1);
        for _ in 0..1000 {
            assert_eq!(sample_color(&[1.0, 0.0, 0.0], &mut rng), 0);
            assert_eq!(sample_color(&[0.0, 1.0], &mut rng), 1);
        }
    }

    #[test]
    fn sample_frequencies() {
        let dist = [1.0 / 21.0, 16.0 / 21.0, 4.0 / 21.0];
        let mut rng = seed::rng_from(2024);
        let mut hits = [0usize; 3];
        let draws = 100_000;
        for _ in 0..draws {
            hits[sample_color(&dist, &mut rng)] += 1;
        }
        for (h, p) in hits.iter().zip(dist) {
            assert!((*h as f64 / draws as f64 - p).abs() < 0.01);
        }
    }

    #[test]
    fn temperature_basis_examples() {
        let t = temperature_from_basis(4.0).unwrap();
        assert!((t - 0.7213475204444817).abs() < 1e-12);
        assert!((t - 0.72).abs() < 0.005);
        assert!((basis_from_temperature(1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        for b in [1.5, 2.0, 4.0, 10.0, 1e3] {
            let back = basis_from_temperature(temperature_from_basis(b).unwrap()).unwrap();
            assert!((back - b).abs() / b < 1e-12);
        }
        assert!(basis_from_temperature(0.0).is_err());
        assert!(basis_from_temperature(-1.0).is_err());
        assert!(temperature_from_basis(0.5).is_err());
        let tb = TemperatureBasis::from_temperature(0.5).unwrap();
        assert!((tb.basis() - (2.0f64).exp()).abs() < 1e-12);
        let tb = TemperatureBasis::from_basis(4.0).unwrap();
        assert!(((1.0 / tb.temperature()).exp() - 4.0).abs() / 4.0 < 1e-12);
    }

    #[test]
    fn recolor_examples() {
        let g = named::complete(3);
        let mut c = col(&[0, 0, 0], 3);
        let mut st = ConflictState::new(&g, &c);
        assert_eq!(st.energy(), 3);
        let same = st.recolor(&g, &mut c, 1, 0);
        assert_eq!(same.delta_e, 0);
        assert_eq!(st.energy(), 3);
        let mv = st.recolor(&g, &mut c, 0, 1);
        assert_eq!(mv.delta_e, 2);
        assert_eq!((mv.old, mv.new), (0, 1));
        assert_eq!(st.energy(), 1);
        assert!(!st.is_bad(0));
        assert_eq!(st.bad_count(), 2);
        assert_eq!(st, ConflictState::new(&g, &c));
    }

    #[test]
    fn recolorer_matches_public_ops() {
        let g = graphgen::generate_partite(40, 3, 0.3, 4).unwrap();
        let mut rng = seed::rng_from(5);
        let c = Coloring::uniform(g.n(), 4, &mut rng);
        let mut rec = Recolorer::new(3.5, 4, g.max_degree()).unwrap();
        for v in 0..g.n() {
            let mut r1 = seed::rng_from(v as u64);
            let mut r2 = seed::rng_from(v as u64);
            let s = neighbor_color_counts(&g, &c, v, 4);
            let want = sample_color(&color_distribution(&s, 3.5).unwrap(), &mut r1);
            assert_eq!(rec.draw(&g, c.as_slice(), v, &mut r2), want);
        }
    }

    #[test]
    fn coloring_text_roundtrip() {
        let c = col(&[0, 2, 1, 1], 3);
        assert_eq!(c.to_text(), "3\n0\n2\n1\n1\n");
        assert_eq!(Coloring::from_text(&c.to_text()).unwrap(), c);
        assert!(Coloring::from_text("2\n0\n5\n").is_err());
        assert!(Coloring::from_text("").is_err());
    }

    proptest! {
        #[test]
        fn shift_invariance(s in prop::collection::vec(0u32..40, 1..8), shift in 0u32..500, b in 1.01f64..20.0) {
            let a = color_distribution(&s, b).unwrap();
            let shifted: Vec<u32> = s.iter().map(|x| x + shift).collect();
            let c = color_distribution(&shifted, b).unwrap();
            for (x, y) in a.iter().zip(&c) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn monotone_in_counts(s in prop::collection::vec(0u32..12, 2..8), b in 1.01f64..20.0) {
            let p = color_distribution(&s, b).unwrap();
            for i in 0..s.len() {
                for j in 0..s.len() {
                    if s[i] < s[j] {
                        prop_assert!(p[i] > p[j]);
                    }
                }
            }
        }

        #[test]
        fn zero_energy_iff_no_bad_vertices(seed in any::<u64>(), k in 2usize..5) {
            let g = graphgen::generate_partite(25, 3, 0.25, seed).unwrap();
            let mut rng = seed::rng_from(seed ^ 1);
            let c = Coloring::uniform(g.n(), k, &mut rng);
            let st = ConflictState::new(&g, &c);
            prop_assert_eq!(st.energy(), energy(&g, &c));
            prop_assert_eq!(st.energy() == 0, st.bad_count() == 0);
            for v in 0..g.n() {
                let has_twin = g.neighbors(v).iter().any(|&u| c.color(u) == c.color(v));
                prop_assert_eq!(st.is_bad(v), has_twin);
            }
        }

        #[test]
        fn incremental_matches_recount(seed in any::<u64>(), moves in 1usize..300) {
            let g = graphgen::generate_partite(40, 3, 0.2, seed).unwrap();
            let mut rng = seed::rng_from(seed);
            let mut c = Coloring::uniform(g.n(), 3, &mut rng);
            let mut st = ConflictState::new(&g, &c);
            for _ in 0..moves {
                let v = rng.random_range(0..g.n());
                let new = rng.random_range(0..3);
                let s = neighbor_color_counts(&g, &c, v, 3);
                let before = st.energy() as i64;
                let mv = st.recolor(&g, &mut c, v, new);
                prop_assert_eq!(mv.delta_e, s[mv.old] as i64 - s[new] as i64);
                prop_assert_eq!(before - mv.delta_e, st.energy() as i64);
                prop_assert_eq!(&st, &ConflictState::new(&g, &c));
            }
        }
    }
}
