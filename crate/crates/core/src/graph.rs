//! Immutable undirected simple graph with optional planted partition labels,
//! plus the plain-text edge-list format.
//!
//! File layout:
//!
//! ```text
//! n m k_planted
//! labels l0 l1 ... l(n-1)      (only when k_planted > 0)
//! u v                          (m lines, 0-based, u < v)
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("planted labels: {0}")]
    BadLabels(String),
    #[error("edge {0} {1} joins two vertices of the same planted partition")]
    PlantedConflict(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("regular graph repair gave up after {attempts} candidate swaps")]
    RepairFailed { attempts: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Undirected simple graph in compressed adjacency form.
///
/// Neighbor lists are sorted. Once built, a graph never changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    planted: Option<Vec<usize>>,
    k_planted: Option<usize>,
}

impl Graph {
    /// Builds a graph from an edge list. Endpoint order within a pair is
    /// irrelevant; self-loops and repeated pairs are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Self::from_sorted_adjacency(adj))
    }

    /// Caller guarantees a symmetric, loop-free, duplicate-free adjacency.
    pub(crate) fn from_sorted_adjacency(adj: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        for list in adj {
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        Graph {
            offsets,
            targets,
            planted: None,
            k_planted: None,
        }
    }

    /// Attaches planted partition labels in `0..k`. Fails if any edge lies
    /// inside a partition.
    pub fn with_planted(mut self, labels: Vec<usize>, k: usize) -> Result<Self, GraphError> {
        if labels.len() != self.n() {
            return Err(GraphError::BadLabels(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n()
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= k) {
            return Err(GraphError::BadLabels(format!("label {l} not below k = {k}")));
        }
        for (u, v) in self.edges() {
            if labels[u] == labels[v] {
                return Err(GraphError::PlantedConflict(u, v));
            }
        }
        self.planted = Some(labels);
        self.k_planted = Some(k);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn planted(&self) -> Option<&[usize]> {
        self.planted.as_deref()
    }

    pub fn k_planted(&self) -> Option<usize> {
        self.k_planted
    }

    /// Realized average degree `2m / n` (0 for the empty graph).
    pub fn average_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.m() as f64 / self.n() as f64
        }
    }

    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for v in 0..self.n() {
            *hist.entry(self.degree(v)).or_insert(0) += 1;
        }
        hist
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.n(), self.m(), self.k_planted.unwrap_or(0));
        if let Some(labels) = &self.planted {
            out.push_str("labels");
            for l in labels {
                let _ = write!(out, " {l}");
            }
            out.push('\n');
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), GraphError> {
        w.write_all(self.to_edge_list_string().as_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self, GraphError> {
        let reader = BufReader::new(r);
        let mut lines = reader
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| match l {
                Ok(s) => {
                    let t = s.trim();
                    !t.is_empty() && !t.starts_with('#')
                }
                Err(_) => true,
            });

        let (hline, header) = match lines.next() {
            Some((i, l)) => (i, l?),
            None => return Err(GraphError::Parse { line: 0, msg: "empty file".into() }),
        };
        let fields = parse_usizes(&header, hline)?;
        let [n, m, k] = fields[..] else {
            return Err(GraphError::Parse {
                line: hline,
                msg: format!("header needs `n m k_planted`, got {} fields", fields.len()),
            });
        };

        let mut labels = None;
        let mut edges = Vec::with_capacity(m);
        for (i, line) in lines {
            let line = line?;
            let t = line.trim();
            if let Some(rest) = t.strip_prefix("labels") {
                if labels.is_some() || !edges.is_empty() {
                    return Err(GraphError::Parse {
                        line: i,
                        msg: "labels line must directly follow the header".into(),
                    });
                }
                labels = Some(parse_usizes(rest, i)?);
                continue;
            }
            let f = parse_usizes(t, i)?;
            let [u, v] = f[..] else {
                return Err(GraphError::Parse {
                    line: i,
                    msg: format!("edge line needs two vertex ids, got {}", f.len()),
                });
            };
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: hline,
                msg: format!("header declares {m} edges, file has {}", edges.len()),
            });
        }
        let g = Graph::from_edges(n, &edges)?;
        match (labels, k) {
            (Some(l), k) if k > 0 => g.with_planted(l, k),
            (None, 0) => Ok(g),
            (Some(_), _) => Err(GraphError::BadLabels("labels present but k_planted = 0".into())),
            (None, _) => Err(GraphError::BadLabels(format!("k_planted = {k} but no labels line"))),
        }
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<(), GraphError> {
        std::fs::write(path, self.to_edge_list_string())?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

fn parse_usizes(s: &str, line: usize) -> Result<Vec<usize>, GraphError> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| GraphError::Parse {
                line,
                msg: format!("expected a non-negative integer, got `{tok}`"),
            })
        })
        .collect()
}

/// Small named graphs used in tests and examples.
pub mod named {
    use super::Graph;

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::from_edges(n, &edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Graph::from_edges(n, &edges).expect("cycle of length >= 3 is simple")
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|u| (u - 1, u)).collect();
        Graph::from_edges(n, &edges).expect("path is simple")
    }

    pub fn empty(n: usize) -> Graph {
        Graph::from_edges(n, &[]).expect("edgeless graph")
    }

    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Graph::from_edges(leaves + 1, &edges).expect("star is simple")
    }

    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        Graph::from_edges(10, &edges).expect("petersen graph is simple")
    }
}
