//! Planted k-colorable random graph families.
//!
//! * `G(n, k, p)`: vertices split into `k` near-equal partitions, every pair
//!   of vertices from distinct partitions joined independently with
//!   probability `p`.
//! * `R(n, k, d)`: the same partitions, every vertex of degree exactly `d`,
//!   no edge inside a partition. Built greedily in random vertex order and
//!   finished by an edge-swap repair.
//!
//! In both cases the planted partition is a proper `k`-coloring.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::graph::{Graph, GraphError};
use crate::seed;

/// Partition label of every vertex. Vertices are assigned in contiguous
/// blocks; when `k` does not divide `n` the first `n mod k` blocks get one
/// extra vertex.
pub fn partition_labels(n: usize, k: usize) -> Vec<usize> {
    partition_sizes(n, k)
        .into_iter()
        .enumerate()
        .flat_map(|(label, size)| std::iter::repeat_n(label, size))
        .collect()
}

pub fn partition_sizes(n: usize, k: usize) -> Vec<usize> {
    let (base, extra) = (n / k, n % k);
    (0..k).map(|i| base + usize::from(i < extra)).collect()
}

fn check_nk(n: usize, k: usize) -> Result<(), GraphError> {
    if k < 2 {
        return Err(GraphError::InvalidParameter(format!("k = {k}, need k >= 2")));
    }
    if k > n {
        return Err(GraphError::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    Ok(())
}

/// Samples `G(n, k, p)`.
pub fn generate_partite(n: usize, k: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    check_nk(n, k)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let labels = partition_labels(n, k);
    let mut rng = seed::rng_from(seed);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if labels[u] != labels[v] && rng.random_bool(p) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    // pushes happen in increasing (u, v) order, so every list is already sorted
    Graph::from_sorted_adjacency(adj).with_planted(labels, k)
}

/// Largest degree a vertex can have without an intra-partition edge.
pub fn max_cross_degree(n: usize, k: usize) -> usize {
    n - n.div_ceil(k)
}

/// Checks that a `d`-regular graph on the planted partitions can exist.
///
/// Requires `d <= n - ceil(n/k)`, `n d` even and, for `d > 0`, no partition
/// larger than `n / 2`. When `k` does not divide `n` and `d` is the maximum,
/// the larger partitions are joined to every outside vertex, so at least two
/// smaller partitions are needed to absorb the remaining degree.
pub fn check_regular(n: usize, k: usize, d: usize) -> Result<(), GraphError> {
    check_nk(n, k)?;
    let cap = max_cross_degree(n, k);
    if d > cap {
        return Err(GraphError::Infeasible(format!(
            "degree {d} exceeds the cross-partition maximum {cap} for n = {n}, k = {k}"
        )));
    }
    if n * d % 2 == 1 {
        return Err(GraphError::Infeasible(format!("n * d = {} is odd", n * d)));
    }
    let largest = n.div_ceil(k);
    if d > 0 && 2 * largest > n {
        return Err(GraphError::Infeasible(format!(
            "partition of {largest} vertices exceeds half of n = {n}"
        )));
    }
    let smaller = k - n % k;
    if !n.is_multiple_of(k) && d > 0 && d == cap && smaller < 2 {
        return Err(GraphError::Infeasible(format!(
            "degree {d} would force the smallest partition above degree {d}"
        )));
    }
    Ok(())
}

/// Samples `R(n, k, d)`.
pub fn generate_regular(n: usize, k: usize, d: usize, seed: u64) -> Result<Graph, GraphError> {
    check_regular(n, k, d)?;

    let labels = partition_labels(n, k);
    let mut rng = seed::rng_from(seed);
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * d / 2);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for &u in &order {
        if adj[u].len() >= d {
            continue;
        }
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&w| labels[w] != labels[u] && adj[w].len() < d && !adj[u].contains(&w))
            .collect();
        while adj[u].len() < d && !candidates.is_empty() {
            let w = candidates.swap_remove(rng.random_range(0..candidates.len()));
            adj[u].push(w);
            adj[w].push(u);
            edges.push((u, w));
        }
    }

    // Repair: while vertices u, v have spare degree, delete some edge u'v'
    // and add uu' and vv' (u == v allowed when u is short by two or more).
    // Every other attempt instead deletes an edge xy and adds ux, handing
    // u's missing degree to y.
    let limit = 50 * n * d;
    let mut attempts = 0usize;
    loop {
        let deficient: Vec<usize> = (0..n).filter(|&v| adj[v].len() < d).collect();
        if deficient.is_empty() {
            break;
        }
        if attempts >= limit {
            return Err(GraphError::RepairFailed { attempts });
        }
        attempts += 1;

        let u = deficient[rng.random_range(0..deficient.len())];
        let v = deficient[rng.random_range(0..deficient.len())];
        if u != v && labels[u] != labels[v] && !adj[u].contains(&v) {
            adj[u].push(v);
            adj[v].push(u);
            edges.push((u, v));
            continue;
        }
        if edges.is_empty() {
            continue;
        }
        let idx = rng.random_range(0..edges.len());
        let (a, b) = edges[idx];
        let (u2, v2) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
        let usable = |w: usize, x: usize, adj: &[Vec<usize>]| {
            w != x && labels[w] != labels[x] && !adj[w].contains(&x)
        };

        if rng.random_bool(0.5) {
            if u2 == u || v2 == u || !usable(u, u2, &adj) {
                continue;
            }
            edges.swap_remove(idx);
            remove_neighbor(&mut adj[u2], v2);
            remove_neighbor(&mut adj[v2], u2);
            adj[u].push(u2);
            adj[u2].push(u);
            edges.push((u, u2));
            continue;
        }

        if u == v && d - adj[u].len() < 2 {
            continue;
        }
        let ok = ![u, v].contains(&u2)
            && ![u, v].contains(&v2)
            && usable(u, u2, &adj)
            && usable(v, v2, &adj);
        if !ok {
            continue;
        }
        edges.swap_remove(idx);
        remove_neighbor(&mut adj[u2], v2);
        remove_neighbor(&mut adj[v2], u2);
        adj[u].push(u2);
        adj[u2].push(u);
        adj[v].push(v2);
        adj[v2].push(v);
        edges.push((u, u2));
        edges.push((v, v2));
    }

    for list in &mut adj {
        list.sort_unstable();
    }
    Graph::from_sorted_adjacency(adj).with_planted(labels, k)
}

fn remove_neighbor(list: &mut Vec<usize>, x: usize) {
    let pos = list.iter().position(|&y| y == x).expect("edge endpoints are adjacent");
    list.swap_remove(pos);
}

/// Expected average degree `n p (k - 1) / k` of `G(n, k, p)`.
pub fn expected_average_degree(n: usize, k: usize, p: f64) -> f64 {
    n as f64 * p * (k as f64 - 1.0) / k as f64
}

/// Edge probability giving expected average degree `dbar`.
pub fn degree_to_p(n: usize, k: usize, dbar: f64) -> Result<f64, GraphError> {
    check_nk(n, k)?;
    if dbar.is_nan() || dbar < 0.0 {
        return Err(GraphError::InvalidParameter(format!("average degree {dbar} is negative")));
    }
    let p = dbar * k as f64 / (n as f64 * (k as f64 - 1.0));
    if p > 1.0 {
        return Err(GraphError::Infeasible(format!(
            "average degree {dbar} needs p = {p} > 1 for n = {n}, k = {k}"
        )));
    }
    Ok(p)
}
