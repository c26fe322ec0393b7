//! Exact references for small instances: backtracking colorability and
//! exhaustive minimum energy.

use thiserror::Error;

use crate::graph::Graph;
use crate::kernel::Coloring;

/// Vertex limit for [`brute_force_colorable`].
pub const MAX_BACKTRACK_VERTICES: usize = 24;
/// Limit on `k^n` for [`min_energy_exhaustive`].
pub const MAX_ENUMERATION: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for the exact oracle: {0}")]
    TooLarge(String),
    #[error("k must be at least 1")]
    NoColors,
}

/// Decides whether `g` has a proper `k`-coloring; returns a witness if so.
///
/// Backtracking over vertices in descending degree order with forward
/// checking on per-vertex color domains. A vertex may only open one new
/// color beyond those already used, which removes color permutations.
pub fn brute_force_colorable(g: &Graph, k: usize) -> Result<Option<Coloring>, OracleError> {
    let n = g.n();
    if n > MAX_BACKTRACK_VERTICES {
        return Err(OracleError::TooLarge(format!(
            "{n} vertices, limit {MAX_BACKTRACK_VERTICES}"
        )));
    }
    if k == 0 {
        return Err(OracleError::NoColors);
    }
    if k >= n {
        let c = Coloring::new((0..n).collect(), k.max(1)).expect("distinct colors below k");
        return Ok(Some(c));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let full: u32 = (1u32 << k) - 1;
    let mut search = Backtrack {
        g,
        order,
        domains: vec![full; n],
        colors: vec![usize::MAX; n],
        k,
    };
    if search.assign(0, 0) {
        let c = Coloring::new(search.colors, k).expect("all vertices colored below k");
        Ok(Some(c))
    } else {
        Ok(None)
    }
}

struct Backtrack<'a> {
    g: &'a Graph,
    order: Vec<usize>,
    domains: Vec<u32>,
    colors: Vec<usize>,
    k: usize,
}

impl Backtrack<'_> {
    fn assign(&mut self, depth: usize, used: usize) -> bool {
        let Some(&v) = self.order.get(depth) else {
            return true;
        };
        let limit = (used + 1).min(self.k);
        for c in 0..limit {
            let bit = 1u32 << c;
            if self.domains[v] & bit == 0 {
                continue;
            }
            let mut pruned = Vec::new();
            let mut wiped = false;
            for &u in self.g.neighbors(v) {
                if self.colors[u] == usize::MAX && self.domains[u] & bit != 0 {
                    self.domains[u] &= !bit;
                    pruned.push(u);
                    if self.domains[u] == 0 {
                        wiped = true;
                        break;
                    }
                }
            }
            if !wiped {
                self.colors[v] = c;
                if self.assign(depth + 1, used.max(c + 1)) {
                    return true;
                }
                self.colors[v] = usize::MAX;
            }
            for u in pruned {
                self.domains[u] |= bit;
            }
        }
        false
    }
}

/// Minimum number of monochromatic edges over all `k^n` colorings.
pub fn min_energy_exhaustive(g: &Graph, k: usize) -> Result<usize, OracleError> {
    let n = g.n();
    if k == 0 {
        return Err(OracleError::NoColors);
    }
    let total = (k as u64).checked_pow(n as u32).filter(|&t| t <= MAX_ENUMERATION);
    if total.is_none() {
        return Err(OracleError::TooLarge(format!(
            "{k}^{n} colorings exceed {MAX_ENUMERATION}"
        )));
    }
    if n == 0 || g.m() == 0 {
        return Ok(0);
    }

    // Odometer over all colorings with vertex n-1 pinned to color 0 (colors
    // are interchangeable). Energy is updated incrementally per digit change.
    let mut colors = vec![0usize; n];
    let mut e = g.m();
    let mut best = e;
    let free = n - 1;
    loop {
        let mut i = 0;
        loop {
            if i == free {
                return Ok(best);
            }
            let old = colors[i];
            let new = (old + 1) % k;
            for &u in g.neighbors(i) {
                if colors[u] == old {
                    e -= 1;
                }
                if colors[u] == new {
                    e += 1;
                }
            }
            colors[i] = new;
            if new != 0 {
                break;
            }
            i += 1;
        }
        best = best.min(e);
        if best == 0 {
            return Ok(0);
        }
    }
}
