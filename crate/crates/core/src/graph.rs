//! Undirected weighted graphs, Laplacians, the degree-based spectral bound
//! and seeded random graph generators.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Generators resample at most this many times before giving up.
pub const MAX_CONNECT_ATTEMPTS: usize = 100;

/// Finite, undirected, weighted graph with an optional coordinate per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    weights: DMatrix<f64>,
    coords: Option<Vec<Vec<f64>>>,
}

impl WeightedGraph {
    /// Builds a graph from an undirected edge list. Each unordered pair may
    /// appear at most once; zero-weight edges are accepted and ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Size("graph needs at least one vertex".into()));
        }
        let mut w = DMatrix::zeros(n, n);
        let mut seen = DMatrix::from_element(n, n, false);
        for &(i, j, wt) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) out of range for {n} vertices"
                )));
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("self loop at vertex {i}")));
            }
            if !wt.is_finite() || wt < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) has invalid weight {wt}"
                )));
            }
            if seen[(i, j)] {
                return Err(Error::InvalidParameter(format!("duplicate edge ({i}, {j})")));
            }
            seen[(i, j)] = true;
            seen[(j, i)] = true;
            w[(i, j)] = wt;
            w[(j, i)] = wt;
        }
        Ok(WeightedGraph {
            weights: w,
            coords: None,
        })
    }

    /// Builds a graph from a dense weight matrix, checking symmetry, a zero
    /// diagonal and finite nonnegative entries.
    pub fn from_weights(weights: DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        if n == 0 || weights.ncols() != n {
            return Err(Error::dimension(
                "non-empty square weight matrix",
                format!("{}x{}", weights.nrows(), weights.ncols()),
            ));
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "nonzero diagonal weight at vertex {i}"
                )));
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "weight ({i}, {j}) = {w} is not finite and nonnegative"
                    )));
                }
                if w != weights[(j, i)] {
                    return Err(Error::InvalidParameter(format!(
                        "weights ({i}, {j}) and ({j}, {i}) differ"
                    )));
                }
            }
        }
        Ok(WeightedGraph {
            weights,
            coords: None,
        })
    }

    pub fn with_coords(mut self, coords: Vec<Vec<f64>>) -> Result<Self> {
        if coords.len() != self.n_vertices() {
            return Err(Error::dimension(
                format!("{} coordinates", self.n_vertices()),
                coords.len(),
            ));
        }
        if coords.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coordinate".into()));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn n_vertices(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.weights.row_iter().map(|r| r.sum()).collect()
    }

    /// Edges with positive weight, each listed once with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n_vertices();
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..j {
                let w = self.weights[(i, j)];
                if w > 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.weights
            .column(i)
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, _)| j)
            .collect::<Vec<_>>()
            .into_iter()
    }

    /// Breadth-first hop distances from `src`; `None` marks unreachable vertices.
    pub fn hop_distances(&self, src: usize) -> Vec<Option<usize>> {
        let n = self.n_vertices();
        let mut dist = vec![None; n];
        let mut queue = VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.hop_distances(0).iter().all(Option::is_some)
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }
}

/// Combinatorial Laplacian `Diag(W 1) - W`.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    matrix: DMatrix<f64>,
}

impl Laplacian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Wraps an arbitrary symmetric matrix, e.g. for eigendecomposition tests.
    pub fn from_symmetric(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(Error::dimension("square matrix", format!("{}x{}", n, matrix.ncols())));
        }
        if (0..n).any(|i| (0..n).any(|j| matrix[(i, j)] != matrix[(j, i)])) {
            return Err(Error::InvalidParameter("matrix is not symmetric".into()));
        }
        Ok(Laplacian { matrix })
    }
}

pub fn build_laplacian(g: &WeightedGraph) -> Laplacian {
    let mut l = -g.weights.clone();
    for (i, d) in g.degrees().into_iter().enumerate() {
        l[(i, i)] = d;
    }
    Laplacian { matrix: l }
}

/// Degree-based upper bound on the largest Laplacian eigenvalue:
/// `max_i sqrt(2 d_i (d_i + d'_i))` with `d'_i = (sum_j w_ij d_j) / d_i`.
pub fn rho_bound(g: &WeightedGraph) -> Result<f64> {
    let d = g.degrees();
    if let Some(vertex) = d.iter().position(|&di| di <= 0.0) {
        return Err(Error::IsolatedVertex { vertex });
    }
    let n = g.n_vertices();
    let rho = (0..n)
        .map(|i| {
            let avg: f64 = (0..n).map(|j| g.weights[(i, j)] * d[j]).sum::<f64>() / d[i];
            (2.0 * d[i] * (d[i] + avg)).sqrt()
        })
        .fold(0.0_f64, f64::max);
    Ok(rho)
}

/// Erdős–Rényi `G(n, p)` with unit weights, resampled until connected.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<WeightedGraph> {
    if n == 0 {
        return Err(Error::Size("n must be positive".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} not in (0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..MAX_CONNECT_ATTEMPTS {
        let mut w = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..j {
                if rng.random_bool(p) {
                    w[(i, j)] = 1.0;
                    w[(j, i)] = 1.0;
                }
            }
        }
        let g = WeightedGraph {
            weights: w,
            coords: None,
        };
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Connectivity {
        attempts: MAX_CONNECT_ATTEMPTS,
    })
}

/// Watts–Strogatz small world: ring lattice where each vertex links to its
/// `k_ring / 2` successors, then every lattice edge `(i, i + s)` is rewired to
/// `(i, u)` with probability `beta`, `u` uniform over admissible targets.
/// Rewiring keeps the edge count at `n * k_ring / 2`.
pub fn gen_watts_strogatz(n: usize, k_ring: usize, beta: f64, seed: u64) -> Result<WeightedGraph> {
    if k_ring == 0 || k_ring % 2 != 0 || k_ring >= n {
        return Err(Error::InvalidParameter(format!(
            "k_ring = {k_ring} must be even, positive and below n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("beta = {beta} not in [0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    let half = k_ring / 2;
    for _ in 0..MAX_CONNECT_ATTEMPTS {
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for s in 1..=half {
                let j = (i + s) % n;
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
        for s in 1..=half {
            for i in 0..n {
                let j = (i + s) % n;
                if !adj[i][j] || !rng.random_bool(beta) {
                    continue;
                }
                let targets: Vec<usize> = (0..n).filter(|&u| u != i && !adj[i][u]).collect();
                if let Some(&u) = targets.choose(&mut rng) {
                    adj[i][j] = false;
                    adj[j][i] = false;
                    adj[i][u] = true;
                    adj[u][i] = true;
                }
            }
        }
        let w = DMatrix::from_fn(n, n, |i, j| if adj[i][j] { 1.0 } else { 0.0 });
        let g = WeightedGraph {
            weights: w,
            coords: None,
        };
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Connectivity {
        attempts: MAX_CONNECT_ATTEMPTS,
    })
}

/// Unit-weight cycle on `m` vertices, the graph model of periodic time.
pub fn cycle_graph(m: usize) -> Result<WeightedGraph> {
    if m < 3 {
        return Err(Error::Size(format!("cycle needs m >= 3, got {m}")));
    }
    let edges: Vec<_> = (0..m).map(|i| (i, (i + 1) % m, 1.0)).collect();
    WeightedGraph::from_edges(m, &edges)
}
