//! Edge-ordered biregular bipartite graphs, their second singular value, and
//! the (m+2)-part graph underlying the multilevel constructions.
//!
//! Edge ordering is canonical everywhere: level-major, then left vertex,
//! then local index. Codewords laid out on edges are therefore
//! byte-reproducible for a fixed seed.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    DegreeExceedsSize { n: usize, degree: usize },
    /// Matching or expander resampling hit its retry cap.
    RetriesExhausted(String),
    /// Power iteration did not settle within its iteration cap.
    NonConvergence,
    BadShape(String),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::DegreeExceedsSize { n, degree } => {
                write!(f, "degree {degree} exceeds side size {n}")
            }
            GraphError::RetriesExhausted(s) => write!(f, "resampling retries exhausted: {s}"),
            GraphError::NonConvergence => write!(f, "eigenvalue iteration did not converge"),
            GraphError::BadShape(s) => write!(f, "bad graph shape: {s}"),
        }
    }
}

impl std::error::Error for GraphError {}

/// A `degree`-biregular bipartite graph on `n + n` vertices with a global
/// edge order (edge `v * degree + j` is the j-th edge of left vertex v).
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    n: usize,
    degree: usize,
    /// Right endpoint of each edge, indexed by edge id.
    right_of: Vec<u32>,
    /// Edge ids at each right vertex, ascending.
    right_edges: Vec<Vec<u32>>,
    /// Measured second-largest singular value of the biadjacency matrix.
    lambda: f64,
}

pub const EIGEN_TOL: f64 = 1e-9;

impl BipartiteGraph {
    /// Builds the graph from per-left-vertex neighbor lists (each of length
    /// `degree`, giving the local edge order) and measures lambda.
    pub fn from_neighbors(
        n: usize,
        degree: usize,
        neighbors: &[Vec<u32>],
    ) -> Result<Self, GraphError> {
        if neighbors.len() != n {
            return Err(GraphError::BadShape(format!(
                "{} neighbor lists for n={n}",
                neighbors.len()
            )));
        }
        let mut right_of = Vec::with_capacity(n * degree);
        let mut right_edges = vec![Vec::with_capacity(degree); n];
        let mut right_deg = vec![0usize; n];
        for (v, nb) in neighbors.iter().enumerate() {
            if nb.len() != degree {
                return Err(GraphError::BadShape(format!(
                    "left vertex {v} has degree {}",
                    nb.len()
                )));
            }
            for (j, &w) in nb.iter().enumerate() {
                if w as usize >= n {
                    return Err(GraphError::BadShape(format!("right vertex {w} out of range")));
                }
                let edge = (v * degree + j) as u32;
                right_of.push(w);
                right_edges[w as usize].push(edge);
                right_deg[w as usize] += 1;
            }
        }
        if right_deg.iter().any(|&d| d != degree) {
            return Err(GraphError::BadShape("right side is not regular".into()));
        }
        let mut g = BipartiteGraph { n, degree, right_of, right_edges, lambda: 0.0 };
        g.lambda = second_eigenvalue(&g, EIGEN_TOL)?;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.degree
    }

    /// Second-largest singular value measured at construction.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Right endpoint of an edge.
    pub fn right_of(&self, edge: usize) -> usize {
        self.right_of[edge] as usize
    }

    pub fn left_of(&self, edge: usize) -> usize {
        edge / self.degree
    }

    /// Edge ids incident to a left vertex, in local order.
    pub fn left_edges(&self, v: usize) -> std::ops::Range<usize> {
        v * self.degree..(v + 1) * self.degree
    }

    /// Edge ids incident to a right vertex, ascending.
    pub fn right_edges(&self, w: usize) -> &[u32] {
        &self.right_edges[w]
    }

    pub fn has_edge(&self, v: usize, w: usize) -> bool {
        self.left_edges(v).any(|e| self.right_of(e) == w)
    }
}

/// Samples a `degree`-biregular graph as a union of `degree` uniformly
/// random perfect matchings, resampling any matching that collides with an
/// already-placed edge. `degree == n` is forced to the complete graph (the
/// only option, and the one collision resampling cannot reach).
pub fn random_biregular<R: Rng>(
    n: usize,
    degree: usize,
    rng: &mut R,
) -> Result<BipartiteGraph, GraphError> {
    if degree == 0 || n == 0 {
        return Err(GraphError::BadShape("empty side or degree".into()));
    }
    if degree > n {
        return Err(GraphError::DegreeExceedsSize { n, degree });
    }
    if degree == n {
        let neighbors: Vec<Vec<u32>> = (0..n).map(|_| (0..n as u32).collect()).collect();
        return BipartiteGraph::from_neighbors(n, degree, &neighbors);
    }
    const MATCHING_RETRIES: usize = 100_000;
    let mut used: Vec<Vec<bool>> = vec![vec![false; n]; n];
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::with_capacity(degree); n];
    let mut perm: Vec<u32> = (0..n as u32).collect();
    for _ in 0..degree {
        let mut placed = false;
        for _ in 0..MATCHING_RETRIES {
            perm.shuffle(rng);
            if perm.iter().enumerate().all(|(v, &w)| !used[v][w as usize]) {
                for (v, &w) in perm.iter().enumerate() {
                    used[v][w as usize] = true;
                    neighbors[v].push(w);
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(GraphError::RetriesExhausted(format!(
                "no collision-free matching after {MATCHING_RETRIES} samples (n={n}, degree={degree})"
            )));
        }
    }
    BipartiteGraph::from_neighbors(n, degree, &neighbors)
}

/// Second-largest singular value of the biadjacency matrix, by power
/// iteration on `B B^T` with the all-ones direction (the top singular
/// vector of a biregular graph) deflated each step.
pub fn second_eigenvalue(g: &BipartiteGraph, tol: f64) -> Result<f64, GraphError> {
    assert!(tol > 0.0);
    let n = g.n();
    if n == 1 {
        return Ok(0.0);
    }
    // deterministic pseudo-random start; centered and normalized below
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let mut z = (i as u64).wrapping_add(0x9e3779b97f4a7c15);
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            ((z >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
        .collect();
    center(&mut v);
    if normalize(&mut v) == 0.0 {
        return Ok(0.0);
    }
    let mut hub = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    let mut prev_sigma = f64::INFINITY;
    let mut stable = 0;
    const MAX_ITERS: usize = 500_000;
    for _ in 0..MAX_ITERS {
        // next = B B^T v, two sweeps over the edges
        hub.fill(0.0);
        for e in 0..g.edge_count() {
            hub[g.right_of(e)] += v[g.left_of(e)];
        }
        next.fill(0.0);
        for e in 0..g.edge_count() {
            next[g.left_of(e)] += hub[g.right_of(e)];
        }
        center(&mut next);
        // Rayleigh quotient with unit v estimates lambda^2
        let rq: f64 = v.iter().zip(&next).map(|(a, b)| a * b).sum();
        let sigma = rq.max(0.0).sqrt();
        std::mem::swap(&mut v, &mut next);
        if normalize(&mut v) == 0.0 {
            return Ok(0.0);
        }
        if (sigma - prev_sigma).abs() <= tol * 0.01 {
            stable += 1;
            if stable >= 10 {
                return Ok(sigma);
            }
        } else {
            stable = 0;
        }
        prev_sigma = sigma;
    }
    Err(GraphError::NonConvergence)
}

fn center(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for x in v.iter_mut() {
        *x -= mean;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return 0.0;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    norm
}

/// Samples biregular graphs until one passes the spectral bound
/// `lambda <= c sqrt(degree)`.
pub fn sample_expander<R: Rng>(
    n: usize,
    degree: usize,
    lambda_c: f64,
    retries: usize,
    rng: &mut R,
) -> Result<BipartiteGraph, GraphError> {
    let budget = lambda_c * (degree as f64).sqrt();
    for _ in 0..retries {
        let g = random_biregular(n, degree, rng)?;
        if g.lambda() <= budget {
            return Ok(g);
        }
    }
    Err(GraphError::RetriesExhausted(format!(
        "no graph with lambda <= {budget:.3} in {retries} samples (n={n}, degree={degree})"
    )))
}

/// The (m+2)-part graph: left part V_0 against right parts V_1 ... V_{m+1},
/// each level an independently sampled biregular expander on its own edge
/// set. The last level carries no right code downstream; it exists so the
/// left code's redundancy has somewhere to live.
#[derive(Debug, Clone)]
pub struct MultilevelGraph {
    n: usize,
    levels: Vec<BipartiteGraph>,
    /// Global edge-id offset of each level.
    offsets: Vec<usize>,
    /// Local coordinate offset of each level within a left vertex's edges.
    local_offsets: Vec<usize>,
    total_degree: usize,
}

impl MultilevelGraph {
    pub fn from_levels(levels: Vec<BipartiteGraph>) -> Result<MultilevelGraph, GraphError> {
        if levels.len() < 2 {
            return Err(GraphError::BadShape(
                "need at least one coded level plus the socket level".into(),
            ));
        }
        let n = levels[0].n();
        if levels.iter().any(|g| g.n() != n) {
            return Err(GraphError::BadShape("levels differ in side size".into()));
        }
        let mut offsets = Vec::with_capacity(levels.len());
        let mut local_offsets = Vec::with_capacity(levels.len());
        let mut acc = 0;
        let mut lacc = 0;
        for g in &levels {
            offsets.push(acc);
            local_offsets.push(lacc);
            acc += g.edge_count();
            lacc += g.degree();
        }
        Ok(MultilevelGraph { n, levels, offsets, local_offsets, total_degree: lacc })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of coded levels m (the socket level is excluded).
    pub fn num_stages(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, i: usize) -> &BipartiteGraph {
        &self.levels[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.levels[i].degree()
    }

    /// Total left degree, the sum over levels.
    pub fn total_degree(&self) -> usize {
        self.total_degree
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.total_degree
    }

    /// Local coordinate range of level `i` within a left vertex's edge list.
    pub fn local_range(&self, i: usize) -> std::ops::Range<usize> {
        self.local_offsets[i]..self.local_offsets[i] + self.levels[i].degree()
    }

    /// Global edge id of (level, left vertex, local index within level).
    pub fn edge_index(&self, level: usize, v: usize, local: usize) -> usize {
        debug_assert!(local < self.levels[level].degree());
        self.offsets[level] + v * self.levels[level].degree() + local
    }

    /// Inverse of [`edge_index`](Self::edge_index).
    pub fn edge_of_index(&self, edge: usize) -> (usize, usize, usize) {
        let level = match self.offsets.binary_search(&edge) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let rel = edge - self.offsets[level];
        let d = self.levels[level].degree();
        (level, rel / d, rel % d)
    }

    /// Global edge ids of left vertex `v` at `level`, in local order.
    pub fn left_edges_at(&self, level: usize, v: usize) -> std::ops::Range<usize> {
        let d = self.levels[level].degree();
        self.offsets[level] + v * d..self.offsets[level] + (v + 1) * d
    }

    /// Global edge ids at right vertex `w` of `level`, ascending.
    pub fn right_edges_at(&self, level: usize, w: usize) -> Vec<usize> {
        self.levels[level]
            .right_edges(w)
            .iter()
            .map(|&e| self.offsets[level] + e as usize)
            .collect()
    }
}

/// Builds the multilevel graph by independent per-level expander sampling
/// under the `lambda <= lambda_c sqrt(degree)` acceptance bound.
pub fn build_multilevel_graph<R: Rng>(
    n: usize,
    degrees: &[usize],
    lambda_c: f64,
    retries: usize,
    rng: &mut R,
) -> Result<MultilevelGraph, GraphError> {
    if degrees.len() < 2 {
        return Err(GraphError::BadShape("need m >= 1 coded levels plus the socket degree".into()));
    }
    let mut levels = Vec::with_capacity(degrees.len());
    for &d in degrees {
        levels.push(sample_expander(n, d, lambda_c, retries, rng)?);
    }
    MultilevelGraph::from_levels(levels)
}
