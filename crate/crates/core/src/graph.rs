//! Undirected simple graphs and the planted 3-colorable regular ensemble.
//!
//! Ensemble graphs are built on the canonical partition
//! `V_r = {r·n/3, …, (r+1)·n/3 − 1}` for `r = 0, 1, 2`. Each of the three
//! pairs of parts is joined by a random bipartite `d`-regular block, so every
//! vertex has total degree `2d` and the partition itself is a proper
//! 3-coloring cutting all `n·d` edges.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tag carried by graphs that are 3-colorable by construction.
pub const PLANTED_3_COLORABLE: &str = "planted-3-colorable";

pub const DEFAULT_BLOCK_RESTARTS: usize = 10_000;
pub const DEFAULT_ENSEMBLE_RESTARTS: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    tags: Vec<String>,
}

/// On-disk JSON layout: `{n, edges: [[i, j], …], tags: […]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub tags: Vec<String>,
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Self> {
        let edges = file.edges.iter().map(|e| (e[0], e[1])).collect::<Vec<_>>();
        Ok(Graph::new(file.n, edges)?.with_tags(file.tags))
    }
}

impl From<Graph> for GraphFile {
    fn from(g: Graph) -> Self {
        GraphFile {
            n: g.n,
            edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(),
            tags: g.tags,
        }
    }
}

impl Graph {
    /// Builds a graph from an edge list. Edge orientation is normalized to
    /// `i < j`; self-loops, duplicates and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("graph needs at least one vertex".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidArgument(format!("duplicate edge ({a}, {b})")));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges,
            adjacency,
            tags: Vec::new(),
        })
    }

    pub fn with_tags(mut self, tags: impl IntoIterator<Item = String>) -> Self {
        for tag in tags {
            if !self.tags.contains(&tag) {
                self.tags.push(tag);
            }
        }
        self
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    /// Cycle on `n ≥ 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }

    /// Returns the common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        self.adjacency.iter().all(|l| l.len() == d).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    pub fn contains_triangle(&self) -> bool {
        self.edges.iter().any(|&(i, j)| {
            // both lists are sorted: merge-intersect
            let (a, b) = (&self.adjacency[i], &self.adjacency[j]);
            let (mut x, mut y) = (0, 0);
            while x < a.len() && y < b.len() {
                match a[x].cmp(&b[y]) {
                    std::cmp::Ordering::Less => x += 1,
                    std::cmp::Ordering::Greater => y += 1,
                    std::cmp::Ordering::Equal => return true,
                }
            }
            false
        })
    }

    /// Number of edges whose endpoints receive different colors.
    pub fn cut_size(&self, colors: &[usize]) -> usize {
        self.edges
            .iter()
            .filter(|&&(i, j)| colors[i] != colors[j])
            .count()
    }
}

/// Maximum k-cut of a graph that is 3-colorable by construction, i.e. `|E|`.
pub fn known_max_cut(g: &Graph) -> Result<usize> {
    if g.has_tag(PLANTED_3_COLORABLE) {
        Ok(g.num_edges())
    } else {
        Err(Error::NotEnsembleGraph)
    }
}

/// Parameters of the planted ensemble. `d` is the degree inside each of the
/// three bipartite blocks; the resulting graph is `2d`-regular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    #[serde(default = "default_ensemble_restarts")]
    pub max_restarts: usize,
    #[serde(default = "default_block_restarts")]
    pub block_restarts: usize,
}

fn default_ensemble_restarts() -> usize {
    DEFAULT_ENSEMBLE_RESTARTS
}

fn default_block_restarts() -> usize {
    DEFAULT_BLOCK_RESTARTS
}

impl EnsembleConfig {
    pub fn new(n: usize, d: usize, seed: u64) -> Self {
        EnsembleConfig {
            n,
            d,
            seed,
            max_restarts: DEFAULT_ENSEMBLE_RESTARTS,
            block_restarts: DEFAULT_BLOCK_RESTARTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 3 != 0 {
            return Err(Error::InvalidArgument(format!(
                "ensemble size n = {} must be a positive multiple of 3",
                self.n
            )));
        }
        if self.d == 0 || self.d > self.n / 3 {
            return Err(Error::InvalidArgument(format!(
                "per-block degree d = {} must lie in 1..={}",
                self.d,
                self.n / 3
            )));
        }
        if self.max_restarts == 0 || self.block_restarts == 0 {
            return Err(Error::InvalidArgument("restart budgets must be positive".into()));
        }
        Ok(())
    }

    /// The canonical partition `V_0, V_1, V_2`.
    pub fn parts(&self) -> [Vec<usize>; 3] {
        let m = self.n / 3;
        [
            (0..m).collect(),
            (m..2 * m).collect(),
            (2 * m..3 * m).collect(),
        ]
    }
}

/// Random bipartite `d`-regular graph between two equally sized parts.
///
/// Vertices of `part_a` are visited in order; each picks `d` distinct partners
/// uniformly among the vertices of `part_b` whose degree is still below `d`.
/// A dead end discards the whole block and starts over.
pub fn generate_bipartite_regular<R: Rng + ?Sized>(
    part_a: &[usize],
    part_b: &[usize],
    d: usize,
    rng: &mut R,
    max_restarts: usize,
) -> Result<Vec<(usize, usize)>> {
    if part_a.len() != part_b.len() {
        return Err(Error::InvalidArgument(format!(
            "bipartite parts must have equal size, got {}:{}",
            part_a.len(),
            part_b.len()
        )));
    }
    if d > part_b.len() {
        return Err(Error::InvalidArgument(format!(
            "degree {d} exceeds part size {}",
            part_b.len()
        )));
    }
    let failure = || Error::BipartiteGenerationFailed {
        part_a: part_a.len(),
        part_b: part_b.len(),
        d,
        attempts: max_restarts,
    };

    'attempt: for _ in 0..max_restarts {
        let mut degree_b = vec![0usize; part_b.len()];
        let mut edges = Vec::with_capacity(part_a.len() * d);
        for &v in part_a {
            let available: Vec<usize> = (0..part_b.len()).filter(|&w| degree_b[w] < d).collect();
            if available.len() < d {
                continue 'attempt;
            }
            for &w in available.choose_multiple(rng, d) {
                degree_b[w] += 1;
                let u = part_b[w];
                edges.push((v.min(u), v.max(u)));
            }
        }
        edges.sort_unstable();
        return Ok(edges);
    }
    Err(failure())
}

/// Draws a graph from the planted ensemble: a connected union of three
/// bipartite `d`-regular blocks that contains at least one triangle.
pub fn generate_ensemble_graph(config: &EnsembleConfig) -> Result<Graph> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    generate_ensemble_graph_with(config, &mut rng)
}

pub fn generate_ensemble_graph_with<R: Rng + ?Sized>(
    config: &EnsembleConfig,
    rng: &mut R,
) -> Result<Graph> {
    config.validate()?;
    let parts = config.parts();
    for _ in 0..config.max_restarts {
        let mut edges = Vec::with_capacity(config.n * config.d);
        let mut exhausted = false;
        for (r, s) in [(0, 1), (0, 2), (1, 2)] {
            match generate_bipartite_regular(&parts[r], &parts[s], config.d, rng, config.block_restarts) {
                Ok(block) => edges.extend(block),
                // an exhausted block budget only costs one outer attempt
                Err(Error::BipartiteGenerationFailed { .. }) => {
                    exhausted = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if exhausted {
            continue;
        }
        let g = Graph::new(config.n, edges)?;
        if g.contains_triangle() && g.is_connected() {
            let tag = format!("ensemble:G[d={},n={}]", config.d, config.n);
            return Ok(g.with_tags([PLANTED_3_COLORABLE.to_string(), tag]));
        }
    }
    Err(Error::EnsembleGenerationFailed {
        n: config.n,
        d: config.d,
        attempts: config.max_restarts,
    })
}

/// Proper coloring induced by the canonical partition of an ensemble graph.
pub fn planted_coloring(n: usize) -> Vec<usize> {
    let m = n / 3;
    (0..n).map(|v| v / m).collect()
}
