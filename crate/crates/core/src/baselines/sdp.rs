//! Low-rank vector relaxation of MAX-k-CUT,
//!
//! ```text
//! maximize   Σ_{(i,j)∈E} (k−1)/k · (1 − ⟨v_i, v_j⟩)
//! subject to |v_i| = 1,  ⟨v_i, v_j⟩ ≥ −1/(k−1),
//! ```
//!
//! solved by Riemannian gradient ascent on the product of spheres with a
//! quadratic hinge penalty for the pairwise bounds. It is a heuristic: no
//! optimality certificate is produced.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub penalty_interval: usize,
    pub seed: u64,
}

impl Default for SdpConfig {
    fn default() -> Self {
        SdpConfig {
            max_iterations: 5000,
            tolerance: 1e-9,
            initial_penalty: 1.0,
            penalty_growth: 10.0,
            penalty_interval: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution<T> {
    /// Row-major, `n × rank`.
    pub vectors: Vec<T>,
    pub n: usize,
    pub rank: usize,
    pub objective: T,
    pub converged: bool,
    pub iterations: usize,
}

impl<T: Real> SdpSolution<T> {
    pub fn vector(&self, i: usize) -> &[T] {
        &self.vectors[i * self.rank..(i + 1) * self.rank]
    }

    pub fn inner(&self, i: usize, j: usize) -> T {
        dot(self.vector(i), self.vector(j))
    }

    /// Smallest pairwise inner product (1 for fewer than two vectors).
    pub fn min_inner(&self) -> T {
        min_inner(&self.vectors, self.n, self.rank)
    }
}

fn min_inner<T: Real>(v: &[T], n: usize, r: usize) -> T {
    let mut m = T::one();
    for i in 0..n {
        for j in i + 1..n {
            m = m.min(dot(&v[i * r..(i + 1) * r], &v[j * r..(j + 1) * r]));
        }
    }
    m
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn normalize<T: Real>(v: &mut [T]) {
    let norm = dot(v, v).sqrt();
    if norm > T::zero() {
        for x in v.iter_mut() {
            *x = *x / norm;
        }
    }
}

struct Problem<'g, T> {
    g: &'g Graph,
    n: usize,
    r: usize,
    weight: T,
    bound: T,
    constrained: bool,
}

impl<T: Real> Problem<'_, T> {
    fn objective(&self, v: &[T]) -> T {
        self.g.edges().iter().fold(T::zero(), |acc, &(i, j)| {
            acc + self.weight * (T::one() - dot(&v[i * self.r..(i + 1) * self.r], &v[j * self.r..(j + 1) * self.r]))
        })
    }

    fn violation(&self, gram: T) -> T {
        (self.bound - gram).max(T::zero())
    }

    fn penalized(&self, v: &[T], penalty: T) -> T {
        let mut f = self.objective(v);
        if self.constrained {
            let mut pen = T::zero();
            for i in 0..self.n {
                for j in i + 1..self.n {
                    let s = self.violation(dot(&v[i * self.r..(i + 1) * self.r], &v[j * self.r..(j + 1) * self.r]));
                    pen = pen + s * s;
                }
            }
            f = f - penalty * pen;
        }
        f
    }

    /// Tangent-space gradient of the penalized objective.
    fn gradient(&self, v: &[T], penalty: T) -> Vec<T> {
        let r = self.r;
        let mut grad = vec![T::zero(); v.len()];
        for i in 0..self.n {
            let gi = &mut grad[i * r..(i + 1) * r];
            for &j in self.g.neighbors(i) {
                for (x, &y) in gi.iter_mut().zip(&v[j * r..(j + 1) * r]) {
                    *x = *x - self.weight * y;
                }
            }
            if self.constrained {
                let vi = &v[i * r..(i + 1) * r];
                for j in (0..self.n).filter(|&j| j != i) {
                    let vj = &v[j * r..(j + 1) * r];
                    let s = self.violation(dot(vi, vj));
                    if s > T::zero() {
                        let c = T::of(2.0) * penalty * s;
                        for (x, &y) in gi.iter_mut().zip(vj) {
                            *x = *x + c * y;
                        }
                    }
                }
            }
            let vi = &v[i * r..(i + 1) * r];
            let radial = dot(gi, vi);
            for (x, &y) in gi.iter_mut().zip(vi) {
                *x = *x - radial * y;
            }
        }
        grad
    }
}

/// Approximately solves the vector relaxation with rank `⌈√(2n)⌉ + 1`.
///
/// After the penalty phase any remaining bound violation is removed by
/// appending one coordinate: with `m` the smallest inner product and
/// `t = (c − m)/(1 − m)`, every vector becomes `(√(1−t)·v, √t)`, which keeps
/// unit norms and lifts every inner product to at least `c = −1/(k−1)`.
pub fn solve_sdp_relaxation<T: Real>(g: &Graph, k: usize, config: &SdpConfig) -> Result<SdpSolution<T>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("relaxation needs k ≥ 2, got {k}")));
    }
    let n = g.n();
    let r = ((2.0 * n as f64).sqrt().ceil() as usize + 1).max(2);
    let problem = Problem {
        g,
        n,
        r,
        weight: T::of_usize(k - 1) / T::of_usize(k),
        bound: -T::one() / T::of_usize(k - 1),
        constrained: k > 2,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut v: Vec<T> = (0..n * r)
        .map(|_| T::of(StandardNormal.sample(&mut rng)))
        .collect();
    for i in 0..n {
        normalize(&mut v[i * r..(i + 1) * r]);
    }

    let tol = T::of(config.tolerance);
    let feasible = T::of(1e-6);
    let growth = T::of(config.penalty_growth);
    let mut penalty = T::of(config.initial_penalty);
    let mut step = T::one() / (problem.weight * T::of_usize(g.degrees().into_iter().max().unwrap_or(0) + 1));
    let mut current = problem.penalized(&v, penalty);
    let mut converged = g.num_edges() == 0;
    let mut iterations = 0;
    while !converged && iterations < config.max_iterations {
        iterations += 1;
        if config.penalty_interval > 0 && iterations % config.penalty_interval == 0 {
            penalty = penalty * growth;
            current = problem.penalized(&v, penalty);
        }
        let grad = problem.gradient(&v, penalty);
        let mut stalled = true;
        for _ in 0..40 {
            let mut trial: Vec<T> = v.iter().zip(&grad).map(|(&x, &d)| x + step * d).collect();
            for i in 0..n {
                normalize(&mut trial[i * r..(i + 1) * r]);
            }
            let value = problem.penalized(&trial, penalty);
            if value >= current {
                stalled = value - current <= tol * current.abs().max(T::one());
                v = trial;
                current = value;
                step = step * T::of(1.5);
                break;
            }
            step = step * T::of(0.5);
        }
        if stalled {
            let worst = problem.bound - min_inner(&v, n, r);
            if !problem.constrained || worst <= feasible {
                converged = true;
            } else {
                // stationary for this weight but still infeasible: tighten early
                penalty = penalty * growth;
                current = problem.penalized(&v, penalty);
            }
        }
    }

    let mut solution = SdpSolution {
        vectors: v,
        n,
        rank: r,
        objective: T::zero(),
        converged,
        iterations,
    };
    let m = solution.min_inner();
    if problem.constrained && m < problem.bound {
        let t = (problem.bound - m) / (T::one() - m);
        let (a, b) = ((T::one() - t).sqrt(), t.sqrt());
        let mut lifted = Vec::with_capacity(n * (r + 1));
        for i in 0..n {
            lifted.extend(solution.vector(i).iter().map(|&x| x * a));
            lifted.push(b);
        }
        solution.vectors = lifted;
        solution.rank = r + 1;
    }
    let lifted = Problem { r: solution.rank, ..problem };
    solution.objective = lifted.objective(&solution.vectors);
    Ok(solution)
}
