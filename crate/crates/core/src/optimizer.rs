//! Angle optimization for level-1 circuits.
//!
//! For three colors the dependence on `β` at fixed `γ` is explicit:
//!
//! ```text
//! E(β) = C + Re Σ_a g_a e^{iθ_a},   θ_a = 3β_a − (β_0 + β_1 + β_2),
//! ```
//!
//! so the β-maximization reduces to maximizing
//! `F(z) = Re(g_0 z) + |g_1 + conj(g_2) z|` over the unit circle. That is
//! done by bisection on the level `f`: a level is attainable iff the quartic
//! obtained by squaring `F(z) = f` (with `conj(z) = 1/z`) has a unit-modulus
//! root that satisfies the unsquared equation. `γ` is then searched on a
//! coarse grid followed by a refined grid around the best coarse point.
//!
//! [`LocalSearch`] is a seeded multi-start pattern search used for `k ≠ 3`;
//! it is a heuristic with no optimality guarantee.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{Angles, Qaoa1};
use crate::error::{Error, Result};
use crate::hamiltonian::CostHamiltonian;
use crate::poly;
use crate::scalar::{compensated_sum, Cplx, Real};

pub const DEFAULT_GRID_POINTS: usize = 50;
const BISECTION_STEPS: usize = 80;

/// `E(β) = c_const + Re Σ_a g_a e^{i(3β_a − β̄)}` at a fixed `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GCoefficients<T> {
    pub c_const: T,
    pub g: [Cplx<T>; 3],
}

impl<T: Real> GCoefficients<T> {
    pub fn evaluate(&self, beta: &[T]) -> T {
        let bar = beta[0] + beta[1] + beta[2];
        let three = T::of(3.0);
        self.c_const
            + (0..3)
                .map(|a| (self.g[a] * Complex::from_polar(T::one(), three * beta[a] - bar)).re)
                .sum::<T>()
    }

    /// `F(z) = Re(g_0 z) + |g_1 + conj(g_2) z|`.
    pub fn reduced_objective(&self, z: Cplx<T>) -> T {
        (self.g[0] * z).re + (self.g[1] + self.g[2].conj() * z).norm()
    }

    /// Coefficients (increasing degree) of the quartic whose unit-circle roots
    /// contain every solution of `F(z) = f`.
    pub fn level_polynomial(&self, f: T) -> [Cplx<T>; 5] {
        let [g0, g1, g2] = self.g;
        let quarter = T::of(0.25);
        let half = T::of(0.5);
        let fc = Complex::new(f, T::zero());
        [
            -(g0.conj() * g0.conj()) * quarter,
            g1 * g2 + fc * g0.conj(),
            Complex::new(
                g1.norm_sqr() + g2.norm_sqr() - f * f - half * g0.norm_sqr(),
                T::zero(),
            ),
            g1.conj() * g2.conj() + fc * g0,
            -(g0 * g0) * quarter,
        ]
    }
}

/// Builds `C` and `g` from the two-qudit marginals at angle `γ` (three colors only).
pub fn g_coefficients<T: Real>(sim: &Qaoa1<'_, T>, gamma: T) -> Result<GCoefficients<T>> {
    let ham = sim.hamiltonian();
    if ham.k() != 3 {
        return Err(Error::Unsupported(format!(
            "analytic beta optimization needs k = 3, got k = {}",
            ham.k()
        )));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let two = T::of(2.0);
    let idx = |p: usize, q: usize| 3 * (p % 3) + q % 3;
    let mut pair_terms = Vec::new();
    let mut g = [zero; 3];
    for ((p, q), rho) in sim.pair_densities(gamma)? {
        let h0 = sim.tables().h(p, q, 0);
        let h1 = sim.tables().h(p, q, 1);
        let phi = rho.in_phase_basis();
        let mut cross = zero;
        for a in 0..3 {
            cross = cross + phi[(idx(a, a + 1), idx(a + 1, a))];
            g[a] = g[a]
                + (h1 * phi[(idx(a, a), idx(a + 1, a + 2))]
                    + h1.conj() * phi[(idx(a, a), idx(a + 2, a + 1))])
                    * two;
        }
        pair_terms.push(h0.re + two * (h1 * cross).re);
    }
    Ok(GCoefficients {
        c_const: compensated_sum(ham.offset(), pair_terms),
        g,
    })
}

/// Maximizer of `β ↦ E(β)` at fixed `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaOptimum<T> {
    pub beta: [T; 3],
    pub value: T,
    /// Maximizing point `z = e^{iθ_0}` on the unit circle.
    pub z: Cplx<T>,
    /// Final attainable level of the bisection.
    pub level: T,
}

/// Default acceptance tolerance for `|F(z) − f|`, scaled by `|g_0|+|g_1|+|g_2|`.
pub fn default_tolerance<T: Real>() -> T {
    T::epsilon().sqrt()
}

/// Maximizes `E(β)` over `β` for fixed coefficients. The returned `β`
/// satisfies `β_0 + β_1 + β_2 = 0`.
pub fn maximize_beta<T: Real>(gc: &GCoefficients<T>, tol: T) -> Result<BetaOptimum<T>> {
    let [g0, g1, g2] = gc.g;
    let scale = g0.norm() + g1.norm() + g2.norm();
    if !scale.is_finite() || !gc.c_const.is_finite() {
        return Err(Error::Numerical("non-finite beta coefficients".into()));
    }
    let one = Complex::new(T::one(), T::zero());
    if scale == T::zero() {
        return Ok(BetaOptimum {
            beta: [T::zero(); 3],
            value: gc.c_const,
            z: one,
            level: T::zero(),
        });
    }

    let (z, level) = if g0.norm() <= T::of(1e-14) * scale {
        // F(z) = |g_1 + conj(g_2) z| is maximal when conj(g_2) z is aligned with g_1
        let z = if g1.norm() > T::zero() && g2.norm() > T::zero() {
            Complex::from_polar(T::one(), g1.arg() + g2.arg())
        } else {
            one
        };
        (z, gc.reduced_objective(z))
    } else {
        bisect_level(gc, scale, tol * scale)?
    };

    let theta0 = z.arg();
    let pivot = g1 + g2.conj() * z;
    let theta1 = if pivot.norm() > T::zero() { -pivot.arg() } else { T::zero() };
    let theta2 = -theta0 - theta1;
    let three = T::of(3.0);
    let beta = [theta0 / three, theta1 / three, theta2 / three];
    Ok(BetaOptimum {
        beta,
        value: gc.c_const + gc.reduced_objective(z),
        z,
        level,
    })
}

fn bisect_level<T: Real>(gc: &GCoefficients<T>, scale: T, tol: T) -> Result<(Cplx<T>, T)> {
    let root_tol = T::of(1e-6).max(T::epsilon().sqrt() * T::of(10.0));
    let starts = [
        Complex::new(T::one(), T::zero()),
        Complex::new(-T::one(), T::zero()),
        Complex::new(T::zero(), T::one()),
        Complex::new(T::zero(), -T::one()),
    ];
    let mut best_z = starts[0];
    let mut best = gc.reduced_objective(best_z);
    for &z in &starts[1..] {
        let v = gc.reduced_objective(z);
        if v > best {
            best = v;
            best_z = z;
        }
    }
    let mut lo = best;
    let mut hi = scale;
    if hi < lo - tol {
        return Err(Error::Numerical(format!(
            "bisection bracket inverted: lower {lo} above upper {hi}"
        )));
    }
    let width = T::of(1e-12) * scale;
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= width {
            break;
        }
        let mid = (lo + hi) / T::of(2.0);
        let coeffs = gc.level_polynomial(mid);
        let mut hit: Option<(Cplx<T>, T)> = None;
        for r in poly::roots(&coeffs)? {
            let modulus = r.norm();
            if (modulus - T::one()).abs() >= root_tol {
                continue;
            }
            let z = r / modulus;
            let v = gc.reduced_objective(z);
            if (v - mid).abs() < tol && hit.is_none_or(|(_, hv)| v > hv) {
                hit = Some((z, v));
            }
        }
        match hit {
            Some((z, v)) => {
                lo = mid;
                if v > best {
                    best = v;
                    best_z = z;
                }
            }
            None => hi = mid,
        }
    }
    Ok((best_z, lo))
}

/// One γ point visited by the grid search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint<T> {
    pub gamma: T,
    pub beta: Vec<T>,
    pub energy: T,
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimized<T> {
    pub angles: Angles<T>,
    pub energy: T,
    pub trace: Vec<GridPoint<T>>,
}

/// Anything that can pick level-1 angles for a Hamiltonian.
pub trait AngleOptimizer<T>: Sync {
    fn optimize(&self, ham: &CostHamiltonian<T>) -> Result<Optimized<T>>;
}

/// Two-stage γ grid search with analytic β (three colors).
#[derive(Debug, Clone, Copy)]
pub struct GridSearch {
    pub grid_points: usize,
    pub tol: f64,
}

impl Default for GridSearch {
    fn default() -> Self {
        GridSearch {
            grid_points: DEFAULT_GRID_POINTS,
            tol: 1.5e-8,
        }
    }
}

impl GridSearch {
    pub fn with_grid(grid_points: usize) -> Self {
        GridSearch {
            grid_points,
            ..Self::default()
        }
    }

    fn evaluate<T: Real>(&self, sim: &Qaoa1<'_, T>, gammas: &[T], refined: bool) -> Result<Vec<GridPoint<T>>> {
        let tol = T::of(self.tol).max(default_tolerance::<T>());
        gammas
            .par_iter()
            .map(|&gamma| {
                let gc = g_coefficients(sim, gamma)?;
                let opt = maximize_beta(&gc, tol)?;
                Ok(GridPoint {
                    gamma,
                    beta: opt.beta.to_vec(),
                    energy: opt.value,
                    refined,
                })
            })
            .collect()
    }
}

/// Index of the best point: highest energy, ties resolved towards smaller γ.
fn best_index<T: Real>(points: &[GridPoint<T>]) -> usize {
    let mut best = 0;
    for (i, p) in points.iter().enumerate().skip(1) {
        let b = &points[best];
        if p.energy > b.energy || (p.energy == b.energy && p.gamma < b.gamma) {
            best = i;
        }
    }
    best
}

fn linspace<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / T::of_usize(count - 1);
    (0..count).map(|i| lo + step * T::of_usize(i)).collect()
}

impl<T: Real> AngleOptimizer<T> for GridSearch {
    fn optimize(&self, ham: &CostHamiltonian<T>) -> Result<Optimized<T>> {
        if ham.k() != 3 {
            return Err(Error::Unsupported(format!(
                "grid search with analytic beta needs k = 3, got k = {}",
                ham.k()
            )));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidArgument("grid needs at least two points".into()));
        }
        let sim = Qaoa1::new(ham);
        let coarse = linspace(T::zero(), T::PI(), self.grid_points);
        let mut trace = self.evaluate(&sim, &coarse, false)?;
        let s = best_index(&trace);
        let lo = coarse[s.saturating_sub(1)];
        let hi = coarse[(s + 1).min(coarse.len() - 1)];
        let fine = linspace(lo, hi, self.grid_points);
        trace.extend(self.evaluate(&sim, &fine, true)?);
        let best = &trace[best_index(&trace)];
        Ok(Optimized {
            angles: Angles::new(best.beta.clone(), best.gamma),
            energy: best.energy,
            trace,
        })
    }
}

/// Seeded multi-start compass search over `(β_1, …, β_{k−1}, γ)` with `β_0 = 0`.
#[derive(Debug, Clone, Copy)]
pub struct LocalSearch {
    pub seed: u64,
    pub gamma_samples: usize,
    pub beta_samples: usize,
    pub starts: usize,
    pub max_evaluations: usize,
}

impl Default for LocalSearch {
    fn default() -> Self {
        LocalSearch {
            seed: 0x5eed,
            gamma_samples: 16,
            beta_samples: 6,
            starts: 4,
            max_evaluations: 1500,
        }
    }
}

impl LocalSearch {
    fn angles_from<T: Real>(x: &[T]) -> Angles<T> {
        let mut beta = Vec::with_capacity(x.len());
        beta.push(T::zero());
        beta.extend_from_slice(&x[..x.len() - 1]);
        Angles::new(beta, x[x.len() - 1])
    }

    fn climb<T: Real>(&self, sim: &Qaoa1<'_, T>, mut x: Vec<T>, mut fx: T) -> Result<(Vec<T>, T)> {
        let mut step = T::of(0.4);
        let min_step = T::of(1e-7).max(T::epsilon().sqrt());
        let mut evals = 0;
        while step > min_step && evals < self.max_evaluations {
            let mut improved = false;
            for dim in 0..x.len() {
                for sign in [T::one(), -T::one()] {
                    let mut y = x.clone();
                    y[dim] = y[dim] + sign * step;
                    let fy = sim.energy(&Self::angles_from(&y))?;
                    evals += 1;
                    if fy > fx {
                        x = y;
                        fx = fy;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step = step * T::of(0.5);
            }
        }
        Ok((x, fx))
    }
}

impl<T: Real> AngleOptimizer<T> for LocalSearch {
    fn optimize(&self, ham: &CostHamiltonian<T>) -> Result<Optimized<T>> {
        let k = ham.k();
        let sim = Qaoa1::new(ham);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let gammas = linspace(T::zero(), T::PI(), self.gamma_samples.max(2));
        let mut candidates: Vec<Vec<T>> = Vec::new();
        for &gamma in &gammas {
            for _ in 0..self.beta_samples.max(1) {
                let mut x: Vec<T> = (1..k)
                    .map(|_| T::of(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
                    .collect();
                x.push(gamma);
                candidates.push(x);
            }
        }
        let scored: Vec<(Vec<T>, T)> = candidates
            .into_par_iter()
            .map(|x| {
                let e = sim.energy(&Self::angles_from(&x))?;
                Ok((x, e))
            })
            .collect::<Result<_>>()?;
        let mut order: Vec<usize> = (0..scored.len()).collect();
        order.sort_by(|&a, &b| {
            scored[b]
                .1
                .partial_cmp(&scored[a].1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let climbed: Vec<(Vec<T>, T)> = order
            .iter()
            .take(self.starts.max(1))
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&&i| self.climb(&sim, scored[i].0.clone(), scored[i].1))
            .collect::<Result<_>>()?;
        let mut best = 0;
        for (i, c) in climbed.iter().enumerate() {
            if c.1 > climbed[best].1 {
                best = i;
            }
        }
        let (x, energy) = climbed[best].clone();
        let angles = Self::angles_from(&x);
        Ok(Optimized {
            trace: vec![GridPoint {
                gamma: angles.gamma,
                beta: angles.beta.clone(),
                energy,
                refined: true,
            }],
            angles,
            energy,
        })
    }
}

/// Analytic grid search for three colors, seeded local search otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct AutoOptimizer {
    pub grid: GridSearch,
    pub local: LocalSearch,
}

impl AutoOptimizer {
    /// Whether `k` is handled by the heuristic fallback.
    pub fn is_heuristic(k: usize) -> bool {
        k != 3
    }
}

impl<T: Real> AngleOptimizer<T> for AutoOptimizer {
    fn optimize(&self, ham: &CostHamiltonian<T>) -> Result<Optimized<T>> {
        if ham.k() == 3 {
            self.grid.optimize(ham)
        } else {
            self.local.optimize(ham)
        }
    }
}

/// Convenience wrapper: default two-stage grid search (three colors).
pub fn optimize<T: Real>(ham: &CostHamiltonian<T>) -> Result<Optimized<T>> {
    GridSearch::default().optimize(ham)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn gc(g: [(f64, f64); 3]) -> GCoefficients<f64> {
        GCoefficients {
            c_const: 0.0,
            g: g.map(|(re, im)| Complex::new(re, im)),
        }
    }

    #[test]
    fn zero_coefficients() {
        let opt = maximize_beta(&gc([(0.0, 0.0); 3]), 1e-9).unwrap();
        assert_eq!(opt.value, 0.0);
        assert_eq!(opt.beta, [0.0; 3]);
    }

    #[test]
    fn pure_real_part() {
        let opt = maximize_beta(&gc([(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]), 1e-9).unwrap();
        assert!((opt.value - 1.0).abs() < 1e-9);
        assert!((opt.z - Complex::new(1.0, 0.0)).norm() < 1e-5);
        for b in opt.beta {
            assert!(b.abs() < 1e-5);
        }
    }

    #[test]
    fn degenerate_g0_aligns_phases() {
        let c = gc([(0.0, 0.0), (0.3, 0.4), (-1.0, 0.2)]);
        let opt = maximize_beta(&c, 1e-9).unwrap();
        let expected = c.g[1].norm() + c.g[2].norm();
        assert!((opt.value - expected).abs() < 1e-12);
        assert!((c.evaluate(&opt.beta) - opt.value).abs() < 1e-12);
    }

    #[test]
    fn gauge_and_level_consistency() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let c = GCoefficients {
                c_const: rng.random_range(-2.0..2.0),
                g: [(); 3].map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
            };
            let opt = maximize_beta(&c, 1e-9).unwrap();
            assert!((opt.beta.iter().sum::<f64>()).abs() < 1e-12);
            assert!((c.evaluate(&opt.beta) - opt.value).abs() < 1e-12);
            let scale: f64 = c.g.iter().map(|g| g.norm()).sum();
            assert!((c.reduced_objective(opt.z) - opt.level).abs() < 1e-8 * scale);
        }
    }

    #[test]
    fn level_polynomial_vanishes_on_solutions() {
        let c = gc([(0.7, -0.2), (0.1, 0.5), (-0.4, 0.3)]);
        for i in 0..64 {
            let z = Complex::from_polar(1.0, i as f64 * 0.1);
            let f = c.reduced_objective(z);
            let p = poly::eval(&c.level_polynomial(f), z);
            assert!(p.norm() < 1e-12, "{p}");
        }
    }

    #[test]
    fn attainable_levels_form_an_interval() {
        // bisection relies on this: levels between attained values are attained
        let c = gc([(0.9, 0.1), (0.2, -0.6), (0.5, 0.5)]);
        let samples: Vec<f64> = (0..2000)
            .map(|i| c.reduced_objective(Complex::from_polar(1.0, i as f64 * std::f64::consts::TAU / 2000.0)))
            .collect();
        let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for t in 1..20 {
            let f = lo + (hi - lo) * t as f64 / 20.0;
            let attained = poly::roots(&c.level_polynomial(f)).unwrap().iter().any(|r| {
                (r.norm() - 1.0).abs() < 1e-6 && (c.reduced_objective(r / r.norm()) - f).abs() < 1e-8
            });
            assert!(attained, "level {f} in [{lo}, {hi}] not attained");
        }
        let above = hi + 0.05;
        let attained = poly::roots(&c.level_polynomial(above)).unwrap().iter().any(|r| {
            (r.norm() - 1.0).abs() < 1e-6 && (c.reduced_objective(r / r.norm()) - above).abs() < 1e-8
        });
        assert!(!attained);
    }

    #[test]
    fn g_coefficients_need_three_colors() {
        let h = CostHamiltonian::<f64>::from_graph(&Graph::cycle(4), 2).unwrap();
        assert!(matches!(
            g_coefficients(&Qaoa1::new(&h), 0.3),
            Err(Error::Unsupported(_))
        ));
        assert!(GridSearch::default().optimize(&h).is_err());
    }

    #[test]
    fn g_coefficients_at_gamma_zero() {
        let g = Graph::cycle(5);
        let mut h = CostHamiltonian::<f64>::from_graph(&g, 3).unwrap();
        h.set_offset(1.5);
        let c = g_coefficients(&Qaoa1::new(&h), 0.0).unwrap();
        assert!((c.c_const - (5.0 * 2.0 / 3.0 + 1.5)).abs() < 1e-12);
        for g in c.g {
            assert!(g.norm() < 1e-12);
        }
        let empty = CostHamiltonian::<f64>::new(3, 4).unwrap();
        let c = g_coefficients(&Qaoa1::new(&empty), 0.7).unwrap();
        assert_eq!(c.c_const, 0.0);
        assert!(c.g.iter().all(|g| g.norm() == 0.0));
    }

    #[test]
    fn g_coefficients_reproduce_engine_energy() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = Graph::new(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (1, 4), (0, 5)]).unwrap();
        let mut h = CostHamiltonian::<f64>::from_graph(&g, 3).unwrap();
        h.add_coupling(2, 5, &[0.3, -1.0, 0.25]).unwrap();
        let sim = Qaoa1::new(&h);
        for _ in 0..4 {
            let gamma = rng.random_range(-3.0..3.0);
            let c = g_coefficients(&sim, gamma).unwrap();
            for _ in 0..20 {
                let beta: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
                let engine = sim.energy(&Angles::new(beta.clone(), gamma)).unwrap();
                assert!((c.evaluate(&beta) - engine).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_hamiltonian_optimizes_to_zero() {
        let h = CostHamiltonian::<f64>::new(3, 3).unwrap();
        let out = optimize(&h).unwrap();
        assert_eq!(out.energy, 0.0);
        assert_eq!(out.trace.len(), 2 * DEFAULT_GRID_POINTS);
    }

    #[test]
    fn single_edge_beats_random_guess() {
        let h = CostHamiltonian::<f64>::from_graph(&Graph::new(2, [(0, 1)]).unwrap(), 3).unwrap();
        let out = optimize(&h).unwrap();
        assert!(out.energy >= 2.0 / 3.0);
        let check = Qaoa1::new(&h).energy(&out.angles).unwrap();
        assert!((check - out.energy).abs() < 1e-9);
    }

    #[test]
    fn refinement_stays_in_range() {
        let h = CostHamiltonian::<f64>::from_graph(&Graph::complete(4), 3).unwrap();
        let out = optimize(&h).unwrap();
        for p in &out.trace {
            assert!(p.gamma >= 0.0 && p.gamma <= std::f64::consts::PI + 1e-15);
        }
        let coarse_best = out.trace[..DEFAULT_GRID_POINTS]
            .iter()
            .map(|p| p.energy)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(out.energy >= coarse_best);
    }

    #[test]
    fn local_search_is_deterministic_and_improves() {
        let h = CostHamiltonian::<f64>::from_graph(&Graph::cycle(6), 2).unwrap();
        let a = LocalSearch::default().optimize(&h).unwrap();
        let b = LocalSearch::default().optimize(&h).unwrap();
        assert_eq!(a, b);
        // ring MAX-CUT: level-1 optimum is 3/4 per edge
        assert!(a.energy > 6.0 * 0.5);
        assert!((a.energy - 6.0 * 0.75).abs() < 1e-6, "{}", a.energy);
    }
}
