//! Brute-force references used to validate the fast paths at small sizes.
//!
//! Basis states are enumerated in mixed radix: the amplitude of coloring `x`
//! lives at index `Σ_q x_q k^q`.

use num_complex::Complex;

use crate::engine::Angles;
use crate::engine::b_unitary;
use crate::error::{Error, Result};
use crate::hamiltonian::{Coloring, CostHamiltonian};
use crate::linalg::CMatrix;
use crate::scalar::{compensated_sum, Coefficient, Cplx, Real};

pub const STATEVECTOR_BUDGET: f64 = 1e6;
pub const MAX_KCUT_BUDGET: f64 = 1e7;

#[derive(Debug, Clone)]
pub struct StateVector<T> {
    k: usize,
    n: usize,
    amplitudes: Vec<Cplx<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Cplx<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Color of qudit `q` in basis state `index`.
    pub fn digit(&self, index: usize, q: usize) -> usize {
        (index / self.k.pow(q as u32)) % self.k
    }

    pub fn coloring(&self, index: usize) -> Vec<usize> {
        (0..self.n).map(|q| self.digit(index, q)).collect()
    }

    /// Exact `⟨ψ|O_uv|ψ⟩` for a `k²×k²` observable on qudits `(u, v)`.
    pub fn expectation(&self, u: usize, v: usize, observable: &CMatrix<T>) -> Result<Cplx<T>> {
        let k = self.k;
        if u >= self.n || v >= self.n || u == v {
            return Err(Error::InvalidArgument(format!(
                "pair ({u}, {v}) invalid for n = {}",
                self.n
            )));
        }
        if observable.dim() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                found: observable.dim(),
            });
        }
        let rho = self.reduced_density(u, v)?;
        // ⟨O⟩ = Tr(ρ O)
        Ok(rho.trace_product(observable))
    }

    /// Partial trace onto qudits `(u, v)`, indexed `(c, d) ↦ c·k + d`.
    pub fn reduced_density(&self, u: usize, v: usize) -> Result<CMatrix<T>> {
        let k = self.k;
        if u >= self.n || v >= self.n || u == v {
            return Err(Error::InvalidArgument(format!(
                "pair ({u}, {v}) invalid for n = {}",
                self.n
            )));
        }
        let (su, sv) = (k.pow(u as u32), k.pow(v as u32));
        let mut rho = CMatrix::zeros(k * k);
        for base in 0..self.amplitudes.len() {
            if self.digit(base, u) != 0 || self.digit(base, v) != 0 {
                continue;
            }
            for c in 0..k {
                for d in 0..k {
                    let a = self.amplitudes[base + c * su + d * sv];
                    for c2 in 0..k {
                        for d2 in 0..k {
                            let b = self.amplitudes[base + c2 * su + d2 * sv];
                            rho[(c * k + d, c2 * k + d2)] = rho[(c * k + d, c2 * k + d2)] + a * b.conj();
                        }
                    }
                }
            }
        }
        Ok(rho)
    }

    /// Probability-weighted classical energy `Σ_x |ψ(x)|² C(x)`.
    pub fn energy(&self, ham: &CostHamiltonian<T>) -> T {
        compensated_sum(
            T::zero(),
            self.amplitudes
                .iter()
                .enumerate()
                .map(|(idx, a)| a.norm_sqr() * ham.energy_of(&self.coloring(idx))),
        )
    }

    /// Distribution of `x_j − x_i (mod k)`.
    pub fn difference_distribution(&self, i: usize, j: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.k];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let b = (self.digit(idx, j) + self.k - self.digit(idx, i)) % self.k;
            out[b] = out[b] + a.norm_sqr();
        }
        out
    }
}

/// `B(β)^{⊗n} e^{−iγC} |+⟩^{⊗n}`. The offset only contributes a global phase
/// and is left out.
pub fn statevector_qaoa1<T: Real>(ham: &CostHamiltonian<T>, angles: &Angles<T>) -> Result<StateVector<T>> {
    let (k, n) = (ham.k(), ham.n());
    let size = (k as f64).powi(n as i32);
    if size > STATEVECTOR_BUDGET {
        return Err(Error::BudgetExceeded {
            size,
            budget: STATEVECTOR_BUDGET,
        });
    }
    if angles.beta.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: angles.beta.len(),
        });
    }
    let dim = k.pow(n as u32);
    let norm = T::one() / T::of(size).sqrt();
    let mut state = StateVector {
        k,
        n,
        amplitudes: Vec::with_capacity(dim),
    };
    let offset = ham.offset();
    for idx in 0..dim {
        let cost = ham.energy_of(&state.coloring(idx)) - offset;
        state
            .amplitudes
            .push(Complex::from_polar(norm, -angles.gamma * cost));
    }

    let mixer = b_unitary(&angles.beta);
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); k];
    for q in 0..n {
        let stride = k.pow(q as u32);
        for base in 0..dim {
            if state.digit(base, q) != 0 {
                continue;
            }
            for (c, s) in scratch.iter_mut().enumerate() {
                *s = (0..k).fold(Complex::new(T::zero(), T::zero()), |acc, d| {
                    acc + mixer[(c, d)] * state.amplitudes[base + d * stride]
                });
            }
            for (c, &s) in scratch.iter().enumerate() {
                state.amplitudes[base + c * stride] = s;
            }
        }
    }
    Ok(state)
}

/// Exhaustive maximum of `classical_energy`; the first qudit's color is fixed
/// to 0 since every term depends on color differences only.
pub fn exact_max_kcut<T: Coefficient>(ham: &CostHamiltonian<T>) -> Result<(T, Coloring)> {
    let active: Vec<usize> = ham.active().iter().copied().collect();
    maximize_over(ham, &active, MAX_KCUT_BUDGET)
}

/// Maximizes over colorings of `qudits`; all other qudits are colored 0.
pub(crate) fn maximize_over<T: Coefficient>(
    ham: &CostHamiltonian<T>,
    qudits: &[usize],
    budget: f64,
) -> Result<(T, Coloring)> {
    let k = ham.k();
    let free = qudits.len().saturating_sub(1);
    let size = (k as f64).powi(free as i32);
    if size > budget {
        return Err(Error::BudgetExceeded { size, budget });
    }
    let mut colors = vec![0usize; ham.n()];
    let mut best = ham.energy_of(&colors);
    let mut best_colors = colors.clone();
    // odometer over qudits[1..]
    let free_qudits = qudits.get(1..).unwrap_or(&[]);
    'outer: loop {
        let mut pos = 0;
        loop {
            if pos == free_qudits.len() {
                break 'outer;
            }
            let q = free_qudits[pos];
            colors[q] += 1;
            if colors[q] < k {
                break;
            }
            colors[q] = 0;
            pos += 1;
        }
        let e = ham.energy_of(&colors);
        if e > best {
            best = e;
            best_colors.clone_from(&colors);
        }
    }
    let mut coloring = Coloring::new();
    for &q in ham.active() {
        coloring.set(q, best_colors[q]);
    }
    Ok((best, coloring))
}
