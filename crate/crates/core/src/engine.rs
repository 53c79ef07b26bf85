//! Exact classical simulation of level-1 QAOA states
//! `|ψ(β,γ)⟩ = B(β)^{⊗n} e^{−iγC} |+⟩^{⊗n}`.
//!
//! Two-qudit marginals of the phase-separated state are built by starting
//! from `e^{−iγC_uv}|++⟩⟨++|e^{iγC_uv}` and absorbing every interacting
//! neighbor `w` through a channel with diagonal Kraus operators
//!
//! ```text
//! E_w(η) = (1/k) Σ_a D_w(a) η D_w(a)†,
//! D_w(a)|c,d⟩ = exp[−iγ ĥ_uw(c−a) − iγ ĥ_vw(d−a)] |c,d⟩.
//! ```
//!
//! Qudits that do not interact with `u` or `v` drop out, so a pair costs
//! `O(k⁵ (d_u + d_v))`. Mixer rotations are applied afterwards, block by
//! block, in `O(k⁵)`.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{CostHamiltonian, FourierTables};
use crate::linalg::{conjugate_local, CMatrix};
use crate::scalar::{compensated_sum, root_of_unity, Cplx, Real};

/// Variational angles of a level-1 circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Angles<T> {
    pub beta: Vec<T>,
    pub gamma: T,
}

impl<T: Real> Angles<T> {
    pub fn new(beta: Vec<T>, gamma: T) -> Self {
        Angles { beta, gamma }
    }

    pub fn zero(k: usize) -> Self {
        Angles {
            beta: vec![T::zero(); k],
            gamma: T::zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.gamma.is_finite() && self.beta.iter().all(|b| b.is_finite())
    }
}

/// Pairwise correlations `M_ij(b) = ⟨ψ|Π_ij(b)|ψ⟩` for every coupled pair `i < j`.
pub type CorrelationTable<T> = BTreeMap<(usize, usize), Vec<T>>;

/// Reduced state of two qudits, a `k²×k²` matrix indexed by `(c, d) ↦ c·k + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQuditDensity<T> {
    k: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> TwoQuditDensity<T> {
    pub fn from_matrix(k: usize, matrix: CMatrix<T>) -> Result<Self> {
        if matrix.dim() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                found: matrix.dim(),
            });
        }
        Ok(TwoQuditDensity { k, matrix })
    }

    /// `|++⟩⟨++|`: every entry equals `1/k²`.
    pub fn plus_plus(k: usize) -> Self {
        let v = T::one() / T::of_usize(k * k);
        TwoQuditDensity {
            k,
            matrix: CMatrix::from_fn(k * k, |_, _| Complex::new(v, T::zero())),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn trace(&self) -> Cplx<T> {
        self.matrix.trace()
    }

    /// Matrix elements in the product basis `|φ_p ⊗ φ_q⟩`, `φ_a = Z^a|+⟩`.
    pub fn in_phase_basis(&self) -> CMatrix<T> {
        conjugate_local(&self.matrix, &phase_basis::<T>(self.k).adjoint())
    }
}

/// Mixer unitary `B(β) = Σ_a e^{iβ_a} |φ_a⟩⟨φ_a|`. In the computational basis
/// `B_cd = (1/k) Σ_a e^{iβ_a} ω^{a(c−d)}`.
pub fn b_unitary<T: Real>(beta: &[T]) -> CMatrix<T> {
    let k = beta.len();
    let inv_k = T::one() / T::of_usize(k);
    let phases: Vec<Cplx<T>> = beta
        .iter()
        .map(|&b| Complex::from_polar(T::one(), b))
        .collect();
    CMatrix::from_fn(k, |c, d| {
        let shift = (c + k - d) % k;
        phases
            .iter()
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, &p)| {
                acc + p * root_of_unity::<T>(k, a * shift)
            })
            * inv_k
    })
}

/// Unitary whose columns are `|φ_a⟩ = Z^a|+⟩`, i.e. `F_ca = ω^{ac}/√k`.
pub fn phase_basis<T: Real>(k: usize) -> CMatrix<T> {
    let norm = T::one() / T::of_usize(k).sqrt();
    CMatrix::from_fn(k, |c, a| root_of_unity::<T>(k, a * c) * norm)
}

/// Diagonal two-qudit observable `Σ_a coeff(a) Z^a ⊗ Z^{−a}`.
pub fn zz_observable<T: Real>(k: usize, coeff: &[Cplx<T>]) -> CMatrix<T> {
    let diag: Vec<Cplx<T>> = (0..k * k)
        .map(|idx| {
            let (c, d) = (idx / k, idx % k);
            let shift = (c + k - d) % k;
            coeff
                .iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (a, &h)| {
                    acc + h * root_of_unity::<T>(k, a * shift)
                })
        })
        .collect();
    CMatrix::from_diagonal(&diag)
}

/// Projector `Π(b)` onto `|c, c+b⟩`.
pub fn pi_projector<T: Real>(k: usize, b: usize) -> CMatrix<T> {
    let diag: Vec<Cplx<T>> = (0..k * k)
        .map(|idx| {
            let (c, d) = (idx / k, idx % k);
            let v = if (c + b) % k == d { T::one() } else { T::zero() };
            Complex::new(v, T::zero())
        })
        .collect();
    CMatrix::from_diagonal(&diag)
}

/// Tolerance for imaginary residues of Hermitian expectation values.
fn residue_tolerance<T: Real>() -> T {
    T::of(1e-9).max(T::epsilon() * T::of(1e4))
}

fn real_part<T: Real>(value: Cplx<T>, what: &str) -> Result<T> {
    let tol = residue_tolerance::<T>() * (T::one() + value.re.abs());
    if value.im.abs() > tol {
        return Err(Error::Numerical(format!(
            "{what} has imaginary residue {} (value {})",
            value.im, value.re
        )));
    }
    Ok(value.re)
}

/// State `e^{−iγC_uv}|++⟩⟨++|e^{iγC_uv}`; `⟨c,d|e^{−iγC_uv}|c,d⟩ = exp[−iγ ĥ_uv(c−d)]`.
pub fn initial_pair_state<T: Real>(
    tables: &FourierTables<T>,
    gamma: T,
    u: usize,
    v: usize,
) -> TwoQuditDensity<T> {
    let k = tables.k();
    let phase: Vec<Cplx<T>> = (0..k * k)
        .map(|idx| {
            let (c, d) = (idx / k, idx % k);
            let h = tables.h_hat(u, v, (c + k - d) % k);
            (Complex::new(T::zero(), -gamma) * h).exp()
        })
        .collect();
    let v0 = T::one() / T::of_usize(k * k);
    let matrix = CMatrix::from_fn(k * k, |i, j| phase[i] * phase[j].conj() * v0);
    TwoQuditDensity { k, matrix }
}

/// One environment channel `E_w` acting on the `(u, v)` marginal.
pub fn env_channel_step<T: Real>(
    eta: &TwoQuditDensity<T>,
    u: usize,
    v: usize,
    w: usize,
    tables: &FourierTables<T>,
    gamma: T,
) -> Result<TwoQuditDensity<T>> {
    if w == u || w == v {
        return Err(Error::InvalidArgument(format!(
            "environment qudit {w} coincides with the pair ({u}, {v})"
        )));
    }
    let k = eta.k;
    let minus_i_gamma = Complex::new(T::zero(), -gamma);
    let pu: Vec<Cplx<T>> = (0..k)
        .map(|r| (minus_i_gamma * tables.h_hat(u, w, r)).exp())
        .collect();
    let pv: Vec<Cplx<T>> = (0..k)
        .map(|r| (minus_i_gamma * tables.h_hat(v, w, r)).exp())
        .collect();
    // kraus[a][(c,d)] = D_w(a) diagonal entry
    let kraus: Vec<Vec<Cplx<T>>> = (0..k)
        .map(|a| {
            (0..k * k)
                .map(|idx| {
                    let (c, d) = (idx / k, idx % k);
                    pu[(c + k - a) % k] * pv[(d + k - a) % k]
                })
                .collect()
        })
        .collect();
    let inv_k = T::one() / T::of_usize(k);
    let matrix = CMatrix::from_fn(k * k, |i, j| {
        let factor = kraus
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, d| {
                acc + d[i] * d[j].conj()
            });
        eta.matrix[(i, j)] * factor * inv_k
    });
    Ok(TwoQuditDensity { k, matrix })
}

/// Tr(η O) with `η = B(β)^{⊗2} ρ B(−β)^{⊗2}`, i.e. `⟨ψ|O_uv|ψ⟩`.
/// `O` must be Hermitian; the real part is returned.
pub fn expectation<T: Real>(
    rho: &TwoQuditDensity<T>,
    beta: &[T],
    observable: &CMatrix<T>,
) -> Result<T> {
    let k = rho.k;
    if beta.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: beta.len(),
        });
    }
    if observable.dim() != k * k {
        return Err(Error::DimensionMismatch {
            expected: k * k,
            found: observable.dim(),
        });
    }
    let eta = conjugate_local(&rho.matrix, &b_unitary(beta));
    real_part(eta.trace_product(observable), "expectation value")
}

/// Level-1 simulator bound to one cost Hamiltonian.
#[derive(Debug, Clone)]
pub struct Qaoa1<'h, T> {
    ham: &'h CostHamiltonian<T>,
    tables: FourierTables<T>,
}

impl<'h, T: Real> Qaoa1<'h, T> {
    pub fn new(ham: &'h CostHamiltonian<T>) -> Self {
        Qaoa1 {
            ham,
            tables: ham.fourier_tables(),
        }
    }

    pub fn hamiltonian(&self) -> &CostHamiltonian<T> {
        self.ham
    }

    pub fn tables(&self) -> &FourierTables<T> {
        &self.tables
    }

    /// Qudits interacting with `u` or `v`, each listed once, in increasing order.
    pub fn environment(&self, u: usize, v: usize) -> Vec<usize> {
        let mut env: Vec<usize> = self
            .tables
            .neighbors(u)
            .iter()
            .chain(self.tables.neighbors(v))
            .copied()
            .filter(|&w| w != u && w != v)
            .collect();
        env.sort_unstable();
        env.dedup();
        env
    }

    pub fn reduced_density(&self, gamma: T, u: usize, v: usize) -> Result<TwoQuditDensity<T>> {
        self.reduced_density_counted(gamma, u, v).map(|(rho, _)| rho)
    }

    /// Like [`Self::reduced_density`] but also reports how many environment
    /// channels were applied.
    pub fn reduced_density_counted(
        &self,
        gamma: T,
        u: usize,
        v: usize,
    ) -> Result<(TwoQuditDensity<T>, usize)> {
        if u == v {
            return Err(Error::InvalidArgument(format!("pair ({u}, {v}) is degenerate")));
        }
        for q in [u, v] {
            if !self.ham.is_active(q) {
                return Err(Error::InactiveQudit(q));
            }
        }
        let mut eta = initial_pair_state(&self.tables, gamma, u, v);
        let env = self.environment(u, v);
        for &w in &env {
            eta = env_channel_step(&eta, u, v, w, &self.tables, gamma)?;
        }
        Ok((eta, env.len()))
    }

    /// Reduced densities of every coupled pair at fixed `γ`, in pair order.
    pub fn pair_densities(&self, gamma: T) -> Result<Vec<((usize, usize), TwoQuditDensity<T>)>> {
        let pairs: Vec<(usize, usize)> = self.tables.pairs().collect();
        pairs
            .par_iter()
            .map(|&(i, j)| Ok(((i, j), self.reduced_density(gamma, i, j)?)))
            .collect()
    }

    /// Dense `C_ij = Σ_a h_ij(a) Z^a ⊗ Z^{−a}`; zero for uncoupled pairs.
    pub fn pair_observable(&self, i: usize, j: usize) -> CMatrix<T> {
        let k = self.ham.k();
        match self.tables.h_table(i, j) {
            Some(h) => zz_observable(k, &h),
            None => CMatrix::zeros(k * k),
        }
    }

    /// `⟨ψ(β,γ)|C|ψ(β,γ)⟩`, including the constant offset.
    pub fn energy(&self, angles: &Angles<T>) -> Result<T> {
        self.check_angles(angles)?;
        let pairs: Vec<(usize, usize)> = self.tables.pairs().collect();
        let terms: Vec<T> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let rho = self.reduced_density(angles.gamma, i, j)?;
                expectation(&rho, &angles.beta, &self.pair_observable(i, j))
            })
            .collect::<Result<_>>()?;
        // fixed summation order, independent of the thread schedule
        Ok(compensated_sum(self.ham.offset(), terms))
    }

    /// `M_ij(b)` for all coupled pairs, via the ZZ-moment identity
    /// `μ(Z^r ⊗ Z^{−r}) = Σ_pq e^{i(β_p + β_q − β_{p+r} − β_{q−r})} ⟨φ_p φ_q|ρ|φ_{p+r} φ_{q−r}⟩`
    /// and `Π(b) = (1/k) Σ_r ω^{rb} Z^r ⊗ Z^{−r}`.
    pub fn correlation_table(&self, angles: &Angles<T>) -> Result<CorrelationTable<T>> {
        self.check_angles(angles)?;
        let pairs: Vec<(usize, usize)> = self.tables.pairs().collect();
        let rows: Vec<((usize, usize), Vec<T>)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let rho = self.reduced_density(angles.gamma, i, j)?;
                Ok(((i, j), correlations_from_density(&rho, &angles.beta)?))
            })
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().collect())
    }

    fn check_angles(&self, angles: &Angles<T>) -> Result<()> {
        if angles.beta.len() != self.ham.k() {
            return Err(Error::DimensionMismatch {
                expected: self.ham.k(),
                found: angles.beta.len(),
            });
        }
        if !angles.is_finite() {
            return Err(Error::InvalidArgument("angles must be finite".into()));
        }
        Ok(())
    }
}

/// `M(b) = ⟨Π(b)⟩` for one pair from its reduced density.
pub fn correlations_from_density<T: Real>(rho: &TwoQuditDensity<T>, beta: &[T]) -> Result<Vec<T>> {
    let k = rho.k;
    let phi = rho.in_phase_basis();
    let e: Vec<Cplx<T>> = beta
        .iter()
        .map(|&b| Complex::from_polar(T::one(), b))
        .collect();
    let zero = Complex::new(T::zero(), T::zero());
    let moments: Vec<Cplx<T>> = (0..k)
        .map(|r| {
            let mut acc = zero;
            for p in 0..k {
                for q in 0..k {
                    let p2 = (p + r) % k;
                    let q2 = (q + k - r) % k;
                    let phase = e[p] * e[q] * (e[p2] * e[q2]).conj();
                    acc = acc + phase * phi[(p * k + q, p2 * k + q2)];
                }
            }
            acc
        })
        .collect();
    let inv_k = T::one() / T::of_usize(k);
    (0..k)
        .map(|b| {
            let m = moments
                .iter()
                .enumerate()
                .fold(zero, |acc, (r, &mu)| acc + mu * root_of_unity::<T>(k, r * b))
                * inv_k;
            real_part(m, "correlation")
        })
        .collect()
}

/// Convenience wrapper around [`Qaoa1::energy`].
pub fn energy<T: Real>(ham: &CostHamiltonian<T>, angles: &Angles<T>) -> Result<T> {
    Qaoa1::new(ham).energy(angles)
}

/// Convenience wrapper around [`Qaoa1::correlation_table`].
pub fn correlation_table<T: Real>(
    ham: &CostHamiltonian<T>,
    angles: &Angles<T>,
) -> Result<CorrelationTable<T>> {
    Qaoa1::new(ham).correlation_table(angles)
}
