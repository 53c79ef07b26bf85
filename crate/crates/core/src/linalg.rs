//! Small dense complex matrices (k ≤ 5, so at most 25×25 for two qudits).

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;

use crate::scalar::{Cplx, Real};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Cplx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Cplx<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMatrix { dim, data }
    }

    pub fn from_diagonal(diag: &[Cplx<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Cplx<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Cplx<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self[(i, i)])
    }

    pub fn diagonal(&self) -> Vec<Cplx<T>> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Cplx<T> {
        let n = self.dim;
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for j in 0..n {
                acc = acc + self[(i, j)] * other[(j, i)];
            }
        }
        acc
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |r, c| self[(r / b, c / b)] * other[(r % b, c % b)])
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (x, y)| m.max((*x - *y).norm()))
    }

    /// Largest deviation from Hermiticity, `max |A_ij − conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Cplx<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cplx<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cplx<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * rhs[(l, j)];
                }
            }
        }
        out
    }
}

/// Computes `(U ⊗ U) ρ (U ⊗ U)†` for a `k²×k²` matrix `ρ` indexed by `(c, d) ↦ c·k + d`.
///
/// Writing `ρ = Σ_ab M(a,b) ⊗ |a⟩⟨b|`, the first pass replaces every block by
/// `U M(a,b) U†`; regrouping as `Σ_ab |a⟩⟨b| ⊗ L(a,b)`, the second pass
/// replaces `L(a,b)` by `U L(a,b) U†`. Each pass is `k²` products of `k×k`
/// matrices, `O(k⁵)` overall.
pub fn conjugate_local<T: Real>(rho: &CMatrix<T>, u: &CMatrix<T>) -> CMatrix<T> {
    let k = u.dim();
    assert_eq!(rho.dim(), k * k, "two-qudit matrix expected");
    let u_adj = u.adjoint();
    let mut block = CMatrix::zeros(k);

    let mut first = CMatrix::zeros(k * k);
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                for c2 in 0..k {
                    block[(c, c2)] = rho[(c * k + a, c2 * k + b)];
                }
            }
            let rotated = &(u * &block) * &u_adj;
            for c in 0..k {
                for c2 in 0..k {
                    first[(c * k + a, c2 * k + b)] = rotated[(c, c2)];
                }
            }
        }
    }

    let mut second = CMatrix::zeros(k * k);
    for a in 0..k {
        for b in 0..k {
            for d in 0..k {
                for d2 in 0..k {
                    block[(d, d2)] = first[(a * k + d, b * k + d2)];
                }
            }
            let rotated = &(u * &block) * &u_adj;
            for d in 0..k {
                for d2 in 0..k {
                    second[(a * k + d, b * k + d2)] = rotated[(d, d2)];
                }
            }
        }
    }
    second
}
