//! Complex polynomial roots as eigenvalues of the companion matrix.
//!
//! The companion matrix is already upper Hessenberg, so a shifted complex QR
//! iteration with Givens rotations and Wilkinson shifts is all that is
//! needed. Roots are Newton-polished against the original coefficients.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

const MAX_SWEEPS_PER_ROOT: usize = 200;

/// Evaluates `Σ_i coeffs[i] z^i` by Horner's rule.
pub fn eval<T: Real>(coeffs: &[Cplx<T>], z: Cplx<T>) -> Cplx<T> {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
}

fn eval_with_derivative<T: Real>(coeffs: &[Cplx<T>], z: Cplx<T>) -> (Cplx<T>, Cplx<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    coeffs.iter().rev().fold((zero, zero), |(p, dp), &c| (p * z + c, dp * z + p))
}

/// Roots of `Σ_i coeffs[i] z^i` (coefficients in increasing degree).
///
/// Leading coefficients that are negligible relative to the largest one are
/// dropped first, so the companion matrix always has the true degree.
pub fn roots<T: Real>(coeffs: &[Cplx<T>]) -> Result<Vec<Cplx<T>>> {
    let scale = coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()));
    if scale == T::zero() || !scale.is_finite() {
        return Err(Error::Numerical("polynomial is zero or non-finite".into()));
    }
    let cutoff = scale * T::epsilon() * T::of(64.0);
    let mut degree = coeffs.len() - 1;
    while degree > 0 && coeffs[degree].norm() <= cutoff {
        degree -= 1;
    }
    let coeffs = &coeffs[..=degree];
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut h = vec![vec![zero; degree]; degree];
    for i in 1..degree {
        h[i][i - 1] = one;
    }
    for (i, row) in h.iter_mut().enumerate() {
        row[degree - 1] = -coeffs[i] / lead;
    }
    let mut found = hessenberg_eigenvalues(h)?;
    for z in &mut found {
        polish(coeffs, z);
    }
    Ok(found)
}

fn polish<T: Real>(coeffs: &[Cplx<T>], z: &mut Cplx<T>) {
    for _ in 0..3 {
        let (p, dp) = eval_with_derivative(coeffs, *z);
        if dp.norm() == T::zero() {
            return;
        }
        let candidate = *z - p / dp;
        if eval(coeffs, candidate).norm() < p.norm() {
            *z = candidate;
        } else {
            return;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by shifted complex QR.
fn hessenberg_eigenvalues<T: Real>(mut h: Vec<Vec<Cplx<T>>>) -> Result<Vec<Cplx<T>>> {
    let n = h.len();
    let eps = T::epsilon();
    let mut out = Vec::with_capacity(n);
    let mut hi = n;
    let mut iterations = 0usize;
    while hi > 0 {
        if hi == 1 {
            out.push(h[0][0]);
            break;
        }
        // locate the start of the trailing unreduced block
        let mut lo = hi - 1;
        while lo > 0 {
            let sub = h[lo][lo - 1].norm();
            let diag = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            if sub <= eps * diag || sub < T::min_positive_value() {
                h[lo][lo - 1] = Complex::new(T::zero(), T::zero());
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            out.push(h[hi - 1][hi - 1]);
            hi -= 1;
            iterations = 0;
            continue;
        }
        iterations += 1;
        if iterations > MAX_SWEEPS_PER_ROOT {
            return Err(Error::Numerical(
                "QR iteration on companion matrix did not converge".into(),
            ));
        }
        let shift = if iterations % 11 == 0 {
            // exceptional shift to break cycles
            h[hi - 1][hi - 1] + Complex::new(h[hi - 1][hi - 2].norm() * T::of(0.75), T::zero())
        } else {
            wilkinson_shift(h[hi - 2][hi - 2], h[hi - 2][hi - 1], h[hi - 1][hi - 2], h[hi - 1][hi - 1])
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(out)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift<T: Real>(a: Cplx<T>, b: Cplx<T>, c: Cplx<T>, d: Cplx<T>) -> Cplx<T> {
    let two = T::of(2.0);
    let half_tr = (a + d) / two;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_step<T: Real>(h: &mut [Vec<Cplx<T>>], lo: usize, hi: usize, shift: Cplx<T>) {
    for i in lo..hi {
        h[i][i] = h[i][i] - shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let (a, b) = (h[k][k], h[k + 1][k]);
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if r == T::zero() {
            rotations.push(None);
            continue;
        }
        let (c, s) = (a / r, b / r);
        for j in k..hi {
            let (x, y) = (h[k][j], h[k + 1][j]);
            h[k][j] = c.conj() * x + s.conj() * y;
            h[k + 1][j] = -s * x + c * y;
        }
        rotations.push(Some((c, s)));
    }
    for (offset, rot) in rotations.into_iter().enumerate() {
        let k = lo + offset;
        if let Some((c, s)) = rot {
            for row in h.iter_mut().take(hi.min(k + 2)).skip(lo) {
                let (x, y) = (row[k], row[k + 1]);
                row[k] = x * c + y * s;
                row[k + 1] = -x * s.conj() + y * c.conj();
            }
        }
    }
    for i in lo..hi {
        h[i][i] = h[i][i] + shift;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Complex::new(re, im)
    }

    /// Coefficients (increasing degree) of `lead · Π (z − r)`.
    fn from_roots(lead: Cplx<f64>, rs: &[Cplx<f64>]) -> Vec<Cplx<f64>> {
        let mut coeffs = vec![lead];
        for &r in rs {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            coeffs = next;
        }
        coeffs
    }

    fn matched(found: &[Cplx<f64>], expected: &[Cplx<f64>], tol: f64) -> bool {
        let mut used = vec![false; found.len()];
        expected.iter().all(|e| {
            let best = found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .min_by(|a, b| (a.1 - e).norm().partial_cmp(&(b.1 - e).norm()).unwrap());
            match best {
                Some((i, z)) if (z - e).norm() < tol => {
                    used[i] = true;
                    true
                }
                _ => false,
            }
        })
    }

    #[test]
    fn known_quartic() {
        let rs = [c(1.0, 0.0), c(-2.0, 0.5), c(0.0, 1.0), c(0.3, -0.7)];
        let coeffs = from_roots(c(-0.25, 0.1), &rs);
        let found = roots(&coeffs).unwrap();
        assert_eq!(found.len(), 4);
        assert!(matched(&found, &rs, 1e-10));
    }

    #[test]
    fn degenerate_leading_coefficient_is_deflated() {
        let rs = [c(2.0, 0.0), c(-1.0, 1.0)];
        let mut coeffs = from_roots(c(1.0, 0.0), &rs);
        coeffs.push(c(0.0, 0.0));
        coeffs.push(c(1e-30, 0.0));
        let found = roots(&coeffs).unwrap();
        assert_eq!(found.len(), 2);
        assert!(matched(&found, &rs, 1e-10));
    }

    #[test]
    fn unit_circle_roots_of_unity() {
        // z^4 - 1
        let coeffs = [c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let found = roots(&coeffs).unwrap();
        let expected = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)];
        assert!(matched(&found, &expected, 1e-12));
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(roots::<f64>(&[c(0.0, 0.0), c(0.0, 0.0)]).is_err());
        assert!(roots(&[c(3.0, 0.0)]).unwrap().is_empty());
    }

    /// Durand–Kerner iteration, an independent reference for random cases.
    fn durand_kerner(coeffs: &[Cplx<f64>]) -> Vec<Cplx<f64>> {
        let n = coeffs.len() - 1;
        let lead = coeffs[n];
        let monic: Vec<_> = coeffs.iter().map(|&a| a / lead).collect();
        let mut z: Vec<Cplx<f64>> = (0..n).map(|i| c(0.4, 0.9).powu(i as u32)).collect();
        for _ in 0..2000 {
            for i in 0..n {
                let denom = (0..n)
                    .filter(|&j| j != i)
                    .fold(c(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
                let step = eval(&monic, z[i]) / denom;
                z[i] -= step;
            }
        }
        z
    }

    proptest! {
        #[test]
        fn agrees_with_durand_kerner(parts in prop::collection::vec(-3.0f64..3.0, 10)) {
            let coeffs: Vec<Cplx<f64>> = parts.chunks(2).map(|p| c(p[0], p[1])).collect();
            prop_assume!(coeffs[4].norm() > 0.1);
            let found = roots(&coeffs).unwrap();
            let reference = durand_kerner(&coeffs);
            // only well-conditioned roots are compared tightly
            for r in &reference {
                prop_assume!(eval(&coeffs, *r).norm() < 1e-9);
            }
            prop_assert!(matched(&found, &reference, 1e-6));
            for z in &found {
                prop_assert!(eval(&coeffs, *z).norm() < 1e-8 * (1.0 + z.norm().powi(4)) * 10.0);
            }
        }
    }
}
