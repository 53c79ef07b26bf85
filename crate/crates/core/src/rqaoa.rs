//! Recursive QAOA: round the strongest pairwise correlation to a hard
//! constraint `x_j = x_i + b`, substitute it into the Hamiltonian, repeat,
//! and brute-force what is left once few enough qudits remain.
//!
//! Substituting `x_i = x_j − b` turns every term `J_ih(x_h − x_i)` into
//! `J_ih(x_h − x_j + b)`, i.e. a coupling between `j` and `h` with table
//! `J'_jh(a − b) = J_ih(a)`. The `(i, j)` term itself becomes the constant
//! `J_ij(b)`. Energies of constrained colorings are therefore preserved exactly.

use serde::{Deserialize, Serialize};

use crate::engine::{Angles, Qaoa1};
use crate::error::{Error, Result};
use crate::hamiltonian::{Coloring, CostHamiltonian};
use crate::optimizer::AngleOptimizer;
use crate::oracle::maximize_over;
use crate::scalar::{modk, Coefficient, Real};

pub const DEFAULT_CUTOFF: usize = 9;
/// Upper bound on `k^{n_c}` for the final exhaustive search.
pub const BRUTE_FORCE_BUDGET: f64 = 1e6;
const TIE_TOLERANCE: f64 = 1e-12;

/// One elimination: `x_survivor = x_eliminated + shift (mod k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRecord<T> {
    pub eliminated: usize,
    pub survivor: usize,
    pub shift: usize,
    pub correlation: T,
}

/// Imposes `x_j = x_i + b` and removes qudit `i`.
pub fn contract<T: Coefficient>(ham: &CostHamiltonian<T>, i: usize, j: usize, b: usize) -> Result<CostHamiltonian<T>> {
    let k = ham.k();
    if i == j || !ham.is_active(i) || !ham.is_active(j) {
        return Err(Error::InvalidArgument(format!(
            "cannot contract ({i}, {j}): both qudits must be distinct and active"
        )));
    }
    if b >= k {
        return Err(Error::InvalidArgument(format!("shift {b} out of range for k = {k}")));
    }
    let mut out = ham.clone();
    if let Some(table) = out.take_coupling(i, j) {
        out.set_offset(out.offset() + table[b]);
    }
    let neighbors: Vec<usize> = out
        .couplings()
        .keys()
        .filter_map(|&(p, q)| match (p == i, q == i) {
            (true, _) => Some(q),
            (_, true) => Some(p),
            _ => None,
        })
        .collect();
    for h in neighbors {
        let table = out.take_coupling(i, h).expect("listed neighbor has a coupling");
        // J'_jh(c) = J_ih(c + b)
        let moved: Vec<T> = (0..k).map(|c| table[modk(c as i64 + b as i64, k)]).collect();
        out.add_coupling(j, h, &moved)?;
    }
    out.deactivate(i);
    Ok(out)
}

/// Strongest correlation over coupled pairs; near-ties go to the
/// lexicographically smallest `(i, j, b)`.
pub fn select_constraint<T: Real>(ham: &CostHamiltonian<T>, angles: &Angles<T>) -> Result<ConstraintRecord<T>> {
    if ham.num_couplings() == 0 {
        return Err(Error::NoCouplings);
    }
    let table = Qaoa1::new(ham).correlation_table(angles)?;
    let best = table
        .values()
        .flat_map(|m| m.iter().copied())
        .fold(T::neg_infinity(), T::max);
    if !best.is_finite() {
        return Err(Error::Numerical("non-finite correlation".into()));
    }
    let threshold = best - T::of(TIE_TOLERANCE);
    for (&(i, j), m) in &table {
        for (b, &value) in m.iter().enumerate() {
            if value >= threshold {
                return Ok(ConstraintRecord {
                    eliminated: i,
                    survivor: j,
                    shift: b,
                    correlation: value,
                });
            }
        }
    }
    unreachable!("maximum is attained somewhere in the table")
}

/// Picks the strongest correlation at `angles` and contracts it.
pub fn elimination_step<T: Real>(
    ham: &CostHamiltonian<T>,
    angles: &Angles<T>,
) -> Result<(ConstraintRecord<T>, CostHamiltonian<T>)> {
    let record = select_constraint(ham, angles)?;
    let next = contract(ham, record.eliminated, record.survivor, record.shift)?;
    Ok((record, next))
}

/// Fills in eliminated qudits in reverse trail order, `x_i = x_j − b`.
pub fn reconstruct<T>(trail: &[ConstraintRecord<T>], k: usize, partial: &Coloring) -> Result<Coloring> {
    let mut x = partial.clone();
    for r in trail.iter().rev() {
        let survivor = x.get(r.survivor).ok_or(Error::CorruptTrail {
            eliminated: r.eliminated,
            survivor: r.survivor,
        })?;
        x.set(r.eliminated, modk(survivor as i64 - r.shift as i64, k));
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RqaoaStep<T> {
    pub active: usize,
    pub angles: Angles<T>,
    pub energy: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RqaoaOutcome<T> {
    pub coloring: Coloring,
    /// Energy of `coloring` under the original Hamiltonian.
    pub value: T,
    pub trail: Vec<ConstraintRecord<T>>,
    pub steps: Vec<RqaoaStep<T>>,
    /// Optimum of the residual Hamiltonian found by brute force.
    pub residual_value: T,
}

/// Runs the recursion down to `cutoff` active qudits.
pub fn run<T: Real>(
    ham: &CostHamiltonian<T>,
    cutoff: usize,
    optimizer: &dyn AngleOptimizer<T>,
) -> Result<RqaoaOutcome<T>> {
    let k = ham.k();
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff must be at least 1".into()));
    }
    let size = (k as f64).powi(cutoff as i32);
    if size > BRUTE_FORCE_BUDGET {
        return Err(Error::BudgetExceeded {
            size,
            budget: BRUTE_FORCE_BUDGET,
        });
    }
    let mut current = ham.clone();
    let mut trail = Vec::new();
    let mut steps = Vec::new();
    while current.active().len() > cutoff && current.num_couplings() > 0 {
        let opt = optimizer.optimize(&current)?;
        let (record, next) = elimination_step(&current, &opt.angles)?;
        steps.push(RqaoaStep {
            active: current.active().len(),
            angles: opt.angles,
            energy: opt.energy,
        });
        trail.push(record);
        current = next;
    }
    // isolated qudits do not affect the energy, so only coupled ones are searched
    let coupled: Vec<usize> = current
        .adjacency()
        .iter()
        .enumerate()
        .filter(|(_, nb)| !nb.is_empty())
        .map(|(q, _)| q)
        .collect();
    let (residual_value, partial) = maximize_over(&current, &coupled, BRUTE_FORCE_BUDGET)?;
    let coloring = reconstruct(&trail, k, &partial)?;
    let value = ham.classical_energy(&coloring)?;
    Ok(RqaoaOutcome {
        coloring,
        value,
        trail,
        steps,
        residual_value,
    })
}
