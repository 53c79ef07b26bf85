//! Diagonal two-local cost Hamiltonians `C = offset + Σ_{i<j} Σ_b J_ij(b) Π_ij(b)`,
//! where `Π_ij(b)` projects onto colorings with `x_j − x_i = b (mod k)`.
//!
//! Only the `i < j` orientation is stored; the reverse orientation is
//! `J_ji(b) = J_ij(−b)`. All accessors taking an ordered pair handle the
//! flip, so callers never have to care which way round a table is stored.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{modk, root_of_unity, Coefficient, Cplx, Real};

/// Color assignment, keyed by qudit index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub assignment: BTreeMap<usize, usize>,
}

impl Coloring {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_slice(colors: &[usize]) -> Self {
        Coloring {
            assignment: colors.iter().copied().enumerate().collect(),
        }
    }

    pub fn get(&self, q: usize) -> Option<usize> {
        self.assignment.get(&q).copied()
    }

    pub fn set(&mut self, q: usize, color: usize) {
        self.assignment.insert(q, color);
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Dense vector over `0..n`; unassigned qudits get `None`.
    pub fn to_dense(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (&q, &c) in &self.assignment {
            if q < n {
                out[q] = Some(c);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostHamiltonian<T> {
    k: usize,
    n: usize,
    offset: T,
    couplings: BTreeMap<(usize, usize), Vec<T>>,
    active: BTreeSet<usize>,
}

impl<T: Coefficient> CostHamiltonian<T> {
    /// Empty Hamiltonian on `n` active qudits of dimension `k`.
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("need k >= 2 colors, got {k}")));
        }
        Ok(CostHamiltonian {
            k,
            n,
            offset: T::zero(),
            couplings: BTreeMap::new(),
            active: (0..n).collect(),
        })
    }

    /// MAX-k-CUT Hamiltonian: `J_ij(b) = 1 − δ_{b,0}` on every edge.
    pub fn from_graph(g: &Graph, k: usize) -> Result<Self> {
        let mut h = Self::new(k, g.n())?;
        let table: Vec<T> = (0..k)
            .map(|b| if b == 0 { T::zero() } else { T::one() })
            .collect();
        for &(i, j) in g.edges() {
            h.couplings.insert((i, j), table.clone());
        }
        Ok(h)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn set_offset(&mut self, offset: T) {
        self.offset = offset;
    }

    pub fn active(&self) -> &BTreeSet<usize> {
        &self.active
    }

    pub fn is_active(&self, q: usize) -> bool {
        self.active.contains(&q)
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), Vec<T>> {
        &self.couplings
    }

    pub fn num_couplings(&self) -> usize {
        self.couplings.len()
    }

    /// `J_ij(b)` for an arbitrary ordered pair; zero when the pair is uncoupled.
    pub fn coupling(&self, i: usize, j: usize, b: usize) -> T {
        if i < j {
            self.couplings.get(&(i, j)).map_or(T::zero(), |t| t[b % self.k])
        } else {
            self.couplings
                .get(&(j, i))
                .map_or(T::zero(), |t| t[modk(-(b as i64), self.k)])
        }
    }

    /// Adds `table` (indexed in the `i → j` orientation) to `J_ij`.
    /// Tables that end up identically zero are dropped.
    pub fn add_coupling(&mut self, i: usize, j: usize, table: &[T]) -> Result<()> {
        if i == j {
            return Err(Error::InvalidArgument(format!("self-coupling on qudit {i}")));
        }
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidArgument(format!(
                "pair ({i}, {j}) out of range for n = {}",
                self.n
            )));
        }
        if table.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: table.len(),
            });
        }
        let k = self.k;
        let key = (i.min(j), i.max(j));
        let entry = self
            .couplings
            .entry(key)
            .or_insert_with(|| vec![T::zero(); k]);
        for (b, &value) in table.iter().enumerate() {
            let slot = if i < j { b } else { modk(-(b as i64), k) };
            entry[slot] = entry[slot] + value;
        }
        if entry.iter().all(|v| v.is_zero()) {
            self.couplings.remove(&key);
        }
        Ok(())
    }

    /// Neighbor lists of the interaction graph (pairs with a stored table).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in self.couplings.keys() {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    /// Energy of a dense coloring over all `n` qudits; inactive entries are ignored.
    pub fn energy_of(&self, colors: &[usize]) -> T {
        self.couplings
            .iter()
            .fold(self.offset, |acc, (&(i, j), table)| {
                acc + table[modk(colors[j] as i64 - colors[i] as i64, self.k)]
            })
    }

    /// `offset + Σ_{i<j} J_ij(x_j − x_i)`; every active qudit must be colored.
    pub fn classical_energy(&self, x: &Coloring) -> Result<T> {
        let mut colors = vec![0usize; self.n];
        for &q in &self.active {
            colors[q] = x.get(q).ok_or(Error::MissingColor(q))? % self.k;
        }
        Ok(self.energy_of(&colors))
    }

    pub(crate) fn deactivate(&mut self, q: usize) {
        self.active.remove(&q);
    }

    pub(crate) fn take_coupling(&mut self, i: usize, j: usize) -> Option<Vec<T>> {
        self.couplings.remove(&(i.min(j), i.max(j))).map(|t| {
            if i < j {
                t
            } else {
                (0..self.k).map(|b| t[modk(-(b as i64), self.k)]).collect()
            }
        })
    }

    /// Converts the coefficient type, e.g. exact integers to `f64`.
    pub fn map<U: Coefficient>(&self, f: impl Fn(T) -> U) -> CostHamiltonian<U> {
        CostHamiltonian {
            k: self.k,
            n: self.n,
            offset: f(self.offset),
            couplings: self
                .couplings
                .iter()
                .map(|(&key, t)| (key, t.iter().map(|&v| f(v)).collect()))
                .collect(),
            active: self.active.clone(),
        }
    }
}

impl<T: Real> CostHamiltonian<T> {
    pub fn fourier_tables(&self) -> FourierTables<T> {
        FourierTables::from_hamiltonian(self)
    }
}

/// Fourier data of the couplings:
/// `h_uv(a) = (1/k) Σ_b J_uv(b) ω^{ab}` and `ĥ_uv(b) = Σ_a h_uv(a) ω^{ab}`,
/// with `ω = exp(2πi/k)`. For real couplings `ĥ_uv(b) = J_uv(−b)`.
#[derive(Debug, Clone)]
pub struct FourierTables<T> {
    k: usize,
    h: BTreeMap<(usize, usize), Vec<Cplx<T>>>,
    h_hat: BTreeMap<(usize, usize), Vec<Cplx<T>>>,
    adjacency: Vec<Vec<usize>>,
}

impl<T: Real> FourierTables<T> {
    pub fn from_hamiltonian(ham: &CostHamiltonian<T>) -> Self {
        let k = ham.k();
        let omega: Vec<Cplx<T>> = (0..k).map(|p| root_of_unity(k, p)).collect();
        let inv_k = T::one() / T::of_usize(k);
        let mut h = BTreeMap::new();
        let mut h_hat = BTreeMap::new();
        for (&key, table) in ham.couplings() {
            let hv: Vec<Cplx<T>> = (0..k)
                .map(|a| {
                    table
                        .iter()
                        .enumerate()
                        .fold(Complex::new(T::zero(), T::zero()), |acc, (b, &j)| {
                            acc + omega[(a * b) % k] * j
                        })
                        * inv_k
                })
                .collect();
            let hh: Vec<Cplx<T>> = (0..k)
                .map(|b| {
                    hv.iter()
                        .enumerate()
                        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, &x)| {
                            acc + x * omega[(a * b) % k]
                        })
                })
                .collect();
            h.insert(key, hv);
            h_hat.insert(key, hh);
        }
        FourierTables {
            k,
            h,
            h_hat,
            adjacency: ham.adjacency(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `h_uv(a)` for an ordered pair, using `h_vu(a) = h_uv(−a)`.
    pub fn h(&self, u: usize, v: usize, a: usize) -> Cplx<T> {
        Self::oriented(&self.h, self.k, u, v, a)
    }

    /// `ĥ_uv(b)` for an ordered pair, using `ĥ_vu(b) = ĥ_uv(−b)`.
    pub fn h_hat(&self, u: usize, v: usize, b: usize) -> Cplx<T> {
        Self::oriented(&self.h_hat, self.k, u, v, b)
    }

    pub fn h_table(&self, u: usize, v: usize) -> Option<Vec<Cplx<T>>> {
        self.contains(u, v)
            .then(|| (0..self.k).map(|a| self.h(u, v, a)).collect())
    }

    pub fn h_hat_table(&self, u: usize, v: usize) -> Option<Vec<Cplx<T>>> {
        self.contains(u, v)
            .then(|| (0..self.k).map(|b| self.h_hat(u, v, b)).collect())
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.h.contains_key(&(u.min(v), u.max(v)))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.h.keys().copied()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    fn oriented(
        map: &BTreeMap<(usize, usize), Vec<Cplx<T>>>,
        k: usize,
        u: usize,
        v: usize,
        idx: usize,
    ) -> Cplx<T> {
        let zero = Complex::new(T::zero(), T::zero());
        if u < v {
            map.get(&(u, v)).map_or(zero, |t| t[idx % k])
        } else {
            map.get(&(v, u))
                .map_or(zero, |t| t[modk(-(idx as i64), k)])
        }
    }
}

/// JSON layout `{k, n, offset, couplings: [{i, j, J: [...]}, ...]}`.
/// `active` is optional and defaults to every qudit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianFile {
    pub k: usize,
    pub n: usize,
    #[serde(default)]
    pub offset: f64,
    pub couplings: Vec<CouplingEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingEntry {
    pub i: usize,
    pub j: usize,
    #[serde(rename = "J")]
    pub table: Vec<f64>,
}

impl TryFrom<HamiltonianFile> for CostHamiltonian<f64> {
    type Error = Error;

    fn try_from(file: HamiltonianFile) -> Result<Self> {
        let mut h = CostHamiltonian::new(file.k, file.n)?;
        h.offset = file.offset;
        for c in &file.couplings {
            if c.table.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coupling on ({}, {})",
                    c.i, c.j
                )));
            }
            h.add_coupling(c.i, c.j, &c.table)?;
        }
        if let Some(active) = file.active {
            if let Some(&q) = active.iter().find(|&&q| q >= file.n) {
                return Err(Error::InvalidArgument(format!("active qudit {q} out of range")));
            }
            h.active = active.into_iter().collect();
        }
        for &(i, j) in h.couplings.keys() {
            if !h.active.contains(&i) || !h.active.contains(&j) {
                return Err(Error::InvalidArgument(format!(
                    "coupling ({i}, {j}) touches an inactive qudit"
                )));
            }
        }
        Ok(h)
    }
}

impl From<&CostHamiltonian<f64>> for HamiltonianFile {
    fn from(h: &CostHamiltonian<f64>) -> Self {
        HamiltonianFile {
            k: h.k,
            n: h.n,
            offset: h.offset,
            couplings: h
                .couplings
                .iter()
                .map(|(&(i, j), t)| CouplingEntry {
                    i,
                    j,
                    table: t.clone(),
                })
                .collect(),
            active: (h.active.len() != h.n).then(|| h.active.iter().copied().collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Cplx<f64>, b: Cplx<f64>, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn triangle_couplings() {
        let h = CostHamiltonian::<i64>::from_graph(&Graph::complete(3), 3).unwrap();
        assert_eq!(h.num_couplings(), 3);
        for t in h.couplings().values() {
            assert_eq!(t, &vec![0, 1, 1]);
        }
        assert_eq!(h.offset(), 0);
    }

    #[test]
    fn empty_and_single_edge() {
        let empty = Graph::new(4, []).unwrap();
        let h = CostHamiltonian::<f64>::from_graph(&empty, 3).unwrap();
        assert_eq!(h.num_couplings(), 0);
        assert_eq!(h.offset(), 0.0);

        let edge = Graph::new(2, [(0, 1)]).unwrap();
        let h = CostHamiltonian::<i64>::from_graph(&edge, 2).unwrap();
        assert_eq!(h.couplings()[&(0, 1)], vec![0, 1]);
    }

    #[test]
    fn k_must_be_at_least_two() {
        assert!(CostHamiltonian::<f64>::new(1, 3).is_err());
    }

    #[test]
    fn max3cut_fourier_tables() {
        let edge = Graph::new(2, [(0, 1)]).unwrap();
        let h = CostHamiltonian::<f64>::from_graph(&edge, 3).unwrap();
        let ft = h.fourier_tables();
        let expected_h = [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for (a, &e) in expected_h.iter().enumerate() {
            assert!(close(ft.h(0, 1, a), Complex::new(e, 0.0), 1e-12));
        }
        let expected_hat = [0.0, 1.0, 1.0];
        for (b, &e) in expected_hat.iter().enumerate() {
            assert!(close(ft.h_hat(0, 1, b), Complex::new(e, 0.0), 1e-12));
        }
    }

    #[test]
    fn zero_couplings_give_zero_tables() {
        let mut h = CostHamiltonian::<f64>::new(3, 2).unwrap();
        h.add_coupling(0, 1, &[0.0, 0.0, 0.0]).unwrap();
        let ft = h.fourier_tables();
        assert!(ft.h_table(0, 1).is_none());
        assert_eq!(ft.h_hat(0, 1, 2), Complex::new(0.0, 0.0));
    }

    #[test]
    fn reversed_orientation_is_folded() {
        let mut h = CostHamiltonian::<i64>::new(3, 3).unwrap();
        h.add_coupling(2, 0, &[5, 7, 11]).unwrap();
        // J_20(b) = J_02(-b)
        assert_eq!(h.couplings()[&(0, 2)], vec![5, 11, 7]);
        assert_eq!(h.coupling(2, 0, 1), 7);
        assert_eq!(h.coupling(0, 2, 1), 11);
        h.add_coupling(0, 2, &[-5, -11, -7]).unwrap();
        assert_eq!(h.num_couplings(), 0);
    }

    #[test]
    fn classical_energy_examples() {
        let k3 = CostHamiltonian::<i64>::from_graph(&Graph::complete(3), 3).unwrap();
        assert_eq!(k3.classical_energy(&Coloring::from_slice(&[0, 1, 2])).unwrap(), 3);
        assert_eq!(k3.classical_energy(&Coloring::from_slice(&[0, 0, 0])).unwrap(), 0);
        let partial = Coloring::from_slice(&[0, 1]);
        assert!(matches!(
            k3.classical_energy(&partial),
            Err(Error::MissingColor(2))
        ));
    }

    #[test]
    fn k4_three_colors_best_is_five() {
        // exhaustive check over all 3^4 colorings
        let h = CostHamiltonian::<i64>::from_graph(&Graph::complete(4), 3).unwrap();
        let mut best = 0;
        for code in 0..81usize {
            let x: Vec<usize> = (0..4).map(|q| (code / 3usize.pow(q)) % 3).collect();
            best = best.max(h.energy_of(&x));
        }
        assert_eq!(best, 5);
    }

    #[test]
    fn file_round_trip() {
        let mut h = CostHamiltonian::<f64>::new(3, 4).unwrap();
        h.add_coupling(0, 3, &[0.5, -1.0, 2.0]).unwrap();
        h.set_offset(1.25);
        let file = HamiltonianFile::from(&h);
        let text = serde_json::to_string(&file).unwrap();
        let back: HamiltonianFile = serde_json::from_str(&text).unwrap();
        assert_eq!(CostHamiltonian::try_from(back).unwrap(), h);

        let bad = r#"{"k":3,"n":2,"couplings":[{"i":0,"j":1,"J":[1,2]}]}"#;
        let file: HamiltonianFile = serde_json::from_str(bad).unwrap();
        assert!(CostHamiltonian::try_from(file).is_err());
    }

    fn table_strategy() -> impl Strategy<Value = (usize, Vec<f64>, bool)> {
        (2usize..6).prop_flat_map(|k| {
            (
                Just(k),
                prop::collection::vec(-5.0f64..5.0, k),
                any::<bool>(),
            )
        })
    }

    proptest! {
        #[test]
        fn fourier_symmetries((k, table, integral) in table_strategy()) {
            let table: Vec<f64> = if integral {
                table.iter().map(|v| v.round()).collect()
            } else {
                table
            };
            let mut h = CostHamiltonian::<f64>::new(k, 2).unwrap();
            h.add_coupling(0, 1, &table).unwrap();
            prop_assume!(h.num_couplings() == 1);
            let ft = h.fourier_tables();
            for r in 0..k {
                let conj = ft.h(0, 1, r).conj();
                prop_assert!(close(conj, ft.h(0, 1, (k - r) % k), 1e-12));
                prop_assert!(close(ft.h(1, 0, r), ft.h(0, 1, (k - r) % k), 1e-12));
            }
            for b in 0..k {
                let expected = Complex::new(table[(k - b) % k], 0.0);
                prop_assert!(close(ft.h_hat(0, 1, b), expected, 1e-12));
            }
        }

        #[test]
        fn energy_is_shift_invariant(
            colors in prop::collection::vec(0usize..4, 5),
            shift in 0usize..4,
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut h = CostHamiltonian::<i64>::new(4, 5).unwrap();
            for i in 0..5 {
                for j in i + 1..5 {
                    if rng.random_bool(0.6) {
                        let t: Vec<i64> = (0..4).map(|_| rng.random_range(-3..4)).collect();
                        h.add_coupling(i, j, &t).unwrap();
                    }
                }
            }
            let shifted: Vec<usize> = colors.iter().map(|c| (c + shift) % 4).collect();
            prop_assert_eq!(h.energy_of(&colors), h.energy_of(&shifted));
        }
    }
}
