//! Helpers shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qudit_qaoa::oracle::statevector_qaoa1;
use qudit_qaoa::{Angles, Graph, Hamiltonian64};

pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    loop {
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| rng.random_bool(p))
            .collect();
        if !edges.is_empty() {
            return Graph::new(n, edges).expect("valid edges");
        }
    }
}

/// Random graph with real coupling tables and an offset.
pub fn random_instance(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Hamiltonian64 {
    let g = random_graph(n, 0.5, rng);
    let mut h = Hamiltonian64::new(k, n).unwrap();
    for &(i, j) in g.edges() {
        let table: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        h.add_coupling(i, j, &table).unwrap();
    }
    h.set_offset(rng.random_range(-2.0..2.0));
    h
}

pub fn random_angles(k: usize, rng: &mut ChaCha8Rng) -> Angles<f64> {
    let beta = (0..k).map(|_| rng.random_range(-3.2..3.2)).collect();
    Angles::new(beta, rng.random_range(-3.2..3.2))
}


/// Best energy on the grid `β_0 = 0`, `β_1, β_2, γ ∈ {0, 0.01, …}` with
/// `β ∈ [0, 2π)`, `γ ∈ [0, π]`. At fixed `γ` the energy is a trigonometric
/// polynomial in `(β_1, β_2)` with frequencies in `−2..=2`, so 25 exact
/// state-vector evaluations determine it and the 629×629 grid is cheap.
pub fn dense_scan(h: &Hamiltonian64) -> f64 {
    let step = 0.01;
    let betas: Vec<f64> = (0..)
        .map(|i| i as f64 * step)
        .take_while(|&b| b < std::f64::consts::TAU)
        .collect();
    let gammas: Vec<f64> = (0..)
        .map(|i| i as f64 * step)
        .take_while(|&g| g <= std::f64::consts::PI)
        .collect();
    let nodes: Vec<f64> = (0..5).map(|m| std::f64::consts::TAU * m as f64 / 5.0).collect();
    let phase = |f: i32, x: f64| Complex::from_polar(1.0, f as f64 * x);
    // phase table for the dense evaluation, indexed [frequency + 2][beta index]
    let table: Vec<Vec<Complex<f64>>> = (-2..=2)
        .map(|f| betas.iter().map(|&b| phase(f, b)).collect())
        .collect();
    let mut best = f64::NEG_INFINITY;
    for &gamma in &gammas {
        let mut samples = [[0.0; 5]; 5];
        for (a, &b1) in nodes.iter().enumerate() {
            for (c, &b2) in nodes.iter().enumerate() {
                let angles = Angles::new(vec![0.0, b1, b2], gamma);
                samples[a][c] = statevector_qaoa1(h, &angles).unwrap().energy(h);
            }
        }
        // W[f1][f2] = (1/25) Σ samples · e^{−i(f1 b1 + f2 b2)}
        let mut w = [[Complex::new(0.0, 0.0); 5]; 5];
        for (f1, row) in w.iter_mut().enumerate() {
            for (f2, cell) in row.iter_mut().enumerate() {
                for a in 0..5 {
                    for c in 0..5 {
                        *cell += samples[a][c]
                            * phase(-(f1 as i32 - 2), nodes[a])
                            * phase(-(f2 as i32 - 2), nodes[c]);
                    }
                }
                *cell /= 25.0;
            }
        }
        for i1 in 0..betas.len() {
            let partial: [Complex<f64>; 5] =
                std::array::from_fn(|f2| (0..5).map(|f1| w[f1][f2] * table[f1][i1]).sum());
            for i2 in 0..betas.len() {
                let e: f64 = (0..5).map(|f2| (partial[f2] * table[f2][i2]).re).sum();
                best = best.max(e);
            }
        }
    }
    best
}

/// Every coloring of `n` qudits, in mixed-radix order.
pub fn colorings(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..k.pow(n as u32))
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let c = idx % k;
                    idx /= k;
                    c
                })
                .collect()
        })
        .collect()
}
