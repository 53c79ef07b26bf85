//! Classical reference algorithms: uniformly random colorings and an SDP
//! relaxation with Newman-style sector rounding.

mod newman;
mod sdp;

pub use newman::{newman_best_of, newman_round, NewmanStats};
pub use sdp::{solve_sdp_relaxation, SdpConfig, SdpSolution};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hamiltonian::Coloring;

/// I.i.d. uniform colors in `0..k`.
pub fn random_coloring<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Result<Coloring> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let colors: Vec<usize> = (0..g.n()).map(|_| rng.random_range(0..k)).collect();
    Ok(Coloring::from_slice(&colors))
}

/// Mean and standard error of the cut size over `draws` random colorings.
pub fn random_cut_statistics(g: &Graph, k: usize, draws: usize, seed: u64) -> Result<(f64, f64)> {
    if draws == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..draws {
        let x = random_coloring(g, k, &mut rng)?;
        let cut = g.cut_size(&dense(&x, g.n())) as f64;
        sum += cut;
        sum_sq += cut * cut;
    }
    let n = draws as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let stderr = if draws > 1 { (var * n / (n - 1.0)).sqrt() / n.sqrt() } else { 0.0 };
    Ok((mean, stderr))
}

pub(crate) fn dense(x: &Coloring, n: usize) -> Vec<usize> {
    (0..n).map(|q| x.get(q).unwrap_or(0)).collect()
}
