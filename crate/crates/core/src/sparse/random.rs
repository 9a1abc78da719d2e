use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Edge;
use crate::error::{Error, Result};

/// G(n, p) random graph with unit weights.
///
/// Pairs are visited in lexicographic order `(i, j), i < j`, one uniform draw
/// per pair, so the output depends only on `(n, p, seed)`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Vec<Edge>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "connection probability must lie in (0, 1), got {p}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    Ok(edges)
}
