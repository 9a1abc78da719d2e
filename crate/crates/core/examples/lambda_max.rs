//! Power-iteration estimate of the largest Laplacian eigenvalue against the
//! dense spectrum. The estimate is inflated slightly so it stays an upper bound.

use heatcheb::oracle::DenseSpectrum;
use heatcheb::prelude::*;

fn main() -> Result<()> {
    println!(
        "{:>5} {:>6} {:>5} {:>10} {:>10} {:>8}",
        "n", "p", "seed", "dense", "estimate", "ratio"
    );
    for (n, p) in [(100, 0.1), (300, 0.02), (400, 0.05)] {
        for seed in 0..3 {
            let l = build_laplacian(&erdos_renyi(n, p, seed)?, n, LaplacianKind::Combinatorial)?;
            let truth = DenseSpectrum::of(&l)?.lambda_max();
            let est = estimate_lambda_max(&l, 1e-4, seed)?;
            println!(
                "{n:>5} {p:>6} {seed:>5} {truth:>10.4} {est:>10.4} {:>8.4}",
                est / truth
            );
        }
    }
    Ok(())
}
