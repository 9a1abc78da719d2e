//! Many scales from one Chebyshev basis: the basis costs `K` matrix-vector
//! products once, each extra scale only a weighted sum of cached vectors.

use std::time::Instant;

use heatcheb::diffusion::DiffusionPlan;
use heatcheb::prelude::*;

fn main() -> Result<()> {
    let n = 2500;
    let l = build_laplacian(&erdos_renyi(n, 0.01, 7)?, n, LaplacianKind::Combinatorial)?;
    let x = GraphSignal::standard_normal(n, 7);
    let scales: Vec<f64> = (0..20)
        .map(|i| 1e-3 * 10f64.powf(i as f64 * 4.0 / 19.0))
        .collect();
    let opts = DiffusionOptions::default();

    let result = expm_multiscale(&l, &x, &scales, &opts)?;
    println!(
        "{} scales, lambda_max={:.3}, K={} ({}), matvecs={}",
        scales.len(),
        result.lambda_max,
        result.order,
        result.bound_kind,
        result.matvecs
    );

    let plan = DiffusionPlan::new(&l, &x, &scales, &opts.with_lambda_max(result.lambda_max))?;
    let t0 = Instant::now();
    let cache = plan.build_basis(&l, &x)?;
    let basis = t0.elapsed();
    let t1 = Instant::now();
    for i in 0..scales.len() {
        std::hint::black_box(plan.diffuse(&cache, i)?);
    }
    let per_scale = t1.elapsed() / scales.len() as u32;
    println!("basis {basis:?}, per extra scale {per_scale:?}");

    for (tau, y) in scales.iter().zip(&result.outputs).step_by(5) {
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        println!(
            "tau={tau:<10.4} ||y||={norm:.6} sum={:.6}",
            y.iter().sum::<f64>()
        );
    }
    Ok(())
}
