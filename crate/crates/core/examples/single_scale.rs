//! One diffusion with an a-priori certified order, checked against the dense
//! eigendecomposition.

use heatcheb::diffusion::measure_errors;
use heatcheb::oracle::exact_diffusion;
use heatcheb::prelude::*;

fn main() -> Result<()> {
    let n = 300;
    let l = build_laplacian(&erdos_renyi(n, 0.03, 11)?, n, LaplacianKind::Combinatorial)?;
    let x = GraphSignal::dirac(n, 0)?;
    let opts = DiffusionOptions::default().with_tol(1e-8);

    for tau in [0.05, 0.5, 5.0] {
        let (y, report) = expm_multiply(&l, &x, tau, &opts)?;
        let w = exact_diffusion(&l, x.values(), tau)?;
        let max_diff = y
            .iter()
            .zip(&w)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let (_, eta) = measure_errors(&l, &x, tau, report.order, report.lambda_max)?;
        println!(
            "tau={tau:<5} tau'={:<8.3} K={:<4} bound={} ({:.1e})  measured eta={eta:.1e}  max|y-w|={max_diff:.1e}",
            report.tau_eff, report.order, report.bound_kind, report.bound_value
        );
    }
    Ok(())
}
