//! True minimum orders from the dense oracle next to every bound's choice.

use heatcheb::bounds::{min_order, true_min_order_with_spectrum, BoundKind, SignalStats};
use heatcheb::oracle::DenseSpectrum;
use heatcheb::prelude::*;

fn main() -> Result<()> {
    let n = 200;
    let l = build_laplacian(&erdos_renyi(n, 0.05, 1)?, n, LaplacianKind::Combinatorial)?;
    let x = GraphSignal::standard_normal(n, 1);
    let stats = SignalStats::from_signal(&x)?;
    let spectrum = DenseSpectrum::of(&l)?;
    let lambda_max = estimate_lambda_max(&l, 1e-4, 1)?;
    println!(
        "dense: lambda in [{:.2e}, {:.4}], orthonormality error {:.1e}",
        spectrum.eigenvalues()[0],
        spectrum.lambda_max(),
        spectrum.orthonormality_error()
    );

    let tol = 1e-5;
    print!("{:>8} {:>8} {:>6}", "tau", "tau'", "true");
    for kind in BoundKind::ALL {
        print!("{:>14}", kind.name());
    }
    println!();
    for tau in [0.01, 0.1, 0.5, 1.0, 5.0, 10.0] {
        let tau_eff = lambda_max * tau / 2.0;
        let k_true = true_min_order_with_spectrum(&spectrum, &x, tau, tol, lambda_max)?;
        print!("{tau:>8} {tau_eff:>8.2} {k_true:>6}");
        for kind in BoundKind::ALL {
            print!("{:>14}", min_order(kind, tau_eff, tol, Some(&stats))?);
        }
        println!();
    }
    Ok(())
}
