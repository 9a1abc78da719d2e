//! Scaled Bessel values, the Chebyshev coefficients built from them and the
//! resulting uniform approximation of `exp(-tau * lambda)` on `[0, 2]`.

use heatcheb::bounds::g_bound;
use heatcheb::prelude::*;
use heatcheb::special::bessel_ie_scaled;

fn main() -> Result<()> {
    let ie = bessel_ie_scaled(4, 1.0)?;
    println!("e^-1 I_k(1), k=0..4: {ie:.12?}");

    for tau in [0.5, 5.0, 50.0] {
        let c = cheb_coefficients(tau, 8)?;
        let head: Vec<String> = c.as_slice().iter().map(|v| format!("{v:+.3e}")).collect();
        println!("tau={tau:>4}: c_0..c_8 = {}", head.join(" "));
    }

    // Below roughly (K + 1) machine epsilons the measured error is round-off.
    println!("\n   tau   K    sup|h - p_K|   g(K, tau)   round-off");
    for tau in [1.0, 10.0] {
        for order in [
            (tau as usize) / 2 + 2,
            tau as usize + 5,
            2 * tau as usize + 10,
        ] {
            let coeffs = cheb_coefficients(tau, order)?;
            let sup = (0..=2000)
                .map(|i| {
                    let lambda = i as f64 / 1000.0;
                    ((-tau * lambda).exp() - coeffs.eval(lambda)).abs()
                })
                .fold(0.0, f64::max);
            let floor = (order + 1) as f64 * f64::EPSILON;
            println!(
                "{tau:>6} {order:>3}   {sup:.3e}      {:.3e}   {floor:.1e}",
                g_bound(order, tau)?
            );
        }
    }
    Ok(())
}
