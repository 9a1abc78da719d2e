//! Orders selected by each bound family, and where the signal-specific bound
//! takes over from the generic one.

use heatcheb::bounds::{min_order, select_bound, BoundKind, SignalStats};
use heatcheb::prelude::GraphSignal;
use heatcheb::Result;

fn main() -> Result<()> {
    let x = GraphSignal::standard_normal(200, 0);
    let stats = SignalStats::from_signal(&x)?;
    let crossover = 0.25 * stats.energy_ratio().expect("non-zero sum").ln();
    println!("n ||x||^2 / a1^2 = {:.1}", stats.energy_ratio().unwrap());
    println!("specific bound preferred for tau' >= {crossover:.3}\n");

    let tol = 1e-5;
    print!("{:>8}", "tau'");
    for kind in BoundKind::ALL {
        print!("{:>14}", kind.name());
    }
    println!("{:>14}", "auto");
    for tau in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 200.0] {
        print!("{tau:>8}");
        for kind in BoundKind::ALL {
            print!("{:>14}", min_order(kind, tau, tol, Some(&stats))?);
        }
        println!("{:>14}", select_bound(tau, &stats).name());
    }
    Ok(())
}
