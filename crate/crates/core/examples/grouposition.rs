//! Group privacy of k independent randomizers, checked against the exact
//! privacy-loss tail of the product mechanism.

use dpcalc::ldp::{grouposition_eps, grouposition_exact_tail, GroupositionParams};
use dpcalc::{Mechanism, Result};

pub fn run_example() -> Result<()> {
    let eps = 0.5;
    let rr = Mechanism::randomized_response(eps)?;
    for delta_prime in [0.1, 0.01] {
        for k in [1u32, 2, 4, 6] {
            let e = grouposition_eps(&GroupositionParams::new(k, eps, delta_prime, 0.0)?)?;
            let ks = k as usize;
            let tail = grouposition_exact_tail(&rr, &vec![0; ks], &vec![1; ks], e)?;
            println!(
                "k {k} delta' {delta_prime}: eps' {e:.4} (naive {:.1}), tail {tail:.5}",
                k as f64 * eps
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
