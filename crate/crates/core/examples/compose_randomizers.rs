//! Feeding the output of one LDP randomizer into another: the closed-form
//! budget and a search showing it cannot be improved.

use dpcalc::ldp::{compose_eps, compose_tightness_search};
use dpcalc::{audit_pure, Mechanism, Result};

pub fn run_example() -> Result<()> {
    for (a, b) in [(0.25, 0.25), (1.0, 1.0), (0.5, 2.0), (2.0, 2.0)] {
        let bound = compose_eps(a, b)?;
        let found = compose_tightness_search(a, b, 400)?;
        println!(
            "{a} then {b}: bound {bound:.6}, search {found:.6}, min {:.2}, ab/2 {:.4}",
            f64::min(a, b),
            a * b / 2.0
        );
    }
    let chained =
        Mechanism::randomized_response(1.0)?.then(&Mechanism::randomized_response(1.0)?)?;
    println!("RR(1) then RR(1) audits to {:.6}", audit_pure(&chained)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
