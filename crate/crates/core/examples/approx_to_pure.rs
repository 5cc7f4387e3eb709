//! Turning an approximate mechanism into a pure one by mixing in uniform
//! noise, and reading a pure budget as an approximate one.

use dpcalc::converters::{approx_to_pure_finite, pure_to_approx};
use dpcalc::{audit_pure, audit_replacement_ldp, tv_distance, Mechanism, Result};

pub fn run_example() -> Result<()> {
    // output 2 is only reachable from input 1: no finite pure budget
    let a = Mechanism::from_rows(vec![vec![0.7, 0.3, 0.0], vec![0.25, 0.7, 0.05]])?;
    let eps = 1.0;
    let delta = audit_replacement_ldp(&a, eps)?;
    println!(
        "A is ({eps}, {delta:.4})-DP, pure eps = {}",
        audit_pure(&a)?
    );

    for eta in [0.05, 0.1, 0.2] {
        let (a_prime, eps_prime) = approx_to_pure_finite(&a, eps, delta, eta)?;
        let moved =
            tv_distance(a.row(0), a_prime.row(0))?.max(tv_distance(a.row(1), a_prime.row(1))?);
        println!(
            "eta {eta:.2}: bound eps' {eps_prime:.4}, audited {:.4}, rows moved {moved:.3}",
            audit_pure(&a_prime)?
        );
    }

    let rr = Mechanism::randomized_response(1.0)?;
    let b = pure_to_approx(1.0, 0.1)?;
    println!(
        "RR(1) as ({:.1}, {:.1}): audited delta {:.4}",
        b.eps,
        b.delta,
        audit_replacement_ldp(&rr, b.eps)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
