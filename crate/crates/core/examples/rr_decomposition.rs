//! Any two rows of a pure-LDP mechanism are randomized response applied to
//! a binary mechanism Q; approximate mechanisms need extra leakage terms.

use dpcalc::converters::{leaky_rr_mixture, rr_decompose_pure, verify_leaky_rr};
use dpcalc::{audit_pure, Mechanism, PrivacyBudget, Result};

pub fn run_example() -> Result<()> {
    let r = Mechanism::from_rows(vec![
        vec![0.5, 0.3, 0.2],
        vec![0.2, 0.35, 0.45],
        vec![0.3, 0.3, 0.4],
    ])?;
    let q = rr_decompose_pure(&r, 0, 1, None)?;
    let eps = audit_pure(&r.restrict(&[0, 1])?)?;
    println!("pair budget {eps:.4}");
    println!("Q(0) = {:?}", q.row(0).mass());
    println!("Q(1) = {:?}", q.row(1).mass());

    // rebuild r(0) from Q
    let a = eps.exp() / (eps.exp() + 1.0);
    let rebuilt: Vec<f64> = (0..3)
        .map(|y| a * q.row(0).get(y) + (1.0 - a) * q.row(1).get(y))
        .collect();
    println!("a Q(0) + b Q(1) = {rebuilt:?}");

    // leaky form: the verifier accepts mixtures built with the same weights
    let q4 = Mechanism::from_rows(vec![
        vec![0.6, 0.3, 0.1],
        vec![0.1, 0.3, 0.6],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ])?;
    let budget = PrivacyBudget::new(0.8, 0.05)?;
    let mixed = leaky_rr_mixture(&q4, budget)?;
    let check = verify_leaky_rr(&mixed, 0, 1, &q4, budget)?;
    println!(
        "leaky decomposition holds: {} (residual {:e})",
        check.holds, check.max_residual
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
