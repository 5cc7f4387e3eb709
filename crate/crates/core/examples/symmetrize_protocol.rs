//! Compiling per-user randomizers into one symmetric randomizer, and the
//! number of users the compiled protocol needs.

use dpcalc::ldp::{
    coupon_rounds, symmetrize, CoinModel, CompiledRandomizer, COMPILATION_FAIL_PROB,
};
use dpcalc::{audit_pure, Mechanism, Result};

pub fn run_example() -> Result<()> {
    let rs = vec![
        Mechanism::randomized_response(0.5)?,
        Mechanism::randomized_response(1.0)?,
        Mechanism::from_rows(vec![vec![0.6, 0.3, 0.1], vec![0.3, 0.3, 0.4]])?,
    ];
    for r in &rs {
        println!("part eps {:.4}", audit_pure(r)?);
    }
    let compiled = symmetrize(&rs, CoinModel::Private)?;
    if let CompiledRandomizer::Private(m) = &compiled.combined {
        println!("outputs {:?}", m.outputs());
        println!("combined eps {:.4}", audit_pure(m)?);
    }
    println!("users needed: {}", compiled.n_prime);
    for n in [10, 100, 1000] {
        println!(
            "n = {n}: {} draws",
            coupon_rounds(n, COMPILATION_FAIL_PROB)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
