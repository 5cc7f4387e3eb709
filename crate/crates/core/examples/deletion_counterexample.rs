//! A deletion-LDP randomizer whose replacement guarantee is
//! (2 eps, (e^eps + 1) delta) and no better, so (2 eps, 2 delta) is false.

use dpcalc::ldp::{
    build_counterexample, counterexample_deletion_delta, counterexample_delta_cap,
    deletion_to_replacement_budget,
};
use dpcalc::{audit_deletion_ldp, audit_replacement_ldp, Dist, Result};

pub fn run_example() -> Result<()> {
    let (eps, delta) = (0.25f64, 1.0 / 6.0);
    let r = build_counterexample(eps, delta)?;
    let uniform = Dist::uniform(3)?;
    println!("R(0) = {:?}", r.row(0).mass());
    println!("R(1) = {:?}", r.row(1).mass());
    println!(
        "deletion delta vs uniform at eps: {:.6}",
        audit_deletion_ldp(&r, &uniform, eps)?
    );

    let b = deletion_to_replacement_budget(eps, delta)?;
    let audited = audit_replacement_ldp(&r, 2.0 * eps)?;
    println!(
        "replacement delta at 2 eps: {audited:.6} (bound {:.6}, claimed 2 delta {:.6})",
        b.delta,
        2.0 * delta
    );
    let gap = r.row(1).get(1) - ((2.0 * eps).exp() * r.row(0).get(1) + 2.0 * delta);
    println!("outcome 2 exceeds the 2 delta claim by {gap:.4}");

    // the construction is deletion LDP only while delta <= (2 - e^eps)/3
    for eps in [0.1, 0.3, 0.5] {
        let cap = counterexample_delta_cap(eps);
        println!(
            "eps {eps}: deletion holds up to delta {cap:.4}; at delta 0.2 the exact deletion delta is {:.4}",
            counterexample_deletion_delta(eps, 0.2)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
