//! Trimming an approximate deletion-LDP randomizer to a pure one that stays
//! within total variation delta of the original.

use dpcalc::ldp::{build_counterexample, trim_to_pure_deletion};
use dpcalc::{audit_deletion_ldp, tv_distance, Dist, Result};

pub fn run_example() -> Result<()> {
    let (eps, delta) = (0.25, 1.0 / 6.0);
    let r = build_counterexample(eps, delta)?;
    let r0 = Dist::uniform(3)?;
    let t = trim_to_pure_deletion(&r, &r0, eps, delta)?;
    for x in 0..2 {
        println!(
            "row {x}: {:?} -> {:?} (tv {:.4})",
            r.row(x).mass(),
            t.row(x).mass(),
            tv_distance(r.row(x), t.row(x))?
        );
    }
    println!(
        "deletion delta before {:.4}, after {:e}",
        audit_deletion_ldp(&r, &r0, eps)?,
        audit_deletion_ldp(&t, &r0, eps)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
