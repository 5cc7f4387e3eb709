//! A one-message shuffle protocol is itself an LDP protocol with ln n
//! extra budget; the exact audit shows how loose that is for small n.

use dpcalc::shuffle::shuffle_to_ldp_budget;
use dpcalc::{audit_replacement_ldp, CountVector, Mechanism, Result, ShuffleAudit};

pub fn run_example() -> Result<()> {
    let r = Mechanism::from_rows(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.3, 0.6]])?;
    for n in [1u32, 2, 4, 8] {
        let audit = ShuffleAudit::new(&r, n)?;
        let eps_s = 0.5;
        let delta_s = audit.delta_at(eps_s)?;
        let b = shuffle_to_ldp_budget(eps_s, delta_s, n as u64)?;
        println!(
            "n {n}: shuffle ({eps_s}, {delta_s:.4}), local bound ({:.3}, {:.4}), local audit {:.4}",
            b.eps,
            b.delta,
            audit_replacement_ldp(&r, b.eps)?
        );
    }
    println!(
        "datasets of 3 users over 2 inputs: {:?}",
        CountVector::all(2, 3)
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
