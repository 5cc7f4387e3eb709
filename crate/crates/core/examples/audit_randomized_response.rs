//! Exact audit of binary randomized response: the pure budget, the delta at
//! a smaller eps, and the full trade-off curve.

use dpcalc::audit::eps_grid;
use dpcalc::{audit_pure, audit_replacement_ldp, Mechanism, Result, TradeoffCurve};

pub fn run_example() -> Result<()> {
    let rr = Mechanism::randomized_response(1.0)?;
    println!(
        "rows: {:?}",
        rr.rows()
            .iter()
            .map(|r| r.mass().to_vec())
            .collect::<Vec<_>>()
    );
    println!("pure eps = {}", audit_pure(&rr)?);
    println!(
        "delta at eps = 0.5: {:.6}",
        audit_replacement_ldp(&rr, 0.5)?
    );

    let curve = TradeoffCurve::from_fn(&eps_grid(1.0, 6), |e| audit_replacement_ldp(&rr, e))?;
    for p in curve.points() {
        println!("  eps {:.2}  delta {:.6}", p.eps, p.delta);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
