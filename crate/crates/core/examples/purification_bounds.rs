//! Parameters for turning n approximate randomizers into pure ones.

use dpcalc::ldp::{purification_bounds, purification_t_range, PurificationParams};
use dpcalc::Result;

pub fn run_example() -> Result<()> {
    let (eps, delta, n) = (0.1, 1e-8, 100);
    let (lo, hi) = purification_t_range(eps, delta, n)?;
    println!("admissible rounds: [{lo:.3}, {hi:.1}]");
    for t in [12, 20, 50] {
        let b = purification_bounds(
            &PurificationParams::new(eps, delta, n, t)?,
            Some(&vec![16; n as usize]),
        )?;
        println!(
            "T {t}: eps {:.1}, tv {:.4}, {:.2} bits per user, {} public bits",
            b.ldp_eps,
            b.tv_bound,
            b.comm_bits,
            b.public_random_bits.unwrap_or(0)
        );
    }
    match purification_t_range(eps, 1e-2, n) {
        Ok(_) => println!("unexpectedly feasible"),
        Err(e) => println!("delta = 1e-2: {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
