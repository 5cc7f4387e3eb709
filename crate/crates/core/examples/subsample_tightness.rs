//! Running a mechanism on a random m-subset of n records: the closed-form
//! budget, and the base for which it is exact.

use dpcalc::subsample::{subsample_budget, verify_subsample_tightness};
use dpcalc::Result;

pub fn run_example() -> Result<()> {
    let b = subsample_budget(1.0, 0.01, 0.1)?;
    println!("(1, 0.01) at p = 0.1 -> ({:.7}, {})", b.eps, b.delta);
    for (n, m) in [(2, 1), (3, 1), (4, 1), (4, 2), (5, 3)] {
        let t = verify_subsample_tightness(1.0, n, m)?;
        println!(
            "n {n} m {m}: audited {:.6}, bound {:.6}, gap {:e}",
            t.audited_eps, t.bound, t.gap
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
