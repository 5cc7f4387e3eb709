//! Exact shuffle-model audit of randomized response compared with the
//! closed-form amplification bound.

use dpcalc::shuffle::{amplification_eps, AmplificationParams};
use dpcalc::{EnumLimits, Mechanism, Result, ShuffleAudit};

pub fn run_example() -> Result<()> {
    let limits = EnumLimits {
        max_users: 400,
        ..EnumLimits::default()
    };
    let delta = 0.05;
    for eps_l in [0.5, 1.0] {
        let rr = Mechanism::randomized_response(eps_l)?;
        for n in [10u32, 40, 100, 200] {
            let audit = ShuffleAudit::with_limits(&rr, n, &limits)?;
            let params = AmplificationParams::new(eps_l, delta, n as u64, 1.0)?;
            let bound = match amplification_eps(&params) {
                Ok(e) => format!("{e:.4} (exact delta there {:.2e})", audit.delta_at(e)?),
                Err(_) => "outside its admissible range".to_string(),
            };
            let exact = audit.eps_for_delta(1e-4)?.unwrap_or(f64::NAN);
            println!("eps_l {eps_l} n {n:>3}: exact eps at delta 1e-4 = {exact:.4}; bound at delta {delta}: {bound}");
        }
    }
    // robust variant: only 80% of users follow the protocol
    let p = AmplificationParams::new(0.5, delta, 250, 0.8)?;
    println!(
        "gamma 0.8, n 250: {} honest users, eps {:.4}",
        p.effective_n(),
        amplification_eps(&p)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
