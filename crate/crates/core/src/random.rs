//! Seeded generators for random mechanisms.
//!
//! All randomized checks use ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded from
//! a user seed and a stable per-check tag, so results do not depend on the
//! order in which checks run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::Dist;
use crate::mechanism::Mechanism;

/// FNV-1a, used only to turn check tags into seeds.
fn fnv1a(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn rng_for(seed: u64, tag: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(tag))
}

/// Random distribution with every entry at least `floor / k` (pass 0 to allow
/// near-zero entries). Exact zeros appear with probability `zero_prob` per entry.
pub fn random_dist<R: Rng>(rng: &mut R, k: usize, floor: f64, zero_prob: f64) -> Dist {
    loop {
        let mut mass: Vec<f64> = (0..k)
            .map(|_| {
                if zero_prob > 0.0 && rng.gen_bool(zero_prob) {
                    0.0
                } else {
                    // heavier tails than uniform give more varied ratios
                    let u: f64 = rng.gen_range(1e-6..1.0);
                    -u.ln() + floor
                }
            })
            .collect();
        let total: f64 = mass.iter().sum();
        if total <= 0.0 {
            continue;
        }
        for v in &mut mass {
            *v /= total;
        }
        return Dist::new(mass).expect("normalized by construction");
    }
}

/// Random mechanism with strictly positive entries (finite pure budget).
pub fn random_mechanism<R: Rng>(rng: &mut R, inputs: usize, outputs: usize) -> Mechanism {
    let rows = (0..inputs)
        .map(|_| random_dist(rng, outputs, 0.05, 0.0))
        .collect();
    Mechanism::from_dist_rows(rows).expect("valid shape")
}

/// Random mechanism whose rows may contain exact zeros.
pub fn random_sparse_mechanism<R: Rng>(rng: &mut R, inputs: usize, outputs: usize) -> Mechanism {
    let rows = (0..inputs)
        .map(|_| random_dist(rng, outputs, 0.0, 0.2))
        .collect();
    Mechanism::from_dist_rows(rows).expect("valid shape")
}
