//! Central DP of a mechanism over datasets, with an explicit neighbor
//! relation, loaded from and saved to the JSON mechanism format.

use dpcalc::subsample::DatasetSpace;
use dpcalc::{audit_central, audit_pure_central, Dist, Mechanism, Result};

pub fn run_example() -> Result<()> {
    // noisy count of ones over two binary records
    let space = DatasetSpace::new(2, 2);
    let noise = [0.25, 0.5, 0.25];
    let rows = (0..space.len())
        .map(|i| {
            let ones: usize = space.dataset(i).iter().sum();
            let mut mass = vec![0.0; 5];
            for (j, p) in noise.iter().enumerate() {
                mass[ones + j] += p;
            }
            Dist::new(mass)
        })
        .collect::<Result<Vec<_>>>()?;
    let outputs = (0..5).map(|v| v.to_string()).collect();
    let m = Mechanism::from_dists(space.labels(), outputs, rows)?;

    let path = std::env::temp_dir().join("dpcalc_central_example.json");
    m.save(&path)?;
    let loaded = Mechanism::load(&path)?;
    println!("{}", loaded.to_json_string()?);

    let neighbors = space.neighbors();
    println!("{} neighbor pairs", neighbors.len());
    println!("pure eps {}", audit_pure_central(&loaded, &neighbors)?);
    for eps in [0.0, 0.5, 1.0] {
        println!(
            "eps {eps}: delta {:.4}",
            audit_central(&loaded, &neighbors, eps)?
        );
    }
    std::fs::remove_file(path)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
