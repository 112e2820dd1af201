//! How weaving (with the scaling weights omega_k = k - 1) grows with system
//! size, for a fixed number of excitations versus a fixed filling fraction.
//!
//! Run with: cargo run --release --example weaving_scaling

use dicke_gmc::dicke::DickeLabel;
use dicke_gmc::gmc::{self, WeightScheme};

fn weaving_of(n: usize, ne: usize) -> Result<f64, dicke_gmc::Error> {
    let profile = gmc::profile(&DickeLabel::new(n, ne)?)?;
    gmc::weaving(&profile, &WeightScheme::k_minus_one(n))
}

fn main() -> Result<(), dicke_gmc::Error> {
    let sizes = [10usize, 20, 50, 100, 200];

    println!("fixed excitation counts:");
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "N", "ne=1", "ne=2", "ne=5", "ne=10");
    for &n in &sizes {
        let w: Vec<f64> = [1usize, 2, 5, 10]
            .iter()
            .map(|&ne| weaving_of(n, ne.min(n)))
            .collect::<Result<_, _>>()?;
        println!("{n:>6} {:>12.4} {:>12.4} {:>12.4} {:>12.4}", w[0], w[1], w[2], w[3]);
    }

    println!("\nexcitations as a fraction of N:");
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "N", "N/10", "N/5", "N/3", "N/2");
    for &n in &sizes {
        let w: Vec<f64> = [10usize, 5, 3, 2]
            .iter()
            .map(|&d| weaving_of(n, n / d))
            .collect::<Result<_, _>>()?;
        println!("{n:>6} {:>12.4} {:>12.4} {:>12.4} {:>12.4}", w[0], w[1], w[2], w[3]);
    }
    println!("\nfractional filling weaves faster than any fixed excitation count.");
    Ok(())
}
