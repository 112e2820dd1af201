//! Correlation profiles of pure Dicke states at N = 1000.
//!
//! Prints how S^(k->N) and the genuine correlations S^k grow with the number
//! of excitations, and how the divisor-restricted view exposes the
//! finite-size zigzag (S^40 > S^50 between consecutive divisors).
//!
//! Run with: cargo run --release --example pure_state_profiles

use dicke_gmc::dicke::DickeLabel;
use dicke_gmc::gmc;

fn main() -> Result<(), dicke_gmc::Error> {
    let n = 1000;
    println!("{:>5} {:>14} {:>14} {:>14}", "ne", "T = S^(1->N)", "S^(2->N)", "max_k S^k");
    let mut half_profile = None;
    for ne in [1usize, 5, 50, 500] {
        let profile = gmc::profile(&DickeLabel::new(n, ne)?)?;
        let max_sk = (2..=n).map(|k| profile.s_k(k)).fold(f64::MIN, f64::max);
        println!(
            "{ne:>5} {:>14.6} {:>14.6} {:>14.6}",
            profile.total(),
            profile.s_higher(2),
            max_sk
        );
        if ne == 500 {
            half_profile = Some(profile);
        }
    }

    let profile = half_profile.unwrap();
    println!("\n|1000,500>, cluster sizes dividing N (consecutive-divisor gaps):");
    println!("{:>6} {:>14} {:>14}", "k", "S^(k->N)", "S^k (gap)");
    for row in profile.divisor_profile() {
        match row.s_k_gap {
            Some(gap) => println!("{:>6} {:>14.6} {:>14.6}", row.k, row.s_higher, gap),
            None => println!("{:>6} {:>14.6} {:>14}", row.k, row.s_higher, "-"),
        }
    }
    Ok(())
}
