//! The superradiant state at its moment of maximum correlation, compared
//! against the extremal pure Dicke states: populations pile up near N/3 and
//! the correlation profile shadows the half-filled state |N, N/2>.
//!
//! Run with: cargo run --release --example snapshot_comparison

use dicke_gmc::dicke::DickeLabel;
use dicke_gmc::gmc;
use dicke_gmc::superradiance::{find_time_of_max, population_snapshot, PeakQuantity, RateModel};

fn main() -> Result<(), dicke_gmc::Error> {
    let n = 100;
    let model = RateModel::with_unit_rates(n)?;
    let corr = find_time_of_max(&model, PeakQuantity::GmcHigherThan(2))?;
    println!("time of maximum correlation: gamma*t = {:.5}", corr.t_max);

    let mixture = population_snapshot(&model, corr.t_max)?;
    let argmax = mixture
        .populations()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    println!(
        "most populated Dicke level: n_e = {} (P = {:.4}), N/3 = {:.1}",
        argmax.0,
        argmax.1,
        n as f64 / 3.0
    );

    let mix_profile = gmc::profile(&mixture)?;
    let half = gmc::profile(&DickeLabel::new(n, n / 2)?)?;
    let one = gmc::profile(&DickeLabel::new(n, 1)?)?;
    println!(
        "\n{:>4} {:>14} {:>14} {:>14}",
        "k", "mixture", "|N,N/2>", "|N,1>"
    );
    for k in [1usize, 2, 3, 5, 10, 20, 50, 90, 99] {
        println!(
            "{k:>4} {:>14.5} {:>14.5} {:>14.5}",
            mix_profile.s_higher(k),
            half.s_higher(k),
            one.s_higher(k)
        );
    }
    Ok(())
}
