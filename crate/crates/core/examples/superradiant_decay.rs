//! The superradiant cascade for N = 50 atoms: population fan and the
//! radiated-power burst near t = 1/(N gamma).
//!
//! Run with: cargo run --release --example superradiant_decay

use dicke_gmc::superradiance::{evolve, find_time_of_max, PeakQuantity, RateModel};

fn main() -> Result<(), dicke_gmc::Error> {
    let n = 50;
    let model = RateModel::with_unit_rates(n)?;
    let trajectory = evolve(&model, 10.0, 160)?;

    println!("{:>12} {:>10} {:>10} {:>10} {:>10} {:>12}", "gamma*t", "P_50", "P_35", "P_17", "P_0", "power");
    for (i, &t) in trajectory.times.iter().enumerate() {
        if i % 20 != 0 {
            continue;
        }
        let row = &trajectory.populations[i];
        println!(
            "{t:>12.5} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>12.4}",
            row[50], row[35], row[17], row[0], trajectory.power[i]
        );
    }

    let peak = find_time_of_max(&model, PeakQuantity::Power)?;
    println!(
        "\npower peaks at gamma*t = {:.5} (N*gamma*t = {:.3}), value {:.2} = {:.1} x the initial rate",
        peak.t_max,
        peak.t_max * n as f64,
        peak.value,
        peak.value / (2.0 * n as f64)
    );
    println!(
        "probability drift along the run: {:.2e}; most negative population: {:.2e}",
        trajectory.max_sum_defect, trajectory.min_population
    );
    Ok(())
}
