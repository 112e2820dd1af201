//! Cross-module invariants that pair the closed forms and the adaptive
//! integrator with their independent brute-force routes.

use dicke_gmc::dicke::{
    entropy_of_spectrum, mixture_entropy, reduced_spectrum_mixture, reduced_spectrum_pure,
    DickeLabel, DickeMixture,
};
use dicke_gmc::gmc;
use dicke_gmc::oracle::{
    dense_dicke_state, dense_mixture_partial_trace, dense_partial_trace, eigen_entropy,
    rate_matrix_exponential, spectrum_of,
};
use dicke_gmc::superradiance::{evolve_at, RateModel};

#[test]
fn pure_spectra_match_dense_partial_traces_through_n10() {
    for n in 2..=10usize {
        for n_e in 0..=n {
            let label = DickeLabel::new(n, n_e).unwrap();
            let psi = dense_dicke_state(label).unwrap();
            for k in 1..n {
                let dense = spectrum_of(&dense_partial_trace(&psi, n, k).unwrap()).unwrap();
                let mut closed: Vec<f64> =
                    reduced_spectrum_pure(label, k).unwrap().weights().to_vec();
                closed.sort_by(|a, b| b.partial_cmp(a).unwrap());
                for i in 0..dense.len().max(closed.len()) {
                    let a = closed.get(i).copied().unwrap_or(0.0);
                    let b = dense.get(i).copied().unwrap_or(0.0);
                    assert!(
                        (a - b).abs() <= 1e-10,
                        "N={n} n_e={n_e} k={k} i={i}: {a} vs {b}"
                    );
                }
            }
        }
    }
}

#[test]
fn cascade_matches_matrix_exponential_at_twenty_times() {
    for n in 2..=6usize {
        let model = RateModel::with_unit_rates(n).unwrap();
        let times: Vec<f64> = (0..20)
            .map(|i| 1e-3 * 10_000.0_f64.powf(i as f64 / 19.0))
            .collect();
        let trajectory = evolve_at(&model, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let reference = rate_matrix_exponential(&model, t).unwrap();
            for (a, b) in trajectory.populations[i].iter().zip(&reference) {
                assert!((a - b).abs() <= 1e-9, "N={n} t={t}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn mixture_entropies_match_dense_oracle_along_cascade() {
    let n = 8usize;
    let model = RateModel::with_unit_rates(n).unwrap();
    let populations = rate_matrix_exponential(&model, 0.1).unwrap();
    let mix = DickeMixture::new(populations).unwrap();
    for k in 1..n {
        let closed = entropy_of_spectrum(&reduced_spectrum_mixture(&mix, k).unwrap());
        let dense = eigen_entropy(&dense_mixture_partial_trace(&mix, k).unwrap()).unwrap();
        assert!((closed - dense).abs() <= 1e-10, "k={k}: {closed} vs {dense}");
    }
    // global entropy directly from the populations
    let dense_global = {
        let rho = dicke_gmc::oracle::dense_mixture_matrix(&mix).unwrap();
        eigen_entropy(&rho).unwrap()
    };
    assert!((mixture_entropy(&mix) - dense_global).abs() <= 1e-10);
}

#[test]
fn degenerate_rates_do_not_break_the_integrator() {
    // nu_n = nu_{N+1-n} makes the generator defective; the integrator must
    // not care. Cross-check against the Taylor exponential late and early.
    let model = RateModel::new(9, 1.3, 1.0).unwrap();
    let times = [1e-3, 0.05, 0.4, 2.0];
    let trajectory = evolve_at(&model, &times).unwrap();
    for (i, &t) in times.iter().enumerate() {
        let reference = rate_matrix_exponential(&model, t).unwrap();
        for (a, b) in trajectory.populations[i].iter().zip(&reference) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
}

#[test]
fn eigen_entropy_is_basis_independent() {
    let mix = DickeMixture::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
    let rho = dicke_gmc::oracle::dense_mixture_matrix(&mix).unwrap();
    let s_ref = eigen_entropy(&rho).unwrap();
    // rotate by a deterministic orthogonal matrix built from a fixed seed
    let mut state: u64 = 42;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let g = nalgebra::DMatrix::from_fn(rho.nrows(), rho.ncols(), |_, _| next());
    let q = g.qr().q();
    let rotated = &q * &rho * q.transpose();
    let s_rot = eigen_entropy(&rotated).unwrap();
    assert!((s_ref - s_rot).abs() <= 1e-9, "{s_ref} vs {s_rot}");
}

#[test]
fn weaving_grows_with_the_filling_fraction() {
    let scaling = |n: usize, ne: usize| {
        let profile = gmc::profile(&DickeLabel::new(n, ne).unwrap()).unwrap();
        gmc::weaving(&profile, &dicke_gmc::gmc::WeightScheme::k_minus_one(n)).unwrap()
    };
    for n in [10usize, 20, 50, 100] {
        let half = scaling(n, n / 2);
        let tenth = scaling(n, n / 10);
        let one = scaling(n, 1);
        assert!(half >= tenth && tenth >= one, "N={n}: {half} {tenth} {one}");
    }
}

#[test]
fn extremum_report_brackets_its_maximum() {
    use dicke_gmc::superradiance::{
        find_time_of_max, population_snapshot, radiated_power, PeakQuantity,
    };
    let model = RateModel::with_unit_rates(20).unwrap();
    let report = find_time_of_max(&model, PeakQuantity::Power).unwrap();
    assert!(!report.boundary);
    assert!(report.bracket.0 < report.t_max && report.t_max < report.bracket.1);
    for t in [report.bracket.0, report.bracket.1] {
        let mix = population_snapshot(&model, t).unwrap();
        let value = radiated_power(&model, mix.populations()).unwrap();
        assert!(report.value >= value);
    }
    assert!(report.refinement_iterations > 0);
    assert!(report.flatness_width >= 0.0);

    // a single atom only decays, so the power maximum sits on the boundary
    let single = RateModel::with_unit_rates(1).unwrap();
    let report = find_time_of_max(&single, PeakQuantity::Power).unwrap();
    assert!(report.boundary);
    assert_eq!(report.refinement_iterations, 0);
}

#[test]
fn total_correlations_telescope_along_cascade() {
    let n = 7usize;
    let model = RateModel::with_unit_rates(n).unwrap();
    let populations = rate_matrix_exponential(&model, 0.16).unwrap();
    let mix = DickeMixture::new(populations).unwrap();
    let profile = gmc::profile(&mix).unwrap();
    let telescoped: f64 = (2..=n).map(|k| profile.s_k(k)).sum();
    assert!(
        (telescoped - gmc::total_correlations(&mix).unwrap()).abs()
            <= 1e-9 * profile.total().abs().max(1.0)
    );
}
