//! Acceptance suite: one test per criterion, printing a pass/fail line each
//! (run with `--nocapture` to see them). Expensive fixtures (the peak-time
//! table over the full N grid, the N = 1000 profiles, the oracle report) are
//! computed once and shared.

use dicke_gmc::dicke::{reduced_spectrum_mixture, DickeLabel, DickeMixture};
use dicke_gmc::gmc::{self, GmcProfile, WeightScheme};
use dicke_gmc::oracle::{run_equivalence_suite, VerificationReport};
use dicke_gmc::superradiance::{
    evolve, find_time_of_max, find_time_of_max_with_trajectory, gmc_time_series,
    population_snapshot, radiated_power, GmcTimeSeries, PeakQuantity, RateModel, Trajectory,
};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

const N_GRID: [usize; 7] = [10, 20, 50, 100, 200, 500, 1000];

fn status(criterion: &str, pass: bool, detail: &str) -> bool {
    println!(
        "criterion {criterion} {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------------------
// shared fixtures
// ---------------------------------------------------------------------------

struct OracleFixture {
    report: VerificationReport,
    elapsed: Duration,
}

fn oracle_fixture() -> &'static OracleFixture {
    static CELL: OnceLock<OracleFixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let report = run_equivalence_suite(10, None).expect("suite runs");
        OracleFixture {
            report,
            elapsed: start.elapsed(),
        }
    })
}

struct PeakRow {
    n: usize,
    power_t: f64,
    power_value: f64,
    corr_t: f64,
    scan_sum_defect: f64,
    scan_min_population: f64,
}

fn peak_table() -> &'static Vec<PeakRow> {
    static CELL: OnceLock<Vec<PeakRow>> = OnceLock::new();
    CELL.get_or_init(|| {
        N_GRID
            .iter()
            .map(|&n| {
                let model = RateModel::with_unit_rates(n).unwrap();
                let (power, tr_p) =
                    find_time_of_max_with_trajectory(&model, PeakQuantity::Power).unwrap();
                let (corr, tr_c) =
                    find_time_of_max_with_trajectory(&model, PeakQuantity::GmcHigherThan(2))
                        .unwrap();
                assert!(!power.boundary && !corr.boundary, "interior maxima expected");
                PeakRow {
                    n,
                    power_t: power.t_max,
                    power_value: power.value,
                    corr_t: corr.t_max,
                    scan_sum_defect: tr_p.max_sum_defect.max(tr_c.max_sum_defect),
                    scan_min_population: tr_p.min_population.min(tr_c.min_population),
                }
            })
            .collect()
    })
}

struct PureProfiles {
    by_ne: Vec<(usize, GmcProfile)>,
    elapsed: Duration,
}

fn pure_profiles_1000() -> &'static PureProfiles {
    static CELL: OnceLock<PureProfiles> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let by_ne = [1usize, 5, 50, 500]
            .iter()
            .map(|&ne| {
                (
                    ne,
                    gmc::profile(&DickeLabel::new(1000, ne).unwrap()).unwrap(),
                )
            })
            .collect();
        PureProfiles {
            by_ne,
            elapsed: start.elapsed(),
        }
    })
}

struct SevenAtoms {
    trajectory: Trajectory,
    series: GmcTimeSeries,
    corr_peak_t: Vec<f64>, // argmax of S^(k->N)(t) for k = 1..=6
    entropy_peak_t: f64,
}

fn seven_atoms() -> &'static SevenAtoms {
    static CELL: OnceLock<SevenAtoms> = OnceLock::new();
    CELL.get_or_init(|| {
        let model = RateModel::with_unit_rates(7).unwrap();
        let trajectory = evolve(&model, 10.0, 400).unwrap();
        let k_all: Vec<usize> = (1..=7).collect();
        let series = gmc_time_series(&model, &trajectory, &k_all).unwrap();
        let corr_peak_t = (1..=6)
            .map(|k| {
                find_time_of_max(&model, PeakQuantity::GmcHigherThan(k))
                    .unwrap()
                    .t_max
            })
            .collect();
        let entropy_peak_t = find_time_of_max(&model, PeakQuantity::Entropy).unwrap().t_max;
        SevenAtoms {
            trajectory,
            series,
            corr_peak_t,
            entropy_peak_t,
        }
    })
}

struct Snapshot1000 {
    mixture: DickeMixture,
    mixture_profile: GmcProfile,
}

fn snapshot_1000() -> &'static Snapshot1000 {
    static CELL: OnceLock<Snapshot1000> = OnceLock::new();
    CELL.get_or_init(|| {
        let model = RateModel::with_unit_rates(1000).unwrap();
        let t_corr = peak_table().iter().find(|r| r.n == 1000).unwrap().corr_t;
        let mixture = population_snapshot(&model, t_corr).unwrap();
        let mixture_profile = gmc::profile(&mixture).unwrap();
        Snapshot1000 {
            mixture,
            mixture_profile,
        }
    })
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_oracle_equivalence_pure() {
    let fx = oracle_fixture();
    let pure: Vec<_> = fx
        .report
        .checks
        .iter()
        .filter(|c| c.name.starts_with("pure"))
        .collect();
    assert!(!pure.is_empty());
    let worst = pure.iter().map(|c| c.deviation).fold(0.0_f64, f64::max);
    let all_pass = pure.iter().all(|c| c.pass);
    let in_time = fx.elapsed <= Duration::from_secs(60);
    let ok = status(
        "01",
        all_pass && in_time,
        &format!(
            "pure-state oracle equivalence N <= 10: {} checks, worst dev {:.2e} (tol 1e-9/1e-10), {:.1?}",
            pure.len(),
            worst,
            fx.elapsed
        ),
    );
    assert!(ok, "first failure: {:?}", fx.report.first_failure());
}

#[test]
fn criterion_02_oracle_equivalence_mixture() {
    let fx = oracle_fixture();
    let mixture: Vec<_> = fx
        .report
        .checks
        .iter()
        .filter(|c| c.name.starts_with("mixture") || c.name.starts_with("cascade"))
        .collect();
    assert!(!mixture.is_empty());
    let worst = mixture.iter().map(|c| c.deviation).fold(0.0_f64, f64::max);
    let all_pass = mixture.iter().all(|c| c.pass);
    let ok = status(
        "02",
        all_pass,
        &format!(
            "mixture oracle equivalence N in {{4,6,8}} x 5 times: {} checks, worst dev {:.2e} (tol 1e-9)",
            mixture.len(),
            worst
        ),
    );
    assert!(ok, "first failure: {:?}", fx.report.first_failure());
}

#[test]
fn criterion_03_profile_ordering_in_excitation() {
    let fx = pure_profiles_1000();
    let mut ordered = true;
    for pair in fx.by_ne.windows(2) {
        let (lo_ne, lo) = &pair[0];
        let (hi_ne, hi) = &pair[1];
        for k in 1..=1000 {
            if hi.s_higher(k) < lo.s_higher(k) - 1e-12 {
                ordered = false;
                println!("  ordering breaks at ne {lo_ne} -> {hi_ne}, k = {k}");
            }
        }
        let lo_max = (2..=1000).map(|k| lo.s_k(k)).fold(f64::MIN, f64::max);
        let hi_max = (2..=1000).map(|k| hi.s_k(k)).fold(f64::MIN, f64::max);
        if hi_max < lo_max {
            ordered = false;
            println!("  max-over-k s_k decreases from ne {lo_ne} to {hi_ne}");
        }
    }
    let in_time = fx.elapsed <= Duration::from_secs(300);
    let ok = status(
        "03",
        ordered && in_time,
        &format!(
            "N=1000 s_higher and max s_k pointwise non-decreasing over ne in {{1,5,50,500}} ({:.2?})",
            fx.elapsed
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_04_divisor_restricted_nonmonotonicity() {
    let profile = &pure_profiles_1000()
        .by_ne
        .iter()
        .find(|(ne, _)| *ne == 500)
        .unwrap()
        .1;
    let rows = profile.divisor_profile();
    assert_eq!(rows.len(), 16, "1000 has 16 divisors");
    let gap = |k: usize| {
        rows.iter()
            .find(|r| r.k == k)
            .and_then(|r| r.s_k_gap)
            .unwrap()
    };
    let s40 = gap(40);
    let s50 = gap(50);
    let ok = status(
        "04",
        s40 > s50,
        &format!("divisor-restricted genuine correlations at |1000,500>: S^40 = {s40:.4} > S^50 = {s50:.4}"),
    );
    assert!(ok);
}

#[test]
fn criterion_05_excitation_symmetry() {
    let mut worst = 0.0_f64;
    for (n, ne) in [(2usize, 0usize), (3, 1), (17, 5), (50, 13), (128, 40), (200, 67)] {
        let a = gmc::profile(&DickeLabel::new(n, ne).unwrap()).unwrap();
        let b = gmc::profile(&DickeLabel::new(n, n - ne).unwrap()).unwrap();
        for k in 1..=n {
            worst = worst.max((a.s_higher(k) - b.s_higher(k)).abs());
        }
    }
    let ok = status(
        "05",
        worst <= 1e-10,
        &format!("profiles of |N,n_e> vs |N,N-n_e> agree, worst dev {worst:.2e} (tol 1e-10)"),
    );
    assert!(ok);
}

#[test]
fn criterion_06_seven_atom_ranking() {
    let fx = seven_atoms();
    let idx = |k: usize| fx.series.k_values.iter().position(|&x| x == k).unwrap();
    let mut maxima: Vec<(usize, f64)> = (2..=7)
        .map(|k| {
            let j = idx(k);
            let best = fx
                .series
                .s_k
                .iter()
                .map(|row| row[j].unwrap())
                .fold(f64::MIN, f64::max);
            (k, best)
        })
        .collect();
    maxima.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let order: Vec<usize> = maxima.iter().map(|(k, _)| *k).collect();
    let ok = status(
        "06",
        order == vec![2, 7, 3, 4, 6, 5],
        &format!("N=7 ranking of max-over-time S^k: {order:?} (expected [2, 7, 3, 4, 6, 5])"),
    );
    assert!(ok, "maxima: {maxima:?}");
}

#[test]
fn criterion_07a_peak_time_universality() {
    let fx = seven_atoms();
    let lo = fx.corr_peak_t.iter().cloned().fold(f64::MAX, f64::min);
    let hi = fx.corr_peak_t.iter().cloned().fold(f64::MIN, f64::max);
    let spread = hi - lo;
    let ok = status(
        "07a",
        spread <= 1e-3,
        &format!(
            "N=7 argmax of S^(k->N)(t), k=1..6: times {:?}, spread {spread:.3e} (tol 1e-3/gamma)",
            fx.corr_peak_t
                .iter()
                .map(|t| format!("{t:.6}"))
                .collect::<Vec<_>>()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_07b_entropy_peak_coincidence() {
    let fx = seven_atoms();
    let t_corr = fx.corr_peak_t[1]; // k = 2 defines t^C
    let diff = (fx.entropy_peak_t - t_corr).abs();
    let ok = status(
        "07b",
        diff <= 1e-4,
        &format!(
            "N=7 entropy argmax {:.6} vs correlation argmax {:.6}: |diff| = {diff:.3e} (tol 1e-4/gamma)",
            fx.entropy_peak_t, t_corr
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_08a_correlation_time_scaling() {
    let rows = peak_table();
    let ln_n: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ln_t: Vec<f64> = rows.iter().map(|r| r.corr_t.ln()).collect();
    let slope = linear_slope(&ln_n, &ln_t);
    let ok = status(
        "08a",
        (slope + 1.0).abs() <= 0.05,
        &format!(
            "ln t_corr vs ln N slope = {slope:.4} (required -1 +/- 0.05); gamma*t*N = {:?}",
            rows.iter()
                .map(|r| format!("{:.3}", r.corr_t * r.n as f64))
                .collect::<Vec<_>>()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_08b_correlations_peak_after_power() {
    let rows = peak_table();
    let all_after = rows.iter().all(|r| r.corr_t > r.power_t);
    let ok = status(
        "08b",
        all_after,
        &format!(
            "t_corr > t_power at every N: {:?}",
            rows.iter()
                .map(|r| (r.n, r.corr_t > r.power_t))
                .collect::<Vec<_>>()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_08c_peak_times_converge() {
    let rows = peak_table();
    let ratio = |n: usize| {
        let r = rows.iter().find(|r| r.n == n).unwrap();
        r.corr_t / r.power_t
    };
    let r10 = ratio(10);
    let r1000 = ratio(1000);
    let ok = status(
        "08c",
        (r1000 - 1.0).abs() < (r10 - 1.0).abs(),
        &format!("t_corr/t_power: {r10:.4} at N=10 -> {r1000:.4} at N=1000 (must approach 1)"),
    );
    assert!(ok);
}

#[test]
fn criterion_09_power_scaling() {
    let rows = peak_table();
    let ln_n: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ln_p: Vec<f64> = rows.iter().map(|r| r.power_value.ln()).collect();
    let slope = linear_slope(&ln_n, &ln_p);
    let slope_ok = (slope - 2.0).abs() <= 0.1;

    // initial power is exactly 2 gamma omega N
    let mut exact = true;
    for &(n, gamma, omega) in &[(50usize, 1.0, 1.0), (7, 0.7, 1.3)] {
        let model = RateModel::new(n, gamma, omega).unwrap();
        let mut p0 = vec![0.0; n + 1];
        p0[n] = 1.0;
        let computed = radiated_power(&model, &p0).unwrap();
        let expected = 2.0 * gamma * omega * n as f64;
        exact &= computed.to_bits() == expected.to_bits();
    }
    let ok = status(
        "09",
        slope_ok && exact,
        &format!("ln max-power vs ln N slope = {slope:.4} (required 2 +/- 0.1); P(0) = 2*gamma*omega*N exactly: {exact}"),
    );
    assert!(ok);
}

#[test]
fn criterion_10_population_peak_near_third() {
    let rows = peak_table();
    let mut ok = true;
    let mut details = Vec::new();
    for n in [100usize, 1000] {
        let t_corr = rows.iter().find(|r| r.n == n).unwrap().corr_t;
        let model = RateModel::with_unit_rates(n).unwrap();
        let mix = population_snapshot(&model, t_corr).unwrap();
        let argmax = mix
            .populations()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let lo = n as f64 / 3.0 - n as f64 / 10.0;
        let hi = n as f64 / 3.0 + n as f64 / 10.0;
        let inside = (argmax as f64) >= lo && (argmax as f64) <= hi;
        ok &= inside;
        details.push(format!("N={n}: argmax={argmax} in [{lo:.0}, {hi:.0}] = {inside}"));
    }
    let ok = status("10", ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn criterion_11a_snapshot_tracks_half_filled_state() {
    let snap = snapshot_1000();
    let half = &pure_profiles_1000()
        .by_ne
        .iter()
        .find(|(ne, _)| *ne == 500)
        .unwrap()
        .1;
    let mut worst_rel = 0.0_f64;
    let mut worst_k = 0;
    for k in 1..=10 {
        let rel = (snap.mixture_profile.s_higher(k) - half.s_higher(k)).abs() / half.s_higher(k);
        if rel > worst_rel {
            worst_rel = rel;
            worst_k = k;
        }
    }
    let ok = status(
        "11a",
        worst_rel <= 0.10,
        &format!(
            "mixture s_higher at t_corr vs |1000,500| for k <= 10: worst rel dev {:.1}% at k = {worst_k} (tol 10%)",
            100.0 * worst_rel
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_11b_snapshot_falls_below_at_large_k() {
    let snap = snapshot_1000();
    let half = &pure_profiles_1000()
        .by_ne
        .iter()
        .find(|(ne, _)| *ne == 500)
        .unwrap()
        .1;
    let mut first_violation = None;
    let mut crossing = None;
    for k in 100..1000 {
        let below = snap.mixture_profile.s_higher(k) < half.s_higher(k);
        if !below && first_violation.is_none() {
            first_violation = Some(k);
        }
        if below && crossing.is_none() {
            crossing = Some(k);
        }
    }
    let ok = status(
        "11b",
        first_violation.is_none(),
        &format!(
            "mixture below |1000,500> for all k >= 100: first violation at k = {first_violation:?}, first below at k = {crossing:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_12_invariant_suite() {
    let mut ok = true;
    let mut notes = Vec::new();

    // probability conservation / positivity along every scan touched above
    let rows = peak_table();
    let defect = rows.iter().map(|r| r.scan_sum_defect).fold(0.0_f64, f64::max);
    let min_pop = rows
        .iter()
        .map(|r| r.scan_min_population)
        .fold(0.0_f64, f64::min);
    ok &= defect <= 1e-9 && min_pop >= -1e-10;
    notes.push(format!("conservation defect {defect:.2e} (tol 1e-9), min population {min_pop:.2e} (tol -1e-10)"));
    let seven = seven_atoms();
    ok &= seven.trajectory.max_sum_defect <= 1e-9 && seven.trajectory.min_population >= -1e-10;
    ok &= seven.trajectory.power.iter().all(|&p| p >= 0.0);

    // spectrum normalization on the heaviest mixture in play
    let snap = snapshot_1000();
    for k in [1usize, 7, 10, 100, 500, 1000] {
        let spec = reduced_spectrum_mixture(&snap.mixture, k).unwrap();
        let total: f64 = dicke_gmc::stable_math::compensated_sum(spec.weights().iter().copied());
        ok &= (total - 1.0).abs() <= 1e-10;
    }
    notes.push("mixture spectra normalized within 1e-10".into());

    // telescoping, monotonicity, non-negativity on every profile touched
    let mut profiles: Vec<&GmcProfile> = pure_profiles_1000().by_ne.iter().map(|(_, p)| p).collect();
    profiles.push(&snap.mixture_profile);
    let mut worst_tel = 0.0_f64;
    for p in &profiles {
        let n = p.num_qubits();
        let telescoped: f64 =
            dicke_gmc::stable_math::compensated_sum((2..=n).map(|k| p.s_k(k)));
        worst_tel = worst_tel.max((telescoped - p.total()).abs() / p.total().abs().max(1.0));
        ok &= p.monotonicity_violations().is_empty();
        ok &= (1..=n).all(|k| p.s_higher(k) >= -1e-9);
    }
    ok &= worst_tel <= 1e-9;
    notes.push(format!("telescoping rel dev {worst_tel:.2e} (tol 1e-9)"));

    // dual-form weaving equality with deterministic pseudo-random weights
    let mut state: u64 = 0x5deece66d;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for p in &profiles {
        let n = p.num_qubits();
        let big: Vec<f64> = (0..n - 1).map(|_| next()).collect();
        let scheme = WeightScheme::from_big_omegas(n, big).unwrap();
        let by_small: f64 = dicke_gmc::stable_math::compensated_sum(
            (2..=n).map(|k| scheme.small_omegas()[k - 2] * p.s_k(k)),
        );
        let by_big: f64 = dicke_gmc::stable_math::compensated_sum(
            (1..n).map(|k| scheme.big_omegas()[k - 1] * p.s_higher(k)),
        );
        ok &= (by_small - by_big).abs() <= 1e-9 * by_small.abs().max(1.0);
        ok &= gmc::weaving(p, &scheme).is_ok();
    }
    notes.push("dual-form weaving equality within 1e-9".into());

    // empirical: genuine correlations stay non-negative along the N=7 cascade
    let min_sk = seven
        .series
        .s_k
        .iter()
        .flat_map(|row| row.iter().flatten())
        .fold(f64::MAX, |m, &v| m.min(v));
    ok &= min_sk >= -1e-9;
    notes.push(format!("min genuine correlation along N=7 cascade {min_sk:.2e}"));

    // endpoint decorrelation: everything is gone by gamma*t = 10
    let last = seven.series.s_higher.last().unwrap();
    let worst_end = last.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let model50 = RateModel::with_unit_rates(50).unwrap();
    let tr50 = evolve(&model50, 10.0, 50).unwrap();
    let series50 = gmc_time_series(&model50, &tr50, &[2]).unwrap();
    let end50 = series50.s_higher.last().unwrap()[0].abs();
    ok &= worst_end <= 1e-6 && end50 <= 1e-6;
    notes.push(format!("endpoint decorrelation: {worst_end:.2e} (N=7), {end50:.2e} (N=50)"));

    let ok = status("12", ok, &notes.join("; "));
    assert!(ok);
}

#[test]
fn criterion_13_evolve_is_deterministic() {
    let exe = env!("CARGO_BIN_EXE_dicke-gmc");
    let args = ["evolve", "--n", "50", "--samples", "120", "--k", "all"];
    let run = |dir: &std::path::Path| {
        let out = std::process::Command::new(exe)
            .args(args)
            .current_dir(dir)
            .env("DICKE_GMC_THREADS", "2")
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        ["populations.csv", "power.csv", "gmc_t.csv"]
            .iter()
            .map(|f| std::fs::read(dir.join(f)).expect("output file"))
            .collect::<Vec<_>>()
    };
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let first = run(dir1.path());
    let second = run(dir2.path());
    let identical = first == second;
    let ok = status(
        "13",
        identical,
        "two cmd_evolve runs with identical flags and internal parallelism produce byte-identical files",
    );
    assert!(ok);
}
