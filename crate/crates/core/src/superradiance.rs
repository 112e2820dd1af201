//! Superradiant cascade dynamics and peak finding.
//!
//! `N` excited two-level atoms decaying collectively stay diagonal in the
//! Dicke basis; the level populations obey the cascade rate equations
//!
//! ```text
//! dP_n/dt = nu_{n+1} P_{n+1} - nu_n P_n,    nu_n = 2 gamma n (N - n + 1)
//! ```
//!
//! from `P_N(0) = 1`. This module integrates them with the adaptive
//! Dormand–Prince pair, evaluates the radiated power, sweeps GMCs along the
//! trajectory, and locates the times of maximum power / correlations /
//! entropy by a coarse log-grid scan plus golden-section refinement.

use crate::dicke::{mixture_entropy, DickeMixture};
use crate::gmc;
use crate::ode::Dopri5;
use crate::{Error, Result};
use rayon::prelude::*;

/// Integrator tolerances for the rate equations.
const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-14;
/// Emitted rows must satisfy these before renormalization.
const ROW_NEG_TOL: f64 = 1e-10;
const ROW_SUM_TOL: f64 = 1e-9;

/// The collective-decay model: `N` atoms, spontaneous rate `gamma`,
/// transition frequency `omega` (enters the radiated power only).
#[derive(Clone, Copy, Debug)]
pub struct RateModel {
    n: usize,
    gamma: f64,
    omega_freq: f64,
}

impl RateModel {
    pub fn new(n: usize, gamma: f64, omega_freq: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("rate model needs N >= 1".into()));
        }
        if !(gamma > 0.0) || !(omega_freq > 0.0) {
            return Err(Error::Domain(
                "gamma and omega must be positive and finite".into(),
            ));
        }
        Ok(RateModel {
            n,
            gamma,
            omega_freq,
        })
    }

    /// `gamma = omega = 1`.
    pub fn with_unit_rates(n: usize) -> Result<Self> {
        Self::new(n, 1.0, 1.0)
    }

    pub fn num_atoms(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega_freq(&self) -> f64 {
        self.omega_freq
    }

    /// Cascade rates `nu_n = 2 gamma n (N - n + 1)` for `n = 0..=N`.
    pub fn decay_rates(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|n| 2.0 * self.gamma * n as f64 * (self.n - n + 1) as f64)
            .collect()
    }
}

/// `dP/dt` for one population vector. The components sum to zero up to
/// round-off: the cascade only moves probability downward.
pub fn rate_derivative(model: &RateModel, populations: &[f64]) -> Result<Vec<f64>> {
    if populations.len() != model.n + 1 {
        return Err(Error::Domain(format!(
            "population vector has length {}, expected {}",
            populations.len(),
            model.n + 1
        )));
    }
    let nu = model.decay_rates();
    let mut out = vec![0.0; model.n + 1];
    derivative_into(&nu, populations, &mut out);
    Ok(out)
}

fn derivative_into(nu: &[f64], p: &[f64], dp: &mut [f64]) {
    let n = nu.len() - 1;
    let nu = &nu[..n + 1];
    let p = &p[..n + 1];
    let dp = &mut dp[..n + 1];
    for j in 0..n {
        dp[j] = nu[j + 1] * p[j + 1] - nu[j] * p[j];
    }
    dp[n] = -nu[n] * p[n];
}

/// Radiated power `2 gamma omega sum_n n (1 + N - n) P_n`.
pub fn radiated_power(model: &RateModel, populations: &[f64]) -> Result<f64> {
    if populations.len() != model.n + 1 {
        return Err(Error::Domain(format!(
            "population vector has length {}, expected {}",
            populations.len(),
            model.n + 1
        )));
    }
    let mut sum = 0.0;
    for (j, &p) in populations.iter().enumerate() {
        sum += j as f64 * (1 + model.n - j) as f64 * p;
    }
    Ok(2.0 * model.gamma * model.omega_freq * sum)
}

/// An integrated trajectory: populations and radiated power on a sample grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Absolute times (multiply by `gamma` for the dimensionless axis).
    pub times: Vec<f64>,
    /// One renormalized population row per sample time.
    pub populations: Vec<Vec<f64>>,
    /// Radiated power at each sample.
    pub power: Vec<f64>,
    /// Largest `|sum P - 1|` seen across emitted rows before renormalization.
    pub max_sum_defect: f64,
    /// Most negative population component seen before clamping.
    pub min_population: f64,
}

impl Trajectory {
    /// The mixture at sample index `i`.
    pub fn mixture_at(&self, i: usize) -> Result<DickeMixture> {
        DickeMixture::new(self.populations[i].clone())
    }
}

/// The default sample grid: `t = 0` followed by `samples - 1` log-spaced
/// points reaching down to the early-time scale `1e-3 / (N gamma)`.
pub fn default_log_grid(model: &RateModel, t_end: f64, samples: usize) -> Vec<f64> {
    assert!(samples >= 2 && t_end > 0.0);
    let t_lo = (1e-3 / (model.n as f64 * model.gamma)).min(t_end / 1e3);
    let mut grid = Vec::with_capacity(samples);
    grid.push(0.0);
    let m = samples - 1;
    for i in 0..m {
        let frac = if m == 1 { 1.0 } else { i as f64 / (m - 1) as f64 };
        grid.push(t_lo * (t_end / t_lo).powf(frac));
    }
    grid[samples - 1] = t_end;
    grid
}

/// Uniformly spaced grid on `[0, t_end]`.
pub fn linear_grid(t_end: f64, samples: usize) -> Vec<f64> {
    assert!(samples >= 2 && t_end > 0.0);
    (0..samples)
        .map(|i| t_end * i as f64 / (samples - 1) as f64)
        .collect()
}

/// Integrate from `P_N(0) = 1` to `t_end`, sampling on the default log grid.
pub fn evolve(model: &RateModel, t_end: f64, samples: usize) -> Result<Trajectory> {
    if !(t_end > 0.0) {
        return Err(Error::Domain("t_end must be positive".into()));
    }
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    evolve_at(model, &default_log_grid(model, t_end, samples))
}

/// Integrate from `P_N(0) = 1`, emitting the state at the given times
/// (strictly increasing, non-negative).
pub fn evolve_at(model: &RateModel, times: &[f64]) -> Result<Trajectory> {
    if times.is_empty() {
        return Err(Error::Domain("empty sample grid".into()));
    }
    if times[0] < 0.0 || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "sample times must be non-negative and strictly increasing".into(),
        ));
    }
    let nu = model.decay_rates();
    let f = move |_t: f64, y: &[f64], dy: &mut [f64]| derivative_into(&nu, y, dy);
    let dim = model.n + 1;
    let mut y0 = vec![0.0; dim];
    y0[model.n] = 1.0;
    let t_end = *times.last().unwrap();
    let solver = Dopri5::new(&f, dim, RTOL, ATOL);
    let raw = solver
        .solve(&y0, t_end, times)
        .map_err(|e| Error::Integration { t: e.t })?;

    let mut populations = Vec::with_capacity(raw.len());
    let mut power = Vec::with_capacity(raw.len());
    let mut max_sum_defect = 0.0_f64;
    let mut min_population = f64::INFINITY;
    for row in raw {
        let sum: f64 = row.iter().sum();
        max_sum_defect = max_sum_defect.max((sum - 1.0).abs());
        min_population = min_population.min(row.iter().copied().fold(f64::INFINITY, f64::min));
        let mix = DickeMixture::sanitized(row, ROW_NEG_TOL, ROW_SUM_TOL)?;
        power.push(radiated_power(model, mix.populations())?);
        populations.push(mix.populations().to_vec());
    }
    Ok(Trajectory {
        times: times.to_vec(),
        populations,
        power,
        max_sum_defect,
        min_population,
    })
}

/// The mixture reached at time `t` (fresh integration from `t = 0`).
pub fn population_snapshot(model: &RateModel, t: f64) -> Result<DickeMixture> {
    if t < 0.0 {
        return Err(Error::Domain("snapshot time must be non-negative".into()));
    }
    if t == 0.0 {
        let mut p = vec![0.0; model.n + 1];
        p[model.n] = 1.0;
        return DickeMixture::new(p);
    }
    let trajectory = evolve_at(model, &[t])?;
    trajectory.mixture_at(0)
}

/// GMC series along a trajectory. `s_k` needs `k - 1` as well; the closure
/// is handled internally, output rows carry only the requested `k`.
#[derive(Clone, Debug)]
pub struct GmcTimeSeries {
    pub k_values: Vec<usize>,
    pub times: Vec<f64>,
    /// `s_higher[t][i]` for `k_values[i]`.
    pub s_higher: Vec<Vec<f64>>,
    /// `s_k[t][i]` for `k_values[i]`; `None` where `k = 1`.
    pub s_k: Vec<Vec<Option<f64>>>,
}

/// Evaluate `S^(k->N)(t)` and `S^k(t)` at every trajectory sample for the
/// requested cluster sizes. Rows are computed in parallel; each row's
/// summation order is fixed, so results do not depend on scheduling.
pub fn gmc_time_series(
    model: &RateModel,
    trajectory: &Trajectory,
    k_list: &[usize],
) -> Result<GmcTimeSeries> {
    let n = model.n;
    let mut k_values: Vec<usize> = k_list.to_vec();
    k_values.sort_unstable();
    k_values.dedup();
    if k_values.is_empty() || k_values[0] == 0 || *k_values.last().unwrap() > n {
        return Err(Error::Domain(format!("k list must lie within 1..={n}")));
    }
    // close the set: S^k needs S^(k-1 -> N)
    let mut needed = k_values.clone();
    for &k in &k_values {
        if k >= 2 {
            needed.push(k - 1);
        }
    }
    needed.sort_unstable();
    needed.dedup();

    let rows: Vec<(Vec<f64>, Vec<Option<f64>>)> = trajectory
        .populations
        .par_iter()
        .map(|pops| {
            let mix = DickeMixture::new(pops.clone())?;
            let mut by_k = vec![0.0; n + 1];
            for &k in &needed {
                by_k[k] = gmc::higher_than(&mix, k)?;
            }
            let s_higher: Vec<f64> = k_values.iter().map(|&k| by_k[k]).collect();
            let s_k: Vec<Option<f64>> = k_values
                .iter()
                .map(|&k| if k >= 2 { Some(by_k[k - 1] - by_k[k]) } else { None })
                .collect();
            Ok((s_higher, s_k))
        })
        .collect::<Result<_>>()?;

    let (s_higher, s_k) = rows.into_iter().unzip();
    Ok(GmcTimeSeries {
        k_values,
        times: trajectory.times.clone(),
        s_higher,
        s_k,
    })
}

/// What to maximize over time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeakQuantity {
    /// Radiated power.
    Power,
    /// `S^(k->N)` for the given cluster size.
    GmcHigherThan(usize),
    /// Von Neumann entropy of the full mixture.
    Entropy,
}

/// Result of a peak search.
#[derive(Clone, Copy, Debug)]
pub struct ExtremumReport {
    pub t_max: f64,
    pub value: f64,
    /// Coarse-scan bracket around the maximum.
    pub bracket: (f64, f64),
    pub refinement_iterations: usize,
    /// Set when the scan maximum sat on an endpoint (monotone quantity);
    /// `t_max` is then the boundary point and no refinement was run.
    pub boundary: bool,
    /// Time span of scan neighbors indistinguishable from the maximum.
    pub flatness_width: f64,
}

/// Locate the time of maximum of `quantity`: 200-point log scan over
/// `[1e-3/(N gamma), 10/gamma]`, then golden-section refinement to a relative
/// time tolerance of 1e-6, re-integrating from `t = 0` at every probe.
pub fn find_time_of_max(model: &RateModel, quantity: PeakQuantity) -> Result<ExtremumReport> {
    find_time_of_max_with_trajectory(model, quantity).map(|(report, _)| report)
}

/// Same as [`find_time_of_max`], also handing back the coarse-scan
/// trajectory (useful for auditing conservation along the scan).
pub fn find_time_of_max_with_trajectory(
    model: &RateModel,
    quantity: PeakQuantity,
) -> Result<(ExtremumReport, Trajectory)> {
    const SCAN_POINTS: usize = 200;
    const REL_TOL: f64 = 1e-6;
    if let PeakQuantity::GmcHigherThan(k) = quantity {
        if k == 0 || k > model.n {
            return Err(Error::Domain(format!(
                "cluster size {k} out of range for N = {}",
                model.n
            )));
        }
    }
    let t_lo = 1e-3 / (model.n as f64 * model.gamma);
    let t_hi = 10.0 / model.gamma;
    let scan: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| t_lo * (t_hi / t_lo).powf(i as f64 / (SCAN_POINTS - 1) as f64))
        .collect();
    let trajectory = evolve_at(model, &scan)?;
    let values: Vec<f64> = (0..scan.len())
        .map(|i| evaluate_quantity(model, &trajectory.mixture_at(i)?, quantity))
        .collect::<Result<_>>()?;

    let mut i_max = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[i_max] {
            i_max = i;
        }
    }
    // leftmost maximum; record the width of the indistinguishable plateau
    let v_max = values[i_max];
    let near = |v: f64| (v_max - v).abs() <= v_max.abs().max(1e-300) * 1e-12;
    let mut plateau_hi = i_max;
    while plateau_hi + 1 < values.len() && near(values[plateau_hi + 1]) {
        plateau_hi += 1;
    }
    let flatness_width = scan[plateau_hi] - scan[i_max];

    if i_max == 0 || i_max == scan.len() - 1 {
        let report = ExtremumReport {
            t_max: scan[i_max],
            value: v_max,
            bracket: (
                scan[i_max.saturating_sub(1)],
                scan[(i_max + 1).min(scan.len() - 1)],
            ),
            refinement_iterations: 0,
            boundary: true,
            flatness_width,
        };
        return Ok((report, trajectory));
    }

    let bracket = (scan[i_max - 1], scan[i_max + 1]);
    let probe = |t: f64| -> Result<f64> {
        evaluate_quantity(model, &population_snapshot(model, t)?, quantity)
    };

    // golden-section ascent on fresh integrations
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = bracket;
    let mut best_t = scan[i_max];
    let mut best_v = v_max;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = probe(x1)?;
    let mut f2 = probe(x2)?;
    let mut iterations = 0;
    while b - a > REL_TOL * best_t {
        iterations += 1;
        if f1 >= f2 {
            if f1 > best_v {
                best_v = f1;
                best_t = x1;
            }
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = probe(x1)?;
        } else {
            if f2 > best_v {
                best_v = f2;
                best_t = x2;
            }
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = probe(x2)?;
        }
        if iterations > 200 {
            break;
        }
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f > best_v {
            best_v = f;
            best_t = x;
        }
    }
    let report = ExtremumReport {
        t_max: best_t,
        value: best_v,
        bracket,
        refinement_iterations: iterations,
        boundary: false,
        flatness_width,
    };
    Ok((report, trajectory))
}

fn evaluate_quantity(model: &RateModel, mix: &DickeMixture, q: PeakQuantity) -> Result<f64> {
    match q {
        PeakQuantity::Power => radiated_power(model, mix.populations()),
        PeakQuantity::GmcHigherThan(k) => gmc::higher_than(mix, k),
        PeakQuantity::Entropy => Ok(mixture_entropy(mix)),
    }
}
