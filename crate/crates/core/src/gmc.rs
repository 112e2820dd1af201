//! Correlation measures built on reduced-state entropies.
//!
//! For a permutation-invariant state the closest product of clusters of size
//! at most `k` is the homogeneous partition (`floor(N/k)` clusters of size
//! `k` plus one of size `N mod k`), so the correlations of order higher than
//! `k` collapse to
//!
//! ```text
//! S^(k->N) = floor(N/k) * S(rho_k) - S(rho_N) + [N mod k > 0] * S(rho_{N mod k})
//! ```
//!
//! Genuine `k`-partite correlations are consecutive differences,
//! `S^k = S^(k-1->N) - S^(k->N)`, total correlations are `S^(1->N)`, and
//! weaving is a weighted sum over either family.

use crate::dicke::{entropy_of_spectrum, SymmetricState};
use crate::stable_math::CompensatedSum;
use crate::{Error, Result};
use rayon::prelude::*;

/// Raw `s_higher` values this far below zero are round-off and are clamped
/// at report time; anything lower aborts.
pub const ROUNDOFF_CLAMP: f64 = 1e-9;

/// A recorded failure of the expected monotone decrease of `S^(k->N)` in `k`.
#[derive(Clone, Copy, Debug)]
pub struct MonotonicityViolation {
    pub k: usize,
    /// Amount by which `s_higher(k)` exceeds `s_higher(k-1)`.
    pub excess: f64,
}

/// The full correlation profile of one state: `S^(k->N)` for `k = 1..=N`,
/// `S^k` for `k = 2..=N`, and the total `T = S^(1->N)`.
#[derive(Clone, Debug)]
pub struct GmcProfile {
    n: usize,
    s_higher: Vec<f64>,
    s_k: Vec<f64>,
    total: f64,
    violations: Vec<MonotonicityViolation>,
}

impl GmcProfile {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Raw `S^(k->N)`, `1 <= k <= N`.
    pub fn s_higher(&self, k: usize) -> f64 {
        assert!(k >= 1 && k <= self.n, "k = {k} out of 1..={}", self.n);
        self.s_higher[k - 1]
    }

    /// Raw genuine `k`-partite correlations, `2 <= k <= N`.
    pub fn s_k(&self, k: usize) -> f64 {
        assert!(k >= 2 && k <= self.n, "k = {k} out of 2..={}", self.n);
        self.s_k[k - 2]
    }

    /// Total correlations `T = S^(1->N)`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Monotonicity failures beyond [`ROUNDOFF_CLAMP`]; empty on healthy runs.
    /// Surfaced, never silently repaired.
    pub fn monotonicity_violations(&self) -> &[MonotonicityViolation] {
        &self.violations
    }

    /// The profile restricted to cluster sizes dividing `N`, with the genuine
    /// correlations re-based onto consecutive divisors (the `mod-zero` view:
    /// the gap at divisor `k` is `S^(d_prev -> N) - S^(k -> N)`).
    pub fn divisor_profile(&self) -> Vec<DivisorRow> {
        let mut rows = Vec::new();
        let mut prev: Option<usize> = None;
        for k in 1..=self.n {
            if self.n % k != 0 {
                continue;
            }
            let s_k_gap = prev.map(|p| self.s_higher(p) - self.s_higher(k));
            rows.push(DivisorRow {
                k,
                s_higher: self.s_higher(k),
                s_k_gap,
            });
            prev = Some(k);
        }
        rows
    }
}

/// One row of the divisor-restricted profile view.
#[derive(Clone, Copy, Debug)]
pub struct DivisorRow {
    pub k: usize,
    pub s_higher: f64,
    /// Difference of `s_higher` against the previous divisor; `None` at `k = 1`.
    pub s_k_gap: Option<f64>,
}

/// Clamp a round-off negative in `[-1e-9, 0)` to zero for reporting.
pub fn clamp_roundoff(x: f64) -> f64 {
    if x < 0.0 && x >= -ROUNDOFF_CLAMP {
        0.0
    } else {
        x
    }
}

/// Correlations of order higher than `k` for one cluster size.
pub fn higher_than(state: &impl SymmetricState, k: usize) -> Result<f64> {
    let n = state.num_qubits();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("cluster size {k} out of range for N = {n}")));
    }
    let s_cluster = entropy_of_spectrum(&state.reduced_spectrum(k)?);
    let remainder = n % k;
    let mut s = (n / k) as f64 * s_cluster - state.global_entropy();
    if remainder > 0 {
        s += entropy_of_spectrum(&state.reduced_spectrum(remainder)?);
    }
    Ok(s)
}

/// Total correlations `T = S^(1->N) = N S(rho_1) - S(rho_N)`.
pub fn total_correlations(state: &impl SymmetricState) -> Result<f64> {
    higher_than(state, 1)
}

/// The correlation profile over every cluster size, evaluated in parallel
/// over `k`. Results are independent of thread scheduling: each `k` writes
/// its own slot and per-`k` summation order is fixed.
pub fn profile(state: &(impl SymmetricState + Sync)) -> Result<GmcProfile> {
    let n = state.num_qubits();
    let cluster_entropy: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|k| state.reduced_spectrum(k).map(|s| entropy_of_spectrum(&s)))
        .collect::<Result<_>>()?;
    let global = state.global_entropy();

    let mut s_higher = Vec::with_capacity(n);
    for k in 1..=n {
        let mut s = (n / k) as f64 * cluster_entropy[k - 1] - global;
        let r = n % k;
        if r > 0 {
            s += cluster_entropy[r - 1];
        }
        if s < -ROUNDOFF_CLAMP {
            return Err(Error::Internal(format!(
                "S^({k}->{n}) = {s:e} is negative beyond round-off"
            )));
        }
        s_higher.push(s);
    }

    let mut violations = Vec::new();
    for k in 2..=n {
        let excess = s_higher[k - 1] - s_higher[k - 2];
        if excess > ROUNDOFF_CLAMP {
            violations.push(MonotonicityViolation { k, excess });
        }
    }

    let s_k: Vec<f64> = (2..=n).map(|k| s_higher[k - 2] - s_higher[k - 1]).collect();
    let total = s_higher[0];
    Ok(GmcProfile {
        n,
        s_higher,
        s_k,
        total,
        violations,
    })
}

/// Weights for the weaving measure.
///
/// Stores both families: `Omega_k` (`k = 1..N-1`), weighting the
/// `S^(k->N)`, and the derived `omega_k = sum_{i<k} Omega_i` (`k = 2..N`),
/// weighting the genuine `S^k`.
#[derive(Clone, Debug)]
pub struct WeightScheme {
    n: usize,
    big_omega: Vec<f64>,
    small_omega: Vec<f64>,
}

impl WeightScheme {
    /// Build from the `Omega` family; all entries must be non-negative.
    pub fn from_big_omegas(n: usize, big_omega: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("weight scheme needs N >= 1".into()));
        }
        if big_omega.len() != n.saturating_sub(1) {
            return Err(Error::Domain(format!(
                "expected {} Omega weights for N = {n}, got {}",
                n - 1,
                big_omega.len()
            )));
        }
        if big_omega.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::Domain("Omega weights must be non-negative".into()));
        }
        let mut small_omega = Vec::with_capacity(big_omega.len());
        let mut run = 0.0;
        for &w in &big_omega {
            run += w;
            small_omega.push(run);
        }
        Ok(WeightScheme {
            n,
            big_omega,
            small_omega,
        })
    }

    /// Build from the `omega` family (`omega_k` for `k = 2..=N`), which must
    /// be non-negative. The derived `Omega` may carry signs (e.g. for the
    /// delta scheme); the dual-form identity still holds.
    pub fn from_small_omegas(n: usize, small_omega: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("weight scheme needs N >= 1".into()));
        }
        if small_omega.len() != n.saturating_sub(1) {
            return Err(Error::Domain(format!(
                "expected {} omega weights for N = {n}, got {}",
                n - 1,
                small_omega.len()
            )));
        }
        if small_omega.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::Domain("omega weights must be non-negative".into()));
        }
        let mut big_omega = Vec::with_capacity(small_omega.len());
        let mut prev = 0.0;
        for &w in &small_omega {
            big_omega.push(w - prev);
            prev = w;
        }
        Ok(WeightScheme {
            n,
            big_omega,
            small_omega,
        })
    }

    /// `omega_k = k - 1` (equivalently `Omega_k = 1`): the scaling weights.
    pub fn k_minus_one(n: usize) -> Self {
        Self::from_big_omegas(n, vec![1.0; n.saturating_sub(1)])
            .expect("constant weights are valid")
    }

    /// `omega_k = 1` for all `k`: weaving reduces to total correlations.
    pub fn uniform(n: usize) -> Self {
        Self::from_small_omegas(n, vec![1.0; n.saturating_sub(1)])
            .expect("constant weights are valid")
    }

    /// `omega_k = delta_{k,l}`: weaving picks out the genuine `l`-partite
    /// correlations.
    pub fn delta(n: usize, l: usize) -> Result<Self> {
        if l < 2 || l > n {
            return Err(Error::Domain(format!("delta weight index {l} out of 2..={n}")));
        }
        let mut small = vec![0.0; n - 1];
        small[l - 2] = 1.0;
        Self::from_small_omegas(n, small)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn big_omegas(&self) -> &[f64] {
        &self.big_omega
    }

    pub fn small_omegas(&self) -> &[f64] {
        &self.small_omega
    }
}

/// Weaving: `W = sum_{k=2..N} omega_k S^k`.
///
/// Both this form and the equivalent `sum_{k=1..N-1} Omega_k S^(k->N)` are
/// evaluated; a discrepancy beyond 1e-9 is an internal error.
pub fn weaving(profile: &GmcProfile, weights: &WeightScheme) -> Result<f64> {
    if weights.n != profile.n {
        return Err(Error::Domain(format!(
            "weight scheme sized for N = {}, profile has N = {}",
            weights.n, profile.n
        )));
    }
    let mut by_small = CompensatedSum::new();
    for k in 2..=profile.n {
        by_small.add(weights.small_omega[k - 2] * profile.s_k(k));
    }
    let mut by_big = CompensatedSum::new();
    for k in 1..profile.n {
        by_big.add(weights.big_omega[k - 1] * profile.s_higher(k));
    }
    let w = by_small.total();
    let w_dual = by_big.total();
    if (w - w_dual).abs() > 1e-9 * w.abs().max(1.0) {
        return Err(Error::Internal(format!(
            "weaving dual forms disagree: {w} vs {w_dual}"
        )));
    }
    Ok(w)
}
