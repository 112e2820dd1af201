//! Dicke states, Dicke mixtures, and their reduced-state spectra.
//!
//! A Dicke state `|N, n_e>` is permutation invariant, so the reduced state of
//! any `k` of its qubits is diagonal in the `k`-qubit Dicke basis with
//! hypergeometric eigenvalues. The same holds for incoherent mixtures of
//! Dicke states. Reduced states are therefore stored by spectrum only — the
//! `2^k`-dimensional matrix is never materialized outside the oracle.

use crate::stable_math::{compensated_sum, h, hypergeometric_weight, CompensatedSum, LnBinomTable};
use crate::{Error, Result};

/// Negative round-off tolerated (and clamped) on mixture populations.
pub const POPULATION_NEG_TOL: f64 = 1e-12;
/// Allowed deviation of a population sum from 1 before renormalization.
pub const POPULATION_SUM_TOL: f64 = 1e-10;
/// Allowed deviation of spectrum weights from unit normalization.
const SPECTRUM_SUM_TOL: f64 = 1e-10;

/// The pure Dicke state `|N, n_e>`: `n_e` of `N` qubits excited, symmetrized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DickeLabel {
    n: usize,
    n_e: usize,
}

impl DickeLabel {
    pub fn new(n: usize, n_e: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("Dicke state needs at least one qubit".into()));
        }
        if n_e > n {
            return Err(Error::Domain(format!(
                "excitation count {n_e} exceeds qubit count {n}"
            )));
        }
        Ok(DickeLabel { n, n_e })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn excitations(&self) -> usize {
        self.n_e
    }
}

/// A state diagonal in the Dicke basis: populations `P_0 ..= P_N`.
///
/// Construction clamps round-off negatives to zero and renormalizes; inputs
/// outside the tolerances are rejected rather than silently repaired.
#[derive(Clone, Debug)]
pub struct DickeMixture {
    n: usize,
    populations: Vec<f64>,
}

impl DickeMixture {
    /// Strict constructor: negatives below `-1e-12` or a total off from 1 by
    /// more than `1e-10` are domain errors.
    pub fn new(populations: Vec<f64>) -> Result<Self> {
        Self::sanitized(populations, POPULATION_NEG_TOL, POPULATION_SUM_TOL)
    }

    /// Constructor with caller-chosen tolerances, for feeding in rows from an
    /// error-controlled integrator.
    pub fn sanitized(mut populations: Vec<f64>, neg_tol: f64, sum_tol: f64) -> Result<Self> {
        if populations.len() < 2 {
            return Err(Error::Domain(
                "population vector needs at least two entries (N >= 1)".into(),
            ));
        }
        for (j, p) in populations.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::Domain(format!("population P_{j} is not finite")));
            }
            if *p < -neg_tol {
                return Err(Error::Domain(format!(
                    "population P_{j} = {p:e} below -{neg_tol:e}"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total = compensated_sum(populations.iter().copied());
        if (total - 1.0).abs() > sum_tol {
            return Err(Error::Domain(format!(
                "populations sum to {total} (deviation beyond {sum_tol:e})"
            )));
        }
        for p in populations.iter_mut() {
            *p /= total;
        }
        Ok(DickeMixture {
            n: populations.len() - 1,
            populations,
        })
    }

    /// The mixture with all weight on a single Dicke level.
    pub fn pure(label: DickeLabel) -> Self {
        let mut populations = vec![0.0; label.n + 1];
        populations[label.n_e] = 1.0;
        DickeMixture {
            n: label.n,
            populations,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }
}

/// Eigenvalues of a `k`-party reduced state, indexed by the local excitation
/// number `i = 0 ..= k`.
#[derive(Clone, Debug)]
pub struct ReducedSpectrum {
    k: usize,
    weights: Vec<f64>,
}

impl ReducedSpectrum {
    fn validated(k: usize, weights: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(weights.len(), k + 1);
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::Internal(format!(
                "reduced spectrum for k = {k} sums to {total}"
            )));
        }
        Ok(ReducedSpectrum { k, weights })
    }

    pub fn cluster_size(&self) -> usize {
        self.k
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Reduced spectrum of `k` qubits of the pure state `|N, n_e>`:
/// `w_i = C(k,i) C(N-k, n_e-i) / C(N, n_e)`.
pub fn reduced_spectrum_pure(state: DickeLabel, k: usize) -> Result<ReducedSpectrum> {
    if k == 0 || k > state.n {
        return Err(Error::Domain(format!(
            "cluster size {k} out of range for N = {}",
            state.n
        )));
    }
    let weights = (0..=k as i64)
        .map(|i| hypergeometric_weight(state.n, state.n_e, k, i))
        .collect::<Result<Vec<f64>>>()?;
    ReducedSpectrum::validated(k, weights)
}

/// Reduced spectrum of `k` qubits of a Dicke mixture:
/// `w_j = sum_l C(k,j) C(N-k,l) / C(N, j+l) * P_{j+l}`.
///
/// Terms are evaluated in log-space, exponentiated, and accumulated in
/// ascending `l` with compensated summation.
pub fn reduced_spectrum_mixture(mix: &DickeMixture, k: usize) -> Result<ReducedSpectrum> {
    if k == 0 || k > mix.n {
        return Err(Error::Domain(format!(
            "cluster size {k} out of range for N = {}",
            mix.n
        )));
    }
    let n = mix.n;
    let table = LnBinomTable::new(n);
    let mut weights = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let ln_cluster = table.ln_binomial(k, j as i64);
        let mut acc = CompensatedSum::new();
        for l in 0..=(n - k) {
            let p = mix.populations[j + l];
            if p == 0.0 {
                continue;
            }
            let log_w =
                ln_cluster + table.ln_binomial(n - k, l as i64) - table.ln_binomial(n, (j + l) as i64);
            let w = crate::stable_math::LogValue::new(log_w).exp();
            acc.add(w * p);
        }
        weights.push(acc.total());
    }
    ReducedSpectrum::validated(k, weights)
}

/// Shared entropy kernel: `-sum_i h(p_i)` in nats, compensated accumulation.
fn entropy_from_probs(probs: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &p in probs {
        acc.add(h(p).expect("entropy inputs are clamped non-negative"));
    }
    -acc.total()
}

/// Von Neumann entropy of a reduced spectrum, in nats.
pub fn entropy_of_spectrum(spec: &ReducedSpectrum) -> f64 {
    entropy_from_probs(&spec.weights)
}

/// Von Neumann entropy of the full mixture, `-sum_j h(P_j)`.
pub fn mixture_entropy(mix: &DickeMixture) -> f64 {
    entropy_from_probs(&mix.populations)
}

/// A permutation-invariant `N`-qubit state whose reduced spectra have a
/// closed form. The GMC machinery is generic over this.
pub trait SymmetricState {
    fn num_qubits(&self) -> usize;
    fn reduced_spectrum(&self, k: usize) -> Result<ReducedSpectrum>;
    /// Entropy of the global state, in nats.
    fn global_entropy(&self) -> f64;
}

impl SymmetricState for DickeLabel {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn reduced_spectrum(&self, k: usize) -> Result<ReducedSpectrum> {
        reduced_spectrum_pure(*self, k)
    }

    fn global_entropy(&self) -> f64 {
        0.0
    }
}

impl SymmetricState for DickeMixture {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn reduced_spectrum(&self, k: usize) -> Result<ReducedSpectrum> {
        reduced_spectrum_mixture(self, k)
    }

    fn global_entropy(&self) -> f64 {
        mixture_entropy(self)
    }
}
