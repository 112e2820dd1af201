//! Brute-force reference path in the full 2^N-dimensional space.
//!
//! Dense state vectors, partial traces by index contraction, eigen-entropies,
//! and a scaling-and-squaring matrix exponential for the cascade generator.
//! Deliberately naive and independent of the closed-form main path; the
//! equivalence suite at the bottom certifies one against the other for small
//! `N` and is what the `verify` subcommand runs.

use crate::dicke::{
    mixture_entropy, reduced_spectrum_mixture, reduced_spectrum_pure, DickeLabel, DickeMixture,
};
use crate::gmc;
use crate::stable_math::h;
use crate::superradiance::{evolve_at, RateModel};
use crate::{Error, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Dense state vectors are capped at this many qubits.
pub const VECTOR_QUBIT_CAP: usize = 14;
/// Dense matrices (partial traces, projectors) are capped at this many qubits.
pub const MATRIX_QUBIT_CAP: usize = 10;
/// Cap for the dense rate-generator exponential.
pub const RATE_EXPM_CAP: usize = 64;

/// Eigenvalues below this are treated as exact zeros in entropies.
const EIGENVALUE_FLOOR: f64 = 1e-12;

/// The amplitude vector of `|N, n_e>` in the computational basis:
/// `1/sqrt(C(N, n_e))` on every bit string of Hamming weight `n_e`.
pub fn dense_dicke_state(label: DickeLabel) -> Result<Vec<f64>> {
    let n = label.num_qubits();
    if n > VECTOR_QUBIT_CAP {
        return Err(Error::Capacity(format!(
            "dense state vectors are limited to N <= {VECTOR_QUBIT_CAP} (asked for {n})"
        )));
    }
    let n_e = label.excitations() as u32;
    let mut count: u64 = 1;
    for i in 0..n_e as u64 {
        count = count * (n as u64 - i) / (i + 1);
    }
    let amp = 1.0 / (count as f64).sqrt();
    let mut psi = vec![0.0; 1 << n];
    for (idx, a) in psi.iter_mut().enumerate() {
        if (idx as u64).count_ones() == n_e {
            *a = amp;
        }
    }
    Ok(psi)
}

/// `|psi><psi|` as a dense matrix.
pub fn density_matrix(psi: &[f64]) -> DMatrix<f64> {
    let d = psi.len();
    DMatrix::from_fn(d, d, |i, j| psi[i] * psi[j])
}

/// Partial trace of a pure state over the last `N - k` qubits, keeping the
/// first `k`. Qubit `q` is bit `N - 1 - q` of the basis index.
pub fn dense_partial_trace(psi: &[f64], n: usize, k: usize) -> Result<DMatrix<f64>> {
    if k == 0 || k >= n {
        return Err(Error::Domain(format!(
            "partial trace keeps 1..N-1 qubits, asked for k = {k} of N = {n}"
        )));
    }
    if k > MATRIX_QUBIT_CAP {
        return Err(Error::Capacity(format!(
            "reduced matrices are limited to {MATRIX_QUBIT_CAP} qubits (asked for {k})"
        )));
    }
    debug_assert_eq!(psi.len(), 1 << n);
    let d_keep = 1usize << k;
    let d_env = 1usize << (n - k);
    let mut rho = DMatrix::zeros(d_keep, d_keep);
    for a in 0..d_keep {
        for b in 0..=a {
            let mut acc = 0.0;
            for e in 0..d_env {
                acc += psi[(a << (n - k)) | e] * psi[(b << (n - k)) | e];
            }
            rho[(a, b)] = acc;
            rho[(b, a)] = acc;
        }
    }
    Ok(rho)
}

/// Partial trace keeping an arbitrary qubit subset, in the order given.
pub fn dense_partial_trace_subset(psi: &[f64], n: usize, keep: &[usize]) -> Result<DMatrix<f64>> {
    let k = keep.len();
    if k == 0 || k >= n || keep.iter().any(|&q| q >= n) {
        return Err(Error::Domain("invalid qubit subset".into()));
    }
    if k > MATRIX_QUBIT_CAP {
        return Err(Error::Capacity(format!(
            "reduced matrices are limited to {MATRIX_QUBIT_CAP} qubits"
        )));
    }
    let keep_bits: Vec<usize> = keep.iter().map(|&q| n - 1 - q).collect();
    let env_bits: Vec<usize> = (0..n)
        .filter(|b| !keep_bits.contains(b))
        .collect();
    let scatter = |value: usize, bits: &[usize]| -> usize {
        let mut idx = 0;
        for (j, &pos) in bits.iter().enumerate() {
            if (value >> (bits.len() - 1 - j)) & 1 == 1 {
                idx |= 1 << pos;
            }
        }
        idx
    };
    let d_keep = 1usize << k;
    let d_env = 1usize << (n - k);
    let mut rho = DMatrix::zeros(d_keep, d_keep);
    for a in 0..d_keep {
        let ia = scatter(a, &keep_bits);
        for b in 0..=a {
            let ib = scatter(b, &keep_bits);
            let mut acc = 0.0;
            for e in 0..d_env {
                let ie = scatter(e, &env_bits);
                acc += psi[ia | ie] * psi[ib | ie];
            }
            rho[(a, b)] = acc;
            rho[(b, a)] = acc;
        }
    }
    Ok(rho)
}

/// Reduced matrix of a Dicke mixture: population-weighted sum of the
/// component partial traces (the full 2^N density matrix is never built).
pub fn dense_mixture_partial_trace(mix: &DickeMixture, k: usize) -> Result<DMatrix<f64>> {
    let n = mix.num_qubits();
    if k == 0 || k >= n {
        return Err(Error::Domain(format!(
            "partial trace keeps 1..N-1 qubits, asked for k = {k} of N = {n}"
        )));
    }
    let mut rho = DMatrix::zeros(1 << k, 1 << k);
    for (n_e, &p) in mix.populations().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let psi = dense_dicke_state(DickeLabel::new(n, n_e)?)?;
        rho += dense_partial_trace(&psi, n, k)? * p;
    }
    Ok(rho)
}

/// Dense density matrix of a Dicke mixture (capacity-guarded).
pub fn dense_mixture_matrix(mix: &DickeMixture) -> Result<DMatrix<f64>> {
    let n = mix.num_qubits();
    if n > MATRIX_QUBIT_CAP {
        return Err(Error::Capacity(format!(
            "dense mixture matrices are limited to N <= {MATRIX_QUBIT_CAP}"
        )));
    }
    let d = 1usize << n;
    let mut rho = DMatrix::zeros(d, d);
    for (n_e, &p) in mix.populations().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let psi = dense_dicke_state(DickeLabel::new(n, n_e)?)?;
        rho += density_matrix(&psi) * p;
    }
    Ok(rho)
}

/// Eigenvalues of a symmetric matrix, sorted descending, with the
/// sub-`1e-12` floor applied.
///
/// Rows/columns that are exactly zero contribute zero eigenvalues and are
/// stripped before the decomposition; the dense Dicke matrices are mostly
/// zeros outside one Hamming-weight sector, and the tridiagonal QL
/// implementation underneath does not converge on those without deflation.
pub fn spectrum_of(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !matrix.is_square() {
        return Err(Error::Domain("expected a square matrix".into()));
    }
    let dim = matrix.nrows();
    let mut asym = 0.0_f64;
    for i in 0..dim {
        for j in 0..i {
            asym = asym.max((matrix[(i, j)] - matrix[(j, i)]).abs());
        }
    }
    if asym > 1e-10 {
        return Err(Error::Domain(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let live: Vec<usize> = (0..dim)
        .filter(|&i| matrix.row(i).iter().any(|&v| v != 0.0))
        .collect();
    let mut eig: Vec<f64> = if live.is_empty() {
        Vec::new()
    } else if live.len() == dim {
        matrix.clone().symmetric_eigenvalues().iter().copied().collect()
    } else {
        let core = DMatrix::from_fn(live.len(), live.len(), |a, b| matrix[(live[a], live[b])]);
        core.symmetric_eigenvalues().iter().copied().collect()
    };
    if eig.iter().any(|v| !v.is_finite()) {
        return Err(Error::Internal(
            "eigendecomposition did not converge".into(),
        ));
    }
    for v in eig.iter_mut() {
        if *v < -1e-10 {
            return Err(Error::Domain(format!(
                "matrix has a negative eigenvalue {v:e} beyond tolerance"
            )));
        }
        if *v < EIGENVALUE_FLOOR {
            *v = 0.0;
        }
    }
    eig.resize(dim, 0.0);
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig)
}

/// Von Neumann entropy from an explicit eigendecomposition.
pub fn eigen_entropy(matrix: &DMatrix<f64>) -> Result<f64> {
    let eig = spectrum_of(matrix)?;
    let mut s = 0.0;
    for v in eig {
        s -= h(v)?;
    }
    Ok(s)
}

/// Exact action of the cascade generator exponential on `P_N(0) = 1`,
/// by scaled Taylor summation and repeated squaring.
pub fn rate_matrix_exponential(model: &RateModel, t: f64) -> Result<Vec<f64>> {
    let n = model.num_atoms();
    if n > RATE_EXPM_CAP {
        return Err(Error::Capacity(format!(
            "rate-matrix exponential limited to N <= {RATE_EXPM_CAP}"
        )));
    }
    if t < 0.0 {
        return Err(Error::Domain("time must be non-negative".into()));
    }
    let nu = model.decay_rates();
    let dim = n + 1;
    let mut gen = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        gen[(j, j)] = -nu[j] * t;
        if j > 0 {
            gen[(j - 1, j)] = nu[j] * t;
        }
    }
    let exp = expm(&gen);
    Ok(exp.column(n).iter().copied().collect())
}

/// Scaling-and-squaring Taylor exponential, accurate to ~1e-14 for the
/// essentially-nonnegative generators used here.
fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = a.nrows();
    let norm = a
        .row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / 2.0_f64.powi(squarings as i32);
    let mut sum = DMatrix::identity(dim, dim);
    let mut term = DMatrix::identity(dim, dim);
    for j in 1..=40 {
        term = (&term * &scaled) / j as f64;
        sum += &term;
        let tnorm = term.iter().map(|x| x.abs()).fold(0.0_f64, f64::max);
        if tnorm < 1e-22 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

// ---------------------------------------------------------------------------
// equivalence suite
// ---------------------------------------------------------------------------

/// One closed-form vs brute-force comparison.
#[derive(Clone, Debug)]
pub struct EquivalenceCheck {
    pub name: &'static str,
    /// The offending coordinates, e.g. `(N=4, n_e=2, k=1)`.
    pub tuple: String,
    /// Worst absolute deviation observed for this check.
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Outcome of [`run_equivalence_suite`].
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub checks: Vec<EquivalenceCheck>,
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&EquivalenceCheck> {
        self.checks.iter().find(|c| !c.pass)
    }

    fn push(&mut self, name: &'static str, tuple: String, deviation: f64, tolerance: f64) {
        self.checks.push(EquivalenceCheck {
            name,
            tuple,
            deviation,
            tolerance,
            pass: deviation.abs() <= tolerance,
        });
    }
}

/// Test-fixture hook: perturb one closed-form spectrum weight so the suite
/// must catch and name the tuple.
#[derive(Clone, Copy, Debug)]
pub struct FaultInjection {
    pub n: usize,
    pub n_e: usize,
    pub k: usize,
    pub offset: f64,
}

/// Run the full oracle-equivalence suite up to `max_n` qubits.
///
/// Matrix-backed checks stop at `N = 10`; for `11 <= max_n <= 14` only the
/// vector paths (state norms) keep running, with a warning.
pub fn run_equivalence_suite(
    max_n: usize,
    inject: Option<FaultInjection>,
) -> Result<VerificationReport> {
    if max_n < 2 {
        return Err(Error::Domain("verification needs max-N >= 2".into()));
    }
    if max_n > VECTOR_QUBIT_CAP {
        return Err(Error::Capacity(format!(
            "verification capped at N <= {VECTOR_QUBIT_CAP}"
        )));
    }
    let mut report = VerificationReport::default();
    if max_n > MATRIX_QUBIT_CAP {
        report.warnings.push(format!(
            "matrix paths (spectra, entropies) capped at N <= {MATRIX_QUBIT_CAP}; \
             vector paths run to N = {max_n}"
        ));
    }

    // vector paths: state norms
    for n in 1..=max_n {
        let mut worst = 0.0_f64;
        let mut tuple = String::new();
        for n_e in 0..=n {
            let psi = dense_dicke_state(DickeLabel::new(n, n_e)?)?;
            let norm: f64 = psi.iter().map(|a| a * a).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > worst {
                worst = (norm - 1.0).abs();
                tuple = format!("(N={n}, n_e={n_e})");
            }
        }
        report.push("dense state norm", tuple, worst, 1e-12);
    }

    // matrix paths: spectra and GMC equivalence, pure states
    let n_matrix = max_n.min(MATRIX_QUBIT_CAP);
    for n in 2..=n_matrix {
        let per_ne: Vec<(Vec<EquivalenceCheck>, Result<()>)> = (0..=n)
            .into_par_iter()
            .map(|n_e| {
                let mut checks = Vec::new();
                let run = pure_state_checks(n, n_e, inject, &mut checks);
                (checks, run)
            })
            .collect();
        for (checks, run) in per_ne {
            run?;
            report.checks.extend(checks);
        }
    }

    // mixtures along the cascade
    for n in [4usize, 6, 8] {
        if n > n_matrix {
            continue;
        }
        mixture_checks(n, &mut report)?;
    }

    // adaptive integrator vs matrix exponential, one mid-cascade point
    if n_matrix >= 6 {
        let model = RateModel::with_unit_rates(6)?;
        let t = 0.2;
        let trajectory = evolve_at(&model, &[t])?;
        let reference = rate_matrix_exponential(&model, t)?;
        let worst = trajectory.populations[0]
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        report.push(
            "adaptive integrator vs matrix exponential",
            format!("(N=6, gamma*t={t})"),
            worst,
            1e-9,
        );
    }

    // eigen-entropy is basis independent: conjugate by a fixed rotation
    {
        let spec = [0.5, 0.3, 0.15, 0.05];
        let rho = DMatrix::from_fn(4, 4, |i, j| if i == j { spec[i] } else { 0.0 });
        let q = deterministic_orthogonal(4);
        let rotated = &q * &rho * q.transpose();
        let dev = (eigen_entropy(&rho)? - eigen_entropy(&rotated)?).abs();
        report.push("eigen-entropy basis independence", "(dim=4)".into(), dev, 1e-9);
    }

    Ok(report)
}

fn pure_state_checks(
    n: usize,
    n_e: usize,
    inject: Option<FaultInjection>,
    checks: &mut Vec<EquivalenceCheck>,
) -> Result<()> {
    let label = DickeLabel::new(n, n_e)?;
    let psi = dense_dicke_state(label)?;

    // oracle entropies per cluster size (k = n uses the full projector)
    let mut oracle_entropy = vec![0.0; n + 1];
    let mut oracle_spectra: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    for k in 1..=n {
        let spectrum = if k < n {
            spectrum_of(&dense_partial_trace(&psi, n, k)?)?
        } else {
            spectrum_of(&density_matrix(&psi))?
        };
        let mut s = 0.0;
        for &v in &spectrum {
            s -= h(v)?;
        }
        oracle_entropy[k] = s;
        oracle_spectra[k] = spectrum;
    }

    for k in 1..=n {
        // spectrum multiset equivalence
        let mut weights: Vec<f64> = reduced_spectrum_pure(label, k)?.weights().to_vec();
        if let Some(fi) = inject {
            if fi.n == n && fi.n_e == n_e && fi.k == k {
                weights[n_e.min(k)] += fi.offset;
            }
        }
        weights.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let dev = multiset_deviation(&weights, &oracle_spectra[k]);
        checks.push(EquivalenceCheck {
            name: "pure reduced spectrum vs dense partial trace",
            tuple: format!("(N={n}, n_e={n_e}, k={k})"),
            deviation: dev,
            tolerance: 1e-10,
            pass: dev <= 1e-10,
        });

        // closed-form GMC vs oracle-assembled homogeneous-partition formula
        let r = n % k;
        let mut assembled = (n / k) as f64 * oracle_entropy[k] - oracle_entropy[n];
        if r > 0 {
            assembled += oracle_entropy[r];
        }
        let closed = gmc::higher_than(&label, k)?;
        let dev = (closed - assembled).abs();
        checks.push(EquivalenceCheck {
            name: "pure GMC vs oracle assembly",
            tuple: format!("(N={n}, n_e={n_e}, k={k})"),
            deviation: dev,
            tolerance: 1e-9,
            pass: dev <= 1e-9,
        });
    }
    Ok(())
}

fn mixture_checks(n: usize, report: &mut VerificationReport) -> Result<()> {
    let model = RateModel::with_unit_rates(n)?;
    let times: Vec<f64> = (0..5)
        .map(|i| 1e-2 * 100.0_f64.powf(i as f64 / 4.0))
        .collect();
    let trajectory = evolve_at(&model, &times)?;
    for (i, &t) in times.iter().enumerate() {
        let reference = rate_matrix_exponential(&model, t)?;
        let dev = trajectory.populations[i]
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        report.push(
            "cascade populations vs matrix exponential",
            format!("(N={n}, gamma*t={t:.4})"),
            dev,
            1e-9,
        );

        let mix = DickeMixture::new(reference)?;
        let rho_full = dense_mixture_matrix(&mix)?;
        let global_oracle = eigen_entropy(&rho_full)?;
        let global_dev = (mixture_entropy(&mix) - global_oracle).abs();
        report.push(
            "mixture entropy vs dense eigendecomposition",
            format!("(N={n}, gamma*t={t:.4})"),
            global_dev,
            1e-9,
        );

        let mut oracle_entropy = vec![0.0; n + 1];
        oracle_entropy[n] = global_oracle;
        for k in 1..n {
            let rho_k = dense_mixture_partial_trace(&mix, k)?;
            let spectrum = spectrum_of(&rho_k)?;
            let mut weights: Vec<f64> = reduced_spectrum_mixture(&mix, k)?.weights().to_vec();
            weights.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let dev = multiset_deviation(&weights, &spectrum);
            report.push(
                "mixture reduced spectrum vs dense partial trace",
                format!("(N={n}, k={k}, gamma*t={t:.4})"),
                dev,
                1e-9,
            );
            let mut s = 0.0;
            for &v in &spectrum {
                s -= h(v)?;
            }
            oracle_entropy[k] = s;
        }
        for k in 1..=n {
            let r = n % k;
            let mut assembled = (n / k) as f64 * oracle_entropy[k] - oracle_entropy[n];
            if r > 0 {
                assembled += oracle_entropy[r];
            }
            let closed = gmc::higher_than(&mix, k)?;
            let dev = (closed - assembled).abs();
            report.push(
                "mixture GMC vs oracle assembly",
                format!("(N={n}, k={k}, gamma*t={t:.4})"),
                dev,
                1e-9,
            );
        }
    }
    Ok(())
}

/// Worst pairwise deviation between two descending-sorted spectra, with
/// zero-padding for rank differences.
fn multiset_deviation(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    let mut worst = 0.0_f64;
    for i in 0..len {
        let x = a.get(i).copied().unwrap_or(0.0);
        let y = b.get(i).copied().unwrap_or(0.0);
        worst = worst.max((x - y).abs());
    }
    worst
}

/// A fixed orthogonal matrix (QR of an LCG-filled matrix); deterministic, no
/// RNG dependency in the main path.
fn deterministic_orthogonal(dim: usize) -> DMatrix<f64> {
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let m = DMatrix::from_fn(dim, dim, |_, _| next());
    m.qr().q()
}
