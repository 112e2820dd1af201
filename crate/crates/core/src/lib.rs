//! Genuine multipartite correlations (GMCs), weaving, and superradiant
//! dynamics of Dicke states.
//!
//! The crate evaluates, in closed form, how the correlations of an `N`-qubit
//! Dicke state `|N, n_e>` (or of an incoherent mixture of Dicke states) are
//! distributed across cluster sizes `k`:
//!
//! * `S^(k->N)` — correlations of order higher than `k`, the relative-entropy
//!   distance from the global state to the closest product of clusters of
//!   size at most `k`;
//! * `S^k` — genuine `k`-partite correlations, the difference of consecutive
//!   `S^(k->N)` values;
//! * `T` — total correlations, `S^(1->N)`;
//! * `W` — weaving, a weighted sum of the `S^k` used to rank how correlations
//!   scale with system size.
//!
//! Everything is computed from reduced-state spectra that are hypergeometric
//! in the local excitation number, evaluated in log-space so that `N = 1000`
//! is routine. The [`superradiance`] module integrates the cascade rate
//! equations for cooperative decay and tracks the GMCs along the trajectory;
//! the [`oracle`] module provides a brute-force dense-matrix reference used
//! to certify the closed forms for small `N`.
//!
//! All entropies are in nats (natural logarithm).

pub mod cli;
pub mod dicke;
pub mod gmc;
mod ode;
pub mod oracle;
pub mod stable_math;
pub mod superradiance;

pub use dicke::{DickeLabel, DickeMixture, ReducedSpectrum, SymmetricState};
pub use gmc::{GmcProfile, WeightScheme};
pub use superradiance::{ExtremumReport, PeakQuantity, RateModel, Trajectory};

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an operation's arguments was violated.
    #[error("domain error: {0}")]
    Domain(String),
    /// A brute-force path was asked to exceed its capacity guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// The adaptive integrator could not continue (step-size underflow).
    #[error("integration failed at t = {t}: step size underflow")]
    Integration { t: f64 },
    /// An internal cross-check failed; indicates a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
