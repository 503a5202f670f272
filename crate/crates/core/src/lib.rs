//! Numerical laboratory for a family of 2D coupled active-scalar systems
//! that model magnetic reconnection.
//!
//! Two scalars σ₊, σ₋ are each transported by velocities obtained from the
//! pair through one of four linear laws (right/left handed × screened/
//! unscreened); equivalently F = (σ₊+σ₋)/2 plays the role of a magnetic
//! stream function source and ω = (σ₊−σ₋)/2 of a vorticity. The crate
//! provides:
//!
//! - [`spectral`]: periodic grids, FFT machinery, and the velocity
//!   operators 𝕌 = ∇⊥Δ⁻¹, 𝔹 = ∇⊥(𝕀−Δ)⁻¹, 𝕊 = 𝕌+𝔹 (= 2∇⊥𝕂).
//! - [`solver`]: RK4 transport of the pair with 2/3-rule dealiasing,
//!   CFL step control, and an integrating factor for resistive runs.
//! - [`bessel`]: the scalar kernels K₀, K₁, the regularized contour
//!   kernel G̃, Ḡ, and the vector kernel 𝒦 of 𝕊.
//! - [`contour`]: boundary-integral (contour-dynamics) evolution of
//!   patch solutions of the left-handed system, analytic rotating
//!   backgrounds, merger detection, and perturbation measurement.
//! - [`point_vortex`]: the 4-fold symmetric point-vortex configuration
//!   with its conserved ratio and closed-form merger time.
//! - [`diagnostics`]: norms, quadrant moments E₁/E₂ and their
//!   double-integral rate oracles, overlap, support topology, symmetry
//!   defect, and order-fitting helpers.
//! - [`scenario`]: constructors for every preset configuration, with
//!   numerical verification of the hypotheses each run requires.
//! - [`config`] / [`io`] / [`sweep`]: run configuration, artifact
//!   formats (snapshots, CSV diagnostics, PGM heatmaps, manifests), and
//!   parameter-sweep orchestration.
//!
//! All fields are real `f64` samples on a periodic square; all operators
//! act spectrally with exact lattice wavenumbers. The library is
//! deterministic: re-running a configuration reproduces outputs
//! bit-for-bit with the same transform implementation.

pub mod bessel;
pub mod config;
pub mod contour;
pub mod diagnostics;
pub mod grid;
pub mod io;
pub mod point_vortex;
pub mod scenario;
pub mod solver;
pub mod spectral;
pub mod sweep;

pub use config::Config;
pub use grid::{Handedness, ModelVariant, ScalarField, ScalarPair, Screening, TorusGrid, VectorField};
pub use io::{regenerate_report, run_scenario, run_scenario_with_echo, RunSummary};
pub use scenario::{HypothesisCheck, InitialData, RunSettings, Scenario, SmoothMergerSpec};
pub use solver::Solver;
pub use spectral::SpectralOps;

/// Crate-wide error type.
///
/// The three variants map onto the CLI exit codes: configuration errors
/// exit 2, numeric aborts (NaN/∞ detected mid-run) exit 3, and failed
/// scenario hypothesis checks exit 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration: unknown key, out-of-range value, bad grid size.
    #[error("configuration error: {0}")]
    Config(String),
    /// Non-finite value produced during time stepping.
    #[error("numeric abort: {0}")]
    Numeric(String),
    /// A scenario's theorem-hypothesis checklist failed.
    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),
    /// Artifact I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
