//! Precision limits of noisy atomic magnetometry.
//!
//! This crate computes, optimises, and bounds the time-normalised frequency
//! estimation error Δ²ω·T of a collective-spin sensor — N two-level atoms
//! precessing at an unknown frequency ω while dephasing along an arbitrary
//! (generally non-parallel) direction. Everything reduces to closed-form
//! single-spin channel coefficients, so evaluations cost microseconds at any
//! particle number, from a handful of ions to N = 10¹¹ atoms in a vapour
//! cell; a dense-matrix quantum oracle cross-checks every formula at small N.
//!
//! The modules layer as follows:
//!
//! - [`channel`]: the single-spin dephasing channel in closed form — decay
//!   and mixing coefficients (ξ, χ), their ω-derivatives, and a Kraus
//!   decomposition with a complete-positivity guard. Everything downstream
//!   consumes these coefficients.
//! - [`probes`]: initial collective-spin moments for coherent and
//!   one-axis-twisted spin-squeezed states, plus the squeezing-in-dB
//!   parameterisation used at the interface.
//! - [`metrology`]: moment propagation through the channel and the
//!   error-propagation precision Δ²ω·T for squeezed and coherent probes in
//!   both measurement geometries, with the coherent benchmark and the
//!   asymptotic scaling laws.
//! - [`ghz`]: parity-readout precision for GHZ probes, the ω = 0 limit, the
//!   optimal-time constant κ, and the envelope of size-dependent minima.
//! - [`bounds`]: analytic floors and scaling anchors — the parallel-noise
//!   floor 2εγ, short-time bound coefficients, the GHZ QFI envelope, the
//!   T₁/T₂ depolarisation mapping, and the M-quantity whose minimum attains
//!   the scenario-(a) floor.
//! - [`optimizer`]: deterministic two-stage minimisation (parallel log-log
//!   grid, then Nelder–Mead refinement) over interrogation time and
//!   twisting strength, plus the two analytic schedules and dense scans.
//! - [`oracle`]: a dense density-matrix simulator (exact Kraus application
//!   and RK4 master-equation integration, N ≤ 10) and the randomized
//!   equivalence suite that pins every closed form against it.
//! - [`cli`]: the `magfreq` command-line front end (see the README).
//!
//! Conventions, fixed throughout: ħ = 1; rates and frequencies in 1/s (no
//! 2π factors); the dephasing weights satisfy α_x + α_y + α_z = 1 at total
//! rate γ; time-normalised precision Δ²ω·T has units of 1/s and *smaller
//! is better*. Every fallible function returns [`Result`] with the error
//! taxonomy in [`error`] (invalid input, degenerate signal, CPTP violation,
//! unachievable target, verification failure).

pub mod bounds;
pub mod channel;
pub mod cli;
pub mod error;
pub mod ghz;
pub mod metrology;
pub mod optimizer;
pub mod oracle;
pub mod probes;

pub use error::{Error, Result};
