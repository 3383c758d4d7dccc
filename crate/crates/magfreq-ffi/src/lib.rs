//! C ABI for the magfreq precision engine.
//!
//! Calling conventions, uniform across the surface:
//!
//! - Every fallible function returns a [`MagfreqStatus`] and writes its
//!   results through out-pointers, which are touched only on
//!   [`MagfreqStatus::Ok`].
//! - The noise model is an opaque handle ([`MagfreqNoise`]): build one with
//!   a `magfreq_noise_*` constructor, pass it by pointer, and release it
//!   with [`magfreq_noise_free`]. Handles are immutable after construction
//!   and safe to share across threads.
//! - Probe geometries travel as integer codes (`MAGFREQ_GEOMETRY_*`).
//! - Panics never unwind across the boundary; they are caught and
//!   reported as [`MagfreqStatus::Internal`].
//!
//! The build script regenerates `include/magfreq.h` from this file, so the
//! header in the tree always matches the compiled symbols.

use std::panic::{catch_unwind, AssertUnwindSafe};

use magfreq::bounds::{self, MixedNoiseSpec};
use magfreq::channel::NoiseModel;
use magfreq::ghz;
use magfreq::metrology::{self, Geometry, ProbeSpec};
use magfreq::optimizer::{self, SearchDomain};
use magfreq::oracle;
use magfreq::probes;
use magfreq::Error;

// ---------------------------------------------------------------------------
// Status codes and geometry codes
// ---------------------------------------------------------------------------

/// Status code returned by every fallible function in this ABI.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagfreqStatus {
    /// Success; all out-parameters were written.
    Ok = 0,
    /// A panic was caught at the language boundary (library bug; the
    /// out-parameters are untouched).
    Internal = 1,
    /// An input violated a documented precondition, or a required pointer
    /// was null.
    InvalidParameter = 2,
    /// The measurement signal carries no information at this parameter
    /// point (the frequency derivative of the measured mean vanished), so
    /// the precision diverges.
    DegenerateSignal = 3,
    /// An internal verification or complete-positivity guard tripped;
    /// this signals a library bug, never bad input.
    Verification = 4,
    /// The requested target (e.g. a squeezing level in dB) is outside the
    /// physically reachable range for the given probe.
    Unachievable = 5,
}

/// Geometry code: squeezed probe polarised along x, squeezed and measured
/// along y (scenario a).
pub const MAGFREQ_GEOMETRY_SCENARIO_A: i32 = 0;
/// Geometry code: squeezed probe polarised along y, squeezed and measured
/// along x (scenario b).
pub const MAGFREQ_GEOMETRY_SCENARIO_B: i32 = 1;
/// Geometry code: coherent probe along x, measured along y.
pub const MAGFREQ_GEOMETRY_CSS_X: i32 = 2;
/// Geometry code: coherent probe along y, measured along x.
pub const MAGFREQ_GEOMETRY_CSS_Y: i32 = 3;
/// Geometry code: GHZ probe with parity readout (accepted by the
/// optimiser; pointwise evaluation goes through `magfreq_ghz_precision`).
pub const MAGFREQ_GEOMETRY_GHZ: i32 = 4;

fn status_of(err: &Error) -> MagfreqStatus {
    match err.code() {
        2 => MagfreqStatus::InvalidParameter,
        3 => MagfreqStatus::DegenerateSignal,
        5 => MagfreqStatus::Unachievable,
        _ => MagfreqStatus::Verification,
    }
}

fn geometry_from(code: i32) -> Result<Geometry, MagfreqStatus> {
    match code {
        MAGFREQ_GEOMETRY_SCENARIO_A => Ok(Geometry::ScenarioA),
        MAGFREQ_GEOMETRY_SCENARIO_B => Ok(Geometry::ScenarioB),
        MAGFREQ_GEOMETRY_CSS_X => Ok(Geometry::CssX),
        MAGFREQ_GEOMETRY_CSS_Y => Ok(Geometry::CssY),
        MAGFREQ_GEOMETRY_GHZ => Ok(Geometry::Ghz),
        _ => Err(MagfreqStatus::InvalidParameter),
    }
}

/// Runs a fallible body with a panic guard; the body reports early exits
/// through `Err(status)`.
fn guarded<F>(body: F) -> MagfreqStatus
where
    F: FnOnce() -> Result<(), MagfreqStatus>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MagfreqStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => MagfreqStatus::Internal,
    }
}

unsafe fn out_ref<'a, T>(ptr: *mut T) -> Result<&'a mut T, MagfreqStatus> {
    ptr.as_mut().ok_or(MagfreqStatus::InvalidParameter)
}

unsafe fn noise_ref<'a>(ptr: *const MagfreqNoise) -> Result<&'a NoiseModel, MagfreqStatus> {
    ptr.as_ref().map(|h| &h.0).ok_or(MagfreqStatus::InvalidParameter)
}

// ---------------------------------------------------------------------------
// Result structs
// ---------------------------------------------------------------------------

/// One precision evaluation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagfreqPrecision {
    /// Time-normalised mean squared error of the frequency estimate,
    /// Δ²ω·T (units 1/s; smaller is better).
    pub msqe_times_t: f64,
    /// Signal slope ∂_ω⟨Ĵ⟩ at the working point.
    pub signal_derivative: f64,
    /// Evolved variance of the measured collective component.
    pub variance: f64,
    /// Precision gain over the coherent benchmark sharing this
    /// measurement axis (exactly 1 for the coherent geometries).
    pub gain_vs_css: f64,
}

/// Output of the two-stage (t, μ) optimiser.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagfreqOptimum {
    /// Optimal interrogation time (s).
    pub t_star: f64,
    /// Optimal twisting strength (rad); 0 for geometries without one.
    pub mu_star: f64,
    /// Minimised Δ²ω·T (1/s).
    pub msqe_times_t: f64,
    /// Number of objective evaluations spent.
    pub evaluations: u64,
    /// 1 if the refinement stage met its relative tolerance, 0 otherwise.
    pub converged: i32,
}

// ---------------------------------------------------------------------------
// Noise-model handles
// ---------------------------------------------------------------------------

/// Opaque dephasing-noise handle: total rate γ and directional weights
/// (α_x, α_y, α_z) with α_x + α_y + α_z = 1. Create with a
/// `magfreq_noise_*` constructor; release with `magfreq_noise_free`.
pub struct MagfreqNoise(NoiseModel);

/// Creates a noise model with explicit directional weights.
///
/// Safety: `out` must be a valid pointer; the handle written to it must be
/// released with `magfreq_noise_free`.
#[no_mangle]
pub unsafe extern "C" fn magfreq_noise_new(
    gamma: f64,
    alpha_x: f64,
    alpha_y: f64,
    alpha_z: f64,
    out: *mut *mut MagfreqNoise,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        let model =
            NoiseModel::new(gamma, alpha_x, alpha_y, alpha_z).map_err(|e| status_of(&e))?;
        *out = Box::into_raw(Box::new(MagfreqNoise(model)));
        Ok(())
    })
}

/// Creates a purely transversal noise model (α_x = 1).
///
/// Safety: as for `magfreq_noise_new`.
#[no_mangle]
pub unsafe extern "C" fn magfreq_noise_transversal(
    gamma: f64,
    out: *mut *mut MagfreqNoise,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        let model = NoiseModel::transversal(gamma).map_err(|e| status_of(&e))?;
        *out = Box::into_raw(Box::new(MagfreqNoise(model)));
        Ok(())
    })
}

/// Creates a mostly-transversal model with a parallel admixture:
/// α_x = 1 − ε, α_z = ε.
///
/// Safety: as for `magfreq_noise_new`.
#[no_mangle]
pub unsafe extern "C" fn magfreq_noise_mixed(
    gamma: f64,
    epsilon: f64,
    out: *mut *mut MagfreqNoise,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        let model = NoiseModel::mixed(gamma, epsilon).map_err(|e| status_of(&e))?;
        *out = Box::into_raw(Box::new(MagfreqNoise(model)));
        Ok(())
    })
}

/// Creates the mixed model equivalent to depolarisation with relaxation
/// time `t1` and coherence time `t2` (both must be finite and positive).
/// Use `magfreq_depolarization_mapping` to recover the implied (γ, ε).
///
/// Safety: as for `magfreq_noise_new`.
#[no_mangle]
pub unsafe extern "C" fn magfreq_noise_from_relaxation(
    t1: f64,
    t2: f64,
    out: *mut *mut MagfreqNoise,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        let spec = bounds::depolarization_mapping(t1, t2).map_err(|e| status_of(&e))?;
        let model = spec.noise_model().map_err(|e| status_of(&e))?;
        *out = Box::into_raw(Box::new(MagfreqNoise(model)));
        Ok(())
    })
}

/// Reads back the total dephasing rate γ of a handle.
///
/// Safety: `noise` must be a live handle from a `magfreq_noise_*`
/// constructor; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn magfreq_noise_gamma(
    noise: *const MagfreqNoise,
    out: *mut f64,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        *out = noise_ref(noise)?.gamma();
        Ok(())
    })
}

/// Releases a noise handle. Passing null is a no-op.
///
/// Safety: `noise` must be null or a live handle, and must not be used
/// after this call.
#[no_mangle]
pub unsafe extern "C" fn magfreq_noise_free(noise: *mut MagfreqNoise) {
    if !noise.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(noise))));
    }
}

// ---------------------------------------------------------------------------
// Precision evaluation
// ---------------------------------------------------------------------------

/// Δ²ω·T for a squeezed or coherent probe: `n` spins in the geometry
/// given by `geometry` (a `MAGFREQ_GEOMETRY_*` code), twisting strength
/// `mu` (must be 0 for the coherent geometries), frequency `omega`,
/// interrogation time `t`. GHZ probes are rejected here; call
/// `magfreq_ghz_precision` instead.
///
/// Safety: `noise` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn magfreq_precision(
    noise: *const MagfreqNoise,
    n: f64,
    geometry: i32,
    mu: f64,
    omega: f64,
    t: f64,
    out: *mut MagfreqPrecision,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        let noise = noise_ref(noise)?;
        let spec = ProbeSpec::new(n, geometry_from(geometry)?, mu).map_err(|e| status_of(&e))?;
        let result = metrology::precision(&spec, noise, omega, t).map_err(|e| status_of(&e))?;
        *out = MagfreqPrecision {
            msqe_times_t: result.msqe_times_t,
            signal_derivative: result.signal_derivative,
            variance: result.variance,
            gain_vs_css: result.gain_vs_css,
        };
        Ok(())
    })
}

/// Δ²ω·T for an `n`-spin GHZ probe with parity readout.
///
/// Safety: `noise` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn magfreq_ghz_precision(
    noise: *const MagfreqNoise,
    n: f64,
    omega: f64,
    t: f64,
    out: *mut f64,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        let noise = noise_ref(noise)?;
        *out = ghz::ghz_precision(n, noise, omega, t).map_err(|e| status_of(&e))?;
        Ok(())
    })
}

/// Closed-form Δ²ω·T for a coherent probe under purely transversal noise
/// at rate `gamma` (regular at ω = 0 and at 2ω = γ).
///
/// Safety: `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn magfreq_css_precision_closed_form(
    n: f64,
    gamma: f64,
    omega: f64,
    t: f64,
    out: *mut f64,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        *out =
            metrology::css_precision_closed_form(n, gamma, omega, t).map_err(|e| status_of(&e))?;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Optimisation and schedules
// ---------------------------------------------------------------------------

/// Minimises Δ²ω·T over interrogation time and twisting strength on the
/// default search domain for the handle's rate (t ∈ [1e-6/γ, 1e2/γ],
/// μ ∈ [1e-10, 1.5], 32×32 log grid, then Nelder–Mead refinement). The
/// result is deterministic: identical inputs give bitwise-identical
/// outputs.
///
/// Safety: `noise` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn magfreq_optimize(
    noise: *const MagfreqNoise,
    n: f64,
    geometry: i32,
    omega: f64,
    out: *mut MagfreqOptimum,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        let noise = noise_ref(noise)?;
        let domain = SearchDomain::default_for(noise.gamma()).map_err(|e| status_of(&e))?;
        let opt = optimizer::optimize(n, geometry_from(geometry)?, noise, omega, &domain)
            .map_err(|e| status_of(&e))?;
        *out = MagfreqOptimum {
            t_star: opt.t_star,
            mu_star: opt.mu_star,
            msqe_times_t: opt.msqe_times_t,
            evaluations: opt.evaluations as u64,
            converged: i32::from(opt.converged),
        };
        Ok(())
    })
}

/// As `magfreq_optimize`, but over an explicit log-spaced search box
/// with `grid_t` × `grid_mu` coarse points (each ≥ 8).
///
/// Safety: `noise` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn magfreq_optimize_in(
    noise: *const MagfreqNoise,
    n: f64,
    geometry: i32,
    omega: f64,
    t_lo: f64,
    t_hi: f64,
    mu_lo: f64,
    mu_hi: f64,
    grid_t: u32,
    grid_mu: u32,
    out: *mut MagfreqOptimum,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        let noise = noise_ref(noise)?;
        let domain = SearchDomain::new(
            t_lo,
            t_hi,
            mu_lo,
            mu_hi,
            grid_t as usize,
            grid_mu as usize,
        )
        .map_err(|e| status_of(&e))?;
        let opt = optimizer::optimize(n, geometry_from(geometry)?, noise, omega, &domain)
            .map_err(|e| status_of(&e))?;
        *out = MagfreqOptimum {
            t_star: opt.t_star,
            mu_star: opt.mu_star,
            msqe_times_t: opt.msqe_times_t,
            evaluations: opt.evaluations as u64,
            converged: i32::from(opt.converged),
        };
        Ok(())
    })
}

/// Nearly-optimal scenario-(b) schedule t = (γω)^{−1/2}·N^{−1/8},
/// μ = (γ/ω)^{1/4}·(N/4)^{−4/5}.
///
/// Safety: `t_out` and `mu_out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn magfreq_schedule_b(
    n: f64,
    gamma: f64,
    omega: f64,
    t_out: *mut f64,
    mu_out: *mut f64,
) -> MagfreqStatus {
    guarded(|| {
        let t_out = out_ref(t_out)?;
        let mu_out = out_ref(mu_out)?;
        let (t, mu) = optimizer::schedule_b(n, gamma, omega).map_err(|e| status_of(&e))?;
        *t_out = t;
        *mu_out = mu;
        Ok(())
    })
}

/// Power-law scenario-(a) schedule t = t0·N^{−1/s}, μ = μ0·N^{−s/(s+1)}
/// (requires s > 1).
///
/// Safety: `t_out` and `mu_out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn magfreq_schedule_a(
    n: f64,
    s: f64,
    t0: f64,
    mu0: f64,
    t_out: *mut f64,
    mu_out: *mut f64,
) -> MagfreqStatus {
    guarded(|| {
        let t_out = out_ref(t_out)?;
        let mu_out = out_ref(mu_out)?;
        let (t, mu) = optimizer::schedule_a(n, s, t0, mu0).map_err(|e| status_of(&e))?;
        *t_out = t;
        *mu_out = mu;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Probe characterisation
// ---------------------------------------------------------------------------

/// Squeezing level of an `n`-spin one-axis-twisted state at twisting
/// strength `mu`, in dB (negative = squeezed below the projection noise).
///
/// Safety: `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn magfreq_squeezing_db(n: f64, mu: f64, out: *mut f64) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        *out = probes::squeezing_db(n, mu).map_err(|e| status_of(&e))?;
        Ok(())
    })
}

/// Inverts `magfreq_squeezing_db`: the twisting strength that realises
/// `target_db` (must be ≤ 0 and above the probe's maximal squeezing;
/// otherwise `MAGFREQ_STATUS_UNACHIEVABLE`).
///
/// Safety: `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn magfreq_mu_from_db(
    n: f64,
    target_db: f64,
    out: *mut f64,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        *out = probes::mu_from_db(n, target_db).map_err(|e| status_of(&e))?;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Bounds and identities
// ---------------------------------------------------------------------------

/// The universal constant κ ≈ 1.2564, the positive root of
/// e^κ = 1 + 2κ; κ/γ is the optimal GHZ interrogation time at ω = 0.
#[no_mangle]
pub extern "C" fn magfreq_kappa() -> f64 {
    ghz::kappa_opt()
}

/// Maps depolarisation times (T₁, T₂) to the equivalent mixed dephasing
/// model: rate γ and parallel fraction ε (both times must be finite and
/// positive). The product 2γε = 8/(3T₁) identically.
///
/// Safety: `gamma_out` and `epsilon_out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn magfreq_depolarization_mapping(
    t1: f64,
    t2: f64,
    gamma_out: *mut f64,
    epsilon_out: *mut f64,
) -> MagfreqStatus {
    guarded(|| {
        let gamma_out = out_ref(gamma_out)?;
        let epsilon_out = out_ref(epsilon_out)?;
        let spec = bounds::depolarization_mapping(t1, t2).map_err(|e| status_of(&e))?;
        *gamma_out = spec.gamma;
        *epsilon_out = spec.epsilon;
        Ok(())
    })
}

/// Asymptotic parallel-noise precision floor N·Δ²ω·T → 2εγ of the mixed
/// model.
///
/// Safety: `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn magfreq_mixed_noise_floor(
    gamma: f64,
    epsilon: f64,
    out: *mut f64,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        let spec = MixedNoiseSpec::new(gamma, epsilon).map_err(|e| status_of(&e))?;
        *out = bounds::mixed_noise_floor(&spec);
        Ok(())
    })
}

/// Probe size at which the scenario-(b) super-classical scaling crosses
/// the parallel-noise floor: N* = (ω/(3εγ))⁴.
///
/// Safety: `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn magfreq_crossover_estimate(
    gamma: f64,
    omega: f64,
    epsilon: f64,
    out: *mut f64,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        *out = bounds::crossover_estimate(gamma, omega, epsilon).map_err(|e| status_of(&e))?;
        Ok(())
    })
}

/// The M-quantity (weighted precision combination) whose minimum over
/// (t, μ) attains the scenario-(a) floor 2γ/N under transversal noise.
///
/// Safety: `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn magfreq_m_quantity(
    n: f64,
    gamma: f64,
    omega: f64,
    t: f64,
    mu: f64,
    out: *mut f64,
) -> MagfreqStatus {
    guarded(|| {
        let out = out_ref(out)?;
        *out = bounds::m_quantity(n, gamma, omega, t, mu).map_err(|e| status_of(&e))?;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Self-check
// ---------------------------------------------------------------------------

/// Cross-checks the closed forms against the dense density-matrix oracle
/// on deterministic random draws. `thorough` = 0 runs a sub-second smoke
/// suite (≤ 5 qubits, 12 draws); nonzero runs the full suite (≤ 8 qubits,
/// 50 draws, a few seconds). Returns `MAGFREQ_STATUS_OK` when every
/// deviation is within tolerance.
#[no_mangle]
pub extern "C" fn magfreq_self_check(thorough: i32) -> MagfreqStatus {
    guarded(|| {
        let (max_n, draws) = if thorough != 0 { (8, 50) } else { (5, 12) };
        let report =
            oracle::equivalence_suite(max_n, draws, 0x6D61_6766, true).map_err(|e| status_of(&e))?;
        if report.passes() {
            Ok(())
        } else {
            Err(MagfreqStatus::Verification)
        }
    })
}
