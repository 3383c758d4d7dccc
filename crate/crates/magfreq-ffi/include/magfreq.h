#ifndef MAGFREQ_H
#define MAGFREQ_H

/* Generated by cbindgen from the magfreq-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Geometry code: squeezed probe polarised along x, squeezed and measured
// along y (scenario a).
#define MAGFREQ_GEOMETRY_SCENARIO_A 0

// Geometry code: squeezed probe polarised along y, squeezed and measured
// along x (scenario b).
#define MAGFREQ_GEOMETRY_SCENARIO_B 1

// Geometry code: coherent probe along x, measured along y.
#define MAGFREQ_GEOMETRY_CSS_X 2

// Geometry code: coherent probe along y, measured along x.
#define MAGFREQ_GEOMETRY_CSS_Y 3

// Geometry code: GHZ probe with parity readout (accepted by the
// optimiser; pointwise evaluation goes through `magfreq_ghz_precision`).
#define MAGFREQ_GEOMETRY_GHZ 4

// Status code returned by every fallible function in this ABI.
enum MagfreqStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  // Success; all out-parameters were written.
  MAGFREQ_STATUS_OK = 0,
  // A panic was caught at the language boundary (library bug; the
  // out-parameters are untouched).
  MAGFREQ_STATUS_INTERNAL = 1,
  // An input violated a documented precondition, or a required pointer
  // was null.
  MAGFREQ_STATUS_INVALID_PARAMETER = 2,
  // The measurement signal carries no information at this parameter
  // point (the frequency derivative of the measured mean vanished), so
  // the precision diverges.
  MAGFREQ_STATUS_DEGENERATE_SIGNAL = 3,
  // An internal verification or complete-positivity guard tripped;
  // this signals a library bug, never bad input.
  MAGFREQ_STATUS_VERIFICATION = 4,
  // The requested target (e.g. a squeezing level in dB) is outside the
  // physically reachable range for the given probe.
  MAGFREQ_STATUS_UNACHIEVABLE = 5,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum MagfreqStatus MagfreqStatus;
#else
typedef int32_t MagfreqStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Opaque dephasing-noise handle: total rate γ and directional weights
// (α_x, α_y, α_z) with α_x + α_y + α_z = 1. Create with a
// `magfreq_noise_*` constructor; release with `magfreq_noise_free`.
typedef struct MagfreqNoise MagfreqNoise;

// One precision evaluation.
typedef struct MagfreqPrecision {
  // Time-normalised mean squared error of the frequency estimate,
  // Δ²ω·T (units 1/s; smaller is better).
  double msqe_times_t;
  // Signal slope ∂_ω⟨Ĵ⟩ at the working point.
  double signal_derivative;
  // Evolved variance of the measured collective component.
  double variance;
  // Precision gain over the coherent benchmark sharing this
  // measurement axis (exactly 1 for the coherent geometries).
  double gain_vs_css;
} MagfreqPrecision;

// Output of the two-stage (t, μ) optimiser.
typedef struct MagfreqOptimum {
  // Optimal interrogation time (s).
  double t_star;
  // Optimal twisting strength (rad); 0 for geometries without one.
  double mu_star;
  // Minimised Δ²ω·T (1/s).
  double msqe_times_t;
  // Number of objective evaluations spent.
  uint64_t evaluations;
  // 1 if the refinement stage met its relative tolerance, 0 otherwise.
  int32_t converged;
} MagfreqOptimum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a noise model with explicit directional weights.
//
// Safety: `out` must be a valid pointer; the handle written to it must be
// released with `magfreq_noise_free`.
MagfreqStatus magfreq_noise_new(double gamma,
                                double alpha_x,
                                double alpha_y,
                                double alpha_z,
                                struct MagfreqNoise **out);

// Creates a purely transversal noise model (α_x = 1).
//
// Safety: as for `magfreq_noise_new`.
MagfreqStatus magfreq_noise_transversal(double gamma, struct MagfreqNoise **out);

// Creates a mostly-transversal model with a parallel admixture:
// α_x = 1 − ε, α_z = ε.
//
// Safety: as for `magfreq_noise_new`.
MagfreqStatus magfreq_noise_mixed(double gamma, double epsilon, struct MagfreqNoise **out);

// Creates the mixed model equivalent to depolarisation with relaxation
// time `t1` and coherence time `t2` (both must be finite and positive).
// Use `magfreq_depolarization_mapping` to recover the implied (γ, ε).
//
// Safety: as for `magfreq_noise_new`.
MagfreqStatus magfreq_noise_from_relaxation(double t1, double t2, struct MagfreqNoise **out);

// Reads back the total dephasing rate γ of a handle.
//
// Safety: `noise` must be a live handle from a `magfreq_noise_*`
// constructor; `out` must be a valid pointer.
MagfreqStatus magfreq_noise_gamma(const struct MagfreqNoise *noise, double *out);

// Releases a noise handle. Passing null is a no-op.
//
// Safety: `noise` must be null or a live handle, and must not be used
// after this call.
void magfreq_noise_free(struct MagfreqNoise *noise);

// Δ²ω·T for a squeezed or coherent probe: `n` spins in the geometry
// given by `geometry` (a `MAGFREQ_GEOMETRY_*` code), twisting strength
// `mu` (must be 0 for the coherent geometries), frequency `omega`,
// interrogation time `t`. GHZ probes are rejected here; call
// `magfreq_ghz_precision` instead.
//
// Safety: `noise` must be a live handle; `out` must be a valid pointer.
MagfreqStatus magfreq_precision(const struct MagfreqNoise *noise,
                                double n,
                                int32_t geometry,
                                double mu,
                                double omega,
                                double t,
                                struct MagfreqPrecision *out);

// Δ²ω·T for an `n`-spin GHZ probe with parity readout.
//
// Safety: `noise` must be a live handle; `out` must be a valid pointer.
MagfreqStatus magfreq_ghz_precision(const struct MagfreqNoise *noise,
                                    double n,
                                    double omega,
                                    double t,
                                    double *out);

// Closed-form Δ²ω·T for a coherent probe under purely transversal noise
// at rate `gamma` (regular at ω = 0 and at 2ω = γ).
//
// Safety: `out` must be a valid pointer.
MagfreqStatus magfreq_css_precision_closed_form(double n,
                                                double gamma,
                                                double omega,
                                                double t,
                                                double *out);

// Minimises Δ²ω·T over interrogation time and twisting strength on the
// default search domain for the handle's rate (t ∈ [1e-6/γ, 1e2/γ],
// μ ∈ [1e-10, 1.5], 32×32 log grid, then Nelder–Mead refinement). The
// result is deterministic: identical inputs give bitwise-identical
// outputs.
//
// Safety: `noise` must be a live handle; `out` must be a valid pointer.
MagfreqStatus magfreq_optimize(const struct MagfreqNoise *noise,
                               double n,
                               int32_t geometry,
                               double omega,
                               struct MagfreqOptimum *out);

// As `magfreq_optimize`, but over an explicit log-spaced search box
// with `grid_t` × `grid_mu` coarse points (each ≥ 8).
//
// Safety: `noise` must be a live handle; `out` must be a valid pointer.
MagfreqStatus magfreq_optimize_in(const struct MagfreqNoise *noise,
                                  double n,
                                  int32_t geometry,
                                  double omega,
                                  double t_lo,
                                  double t_hi,
                                  double mu_lo,
                                  double mu_hi,
                                  uint32_t grid_t,
                                  uint32_t grid_mu,
                                  struct MagfreqOptimum *out);

// Nearly-optimal scenario-(b) schedule t = (γω)^{−1/2}·N^{−1/8},
// μ = (γ/ω)^{1/4}·(N/4)^{−4/5}.
//
// Safety: `t_out` and `mu_out` must be valid pointers.
MagfreqStatus magfreq_schedule_b(double n,
                                 double gamma,
                                 double omega,
                                 double *t_out,
                                 double *mu_out);

// Power-law scenario-(a) schedule t = t0·N^{−1/s}, μ = μ0·N^{−s/(s+1)}
// (requires s > 1).
//
// Safety: `t_out` and `mu_out` must be valid pointers.
MagfreqStatus magfreq_schedule_a(double n,
                                 double s,
                                 double t0,
                                 double mu0,
                                 double *t_out,
                                 double *mu_out);

// Squeezing level of an `n`-spin one-axis-twisted state at twisting
// strength `mu`, in dB (negative = squeezed below the projection noise).
//
// Safety: `out` must be a valid pointer.
MagfreqStatus magfreq_squeezing_db(double n, double mu, double *out);

// Inverts `magfreq_squeezing_db`: the twisting strength that realises
// `target_db` (must be ≤ 0 and above the probe's maximal squeezing;
// otherwise `MAGFREQ_STATUS_UNACHIEVABLE`).
//
// Safety: `out` must be a valid pointer.
MagfreqStatus magfreq_mu_from_db(double n, double target_db, double *out);

// The universal constant κ ≈ 1.2564, the positive root of
// e^κ = 1 + 2κ; κ/γ is the optimal GHZ interrogation time at ω = 0.
double magfreq_kappa(void);

// Maps depolarisation times (T₁, T₂) to the equivalent mixed dephasing
// model: rate γ and parallel fraction ε (both times must be finite and
// positive). The product 2γε = 8/(3T₁) identically.
//
// Safety: `gamma_out` and `epsilon_out` must be valid pointers.
MagfreqStatus magfreq_depolarization_mapping(double t1,
                                             double t2,
                                             double *gamma_out,
                                             double *epsilon_out);

// Asymptotic parallel-noise precision floor N·Δ²ω·T → 2εγ of the mixed
// model.
//
// Safety: `out` must be a valid pointer.
MagfreqStatus magfreq_mixed_noise_floor(double gamma, double epsilon, double *out);

// Probe size at which the scenario-(b) super-classical scaling crosses
// the parallel-noise floor: N* = (ω/(3εγ))⁴.
//
// Safety: `out` must be a valid pointer.
MagfreqStatus magfreq_crossover_estimate(double gamma, double omega, double epsilon, double *out);

// The M-quantity (weighted precision combination) whose minimum over
// (t, μ) attains the scenario-(a) floor 2γ/N under transversal noise.
//
// Safety: `out` must be a valid pointer.
MagfreqStatus magfreq_m_quantity(double n,
                                 double gamma,
                                 double omega,
                                 double t,
                                 double mu,
                                 double *out);

// Cross-checks the closed forms against the dense density-matrix oracle
// on deterministic random draws. `thorough` = 0 runs a sub-second smoke
// suite (≤ 5 qubits, 12 draws); nonzero runs the full suite (≤ 8 qubits,
// 50 draws, a few seconds). Returns `MAGFREQ_STATUS_OK` when every
// deviation is within tolerance.
MagfreqStatus magfreq_self_check(int32_t thorough);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAGFREQ_H */
