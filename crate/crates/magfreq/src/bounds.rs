//! No-go coefficients, mixed-noise floors, relaxation-time mapping, and
//! the scenario-(a) lower-bound machinery.
//!
//! These are the analytic benchmarks the precision engine is measured
//! against: short-time expansion coefficients of the attainable-precision
//! bounds for parallel and transversal noise, the GHZ scaling bound, the
//! asymptotic floor introduced by a parallel noise admixture, the mapping
//! from relaxation times (T₁, T₂) to the channel parameters (γ, ε), the
//! estimated probe-size crossover between the two squeezed-probe
//! geometries, and the auxiliary M quantity whose minimum pins the
//! scenario-(a) asymptote to 2γ/N.

use crate::channel::{coshx, sinhcx, NoiseModel};
use crate::error::{Error, Result};
use crate::metrology::{self, Geometry, ProbeSpec};

// ---------------------------------------------------------------------------
// Mixed noise
// ---------------------------------------------------------------------------

/// Mostly-transversal dephasing with a parallel admixture:
/// α_x = 1 − ε, α_z = ε at total rate γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedNoiseSpec {
    /// Total dephasing rate (1/s).
    pub gamma: f64,
    /// Parallel fraction ε ∈ [0, 1].
    pub epsilon: f64,
}

impl MixedNoiseSpec {
    /// Validated constructor.
    pub fn new(gamma: f64, epsilon: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise rate gamma must be finite and >= 0, got {gamma}"
            )));
        }
        if !epsilon.is_finite() || !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "parallel fraction epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        Ok(Self { gamma, epsilon })
    }

    /// The corresponding channel noise model.
    pub fn noise_model(&self) -> Result<NoiseModel> {
        NoiseModel::mixed(self.gamma, self.epsilon)
    }
}

// ---------------------------------------------------------------------------
// Short-time bound coefficients
// ---------------------------------------------------------------------------

/// Short-time coefficient of the parallel-noise precision bound,
/// c_z = 2γ + 2γ²t (truncated expansion, valid for t ≪ 1/γ; the leading
/// term 2γ is the nonzero floor that forbids super-classical scaling).
pub fn c_z(gamma: f64, t: f64) -> f64 {
    2.0 * gamma + 2.0 * gamma * gamma * t
}

/// Short-time coefficient of the transversal-noise precision bound,
/// c_x = γ²ω³t³/12 (truncated expansion, valid for t ≪ 1/γ). It vanishes
/// as t → 0, which is what leaves room for super-classical scaling under
/// purely transversal noise.
pub fn c_x(gamma: f64, omega: f64, t: f64) -> f64 {
    gamma * gamma * omega.powi(3) * t.powi(3) / 12.0
}

/// GHZ scaling bound at the envelope schedule:
/// Δ²ω·T ≥ (3^{2/3}/2)·(γω²)^{1/3}·N^{−5/3}. The prefactor is ≈ 1.0400.
/// At ω → 0 the bound degenerates to zero and carries no information.
pub fn ghz_qfi_bound(n: f64, gamma: f64, omega: f64) -> f64 {
    0.5 * 3.0_f64.powf(2.0 / 3.0) * (gamma * omega * omega).powf(1.0 / 3.0)
        * n.powf(-5.0 / 3.0)
}

// ---------------------------------------------------------------------------
// Mixed-noise floor and crossover
// ---------------------------------------------------------------------------

/// Asymptotic floor of N·Δ²ω·T for mixed noise: 2εγ. Any parallel
/// admixture ε > 0 restores standard quantum limit scaling with this
/// coefficient.
pub fn mixed_noise_floor(spec: &MixedNoiseSpec) -> f64 {
    2.0 * spec.epsilon * spec.gamma
}

/// Large-N asymptote of the optimised scenario-(a) precision under mixed
/// noise: 2γ(1−ε)/N from the transversal component. (Stated elsewhere
/// without the 1/N; implemented with it for dimensional consistency with
/// the pure-transversal asymptote 2γ/N that it must reduce to at ε = 0.)
pub fn scenario_a_mixed_asymptote(n: f64, spec: &MixedNoiseSpec) -> f64 {
    2.0 * spec.gamma * (1.0 - spec.epsilon) / n
}

/// Large-N asymptote of the optimised scenario-(b) precision under mixed
/// noise: the parallel floor 2γε/N.
pub fn scenario_b_mixed_asymptote(n: f64, spec: &MixedNoiseSpec) -> f64 {
    mixed_noise_floor(spec) / n
}

/// Relaxation-time description → channel parameters:
/// ε = 2T₂/(3T₁ + 2T₂), γ = 2(3T₁ + 2T₂)/(3T₁T₂).
///
/// The product 2γε = 8/(3T₁) identically — the parallel floor is dictated
/// by spin relaxation alone. In the T₁ → ∞ limit the mapping reduces to
/// pure transversal dephasing at γ = 2/T₂.
pub fn depolarization_mapping(t1: f64, t2: f64) -> Result<MixedNoiseSpec> {
    if !t1.is_finite() || t1 <= 0.0 || !t2.is_finite() || t2 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "relaxation times must be finite and > 0, got T1 = {t1}, T2 = {t2}"
        )));
    }
    let denom = 3.0 * t1 + 2.0 * t2;
    MixedNoiseSpec::new(2.0 * denom / (3.0 * t1 * t2), 2.0 * t2 / denom)
}

/// Probe size at which the scenario-(b) super-classical asymptote
/// (2ω/3)·N^{−5/4} crosses the mixed-noise floor 2εγ/N:
/// N* = (ω/(3εγ))⁴.
pub fn crossover_estimate(gamma: f64, omega: f64, epsilon: f64) -> Result<f64> {
    if gamma <= 0.0 || epsilon <= 0.0 || omega <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "crossover needs gamma, omega, epsilon > 0, got ({gamma}, {omega}, {epsilon})"
        )));
    }
    Ok((omega / (3.0 * epsilon * gamma)).powi(4))
}

// ---------------------------------------------------------------------------
// The M quantity
// ---------------------------------------------------------------------------

/// Weight of the scenario-(b) precision inside the M quantity:
/// ((A − B)/(A + B))² with A = cosh(½t√(γ² − 4ω²)) and
/// B = γ·sinh(½t√(γ² − 4ω²))/√(γ² − 4ω²), evaluated branch-free through
/// the squared argument v = (t/2)²(γ² − 4ω²) (trigonometric for 2ω > γ).
/// At ω = 0 the weight reduces to e^{−2γt}.
pub fn m_weight(gamma: f64, omega: f64, t: f64) -> f64 {
    let v = (t / 2.0) * (t / 2.0) * (gamma * gamma - 4.0 * omega * omega);
    let a = coshx(v);
    let b = gamma * (t / 2.0) * sinhcx(v);
    let ratio = (a - b) / (a + b);
    ratio * ratio
}

/// The scenario-(a) lower-bound auxiliary under transversal noise:
///
/// M(N, γ, ω, t, μ) = Δ²ω_(a)·T − ((A−B)/(A+B))²·Δ²ω_(b)·T,
///
/// built from the two squeezed-geometry precisions at the same working
/// point. Its minimum over (t, μ) equals 2γ/N, which is what pins the
/// scenario-(a) asymptote. At ω = 0 the combination collapses to the
/// closed form γ²t·coth(γt/2)·cos(μ/2)^{2−2N}/N.
pub fn m_quantity(n: f64, gamma: f64, omega: f64, t: f64, mu: f64) -> Result<f64> {
    let noise = NoiseModel::transversal(gamma)?;
    let a = metrology::precision(&ProbeSpec::new(n, Geometry::ScenarioA, mu)?, &noise, omega, t)?;
    let b = metrology::precision(&ProbeSpec::new(n, Geometry::ScenarioB, mu)?, &noise, omega, t)?;
    Ok(a.msqe_times_t - m_weight(gamma, omega, t) * b.msqe_times_t)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn short_time_coefficients_match_arithmetic() {
        assert_abs_diff_eq!(c_z(1.0, 0.5), 3.0);
        assert_abs_diff_eq!(c_z(2.0, 0.0), 4.0);
        assert!(c_z(1.0, 0.4) < c_z(1.0, 0.5));
        assert_abs_diff_eq!(c_x(2.0, 1.0, 1.0), 1.0 / 3.0);
        assert_abs_diff_eq!(c_x(2.0, 1.0, 0.0), 0.0);
        assert_abs_diff_eq!(c_x(1.0, 1.0, 2.0), 8.0 * c_x(1.0, 1.0, 1.0));
    }

    #[test]
    fn qfi_bound_prefactor_and_scaling() {
        let b = ghz_qfi_bound(1.0, 1.0, 1.0);
        assert!((b - 1.0400419).abs() < 1e-6, "prefactor {b}");
        assert_abs_diff_eq!(
            ghz_qfi_bound(8e6, 1.0, 1.0),
            ghz_qfi_bound(1e6, 1.0, 1.0) / 32.0,
            epsilon = 1e-18
        );
        assert_abs_diff_eq!(ghz_qfi_bound(100.0, 1.0, 0.0), 0.0);
    }

    #[test]
    fn mixed_floor_examples() {
        let spec = MixedNoiseSpec::new(1.0, 0.05).unwrap();
        assert_abs_diff_eq!(mixed_noise_floor(&spec), 0.1);
        let none = MixedNoiseSpec::new(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(mixed_noise_floor(&none), 0.0);
        let full = MixedNoiseSpec::new(3.0, 1.0).unwrap();
        assert_abs_diff_eq!(mixed_noise_floor(&full), 6.0);
        // ε = 0 reduces the (a)-asymptote to the transversal 2γ/N.
        assert_abs_diff_eq!(
            scenario_a_mixed_asymptote(100.0, &none),
            metrology::asymptote_scenario_a(100.0, 1.0)
        );
    }

    #[test]
    fn depolarization_mapping_identities() {
        let spec = depolarization_mapping(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(spec.epsilon, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.gamma, 10.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(mixed_noise_floor(&spec), 8.0 / 3.0, epsilon = 1e-14);
        // 2γε = 8/(3T₁) identically.
        for &(t1, t2) in &[(0.3, 1.7), (2.0, 0.01), (1e3, 5.0), (0.02, 0.02)] {
            let s = depolarization_mapping(t1, t2).unwrap();
            assert_abs_diff_eq!(
                mixed_noise_floor(&s),
                8.0 / (3.0 * t1),
                epsilon = 1e-12 * (8.0 / (3.0 * t1))
            );
        }
        // T₁ → ∞: pure transversal with γ = 2/T₂.
        let big = depolarization_mapping(1e12, 0.03).unwrap();
        assert!(big.epsilon < 1e-10);
        assert!((big.gamma * 0.03 / 2.0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn crossover_solves_asymptote_equality() {
        let (gamma, omega, epsilon) = (1.0, 0.45, 0.05);
        let n_star = crossover_estimate(gamma, omega, epsilon).unwrap();
        assert_abs_diff_eq!(n_star, (0.45_f64 / 0.15).powi(4), epsilon = 1e-10);
        // At N* the two asymptotes cross.
        let spec = MixedNoiseSpec::new(gamma, epsilon).unwrap();
        let floor = scenario_b_mixed_asymptote(n_star, &spec);
        let sql = metrology::asymptote_scenario_b(n_star, omega);
        assert!((floor / sql - 1.0).abs() < 1e-12);
        // Quartic laws.
        assert_abs_diff_eq!(
            crossover_estimate(gamma, omega, 2.0 * epsilon).unwrap(),
            n_star / 16.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            crossover_estimate(gamma, 2.0 * omega, epsilon).unwrap(),
            n_star * 16.0,
            epsilon = 1e-6
        );
    }

    #[test]
    fn m_weight_omega_zero_is_exponential() {
        for &(gamma, t) in &[(1.0, 0.3), (2.5, 1.1), (0.2, 4.0)] {
            assert_abs_diff_eq!(
                m_weight(gamma, 0.0, t),
                (-2.0 * gamma * t).exp(),
                epsilon = 1e-13
            );
        }
        // Branch continuity at 2ω = γ.
        let lo = m_weight(1.0, 0.5 - 1e-9, 0.7);
        let hi = m_weight(1.0, 0.5 + 1e-9, 0.7);
        assert_abs_diff_eq!(lo, hi, epsilon = 1e-8);
    }

    #[test]
    fn m_quantity_omega_zero_identity() {
        // M(ω=0) = γ²t·coth(γt/2)·cos(μ/2)^{2−2N}/N, exactly.
        let cases = [
            (20.0, 0.7, 0.9, 0.3),
            (50.0, 1.3, 0.2, 0.12),
            (200.0, 0.25, 2.0, 0.45),
            (7.0, 3.0, 0.6, 0.05),
        ];
        for (n, gamma, t, mu) in cases {
            let m = m_quantity(n, gamma, 0.0, t, mu).unwrap();
            let u = gamma * t / 2.0;
            let coth = u.cosh() / u.sinh();
            let rhs = gamma * gamma * t * coth * (mu / 2.0).cos().powf(2.0 - 2.0 * n) / n;
            assert!(
                (m / rhs - 1.0).abs() <= 1e-12,
                "N={n} gamma={gamma} t={t} mu={mu}: {m} vs {rhs}"
            );
        }
    }

    #[test]
    fn m_quantity_small_t_zero_mu_floor() {
        // t → 0, μ = 0: M → 2γ/N (t·coth(γt/2) → 2/γ).
        let (n, gamma) = (100.0, 1.5);
        let m = m_quantity(n, gamma, 0.0, 1e-7, 0.0).unwrap();
        assert!((m / (2.0 * gamma / n) - 1.0).abs() < 1e-6, "M = {m}");
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(MixedNoiseSpec::new(-1.0, 0.1).is_err());
        assert!(MixedNoiseSpec::new(1.0, 1.5).is_err());
        assert!(depolarization_mapping(0.0, 1.0).is_err());
        assert!(depolarization_mapping(1.0, -2.0).is_err());
        assert!(crossover_estimate(1.0, 0.0, 0.1).is_err());
    }
}
