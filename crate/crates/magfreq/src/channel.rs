//! Closed-form single-qubit dephasing channel.
//!
//! The model is a Lindblad master equation for each probe qubit: a signal
//! Hamiltonian (ω/2)σ_z plus dephasing of total rate γ distributed over the
//! three axes with weights (α_x, α_y, α_z). This module provides the channel
//! in three equivalent forms:
//!
//! * the evolution coefficients (ξ_x, χ_x, ξ_y, χ_y) that propagate the
//!   equatorial Bloch/collective-spin components, together with their
//!   analytic ω-derivatives (the inputs of the error-propagation formulas),
//! * the 4×4 process matrix `S` in the Pauli basis, and
//! * the four Kraus operators obtained by diagonalising `S`.
//!
//! All formulas are evaluated branch-free: the hyperbolic/trigonometric
//! regimes (and the degenerate point between them) are handled by helper
//! functions of the *squared* argument `v`, which switch to Taylor series
//! near `v = 0` instead of branching on the physics.

use num_complex::Complex64;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Special functions of the squared argument
// ---------------------------------------------------------------------------

/// Threshold below which the series expansions take over. At `|v| = 1e-8`
/// the truncation error of the cubic series is ~1e-35, far below f64 noise,
/// while direct evaluation still has ~1e-12 of cancellation headroom: the
/// two branches overlap safely.
const SERIES_CUTOFF: f64 = 1e-8;

/// cosh(√v) for v ≥ 0, cos(√−v) for v < 0.
pub(crate) fn coshx(v: f64) -> f64 {
    if v.abs() < SERIES_CUTOFF {
        1.0 + v / 2.0 + v * v / 24.0 + v * v * v / 720.0
    } else if v > 0.0 {
        v.sqrt().cosh()
    } else {
        (-v).sqrt().cos()
    }
}

/// sinh(√v)/√v for v ≥ 0, sin(√−v)/√−v for v < 0.
pub(crate) fn sinhcx(v: f64) -> f64 {
    if v.abs() < SERIES_CUTOFF {
        1.0 + v / 6.0 + v * v / 120.0 + v * v * v / 5040.0
    } else if v > 0.0 {
        let s = v.sqrt();
        s.sinh() / s
    } else {
        let s = (-v).sqrt();
        s.sin() / s
    }
}

/// (coshx(v) − sinhcx(v)) / (2v), continuous through v = 0 where it equals
/// 1/6. Shows up in the ω-derivatives of the channel coefficients.
pub(crate) fn gfun(v: f64) -> f64 {
    if v.abs() < SERIES_CUTOFF {
        1.0 / 6.0 + v / 60.0 + v * v / 1680.0 + v * v * v / 90720.0
    } else {
        (coshx(v) - sinhcx(v)) / (2.0 * v)
    }
}

// ---------------------------------------------------------------------------
// NoiseModel
// ---------------------------------------------------------------------------

/// Dephasing noise: overall rate γ and direction weights.
///
/// The weights are barycentric: they are non-negative and sum to one, so γ
/// alone carries the strength and (α_x, α_y, α_z) carry the geometry.
/// γ = 0 is accepted and makes every channel built from this model a pure
/// z-rotation (the general formulas reduce to it exactly; no special case).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    gamma: f64,
    alpha_x: f64,
    alpha_y: f64,
    alpha_z: f64,
}

impl NoiseModel {
    /// General directional dephasing. The weights must be non-negative and
    /// sum to 1 within 1e-12.
    pub fn new(gamma: f64, alpha_x: f64, alpha_y: f64, alpha_z: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise rate gamma must be finite and >= 0, got {gamma}"
            )));
        }
        for (name, a) in [("alpha_x", alpha_x), ("alpha_y", alpha_y), ("alpha_z", alpha_z)] {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "noise weight {name} must be finite and >= 0, got {a}"
                )));
            }
        }
        let sum = alpha_x + alpha_y + alpha_z;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "noise weights must sum to 1 (got {sum:.17})"
            )));
        }
        Ok(Self { gamma, alpha_x, alpha_y, alpha_z })
    }

    /// Perfectly transversal noise along x: α = (1, 0, 0).
    pub fn transversal(gamma: f64) -> Result<Self> {
        Self::new(gamma, 1.0, 0.0, 0.0)
    }

    /// Parallel (phase) noise along z: α = (0, 0, 1).
    pub fn parallel(gamma: f64) -> Result<Self> {
        Self::new(gamma, 0.0, 0.0, 1.0)
    }

    /// Mostly-transversal noise with a parallel admixture:
    /// α = (1−ε, 0, ε).
    pub fn mixed(gamma: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "parallel fraction epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        Self::new(gamma, 1.0 - epsilon, 0.0, epsilon)
    }

    /// Overall noise rate γ (1/s).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Weight of σ_x dephasing.
    pub fn alpha_x(&self) -> f64 {
        self.alpha_x
    }

    /// Weight of σ_y dephasing.
    pub fn alpha_y(&self) -> f64 {
        self.alpha_y
    }

    /// Weight of σ_z dephasing.
    pub fn alpha_z(&self) -> f64 {
        self.alpha_z
    }

    /// α₋ = α_x − α_y, the transverse anisotropy.
    pub fn alpha_minus(&self) -> f64 {
        self.alpha_x - self.alpha_y
    }

    /// α₊ = α_x + α_y, the total transverse weight.
    pub fn alpha_plus(&self) -> f64 {
        self.alpha_x + self.alpha_y
    }
}

// ---------------------------------------------------------------------------
// Channel coefficients
// ---------------------------------------------------------------------------

/// The linear map the channel induces on equatorial Bloch components,
/// together with its ω-derivatives:
///
/// ⟨σ_x⟩_t = ξ_x⟨σ_x⟩_0 + χ_x⟨σ_y⟩_0,
/// ⟨σ_y⟩_t = χ_y⟨σ_x⟩_0 + ξ_y⟨σ_y⟩_0,
///
/// and identically for the collective components Ĵ_x, Ĵ_y on product
/// states. The derivatives are the analytic d/dω of each coefficient at
/// fixed (γ, α, t); they carry units of seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelCoefficients {
    /// Decay of ⟨σ_x⟩ into itself.
    pub xi_x: f64,
    /// Rotation of ⟨σ_y⟩ into ⟨σ_x⟩.
    pub chi_x: f64,
    /// Decay of ⟨σ_y⟩ into itself.
    pub xi_y: f64,
    /// Rotation of ⟨σ_x⟩ into ⟨σ_y⟩ (= −chi_x identically).
    pub chi_y: f64,
    /// d ξ_x / dω (seconds).
    pub dxi_x: f64,
    /// d χ_x / dω (seconds).
    pub dchi_x: f64,
    /// d ξ_y / dω (seconds).
    pub dxi_y: f64,
    /// d χ_y / dω (seconds).
    pub dchi_y: f64,
}

impl ChannelCoefficients {
    /// The t = 0 (identity) channel.
    pub fn identity() -> Self {
        Self {
            xi_x: 1.0,
            chi_x: 0.0,
            xi_y: 1.0,
            chi_y: 0.0,
            dxi_x: 0.0,
            dchi_x: 0.0,
            dxi_y: 0.0,
            dchi_y: 0.0,
        }
    }

    /// Apply the map to a pair of equatorial components (⟨σ_x⟩, ⟨σ_y⟩).
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.xi_x * x + self.chi_x * y, self.chi_y * x + self.xi_y * y)
    }

    /// Compose with another set of coefficients sharing the same generator:
    /// `self ∘ earlier` as 2×2 linear maps on (⟨σ_x⟩, ⟨σ_y⟩). Derivative
    /// fields of the result are not populated (set to NaN) — composition is
    /// a verification device for the semigroup property, not a production
    /// path.
    pub fn compose(&self, earlier: &Self) -> Self {
        Self {
            xi_x: self.xi_x * earlier.xi_x + self.chi_x * earlier.chi_y,
            chi_x: self.xi_x * earlier.chi_x + self.chi_x * earlier.xi_y,
            chi_y: self.chi_y * earlier.xi_x + self.xi_y * earlier.chi_y,
            xi_y: self.chi_y * earlier.chi_x + self.xi_y * earlier.xi_y,
            dxi_x: f64::NAN,
            dchi_x: f64::NAN,
            dxi_y: f64::NAN,
            dchi_y: f64::NAN,
        }
    }
}

/// Shared reduced variables of the closed forms.
///
/// E is the uniform damping prefactor, h = γt/2 the half-decay argument,
/// p = ωt the accumulated rotation angle, q = α₋·h the anisotropy argument
/// and v = q² − p² the squared argument whose sign selects the
/// hyperbolic (v > 0) or oscillatory (v < 0) regime.
struct Reduced {
    e: f64,
    h: f64,
    p: f64,
    q: f64,
    v: f64,
}

fn reduced(noise: &NoiseModel, omega: f64, t: f64) -> Result<Reduced> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "time must be finite and >= 0, got {t}"
        )));
    }
    if !omega.is_finite() {
        return Err(Error::InvalidParameter(format!("omega must be finite, got {omega}")));
    }
    let h = noise.gamma * t / 2.0;
    let p = omega * t;
    let q = noise.alpha_minus() * h;
    Ok(Reduced {
        e: (-(1.0 + noise.alpha_z) * h).exp(),
        h,
        p,
        q,
        v: q * q - p * p,
    })
}

/// Evolution coefficients ξ/χ and their analytic ω-derivatives.
///
/// Closed forms (α̃ = √(α₋² − Γ²), Γ = 2ω/γ, both regimes unified through
/// `v = (γt/2)²(α₋² − Γ²) = q² − p²`):
///
/// ξ_x = E·(coshx(v) + q·sinhcx(v)),     χ_x = −E·p·sinhcx(v),
/// ξ_y = E·(coshx(v) − q·sinhcx(v)),     χ_y = +E·p·sinhcx(v) = −χ_x,
///
/// with E = e^{−γt(1+α_z)/2}. Differentiating through v (dv/dω = −2pt)
/// gives the derivative fields; at ω = 0 they reduce to dξ/dω = 0 and
/// dχ_y/dω = (1 − e^{−tγ})/γ for transversal noise, reproducing the known
/// limits without branching.
pub fn channel_coefficients(
    noise: &NoiseModel,
    omega: f64,
    t: f64,
) -> Result<ChannelCoefficients> {
    let r = reduced(noise, omega, t)?;
    let (cx, sx, g) = (coshx(r.v), sinhcx(r.v), gfun(r.v));
    let dv = -2.0 * r.p * t;
    let dchi_x = -r.e * t * (sx - 2.0 * r.p * r.p * g);
    Ok(ChannelCoefficients {
        xi_x: r.e * (cx + r.q * sx),
        chi_x: -r.e * r.p * sx,
        xi_y: r.e * (cx - r.q * sx),
        chi_y: r.e * r.p * sx,
        dxi_x: r.e * (sx / 2.0 + r.q * g) * dv,
        dchi_x,
        dxi_y: r.e * (sx / 2.0 - r.q * g) * dv,
        dchi_y: -dchi_x,
    })
}

/// Worst relative deviation between the analytic ω-derivatives and central
/// finite differences with step `h_step`.
///
/// A validation harness: the analytic forms sit inside optimization loops,
/// and this check pins them against a slower, assumption-free evaluation.
/// The step must satisfy `h_step ∈ [1e-8, 1e-2]·max(1, |ω|)`.
pub fn coefficient_derivatives_check(
    noise: &NoiseModel,
    omega: f64,
    t: f64,
    h_step: f64,
) -> Result<f64> {
    let scale = omega.abs().max(1.0);
    if !(1e-8 * scale..=1e-2 * scale).contains(&h_step) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step {h_step} outside [1e-8, 1e-2]*max(1,|omega|)"
        )));
    }
    let c = channel_coefficients(noise, omega, t)?;
    let plus = channel_coefficients(noise, omega + h_step, t)?;
    let minus = channel_coefficients(noise, omega - h_step, t)?;
    let fd = |a: f64, b: f64| (a - b) / (2.0 * h_step);
    // Relative to the larger of the two values, with an absolute floor of
    // t·1e-9 (the derivative scale) so exact zeros compare as zero.
    let floor = t.max(1e-300) * 1e-9;
    let rel = |analytic: f64, numeric: f64| {
        (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
    };
    let worst = [
        rel(c.dxi_x, fd(plus.xi_x, minus.xi_x)),
        rel(c.dchi_x, fd(plus.chi_x, minus.chi_x)),
        rel(c.dxi_y, fd(plus.xi_y, minus.xi_y)),
        rel(c.dchi_y, fd(plus.chi_y, minus.chi_y)),
    ]
    .into_iter()
    .fold(0.0_f64, f64::max);
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Process matrix
// ---------------------------------------------------------------------------

/// The nonzero part of the 4×4 process matrix S in the Pauli basis
/// {1, σ_x, σ_y, σ_z}: the channel acts as E(ρ) = Σ_{mn} S_mn σ_m ρ σ_n.
///
/// S is Hermitian with real diagonal (s00, s11, s22, s33) and one imaginary
/// off-diagonal pair S_03 = i·beta = conj(S_30); every other entry vanishes
/// for this model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix {
    /// Weight of 1·ρ·1.
    pub s00: f64,
    /// Weight of σ_x ρ σ_x.
    pub s11: f64,
    /// Weight of σ_y ρ σ_y.
    pub s22: f64,
    /// Weight of σ_z ρ σ_z.
    pub s33: f64,
    /// Imaginary part of S_03; S_03 = i·beta and S_30 = −i·beta.
    pub beta: f64,
    /// Γ = 2ω/γ (signal-to-noise frequency ratio); ±∞ when γ = 0, ω ≠ 0.
    pub gamma_ratio: f64,
    /// α₋ = α_x − α_y.
    pub alpha_minus: f64,
    /// α̃² = α₋² − Γ²; the sign selects the hyperbolic (positive) or
    /// oscillatory (negative) regime, standing in for the complex-capable α̃.
    pub alpha_tilde_sq: f64,
    /// A± = ½(1 ± e^{−γt·α₊}).
    pub a_plus: f64,
    /// See `a_plus`.
    pub a_minus: f64,
    /// B₊ = E·coshx(v): the symmetric part of the {1, σ_z} block.
    pub b_plus: f64,
    /// B₋ = α₋·E·(γt/2)·sinhcx(v): the σ_x/σ_y asymmetry.
    pub b_minus: f64,
}

/// Process matrix of the channel.
pub fn s_matrix(noise: &NoiseModel, omega: f64, t: f64) -> Result<SMatrix> {
    let r = reduced(noise, omega, t)?;
    let (cx, sx) = (coshx(r.v), sinhcx(r.v));
    let ea = (-2.0 * r.h * noise.alpha_plus()).exp();
    let a_plus = 0.5 * (1.0 + ea);
    let a_minus = 0.5 * (1.0 - ea);
    let b_plus = r.e * cx;
    let b_minus = r.e * r.q * sx;
    let gamma_ratio = if noise.gamma() == 0.0 && omega == 0.0 {
        0.0
    } else {
        2.0 * omega / noise.gamma()
    };
    Ok(SMatrix {
        s00: a_plus + b_plus,
        s11: a_minus + b_minus,
        s22: a_minus - b_minus,
        s33: a_plus - b_plus,
        beta: r.e * r.p * sx,
        gamma_ratio,
        alpha_minus: noise.alpha_minus(),
        alpha_tilde_sq: noise.alpha_minus().powi(2) - gamma_ratio * gamma_ratio,
        a_plus,
        a_minus,
        b_plus,
        b_minus,
    })
}

// ---------------------------------------------------------------------------
// Kraus set
// ---------------------------------------------------------------------------

/// Negative eigenvalues below this magnitude are floating-point dust from
/// the t → 0 limit and get clamped to zero.
const CLAMP_TOLERANCE: f64 = 1e-10;
/// Negative eigenvalues beyond this magnitude mean the reconstructed map is
/// genuinely not completely positive — an upstream formula bug.
const CPTP_TOLERANCE: f64 = 1e-8;

/// Coefficients of the four Kraus operators
///
/// K₁ = a₁σ_y, K₂ = a₂σ_x, K₃ = a₃σ_z − i·b₃·1, K₄ = a₄σ_z − i·b₄·1,
///
/// all real, satisfying the trace-preservation sum
/// a₁² + a₂² + a₃² + a₄² + b₃² + b₄² = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausSet {
    /// σ_y weight.
    pub a1: f64,
    /// σ_x weight.
    pub a2: f64,
    /// σ_z part of K₃.
    pub a3: f64,
    /// σ_z part of K₄.
    pub a4: f64,
    /// Identity part of K₃.
    pub b3: f64,
    /// Identity part of K₄.
    pub b4: f64,
}

fn clamp_weight(value: f64, label: &str) -> Result<f64> {
    if value < -CPTP_TOLERANCE {
        Err(Error::NonCptp(format!(
            "process-matrix weight {label} = {value:.3e} is negative beyond tolerance"
        )))
    } else if value < CLAMP_TOLERANCE {
        Ok(0.0)
    } else {
        Ok(value)
    }
}

/// Kraus operators by diagonalisation of the process matrix.
///
/// The σ_x and σ_y sectors are already diagonal (weights s11, s22). The
/// {1, σ_z} block reduces to the real symmetric 2×2 matrix
/// [[s00, beta], [beta, s33]] (its eigenvectors give operators of the form
/// a·σ_z − i·b·1), with eigenvalues A₊ ± R, R = √(B₊² + beta²), and
/// principal angle φ = ½·atan2(beta, B₊).
pub fn kraus_set(noise: &NoiseModel, omega: f64, t: f64) -> Result<KrausSet> {
    let s = s_matrix(noise, omega, t)?;
    let r = s.b_plus.hypot(s.beta);
    let lambda_plus = clamp_weight(s.a_plus + r, "lambda_plus")?;
    let lambda_minus = clamp_weight(s.a_plus - r, "lambda_minus")?;
    let s11 = clamp_weight(s.s11, "s11")?;
    let s22 = clamp_weight(s.s22, "s22")?;
    let phi = 0.5 * s.beta.atan2(s.b_plus);
    let (sin_phi, cos_phi) = phi.sin_cos();
    let rp = (lambda_plus / 2.0).sqrt();
    let rm = (lambda_minus / 2.0).sqrt();
    Ok(KrausSet {
        a1: (s22 / 2.0).sqrt(),
        a2: (s11 / 2.0).sqrt(),
        a3: -rp * sin_phi,
        b3: rp * cos_phi,
        a4: rm * cos_phi,
        b4: rm * sin_phi,
    })
}

impl KrausSet {
    /// Residual of the trace-preservation sum (zero for an exact CPTP set).
    pub fn completeness_defect(&self) -> f64 {
        (self.a1 * self.a1
            + self.a2 * self.a2
            + self.a3 * self.a3
            + self.a4 * self.a4
            + self.b3 * self.b3
            + self.b4 * self.b4
            - 1.0)
            .abs()
    }

    /// Channel coefficients implied by this Kraus set:
    /// ξ_x = 1 − 2(a₁² + a₃² + a₄²), ξ_y = 1 − 2(a₂² + a₃² + a₄²),
    /// χ_x = 2(a₃b₃ + a₄b₄) = −χ_y. Used to cross-check the two code paths.
    pub fn implied_coefficients(&self) -> (f64, f64, f64, f64) {
        let chi_x = 2.0 * (self.a3 * self.b3 + self.a4 * self.b4);
        (
            1.0 - 2.0 * (self.a1 * self.a1 + self.a3 * self.a3 + self.a4 * self.a4),
            chi_x,
            1.0 - 2.0 * (self.a2 * self.a2 + self.a3 * self.a3 + self.a4 * self.a4),
            -chi_x,
        )
    }

    /// The four operators as dense 2×2 complex matrices in the
    /// computational basis (row-major [[m00, m01], [m10, m11]]).
    pub fn operators(&self) -> [[[Complex64; 2]; 2]; 4] {
        let i = Complex64::new(0.0, 1.0);
        let zero = Complex64::new(0.0, 0.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        [
            // K1 = a1·σ_y
            [[zero, -i * self.a1], [i * self.a1, zero]],
            // K2 = a2·σ_x
            [[zero, re(self.a2)], [re(self.a2), zero]],
            // K3 = a3·σ_z − i·b3·1
            [[re(self.a3) - i * self.b3, zero], [zero, re(-self.a3) - i * self.b3]],
            // K4 = a4·σ_z − i·b4·1
            [[re(self.a4) - i * self.b4, zero], [zero, re(-self.a4) - i * self.b4]],
        ]
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn noise_model_validates_weights() {
        assert!(NoiseModel::new(1.0, 0.5, 0.4, 0.1).is_ok());
        assert!(NoiseModel::new(-1.0, 1.0, 0.0, 0.0).is_err());
        assert!(NoiseModel::new(1.0, 0.5, 0.4, 0.2).is_err());
        assert!(NoiseModel::new(1.0, -0.1, 1.1, 0.0).is_err());
    }

    #[test]
    fn transversal_omega_zero_preserves_x() {
        // e^{−γt/2}(cosh(γt/2) + sinh(γt/2)) = 1 exactly.
        let noise = NoiseModel::transversal(1.0).unwrap();
        let c = channel_coefficients(&noise, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(c.xi_x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.chi_x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.xi_y, (-1.0_f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.chi_y, 0.0, epsilon = 1e-15);
        // Small-signal limits: dξ/dω = 0, dχ_y/dω = (1 − e^{−tγ})/γ > 0
        // (the rotation turns ⟨σ_x⟩ toward +⟨σ_y⟩ for ω > 0).
        assert_abs_diff_eq!(c.dxi_x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.dchi_y, 1.0 - (-1.0_f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn parallel_noise_is_damped_rotation() {
        // α = (0,0,1): ξ = e^{−γt}cos(ωt), |χ| = e^{−γt}sin(ωt).
        let noise = NoiseModel::parallel(0.8).unwrap();
        let (omega, t) = (1.3, 0.6);
        let c = channel_coefficients(&noise, omega, t).unwrap();
        let damp = (-0.8 * t).exp();
        assert_abs_diff_eq!(c.xi_x, damp * (omega * t).cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.chi_y, damp * (omega * t).sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.xi_y, c.xi_x, epsilon = 1e-15);
        assert_abs_diff_eq!(c.chi_x, -c.chi_y, epsilon = 1e-15);
    }

    #[test]
    fn gamma_zero_is_pure_rotation() {
        let noise = NoiseModel::new(0.0, 1.0, 0.0, 0.0).unwrap();
        let (omega, t) = (0.9, 1.1);
        let c = channel_coefficients(&noise, omega, t).unwrap();
        assert_abs_diff_eq!(c.xi_x, (omega * t).cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.chi_x, -(omega * t).sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.dxi_x, -t * (omega * t).sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.dchi_x, -t * (omega * t).cos(), epsilon = 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            (NoiseModel::transversal(1.0).unwrap(), 0.0, 1.0),
            (NoiseModel::new(1.0, 0.95, 0.0, 0.05).unwrap(), 0.3, 0.5),
            (NoiseModel::new(2.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0).unwrap(), 0.7, 0.9),
        ];
        for (noise, omega, t) in cases {
            let dev = coefficient_derivatives_check(&noise, omega, t, 1e-5).unwrap();
            assert!(dev <= 1e-6, "deviation {dev} at omega={omega}, t={t}");
        }
        // Short-time, high-rate regime: the coefficients are nearly
        // stationary in ω, so the central-difference signal sits close to
        // the f64 roundoff floor eps·|ξ|/(2h). Take the largest allowed
        // step and a tolerance that leaves ~40× headroom over that floor.
        let noise = NoiseModel::transversal(67.0).unwrap();
        let dev = coefficient_derivatives_check(&noise, 3.6e-3, 1e-3, 1e-2).unwrap();
        assert!(dev <= 1e-4, "deviation {dev} in stiff regime");
    }

    #[test]
    fn finite_difference_step_is_validated() {
        let noise = NoiseModel::transversal(1.0).unwrap();
        assert!(coefficient_derivatives_check(&noise, 0.0, 1.0, 1e-9).is_err());
        assert!(coefficient_derivatives_check(&noise, 0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn s_matrix_transversal_omega_zero() {
        // α₋ = 1, Γ = 0: B± = ½(1 ± e^{−γt}), s03 = 0.
        let noise = NoiseModel::transversal(2.0).unwrap();
        let t = 0.7;
        let s = s_matrix(&noise, 0.0, t).unwrap();
        let e = (-2.0 * t).exp();
        assert_abs_diff_eq!(s.b_plus, 0.5 * (1.0 + e), epsilon = 1e-14);
        assert_abs_diff_eq!(s.b_minus, 0.5 * (1.0 - e), epsilon = 1e-14);
        assert_abs_diff_eq!(s.beta, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.alpha_tilde_sq, 1.0, epsilon = 1e-15);
        // σ_y sector is empty for transversal-x noise at ω = 0.
        assert_abs_diff_eq!(s.s22, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn gamma_zero_limit_matches_rotation_channel() {
        // γ → 1e-12 should reproduce a pure z-rotation to 1e-6.
        let noise = NoiseModel::new(1e-12, 1.0, 0.0, 0.0).unwrap();
        let (omega, t) = (1.0, 1.0);
        let c = channel_coefficients(&noise, omega, t).unwrap();
        assert_abs_diff_eq!(c.xi_x, (omega * t).cos(), epsilon = 1e-6);
        assert_abs_diff_eq!(c.chi_x, -(omega * t).sin(), epsilon = 1e-6);
        let k = kraus_set(&noise, omega, t).unwrap();
        let (xi_x, chi_x, ..) = k.implied_coefficients();
        assert_abs_diff_eq!(xi_x, (omega * t).cos(), epsilon = 1e-6);
        assert_abs_diff_eq!(chi_x, -(omega * t).sin(), epsilon = 1e-6);
    }

    #[test]
    fn kraus_zero_time_is_identity() {
        let noise = NoiseModel::new(1.0, 0.4, 0.3, 0.3).unwrap();
        let k = kraus_set(&noise, 0.5, 0.0).unwrap();
        assert_abs_diff_eq!(k.a1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.a2, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.a3, 0.0, epsilon = 1e-15);
        // The surviving operator is ∓i·1, an identity up to global phase.
        assert_abs_diff_eq!(k.b3 * k.b3 + k.b4 * k.b4, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.completeness_defect(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kraus_completeness_generic_points() {
        let draws = [
            (NoiseModel::new(1.0, 1.0, 0.0, 0.0).unwrap(), 0.0, 1.0),
            (NoiseModel::new(1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0).unwrap(), 0.5, 0.4),
            (NoiseModel::new(67.0, 0.95, 0.0, 0.05).unwrap(), 3.6e-3, 1e-3),
            (NoiseModel::new(0.3, 0.2, 0.5, 0.3).unwrap(), 2.0, 3.0),
        ];
        for (noise, omega, t) in draws {
            let k = kraus_set(&noise, omega, t).unwrap();
            assert!(k.completeness_defect() <= 1e-10);
            let c = channel_coefficients(&noise, omega, t).unwrap();
            let (xi_x, chi_x, xi_y, chi_y) = k.implied_coefficients();
            assert_abs_diff_eq!(xi_x, c.xi_x, epsilon = 1e-10);
            assert_abs_diff_eq!(chi_x, c.chi_x, epsilon = 1e-10);
            assert_abs_diff_eq!(xi_y, c.xi_y, epsilon = 1e-10);
            assert_abs_diff_eq!(chi_y, c.chi_y, epsilon = 1e-10);
        }
    }

    #[test]
    fn branch_continuity_across_degenerate_argument() {
        // Sweep ω across the α̃ = 0 point at fixed γ, t: coefficients must be
        // continuous through the hyperbolic/oscillatory seam.
        let noise = NoiseModel::transversal(1.0).unwrap();
        let t = 1.0;
        // α₋ = 1 ⇒ seam at Γ = 1, i.e. ω = γ/2.
        let omega_seam = 0.5;
        let before = channel_coefficients(&noise, omega_seam - 1e-9, t).unwrap();
        let after = channel_coefficients(&noise, omega_seam + 1e-9, t).unwrap();
        for (a, b) in [
            (before.xi_x, after.xi_x),
            (before.chi_x, after.chi_x),
            (before.xi_y, after.xi_y),
            (before.dchi_x, after.dchi_x),
            (before.dxi_y, after.dxi_y),
        ] {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn semigroup_composition() {
        let noise = NoiseModel::new(1.3, 0.6, 0.1, 0.3).unwrap();
        let omega = 0.7;
        let (t1, t2) = (0.4, 0.9);
        let c1 = channel_coefficients(&noise, omega, t1).unwrap();
        let c2 = channel_coefficients(&noise, omega, t2).unwrap();
        let c12 = channel_coefficients(&noise, omega, t1 + t2).unwrap();
        let composed = c2.compose(&c1);
        assert_abs_diff_eq!(composed.xi_x, c12.xi_x, epsilon = 1e-10);
        assert_abs_diff_eq!(composed.chi_x, c12.chi_x, epsilon = 1e-10);
        assert_abs_diff_eq!(composed.xi_y, c12.xi_y, epsilon = 1e-10);
        assert_abs_diff_eq!(composed.chi_y, c12.chi_y, epsilon = 1e-10);
    }

    #[test]
    fn contractivity_of_equatorial_map() {
        for &(omega, t) in &[(0.0, 0.5), (0.4, 1.0), (2.0, 2.0), (10.0, 0.3)] {
            let noise = NoiseModel::new(1.0, 0.5, 0.2, 0.3).unwrap();
            let c = channel_coefficients(&noise, omega, t).unwrap();
            assert!(c.xi_x * c.xi_x + c.chi_x * c.chi_x <= 1.0 + 1e-12);
            assert!(c.xi_y * c.xi_y + c.chi_y * c.chi_y <= 1.0 + 1e-12);
            assert_abs_diff_eq!(c.chi_y, -c.chi_x, epsilon = 1e-12);
        }
    }

    #[test]
    fn negative_time_rejected() {
        let noise = NoiseModel::transversal(1.0).unwrap();
        assert!(channel_coefficients(&noise, 0.1, -1.0).is_err());
        assert!(s_matrix(&noise, 0.1, -1.0).is_err());
    }

    #[test]
    fn special_functions_series_match_direct() {
        // Check both sides of the series window against direct evaluation.
        for &v in &[1.1e-8_f64, -1.1e-8, 9e-9, -9e-9] {
            let direct = if v > 0.0 { v.sqrt().cosh() } else { (-v).sqrt().cos() };
            assert_abs_diff_eq!(coshx(v), direct, epsilon = 1e-14);
            let s = v.abs().sqrt();
            let direct_s = if v > 0.0 { s.sinh() / s } else { s.sin() / s };
            assert_abs_diff_eq!(sinhcx(v), direct_s, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(gfun(0.0), 1.0 / 6.0, epsilon = 1e-16);
    }
}
