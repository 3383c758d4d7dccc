//! Error-propagation metrology for squeezed and coherent probes.
//!
//! The estimation protocol is Ramsey-style: prepare a collective-spin
//! probe, let every qubit pass through the dephasing channel for a time t,
//! measure one equatorial collective component, and infer ω from the mean
//! signal. The figure of merit throughout is the time-normalised mean
//! squared error Δ²ω·T = t·Var(Ĵ_meas) / (∂_ω⟨Ĵ_meas⟩)², i.e. the
//! frequency variance attainable per unit total interrogation time.
//!
//! Two squeezed-probe geometries are supported:
//!
//! * scenario a — polarised along x, squeezed along y, measure Ĵ_y: the
//!   signal grows through the rotation coefficient χ_y and the squeezed
//!   variance suppresses the readout noise;
//! * scenario b — polarised along y, squeezed along x, measure Ĵ_x: the
//!   same structure with the roles of the two equatorial axes exchanged,
//!   which couples the probe to the noise anisotropy differently.
//!
//! Coherent-probe (CSS) versions of both geometries serve as benchmarks,
//! and for perfectly transversal noise the CSS precision also has a closed
//! form against which the generic path is cross-checked.

use crate::channel::{self, ChannelCoefficients, NoiseModel};
use crate::error::{Error, Result};
use crate::probes::{self, Axis, SpinMoments};

// ---------------------------------------------------------------------------
// Probe specification
// ---------------------------------------------------------------------------

/// Probe-and-measurement geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Squeezed probe polarised along x, squeezed and measured along y.
    ScenarioA,
    /// Squeezed probe polarised along y, squeezed and measured along x.
    ScenarioB,
    /// Coherent probe along x, measured along y.
    CssX,
    /// Coherent probe along y, measured along x.
    CssY,
    /// GHZ probe with parity readout (handled by the `ghz` module).
    Ghz,
}

impl Geometry {
    /// The axis whose collective component is measured.
    pub fn measurement_axis(self) -> Axis {
        match self {
            Geometry::ScenarioA | Geometry::CssX => Axis::Y,
            Geometry::ScenarioB | Geometry::CssY => Axis::X,
            Geometry::Ghz => Axis::X, // parity about x; not used by `precision`
        }
    }

    /// The CSS benchmark geometry sharing this measurement axis.
    pub fn css_benchmark(self) -> Geometry {
        match self {
            Geometry::ScenarioA | Geometry::CssX => Geometry::CssX,
            Geometry::ScenarioB | Geometry::CssY => Geometry::CssY,
            Geometry::Ghz => Geometry::CssX,
        }
    }
}

/// A fully specified probe: particle number, geometry and twisting
/// strength (μ = 0 required for the coherent and GHZ geometries).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    /// Number of particles (integer-valued; may be astronomically large).
    pub n: f64,
    /// Probe-and-measurement geometry.
    pub geometry: Geometry,
    /// One-axis-twisting strength μ.
    pub mu: f64,
}

impl ProbeSpec {
    /// Validated constructor.
    pub fn new(n: f64, geometry: Geometry, mu: f64) -> Result<Self> {
        match geometry {
            Geometry::ScenarioA | Geometry::ScenarioB => {
                // Range checks happen inside oatss_moments as well; fail
                // fast here so a bad spec never reaches an optimizer loop.
                probes::oatss_moments(n, mu, Axis::X)?;
            }
            Geometry::CssX | Geometry::CssY | Geometry::Ghz => {
                probes::css_moments(n, Axis::X)?;
                if mu != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "mu must be 0 for coherent/GHZ probes, got {mu}"
                    )));
                }
            }
        }
        Ok(Self { n, geometry, mu })
    }

    fn initial_moments(&self) -> Result<SpinMoments> {
        match self.geometry {
            Geometry::ScenarioA => probes::oatss_moments(self.n, self.mu, Axis::X),
            Geometry::ScenarioB => probes::oatss_moments(self.n, self.mu, Axis::Y),
            Geometry::CssX => probes::css_moments(self.n, Axis::X),
            Geometry::CssY => probes::css_moments(self.n, Axis::Y),
            Geometry::Ghz => Err(Error::InvalidParameter(
                "GHZ probes use parity readout; call the ghz module".into(),
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// Evolved moments
// ---------------------------------------------------------------------------

/// Mean of the measured collective component after the channel:
/// ⟨Ĵ_x⟩_t = ξ_x⟨Ĵ_x⟩₀ + χ_x⟨Ĵ_y⟩₀ and x ↔ y for the other axis.
pub fn evolved_mean(m0: &SpinMoments, c: &ChannelCoefficients, axis: Axis) -> f64 {
    match axis {
        Axis::X => c.xi_x * m0.mean_jx + c.chi_x * m0.mean_jy,
        Axis::Y => c.chi_y * m0.mean_jx + c.xi_y * m0.mean_jy,
    }
}

/// ∂_ω of the evolved mean, from the analytic coefficient derivatives.
pub fn evolved_mean_derivative(m0: &SpinMoments, c: &ChannelCoefficients, axis: Axis) -> f64 {
    match axis {
        Axis::X => c.dxi_x * m0.mean_jx + c.dchi_x * m0.mean_jy,
        Axis::Y => c.dchi_y * m0.mean_jx + c.dxi_y * m0.mean_jy,
    }
}

/// Variance of the measured collective component after the channel.
///
/// For N independent channel uses the evolved variance splits into a
/// local-noise floor plus the contracted initial covariance:
///
/// Var(Ĵ_x)_t = (N/4)(1 − ξ_x² − χ_x²)
///            + ξ_x²·Var(Ĵ_x)₀ + χ_x²·Var(Ĵ_y)₀ + 2ξ_xχ_x·Cov(Ĵ_x,Ĵ_y)₀,
///
/// and x ↔ y for the other axis. The floor term is what survives even for
/// an infinitely squeezed input; the cross term carries the full
/// symmetrised covariance (factor 2).
pub fn evolved_variance(
    m0: &SpinMoments,
    c: &ChannelCoefficients,
    n: f64,
    axis: Axis,
) -> f64 {
    let (xi, chi, var_own, var_other) = match axis {
        Axis::X => (c.xi_x, c.chi_x, m0.var_jx, m0.var_jy),
        Axis::Y => (c.xi_y, c.chi_y, m0.var_jy, m0.var_jx),
    };
    (n / 4.0) * ((1.0 - xi * xi) - chi * chi)
        + xi * xi * var_own
        + chi * chi * var_other
        + 2.0 * xi * chi * m0.cov_jxjy
}

// ---------------------------------------------------------------------------
// Precision
// ---------------------------------------------------------------------------

/// The result of one precision evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionResult {
    /// Time-normalised mean squared error Δ²ω·T (units 1/(rad²·s·Hz²)·…
    /// — concretely rad²·s⁻²·s, i.e. the variance attainable with one
    /// second of total interrogation).
    pub msqe_times_t: f64,
    /// Signal slope ∂_ω⟨Ĵ_meas⟩ at the working point (seconds·spin).
    pub signal_derivative: f64,
    /// Evolved variance of the measured component.
    pub variance: f64,
    /// Precision gain over the CSS benchmark sharing this measurement
    /// axis: Δ²ω_CSS·T / Δ²ω·T. Exactly 1 for the CSS geometries.
    pub gain_vs_css: f64,
}

fn validate_time(t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "interrogation time must be finite and > 0, got {t}"
        )));
    }
    Ok(())
}

fn raw_precision(
    m0: &SpinMoments,
    c: &ChannelCoefficients,
    n: f64,
    axis: Axis,
    t: f64,
) -> Result<(f64, f64, f64)> {
    let derivative = evolved_mean_derivative(m0, c, axis);
    if derivative.abs() < 1e-300 {
        return Err(Error::DegenerateSignal(format!(
            "signal slope vanished (|d⟨J⟩/dω| = {derivative:.3e})"
        )));
    }
    let variance = evolved_variance(m0, c, n, axis);
    Ok((t * variance / (derivative * derivative), derivative, variance))
}

/// Δ²ω·T for a squeezed or coherent probe under the dephasing channel.
///
/// ω = 0 is a regular point for every geometry here (the signal slope
/// stays finite), so no special-casing is needed; a genuinely vanishing
/// slope (e.g. parallel-only noise at a signal node) reports
/// [`Error::DegenerateSignal`].
pub fn precision(
    probe: &ProbeSpec,
    noise: &NoiseModel,
    omega: f64,
    t: f64,
) -> Result<PrecisionResult> {
    validate_time(t)?;
    if probe.geometry == Geometry::Ghz {
        return Err(Error::InvalidParameter(
            "GHZ probes use parity readout; call the ghz module".into(),
        ));
    }
    let c = channel::channel_coefficients(noise, omega, t)?;
    let m0 = probe.initial_moments()?;
    let axis = probe.geometry.measurement_axis();
    let (msqe_times_t, signal_derivative, variance) = raw_precision(&m0, &c, probe.n, axis, t)?;

    let bench_geometry = probe.geometry.css_benchmark();
    let gain_vs_css = if bench_geometry == probe.geometry && probe.mu == 0.0 {
        1.0
    } else {
        let bench = probes::css_moments(probe.n, axis.orthogonal())?;
        let (bench_msqe, _, _) = raw_precision(&bench, &c, probe.n, axis, t)?;
        bench_msqe / msqe_times_t
    };
    Ok(PrecisionResult { msqe_times_t, signal_derivative, variance, gain_vs_css })
}

// ---------------------------------------------------------------------------
// Closed-form CSS benchmark (transversal noise)
// ---------------------------------------------------------------------------

/// Δ²ω·T of a coherent probe under perfectly transversal noise, in closed
/// form:
///
/// Δ²ω·T = (1/(N·t)) · [e^{γt} − (ωt)²·sinhcx²(v)]
///                   / (coshx(v) − 2(γt/2)²·gfun(v))²,
///
/// with v = (γt/2)² − (ωt)². This is an exact rearrangement of the
/// error-propagation result: it is branch-free across the hyperbolic/
/// oscillatory seam, regular at 2ω = γ (where textbook forms hit 0/0) and
/// at γ = 0 (where it reduces to the shot-noise limit 1/(N·t)), and at
/// ω = 0 collapses to γ²t/[(1 − e^{−γt})²·N].
///
/// The geometry is either coherent configuration (x-polarised measuring
/// Ĵ_y, or y-polarised measuring Ĵ_x): under transversal noise both give
/// the same value.
pub fn css_precision_closed_form(n: f64, gamma: f64, omega: f64, t: f64) -> Result<f64> {
    probes::css_moments(n, Axis::X)?;
    validate_time(t)?;
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise rate gamma must be finite and >= 0, got {gamma}"
        )));
    }
    let h = gamma * t / 2.0;
    let p = omega * t;
    let v = h * h - p * p;
    let sx = channel::sinhcx(v);
    let denom_root = channel::coshx(v) - 2.0 * h * h * channel::gfun(v);
    if denom_root.abs() < 1e-150 {
        return Err(Error::DegenerateSignal(format!(
            "CSS signal slope vanished at gamma*t = {:.3e}, omega*t = {p:.3e}",
            2.0 * h
        )));
    }
    let numerator = (gamma * t).exp() - p * p * sx * sx;
    Ok(numerator / (denom_root * denom_root * n * t))
}

// ---------------------------------------------------------------------------
// Asymptotes
// ---------------------------------------------------------------------------

/// Large-N asymptote of the optimised scenario-b precision under
/// transversal noise: Δ²ω·T → (2ω/3)·N^{−5/4}.
pub fn asymptote_scenario_b(n: f64, omega: f64) -> f64 {
    (2.0 * omega / 3.0) * n.powf(-1.25)
}

/// Large-N asymptote of the optimised scenario-a precision under
/// transversal noise: Δ²ω·T → 2γ/N.
pub fn asymptote_scenario_a(n: f64, gamma: f64) -> f64 {
    2.0 * gamma / n
}

/// Large-N asymptote of the μ-optimised squeezed precision at ω = 0 and
/// fixed interrogation time: Δ²ω·T → (5/(3·2^{2/3}))·tγ²/(1−e^{−tγ})²·N^{−5/3}.
pub fn omega_zero_oatss_asymptote(n: f64, gamma: f64, t: f64) -> f64 {
    let prefactor = 5.0 / (3.0 * 2.0_f64.powf(2.0 / 3.0));
    let decay = -(-t * gamma).exp_m1(); // 1 − e^{−tγ}, exact as γt → 0
    prefactor * t * gamma * gamma / (decay * decay) * n.powf(-5.0 / 3.0)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
