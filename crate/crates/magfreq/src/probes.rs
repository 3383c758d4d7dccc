//! Initial probe states: coherent (CSS) and one-axis-twisted (OATSS)
//! spin ensembles.
//!
//! Everything downstream needs only the first and second collective-spin
//! moments of the initial state, so probes are represented by a
//! [`SpinMoments`] record rather than a state vector. The one-axis-twisted
//! squeezed state is the CSS twisted by exp(−i·μ/2·Ĵ_z²) and then rotated
//! about its mean-spin axis so that the minor axis of the noise ellipse
//! lies along the nominated equatorial direction.
//!
//! The closed-form moments involve powers like cos^{N−2}(μ) at particle
//! numbers up to ~1e14, where naive `powf` and the textbook expression for
//! the squeezed variance (a difference of two near-equal square roots)
//! both fall apart. All formulas here are written in log/`ln_1p`/`expm1`
//! form and the squeezed branch is rationalised:
//! A − √(A²+B²) = −B²/(A + √(A²+B²)).

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Equatorial axis labels for polarisation and measurement directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// The x direction.
    X,
    /// The y direction.
    Y,
}

impl Axis {
    /// The other equatorial axis.
    pub fn orthogonal(self) -> Self {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

/// First and second collective-spin moments of a probe state.
///
/// Only the components entering the equatorial error-propagation formulas
/// are tracked: means along x and y, the three variances, and the one
/// symmetrised cross-covariance that can be nonzero after alignment,
/// Cov(Ĵ_x, Ĵ_y) = ½⟨{Ĵ_x, Ĵ_y}⟩ − ⟨Ĵ_x⟩⟨Ĵ_y⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMoments {
    /// ⟨Ĵ_x⟩.
    pub mean_jx: f64,
    /// ⟨Ĵ_y⟩.
    pub mean_jy: f64,
    /// Var(Ĵ_x).
    pub var_jx: f64,
    /// Var(Ĵ_y).
    pub var_jy: f64,
    /// Var(Ĵ_z).
    pub var_jz: f64,
    /// Symmetrised covariance of Ĵ_x and Ĵ_y.
    pub cov_jxjy: f64,
}

// ---------------------------------------------------------------------------
// Validation helpers
// ---------------------------------------------------------------------------

fn validate_n(n: f64, minimum: f64) -> Result<()> {
    if !n.is_finite() || n < minimum || n.fract() != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "particle number must be an integer-valued float >= {minimum}, got {n}"
        )));
    }
    Ok(())
}

fn validate_mu(mu: f64) -> Result<()> {
    if !mu.is_finite() || !(0.0..std::f64::consts::PI).contains(&mu) {
        return Err(Error::InvalidParameter(format!(
            "twisting strength mu must lie in [0, pi), got {mu}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Coherent states
// ---------------------------------------------------------------------------

/// Moments of the coherent spin state polarised along `axis`:
/// mean N/2 along the axis, every transverse variance N/4.
pub fn css_moments(n: f64, axis: Axis) -> Result<SpinMoments> {
    validate_n(n, 1.0)?;
    let (mean_jx, mean_jy) = match axis {
        Axis::X => (n / 2.0, 0.0),
        Axis::Y => (0.0, n / 2.0),
    };
    Ok(SpinMoments {
        mean_jx,
        mean_jy,
        // The variance along the mean-spin axis is zero for a CSS; the
        // field stores the variance of that component itself.
        var_jx: if axis == Axis::X { 0.0 } else { n / 4.0 },
        var_jy: if axis == Axis::Y { 0.0 } else { n / 4.0 },
        var_jz: n / 4.0,
        cov_jxjy: 0.0,
    })
}

// ---------------------------------------------------------------------------
// One-axis-twisted squeezed states
// ---------------------------------------------------------------------------

/// cos^k(μ) for integer-valued k, stable at any N: magnitude through
/// exp(k·ln|cos μ|), sign from the parity of k when cos μ < 0.
fn cos_pow(mu: f64, k: f64) -> f64 {
    if k == 0.0 {
        return 1.0;
    }
    let half = 2.0 * (mu / 2.0).sin().powi(2); // 1 − cos μ, exact at small μ
    if half < 1.0 {
        // cos μ > 0: ln(1 − half) via ln_1p keeps small-μ precision.
        (k * (-half).ln_1p()).exp()
    } else {
        let mag = (k * (half - 1.0).ln()).exp();
        if (k as i64) % 2 == 0 {
            mag
        } else {
            -mag
        }
    }
}

/// ln cos(μ/2); μ/2 < π/2 so this is always defined. Written through
/// ln_1p(−2 sin²(μ/4)) to stay exact as μ → 0.
fn ln_cos_half(mu: f64) -> f64 {
    (-2.0 * (mu / 4.0).sin().powi(2)).ln_1p()
}

/// The twisted-state building blocks shared by the moment formulas:
/// A = 1 − cos^{N−2}(μ), B = 4 sin(μ/2) cos^{N−2}(μ/2), R = √(A² + B²).
struct TwistBlocks {
    a: f64,
    b: f64,
    r: f64,
    /// A − R, evaluated as −B²/(A + R) to avoid cancellation.
    a_minus_r: f64,
}

fn twist_blocks(n: f64, mu: f64) -> TwistBlocks {
    let lc = ln_cos_half(mu);
    let half = 2.0 * (mu / 2.0).sin().powi(2); // 1 − cos μ, exact at small μ
    // A = 1 − cos^{N−2}(μ). While cos μ > 0, −exp_m1((N−2)·ln cos μ) keeps
    // A's *relative* error at machine precision even as A → 0 (huge N,
    // tiny μ), where the subtraction from 1 would lose seven digits and
    // poison the squeezed variance through A − R. For cos μ ≤ 0 the power
    // is tiny or alternating and the plain difference is safe.
    let a = if half < 1.0 {
        -((n - 2.0) * (-half).ln_1p()).exp_m1()
    } else {
        1.0 - cos_pow(mu, n - 2.0)
    };
    let b = 4.0 * (mu / 2.0).sin() * ((n - 2.0) * lc).exp();
    let r = a.hypot(b);
    let a_minus_r = if a + r > 0.0 { -(b * b) / (a + r) } else { 0.0 };
    TwistBlocks { a, b, r, a_minus_r }
}

/// Moments of the one-axis-twisted squeezed state with mean spin along
/// `axis` and the squeezed direction along the other equatorial axis.
///
/// For `axis = X` (the reference orientation):
///
/// ⟨Ĵ_x⟩ = (N/2)·cos^{N−1}(μ/2),
/// Var(Ĵ_x) = (N/4)[N(1 − cos^{2(N−1)}(μ/2)) − (N−1)A/2],
/// Var(Ĵ_y) = (N/4)[1 + (N−1)(A − √(A²+B²))/4]   (squeezed),
/// Var(Ĵ_z) = (N/4)[1 + (N−1)(A + √(A²+B²))/4]   (anti-squeezed),
/// Cov(Ĵ_x, Ĵ_y) = 0,
///
/// with A = 1 − cos^{N−2}(μ) and B = 4 sin(μ/2) cos^{N−2}(μ/2). These are
/// the exact moments of the aligned state: the alignment rotation about
/// the mean-spin axis has already absorbed the y–z cross-covariance of the
/// bare twisted state into the variance pair (Var Ĵ_y, Var Ĵ_z).
/// `axis = Y` relabels x ↔ y.
pub fn oatss_moments(n: f64, mu: f64, axis: Axis) -> Result<SpinMoments> {
    validate_n(n, 2.0)?;
    validate_mu(mu)?;
    let lc = ln_cos_half(mu);
    let blocks = twist_blocks(n, mu);
    let mean = (n / 2.0) * ((n - 1.0) * lc).exp();
    // N(1 − cos^{2(N−1)}(μ/2)) without cancellation at small μ.
    let grow = n * (-(2.0 * (n - 1.0) * lc).exp_m1());
    let var_along = (n / 4.0) * (grow - (n - 1.0) * blocks.a / 2.0);
    let var_squeezed = (n / 4.0) * (1.0 + (n - 1.0) * blocks.a_minus_r / 4.0);
    let var_anti = (n / 4.0) * (1.0 + (n - 1.0) * (blocks.a + blocks.r) / 4.0);
    Ok(match axis {
        Axis::X => SpinMoments {
            mean_jx: mean,
            mean_jy: 0.0,
            var_jx: var_along,
            var_jy: var_squeezed,
            var_jz: var_anti,
            cov_jxjy: 0.0,
        },
        Axis::Y => SpinMoments {
            mean_jx: 0.0,
            mean_jy: mean,
            var_jx: var_squeezed,
            var_jy: var_along,
            var_jz: var_anti,
            cov_jxjy: 0.0,
        },
    })
}

/// Alignment angle of the bare twisted state: the minimum-variance
/// direction in the y–z plane sits at δ = ½·atan2(B, A) from the z axis,
/// so rotating the state about the mean-spin axis by ±(π/2 − δ) parks the
/// squeezed direction on the equator. Exposed for the dense-state oracle.
pub fn alignment_angle(n: f64, mu: f64) -> Result<f64> {
    validate_n(n, 2.0)?;
    validate_mu(mu)?;
    let blocks = twist_blocks(n, mu);
    Ok(0.5 * blocks.b.atan2(blocks.a))
}

// ---------------------------------------------------------------------------
// Squeezing calibration
// ---------------------------------------------------------------------------

/// Wineland squeezing parameter in decibels:
/// ξ² = N·Var(Ĵ_squeezed)/⟨Ĵ⟩², dB = 10·log₁₀ ξ². Zero for the CSS,
/// negative once twisting wins over the mean-spin shortening.
pub fn squeezing_db(n: f64, mu: f64) -> Result<f64> {
    let m = oatss_moments(n, mu, Axis::X)?;
    Ok(10.0 * (n * m.var_jy / (m.mean_jx * m.mean_jx)).log10())
}

/// Largest-μ point to probe when bracketing the squeezing optimum.
const MU_BRACKET_HIGH: f64 = 1.5;

/// Invert `squeezing_db` on its monotone small-μ branch.
///
/// `target_db` must be ≤ 0. The dB curve falls from 0 at μ = 0 to a
/// global minimum and rises again; targets below that minimum are
/// unachievable for the given N. Bisection, converged when
/// |dB(μ) − target| ≤ 1e-6.
pub fn mu_from_db(n: f64, target_db: f64) -> Result<f64> {
    validate_n(n, 2.0)?;
    if !target_db.is_finite() || target_db > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "target squeezing must be <= 0 dB, got {target_db}"
        )));
    }
    if target_db == 0.0 {
        return Ok(0.0);
    }
    // Locate the minimum of dB(μ) by golden-section on log μ, to know the
    // monotone branch and the achievability limit.
    let (mu_opt, db_min) = minimize_db(n)?;
    if target_db < db_min + 1e-9 {
        return Err(Error::Unachievable(format!(
            "{target_db} dB is below the squeezing optimum {db_min:.6} dB at N = {n}"
        )));
    }
    let mut lo = 0.0_f64; // dB(0) = 0 > target
    let mut hi = mu_opt; // dB(mu_opt) = db_min < target
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let db = squeezing_db(n, mid)?;
        if (db - target_db).abs() <= 1e-6 {
            return Ok(mid);
        }
        if db > target_db {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Verification(format!(
        "squeezing bisection failed to converge to {target_db} dB at N = {n}"
    )))
}

/// Golden-section minimisation of dB(μ) over log μ ∈ [ln 1e-16, ln 1.5].
fn minimize_db(n: f64) -> Result<(f64, f64)> {
    let golden = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut a = (1e-16_f64).ln();
    let mut b = MU_BRACKET_HIGH.ln();
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let mut fc = squeezing_db(n, c.exp())?;
    let mut fd = squeezing_db(n, d.exp())?;
    for _ in 0..300 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = squeezing_db(n, c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = squeezing_db(n, d.exp())?;
        }
        if b - a < 1e-14 {
            break;
        }
    }
    let mu = (0.5 * (a + b)).exp();
    Ok((mu, squeezing_db(n, mu)?))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
