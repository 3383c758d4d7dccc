//! Brute-force dense-state verifier.
//!
//! Everything else in this crate is a closed form. This module is the
//! independent ground truth those forms are checked against: it builds
//! exact N-qubit density matrices, pushes them through the single-qubit
//! Kraus map qubit by qubit, integrates the full master equation with a
//! classical fourth-order scheme, and evaluates collective-spin and
//! parity observables by direct contraction. It is deliberately naive —
//! dense 2^N × 2^N matrices, hard-capped at N = 10 — because its job is
//! verification, not production.
//!
//! Basis conventions: computational basis ordered by bit patterns, with
//! bit q of the index giving the state of qubit q (0 = up). J_z eigenvalue
//! of basis state i is m_i = (N − 2·popcount(i))/2.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::{KrausSet, NoiseModel};
use crate::error::{Error, Result};
use crate::probes::{self, Axis, SpinMoments};

/// Hard cap on the dense-state size (1024 × 1024 complex matrices).
pub const MAX_QUBITS: usize = 10;

/// Absolute tolerance for Hermiticity and unit trace.
const HERMITICITY_TOLERANCE: f64 = 1e-12;
/// Lower bound on admissible density-matrix eigenvalues.
const POSITIVITY_TOLERANCE: f64 = -1e-10;

// ---------------------------------------------------------------------------
// Axes and observables
// ---------------------------------------------------------------------------

/// A full 3D spin axis (the planar [`Axis`] covers only the equator).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinAxis {
    /// x axis.
    X,
    /// y axis.
    Y,
    /// z axis (the rotation axis).
    Z,
}

impl From<Axis> for SpinAxis {
    fn from(axis: Axis) -> Self {
        match axis {
            Axis::X => SpinAxis::X,
            Axis::Y => SpinAxis::Y,
        }
    }
}

/// An observable the oracle can evaluate exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableSpec {
    /// Collective spin component J_a.
    Spin(SpinAxis),
    /// Collective spin square J_a².
    SpinSquare(SpinAxis),
    /// Parity operator σ_a ⊗ … ⊗ σ_a.
    Parity(SpinAxis),
}

// ---------------------------------------------------------------------------
// Dense state
// ---------------------------------------------------------------------------

/// An exact N-qubit density matrix (row-major, dimension 2^N).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    rho: Vec<Complex64>,
}

impl DenseState {
    /// Number of qubits.
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Hilbert-space dimension 2^N.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Row-major matrix entries.
    pub fn matrix(&self) -> &[Complex64] {
        &self.rho
    }

    /// Build from an explicit matrix, enforcing all invariants.
    pub fn from_matrix(n: usize, rho: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        if rho.len() != dim * dim {
            return Err(Error::InvalidParameter(format!(
                "density matrix for {n} qubits needs {} entries, got {}",
                dim * dim,
                rho.len()
            )));
        }
        let state = Self { n, rho };
        state.check_invariants()?;
        Ok(state)
    }

    /// Build the pure state |ψ⟩⟨ψ| from amplitudes (must be normalized).
    pub fn from_amplitudes(n: usize, psi: &[Complex64]) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        if psi.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "state vector for {n} qubits needs {dim} amplitudes, got {}",
                psi.len()
            )));
        }
        let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "state vector must be normalized, got |psi|^2 = {norm2}"
            )));
        }
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                rho[i * dim + j] = psi[i] * psi[j].conj();
            }
        }
        Ok(Self { n, rho })
    }

    /// The maximally mixed state 1/2^N.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            rho[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n, rho })
    }

    /// Verify Hermiticity (1e-12), unit trace (1e-12), and positive
    /// semidefiniteness (min eigenvalue ≥ −1e-10).
    pub fn check_invariants(&self) -> Result<()> {
        let dim = self.dim();
        let mut herm = 0.0_f64;
        for i in 0..dim {
            for j in i..dim {
                herm = herm.max((self.rho[i * dim + j] - self.rho[j * dim + i].conj()).norm());
            }
        }
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::Verification(format!(
                "density matrix is not Hermitian: max deviation {herm:.3e}"
            )));
        }
        let trace: Complex64 = (0..dim).map(|i| self.rho[i * dim + i]).sum();
        if (trace.re - 1.0).abs() > HERMITICITY_TOLERANCE || trace.im.abs() > HERMITICITY_TOLERANCE
        {
            return Err(Error::Verification(format!(
                "density matrix trace is {trace}, expected 1"
            )));
        }
        let min_eig = hermitian_eigenvalues(self.n, &self.rho)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < POSITIVITY_TOLERANCE {
            return Err(Error::Verification(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(())
    }

    /// Tr ρ² (1 for pure states).
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|e| e.norm_sqr()).sum()
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "dense oracle supports 1..={MAX_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix H = X + iY via the real symmetric
/// embedding [[X, −Y], [Y, X]], whose spectrum is that of H with every
/// eigenvalue doubled.
fn hermitian_eigenvalues(n: usize, m: &[Complex64]) -> Vec<f64> {
    let dim = 1usize << n;
    let mut embed = DMatrix::<f64>::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        for j in 0..dim {
            let e = m[i * dim + j];
            embed[(i, j)] = e.re;
            embed[(i + dim, j + dim)] = e.re;
            embed[(i, j + dim)] = -e.im;
            embed[(i + dim, j)] = e.im;
        }
    }
    embed.symmetric_eigenvalues().iter().copied().collect()
}

/// Trace distance ½‖ρ − σ‖₁ between two states of equal size.
pub fn trace_distance(a: &DenseState, b: &DenseState) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::InvalidParameter(format!(
            "trace distance needs equal sizes, got {} and {} qubits",
            a.n, b.n
        )));
    }
    let diff: Vec<Complex64> = a
        .rho
        .iter()
        .zip(&b.rho)
        .map(|(x, y)| x - y)
        .collect();
    // The embedding doubles every eigenvalue, so ½ Σ|λ| becomes ¼ Σ|λ'|.
    Ok(hermitian_eigenvalues(a.n, &diff)
        .iter()
        .map(|l| l.abs())
        .sum::<f64>()
        / 4.0)
}

// ---------------------------------------------------------------------------
// State builders
// ---------------------------------------------------------------------------

/// J_z eigenvalue of basis state i.
fn jz_eigenvalue(n: usize, i: usize) -> f64 {
    (n as f64 - 2.0 * i.count_ones() as f64) / 2.0
}

/// Coherent spin state of N qubits polarized along +axis.
pub fn build_css(n: usize, axis: Axis) -> Result<DenseState> {
    check_qubit_count(n)?;
    let dim = 1usize << n;
    let amp = (dim as f64).sqrt().recip();
    let psi: Vec<Complex64> = (0..dim)
        .map(|i| match axis {
            // |+x⟩ = (|0⟩ + |1⟩)/√2 per qubit: uniform amplitudes.
            Axis::X => Complex64::new(amp, 0.0),
            // |+y⟩ = (|0⟩ + i|1⟩)/√2 per qubit: a factor i per down bit.
            Axis::Y => Complex64::i().powu(i.count_ones()) * amp,
        })
        .collect();
    DenseState::from_amplitudes(n, &psi)
}

/// One-axis-twisted CSS before alignment: exp(−i(μ/2)J_z²)·|CSS_axis⟩.
pub fn twisted_css(n: usize, mu: f64, axis: Axis) -> Result<DenseState> {
    check_qubit_count(n)?;
    if !mu.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "twist strength must be finite, got {mu}"
        )));
    }
    let dim = 1usize << n;
    let amp = (dim as f64).sqrt().recip();
    let psi: Vec<Complex64> = (0..dim)
        .map(|i| {
            let m = jz_eigenvalue(n, i);
            let phase = Complex64::from_polar(1.0, -0.5 * mu * m * m);
            let base = match axis {
                Axis::X => Complex64::new(amp, 0.0),
                Axis::Y => Complex64::i().powu(i.count_ones()) * amp,
            };
            base * phase
        })
        .collect();
    DenseState::from_amplitudes(n, &psi)
}

/// Rotate a state by exp(−iθJ_a), applied as the product of per-qubit
/// 2×2 rotations exp(−i(θ/2)σ_a).
pub fn rotate_collective(state: &DenseState, axis: SpinAxis, angle: f64) -> Result<DenseState> {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let i = Complex64::i();
    let re = |x: f64| Complex64::new(x, 0.0);
    let u: [[Complex64; 2]; 2] = match axis {
        SpinAxis::X => [[re(c), -i * s], [-i * s, re(c)]],
        SpinAxis::Y => [[re(c), re(-s)], [re(s), re(c)]],
        SpinAxis::Z => [
            [Complex64::from_polar(1.0, -angle / 2.0), re(0.0)],
            [re(0.0), Complex64::from_polar(1.0, angle / 2.0)],
        ],
    };
    let u_dag = [
        [u[0][0].conj(), u[1][0].conj()],
        [u[0][1].conj(), u[1][1].conj()],
    ];
    let mut rho = state.rho.clone();
    for q in 0..state.n {
        conjugate_single_qubit(&mut rho, state.dim(), q, &[u], Some(&[u_dag]));
    }
    DenseState::from_matrix(state.n, rho)
}

/// Spin-squeezed probe: twist, then rotate about the mean-spin axis so
/// the minimal-variance direction lands on the conventional coordinate
/// axis. The rotation sign is not fixed a priori; both candidates are
/// compared against the closed-form moments and the matching one is
/// returned (a verification error reports a convention mismatch if
/// neither agrees to 1e-8).
pub fn build_oatss(n: usize, mu: f64, axis: Axis) -> Result<DenseState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "squeezing needs at least 2 qubits, got {n}"
        )));
    }
    let twisted = twisted_css(n, mu, axis)?;
    let reference = probes::oatss_moments(n as f64, mu, axis)?;
    let delta = probes::alignment_angle(n as f64, mu)?;
    let theta = std::f64::consts::FRAC_PI_2 - delta;
    let mut best: Option<(DenseState, f64)> = None;
    for sign in [1.0, -1.0] {
        let candidate = rotate_collective(&twisted, axis.into(), sign * theta)?;
        let got = moments(&candidate);
        let dev = moment_deviation(&got, &reference);
        if dev <= 1e-8 && best.as_ref().is_none_or(|(_, d)| dev < *d) {
            best = Some((candidate, dev));
        }
    }
    match best {
        Some((state, _)) => Ok(state),
        None => Err(Error::Verification(format!(
            "no alignment rotation reproduces the squeezed-state moments \
             (n = {n}, mu = {mu}); twist convention mismatch"
        ))),
    }
}

fn moment_deviation(a: &SpinMoments, b: &SpinMoments) -> f64 {
    [
        a.mean_jx - b.mean_jx,
        a.mean_jy - b.mean_jy,
        a.var_jx - b.var_jx,
        a.var_jy - b.var_jy,
        a.var_jz - b.var_jz,
        a.cov_jxjy - b.cov_jxjy,
    ]
    .into_iter()
    .fold(0.0_f64, |m, d| m.max(d.abs()))
}

/// GHZ state (|0…0⟩ + |1…1⟩)/√2.
pub fn build_ghz(n: usize) -> Result<DenseState> {
    check_qubit_count(n)?;
    let dim = 1usize << n;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    let amp = Complex64::new(0.5_f64.sqrt(), 0.0);
    psi[0] = amp;
    psi[dim - 1] = amp;
    DenseState::from_amplitudes(n, &psi)
}

// ---------------------------------------------------------------------------
// Channel application
// ---------------------------------------------------------------------------

/// Conjugate the single-qubit operators through qubit q of a dense matrix:
/// ρ ← Σ_s A_s ρ B_s where B defaults to A_s†. Blocks are gathered and
/// scattered in place.
fn conjugate_single_qubit(
    rho: &mut [Complex64],
    dim: usize,
    q: usize,
    a_ops: &[[[Complex64; 2]; 2]],
    b_ops: Option<&[[[Complex64; 2]; 2]]>,
) {
    let mask = 1usize << q;
    for i in 0..dim {
        if i & mask != 0 {
            continue;
        }
        for j in 0..dim {
            if j & mask != 0 {
                continue;
            }
            let (i1, j1) = (i | mask, j | mask);
            let block = [
                [rho[i * dim + j], rho[i * dim + j1]],
                [rho[i1 * dim + j], rho[i1 * dim + j1]],
            ];
            let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
            for (s, a) in a_ops.iter().enumerate() {
                let b = match b_ops {
                    Some(bs) => bs[s],
                    None => [
                        [a[0][0].conj(), a[1][0].conj()],
                        [a[0][1].conj(), a[1][1].conj()],
                    ],
                };
                // out += A · block · B
                for r in 0..2 {
                    for c in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..2 {
                            for l in 0..2 {
                                acc += a[r][k] * block[k][l] * b[l][c];
                            }
                        }
                        out[r][c] += acc;
                    }
                }
            }
            rho[i * dim + j] = out[0][0];
            rho[i * dim + j1] = out[0][1];
            rho[i1 * dim + j] = out[1][0];
            rho[i1 * dim + j1] = out[1][1];
        }
    }
}

/// Apply the single-qubit Kraus map to every qubit (the product channel).
pub fn apply_channel(state: &DenseState, kraus: &KrausSet) -> Result<DenseState> {
    let ops = kraus.operators();
    let mut rho = state.rho.clone();
    for q in 0..state.n {
        conjugate_single_qubit(&mut rho, state.dim(), q, &ops, None);
    }
    DenseState::from_matrix(state.n, rho)
}

// ---------------------------------------------------------------------------
// Master-equation integration
// ---------------------------------------------------------------------------

/// Step count for which the integrator's local error is far below the
/// verification tolerances: max(γt, |ω|t, 1)/10⁻³ steps.
pub fn default_steps(noise: &NoiseModel, omega: f64, t: f64) -> usize {
    let scale = (noise.gamma() * t).max((omega * t).abs()).max(1.0);
    (scale / 1e-3).ceil() as usize
}

/// Right-hand side of the master equation on the dense matrix, evaluated
/// entry-wise through bit arithmetic:
///
/// rhs[i][j] = [−iω(pc(j) − pc(i)) − (γ/2)(N − α_z(N − 2·pc(i⊕j)))]·ρ[i][j]
///           + (γ/2)·Σ_q (α_x + α_y·(−1)^{bit_q(i⊕j)})·ρ[i^m_q][j^m_q]
fn lindblad_rhs(
    n: usize,
    rho: &[Complex64],
    noise: &NoiseModel,
    omega: f64,
    out: &mut [Complex64],
) {
    let dim = 1usize << n;
    let (gamma, ax, ay, az) = (
        noise.gamma(),
        noise.alpha_x(),
        noise.alpha_y(),
        noise.alpha_z(),
    );
    for i in 0..dim {
        for j in 0..dim {
            let x = i ^ j;
            let pc_x = x.count_ones() as f64;
            let diag = Complex64::new(
                -(gamma / 2.0) * (n as f64 - az * (n as f64 - 2.0 * pc_x)),
                -omega * (j.count_ones() as f64 - i.count_ones() as f64),
            );
            let mut acc = diag * rho[i * dim + j];
            for q in 0..n {
                let mask = 1usize << q;
                let w = if x & mask == 0 { ax + ay } else { ax - ay };
                if w != 0.0 {
                    acc += (gamma / 2.0) * w * rho[(i ^ mask) * dim + (j ^ mask)];
                }
            }
            out[i * dim + j] = acc;
        }
    }
}

fn rk4_run(
    state: &DenseState,
    noise: &NoiseModel,
    omega: f64,
    t: f64,
    steps: usize,
) -> Vec<Complex64> {
    let n = state.n;
    let dim = state.dim();
    let len = dim * dim;
    let dt = t / steps as f64;
    let mut rho = state.rho.clone();
    let mut k1 = vec![Complex64::new(0.0, 0.0); len];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    for _ in 0..steps {
        lindblad_rhs(n, &rho, noise, omega, &mut k1);
        for idx in 0..len {
            tmp[idx] = rho[idx] + 0.5 * dt * k1[idx];
        }
        lindblad_rhs(n, &tmp, noise, omega, &mut k2);
        for idx in 0..len {
            tmp[idx] = rho[idx] + 0.5 * dt * k2[idx];
        }
        lindblad_rhs(n, &tmp, noise, omega, &mut k3);
        for idx in 0..len {
            tmp[idx] = rho[idx] + dt * k3[idx];
        }
        lindblad_rhs(n, &tmp, noise, omega, &mut k4);
        for idx in 0..len {
            rho[idx] += dt / 6.0 * (k1[idx] + 2.0 * (k2[idx] + k3[idx]) + k4[idx]);
        }
    }
    rho
}

/// Integrate the master equation with the classical fourth-order scheme.
///
/// Returns the integrated state together with a step-halving error
/// estimate: the trace distance between the `steps` and `2·steps`
/// integrations (the returned state is the finer one). Rejects step
/// counts violating the stability criterion γ·t/steps ≤ 10⁻³.
pub fn lindblad_rk4(
    state: &DenseState,
    noise: &NoiseModel,
    omega: f64,
    t: f64,
    steps: usize,
) -> Result<(DenseState, f64)> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "integration time must be finite and >= 0, got {t}"
        )));
    }
    if steps == 0 || noise.gamma() * t / steps as f64 > 1e-3 {
        return Err(Error::InvalidParameter(format!(
            "step size too large: need gamma*t/steps <= 1e-3, got {} / {steps}",
            noise.gamma() * t
        )));
    }
    let coarse = rk4_run(state, noise, omega, t, steps);
    let fine = rk4_run(state, noise, omega, t, 2 * steps);
    let coarse_state = DenseState {
        n: state.n,
        rho: coarse,
    };
    let fine_state = DenseState::from_matrix(state.n, fine)?;
    let estimate = trace_distance(&fine_state, &coarse_state)?;
    Ok((fine_state, estimate))
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

/// Left-multiply by J_a: out = J_a · m.
fn left_apply_spin(n: usize, axis: SpinAxis, m: &[Complex64], out: &mut [Complex64]) {
    let dim = 1usize << n;
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            match axis {
                SpinAxis::X => {
                    for q in 0..n {
                        acc += m[(i ^ (1 << q)) * dim + j];
                    }
                }
                SpinAxis::Y => {
                    // ⟨i|σ_y^q|i^m⟩ = ∓i for bit_q(i) = 0/1.
                    for q in 0..n {
                        let c = if i & (1 << q) == 0 {
                            -Complex64::i()
                        } else {
                            Complex64::i()
                        };
                        acc += c * m[(i ^ (1 << q)) * dim + j];
                    }
                }
                SpinAxis::Z => {
                    acc = 2.0 * jz_eigenvalue(n, i) * m[i * dim + j];
                }
            }
            out[i * dim + j] = 0.5 * acc;
        }
    }
}

fn matrix_trace(dim: usize, m: &[Complex64]) -> Complex64 {
    (0..dim).map(|i| m[i * dim + i]).sum()
}

/// All first and second collective-spin moments of a state, by direct
/// contraction (covariance symmetrized).
pub fn moments(state: &DenseState) -> SpinMoments {
    let dim = state.dim();
    let len = dim * dim;
    let mut jx_rho = vec![Complex64::new(0.0, 0.0); len];
    let mut jy_rho = jx_rho.clone();
    let mut product = jx_rho.clone();
    left_apply_spin(state.n, SpinAxis::X, &state.rho, &mut jx_rho);
    left_apply_spin(state.n, SpinAxis::Y, &state.rho, &mut jy_rho);
    let mean_jx = matrix_trace(dim, &jx_rho).re;
    let mean_jy = matrix_trace(dim, &jy_rho).re;

    left_apply_spin(state.n, SpinAxis::X, &jx_rho, &mut product);
    let jx2 = matrix_trace(dim, &product).re;
    left_apply_spin(state.n, SpinAxis::Y, &jy_rho, &mut product);
    let jy2 = matrix_trace(dim, &product).re;
    // ⟨J_x J_y⟩; the symmetrized covariance is its real part.
    left_apply_spin(state.n, SpinAxis::X, &jy_rho, &mut product);
    let jxjy = matrix_trace(dim, &product).re;

    let mut mean_jz = 0.0;
    let mut jz2 = 0.0;
    for i in 0..dim {
        let m = jz_eigenvalue(state.n, i);
        let p = state.rho[i * dim + i].re;
        mean_jz += m * p;
        jz2 += m * m * p;
    }

    SpinMoments {
        mean_jx,
        mean_jy,
        var_jx: jx2 - mean_jx * mean_jx,
        var_jy: jy2 - mean_jy * mean_jy,
        var_jz: jz2 - mean_jz * mean_jz,
        cov_jxjy: jxjy - mean_jx * mean_jy,
    }
}

/// Exact expectation value of a collective observable.
pub fn expectation(state: &DenseState, obs: ObservableSpec) -> f64 {
    let dim = state.dim();
    match obs {
        ObservableSpec::Spin(axis) => {
            let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
            left_apply_spin(state.n, axis, &state.rho, &mut m);
            matrix_trace(dim, &m).re
        }
        ObservableSpec::SpinSquare(axis) => {
            let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
            let mut m2 = m.clone();
            left_apply_spin(state.n, axis, &state.rho, &mut m);
            left_apply_spin(state.n, axis, &m, &mut m2);
            matrix_trace(dim, &m2).re
        }
        ObservableSpec::Parity(axis) => {
            let flip = dim - 1;
            match axis {
                // ⟨P_x⟩ = Σ_i ρ[i][~i]
                SpinAxis::X => (0..dim).map(|i| state.rho[i * dim + (i ^ flip)]).sum::<Complex64>().re,
                // ⟨P_y⟩ = i^N Σ_i (−1)^{pc(i)} ρ[i][~i]
                SpinAxis::Y => {
                    let phase = Complex64::i().powu(state.n as u32);
                    (phase
                        * (0..dim)
                            .map(|i| {
                                let sign = if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                                sign * state.rho[i * dim + (i ^ flip)]
                            })
                            .sum::<Complex64>())
                    .re
                }
                // ⟨P_z⟩ = Σ_i (−1)^{pc(i)} ρ[i][i]
                SpinAxis::Z => (0..dim)
                    .map(|i| {
                        let sign = if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        sign * state.rho[i * dim + i].re
                    })
                    .sum(),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Randomized equivalence suite
// ---------------------------------------------------------------------------

/// Worst-case deviations between the closed forms and the dense oracle
/// over a randomized parameter sweep. Produced by [`equivalence_suite`];
/// each field pairs with a tolerance in [`EquivalenceReport::checks`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport {
    /// Number of randomized draws evaluated.
    pub draws: usize,
    /// Draws skipped because the closed form reported a degenerate signal.
    pub skipped_degenerate: usize,
    /// Probe-state moments vs the closed forms (relative, floor 1).
    pub max_initial_moment_dev: f64,
    /// Evolved moments vs the channel-contracted forms (relative, floor 1).
    pub max_evolved_moment_dev: f64,
    /// Δ²ω·T assembled from dense statistics vs the closed form (relative).
    pub max_precision_dev: f64,
    /// GHZ parity mean, dense vs closed form (relative, floor 1).
    pub max_parity_dev: f64,
    /// Analytic signal derivatives vs dense finite differences
    /// (relative, floor 1), spin means and parity together.
    pub max_derivative_dev: f64,
    /// Kraus-map vs RK4-integrated state, trace distance.
    pub max_kraus_rk4_distance: f64,
    /// Kraus completeness defect.
    pub max_completeness_defect: f64,
}

impl EquivalenceReport {
    /// (name, measured, tolerance) triples for every suite check.
    pub fn checks(&self) -> Vec<(&'static str, f64, f64)> {
        vec![
            ("initial moments", self.max_initial_moment_dev, 1e-8),
            ("evolved moments", self.max_evolved_moment_dev, 1e-8),
            ("precision", self.max_precision_dev, 1e-8),
            ("ghz parity", self.max_parity_dev, 1e-8),
            ("signal derivatives (fd)", self.max_derivative_dev, 1e-6),
            ("kraus vs rk4", self.max_kraus_rk4_distance, 1e-8),
            ("kraus completeness", self.max_completeness_defect, 1e-10),
        ]
    }

    /// Whether every check is within tolerance.
    pub fn passes(&self) -> bool {
        self.checks().iter().all(|(_, v, tol)| v <= tol)
    }
}

fn rel_dev(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

struct EquivalenceDraw {
    n: usize,
    noise: NoiseModel,
    omega: f64,
    t: f64,
    mu: f64,
    geometry: crate::metrology::Geometry,
}

fn equivalence_draws(max_n: usize, draws: usize, seed: u64) -> Vec<EquivalenceDraw> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..draws)
        .map(|_| {
            let n = rng.gen_range(2..=max_n);
            let gamma = 0.05 * (2.0_f64 / 0.05).powf(rng.gen::<f64>());
            let raw: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
            let sum: f64 = raw.iter().sum();
            let noise =
                NoiseModel::new(gamma, raw[0] / sum, raw[1] / sum, raw[2] / sum).unwrap();
            let omega = rng.gen_range(-1.5..1.5);
            // Keep gamma*t <= 2 so the same draw also drives the RK4 check.
            let t = rng.gen_range(0.05..1.0) * (2.0 / gamma).min(3.0);
            let mu = 1e-3 * (1.0_f64 / 1e-3).powf(rng.gen::<f64>());
            let geometry = if rng.gen::<bool>() {
                crate::metrology::Geometry::ScenarioA
            } else {
                crate::metrology::Geometry::ScenarioB
            };
            EquivalenceDraw { n, noise, omega, t, mu, geometry }
        })
        .collect()
}

struct DrawOutcome {
    skipped_degenerate: usize,
    initial_dev: f64,
    evolved_dev: f64,
    precision_dev: f64,
    parity_dev: f64,
    derivative_dev: f64,
    rk4_distance: f64,
    completeness: f64,
}

fn run_equivalence_draw(draw: &EquivalenceDraw, with_rk4: bool) -> Result<DrawOutcome> {
    use crate::channel;
    use crate::ghz;
    use crate::metrology;

    let EquivalenceDraw { n, noise, omega, t, mu, geometry } = draw;
    let (n, omega, t, mu) = (*n, *omega, *t, *mu);
    let axis = match geometry {
        metrology::Geometry::ScenarioA => Axis::X,
        _ => Axis::Y,
    };
    let meas_axis = geometry.measurement_axis();
    let mut out = DrawOutcome {
        skipped_degenerate: 0,
        initial_dev: 0.0,
        evolved_dev: 0.0,
        precision_dev: 0.0,
        parity_dev: 0.0,
        derivative_dev: 0.0,
        rk4_distance: 0.0,
        completeness: 0.0,
    };

    let kraus = channel::kraus_set(noise, omega, t)?;
    out.completeness = kraus.completeness_defect();
    let c = channel::channel_coefficients(noise, omega, t)?;

    // Probe construction vs Eq.-level closed forms.
    let state = build_oatss(n, mu, axis)?;
    let m0_closed = probes::oatss_moments(n as f64, mu, axis)?;
    let m0_dense = moments(&state);
    for (got, want) in moment_pairs(&m0_dense, &m0_closed) {
        out.initial_dev = out.initial_dev.max(rel_dev(got, want));
    }

    // Channel action on all first/second moments.
    let evolved = apply_channel(&state, &kraus)?;
    let dense = moments(&evolved);
    for check_axis in [Axis::X, Axis::Y] {
        let mean = metrology::evolved_mean(&m0_closed, &c, check_axis);
        let var = metrology::evolved_variance(&m0_closed, &c, n as f64, check_axis);
        let (dense_mean, dense_var) = match check_axis {
            Axis::X => (dense.mean_jx, dense.var_jx),
            Axis::Y => (dense.mean_jy, dense.var_jy),
        };
        out.evolved_dev = out
            .evolved_dev
            .max(rel_dev(dense_mean, mean))
            .max(rel_dev(dense_var, var));
    }

    // Precision: dense variance and dense initial moments, analytic slope.
    let spec = metrology::ProbeSpec::new(n as f64, *geometry, mu)?;
    match metrology::precision(&spec, noise, omega, t) {
        Ok(closed) => {
            let deriv = metrology::evolved_mean_derivative(&m0_dense, &c, meas_axis);
            let dense_var = match meas_axis {
                Axis::X => dense.var_jx,
                Axis::Y => dense.var_jy,
            };
            let assembled = t * dense_var / (deriv * deriv);
            out.precision_dev = (assembled - closed.msqe_times_t).abs()
                / closed.msqe_times_t.abs().max(f64::MIN_POSITIVE);
        }
        Err(Error::DegenerateSignal(_)) => out.skipped_degenerate += 1,
        Err(e) => return Err(e),
    }

    // Signal-slope derivatives against dense finite differences. The step
    // is scaled down with N·t to keep the O(h²) truncation below 1e-10
    // while staying far above the f64 rounding floor.
    let h = 3e-6 / (1.0 + n as f64 * t * omega.abs().max(1.0));
    let k_up = channel::kraus_set(noise, omega + h, t)?;
    let k_dn = channel::kraus_set(noise, omega - h, t)?;
    let mean_of = |st: &DenseState| -> f64 {
        match meas_axis {
            Axis::X => expectation(st, ObservableSpec::Spin(SpinAxis::X)),
            Axis::Y => expectation(st, ObservableSpec::Spin(SpinAxis::Y)),
        }
    };
    let fd = (mean_of(&apply_channel(&state, &k_up)?) - mean_of(&apply_channel(&state, &k_dn)?))
        / (2.0 * h);
    let analytic = metrology::evolved_mean_derivative(&m0_dense, &c, meas_axis);
    out.derivative_dev = rel_dev(fd, analytic);

    // GHZ parity statistics through the same channel.
    let ghz_state = build_ghz(n)?;
    let ghz_evolved = apply_channel(&ghz_state, &kraus)?;
    let stats = ghz::parity_stats(n as f64, &c)?;
    let dense_parity = expectation(&ghz_evolved, ObservableSpec::Parity(SpinAxis::X));
    out.parity_dev = rel_dev(dense_parity, stats.mean);
    let parity_fd = (expectation(&apply_channel(&ghz_state, &k_up)?, ObservableSpec::Parity(SpinAxis::X))
        - expectation(&apply_channel(&ghz_state, &k_dn)?, ObservableSpec::Parity(SpinAxis::X)))
        / (2.0 * h);
    out.derivative_dev = out.derivative_dev.max(rel_dev(parity_fd, stats.derivative));

    // Kraus map vs direct master-equation integration (capped at 3 qubits
    // to keep the integrator fast; the map itself is per-qubit exact).
    if with_rk4 {
        let n_rk4 = n.min(3);
        let small = build_oatss(n_rk4.max(2), mu, axis)?;
        let small_kraus = apply_channel(&small, &kraus)?;
        let steps = default_steps(noise, omega, t);
        let (integrated, _) = lindblad_rk4(&small, noise, omega, t, steps)?;
        out.rk4_distance = trace_distance(&small_kraus, &integrated)?;
    }
    Ok(out)
}

fn moment_pairs(a: &SpinMoments, b: &SpinMoments) -> [(f64, f64); 6] {
    [
        (a.mean_jx, b.mean_jx),
        (a.mean_jy, b.mean_jy),
        (a.var_jx, b.var_jx),
        (a.var_jy, b.var_jy),
        (a.var_jz, b.var_jz),
        (a.cov_jxjy, b.cov_jxjy),
    ]
}

/// Run the full randomized closed-form-vs-oracle cross-check.
///
/// Draws are generated deterministically from the seed, evaluated in
/// parallel, and reduced by maximum deviation, so the report is stable
/// across runs and worker counts. `with_rk4` additionally integrates the
/// master equation on every draw (the dominant cost).
pub fn equivalence_suite(
    max_n: usize,
    draws: usize,
    seed: u64,
    with_rk4: bool,
) -> Result<EquivalenceReport> {
    use rayon::prelude::*;
    if max_n < 2 || max_n > MAX_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "equivalence suite needs 2..={MAX_QUBITS} qubits, got {max_n}"
        )));
    }
    let outcomes: Vec<DrawOutcome> = equivalence_draws(max_n, draws, seed)
        .par_iter()
        .map(|draw| run_equivalence_draw(draw, with_rk4))
        .collect::<Result<_>>()?;
    let mut report = EquivalenceReport {
        draws,
        skipped_degenerate: 0,
        max_initial_moment_dev: 0.0,
        max_evolved_moment_dev: 0.0,
        max_precision_dev: 0.0,
        max_parity_dev: 0.0,
        max_derivative_dev: 0.0,
        max_kraus_rk4_distance: 0.0,
        max_completeness_defect: 0.0,
    };
    for o in outcomes {
        report.skipped_degenerate += o.skipped_degenerate;
        report.max_initial_moment_dev = report.max_initial_moment_dev.max(o.initial_dev);
        report.max_evolved_moment_dev = report.max_evolved_moment_dev.max(o.evolved_dev);
        report.max_precision_dev = report.max_precision_dev.max(o.precision_dev);
        report.max_parity_dev = report.max_parity_dev.max(o.parity_dev);
        report.max_derivative_dev = report.max_derivative_dev.max(o.derivative_dev);
        report.max_kraus_rk4_distance = report.max_kraus_rk4_distance.max(o.rk4_distance);
        report.max_completeness_defect = report.max_completeness_defect.max(o.completeness);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
