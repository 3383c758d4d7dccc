//! Drives the engine strictly through the `extern "C"` surface and pins
//! every result against the corresponding direct library call. Both sides
//! execute the same code path, so agreement is required to be bitwise,
//! not merely approximate; the error-code contract and the null-pointer
//! policy are exercised explicitly.

use std::ptr;

use magfreq::channel::NoiseModel;
use magfreq::metrology::{self, Geometry, ProbeSpec};
use magfreq::optimizer::{self, SearchDomain};
use magfreq::{bounds, ghz, probes};
use magfreq_ffi::*;

/// Builds a handle through the ABI, panicking on failure.
fn noise_handle(gamma: f64, ax: f64, ay: f64, az: f64) -> *mut MagfreqNoise {
    let mut handle: *mut MagfreqNoise = ptr::null_mut();
    let status = unsafe { magfreq_noise_new(gamma, ax, ay, az, &mut handle) };
    assert_eq!(status, MagfreqStatus::Ok);
    assert!(!handle.is_null());
    handle
}

#[test]
fn noise_lifecycle_and_rate_readback() {
    let handle = noise_handle(67.0, 1.0, 0.0, 0.0);
    let mut gamma = f64::NAN;
    assert_eq!(
        unsafe { magfreq_noise_gamma(handle, &mut gamma) },
        MagfreqStatus::Ok
    );
    assert_eq!(gamma, 67.0);
    unsafe { magfreq_noise_free(handle) };

    // Weights that do not sum to one are rejected and the out-pointer is
    // left untouched.
    let mut bad: *mut MagfreqNoise = ptr::null_mut();
    let status = unsafe { magfreq_noise_new(1.0, 0.7, 0.0, 0.0, &mut bad) };
    assert_eq!(status, MagfreqStatus::InvalidParameter);
    assert!(bad.is_null());

    // Freeing null is a documented no-op.
    unsafe { magfreq_noise_free(ptr::null_mut()) };
}

#[test]
fn precision_matches_the_library_bitwise() {
    // The magnetometry reference point: N = 1e11 spins at −8 dB squeezing,
    // γ = 67/s, ω = 3.6e-3/s, t = 1 ms.
    let (n, gamma, omega, t) = (1e11, 67.0, 3.6e-3, 1e-3);
    let mut mu = f64::NAN;
    assert_eq!(
        unsafe { magfreq_mu_from_db(n, -8.0, &mut mu) },
        MagfreqStatus::Ok
    );
    assert_eq!(mu, probes::mu_from_db(n, -8.0).unwrap());

    let handle = noise_handle(gamma, 1.0, 0.0, 0.0);
    let noise = NoiseModel::transversal(gamma).unwrap();
    for (code, geometry) in [
        (MAGFREQ_GEOMETRY_SCENARIO_A, Geometry::ScenarioA),
        (MAGFREQ_GEOMETRY_SCENARIO_B, Geometry::ScenarioB),
    ] {
        let mut out = MagfreqPrecision {
            msqe_times_t: f64::NAN,
            signal_derivative: f64::NAN,
            variance: f64::NAN,
            gain_vs_css: f64::NAN,
        };
        let status = unsafe { magfreq_precision(handle, n, code, mu, omega, t, &mut out) };
        assert_eq!(status, MagfreqStatus::Ok);

        let spec = ProbeSpec::new(n, geometry, mu).unwrap();
        let direct = metrology::precision(&spec, &noise, omega, t).unwrap();
        assert_eq!(out.msqe_times_t, direct.msqe_times_t);
        assert_eq!(out.signal_derivative, direct.signal_derivative);
        assert_eq!(out.variance, direct.variance);
        assert_eq!(out.gain_vs_css, direct.gain_vs_css);
        assert!(out.gain_vs_css > 1.0);
    }
    unsafe { magfreq_noise_free(handle) };
}

#[test]
fn coherent_closed_form_matches() {
    let (n, gamma, omega, t) = (250.0, 1.3, 0.4, 0.6);
    let mut via_abi = f64::NAN;
    assert_eq!(
        unsafe { magfreq_css_precision_closed_form(n, gamma, omega, t, &mut via_abi) },
        MagfreqStatus::Ok
    );
    assert_eq!(
        via_abi,
        metrology::css_precision_closed_form(n, gamma, omega, t).unwrap()
    );
}

#[test]
fn ghz_precision_matches_and_reports_degeneracy() {
    let handle = noise_handle(1.0, 1.0, 0.0, 0.0);
    let mut via_abi = f64::NAN;
    assert_eq!(
        unsafe { magfreq_ghz_precision(handle, 32.0, 0.8, 0.7, &mut via_abi) },
        MagfreqStatus::Ok
    );
    let noise = NoiseModel::transversal(1.0).unwrap();
    assert_eq!(via_abi, ghz::ghz_precision(32.0, &noise, 0.8, 0.7).unwrap());

    // Exactly ω = 0 is a parity node: the slope vanishes identically and
    // the evaluation must refuse rather than divide by zero.
    let mut dead = f64::NAN;
    let status = unsafe { magfreq_ghz_precision(handle, 32.0, 0.0, 0.7, &mut dead) };
    assert_eq!(status, MagfreqStatus::DegenerateSignal);
    assert!(dead.is_nan());
    unsafe { magfreq_noise_free(handle) };
}

#[test]
fn optimizer_matches_the_library_bitwise() {
    let (gamma, omega, n) = (1.0, 0.3, 100.0);
    let handle = noise_handle(gamma, 1.0, 0.0, 0.0);
    let mut out = MagfreqOptimum {
        t_star: f64::NAN,
        mu_star: f64::NAN,
        msqe_times_t: f64::NAN,
        evaluations: 0,
        converged: -1,
    };
    let status =
        unsafe { magfreq_optimize(handle, n, MAGFREQ_GEOMETRY_SCENARIO_B, omega, &mut out) };
    assert_eq!(status, MagfreqStatus::Ok);

    let noise = NoiseModel::transversal(gamma).unwrap();
    let domain = SearchDomain::default_for(gamma).unwrap();
    let direct = optimizer::optimize(n, Geometry::ScenarioB, &noise, omega, &domain).unwrap();
    assert_eq!(out.t_star, direct.t_star);
    assert_eq!(out.mu_star, direct.mu_star);
    assert_eq!(out.msqe_times_t, direct.msqe_times_t);
    assert_eq!(out.evaluations, direct.evaluations as u64);
    assert_eq!(out.converged, i32::from(direct.converged));

    // The explicit-domain variant agrees with the same domain spelled out.
    let mut narrow = out;
    let status = unsafe {
        magfreq_optimize_in(
            handle,
            n,
            MAGFREQ_GEOMETRY_SCENARIO_B,
            omega,
            1e-6,
            1e2,
            1e-10,
            1.5,
            32,
            32,
            &mut narrow,
        )
    };
    assert_eq!(status, MagfreqStatus::Ok);
    assert_eq!(narrow.t_star, direct.t_star);
    assert_eq!(narrow.msqe_times_t, direct.msqe_times_t);
    unsafe { magfreq_noise_free(handle) };
}

#[test]
fn schedules_match_and_validate() {
    let (mut t, mut mu) = (f64::NAN, f64::NAN);
    assert_eq!(
        unsafe { magfreq_schedule_b(1e10, 0.1, 1.0, &mut t, &mut mu) },
        MagfreqStatus::Ok
    );
    assert_eq!((t, mu), optimizer::schedule_b(1e10, 0.1, 1.0).unwrap());

    assert_eq!(
        unsafe { magfreq_schedule_a(1e8, 2.0, 1.0, 1.0, &mut t, &mut mu) },
        MagfreqStatus::Ok
    );
    assert_eq!((t, mu), optimizer::schedule_a(1e8, 2.0, 1.0, 1.0).unwrap());

    // The power-law schedule needs s > 1.
    assert_eq!(
        unsafe { magfreq_schedule_a(1e8, 1.0, 1.0, 1.0, &mut t, &mut mu) },
        MagfreqStatus::InvalidParameter
    );
}

#[test]
fn squeezing_conversions_roundtrip_and_bound() {
    let n = 1e11;
    let mut mu = f64::NAN;
    assert_eq!(
        unsafe { magfreq_mu_from_db(n, -8.0, &mut mu) },
        MagfreqStatus::Ok
    );
    let mut db = f64::NAN;
    assert_eq!(
        unsafe { magfreq_squeezing_db(n, mu, &mut db) },
        MagfreqStatus::Ok
    );
    // The inversion bisects to a relative μ tolerance, so the roundtrip
    // closes to ~1e-6 dB, not to machine precision.
    assert!((db + 8.0).abs() < 1e-5, "roundtrip gave {db} dB");

    // −60 dB is below what 100 spins can reach.
    let status = unsafe { magfreq_mu_from_db(100.0, -60.0, &mut mu) };
    assert_eq!(status, MagfreqStatus::Unachievable);
}

#[test]
fn bounds_and_constants_match() {
    assert_eq!(magfreq_kappa(), ghz::kappa_opt());

    let (mut gamma, mut epsilon) = (f64::NAN, f64::NAN);
    assert_eq!(
        unsafe { magfreq_depolarization_mapping(1.0, 0.03, &mut gamma, &mut epsilon) },
        MagfreqStatus::Ok
    );
    let spec = bounds::depolarization_mapping(1.0, 0.03).unwrap();
    assert_eq!(gamma, spec.gamma);
    assert_eq!(epsilon, spec.epsilon);
    // 2γε = 8/(3T₁) exactly, independent of T₂.
    assert!((2.0 * gamma * epsilon - 8.0 / 3.0).abs() < 1e-12);
    // Relaxation times must be positive.
    assert_eq!(
        unsafe { magfreq_depolarization_mapping(1.0, -0.5, &mut gamma, &mut epsilon) },
        MagfreqStatus::InvalidParameter
    );

    let mut floor = f64::NAN;
    assert_eq!(
        unsafe { magfreq_mixed_noise_floor(1.0, 0.05, &mut floor) },
        MagfreqStatus::Ok
    );
    assert_eq!(floor, 2.0 * 0.05 * 1.0);

    let mut crossing = f64::NAN;
    assert_eq!(
        unsafe { magfreq_crossover_estimate(1.0, 0.45, 0.05, &mut crossing) },
        MagfreqStatus::Ok
    );
    assert_eq!(crossing, bounds::crossover_estimate(1.0, 0.45, 0.05).unwrap());
    assert!((crossing - 81.0).abs() < 1e-9);

    let mut m = f64::NAN;
    assert_eq!(
        unsafe { magfreq_m_quantity(64.0, 2.0, 0.0, 0.8, 0.1, &mut m) },
        MagfreqStatus::Ok
    );
    assert_eq!(m, bounds::m_quantity(64.0, 2.0, 0.0, 0.8, 0.1).unwrap());
}

#[test]
fn null_pointers_and_bad_codes_are_rejected() {
    let mut out = MagfreqPrecision {
        msqe_times_t: f64::NAN,
        signal_derivative: f64::NAN,
        variance: f64::NAN,
        gain_vs_css: f64::NAN,
    };
    // Null handle.
    let status =
        unsafe { magfreq_precision(ptr::null(), 100.0, 0, 0.01, 0.1, 0.5, &mut out) };
    assert_eq!(status, MagfreqStatus::InvalidParameter);

    // Null out-pointer.
    assert_eq!(
        unsafe { magfreq_noise_new(1.0, 1.0, 0.0, 0.0, ptr::null_mut()) },
        MagfreqStatus::InvalidParameter
    );
    let mut value = f64::NAN;
    assert_eq!(
        unsafe { magfreq_squeezing_db(100.0, 0.01, ptr::null_mut()) },
        MagfreqStatus::InvalidParameter
    );

    let handle = noise_handle(1.0, 1.0, 0.0, 0.0);
    // Unknown geometry code.
    let status = unsafe { magfreq_precision(handle, 100.0, 9, 0.01, 0.1, 0.5, &mut out) };
    assert_eq!(status, MagfreqStatus::InvalidParameter);
    // GHZ probes are rejected by the moment-based readout path.
    let status = unsafe {
        magfreq_precision(handle, 100.0, MAGFREQ_GEOMETRY_GHZ, 0.0, 0.1, 0.5, &mut out)
    };
    assert_eq!(status, MagfreqStatus::InvalidParameter);
    // Out-parameters stay untouched on failure.
    assert!(out.msqe_times_t.is_nan());
    assert_eq!(
        unsafe { magfreq_ghz_precision(handle, 8.0, 0.1, 0.5, ptr::null_mut()) },
        MagfreqStatus::InvalidParameter
    );
    assert_eq!(
        unsafe { magfreq_m_quantity(64.0, 2.0, 0.0, 0.8, 0.1, &mut value) },
        MagfreqStatus::Ok
    );
    unsafe { magfreq_noise_free(handle) };
}

#[test]
fn oracle_self_check_passes() {
    assert_eq!(magfreq_self_check(0), MagfreqStatus::Ok);
}

#[test]
fn generated_header_is_complete() {
    let header_path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/magfreq.h");
    let header = std::fs::read_to_string(header_path).expect("build script wrote the header");
    for needle in [
        "#ifndef MAGFREQ_H",
        "typedef struct MagfreqNoise MagfreqNoise;",
        "MAGFREQ_STATUS_DEGENERATE_SIGNAL",
        "MAGFREQ_GEOMETRY_SCENARIO_B",
        "magfreq_noise_new",
        "magfreq_precision",
        "magfreq_ghz_precision",
        "magfreq_optimize",
        "magfreq_schedule_b",
        "magfreq_mu_from_db",
        "magfreq_depolarization_mapping",
        "magfreq_self_check",
        "magfreq_kappa",
    ] {
        assert!(header.contains(needle), "header is missing `{needle}`");
    }
}
