use std::ffi::CStr;
use std::ptr;

use qrandomness_ffi::*;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qr_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn state(dim: usize, re: &[f64], im: Option<&[f64]>) -> (QrStatus, *mut QrDensityMatrix) {
    let mut out = ptr::null_mut();
    let status = unsafe {
        qr_density_matrix_new(
            dim,
            re.as_ptr(),
            im.map_or(ptr::null(), <[f64]>::as_ptr),
            &mut out,
        )
    };
    (status, out)
}

fn z(dim: usize) -> *mut QrBasis {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { qr_basis_computational(dim, &mut out) },
        QrStatus::Ok
    );
    out
}

fn quick() -> QrOptimizerConfig {
    QrOptimizerConfig {
        restarts: 4,
        ..qr_optimizer_config_default()
    }
}

#[test]
fn plus_state_measures() {
    let (status, rho) = state(2, &[0.5, 0.5, 0.5, 0.5], None);
    assert_eq!(status, QrStatus::Ok);
    assert_eq!(unsafe { qr_density_matrix_dim(rho) }, 2);
    let basis = z(2);
    let mut rq = f64::NAN;
    let mut rc = f64::NAN;
    let mut converged = false;
    unsafe {
        assert_eq!(qr_r_quantum(rho, basis, &mut rq), QrStatus::Ok);
        assert_eq!(
            qr_r_classical(rho, basis, ptr::null(), &mut rc, &mut converged),
            QrStatus::Ok
        );
    }
    assert!((rq - 1.0).abs() < 1e-12);
    assert!((rc - 1.0).abs() < 1e-12);
    assert!(converged);
    unsafe {
        qr_basis_free(basis);
        qr_density_matrix_free(rho);
    }
}

#[test]
fn complex_state_and_custom_basis() {
    // |psi> = (|0> + i|1>)/sqrt2 is unbiased in the X basis as well
    let (status, rho) = state(2, &[0.5, 0.0, 0.0, 0.5], Some(&[0.0, -0.5, 0.5, 0.0]));
    assert_eq!(status, QrStatus::Ok, "{}", last_error());
    let mut x = ptr::null_mut();
    assert_eq!(
        unsafe { qr_basis_new(2, [H, H, H, -H].as_ptr(), ptr::null(), &mut x) },
        QrStatus::Ok
    );
    let mut rq = 0.0;
    assert_eq!(unsafe { qr_r_quantum(rho, x, &mut rq) }, QrStatus::Ok);
    assert!((rq - 1.0).abs() < 1e-12);
    unsafe {
        qr_basis_free(x);
        qr_density_matrix_free(rho);
    }
}

#[test]
fn validation_errors_map_to_status_codes() {
    let (status, rho) = state(2, &[1.1, 0.0, 0.0, -0.1], None);
    assert_eq!(status, QrStatus::NotPsd);
    assert!(rho.is_null());
    assert!(!last_error().is_empty());

    let (status, _) = state(2, &[0.5, 0.2, 0.0, 0.5], None);
    assert_eq!(status, QrStatus::NotHermitian);
    let (status, _) = state(2, &[0.5, 0.0, 0.0, 0.6], None);
    assert_eq!(status, QrStatus::TraceNotOne);
    let (status, _) = state(0, &[], None);
    assert_eq!(status, QrStatus::InvalidValue);

    let mut b = ptr::null_mut();
    assert_eq!(
        unsafe { qr_basis_new(2, [1.0, 1.0, 0.0, 1.0].as_ptr(), ptr::null(), &mut b) },
        QrStatus::BasisNotOrthonormal
    );

    let (_, rho) = state(2, &[1.0, 0.0, 0.0, 0.0], None);
    let b3 = z(3);
    let mut v = 0.0;
    assert_eq!(
        unsafe { qr_r_quantum(rho, b3, &mut v) },
        QrStatus::DimMismatch
    );
    let bad = QrOptimizerConfig {
        tol: 0.0,
        ..quick()
    };
    let (_, mixed) = state(2, &[0.7, 0.2, 0.2, 0.3], None);
    let b2 = z(2);
    assert_eq!(
        unsafe { qr_r_classical(mixed, b2, &bad, &mut v, ptr::null_mut()) },
        QrStatus::InvalidConfig
    );
    unsafe {
        qr_basis_free(b2);
        qr_basis_free(b3);
        qr_density_matrix_free(rho);
        qr_density_matrix_free(mixed);
    }
}

#[test]
fn null_pointers_are_rejected() {
    let mut v = 0.0;
    assert_eq!(
        unsafe { qr_r_quantum(ptr::null(), ptr::null(), &mut v) },
        QrStatus::NullPointer
    );
    assert_eq!(
        unsafe { qr_density_matrix_new(2, ptr::null(), ptr::null(), ptr::null_mut()) },
        QrStatus::NullPointer
    );
    assert_eq!(
        unsafe { qr_bb84_report(ptr::null(), ptr::null(), ptr::null_mut()) },
        QrStatus::NullPointer
    );
    assert_eq!(unsafe { qr_density_matrix_dim(ptr::null()) }, 0);
    unsafe {
        qr_density_matrix_free(ptr::null_mut());
        qr_basis_free(ptr::null_mut());
    }
}

#[test]
fn gap_and_bb84() {
    let (_, rho) = state(2, &[0.7, 0.2, 0.2, 0.3], None);
    let basis = z(2);
    let mut check = QrGapCheck::default();
    assert_eq!(
        unsafe { qr_verify_gap(rho, basis, ptr::null(), ptr::null(), &mut check) },
        QrStatus::Ok
    );
    assert!(check.residual <= 2e-3 && check.converged, "{check:?}");
    assert!(check.r_classical >= check.r_quantum);

    let mut report = QrLockingReport::default();
    assert_eq!(
        unsafe { qr_bb84_report(ptr::null(), ptr::null(), &mut report) },
        QrStatus::Ok
    );
    assert!((report.key_after_measurement - 1.0).abs() < 1e-9);
    assert!((report.key_before_measurement - 1.5).abs() < 1e-3);
    assert!((report.locking_advantage - 0.5).abs() < 2e-3);
    assert_eq!(report.message_entropy, 2.0);
    unsafe {
        qr_basis_free(basis);
        qr_density_matrix_free(rho);
    }
}

#[test]
fn config_defaults() {
    let d = qr_optimizer_config_default();
    assert_eq!((d.restarts, d.ensemble_size), (32, 0));
    assert_eq!(qr_optimizer_config_discord().restarts, 64);
    let v = unsafe { CStr::from_ptr(qr_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/qrandomness.h");
    for name in [
        "qr_last_error_message",
        "qr_version",
        "qr_density_matrix_new",
        "qr_density_matrix_free",
        "qr_density_matrix_dim",
        "qr_basis_new",
        "qr_basis_computational",
        "qr_basis_free",
        "qr_optimizer_config_default",
        "qr_optimizer_config_discord",
        "qr_r_quantum",
        "qr_r_classical",
        "qr_verify_gap",
        "qr_bb84_report",
        "typedef struct QrDensityMatrix QrDensityMatrix",
        "QR_STATUS_NOT_PSD = 3",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
