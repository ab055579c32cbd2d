//! C interface to `qrandomness`.
//!
//! States and bases cross the boundary as opaque handles created by the
//! `*_new` functions and released with the matching `*_free`. Matrices are
//! passed as separate real and imaginary arrays of `dim * dim` doubles in
//! row-major order. Every fallible call returns a [`QrStatus`]; on failure
//! [`qr_last_error_message`] describes the problem.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qrandomness::discord::verify_gap;
use qrandomness::locking::{locking_report, EncodingScenario};
use qrandomness::qstate::{CMatrix, C64};
use qrandomness::randomness::{r_classical, r_quantum};
use qrandomness::{Basis, DensityMatrix, Error, OptimizerConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrStatus {
    Ok = 0,
    NullPointer = 1,
    NotHermitian = 2,
    NotPsd = 3,
    TraceNotOne = 4,
    NotNormalized = 5,
    BasisNotOrthonormal = 6,
    DimMismatch = 7,
    InvalidConfig = 8,
    InvalidValue = 9,
    Panic = 10,
}

impl From<&Error> for QrStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NotHermitian { .. } => QrStatus::NotHermitian,
            Error::NotPsd { .. } => QrStatus::NotPsd,
            Error::TraceNotOne { .. } => QrStatus::TraceNotOne,
            Error::NotNormalized { .. } => QrStatus::NotNormalized,
            Error::BasisNotOrthonormal { .. } => QrStatus::BasisNotOrthonormal,
            Error::DimMismatch(_) => QrStatus::DimMismatch,
            Error::InvalidConfig(_) => QrStatus::InvalidConfig,
            _ => QrStatus::InvalidValue,
        }
    }
}

/// Opaque density matrix.
pub struct QrDensityMatrix(DensityMatrix);

/// Opaque orthonormal basis.
pub struct QrBasis(Basis);

/// Optimizer settings. `ensemble_size == 0` selects the default `rank^2`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QrOptimizerConfig {
    pub restarts: usize,
    pub ensemble_size: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl From<&QrOptimizerConfig> for OptimizerConfig {
    fn from(c: &QrOptimizerConfig) -> Self {
        OptimizerConfig {
            restarts: c.restarts,
            ensemble_size: (c.ensemble_size > 0).then_some(c.ensemble_size),
            max_iters: c.max_iters,
            tol: c.tol,
            seed: c.seed,
        }
    }
}

impl From<OptimizerConfig> for QrOptimizerConfig {
    fn from(c: OptimizerConfig) -> Self {
        QrOptimizerConfig {
            restarts: c.restarts,
            ensemble_size: c.ensemble_size.unwrap_or(0),
            max_iters: c.max_iters,
            tol: c.tol,
            seed: c.seed,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QrGapCheck {
    pub r_classical: f64,
    pub r_quantum: f64,
    pub discord: f64,
    pub residual: f64,
    pub converged: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QrLockingReport {
    pub key_after_measurement: f64,
    pub key_before_measurement: f64,
    pub locking_advantage: f64,
    pub accessible_info_with_key: f64,
    pub message_entropy: f64,
    pub residual: f64,
    pub converged: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), QrStatus>) -> QrStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QrStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            QrStatus::Panic
        }
    }
}

fn fail(e: Error) -> QrStatus {
    set_error(e.to_string());
    QrStatus::from(&e)
}

fn null(what: &str) -> QrStatus {
    set_error(format!("{what} is null"));
    QrStatus::NullPointer
}

unsafe fn read_matrix(dim: usize, re: *const f64, im: *const f64) -> Result<CMatrix, QrStatus> {
    if re.is_null() {
        return Err(null("re"));
    }
    if dim == 0 {
        set_error("dimension must be positive");
        return Err(QrStatus::InvalidValue);
    }
    let n = dim * dim;
    let re = std::slice::from_raw_parts(re, n);
    let im = (!im.is_null()).then(|| std::slice::from_raw_parts(im, n));
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        C64::new(re[r * dim + c], im.map_or(0.0, |im| im[r * dim + c]))
    }))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, QrStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, QrStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message for the most recent failure on this thread; empty after success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn qr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn qr_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}

/// Validates a `dim x dim` density matrix. `im` may be null for a real matrix.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `dim * dim` doubles; `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qr_density_matrix_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out_state: *mut *mut QrDensityMatrix,
) -> QrStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        *slot = std::ptr::null_mut();
        let rho = DensityMatrix::new(read_matrix(dim, re, im)?).map_err(fail)?;
        *slot = Box::into_raw(Box::new(QrDensityMatrix(rho)));
        Ok(())
    })
}

/// # Safety
/// `state` must come from [`qr_density_matrix_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qr_density_matrix_free(state: *mut QrDensityMatrix) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qr_density_matrix_dim(state: *const QrDensityMatrix) -> usize {
    state.as_ref().map_or(0, |s| s.0.dim())
}

/// Basis whose vectors are the columns of the given unitary.
///
/// # Safety
/// As for [`qr_density_matrix_new`].
#[no_mangle]
pub unsafe extern "C" fn qr_basis_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out_basis: *mut *mut QrBasis,
) -> QrStatus {
    guard(|| {
        let slot = out(out_basis, "out_basis")?;
        *slot = std::ptr::null_mut();
        let basis = Basis::new(read_matrix(dim, re, im)?).map_err(fail)?;
        *slot = Box::into_raw(Box::new(QrBasis(basis)));
        Ok(())
    })
}

/// # Safety
/// `out_basis` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qr_basis_computational(
    dim: usize,
    out_basis: *mut *mut QrBasis,
) -> QrStatus {
    guard(|| {
        let slot = out(out_basis, "out_basis")?;
        *slot = std::ptr::null_mut();
        if dim == 0 {
            set_error("dimension must be positive");
            return Err(QrStatus::InvalidValue);
        }
        *slot = Box::into_raw(Box::new(QrBasis(Basis::computational(dim))));
        Ok(())
    })
}

/// # Safety
/// `basis` must come from a `qr_basis_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qr_basis_free(basis: *mut QrBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

#[no_mangle]
pub extern "C" fn qr_optimizer_config_default() -> QrOptimizerConfig {
    OptimizerConfig::default().into()
}

#[no_mangle]
pub extern "C" fn qr_optimizer_config_discord() -> QrOptimizerConfig {
    OptimizerConfig::discord().into()
}

/// Relative entropy of coherence, in bits.
///
/// # Safety
/// Handles must be live; `out_value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qr_r_quantum(
    state: *const QrDensityMatrix,
    basis: *const QrBasis,
    out_value: *mut f64,
) -> QrStatus {
    guard(|| {
        let (rho, basis) = (handle(state, "state")?, handle(basis, "basis")?);
        let slot = out(out_value, "out_value")?;
        *slot = r_quantum(&rho.0, &basis.0).map_err(fail)?.value;
        Ok(())
    })
}

/// Coherence of formation, in bits. `config` may be null for defaults.
/// `out_converged` may be null.
///
/// # Safety
/// Handles must be live; `config` null or valid; `out_value` valid.
#[no_mangle]
pub unsafe extern "C" fn qr_r_classical(
    state: *const QrDensityMatrix,
    basis: *const QrBasis,
    config: *const QrOptimizerConfig,
    out_value: *mut f64,
    out_converged: *mut bool,
) -> QrStatus {
    guard(|| {
        let (rho, basis) = (handle(state, "state")?, handle(basis, "basis")?);
        let cfg = config
            .as_ref()
            .map_or_else(OptimizerConfig::default, Into::into);
        let slot = out(out_value, "out_value")?;
        let res = r_classical(&rho.0, &basis.0, &cfg).map_err(fail)?;
        *slot = res.value;
        if let Some(c) = out_converged.as_mut() {
            *c = res.converged();
        }
        Ok(())
    })
}

/// Computes both measures and the discord of the post-measurement state.
/// Null configs select the defaults.
///
/// # Safety
/// Handles must be live; configs null or valid; `out_check` valid.
#[no_mangle]
pub unsafe extern "C" fn qr_verify_gap(
    state: *const QrDensityMatrix,
    basis: *const QrBasis,
    roof_config: *const QrOptimizerConfig,
    discord_config: *const QrOptimizerConfig,
    out_check: *mut QrGapCheck,
) -> QrStatus {
    guard(|| {
        let (rho, basis) = (handle(state, "state")?, handle(basis, "basis")?);
        let roof = roof_config
            .as_ref()
            .map_or_else(OptimizerConfig::default, Into::into);
        let disc = discord_config
            .as_ref()
            .map_or_else(OptimizerConfig::discord, Into::into);
        let slot = out(out_check, "out_check")?;
        let g = verify_gap(&rho.0, &basis.0, &roof, &disc).map_err(fail)?;
        *slot = QrGapCheck {
            r_classical: g.r_classical,
            r_quantum: g.r_quantum,
            discord: g.discord,
            residual: g.residual,
            converged: g.converged,
        };
        Ok(())
    })
}

/// Key sizes of the BB84 encoding. Null configs select the defaults.
///
/// # Safety
/// Configs null or valid; `out_report` valid.
#[no_mangle]
pub unsafe extern "C" fn qr_bb84_report(
    roof_config: *const QrOptimizerConfig,
    discord_config: *const QrOptimizerConfig,
    out_report: *mut QrLockingReport,
) -> QrStatus {
    guard(|| {
        let roof = roof_config
            .as_ref()
            .map_or_else(OptimizerConfig::default, Into::into);
        let disc = discord_config
            .as_ref()
            .map_or_else(OptimizerConfig::discord, Into::into);
        let slot = out(out_report, "out_report")?;
        let r = locking_report(&EncodingScenario::bb84(), &roof, &disc).map_err(fail)?;
        *slot = QrLockingReport {
            key_after_measurement: r.key_after_measurement,
            key_before_measurement: r.key_before_measurement,
            locking_advantage: r.locking_advantage,
            accessible_info_with_key: r.accessible_info_with_key,
            message_entropy: r.message_entropy,
            residual: r.residual,
            converged: r.converged,
        };
        Ok(())
    })
}
