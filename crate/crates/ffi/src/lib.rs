//! C ABI over `qchannel`.
//!
//! Handles are opaque heap pointers released with the matching `*_free`.
//! Every fallible call returns a [`QcStatus`]; the message for the most
//! recent failure on the calling thread is available from
//! [`qc_last_error`]. Matrices cross the boundary as separate row-major
//! real and imaginary `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qchannel::channels::KrausChannel;
use qchannel::correction::{construct_corrector, CorrectionResult};
use qchannel::info::{dpi_report, report};
use qchannel::io::{ChannelSpec, StateSpec};
use qchannel::linalg::{c64, ComplexMatrix};
use qchannel::{DensityOperator, Error};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvalidState = 4,
    InvalidChannel = 5,
    Inconsistent = 6,
    NotCorrectable = 7,
    Panic = 8,
}

/// Density operator handle.
pub struct QcDensity(DensityOperator);

/// Kraus channel handle.
pub struct QcChannel(KrausChannel);

/// Result of a correction attempt.
pub struct QcCorrection(CorrectionResult);

/// Information-theoretic report for one channel.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QcReport {
    pub input_entropy: f64,
    pub output_entropy: f64,
    pub entanglement_fidelity: f64,
    pub entropy_exchange: f64,
    pub coherent_information: f64,
    pub fano_lhs: f64,
    pub fano_margin: f64,
}

/// Quantities along a two-stage process.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QcDpiReport {
    pub input_entropy: f64,
    pub ie_stage1: f64,
    pub ie_both: f64,
    pub se_stage1: f64,
    pub se_both: f64,
    pub chain_holds: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> QcStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::NotSquare { .. } | Error::RankOutOfRange { .. } => {
            QcStatus::DimensionMismatch
        }
        Error::InvalidDensity(_) | Error::NotNormalized(_) | Error::EmptyEnsemble => QcStatus::InvalidState,
        Error::KrausNotNormalized(_) | Error::NotUnitary(_) => QcStatus::InvalidChannel,
        Error::Inconsistent { .. } | Error::ToleranceInconsistency { .. } => QcStatus::Inconsistent,
        _ => QcStatus::InvalidArgument,
    }
}

struct Failure(QcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QcStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QcStatus::Panic
        }
    }
}

unsafe fn read_matrix(re: *const f64, im: *const f64, rows: usize, cols: usize) -> Result<ComplexMatrix, Failure> {
    if re.is_null() {
        return Err(null("re"));
    }
    let n = rows * cols;
    let re = std::slice::from_raw_parts(re, n);
    let im = if im.is_null() { None } else { Some(std::slice::from_raw_parts(im, n)) };
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        let k = i * cols + j;
        c64(re[k], im.map_or(0.0, |v| v[k]))
    }))
}

unsafe fn write_matrix(m: &ComplexMatrix, re: *mut f64, im: *mut f64) -> Result<(), Failure> {
    if re.is_null() || im.is_null() {
        return Err(null("output buffer"));
    }
    let cols = m.ncols();
    for i in 0..m.nrows() {
        for j in 0..cols {
            *re.add(i * cols + j) = m[(i, j)].re;
            *im.add(i * cols + j) = m[(i, j)].im;
        }
    }
    Ok(())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null("spec"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(QcStatus::InvalidArgument, "spec is not UTF-8".into()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message describing the last failure on this thread, or null.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Density operator from `dim × dim` row-major arrays. `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `dim * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn qc_density_new(
    re: *const f64,
    im: *const f64,
    dim: usize,
    out: *mut *mut QcDensity,
) -> QcStatus {
    guard(|| {
        let m = read_matrix(re, im, dim, dim)?;
        put(out, QcDensity(DensityOperator::on_system(m)?))
    })
}

/// Maximally mixed state `I/dim`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_density_maxmixed(dim: usize, out: *mut *mut QcDensity) -> QcStatus {
    guard(|| put(out, QcDensity(DensityOperator::maximally_mixed(dim)?)))
}

/// State from a CLI-style spec such as `maxmixed:2` or `density:@rho.json`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_density_from_spec(spec: *const c_char, out: *mut *mut QcDensity) -> QcStatus {
    guard(|| {
        let s = read_str(spec)?;
        let rho = StateSpec::parse(s)
            .and_then(|p| p.resolve())
            .map_err(|e| Failure(QcStatus::InvalidArgument, e.to_string()))?;
        put(out, QcDensity(rho))
    })
}

/// Dimension of the state, 0 for a null handle.
///
/// # Safety
/// `rho` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_density_dim(rho: *const QcDensity) -> usize {
    rho.as_ref().map_or(0, |r| r.0.dim())
}

/// Von Neumann entropy in bits.
///
/// # Safety
/// `rho` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_density_entropy(rho: *const QcDensity, out: *mut f64) -> QcStatus {
    guard(|| {
        let r = get(rho, "rho")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = r.0.entropy();
        Ok(())
    })
}

/// # Safety
/// `rho` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qc_density_free(rho: *mut QcDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Channel from `count` operators of size `dim × dim`, packed one after
/// another in row-major order. `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `count * dim * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_new(
    re: *const f64,
    im: *const f64,
    dim: usize,
    count: usize,
    out: *mut *mut QcChannel,
) -> QcStatus {
    guard(|| {
        let block = dim * dim;
        let ops = (0..count)
            .map(|k| read_matrix(re.wrapping_add(k * block), if im.is_null() { im } else { im.wrapping_add(k * block) }, dim, dim))
            .collect::<Result<Vec<_>, _>>()?;
        put(out, QcChannel(KrausChannel::new(ops)?))
    })
}

/// Channel from a CLI-style spec such as `dephasing:0.25` or `kraus:@dir`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_from_spec(spec: *const c_char, out: *mut *mut QcChannel) -> QcStatus {
    guard(|| {
        let s = read_str(spec)?;
        let ch = ChannelSpec::parse(s)
            .and_then(|p| p.resolve())
            .map_err(|e| Failure(QcStatus::InvalidArgument, e.to_string()))?;
        put(out, QcChannel(ch))
    })
}

/// Input dimension, 0 for a null handle.
///
/// # Safety
/// `ch` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_dim(ch: *const QcChannel) -> usize {
    ch.as_ref().map_or(0, |c| c.0.dim())
}

/// Number of Kraus operators, 0 for a null handle.
///
/// # Safety
/// `ch` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_len(ch: *const QcChannel) -> usize {
    ch.as_ref().map_or(0, |c| c.0.len())
}

/// Copy operator `index` into `dim * dim` row-major buffers.
///
/// # Safety
/// `ch` must be a live handle; `re` and `im` must hold `dim * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_operator(ch: *const QcChannel, index: usize, re: *mut f64, im: *mut f64) -> QcStatus {
    guard(|| {
        let c = get(ch, "channel")?;
        let op = c.0.operators().get(index).ok_or_else(|| {
            Failure(QcStatus::InvalidArgument, format!("operator index {index} out of range ({} operators)", c.0.len()))
        })?;
        write_matrix(op, re, im)
    })
}

/// # Safety
/// `ch` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_free(ch: *mut QcChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Entanglement fidelity, entropy exchange and coherent information.
///
/// # Safety
/// Handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_analyze(rho: *const QcDensity, ch: *const QcChannel, out: *mut QcReport) -> QcStatus {
    guard(|| {
        let r = report(&get(rho, "rho")?.0, &get(ch, "channel")?.0)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = QcReport {
            input_entropy: r.input_entropy,
            output_entropy: r.output_entropy,
            entanglement_fidelity: r.entanglement_fidelity,
            entropy_exchange: r.entropy_exchange,
            coherent_information: r.coherent_information,
            fano_lhs: r.fano_lhs,
            fano_margin: r.fano_margin,
        };
        Ok(())
    })
}

/// Coherent information before and after a second stage `ch2 ∘ ch1`.
///
/// # Safety
/// Handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_dpi(
    rho: *const QcDensity,
    ch1: *const QcChannel,
    ch2: *const QcChannel,
    out: *mut QcDpiReport,
) -> QcStatus {
    guard(|| {
        let d = dpi_report(&get(rho, "rho")?.0, &get(ch1, "ch1")?.0, &get(ch2, "ch2")?.0)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = QcDpiReport {
            input_entropy: d.input_entropy,
            ie_stage1: d.ie_stage1,
            ie_both: d.ie_both,
            se_stage1: d.se_stage1,
            se_both: d.se_both,
            chain_holds: d.chain_holds(),
        };
        Ok(())
    })
}

/// Decide correctability and build a recovery channel when possible.
///
/// A refusal is not an error: the call returns `Ok` and
/// [`qc_correction_is_correctable`] reports false.
///
/// # Safety
/// Handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_correct(
    rho: *const QcDensity,
    ch: *const QcChannel,
    tol: f64,
    out: *mut *mut QcCorrection,
) -> QcStatus {
    guard(|| {
        let r = construct_corrector(&get(rho, "rho")?.0, &get(ch, "channel")?.0, tol)?;
        put(out, QcCorrection(r))
    })
}

/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_correction_is_correctable(c: *const QcCorrection) -> bool {
    c.as_ref().is_some_and(|c| c.0.correctable)
}

/// `S(ρ) − I_e`; NaN for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_correction_deficit(c: *const QcCorrection) -> f64 {
    c.as_ref().map_or(f64::NAN, |c| c.0.deficit)
}

/// `‖ρ^{RE'} − ρ^R ⊗ ρ^{E'}‖_F`; NaN for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_correction_product_defect(c: *const QcCorrection) -> f64 {
    c.as_ref().map_or(f64::NAN, |c| c.0.product_defect)
}

/// Entanglement fidelity of recovery after noise.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_correction_verified_fidelity(c: *const QcCorrection, out: *mut f64) -> QcStatus {
    guard(|| {
        let c = get(c, "correction")?;
        let f = c.0.verified_fidelity.ok_or_else(|| {
            Failure(QcStatus::NotCorrectable, format!("not correctable (deficit {:.6})", c.0.deficit))
        })?;
        *out.as_mut().ok_or_else(|| null("out"))? = f;
        Ok(())
    })
}

/// New channel handle holding a copy of the recovery operators.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_correction_corrector(c: *const QcCorrection, out: *mut *mut QcChannel) -> QcStatus {
    guard(|| {
        let c = get(c, "correction")?;
        let ch = c.0.corrector.clone().ok_or_else(|| {
            Failure(QcStatus::NotCorrectable, format!("not correctable (deficit {:.6})", c.0.deficit))
        })?;
        put(out, QcChannel(ch))
    })
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qc_correction_free(c: *mut QcCorrection) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}
