//! C ABI over the `slognorm` crate.
//!
//! Matrices and systems are opaque heap handles created by `sln_*_new` and
//! released with the matching `sln_*_free`. Every fallible call returns a
//! [`SlnStatus`]; on failure a message is available from
//! [`sln_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use slognorm::sdesim::{self, Scheme, SimConfig};
use slognorm::slognorm::{default_h_seq, nu_definitional, nu_direct, NuEstimate};
use slognorm::{Complex64, ComplexMatrix, Error, McConfig, NormKind, SdeSystem};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    NonFinite = 4,
    NotHermitian = 5,
    Convergence = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlnNorm {
    One = 1,
    Two = 2,
    Inf = 3,
}

impl From<SlnNorm> for NormKind {
    fn from(p: SlnNorm) -> Self {
        match p {
            SlnNorm::One => NormKind::One,
            SlnNorm::Two => NormKind::Two,
            SlnNorm::Inf => NormKind::Inf,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlnScheme {
    EulerMaruyama = 0,
    Milstein = 1,
}

/// A Monte Carlo estimate of the stochastic logarithmic norm.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SlnEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl From<&NuEstimate> for SlnEstimate {
    fn from(e: &NuEstimate) -> Self {
        Self {
            value: e.value,
            std_error: e.std_error,
            samples: e.samples,
        }
    }
}

/// Opaque square complex matrix.
pub struct SlnMatrix(ComplexMatrix);

/// Opaque linear SDE system.
pub struct SlnSystem(SdeSystem);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SlnStatus {
    match e {
        Error::Dimension(_) | Error::NotSquare { .. } => SlnStatus::Dimension,
        Error::NonFinite { .. } => SlnStatus::NonFinite,
        Error::NotHermitian { .. } => SlnStatus::NotHermitian,
        Error::Convergence { .. } => SlnStatus::Convergence,
        Error::Sample { source, .. } => status_of(source),
        Error::InvalidArgument(_) | Error::TooFewPoints(_) => SlnStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SlnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            SlnStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("null pointer: {what}"));
            SlnStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic");
            SlnStatus::Internal
        }
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

fn invalid(msg: &str) -> Failure {
    Failure::Lib(Error::InvalidArgument(msg.to_string()))
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn sln_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sln_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a rows × cols matrix from row-major real and imaginary parts.
/// `im` may be null for a real matrix.
///
/// # Safety
/// `re` (and `im` when non-null) must point to rows·cols readable doubles;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sln_matrix_new(
    rows: usize,
    cols: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut SlnMatrix,
) -> SlnStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = ptr::null_mut();
        let len = rows.checked_mul(cols).ok_or_else(|| invalid("matrix too large"))?;
        if re.is_null() && len > 0 {
            return Err(Failure::Null("re"));
        }
        let re = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(re, len)
        };
        let data = if im.is_null() || len == 0 {
            re.iter().map(|&x| Complex64::new(x, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
        };
        let m = ComplexMatrix::new(rows, cols, data)?;
        *out = Box::into_raw(Box::new(SlnMatrix(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from [`sln_matrix_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sln_matrix_free(m: *mut SlnMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Logarithmic norm μ_p of a square matrix.
///
/// # Safety
/// `m` must be a live matrix handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sln_mu(m: *const SlnMatrix, p: SlnNorm, out: *mut f64) -> SlnStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = slognorm::mu(&m.0, p.into())?;
        Ok(())
    })
}

/// Builds dX = AX dt + Σⱼ BⱼX dWⱼ from a drift and `channels` diffusion
/// matrices. The matrices are copied; the caller keeps ownership.
///
/// # Safety
/// `drift` must be a live matrix handle; `diffusions` must point to
/// `channels` live handles (or be null when `channels` is 0); `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sln_system_new(
    drift: *const SlnMatrix,
    diffusions: *const *const SlnMatrix,
    channels: usize,
    out: *mut *mut SlnSystem,
) -> SlnStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = ptr::null_mut();
        let a = deref(drift, "drift")?;
        let mut bs = Vec::with_capacity(channels);
        if channels > 0 {
            if diffusions.is_null() {
                return Err(Failure::Null("diffusions"));
            }
            for &b in std::slice::from_raw_parts(diffusions, channels) {
                bs.push(deref(b, "diffusion")?.0.clone());
            }
        }
        let sys = SdeSystem::new(a.0.clone(), bs)?;
        *out = Box::into_raw(Box::new(SlnSystem(sys)));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from [`sln_system_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sln_system_free(s: *mut SlnSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

fn mc_config(samples: u64, seed: u64, workers: usize) -> McConfig {
    McConfig::new(samples, seed).with_workers(workers.max(1))
}

/// Direct Monte Carlo estimate of ν_p^l with antithetic pairs.
///
/// # Safety
/// `sys` must be a live system handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sln_nu_direct(
    sys: *const SlnSystem,
    p: SlnNorm,
    l: u32,
    samples: u64,
    seed: u64,
    workers: usize,
    out: *mut SlnEstimate,
) -> SlnStatus {
    guard(|| {
        let sys = deref(sys, "system")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let est = nu_direct(&sys.0, p.into(), l, &mc_config(samples, seed, workers))?;
        *out = SlnEstimate::from(&est);
        Ok(())
    })
}

/// Definitional estimate of ν_p^l on the step ladder h0·2⁻ᵏ, k < steps.
/// A non-positive `h0` selects the default starting step.
///
/// # Safety
/// `sys` must be a live system handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sln_nu_definitional(
    sys: *const SlnSystem,
    p: SlnNorm,
    l: u32,
    h0: f64,
    steps: usize,
    samples: u64,
    seed: u64,
    workers: usize,
    out: *mut SlnEstimate,
) -> SlnStatus {
    guard(|| {
        let sys = deref(sys, "system")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let p = NormKind::from(p);
        let h = default_h_seq(&sys.0, p, (h0 > 0.0).then_some(h0), steps);
        let est = nu_definitional(&sys.0, p, l, &h, &mc_config(samples, seed, workers))?;
        *out = SlnEstimate::from(&est);
        Ok(())
    })
}

/// Simulates `paths` trajectories from x0 and writes E‖X‖_p^l and its
/// standard error at the `checkpoints + 1` recording times (including
/// t = 0). Diverged checkpoints are reported as +∞. `x0_im` may be null.
///
/// # Safety
/// `x0_re` (and `x0_im` when non-null) must hold the system dimension in
/// doubles; `moments` and `std_errors` must hold `checkpoints + 1` doubles.
#[no_mangle]
pub unsafe extern "C" fn sln_simulate_moments(
    sys: *const SlnSystem,
    x0_re: *const f64,
    x0_im: *const f64,
    h: f64,
    t_end: f64,
    paths: u64,
    checkpoints: usize,
    scheme: SlnScheme,
    seed: u64,
    p: SlnNorm,
    l: u32,
    workers: usize,
    moments: *mut f64,
    std_errors: *mut f64,
) -> SlnStatus {
    guard(|| {
        let sys = deref(sys, "system")?;
        if x0_re.is_null() {
            return Err(Failure::Null("x0_re"));
        }
        if moments.is_null() || std_errors.is_null() {
            return Err(Failure::Null("output buffer"));
        }
        let n = sys.0.dim();
        let re = std::slice::from_raw_parts(x0_re, n);
        let x0: Vec<Complex64> = if x0_im.is_null() {
            re.iter().map(|&x| Complex64::new(x, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(x0_im, n);
            re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
        };
        let scheme = match scheme {
            SlnScheme::EulerMaruyama => Scheme::EulerMaruyama,
            SlnScheme::Milstein => Scheme::Milstein,
        };
        let cfg = SimConfig::new(h, t_end, paths, checkpoints, scheme, seed)
            .with_moment(p.into(), l)
            .with_workers(workers.max(1));
        let traj = sdesim::simulate_moments(&sys.0, &x0, &cfg)?;
        let k = traj.moments.len();
        std::slice::from_raw_parts_mut(moments, k).copy_from_slice(&traj.moments);
        std::slice::from_raw_parts_mut(std_errors, k).copy_from_slice(&traj.std_errors);
        Ok(())
    })
}

/// Milstein mean-square stability function R(h) for dX = λX dt + μX dW.
#[no_mangle]
pub extern "C" fn sln_milstein_r(h: f64, lambda_re: f64, lambda_im: f64, mu_re: f64, mu_im: f64) -> f64 {
    sdesim::milstein_r(h, Complex64::new(lambda_re, lambda_im), Complex64::new(mu_re, mu_im))
}
