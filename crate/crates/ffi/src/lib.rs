//! C ABI over the `isotonic` library.
//!
//! States are opaque `IsoState` handles created by [`iso_state_new`] and
//! released by [`iso_state_free`]. Every fallible call returns an
//! [`IsoStatus`]; on failure, [`iso_last_error_message`] describes the most
//! recent error on the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use isotonic::observables::{self, StateAnalysis};
use isotonic::{Error, StateLabel};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Index = 3,
    NonConvergence = 4,
    ToleranceNotMet = 5,
    NonFiniteIntegrand = 6,
    NegativeDensity = 7,
    InvalidInput = 8,
    Panic = 9,
}

impl From<&Error> for IsoStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => IsoStatus::Domain,
            Error::Index { .. } => IsoStatus::Index,
            Error::NonConvergence { .. } => IsoStatus::NonConvergence,
            Error::ToleranceNotMet { .. } => IsoStatus::ToleranceNotMet,
            Error::NonFiniteIntegrand { .. } => IsoStatus::NonFiniteIntegrand,
            Error::NegativeDensity { .. } => IsoStatus::NegativeDensity,
            Error::InvalidInput(_) => IsoStatus::InvalidInput,
        }
    }
}

/// Opaque eigenstate handle.
pub struct IsoState {
    analysis: StateAnalysis,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IsoEntropyReport {
    pub s_position: f64,
    pub s_momentum: f64,
    pub s_sum: f64,
    pub bbm_bound: f64,
    pub bbm_satisfied: bool,
    pub entropy_squeezed_position: bool,
    pub entropy_squeezed_momentum: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IsoUncertaintyReport {
    pub mean_x: f64,
    pub var_x: f64,
    /// Derivative route.
    pub var_p: f64,
    /// Momentum-density route with tail extrapolation.
    pub var_p_momentum_space: f64,
    pub product: f64,
    pub heisenberg_bound: f64,
    pub x_squeezed: bool,
    pub p_squeezed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, mapping library errors and panics to status codes.
fn guard<F: FnOnce() -> Result<(), Error>>(f: F) -> IsoStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IsoStatus::Ok,
        Ok(Err(e)) => {
            set_last_error(e.to_string());
            IsoStatus::from(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            IsoStatus::Panic
        }
    }
}

fn null_pointer(what: &str) -> IsoStatus {
    set_last_error(format!("{what} is null"));
    IsoStatus::NullPointer
}

/// Pointer to the message of the last failed call on this thread, or null
/// if the last call succeeded. Valid until the next call into this library
/// from the same thread.
#[no_mangle]
pub extern "C" fn iso_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds the state (m, γ) and writes a new handle to `out`.
///
/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn iso_state_new(m: u32, gamma: f64, out: *mut *mut IsoState) -> IsoStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    guard(|| {
        let analysis = StateAnalysis::new(StateLabel::new(m, gamma)?)?;
        let handle = Box::into_raw(Box::new(IsoState { analysis }));
        // SAFETY: checked non-null above; caller guarantees validity.
        unsafe { out.write(handle) };
        Ok(())
    })
}

/// Releases a handle from [`iso_state_new`]. Null is ignored.
///
/// # Safety
/// `state` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn iso_state_free(state: *mut IsoState) {
    if !state.is_null() {
        // SAFETY: caller passes a handle produced by Box::into_raw.
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Eigenvalue e_m = 2(2m + γ); NaN for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iso_state_eigenvalue(state: *const IsoState) -> f64 {
    // SAFETY: caller contract.
    match unsafe { state.as_ref() } {
        Some(s) => s.analysis.label().eigenvalue(),
        None => f64::NAN,
    }
}

/// ψ(x); x < 0 gives 0.
///
/// # Safety
/// `state` and `out` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn iso_state_psi(state: *const IsoState, x: f64, out: *mut f64) -> IsoStatus {
    // SAFETY: caller contract.
    let (Some(s), false) = (unsafe { state.as_ref() }, out.is_null()) else {
        return null_pointer("state or out");
    };
    guard(|| {
        unsafe { out.write(s.analysis.state().psi(x)) };
        Ok(())
    })
}

/// Normalized momentum amplitude φ(p).
///
/// # Safety
/// `state`, `out_re` and `out_im` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn iso_state_phi(
    state: *const IsoState,
    p: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> IsoStatus {
    // SAFETY: caller contract.
    let Some(s) = (unsafe { state.as_ref() }) else {
        return null_pointer("state");
    };
    if out_re.is_null() || out_im.is_null() {
        return null_pointer("output");
    }
    guard(|| {
        let a = s.analysis.state().phi(p)?;
        unsafe {
            out_re.write(a.re);
            out_im.write(a.im);
        }
        Ok(())
    })
}

/// # Safety
/// `state` and `out` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn iso_state_entropy_report(
    state: *const IsoState,
    out: *mut IsoEntropyReport,
) -> IsoStatus {
    // SAFETY: caller contract.
    let (Some(s), false) = (unsafe { state.as_ref() }, out.is_null()) else {
        return null_pointer("state or out");
    };
    guard(|| {
        let r = s.analysis.entropy_report()?;
        let c = IsoEntropyReport {
            s_position: r.s_position,
            s_momentum: r.s_momentum,
            s_sum: r.s_sum,
            bbm_bound: r.bbm_bound,
            bbm_satisfied: r.bbm_satisfied,
            entropy_squeezed_position: r.entropy_squeezed_position,
            entropy_squeezed_momentum: r.entropy_squeezed_momentum,
        };
        unsafe { out.write(c) };
        Ok(())
    })
}

/// # Safety
/// `state` and `out` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn iso_state_uncertainty_report(
    state: *const IsoState,
    out: *mut IsoUncertaintyReport,
) -> IsoStatus {
    // SAFETY: caller contract.
    let (Some(s), false) = (unsafe { state.as_ref() }, out.is_null()) else {
        return null_pointer("state or out");
    };
    guard(|| {
        let r = s.analysis.uncertainty_report(true)?;
        let c = IsoUncertaintyReport {
            mean_x: r.mean_x,
            var_x: r.var_x,
            var_p: r.var_p,
            var_p_momentum_space: r.var_p_momentum_space.unwrap_or(f64::NAN),
            product: r.product,
            heisenberg_bound: r.heisenberg_bound,
            x_squeezed: r.x_squeezed,
            p_squeezed: r.p_squeezed,
        };
        unsafe { out.write(c) };
        Ok(())
    })
}

/// ½(1 + ln π).
#[no_mangle]
pub extern "C" fn iso_harmonic_ground_entropy() -> f64 {
    observables::harmonic_ground_entropy()
}

/// 1 + ln π.
#[no_mangle]
pub extern "C" fn iso_bbm_bound() -> f64 {
    observables::BBM_BOUND
}
