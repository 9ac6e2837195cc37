//! C bindings for the simulator.
//!
//! The surface follows the usual C conventions: every call returns an
//! [`EpStatus`], results come back through out-pointers, reports are opaque
//! handles released with [`ep_report_free`], and strings returned by the
//! library are released with [`ep_string_free`]. On any non-OK status,
//! [`ep_last_error_message`] describes what went wrong for the calling
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entangleport::cli::NetworkSpec;
use entangleport::entops::{ps_ebit_experiment, ps_unitary, two_ebit_experiment};
use entangleport::resgraph::{verify_even_bound, ResourceMatrix};
use entangleport::statevec::{Unitary, TOL_SPECTRAL};
use entangleport::teleproto::{hub_execute, HubMode, ProtocolReport};

/// Result of a call into this library.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpStatus {
    /// The call succeeded and all checks passed.
    Ok = 0,
    /// The call ran to completion but a verification check failed; any
    /// produced report is still valid and describes the failure.
    CheckFailed = 1,
    /// A parameter or input was rejected.
    InvalidInput = 2,
    /// The library panicked internally.
    Internal = 3,
}

/// Collective operation selector for [`ep_hub_run`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpUnitaryKind {
    /// A Haar-random unitary derived from the run seed.
    Haar = 0,
    /// The identity; the protocol still pays full teleportation cost.
    Identity = 1,
    /// The pairwise SWAP on adjacent qubit pairs; lab count must be even.
    PairwiseSwap = 2,
}

/// Opaque protocol report handle.
pub struct EpReport {
    inner: ProtocolReport,
    checks_pass: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn invalid(message: String) -> EpStatus {
    set_last_error(message);
    EpStatus::InvalidInput
}

fn guarded(body: impl FnOnce() -> EpStatus) -> EpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic".to_owned());
            EpStatus::Internal
        }
    }
}

/// Execute the hub protocol on a fresh star network of `num_labs` labs with
/// seeded random product inputs.
///
/// With `exhaustive` set, every correction branch is verified; that is
/// limited to `num_labs <= 3`. On `EP_STATUS_OK` or `EP_STATUS_CHECK_FAILED`
/// a report handle is written to `out_report`; release it with
/// [`ep_report_free`].
///
/// # Safety
/// `out_report` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ep_hub_run(
    num_labs: u32,
    seed: u64,
    unitary: EpUnitaryKind,
    exhaustive: bool,
    out_report: *mut *mut EpReport,
) -> EpStatus {
    guarded(|| {
        clear_last_error();
        if out_report.is_null() {
            return invalid("out_report is null".to_owned());
        }
        let n = num_labs as usize;
        if n == 0 {
            return invalid("a network needs at least one lab".to_owned());
        }
        if exhaustive && n > 3 {
            return invalid(format!(
                "exhaustive mode is supported only for n <= 3 in hub runs, got {n}"
            ));
        }
        let net = match NetworkSpec::star_random(n, seed).build() {
            Ok(net) => net,
            Err(e) => return invalid(e.to_string()),
        };
        let u = match unitary {
            EpUnitaryKind::Haar => Unitary::haar_random(1 << n, seed),
            EpUnitaryKind::Identity => Ok(Unitary::identity(1 << n)),
            EpUnitaryKind::PairwiseSwap => ps_unitary(n),
        };
        let u = match u {
            Ok(u) => u,
            Err(e) => return invalid(e.to_string()),
        };
        let mode = if exhaustive {
            HubMode::Exhaustive { seed }
        } else {
            HubMode::Sampled { seed }
        };
        let report = match hub_execute(&net, &u, &mode) {
            Ok(report) => report,
            Err(e) => return invalid(e.to_string()),
        };
        let checks_pass = report.fidelity >= 1.0 - TOL_SPECTRAL
            && report.ebits_total == 2 * (n as u64 - 1)
            && report.cbits_total == 4 * (n as u64 - 1)
            && report.monotonicity_audit.pass;
        unsafe {
            *out_report = Box::into_raw(Box::new(EpReport {
                inner: report,
                checks_pass,
            }));
        }
        if checks_pass {
            EpStatus::Ok
        } else {
            set_last_error("hub run completed but a check failed".to_owned());
            EpStatus::CheckFailed
        }
    })
}

/// Worst-case fidelity against direct application; 0 on a null handle.
///
/// # Safety
/// `report` must be null or a handle from [`ep_hub_run`].
#[no_mangle]
pub unsafe extern "C" fn ep_report_fidelity(report: *const EpReport) -> f64 {
    if report.is_null() {
        return 0.0;
    }
    unsafe { &*report }.inner.fidelity
}

/// Total ebits consumed; 0 on a null handle.
///
/// # Safety
/// `report` must be null or a handle from [`ep_hub_run`].
#[no_mangle]
pub unsafe extern "C" fn ep_report_ebits_total(report: *const EpReport) -> u64 {
    if report.is_null() {
        return 0;
    }
    unsafe { &*report }.inner.ebits_total
}

/// Total classical bits sent; 0 on a null handle.
///
/// # Safety
/// `report` must be null or a handle from [`ep_hub_run`].
#[no_mangle]
pub unsafe extern "C" fn ep_report_cbits_total(report: *const EpReport) -> u64 {
    if report.is_null() {
        return 0;
    }
    unsafe { &*report }.inner.cbits_total
}

/// Number of correction branches the run verified; 0 on a null handle.
///
/// # Safety
/// `report` must be null or a handle from [`ep_hub_run`].
#[no_mangle]
pub unsafe extern "C" fn ep_report_branches_verified(report: *const EpReport) -> u64 {
    if report.is_null() {
        return 0;
    }
    unsafe { &*report }.inner.branches_verified as u64
}

/// Whether the entanglement monotonicity audit passed; false on null.
///
/// # Safety
/// `report` must be null or a handle from [`ep_hub_run`].
#[no_mangle]
pub unsafe extern "C" fn ep_report_audit_pass(report: *const EpReport) -> bool {
    if report.is_null() {
        return false;
    }
    unsafe { &*report }.inner.monotonicity_audit.pass
}

/// Whether fidelity, cost, and audit checks all passed; false on null.
///
/// # Safety
/// `report` must be null or a handle from [`ep_hub_run`].
#[no_mangle]
pub unsafe extern "C" fn ep_report_checks_pass(report: *const EpReport) -> bool {
    if report.is_null() {
        return false;
    }
    unsafe { &*report }.checks_pass
}

/// Render the full report as JSON. Release with [`ep_string_free`].
/// Returns null on a null handle.
///
/// # Safety
/// `report` must be null or a handle from [`ep_hub_run`].
#[no_mangle]
pub unsafe extern "C" fn ep_report_to_json(report: *const EpReport) -> *mut c_char {
    if report.is_null() {
        return ptr::null_mut();
    }
    let inner = &unsafe { &*report }.inner;
    match serde_json::to_string_pretty(inner) {
        Ok(mut text) => {
            text.push('\n');
            CString::new(text)
                .map(CString::into_raw)
                .unwrap_or(ptr::null_mut())
        }
        Err(_) => ptr::null_mut(),
    }
}

/// Release a report handle. Null is ignored.
///
/// # Safety
/// `report` must be null or an unreleased handle from [`ep_hub_run`].
#[no_mangle]
pub unsafe extern "C" fn ep_report_free(report: *mut EpReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

/// Run the two-lab swap experiment; writes the lab-cut ebit count before
/// (0) and after (2) the cross-lab SWAP.
///
/// # Safety
/// `out_before` and `out_after` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ep_two_ebit_experiment(
    out_before: *mut f64,
    out_after: *mut f64,
) -> EpStatus {
    guarded(|| {
        clear_last_error();
        if out_before.is_null() || out_after.is_null() {
            return invalid("output pointer is null".to_owned());
        }
        let run = two_ebit_experiment();
        unsafe {
            *out_before = run.entropy_before;
            *out_after = run.entropy_after;
        }
        EpStatus::Ok
    })
}

/// Run the pairwise-swap experiment on an even number of labs; writes the
/// odd/even-cut ebit count before (0) and after (`num_labs`) the operation.
///
/// # Safety
/// `out_before` and `out_after` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ep_ps_experiment(
    num_labs: u32,
    out_before: *mut f64,
    out_after: *mut f64,
) -> EpStatus {
    guarded(|| {
        clear_last_error();
        if out_before.is_null() || out_after.is_null() {
            return invalid("output pointer is null".to_owned());
        }
        match ps_ebit_experiment(num_labs as usize) {
            Ok(run) => {
                unsafe {
                    *out_before = run.entropy_before;
                    *out_after = run.entropy_after;
                }
                EpStatus::Ok
            }
            Err(e) => invalid(e.to_string()),
        }
    })
}

/// Check the even-N lower bound for a given total entanglement in ebits.
///
/// `out_satisfied` is required; `out_cut_weight` and `out_required` are
/// written when non-null. An unsatisfied bound is still `EP_STATUS_OK`; the
/// verdict is the output.
///
/// # Safety
/// `out_satisfied` must be a valid pointer; the other outputs must each be
/// null or valid.
#[no_mangle]
pub unsafe extern "C" fn ep_bound_check(
    num_labs: u32,
    total_ebits: f64,
    out_satisfied: *mut bool,
    out_cut_weight: *mut f64,
    out_required: *mut f64,
) -> EpStatus {
    guarded(|| {
        clear_last_error();
        if out_satisfied.is_null() {
            return invalid("out_satisfied is null".to_owned());
        }
        match verify_even_bound(num_labs as usize, total_ebits) {
            Ok(check) => {
                let report = check.report();
                unsafe {
                    *out_satisfied = report.satisfied;
                    if !out_cut_weight.is_null() {
                        *out_cut_weight = report.cut_weight;
                    }
                    if !out_required.is_null() {
                        *out_required = report.required;
                    }
                }
                EpStatus::Ok
            }
            Err(e) => invalid(e.to_string()),
        }
    })
}

/// Render the star resource graph (or its permutation-symmetrized form) in
/// DOT format. Release the string with [`ep_string_free`].
///
/// # Safety
/// `out_dot` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ep_graph_dot(
    num_labs: u32,
    symmetrized: bool,
    out_dot: *mut *mut c_char,
) -> EpStatus {
    guarded(|| {
        clear_last_error();
        if out_dot.is_null() {
            return invalid("out_dot is null".to_owned());
        }
        let matrix = if symmetrized {
            ResourceMatrix::star(num_labs as usize).symmetrized()
        } else {
            ResourceMatrix::star(num_labs as usize)
        };
        match CString::new(matrix.to_dot()) {
            Ok(text) => {
                unsafe { *out_dot = text.into_raw() };
                EpStatus::Ok
            }
            Err(_) => invalid("DOT output contained a NUL byte".to_owned()),
        }
    })
}

/// Describe the last error on this thread, or null if there is none.
/// Release with [`ep_string_free`].
#[no_mangle]
pub extern "C" fn ep_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(message) => message.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or an unreleased string from this library.
#[no_mangle]
pub unsafe extern "C" fn ep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
