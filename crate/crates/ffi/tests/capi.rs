//! Exercise the C surface the way a foreign caller would.

use std::ffi::CStr;
use std::ptr;

use entangleport_ffi::*;

fn read_string(raw: *mut std::ffi::c_char) -> String {
    assert!(!raw.is_null());
    let text = unsafe { CStr::from_ptr(raw) }.to_string_lossy().into_owned();
    unsafe { ep_string_free(raw) };
    text
}

#[test]
fn hub_run_reports_cost_and_fidelity() {
    let mut report: *mut EpReport = ptr::null_mut();
    let status = unsafe { ep_hub_run(4, 9, EpUnitaryKind::Haar, false, &mut report) };
    assert_eq!(status, EpStatus::Ok);
    assert!(!report.is_null());
    unsafe {
        assert!(ep_report_fidelity(report) >= 1.0 - 1e-9);
        assert_eq!(ep_report_ebits_total(report), 6);
        assert_eq!(ep_report_cbits_total(report), 12);
        assert_eq!(ep_report_branches_verified(report), 1);
        assert!(ep_report_audit_pass(report));
        assert!(ep_report_checks_pass(report));
    }
    let json = read_string(unsafe { ep_report_to_json(report) });
    assert!(json.contains("\"ebits_total\": 6"));
    unsafe { ep_report_free(report) };
}

#[test]
fn hub_exhaustive_covers_branches_and_is_deterministic() {
    let run = || {
        let mut report: *mut EpReport = ptr::null_mut();
        let status = unsafe { ep_hub_run(2, 5, EpUnitaryKind::Haar, true, &mut report) };
        assert_eq!(status, EpStatus::Ok);
        let branches = unsafe { ep_report_branches_verified(report) };
        let json = read_string(unsafe { ep_report_to_json(report) });
        unsafe { ep_report_free(report) };
        (branches, json)
    };
    let (branches_a, json_a) = run();
    let (branches_b, json_b) = run();
    assert_eq!(branches_a, 16);
    assert_eq!(branches_a, branches_b);
    assert_eq!(json_a, json_b);
}

#[test]
fn invalid_inputs_set_the_error_message() {
    let mut report: *mut EpReport = ptr::null_mut();
    let status = unsafe { ep_hub_run(0, 0, EpUnitaryKind::Identity, false, &mut report) };
    assert_eq!(status, EpStatus::InvalidInput);
    assert!(report.is_null());
    let message = read_string(ep_last_error_message());
    assert!(message.contains("at least one lab"), "{message}");

    let status = unsafe { ep_hub_run(4, 0, EpUnitaryKind::Identity, true, &mut report) };
    assert_eq!(status, EpStatus::InvalidInput);

    let status = unsafe { ep_hub_run(3, 0, EpUnitaryKind::PairwiseSwap, false, &mut report) };
    assert_eq!(status, EpStatus::InvalidInput);

    let status = unsafe { ep_hub_run(2, 0, EpUnitaryKind::Identity, false, ptr::null_mut()) };
    assert_eq!(status, EpStatus::InvalidInput);
}

#[test]
fn experiments_report_their_rates() {
    let (mut before, mut after) = (f64::NAN, f64::NAN);
    let status = unsafe { ep_two_ebit_experiment(&mut before, &mut after) };
    assert_eq!(status, EpStatus::Ok);
    assert!(before.abs() < 1e-9);
    assert!((after - 2.0).abs() < 1e-9);

    let status = unsafe { ep_ps_experiment(6, &mut before, &mut after) };
    assert_eq!(status, EpStatus::Ok);
    assert!((after - 6.0).abs() < 1e-9);

    let status = unsafe { ep_ps_experiment(5, &mut before, &mut after) };
    assert_eq!(status, EpStatus::InvalidInput);
    let message = read_string(ep_last_error_message());
    assert!(message.contains("even"), "{message}");
}

#[test]
fn bound_check_reports_tightness() {
    let mut satisfied = false;
    let (mut cut, mut required) = (0.0f64, 0.0f64);
    let status = unsafe { ep_bound_check(4, 6.0, &mut satisfied, &mut cut, &mut required) };
    assert_eq!(status, EpStatus::Ok);
    assert!(satisfied);
    assert_eq!(cut, 96.0);
    assert_eq!(required, 96.0);

    let status = unsafe { ep_bound_check(4, 5.99, &mut satisfied, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(status, EpStatus::Ok);
    assert!(!satisfied);

    let status = unsafe { ep_bound_check(3, 4.0, &mut satisfied, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(status, EpStatus::InvalidInput);
}

#[test]
fn graph_export_round_trips_through_c_strings() {
    let mut raw: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { ep_graph_dot(3, false, &mut raw) };
    assert_eq!(status, EpStatus::Ok);
    let dot = read_string(raw);
    assert!(dot.starts_with("graph resources {"));
    assert_eq!(dot.matches("label=\"2\"").count(), 2);

    let status = unsafe { ep_graph_dot(4, true, &mut raw) };
    assert_eq!(status, EpStatus::Ok);
    let dot = read_string(raw);
    assert_eq!(dot.matches("label=\"24\"").count(), 6);
}
