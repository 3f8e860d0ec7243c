//! C ABI for the trendcast pipeline: load or synthesize a weekly panel,
//! cluster its search terms, and compute the correlation/Granger driver
//! report. Handles are opaque pointers; strings returned through out-params
//! are NUL-terminated UTF-8 owned by this library and must be released with
//! [`tc_string_free`]. Every function returns a [`TcStatus`]; on failure the
//! message is available from [`tc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use trendcast_core::clustering::{
    cluster_profiles, cut_dendrogram, dendrogram_json, dendrogram_newick, euclidean_distances,
    ward_linkage,
};
use trendcast_core::eval::{generate_synthetic, SynthSpec};
use trendcast_core::io::{
    driver_rows, parse_single_series_csv, parse_terms_csv, WeekFormat,
};
use trendcast_core::stats::cluster_driver_report_partial;
use trendcast_core::timeseries::{align_panel, rescale_0_100, Panel, WeekRange};

/// Result code of every C-API call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TcStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An argument failed validation (bad week label, bad k, bad UTF-8, ...).
    InvalidArgument = 2,
    /// File could not be read or parsed.
    Io = 3,
    /// The computation itself failed.
    Compute = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
}

fn fail(status: TcStatus, message: impl Into<String>) -> TcStatus {
    set_error(message);
    status
}

/// Opaque week-aligned panel of term/media/case series.
pub struct TcPanel {
    panel: Panel,
}

unsafe fn opt_str<'a>(ptr: *const c_char) -> Result<Option<&'a str>, TcStatus> {
    if ptr.is_null() {
        return Ok(None);
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(Some(s)),
        Err(_) => Err(TcStatus::InvalidArgument),
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s)
        .unwrap_or_else(|_| CString::new("interior NUL in output").expect("static"))
        .into_raw()
}

/// Returns the most recent error message on this thread (empty string if
/// none). Free the result with `tc_string_free`.
#[no_mangle]
pub extern "C" fn tc_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| to_c_string(e.borrow().clone()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must have been returned by a trendcast function and not freed before.
#[no_mangle]
pub unsafe extern "C" fn tc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Loads a panel from weekly CSV files.
///
/// `media_path` and `cases_path` may be NULL. `week_format` is `"iso"`
/// (default when NULL) or `"sunday"`. On success `*out` owns the panel;
/// release it with `tc_panel_free`.
///
/// # Safety
/// Path pointers must be NUL-terminated strings or NULL; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_panel_from_csv(
    terms_path: *const c_char,
    media_path: *const c_char,
    cases_path: *const c_char,
    week_format: *const c_char,
    out: *mut *mut TcPanel,
) -> TcStatus {
    if out.is_null() {
        return fail(TcStatus::NullPointer, "out pointer is NULL");
    }
    unsafe { *out = ptr::null_mut() };
    let terms_path = match unsafe { opt_str(terms_path) } {
        Ok(Some(p)) => p,
        Ok(None) => return fail(TcStatus::NullPointer, "terms_path is NULL"),
        Err(s) => return fail(s, "terms_path is not valid UTF-8"),
    };
    let media_path = match unsafe { opt_str(media_path) } {
        Ok(p) => p,
        Err(s) => return fail(s, "media_path is not valid UTF-8"),
    };
    let cases_path = match unsafe { opt_str(cases_path) } {
        Ok(p) => p,
        Err(s) => return fail(s, "cases_path is not valid UTF-8"),
    };
    let format = match unsafe { opt_str(week_format) } {
        Ok(None) => WeekFormat::Iso,
        Ok(Some(text)) => match text.parse::<WeekFormat>() {
            Ok(f) => f,
            Err(e) => return fail(TcStatus::InvalidArgument, e),
        },
        Err(s) => return fail(s, "week_format is not valid UTF-8"),
    };

    let result = catch_unwind(AssertUnwindSafe(|| -> Result<Panel, (TcStatus, String)> {
        let terms = parse_terms_csv(Path::new(terms_path), format)
            .map_err(|e| (TcStatus::Io, e.to_string()))?;
        let media = media_path
            .map(|p| parse_single_series_csv(Path::new(p), format))
            .transpose()
            .map_err(|e| (TcStatus::Io, e.to_string()))?;
        let cases = cases_path
            .map(|p| parse_single_series_csv(Path::new(p), format))
            .transpose()
            .map_err(|e| (TcStatus::Io, e.to_string()))?;
        align_panel(terms, media, cases).map_err(|e| (TcStatus::Compute, e.to_string()))
    }));
    match result {
        Ok(Ok(panel)) => {
            unsafe { *out = Box::into_raw(Box::new(TcPanel { panel })) };
            TcStatus::Ok
        }
        Ok(Err((status, message))) => fail(status, message),
        Err(_) => fail(TcStatus::Compute, "internal panic"),
    }
}

/// Generates the default synthetic benchmark panel (two case waves, an early
/// media bump, three term groups) for the given seed, week count, and term
/// noise level. Release with `tc_panel_free`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_panel_synthetic(
    seed: u64,
    weeks: u32,
    noise_sd: f64,
    out: *mut *mut TcPanel,
) -> TcStatus {
    if out.is_null() {
        return fail(TcStatus::NullPointer, "out pointer is NULL");
    }
    unsafe { *out = ptr::null_mut() };
    let spec = SynthSpec {
        seed,
        weeks: weeks as usize,
        noise_sd,
        ..SynthSpec::default()
    };
    match catch_unwind(|| generate_synthetic(&spec)) {
        Ok(Ok((panel, _truth))) => {
            unsafe { *out = Box::into_raw(Box::new(TcPanel { panel })) };
            TcStatus::Ok
        }
        Ok(Err(e)) => fail(TcStatus::InvalidArgument, e.to_string()),
        Err(_) => fail(TcStatus::Compute, "internal panic"),
    }
}

/// Releases a panel handle. NULL is ignored.
///
/// # Safety
/// `panel` must have come from a panel-producing function and not be freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn tc_panel_free(panel: *mut TcPanel) {
    if !panel.is_null() {
        drop(unsafe { Box::from_raw(panel) });
    }
}

/// Number of term series in the panel.
///
/// # Safety
/// `panel` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tc_panel_n_terms(panel: *const TcPanel, out: *mut u32) -> TcStatus {
    if panel.is_null() || out.is_null() {
        return fail(TcStatus::NullPointer, "panel or out pointer is NULL");
    }
    unsafe { *out = (*panel).panel.terms().len() as u32 };
    TcStatus::Ok
}

/// Number of weeks covered by the panel.
///
/// # Safety
/// `panel` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tc_panel_n_weeks(panel: *const TcPanel, out: *mut u32) -> TcStatus {
    if panel.is_null() || out.is_null() {
        return fail(TcStatus::NullPointer, "panel or out pointer is NULL");
    }
    unsafe { *out = (*panel).panel.span().len() as u32 };
    TcStatus::Ok
}

fn parse_range(
    panel: &Panel,
    start_week: Option<&str>,
    end_week: Option<&str>,
) -> Result<WeekRange, (TcStatus, String)> {
    let span = panel.span();
    let bad = |label: &str| {
        (
            TcStatus::InvalidArgument,
            format!("bad week label '{label}' (expected YYYY-Www)"),
        )
    };
    let start = match start_week {
        Some(label) => label.parse().map_err(|_| bad(label))?,
        None => span.start,
    };
    let end = match end_week {
        Some(label) => label.parse().map_err(|_| bad(label))?,
        None => span.end,
    };
    WeekRange::new(start, end).map_err(|e| (TcStatus::InvalidArgument, e.to_string()))
}

struct Clustered {
    panel: Panel,
    dendro: trendcast_core::clustering::Dendrogram,
    clusters: Vec<trendcast_core::clustering::ClusterMembers>,
    degenerate: Vec<String>,
}

fn cluster_pipeline(
    panel: &Panel,
    start_week: Option<&str>,
    end_week: Option<&str>,
    k: usize,
) -> Result<Clustered, (TcStatus, String)> {
    let range = parse_range(panel, start_week, end_week)?;
    let sliced = panel
        .slice(&range)
        .map_err(|e| (TcStatus::InvalidArgument, e.to_string()))?;
    let mut degenerate = Vec::new();
    let mut rescaled = Vec::new();
    for term in sliced.terms() {
        let (series, flag) =
            rescale_0_100(term).map_err(|e| (TcStatus::Compute, e.to_string()))?;
        if flag {
            degenerate.push(term.id().to_string());
        }
        rescaled.push(series);
    }
    let panel = sliced
        .with_terms(rescaled)
        .map_err(|e| (TcStatus::Compute, e.to_string()))?;
    let distances =
        euclidean_distances(&panel).map_err(|e| (TcStatus::Compute, e.to_string()))?;
    let dendro = ward_linkage(&distances).map_err(|e| (TcStatus::Compute, e.to_string()))?;
    let clusters = cut_dendrogram(&dendro, k).map_err(|e| (TcStatus::Compute, e.to_string()))?;
    Ok(Clustered {
        panel,
        dendro,
        clusters,
        degenerate,
    })
}

/// Clusters the panel's terms over `[start_week, end_week]` (NULL means the
/// panel bounds) into `k` clusters. On success `*out_json` holds a JSON
/// object with `dendrogram`, `newick`, `clusters`, and `degenerate_terms`;
/// free it with `tc_string_free`.
///
/// # Safety
/// `panel` and `out_json` must be valid pointers; week labels must be
/// NUL-terminated strings or NULL.
#[no_mangle]
pub unsafe extern "C" fn tc_cluster_json(
    panel: *const TcPanel,
    start_week: *const c_char,
    end_week: *const c_char,
    k: u32,
    out_json: *mut *mut c_char,
) -> TcStatus {
    if panel.is_null() || out_json.is_null() {
        return fail(TcStatus::NullPointer, "panel or out_json pointer is NULL");
    }
    unsafe { *out_json = ptr::null_mut() };
    let start = match unsafe { opt_str(start_week) } {
        Ok(s) => s,
        Err(st) => return fail(st, "start_week is not valid UTF-8"),
    };
    let end = match unsafe { opt_str(end_week) } {
        Ok(s) => s,
        Err(st) => return fail(st, "end_week is not valid UTF-8"),
    };
    let panel = unsafe { &(*panel).panel };

    let result = catch_unwind(AssertUnwindSafe(|| {
        let clustered = cluster_pipeline(panel, start, end, k as usize)?;
        let payload = serde_json::json!({
            "dendrogram": dendrogram_json(&clustered.dendro),
            "newick": dendrogram_newick(&clustered.dendro),
            "clusters": clustered.clusters,
            "degenerate_terms": clustered.degenerate,
        });
        Ok::<String, (TcStatus, String)>(payload.to_string())
    }));
    match result {
        Ok(Ok(json)) => {
            unsafe { *out_json = to_c_string(json) };
            TcStatus::Ok
        }
        Ok(Err((status, message))) => fail(status, message),
        Err(_) => fail(TcStatus::Compute, "internal panic"),
    }
}

/// Clusters the panel and computes the per-cluster correlation (and, when
/// `with_granger` is true, Granger-precedence) report against whichever of
/// cases/media the panel carries. `*out_json` holds a JSON object with
/// `rows` and `disease_cluster`; free it with `tc_string_free`.
///
/// # Safety
/// Same contracts as [`tc_cluster_json`].
#[no_mangle]
pub unsafe extern "C" fn tc_driver_report_json(
    panel: *const TcPanel,
    start_week: *const c_char,
    end_week: *const c_char,
    k: u32,
    with_granger: bool,
    out_json: *mut *mut c_char,
) -> TcStatus {
    if panel.is_null() || out_json.is_null() {
        return fail(TcStatus::NullPointer, "panel or out_json pointer is NULL");
    }
    unsafe { *out_json = ptr::null_mut() };
    let start = match unsafe { opt_str(start_week) } {
        Ok(s) => s,
        Err(st) => return fail(st, "start_week is not valid UTF-8"),
    };
    let end = match unsafe { opt_str(end_week) } {
        Ok(s) => s,
        Err(st) => return fail(st, "end_week is not valid UTF-8"),
    };
    let panel = unsafe { &(*panel).panel };

    let result = catch_unwind(AssertUnwindSafe(|| {
        if panel.cases().is_none() && panel.media().is_none() {
            return Err((
                TcStatus::InvalidArgument,
                "panel has neither cases nor media series".to_string(),
            ));
        }
        let clustered = cluster_pipeline(panel, start, end, k as usize)?;
        let profiles = cluster_profiles(&clustered.panel, &clustered.clusters)
            .map_err(|e| (TcStatus::Compute, e.to_string()))?;
        let report = cluster_driver_report_partial(&clustered.panel, &profiles, with_granger)
            .map_err(|e| (TcStatus::Compute, e.to_string()))?;
        let payload = serde_json::json!({
            "rows": driver_rows(&report),
            "disease_cluster": report.disease_cluster,
        });
        Ok::<String, (TcStatus, String)>(payload.to_string())
    }));
    match result {
        Ok(Ok(json)) => {
            unsafe { *out_json = to_c_string(json) };
            TcStatus::Ok
        }
        Ok(Err((status, message))) => fail(status, message),
        Err(_) => fail(TcStatus::Compute, "internal panic"),
    }
}
