//! C ABI over `qdt-core`.
//!
//! Every fallible call returns a [`QdtStatus`]; on failure the message is
//! available from [`qdt_last_error`] on the same thread. Handles are opaque
//! and owned by the caller until passed to the matching `_free`. Strings
//! handed out by this library are released with [`qdt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use qdt_core::dtinv::{bott_residue_c3, quadratic_dt_series, select_weights, DEFAULT_SEARCH_BOUND};
use qdt_core::fan::{orientation_check, sigma_orbits, star_subdivide, validate_fan};
use qdt_core::series::format_rational;
use qdt_core::vertex::{vertex_measure_classical, vertex_measure_quadratic, VertexError};
use qdt_core::{DtError, EmbeddingParams, Fan, FanError, PowerSeries, WeightTriple};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Validation = 5,
    DegenerateWeights = 6,
    Invariant = 7,
    Panic = 8,
}

/// Opaque fan handle.
pub struct QdtFan {
    fan: Fan,
}

/// Opaque power series handle; coefficients are exact rationals.
pub struct QdtSeries {
    series: PowerSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(QdtStatus, String);

impl From<FanError> for Failure {
    fn from(e: FanError) -> Self {
        let status = match e {
            FanError::Io(_) => QdtStatus::Io,
            FanError::Parse(_) => QdtStatus::Parse,
            _ => QdtStatus::Validation,
        };
        Failure(status, e.to_string())
    }
}

impl From<DtError> for Failure {
    fn from(e: DtError) -> Self {
        match e {
            DtError::Fan(f) => f.into(),
            DtError::InvalidParams { .. } => Failure(QdtStatus::InvalidArgument, e.to_string()),
            DtError::DegenerateWeights { .. } | DtError::VanishingWeight { .. } | DtError::SearchExhausted { .. } => {
                Failure(QdtStatus::DegenerateWeights, e.to_string())
            }
            DtError::Invariant(_) | DtError::Series(_) => Failure(QdtStatus::Invariant, e.to_string()),
        }
    }
}

impl From<VertexError> for Failure {
    fn from(e: VertexError) -> Self {
        let status = match e {
            VertexError::DegenerateWeights { .. } | VertexError::ZeroCoordinateWeight(_) => {
                QdtStatus::DegenerateWeights
            }
            _ => QdtStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QdtStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic for [`qdt_last_error`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QdtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QdtStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal panic".into());
            set_error(&msg);
            QdtStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(QdtStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn fan_ref<'a>(p: *const QdtFan) -> Result<&'a Fan, Failure> {
    p.as_ref().map(|h| &h.fan).ok_or_else(|| null("fan"))
}

unsafe fn triple(p: *const i64, what: &str) -> Result<[i64; 3], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok([*p, *p.add(1), *p.add(2)])
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior NUL").into_raw()
}

/// Embedding from `params` (three odd integers) or, when null, the smallest
/// generic one through `max_colength`.
unsafe fn embedding(fan: &Fan, params: *const i64, max_colength: usize) -> Result<EmbeddingParams, Failure> {
    if params.is_null() {
        Ok(select_weights(fan, max_colength, None, DEFAULT_SEARCH_BOUND)?)
    } else {
        let [a, b, c] = triple(params, "params")?;
        Ok(EmbeddingParams::new(a, b, c)?)
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qdt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn qdt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a fan from JSON text (`{"rays": [...], "cones": [...]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdt_fan_from_json(json: *const c_char, out: *mut *mut QdtFan) -> QdtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let fan = Fan::from_json(read_str(json, "json")?)?;
        put(out, QdtFan { fan });
        Ok(())
    })
}

/// Reads a fan file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdt_fan_from_file(path: *const c_char, out: *mut *mut QdtFan) -> QdtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let fan = Fan::from_path(Path::new(read_str(path, "path")?))?;
        put(out, QdtFan { fan });
        Ok(())
    })
}

/// The eight-octant fan of `(P^1)^3`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdt_fan_octants(out: *mut *mut QdtFan) -> QdtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, QdtFan { fan: Fan::octants() });
        Ok(())
    })
}

/// Releases a fan; null is ignored.
///
/// # Safety
/// `fan` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qdt_fan_free(fan: *mut QdtFan) {
    if !fan.is_null() {
        drop(Box::from_raw(fan));
    }
}

/// Ray and cone counts.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdt_fan_size(fan: *const QdtFan, rays: *mut usize, cones: *mut usize) -> QdtStatus {
    guard(|| {
        let f = fan_ref(fan)?;
        if rays.is_null() || cones.is_null() {
            return Err(null("out"));
        }
        *rays = f.rays().len();
        *cones = f.cones().len();
        Ok(())
    })
}

/// Structural validation and orientation criterion. Both flags are written
/// even when they are false; the status is `Ok` unless arguments are bad.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdt_fan_check(fan: *const QdtFan, valid: *mut bool, oriented: *mut bool) -> QdtStatus {
    guard(|| {
        let f = fan_ref(fan)?;
        if valid.is_null() || oriented.is_null() {
            return Err(null("out"));
        }
        let report = validate_fan(f);
        let orientation = orientation_check(f);
        *valid = report.passed();
        *oriented = orientation.passed;
        if !report.passed() || !orientation.passed {
            let mut reasons: Vec<String> = report
                .failures()
                .iter()
                .map(|c| format!("{}: {}", c.name, c.detail.as_deref().unwrap_or("failed")))
                .collect();
            reasons.extend(orientation.violations.iter().map(|v| v.to_string()));
            // Reported through the last-error slot, not the status.
            return Err(Failure(QdtStatus::Ok, reasons.join("; ")));
        }
        Ok(())
    })
}

/// Number of sigma-orbits of maximal cones.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdt_fan_orbit_count(fan: *const QdtFan, out: *mut usize) -> QdtStatus {
    guard(|| {
        let f = fan_ref(fan)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = sigma_orbits(f)?.len();
        Ok(())
    })
}

/// Star subdivision of both cones of orbit `orbit`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdt_fan_blowup(fan: *const QdtFan, orbit: usize, out: *mut *mut QdtFan) -> QdtStatus {
    guard(|| {
        let f = fan_ref(fan)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let orbits = sigma_orbits(f)?;
        let &(rep, _) = orbits.get(orbit).ok_or(FanError::NoSuchOrbit {
            index: orbit,
            count: orbits.len(),
        })?;
        put(
            out,
            QdtFan {
                fan: star_subdivide(f, rep)?,
            },
        );
        Ok(())
    })
}

/// JSON rendering of a fan; free with [`qdt_string_free`].
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdt_fan_to_json(fan: *const QdtFan, out: *mut *mut c_char) -> QdtStatus {
    guard(|| {
        let f = fan_ref(fan)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c_string(f.to_json());
        Ok(())
    })
}

/// Smallest generic embedding `(a, b, c)` through `max_colength`.
///
/// # Safety
/// `out` must point to three writable `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn qdt_select_weights(fan: *const QdtFan, max_colength: usize, out: *mut i64) -> QdtStatus {
    guard(|| {
        let f = fan_ref(fan)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = select_weights(f, max_colength, None, DEFAULT_SEARCH_BOUND)?;
        *out = p.a;
        *out.add(1) = p.b;
        *out.add(2) = p.c;
        Ok(())
    })
}

/// Quadratic DT series through `q^max_order`. `params` is null for automatic
/// selection or points to three odd integers.
///
/// # Safety
/// All non-null pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdt_quadratic_series(
    fan: *const QdtFan,
    params: *const i64,
    max_order: usize,
    out: *mut *mut QdtSeries,
) -> QdtStatus {
    guard(|| {
        let f = fan_ref(fan)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = embedding(f, params, max_order / 2)?;
        let report = quadratic_dt_series(f, p, max_order)?;
        put(out, QdtSeries { series: report.series });
        Ok(())
    })
}

/// Bott residue of `deg c3(T (x) K)` as a rational string; free with
/// [`qdt_string_free`]. `params` as for [`qdt_quadratic_series`].
///
/// # Safety
/// All non-null pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdt_bott_residue(fan: *const QdtFan, params: *const i64, out: *mut *mut c_char) -> QdtStatus {
    guard(|| {
        let f = fan_ref(fan)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = embedding(f, params, 1)?;
        *out = to_c_string(format_rational(&bott_residue_c3(f, p)?));
        Ok(())
    })
}

/// Quadratic vertex measure at admissible weights `s`; `max_order` even.
///
/// # Safety
/// `s` must point to three `int64_t`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdt_vertex_quadratic(s: *const i64, max_order: usize, out: *mut *mut QdtSeries) -> QdtStatus {
    guard(|| {
        let [a, b, c] = triple(s, "weights")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let series = vertex_measure_quadratic(WeightTriple::new(a, b, c), max_order)?;
        put(out, QdtSeries { series });
        Ok(())
    })
}

/// Classical vertex measure at weights `s`.
///
/// # Safety
/// `s` must point to three `int64_t`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdt_vertex_classical(s: *const i64, max_order: usize, out: *mut *mut QdtSeries) -> QdtStatus {
    guard(|| {
        let [a, b, c] = triple(s, "weights")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let series = vertex_measure_classical(WeightTriple::new(a, b, c), max_order)?;
        put(out, QdtSeries { series });
        Ok(())
    })
}

/// Releases a series; null is ignored.
///
/// # Safety
/// `series` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qdt_series_free(series: *mut QdtSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of stored coefficients (`max_order + 1`); 0 for null.
///
/// # Safety
/// `series` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn qdt_series_len(series: *const QdtSeries) -> usize {
    series.as_ref().map_or(0, |s| s.series.coeffs().len())
}

/// Coefficient of `q^n` as `"num/den"` or a bare integer; free with
/// [`qdt_string_free`].
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdt_series_coefficient(
    series: *const QdtSeries,
    n: usize,
    out: *mut *mut c_char,
) -> QdtStatus {
    guard(|| {
        let s = series.as_ref().ok_or_else(|| null("series"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = s.series.coeffs().get(n).ok_or_else(|| {
            Failure(
                QdtStatus::InvalidArgument,
                format!("q^{n} is beyond the series order {}", s.series.order()),
            )
        })?;
        *out = to_c_string(format_rational(c));
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qdt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
