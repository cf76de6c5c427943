use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qdt_ffi::*;

fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { qdt_string_free(p) };
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qdt_last_error()) }.to_str().unwrap().to_owned()
}

fn coefficients(series: *const QdtSeries) -> Vec<String> {
    let n = unsafe { qdt_series_len(series) };
    (0..n)
        .map(|i| {
            let mut s = ptr::null_mut();
            assert_eq!(unsafe { qdt_series_coefficient(series, i, &mut s) }, QdtStatus::Ok);
            take_string(s)
        })
        .collect()
}

fn header_path() -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "include", "qdt.h"].iter().collect()
}

#[test]
fn octant_series_through_the_c_api() {
    unsafe {
        let mut fan = ptr::null_mut();
        assert_eq!(qdt_fan_octants(&mut fan), QdtStatus::Ok);
        let mut series = ptr::null_mut();
        assert_eq!(qdt_quadratic_series(fan, ptr::null(), 8, &mut series), QdtStatus::Ok);
        assert_eq!(coefficients(series), ["1", "0", "-8", "0", "12", "0", "48", "0", "-98"]);
        let mut s = ptr::null_mut();
        assert_eq!(qdt_series_coefficient(series, 9, &mut s), QdtStatus::InvalidArgument);
        assert!(last_error().contains("beyond"));
        qdt_series_free(series);

        let mut bott = ptr::null_mut();
        assert_eq!(qdt_bott_residue(fan, ptr::null(), &mut bott), QdtStatus::Ok);
        assert_eq!(take_string(bott), "-16");

        let mut w = [0i64; 3];
        assert_eq!(qdt_select_weights(fan, 3, w.as_mut_ptr()), QdtStatus::Ok);
        assert_eq!(w, [1, 7, 11]);
        qdt_fan_free(fan);
    }
}

#[test]
fn blowup_and_json_roundtrip() {
    unsafe {
        let mut fan = ptr::null_mut();
        assert_eq!(qdt_fan_octants(&mut fan), QdtStatus::Ok);
        let mut count = 0;
        assert_eq!(qdt_fan_orbit_count(fan, &mut count), QdtStatus::Ok);
        assert_eq!(count, 4);
        let mut blown = ptr::null_mut();
        assert_eq!(qdt_fan_blowup(fan, 0, &mut blown), QdtStatus::Ok);
        let (mut rays, mut cones) = (0, 0);
        assert_eq!(qdt_fan_size(blown, &mut rays, &mut cones), QdtStatus::Ok);
        assert_eq!((rays, cones), (8, 12));
        let (mut valid, mut oriented) = (false, false);
        assert_eq!(qdt_fan_check(blown, &mut valid, &mut oriented), QdtStatus::Ok);
        assert!(valid && oriented);

        let mut json = ptr::null_mut();
        assert_eq!(qdt_fan_to_json(blown, &mut json), QdtStatus::Ok);
        let text = CString::new(take_string(json)).unwrap();
        let mut again = ptr::null_mut();
        assert_eq!(qdt_fan_from_json(text.as_ptr(), &mut again), QdtStatus::Ok);
        let mut series = ptr::null_mut();
        assert_eq!(qdt_quadratic_series(again, ptr::null(), 4, &mut series), QdtStatus::Ok);
        assert_eq!(coefficients(series)[2], "-6");
        qdt_series_free(series);

        let mut none = ptr::null_mut();
        assert_eq!(qdt_fan_blowup(fan, 9, &mut none), QdtStatus::Validation);
        assert!(none.is_null());
        assert!(last_error().contains("out of range"));
        for f in [fan, blown, again] {
            qdt_fan_free(f);
        }
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut fan = ptr::null_mut();
        let bad = CString::new("{\"rays\": [").unwrap();
        assert_eq!(qdt_fan_from_json(bad.as_ptr(), &mut fan), QdtStatus::Parse);
        assert!(fan.is_null());
        assert!(!last_error().is_empty());

        let missing = CString::new("/nonexistent/fan.json").unwrap();
        assert_eq!(qdt_fan_from_file(missing.as_ptr(), &mut fan), QdtStatus::Io);

        let p3 = CString::new(
            r#"{"rays": [[1,0,0],[0,1,0],[0,0,1],[-1,-1,-1]], "cones": [[0,1,2],[0,1,3],[0,2,3],[1,2,3]]}"#,
        )
        .unwrap();
        assert_eq!(qdt_fan_from_json(p3.as_ptr(), &mut fan), QdtStatus::Ok);
        let (mut valid, mut oriented) = (true, true);
        assert_eq!(qdt_fan_check(fan, &mut valid, &mut oriented), QdtStatus::Ok);
        assert!(!valid && !oriented);
        assert!(last_error().contains("central_symmetry"));
        let mut series = ptr::null_mut();
        assert_eq!(
            qdt_quadratic_series(fan, ptr::null(), 2, &mut series),
            QdtStatus::Validation
        );
        qdt_fan_free(fan);

        let mut oct = ptr::null_mut();
        assert_eq!(qdt_fan_octants(&mut oct), QdtStatus::Ok);
        let ones = [1i64, 1, 1];
        assert_eq!(
            qdt_quadratic_series(oct, ones.as_ptr(), 4, &mut series),
            QdtStatus::DegenerateWeights
        );
        let even = [2i64, 3, 5];
        assert_eq!(
            qdt_quadratic_series(oct, even.as_ptr(), 4, &mut series),
            QdtStatus::InvalidArgument
        );
        qdt_fan_free(oct);
    }
}

#[test]
fn vertex_measures() {
    unsafe {
        let s = [-2i64, -6, -10];
        let mut series = ptr::null_mut();
        assert_eq!(qdt_vertex_quadratic(s.as_ptr(), 2, &mut series), QdtStatus::Ok);
        assert_eq!(coefficients(series), ["1", "0", "-64/5"]);
        qdt_series_free(series);
        assert_eq!(qdt_vertex_classical(s.as_ptr(), 2, &mut series), QdtStatus::Ok);
        assert_eq!(coefficients(series)[1], "64/5");
        qdt_series_free(series);
        assert_eq!(
            qdt_vertex_quadratic(s.as_ptr(), 6, &mut series),
            QdtStatus::DegenerateWeights
        );
        let odd = [1i64, 2, 3];
        assert_eq!(
            qdt_vertex_quadratic(odd.as_ptr(), 2, &mut series),
            QdtStatus::InvalidArgument
        );
        assert_eq!(
            qdt_vertex_quadratic(ptr::null(), 2, &mut series),
            QdtStatus::NullPointer
        );
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(header_path()).unwrap();
    assert!(header.contains("#ifndef QDT_H"));
    for name in [
        "typedef struct QdtFan QdtFan;",
        "typedef struct QdtSeries QdtSeries;",
        "QDT_STATUS_DEGENERATE_WEIGHTS = 6",
        "qdt_fan_from_json",
        "qdt_fan_from_file",
        "qdt_fan_free",
        "qdt_fan_check",
        "qdt_fan_blowup",
        "qdt_fan_to_json",
        "qdt_quadratic_series",
        "qdt_vertex_quadratic",
        "qdt_vertex_classical",
        "qdt_bott_residue",
        "qdt_series_coefficient",
        "qdt_string_free",
        "qdt_last_error",
        "qdt_version",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles a small C client against the header when a C compiler exists.
#[test]
fn header_compiles_as_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    if !cc.status.success() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(
        &src,
        r#"#include "qdt.h"
int main(void) {
    QdtFan *fan = NULL;
    QdtSeries *series = NULL;
    char *text = NULL;
    if (qdt_fan_octants(&fan) != QDT_STATUS_OK) return 1;
    if (qdt_quadratic_series(fan, NULL, 8, &series) != QDT_STATUS_OK) return 2;
    if (qdt_series_coefficient(series, 8, &text) != QDT_STATUS_OK) return 3;
    qdt_string_free(text);
    qdt_series_free(series);
    qdt_fan_free(fan);
    return 0;
}
"#,
    )
    .unwrap();
    let include = header_path().parent().unwrap().to_path_buf();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
