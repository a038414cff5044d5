use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use girthforge_ffi::*;

const FANO: &str =
    r#"{"n":7,"r":2,"q":3,"blocks":[[0,1,2],[0,3,4],[0,5,6],[1,3,5],[1,4,6],[2,3,6],[2,4,5]]}"#;

fn last_error() -> String {
    let p = gf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn fano_round_trip_and_girth() {
    let json = CString::new(FANO).unwrap();
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(gf_packing_from_json(json.as_ptr(), &mut p), GfStatus::Ok);
        let mut len = 0;
        assert_eq!(gf_packing_len(p, &mut len), GfStatus::Ok);
        assert_eq!(len, 7);
        let mut g = GfGirth {
            value: 0,
            exceeds: true,
        };
        assert_eq!(gf_packing_girth(p, 6, &mut g), GfStatus::Ok);
        assert_eq!(
            g,
            GfGirth {
                value: 4,
                exceeds: false
            }
        );
        let mut co = GfGirth {
            value: 0,
            exceeds: false,
        };
        assert_eq!(gf_packing_cogirth(p, p, 4, &mut co), GfStatus::Ok);
        assert_eq!(
            co,
            GfGirth {
                value: 2,
                exceeds: false
            }
        );

        let mut out = ptr::null_mut();
        assert_eq!(gf_packing_to_json(p, &mut out), GfStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(gf_packing_from_json(out, &mut again), GfStatus::Ok);
        let mut full = false;
        assert_eq!(gf_packing_is_decomposition(again, &mut full), GfStatus::Ok);
        assert!(full);
        gf_string_free(out);
        gf_packing_free(again);
        gf_packing_free(p);
    }
    assert!(gf_last_error_message().is_null());
}

#[test]
fn errors_map_to_codes() {
    unsafe {
        let bad = CString::new(r#"{"n":4,"r":2,"q":3,"blocks":[[0,1,2],[0,1,3]]}"#).unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(gf_packing_from_json(bad.as_ptr(), &mut p), GfStatus::Json);
        assert!(p.is_null());
        assert!(last_error().contains("[0, 1]"));

        let mut q = ptr::null_mut();
        assert_eq!(
            gf_generate(6, 3, 2, 3, 0, true, 1000, &mut q),
            GfStatus::NotAdmissible
        );
        assert!(last_error().contains("not admissible"));

        let mut b = ptr::null_mut();
        assert_eq!(
            gf_booster_build(4, 3, 4, 0, &mut b),
            GfStatus::MissingBaseData
        );

        assert_eq!(gf_packing_len(ptr::null(), &mut 0), GfStatus::NullPointer);
        assert_eq!(
            gf_packing_from_json(ptr::null(), &mut p),
            GfStatus::NullPointer
        );
        gf_packing_free(ptr::null_mut());
        gf_string_free(ptr::null_mut());
    }
}

#[test]
fn generate_and_boost() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(
            gf_generate(7, 3, 2, 3, 1, true, 60_000, &mut p),
            GfStatus::Ok
        );
        let mut full = false;
        assert_eq!(gf_packing_is_decomposition(p, &mut full), GfStatus::Ok);
        assert!(full);
        gf_packing_free(p);

        let mut b = ptr::null_mut();
        assert_eq!(gf_booster_build(3, 2, 4, 0, &mut b), GfStatus::Ok);
        let mut g = GfGirth {
            value: 0,
            exceeds: false,
        };
        assert_eq!(gf_booster_rooted_girth(b, 4, &mut g), GfStatus::Ok);
        assert!(g.exceeds);
        let mut edges = 0;
        assert_eq!(gf_booster_edge_count(b, &mut edges), GfStatus::Ok);
        assert!(edges > 0);
        let mut json = ptr::null_mut();
        assert_eq!(gf_booster_to_json(b, &mut json), GfStatus::Ok);
        assert!(CStr::from_ptr(json).to_str().unwrap().contains("root"));
        gf_string_free(json);
        gf_booster_free(b);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(gf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/girthforge.h"),
    )
    .unwrap();
    for name in [
        "typedef struct GfPacking GfPacking",
        "typedef struct GfRootedBooster GfRootedBooster",
        "GF_STATUS_NOT_ADMISSIBLE",
        "gf_packing_from_json",
        "gf_generate",
        "gf_booster_rooted_girth",
        "gf_last_error_message",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles the C smoke program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    // The test binary sits next to the freshly built library in the deps directory.
    let lib = exe.parent().unwrap().join("libgirthforge_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!(
            "skipping: no C compiler or no static library at {}",
            lib.display()
        );
        return;
    }
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("gf_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    assert!(
        run.status.success(),
        "smoke program exited with {:?}",
        run.status.code()
    );
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
