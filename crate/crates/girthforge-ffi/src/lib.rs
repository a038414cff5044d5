//! C ABI over `girthforge`.
//!
//! Objects cross the boundary as opaque handles created by `gf_*_new`/`gf_*_from_json`
//! style constructors and released with the matching `gf_*_free`. Every fallible call
//! returns a [`GfStatus`]; on failure, [`gf_last_error_message`] describes the error for
//! the calling thread. Strings returned to the caller are released with [`gf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use girthforge::boosters::{build_rooted_booster, RootedBooster, DEFAULT_ATTEMPTS};
use girthforge::configurations::{cogirth, girth, rooted_booster_girth, GirthReport, GirthValue};
use girthforge::generator::{pipeline_generate, stage_rng, GenConfig};
use girthforge::hypergraph::{admissible, from_json, to_json, Packing};
use girthforge::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    InvalidInput = 1,
    Precondition = 2,
    NotAMatching = 3,
    NotAdmissible = 4,
    Verification = 5,
    BudgetExhausted = 6,
    RetryExhausted = 7,
    MissingBaseData = 8,
    Json = 9,
    Io = 10,
    NullPointer = 11,
    Panic = 12,
}

impl From<&Error> for GfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) => GfStatus::InvalidInput,
            Error::Precondition(_) => GfStatus::Precondition,
            Error::NotAMatching(_) => GfStatus::NotAMatching,
            Error::NotAdmissible { .. } => GfStatus::NotAdmissible,
            Error::Verification(_) => GfStatus::Verification,
            Error::BudgetExhausted(_) => GfStatus::BudgetExhausted,
            Error::RetryExhausted(_) => GfStatus::RetryExhausted,
            Error::MissingBaseData(_) => GfStatus::MissingBaseData,
            Error::Json(_) => GfStatus::Json,
            Error::Io(_) => GfStatus::Io,
        }
    }
}

/// Girth or cogirth as plain data: `value` is the smallest configuration size found,
/// or the search bound when `exceeds` is set.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GfGirth {
    pub value: usize,
    pub exceeds: bool,
}

impl From<&GirthReport> for GfGirth {
    fn from(r: &GirthReport) -> Self {
        match r.value {
            GirthValue::Finite(v) => GfGirth {
                value: v,
                exceeds: false,
            },
            GirthValue::Exceeds(m) => GfGirth {
                value: m,
                exceeds: true,
            },
        }
    }
}

/// Opaque packing of cliques in a host hypergraph.
pub struct GfPacking(Packing);

/// Opaque rooted booster.
pub struct GfRootedBooster(RootedBooster);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn set_error(msg: String) {
    let text = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            GfStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            GfStatus::from(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} is NULL"));
            GfStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            GfStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be NULL or a valid pointer to a `T` that outlives the returned reference.
unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

/// # Safety
/// `p` must be NULL or valid for writes of one `T`.
unsafe fn write<T>(p: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(value);
    Ok(())
}

/// # Safety
/// `s` must be NULL or a NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure::Lib(Error::InvalidInput(format!("{what} is not UTF-8: {e}"))))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure::Lib(Error::InvalidInput(e.to_string())))
}

/// Description of the calling thread's most recent failure, or NULL after a success.
/// Valid until the next `gf_*` call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn gf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string returned by a `gf_*` function, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Whether K_n^r admits a K_q^r decomposition by the divisibility conditions.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_admissible(n: usize, q: usize, r: usize, out: *mut bool) -> GfStatus {
    guard(|| write(out, admissible(n, q, r)?, "out"))
}

/// Parses a packing from JSON. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_packing_from_json(
    json: *const c_char,
    out: *mut *mut GfPacking,
) -> GfStatus {
    guard(|| {
        let packing: Packing = from_json(read_str(json, "json")?)?;
        write(out, Box::into_raw(Box::new(GfPacking(packing))), "out")
    })
}

/// Serializes a packing; release `*out` with `gf_string_free`.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_packing_to_json(
    p: *const GfPacking,
    out: *mut *mut c_char,
) -> GfStatus {
    guard(|| {
        let p = deref(p, "packing")?;
        write(out, into_c_string(to_json(&p.0)?)?, "out")
    })
}

/// # Safety
/// `p` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_packing_free(p: *mut GfPacking) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of cliques in the packing.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_packing_len(p: *const GfPacking, out: *mut usize) -> GfStatus {
    guard(|| write(out, deref(p, "packing")?.0.len(), "out"))
}

/// Whether the packing covers every host edge.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_packing_is_decomposition(
    p: *const GfPacking,
    out: *mut bool,
) -> GfStatus {
    guard(|| write(out, deref(p, "packing")?.0.is_decomposition(), "out"))
}

/// Girth of the packing, searching configurations of size up to `gmax`.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_packing_girth(
    p: *const GfPacking,
    gmax: usize,
    out: *mut GfGirth,
) -> GfStatus {
    guard(|| {
        let report = girth(&deref(p, "packing")?.0, gmax)?;
        write(out, GfGirth::from(&report), "out")
    })
}

/// Cogirth of two packings on the same host.
///
/// # Safety
/// `a` and `b` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_packing_cogirth(
    a: *const GfPacking,
    b: *const GfPacking,
    gmax: usize,
    out: *mut GfGirth,
) -> GfStatus {
    guard(|| {
        let report = cogirth(
            &deref(a, "first packing")?.0,
            &deref(b, "second packing")?.0,
            gmax,
        )?;
        write(out, GfGirth::from(&report), "out")
    })
}

/// Runs the generation pipeline on K_n^r. With `complete`, asks for a full decomposition
/// and fails with `GF_STATUS_NOT_ADMISSIBLE` for inadmissible n; a decomposition that is
/// not reached within the budget yields the best partial packing with status OK.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_generate(
    n: usize,
    q: usize,
    r: usize,
    g: usize,
    seed: u64,
    complete: bool,
    budget_ms: u64,
    out: *mut *mut GfPacking,
) -> GfStatus {
    guard(|| {
        let cfg = GenConfig {
            seed,
            g,
            budget_ms,
            ..GenConfig::default()
        };
        let (packing, _) = pipeline_generate(n, q, r, g, complete, &cfg)?;
        write(out, Box::into_raw(Box::new(GfPacking(packing))), "out")
    })
}

/// Builds a rooted booster whose rooted girth exceeds `g`. Uniformity 3 and above need
/// base data and fail with `GF_STATUS_MISSING_BASE_DATA`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_booster_build(
    q: usize,
    r: usize,
    g: usize,
    seed: u64,
    out: *mut *mut GfRootedBooster,
) -> GfStatus {
    guard(|| {
        let mut rng = stage_rng(seed, 0);
        let rb = build_rooted_booster(q, r, g, None, DEFAULT_ATTEMPTS, &mut rng)?;
        write(out, Box::into_raw(Box::new(GfRootedBooster(rb))), "out")
    })
}

/// # Safety
/// `b` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_booster_to_json(
    b: *const GfRootedBooster,
    out: *mut *mut c_char,
) -> GfStatus {
    guard(|| {
        let b = deref(b, "booster")?;
        write(out, into_c_string(to_json(&b.0)?)?, "out")
    })
}

/// Number of booster edges outside the root.
///
/// # Safety
/// `b` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_booster_edge_count(
    b: *const GfRootedBooster,
    out: *mut usize,
) -> GfStatus {
    guard(|| write(out, deref(b, "booster")?.0.edges().len(), "out"))
}

/// Rooted girth of the booster, searching up to `gmax`.
///
/// # Safety
/// `b` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gf_booster_rooted_girth(
    b: *const GfRootedBooster,
    gmax: usize,
    out: *mut GfGirth,
) -> GfStatus {
    guard(|| {
        let report = rooted_booster_girth(&deref(b, "booster")?.0, gmax)?;
        write(out, GfGirth::from(&report), "out")
    })
}

/// # Safety
/// `b` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_booster_free(b: *mut GfRootedBooster) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}
