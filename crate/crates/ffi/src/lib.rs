//! C ABI over the `eqcoh` library.
//!
//! Models are opaque handles created from TOML text or a built-in name and
//! released with [`eqcoh_model_free`]. Every call returns an [`EqcohStatus`];
//! on failure [`eqcoh_last_error`] describes what went wrong. Strings handed
//! out by the library are released with [`eqcoh_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use eqcoh::cli::{builtin_model_text, execute, Params, Status};
use eqcoh::modelfile::{load, Loaded};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqcohStatus {
    Ok = 0,
    /// The computation ran and a checked identity failed.
    VerificationFailed = 1,
    /// Malformed model, unknown name, missing parameter, out of range.
    InputError = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    /// An internal invariant broke. The handle is still valid.
    Panic = 5,
}

/// A loaded model.
pub struct EqcohModel {
    loaded: Loaded,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', "\\0")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: EqcohStatus, msg: &str) -> EqcohStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> EqcohStatus) -> EqcohStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        fail(EqcohStatus::Panic, &msg.unwrap_or_else(|| "internal error".into()))
    })
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, EqcohStatus> {
    if p.is_null() {
        return Err(fail(EqcohStatus::NullPointer, &format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(EqcohStatus::InvalidUtf8, &format!("{what} is not UTF-8")))
}

fn hand_out(s: String, out: *mut *mut c_char) -> EqcohStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            EqcohStatus::Ok
        }
        Err(_) => fail(EqcohStatus::Panic, "output contains a NUL byte"),
    }
}

fn store(text: &str, out: *mut *mut EqcohModel) -> EqcohStatus {
    match load(text) {
        Ok(loaded) => {
            unsafe { *out = Box::into_raw(Box::new(EqcohModel { loaded })) };
            EqcohStatus::Ok
        }
        Err(e) => fail(EqcohStatus::InputError, &e.to_string()),
    }
}

/// Parse a model from TOML text. On success `*out` owns a new handle.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eqcoh_model_load(toml: *const c_char, out: *mut *mut EqcohModel) -> EqcohStatus {
    guard(|| {
        if out.is_null() {
            return fail(EqcohStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        match str_arg(toml, "toml") {
            Ok(t) => store(t, out),
            Err(s) => s,
        }
    })
}

/// Load a built-in model such as `su2`, `rotation`, `cp8`, `rp9` or `lens3_7`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eqcoh_model_builtin(name: *const c_char, out: *mut *mut EqcohModel) -> EqcohStatus {
    guard(|| {
        if out.is_null() {
            return fail(EqcohStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let name = match str_arg(name, "name") {
            Ok(n) => n,
            Err(s) => return s,
        };
        match builtin_model_text(name) {
            Some(t) => store(&t, out),
            None => fail(EqcohStatus::InputError, &format!("unknown model `{name}`")),
        }
    })
}

/// Release a model. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn eqcoh_model_free(model: *mut EqcohModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Run an operation (`check-gstar`, `weil-cohomology`, `chern-simons`,
/// `equiv-cw`, `diffcoh`, `verify-ses`, `witness-inj`) and return its JSON
/// result in `*out_json`. Negative degrees and a null `poly` mean "not
/// given". The JSON is set also when the status is `VerificationFailed`.
///
/// # Safety
/// `model` must be a live handle, `op` and `poly` (if not null)
/// NUL-terminated strings, `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eqcoh_execute(
    model: *const EqcohModel,
    op: *const c_char,
    max_degree: i32,
    degree: i32,
    poly: *const c_char,
    out_json: *mut *mut c_char,
) -> EqcohStatus {
    guard(|| {
        if model.is_null() || out_json.is_null() {
            return fail(EqcohStatus::NullPointer, "model or out_json is null");
        }
        *out_json = ptr::null_mut();
        let op = match str_arg(op, "op") {
            Ok(o) => o,
            Err(s) => return s,
        };
        let poly = if poly.is_null() {
            None
        } else {
            match str_arg(poly, "poly") {
                Ok(p) => Some(p.to_string()),
                Err(s) => return s,
            }
        };
        let params = Params {
            max_degree: u32::try_from(max_degree).ok(),
            degree: usize::try_from(degree).ok(),
            poly,
            indices: None,
        };
        match execute(op, &(*model).loaded, &params) {
            Ok(o) => {
                let st = hand_out(o.result.to_string(), out_json);
                match (st, o.status) {
                    (EqcohStatus::Ok, Status::Failed) => fail(EqcohStatus::VerificationFailed, &o.summary),
                    (st, _) => st,
                }
            }
            Err(e) => fail(EqcohStatus::InputError, &e.0),
        }
    })
}

/// Highest degree in which results on a finite model are certified, or -1
/// when the model has no geometric part. Complete models report `i32::MAX`.
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn eqcoh_model_certified_max(model: *const EqcohModel) -> i32 {
    match model.as_ref().and_then(|m| m.loaded.geometric.as_ref()) {
        Some(g) => i32::try_from(g.certified_max()).unwrap_or(i32::MAX),
        None => -1,
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn eqcoh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn eqcoh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn eqcoh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_round_trip() {
        let mut m = ptr::null_mut();
        let st = unsafe { eqcoh_model_builtin(c"cp8".as_ptr(), &mut m) };
        assert_eq!(st, EqcohStatus::Ok);
        assert_eq!(unsafe { eqcoh_model_certified_max(m) }, 15);
        unsafe { eqcoh_model_free(m) };
    }

    #[test]
    fn unknown_builtin_sets_error() {
        let mut m = ptr::null_mut();
        let st = unsafe { eqcoh_model_builtin(c"nope".as_ptr(), &mut m) };
        assert_eq!(st, EqcohStatus::InputError);
        assert!(m.is_null());
        let msg = unsafe { CStr::from_ptr(eqcoh_last_error()) }.to_str().unwrap();
        assert!(msg.contains("nope"));
    }
}
