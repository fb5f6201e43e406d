//! C ABI over `rearrange-core`.
//!
//! Instances live behind an opaque [`RrInstance`] handle created from JSON and
//! released with [`rr_instance_free`]. Every fallible call returns an
//! [`RrStatus`]; on failure the message is available from
//! [`rr_last_error_message`] on the same thread. Strings handed out by the
//! library must be released with [`rr_string_free`]. Exact rationals cross the
//! boundary as decimal strings such as `"3/4"`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rearrange_core::constants::cp_constant;
use rearrange_core::exactnum::Rational;
use rearrange_core::io::InstanceFile;
use rearrange_core::maximal::MaximalProfile;
use rearrange_core::stepfn::{rearrange, weak_lp_norm};
use rearrange_core::verify::Instance;
use rearrange_core::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Argument = 5,
    Undefined = 6,
    InfiniteLevelSet = 7,
    Numeric = 8,
    Panic = 9,
}

impl From<&Error> for RrStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => RrStatus::Domain,
            Error::Argument(_) => RrStatus::Argument,
            Error::Parse(_) => RrStatus::Parse,
            Error::Undefined(_) => RrStatus::Undefined,
            Error::InfiniteLevelSet(_) => RrStatus::InfiniteLevelSet,
            Error::Numeric(_) => RrStatus::Numeric,
        }
    }
}

/// Opaque handle: a validated instance with its maximal-function tables.
pub struct RrInstance {
    instance: Instance,
    profile: MaximalProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Failure(RrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(RrStatus::from(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            RrStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RrStatus::Panic
        }
    }
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(RrStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure(RrStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// As for [`read_str`].
unsafe fn read_rational(s: *const c_char, what: &str) -> Result<Rational, Failure> {
    Ok(read_str(s, what)?.parse::<Rational>()?)
}

/// # Safety
/// `h` must be null or a live handle.
unsafe fn handle<'a>(h: *const RrInstance) -> Result<&'a RrInstance, Failure> {
    h.as_ref().ok_or_else(|| Failure(RrStatus::NullPointer, "instance handle is null".into()))
}

/// # Safety
/// `out` must be null or writable.
unsafe fn put_string(out: *mut *mut c_char, value: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(RrStatus::NullPointer, "output pointer is null".into()));
    }
    let c = CString::new(value).map_err(|_| Failure(RrStatus::Argument, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("library types always serialize")
}

/// Parses an instance file (`{"measure": ..., "function": ..., "metadata": ...}`)
/// and stores a new handle in `*out`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rr_instance_from_json(json: *const c_char, out: *mut *mut RrInstance) -> RrStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(RrStatus::NullPointer, "output pointer is null".into()));
        }
        let instance = InstanceFile::from_json(read_str(json, "json")?)?.into_instance()?;
        let profile = MaximalProfile::new(&instance.function, &instance.measure);
        *out = Box::into_raw(Box::new(RrInstance { instance, profile }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `h` must be null or a handle from [`rr_instance_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rr_instance_free(h: *mut RrInstance) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `M_μ f(x)` as an exact rational string.
///
/// # Safety
/// `h` a live handle, `x` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rr_maximal_at(h: *const RrInstance, x: *const c_char, out: *mut *mut c_char) -> RrStatus {
    guard(|| {
        let h = handle(h)?;
        let x = read_rational(x, "x")?;
        let value = h.profile.maximal_at(&x)?;
        put_string(out, value.to_string())
    })
}

/// `M_μ f(x)` for a float `x` (converted exactly), as a float.
///
/// # Safety
/// `h` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rr_maximal_at_f64(h: *const RrInstance, x: f64, out: *mut f64) -> RrStatus {
    guard(|| {
        let h = handle(h)?;
        if out.is_null() {
            return Err(Failure(RrStatus::NullPointer, "output pointer is null".into()));
        }
        let x = Rational::from_f64_exact(x)?;
        *out = h.profile.maximal_at(&x)?.to_f64();
        Ok(())
    })
}

/// `{"lambda", "set", "measure"}` for `E_λ = {M_μ f > λ}` as JSON.
///
/// # Safety
/// `h` a live handle, `lambda` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rr_superlevel_json(
    h: *const RrInstance,
    lambda: *const c_char,
    out: *mut *mut c_char,
) -> RrStatus {
    guard(|| {
        let h = handle(h)?;
        let lambda = read_rational(lambda, "lambda")?;
        put_string(out, to_json(&h.profile.superlevel(&lambda)?))
    })
}

/// The rearrangement `f*` as step-function JSON.
///
/// # Safety
/// `h` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rr_rearrange_json(h: *const RrInstance, out: *mut *mut c_char) -> RrStatus {
    guard(|| {
        let h = handle(h)?;
        let inst = &h.instance;
        put_string(out, to_json(&rearrange(&inst.function, &inst.measure)?))
    })
}

/// Weak-L^p norms of `M_μ f` and of `f`, each as value and error bound.
///
/// # Safety
/// `h` a live handle, `p` a NUL-terminated string, `out` an array of 4 writable doubles:
/// maximal value, maximal error bound, function value, function error bound.
#[no_mangle]
pub unsafe extern "C" fn rr_weak_norms(h: *const RrInstance, p: *const c_char, out: *mut f64) -> RrStatus {
    guard(|| {
        let h = handle(h)?;
        let p = read_rational(p, "p")?;
        if out.is_null() {
            return Err(Failure(RrStatus::NullPointer, "output pointer is null".into()));
        }
        let lhs = h.profile.weak_norm(&p)?;
        let rhs = weak_lp_norm(&h.instance.function, &h.instance.measure, &p)?;
        let out = std::slice::from_raw_parts_mut(out, 4);
        out.copy_from_slice(&[lhs.value, lhs.error_bound, rhs.value, rhs.error_bound]);
        Ok(())
    })
}

/// Certified bracket `[low, high]` of width at most `tol` around `C_p`.
///
/// # Safety
/// `p` and `tol` NUL-terminated strings, `low` and `high` writable.
#[no_mangle]
pub unsafe extern "C" fn rr_cp_constant(
    p: *const c_char,
    tol: *const c_char,
    low: *mut f64,
    high: *mut f64,
) -> RrStatus {
    guard(|| {
        let p = read_rational(p, "p")?;
        let tol = read_rational(tol, "tol")?;
        if low.is_null() || high.is_null() {
            return Err(Failure(RrStatus::NullPointer, "output pointer is null".into()));
        }
        let cp = cp_constant(&p, &tol)?;
        *low = cp.cp_low.to_f64();
        *high = cp.cp_high.to_f64();
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn rr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
