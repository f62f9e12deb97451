//! C ABI over `fullgroup-lab`.
//!
//! Objects cross the boundary as opaque handles created by `fgl_*_new`-style
//! functions and released by the matching `fgl_*_free`. Every fallible call
//! returns an [`FglStatus`]; on failure the message is available from
//! [`fgl_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use fullgroup_lab::fullgroup::{fibonacci_generators, CocycleElement, GeneratorSet};
use fullgroup_lab::io::{ElementJson, SpecFile};
use fullgroup_lab::points::Point;
use fullgroup_lab::randwalk::{convolution_powers, ratio_to_f64, GroupDistribution, StepMeasure};
use fullgroup_lab::symbolic::Subshift;
use fullgroup_lab::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FglStatus {
    Ok = 0,
    /// a required pointer was null or a string was not UTF-8
    NullOrInvalid = 1,
    /// malformed input or a failed validation
    Validation = 2,
    ResourceLimit = 3,
    Internal = 4,
    Panic = 5,
    /// an output buffer was too small; the required size was still reported
    BufferTooSmall = 6,
}

/// A subshift together with its memoized language.
pub struct FglSubshift(Arc<Subshift>);

/// A point of a subshift.
pub struct FglPoint(Point);

/// A full-group element.
pub struct FglElement(CocycleElement);

/// A named generator set.
pub struct FglGenerators(GeneratorSet);

/// A symmetric step measure.
pub struct FglMeasure(StepMeasure);

/// An exact convolution power.
pub struct FglDistribution(GroupDistribution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FglStatus {
    match e.exit_code() {
        3 => FglStatus::ResourceLimit,
        4 => FglStatus::Internal,
        _ => FglStatus::Validation,
    }
}

struct Failure(FglStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn invalid(what: &str) -> Failure {
    Failure(FglStatus::NullOrInvalid, format!("{what} is null or invalid"))
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FglStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FglStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            FglStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| invalid(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(invalid(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(invalid("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(invalid("output pointer"));
    }
    *out = value;
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fgl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fgl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a spec JSON document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_subshift_from_json(json: *const c_char, out: *mut *mut FglSubshift) -> FglStatus {
    guard(|| {
        let spec = SpecFile::parse(text(json, "json")?)?;
        put(out, FglSubshift(spec.subshift()?))
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fgl_subshift_free(s: *mut FglSubshift) {
    release(s)
}

/// Number of admissible words of length `n`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_subshift_complexity(s: *const FglSubshift, n: usize, out: *mut u64) -> FglStatus {
    guard(|| {
        let s = borrow(s, "subshift")?;
        write(out, s.0.complexity(n)?)
    })
}

/// Whether `word` is admissible.
///
/// # Safety
/// `s` must be a live handle, `word` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_subshift_is_admissible(s: *const FglSubshift, word: *const c_char, out: *mut bool) -> FglStatus {
    guard(|| {
        let s = borrow(s, "subshift")?;
        write(out, s.0.is_admissible(text(word, "word")?.as_bytes())?)
    })
}

/// The default point of the subshift's family.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_point_default(s: *const FglSubshift, out: *mut *mut FglPoint) -> FglStatus {
    guard(|| {
        let s = borrow(s, "subshift")?;
        put(out, FglPoint(Point::default_for(s.0.clone())?))
    })
}

/// # Safety
/// `p` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fgl_point_free(p: *mut FglPoint) {
    release(p)
}

/// Copy the letters `x_{center-radius} ..= x_{center+radius}` into `buf`
/// (no terminator). `out_len` receives `2·radius + 1` even when `buf_len`
/// is too small, in which case nothing is copied.
///
/// # Safety
/// `p` must be a live handle, `buf` valid for `buf_len` bytes, `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_point_window(
    p: *const FglPoint,
    center: i64,
    radius: usize,
    buf: *mut u8,
    buf_len: usize,
    out_len: *mut usize,
) -> FglStatus {
    guard(|| {
        let p = borrow(p, "point")?;
        let w = p.0.window(center, radius)?;
        write(out_len, w.len())?;
        if buf_len < w.len() {
            return Err(Failure(FglStatus::BufferTooSmall, format!("window needs {} bytes", w.len())));
        }
        if buf.is_null() {
            return Err(invalid("buffer"));
        }
        ptr::copy_nonoverlapping(w.as_bytes().as_ptr(), buf, w.len());
        Ok(())
    })
}

/// The builtin Fibonacci generators `alpha`, `beta`, `gamma`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_generators_fibonacci(s: *const FglSubshift, out: *mut *mut FglGenerators) -> FglStatus {
    guard(|| {
        let s = borrow(s, "subshift")?;
        put(out, FglGenerators(fibonacci_generators(&s.0)?))
    })
}

/// # Safety
/// `g` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fgl_generators_free(g: *mut FglGenerators) {
    release(g)
}

/// Number of generators, 0 for a null handle.
///
/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fgl_generators_len(g: *const FglGenerators) -> usize {
    g.as_ref().map_or(0, |g| g.0.len())
}

/// A copy of generator `index`.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_generators_get(g: *const FglGenerators, index: usize, out: *mut *mut FglElement) -> FglStatus {
    guard(|| {
        let g = borrow(g, "generators")?;
        let e = g.0.elements().get(index).cloned().ok_or_else(|| {
            Failure(FglStatus::Validation, format!("generator index {index} out of range"))
        })?;
        put(out, FglElement(e))
    })
}

/// Parse an element from `{"depth": l, "entries": [{"word": w, "k": k}]}`.
///
/// # Safety
/// `s` must be a live handle, `json` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_element_from_json(s: *const FglSubshift, json: *const c_char, out: *mut *mut FglElement) -> FglStatus {
    guard(|| {
        let s = borrow(s, "subshift")?;
        let parsed: ElementJson = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        put(out, FglElement(parsed.to_element(s.0.clone())?))
    })
}

/// Serialize an element; release the string with [`fgl_string_free`].
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_element_to_json(e: *const FglElement, out: *mut *mut c_char) -> FglStatus {
    guard(|| {
        let e = borrow(e, "element")?;
        let json = serde_json::to_string(&ElementJson::from_element(&e.0)).map_err(Error::from)?;
        let c = CString::new(json).map_err(|_| Failure(FglStatus::Internal, "nul in JSON".into()))?;
        write(out, c.into_raw())
    })
}

/// # Safety
/// `e` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fgl_element_free(e: *mut FglElement) {
    release(e)
}

/// The identity of the subshift's full group.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_element_identity(s: *const FglSubshift, out: *mut *mut FglElement) -> FglStatus {
    guard(|| {
        let s = borrow(s, "subshift")?;
        put(out, FglElement(CocycleElement::identity(s.0.clone())?))
    })
}

/// `g · h`, applying `h` first.
///
/// # Safety
/// `g`, `h` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_element_compose(g: *const FglElement, h: *const FglElement, out: *mut *mut FglElement) -> FglStatus {
    guard(|| {
        let (g, h) = (borrow(g, "g")?, borrow(h, "h")?);
        put(out, FglElement(g.0.compose(&h.0)?))
    })
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_element_inverse(g: *const FglElement, out: *mut *mut FglElement) -> FglStatus {
    guard(|| {
        let g = borrow(g, "g")?;
        put(out, FglElement(g.0.inverse()?))
    })
}

/// # Safety
/// `g`, `h` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_element_equals(g: *const FglElement, h: *const FglElement, out: *mut bool) -> FglStatus {
    guard(|| {
        let (g, h) = (borrow(g, "g")?, borrow(h, "h")?);
        write(out, g.0.equals(&h.0)?)
    })
}

/// Canonical depth and maximal shift.
///
/// # Safety
/// `g` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_element_shape(g: *const FglElement, depth: *mut usize, max_shift: *mut u64) -> FglStatus {
    guard(|| {
        let g = borrow(g, "g")?;
        write(depth, g.0.depth())?;
        write(max_shift, g.0.max_shift())
    })
}

/// `k_g` at `τ^position p`.
///
/// # Safety
/// `g`, `p` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_element_evaluate(g: *const FglElement, p: *const FglPoint, position: i64, out: *mut i64) -> FglStatus {
    guard(|| {
        let (g, p) = (borrow(g, "g")?, borrow(p, "point")?);
        write(out, g.0.evaluate(&p.0, position)?)
    })
}

/// Uniform measure on the generators and their inverses.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_measure_uniform(g: *const FglGenerators, out: *mut *mut FglMeasure) -> FglStatus {
    guard(|| {
        let g = borrow(g, "generators")?;
        put(out, FglMeasure(StepMeasure::uniform(&g.0)?))
    })
}

/// # Safety
/// `m` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fgl_measure_free(m: *mut FglMeasure) {
    release(m)
}

/// Exact `μ^{*n}`, failing with `FGL_STATUS_RESOURCE_LIMIT` above `cap` support elements.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_convolution_power(m: *const FglMeasure, n: usize, cap: usize, out: *mut *mut FglDistribution) -> FglStatus {
    guard(|| {
        let m = borrow(m, "measure")?;
        let d = convolution_powers(&m.0, n, cap)?.pop().expect("n + 1 powers");
        put(out, FglDistribution(d))
    })
}

/// # Safety
/// `d` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fgl_distribution_free(d: *mut FglDistribution) {
    release(d)
}

/// Support size, 0 for a null handle.
///
/// # Safety
/// `d` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fgl_distribution_len(d: *const FglDistribution) -> usize {
    d.as_ref().map_or(0, |d| d.0.len())
}

/// Shannon entropy in nats.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_distribution_entropy(d: *const FglDistribution, out: *mut f64) -> FglStatus {
    guard(|| {
        let d = borrow(d, "distribution")?;
        write(out, d.0.entropy())
    })
}

/// Probability of `g`, as a double.
///
/// # Safety
/// `d`, `g` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgl_distribution_probability(d: *const FglDistribution, g: *const FglElement, out: *mut f64) -> FglStatus {
    guard(|| {
        let (d, g) = (borrow(d, "distribution")?, borrow(g, "element")?);
        write(out, ratio_to_f64(&d.0.probability(&g.0)))
    })
}
