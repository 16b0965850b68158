//! C interface. Every handle is opaque and owned by the caller until passed
//! to its `_free` function. Strings returned through out-parameters are
//! released with `whylog_string_free`. A failing call returns a non-zero
//! status and leaves a message readable through `whylog_last_error` on the
//! same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use whylog::model::{load_any, print_model, Loaded};
use whylog::proofs::{check_proof, parse_proof};
use whylog::semantics::eval;
use whylog::syntax::{parse_formula, print_formula, Formula};
use whylog::transforms::{eval_jl, factive_transform, jl_transform, print_jl_model};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhylogStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Model = 4,
    Evaluation = 5,
    Proof = 6,
    WrongModelKind = 7,
    Panic = 8,
}

/// A loaded model: either an explanation model or a justification-style one.
pub struct WhylogModel(Loaded);

/// A parsed formula.
pub struct WhylogFormula(Formula);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(WhylogStatus, String);

fn fail(status: WhylogStatus, e: impl std::fmt::Display) -> Failure {
    Failure(status, e.to_string())
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> WhylogStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            WhylogStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            WhylogStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(WhylogStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(WhylogStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(WhylogStatus::NullArgument, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(WhylogStatus::NullArgument, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn whylog_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn whylog_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses model text. On success `*out` receives a new handle.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn whylog_model_load(source: *const c_char, out: *mut *mut WhylogModel) -> WhylogStatus {
    guard(|| {
        let loaded = load_any(text(source, "source")?).map_err(|e| fail(WhylogStatus::Model, e))?;
        put(out, Box::into_raw(Box::new(WhylogModel(loaded))))
    })
}

/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn whylog_model_free(model: *mut WhylogModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Whether the handle holds a justification-style model.
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn whylog_model_is_jl(model: *const WhylogModel) -> bool {
    matches!(model.as_ref(), Some(WhylogModel(Loaded::Justification(_))))
}

/// Canonical text of the model.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn whylog_model_print(model: *const WhylogModel, out: *mut *mut c_char) -> WhylogStatus {
    guard(|| {
        let s = match &handle(model, "model")?.0 {
            Loaded::Explanation(m) => print_model(m),
            Loaded::Justification(j) => print_jl_model(j),
        };
        put(out, c_string(s))
    })
}

/// Evaluates `formula` at the named world. Justification-style models use
/// the evidence semantics; with `jl` set, an explanation model is first
/// converted to one.
///
/// # Safety
/// `model` and `formula` must be live handles, `world` a NUL-terminated
/// string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn whylog_check(
    model: *const WhylogModel,
    world: *const c_char,
    formula: *const WhylogFormula,
    jl: bool,
    out: *mut bool,
) -> WhylogStatus {
    guard(|| {
        let world = text(world, "world")?;
        let f = &handle(formula, "formula")?.0;
        let eval_err = |e| fail(WhylogStatus::Evaluation, e);
        let value = match &handle(model, "model")?.0 {
            Loaded::Explanation(m) => {
                let m = m.with_query([f]).map_err(|e| fail(WhylogStatus::Model, e))?;
                let w = m.world_id(world).map_err(|e| fail(WhylogStatus::Model, e))?;
                if jl {
                    eval_jl(&jl_transform(&m), w, f).map_err(eval_err)?.value
                } else {
                    eval(&m, w, f).map_err(eval_err)?.value
                }
            }
            Loaded::Justification(j) => {
                let w = j.world_id(world).map_err(|e| fail(WhylogStatus::Model, e))?;
                eval_jl(j, w, f).map_err(eval_err)?.value
            }
        };
        put(out, value)
    })
}

/// The factive restriction of an explanation model, as a new handle.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn whylog_model_factive(model: *const WhylogModel, out: *mut *mut WhylogModel) -> WhylogStatus {
    guard(|| match &handle(model, "model")?.0 {
        Loaded::Explanation(m) => {
            let t = WhylogModel(Loaded::Explanation(factive_transform(m)));
            put(out, Box::into_raw(Box::new(t)))
        }
        Loaded::Justification(_) => Err(fail(WhylogStatus::WrongModelKind, "expected an explanation model")),
    })
}

/// The justification-style model of an explanation model, as a new handle.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn whylog_model_jl(model: *const WhylogModel, out: *mut *mut WhylogModel) -> WhylogStatus {
    guard(|| match &handle(model, "model")?.0 {
        Loaded::Explanation(m) => {
            let t = WhylogModel(Loaded::Justification(jl_transform(m)));
            put(out, Box::into_raw(Box::new(t)))
        }
        Loaded::Justification(_) => Err(fail(WhylogStatus::WrongModelKind, "expected an explanation model")),
    })
}

/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn whylog_formula_parse(source: *const c_char, out: *mut *mut WhylogFormula) -> WhylogStatus {
    guard(|| {
        let f = parse_formula(text(source, "source")?).map_err(|e| fail(WhylogStatus::Parse, e))?;
        put(out, Box::into_raw(Box::new(WhylogFormula(f))))
    })
}

/// Canonical text of the formula.
///
/// # Safety
/// `formula` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn whylog_formula_print(formula: *const WhylogFormula, out: *mut *mut c_char) -> WhylogStatus {
    guard(|| put(out, c_string(print_formula(&handle(formula, "formula")?.0))))
}

/// # Safety
/// `formula` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn whylog_formula_free(formula: *mut WhylogFormula) {
    if !formula.is_null() {
        drop(Box::from_raw(formula));
    }
}

/// Checks a proof text. `*accepted` tells whether every line checks;
/// `*failed_line` is the first failing line number, or 0.
///
/// # Safety
/// `source` must be a NUL-terminated string; both outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn whylog_proof_check(
    source: *const c_char,
    accepted: *mut bool,
    failed_line: *mut usize,
) -> WhylogStatus {
    guard(|| {
        if accepted.is_null() || failed_line.is_null() {
            return Err(fail(WhylogStatus::NullArgument, "output pointer is null"));
        }
        let proof = parse_proof(text(source, "source")?).map_err(|e| fail(WhylogStatus::Proof, e))?;
        let report = check_proof(&proof);
        put(accepted, report.accepted())?;
        put(failed_line, report.first_failure().map_or(0, |l| l.index))
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn whylog_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
