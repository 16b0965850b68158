use std::ffi::{CStr, CString};
use std::ptr;

use whylog_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn fixture(name: &str) -> CString {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    c(&std::fs::read_to_string(path).unwrap())
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(whylog_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

unsafe fn load(name: &str) -> *mut WhylogModel {
    let mut m = ptr::null_mut();
    assert_eq!(whylog_model_load(fixture(name).as_ptr(), &mut m), WhylogStatus::Ok);
    m
}

unsafe fn formula(s: &str) -> *mut WhylogFormula {
    let mut f = ptr::null_mut();
    assert_eq!(whylog_formula_parse(c(s).as_ptr(), &mut f), WhylogStatus::Ok);
    f
}

unsafe fn check(m: *const WhylogModel, w: &str, f: *const WhylogFormula, jl: bool) -> bool {
    let mut v = false;
    assert_eq!(
        whylog_check(m, c(w).as_ptr(), f, jl, &mut v),
        WhylogStatus::Ok,
        "{}",
        last_error()
    );
    v
}

#[test]
fn checks_example_verdicts() {
    unsafe {
        let m = load("example2.mod");
        let ky = formula("Ky[i]p");
        let conj = formula("(K[i]p & ~Ky[i]p & Ky[j]p & K[i]Ky[j]p)");
        assert!(!check(m, "w2", ky, false));
        assert!(check(m, "w2", conj, false));
        assert!(check(m, "w2", conj, true));
        whylog_formula_free(ky);
        whylog_formula_free(conj);
        whylog_model_free(m);
    }
}

#[test]
fn transforms_round_trip_through_text() {
    unsafe {
        let m = load("chain.mod");
        let mut fm = ptr::null_mut();
        assert_eq!(whylog_model_factive(m, &mut fm), WhylogStatus::Ok);
        let mut jm = ptr::null_mut();
        assert_eq!(whylog_model_jl(m, &mut jm), WhylogStatus::Ok);
        assert!(whylog_model_is_jl(jm) && !whylog_model_is_jl(fm));
        assert_eq!(whylog_model_factive(jm, &mut fm), WhylogStatus::WrongModelKind);

        let mut text = ptr::null_mut();
        assert_eq!(whylog_model_print(jm, &mut text), WhylogStatus::Ok);
        let printed = CStr::from_ptr(text).to_str().unwrap().to_string();
        assert!(printed.starts_with("model jl"));
        let mut again = ptr::null_mut();
        assert_eq!(whylog_model_load(text, &mut again), WhylogStatus::Ok);
        assert!(whylog_model_is_jl(again));
        let q = formula("Ky[i]q");
        assert_eq!(check(m, "w1", q, false), check(again, "w1", q, false));

        whylog_string_free(text);
        whylog_formula_free(q);
        for h in [m, fm, jm, again] {
            whylog_model_free(h);
        }
    }
}

#[test]
fn formulas_print_canonically() {
    unsafe {
        let f = formula("Ky[i] (p->q)");
        let mut out = ptr::null_mut();
        assert_eq!(whylog_formula_print(f, &mut out), WhylogStatus::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), "Ky[i] (p -> q)");
        whylog_string_free(out);
        whylog_formula_free(f);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(whylog_formula_parse(c("Ky[i").as_ptr(), &mut f), WhylogStatus::Parse);
        assert!(f.is_null());
        assert!(last_error().contains("column"), "{}", last_error());

        let mut m = ptr::null_mut();
        assert_eq!(
            whylog_model_load(c("model\nend\n").as_ptr(), &mut m),
            WhylogStatus::Model
        );
        assert_eq!(whylog_model_load(ptr::null(), &mut m), WhylogStatus::NullArgument);

        let m = load("example2.mod");
        let p = formula("p");
        let mut v = false;
        assert_eq!(whylog_check(m, c("w9").as_ptr(), p, false, &mut v), WhylogStatus::Model);
        assert!(last_error().contains("w9"));
        assert_eq!(
            whylog_check(m, c("w1").as_ptr(), p, false, ptr::null_mut()),
            WhylogStatus::NullArgument
        );
        assert_eq!(whylog_check(m, c("w1").as_ptr(), p, false, &mut v), WhylogStatus::Ok);
        assert_eq!(last_error(), "");
        whylog_formula_free(p);
        whylog_model_free(m);
        whylog_model_free(ptr::null_mut());
    }
}

#[test]
fn proofs_are_checked() {
    unsafe {
        let (mut ok, mut line) = (false, 99);
        assert_eq!(
            whylog_proof_check(fixture("5yk.proof").as_ptr(), &mut ok, &mut line),
            WhylogStatus::Ok
        );
        assert!(ok);
        assert_eq!(line, 0);
        assert_eq!(
            whylog_proof_check(fixture("5yk_tampered.proof").as_ptr(), &mut ok, &mut line),
            WhylogStatus::Ok
        );
        assert!(!ok);
        assert_eq!(line, 3);
        assert_eq!(
            whylog_proof_check(c("proof XYZ\nend\n").as_ptr(), &mut ok, &mut line),
            WhylogStatus::Proof
        );
    }
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(whylog_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
