use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use tp_mahler_ffi::*;

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    tpm_string_free(s);
    out
}

fn last_error() -> String {
    let p = tpm_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn table_lifecycle() {
    unsafe {
        let mut tab = ptr::null_mut();
        assert_eq!(
            tpm_coeffs_generate(2, 20, TpmAlgorithm::Diff, &mut tab),
            TpmStatus::Ok
        );
        assert_eq!(tpm_coeffs_order(tab), 20);
        assert_eq!(tpm_coeffs_prime(tab), 2);

        let mut s = ptr::null_mut();
        assert_eq!(tpm_coeffs_entry(tab, 20, &mut s), TpmStatus::Ok);
        assert_eq!(take(s), "144427/262144");
        assert_eq!(tpm_coeffs_entry(tab, 1, &mut s), TpmStatus::Ok);
        assert_eq!(take(s), "0/1");

        let mut violations = usize::MAX;
        assert_eq!(tpm_coeffs_verify(tab, &mut violations), TpmStatus::Ok);
        assert_eq!(violations, 0);

        assert_eq!(tpm_coeffs_to_csv(tab, &mut s), TpmStatus::Ok);
        let csv = take(s);
        assert!(csv.starts_with("p,n,numerator,denominator\n2,0,1,1\n"));
        assert_eq!(csv.lines().count(), 22);

        assert_eq!(tpm_coeffs_to_json(tab, &mut s), TpmStatus::Ok);
        let json = CString::new(take(s)).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(
            tpm_coeffs_from_json(json.as_ptr(), &mut back),
            TpmStatus::Ok
        );
        assert_eq!(tpm_coeffs_order(back), 20);
        assert_eq!(tpm_coeffs_entry(back, 20, &mut s), TpmStatus::Ok);
        assert_eq!(take(s), "144427/262144");

        tpm_coeffs_free(back);
        tpm_coeffs_free(tab);
        tpm_coeffs_free(ptr::null_mut());
    }
}

#[test]
fn table_errors() {
    unsafe {
        let mut tab = ptr::null_mut();
        assert_eq!(
            tpm_coeffs_generate(9, 10, TpmAlgorithm::LogExp, &mut tab),
            TpmStatus::InvalidArgument
        );
        assert!(tab.is_null());
        assert_eq!(last_error(), "9 is not a prime");
        assert_eq!(
            tpm_coeffs_generate(3, 10, TpmAlgorithm::LogExp, ptr::null_mut()),
            TpmStatus::NullPointer
        );

        assert_eq!(
            tpm_coeffs_generate(3, 6, TpmAlgorithm::Cauchy, &mut tab),
            TpmStatus::Ok
        );
        let mut s = ptr::null_mut();
        assert_eq!(tpm_coeffs_entry(tab, 7, &mut s), TpmStatus::InvalidArgument);
        assert!(last_error().contains("index 7"));
        assert_eq!(
            tpm_coeffs_entry(ptr::null(), 0, &mut s),
            TpmStatus::NullPointer
        );
        tpm_coeffs_free(tab);

        let bad = CString::new("{not json").unwrap();
        assert_eq!(
            tpm_coeffs_from_json(bad.as_ptr(), &mut tab),
            TpmStatus::Parse
        );
        tpm_clear_error();
        assert!(tpm_last_error().is_null());
    }
}

#[test]
fn evaluation_routes_agree() {
    unsafe {
        let alpha = CString::new("1/2").unwrap();
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(
            tpm_eval(2, alpha.as_ptr(), TpmMethod::Product, 256, &mut a),
            TpmStatus::Ok
        );
        assert_eq!(
            tpm_eval(2, alpha.as_ptr(), TpmMethod::LogSeries, 256, &mut b),
            TpmStatus::Ok
        );
        assert!((tpm_value_re(a) - tpm_value_re(b)).abs() < 1e-15);
        assert_eq!(tpm_value_im(a), 0.0);
        assert!(tpm_value_radius(a) <= 1e-30 && tpm_value_radius(b) <= 1e-30);
        assert!(tpm_value_terms(a) > 0 && tpm_value_terms(b) > tpm_value_terms(a));

        let mut s = ptr::null_mut();
        assert_eq!(tpm_value_re_string(a, &mut s), TpmStatus::Ok);
        let ra = take(s);
        assert_eq!(tpm_value_re_string(b, &mut s), TpmStatus::Ok);
        let rb = take(s);
        assert_eq!(ra[..60], rb[..60]);
        assert_eq!(tpm_value_im_string(a, &mut s), TpmStatus::Ok);
        let im = take(s);
        assert_eq!(im.parse::<f64>().unwrap(), 0.0, "{im}");
        tpm_value_free(a);
        tpm_value_free(b);
        assert!(tpm_value_re(ptr::null()).is_nan());
    }
}

#[test]
fn evaluation_errors() {
    unsafe {
        let mut v = ptr::null_mut();
        let outside = CString::new("3/5+4/5i").unwrap();
        assert_eq!(
            tpm_eval(3, outside.as_ptr(), TpmMethod::Product, 128, &mut v),
            TpmStatus::Precondition
        );
        let garbage = CString::new("one half").unwrap();
        assert_ne!(
            tpm_eval(2, garbage.as_ptr(), TpmMethod::Product, 128, &mut v),
            TpmStatus::Ok
        );
        assert_eq!(
            tpm_eval(2, ptr::null(), TpmMethod::Product, 128, &mut v),
            TpmStatus::NullPointer
        );
        assert!(v.is_null());
    }
}

#[test]
fn auxiliary_scheme() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(tpm_aux_build(2, 3, &mut s), TpmStatus::Ok);
        assert_eq!(tpm_aux_vanishing_order(s), 9);
        assert_eq!(tpm_aux_nullity(s), 7);
        let mut json = ptr::null_mut();
        assert_eq!(tpm_aux_to_json(s, &mut json), TpmStatus::Ok);
        let json = take(json);
        assert!(json.contains("\"P\":3"));
        assert!(json.contains("\"achieved_vanishing\":9"));
        tpm_aux_free(s);

        assert_eq!(tpm_aux_build(2, 1, &mut s), TpmStatus::InvalidArgument);
        assert!(last_error().contains("at least 2"));
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(tpm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
