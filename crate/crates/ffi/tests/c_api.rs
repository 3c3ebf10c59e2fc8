use std::ffi::{CStr, CString};
use std::ptr;

use randassign_ffi::*;

const PROFILE_A: &str = "n 3\n1: a b c\n2: b a c\n3: c a b\n";

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    ra_string_free(p);
    s
}

unsafe fn last_error() -> String {
    let p = ra_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_str().unwrap().to_string()
}

#[test]
fn evaluate_ps_on_profile_e() {
    unsafe {
        let text = CString::new("n 3\n1: a b c\n2: a c b\n3: a c b\n").unwrap();
        let mut profile = ptr::null_mut();
        assert_eq!(ra_profile_parse(text.as_ptr(), &mut profile), RaStatus::Ok);
        assert_eq!(ra_profile_n(profile), 3);

        let mut mech = ptr::null_mut();
        assert_eq!(ra_mechanism_ps(&mut mech), RaStatus::Ok);
        let mut a = ptr::null_mut();
        assert_eq!(ra_mechanism_evaluate(mech, profile, &mut a), RaStatus::Ok);

        let (mut num, mut den) = (0i64, 0i64);
        assert_eq!(ra_assignment_cell(a, 0, 1, &mut num, &mut den), RaStatus::Ok);
        assert_eq!((num, den), (2, 3));
        assert_eq!(ra_assignment_cell(a, 2, 2, &mut num, &mut den), RaStatus::Ok);
        assert_eq!((num, den), (1, 2));
        assert_eq!(
            ra_assignment_cell(a, 3, 0, &mut num, &mut den),
            RaStatus::InvalidArgument
        );

        let mut tsv = ptr::null_mut();
        assert_eq!(ra_assignment_to_tsv(a, &mut tsv), RaStatus::Ok);
        assert_eq!(take_string(tsv), "a\tb\tc\n1/3\t2/3\t0\n1/3\t1/6\t1/2\n1/3\t1/6\t1/2\n");

        ra_assignment_free(a);
        ra_mechanism_free(mech);
        ra_profile_free(profile);
    }
}

#[test]
fn linear_mechanism_and_property_checks() {
    unsafe {
        let (num, den) = ([1i64, 1, 0], [6i64, 12, 1]);
        let mut mech = ptr::null_mut();
        assert_eq!(
            ra_mechanism_linear(num.as_ptr(), den.as_ptr(), 3, &mut mech),
            RaStatus::Ok
        );
        let mut holds = false;
        let mut witness = ptr::null_mut();
        let sp = CString::new("sp").unwrap();
        assert_eq!(
            ra_check_property(mech, 3, sp.as_ptr(), &mut holds, &mut witness),
            RaStatus::Ok
        );
        assert!(holds);
        assert!(witness.is_null());
        let cfe = CString::new("cfe").unwrap();
        assert_eq!(
            ra_check_property(mech, 3, cfe.as_ptr(), &mut holds, &mut witness),
            RaStatus::Ok
        );
        assert!(!holds);
        assert!(take_string(witness).contains("abc|bac|cab"));
        ra_mechanism_free(mech);

        let (num, den) = ([1i64, 0, 0], [2i64, 1, 1]);
        let mut bad = ptr::null_mut();
        assert_eq!(
            ra_mechanism_linear(num.as_ptr(), den.as_ptr(), 3, &mut bad),
            RaStatus::InvalidArgument
        );
        assert!(bad.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut profile = ptr::null_mut();
        assert_eq!(ra_profile_parse(ptr::null(), &mut profile), RaStatus::NullPointer);
        let text = CString::new("n 3\n1: a b c\n2: a b d\n3: a b c\n").unwrap();
        assert_eq!(ra_profile_parse(text.as_ptr(), &mut profile), RaStatus::Parse);
        assert!(last_error().contains("line 3"));

        let spec = CString::new("ttc").unwrap();
        let mut mech = ptr::null_mut();
        assert_eq!(ra_mechanism_parse(spec.as_ptr(), &mut mech), RaStatus::InvalidArgument);

        let mut holds = false;
        let sp = CString::new("sp").unwrap();
        assert_eq!(
            ra_check_property(ptr::null(), 3, sp.as_ptr(), &mut holds, ptr::null_mut()),
            RaStatus::NullPointer
        );

        let bytes = [0xffu8, 0];
        let spec = CStr::from_bytes_with_nul(&bytes).unwrap();
        assert_eq!(ra_mechanism_parse(spec.as_ptr(), &mut mech), RaStatus::InvalidUtf8);

        ra_profile_free(ptr::null_mut());
        ra_string_free(ptr::null_mut());
    }
}

#[test]
fn spec_parser_and_equal_division() {
    unsafe {
        let text = CString::new(PROFILE_A).unwrap();
        let mut profile = ptr::null_mut();
        assert_eq!(ra_profile_parse(text.as_ptr(), &mut profile), RaStatus::Ok);
        let spec = CString::new("sd:1,2,3").unwrap();
        let mut mech = ptr::null_mut();
        assert_eq!(ra_mechanism_parse(spec.as_ptr(), &mut mech), RaStatus::Ok);
        let mut a = ptr::null_mut();
        assert_eq!(ra_mechanism_evaluate(mech, profile, &mut a), RaStatus::Ok);
        let mut tsv = ptr::null_mut();
        assert_eq!(ra_assignment_to_tsv(a, &mut tsv), RaStatus::Ok);
        assert_eq!(take_string(tsv), "a\tb\tc\n1\t0\t0\n0\t1\t0\n0\t0\t1\n");
        ra_assignment_free(a);
        ra_mechanism_free(mech);

        let mut ed = ptr::null_mut();
        assert_eq!(ra_mechanism_ed(&mut ed), RaStatus::Ok);
        let mut rsd = ptr::null_mut();
        assert_eq!(ra_mechanism_rsd(&mut rsd), RaStatus::Ok);
        assert_eq!(ra_mechanism_evaluate(ed, profile, &mut a), RaStatus::Ok);
        assert_eq!(ra_assignment_n(a), 3);
        ra_assignment_free(a);
        ra_mechanism_free(ed);
        ra_mechanism_free(rsd);
        ra_profile_free(profile);
    }
}

#[test]
fn pairwise_from_transfer_text() {
    unsafe {
        let zero = CString::new("f n=3\n").unwrap();
        let mut mech = ptr::null_mut();
        assert_eq!(ra_mechanism_pairwise(zero.as_ptr(), &mut mech), RaStatus::Ok);
        let mut holds = false;
        let ef = CString::new("ef").unwrap();
        assert_eq!(
            ra_check_property(mech, 3, ef.as_ptr(), &mut holds, ptr::null_mut()),
            RaStatus::Ok
        );
        assert!(holds);
        ra_mechanism_free(mech);

        // one-sided transfer violates anti-symmetry
        let bad = CString::new("f n=3\na,b,c | b,a,c | a | 1/6\n").unwrap();
        assert_eq!(
            ra_mechanism_pairwise(bad.as_ptr(), &mut mech),
            RaStatus::InvalidArgument
        );
    }
}

#[test]
fn theorem1_certificate_text() {
    unsafe {
        let mut cert = ptr::null_mut();
        assert_eq!(ra_certify_theorem1(&mut cert), RaStatus::Ok);
        let text = take_string(cert);
        assert!(text.starts_with("# farkas-infeasible certificate"));
        assert!(text.trim_end().ends_with("contradiction: 0 <= -5/12"));
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/randassign.h")).unwrap();
    for name in [
        "ra_profile_parse",
        "ra_profile_free",
        "ra_mechanism_parse",
        "ra_mechanism_linear",
        "ra_mechanism_pairwise",
        "ra_mechanism_evaluate",
        "ra_assignment_cell",
        "ra_assignment_to_tsv",
        "ra_check_property",
        "ra_certify_theorem1",
        "ra_string_free",
        "ra_last_error_message",
        "RA_STATUS_NULL_POINTER",
    ] {
        assert!(header.contains(name), "{name} missing from the header");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let src = std::env::temp_dir().join(format!("randassign_header_{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"randassign.h\"\nint main(void) { RaProfile *p = 0; return ra_profile_parse(\"\", &p) == RA_STATUS_OK; }\n",
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(format!("{dir}/include"))
        .arg(&src)
        .status();
    let _ = std::fs::remove_file(&src);
    match status {
        Ok(s) => assert!(s.success(), "the generated header does not compile"),
        Err(e) => eprintln!("no C compiler available ({e}); header syntax not checked"),
    }
}
