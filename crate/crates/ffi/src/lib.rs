//! C ABI over `randassign`.
//!
//! Objects cross the boundary as opaque handles created by `ra_*` constructors and released
//! by the matching `ra_*_free`. Every fallible call returns an [`RaStatus`]; on failure the
//! message is available from [`ra_last_error_message`] until the next failing call on the
//! same thread. Strings returned through out-parameters are owned by the caller and must be
//! released with [`ra_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use randassign::certify::{certificate_text, certify_theorem1};
use randassign::cli::MechanismSpec;
use randassign::mechanisms::{LinearMechanism, LinearVector, Mechanism, PairwiseExchange};
use randassign::model::{format_assignment, parse_profile, Assignment, ObjectSet, Profile};
use randassign::properties::{Checker, Parallelism, Property};
use randassign::transfers::TransferFunction;
use randassign::{Error, Rational};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    /// A rational does not fit in 64-bit numerator and denominator.
    Overflow = 5,
    Internal = 6,
}

/// A parsed preference profile.
pub struct RaProfile(Profile);

/// A mechanism ready for evaluation.
pub struct RaMechanism(Box<dyn Mechanism>);

/// A doubly stochastic assignment together with the object labels of its profile.
pub struct RaAssignment {
    assignment: Assignment,
    objects: std::sync::Arc<ObjectSet>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: RaStatus, msg: impl Into<String>) -> RaStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> RaStatus {
    let status = match e {
        Error::Parse { .. } => RaStatus::Parse,
        _ => RaStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into [`RaStatus::Internal`].
fn guard(f: impl FnOnce() -> RaStatus) -> RaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(RaStatus::Internal, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, RaStatus> {
    if p.is_null() {
        return Err(fail(RaStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(RaStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> RaStatus {
    *out = Box::into_raw(Box::new(value));
    RaStatus::Ok
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> RaStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            RaStatus::Ok
        }
        Err(_) => fail(RaStatus::Internal, "string contains a NUL byte"),
    }
}

macro_rules! nonnull {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return fail(RaStatus::NullPointer, concat!("null argument `", stringify!($p), "`"));
        })+
    };
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failing call on this thread, or null. Owned by the library; valid
/// until the next failing call.
#[no_mangle]
pub extern "C" fn ra_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ra_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a profile in the text format `n <int>` followed by `<label>: <obj> ... <obj>` lines.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_profile_parse(text: *const c_char, out: *mut *mut RaProfile) -> RaStatus {
    guard(|| {
        nonnull!(out);
        let text = tri!(str_arg(text));
        match parse_profile(text) {
            Ok(p) => put(out, RaProfile(p)),
            Err(e) => from_error(e),
        }
    })
}

/// Number of agents (and objects); 0 for null.
///
/// # Safety
/// `profile` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ra_profile_n(profile: *const RaProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.0.n())
}

/// # Safety
/// `profile` must be null or a handle from [`ra_profile_parse`], freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ra_profile_free(profile: *mut RaProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

unsafe fn mechanism_from_spec(spec: &str, out: *mut *mut RaMechanism) -> RaStatus {
    match spec.parse::<MechanismSpec>() {
        Ok(s) => put(out, RaMechanism(s.build())),
        Err(e) => from_error(e),
    }
}

/// Mechanism from a command-line style spec: `ed`, `rsd`, `ps`, `sd:<order>`,
/// `linear:(v1,...,vn)` or `pairwise:<path>`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_mechanism_parse(spec: *const c_char, out: *mut *mut RaMechanism) -> RaStatus {
    guard(|| {
        nonnull!(out);
        let spec = tri!(str_arg(spec));
        mechanism_from_spec(spec, out)
    })
}

/// Equal division.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_mechanism_ed(out: *mut *mut RaMechanism) -> RaStatus {
    guard(|| {
        nonnull!(out);
        mechanism_from_spec("ed", out)
    })
}

/// Random serial dictatorship.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_mechanism_rsd(out: *mut *mut RaMechanism) -> RaStatus {
    guard(|| {
        nonnull!(out);
        mechanism_from_spec("rsd", out)
    })
}

/// Probabilistic serial.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_mechanism_ps(out: *mut *mut RaMechanism) -> RaStatus {
    guard(|| {
        nonnull!(out);
        mechanism_from_spec("ps", out)
    })
}

/// Linear mechanism for the vector `num[k]/den[k]`, `k < n`.
///
/// # Safety
/// `num` and `den` must point to `n` values each; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_mechanism_linear(
    num: *const i64,
    den: *const i64,
    n: usize,
    out: *mut *mut RaMechanism,
) -> RaStatus {
    guard(|| {
        nonnull!(num, den, out);
        let (num, den) = (std::slice::from_raw_parts(num, n), std::slice::from_raw_parts(den, n));
        if den.contains(&0) {
            return fail(RaStatus::InvalidArgument, "zero denominator");
        }
        let v = num.iter().zip(den).map(|(&a, &b)| Rational::new(a, b)).collect();
        match LinearVector::new(v) {
            Ok(v) => put(out, RaMechanism(Box::new(LinearMechanism::new(v)))),
            Err(e) => from_error(e),
        }
    })
}

/// Pairwise exchange mechanism for a transfer function given in the transfer file format.
///
/// # Safety
/// `f_text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_mechanism_pairwise(f_text: *const c_char, out: *mut *mut RaMechanism) -> RaStatus {
    guard(|| {
        nonnull!(out);
        let text = tri!(str_arg(f_text));
        let f = match TransferFunction::parse_file(text) {
            Ok(f) => f,
            Err(e) => return from_error(e),
        };
        match f.is_valid() {
            Ok(true) => put(out, RaMechanism(Box::new(PairwiseExchange::new(f)))),
            Ok(false) => fail(
                RaStatus::InvalidArgument,
                f.report().map(|r| r.to_string()).unwrap_or_default(),
            ),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `mech` must be null or a mechanism handle, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ra_mechanism_free(mech: *mut RaMechanism) {
    if !mech.is_null() {
        drop(Box::from_raw(mech));
    }
}

/// Evaluates `mech` on `profile`.
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_mechanism_evaluate(
    mech: *const RaMechanism,
    profile: *const RaProfile,
    out: *mut *mut RaAssignment,
) -> RaStatus {
    guard(|| {
        nonnull!(mech, profile, out);
        let profile = &(*profile).0;
        match (*mech).0.evaluate(profile) {
            Ok(a) => put(
                out,
                RaAssignment {
                    assignment: a,
                    objects: profile.objects().clone(),
                },
            ),
            Err(e) => from_error(e),
        }
    })
}

/// Size of the assignment; 0 for null.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ra_assignment_n(a: *const RaAssignment) -> usize {
    a.as_ref().map_or(0, |a| a.assignment.n())
}

/// Probability that agent `i` receives object `obj` (both 0-based) as a reduced fraction.
///
/// # Safety
/// `a` must be a live handle; `num` and `den` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ra_assignment_cell(
    a: *const RaAssignment,
    i: usize,
    obj: usize,
    num: *mut i64,
    den: *mut i64,
) -> RaStatus {
    guard(|| {
        nonnull!(a, num, den);
        let p = &(*a).assignment;
        if i >= p.n() || obj >= p.n() {
            return fail(
                RaStatus::InvalidArgument,
                format!("cell ({i}, {obj}) outside an n={} assignment", p.n()),
            );
        }
        match p.get(i, obj).to_i64_pair() {
            Some((x, y)) => {
                *num = x;
                *den = y;
                RaStatus::Ok
            }
            None => fail(RaStatus::Overflow, format!("{} does not fit in 64 bits", p.get(i, obj))),
        }
    })
}

/// TSV rendering: object tokens, then one row of fractions per agent.
///
/// # Safety
/// `a` must be a live handle; `out` a valid pointer. Free the string with [`ra_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ra_assignment_to_tsv(a: *const RaAssignment, out: *mut *mut c_char) -> RaStatus {
    guard(|| {
        nonnull!(a, out);
        put_string(out, format_assignment(&(*a).assignment, &(*a).objects))
    })
}

/// # Safety
/// `a` must be null or an assignment handle, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ra_assignment_free(a: *mut RaAssignment) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Checks `property` (`sp`, `ef`, `ete`, `neutral`, `anon`, `sep`, `swap`, `upper`, `lower`,
/// `cfe`, `expost`, `ordinal`) exhaustively over all profiles of size `n`. On a violation
/// `*witness` receives a description (free with [`ra_string_free`]); otherwise it is null.
/// `witness` may be null when the description is not wanted.
///
/// # Safety
/// `mech` must be a live handle, `property` a NUL-terminated string, `holds` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_check_property(
    mech: *const RaMechanism,
    n: usize,
    property: *const c_char,
    holds: *mut bool,
    witness: *mut *mut c_char,
) -> RaStatus {
    guard(|| {
        nonnull!(mech, holds);
        let property: Property = match tri!(str_arg(property)).parse() {
            Ok(p) => p,
            Err(e) => return from_error(e),
        };
        let verdict = match Checker::new((*mech).0.as_ref(), n, Parallelism::Parallel).and_then(|c| c.check(property)) {
            Ok(v) => v,
            Err(e) => return from_error(e),
        };
        *holds = verdict.holds;
        if !witness.is_null() {
            *witness = ptr::null_mut();
            if let Some(w) = &verdict.witness {
                return put_string(witness, w.render());
            }
        }
        RaStatus::Ok
    })
}

/// Builds and verifies the Farkas certificate that strategy-proofness, envy-freeness and
/// contention-free efficiency are incompatible at n=3. `*certificate` receives the
/// certificate text (rows, multipliers and the contradiction).
///
/// # Safety
/// `certificate` must be a valid pointer. Free the string with [`ra_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ra_certify_theorem1(certificate: *mut *mut c_char) -> RaStatus {
    guard(|| {
        nonnull!(certificate);
        match certify_theorem1(false) {
            Ok(r) => put_string(certificate, certificate_text(&r.encoded.system, &r.certificate)),
            Err(e) => from_error(e),
        }
    })
}
