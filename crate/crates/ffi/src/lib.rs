//! C interface. Strings are NUL-terminated UTF-8; strings returned by this
//! library must be released with [`khref_string_free`].

use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use khref::cli::{error_report, run_to_json};
use khref::diagram::parse_pd;
use khref::exactalg::Coefficients;
use khref::refine::s_field;
use khref::Error;

/// `s_min`, `s_max` and `s` of a knot over a field.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KhrefS {
    pub s_min: i32,
    pub s_max: i32,
    pub s: i32,
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Error> {
    if p.is_null() {
        return Err(Error::Parse("null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Error::Parse("string is not UTF-8".into()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Computes the s-invariant of the knot `pd` over `field` (`"f2"`, `"f3"`,
/// `"q"`, ...). Returns 0 on success or the command-line exit code of the
/// error; `out` is written only on success.
///
/// # Safety
/// `pd` and `field` must be valid NUL-terminated strings and `out` must be
/// null or point to writable memory for one `KhrefS`.
#[no_mangle]
pub unsafe extern "C" fn khref_s_invariant(pd: *const c_char, field: *const c_char, out: *mut KhrefS) -> c_int {
    let result = (|| {
        let d = parse_pd(read_str(pd)?)?;
        let f: Coefficients = read_str(field)?.parse()?;
        s_field(&d, f)
    })();
    match result {
        Ok(s) => {
            if !out.is_null() {
                *out = KhrefS { s_min: s.s_min, s_max: s.s_max, s: s.s };
            }
            0
        }
        Err(e) => e.exit_code(),
    }
}

/// Runs a command-line invocation given as a JSON array of arguments
/// (without the program name), e.g. `["s","--pd","PD[Loop[1]]"]`, and
/// returns the JSON report or a structured error object.
///
/// # Safety
/// `args_json` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn khref_run_json(args_json: *const c_char) -> *mut c_char {
    let result = (|| {
        let args: Vec<String> = serde_json::from_str(read_str(args_json)?)?;
        run_to_json(std::iter::once("khref".to_string()).chain(args))
    })();
    let value = result.unwrap_or_else(|e| error_report(&e));
    into_c_string(value.to_string())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn khref_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
