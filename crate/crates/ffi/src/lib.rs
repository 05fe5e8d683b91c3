//! C ABI over the `zfsdma` calculators and simulator.
//!
//! Conventions:
//!
//! - Every fallible function returns a [`ZfStatus`] and writes its results
//!   through out-pointers, which are left untouched on failure.
//! - After a failure, [`zf_last_error_message`] describes it. The string
//!   belongs to the calling thread and stays valid until that thread's next
//!   call into the library.
//! - Handles returned by `*_new` must be released with the matching `*_free`;
//!   strings returned by the library with [`zf_string_free`].
//! - Panics never cross the boundary; they surface as [`ZfStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use zfsdma::delay::{self, ArrivalLaw, DeltaVariant};
use zfsdma::numerics::regularized_upper_gamma;
use zfsdma::sim::{self, SimConfig};
use zfsdma::stability::{self, RateTable, RateVector, StabilityPolytope, SystemParams};
use zfsdma::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZfStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside the domain of the operation.
    Domain = 2,
    Unsupported = 3,
    /// Malformed configuration or JSON.
    Config = 4,
    /// Root finding or other numerics failed.
    Numeric = 5,
    /// The queue is not stable (`λ ≥ μ`).
    Unstable = 6,
    /// Rate vector outside the stability region.
    Exterior = 7,
    Panic = 8,
    Io = 9,
    /// Output buffer too small.
    BufferTooSmall = 10,
}

/// Delay-ratio `δ⁺` variant selector, passed as its integer value.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZfDeltaVariant {
    Guaranteed = 0,
    Relaxed = 1,
}

/// Opaque stability-region handle.
pub struct ZfPolytope {
    inner: StabilityPolytope,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ZfStatus {
    match e {
        Error::Domain(_) | Error::PowerBudget { .. } => ZfStatus::Domain,
        Error::Unsupported(_) => ZfStatus::Unsupported,
        Error::Config(_) | Error::Json(_) => ZfStatus::Config,
        Error::UnstableQueue { .. } => ZfStatus::Unstable,
        Error::ExteriorPoint => ZfStatus::Exterior,
        Error::Io(_) => ZfStatus::Io,
        _ => ZfStatus::Numeric,
    }
}

enum Fail {
    Status(ZfStatus, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Status(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(ZfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> ZfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ZfStatus::Ok
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            ZfStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn params(antennas: usize, power: f64, theta: f64) -> Result<SystemParams, Fail> {
    Ok(SystemParams::new(antennas, power, theta)?)
}

/// Message for the last failed call on this thread; empty after a success.
#[no_mangle]
pub extern "C" fn zf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn zf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `Γ(m, x)/Γ(m)` for integer `m ≥ 1`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_regularized_upper_gamma(m: u32, x: f64, out: *mut f64) -> ZfStatus {
    guard(|| {
        let o = out_ptr(out)?;
        *o = regularized_upper_gamma(m, x)?.get();
        Ok(())
    })
}

unsafe fn out_ptr<'a>(p: *mut f64) -> Result<&'a mut f64, Fail> {
    out(p, "out")
}

/// Per-queue departure rate `d(k)` with `k` of `antennas` queues scheduled.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_departure_rate(
    antennas: usize,
    power: f64,
    theta: f64,
    k: usize,
    out: *mut f64,
) -> ZfStatus {
    guard(|| {
        let o = out_ptr(out)?;
        *o = stability::departure_rate(&params(antennas, power, theta)?, k)?.get();
        Ok(())
    })
}

/// Max-weight decision for queue lengths `q[0..antennas]`, as a bitmask with
/// bit `i` set when queue `i` is scheduled.
///
/// # Safety
/// `q` must point to `antennas` values and `out_mask` be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_max_weight_decision(
    antennas: usize,
    power: f64,
    theta: f64,
    q: *const u64,
    out_mask: *mut u32,
) -> ZfStatus {
    guard(|| {
        let o = out(out_mask, "out_mask")?;
        let q = slice(q, antennas, "q")?;
        let table = RateTable::new(&params(antennas, power, theta)?)?;
        *o = stability::max_weight_decision(&table, q)?.mask();
        Ok(())
    })
}

/// Builds the stability region.
///
/// # Safety
/// `out` must be valid for a write. The handle must be released with
/// [`zf_polytope_free`].
#[no_mangle]
pub unsafe extern "C" fn zf_polytope_new(
    antennas: usize,
    power: f64,
    theta: f64,
    out: *mut *mut ZfPolytope,
) -> ZfStatus {
    guard(|| {
        let o = self::out(out, "out")?;
        let inner = stability::stability_polytope(&params(antennas, power, theta)?)?;
        *o = Box::into_raw(Box::new(ZfPolytope { inner }));
        Ok(())
    })
}

/// # Safety
/// `p` must come from [`zf_polytope_new`] and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn zf_polytope_free(p: *mut ZfPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

unsafe fn handle<'a>(p: *const ZfPolytope) -> Result<&'a StabilityPolytope, Fail> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("polytope"))
}

/// Number of queues of the region.
///
/// # Safety
/// `p` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_polytope_antennas(p: *const ZfPolytope, out: *mut usize) -> ZfStatus {
    guard(|| {
        let o = self::out(out, "out")?;
        *o = handle(p)?.antennas();
        Ok(())
    })
}

/// Number of vertices, origin included.
///
/// # Safety
/// `p` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_polytope_vertex_count(p: *const ZfPolytope, out: *mut usize) -> ZfStatus {
    guard(|| {
        let o = self::out(out, "out")?;
        *o = handle(p)?.vertices.len();
        Ok(())
    })
}

/// Vertex `index`: its decision bitmask and its `len = antennas` coordinates.
///
/// # Safety
/// `p` must be a live handle, `out_mask` valid for a write and `out_point`
/// valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn zf_polytope_vertex(
    p: *const ZfPolytope,
    index: usize,
    out_mask: *mut u32,
    out_point: *mut f64,
    len: usize,
) -> ZfStatus {
    guard(|| {
        let poly = handle(p)?;
        let v = poly
            .vertices
            .get(index)
            .ok_or_else(|| Fail::Status(ZfStatus::Domain, format!("vertex {index} out of range")))?;
        if len < poly.antennas() {
            return Err(Fail::Status(ZfStatus::BufferTooSmall, format!("need {} coordinates", poly.antennas())));
        }
        let m = out(out_mask, "out_mask")?;
        if out_point.is_null() {
            return Err(null("out_point"));
        }
        let dst = std::slice::from_raw_parts_mut(out_point, poly.antennas());
        dst.copy_from_slice(v.point.as_slice());
        *m = v.decision.mask();
        Ok(())
    })
}

/// Writes the index set (scheduled-queue counts that yield vertices, 0
/// included) into `out[0..capacity]` and its size into `out_len`. Fails
/// with `BufferTooSmall`, still setting `out_len`, when it does not fit.
///
/// # Safety
/// `p` must be a live handle, `out` valid for `capacity` writes and
/// `out_len` for one.
#[no_mangle]
pub unsafe extern "C" fn zf_polytope_index_set(
    p: *const ZfPolytope,
    out: *mut usize,
    capacity: usize,
    out_len: *mut usize,
) -> ZfStatus {
    guard(|| {
        let set = &handle(p)?.index_set;
        *self::out(out_len, "out_len")? = set.len();
        if capacity < set.len() {
            return Err(Fail::Status(ZfStatus::BufferTooSmall, format!("index set has {} entries", set.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        std::slice::from_raw_parts_mut(out, set.len()).copy_from_slice(set);
        Ok(())
    })
}

/// Whether `lambda[0..len]` lies in the region, up to `tol`.
///
/// # Safety
/// `p` must be a live handle, `lambda` valid for `len` reads and `out` for a
/// write.
#[no_mangle]
pub unsafe extern "C" fn zf_polytope_contains(
    p: *const ZfPolytope,
    lambda: *const f64,
    len: usize,
    tol: f64,
    out: *mut bool,
) -> ZfStatus {
    guard(|| {
        let poly = handle(p)?;
        let o = self::out(out, "out")?;
        let l = RateVector::new(slice(lambda, len, "lambda")?.to_vec())?;
        *o = poly.contains(&l, tol)?;
        Ok(())
    })
}

/// Largest `s` with `s·direction` in the region.
///
/// # Safety
/// `p` must be a live handle, `direction` valid for `len` reads and `out` for
/// a write.
#[no_mangle]
pub unsafe extern "C" fn zf_polytope_boundary_scale(
    p: *const ZfPolytope,
    direction: *const f64,
    len: usize,
    out: *mut f64,
) -> ZfStatus {
    guard(|| {
        let poly = handle(p)?;
        let o = out_ptr(out)?;
        let d = RateVector::new(slice(direction, len, "direction")?.to_vec())?;
        *o = poly.boundary_scale(&d)?;
        Ok(())
    })
}

/// Feedback bits keeping every departure rate within `1−δ` of perfect CSI.
///
/// # Safety
/// Out-pointers must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_feedback_bits_for_delta(
    antennas: usize,
    power: f64,
    theta: f64,
    delta: f64,
    out_bits_real: *mut f64,
    out_bits: *mut u32,
) -> ZfStatus {
    guard(|| {
        let (r, b) = (out_ptr(out_bits_real)?, out(out_bits, "out_bits")?);
        let budget = delay::feedback_bits_for_delta(&params(antennas, power, theta)?, delta)?;
        *r = budget.bits_real;
        *b = budget.bits;
        Ok(())
    })
}

/// Feedback bits keeping the mean delay within a factor `m` of perfect CSI
/// at load margin `tau`. `variant` is a [`ZfDeltaVariant`] value.
///
/// # Safety
/// Out-pointers must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_bits_for_delay_ratio(
    antennas: usize,
    power: f64,
    theta: f64,
    m: f64,
    tau: f64,
    variant: u32,
    out_bits_real: *mut f64,
    out_bits: *mut u32,
) -> ZfStatus {
    guard(|| {
        let (r, b) = (out_ptr(out_bits_real)?, out(out_bits, "out_bits")?);
        let v = match variant {
            x if x == ZfDeltaVariant::Guaranteed as u32 => DeltaVariant::Guaranteed,
            x if x == ZfDeltaVariant::Relaxed as u32 => DeltaVariant::Relaxed,
            x => return Err(Fail::Status(ZfStatus::Domain, format!("unknown variant {x}"))),
        };
        let budget = delay::bits_for_delay_ratio(&params(antennas, power, theta)?, m, tau, v)?;
        *r = budget.bits_real;
        *b = budget.bits;
        Ok(())
    })
}

/// Mean waiting time of Poisson(`lambda`) arrivals with geometric(`mu`)
/// service.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_pk_average_delay(lambda: f64, mu: f64, out: *mut f64) -> ZfStatus {
    guard(|| {
        let o = out_ptr(out)?;
        *o = delay::pk_average_delay(lambda, mu)?;
        Ok(())
    })
}

/// Kingman exponent of Poisson(`lambda`) arrivals with geometric(`mu`)
/// service.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_kingman_exponent(lambda: f64, mu: f64, out: *mut f64) -> ZfStatus {
    guard(|| {
        let o = out_ptr(out)?;
        *o = delay::kingman_exponent(&ArrivalLaw::Exponential { rate: lambda }, mu)?;
        Ok(())
    })
}

/// Runs a simulation described by a JSON config and returns the metrics as a
/// JSON string, to be released with [`zf_string_free`].
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_simulate_json(config_json: *const c_char, out: *mut *mut c_char) -> ZfStatus {
    guard(|| {
        let o = self::out(out, "out")?;
        if config_json.is_null() {
            return Err(null("config_json"));
        }
        let text = CStr::from_ptr(config_json)
            .to_str()
            .map_err(|e| Fail::Status(ZfStatus::Config, format!("config is not UTF-8: {e}")))?;
        let config: SimConfig =
            serde_json::from_str(text).map_err(|e| Fail::Status(ZfStatus::Config, e.to_string()))?;
        let metrics = sim::run(&config)?;
        let json = serde_json::to_string(&metrics).map_err(Error::from)?;
        *o = CString::new(json).map_err(|e| Fail::Status(ZfStatus::Config, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn zf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
