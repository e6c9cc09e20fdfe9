//! C ABI over `chansparse`.
//!
//! Every fallible call returns a [`CsStatus`]; results go through out
//! pointers. Realizations and sweep reports are opaque handles owned by the
//! caller and released with their `_free` function. The message of the last
//! failure on the calling thread is available from [`cs_last_error`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use chansparse::channel::{allocate_ick, generate_drop, BandProfile, GenConfig};
use chansparse::extract::estimate_ick;
use chansparse::gini::{gini_of, gini_realization};
use chansparse::theory::{theorem_sweep, verify_theorem, ClusterPowerSet, Situation, SweepReport};
use chansparse::{AllocationMode, Band, ChannelRealization, Cluster, Error, LosVariant, Ray};

pub const CS_MODE_EQUAL: u32 = 0;
pub const CS_MODE_ICK: u32 = 1;

pub const CS_VARIANT_WITH_LOS: u32 = 0;
pub const CS_VARIANT_WITHOUT_LOS: u32 = 1;

pub const CS_SITUATION_ORDER_PRESERVED: u32 = 0;
pub const CS_SITUATION_ORDER_CHANGED: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EmptyInput = 3,
    NonpositivePower = 4,
    NoLosRay = 5,
    Undefined = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// One ray as copied out of a realization. `cluster` is -1 when unknown.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsRay {
    pub delay_s: f64,
    pub power: f64,
    pub aoa_az_deg: f64,
    pub aoa_el_deg: f64,
    pub is_los: bool,
    pub cluster: i64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsTheoremReport {
    pub g1: f64,
    pub gk: f64,
    pub delta: f64,
    /// One of the `CS_SITUATION_*` constants.
    pub situation: u32,
    pub holds: bool,
}

/// Opaque drop handle.
pub struct CsRealization(ChannelRealization);

/// Opaque sweep summary handle.
pub struct CsSweep(SweepReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> CsStatus {
    match e {
        Error::EmptyPowerVector | Error::EmptySamples => CsStatus::EmptyInput,
        Error::NonpositivePower(..) => CsStatus::NonpositivePower,
        Error::NoLosRay => CsStatus::NoLosRay,
        Error::IckUndefined | Error::DegenerateRaySet(..) => CsStatus::Undefined,
        _ => CsStatus::InvalidArgument,
    }
}

fn fail(status: CsStatus, msg: impl Into<String>) -> CsStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, recording the message of any error or panic.
fn guard(f: impl FnOnce() -> Result<(), CsStatus>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(CsStatus::Panic, "internal panic"),
    }
}

fn check(e: Error) -> CsStatus {
    fail(status_of(&e), e.to_string())
}

unsafe fn input<'a>(ptr: *const f64, len: usize) -> Result<&'a [f64], CsStatus> {
    if len == 0 {
        return Err(fail(CsStatus::EmptyInput, "empty input"));
    }
    if ptr.is_null() {
        return Err(fail(CsStatus::NullPointer, "input pointer is null"));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

fn out_ptr<T>(ptr: *mut T) -> Result<*mut T, CsStatus> {
    if ptr.is_null() {
        Err(fail(CsStatus::NullPointer, "output pointer is null"))
    } else {
        Ok(ptr)
    }
}

fn mode_of(mode: u32) -> Result<AllocationMode, CsStatus> {
    match mode {
        CS_MODE_EQUAL => Ok(AllocationMode::Equal),
        CS_MODE_ICK => Ok(AllocationMode::Ick),
        _ => Err(fail(
            CsStatus::InvalidArgument,
            format!("unknown mode {mode}"),
        )),
    }
}

fn variant_of(variant: u32) -> Result<LosVariant, CsStatus> {
    match variant {
        CS_VARIANT_WITH_LOS => Ok(LosVariant::WithLos),
        CS_VARIANT_WITHOUT_LOS => Ok(LosVariant::WithoutLos),
        _ => Err(fail(
            CsStatus::InvalidArgument,
            format!("unknown variant {variant}"),
        )),
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static description of a status code. Takes a plain integer so that an
/// out-of-range value from C is not undefined behaviour.
#[no_mangle]
pub extern "C" fn cs_status_str(status: i32) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"ok",
        1 => c"null pointer",
        2 => c"invalid argument",
        3 => c"empty input",
        4 => c"non-positive power",
        5 => c"no LoS ray",
        6 => c"undefined",
        7 => c"buffer too small",
        8 => c"internal panic",
        _ => c"unknown status",
    };
    s.as_ptr()
}

/// Gini index of `len` positive powers.
///
/// # Safety
/// `powers` must point to `len` readable doubles and `out` to one writable.
#[no_mangle]
pub unsafe extern "C" fn cs_gini(powers: *const f64, len: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        let p = input(powers, len)?;
        let out = out_ptr(out)?;
        *out = gini_of(p).map_err(check)?;
        Ok(())
    })
}

/// Splits `cluster_power` over `m` rays with ICK `ick`, dominant ray first.
///
/// # Safety
/// `out` must point to `m` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_allocate_ick(
    cluster_power: f64,
    m: usize,
    ick: f64,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let out = out_ptr(out)?;
        if !(cluster_power > 0.0) || !cluster_power.is_finite() {
            return Err(fail(
                CsStatus::InvalidArgument,
                format!("cluster power {cluster_power} is not > 0"),
            ));
        }
        let v = allocate_ick(cluster_power, m, ick).map_err(check)?;
        slice::from_raw_parts_mut(out, m).copy_from_slice(&v);
        Ok(())
    })
}

/// ICK of one cluster's ray powers.
///
/// # Safety
/// `powers` must point to `len` readable doubles and `out` to one writable.
#[no_mangle]
pub unsafe extern "C" fn cs_estimate_ick(
    powers: *const f64,
    len: usize,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let p = input(powers, len)?;
        let out = out_ptr(out)?;
        let rays = p.iter().map(|&x| Ray::new(0.0, x)).collect::<Vec<_>>();
        for r in &rays {
            r.validate().map_err(check)?;
        }
        let cluster = Cluster::new(rays).map_err(check)?;
        *out = estimate_ick(&cluster).map_err(check)?;
        Ok(())
    })
}

/// Generates drop `drop_index` of preset band `band` (`"cmWave"`, `"mmWave"`
/// or `"subTHz"`) with default generator settings and `seed`.
///
/// # Safety
/// `band` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_realization_generate(
    band: *const c_char,
    mode: u32,
    seed: u64,
    drop_index: u64,
    out: *mut *mut CsRealization,
) -> CsStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = ptr::null_mut();
        if band.is_null() {
            return Err(fail(CsStatus::NullPointer, "band is null"));
        }
        let name = CStr::from_ptr(band)
            .to_str()
            .map_err(|_| fail(CsStatus::InvalidArgument, "band is not UTF-8"))?;
        let band: Band = name.parse().map_err(check)?;
        let profile = BandProfile::preset(&band).ok_or_else(|| {
            fail(
                CsStatus::InvalidArgument,
                format!("`{name}` is not a preset band"),
            )
        })?;
        let r = generate_drop(
            &profile,
            &GenConfig::with_seed(seed),
            mode_of(mode)?,
            drop_index,
        )
        .map_err(check)?;
        *out = Box::into_raw(Box::new(CsRealization(r)));
        Ok(())
    })
}

/// # Safety
/// `r` must come from [`cs_realization_generate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_realization_free(r: *mut CsRealization) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of rays, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_realization_ray_count(r: *const CsRealization) -> usize {
    r.as_ref().map_or(0, |r| r.0.rays.len())
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_realization_has_los(r: *const CsRealization) -> bool {
    r.as_ref().is_some_and(|r| r.0.has_los)
}

/// Copies the rays into `out`, which holds `cap` entries.
///
/// # Safety
/// `r` must be a live handle and `out` point to `cap` writable entries.
#[no_mangle]
pub unsafe extern "C" fn cs_realization_rays(
    r: *const CsRealization,
    out: *mut CsRay,
    cap: usize,
) -> CsStatus {
    guard(|| {
        let r = r
            .as_ref()
            .ok_or_else(|| fail(CsStatus::NullPointer, "realization is null"))?;
        let out = out_ptr(out)?;
        let rays = &r.0.rays;
        if cap < rays.len() {
            return Err(fail(
                CsStatus::BufferTooSmall,
                format!("need {} entries, got {cap}", rays.len()),
            ));
        }
        let dst = slice::from_raw_parts_mut(out, rays.len());
        for (d, s) in dst.iter_mut().zip(rays) {
            *d = CsRay {
                delay_s: s.delay_s,
                power: s.power,
                aoa_az_deg: s.aoa_az_deg,
                aoa_el_deg: s.aoa_el_deg,
                is_los: s.is_los,
                cluster: s.cluster.map_or(-1, |c| c as i64),
            };
        }
        Ok(())
    })
}

/// Gini index of the realization with or without its LoS ray.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_realization_gini(
    r: *const CsRealization,
    variant: u32,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let r = r
            .as_ref()
            .ok_or_else(|| fail(CsStatus::NullPointer, "realization is null"))?;
        let out = out_ptr(out)?;
        *out = gini_realization(&r.0, variant_of(variant)?)
            .map_err(check)?
            .value;
        Ok(())
    })
}

/// Compares equal and ICK allocation for strictly ascending cluster powers.
///
/// # Safety
/// `powers` must point to `n` readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_verify_theorem(
    powers: *const f64,
    n: usize,
    m_rays: usize,
    ick: f64,
    out: *mut CsTheoremReport,
) -> CsStatus {
    guard(|| {
        let p = input(powers, n)?;
        let out = out_ptr(out)?;
        let cps = ClusterPowerSet::new(p.to_vec(), m_rays).map_err(check)?;
        let rep = verify_theorem(&cps, ick).map_err(check)?;
        *out = CsTheoremReport {
            g1: rep.g1,
            gk: rep.gk,
            delta: rep.delta,
            situation: match rep.situation {
                Situation::OrderPreserved => CS_SITUATION_ORDER_PRESERVED,
                Situation::OrderChanged => CS_SITUATION_ORDER_CHANGED,
            },
            holds: rep.holds,
        };
        Ok(())
    })
}

/// Runs a randomized sweep of `cases` instances.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_sweep_run(cases: usize, seed: u64, out: *mut *mut CsSweep) -> CsStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = Box::into_raw(Box::new(CsSweep(theorem_sweep(cases, seed))));
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`cs_sweep_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_sweep_free(s: *mut CsSweep) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_sweep_counterexamples(s: *const CsSweep) -> usize {
    s.as_ref().map_or(0, |s| s.0.counterexamples)
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_sweep_order_preserved(s: *const CsSweep) -> usize {
    s.as_ref().map_or(0, |s| s.0.order_preserved)
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_sweep_order_changed(s: *const CsSweep) -> usize {
    s.as_ref().map_or(0, |s| s.0.order_changed)
}

/// Smallest `G_k − G_1` seen; NaN for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_sweep_min_delta(s: *const CsSweep) -> f64 {
    s.as_ref().map_or(f64::NAN, |s| s.0.min_delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::EmptyPowerVector), CsStatus::EmptyInput);
        assert_eq!(
            status_of(&Error::NonpositivePower(0.0, 1)),
            CsStatus::NonpositivePower
        );
        assert_eq!(status_of(&Error::IckUndefined), CsStatus::Undefined);
        assert_eq!(
            status_of(&Error::UnknownBand("x".into())),
            CsStatus::InvalidArgument
        );
    }

    #[test]
    fn enum_codes_parse() {
        assert_eq!(mode_of(CS_MODE_ICK), Ok(AllocationMode::Ick));
        assert_eq!(
            variant_of(CS_VARIANT_WITHOUT_LOS),
            Ok(LosVariant::WithoutLos)
        );
        assert_eq!(mode_of(7), Err(CsStatus::InvalidArgument));
    }
}
