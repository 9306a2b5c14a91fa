//! C ABI for the randconv library.
//!
//! Distributions are opaque handles created from probability arrays; every
//! function returns an [`RcStatus`] and writes results through out-pointers.
//! The header `include/randconv.h` is generated by cbindgen at build time.
//!
//! # Safety
//! All pointer arguments must be valid for the stated lengths, and handles
//! must come from `rc_dist_new` and not have been freed.

use randconv::{
    fm_l_n, ldn_expand, limit_fidelity, max_fidelity_det, max_fidelity_major, second_order_rate,
    BlockDist, Error, FiniteDist, RegimeKind,
};
use std::ffi::c_char;

/// Status code of every FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidDistribution = 2,
    /// The pair falls outside the regime the operation covers
    /// (for example both distributions uniform).
    RegimeUnsupported = 3,
    /// Arguments were readable but the computation refused them
    /// (search space too large, bad confidence level, ...).
    ComputeFailed = 4,
    /// An output buffer is shorter than required.
    BufferTooSmall = 5,
}

fn status_of(e: &Error) -> RcStatus {
    match e {
        Error::BothUniform | Error::WrongRegime { .. } => RcStatus::RegimeUnsupported,
        Error::BadProbability(_) | Error::NotNormalized(_) | Error::EmptySupport => {
            RcStatus::InvalidDistribution
        }
        _ => RcStatus::ComputeFailed,
    }
}

/// Opaque handle to a finite distribution.
pub struct RcDist {
    inner: FiniteDist,
}

/// Conversion regime of a pair, mirrored into the C ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcRegime {
    SourceUniform = 0,
    TargetUniform = 1,
    RatioGreater = 2,
    RatioLess = 3,
    RatioEqual = 4,
}

impl From<RegimeKind> for RcRegime {
    fn from(k: RegimeKind) -> Self {
        match k {
            RegimeKind::SourceUniform => RcRegime::SourceUniform,
            RegimeKind::TargetUniform => RcRegime::TargetUniform,
            RegimeKind::RatioGreater => RcRegime::RatioGreater,
            RegimeKind::RatioLess => RcRegime::RatioLess,
            RegimeKind::RatioEqual => RcRegime::RatioEqual,
        }
    }
}

/// Second-order rate record. `c_pq` and `threshold` are NaN when the
/// regime does not define them.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RcRateResult {
    pub a: f64,
    pub r2: f64,
    pub regime: RcRegime,
    pub c_pq: f64,
    pub threshold: f64,
    pub residual: f64,
}

/// Creates a distribution handle from `len` probabilities.
///
/// # Safety
/// `probs` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_dist_new(
    probs: *const f64,
    len: usize,
    out: *mut *mut RcDist,
) -> RcStatus {
    if probs.is_null() || out.is_null() || len == 0 {
        return RcStatus::NullArgument;
    }
    let slice = std::slice::from_raw_parts(probs, len);
    match FiniteDist::new(slice.to_vec()) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(RcDist { inner }));
            RcStatus::Ok
        }
        Err(e) => {
            *out = std::ptr::null_mut();
            status_of(&e)
        }
    }
}

/// Frees a handle created by [`rc_dist_new`]. A null pointer is a no-op.
///
/// # Safety
/// `dist` must be a handle from `rc_dist_new` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn rc_dist_free(dist: *mut RcDist) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

unsafe fn deref<'a>(d: *const RcDist) -> Option<&'a FiniteDist> {
    d.as_ref().map(|h| &h.inner)
}

/// Entropy in nats.
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_entropy(dist: *const RcDist, out: *mut f64) -> RcStatus {
    match (deref(dist), out.as_mut()) {
        (Some(p), Some(out)) => {
            *out = randconv::entropy(p);
            RcStatus::Ok
        }
        _ => RcStatus::NullArgument,
    }
}

/// Varentropy in nats².
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_varentropy(dist: *const RcDist, out: *mut f64) -> RcStatus {
    match (deref(dist), out.as_mut()) {
        (Some(p), Some(out)) => {
            *out = randconv::varentropy(p);
            RcStatus::Ok
        }
        _ => RcStatus::NullArgument,
    }
}

/// Bhattacharyya fidelity of two distributions on a common index set.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_fidelity(
    a: *const RcDist,
    b: *const RcDist,
    out: *mut f64,
) -> RcStatus {
    let (Some(p), Some(q), Some(out)) = (deref(a), deref(b), out.as_mut()) else {
        return RcStatus::NullArgument;
    };
    match randconv::fidelity(p, q) {
        Ok(f) => {
            *out = f;
            RcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// One-shot majorization optimum F^M(source → target).
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_max_fidelity_major(
    source: *const RcDist,
    target: *const RcDist,
    out: *mut f64,
) -> RcStatus {
    let (Some(p), Some(q), Some(out)) = (deref(source), deref(target), out.as_mut()) else {
        return RcStatus::NullArgument;
    };
    let sol = max_fidelity_major(&BlockDist::from_finite(p), &BlockDist::from_finite(q));
    *out = sol.fidelity;
    RcStatus::Ok
}

/// Exhaustive deterministic optimum F^D(source → target) and its map.
/// `map_out` must hold one entry per source outcome.
///
/// # Safety
/// Handles must be live; `fidelity_out` and `map_out[0..map_len]` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_max_fidelity_det(
    source: *const RcDist,
    target: *const RcDist,
    fidelity_out: *mut f64,
    map_out: *mut usize,
    map_len: usize,
) -> RcStatus {
    let (Some(p), Some(q), Some(fout)) = (deref(source), deref(target), fidelity_out.as_mut())
    else {
        return RcStatus::NullArgument;
    };
    if map_out.is_null() {
        return RcStatus::NullArgument;
    }
    if map_len < p.len() {
        return RcStatus::BufferTooSmall;
    }
    match max_fidelity_det(p, q) {
        Ok((f, map)) => {
            *fout = f;
            let dst = std::slice::from_raw_parts_mut(map_out, p.len());
            dst.copy_from_slice(&map.assignment);
            RcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// F^M(P^n → Q^L) on i.i.d. powers via the block optimizer.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_fm_iid_power(
    source: *const RcDist,
    target: *const RcDist,
    n: u64,
    l: u64,
    out: *mut f64,
) -> RcStatus {
    let (Some(p), Some(q), Some(out)) = (deref(source), deref(target), out.as_mut()) else {
        return RcStatus::NullArgument;
    };
    let src = match BlockDist::iid_power(p, n) {
        Ok(b) => b,
        Err(e) => return status_of(&e),
    };
    let tgt = match BlockDist::iid_power(q, l) {
        Ok(b) => b,
        Err(e) => return status_of(&e),
    };
    *out = max_fidelity_major(&src, &tgt).fidelity;
    RcStatus::Ok
}

/// Largest L with F^M(P^n → Q^L) ≥ nu.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_fm_copy_count(
    source: *const RcDist,
    target: *const RcDist,
    n: u64,
    nu: f64,
    out: *mut u64,
) -> RcStatus {
    let (Some(p), Some(q), Some(out)) = (deref(source), deref(target), out.as_mut()) else {
        return RcStatus::NullArgument;
    };
    match fm_l_n(p, q, n, nu) {
        Ok(l) => {
            *out = l;
            RcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Limit of the conversion fidelity at rates (a, b).
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_limit_fidelity(
    source: *const RcDist,
    target: *const RcDist,
    a: f64,
    b: f64,
    out: *mut f64,
) -> RcStatus {
    let (Some(p), Some(q), Some(out)) = (deref(source), deref(target), out.as_mut()) else {
        return RcStatus::NullArgument;
    };
    match limit_fidelity(p, q, a, b) {
        Ok(f) => {
            *out = f;
            RcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Second-order rate record at confidence `nu`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_second_order_rate(
    source: *const RcDist,
    target: *const RcDist,
    nu: f64,
    out: *mut RcRateResult,
) -> RcStatus {
    let (Some(p), Some(q), Some(out)) = (deref(source), deref(target), out.as_mut()) else {
        return RcStatus::NullArgument;
    };
    match second_order_rate(p, q, nu) {
        Ok(r) => {
            *out = RcRateResult {
                a: r.a,
                r2: r.r2,
                regime: r.regime.kind.into(),
                c_pq: r.regime.c_pq.unwrap_or(f64::NAN),
                threshold: r.threshold.unwrap_or(f64::NAN),
                residual: r.residual,
            };
            RcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Copy-count expansion a·n + r2·√n at confidence `nu`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_ldn_expand(
    source: *const RcDist,
    target: *const RcDist,
    nu: f64,
    n: u64,
    out: *mut f64,
) -> RcStatus {
    let (Some(p), Some(q), Some(out)) = (deref(source), deref(target), out.as_mut()) else {
        return RcStatus::NullArgument;
    };
    match ldn_expand(p, q, nu, n) {
        Ok(v) => {
            *out = v;
            RcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn rc_status_name(status: RcStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        RcStatus::Ok => b"ok\0",
        RcStatus::NullArgument => b"null argument\0",
        RcStatus::InvalidDistribution => b"invalid distribution\0",
        RcStatus::RegimeUnsupported => b"regime unsupported\0",
        RcStatus::ComputeFailed => b"compute failed\0",
        RcStatus::BufferTooSmall => b"buffer too small\0",
    };
    s.as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;

    unsafe fn make(probs: &[f64]) -> *mut RcDist {
        let mut out = std::ptr::null_mut();
        assert_eq!(rc_dist_new(probs.as_ptr(), probs.len(), &mut out), RcStatus::Ok);
        out
    }

    #[test]
    fn round_trip_through_the_c_abi() {
        unsafe {
            let p = make(&[0.8, 0.2]);
            let q = make(&[0.6, 0.4]);
            let mut h = 0.0;
            assert_eq!(rc_entropy(p, &mut h), RcStatus::Ok);
            assert!((h - 0.500_402_423_538_187_88).abs() < 1e-14);
            let mut v = 0.0;
            assert_eq!(rc_varentropy(p, &mut v), RcStatus::Ok);
            assert!((v - 0.307_489_928_907_648_91).abs() < 1e-14);

            let mut f = 0.0;
            assert_eq!(rc_max_fidelity_major(p, q, &mut f), RcStatus::Ok);
            let mut fd = 0.0;
            let mut map = [0usize; 2];
            assert_eq!(
                rc_max_fidelity_det(p, q, &mut fd, map.as_mut_ptr(), 2),
                RcStatus::Ok
            );
            assert!(fd <= f + 1e-9);

            let mut rate = RcRateResult {
                a: 0.0,
                r2: 0.0,
                regime: RcRegime::RatioEqual,
                c_pq: 0.0,
                threshold: 0.0,
                residual: 0.0,
            };
            assert_eq!(rc_second_order_rate(p, q, 0.9, &mut rate), RcStatus::Ok);
            assert_eq!(rate.regime, RcRegime::RatioLess);
            assert!(rate.residual <= 1e-8);
            let mut lf = 0.0;
            assert_eq!(rc_limit_fidelity(p, q, rate.a, rate.r2, &mut lf), RcStatus::Ok);
            assert!((lf - 0.9).abs() < 1e-8);

            let mut l = 0u64;
            assert_eq!(rc_fm_copy_count(p, q, 64, 0.9, &mut l), RcStatus::Ok);
            assert_eq!(l, 49);
            let mut fm = 0.0;
            assert_eq!(rc_fm_iid_power(p, q, 64, 49, &mut fm), RcStatus::Ok);
            assert!(fm >= 0.9);

            rc_dist_free(p);
            rc_dist_free(q);
        }
    }

    #[test]
    fn status_codes_cover_error_paths() {
        unsafe {
            let mut out = std::ptr::null_mut();
            assert_eq!(
                rc_dist_new(std::ptr::null(), 2, &mut out),
                RcStatus::NullArgument
            );
            let bad = [0.5, 0.6];
            assert_eq!(
                rc_dist_new(bad.as_ptr(), 2, &mut out),
                RcStatus::InvalidDistribution
            );
            assert!(out.is_null());

            let u2 = make(&[0.5, 0.5]);
            let u4 = make(&[0.25, 0.25, 0.25, 0.25]);
            let mut rate = std::mem::zeroed();
            assert_eq!(
                rc_second_order_rate(u2, u4, 0.5, &mut rate),
                RcStatus::RegimeUnsupported
            );

            let p = make(&[0.8, 0.2]);
            let mut fd = 0.0;
            let mut map = [0usize; 1];
            assert_eq!(
                rc_max_fidelity_det(p, u2, &mut fd, map.as_mut_ptr(), 1),
                RcStatus::BufferTooSmall
            );
            assert!(!rc_status_name(RcStatus::BufferTooSmall).is_null());
            rc_dist_free(u2);
            rc_dist_free(u4);
            rc_dist_free(p);
            rc_dist_free(std::ptr::null_mut());
        }
    }
}
