//! C ABI for the effectscope library.
//!
//! Effects are opaque handles created from row-major `[re, im]` doubles or
//! loaded from JSON files; rays cross the boundary as `2 * dim` doubles.
//! Every fallible function returns an [`EsStatus`] and writes its result
//! through out-pointers; [`es_last_error_message`] holds a thread-local
//! description of the most recent failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use num_complex::Complex64;

use effectscope::error::Error;
use effectscope::io::load_effect;
use effectscope::oracle::strength_by_bisection;
use effectscope::reconstruct::reconstruct_effect;
use effectscope::strength::{evaluate_strength, interpolation_pair, is_saturated, StrengthSample};
use effectscope::suite::{run_check, CheckConfig};
use effectscope::{loewner_leq, Effect, HermitianMatrix, Ray, Tolerances};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsStatus {
    EsOk = 0,
    /// Malformed input: files, entry counts, sample values.
    EsParseError = 2,
    /// The matrix has an eigenvalue outside `[0, 1]`.
    EsNotAnEffect = 3,
    EsDimensionMismatch = 4,
    /// Reconstruction system singular or zero samples inconsistent.
    EsSingularSystem = 5,
    /// Eigensolver or search failure.
    EsNumericalError = 6,
    EsNullArgument = 7,
    /// An internal panic was caught at the boundary.
    EsPanic = 8,
}

/// Opaque handle to a validated effect.
pub struct EsEffect {
    inner: Effect,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = CString::new(message.replace('\0', " ")).unwrap_or_else(|_| CString::default());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
}

fn fail(err: &Error) -> EsStatus {
    set_error(&err.to_string());
    match err {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::NonFiniteEntry { .. }
        | Error::ZeroVector
        | Error::InvalidSample { .. }
        | Error::InvalidTolerance { .. } => EsStatus::EsParseError,
        Error::NotAnEffect { .. } => EsStatus::EsNotAnEffect,
        Error::DimensionMismatch { .. } => EsStatus::EsDimensionMismatch,
        Error::SingularSystem { .. } | Error::InconsistentKernel { .. } => {
            EsStatus::EsSingularSystem
        }
        Error::NonConvergence { .. }
        | Error::DomainError { .. }
        | Error::NotInvertible { .. }
        | Error::SearchExhausted { .. } => EsStatus::EsNumericalError,
    }
}

fn null_argument(what: &str) -> EsStatus {
    set_error(&format!("null argument: {what}"));
    EsStatus::EsNullArgument
}

fn guarded(body: impl FnOnce() -> EsStatus) -> EsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            EsStatus::EsPanic
        }
    }
}

fn complexes(pairs: &[f64]) -> Vec<Complex64> {
    pairs
        .chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect()
}

unsafe fn ray_from(ptr: *const f64, dim: usize) -> Result<Ray, Error> {
    let slice = std::slice::from_raw_parts(ptr, 2 * dim);
    Ray::from_components(&complexes(slice))
}

/// Description of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn es_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds an effect from `dim * dim` row-major complex entries laid out as
/// `2 * dim * dim` doubles `[re, im, re, im, ...]`. The matrix is
/// symmetrized and validated to have spectrum in `[0, 1]`.
///
/// # Safety
/// `entries` must point to `2 * dim * dim` readable doubles and `out` to a
/// writable pointer slot. A handle written to `out` must be released with
/// [`es_effect_free`].
#[no_mangle]
pub unsafe extern "C" fn es_effect_from_entries(
    dim: usize,
    entries: *const f64,
    out: *mut *mut EsEffect,
) -> EsStatus {
    guarded(|| {
        if entries.is_null() || out.is_null() {
            return null_argument("entries/out");
        }
        if dim == 0 {
            set_error("dimension must be positive");
            return EsStatus::EsParseError;
        }
        let slice = std::slice::from_raw_parts(entries, 2 * dim * dim);
        let matrix = match HermitianMatrix::from_row_major(dim, &complexes(slice)) {
            Ok(matrix) => matrix,
            Err(err) => return fail(&err),
        };
        match Effect::new(matrix, Tolerances::default()) {
            Ok(effect) => {
                *out = Box::into_raw(Box::new(EsEffect { inner: effect }));
                EsStatus::EsOk
            }
            Err(err) => fail(&err),
        }
    })
}

/// Loads an effect from a JSON effect file.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string and `out` a writable slot;
/// the handle must be released with [`es_effect_free`].
#[no_mangle]
pub unsafe extern "C" fn es_effect_load(path: *const c_char, out: *mut *mut EsEffect) -> EsStatus {
    guarded(|| {
        if path.is_null() || out.is_null() {
            return null_argument("path/out");
        }
        let path = match CStr::from_ptr(path).to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("path is not valid UTF-8");
                return EsStatus::EsParseError;
            }
        };
        match load_effect(Path::new(path), Tolerances::default()) {
            Ok(loaded) => {
                *out = Box::into_raw(Box::new(EsEffect {
                    inner: loaded.effect,
                }));
                EsStatus::EsOk
            }
            Err(err) => fail(&err),
        }
    })
}

/// Releases a handle returned by the constructors. Null is a no-op.
///
/// # Safety
/// `effect` must be a pointer previously returned by this library and not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn es_effect_free(effect: *mut EsEffect) {
    if !effect.is_null() {
        drop(Box::from_raw(effect));
    }
}

/// Hilbert-space dimension of the effect; zero for a null handle.
///
/// # Safety
/// `effect` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn es_effect_dim(effect: *const EsEffect) -> usize {
    if effect.is_null() {
        0
    } else {
        (*effect).inner.dim()
    }
}

/// Writes the ascending (clamped) eigenvalues into `out` (`dim` doubles).
///
/// # Safety
/// `effect` must be a live handle; `out` must hold `dim` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn es_effect_eigenvalues(effect: *const EsEffect, out: *mut f64) -> EsStatus {
    guarded(|| {
        if effect.is_null() || out.is_null() {
            return null_argument("effect/out");
        }
        let eigenvalues = (*effect).inner.eigenvalues();
        std::slice::from_raw_parts_mut(out, eigenvalues.len()).copy_from_slice(eigenvalues);
        EsStatus::EsOk
    })
}

/// Whether the effect is a projection (spectrum within slack of `{0, 1}`).
///
/// # Safety
/// `effect` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn es_effect_is_projection(
    effect: *const EsEffect,
    out: *mut bool,
) -> EsStatus {
    guarded(|| {
        if effect.is_null() || out.is_null() {
            return null_argument("effect/out");
        }
        *out = (*effect).inner.is_projection();
        EsStatus::EsOk
    })
}

/// Closed-form strength of the effect along a ray of `2 * dim` doubles.
///
/// # Safety
/// `effect` live; `ray` holds `2 * dim` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn es_strength(
    effect: *const EsEffect,
    ray: *const f64,
    out: *mut f64,
) -> EsStatus {
    guarded(|| {
        if effect.is_null() || ray.is_null() || out.is_null() {
            return null_argument("effect/ray/out");
        }
        let e = &(*effect).inner;
        let ray = match ray_from(ray, e.dim()) {
            Ok(ray) => ray,
            Err(err) => return fail(&err),
        };
        match evaluate_strength(e, &ray) {
            Ok(eval) => {
                *out = eval.value;
                EsStatus::EsOk
            }
            Err(err) => fail(&err),
        }
    })
}

/// Strength by the independent bisection oracle.
///
/// # Safety
/// Same contract as [`es_strength`].
#[no_mangle]
pub unsafe extern "C" fn es_strength_bisection(
    effect: *const EsEffect,
    ray: *const f64,
    out: *mut f64,
) -> EsStatus {
    guarded(|| {
        if effect.is_null() || ray.is_null() || out.is_null() {
            return null_argument("effect/ray/out");
        }
        let e = &(*effect).inner;
        let ray = match ray_from(ray, e.dim()) {
            Ok(ray) => ray,
            Err(err) => return fail(&err),
        };
        match strength_by_bisection(e, &ray, e.tolerances()) {
            Ok(value) => {
                *out = value;
                EsStatus::EsOk
            }
            Err(err) => fail(&err),
        }
    })
}

/// Whether the ray lies in the range of the square root of the effect
/// (equivalently: the strength along it is strictly positive).
///
/// # Safety
/// Same contract as [`es_strength`], with `out` a writable bool.
#[no_mangle]
pub unsafe extern "C" fn es_ray_in_range(
    effect: *const EsEffect,
    ray: *const f64,
    out: *mut bool,
) -> EsStatus {
    guarded(|| {
        if effect.is_null() || ray.is_null() || out.is_null() {
            return null_argument("effect/ray/out");
        }
        let e = &(*effect).inner;
        let ray = match ray_from(ray, e.dim()) {
            Ok(ray) => ray,
            Err(err) => return fail(&err),
        };
        match evaluate_strength(e, &ray) {
            Ok(eval) => {
                *out = eval.in_range;
                EsStatus::EsOk
            }
            Err(err) => fail(&err),
        }
    })
}

/// Whether the strength along the ray attains the expectation
/// `<phi, E phi>`, i.e. whether the ray is an eigenvector.
///
/// # Safety
/// Same contract as [`es_strength`], with `out` a writable bool.
#[no_mangle]
pub unsafe extern "C" fn es_is_saturated(
    effect: *const EsEffect,
    ray: *const f64,
    out: *mut bool,
) -> EsStatus {
    guarded(|| {
        if effect.is_null() || ray.is_null() || out.is_null() {
            return null_argument("effect/ray/out");
        }
        let e = &(*effect).inner;
        let ray = match ray_from(ray, e.dim()) {
            Ok(ray) => ray,
            Err(err) => return fail(&err),
        };
        match is_saturated(e, &ray) {
            Ok(flag) => {
                *out = flag;
                EsStatus::EsOk
            }
            Err(err) => fail(&err),
        }
    })
}

/// Loewner comparison `a <= b`.
///
/// # Safety
/// Both handles live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn es_loewner_leq(
    a: *const EsEffect,
    b: *const EsEffect,
    out: *mut bool,
) -> EsStatus {
    guarded(|| {
        if a.is_null() || b.is_null() || out.is_null() {
            return null_argument("a/b/out");
        }
        match loewner_leq(&(*a).inner, &(*b).inner) {
            Ok(flag) => {
                *out = flag;
                EsStatus::EsOk
            }
            Err(err) => fail(&err),
        }
    })
}

/// Interpolation pair at a ray: writes the unit vector `psi` (`2 * dim`
/// doubles) and the scale `lam` with `lam P_psi <= E` and
/// `lam |<psi, phi>|^2 = <phi, E phi>`.
///
/// # Safety
/// `psi_out` must hold `2 * dim` writable doubles; otherwise as
/// [`es_strength`].
#[no_mangle]
pub unsafe extern "C" fn es_interpolation_pair(
    effect: *const EsEffect,
    ray: *const f64,
    psi_out: *mut f64,
    lam_out: *mut f64,
) -> EsStatus {
    guarded(|| {
        if effect.is_null() || ray.is_null() || psi_out.is_null() || lam_out.is_null() {
            return null_argument("effect/ray/psi_out/lam_out");
        }
        let e = &(*effect).inner;
        let ray = match ray_from(ray, e.dim()) {
            Ok(ray) => ray,
            Err(err) => return fail(&err),
        };
        match interpolation_pair(e, &ray) {
            Ok(pair) => {
                let out = std::slice::from_raw_parts_mut(psi_out, 2 * e.dim());
                for (i, z) in pair.psi.vector().iter().enumerate() {
                    out[2 * i] = z.re;
                    out[2 * i + 1] = z.im;
                }
                *lam_out = pair.lam;
                EsStatus::EsOk
            }
            Err(err) => fail(&err),
        }
    })
}

/// Reconstructs an effect from `n_samples` strength samples. Rays are
/// packed consecutively (`2 * dim` doubles each); the recovered matrix is
/// written as `2 * dim * dim` row-major doubles.
///
/// # Safety
/// `rays` must hold `n_samples * 2 * dim` readable doubles, `values`
/// `n_samples` readable doubles, `entries_out` `2 * dim * dim` writable
/// doubles; the scalar out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn es_reconstruct(
    dim: usize,
    n_samples: usize,
    rays: *const f64,
    values: *const f64,
    entries_out: *mut f64,
    residual_out: *mut f64,
    conditioning_out: *mut f64,
    kernel_dim_out: *mut usize,
) -> EsStatus {
    guarded(|| {
        if rays.is_null()
            || values.is_null()
            || entries_out.is_null()
            || residual_out.is_null()
            || conditioning_out.is_null()
            || kernel_dim_out.is_null()
        {
            return null_argument("rays/values/out pointers");
        }
        if dim == 0 {
            set_error("dimension must be positive");
            return EsStatus::EsParseError;
        }
        let values = std::slice::from_raw_parts(values, n_samples);
        let mut samples = Vec::with_capacity(n_samples);
        for (k, &value) in values.iter().enumerate() {
            let ray = match ray_from(rays.add(2 * dim * k), dim) {
                Ok(ray) => ray,
                Err(err) => return fail(&err),
            };
            match StrengthSample::new(ray, value) {
                Ok(sample) => samples.push(sample),
                Err(err) => return fail(&err),
            }
        }
        match reconstruct_effect(&samples, dim, &Tolerances::default()) {
            Ok(result) => {
                let pairs = result.effect.matrix().to_pairs();
                let out = std::slice::from_raw_parts_mut(entries_out, 2 * dim * dim);
                for (i, [re, im]) in pairs.iter().enumerate() {
                    out[2 * i] = *re;
                    out[2 * i + 1] = *im;
                }
                *residual_out = result.residual;
                *conditioning_out = result.conditioning;
                *kernel_dim_out = result.kernel_dim;
                EsStatus::EsOk
            }
            Err(err) => fail(&err),
        }
    })
}

/// Runs the property suite and returns the JSON report as a heap string to
/// be released with [`es_string_free`]. A status of `EsOk` means the suite
/// ran; consult the report's `all_passed` field for the verdict.
///
/// # Safety
/// `dims` must hold `n_dims` readable size_t values; `out` must be a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn es_check_json(
    seed: u64,
    dims: *const usize,
    n_dims: usize,
    trials: usize,
    out: *mut *mut c_char,
) -> EsStatus {
    guarded(|| {
        if dims.is_null() || out.is_null() {
            return null_argument("dims/out");
        }
        let dims = std::slice::from_raw_parts(dims, n_dims).to_vec();
        if dims.is_empty() || dims.contains(&0) || trials == 0 {
            set_error("dims must be positive and trials at least 1");
            return EsStatus::EsParseError;
        }
        let cfg = CheckConfig {
            seed,
            dims,
            trials,
            tol: Tolerances::default(),
        };
        match run_check(&cfg) {
            Ok(report) => {
                let text = serde_json_string(&report);
                match CString::new(text) {
                    Ok(cstring) => {
                        *out = cstring.into_raw();
                        EsStatus::EsOk
                    }
                    Err(_) => {
                        set_error("report contained an interior NUL");
                        EsStatus::EsPanic
                    }
                }
            }
            Err(err) => fail(&err),
        }
    })
}

fn serde_json_string(report: &effectscope::suite::CheckReport) -> String {
    serde_json::to_string(report).expect("reports serialize")
}

/// Releases a string returned by [`es_check_json`]. Null is a no-op.
///
/// # Safety
/// `s` must be a pointer previously returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn es_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
