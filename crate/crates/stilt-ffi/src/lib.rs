//! C interface to the mixed-dimensional benchmark solver.
//!
//! Every fallible entry point returns a [`StiltStatus`] and writes its
//! results through out-pointers. Objects cross the boundary as opaque
//! pointers created by `stilt_*` constructors and released exactly once
//! with the matching `_free` function. A textual message for the most
//! recent failure on the current thread is available from
//! [`stilt_last_error`]. All functions are safe to call from multiple
//! threads as long as each handle is used from one thread at a time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use stilt::bench::{compute_errors, BenchmarkData, ErrorRecord};
use stilt::saddle::{assemble, BilinearForm, Discretization, FormulationKind};
use stilt::solve::solve_direct;
use stilt::Error;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StiltStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter was out of range or inconsistent.
    InvalidArgument = 2,
    /// A matrix factorization failed.
    FactorizationFailed = 3,
    /// An iterative or spectral solve did not converge.
    SolverFailed = 4,
    /// The library caught an internal panic.
    InternalError = 5,
}

/// Discrete formulation selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StiltFormulation {
    /// Lagrange multiplier on the 2D interface, conforming meshes.
    Coupled2d = 0,
    /// Averaged multiplier on the 1D line, conforming meshes.
    Coupled1d = 1,
    /// Cut-cell multiplier with jump stabilization, independent meshes.
    Stabilized1d = 2,
}

/// Opaque handle holding one assembled and solved benchmark instance.
pub struct StiltSolution {
    disc: Discretization,
    vector: Vec<f64>,
    errors: ErrorRecord,
    n3: usize,
    n1: usize,
    n_mu: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn status_of(err: &Error) -> StiltStatus {
    match err {
        Error::InvalidParameter(_) | Error::ShapeMismatch(_) | Error::PointLocation(..) => {
            StiltStatus::InvalidArgument
        }
        Error::Factorization(_) => StiltStatus::FactorizationFailed,
        Error::NoConvergence { .. } | Error::EigenGuard { .. } => StiltStatus::SolverFailed,
        Error::Io { .. } => StiltStatus::InternalError,
    }
}

fn fail(err: &Error) -> StiltStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Runs `body` with panics converted to `InternalError`.
fn guarded(body: impl FnOnce() -> StiltStatus) -> StiltStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            StiltStatus::InternalError
        }
    }
}

/// Version of the underlying library as a static, NUL-terminated string.
#[no_mangle]
pub extern "C" fn stilt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on the calling thread.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn stilt_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Assembles the benchmark problem for a formulation at a refinement
/// level (1 is the coarsest), solves it directly and computes the error
/// norms. On success writes a heap-allocated handle to `out`; release it
/// with [`stilt_solution_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn stilt_solve_benchmark(
    formulation: StiltFormulation,
    level: u32,
    out: *mut *mut StiltSolution,
) -> StiltStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return StiltStatus::NullPointer;
    }
    guarded(|| {
        let kind = match formulation {
            StiltFormulation::Coupled2d => FormulationKind::Coupled2D,
            StiltFormulation::Coupled1d => FormulationKind::Coupled1D,
            StiltFormulation::Stabilized1d => FormulationKind::Stabilized1D,
        };
        let data = BenchmarkData::new();
        let result = (|| {
            let disc = Discretization::new(kind, level)?;
            let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data.problem())?;
            let vector = solve_direct(&sys)?;
            let errors = compute_errors(&disc, &vector)?;
            Ok::<StiltSolution, Error>(StiltSolution {
                n3: sys.n3,
                n1: sys.n1,
                n_mu: sys.n_mu,
                disc,
                vector,
                errors,
            })
        })();
        match result {
            Ok(sol) => {
                unsafe { *out = Box::into_raw(Box::new(sol)) };
                StiltStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a solution handle. Passing null is a no-op; passing the same
/// handle twice is undefined behavior.
///
/// # Safety
/// `solution` must be null or a pointer obtained from
/// [`stilt_solve_benchmark`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn stilt_solution_free(solution: *mut StiltSolution) {
    if !solution.is_null() {
        drop(unsafe { Box::from_raw(solution) });
    }
}

/// Writes the number of 3D, 1D and multiplier degrees of freedom.
///
/// # Safety
/// `solution` must be a live handle; out-pointers may be null to skip a
/// field.
#[no_mangle]
pub unsafe extern "C" fn stilt_solution_dof_counts(
    solution: *const StiltSolution,
    volume: *mut u64,
    line: *mut u64,
    multiplier: *mut u64,
) -> StiltStatus {
    let Some(sol) = (unsafe { solution.as_ref() }) else {
        set_error("solution handle is null");
        return StiltStatus::NullPointer;
    };
    unsafe {
        if !volume.is_null() {
            *volume = sol.n3 as u64;
        }
        if !line.is_null() {
            *line = sol.n1 as u64;
        }
        if !multiplier.is_null() {
            *multiplier = sol.n_mu as u64;
        }
    }
    StiltStatus::Ok
}

/// Writes the error norms of the discrete solution against the exact one:
/// H¹(Ω) and H¹(Λ) field errors, the fractional dual norm of the
/// multiplier error (NaN for the stabilized formulation, which has no
/// conforming dual norm) and its L² norm.
///
/// # Safety
/// `solution` must be a live handle; out-pointers may be null to skip a
/// field.
#[no_mangle]
pub unsafe extern "C" fn stilt_solution_error_norms(
    solution: *const StiltSolution,
    h1_volume: *mut f64,
    h1_line: *mut f64,
    multiplier_dual: *mut f64,
    multiplier_l2: *mut f64,
) -> StiltStatus {
    let Some(sol) = (unsafe { solution.as_ref() }) else {
        set_error("solution handle is null");
        return StiltStatus::NullPointer;
    };
    unsafe {
        if !h1_volume.is_null() {
            *h1_volume = sol.errors.u_h1;
        }
        if !h1_line.is_null() {
            *h1_line = sol.errors.w_h1;
        }
        if !multiplier_dual.is_null() {
            *multiplier_dual = sol.errors.multiplier_dual.unwrap_or(f64::NAN);
        }
        if !multiplier_l2.is_null() {
            *multiplier_l2 = sol.errors.multiplier_l2;
        }
    }
    StiltStatus::Ok
}

/// Evaluates the discrete 3D field at a point of the unit cube.
///
/// # Safety
/// `solution` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stilt_solution_evaluate_volume(
    solution: *const StiltSolution,
    x: f64,
    y: f64,
    z: f64,
    value: *mut f64,
) -> StiltStatus {
    let Some(sol) = (unsafe { solution.as_ref() }) else {
        set_error("solution handle is null");
        return StiltStatus::NullPointer;
    };
    if value.is_null() {
        set_error("value pointer is null");
        return StiltStatus::NullPointer;
    }
    guarded(|| match sol.disc.mesh.evaluate_point(&sol.vector[..sol.n3], [x, y, z]) {
        Ok(v) => {
            unsafe { *value = v };
            StiltStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Evaluates the discrete 1D field at a coordinate along the line.
///
/// # Safety
/// `solution` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stilt_solution_evaluate_line(
    solution: *const StiltSolution,
    z: f64,
    value: *mut f64,
) -> StiltStatus {
    let Some(sol) = (unsafe { solution.as_ref() }) else {
        set_error("solution handle is null");
        return StiltStatus::NullPointer;
    };
    if value.is_null() {
        set_error("value pointer is null");
        return StiltStatus::NullPointer;
    }
    guarded(|| {
        let w = &sol.vector[sol.n3..sol.n3 + sol.n1];
        match sol.disc.line.evaluate_point(w, z) {
            Ok(v) => {
                unsafe { *value = v };
                StiltStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;
    use std::ptr;

    #[test]
    fn solve_and_query_through_the_c_surface() {
        let mut handle: *mut StiltSolution = ptr::null_mut();
        let status =
            unsafe { stilt_solve_benchmark(StiltFormulation::Coupled1d, 1, &mut handle) };
        assert_eq!(status, StiltStatus::Ok);
        assert!(!handle.is_null());

        let (mut n3, mut n1, mut nmu) = (0u64, 0u64, 0u64);
        let status =
            unsafe { stilt_solution_dof_counts(handle, &mut n3, &mut n1, &mut nmu) };
        assert_eq!(status, StiltStatus::Ok);
        assert_eq!((n3, n1, nmu), (125, 5, 5));

        let (mut e3, mut e1, mut ed, mut el) = (0.0, 0.0, 0.0, 0.0);
        let status = unsafe {
            stilt_solution_error_norms(handle, &mut e3, &mut e1, &mut ed, &mut el)
        };
        assert_eq!(status, StiltStatus::Ok);
        assert!(e3 > 0.0 && e1 > 0.0 && ed > 0.0 && el > 0.0);

        let mut v = f64::NAN;
        let status = unsafe { stilt_solution_evaluate_volume(handle, 0.3, 0.4, 0.5, &mut v) };
        assert_eq!(status, StiltStatus::Ok);
        assert!(v.is_finite());
        let status = unsafe { stilt_solution_evaluate_line(handle, 0.5, &mut v) };
        assert_eq!(status, StiltStatus::Ok);
        assert!(v.is_finite());

        unsafe { stilt_solution_free(handle) };
    }

    #[test]
    fn errors_are_reported_through_status_codes() {
        let mut handle: *mut StiltSolution = ptr::null_mut();
        let status =
            unsafe { stilt_solve_benchmark(StiltFormulation::Coupled1d, 0, &mut handle) };
        assert_eq!(status, StiltStatus::InvalidArgument);
        assert!(handle.is_null());
        let msg = unsafe { CStr::from_ptr(stilt_last_error()) };
        assert!(!msg.to_bytes().is_empty());

        let status = unsafe {
            stilt_solve_benchmark(StiltFormulation::Coupled1d, 1, ptr::null_mut())
        };
        assert_eq!(status, StiltStatus::NullPointer);

        let status =
            unsafe { stilt_solution_dof_counts(ptr::null(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) };
        assert_eq!(status, StiltStatus::NullPointer);
    }

    #[test]
    fn out_of_mesh_evaluation_is_rejected() {
        let mut handle: *mut StiltSolution = ptr::null_mut();
        let status =
            unsafe { stilt_solve_benchmark(StiltFormulation::Coupled1d, 1, &mut handle) };
        assert_eq!(status, StiltStatus::Ok);
        let mut v = 0.0;
        let status = unsafe { stilt_solution_evaluate_volume(handle, 2.0, 0.0, 0.0, &mut v) };
        assert_eq!(status, StiltStatus::InvalidArgument);
        unsafe { stilt_solution_free(handle) };
    }

    #[test]
    fn version_is_a_nul_terminated_semver() {
        let v = unsafe { CStr::from_ptr(stilt_version()) };
        let s = v.to_str().unwrap();
        assert_eq!(s.split('.').count(), 3);
    }
}
