//! C interface to the vqcas solver.
//!
//! Every function returns a [`VqcasStatus`]. On failure a message is kept per
//! thread and can be read with [`vqcas_last_error`]. Handles are opaque and
//! must be released with the matching `_free` function; passing NULL to a
//! `_free` function is allowed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use vqcas::ansatz::{AnsatzKind, AnsatzParameters};
use vqcas::chem::{parse_fcidump, ChemError};
use vqcas::opt::OptimizerConfig;
use vqcas::qop::{ActiveSpaceIntegrals, SectorSpec};
use vqcas::sim::NoiseModel;
use vqcas::solve::{exact_casci, vqd, vqe, vqe_ac, Backend, Problem, SolveError, SolveResult, VqdConfig};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VqcasStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Solver = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

pub const VQCAS_METHOD_VQE: i32 = 0;
pub const VQCAS_METHOD_VQD: i32 = 1;
pub const VQCAS_METHOD_VQE_AC: i32 = 2;

/// Solver options. Obtain defaults from [`vqcas_solve_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct VqcasSolveOptions {
    /// One of the `VQCAS_METHOD_*` constants.
    pub method: i32,
    /// `sr`, `ra(D)` or `esu2(D)`; NULL selects `sr`.
    pub ansatz: *const c_char,
    pub beta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// Nonzero selects the noisy sampled backend with the default noise model.
    pub noisy: i32,
    pub shots: u64,
    pub seed: u64,
    pub max_evaluations: usize,
}

/// Mapped two-qubit problem plus the integrals it came from.
pub struct VqcasProblem {
    integrals: ActiveSpaceIntegrals,
    problem: Problem,
}

pub struct VqcasResult {
    kind: AnsatzKind,
    result: SolveResult,
}

struct Failure(VqcasStatus, String);

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let status = match e {
            SolveError::InvalidInput(_) | SolveError::Ansatz(_) => VqcasStatus::InvalidArgument,
            _ => VqcasStatus::Solver,
        };
        Failure(status, e.to_string())
    }
}

impl From<ChemError> for Failure {
    fn from(e: ChemError) -> Self {
        let status = match e {
            ChemError::Parse { .. } => VqcasStatus::Parse,
            ChemError::Io { .. } => VqcasStatus::Io,
            _ => VqcasStatus::Solver,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(VqcasStatus::InvalidArgument, msg.into())
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Run `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VqcasStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            VqcasStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            VqcasStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(VqcasStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(VqcasStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(VqcasStatus::NullPointer, format!("{what} is NULL")))
}

/// Copy `values` into a caller buffer. `written` receives the full length
/// even when the buffer is too small.
unsafe fn copy_out(values: &[f64], out: *mut f64, capacity: usize, written: *mut usize) -> Result<(), Failure> {
    *out_arg(written, "written")? = values.len();
    if values.len() > capacity {
        return Err(Failure(
            VqcasStatus::BufferTooSmall,
            format!("need room for {} values, got {capacity}", values.len()),
        ));
    }
    if !values.is_empty() {
        if out.is_null() {
            return Err(Failure(VqcasStatus::NullPointer, "output buffer is NULL".into()));
        }
        std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    }
    Ok(())
}

fn make_problem(integrals: ActiveSpaceIntegrals) -> Result<Box<VqcasProblem>, Failure> {
    let problem = Problem::from_integrals(&integrals)?;
    Ok(Box::new(VqcasProblem { integrals, problem }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vqcas_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn vqcas_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Load a two-orbital, two-electron, MS2 = 0 FCIDUMP file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vqcas_problem_from_fcidump(path: *const c_char, out: *mut *mut VqcasProblem) -> VqcasStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = std::ptr::null_mut();
        let path = str_arg(path, "path")?;
        let data = parse_fcidump(Path::new(path))?;
        if data.sector()? != SectorSpec::two_electron_singlet() {
            return Err(invalid("only NELEC = 2 with MS2 = 0 is supported"));
        }
        *out = Box::into_raw(make_problem(data.integrals)?);
        Ok(())
    })
}

/// Build a problem from two-orbital integrals in chemists' notation:
/// `h1[p*2 + q]` and `h2[((p*2 + q)*2 + r)*2 + s]`.
///
/// # Safety
/// `h1` must point to 4 and `h2` to 16 readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vqcas_problem_from_integrals(
    e_core: f64,
    h1: *const f64,
    h2: *const f64,
    out: *mut *mut VqcasProblem,
) -> VqcasStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = std::ptr::null_mut();
        let h1 = std::slice::from_raw_parts(ref_arg(h1, "h1")?, 4).to_vec();
        let h2 = std::slice::from_raw_parts(ref_arg(h2, "h2")?, 16).to_vec();
        let ints = ActiveSpaceIntegrals::new(e_core, 2, h1, h2).map_err(|e| invalid(e.to_string()))?;
        *out = Box::into_raw(make_problem(ints)?);
        Ok(())
    })
}

/// # Safety
/// `problem` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vqcas_problem_free(problem: *mut VqcasProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Exact singlet energies in ascending order.
///
/// # Safety
/// `problem` must be a live handle, `out` must hold `capacity` doubles and
/// `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vqcas_exact_singlet_energies(
    problem: *const VqcasProblem,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> VqcasStatus {
    guard(|| {
        let p = ref_arg(problem, "problem")?;
        let oracle = exact_casci(&p.integrals, &SectorSpec::two_electron_singlet(), usize::MAX)?;
        let energies: Vec<f64> = oracle.singlets().iter().map(|r| r.energy).collect();
        copy_out(&energies, out, capacity, written)
    })
}

/// Statevector VQE/AC with the spin-restricted ansatz and the default
/// overlap bound.
#[no_mangle]
pub extern "C" fn vqcas_solve_options_default() -> VqcasSolveOptions {
    let nm = NoiseModel::default();
    VqcasSolveOptions {
        method: VQCAS_METHOD_VQE_AC,
        ansatz: std::ptr::null(),
        beta: 5.0,
        gamma: 0.0,
        epsilon: vqcas::solve::DEFAULT_EPSILON,
        noisy: 0,
        shots: nm.shots,
        seed: nm.seed,
        max_evaluations: OptimizerConfig::default().max_evaluations,
    }
}

/// Solve for the state above `lower` (the ground state when `n_lower` is 0).
///
/// # Safety
/// `problem` must be a live handle, `options` valid, `lower` an array of
/// `n_lower` live result handles (may be NULL when `n_lower` is 0) and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vqcas_solve(
    problem: *const VqcasProblem,
    options: *const VqcasSolveOptions,
    lower: *const *const VqcasResult,
    n_lower: usize,
    out: *mut *mut VqcasResult,
) -> VqcasStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = std::ptr::null_mut();
        let p = ref_arg(problem, "problem")?;
        let o = ref_arg(options, "options")?;
        let kind: AnsatzKind = if o.ansatz.is_null() {
            AnsatzKind::SpinRestricted
        } else {
            str_arg(o.ansatz, "ansatz")?.parse().map_err(|e: vqcas::ansatz::AnsatzError| invalid(e.to_string()))?
        };
        let mut lower_params: Vec<AnsatzParameters> = Vec::with_capacity(n_lower);
        if n_lower > 0 {
            for &h in std::slice::from_raw_parts(ref_arg(lower, "lower")?, n_lower) {
                let r = ref_arg(h, "lower state")?;
                if r.kind != kind {
                    return Err(invalid(format!("lower state uses {} but options select {kind}", r.kind)));
                }
                lower_params.push(r.result.theta_star.clone());
            }
        }
        let backend = if o.noisy != 0 {
            Backend::noisy(NoiseModel::default().with_shots(o.shots).with_seed(o.seed))
        } else {
            Backend::Statevector
        };
        let cfg = OptimizerConfig {
            max_evaluations: o.max_evaluations,
            ..OptimizerConfig::default()
        };
        let result = match (n_lower, o.method) {
            (_, m) if !(VQCAS_METHOD_VQE..=VQCAS_METHOD_VQE_AC).contains(&m) => {
                return Err(invalid(format!("unknown method {m}")))
            }
            (0, _) | (_, VQCAS_METHOD_VQE) => vqe(&p.problem, kind, &backend, &cfg)?,
            (_, VQCAS_METHOD_VQD) => vqd(&p.problem, kind, &backend, &lower_params, &VqdConfig::new(o.beta, o.gamma)?, &cfg)?,
            _ => vqe_ac(&p.problem, kind, &backend, &lower_params, o.epsilon, &cfg)?,
        };
        *out = Box::into_raw(Box::new(VqcasResult { kind, result }));
        Ok(())
    })
}

/// # Safety
/// `result` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vqcas_result_free(result: *mut VqcasResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be a live handle and `energy` valid.
#[no_mangle]
pub unsafe extern "C" fn vqcas_result_energy(result: *const VqcasResult, energy: *mut f64) -> VqcasStatus {
    guard(|| {
        *out_arg(energy, "energy")? = ref_arg(result, "result")?.result.energy;
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle and `s_squared` valid.
#[no_mangle]
pub unsafe extern "C" fn vqcas_result_s_squared(result: *const VqcasResult, s_squared: *mut f64) -> VqcasStatus {
    guard(|| {
        *out_arg(s_squared, "s_squared")? = ref_arg(result, "result")?.result.s_squared;
        Ok(())
    })
}

/// Writes 1 when the optimizer met its tolerance, 0 otherwise.
///
/// # Safety
/// `result` must be a live handle and `converged` valid.
#[no_mangle]
pub unsafe extern "C" fn vqcas_result_converged(result: *const VqcasResult, converged: *mut i32) -> VqcasStatus {
    guard(|| {
        *out_arg(converged, "converged")? = i32::from(ref_arg(result, "result")?.result.converged);
        Ok(())
    })
}

/// Optimal circuit parameters.
///
/// # Safety
/// `result` must be a live handle, `out` must hold `capacity` doubles and
/// `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vqcas_result_parameters(
    result: *const VqcasResult,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> VqcasStatus {
    guard(|| copy_out(ref_arg(result, "result")?.result.theta_star.values(), out, capacity, written))
}

/// Squared overlaps with the lower states passed to [`vqcas_solve`].
///
/// # Safety
/// As for [`vqcas_result_parameters`].
#[no_mangle]
pub unsafe extern "C" fn vqcas_result_overlaps(
    result: *const VqcasResult,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> VqcasStatus {
    guard(|| copy_out(&ref_arg(result, "result")?.result.overlaps_with_lower, out, capacity, written))
}
