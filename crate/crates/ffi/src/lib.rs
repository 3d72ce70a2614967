//! C ABI over the longwave solvers.
//!
//! Every fallible function returns an [`LwStatus`]; on failure the message is
//! kept per thread and can be read with [`lw_last_error_message`]. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use longwave::boussinesq::{BoussinesqProblem, BoussinesqState};
use longwave::experiment::run_scenario;
use longwave::kdv::{KdvProblem, KdvState, KdvVariant};
use longwave::output::write_outputs;
use longwave::scenario::ScenarioConfig;
use longwave::{BathymetryProfile, Error, Field, Grid1D, ModelCoefficients, SolitonSpec, TimeGrid};

/// Status codes; 2, 3 and 4 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwStatus {
    Ok = 0,
    InvalidArgument = 1,
    Config = 2,
    Numerical = 3,
    Io = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Parameters of a Boussinesq handle.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LwBoussinesqParams {
    pub epsilon: f64,
    pub theta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub num_points: usize,
    pub dx: f64,
}

pub struct LwKdv {
    problem: KdvProblem,
    state: KdvState,
}

pub struct LwBoussinesq {
    problem: BoussinesqProblem,
    state: BoussinesqState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: LwStatus, msg: impl Into<String>) -> LwStatus {
    set_last_error(msg.into());
    status
}

fn from_error(e: Error) -> LwStatus {
    let status = match e.exit_code() {
        2 => LwStatus::Config,
        3 => LwStatus::Numerical,
        _ => LwStatus::Io,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> LwStatus) -> LwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(LwStatus::Panic, format!("panic: {msg}"))
        }
    }
}

/// # Safety
/// `p` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], LwStatus> {
    if p.is_null() {
        return Err(fail(LwStatus::InvalidArgument, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `buf` must be null or point to `len` writable doubles.
unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize) -> LwStatus {
    if buf.is_null() {
        return fail(LwStatus::InvalidArgument, "output buffer is null");
    }
    if len < values.len() {
        return fail(LwStatus::BufferTooSmall, format!("buffer holds {len} values, {} needed", values.len()));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    LwStatus::Ok
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn string<'a>(s: *const c_char, what: &str) -> Result<&'a str, LwStatus> {
    if s.is_null() {
        return Err(fail(LwStatus::InvalidArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(LwStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error of this thread into `buf` (NUL-terminated, truncated
/// to `len`). Returns the full message length plus one, or 0 when there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lw_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len()
        }
    })
}

/// Samples the soliton of amplitude `alpha` and initial shift `shift` at time `t`.
///
/// # Safety
/// `out` must point to `num_points` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lw_soliton_sample(
    alpha: f64,
    shift: f64,
    epsilon: f64,
    num_points: usize,
    dx: f64,
    t: f64,
    out: *mut f64,
) -> LwStatus {
    guard(|| {
        let grid = match Grid1D::new(num_points, dx) {
            Ok(g) => g,
            Err(e) => return from_error(e),
        };
        match SolitonSpec::new(alpha, shift, epsilon) {
            Ok(s) => copy_out(s.field(&grid, t).values(), out, num_points),
            Err(e) => from_error(e),
        }
    })
}

/// Creates a classical KdV integrator with time step `dx`, starting from `u0`.
///
/// # Safety
/// `u0` must point to `num_points` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lw_kdv_create(
    epsilon: f64,
    num_points: usize,
    dx: f64,
    u0: *const f64,
    out: *mut *mut LwKdv,
) -> LwStatus {
    guard(|| {
        if out.is_null() {
            return fail(LwStatus::InvalidArgument, "out is null");
        }
        *out = ptr::null_mut();
        let u0 = match slice(u0, num_points, "u0") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let build = || -> longwave::Result<LwKdv> {
            let grid = Grid1D::new(num_points, dx)?;
            let problem = KdvProblem::new(epsilon, grid, TimeGrid::new(dx, 1)?, KdvVariant::Classical)?;
            let state = problem.init_predictor(&Field::new(grid, u0.to_vec())?)?;
            Ok(LwKdv { problem, state })
        };
        match build() {
            Ok(h) => {
                *out = Box::into_raw(Box::new(h));
                LwStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Advances by `steps` time steps. The handle is unchanged on failure.
///
/// # Safety
/// `h` must be null or a live handle from [`lw_kdv_create`].
#[no_mangle]
pub unsafe extern "C" fn lw_kdv_step(h: *mut LwKdv, steps: usize) -> LwStatus {
    guard(|| {
        let Some(h) = h.as_mut() else {
            return fail(LwStatus::InvalidArgument, "handle is null");
        };
        let mut state = h.state.clone();
        for _ in 0..steps {
            match h.problem.step(&state) {
                Ok(s) => state = s,
                Err(e) => return from_error(e),
            }
        }
        h.state = state;
        LwStatus::Ok
    })
}

/// Current time; NaN for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lw_kdv_time(h: *const LwKdv) -> f64 {
    h.as_ref().map_or(f64::NAN, |h| h.state.time)
}

/// # Safety
/// `h` must be null or a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lw_kdv_get_field(h: *const LwKdv, buf: *mut f64, len: usize) -> LwStatus {
    guard(|| match h.as_ref() {
        Some(h) => copy_out(h.state.u_current.values(), buf, len),
        None => fail(LwStatus::InvalidArgument, "handle is null"),
    })
}

/// # Safety
/// `h` must be null or a handle from [`lw_kdv_create`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lw_kdv_free(h: *mut LwKdv) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Creates a Boussinesq integrator. `bottom` holds `b` at the nodes, or is
/// null for a flat bottom.
///
/// # Safety
/// `params` and `out` must be valid; `v0`, `eta0` and a non-null `bottom`
/// must point to `params.num_points` doubles.
#[no_mangle]
pub unsafe extern "C" fn lw_boussinesq_create(
    params: *const LwBoussinesqParams,
    v0: *const f64,
    eta0: *const f64,
    bottom: *const f64,
    out: *mut *mut LwBoussinesq,
) -> LwStatus {
    guard(|| {
        if out.is_null() {
            return fail(LwStatus::InvalidArgument, "out is null");
        }
        *out = ptr::null_mut();
        let Some(p) = params.as_ref() else {
            return fail(LwStatus::InvalidArgument, "params is null");
        };
        let n = p.num_points;
        let (v0, eta0) = match (slice(v0, n, "v0"), slice(eta0, n, "eta0")) {
            (Ok(v), Ok(e)) => (v, e),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let bottom = if bottom.is_null() { None } else { Some(std::slice::from_raw_parts(bottom, n)) };
        let build = || -> longwave::Result<LwBoussinesq> {
            let grid = Grid1D::new(n, p.dx)?;
            let coeffs = ModelCoefficients::new(p.theta, p.lambda1, p.lambda2, p.epsilon)?;
            let bathymetry = match bottom {
                None => BathymetryProfile::Flat,
                Some(b) => BathymetryProfile::Sampled { nodes: grid.coordinates(), values: b.to_vec() },
            };
            let problem = BoussinesqProblem::new(coeffs, bathymetry, grid, TimeGrid::new(p.dx, 1)?)?;
            let state = problem.init_boussinesq(&Field::new(grid, v0.to_vec())?, &Field::new(grid, eta0.to_vec())?)?;
            Ok(LwBoussinesq { problem, state })
        };
        match build() {
            Ok(h) => {
                *out = Box::into_raw(Box::new(h));
                LwStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `h` must be null or a live handle from [`lw_boussinesq_create`].
#[no_mangle]
pub unsafe extern "C" fn lw_boussinesq_step(h: *mut LwBoussinesq, steps: usize) -> LwStatus {
    guard(|| {
        let Some(h) = h.as_mut() else {
            return fail(LwStatus::InvalidArgument, "handle is null");
        };
        let mut state = h.state.clone();
        for _ in 0..steps {
            match h.problem.step_boussinesq(&state) {
                Ok(s) => state = s,
                Err(e) => return from_error(e),
            }
        }
        h.state = state;
        LwStatus::Ok
    })
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lw_boussinesq_time(h: *const LwBoussinesq) -> f64 {
    h.as_ref().map_or(f64::NAN, |h| h.state.time)
}

/// Copies the velocity `v` into `buf`.
///
/// # Safety
/// `h` must be null or a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lw_boussinesq_get_velocity(h: *const LwBoussinesq, buf: *mut f64, len: usize) -> LwStatus {
    guard(|| match h.as_ref() {
        Some(h) => copy_out(h.state.v_current.values(), buf, len),
        None => fail(LwStatus::InvalidArgument, "handle is null"),
    })
}

/// Copies the surface elevation `eta` into `buf`.
///
/// # Safety
/// `h` must be null or a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lw_boussinesq_get_surface(h: *const LwBoussinesq, buf: *mut f64, len: usize) -> LwStatus {
    guard(|| match h.as_ref() {
        Some(h) => copy_out(h.state.eta_current.values(), buf, len),
        None => fail(LwStatus::InvalidArgument, "handle is null"),
    })
}

/// # Safety
/// `h` must be null or a handle from [`lw_boussinesq_create`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lw_boussinesq_free(h: *mut LwBoussinesq) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Runs a scenario given as a JSON config and writes its CSV/JSON outputs to
/// `out_dir`, or to the config's `output_dir` when `out_dir` is null.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out_dir` null or one.
#[no_mangle]
pub unsafe extern "C" fn lw_run_scenario_json(config_json: *const c_char, out_dir: *const c_char) -> LwStatus {
    guard(|| {
        let json = match string(config_json, "config_json") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let dir = if out_dir.is_null() {
            None
        } else {
            match string(out_dir, "out_dir") {
                Ok(s) => Some(Path::new(s)),
                Err(s) => return s,
            }
        };
        let run = || -> longwave::Result<()> {
            let cfg = ScenarioConfig::from_json(json)?;
            let report = run_scenario(&cfg)?;
            write_outputs(&report, &cfg, dir)?;
            Ok(())
        };
        match run() {
            Ok(()) => LwStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}
