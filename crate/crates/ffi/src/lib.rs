//! C ABI for the `muscl` library.
//!
//! Every function returns a [`MusclStatus`]; on failure the message is
//! available from [`muscl_last_error`] on the same thread. Handles are
//! opaque and must be released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use muscl::bench::{check_theorem1, read_mesh_file, run_convergence_study, BenchConfig, BenchError, BenchReport};
use muscl::mesh::Mesh;
use muscl::optim::{solve_qp_active_set, BoxedDirectionalConstraints, OptimError, QuadraticObjective, DEFAULT_TOL};
use muscl::physics::{exact_riemann_euler, Primitive, RiemannSolution};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MusclStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Io = 4,
    Mesh = 5,
    Optim = 6,
    Physics = 7,
    Solver = 8,
    Panic = 9,
}

/// Benchmark configuration.
pub struct MusclConfig(BenchConfig);

/// Result table of a convergence study.
pub struct MusclReport(BenchReport);

/// Mesh loaded from a file.
pub struct MusclMesh(Mesh);

/// One row of a report. `eoc` is NaN on the first row.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MusclReportRow {
    pub elements: usize,
    pub h: f64,
    pub l1_error: f64,
    pub eoc: f64,
    pub wall_seconds: f64,
}

/// Gas state in primitive variables.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MusclPrimitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

/// Star region of an exact Riemann solution.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MusclStarState {
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(MusclStatus, String);

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        let status = match &e {
            BenchError::Config(_) | BenchError::Threads(_) => MusclStatus::Config,
            BenchError::ReadConfig { .. } | BenchError::Io(_) | BenchError::Csv(_) => MusclStatus::Io,
            BenchError::Mesh(_) => MusclStatus::Mesh,
            BenchError::Solver(_) => MusclStatus::Solver,
        };
        Failure(status, e.to_string())
    }
}

impl From<OptimError> for Failure {
    fn from(e: OptimError) -> Self {
        Failure(MusclStatus::Optim, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(MusclStatus::InvalidArgument, msg.into())
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, records any failure or panic, and converts it to a status.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> MusclStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MusclStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            MusclStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either NULL or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or_else(|| Failure(MusclStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn as_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(MusclStatus::NullPointer, format!("{what} is NULL")));
    }
    // SAFETY: non-null and NUL-terminated by contract.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(MusclStatus::NullPointer, format!("{what} is NULL")));
    }
    // SAFETY: non-null and writable by contract.
    unsafe { out.write(value) };
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn muscl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn muscl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a TOML benchmark configuration.
///
/// # Safety
/// `toml` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn muscl_config_from_toml(toml: *const c_char, out: *mut *mut MusclConfig) -> MusclStatus {
    guard(|| {
        let text = unsafe { as_str(toml, "toml") }?;
        let config = BenchConfig::from_toml(text)?;
        unsafe { write_out(out, Box::into_raw(Box::new(MusclConfig(config))), "out") }
    })
}

/// Overrides the worker count of a configuration (0 means all cores).
///
/// # Safety
/// `config` must come from [`muscl_config_from_toml`].
#[no_mangle]
pub unsafe extern "C" fn muscl_config_set_threads(config: *mut MusclConfig, threads: usize) -> MusclStatus {
    guard(|| {
        // SAFETY: pointer from this library by contract.
        let config = unsafe { config.as_mut() }.ok_or_else(|| Failure(MusclStatus::NullPointer, "config is NULL".into()))?;
        config.0.threads = (threads > 0).then_some(threads);
        Ok(())
    })
}

/// Serializes a configuration back to TOML. The string must be released
/// with [`muscl_string_free`].
///
/// # Safety
/// `config` must come from [`muscl_config_from_toml`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn muscl_config_to_toml(config: *const MusclConfig, out: *mut *mut c_char) -> MusclStatus {
    guard(|| {
        let config = unsafe { as_ref(config, "config") }?;
        let text = CString::new(config.0.to_toml()).map_err(|_| invalid("configuration contains NUL"))?;
        unsafe { write_out(out, text.into_raw(), "out") }
    })
}

/// Releases a configuration. NULL is ignored.
///
/// # Safety
/// `config` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn muscl_config_free(config: *mut MusclConfig) {
    if !config.is_null() {
        // SAFETY: created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn muscl_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: created by CString::into_raw in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Runs every level of a configuration and returns the report.
///
/// # Safety
/// `config` must come from [`muscl_config_from_toml`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn muscl_run_study(config: *const MusclConfig, out: *mut *mut MusclReport) -> MusclStatus {
    guard(|| {
        let config = unsafe { as_ref(config, "config") }?;
        let (report, _) = run_convergence_study(&config.0)?;
        unsafe { write_out(out, Box::into_raw(Box::new(MusclReport(report))), "out") }
    })
}

/// Number of rows (mesh levels) in a report.
///
/// # Safety
/// `report` must come from [`muscl_run_study`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn muscl_report_len(report: *const MusclReport, out: *mut usize) -> MusclStatus {
    guard(|| {
        let report = unsafe { as_ref(report, "report") }?;
        unsafe { write_out(out, report.0.rows.len(), "out") }
    })
}

/// Copies row `index` of a report.
///
/// # Safety
/// `report` must come from [`muscl_run_study`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn muscl_report_row(report: *const MusclReport, index: usize, out: *mut MusclReportRow) -> MusclStatus {
    guard(|| {
        let report = unsafe { as_ref(report, "report") }?;
        let row = report.0.rows.get(index).ok_or_else(|| invalid(format!("row {index} out of range")))?;
        let value = MusclReportRow {
            elements: row.elements,
            h: row.h,
            l1_error: row.l1_error,
            eoc: row.eoc.unwrap_or(f64::NAN),
            wall_seconds: row.wall_seconds,
        };
        unsafe { write_out(out, value, "out") }
    })
}

/// Writes a report as CSV to `path`.
///
/// # Safety
/// `report` must come from [`muscl_run_study`]; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn muscl_report_write_csv(report: *const MusclReport, path: *const c_char) -> MusclStatus {
    guard(|| {
        let report = unsafe { as_ref(report, "report") }?;
        let path = unsafe { as_str(path, "path") }?;
        let file = std::fs::File::create(path).map_err(BenchError::from)?;
        report.0.write_csv(file)?;
        Ok(())
    })
}

/// Releases a report. NULL is ignored.
///
/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn muscl_report_free(report: *mut MusclReport) {
    if !report.is_null() {
        // SAFETY: created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(report) });
    }
}

/// Loads a mesh from a Gmsh `.msh` file or the native text format.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn muscl_mesh_load(path: *const c_char, out: *mut *mut MusclMesh) -> MusclStatus {
    guard(|| {
        let path = unsafe { as_str(path, "path") }?;
        let mesh = read_mesh_file(Path::new(path))?;
        unsafe { write_out(out, Box::into_raw(Box::new(MusclMesh(mesh))), "out") }
    })
}

/// Spatial dimension and element count of a mesh.
///
/// # Safety
/// `mesh` must come from [`muscl_mesh_load`]; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn muscl_mesh_info(mesh: *const MusclMesh, dim: *mut usize, elements: *mut usize) -> MusclStatus {
    guard(|| {
        let mesh = unsafe { as_ref(mesh, "mesh") }?;
        unsafe { write_out(dim, mesh.0.dim(), "dim") }?;
        unsafe { write_out(elements, mesh.0.num_elements(), "elements") }
    })
}

/// Releases a mesh. NULL is ignored.
///
/// # Safety
/// `mesh` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn muscl_mesh_free(mesh: *mut MusclMesh) {
    if !mesh.is_null() {
        // SAFETY: created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(mesh) });
    }
}

fn riemann(left: MusclPrimitive, right: MusclPrimitive, gamma: f64) -> Result<RiemannSolution, Failure> {
    let prim = |s: MusclPrimitive| Primitive::new(s.rho, s.u, s.p);
    exact_riemann_euler(prim(left), prim(right), gamma).map_err(|e| Failure(MusclStatus::Physics, e.to_string()))
}

/// Star state of the exact Riemann problem for the 1D Euler equations.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn muscl_riemann_star(
    left: MusclPrimitive,
    right: MusclPrimitive,
    gamma: f64,
    out: *mut MusclStarState,
) -> MusclStatus {
    guard(|| {
        let s = riemann(left, right, gamma)?;
        let star = MusclStarState { p_star: s.p_star, u_star: s.u_star, rho_star_left: s.rho_star_left, rho_star_right: s.rho_star_right };
        unsafe { write_out(out, star, "out") }
    })
}

/// Exact Riemann solution at similarity coordinate `xi = x / t`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn muscl_riemann_sample(
    left: MusclPrimitive,
    right: MusclPrimitive,
    gamma: f64,
    xi: f64,
    out: *mut MusclPrimitive,
) -> MusclStatus {
    guard(|| {
        let w = riemann(left, right, gamma)?.sample(xi);
        unsafe { write_out(out, MusclPrimitive { rho: w.rho, u: w.u, p: w.p }, "out") }
    })
}

/// Gradient of one cell from the weighted least-squares fit restricted to
/// the admissible set: `count` neighbours with centroid offsets
/// `offsets[dim * k ..]`, value jumps `jumps[k]` and positive weights
/// `weights[k]`. Writes `dim` values to `gradient`.
///
/// # Safety
/// The input arrays must hold `dim * count`, `count` and `count` values;
/// `gradient` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn muscl_qp_gradient(
    dim: usize,
    count: usize,
    offsets: *const f64,
    jumps: *const f64,
    weights: *const f64,
    gradient: *mut f64,
) -> MusclStatus {
    guard(|| {
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        if count == 0 {
            return Err(invalid("at least one neighbour is required"));
        }
        if offsets.is_null() || jumps.is_null() || weights.is_null() || gradient.is_null() {
            return Err(Failure(MusclStatus::NullPointer, "an array argument is NULL".into()));
        }
        // SAFETY: lengths by contract, pointers checked for NULL above.
        let (offsets, jumps, weights) = unsafe {
            (
                std::slice::from_raw_parts(offsets, dim * count),
                std::slice::from_raw_parts(jumps, count),
                std::slice::from_raw_parts(weights, count),
            )
        };
        let mut h = [[0.0; 3]; 3];
        let mut g = [0.0; 3];
        let mut cons = BoxedDirectionalConstraints::new(dim)?;
        for k in 0..count {
            let o = &offsets[dim * k..dim * (k + 1)];
            let w = weights[k];
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid(format!("weight {k} must be positive and finite")));
            }
            for i in 0..dim {
                g[i] += w * jumps[k] * o[i];
                for j in 0..dim {
                    h[i][j] += w * o[i] * o[j];
                }
            }
            cons.push_jump(o, jumps[k])?;
        }
        let x = solve_qp_active_set(&QuadraticObjective::new(dim, h, g)?, &cons, DEFAULT_TOL)?;
        // SAFETY: `gradient` holds `dim` values by contract.
        unsafe { std::slice::from_raw_parts_mut(gradient, dim) }.copy_from_slice(&x[..dim]);
        Ok(())
    })
}

/// Largest deviation between QP and minmod gradients over `trials` random
/// fields on a periodic grid with `cells` cells per direction.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn muscl_check_minmod_equivalence(dim: usize, cells: usize, trials: usize, seed: u64, out: *mut f64) -> MusclStatus {
    guard(|| {
        let worst = check_theorem1(dim, cells, trials, seed)?;
        unsafe { write_out(out, worst, "out") }
    })
}
