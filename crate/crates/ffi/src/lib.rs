//! C ABI for `homdist`.
//!
//! Objects are opaque heap handles created by `hd_*_parse`/`hd_*` functions
//! and released with the matching `hd_*_free`. Every fallible call returns an
//! `HD_*` status code and writes its result through an out-pointer; on
//! failure `hd_last_error()` describes the error for the calling thread.
//! Strings returned through out-pointers are owned by the caller and must be
//! released with `hd_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use homdist::distance::{
    color_distance, cut_distance_upper, path_dist_spectral, tree_dist_cutnorm, tree_dist_spectral, Bound,
    DistanceReport, SolverOptions,
};
use homdist::hom::hom_tree;
use homdist::refine::{cr_equivalent, quotient};
use homdist::{Error, Graph, WeightedGraph};

pub const HD_OK: i32 = 0;
/// Null pointer, invalid UTF-8 or an unknown enum value.
pub const HD_ERR_USAGE: i32 = 1;
pub const HD_ERR_PARSE: i32 = 2;
pub const HD_ERR_PRECONDITION: i32 = 3;
pub const HD_ERR_NONCONVERGENCE: i32 = 4;
pub const HD_ERR_INVARIANT: i32 = 5;
/// A Rust panic was caught at the boundary.
pub const HD_ERR_PANIC: i32 = 6;

pub const HD_KIND_TREE_SPECTRAL: i32 = 0;
pub const HD_KIND_TREE_CUT: i32 = 1;
pub const HD_KIND_PATH_SPECTRAL: i32 = 2;
pub const HD_KIND_CUT: i32 = 3;
pub const HD_KIND_COLOR: i32 = 4;

pub const HD_BOUND_EXACT: i32 = 0;
pub const HD_BOUND_UPPER: i32 = 1;
pub const HD_BOUND_ESTIMATE: i32 = 2;

/// A simple undirected graph.
pub struct HdGraph(Graph);

/// A weighted graph with positive vertex weights and edge weights in [0, 1].
pub struct HdWeightedGraph(WeightedGraph);

/// The result of a distance computation.
pub struct HdReport(DistanceReport);

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HdSolverOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl From<HdSolverOptions> for SolverOptions {
    fn from(o: HdSolverOptions) -> Self {
        SolverOptions {
            tol: o.tol,
            max_iters: o.max_iters,
            restarts: o.restarts,
            seed: o.seed,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(code: i32, message: impl Into<String>) -> i32 {
    set_error(message.into());
    code
}

fn from_error(e: Error) -> i32 {
    fail(e.exit_code(), e.to_string())
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), i32>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HD_OK,
        Ok(Err(code)) => code,
        Err(_) => fail(HD_ERR_PANIC, "panic inside homdist"),
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, i32> {
    if s.is_null() {
        return Err(fail(HD_ERR_USAGE, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(HD_ERR_USAGE, "string is not UTF-8"))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, i32> {
    p.as_ref().ok_or_else(|| fail(HD_ERR_USAGE, format!("null {what}")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), i32> {
    if out.is_null() {
        return Err(fail(HD_ERR_USAGE, "null out-pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), i32> {
    let c = CString::new(s).map_err(|_| fail(HD_ERR_INVARIANT, "string with interior nul"))?;
    put(out, c.into_raw())
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn hd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses the `n m` / `u v` edge-list format.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_graph_parse(text_in: *const c_char, out: *mut *mut HdGraph) -> i32 {
    guard(|| {
        let g = Graph::parse(text(text_in)?).map_err(from_error)?;
        put(out, Box::into_raw(Box::new(HdGraph(g))))
    })
}

/// Builds a graph from `m` edges stored as `2m` consecutive vertex indices.
///
/// # Safety
/// `edges` must point to `2 * m` readable values (or be NULL when `m == 0`).
#[no_mangle]
pub unsafe extern "C" fn hd_graph_from_edges(n: usize, edges: *const usize, m: usize, out: *mut *mut HdGraph) -> i32 {
    guard(|| {
        let flat: &[usize] = if m == 0 {
            &[]
        } else {
            if edges.is_null() {
                return Err(fail(HD_ERR_USAGE, "null edge array"));
            }
            std::slice::from_raw_parts(edges, 2 * m)
        };
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let g = Graph::from_edges(n, &pairs).map_err(from_error)?;
        put(out, Box::into_raw(Box::new(HdGraph(g))))
    })
}

/// # Safety
/// `g` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn hd_graph_free(g: *mut HdGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn hd_graph_vertex_count(g: *const HdGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.vertex_count())
}

/// # Safety
/// `g` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn hd_graph_edge_count(g: *const HdGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Parses the JSON weighted-graph format.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_weighted_parse(text_in: *const c_char, out: *mut *mut HdWeightedGraph) -> i32 {
    guard(|| {
        let w = WeightedGraph::parse(text(text_in)?).map_err(from_error)?;
        put(out, Box::into_raw(Box::new(HdWeightedGraph(w))))
    })
}

/// # Safety
/// `w` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn hd_weighted_free(w: *mut HdWeightedGraph) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// # Safety
/// `w` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_weighted_to_json(w: *const HdWeightedGraph, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let w = get(w, "weighted graph")?;
        put_string(out, w.0.serialize())
    })
}

/// The color-refinement quotient of `g`.
///
/// # Safety
/// `g` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_quotient(g: *const HdGraph, out: *mut *mut HdWeightedGraph) -> i32 {
    guard(|| {
        let q = quotient(&get(g, "graph")?.0).map_err(from_error)?;
        put(out, Box::into_raw(Box::new(HdWeightedGraph(q))))
    })
}

/// Whether color refinement fails to distinguish `g` and `h`.
///
/// # Safety
/// `g`, `h` must be valid handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_cr_equivalent(g: *const HdGraph, h: *const HdGraph, out: *mut bool) -> i32 {
    guard(|| {
        let eq = cr_equivalent(&get(g, "graph")?.0, &get(h, "graph")?.0).map_err(from_error)?;
        put(out, eq)
    })
}

/// Exact homomorphism count from a tree, written as a rational `p/q` or integer string.
///
/// # Safety
/// `tree`, `target` must be valid handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_hom_tree(
    tree: *const HdGraph,
    target: *const HdWeightedGraph,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let count = hom_tree(&get(tree, "tree")?.0, &get(target, "target")?.0).map_err(from_error)?;
        put_string(out, count.to_string())
    })
}

#[no_mangle]
pub extern "C" fn hd_solver_options_default() -> HdSolverOptions {
    let o = SolverOptions::default();
    HdSolverOptions {
        tol: o.tol,
        max_iters: o.max_iters,
        restarts: o.restarts,
        seed: o.seed,
    }
}

/// Computes the distance selected by `kind` (`HD_KIND_*`). `options` may be
/// NULL for the defaults. A report is produced even when the solver hits its
/// iteration cap; check `hd_report_converged`.
///
/// # Safety
/// `g`, `h` must be valid handles, `options` NULL or valid, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_distance(
    kind: i32,
    g: *const HdGraph,
    h: *const HdGraph,
    options: *const HdSolverOptions,
    out: *mut *mut HdReport,
) -> i32 {
    guard(|| {
        let (g, h) = (&get(g, "graph")?.0, &get(h, "graph")?.0);
        let opts = match options.as_ref() {
            Some(o) => SolverOptions::from(*o),
            None if matches!(kind, HD_KIND_CUT | HD_KIND_COLOR) => SolverOptions::for_cut_distance(),
            None => SolverOptions::default(),
        };
        let report = match kind {
            HD_KIND_TREE_SPECTRAL => tree_dist_spectral(g, h, &opts),
            HD_KIND_TREE_CUT => tree_dist_cutnorm(g, h, &opts),
            HD_KIND_PATH_SPECTRAL => path_dist_spectral(g, h, &opts),
            HD_KIND_CUT => cut_distance_upper(&g.as_weighted(), &h.as_weighted(), &opts),
            HD_KIND_COLOR => color_distance(g, h, &opts),
            _ => return Err(fail(HD_ERR_USAGE, format!("unknown distance kind {kind}"))),
        }
        .map_err(from_error)?;
        put(out, Box::into_raw(Box::new(HdReport(report))))
    })
}

/// # Safety
/// `r` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn hd_report_free(r: *mut HdReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// The reported value, or NaN for a NULL handle.
///
/// # Safety
/// `r` must be NULL or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn hd_report_value(r: *const HdReport) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.value)
}

/// # Safety
/// `r` must be NULL or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn hd_report_lower_bound(r: *const HdReport) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.lower_bound)
}

/// One of `HD_BOUND_*`, or -1 for a NULL handle.
///
/// # Safety
/// `r` must be NULL or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn hd_report_bound(r: *const HdReport) -> i32 {
    r.as_ref().map_or(-1, |r| match r.0.bound {
        Bound::Exact => HD_BOUND_EXACT,
        Bound::Upper => HD_BOUND_UPPER,
        Bound::Estimate => HD_BOUND_ESTIMATE,
    })
}

/// # Safety
/// `r` must be NULL or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn hd_report_converged(r: *const HdReport) -> bool {
    r.as_ref().is_some_and(|r| r.0.converged)
}

/// # Safety
/// `r` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_report_to_json(r: *const HdReport, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, get(r, "report")?.0.to_json()))
}

/// Certificate CSV with a marginal and residual header line.
///
/// # Safety
/// `r` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_report_certificate_csv(r: *const HdReport, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, get(r, "report")?.0.certificate_csv()))
}
