//! C ABI over `girg-core`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns a
//! [`GirgStatus`]; on failure [`girg_last_error_message`] describes the error
//! for the calling thread. Panics are caught and reported as
//! `GIRG_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use girg_core::features::graph_features;
use girg_core::pipeline::{read_edge_list, write_edge_list};
use girg_core::samplers::{sample_barabasi_albert, sample_boolean_girg, sample_erdos_renyi};
use girg_core::seed::rng_from_seed;
use girg_core::weights::sample_power_law_weights;
use girg_core::{DistanceSpec, Error, GirgParams, Graph, Topology};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GirgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Disconnected = 5,
    InsufficientData = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GirgTopology {
    Torus = 0,
    Cube = 1,
}

impl From<GirgTopology> for Topology {
    fn from(t: GirgTopology) -> Self {
        match t {
            GirgTopology::Torus => Topology::Torus,
            GirgTopology::Cube => Topology::Cube,
        }
    }
}

/// Parsed Boolean distance function.
pub struct GirgDistance(DistanceSpec);

/// Undirected simple graph on vertices `0..n`.
pub struct GirgGraph(Graph);

/// Named feature values of a graph.
pub struct GirgFeatures {
    keys: Vec<CString>,
    values: Vec<Option<f64>>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GirgStatus {
    match e {
        Error::Syntax { .. } | Error::Parse { .. } | Error::Csv(_) | Error::Corrupted(_) => GirgStatus::Parse,
        Error::Io { .. } => GirgStatus::Io,
        Error::Disconnected => GirgStatus::Disconnected,
        Error::InsufficientData(_) => GirgStatus::InsufficientData,
        _ => GirgStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (GirgStatus, String)>) -> GirgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GirgStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GirgStatus::Internal
        }
    }
}

fn core<T>(r: girg_core::Result<T>) -> Result<T, (GirgStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (GirgStatus, String) {
    (GirgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GirgStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (GirgStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (GirgStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread. Empty after a
/// successful call; valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn girg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses `text` (e.g. `"min(x0, max(x1, x2))"`) as a distance on `d` coordinates.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn girg_distance_parse(text: *const c_char, d: usize, out: *mut *mut GirgDistance) -> GirgStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let spec = core(DistanceSpec::parse(text, d))?;
        put(out, GirgDistance(spec))
    })
}

/// # Safety
/// `spec` must come from [`girg_distance_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn girg_distance_free(spec: *mut GirgDistance) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Number of coordinates of `spec`, 0 for a null handle.
///
/// # Safety
/// `spec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn girg_distance_dim(spec: *const GirgDistance) -> usize {
    spec.as_ref().map_or(0, |s| s.0.dim())
}

/// Volume of the ball of radius `r` under `spec`.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn girg_distance_volume(spec: *const GirgDistance, r: f64, out: *mut f64) -> GirgStatus {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        let v = core(girg_core::geometry::ball_volume(&spec.0, r))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = v;
        Ok(())
    })
}

/// Samples a GIRG with `n` Pareto(`tau`) weights (minimum 1) and uniform
/// positions, deterministically from `seed`.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn girg_sample_girg(
    spec: *const GirgDistance,
    topology: GirgTopology,
    n: usize,
    tau: f64,
    alpha: f64,
    c: f64,
    seed: u64,
    out: *mut *mut GirgGraph,
) -> GirgStatus {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        let params = core(GirgParams::new(tau, alpha, c, topology.into(), spec.0.clone()))?;
        let mut rng = rng_from_seed(seed);
        let weights = core(sample_power_law_weights(n, tau, 1.0, &mut rng))?;
        let g = core(sample_boolean_girg(&params, &weights, None, &mut rng))?;
        put(out, GirgGraph(g.graph))
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn girg_sample_erdos_renyi(n: usize, p: f64, seed: u64, out: *mut *mut GirgGraph) -> GirgStatus {
    guard(|| {
        let g = core(sample_erdos_renyi(n, p, &mut rng_from_seed(seed)))?;
        put(out, GirgGraph(g))
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn girg_sample_barabasi_albert(n: usize, k: usize, seed: u64, out: *mut *mut GirgGraph) -> GirgStatus {
    guard(|| {
        let g = core(sample_barabasi_albert(n, k, &mut rng_from_seed(seed)))?;
        put(out, GirgGraph(g))
    })
}

/// Builds a graph from `m` edges `(us[i], vs[i])`; loops and repeats are dropped.
///
/// # Safety
/// `us` and `vs` must each point to `m` readable values (or be null with
/// `m == 0`) and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn girg_graph_from_edges(
    n: usize,
    us: *const usize,
    vs: *const usize,
    m: usize,
    out: *mut *mut GirgGraph,
) -> GirgStatus {
    guard(|| {
        let edges: Vec<(usize, usize)> = if m == 0 {
            Vec::new()
        } else {
            if us.is_null() || vs.is_null() {
                return Err(null("edge arrays"));
            }
            let (us, vs) = (std::slice::from_raw_parts(us, m), std::slice::from_raw_parts(vs, m));
            us.iter().copied().zip(vs.iter().copied()).collect()
        };
        let g = core(Graph::from_edges(n, edges))?;
        put(out, GirgGraph(g))
    })
}

/// # Safety
/// `graph` must be null or a live handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn girg_graph_free(graph: *mut GirgGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn girg_graph_num_vertices(graph: *const GirgGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.n())
}

/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn girg_graph_num_edges(graph: *const GirgGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.m())
}

/// Copies up to `capacity` edges, `us[i] < vs[i]`, in ascending order, and
/// stores the total edge count in `written`.
///
/// # Safety
/// `graph` must be a live handle; `us` and `vs` must each have room for
/// `capacity` values; `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn girg_graph_edges(
    graph: *const GirgGraph,
    us: *mut usize,
    vs: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> GirgStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        if written.is_null() || (capacity > 0 && (us.is_null() || vs.is_null())) {
            return Err(null("output buffer"));
        }
        let mut edges: Vec<(usize, usize)> = g.0.edges().map(|(u, v)| (u.min(v), u.max(v))).collect();
        edges.sort_unstable();
        for (i, &(u, v)) in edges.iter().take(capacity).enumerate() {
            *us.add(i) = u;
            *vs.add(i) = v;
        }
        *written = edges.len();
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn girg_read_edge_list(path: *const c_char, out: *mut *mut GirgGraph) -> GirgStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let g = core(read_edge_list(Path::new(path)))?;
        put(out, GirgGraph(g))
    })
}

/// # Safety
/// `graph` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn girg_write_edge_list(graph: *const GirgGraph, path: *const c_char) -> GirgStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let path = str_arg(path, "path")?;
        core(write_edge_list(&g.0, Path::new(path)))
    })
}

/// Feature vector of the largest connected component of `graph`.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn girg_features_compute(graph: *const GirgGraph, out: *mut *mut GirgFeatures) -> GirgStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let fv = core(graph_features(&g.0))?;
        let keys = fv
            .entries()
            .iter()
            .map(|(k, _)| CString::new(k.as_str()).unwrap_or_default())
            .collect();
        let values = fv.entries().iter().map(|(_, v)| *v).collect();
        put(out, GirgFeatures { keys, values })
    })
}

/// # Safety
/// `features` must be null or a live handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn girg_features_free(features: *mut GirgFeatures) {
    if !features.is_null() {
        drop(Box::from_raw(features));
    }
}

/// # Safety
/// `features` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn girg_features_len(features: *const GirgFeatures) -> usize {
    features.as_ref().map_or(0, |f| f.keys.len())
}

/// Key of entry `i`, owned by the handle; null when out of range.
///
/// # Safety
/// `features` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn girg_features_key(features: *const GirgFeatures, i: usize) -> *const c_char {
    features
        .as_ref()
        .and_then(|f| f.keys.get(i))
        .map_or(ptr::null(), |k| k.as_ptr())
}

/// Value of entry `i`. Undefined values (e.g. closeness of a single vertex)
/// are reported as NaN with `defined = false`.
///
/// # Safety
/// `features` must be a live handle; `value` and `defined` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn girg_features_value(
    features: *const GirgFeatures,
    i: usize,
    value: *mut f64,
    defined: *mut bool,
) -> GirgStatus {
    guard(|| {
        let f = features.as_ref().ok_or_else(|| null("features"))?;
        if value.is_null() || defined.is_null() {
            return Err(null("output pointer"));
        }
        let v = *f
            .values
            .get(i)
            .ok_or_else(|| (GirgStatus::InvalidArgument, format!("index {i} out of range")))?;
        *value = v.unwrap_or(f64::NAN);
        *defined = v.is_some();
        Ok(())
    })
}
