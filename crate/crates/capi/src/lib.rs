//! C ABI for the owcc library: opaque handles, status codes, and a
//! thread-local detail message for the last failure.
//!
//! Handles returned by `*_read_file` / `owcc_detect` own their data and must
//! be released with the matching `*_free`. Covers are bound to the graph
//! they were computed or loaded against; mixing handles from different
//! graphs is reported as `OWCC_STATUS_DATA_MISMATCH`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fmt::Display;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use owcc::cover::PostProcess;
use owcc::{Cover, Error, Graph, RunConfig, WccContext};

/// Result of every fallible call. `owcc_last_error` carries the detail text
/// for the most recent failure on the calling thread.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OwccStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    EmptyGraph = 5,
    DataMismatch = 6,
    InvalidConfig = 7,
    UndefinedScore = 8,
}

/// Detection parameters; obtain defaults from `owcc_config_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OwccConfig {
    /// Nodes per batch; 1 runs the fully sequential algorithm.
    pub queue_size: usize,
    /// Worker threads used per batch.
    pub worker_count: usize,
    /// Relative improvement below which iteration stops (0 < t < 1).
    pub wcc_threshold: f64,
    /// Hard iteration cap.
    pub max_iterations: usize,
    /// Final-cover cleanup: 0 none, 1 drop duplicates, 2 also drop nested.
    pub post_process: i32,
}

/// Opaque preprocessed graph handle.
pub struct OwccGraph {
    graph: Graph,
}

/// Opaque community cover handle.
pub struct OwccCover {
    cover: Cover,
    node_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: OwccStatus, message: impl Display) -> OwccStatus {
    let text = CString::new(message.to_string())
        .unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
    status
}

fn fail_error(error: Error) -> OwccStatus {
    let status = match &error {
        Error::Io(_) => OwccStatus::Io,
        Error::Parse { .. } => OwccStatus::Parse,
        Error::EmptyGraph => OwccStatus::EmptyGraph,
        Error::Config(_) => OwccStatus::InvalidConfig,
        Error::UndefinedScore(_) => OwccStatus::UndefinedScore,
        _ => OwccStatus::DataMismatch,
    };
    fail(status, error)
}

unsafe fn path_arg(ptr: *const c_char) -> Result<PathBuf, OwccStatus> {
    if ptr.is_null() {
        return Err(fail(OwccStatus::NullPointer, "path is NULL"));
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => Err(fail(OwccStatus::InvalidUtf8, "path is not valid UTF-8")),
    }
}

/// Detail message of the calling thread's most recent failure. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn owcc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn owcc_status_message(status: OwccStatus) -> *const c_char {
    let text: &'static CStr = match status {
        OwccStatus::Ok => c"ok",
        OwccStatus::NullPointer => c"required pointer was NULL",
        OwccStatus::InvalidUtf8 => c"string was not valid UTF-8",
        OwccStatus::Io => c"I/O failure",
        OwccStatus::Parse => c"malformed input file",
        OwccStatus::EmptyGraph => c"input contains no usable edges",
        OwccStatus::DataMismatch => c"data does not match the graph",
        OwccStatus::InvalidConfig => c"invalid configuration",
        OwccStatus::UndefinedScore => c"score undefined for this input",
    };
    text.as_ptr()
}

/// Read an edge list from a file and build the preprocessed graph.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn owcc_graph_read_file(
    path: *const c_char,
    out: *mut *mut OwccGraph,
) -> OwccStatus {
    if out.is_null() {
        return fail(OwccStatus::NullPointer, "out is NULL");
    }
    let path = match path_arg(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let file = match File::open(&path) {
        Ok(f) => f,
        Err(e) => return fail(OwccStatus::Io, format!("{}: {e}", path.display())),
    };
    match owcc::read_graph(BufReader::new(file)) {
        Ok(graph) => {
            *out = Box::into_raw(Box::new(OwccGraph { graph }));
            OwccStatus::Ok
        }
        Err(e) => fail_error(e),
    }
}

/// Release a graph handle. NULL is ignored.
///
/// # Safety
/// `graph` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn owcc_graph_free(graph: *mut OwccGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn owcc_graph_node_count(graph: *const OwccGraph) -> usize {
    if graph.is_null() {
        return 0;
    }
    (*graph).graph.node_count()
}

/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn owcc_graph_edge_count(graph: *const OwccGraph) -> usize {
    if graph.is_null() {
        return 0;
    }
    (*graph).graph.edge_count()
}

/// Mean local clustering coefficient of the graph.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn owcc_graph_global_cc(graph: *const OwccGraph) -> f64 {
    if graph.is_null() {
        return 0.0;
    }
    (*graph).graph.global_cc()
}

/// Default detection parameters: sequential queue, one worker, threshold
/// 0.01, at most 100 iterations, no post-processing.
#[no_mangle]
pub extern "C" fn owcc_config_default() -> OwccConfig {
    OwccConfig {
        queue_size: 1,
        worker_count: 1,
        wcc_threshold: 0.01,
        max_iterations: 100,
        post_process: 0,
    }
}

fn run_config(config: &OwccConfig) -> Result<RunConfig, OwccStatus> {
    let post_process = match config.post_process {
        0 => PostProcess::None,
        1 => PostProcess::Dedupe,
        2 => PostProcess::Nested,
        other => {
            return Err(fail(
                OwccStatus::InvalidConfig,
                format!("post_process {other} out of range"),
            ))
        }
    };
    let config = RunConfig {
        queue_size: config.queue_size,
        worker_count: config.worker_count,
        wcc_threshold: config.wcc_threshold,
        max_iterations: config.max_iterations,
        dump_each_iteration: false,
        post_process,
    };
    config.validate().map_err(fail_error)?;
    Ok(config)
}

unsafe fn detect_impl(
    graph: *const OwccGraph,
    config: *const OwccConfig,
    initial: Option<Cover>,
    out: *mut *mut OwccCover,
) -> OwccStatus {
    if graph.is_null() || config.is_null() || out.is_null() {
        return fail(OwccStatus::NullPointer, "graph, config and out are required");
    }
    let config = match run_config(&*config) {
        Ok(c) => c,
        Err(status) => return status,
    };
    let graph = &(*graph).graph;
    match owcc::run(graph, &config, initial) {
        Ok(result) => {
            *out = Box::into_raw(Box::new(OwccCover {
                cover: result.cover,
                node_count: graph.node_count(),
            }));
            OwccStatus::Ok
        }
        Err(e) => fail_error(e),
    }
}

/// Detect overlapping communities; writes a new cover handle to `out`.
///
/// # Safety
/// All pointers must be valid; `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn owcc_detect(
    graph: *const OwccGraph,
    config: *const OwccConfig,
    out: *mut *mut OwccCover,
) -> OwccStatus {
    detect_impl(graph, config, None, out)
}

/// Detect starting from an existing cover instead of the greedy
/// self-initialization.
///
/// # Safety
/// All pointers must be valid live handles; `initial` must belong to `graph`.
#[no_mangle]
pub unsafe extern "C" fn owcc_detect_seeded(
    graph: *const OwccGraph,
    config: *const OwccConfig,
    initial: *const OwccCover,
    out: *mut *mut OwccCover,
) -> OwccStatus {
    if initial.is_null() {
        return fail(OwccStatus::NullPointer, "initial cover is NULL");
    }
    if !graph.is_null() && (*initial).node_count != (*graph).graph.node_count() {
        return fail(
            OwccStatus::DataMismatch,
            "initial cover belongs to a different graph",
        );
    }
    detect_impl(graph, config, Some((*initial).cover.clone()), out)
}

/// Release a cover handle. NULL is ignored.
///
/// # Safety
/// `cover` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn owcc_cover_free(cover: *mut OwccCover) {
    if !cover.is_null() {
        drop(Box::from_raw(cover));
    }
}

/// # Safety
/// `cover` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn owcc_cover_community_count(cover: *const OwccCover) -> usize {
    if cover.is_null() {
        return 0;
    }
    (*cover).cover.community_count()
}

/// Estimator score of the cover against its graph.
///
/// # Safety
/// Both handles must be live and belong together.
#[no_mangle]
pub unsafe extern "C" fn owcc_cover_wcc(
    graph: *const OwccGraph,
    cover: *const OwccCover,
    out: *mut f64,
) -> OwccStatus {
    if graph.is_null() || cover.is_null() || out.is_null() {
        return fail(OwccStatus::NullPointer, "graph, cover and out are required");
    }
    if (*cover).node_count != (*graph).graph.node_count() {
        return fail(OwccStatus::DataMismatch, "cover belongs to a different graph");
    }
    *out = WccContext::new(&(*graph).graph, &(*cover).cover).total_score();
    OwccStatus::Ok
}

/// Load a cover file (one community per line, original node IDs).
///
/// # Safety
/// `graph` must be a live handle, `path` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn owcc_cover_read_file(
    graph: *const OwccGraph,
    path: *const c_char,
    out: *mut *mut OwccCover,
) -> OwccStatus {
    if graph.is_null() || out.is_null() {
        return fail(OwccStatus::NullPointer, "graph and out are required");
    }
    let path = match path_arg(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let file = match File::open(&path) {
        Ok(f) => f,
        Err(e) => return fail(OwccStatus::Io, format!("{}: {e}", path.display())),
    };
    match Cover::load(BufReader::new(file), &(*graph).graph) {
        Ok(cover) => {
            *out = Box::into_raw(Box::new(OwccCover {
                cover,
                node_count: (*graph).graph.node_count(),
            }));
            OwccStatus::Ok
        }
        Err(e) => fail_error(e),
    }
}

/// Write a cover in the text format (communities in ID order, original node
/// IDs ascending, LF line endings).
///
/// # Safety
/// Handles must be live and belong together; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn owcc_cover_write_file(
    graph: *const OwccGraph,
    cover: *const OwccCover,
    path: *const c_char,
) -> OwccStatus {
    if graph.is_null() || cover.is_null() {
        return fail(OwccStatus::NullPointer, "graph and cover are required");
    }
    if (*cover).node_count != (*graph).graph.node_count() {
        return fail(OwccStatus::DataMismatch, "cover belongs to a different graph");
    }
    let path = match path_arg(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let mut buffer = Vec::new();
    if let Err(e) = (*cover).cover.dump(&(*graph).graph, &mut buffer) {
        return fail_error(e);
    }
    match std::fs::write(&path, buffer) {
        Ok(()) => OwccStatus::Ok,
        Err(e) => fail(OwccStatus::Io, format!("{}: {e}", path.display())),
    }
}

type EvalArgs<'a> = (&'a Graph, Vec<Vec<u64>>, Vec<Vec<u64>>);

unsafe fn eval_args<'a>(
    graph: *const OwccGraph,
    detected: *const OwccCover,
    truth: *const OwccCover,
    out: *mut f64,
) -> Result<EvalArgs<'a>, OwccStatus> {
    if graph.is_null() || detected.is_null() || truth.is_null() || out.is_null() {
        return Err(fail(OwccStatus::NullPointer, "all arguments are required"));
    }
    let g = &(*graph).graph;
    if (*detected).node_count != g.node_count() || (*truth).node_count != g.node_count() {
        return Err(fail(
            OwccStatus::DataMismatch,
            "covers belong to a different graph",
        ));
    }
    Ok((
        g,
        (*detected).cover.member_id_sets(g),
        (*truth).cover.member_id_sets(g),
    ))
}

/// Overlapping F1 of `detected` against `truth` (asymmetric best-match
/// average over the detected communities).
///
/// # Safety
/// All handles must be live and belong to `graph`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn owcc_eval_f1(
    graph: *const OwccGraph,
    detected: *const OwccCover,
    truth: *const OwccCover,
    out: *mut f64,
) -> OwccStatus {
    let (_, detected, truth) = match eval_args(graph, detected, truth, out) {
        Ok(v) => v,
        Err(status) => return status,
    };
    match owcc::f1_overlapping(&detected, &truth) {
        Ok(value) => {
            *out = value;
            OwccStatus::Ok
        }
        Err(e) => fail_error(e),
    }
}

/// Symmetric overlapping NMI distance between the covers (0 identical,
/// 1 maximally dissimilar).
///
/// # Safety
/// All handles must be live and belong to `graph`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn owcc_eval_onmi(
    graph: *const OwccGraph,
    detected: *const OwccCover,
    truth: *const OwccCover,
    out: *mut f64,
) -> OwccStatus {
    let (g, detected, truth) = match eval_args(graph, detected, truth, out) {
        Ok(v) => v,
        Err(status) => return status,
    };
    match owcc::onmi_distance(&detected, &truth, g.node_count()) {
        Ok(value) => {
            *out = value;
            OwccStatus::Ok
        }
        Err(e) => fail_error(e),
    }
}
