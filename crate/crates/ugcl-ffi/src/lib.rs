//! C ABI for the ugcl library.
//!
//! Handles are opaque pointers owned by Rust; every constructor has a
//! matching `_free`. Functions return [`UgclStatus`]; on any non-OK status
//! the thread-local message from [`ugcl_last_error_message`] describes the
//! failure. Pointers must be valid for the duration of each call; buffers
//! are caller-allocated with sizes derived from the query functions.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ugcl::analysis::{
    measure_contextual_homophily, recommend_n, verify_contraction_with_budget,
};
use ugcl::error::UgclError;
use ugcl::graph::Graph;
use ugcl::io;
use ugcl::linalg::{xavier_init, DenseMatrix};
use ugcl::rng::SplitMix64;
use ugcl::trainer::{embed, measure_power_time, train, Ablation, TrainConfig, TrainedModel};

/// Status code of every FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UgclStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    NumericError = 4,
    IoError = 5,
    ConfigDrift = 6,
    VerifyFailed = 7,
    InternalPanic = 8,
}

/// Ablation selector for [`UgclTrainOptions`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UgclAblation {
    None = 0,
    MeanPool = 1,
    Oversmooth = 2,
    SingleEncoder = 3,
    NoSubsample = 4,
    NoPower = 5,
}

/// Training hyperparameters, plain-old-data for C callers.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct UgclTrainOptions {
    pub epochs: u64,
    pub sample_size: u64,
    pub power_n: u64,
    pub hidden_dim: u64,
    pub learning_rate: f64,
    pub temperature: f64,
    pub seed: u64,
    pub ablation: UgclAblation,
    pub use_bias: bool,
}

/// Opaque graph handle.
pub struct UgclGraph {
    inner: Graph,
}

/// Opaque trained-model handle.
pub struct UgclModel {
    inner: TrainedModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

fn status_of(err: &UgclError) -> UgclStatus {
    match err {
        UgclError::Parse { .. } => UgclStatus::ParseError,
        UgclError::Io { .. } => UgclStatus::IoError,
        UgclError::ConfigDrift { .. } => UgclStatus::ConfigDrift,
        UgclError::DivergentGradient(_) | UgclError::DivergentLoss { .. } => {
            UgclStatus::NumericError
        }
        _ => UgclStatus::InvalidArgument,
    }
}

fn fail(err: UgclError) -> UgclStatus {
    let code = status_of(&err);
    set_error(&err.to_string());
    code
}

fn guarded<F: FnOnce() -> UgclStatus>(body: F) -> UgclStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic crossed the FFI boundary");
            UgclStatus::InternalPanic
        }
    }
}

/// # Safety
/// `ptr` must be NULL or a NUL-terminated UTF-8 string.
unsafe fn opt_str<'a>(ptr: *const c_char) -> Result<Option<&'a str>, UgclStatus> {
    if ptr.is_null() {
        return Ok(None);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Some(s)),
        Err(_) => {
            set_error("string argument is not valid UTF-8");
            Err(UgclStatus::InvalidArgument)
        }
    }
}

unsafe fn req_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, UgclStatus> {
    match opt_str(ptr)? {
        Some(s) => Ok(s),
        None => {
            set_error(&format!("{what} must not be NULL"));
            Err(UgclStatus::NullPointer)
        }
    }
}

macro_rules! deref_or_null {
    ($ptr:expr, $what:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                set_error(concat!($what, " must not be NULL"));
                return UgclStatus::NullPointer;
            }
        }
    };
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next FFI call from the same thread.
#[no_mangle]
pub extern "C" fn ugcl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ugcl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Fill `opts` with the library defaults.
///
/// # Safety
/// `opts` must point to writable memory for one `UgclTrainOptions`.
#[no_mangle]
pub unsafe extern "C" fn ugcl_train_options_default(opts: *mut UgclTrainOptions) -> UgclStatus {
    guarded(|| {
        let Some(out) = (unsafe { opts.as_mut() }) else {
            set_error("opts must not be NULL");
            return UgclStatus::NullPointer;
        };
        let d = TrainConfig::default();
        *out = UgclTrainOptions {
            epochs: d.epochs as u64,
            sample_size: d.sample_size as u64,
            power_n: d.power_n as u64,
            hidden_dim: d.hidden_dim as u64,
            learning_rate: d.learning_rate,
            temperature: d.temperature,
            seed: d.seed,
            ablation: UgclAblation::None,
            use_bias: d.use_bias,
        };
        UgclStatus::Ok
    })
}

fn train_config_of(opts: &UgclTrainOptions) -> TrainConfig {
    TrainConfig {
        epochs: opts.epochs as usize,
        sample_size: opts.sample_size as usize,
        power_n: opts.power_n as usize,
        hidden_dim: opts.hidden_dim as usize,
        learning_rate: opts.learning_rate,
        temperature: opts.temperature,
        seed: opts.seed,
        ablation: match opts.ablation {
            UgclAblation::None => Ablation::None,
            UgclAblation::MeanPool => Ablation::MeanPool,
            UgclAblation::Oversmooth => Ablation::Oversmooth,
            UgclAblation::SingleEncoder => Ablation::SingleEncoder,
            UgclAblation::NoSubsample => Ablation::NoSubsample,
            UgclAblation::NoPower => Ablation::NoPower,
        },
        use_bias: opts.use_bias,
        log_every: 0,
    }
}

// ---------------------------------------------------------------------------
// graph construction and queries
// ---------------------------------------------------------------------------

/// Build a graph from parallel edge arrays and a row-major feature matrix.
/// `labels` may be NULL; otherwise it holds `num_nodes` entries with -1 for
/// unlabeled nodes. Duplicate edges and self-loops are dropped.
///
/// # Safety
/// `edge_u`/`edge_v` hold `num_edges` entries, `features` holds
/// `num_nodes * feature_dim` doubles, `labels` is NULL or `num_nodes` longs,
/// and `out` is a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn ugcl_graph_from_arrays(
    num_nodes: usize,
    edge_u: *const u64,
    edge_v: *const u64,
    num_edges: usize,
    features: *const f64,
    feature_dim: usize,
    labels: *const i64,
    out: *mut *mut UgclGraph,
) -> UgclStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out must not be NULL");
            return UgclStatus::NullPointer;
        }
        if (edge_u.is_null() || edge_v.is_null()) && num_edges > 0 {
            set_error("edge arrays must not be NULL when num_edges > 0");
            return UgclStatus::NullPointer;
        }
        if features.is_null() && num_nodes * feature_dim > 0 {
            set_error("features must not be NULL");
            return UgclStatus::NullPointer;
        }

        let edges: Vec<(usize, usize)> = (0..num_edges)
            .map(|i| unsafe { (*edge_u.add(i) as usize, *edge_v.add(i) as usize) })
            .collect();
        let feat_len = num_nodes * feature_dim;
        let feat_vec = if feat_len == 0 {
            Vec::new()
        } else {
            unsafe { std::slice::from_raw_parts(features, feat_len) }.to_vec()
        };
        let feat = match DenseMatrix::from_vec(num_nodes, feature_dim, feat_vec) {
            Ok(m) => m,
            Err(e) => return fail(e),
        };
        let label_vec = if labels.is_null() || num_nodes == 0 {
            None
        } else {
            Some(unsafe { std::slice::from_raw_parts(labels, num_nodes) }.to_vec())
        };
        match Graph::from_edges(num_nodes, &edges, feat, label_vec) {
            Ok(graph) => {
                unsafe { *out = Box::into_raw(Box::new(UgclGraph { inner: graph })) };
                UgclStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Load a graph from the plain-text dataset files. `labels_path` may be NULL.
///
/// # Safety
/// Paths are NUL-terminated UTF-8 strings; `out` is a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn ugcl_graph_load(
    edges_path: *const c_char,
    features_path: *const c_char,
    labels_path: *const c_char,
    out: *mut *mut UgclGraph,
) -> UgclStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out must not be NULL");
            return UgclStatus::NullPointer;
        }
        let edges = match unsafe { req_str(edges_path, "edges_path") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let features = match unsafe { req_str(features_path, "features_path") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let labels = match unsafe { opt_str(labels_path) } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let bundle = io::DatasetBundle {
            edges_path: edges.to_string(),
            features_path: features.to_string(),
            labels_path: labels.map(str::to_string),
            split_path: None,
        };
        match io::load_dataset(&bundle) {
            Ok((graph, _, _)) => {
                unsafe { *out = Box::into_raw(Box::new(UgclGraph { inner: graph })) };
                UgclStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `graph` must be a handle from this library, not yet freed; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ugcl_graph_free(graph: *mut UgclGraph) {
    if !graph.is_null() {
        drop(unsafe { Box::from_raw(graph) });
    }
}

/// # Safety
/// `graph` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ugcl_graph_num_nodes(graph: *const UgclGraph) -> usize {
    unsafe { graph.as_ref() }.map_or(0, |g| g.inner.num_nodes())
}

/// Undirected edge count (each edge counted once).
///
/// # Safety
/// `graph` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ugcl_graph_num_edges(graph: *const UgclGraph) -> usize {
    unsafe { graph.as_ref() }.map_or(0, |g| g.inner.num_edges())
}

/// # Safety
/// `graph` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ugcl_graph_feature_dim(graph: *const UgclGraph) -> usize {
    unsafe { graph.as_ref() }.map_or(0, |g| g.inner.feature_dim())
}

/// Sparsity (E/N^2), average degree (E/N), and component count.
///
/// # Safety
/// `graph` is a live handle; output pointers may be NULL to skip a field.
#[no_mangle]
pub unsafe extern "C" fn ugcl_graph_stats(
    graph: *const UgclGraph,
    out_sparsity: *mut f64,
    out_avg_degree: *mut f64,
    out_components: *mut usize,
) -> UgclStatus {
    guarded(|| {
        let g = deref_or_null!(graph, "graph");
        match g.inner.stats() {
            Ok(stats) => {
                if let Some(p) = unsafe { out_sparsity.as_mut() } {
                    *p = stats.sparsity;
                }
                if let Some(p) = unsafe { out_avg_degree.as_mut() } {
                    *p = stats.avg_degree;
                }
                if let Some(p) = unsafe { out_components.as_mut() } {
                    *p = stats.num_components;
                }
                UgclStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

// ---------------------------------------------------------------------------
// training, embedding, persistence
// ---------------------------------------------------------------------------

/// Train the encoders; `opts` may be NULL for defaults.
///
/// # Safety
/// `graph` is a live handle, `opts` NULL or valid, `out` a writable slot.
#[no_mangle]
pub unsafe extern "C" fn ugcl_train(
    graph: *const UgclGraph,
    opts: *const UgclTrainOptions,
    out: *mut *mut UgclModel,
) -> UgclStatus {
    guarded(|| {
        let g = deref_or_null!(graph, "graph");
        if out.is_null() {
            set_error("out must not be NULL");
            return UgclStatus::NullPointer;
        }
        let cfg = match unsafe { opts.as_ref() } {
            Some(o) => train_config_of(o),
            None => TrainConfig::default(),
        };
        match train(&g.inner, &cfg) {
            Ok((model, _report)) => {
                unsafe { *out = Box::into_raw(Box::new(UgclModel { inner: model })) };
                UgclStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `model` must be a handle from this library, not yet freed; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ugcl_model_free(model: *mut UgclModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// # Safety
/// `model` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ugcl_model_hidden_dim(model: *const UgclModel) -> usize {
    unsafe { model.as_ref() }.map_or(0, |m| m.inner.theta.out_dim())
}

/// Final embeddings `H = H_theta + Â^n H_theta` on the full graph, written
/// row-major into `out`, which holds `num_nodes * hidden_dim` doubles.
///
/// # Safety
/// `graph` and `model` are live handles; `out` points to `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ugcl_embed(
    graph: *const UgclGraph,
    model: *const UgclModel,
    out: *mut f64,
    out_len: usize,
) -> UgclStatus {
    guarded(|| {
        let g = deref_or_null!(graph, "graph");
        let m = deref_or_null!(model, "model");
        if out.is_null() {
            set_error("out must not be NULL");
            return UgclStatus::NullPointer;
        }
        let n = m.inner.config.aggregation_power();
        match embed(&g.inner, &m.inner.theta, n) {
            Ok(h) => {
                let needed = h.rows() * h.cols();
                if out_len < needed {
                    set_error(&format!(
                        "output buffer holds {out_len} doubles, need {needed}"
                    ));
                    return UgclStatus::InvalidArgument;
                }
                unsafe {
                    std::ptr::copy_nonoverlapping(h.data().as_ptr(), out, needed);
                }
                UgclStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `model` is a live handle; `path` is a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn ugcl_model_save(
    model: *const UgclModel,
    path: *const c_char,
) -> UgclStatus {
    guarded(|| {
        let m = deref_or_null!(model, "model");
        let path = match unsafe { req_str(path, "path") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        match io::save_params(path, &m.inner) {
            Ok(()) => UgclStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `path` is a NUL-terminated UTF-8 string; `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn ugcl_model_load(
    path: *const c_char,
    out: *mut *mut UgclModel,
) -> UgclStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out must not be NULL");
            return UgclStatus::NullPointer;
        }
        let path = match unsafe { req_str(path, "path") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        match io::load_params(path) {
            Ok(saved) => {
                unsafe { *out = Box::into_raw(Box::new(UgclModel { inner: saved.model })) };
                UgclStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

// ---------------------------------------------------------------------------
// analysis
// ---------------------------------------------------------------------------

/// Measured contextual homophily rate per scope, written into `out_rates`
/// (`n_max` doubles). Needs a labeled graph.
///
/// # Safety
/// `graph` is a live handle; `out_rates` points to `n_max` doubles.
#[no_mangle]
pub unsafe extern "C" fn ugcl_homophily_rates(
    graph: *const UgclGraph,
    n_max: usize,
    out_rates: *mut f64,
) -> UgclStatus {
    guarded(|| {
        let g = deref_or_null!(graph, "graph");
        if out_rates.is_null() {
            set_error("out_rates must not be NULL");
            return UgclStatus::NullPointer;
        }
        match measure_contextual_homophily(&g.inner, n_max) {
            Ok(rates) => {
                unsafe {
                    std::ptr::copy_nonoverlapping(rates.as_ptr(), out_rates, rates.len());
                }
                UgclStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Recommended contextual scope: the largest `n <= n_max` whose measured
/// rate stays at or above `threshold`. `out_warning` is set when every rate
/// is below threshold (scope falls back to 1).
///
/// # Safety
/// `graph` is a live handle; `out_n` and `out_warning` are writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn ugcl_recommend_scope(
    graph: *const UgclGraph,
    n_max: usize,
    threshold: f64,
    out_n: *mut usize,
    out_warning: *mut bool,
) -> UgclStatus {
    guarded(|| {
        let g = deref_or_null!(graph, "graph");
        let rates = match measure_contextual_homophily(&g.inner, n_max) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        match recommend_n(&rates, threshold) {
            Ok(rec) => {
                if let Some(p) = unsafe { out_n.as_mut() } {
                    *p = rec.n;
                }
                if let Some(p) = unsafe { out_warning.as_mut() } {
                    *p = rec.below_threshold;
                }
                UgclStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Lower bound on the scope-`n` homophily rate from average degree `d` and
/// 1-hop rate `p1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ugcl_homophily_lower_bound(
    d: f64,
    p1: f64,
    n: usize,
    out: *mut f64,
) -> UgclStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out must not be NULL");
            return UgclStatus::NullPointer;
        }
        match ugcl::analysis::homophily_lower_bound(d, p1, n) {
            Ok(b) => {
                unsafe { *out = b };
                UgclStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Run the spectral contraction check on `graph` with a seeded random
/// feature block. Returns `VerifyFailed` when any assertion fails.
///
/// # Safety
/// `graph` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn ugcl_verify_contraction(
    graph: *const UgclGraph,
    n_max: usize,
    eigen_budget: usize,
    seed: u64,
) -> UgclStatus {
    guarded(|| {
        let g = deref_or_null!(graph, "graph");
        let h = xavier_init(g.inner.num_nodes(), 4, &mut SplitMix64::new(seed));
        match verify_contraction_with_budget(&g.inner, &h, n_max, eigen_budget) {
            Ok(report) if report.passed() => UgclStatus::Ok,
            Ok(report) => {
                set_error(&report.failures.join("; "));
                UgclStatus::VerifyFailed
            }
            Err(e) => fail(e),
        }
    })
}

/// Median seconds for one `Â^n` application against a `width`-column block.
///
/// # Safety
/// `graph` is a live handle; `out_seconds` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ugcl_measure_power_time(
    graph: *const UgclGraph,
    n: usize,
    repeats: usize,
    width: usize,
    out_seconds: *mut f64,
) -> UgclStatus {
    guarded(|| {
        let g = deref_or_null!(graph, "graph");
        if out_seconds.is_null() {
            set_error("out_seconds must not be NULL");
            return UgclStatus::NullPointer;
        }
        match measure_power_time(&g.inner, n, repeats, width) {
            Ok(t) => {
                unsafe { *out_seconds = t };
                UgclStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
