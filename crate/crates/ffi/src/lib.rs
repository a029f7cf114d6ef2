//! C ABI over `meta_unsup`.
//!
//! Every fallible call returns a [`MuStatus`]. On failure the message is kept in a
//! thread-local slot readable through [`mu_last_error_message`] until the next call
//! on the same thread. Handles are opaque and must be released with their `*_free`
//! function. Panics never cross the boundary; they surface as `MU_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use meta_unsup::clusterers::{single_linkage_threshold, ClustererKind, ClustererSpec};
use meta_unsup::data_model::io::load_dataset_csv;
use meta_unsup::data_model::{Dataset, Partition, PointMatrix, WeightedGraph};
use meta_unsup::erm_meta::{fit_threshold_kruskal, generalization_bound, BoundParams, FamilySize};
use meta_unsup::meta_pipelines::{generate_runs, predict_k, select_algorithm, AlgoSelectModel, MetaKModel, RunConfig};
use meta_unsup::metrics::{ari_labels, clustering_loss, silhouette_score};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    Infeasible = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuClusterer {
    Kmeans = 0,
    AggloSingle = 1,
    AggloComplete = 2,
    AggloAverage = 3,
    AggloWard = 4,
}

impl From<MuClusterer> for ClustererKind {
    fn from(k: MuClusterer) -> Self {
        match k {
            MuClusterer::Kmeans => ClustererKind::Kmeans,
            MuClusterer::AggloSingle => ClustererKind::AggloSingle,
            MuClusterer::AggloComplete => ClustererKind::AggloComplete,
            MuClusterer::AggloAverage => ClustererKind::AggloAverage,
            MuClusterer::AggloWard => ClustererKind::AggloWard,
        }
    }
}

/// Points with optional ground-truth labels.
pub struct MuDataset(Dataset);

/// Accumulates labeled graphs and fits a single-linkage threshold on them.
pub struct MuThresholdTrainer(Vec<(WeightedGraph, Partition)>);

/// Per-k regression of ARI on silhouette, loaded from JSON.
pub struct MuMetaKModel(MetaKModel);

/// Per-member ARI predictors over a clustering family, loaded from JSON.
pub struct MuAlgoSelectModel(AlgoSelectModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: MuStatus,
    msg: String,
}

impl Failure {
    fn new(status: MuStatus, msg: impl Into<String>) -> Self {
        Self { status, msg: msg.into() }
    }

    fn null(what: &str) -> Self {
        Self::new(MuStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<meta_unsup::Error> for Failure {
    fn from(e: meta_unsup::Error) -> Self {
        let status = match &e {
            meta_unsup::Error::Infeasible(_) => MuStatus::Infeasible,
            e if e.is_data_error() => MuStatus::DataError,
            _ => MuStatus::InvalidArgument,
        };
        Self::new(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MuStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MuStatus::Ok,
        Ok(Err(fail)) => {
            set_last_error(&fail.msg);
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            MuStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn slice_mut<'a, T>(p: *mut T, n: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if n == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn write_out<T>(p: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    p.write(v);
    Ok(())
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(MuStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn copy_assignment(src: &[usize], dst: &mut [usize]) -> Result<(), Failure> {
    if src.len() != dst.len() {
        return Err(Failure::new(
            MuStatus::InvalidArgument,
            format!("assignment buffer holds {} entries, need {}", dst.len(), src.len()),
        ));
    }
    dst.copy_from_slice(src);
    Ok(())
}

unsafe fn edge_list(
    us: *const usize,
    vs: *const usize,
    ws: *const f64,
    n_edges: usize,
) -> Result<Vec<(usize, usize, f64)>, Failure> {
    let us = slice(us, n_edges, "us")?;
    let vs = slice(vs, n_edges, "vs")?;
    let ws = slice(ws, n_edges, "ws")?;
    Ok(us.iter().zip(vs).zip(ws).map(|((&u, &v), &w)| (u, v, w)).collect())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mu_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn mu_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Build a dataset from a row-major `rows x cols` buffer. `labels` may be NULL.
///
/// # Safety
/// `data` must hold `rows * cols` doubles; `labels`, when non-null, `rows` entries.
#[no_mangle]
pub unsafe extern "C" fn mu_dataset_new(
    data: *const f64,
    rows: usize,
    cols: usize,
    labels: *const usize,
    out: *mut *mut MuDataset,
) -> MuStatus {
    guard(|| {
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Failure::new(MuStatus::InvalidArgument, "rows * cols overflows"))?;
        let values = slice(data, len, "data")?.to_vec();
        let labels = if labels.is_null() { None } else { Some(slice(labels, rows, "labels")?.to_vec()) };
        let points = PointMatrix::new(rows, cols, values)?;
        let ds = Dataset::new("ffi", "ffi", points, labels)?;
        write_out(out, Box::into_raw(Box::new(MuDataset(ds))), "out")
    })
}

/// Load a CSV with columns `f0..f{d-1}` and, when `has_labels`, a final `label` column.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mu_dataset_load_csv(path: *const c_char, has_labels: bool, out: *mut *mut MuDataset) -> MuStatus {
    guard(|| {
        let path = c_str(path, "path")?;
        let ds = load_dataset_csv(path, has_labels)?;
        write_out(out, Box::into_raw(Box::new(MuDataset(ds))), "out")
    })
}

/// # Safety
/// `ds` must be NULL or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mu_dataset_rows(ds: *const MuDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.n())
}

/// # Safety
/// `ds` must be NULL or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mu_dataset_cols(ds: *const MuDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.d())
}

/// # Safety
/// `ds` must be NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mu_dataset_free(ds: *mut MuDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Fraction of item pairs on which two labelings disagree.
///
/// # Safety
/// `y` and `z` must hold `n` entries each.
#[no_mangle]
pub unsafe extern "C" fn mu_clustering_loss(y: *const usize, z: *const usize, n: usize, out: *mut f64) -> MuStatus {
    guard(|| {
        let y = Partition::from_assignment(slice(y, n, "y")?);
        let z = Partition::from_assignment(slice(z, n, "z")?);
        write_out(out, clustering_loss(n, &y, &z), "out")
    })
}

/// # Safety
/// `truth` and `pred` must hold `n` entries each.
#[no_mangle]
pub unsafe extern "C" fn mu_adjusted_rand_index(
    truth: *const usize,
    pred: *const usize,
    n: usize,
    out: *mut f64,
) -> MuStatus {
    guard(|| {
        let v = ari_labels(slice(truth, n, "truth")?, slice(pred, n, "pred")?)?;
        write_out(out, v, "out")
    })
}

/// # Safety
/// `assignment` must hold one entry per dataset row.
#[no_mangle]
pub unsafe extern "C" fn mu_silhouette(ds: *const MuDataset, assignment: *const usize, out: *mut f64) -> MuStatus {
    guard(|| {
        let ds = deref(ds, "ds")?;
        let a = slice(assignment, ds.0.n(), "assignment")?;
        let v = silhouette_score(ds.0.points(), &Partition::from_assignment(a))?;
        write_out(out, v, "out")
    })
}

/// Cluster a dataset into `k` parts and write one label per row into `assignment`.
///
/// # Safety
/// `assignment` must hold `capacity` entries; `capacity` must equal the row count.
#[no_mangle]
pub unsafe extern "C" fn mu_cluster(
    ds: *const MuDataset,
    kind: MuClusterer,
    k: usize,
    normalize: bool,
    seed: u64,
    assignment: *mut usize,
    capacity: usize,
) -> MuStatus {
    guard(|| {
        let ds = deref(ds, "ds")?;
        let spec = ClustererSpec::new(kind.into(), k).normalized(normalize).with_seed(seed);
        spec.validate()?;
        let res = spec.cluster(ds.0.points())?;
        copy_assignment(&res.assignment(), slice_mut(assignment, capacity, "assignment")?)
    })
}

/// Excess-loss bound for ERM over `family_size` algorithms from `n` problems.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mu_generalization_bound(n: usize, family_size: usize, delta: f64, out: *mut f64) -> MuStatus {
    guard(|| {
        let v = generalization_bound(&BoundParams { n, family: FamilySize::Count(family_size), delta })?;
        write_out(out, v, "out")
    })
}

/// Same bound for a family described by `bits` bits of parameters.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mu_generalization_bound_bits(n: usize, bits: u32, delta: f64, out: *mut f64) -> MuStatus {
    guard(|| {
        let v = generalization_bound(&BoundParams { n, family: FamilySize::Bits(bits), delta })?;
        write_out(out, v, "out")
    })
}

/// Single-linkage threshold clustering of an edge list: vertices joined by edges of
/// weight `<= r` (or `< r` when `strict`) share a label.
///
/// # Safety
/// `us`, `vs`, `ws` must hold `n_edges` entries; `assignment` must hold `n_vertices`.
#[no_mangle]
pub unsafe extern "C" fn mu_threshold_cluster(
    n_vertices: usize,
    us: *const usize,
    vs: *const usize,
    ws: *const f64,
    n_edges: usize,
    r: f64,
    strict: bool,
    assignment: *mut usize,
) -> MuStatus {
    guard(|| {
        let g = WeightedGraph::new(n_vertices, edge_list(us, vs, ws, n_edges)?)?;
        let part = single_linkage_threshold(&g, r, strict);
        copy_assignment(&part.assignment()?, slice_mut(assignment, n_vertices, "assignment")?)
    })
}

#[no_mangle]
pub extern "C" fn mu_threshold_trainer_new() -> *mut MuThresholdTrainer {
    Box::into_raw(Box::new(MuThresholdTrainer(Vec::new())))
}

/// Add one training graph with its ground-truth labels (`truth` has `n_vertices` entries).
///
/// # Safety
/// `trainer` must be a live handle; array lengths as described.
#[no_mangle]
pub unsafe extern "C" fn mu_threshold_trainer_add_graph(
    trainer: *mut MuThresholdTrainer,
    n_vertices: usize,
    us: *const usize,
    vs: *const usize,
    ws: *const f64,
    n_edges: usize,
    truth: *const usize,
) -> MuStatus {
    guard(|| {
        let t = trainer.as_mut().ok_or_else(|| Failure::null("trainer"))?;
        let g = WeightedGraph::new(n_vertices, edge_list(us, vs, ws, n_edges)?)?;
        let y = Partition::from_assignment(slice(truth, n_vertices, "truth")?);
        t.0.push((g, y));
        Ok(())
    })
}

/// # Safety
/// `trainer` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mu_threshold_trainer_len(trainer: *const MuThresholdTrainer) -> usize {
    trainer.as_ref().map_or(0, |t| t.0.len())
}

/// Fit the threshold minimising mean training loss; writes the threshold and its loss.
///
/// # Safety
/// `trainer` must be a live handle; outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mu_threshold_trainer_fit(
    trainer: *const MuThresholdTrainer,
    r_star: *mut f64,
    min_mean_loss: *mut f64,
) -> MuStatus {
    guard(|| {
        let t = deref(trainer, "trainer")?;
        let res = fit_threshold_kruskal(&t.0)?;
        write_out(r_star, res.r_star, "r_star")?;
        write_out(min_mean_loss, res.min_mean_loss, "min_mean_loss")
    })
}

/// # Safety
/// `trainer` must be NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mu_threshold_trainer_free(trainer: *mut MuThresholdTrainer) {
    if !trainer.is_null() {
        drop(Box::from_raw(trainer));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mu_meta_k_model_from_json(json: *const c_char, out: *mut *mut MuMetaKModel) -> MuStatus {
    guard(|| {
        let m = MetaKModel::from_json(c_str(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(MuMetaKModel(m))), "out")
    })
}

/// Run the k-means grid over the model's k range (`restarts` runs per k) and pick k.
///
/// # Safety
/// Handles must be live; `k_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mu_meta_k_predict(
    model: *const MuMetaKModel,
    ds: *const MuDataset,
    restarts: usize,
    seed: u64,
    k_out: *mut usize,
) -> MuStatus {
    guard(|| {
        let m = &deref(model, "model")?.0;
        let ds = deref(ds, "ds")?;
        let cfg = RunConfig { k_min: m.k_min, k_max: m.k_max(), restarts, seed };
        let records = generate_runs(&ds.0.without_labels(), &cfg)?;
        write_out(k_out, predict_k(m, &records)?, "k_out")
    })
}

/// # Safety
/// `model` must be NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mu_meta_k_model_free(model: *mut MuMetaKModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mu_algo_select_model_from_json(json: *const c_char, out: *mut *mut MuAlgoSelectModel) -> MuStatus {
    guard(|| {
        let m = AlgoSelectModel::from_json(c_str(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(MuAlgoSelectModel(m))), "out")
    })
}

/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mu_algo_select_model_members(model: *const MuAlgoSelectModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.members.len())
}

/// Run every family member on `ds`, write the index of the member with the highest
/// predicted ARI and its labels.
///
/// # Safety
/// Handles must be live; `assignment` must hold `capacity` entries equal to the row count.
#[no_mangle]
pub unsafe extern "C" fn mu_algo_select_choose(
    model: *const MuAlgoSelectModel,
    ds: *const MuDataset,
    member_out: *mut usize,
    assignment: *mut usize,
    capacity: usize,
) -> MuStatus {
    guard(|| {
        let m = &deref(model, "model")?.0;
        let ds = deref(ds, "ds")?;
        let (j, part) = select_algorithm(m, &ds.0)?;
        copy_assignment(&part.assignment()?, slice_mut(assignment, capacity, "assignment")?)?;
        write_out(member_out, j, "member_out")
    })
}

/// # Safety
/// `model` must be NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mu_algo_select_model_free(model: *mut MuAlgoSelectModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
