//! C ABI for the disambiguation engine: opaque handles, status codes, and
//! UTF-8 strings allocated by this library.
//!
//! Conventions:
//! - Every fallible call returns a [`WsdStatus`]; on failure a thread-local
//!   message is readable through [`wsd_last_error`] until the next failing
//!   call on the same thread.
//! - Strings returned through out-parameters are owned by the caller and
//!   must be released with [`wsd_string_free`].
//! - Handles must be released with their matching `_free` function. All
//!   functions tolerate NULL where documented and report `Usage` otherwise.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wsd_core::classifier::TrainedModel;
use wsd_core::corpus::Dataset;
use wsd_core::eval::{instance_rng, run_trials, EvalError, TrialConfig};
use wsd_core::features::{FeatureSchema, FeatureSources, SchemaParams};

/// Result of every fallible call. Mirrors the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsdStatus {
    /// Success.
    Ok = 0,
    /// Invalid arguments or configuration (NULL pointers, bad thresholds,
    /// oversized test splits).
    Usage = 1,
    /// Corpus, model, or I/O data errors.
    Data = 2,
}

/// Knowledge-source mask bit: POS window and morphology.
pub const WSD_SOURCE_POS: u32 = 1;
/// Knowledge-source mask bit: surrounding keywords.
pub const WSD_SOURCE_WORDS: u32 = 2;
/// Knowledge-source mask bit: local collocations.
pub const WSD_SOURCE_COLLOC: u32 = 4;
/// Knowledge-source mask bit: verb-object relation.
pub const WSD_SOURCE_VERB: u32 = 8;
/// All four knowledge sources.
pub const WSD_SOURCES_ALL: u32 = 15;

/// A parsed sense-tagged corpus for one target word.
pub struct WsdDataset(Dataset);

/// A trained per-word classifier.
pub struct WsdModel(TrainedModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: WsdStatus, message: impl Into<Vec<u8>>) -> WsdStatus {
    let message =
        CString::new(message).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
    status
}

/// Run `body` with panics converted into `Data` failures.
fn guarded(body: impl FnOnce() -> WsdStatus) -> WsdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(WsdStatus::Data, "internal panic"),
    }
}

/// # Safety
/// `ptr` must be NULL or a NUL-terminated string valid for the call.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, WsdStatus> {
    if ptr.is_null() {
        return Err(fail(WsdStatus::Usage, "NULL string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(WsdStatus::Usage, "string argument is not valid UTF-8"))
}

fn give_string(text: String, out: *mut *mut c_char) -> WsdStatus {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            WsdStatus::Ok
        }
        Err(_) => fail(WsdStatus::Data, "result contains an interior NUL byte"),
    }
}

fn sources_from_mask(mask: u32) -> Result<FeatureSources, WsdStatus> {
    if mask == 0 || mask & !WSD_SOURCES_ALL != 0 {
        return Err(fail(WsdStatus::Usage, "invalid knowledge-source mask"));
    }
    Ok(FeatureSources {
        pos_morph: mask & WSD_SOURCE_POS != 0,
        surrounding_words: mask & WSD_SOURCE_WORDS != 0,
        collocations: mask & WSD_SOURCE_COLLOC != 0,
        verb_object: mask & WSD_SOURCE_VERB != 0,
    })
}

/// The message of the most recent failure on this thread, or NULL if no
/// call has failed yet. The pointer stays valid until the next failing
/// call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn wsd_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned through one of this
/// library's string out-parameters, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wsd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a corpus from NUL-terminated text in the instance file format.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must point to
/// writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wsd_dataset_parse(
    text: *const c_char,
    out: *mut *mut WsdDataset,
) -> WsdStatus {
    guarded(|| {
        if out.is_null() {
            return fail(WsdStatus::Usage, "NULL out-parameter");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match Dataset::parse(text) {
            Ok(ds) => {
                *out = Box::into_raw(Box::new(WsdDataset(ds)));
                WsdStatus::Ok
            }
            Err(e) => fail(WsdStatus::Data, e.to_string()),
        }
    })
}

/// Parse a corpus file from disk.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must point to
/// writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wsd_dataset_parse_file(
    path: *const c_char,
    out: *mut *mut WsdDataset,
) -> WsdStatus {
    guarded(|| {
        if out.is_null() {
            return fail(WsdStatus::Usage, "NULL out-parameter");
        }
        let path = match read_str(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(WsdStatus::Data, format!("cannot read {path}: {e}")),
        };
        match Dataset::parse(&text) {
            Ok(ds) => {
                *out = Box::into_raw(Box::new(WsdDataset(ds)));
                WsdStatus::Ok
            }
            Err(e) => fail(WsdStatus::Data, format!("{path}: {e}")),
        }
    })
}

/// Number of instances in the dataset; 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn wsd_dataset_len(ds: *const WsdDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.len())
}

/// The dataset's target word as a new string (free with `wsd_string_free`).
///
/// # Safety
/// `ds` must be a live dataset handle; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wsd_dataset_word(
    ds: *const WsdDataset,
    out: *mut *mut c_char,
) -> WsdStatus {
    guarded(|| {
        let (Some(ds), false) = (ds.as_ref(), out.is_null()) else {
            return fail(WsdStatus::Usage, "NULL argument");
        };
        give_string(ds.0.word.clone(), out)
    })
}

/// The instance id at `index` (free with `wsd_string_free`).
///
/// # Safety
/// `ds` must be a live dataset handle; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wsd_dataset_instance_id(
    ds: *const WsdDataset,
    index: usize,
    out: *mut *mut c_char,
) -> WsdStatus {
    guarded(|| {
        let (Some(ds), false) = (ds.as_ref(), out.is_null()) else {
            return fail(WsdStatus::Usage, "NULL argument");
        };
        match ds.0.instances.get(index) {
            Some(inst) => give_string(inst.id.clone(), out),
            None => fail(
                WsdStatus::Usage,
                format!("instance index {index} out of range"),
            ),
        }
    })
}

/// Release a dataset handle.
///
/// # Safety
/// `ds` must be NULL or a live dataset handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wsd_dataset_free(ds: *mut WsdDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Train a model on every instance of the dataset with the given selection
/// thresholds and all four knowledge sources.
///
/// # Safety
/// `ds` must be a live dataset handle; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wsd_train(
    ds: *const WsdDataset,
    m1: f64,
    m2: u32,
    m3: u32,
    out: *mut *mut WsdModel,
) -> WsdStatus {
    guarded(|| {
        let (Some(ds), false) = (ds.as_ref(), out.is_null()) else {
            return fail(WsdStatus::Usage, "NULL argument");
        };
        if !(0.0..=1.0).contains(&m1) || m2 == 0 || m3 == 0 {
            return fail(WsdStatus::Usage, "m1 must be in [0,1], m2 and m3 positive");
        }
        let dataset = &ds.0;
        let refs: Vec<_> = dataset.instances.iter().collect();
        let params = SchemaParams { m1, m2, m3 };
        let schema = match FeatureSchema::induce(
            &dataset.word,
            dataset.pos,
            &dataset.senses,
            &refs,
            params,
            FeatureSources::ALL,
        ) {
            Ok(s) => s,
            Err(e) => return fail(WsdStatus::Data, e.to_string()),
        };
        let examples = match refs
            .iter()
            .map(|i| schema.encode(i))
            .collect::<Result<Vec<_>, _>>()
        {
            Ok(ex) => ex,
            Err(e) => return fail(WsdStatus::Data, e.to_string()),
        };
        match TrainedModel::train(schema, examples) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(WsdModel(model)));
                WsdStatus::Ok
            }
            Err(e) => fail(WsdStatus::Data, e.to_string()),
        }
    })
}

/// Write a model to disk in the versioned container format.
///
/// # Safety
/// `model` must be a live model handle; `path` a valid NUL-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn wsd_model_save(model: *const WsdModel, path: *const c_char) -> WsdStatus {
    guarded(|| {
        let Some(model) = model.as_ref() else {
            return fail(WsdStatus::Usage, "NULL model handle");
        };
        let path = match read_str(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match std::fs::write(path, model.0.save()) {
            Ok(()) => WsdStatus::Ok,
            Err(e) => fail(WsdStatus::Data, format!("cannot write {path}: {e}")),
        }
    })
}

/// Load a model file, rejecting unknown format versions.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must point to
/// writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wsd_model_load(path: *const c_char, out: *mut *mut WsdModel) -> WsdStatus {
    guarded(|| {
        if out.is_null() {
            return fail(WsdStatus::Usage, "NULL out-parameter");
        }
        let path = match read_str(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let bytes = match std::fs::read(path) {
            Ok(b) => b,
            Err(e) => return fail(WsdStatus::Data, format!("cannot read {path}: {e}")),
        };
        match TrainedModel::load(&bytes) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(WsdModel(model)));
                WsdStatus::Ok
            }
            Err(e) => fail(WsdStatus::Data, format!("{path}: {e}")),
        }
    })
}

/// Number of stored exemplars; 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn wsd_model_exemplar_count(model: *const WsdModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.exemplars.len())
}

/// Release a model handle.
///
/// # Safety
/// `model` must be NULL or a live model handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wsd_model_free(model: *mut WsdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Classify the dataset instance at `index`. The tie-breaking source is
/// derived from `seed` and the instance id, so results do not depend on
/// call order. On success `out_sense` receives the predicted sense label
/// (free with `wsd_string_free`) and `out_distance` the nearest-exemplar
/// distance.
///
/// # Safety
/// `model` and `ds` must be live handles; `out_sense` and `out_distance`
/// must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn wsd_classify(
    model: *const WsdModel,
    ds: *const WsdDataset,
    index: usize,
    seed: u64,
    out_sense: *mut *mut c_char,
    out_distance: *mut f64,
) -> WsdStatus {
    guarded(|| {
        let (Some(model), Some(ds)) = (model.as_ref(), ds.as_ref()) else {
            return fail(WsdStatus::Usage, "NULL handle");
        };
        if out_sense.is_null() || out_distance.is_null() {
            return fail(WsdStatus::Usage, "NULL out-parameter");
        }
        let Some(inst) = ds.0.instances.get(index) else {
            return fail(
                WsdStatus::Usage,
                format!("instance index {index} out of range"),
            );
        };
        let encoded = match model.0.schema.encode(inst) {
            Ok(e) => e,
            Err(e) => return fail(WsdStatus::Data, e.to_string()),
        };
        let mut rng = instance_rng(seed, &inst.id);
        match model.0.classify(&encoded, &mut rng) {
            Ok(got) => {
                *out_distance = got.distance;
                give_string(got.sense, out_sense)
            }
            Err(e) => fail(WsdStatus::Data, e.to_string()),
        }
    })
}

/// Run the repeated random-trial evaluation and return the report as a
/// TSV string (free with `wsd_string_free`). `sources_mask` is an OR of
/// the `WSD_SOURCE_*` bits.
///
/// # Safety
/// `ds` must be a live dataset handle; `out_tsv` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wsd_eval_tsv(
    ds: *const WsdDataset,
    trials: usize,
    test_size: usize,
    seed: u64,
    sources_mask: u32,
    out_tsv: *mut *mut c_char,
) -> WsdStatus {
    guarded(|| {
        let (Some(ds), false) = (ds.as_ref(), out_tsv.is_null()) else {
            return fail(WsdStatus::Usage, "NULL argument");
        };
        let sources = match sources_from_mask(sources_mask) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let config = TrialConfig {
            n_trials: trials,
            test_size,
            seed,
            sources,
            params: SchemaParams::default(),
        };
        match run_trials(&ds.0, &config) {
            Ok(report) => give_string(report.to_tsv(), out_tsv),
            Err(EvalError::Config(msg)) => fail(WsdStatus::Usage, msg),
            Err(e) => fail(WsdStatus::Data, e.to_string()),
        }
    })
}
