//! C interface to a trained irony model.
//!
//! Every function returns an [`IronyStatus`]; on failure a message for the
//! calling thread is available from [`irony_last_error`]. Models are opaque
//! handles that must be released with [`irony_model_free`], strings returned
//! by the library with [`irony_string_free`]. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use irony_core::corpus::{RawTweet, Task};
use irony_core::ensemble::EnsembleModel;
use irony_core::metrics::evaluate;
use irony_core::normalize::Normalizer;
use irony_core::persist::load_model;
use irony_core::IronyError;

/// Result codes. Values 3 to 9 match the `irony` command's exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IronyStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    InvalidInput = 4,
    MissingResource = 5,
    Config = 6,
    TaskMismatch = 7,
    ModelFile = 8,
    Internal = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IronyTask {
    /// Binary: 0 non-ironic, 1 ironic.
    A = 0,
    /// Four classes: non-irony, polarity contrast, other verbal, situational.
    B = 1,
}

impl From<IronyTask> for Task {
    fn from(t: IronyTask) -> Task {
        match t {
            IronyTask::A => Task::A,
            IronyTask::B => Task::B,
        }
    }
}

/// Task-level scores; for task B precision, recall and F1 are macro averages.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IronyScores {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Opaque trained ensemble.
pub struct IronyModel {
    inner: EnsembleModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &IronyError) -> IronyStatus {
    match err.exit_code() {
        3 => IronyStatus::Io,
        4 => IronyStatus::InvalidInput,
        5 => IronyStatus::MissingResource,
        6 => IronyStatus::Config,
        7 => IronyStatus::TaskMismatch,
        8 => IronyStatus::ModelFile,
        _ => IronyStatus::Internal,
    }
}

struct Fail(IronyStatus, String);

impl From<IronyError> for Fail {
    fn from(e: IronyError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> IronyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            IronyStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IronyStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(IronyStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            IronyStatus::InvalidUtf8,
            format!("`{what}` is not valid UTF-8"),
        )
    })
}

unsafe fn model_arg<'a>(p: *const IronyModel) -> Result<&'a EnsembleModel, Fail> {
    p.as_ref().map(|m| &m.inner).ok_or_else(|| null("model"))
}

/// Message for the last failed call on this thread, or null after a
/// success. Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn irony_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Loads a model file written by `irony train`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irony_model_load(
    path: *const c_char,
    out: *mut *mut IronyModel,
) -> IronyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let inner = load_model(path)?;
        *out = Box::into_raw(Box::new(IronyModel { inner }));
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from [`irony_model_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn irony_model_free(model: *mut IronyModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of classes the model predicts (2 or 4), or 0 for null.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn irony_model_num_classes(model: *const IronyModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.num_classes())
}

/// Feature vector width of the model, or 0 for null.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn irony_model_feature_width(model: *const IronyModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.pipeline.width())
}

/// Classifies one raw tweet. `probs` receives the mean member probability
/// per class and must hold at least `irony_model_num_classes` values; it may
/// be null when `probs_len` is 0.
///
/// # Safety
/// Pointers must be valid; `probs` must point to `probs_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn irony_predict(
    model: *const IronyModel,
    text: *const c_char,
    label: *mut u32,
    probs: *mut f64,
    probs_len: usize,
) -> IronyStatus {
    guard(|| {
        let m = model_arg(model)?;
        let text = str_arg(text, "text")?;
        if label.is_null() {
            return Err(null("label"));
        }
        let classes = m.num_classes();
        if probs_len > 0 && probs.is_null() {
            return Err(null("probs"));
        }
        if probs_len > 0 && probs_len < classes {
            return Err(Fail(
                IronyStatus::BufferTooSmall,
                format!("probs holds {probs_len} values, model has {classes} classes"),
            ));
        }
        let tweet = RawTweet::new(0, text, None);
        let prepared = m.pipeline.prepare(std::slice::from_ref(&tweet), None)?;
        let pred = m.predict_tokenized(&prepared)?.remove(0);
        *label = pred.label;
        if probs_len > 0 {
            std::slice::from_raw_parts_mut(probs, classes).copy_from_slice(&pred.mean_probs);
        }
        Ok(())
    })
}

/// Normalizes a tweet with the model's resources. The result must be
/// released with [`irony_string_free`].
///
/// # Safety
/// Pointers must be valid and `text` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn irony_normalize(
    model: *const IronyModel,
    text: *const c_char,
    out: *mut *mut c_char,
) -> IronyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let m = model_arg(model)?;
        let text = str_arg(text, "text")?;
        let (normalized, _) = Normalizer::new(&m.pipeline.resources).normalize_text(text);
        let c = CString::new(normalized)
            .map_err(|_| Fail(IronyStatus::Internal, "normalized text contains NUL".into()))?;
        *out = c.into_raw();
        Ok(())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn irony_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Scores `n` predicted labels against gold labels.
///
/// # Safety
/// `gold` and `predicted` must point to `n` readable values, `out` to one
/// writable [`IronyScores`].
#[no_mangle]
pub unsafe extern "C" fn irony_evaluate(
    gold: *const u32,
    predicted: *const u32,
    n: usize,
    task: IronyTask,
    out: *mut IronyScores,
) -> IronyStatus {
    guard(|| {
        if gold.is_null() || predicted.is_null() || out.is_null() {
            return Err(null("gold, predicted or out"));
        }
        let gold = std::slice::from_raw_parts(gold, n);
        let predicted = std::slice::from_raw_parts(predicted, n);
        let r = evaluate(gold, predicted, task.into())?;
        *out = IronyScores {
            accuracy: r.accuracy,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
        };
        Ok(())
    })
}
