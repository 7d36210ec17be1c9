//! C interface to `soloewner`.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns an
//! [`SlStatus`]; on failure the message is available from
//! [`sl_last_error`] until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use soloewner::io::{model_from_json, model_to_json, Model};
use soloewner::paramfit::{grid_search, ParamGrid, Spacing};
use soloewner::sampling::sample_transfer;
use soloewner::{
    build_fo_loewner, build_so_loewner, identify_fo, identify_so_reduced, partition, Complex64,
    DampingParams, Error, FoMode, FrequencySample, PartitionStrategy, SampleSet, TransferFunction,
    Truncation,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    /// Invalid input or configuration.
    InputError = 2,
    /// The computation failed (singular pencil, collision, ...).
    NumericalError = 3,
    NullPointer = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Partition of samples into right and left interpolation data.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlPartition {
    Interleave = 0,
    FirstHalfRight = 1,
}

impl From<SlPartition> for PartitionStrategy {
    fn from(p: SlPartition) -> Self {
        match p {
            SlPartition::Interleave => PartitionStrategy::Interleave,
            SlPartition::FirstHalfRight => PartitionStrategy::FirstHalfRight,
        }
    }
}

/// Frequency samples `(s_k, H(s_k))`.
pub struct SlSamples(SampleSet);

/// An identified or generated realization.
pub struct SlModel(Model);

/// Best cell of a grid search.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SlSweepBest {
    pub alpha: f64,
    pub beta: f64,
    pub j: f64,
    /// Cells where identification failed.
    pub failed_cells: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard<F>(f: F) -> SlStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SlStatus::Ok,
        Ok(Err(Failure::Core(e))) => {
            set_last_error(format!("{}: {e}", e.kind()));
            if e.is_numerical() {
                SlStatus::NumericalError
            } else {
                SlStatus::InputError
            }
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            SlStatus::NullPointer
        }
        Err(_) => {
            set_last_error("panic in soloewner".into());
            SlStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn array<'a>(p: *const f64, n: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn truncation(order: usize, tol: f64) -> Truncation {
    if order > 0 {
        Truncation::Order(order)
    } else {
        Truncation::Tolerance(tol)
    }
}

/// Message of the last failure on this thread, or NULL. Owned by the
/// library; valid until the next failing call.
#[no_mangle]
pub extern "C" fn sl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a sample set from four arrays of length `n`.
///
/// # Safety
/// Each array must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_samples_new(
    s_re: *const f64,
    s_im: *const f64,
    h_re: *const f64,
    h_im: *const f64,
    n: usize,
    out: *mut *mut SlSamples,
) -> SlStatus {
    guard(|| {
        let (sr, si) = (array(s_re, n, "s_re")?, array(s_im, n, "s_im")?);
        let (hr, hi) = (array(h_re, n, "h_re")?, array(h_im, n, "h_im")?);
        let samples = (0..n)
            .map(|k| FrequencySample::new(Complex64::new(sr[k], si[k]), Complex64::new(hr[k], hi[k])))
            .collect();
        put(out, SlSamples(SampleSet::new(samples)?))
    })
}

/// Samples `model` at `i * omega[k]`.
///
/// # Safety
/// `omega` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_samples_from_model(
    model: *const SlModel,
    omega: *const f64,
    n: usize,
    out: *mut *mut SlSamples,
) -> SlStatus {
    guard(|| {
        let model = get(model, "model")?;
        let points: Vec<Complex64> = array(omega, n, "omega")?
            .iter()
            .map(|&w| Complex64::new(0.0, w))
            .collect();
        put(out, SlSamples(sample_transfer(&model.0, &points)?))
    })
}

/// Number of samples; 0 for NULL.
///
/// # Safety
/// `samples` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_samples_len(samples: *const SlSamples) -> usize {
    samples.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `samples` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn sl_samples_free(samples: *mut SlSamples) {
    if !samples.is_null() {
        drop(Box::from_raw(samples));
    }
}

/// The two-mass demo system (`alpha = 0.01`, `beta = 0.02`).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_model_demo(out: *mut *mut SlModel) -> SlStatus {
    guard(|| put(out, SlModel(Model::So(soloewner::benchgen::demo_system()))))
}

/// Parses a model from NUL-terminated JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_model_from_json(json: *const c_char, out: *mut *mut SlModel) -> SlStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Error::Parse(format!("model JSON is not UTF-8: {e}")))?;
        put(out, SlModel(model_from_json(text)?))
    })
}

/// Serializes a model; release the string with [`sl_string_free`].
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_model_to_json(model: *const SlModel, out: *mut *mut c_char) -> SlStatus {
    guard(|| {
        let model = get(model, "model")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let text = CString::new(model_to_json(&model.0)?)
            .map_err(|e| Error::Parse(e.to_string()))?;
        *out = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn sl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Model order (number of second-order or first-order states); 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_model_order(model: *const SlModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.order())
}

/// 1 for a second-order model, 0 for first-order or NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_model_is_second_order(model: *const SlModel) -> i32 {
    model.as_ref().map_or(0, |m| matches!(m.0, Model::So(_)) as i32)
}

/// Transfer function at `s = s_re + i s_im`.
///
/// # Safety
/// `model` must be a live handle; `h_re`, `h_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_model_eval(
    model: *const SlModel,
    s_re: f64,
    s_im: f64,
    h_re: *mut f64,
    h_im: *mut f64,
) -> SlStatus {
    guard(|| {
        let model = get(model, "model")?;
        if h_re.is_null() || h_im.is_null() {
            return Err(Failure::Null("h_re/h_im"));
        }
        let h = model.0.transfer(Complex64::new(s_re, s_im))?;
        *h_re = h.re;
        *h_im = h.im;
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn sl_model_free(model: *mut SlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Second-order Loewner identification with known damping. `order > 0`
/// fixes the reduced order, otherwise singular values below `tol` relative
/// to the largest are cut.
///
/// # Safety
/// `samples` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_identify_so(
    samples: *const SlSamples,
    alpha: f64,
    beta: f64,
    order: usize,
    tol: f64,
    strategy: SlPartition,
    out: *mut *mut SlModel,
) -> SlStatus {
    guard(|| {
        let samples = get(samples, "samples")?;
        let params = DampingParams::new(alpha, beta)?;
        let pd = partition(&samples.0, strategy.into())?;
        let sd = build_so_loewner(&pd, params)?;
        let (sys, _) = identify_so_reduced(&sd, truncation(order, tol))?;
        put(out, SlModel(Model::So(sys)))
    })
}

/// Classical first-order Loewner identification; truncation as in
/// [`sl_identify_so`].
///
/// # Safety
/// `samples` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_identify_fo(
    samples: *const SlSamples,
    order: usize,
    tol: f64,
    strategy: SlPartition,
    out: *mut *mut SlModel,
) -> SlStatus {
    guard(|| {
        let samples = get(samples, "samples")?;
        let pd = partition(&samples.0, strategy.into())?;
        let pair = build_fo_loewner(&pd)?;
        let sys = identify_fo(&pair, FoMode::Reduced(truncation(order, tol)))?;
        put(out, SlModel(Model::Fo(sys)))
    })
}

/// Grid search over `alphas x betas` (each strictly increasing) with a
/// seeded train/test split.
///
/// # Safety
/// `alphas`/`betas` must hold `n_alpha`/`n_beta` doubles; `best` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sl_grid_search(
    samples: *const SlSamples,
    alphas: *const f64,
    n_alpha: usize,
    betas: *const f64,
    n_beta: usize,
    test_fraction: f64,
    seed: u64,
    order: usize,
    tol: f64,
    best: *mut SlSweepBest,
) -> SlStatus {
    guard(|| {
        let samples = get(samples, "samples")?;
        if best.is_null() {
            return Err(Failure::Null("best"));
        }
        let grid = ParamGrid::from_values(
            array(alphas, n_alpha, "alphas")?.to_vec(),
            array(betas, n_beta, "betas")?.to_vec(),
            Spacing::Linear,
        )?;
        let r = grid_search(&samples.0, &grid, test_fraction, seed, truncation(order, tol))?;
        *best = SlSweepBest {
            alpha: r.best_alpha,
            beta: r.best_beta,
            j: r.best_j,
            failed_cells: r.surface.iter().filter(|c| c.j.is_none()).count(),
        };
        Ok(())
    })
}
