//! C ABI over `blockrec`.
//!
//! Every function returns a [`BrStatus`]; results come back through out
//! pointers. On failure, [`br_last_error_message`] describes the error for the
//! calling thread. Handles are opaque and must be released with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use blockrec::bounds::{self, ClusterSizeHistogram};
use blockrec::channel::transmit;
use blockrec::clusterer::cluster_pipeline;
use blockrec::decoder::{exact_pe_known_clusters, majority_decode};
use blockrec::experiment::wilson_interval;
use blockrec::generator::sample_block_matrix;
use blockrec::rng::{stage_rng, Stage};
use blockrec::{
    io, BlockConstantMatrix, ChannelParams, Error, GenerationLaw, ObservedMatrix, Partition,
    Symbol, TiePolicy,
};

/// Status code returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    SizeCapExceeded = 3,
    Io = 4,
    Format = 5,
    Panic = 6,
}

/// Tie handling for majority decoding.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrTiePolicy {
    FairCoin = 0,
    CountAsError = 1,
}

impl From<BrTiePolicy> for TiePolicy {
    fn from(t: BrTiePolicy) -> Self {
        match t {
            BrTiePolicy::FairCoin => TiePolicy::FairCoin,
            BrTiePolicy::CountAsError => TiePolicy::CountAsError,
        }
    }
}

/// Observed symbol codes.
pub const BR_SYMBOL_ZERO: u8 = 0;
pub const BR_SYMBOL_ONE: u8 = 1;
pub const BR_SYMBOL_ERASED: u8 = 2;

/// Block-constant matrix handle.
pub struct BrBlockMatrix(BlockConstantMatrix);

/// Observed matrix handle.
pub struct BrObserved(ObservedMatrix);

/// Partition handle.
pub struct BrPartition(Partition);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(BrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidParameter { .. }
            | Error::EmptyPartition
            | Error::IndexOutOfRange { .. }
            | Error::DimensionMismatch(_) => BrStatus::InvalidParameter,
            Error::SizeCapExceeded { .. } => BrStatus::SizeCapExceeded,
            Error::Io { .. } => BrStatus::Io,
            Error::Format { .. } | Error::Config { .. } | Error::Csv(_) => BrStatus::Format,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(BrStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BrStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            BrStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(ptr: *mut T, what: &str, value: T) -> Result<(), Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    ptr.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn path(ptr: *const c_char) -> Result<PathBuf, Failure> {
    if ptr.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure(BrStatus::InvalidParameter, "path is not UTF-8".to_string()))?;
    Ok(PathBuf::from(s))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn br_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

// ---- matrices and partitions ----

/// Samples a block-constant matrix from the uniform law.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_generate(
    m: usize,
    n: usize,
    m0: usize,
    n0: usize,
    permute: bool,
    seed: u64,
    out: *mut *mut BrBlockMatrix,
) -> BrStatus {
    guard(|| {
        let law = GenerationLaw::new(m, n, m0, n0, permute)?;
        let x = sample_block_matrix(&law, &mut stage_rng(seed, Stage::Generator))?;
        put(out, "out", boxed(BrBlockMatrix(x)))
    })
}

/// Builds a block-constant matrix from partitions and a row-major `r x t`
/// table of 0/1 block values.
///
/// # Safety
/// `rows` and `cols` must be live handles, `values` must point to
/// `values_len` bytes, `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_block_matrix_new(
    rows: *const BrPartition,
    cols: *const BrPartition,
    values: *const u8,
    values_len: usize,
    out: *mut *mut BrBlockMatrix,
) -> BrStatus {
    guard(|| {
        let rows = get(rows, "rows")?.0.clone();
        let cols = get(cols, "cols")?.0.clone();
        let values = slice(values, values_len, "values")?.to_vec();
        let x = BlockConstantMatrix::new(rows, cols, values)?;
        put(out, "out", boxed(BrBlockMatrix(x)))
    })
}

/// # Safety
/// `x` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_block_matrix_free(x: *mut BrBlockMatrix) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// # Safety
/// `x` must be a live handle; `m` and `n` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_block_matrix_dims(
    x: *const BrBlockMatrix,
    m: *mut usize,
    n: *mut usize,
) -> BrStatus {
    guard(|| {
        let x = &get(x, "x")?.0;
        put(m, "m", x.m())?;
        put(n, "n", x.n())
    })
}

/// # Safety
/// `x` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_block_matrix_entry(
    x: *const BrBlockMatrix,
    i: usize,
    k: usize,
    out: *mut u8,
) -> BrStatus {
    guard(|| {
        let v = get(x, "x")?.0.entry_at(i, k)?;
        put(out, "out", v)
    })
}

/// Writes the matrix in the text format (no erasures).
///
/// # Safety
/// `x` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn br_block_matrix_write(
    x: *const BrBlockMatrix,
    path_: *const c_char,
) -> BrStatus {
    guard(|| Ok(io::write_block_matrix(&get(x, "x")?.0, &path(path_)?)?))
}

/// Sets `out` to whether both matrices have the same entries.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_block_matrix_same_entries(
    a: *const BrBlockMatrix,
    b: *const BrBlockMatrix,
    out: *mut bool,
) -> BrStatus {
    guard(|| {
        let same = get(a, "a")?.0.same_entries(&get(b, "b")?.0);
        put(out, "out", same)
    })
}

/// Copies the row (`axis` 0) or column (`axis` 1) partition of `x`.
///
/// # Safety
/// `x` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_block_matrix_partition(
    x: *const BrBlockMatrix,
    axis: u32,
    out: *mut *mut BrPartition,
) -> BrStatus {
    guard(|| {
        let x = &get(x, "x")?.0;
        let p = match axis {
            0 => x.row_partition().clone(),
            1 => x.col_partition().clone(),
            _ => return Err(Error::param("axis", "must be 0 (rows) or 1 (columns)").into()),
        };
        put(out, "out", boxed(BrPartition(p)))
    })
}

/// Canonicalizes `labels` into a partition.
///
/// # Safety
/// `labels` must point to `len` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_partition_from_labels(
    labels: *const usize,
    len: usize,
    out: *mut *mut BrPartition,
) -> BrStatus {
    guard(|| {
        let p = Partition::from_labels(slice(labels, len, "labels")?)?;
        put(out, "out", boxed(BrPartition(p)))
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_partition_free(p: *mut BrPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle; `len` and `clusters` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_partition_info(
    p: *const BrPartition,
    len: *mut usize,
    clusters: *mut usize,
) -> BrStatus {
    guard(|| {
        let p = &get(p, "p")?.0;
        put(len, "len", p.len())?;
        put(clusters, "clusters", p.cluster_count())
    })
}

/// Copies the canonical labels into `buf`, which must hold `buf_len >= len`
/// values.
///
/// # Safety
/// `p` must be a live handle; `buf` must be valid for `buf_len` writes.
#[no_mangle]
pub unsafe extern "C" fn br_partition_labels(
    p: *const BrPartition,
    buf: *mut usize,
    buf_len: usize,
) -> BrStatus {
    guard(|| {
        let labels = get(p, "p")?.0.labels();
        if buf_len < labels.len() {
            return Err(Error::param("buf_len", format!("need {} slots", labels.len())).into());
        }
        if buf.is_null() && !labels.is_empty() {
            return Err(null("buf"));
        }
        std::ptr::copy_nonoverlapping(labels.as_ptr(), buf, labels.len());
        Ok(())
    })
}

/// Reads a label file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_partition_read(
    path_: *const c_char,
    out: *mut *mut BrPartition,
) -> BrStatus {
    guard(|| {
        let p = io::read_labels(&path(path_)?)?;
        put(out, "out", boxed(BrPartition(p)))
    })
}

/// # Safety
/// `p` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn br_partition_write(
    p: *const BrPartition,
    path_: *const c_char,
) -> BrStatus {
    guard(|| Ok(io::write_labels(&get(p, "p")?.0, &path(path_)?)?))
}

/// Passes `x` through the erasure + BSC channel.
///
/// # Safety
/// `x` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_transmit(
    x: *const BrBlockMatrix,
    eps: f64,
    p: f64,
    seed: u64,
    out: *mut *mut BrObserved,
) -> BrStatus {
    guard(|| {
        let ch = ChannelParams::new(eps, p)?;
        let y = transmit(&get(x, "x")?.0, &ch, &mut stage_rng(seed, Stage::Channel));
        put(out, "out", boxed(BrObserved(y)))
    })
}

/// # Safety
/// `y` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_observed_free(y: *mut BrObserved) {
    if !y.is_null() {
        drop(Box::from_raw(y));
    }
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_observed_read(
    path_: *const c_char,
    out: *mut *mut BrObserved,
) -> BrStatus {
    guard(|| {
        let y = io::read_matrix(&path(path_)?)?;
        put(out, "out", boxed(BrObserved(y)))
    })
}

/// # Safety
/// `y` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn br_observed_write(y: *const BrObserved, path_: *const c_char) -> BrStatus {
    guard(|| Ok(io::write_matrix(&get(y, "y")?.0, &path(path_)?)?))
}

/// # Safety
/// `y` must be a live handle; `m` and `n` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_observed_dims(
    y: *const BrObserved,
    m: *mut usize,
    n: *mut usize,
) -> BrStatus {
    guard(|| {
        let y = &get(y, "y")?.0;
        put(m, "m", y.m())?;
        put(n, "n", y.n())
    })
}

/// Entry `(i, k)` as one of the `BR_SYMBOL_*` codes.
///
/// # Safety
/// `y` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_observed_get(
    y: *const BrObserved,
    i: usize,
    k: usize,
    out: *mut u8,
) -> BrStatus {
    guard(|| {
        let y = &get(y, "y")?.0;
        if i >= y.m() || k >= y.n() {
            return Err(Error::IndexOutOfRange {
                row: i,
                col: k,
                m: y.m(),
                n: y.n(),
            }
            .into());
        }
        let code = match y.get(i, k) {
            Symbol::Zero => BR_SYMBOL_ZERO,
            Symbol::One => BR_SYMBOL_ONE,
            Symbol::Erased => BR_SYMBOL_ERASED,
        };
        put(out, "out", code)
    })
}

/// Clusters rows and columns of `y` with the channel's threshold.
///
/// # Safety
/// `y` must be a live handle; `rows` and `cols` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_cluster(
    y: *const BrObserved,
    eps: f64,
    p: f64,
    rows: *mut *mut BrPartition,
    cols: *mut *mut BrPartition,
) -> BrStatus {
    guard(|| {
        let ch = ChannelParams::new(eps, p)?;
        if rows.is_null() || cols.is_null() {
            return Err(null("rows/cols"));
        }
        let (r, c) = cluster_pipeline(&get(y, "y")?.0, &ch)?;
        put(rows, "rows", boxed(BrPartition(r)))?;
        put(cols, "cols", boxed(BrPartition(c)))
    })
}

/// Majority-decodes `y` with the given partitions. `tie_occurred` may be null.
///
/// # Safety
/// Handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_decode(
    y: *const BrObserved,
    rows: *const BrPartition,
    cols: *const BrPartition,
    tie: BrTiePolicy,
    seed: u64,
    out: *mut *mut BrBlockMatrix,
    tie_occurred: *mut bool,
) -> BrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let decoded = majority_decode(
            &get(y, "y")?.0,
            &get(rows, "rows")?.0,
            &get(cols, "cols")?.0,
            tie.into(),
            &mut stage_rng(seed, Stage::Ties),
        )?;
        if !tie_occurred.is_null() {
            tie_occurred.write(decoded.tie_occurred);
        }
        put(out, "out", boxed(BrBlockMatrix(decoded.estimate)))
    })
}

// ---- analytic quantities ----

/// Exact block error probability of majority decoding with known clusters.
///
/// # Safety
/// `sizes` must point to `len` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_exact_pe(
    sizes: *const usize,
    len: usize,
    eps: f64,
    p: f64,
    tie: BrTiePolicy,
    out: *mut f64,
) -> BrStatus {
    guard(|| {
        let ch = ChannelParams::new(eps, p)?;
        let pe = exact_pe_known_clusters(slice(sizes, len, "sizes")?, &ch, tie.into())?;
        put(out, "out", pe)
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_p1(eps: f64, p: f64, out: *mut f64) -> BrStatus {
    guard(|| put(out, "out", bounds::p1(&ChannelParams::new(eps, p)?)))
}

/// `1 - prod(1 - u^s)` over the cluster sizes.
///
/// # Safety
/// `sizes` must point to `len` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_g(u: f64, sizes: *const usize, len: usize, out: *mut f64) -> BrStatus {
    guard(|| {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::param("u", "must lie in [0, 1]").into());
        }
        let h = ClusterSizeHistogram::from_sizes(slice(sizes, len, "sizes")?)?;
        put(out, "out", bounds::g(u, &h))
    })
}

/// Lower and upper bounds on the known-cluster error probability.
///
/// # Safety
/// `sizes` must point to `len` values; `lower` and `upper` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn br_error_bounds(
    sizes: *const usize,
    len: usize,
    eps: f64,
    p: f64,
    lower: *mut f64,
    upper: *mut f64,
) -> BrStatus {
    guard(|| {
        let ch = ChannelParams::new(eps, p)?;
        let h = ClusterSizeHistogram::from_sizes(slice(sizes, len, "sizes")?)?;
        let (lo, hi) = bounds::error_prob_bounds(&h, &ch);
        put(lower, "lower", lo)?;
        put(upper, "upper", hi)
    })
}

/// Cluster-size thresholds of the phase transition. Undefined thresholds are
/// reported as NaN.
///
/// # Safety
/// `decodable_min` and `undecodable_max` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_thresholds(
    m: usize,
    n: usize,
    eps: f64,
    p: f64,
    delta: f64,
    decodable_min: *mut f64,
    undecodable_max: *mut f64,
) -> BrStatus {
    guard(|| {
        let th = bounds::size_thresholds(m, n, &ChannelParams::new(eps, p)?, delta)?;
        put(
            decodable_min,
            "decodable_min",
            th.decodable_min_size.unwrap_or(f64::NAN),
        )?;
        put(
            undecodable_max,
            "undecodable_max",
            th.undecodable_max_size.unwrap_or(f64::NAN),
        )
    })
}

/// Same-cluster mean distance, separation coefficient and threshold.
///
/// # Safety
/// `mu`, `delta` and `d0` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_clustering_stats(
    eps: f64,
    p: f64,
    mu: *mut f64,
    delta: *mut f64,
    d0: *mut f64,
) -> BrStatus {
    guard(|| {
        let s = bounds::mu_delta_d0(&ChannelParams::new(eps, p)?);
        put(mu, "mu", s.mu)?;
        put(delta, "delta", s.delta)?;
        put(d0, "d0", s.d0)
    })
}

/// Wilson score interval.
///
/// # Safety
/// `low` and `high` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn br_wilson_interval(
    successes: u64,
    trials: u64,
    z: f64,
    low: *mut f64,
    high: *mut f64,
) -> BrStatus {
    guard(|| {
        let (lo, hi) = wilson_interval(successes, trials, z)?;
        put(low, "low", lo)?;
        put(high, "high", hi)
    })
}
