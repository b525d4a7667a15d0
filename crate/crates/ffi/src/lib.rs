//! C ABI over the hyperdim kernel.
//!
//! Conventions: every fallible call returns an `HdStatus`; on any non-Ok
//! status the same thread can fetch a human-readable message with
//! `hd_last_error_message`. Out parameters are written only on Ok (except
//! where a function documents otherwise). Handles are opaque and owned by
//! the caller once returned; release each with its matching `hd_*_free`,
//! which tolerates null. Panics never cross the boundary; they come back as
//! `HdStatus_Panic`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use hyperdim::{
    bundle, choose_radius, classify, letter_codebook, normalize, profile_text, read_profiles,
    Accumulator, Codebook, CounterWidth, Dimension, Error, Hypervector, LanguageProfile,
    NormalizePolicy, RandomSource, Sdm, SdmConfig, SdmRead, TrigramEncoder,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HdStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument failed validation (dimension too small, bad counter
    /// width, malformed UTF-8, text too short, and similar).
    InvalidArgument = 2,
    DimensionMismatch = 3,
    /// A collection that must hold something was empty, or a memory read
    /// activated locations that hold nothing.
    Empty = 4,
    UnknownSymbol = 5,
    DuplicateSymbol = 6,
    /// No memory location activated for the probe.
    NoActiveLocation = 7,
    ChunkTooLarge = 8,
    CounterOverflow = 9,
    ZeroNorm = 10,
    ZeroWeights = 11,
    Io = 12,
    /// A file did not parse as the expected format.
    Format = 13,
    /// A caller-supplied output buffer is too small.
    BufferTooSmall = 14,
    /// A panic was caught at the boundary.
    Panic = 15,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg).expect("nul bytes stripped");
    });
}

fn fail(status: HdStatus, msg: impl Into<String>) -> HdStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> HdStatus {
    let status = match &e {
        Error::DimensionMismatch { .. } => HdStatus::DimensionMismatch,
        Error::DimensionTooSmall(_) | Error::InvalidConfig(_) => HdStatus::InvalidArgument,
        Error::Empty(_) | Error::EmptyCodebook => HdStatus::Empty,
        Error::CounterOverflow => HdStatus::CounterOverflow,
        Error::ZeroNorm => HdStatus::ZeroNorm,
        Error::DuplicateSymbol(_) => HdStatus::DuplicateSymbol,
        Error::UnknownSymbol(_) | Error::UnknownLabel(_) => HdStatus::UnknownSymbol,
        Error::NoActiveLocation => HdStatus::NoActiveLocation,
        Error::ChunkTooLarge { .. } => HdStatus::ChunkTooLarge,
        Error::ZeroWeights => HdStatus::ZeroWeights,
        Error::Io(_) => HdStatus::Io,
        Error::Format(_) => HdStatus::Format,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> HdStatus) -> HdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(HdStatus::Panic, format!("panic: {msg}"))
        }
    }
}

/// Checked dereference helpers. Null yields a NullPointer status with the
/// argument's name in the message.
macro_rules! deref {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => return fail(HdStatus::NullPointer, concat!(stringify!($ptr), " is null")),
        }
    };
}

macro_rules! deref_mut {
    ($ptr:expr) => {
        match unsafe { $ptr.as_mut() } {
            Some(r) => r,
            None => return fail(HdStatus::NullPointer, concat!(stringify!($ptr), " is null")),
        }
    };
}

macro_rules! try_ffi {
    ($expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return from_error(e),
        }
    };
}

fn boxed<T>(out: &mut *mut T, value: T) -> HdStatus {
    *out = Box::into_raw(Box::new(value));
    HdStatus::Ok
}

fn parse_dim(d: usize) -> Result<Dimension, Error> {
    Dimension::new(d)
}

fn read_utf8<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, HdStatus> {
    if ptr.is_null() {
        return Err(fail(HdStatus::NullPointer, format!("{what} is null")));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| fail(HdStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn write_str(buf: *mut c_char, buf_len: usize, s: &str) -> HdStatus {
    if buf.is_null() {
        return fail(HdStatus::NullPointer, "output buffer is null");
    }
    let needed = s.len() + 1;
    if buf_len < needed {
        return fail(
            HdStatus::BufferTooSmall,
            format!("buffer holds {buf_len} bytes, need {needed}"),
        );
    }
    unsafe {
        std::ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
        *buf.add(s.len()) = 0;
    }
    HdStatus::Ok
}

/// Deterministic random stream.
pub struct HdRng(RandomSource);
/// D-bit binary vector.
pub struct HdVector(Hypervector);
/// D-wide signed counter vector.
pub struct HdAccumulator(Accumulator);
/// Symbol to vector map with nearest-neighbor cleanup.
pub struct HdCodebook(Codebook);
/// Sparse distributed memory.
pub struct HdSdm(Sdm);
/// Trained language profiles plus the trigram encoder that built them.
pub struct HdLangModel {
    profiles: Vec<LanguageProfile>,
    encoder: TrigramEncoder,
}

/// Message for the most recent non-Ok status on this thread. The pointer
/// stays valid until the next hyperdim call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn hd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// The default vector width, 10000 bits.
#[no_mangle]
pub extern "C" fn hd_default_dim() -> usize {
    Dimension::DEFAULT.get()
}

#[no_mangle]
pub unsafe extern "C" fn hd_rng_new(seed: u64, out: *mut *mut HdRng) -> HdStatus {
    guarded(|| {
        let out = deref_mut!(out);
        boxed(out, HdRng(RandomSource::new(seed)))
    })
}

/// An independent stream derived from `rng`'s seed and a label. The parent
/// is not advanced.
#[no_mangle]
pub unsafe extern "C" fn hd_rng_substream(
    rng: *const HdRng,
    label: u64,
    out: *mut *mut HdRng,
) -> HdStatus {
    guarded(|| {
        let rng = deref!(rng);
        let out = deref_mut!(out);
        boxed(out, HdRng(rng.0.substream(label)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_rng_free(rng: *mut HdRng) {
    if !rng.is_null() {
        drop(unsafe { Box::from_raw(rng) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn hd_vector_random(
    dim: usize,
    rng: *mut HdRng,
    out: *mut *mut HdVector,
) -> HdStatus {
    guarded(|| {
        let rng = deref_mut!(rng);
        let out = deref_mut!(out);
        let d = try_ffi!(parse_dim(dim));
        boxed(out, HdVector(Hypervector::random(d, &mut rng.0)))
    })
}

/// Rebuild a vector from little-endian packed bytes, least significant bit
/// first, as produced by `hd_vector_to_packed`.
#[no_mangle]
pub unsafe extern "C" fn hd_vector_from_packed(
    dim: usize,
    bytes: *const u8,
    len: usize,
    out: *mut *mut HdVector,
) -> HdStatus {
    guarded(|| {
        if bytes.is_null() {
            return fail(HdStatus::NullPointer, "bytes is null");
        }
        let out = deref_mut!(out);
        let d = try_ffi!(parse_dim(dim));
        let slice = unsafe { std::slice::from_raw_parts(bytes, len) };
        let v = try_ffi!(Hypervector::from_packed_bytes(d, slice));
        boxed(out, HdVector(v))
    })
}

/// Number of bytes `hd_vector_to_packed` needs: ceil(dim / 8).
#[no_mangle]
pub unsafe extern "C" fn hd_vector_packed_len(v: *const HdVector, out: *mut usize) -> HdStatus {
    guarded(|| {
        let v = deref!(v);
        let out = deref_mut!(out);
        *out = v.0.dim().bytes();
        HdStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_vector_to_packed(
    v: *const HdVector,
    buf: *mut u8,
    len: usize,
) -> HdStatus {
    guarded(|| {
        let v = deref!(v);
        if buf.is_null() {
            return fail(HdStatus::NullPointer, "buf is null");
        }
        let packed = v.0.to_packed_bytes();
        if len < packed.len() {
            return fail(
                HdStatus::BufferTooSmall,
                format!("buffer holds {len} bytes, need {}", packed.len()),
            );
        }
        unsafe { std::ptr::copy_nonoverlapping(packed.as_ptr(), buf, packed.len()) };
        HdStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_vector_clone(v: *const HdVector, out: *mut *mut HdVector) -> HdStatus {
    guarded(|| {
        let v = deref!(v);
        let out = deref_mut!(out);
        boxed(out, HdVector(v.0.clone()))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_vector_dim(v: *const HdVector, out: *mut usize) -> HdStatus {
    guarded(|| {
        let v = deref!(v);
        let out = deref_mut!(out);
        *out = v.0.dim().get();
        HdStatus::Ok
    })
}

/// Coordinatewise XOR. Self-inverse: binding twice with the same vector
/// returns the original.
#[no_mangle]
pub unsafe extern "C" fn hd_vector_bind(
    a: *const HdVector,
    b: *const HdVector,
    out: *mut *mut HdVector,
) -> HdStatus {
    guarded(|| {
        let a = deref!(a);
        let b = deref!(b);
        let out = deref_mut!(out);
        let v = try_ffi!(a.0.bind(&b.0));
        boxed(out, HdVector(v))
    })
}

/// Cyclic rotation: bit i moves to (i + shift) mod dim. Negative shifts
/// rotate the other way.
#[no_mangle]
pub unsafe extern "C" fn hd_vector_permute(
    v: *const HdVector,
    shift: i64,
    out: *mut *mut HdVector,
) -> HdStatus {
    guarded(|| {
        let v = deref!(v);
        let out = deref_mut!(out);
        boxed(out, HdVector(v.0.permute(shift)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_vector_hamming(
    a: *const HdVector,
    b: *const HdVector,
    out: *mut u64,
) -> HdStatus {
    guarded(|| {
        let a = deref!(a);
        let b = deref!(b);
        let out = deref_mut!(out);
        *out = try_ffi!(a.0.hamming_distance(&b.0));
        HdStatus::Ok
    })
}

/// 1 - hamming/dim: 1.0 means identical, 0.5 means unrelated.
#[no_mangle]
pub unsafe extern "C" fn hd_vector_similarity(
    a: *const HdVector,
    b: *const HdVector,
    out: *mut f64,
) -> HdStatus {
    guarded(|| {
        let a = deref!(a);
        let b = deref!(b);
        let out = deref_mut!(out);
        *out = try_ffi!(a.0.hamming_similarity(&b.0));
        HdStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_vector_free(v: *mut HdVector) {
    if !v.is_null() {
        drop(unsafe { Box::from_raw(v) });
    }
}

/// Coordinatewise majority of `n` vectors; ties are broken by the rng.
#[no_mangle]
pub unsafe extern "C" fn hd_bundle(
    items: *const *const HdVector,
    n: usize,
    rng: *mut HdRng,
    out: *mut *mut HdVector,
) -> HdStatus {
    guarded(|| {
        if items.is_null() {
            return fail(HdStatus::NullPointer, "items is null");
        }
        let rng = deref_mut!(rng);
        let out = deref_mut!(out);
        let ptrs = unsafe { std::slice::from_raw_parts(items, n) };
        let mut vecs = Vec::with_capacity(n);
        for (i, p) in ptrs.iter().enumerate() {
            match unsafe { p.as_ref() } {
                Some(v) => vecs.push(v.0.clone()),
                None => return fail(HdStatus::NullPointer, format!("items[{i}] is null")),
            }
        }
        let v = try_ffi!(bundle(&vecs, &mut rng.0));
        boxed(out, HdVector(v))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_accumulator_new(dim: usize, out: *mut *mut HdAccumulator) -> HdStatus {
    guarded(|| {
        let out = deref_mut!(out);
        let d = try_ffi!(parse_dim(dim));
        boxed(out, HdAccumulator(Accumulator::new(d)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_accumulator_add(
    acc: *mut HdAccumulator,
    v: *const HdVector,
) -> HdStatus {
    guarded(|| {
        let acc = deref_mut!(acc);
        let v = deref!(v);
        try_ffi!(acc.0.add(&v.0));
        HdStatus::Ok
    })
}

/// Add `v` as if it appeared `weight` times. Zero weight is a no-op.
#[no_mangle]
pub unsafe extern "C" fn hd_accumulator_add_weighted(
    acc: *mut HdAccumulator,
    v: *const HdVector,
    weight: u32,
) -> HdStatus {
    guarded(|| {
        let acc = deref_mut!(acc);
        let v = deref!(v);
        try_ffi!(acc.0.add_weighted(&v.0, weight));
        HdStatus::Ok
    })
}

/// Majority vote over everything added so far; ties broken by the rng.
#[no_mangle]
pub unsafe extern "C" fn hd_accumulator_threshold(
    acc: *const HdAccumulator,
    rng: *mut HdRng,
    out: *mut *mut HdVector,
) -> HdStatus {
    guarded(|| {
        let acc = deref!(acc);
        let rng = deref_mut!(rng);
        let out = deref_mut!(out);
        boxed(out, HdVector(acc.0.threshold(&mut rng.0)))
    })
}

/// Cosine of the two count vectors, in [-1, 1].
#[no_mangle]
pub unsafe extern "C" fn hd_accumulator_cosine(
    a: *const HdAccumulator,
    b: *const HdAccumulator,
    out: *mut f64,
) -> HdStatus {
    guarded(|| {
        let a = deref!(a);
        let b = deref!(b);
        let out = deref_mut!(out);
        *out = try_ffi!(a.0.cosine(&b.0));
        HdStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_accumulator_free(acc: *mut HdAccumulator) {
    if !acc.is_null() {
        drop(unsafe { Box::from_raw(acc) });
    }
}

/// Codebook entries are drawn from the codebook's own seeded stream: same
/// seed and same insertion order always give the same vectors.
#[no_mangle]
pub unsafe extern "C" fn hd_codebook_new(
    dim: usize,
    seed: u64,
    out: *mut *mut HdCodebook,
) -> HdStatus {
    guarded(|| {
        let out = deref_mut!(out);
        let d = try_ffi!(parse_dim(dim));
        boxed(out, HdCodebook(Codebook::new(d, seed)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_codebook_assign(
    cb: *mut HdCodebook,
    symbol: *const c_char,
) -> HdStatus {
    guarded(|| {
        let cb = deref_mut!(cb);
        let symbol = match read_utf8(symbol, "symbol") {
            Ok(s) => s,
            Err(status) => return status,
        };
        try_ffi!(cb.0.assign(symbol));
        HdStatus::Ok
    })
}

/// A copy of the vector stored for `symbol`.
#[no_mangle]
pub unsafe extern "C" fn hd_codebook_get(
    cb: *const HdCodebook,
    symbol: *const c_char,
    out: *mut *mut HdVector,
) -> HdStatus {
    guarded(|| {
        let cb = deref!(cb);
        let out = deref_mut!(out);
        let symbol = match read_utf8(symbol, "symbol") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let v = try_ffi!(cb.0.require(symbol)).clone();
        boxed(out, HdVector(v))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_codebook_len(cb: *const HdCodebook, out: *mut usize) -> HdStatus {
    guarded(|| {
        let cb = deref!(cb);
        let out = deref_mut!(out);
        *out = cb.0.len();
        HdStatus::Ok
    })
}

/// Nearest stored symbol to `v`. The symbol is written NUL-terminated into
/// `symbol_buf`; `similarity` receives its Hamming similarity.
#[no_mangle]
pub unsafe extern "C" fn hd_codebook_cleanup(
    cb: *const HdCodebook,
    v: *const HdVector,
    symbol_buf: *mut c_char,
    buf_len: usize,
    similarity: *mut f64,
) -> HdStatus {
    guarded(|| {
        let cb = deref!(cb);
        let v = deref!(v);
        let similarity = deref_mut!(similarity);
        let m = try_ffi!(cb.0.cleanup(&v.0));
        let status = write_str(symbol_buf, buf_len, &m.symbol);
        if status != HdStatus::Ok {
            return status;
        }
        *similarity = m.similarity;
        HdStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_codebook_save(
    cb: *const HdCodebook,
    path: *const c_char,
) -> HdStatus {
    guarded(|| {
        let cb = deref!(cb);
        let path = match read_utf8(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let mut file = match std::fs::File::create(Path::new(path)) {
            Ok(f) => std::io::BufWriter::new(f),
            Err(e) => return fail(HdStatus::Io, format!("{path}: {e}")),
        };
        try_ffi!(cb.0.write_to(&mut file));
        HdStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_codebook_load(
    path: *const c_char,
    out: *mut *mut HdCodebook,
) -> HdStatus {
    guarded(|| {
        let out = deref_mut!(out);
        let path = match read_utf8(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let mut file = match std::fs::File::open(Path::new(path)) {
            Ok(f) => std::io::BufReader::new(f),
            Err(e) => return fail(HdStatus::Io, format!("{path}: {e}")),
        };
        let cb = try_ffi!(Codebook::read_from(&mut file));
        boxed(out, HdCodebook(cb))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_codebook_free(cb: *mut HdCodebook) {
    if !cb.is_null() {
        drop(unsafe { Box::from_raw(cb) });
    }
}

/// A memory with `locations` random fixed addresses. The activation radius
/// is chosen so a probe reaches each location with probability close to
/// `target_p` (0 < target_p < 1). `counter_bits` must be 8, 16, or 32.
#[no_mangle]
pub unsafe extern "C" fn hd_sdm_new(
    dim: usize,
    locations: usize,
    target_p: f64,
    counter_bits: u8,
    rng: *mut HdRng,
    out: *mut *mut HdSdm,
) -> HdStatus {
    guarded(|| {
        let rng = deref_mut!(rng);
        let out = deref_mut!(out);
        let d = try_ffi!(parse_dim(dim));
        if !(target_p > 0.0 && target_p < 1.0) {
            return fail(
                HdStatus::InvalidArgument,
                format!("target_p must be in (0, 1), got {target_p}"),
            );
        }
        let counter_width = match counter_bits {
            8 => CounterWidth::W8,
            16 => CounterWidth::W16,
            32 => CounterWidth::W32,
            other => {
                return fail(
                    HdStatus::InvalidArgument,
                    format!("counter_bits must be 8, 16, or 32, got {other}"),
                )
            }
        };
        let config = SdmConfig {
            dim: d,
            locations,
            radius: choose_radius(d, locations, target_p),
            counter_width,
        };
        let sdm = try_ffi!(Sdm::new(config, &mut rng.0));
        boxed(out, HdSdm(sdm))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_sdm_write(
    sdm: *mut HdSdm,
    addr: *const HdVector,
    data: *const HdVector,
) -> HdStatus {
    guarded(|| {
        let sdm = deref_mut!(sdm);
        let addr = deref!(addr);
        let data = deref!(data);
        try_ffi!(sdm.0.write(&addr.0, &data.0));
        HdStatus::Ok
    })
}

/// Majority readout over the locations `addr` activates. On Ok, `out_vector`
/// receives the recalled vector (caller frees), `out_confidence` the mean
/// absolute column sum per activated location, and `out_activated` the
/// activation count. Activated-but-unwritten locations yield Empty with
/// `out_activated` still set and `out_vector` null; a probe activating
/// nothing yields NoActiveLocation.
#[no_mangle]
pub unsafe extern "C" fn hd_sdm_read(
    sdm: *const HdSdm,
    addr: *const HdVector,
    rng: *mut HdRng,
    out_vector: *mut *mut HdVector,
    out_confidence: *mut f64,
    out_activated: *mut usize,
) -> HdStatus {
    guarded(|| {
        let sdm = deref!(sdm);
        let addr = deref!(addr);
        let rng = deref_mut!(rng);
        let out_vector = deref_mut!(out_vector);
        let out_confidence = deref_mut!(out_confidence);
        let out_activated = deref_mut!(out_activated);
        match sdm.0.read(&addr.0, &mut rng.0) {
            Ok(SdmRead::Recall {
                vector,
                confidence,
                activated,
            }) => {
                *out_confidence = confidence;
                *out_activated = activated;
                boxed(out_vector, HdVector(vector))
            }
            Ok(SdmRead::Empty { activated }) => {
                *out_vector = std::ptr::null_mut();
                *out_confidence = 0.0;
                *out_activated = activated;
                fail(
                    HdStatus::Empty,
                    format!("{activated} activated locations hold nothing"),
                )
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_sdm_save(sdm: *const HdSdm, path: *const c_char) -> HdStatus {
    guarded(|| {
        let sdm = deref!(sdm);
        let path = match read_utf8(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let mut file = match std::fs::File::create(Path::new(path)) {
            Ok(f) => std::io::BufWriter::new(f),
            Err(e) => return fail(HdStatus::Io, format!("{path}: {e}")),
        };
        try_ffi!(sdm.0.write_to(&mut file));
        HdStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_sdm_load(path: *const c_char, out: *mut *mut HdSdm) -> HdStatus {
    guarded(|| {
        let out = deref_mut!(out);
        let path = match read_utf8(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let mut file = match std::fs::File::open(Path::new(path)) {
            Ok(f) => std::io::BufReader::new(f),
            Err(e) => return fail(HdStatus::Io, format!("{path}: {e}")),
        };
        let sdm = try_ffi!(Sdm::read_from(&mut file));
        boxed(out, HdSdm(sdm))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_sdm_free(sdm: *mut HdSdm) {
    if !sdm.is_null() {
        drop(unsafe { Box::from_raw(sdm) });
    }
}

/// Load a trained profile store and rebuild its trigram encoder from the
/// dimension and seed recorded in the file.
#[no_mangle]
pub unsafe extern "C" fn hd_langmodel_load(
    path: *const c_char,
    out: *mut *mut HdLangModel,
) -> HdStatus {
    guarded(|| {
        let out = deref_mut!(out);
        let path = match read_utf8(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let mut file = match std::fs::File::open(Path::new(path)) {
            Ok(f) => std::io::BufReader::new(f),
            Err(e) => return fail(HdStatus::Io, format!("{path}: {e}")),
        };
        let (dim, seed, profiles) = try_ffi!(read_profiles(&mut file));
        let letters = letter_codebook(dim, seed);
        let encoder = try_ffi!(TrigramEncoder::new(&letters));
        boxed(out, HdLangModel { profiles, encoder })
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_langmodel_len(m: *const HdLangModel, out: *mut usize) -> HdStatus {
    guarded(|| {
        let m = deref!(m);
        let out = deref_mut!(out);
        *out = m.profiles.len();
        HdStatus::Ok
    })
}

/// Label of the profile at `index`, NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn hd_langmodel_label(
    m: *const HdLangModel,
    index: usize,
    buf: *mut c_char,
    buf_len: usize,
) -> HdStatus {
    guarded(|| {
        let m = deref!(m);
        match m.profiles.get(index) {
            Some(p) => write_str(buf, buf_len, &p.label),
            None => fail(
                HdStatus::InvalidArgument,
                format!("index {index} out of range, {} profiles", m.profiles.len()),
            ),
        }
    })
}

/// Classify UTF-8 text. `fold_diacritics` false maps accented letters to
/// spaces (matching a store trained with the strip policy); true folds them
/// onto the base letter first. The winning label lands in `label_buf` and
/// its cosine in `out_cosine`. Text with fewer than 3 symbols after
/// normalization is refused as InvalidArgument.
#[no_mangle]
pub unsafe extern "C" fn hd_langmodel_classify(
    m: *const HdLangModel,
    text: *const c_char,
    fold_diacritics: bool,
    label_buf: *mut c_char,
    buf_len: usize,
    out_cosine: *mut f64,
) -> HdStatus {
    guarded(|| {
        let m = deref!(m);
        let out_cosine = deref_mut!(out_cosine);
        let text = match read_utf8(text, "text") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let policy = if fold_diacritics {
            NormalizePolicy::FoldDiacritics
        } else {
            NormalizePolicy::StripToSpace
        };
        let normalized = normalize(text, policy);
        if normalized.len() < 3 {
            return fail(
                HdStatus::InvalidArgument,
                "text holds fewer than 3 symbols after normalization",
            );
        }
        let acc = try_ffi!(profile_text(&normalized, &m.encoder));
        let outcome = try_ffi!(classify(&acc, &m.profiles));
        let status = write_str(label_buf, buf_len, &outcome.label);
        if status != HdStatus::Ok {
            return status;
        }
        *out_cosine = outcome.cosine;
        HdStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn hd_langmodel_free(m: *mut HdLangModel) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}
