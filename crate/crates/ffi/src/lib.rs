//! C ABI over `selstream`.
//!
//! Every object is an opaque heap handle released with its `*_free`
//! function. Functions return an [`SsStatus`]; on failure a description is
//! available from [`ss_last_error`] on the same thread until the next call.
//! Byte outputs are [`SsBuffer`]s owned by the caller and released with
//! [`ss_buffer_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use selstream::aoe::{MToken, MasterPublicKey, MasterSecretKey, PToken};
use selstream::bilinear::SUPPORTED_SECURITY_BITS;
use selstream::sss::{self, EncryptedRow, Policy, Row};
use selstream::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Malformed = 3,
    DecryptionFailed = 4,
    IndexOutOfRange = 5,
    Internal = 6,
}

pub struct SsPublicKey(MasterPublicKey);
pub struct SsSecretKey(MasterSecretKey);
pub struct SsPToken(PToken);
pub struct SsMToken(MToken);
pub struct SsEncryptedRow(EncryptedRow);

/// Heap bytes handed to the caller.
#[repr(C)]
pub struct SsBuffer {
    pub data: *mut u8,
    pub len: usize,
}

impl SsBuffer {
    const EMPTY: SsBuffer = SsBuffer { data: ptr::null_mut(), len: 0 };

    fn from_vec(v: Vec<u8>) -> Self {
        let mut b = v.into_boxed_slice();
        let out = SsBuffer { data: b.as_mut_ptr(), len: b.len() };
        std::mem::forget(b);
        out
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
    static RNG: RefCell<ChaCha20Rng> = RefCell::new(ChaCha20Rng::from_entropy());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SsStatus {
    match e {
        Error::DecryptionFailed => SsStatus::DecryptionFailed,
        Error::IndexOutOfRange { .. } => SsStatus::IndexOutOfRange,
        Error::Malformed(_) => SsStatus::Malformed,
        Error::Io(_) | Error::Json(_) => SsStatus::Internal,
        _ => SsStatus::InvalidArgument,
    }
}

struct Fail(SsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure, and converts panics to `Internal`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SsStatus::Internal
        }
    }
}

fn with_rng<T>(f: impl FnOnce(&mut ChaCha20Rng) -> T) -> T {
    RNG.with(|r| f(&mut r.borrow_mut()))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn bytes<'a>(data: *const u8, len: usize, what: &str) -> Result<&'a [u8], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_buffer(out: *mut SsBuffer, v: Vec<u8>) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    *out = SsBuffer::from_vec(v);
    Ok(())
}

/// Reads `n` (pointer, length) cells. With `allow_null`, a null pointer is
/// a wildcard and comes back as `None`.
unsafe fn cells(
    data: *const *const u8,
    lens: *const usize,
    n: usize,
    allow_null: bool,
) -> Result<Vec<Option<Vec<u8>>>, Fail> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if data.is_null() || lens.is_null() {
        return Err(null("cell array"));
    }
    let ptrs = std::slice::from_raw_parts(data, n);
    let lens = std::slice::from_raw_parts(lens, n);
    ptrs.iter()
        .zip(lens)
        .map(|(&p, &len)| {
            if p.is_null() && allow_null {
                Ok(None)
            } else {
                bytes(p, len, "cell").map(|b| Some(b.to_vec()))
            }
        })
        .collect()
}

/// Message of the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ss_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Seeds this thread's generator. Only for reproducible tests.
#[no_mangle]
pub extern "C" fn ss_seed_rng(seed: u64) {
    RNG.with(|r| *r.borrow_mut() = ChaCha20Rng::seed_from_u64(seed));
}

/// Generates a key pair for rows of `n` cells.
///
/// # Safety
/// `pk` and `sk` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_setup(n: usize, pk: *mut *mut SsPublicKey, sk: *mut *mut SsSecretKey) -> SsStatus {
    guard(|| {
        if pk.is_null() || sk.is_null() {
            return Err(null("output pointer"));
        }
        let keys = with_rng(|rng| sss::init(SUPPORTED_SECURITY_BITS, n, rng))?;
        put(pk, SsPublicKey(keys.mpk))?;
        put(sk, SsSecretKey(keys.msk))
    })
}

/// Row width of the stream a public key belongs to, or 0 on a null handle.
///
/// # Safety
/// `pk` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_public_key_width(pk: *const SsPublicKey) -> usize {
    pk.as_ref().map_or(0, |k| k.0.params().n())
}

/// Encrypts a row of `n` cells given as parallel pointer and length arrays.
///
/// # Safety
/// `cell_data` and `cell_lens` must point to `n` entries, each cell to
/// `cell_lens[i]` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn ss_encrypt_row(
    pk: *const SsPublicKey,
    cell_data: *const *const u8,
    cell_lens: *const usize,
    n: usize,
    out: *mut *mut SsEncryptedRow,
) -> SsStatus {
    guard(|| {
        let pk = handle(pk, "public key")?;
        let row = Row::new(cells(cell_data, cell_lens, n, false)?.into_iter().flatten().collect());
        let erow = with_rng(|rng| sss::encrypt_row(&pk.0, &row, rng))?;
        put(out, SsEncryptedRow(erow))
    })
}

/// Predicate token for a policy of `n` entries; a null entry is a wildcard.
///
/// # Safety
/// As for [`ss_encrypt_row`], with null entries allowed.
#[no_mangle]
pub unsafe extern "C" fn ss_authorize_sel(
    sk: *const SsSecretKey,
    policy_data: *const *const u8,
    policy_lens: *const usize,
    n: usize,
    out: *mut *mut SsPToken,
) -> SsStatus {
    guard(|| {
        let sk = handle(sk, "secret key")?;
        let policy = Policy::new(cells(policy_data, policy_lens, n, true)?);
        let t = with_rng(|rng| sss::authorize_sel(&sk.0, &policy, rng))?;
        put(out, SsPToken(t))
    })
}

/// Message token opening cell `k` (1-based) of rows matching the policy.
///
/// # Safety
/// As for [`ss_authorize_sel`].
#[no_mangle]
pub unsafe extern "C" fn ss_authorize_dec(
    sk: *const SsSecretKey,
    policy_data: *const *const u8,
    policy_lens: *const usize,
    n: usize,
    k: usize,
    out: *mut *mut SsMToken,
) -> SsStatus {
    guard(|| {
        let sk = handle(sk, "secret key")?;
        let policy = Policy::new(cells(policy_data, policy_lens, n, true)?);
        let t = with_rng(|rng| sss::authorize_dec(&sk.0, &policy, k, rng))?;
        put(out, SsMToken(t))
    })
}

/// Writes 1 to `selected` if the row satisfies the token's policy, else 0.
///
/// # Safety
/// Handles must be live; `selected` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_select(row: *const SsEncryptedRow, token: *const SsPToken, selected: *mut u8) -> SsStatus {
    guard(|| {
        let row = handle(row, "row")?;
        let token = handle(token, "predicate token")?;
        if selected.is_null() {
            return Err(null("output pointer"));
        }
        *selected = sss::select(&row.0, &token.0)? as u8;
        Ok(())
    })
}

/// Decrypts cell `k`. Returns `SS_STATUS_DECRYPTION_FAILED` for rows the
/// token does not open.
///
/// # Safety
/// Handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_decrypt_cell(
    row: *const SsEncryptedRow,
    token: *const SsMToken,
    k: usize,
    out: *mut SsBuffer,
) -> SsStatus {
    guard(|| {
        let row = handle(row, "row")?;
        let token = handle(token, "message token")?;
        put_buffer(out, sss::decrypt_cell(&row.0, &token.0, k)?)
    })
}

macro_rules! codec {
    ($ty:ident, $inner:ty, $ser:ident, $de:ident, $free:ident) => {
        /// Serializes the handle into a caller-owned buffer.
        ///
        /// # Safety
        /// `h` must be a live handle and `out` valid for writes.
        #[no_mangle]
        pub unsafe extern "C" fn $ser(h: *const $ty, out: *mut SsBuffer) -> SsStatus {
            guard(|| put_buffer(out, handle(h, stringify!($ty))?.0.to_bytes()))
        }

        /// Parses a handle from `len` bytes at `data`.
        ///
        /// # Safety
        /// `data` must point to `len` readable bytes and `out` be valid for writes.
        #[no_mangle]
        pub unsafe extern "C" fn $de(data: *const u8, len: usize, out: *mut *mut $ty) -> SsStatus {
            guard(|| {
                let v = <$inner>::from_bytes(bytes(data, len, "input")?)?;
                put(out, $ty(v))
            })
        }

        /// Releases a handle. Null is ignored.
        ///
        /// # Safety
        /// `h` must be null or a handle not yet freed.
        #[no_mangle]
        pub unsafe extern "C" fn $free(h: *mut $ty) {
            if !h.is_null() {
                drop(Box::from_raw(h));
            }
        }
    };
}

codec!(SsPublicKey, MasterPublicKey, ss_public_key_serialize, ss_public_key_deserialize, ss_public_key_free);
codec!(SsSecretKey, MasterSecretKey, ss_secret_key_serialize, ss_secret_key_deserialize, ss_secret_key_free);
codec!(SsPToken, PToken, ss_ptoken_serialize, ss_ptoken_deserialize, ss_ptoken_free);
codec!(SsMToken, MToken, ss_mtoken_serialize, ss_mtoken_deserialize, ss_mtoken_free);
codec!(SsEncryptedRow, EncryptedRow, ss_row_serialize, ss_row_deserialize, ss_row_free);

/// Releases a buffer returned by this library. Empty buffers are ignored.
///
/// # Safety
/// `buf` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ss_buffer_free(buf: SsBuffer) {
    if !buf.data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(buf.data, buf.len)));
    }
}

/// An empty buffer, for initializing outputs.
#[no_mangle]
pub extern "C" fn ss_buffer_empty() -> SsBuffer {
    SsBuffer::EMPTY
}
