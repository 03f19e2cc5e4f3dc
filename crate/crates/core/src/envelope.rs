//! Symmetric cell envelope: AES-128-CBC with PKCS#7 padding, followed by an
//! HMAC-SHA256 tag over `IV || ciphertext` (encrypt-then-MAC).
//!
//! Record layout: `IV (16) || ciphertext (16k) || tag (32)`.

use aes::cipher::{block_padding::Pkcs7, BlockDecryptMut, BlockEncryptMut, KeyIvInit};
use hmac::{Hmac, Mac};
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::bilinear::SymKey;
use crate::error::{Error, Result};

type Aes128CbcEnc = cbc::Encryptor<aes::Aes128>;
type Aes128CbcDec = cbc::Decryptor<aes::Aes128>;
type HmacSha256 = Hmac<Sha256>;

pub const IV_LEN: usize = 16;
pub const TAG_LEN: usize = 32;
const MAC_KEY_TAG: &[u8] = b"selstream/envelope-mac/v1";

fn mac_key(key: &SymKey) -> [u8; 32] {
    Sha256::new()
        .chain_update(MAC_KEY_TAG)
        .chain_update(key.0)
        .finalize()
        .into()
}

fn tag(key: &SymKey, iv_and_ct: &[u8]) -> HmacSha256 {
    let mut mac = HmacSha256::new_from_slice(&mac_key(key)).expect("HMAC takes any key length");
    mac.update(iv_and_ct);
    mac
}

/// Encrypts `plaintext` under `key` with a fresh IV from `rng`.
pub fn seal<R: Rng + ?Sized>(key: &SymKey, plaintext: &[u8], rng: &mut R) -> Vec<u8> {
    let mut iv = [0u8; IV_LEN];
    rng.fill(&mut iv);
    let ct = Aes128CbcEnc::new(&key.0.into(), &iv.into()).encrypt_padded_vec_mut::<Pkcs7>(plaintext);
    let mut out = Vec::with_capacity(IV_LEN + ct.len() + TAG_LEN);
    out.extend_from_slice(&iv);
    out.extend_from_slice(&ct);
    let t = tag(key, &out).finalize().into_bytes();
    out.extend_from_slice(&t);
    out
}

/// Verifies the tag and decrypts. Any failure, including a wrong key, is
/// reported as [`Error::DecryptionFailed`].
pub fn open(key: &SymKey, sealed: &[u8]) -> Result<Vec<u8>> {
    if sealed.len() < IV_LEN + 16 + TAG_LEN || (sealed.len() - IV_LEN - TAG_LEN) % 16 != 0 {
        return Err(Error::DecryptionFailed);
    }
    let (body, t) = sealed.split_at(sealed.len() - TAG_LEN);
    tag(key, body)
        .verify_slice(t)
        .map_err(|_| Error::DecryptionFailed)?;
    let (iv, ct) = body.split_at(IV_LEN);
    let iv: [u8; IV_LEN] = iv.try_into().expect("split at IV_LEN");
    Aes128CbcDec::new(&key.0.into(), &iv.into())
        .decrypt_padded_vec_mut::<Pkcs7>(ct)
        .map_err(|_| Error::DecryptionFailed)
}
