//! Bilinear group backend.
//!
//! The encryption scheme is written for a symmetric pairing `e: G x G -> GT`.
//! It runs here on BLS12-381, whose pairing is asymmetric, with a fixed
//! placement of every element:
//!
//! * master public key and ciphertext elements (`Omega`, `Gamma`, `Delta`,
//!   `Theta`, `W`, `A`, `B`, `D`, `E`) live in G1;
//! * token elements (`F`, `H`, `K`, `L`) and the secret `g2` live in G2;
//! * `Lambda`, every `C` and every message live in GT.
//!
//! Decryption only ever pairs a ciphertext element (left) with a token
//! element (right), so no value has to be mirrored across both source groups.

use std::sync::OnceLock;

use ark_bls12_381::{Bls12_381, Fr, G1Projective, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{CurveGroup, PrimeGroup};
use ark_ff::{BigInt, PrimeField, UniformRand, Zero};
use ark_serialize::CanonicalSerialize;
use rand::Rng;
use sha2::{Digest, Sha256, Sha512};

use crate::error::{Error, Result};

pub type Scalar = Fr;
pub type G1 = G1Projective;
pub type G2 = G2Projective;
pub type Gt = PairingOutput<Bls12_381>;

pub const CURVE_ID: &str = "BLS12-381";
pub const SUPPORTED_SECURITY_BITS: u32 = 128;

const SCALAR_HASH_TAG: &[u8] = b"selstream/hash-to-scalar/v1";
const CELL_KEY_TAG: &[u8] = b"selstream/cell-key/v1";

/// Description of the pairing group in use. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupContext {
    curve: &'static str,
    security_bits: u32,
}

impl GroupContext {
    pub fn curve_id(&self) -> &'static str {
        self.curve
    }

    pub fn security_bits(&self) -> u32 {
        self.security_bits
    }

    /// Prime order `p` of G1, G2 and GT.
    pub fn order(&self) -> BigInt<4> {
        Fr::MODULUS
    }

    pub fn order_bits(&self) -> u32 {
        Fr::MODULUS_BIT_SIZE
    }

    pub fn g1(&self) -> G1 {
        G1::generator()
    }

    pub fn g2(&self) -> G2 {
        G2::generator()
    }

    /// `e(g1, g2)`, a generator of GT.
    pub fn gt(&self) -> Gt {
        gt_generator()
    }
}

/// Returns the group context for the requested security level. Only 128 bits
/// is defined; the curve choice per level is fixed.
pub fn setup_group(security_bits: u32) -> Result<GroupContext> {
    if security_bits != SUPPORTED_SECURITY_BITS {
        return Err(Error::UnsupportedSecurityLevel(security_bits));
    }
    Ok(GroupContext {
        curve: CURVE_ID,
        security_bits,
    })
}

pub(crate) fn gt_generator() -> Gt {
    static GEN: OnceLock<Gt> = OnceLock::new();
    *GEN.get_or_init(|| Bls12_381::pairing(G1::generator(), G2::generator()))
}

pub fn pairing(a: &G1, b: &G2) -> Gt {
    Bls12_381::pairing(*a, *b)
}

/// `sum_i e(a_i, b_i)` in additive GT notation, computed with a single final
/// exponentiation.
pub fn pairing_product(a: &[G1], b: &[G2]) -> Gt {
    debug_assert_eq!(a.len(), b.len());
    let a = G1::normalize_batch(a);
    let b = G2::normalize_batch(b);
    Bls12_381::multi_pairing(a, b)
}

/// Maps arbitrary bytes to a scalar: SHA-512 over a domain tag and the input,
/// read big-endian and reduced mod `p`.
pub fn hash_to_scalar(data: &[u8]) -> Scalar {
    let digest = Sha512::new()
        .chain_update(SCALAR_HASH_TAG)
        .chain_update(data)
        .finalize();
    Fr::from_be_bytes_mod_order(&digest)
}

/// 128-bit symmetric key.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymKey(pub [u8; 16]);

impl std::fmt::Debug for SymKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SymKey(..)")
    }
}

/// Derives the envelope key for a cell from the GT element protecting it.
pub fn derive_cell_key(m: &Gt) -> SymKey {
    let mut bytes = Vec::with_capacity(576);
    m.serialize_compressed(&mut bytes)
        .expect("serializing into a Vec cannot fail");
    let digest = Sha256::new()
        .chain_update(CELL_KEY_TAG)
        .chain_update(&bytes)
        .finalize();
    let mut key = [0u8; 16];
    key.copy_from_slice(&digest[..16]);
    SymKey(key)
}

pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    Fr::rand(rng)
}

pub fn random_nonzero_scalar<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    loop {
        let s = Fr::rand(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Uniform element of GT.
pub fn random_gt<R: Rng + ?Sized>(rng: &mut R) -> Gt {
    gt_generator() * random_scalar(rng)
}

pub fn gt_identity() -> Gt {
    Gt::zero()
}
