//! Amortized orthogonality encryption.
//!
//! One encryption protects `n` messages `M_1..M_n` in GT. Message `j` is bound
//! to the attribute vector `(X_0, X_j)`, where the shared part `X_0` (length
//! `u`) is stored once for all messages. A predicate token for `S_0` tests
//! `<X_0, S_0> = 0` without revealing anything else; a message token for
//! `(S_0, S_k, k)` recovers `M_k` exactly when `<X_0, S_0> + <X_k, S_k> = 0`.
//!
//! The cumulative ciphertext consists of `n + 1` basic ciphertexts. Basic
//! ciphertext 0 carries `(X_0, y)` and the identity message; basic ciphertext
//! `j >= 1` carries `(y, X_j)` and `M_j`. The shared randomizer `y` is
//! cancelled by the `(1, -1)` entries of every message token.

mod baseline;
mod decrypt;
mod encrypt;
mod keys;
mod token;
mod wire;

pub use baseline::{
    baseline_key_gen, baseline_params, dec_non_amortized, enc_non_amortized, BaselineCiphertext,
};
pub use decrypt::{m_dec, p_dec};
pub use encrypt::{enc, enc_with_randomizers, AttributeBundle, EncRandomizers};
pub use keys::{par_gen, MasterPublicKey, MasterSecretKey};
pub use token::{m_key_gen, p_key_gen, MToken, PToken};

use crate::bilinear::{Gt, G1, G2};
use crate::error::{Error, Result};

/// Size parameters of an AOE instance: `n` messages per encryption, shared
/// attribute length `u`, specific attribute length `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AoeParams {
    n: usize,
    u: usize,
    v: usize,
}

impl AoeParams {
    pub fn new(n: usize, u: usize, v: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if u == 0 {
            return Err(Error::InvalidParams("u must be at least 1".into()));
        }
        let p = Self { n, u, v };
        // Everything is framed with u32 counts.
        if u32::try_from(n).is_err() || u32::try_from(p.block_len(1)).is_err() || u32::try_from(p.block_len(0)).is_err() {
            return Err(Error::InvalidParams("parameters too large".into()));
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    /// Number of slots of basic key/ciphertext `j`: `u + 1` for `j = 0`,
    /// `v + 1` otherwise.
    pub fn block_len(&self, j: usize) -> usize {
        if j == 0 {
            self.u + 1
        } else {
            self.v + 1
        }
    }

    /// G1 elements held by the basic public keys: `8(u+1) + 8n(v+1)`.
    pub fn basic_public_key_elements(&self) -> usize {
        8 * (self.u + 1) + 8 * self.n * (self.v + 1)
    }

    /// G1 elements of a cumulative ciphertext: `2 + 4(u+1) + n(2 + 4(v+1))`.
    pub fn ciphertext_g1_elements(&self) -> usize {
        2 + 4 * (self.u + 1) + self.n * (2 + 4 * (self.v + 1))
    }

    /// GT elements of a cumulative ciphertext: `n + 1`.
    pub fn ciphertext_gt_elements(&self) -> usize {
        self.n + 1
    }

    pub(crate) fn check_index(&self, k: usize) -> Result<()> {
        if (1..=self.n).contains(&k) {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: k,
                max: self.n,
            })
        }
    }
}

/// The four ciphertext elements `(D_1, E_1, D_2, E_2)` for one attribute slot.
/// Index 0 of each array is branch 1, index 1 is branch 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiphertextSlot {
    pub d: [G1; 2],
    pub e: [G1; 2],
}

/// One basic ciphertext `(A, B, C, (D, E)_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicCiphertext {
    pub a: G1,
    pub b: G1,
    pub c: Gt,
    pub slots: Vec<CiphertextSlot>,
}

impl BasicCiphertext {
    pub fn g1_elements(&self) -> usize {
        2 + 4 * self.slots.len()
    }
}

/// The `n + 1` basic ciphertexts produced by one encryption.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulativeCiphertext {
    params: AoeParams,
    blocks: Vec<BasicCiphertext>,
}

impl CumulativeCiphertext {
    pub fn params(&self) -> AoeParams {
        self.params
    }

    /// Basic ciphertext `j` (0 is the shared one).
    pub fn block(&self, j: usize) -> Option<&BasicCiphertext> {
        self.blocks.get(j)
    }

    pub fn blocks(&self) -> &[BasicCiphertext] {
        &self.blocks
    }

    /// Number of group elements (G1 and GT together).
    pub fn group_elements(&self) -> usize {
        self.blocks.iter().map(|b| b.g1_elements() + 1).sum()
    }

    /// Predicate test on the shared basic ciphertext.
    pub fn p_dec(&self, token: &PToken) -> Result<bool> {
        p_dec(&self.blocks[0], token)
    }

    /// Message recovery for the token's target index.
    pub fn m_dec(&self, token: &MToken) -> Result<Gt> {
        self.params.check_index(token.k())?;
        m_dec(&self.blocks[0], &self.blocks[token.k()], token)
    }
}

/// Token elements `(K_1, L_1, K_2, L_2)` for one attribute slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenSlot {
    pub k: [G2; 2],
    pub l: [G2; 2],
}

/// `(F, H, (K, L)_i)` over one basic key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenBlock {
    pub f: G2,
    pub h: G2,
    pub slots: Vec<TokenSlot>,
}

impl TokenBlock {
    pub fn g2_elements(&self) -> usize {
        2 + 4 * self.slots.len()
    }
}
