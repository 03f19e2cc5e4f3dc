//! Non-amortized baseline: every message gets its own orthogonality
//! ciphertext under the full vector `(X_0, X_i)`, so a row of `n` messages
//! costs `Theta(n (u + v))` group elements instead of `Theta(u + n v)`.

use rand::Rng;

use super::decrypt::block_value;
use super::encrypt::{encrypt_block, AttributeBundle};
use super::keys::{MasterPublicKey, MasterSecretKey};
use super::token::{p_key_gen, PToken};
use super::{AoeParams, BasicCiphertext};
use crate::bilinear::{random_scalar, Gt, Scalar};
use crate::error::{Error, Result};

/// Parameters of the key pair used by the baseline for an amortized instance
/// with `params`: a single shared block of length `u + v`.
pub fn baseline_params(params: AoeParams) -> AoeParams {
    AoeParams::new(1, params.u() + params.v(), 0).expect("u + v >= 1")
}

/// `n` independent basic ciphertexts, one per message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaselineCiphertext {
    pub(crate) params: AoeParams,
    pub(crate) cells: Vec<BasicCiphertext>,
}

impl BaselineCiphertext {
    /// Parameters of the amortized instance this baseline stands in for.
    pub fn params(&self) -> AoeParams {
        self.params
    }

    pub fn cells(&self) -> &[BasicCiphertext] {
        &self.cells
    }

    pub fn group_elements(&self) -> usize {
        self.cells.iter().map(|c| c.g1_elements() + 1).sum()
    }
}

/// Encrypts each `M_i` separately under `(X_0, X_i)` with the shared basic key
/// of `mpk`, which must have been generated with [`baseline_params`].
pub fn enc_non_amortized<R: Rng + ?Sized>(
    mpk: &MasterPublicKey,
    attrs: &AttributeBundle,
    messages: &[Gt],
    rng: &mut R,
) -> Result<BaselineCiphertext> {
    let n = attrs.specific.len();
    let u = attrs.shared.len();
    let v = attrs.specific.first().map_or(0, Vec::len);
    Error::check_len("messages", n, messages.len())?;
    Error::check_len("baseline attribute length", mpk.params.u(), u + v)?;
    let params = AoeParams::new(n, u, v)?;

    let cells = attrs
        .specific
        .iter()
        .zip(messages)
        .map(|(xi, mi)| {
            Error::check_len("specific attributes", v, xi.len())?;
            let mut x = Vec::with_capacity(u + v + 1);
            x.extend_from_slice(&attrs.shared);
            x.extend_from_slice(xi);
            x.push(random_scalar(rng));
            let z = [random_scalar(rng), random_scalar(rng)];
            Ok(encrypt_block(mpk, &mpk.blocks[0], &x, *mi, &z, rng))
        })
        .collect::<Result<_>>()?;
    Ok(BaselineCiphertext { params, cells })
}

/// Token for a baseline cell: a predicate token over `(S_0, S_i)`.
pub fn baseline_key_gen<R: Rng + ?Sized>(
    msk: &MasterSecretKey,
    s0: &[Scalar],
    si: &[Scalar],
    rng: &mut R,
) -> Result<PToken> {
    let mut s = s0.to_vec();
    s.extend_from_slice(si);
    p_key_gen(msk, &s, rng)
}

/// Recovers the message of one baseline cell; correct when the token vector is
/// orthogonal to the cell's attributes.
pub fn dec_non_amortized(cell: &BasicCiphertext, token: &PToken) -> Result<Gt> {
    block_value(cell, &token.block)
}
