use ark_ff::{One, Zero};
use rand::Rng;

use super::keys::{MasterSecretKey, SecretSlot};
use super::{AoeParams, TokenBlock, TokenSlot};
use crate::bilinear::{random_scalar, Scalar};
use crate::error::{Error, Result};

/// Predicate token for a shared vector `S_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PToken {
    pub(crate) params: AoeParams,
    pub(crate) block: TokenBlock,
}

impl PToken {
    pub fn params(&self) -> AoeParams {
        self.params
    }

    pub fn block(&self) -> &TokenBlock {
        &self.block
    }

    pub fn group_elements(&self) -> usize {
        self.block.g2_elements()
    }
}

/// Message token for `(S_0, S_k, k)`.
///
/// The token is split in two blocks, one over basic key 0 for `(S_0, 1)` and
/// one over basic key `k` for `(-1, S_k)`, each with its own `F` and `H`.
/// Both blocks share `lambda_1, lambda_2`, so the attribute terms of the two
/// halves add up to `<(S_0, S_k), (X_0, X_k)>` with `y` cancelled. Separate
/// `F`/`H` are required because `ct_0` and `ct_k` use independent `q`, `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MToken {
    pub(crate) params: AoeParams,
    pub(crate) k: usize,
    pub(crate) shared: TokenBlock,
    pub(crate) specific: TokenBlock,
}

impl MToken {
    pub fn params(&self) -> AoeParams {
        self.params
    }

    /// Target message index, 1-based.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn shared_block(&self) -> &TokenBlock {
        &self.shared
    }

    pub fn specific_block(&self) -> &TokenBlock {
        &self.specific
    }

    /// `4 + 4f` with `f = (u+1) + (v+1)`.
    pub fn group_elements(&self) -> usize {
        self.shared.g2_elements() + self.specific.g2_elements()
    }
}

/// Issues a predicate token for `s0` (length `u`), extended with a trailing 0.
pub fn p_key_gen<R: Rng + ?Sized>(
    msk: &MasterSecretKey,
    s0: &[Scalar],
    rng: &mut R,
) -> Result<PToken> {
    Error::check_len("predicate vector", msk.params.u, s0.len())?;
    let mut s = s0.to_vec();
    s.push(Scalar::zero());
    let lambda = [random_scalar(rng), random_scalar(rng)];
    Ok(PToken {
        params: msk.params,
        block: token_block(msk, &msk.blocks[0], &s, &lambda, rng),
    })
}

/// Issues a message token for index `k` over `S = (S_0, 1, -1, S_k)`.
pub fn m_key_gen<R: Rng + ?Sized>(
    msk: &MasterSecretKey,
    s0: &[Scalar],
    sk: &[Scalar],
    k: usize,
    rng: &mut R,
) -> Result<MToken> {
    let params = msk.params;
    params.check_index(k)?;
    Error::check_len("shared token vector", params.u, s0.len())?;
    Error::check_len("specific token vector", params.v, sk.len())?;

    let mut shared = s0.to_vec();
    shared.push(Scalar::one());
    let mut specific = Vec::with_capacity(params.v + 1);
    specific.push(-Scalar::one());
    specific.extend_from_slice(sk);

    let lambda = [random_scalar(rng), random_scalar(rng)];
    Ok(MToken {
        params,
        k,
        shared: token_block(msk, &msk.blocks[0], &shared, &lambda, rng),
        specific: token_block(msk, &msk.blocks[k], &specific, &lambda, rng),
    })
}

/// Token block over one basic secret key for the extended vector `s`.
///
/// With `r = r_{i,b}` fresh per slot and branch:
///
/// ```text
/// K_{i,b} = g^( beta_b r + lambda_b theta_{i,b} s_i)
/// L_{i,b} = g^(-alpha_b r - lambda_b omega_{i,b} s_i)
/// F = g2^-1 * prod_i,b K_{i,b}^-gamma_{i,b} * L_{i,b}^-delta_{i,b}
/// H = g^(sum_i,b r_{i,b})
/// ```
///
/// `L` and the `g2` factor of `F` carry the opposite sign of the textbook
/// formulas; with these signs `C * e(A,F) * e(B,H) * prod e(D,K) e(E,L)`
/// equals `M * e(g,g)^(omega (z_1 lambda_1 + z_2 lambda_2) <x,s>)`, which is
/// `M` exactly on orthogonal inputs. `F` is evaluated in the exponent, which
/// yields the same element as the product form.
fn token_block<R: Rng + ?Sized>(
    msk: &MasterSecretKey,
    keys: &[Vec<SecretSlot>; 2],
    s: &[Scalar],
    lambda: &[Scalar; 2],
    rng: &mut R,
) -> TokenBlock {
    debug_assert_eq!(keys[0].len(), s.len());
    let g = msk.g_hat;
    let mut f_exp = Scalar::zero();
    let mut h_exp = Scalar::zero();

    let slots = s
        .iter()
        .enumerate()
        .map(|(i, si)| {
            let mut k = [g; 2];
            let mut l = [g; 2];
            for b in 0..2 {
                let key = &keys[b][i];
                let r = random_scalar(rng);
                let k_exp = msk.beta[b] * r + lambda[b] * key.theta * si;
                let l_exp = -(msk.alpha[b] * r + lambda[b] * key.omega * si);
                k[b] = g * k_exp;
                l[b] = g * l_exp;
                f_exp += key.gamma * k_exp + key.delta * l_exp;
                h_exp += r;
            }
            TokenSlot { k, l }
        })
        .collect();

    TokenBlock {
        f: -msk.g2 - g * f_exp,
        h: g * h_exp,
        slots,
    }
}
