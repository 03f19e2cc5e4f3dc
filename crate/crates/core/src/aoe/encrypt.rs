use rand::Rng;

use super::keys::{MasterPublicKey, PublicSlot};
use super::{BasicCiphertext, CiphertextSlot, CumulativeCiphertext};
use crate::bilinear::{gt_identity, random_scalar, Gt, Scalar};
use crate::error::{Error, Result};

/// Attribute vectors for one encryption: shared `X_0` (length `u`) and one
/// specific vector `X_j` (length `v`) per message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeBundle {
    pub shared: Vec<Scalar>,
    pub specific: Vec<Vec<Scalar>>,
}

impl AttributeBundle {
    pub fn new(shared: Vec<Scalar>, specific: Vec<Vec<Scalar>>) -> Self {
        Self { shared, specific }
    }
}

/// Randomness shared by all basic ciphertexts of one encryption: the
/// attribute extender `y` and the per-branch scalers `z_1`, `z_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncRandomizers {
    pub y: Scalar,
    pub z: [Scalar; 2],
}

impl EncRandomizers {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            y: random_scalar(rng),
            z: [random_scalar(rng), random_scalar(rng)],
        }
    }
}

/// Encrypts `messages[j-1]` under `(X_0, X_j)` for `j = 1..=n`.
pub fn enc<R: Rng + ?Sized>(
    mpk: &MasterPublicKey,
    attrs: &AttributeBundle,
    messages: &[Gt],
    rng: &mut R,
) -> Result<CumulativeCiphertext> {
    let randomizers = EncRandomizers::random(rng);
    enc_with_randomizers(mpk, attrs, messages, randomizers, rng)
}

/// [`enc`] with caller-chosen `y, z_1, z_2`. The per-block `l_j, q_j` are
/// still drawn from `rng`. Intended for tests that pin the shared randomness.
#[doc(hidden)]
pub fn enc_with_randomizers<R: Rng + ?Sized>(
    mpk: &MasterPublicKey,
    attrs: &AttributeBundle,
    messages: &[Gt],
    randomizers: EncRandomizers,
    rng: &mut R,
) -> Result<CumulativeCiphertext> {
    let params = mpk.params;
    Error::check_len("shared attributes", params.u, attrs.shared.len())?;
    Error::check_len("specific attribute vectors", params.n, attrs.specific.len())?;
    Error::check_len("messages", params.n, messages.len())?;
    for x in &attrs.specific {
        Error::check_len("specific attributes", params.v, x.len())?;
    }

    let y = randomizers.y;
    let mut blocks = Vec::with_capacity(params.n + 1);

    // ct_0 carries (X_0, y) and M_0 = 1.
    let mut x0 = attrs.shared.clone();
    x0.push(y);
    blocks.push(encrypt_block(mpk, &mpk.blocks[0], &x0, gt_identity(), &randomizers.z, rng));

    for (j, (xj, mj)) in attrs.specific.iter().zip(messages).enumerate() {
        let mut ext = Vec::with_capacity(params.v + 1);
        ext.push(y);
        ext.extend_from_slice(xj);
        blocks.push(encrypt_block(mpk, &mpk.blocks[j + 1], &ext, *mj, &randomizers.z, rng));
    }

    Ok(CumulativeCiphertext { params, blocks })
}

/// One basic ciphertext over basic public key `keys` for extended attribute
/// vector `x`:
///
/// ```text
/// A = g^q    B = Omega^l    C = Lambda^q * M
/// D_{i,b} = W_{i,b}^l * Gamma_{i,b}^q * g^(z_b alpha_b x_i)
/// E_{i,b} = Theta_{i,b}^l * Delta_{i,b}^q * g^(z_b beta_b x_i)
/// ```
pub(crate) fn encrypt_block<R: Rng + ?Sized>(
    mpk: &MasterPublicKey,
    keys: &[Vec<PublicSlot>; 2],
    x: &[Scalar],
    message: Gt,
    z: &[Scalar; 2],
    rng: &mut R,
) -> BasicCiphertext {
    debug_assert_eq!(keys[0].len(), x.len());
    let l = random_scalar(rng);
    let q = random_scalar(rng);

    let slots = x
        .iter()
        .enumerate()
        .map(|(i, xi)| {
            let zx = [z[0] * xi, z[1] * xi];
            let d = [0, 1].map(|b| {
                let k = &keys[b][i];
                k.w * l + k.gamma * q + mpk.g_alpha[b] * zx[b]
            });
            let e = [0, 1].map(|b| {
                let k = &keys[b][i];
                k.theta * l + k.delta * q + mpk.g_beta[b] * zx[b]
            });
            CiphertextSlot { d, e }
        })
        .collect();

    BasicCiphertext {
        a: mpk.g * q,
        b: mpk.omega * l,
        c: mpk.lambda * q + message,
        slots,
    }
}
