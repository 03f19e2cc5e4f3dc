use ark_ec::PrimeGroup;
use ark_ff::Field;
use rand::Rng;

use super::AoeParams;
use crate::bilinear::{pairing, random_nonzero_scalar, random_scalar, Gt, Scalar, G1, G2};

/// Secret exponents `(gamma, delta, theta, omega_i)` of one basic-key slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct SecretSlot {
    pub gamma: Scalar,
    pub delta: Scalar,
    pub theta: Scalar,
    pub omega: Scalar,
}

/// `(Gamma, Delta, Theta, W)` = `g` raised to the matching secret exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct PublicSlot {
    pub gamma: G1,
    pub delta: G1,
    pub theta: G1,
    pub w: G1,
}

/// Basic keys are stored as `blocks[j][b][i]` with `j` in `0..=n`, branch
/// `b` in `{0, 1}` and slot `i` in `0..block_len(j)`.
pub(crate) type Blocks<T> = Vec<[Vec<T>; 2]>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasterSecretKey {
    pub(crate) params: AoeParams,
    pub(crate) alpha: [Scalar; 2],
    pub(crate) beta: [Scalar; 2],
    pub(crate) omega: Scalar,
    pub(crate) g: G1,
    /// Second base of `Lambda = e(g, g2)`; lives on the token side.
    pub(crate) g2: G2,
    /// Token-side counterpart of `g`.
    pub(crate) g_hat: G2,
    pub(crate) blocks: Blocks<SecretSlot>,
}

/// Public key. Besides `Lambda`, `Omega` and the basic public keys it carries
/// `g` and `g^alpha_b`, `g^beta_b`, which encryption needs to form `A_j` and
/// the attribute terms of `D` and `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasterPublicKey {
    pub(crate) params: AoeParams,
    pub(crate) lambda: Gt,
    pub(crate) g: G1,
    pub(crate) omega: G1,
    pub(crate) g_alpha: [G1; 2],
    pub(crate) g_beta: [G1; 2],
    pub(crate) blocks: Blocks<PublicSlot>,
}

impl MasterSecretKey {
    pub fn params(&self) -> AoeParams {
        self.params
    }

    /// Checks `alpha_b * theta_{i,b,j} - beta_b * omega_{i,b,j} = omega` for
    /// every slot.
    pub fn satisfies_key_constraint(&self) -> bool {
        self.blocks.iter().all(|pair| {
            pair.iter().enumerate().all(|(b, slots)| {
                slots
                    .iter()
                    .all(|s| self.alpha[b] * s.theta - self.beta[b] * s.omega == self.omega)
            })
        })
    }

    /// Recomputes the public key from the secret exponents. Used to check a
    /// key pair for consistency.
    pub fn derive_public(&self) -> MasterPublicKey {
        let g = self.g;
        MasterPublicKey {
            params: self.params,
            lambda: pairing(&g, &self.g2),
            g,
            omega: g * self.omega,
            g_alpha: [g * self.alpha[0], g * self.alpha[1]],
            g_beta: [g * self.beta[0], g * self.beta[1]],
            blocks: self
                .blocks
                .iter()
                .map(|pair| {
                    pair.clone().map(|slots| {
                        slots
                            .iter()
                            .map(|s| PublicSlot {
                                gamma: g * s.gamma,
                                delta: g * s.delta,
                                theta: g * s.theta,
                                w: g * s.omega,
                            })
                            .collect()
                    })
                })
                .collect(),
        }
    }
}

impl MasterPublicKey {
    pub fn params(&self) -> AoeParams {
        self.params
    }

    /// `e(g, g2)`.
    pub fn lambda(&self) -> &Gt {
        &self.lambda
    }

    /// `g^omega`.
    pub fn omega(&self) -> &G1 {
        &self.omega
    }

    /// Number of G1 elements in the basic public keys, `8(u+1) + 8n(v+1)`.
    pub fn basic_key_elements(&self) -> usize {
        self.blocks
            .iter()
            .map(|pair| 4 * (pair[0].len() + pair[1].len()))
            .sum()
    }

    /// G1 elements in basic public key pair `j` (both branches).
    pub fn basic_key_pair_elements(&self, j: usize) -> Option<usize> {
        self.blocks.get(j).map(|pair| 4 * (pair[0].len() + pair[1].len()))
    }
}

/// Generates a fresh key pair.
///
/// `theta` is solved from `alpha_b * theta - beta_b * omega_i = omega` after
/// drawing `omega_i` uniformly, so every slot satisfies the key constraint
/// and `(theta, omega_i)` is uniform on that line.
pub fn par_gen<R: Rng + ?Sized>(
    params: AoeParams,
    rng: &mut R,
) -> (MasterPublicKey, MasterSecretKey) {
    let g = G1::generator() * random_nonzero_scalar(rng);
    let g_hat = G2::generator() * random_nonzero_scalar(rng);
    let g2 = g_hat * random_nonzero_scalar(rng);

    let alpha = [random_nonzero_scalar(rng), random_nonzero_scalar(rng)];
    let beta = [random_scalar(rng), random_scalar(rng)];
    let omega = random_scalar(rng);
    let alpha_inv = alpha.map(|a| a.inverse().expect("alpha is nonzero"));

    let blocks = (0..=params.n)
        .map(|j| {
            let len = params.block_len(j);
            [0, 1].map(|b| {
                (0..len)
                    .map(|_| {
                        let omega_i = random_scalar(rng);
                        SecretSlot {
                            gamma: random_scalar(rng),
                            delta: random_scalar(rng),
                            theta: (omega + beta[b] * omega_i) * alpha_inv[b],
                            omega: omega_i,
                        }
                    })
                    .collect()
            })
        })
        .collect();

    let msk = MasterSecretKey {
        params,
        alpha,
        beta,
        omega,
        g,
        g2,
        g_hat,
        blocks,
    };
    (msk.derive_public(), msk)
}
