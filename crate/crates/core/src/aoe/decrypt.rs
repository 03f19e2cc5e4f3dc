use super::token::{MToken, PToken};
use super::{BasicCiphertext, TokenBlock};
use crate::bilinear::{pairing_product, Gt, G1, G2};
use crate::error::{Error, Result};

/// Appends the pairing arguments `(A,F), (B,H), (D,K), (E,L)` of one block.
fn push_terms(ct: &BasicCiphertext, tok: &TokenBlock, lhs: &mut Vec<G1>, rhs: &mut Vec<G2>) {
    lhs.push(ct.a);
    rhs.push(tok.f);
    lhs.push(ct.b);
    rhs.push(tok.h);
    for (c, t) in ct.slots.iter().zip(&tok.slots) {
        for b in 0..2 {
            lhs.push(c.d[b]);
            rhs.push(t.k[b]);
            lhs.push(c.e[b]);
            rhs.push(t.l[b]);
        }
    }
}

/// `C * e(A,F) * e(B,H) * prod_i [e(D_i1,K_i1) e(E_i1,L_i1) e(D_i2,K_i2) e(E_i2,L_i2)]`
/// over a single basic ciphertext.
pub(crate) fn block_value(ct: &BasicCiphertext, tok: &TokenBlock) -> Result<Gt> {
    Error::check_len("token slots", ct.slots.len(), tok.slots.len())?;
    let cap = 2 + 4 * ct.slots.len();
    let mut lhs = Vec::with_capacity(cap);
    let mut rhs = Vec::with_capacity(cap);
    push_terms(ct, tok, &mut lhs, &mut rhs);
    Ok(ct.c + pairing_product(&lhs, &rhs))
}

/// True iff the pairing product over `ct_0` is the GT identity, i.e. the
/// shared attributes are orthogonal to the token vector.
pub fn p_dec(ct0: &BasicCiphertext, token: &PToken) -> Result<bool> {
    Ok(block_value(ct0, &token.block)? == Gt::default())
}

/// Recovers `M_k` from `(ct_0, ct_k)`. On non-orthogonal input the result is
/// a uniformly distributed element of GT.
pub fn m_dec(ct0: &BasicCiphertext, ctk: &BasicCiphertext, token: &MToken) -> Result<Gt> {
    Error::check_len("shared token slots", ct0.slots.len(), token.shared.slots.len())?;
    Error::check_len("specific token slots", ctk.slots.len(), token.specific.slots.len())?;
    let cap = 4 + 4 * (ct0.slots.len() + ctk.slots.len());
    let mut lhs = Vec::with_capacity(cap);
    let mut rhs = Vec::with_capacity(cap);
    push_terms(ct0, &token.shared, &mut lhs, &mut rhs);
    push_terms(ctk, &token.specific, &mut lhs, &mut rhs);
    Ok(ct0.c + ctk.c + pairing_product(&lhs, &rhs))
}
