//! Selective streams on top of AOE.
//!
//! A row of `n` byte-string cells is encrypted as one AOE ciphertext with
//! `u = n + 1`, `v = 2`:
//!
//! * shared attributes `X_0 = (x_1, .., x_n, 1)` with `x_i = H(cell_i)`;
//! * specific attributes `X_i = (1, i)`;
//! * message `M_i`, a fresh random GT element whose hash keys the AES
//!   envelope holding the cell bytes.
//!
//! A conjunctive equality policy becomes `S_0 = (-t_1, .., -t_n, sum t_i Pol_i)`
//! with `t_i = 0` on wildcard positions, so `<X_0, S_0> = sum t_i (Pol_i - x_i)`.
//! Cell `k` is addressed with `S_k = (k, -1)`, giving `<X_i, S_k> = k - i`.

use ark_ff::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::aoe::{
    self, AoeParams, AttributeBundle, CumulativeCiphertext, MToken, MasterPublicKey,
    MasterSecretKey, PToken,
};
use crate::bilinear::{derive_cell_key, hash_to_scalar, random_gt, random_nonzero_scalar, setup_group, Scalar};
use crate::codec::{Reader, Writer};
use crate::envelope;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SSS1";
pub const VERSION: u8 = 1;

/// AOE parameters for rows of `n` cells.
pub fn stream_params(n: usize) -> Result<AoeParams> {
    if n == 0 {
        return Err(Error::InvalidParams("rows need at least one cell".into()));
    }
    AoeParams::new(n, n + 1, 2)
}

/// Row width `n` of AOE parameters produced by [`stream_params`].
pub fn stream_width(params: AoeParams) -> Result<usize> {
    let n = params.n();
    if params.u() != n + 1 || params.v() != 2 {
        return Err(Error::InvalidParams(format!(
            "AOE parameters ({}, {}, {}) are not stream parameters",
            n,
            params.u(),
            params.v()
        )));
    }
    Ok(n)
}

/// A row of `n` cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Row {
    cells: Vec<Vec<u8>>,
}

impl Row {
    pub fn new(cells: Vec<Vec<u8>>) -> Self {
        Self { cells }
    }

    pub fn from_strs<S: AsRef<str>>(cells: &[S]) -> Self {
        Self::new(cells.iter().map(|c| c.as_ref().as_bytes().to_vec()).collect())
    }

    pub fn cells(&self) -> &[Vec<u8>] {
        &self.cells
    }

    /// Cell `k`, 1-based.
    pub fn cell(&self, k: usize) -> Option<&[u8]> {
        k.checked_sub(1).and_then(|i| self.cells.get(i)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Attribute bundle `X_0 = (H(c_1), .., H(c_n), 1)`, `X_i = (1, i)`.
    pub fn attributes(&self) -> AttributeBundle {
        let mut shared: Vec<Scalar> = self.cells.iter().map(|c| hash_to_scalar(c)).collect();
        shared.push(Scalar::one());
        let specific = (1..=self.cells.len())
            .map(|i| vec![Scalar::one(), Scalar::from(i as u64)])
            .collect();
        AttributeBundle::new(shared, specific)
    }
}

/// JSON form: an array of strings.
impl Serialize for Row {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cells: Vec<std::borrow::Cow<'_, str>> =
            self.cells.iter().map(|c| String::from_utf8_lossy(c)).collect();
        cells.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Row {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let cells = Vec::<String>::deserialize(d)?;
        Ok(Self::new(cells.into_iter().map(String::into_bytes).collect()))
    }
}

/// Conjunction of equality tests; `None` is the wildcard.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Policy {
    entries: Vec<Option<Vec<u8>>>,
}

impl Policy {
    pub fn new(entries: Vec<Option<Vec<u8>>>) -> Self {
        Self { entries }
    }

    /// All-wildcard policy of width `n`; matches every row.
    pub fn any(n: usize) -> Self {
        Self::new(vec![None; n])
    }

    pub fn entries(&self) -> &[Option<Vec<u8>>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Plaintext evaluation. Rows of a different width never match.
    pub fn matches(&self, row: &Row) -> bool {
        self.entries.len() == row.len()
            && self
                .entries
                .iter()
                .zip(row.cells())
                .all(|(p, c)| p.as_ref().is_none_or(|p| p == c))
    }

    /// Same policy with position `i` (0-based) set to the wildcard.
    pub fn with_wildcard(&self, i: usize) -> Self {
        let mut p = self.clone();
        p.entries[i] = None;
        p
    }

    fn hashed(&self) -> Vec<Option<Scalar>> {
        self.entries
            .iter()
            .map(|e| e.as_deref().map(hash_to_scalar))
            .collect()
    }
}

/// JSON form: an array with `null` for wildcards and strings for values.
impl Serialize for Policy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Option<String>> = self
            .entries
            .iter()
            .map(|e| e.as_ref().map(|v| String::from_utf8_lossy(v).into_owned()))
            .collect();
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Policy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let entries = Vec::<Option<String>>::deserialize(d)?;
        Ok(Self::new(
            entries.into_iter().map(|e| e.map(String::into_bytes)).collect(),
        ))
    }
}

/// An access request `(policy, k)`, as read from policy files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessRequest {
    pub policy: Policy,
    /// 1-based cell index.
    pub k: usize,
}

/// `S_0 = (-t_1, .., -t_n, sum t_i v_i)` with `t_i` ignored (treated as 0) at
/// wildcard positions.
pub fn selection_vector(values: &[Option<Scalar>], t: &[Scalar]) -> Vec<Scalar> {
    let mut s = Vec::with_capacity(values.len() + 1);
    let mut last = Scalar::zero();
    for (v, ti) in values.iter().zip(t) {
        match v {
            Some(v) => {
                s.push(-*ti);
                last += *ti * v;
            }
            None => s.push(Scalar::zero()),
        }
    }
    s.push(last);
    s
}

fn random_selection_vector<R: Rng + ?Sized>(policy: &Policy, rng: &mut R) -> Vec<Scalar> {
    let values = policy.hashed();
    // t_i = 0 would silently turn position i into a wildcard.
    let t: Vec<Scalar> = values.iter().map(|_| random_nonzero_scalar(rng)).collect();
    selection_vector(&values, &t)
}

/// Master key pair of a stream with `n` cells per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SssKeys {
    pub mpk: MasterPublicKey,
    pub msk: MasterSecretKey,
}

impl SssKeys {
    pub fn n(&self) -> usize {
        self.mpk.params().n()
    }
}

pub fn init<R: Rng + ?Sized>(security_bits: u32, n: usize, rng: &mut R) -> Result<SssKeys> {
    setup_group(security_bits)?;
    let (mpk, msk) = aoe::par_gen(stream_params(n)?, rng);
    Ok(SssKeys { mpk, msk })
}

fn check_policy(params: AoeParams, policy: &Policy) -> Result<usize> {
    let n = stream_width(params)?;
    Error::check_len("policy", n, policy.len())?;
    Ok(n)
}

/// Predicate token selecting the rows that satisfy `policy`.
pub fn authorize_sel<R: Rng + ?Sized>(
    msk: &MasterSecretKey,
    policy: &Policy,
    rng: &mut R,
) -> Result<PToken> {
    check_policy(msk.params(), policy)?;
    let s0 = random_selection_vector(policy, rng);
    aoe::p_key_gen(msk, &s0, rng)
}

/// Message token opening cell `k` of the rows that satisfy `policy`.
pub fn authorize_dec<R: Rng + ?Sized>(
    msk: &MasterSecretKey,
    policy: &Policy,
    k: usize,
    rng: &mut R,
) -> Result<MToken> {
    let n = check_policy(msk.params(), policy)?;
    if !(1..=n).contains(&k) {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    let s0 = random_selection_vector(policy, rng);
    let sk = [Scalar::from(k as u64), -Scalar::one()];
    aoe::m_key_gen(msk, &s0, &sk, k, rng)
}

/// An encrypted row: the AOE ciphertext and one envelope per cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptedRow {
    pub ct: CumulativeCiphertext,
    pub envelopes: Vec<Vec<u8>>,
}

impl EncryptedRow {
    pub fn n(&self) -> usize {
        self.envelopes.len()
    }

    /// Group elements in the AOE part: `19n + 11` for stream parameters.
    pub fn group_elements(&self) -> usize {
        self.ct.group_elements()
    }

    /// `"SSS1" | version | n u32 | AOE ciphertext | n x (u32 len | envelope)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.raw(MAGIC).u8(VERSION).u32(self.n() as u32);
        self.ct.write_to(&mut w);
        for e in &self.envelopes {
            w.long_bytes(e);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.expect(MAGIC, "encrypted row")?;
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::malformed(format!("unsupported row version {version}")));
        }
        let n = r.u32()? as usize;
        let ct = CumulativeCiphertext::read_from(&mut r)?;
        let width = stream_width(ct.params()).map_err(|e| Error::malformed(e.to_string()))?;
        if width != n {
            return Err(Error::malformed(format!(
                "row header says {n} cells, ciphertext has {width}"
            )));
        }
        let envelopes = (0..n)
            .map(|_| r.long_bytes().map(<[u8]>::to_vec))
            .collect::<Result<_>>()?;
        r.finish()?;
        Ok(Self { ct, envelopes })
    }
}

/// Encrypts a row. Each cell gets a fresh random GT element `M_i`; the cell is
/// sealed under `derive_cell_key(M_i)` and `M_1..M_n` are AOE-encrypted.
pub fn encrypt_row<R: Rng + ?Sized>(
    mpk: &MasterPublicKey,
    row: &Row,
    rng: &mut R,
) -> Result<EncryptedRow> {
    let n = stream_width(mpk.params())?;
    Error::check_len("row", n, row.len())?;
    let messages: Vec<_> = (0..n).map(|_| random_gt(rng)).collect();
    let envelopes = messages
        .iter()
        .zip(row.cells())
        .map(|(m, cell)| envelope::seal(&derive_cell_key(m), cell, rng))
        .collect();
    let ct = aoe::enc(mpk, &row.attributes(), &messages, rng)?;
    Ok(EncryptedRow { ct, envelopes })
}

fn check_row_shape(erow: &EncryptedRow, params: AoeParams) -> Result<()> {
    if erow.ct.params() != params {
        return Err(Error::InvalidParams(format!(
            "token is for {}-cell rows, row has {} cells",
            params.n(),
            erow.ct.params().n()
        )));
    }
    Error::check_len("envelopes", params.n(), erow.envelopes.len())
}

/// True iff the row satisfies the token's policy (up to false positives
/// with probability about `1/p`).
pub fn select(erow: &EncryptedRow, ptoken: &PToken) -> Result<bool> {
    check_row_shape(erow, ptoken.params())?;
    erow.ct.p_dec(ptoken)
}

/// Opens cell `k`. Rows that do not satisfy the token's policy fail with
/// [`Error::DecryptionFailed`]; bad arguments fail with other variants.
pub fn decrypt_cell(erow: &EncryptedRow, mtoken: &MToken, k: usize) -> Result<Vec<u8>> {
    let n = erow.n();
    if !(1..=n).contains(&k) {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    if mtoken.k() != k {
        return Err(Error::InvalidParams(format!(
            "message token opens cell {}, not cell {k}",
            mtoken.k()
        )));
    }
    check_row_shape(erow, mtoken.params())?;
    let m = erow.ct.m_dec(mtoken)?;
    envelope::open(&derive_cell_key(&m), &erow.envelopes[k - 1])
}
