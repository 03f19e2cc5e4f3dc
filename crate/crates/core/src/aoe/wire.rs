//! Binary encoding of AOE values.
//!
//! ```text
//! "AOE1" | version u8 | kind u8 | n u32 | u u32 | v u32 | body
//! ```
//!
//! The body lists length-prefixed group elements and scalars in declaration
//! order; all counts follow from `(n, u, v)`. Message tokens insert `k` (u32)
//! before the body.

use super::baseline::BaselineCiphertext;
use super::keys::{Blocks, MasterPublicKey, MasterSecretKey, PublicSlot, SecretSlot};
use super::token::{MToken, PToken};
use super::{AoeParams, BasicCiphertext, CiphertextSlot, CumulativeCiphertext, TokenBlock, TokenSlot};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"AOE1";
pub const VERSION: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
enum Kind {
    PublicKey = 1,
    SecretKey = 2,
    Ciphertext = 3,
    PredicateToken = 4,
    MessageToken = 5,
    BaselineCiphertext = 6,
}

fn write_header(w: &mut Writer, kind: Kind, p: AoeParams) {
    w.raw(MAGIC)
        .u8(VERSION)
        .u8(kind as u8)
        .u32(p.n() as u32)
        .u32(p.u() as u32)
        .u32(p.v() as u32);
}

fn read_header(r: &mut Reader<'_>, kind: Kind) -> Result<AoeParams> {
    r.expect(MAGIC, "AOE value")?;
    let version = r.u8()?;
    if version != VERSION {
        return Err(Error::malformed(format!("unsupported AOE version {version}")));
    }
    let got = r.u8()?;
    if got != kind as u8 {
        return Err(Error::malformed(format!(
            "expected AOE {kind:?} (kind {}), found kind {got}",
            kind as u8
        )));
    }
    let n = r.u32()? as usize;
    let u = r.u32()? as usize;
    let v = r.u32()? as usize;
    AoeParams::new(n, u, v).map_err(|e| Error::malformed(e.to_string()))
}

fn read_blocks<T>(
    r: &mut Reader<'_>,
    p: AoeParams,
    mut slot: impl FnMut(&mut Reader<'_>) -> Result<T>,
) -> Result<Blocks<T>> {
    // Counts come from untrusted input; let the reader fail before any
    // large allocation happens.
    let mut blocks = Vec::new();
    for j in 0..=p.n() {
        let len = p.block_len(j);
        let mut branch = || (0..len).map(|_| slot(r)).collect::<Result<Vec<T>>>();
        let first = branch()?;
        let second = branch()?;
        blocks.push([first, second]);
    }
    Ok(blocks)
}

impl MasterPublicKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        write_header(&mut w, Kind::PublicKey, self.params);
        w.gt(&self.lambda).g1(&self.g).g1(&self.omega);
        for b in 0..2 {
            w.g1(&self.g_alpha[b]).g1(&self.g_beta[b]);
        }
        for pair in &self.blocks {
            for slots in pair {
                for s in slots {
                    w.g1(&s.gamma).g1(&s.delta).g1(&s.theta).g1(&s.w);
                }
            }
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let params = read_header(&mut r, Kind::PublicKey)?;
        let lambda = r.gt()?;
        let g = r.g1()?;
        let omega = r.g1()?;
        let (a0, b0) = (r.g1()?, r.g1()?);
        let (a1, b1) = (r.g1()?, r.g1()?);
        let blocks = read_blocks(&mut r, params, |r| {
            Ok(PublicSlot {
                gamma: r.g1()?,
                delta: r.g1()?,
                theta: r.g1()?,
                w: r.g1()?,
            })
        })?;
        r.finish()?;
        Ok(Self {
            params,
            lambda,
            g,
            omega,
            g_alpha: [a0, a1],
            g_beta: [b0, b1],
            blocks,
        })
    }
}

impl MasterSecretKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        write_header(&mut w, Kind::SecretKey, self.params);
        for b in 0..2 {
            w.scalar(&self.alpha[b]).scalar(&self.beta[b]);
        }
        w.scalar(&self.omega).g1(&self.g).g2(&self.g2).g2(&self.g_hat);
        for pair in &self.blocks {
            for slots in pair {
                for s in slots {
                    w.scalar(&s.gamma)
                        .scalar(&s.delta)
                        .scalar(&s.theta)
                        .scalar(&s.omega);
                }
            }
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let params = read_header(&mut r, Kind::SecretKey)?;
        let (a0, b0) = (r.scalar()?, r.scalar()?);
        let (a1, b1) = (r.scalar()?, r.scalar()?);
        let omega = r.scalar()?;
        let g = r.g1()?;
        let g2 = r.g2()?;
        let g_hat = r.g2()?;
        let blocks = read_blocks(&mut r, params, |r| {
            Ok(SecretSlot {
                gamma: r.scalar()?,
                delta: r.scalar()?,
                theta: r.scalar()?,
                omega: r.scalar()?,
            })
        })?;
        r.finish()?;
        Ok(Self {
            params,
            alpha: [a0, a1],
            beta: [b0, b1],
            omega,
            g,
            g2,
            g_hat,
            blocks,
        })
    }
}

fn write_basic(w: &mut Writer, ct: &BasicCiphertext) {
    w.g1(&ct.a).g1(&ct.b).gt(&ct.c);
    for s in &ct.slots {
        w.g1(&s.d[0]).g1(&s.e[0]).g1(&s.d[1]).g1(&s.e[1]);
    }
}

fn read_basic(r: &mut Reader<'_>, len: usize) -> Result<BasicCiphertext> {
    let a = r.g1()?;
    let b = r.g1()?;
    let c = r.gt()?;
    let slots = (0..len)
        .map(|_| {
            let (d0, e0, d1, e1) = (r.g1()?, r.g1()?, r.g1()?, r.g1()?);
            Ok(CiphertextSlot {
                d: [d0, d1],
                e: [e0, e1],
            })
        })
        .collect::<Result<_>>()?;
    Ok(BasicCiphertext { a, b, c, slots })
}

fn write_token_block(w: &mut Writer, t: &TokenBlock) {
    w.g2(&t.f).g2(&t.h);
    for s in &t.slots {
        w.g2(&s.k[0]).g2(&s.l[0]).g2(&s.k[1]).g2(&s.l[1]);
    }
}

fn read_token_block(r: &mut Reader<'_>, len: usize) -> Result<TokenBlock> {
    let f = r.g2()?;
    let h = r.g2()?;
    let slots = (0..len)
        .map(|_| {
            let (k0, l0, k1, l1) = (r.g2()?, r.g2()?, r.g2()?, r.g2()?);
            Ok(TokenSlot {
                k: [k0, k1],
                l: [l0, l1],
            })
        })
        .collect::<Result<_>>()?;
    Ok(TokenBlock { f, h, slots })
}

impl CumulativeCiphertext {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write_to(&mut w);
        w.finish()
    }

    pub(crate) fn write_to(&self, w: &mut Writer) {
        write_header(w, Kind::Ciphertext, self.params);
        for b in &self.blocks {
            write_basic(w, b);
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let ct = Self::read_from(&mut r)?;
        r.finish()?;
        Ok(ct)
    }

    pub(crate) fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        let params = read_header(r, Kind::Ciphertext)?;
        let blocks = (0..=params.n())
            .map(|j| read_basic(r, params.block_len(j)))
            .collect::<Result<_>>()?;
        Ok(Self { params, blocks })
    }
}

impl BaselineCiphertext {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        write_header(&mut w, Kind::BaselineCiphertext, self.params);
        for c in &self.cells {
            write_basic(&mut w, c);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let params = read_header(&mut r, Kind::BaselineCiphertext)?;
        let len = params.u() + params.v() + 1;
        let cells = (0..params.n())
            .map(|_| read_basic(&mut r, len))
            .collect::<Result<_>>()?;
        r.finish()?;
        Ok(Self { params, cells })
    }
}

impl PToken {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        write_header(&mut w, Kind::PredicateToken, self.params);
        write_token_block(&mut w, &self.block);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let params = read_header(&mut r, Kind::PredicateToken)?;
        let block = read_token_block(&mut r, params.block_len(0))?;
        r.finish()?;
        Ok(Self { params, block })
    }
}

impl MToken {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        write_header(&mut w, Kind::MessageToken, self.params);
        w.u32(self.k as u32);
        write_token_block(&mut w, &self.shared);
        write_token_block(&mut w, &self.specific);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let params = read_header(&mut r, Kind::MessageToken)?;
        let k = r.u32()? as usize;
        params
            .check_index(k)
            .map_err(|e| Error::malformed(e.to_string()))?;
        let shared = read_token_block(&mut r, params.block_len(0))?;
        let specific = read_token_block(&mut r, params.block_len(k))?;
        r.finish()?;
        Ok(Self {
            params,
            k,
            shared,
            specific,
        })
    }
}
