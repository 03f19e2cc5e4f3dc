//! Binary encoding helpers shared by every wire format in the crate.
//!
//! Integers are big-endian. Group elements and scalars use the backend's
//! canonical compressed encoding, each preceded by a `u16` byte length.

use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};

use crate::bilinear::{Gt, Scalar, G1, G2};
use crate::error::{Error, Result};

#[derive(Default)]
pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u16(&mut self, v: u16) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn raw(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    /// `u16` length followed by the bytes.
    pub fn short_bytes(&mut self, bytes: &[u8]) -> &mut Self {
        let len = u16::try_from(bytes.len()).expect("short field over 64 KiB");
        self.u16(len).raw(bytes)
    }

    /// `u32` length followed by the bytes.
    pub fn long_bytes(&mut self, bytes: &[u8]) -> &mut Self {
        let len = u32::try_from(bytes.len()).expect("field over 4 GiB");
        self.u32(len).raw(bytes)
    }

    fn element<T: CanonicalSerialize>(&mut self, e: &T) -> &mut Self {
        let mut bytes = Vec::with_capacity(e.compressed_size());
        e.serialize_compressed(&mut bytes)
            .expect("serializing into a Vec cannot fail");
        self.short_bytes(&bytes)
    }

    pub fn g1(&mut self, e: &G1) -> &mut Self {
        self.element(e)
    }

    pub fn g2(&mut self, e: &G2) -> &mut Self {
        self.element(e)
    }

    pub fn gt(&mut self, e: &Gt) -> &mut Self {
        self.element(e)
    }

    pub fn scalar(&mut self, e: &Scalar) -> &mut Self {
        self.element(e)
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::malformed(format!(
                "unexpected end of input at byte {} (wanted {n} more)",
                self.pos
            )));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    pub fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn expect(&mut self, magic: &[u8], what: &str) -> Result<()> {
        let got = self.take(magic.len())?;
        if got != magic {
            return Err(Error::malformed(format!("bad magic for {what}")));
        }
        Ok(())
    }

    pub fn short_bytes(&mut self) -> Result<&'a [u8]> {
        let len = self.u16()? as usize;
        self.take(len)
    }

    pub fn long_bytes(&mut self) -> Result<&'a [u8]> {
        let len = self.u32()? as usize;
        self.take(len)
    }

    fn element<T: CanonicalDeserialize>(&mut self, what: &str) -> Result<T> {
        let bytes = self.short_bytes()?;
        let mut slice = bytes;
        let e = T::deserialize_compressed(&mut slice)
            .map_err(|e| Error::malformed(format!("invalid {what} encoding: {e}")))?;
        if !slice.is_empty() {
            return Err(Error::malformed(format!("trailing bytes in {what} encoding")));
        }
        Ok(e)
    }

    pub fn g1(&mut self) -> Result<G1> {
        self.element("G1 element")
    }

    pub fn g2(&mut self) -> Result<G2> {
        self.element("G2 element")
    }

    pub fn gt(&mut self) -> Result<Gt> {
        self.element("GT element")
    }

    pub fn scalar(&mut self) -> Result<Scalar> {
        self.element("scalar")
    }

    pub fn finish(self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(Error::malformed(format!(
                "{} trailing bytes",
                self.remaining()
            )));
        }
        Ok(())
    }
}
