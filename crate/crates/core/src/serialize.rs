//! Binary container for ciphertexts and keys.
//!
//! Layout: the magic `MDHA`, a `u16` format version, a `u16` payload kind,
//! the `u64` parameter fingerprint, then little-endian `u64` words. Polynomials
//! are written limb-major as full-length evaluation vectors. Key-switching
//! keys carry only their seed and secret component.

use std::io::{Read, Write};

use crate::heaan::{Ciphertext, LimbPoly, RnsPoly};
use crate::keys::{EvalKeys, KeySwitchKey, PublicKey, SecretKey};
use crate::params::{Context, DegreeMode};
use crate::scale::Scale;
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"MDHA";
pub const VERSION: u16 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u16)]
pub enum Kind {
    Ciphertext = 1,
    SecretKey = 2,
    PublicKey = 3,
    EvalKeys = 4,
}

impl Kind {
    fn from_u16(v: u16) -> Result<Self> {
        Ok(match v {
            1 => Kind::Ciphertext,
            2 => Kind::SecretKey,
            3 => Kind::PublicKey,
            4 => Kind::EvalKeys,
            _ => return Err(Error::Malformed(format!("unknown payload kind {v}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Ciphertext => "ciphertext",
            Kind::SecretKey => "secret key",
            Kind::PublicKey => "public key",
            Kind::EvalKeys => "evaluation keys",
        }
    }
}

/// Fixed-size prefix of every file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub version: u16,
    pub kind: Kind,
    pub fingerprint: u64,
}

impl Header {
    pub const LEN: usize = 16;

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < Self::LEN || &bytes[..4] != MAGIC {
            return Err(Error::Malformed("missing MDHA magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(Error::VersionMismatch { expected: VERSION, found: version });
        }
        let kind = Kind::from_u16(u16::from_le_bytes([bytes[6], bytes[7]]))?;
        let fingerprint = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
        Ok(Self { version, kind, fingerprint })
    }
}

struct Writer<W> {
    inner: W,
}

impl<W: Write> Writer<W> {
    fn header(ctx: &Context, kind: Kind, mut inner: W) -> Result<Self> {
        inner.write_all(MAGIC)?;
        inner.write_all(&VERSION.to_le_bytes())?;
        inner.write_all(&(kind as u16).to_le_bytes())?;
        inner.write_all(&ctx.fingerprint().to_le_bytes())?;
        Ok(Self { inner })
    }

    fn word(&mut self, w: u64) -> Result<()> {
        self.inner.write_all(&w.to_le_bytes())?;
        Ok(())
    }

    fn words(&mut self, ws: &[u64]) -> Result<()> {
        let mut buf = Vec::with_capacity(ws.len() * 8);
        ws.iter().for_each(|w| buf.extend_from_slice(&w.to_le_bytes()));
        self.inner.write_all(&buf)?;
        Ok(())
    }

    fn poly(&mut self, p: &RnsPoly) -> Result<()> {
        self.word(p.len() as u64)?;
        for limb in p.limbs() {
            self.words(&limb.eval_data())?;
        }
        Ok(())
    }
}

struct Reader<'a> {
    ctx: &'a Context,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn open(ctx: &'a Context, bytes: &'a [u8], kind: Kind) -> Result<Self> {
        let h = Header::parse(bytes)?;
        if h.kind != kind {
            return Err(Error::Malformed(format!("expected a {}, found a {}", kind.name(), h.kind.name())));
        }
        if h.fingerprint != ctx.fingerprint() {
            return Err(Error::Mismatch(format!(
                "file was written for parameters {:016x}, context is {:016x}",
                h.fingerprint,
                ctx.fingerprint()
            )));
        }
        Ok(Self { ctx, bytes, pos: Header::LEN })
    }

    fn word(&mut self) -> Result<u64> {
        let end = self.pos + 8;
        let chunk = self.bytes.get(self.pos..end).ok_or_else(|| Error::Malformed("truncated file".into()))?;
        self.pos = end;
        Ok(u64::from_le_bytes(chunk.try_into().expect("8 bytes")))
    }

    fn count(&mut self, limit: usize) -> Result<usize> {
        let v = self.word()?;
        if v > limit as u64 {
            return Err(Error::Malformed(format!("count {v} exceeds {limit}")));
        }
        Ok(v as usize)
    }

    fn words(&mut self, n: usize) -> Result<Vec<u64>> {
        (0..n).map(|_| self.word()).collect()
    }

    /// Limbs are on extended indices `0..len-1` then `last`.
    fn poly(&mut self, last_is_special: bool) -> Result<RnsPoly> {
        let ctx = self.ctx;
        let len = self.count(ctx.max_level() + 1)?;
        let limbs = (0..len)
            .map(|k| {
                let j = if last_is_special && k + 1 == len { ctx.special_index() } else { k };
                let data = self.words(ctx.degree())?;
                LimbPoly::from_eval(ctx.ring(j), data, ctx.mode())
            })
            .collect::<Result<_>>()?;
        RnsPoly::new(limbs)
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Malformed(format!("{} trailing bytes", self.bytes.len() - self.pos)));
        }
        Ok(())
    }
}

fn mode_word(mode: DegreeMode) -> u64 {
    match mode {
        DegreeMode::Native => 0,
        DegreeMode::Split => 1,
    }
}

pub fn write_ciphertext(ctx: &Context, ct: &Ciphertext, out: impl Write) -> Result<()> {
    let mut w = Writer::header(ctx, Kind::Ciphertext, out)?;
    w.word(mode_word(ct.mode()))?;
    w.word(ct.parts().len() as u64)?;
    w.word(ct.scale().numerator().len() as u64)?;
    w.words(ct.scale().numerator())?;
    w.word(ct.scale().denominator().len() as u64)?;
    w.words(ct.scale().denominator())?;
    for p in ct.parts() {
        w.poly(p)?;
    }
    Ok(())
}

pub fn read_ciphertext(ctx: &Context, bytes: &[u8]) -> Result<Ciphertext> {
    let mut r = Reader::open(ctx, bytes, Kind::Ciphertext)?;
    if r.word()? != mode_word(ctx.mode()) {
        return Err(Error::Mismatch("ciphertext degree mode differs from the context".into()));
    }
    let parts = r.count(3)?;
    let nn = r.count(4096)?;
    let num = r.words(nn)?;
    let nd = r.count(4096)?;
    let den = r.words(nd)?;
    let polys = (0..parts).map(|_| r.poly(false)).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Ciphertext::new(polys, Scale::from_factors(num, den))
}

pub fn write_secret_key(ctx: &Context, sk: &SecretKey, out: impl Write) -> Result<()> {
    let mut w = Writer::header(ctx, Kind::SecretKey, out)?;
    w.words(&sk.coeffs().iter().map(|&c| c as u64).collect::<Vec<_>>())
}

pub fn read_secret_key(ctx: &Context, bytes: &[u8]) -> Result<SecretKey> {
    let mut r = Reader::open(ctx, bytes, Kind::SecretKey)?;
    let coeffs = r.words(ctx.degree())?.into_iter().map(|w| w as i64).collect();
    r.finish()?;
    SecretKey::from_coeffs(ctx, coeffs)
}

pub fn write_public_key(ctx: &Context, pk: &PublicKey, out: impl Write) -> Result<()> {
    let mut w = Writer::header(ctx, Kind::PublicKey, out)?;
    w.poly(&pk.b)?;
    w.poly(&pk.a)
}

pub fn read_public_key(ctx: &Context, bytes: &[u8]) -> Result<PublicKey> {
    let mut r = Reader::open(ctx, bytes, Kind::PublicKey)?;
    let b = r.poly(false)?;
    let a = r.poly(false)?;
    r.finish()?;
    Ok(PublicKey { b, a })
}

pub fn write_eval_keys(ctx: &Context, keys: &EvalKeys, out: impl Write) -> Result<()> {
    let mut w = Writer::header(ctx, Kind::EvalKeys, out)?;
    let all: Vec<&KeySwitchKey> = keys.all().collect();
    w.word(all.len() as u64)?;
    for k in all {
        w.word(k.seed())?;
        w.word(u64::from(k.tag()))?;
        w.word(k.digits() as u64)?;
        for digit in k.secret_parts() {
            w.poly(digit)?;
        }
    }
    Ok(())
}

pub fn read_eval_keys(ctx: &Context, bytes: &[u8]) -> Result<EvalKeys> {
    let mut r = Reader::open(ctx, bytes, Kind::EvalKeys)?;
    let count = r.count(1 << 16)?;
    let mut keys = EvalKeys::default();
    for _ in 0..count {
        let seed = r.word()?;
        let tag = u32::try_from(r.word()?).map_err(|_| Error::Malformed("key tag too large".into()))?;
        let digits = r.count(ctx.max_level())?;
        let secret = (0..digits).map(|_| r.poly(true)).collect::<Result<Vec<_>>>()?;
        keys.insert(KeySwitchKey::from_secret(ctx, seed, tag, secret)?);
    }
    r.finish()?;
    Ok(keys)
}

/// Reads a whole file and returns its header.
pub fn peek(path: &std::path::Path) -> Result<(Header, Vec<u8>)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    Ok((Header::parse(&bytes)?, bytes))
}
