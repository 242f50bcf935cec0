//! Alice and Bob state machines for the 2-round protocol.
//!
//! Both parties derive the same tuple from the secret and the round-1 seeds:
//! the MAC key Z, the nm-extracted rows, and the look-ahead values V. Bob
//! authenticates his fresh seed W' with the MAC and ships V'; Alice accepts
//! only if the tag verifies and V matches bit for bit. Bob has no check of
//! his own and always finishes with a key.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::extractors::{somewhere_condense, strong_seeded_ext, CondenserPlan};

use super::alt::look_ahead_ext;
use super::mac::mac_tag;
use super::params::ProtocolInstance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Msg1 {
    pub y1: Bits,
    pub y2: Bits,
    pub y3: Bits,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Msg2 {
    pub w: Bits,
    pub t: Bits,
    pub v: Vec<Bits>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartyOutcome {
    Accept { key: Bits },
    Reject,
}

impl PartyOutcome {
    pub fn key(&self) -> Option<&Bits> {
        match self {
            PartyOutcome::Accept { key } => Some(key),
            PartyOutcome::Reject => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AliceState {
    x: Bits,
    y1: Bits,
    y2: Bits,
    y3: Bits,
}

/// Deterministic-stream randomness: parties draw fixed-width strings, so a
/// session replays exactly from its RNG seed, and exhaustive mode can feed
/// explicit bit assignments instead.
pub trait RandSource {
    fn take(&mut self, bits: usize) -> Result<Bits>;
}

pub struct RngRand<R: Rng>(pub R);

impl<R: Rng> RandSource for RngRand<R> {
    fn take(&mut self, bits: usize) -> Result<Bits> {
        Ok(Bits::random(&mut self.0, bits))
    }
}

/// Fixed buffer of bits; errors once exhausted.
pub struct ExactRand {
    bits: Bits,
    pos: usize,
}

impl ExactRand {
    pub fn new(bits: Bits) -> Self {
        ExactRand { bits, pos: 0 }
    }
}

impl RandSource for ExactRand {
    fn take(&mut self, n: usize) -> Result<Bits> {
        if self.pos + n > self.bits.len() {
            return Err(Error::InsufficientRandomness {
                needed: self.pos + n - self.bits.len(),
            });
        }
        let out = self.bits.slice(self.pos, n);
        self.pos += n;
        Ok(out)
    }
}

/// The shared derivation: Z = Ext(X; Y1), rows through the nm slot, V from
/// the look-ahead extractor.
pub struct Derived {
    pub z: Bits,
    pub xbar: Vec<Bits>,
    pub v: Vec<Bits>,
}

pub fn derive(inst: &ProtocolInstance, x: &Bits, y1: &Bits, y2: &Bits, y3: &Bits) -> Result<Derived> {
    let p = &inst.params;
    if x.len() != p.n {
        return Err(Error::WidthMismatch { what: "secret", expected: p.n, got: x.len() });
    }
    if y1.len() != p.y1_bits {
        return Err(Error::WidthMismatch { what: "Y1", expected: p.y1_bits, got: y1.len() });
    }
    let z = strong_seeded_ext(x, y1, p.z_bits)?;
    let plan = CondenserPlan { rows: p.c, promised_rate: 0.9 };
    let rows = somewhere_condense(x, &plan)?.rows;
    let nm_seed = y1.slice(0, p.d_nm).to_u64();
    let mut xbar = Vec::with_capacity(p.c);
    for row in &rows {
        let windowed = row.low(p.nm_window);
        let out = inst.nm.eval(&windowed, nm_seed)?;
        xbar.push(Bits::from_u64(out, p.m_prime));
    }
    let v = look_ahead_ext(x, &xbar, y2, y3, &inst.params)?;
    Ok(Derived { z, xbar, v })
}

pub fn alice_round1(
    x: &Bits,
    rand: &mut dyn RandSource,
    inst: &ProtocolInstance,
) -> Result<(Msg1, AliceState)> {
    let p = &inst.params;
    if x.len() != p.n {
        return Err(Error::WidthMismatch { what: "secret", expected: p.n, got: x.len() });
    }
    let y1 = rand.take(p.y1_bits)?;
    let y2 = rand.take(p.y2_bits)?;
    let y3 = rand.take(p.y3_bits)?;
    let msg = Msg1 { y1: y1.clone(), y2: y2.clone(), y3: y3.clone() };
    Ok((msg, AliceState { x: x.clone(), y1, y2, y3 }))
}

/// Bob's full round: derive from the received seeds, sample W', tag it,
/// answer with (W', T', V'), and settle on Ext(X; W'). Bob never rejects.
pub fn bob_round(
    x: &Bits,
    recv: &Msg1,
    rand: &mut dyn RandSource,
    inst: &ProtocolInstance,
) -> Result<(Msg2, PartyOutcome)> {
    let p = &inst.params;
    let der = derive(inst, x, &recv.y1, &recv.y2, &recv.y3)?;
    let w = rand.take(p.w_bits)?;
    let t = mac_tag(&der.z, &w, p.tag_bits)?;
    let key = strong_seeded_ext(x, &w, p.key_bits)?;
    Ok((Msg2 { w, t, v: der.v }, PartyOutcome::Accept { key }))
}

/// Alice recomputes everything and accepts only on a verified tag and a
/// bit-exact V match.
pub fn alice_finalize(
    state: &AliceState,
    recv: &Msg2,
    inst: &ProtocolInstance,
) -> Result<PartyOutcome> {
    let p = &inst.params;
    if recv.w.len() != p.w_bits || recv.t.len() != p.tag_bits || recv.v.len() != p.c {
        return Ok(PartyOutcome::Reject);
    }
    let der = derive(inst, &state.x, &state.y1, &state.y2, &state.y3)?;
    let expected_tag = mac_tag(&der.z, &recv.w, p.tag_bits)?;
    if expected_tag != recv.t || der.v != recv.v {
        return Ok(PartyOutcome::Reject);
    }
    let key = strong_seeded_ext(&state.x, &recv.w, p.key_bits)?;
    Ok(PartyOutcome::Accept { key })
}
