//! Fixed-width bit strings.
//!
//! Bit 0 is the least significant bit of word 0. Widths are part of the
//! value: equality, hashing and ordering all include the width, and the
//! arithmetic helpers refuse mismatched widths so that protocol messages
//! stay bit-exact.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Bits {
    pub fn zero(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; word_count(len)],
        }
    }

    /// Low `len` bits of `value`; panics if `value` does not fit.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 width {len} > 64");
        assert!(
            len == 64 || value < (1u64 << len),
            "value {value:#x} does not fit in {len} bits"
        );
        let mut b = Bits::zero(len);
        if len > 0 {
            b.words[0] = value;
        }
        b
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        let mut b = Bits::zero(len);
        for w in &mut b.words {
            *w = rng.gen();
        }
        b.mask_top();
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Value as a u64; panics if wider than 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 on {} bits", self.len);
        if self.len == 0 {
            0
        } else {
            self.words[0]
        }
    }

    pub fn xor_assign(&mut self, other: &Bits) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch(self.len, other.len));
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn xor(&self, other: &Bits) -> Result<Bits> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// Parity of the AND of the two strings: the F2 inner product core.
    pub fn and_parity(&self, other: &Bits) -> Result<bool> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch(self.len, other.len));
        }
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        Ok(acc.count_ones() % 2 == 1)
    }

    /// `other` occupies the high-order positions of the result.
    pub fn concat(&self, other: &Bits) -> Bits {
        let mut out = Bits::zero(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        let word_off = self.len / 64;
        let bit_off = self.len % 64;
        for (i, &w) in other.words.iter().enumerate() {
            out.words[word_off + i] |= w << bit_off;
            if bit_off > 0 && word_off + i + 1 < out.words.len() {
                out.words[word_off + i + 1] |= w >> (64 - bit_off);
            }
        }
        out.mask_top();
        out
    }

    /// Bits `[lo, lo + len)` as a new string.
    pub fn slice(&self, lo: usize, len: usize) -> Bits {
        assert!(lo + len <= self.len);
        let mut out = Bits::zero(len);
        let word_off = lo / 64;
        let bit_off = lo % 64;
        for w in 0..out.words.len() {
            let mut v = self.words.get(word_off + w).copied().unwrap_or(0) >> bit_off;
            if bit_off > 0 {
                if let Some(&hi) = self.words.get(word_off + w + 1) {
                    v |= hi << (64 - bit_off);
                }
            }
            out.words[w] = v;
        }
        out.mask_top();
        out
    }

    /// Low `m` bits.
    pub fn low(&self, m: usize) -> Bits {
        self.slice(0, m)
    }

    /// Cyclic rotation towards higher bit positions by one.
    pub fn rotate_up(&self) -> Bits {
        let mut out = Bits::zero(self.len);
        if self.len == 0 {
            return out;
        }
        let top = self.get(self.len - 1);
        let mut carry = 0u64;
        for (i, &w) in self.words.iter().enumerate() {
            out.words[i] = (w << 1) | carry;
            carry = w >> 63;
        }
        out.mask_top();
        out.set(0, top);
        out
    }

    /// Zero-extend to `len` bits (no-op when already that wide).
    pub fn zero_extend(&self, len: usize) -> Bits {
        assert!(len >= self.len);
        let mut out = Bits::zero(len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        out
    }

    /// Interpret `chunk` ell-bit little-endian chunks as u64 values.
    pub fn chunks_u64(&self, ell: usize) -> Vec<u64> {
        assert!(ell > 0 && ell <= 64 && self.len.is_multiple_of(ell));
        (0..self.len / ell)
            .map(|j| self.slice(j * ell, ell).to_u64())
            .collect()
    }

    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.len.div_ceil(4));
        for nibble in (0..self.len.div_ceil(4)).rev() {
            let mut v = 0u8;
            for b in 0..4 {
                let i = nibble * 4 + b;
                if i < self.len && self.get(i) {
                    v |= 1 << b;
                }
            }
            s.push(char::from_digit(v as u32, 16).unwrap());
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Bits> {
        let mut out = Bits::zero(len);
        let digits: Vec<u8> = hex
            .chars()
            .rev()
            .map(|c| {
                c.to_digit(16)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidParam(format!("bad hex digit {c:?}")))
            })
            .collect::<Result<_>>()?;
        for (nibble, &v) in digits.iter().enumerate() {
            for b in 0..4 {
                if v >> b & 1 == 1 {
                    let i = nibble * 4 + b;
                    if i >= len {
                        return Err(Error::InvalidParam(format!(
                            "hex value does not fit in {len} bits"
                        )));
                    }
                    out.set(i, true);
                }
            }
        }
        Ok(out)
    }

    fn mask_top(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits[{}]({})", self.len, self.to_hex())
    }
}

#[derive(Serialize, Deserialize)]
struct BitsRepr {
    bits: usize,
    hex: String,
}

impl Serialize for Bits {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BitsRepr {
            bits: self.len,
            hex: self.to_hex(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BitsRepr::deserialize(d)?;
        Bits::from_hex(&r.hex, r.bits).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_puts_second_argument_high() {
        let a = Bits::from_u64(0b01, 2);
        let b = Bits::from_u64(0b1, 1);
        assert_eq!(a.concat(&b).to_u64(), 0b101);
    }

    #[test]
    fn and_parity_counts_shared_ones() {
        // 1011 & 1110 = 1010: even parity.
        let a = Bits::from_u64(0b1011, 4);
        let b = Bits::from_u64(0b1110, 4);
        assert!(!a.and_parity(&b).unwrap());
        assert_eq!(
            a.and_parity(&Bits::zero(3)).unwrap_err(),
            Error::DimensionMismatch(4, 3)
        );
    }

    #[test]
    fn hex_round_trip_across_word_boundary() {
        let mut b = Bits::zero(130);
        b.set(0, true);
        b.set(64, true);
        b.set(129, true);
        let h = b.to_hex();
        assert_eq!(Bits::from_hex(&h, 130).unwrap(), b);
    }

    #[test]
    fn rotate_up_wraps() {
        let b = Bits::from_u64(0b100, 3);
        assert_eq!(b.rotate_up().to_u64(), 0b001);
    }
}
