//! Protocol parameter sets.
//!
//! The width formulas of the 2-round protocol assume the security parameter
//! is a vanishing fraction of the secret length; none of the desk presets
//! can satisfy them literally (e.g. the MAC key formula 2^C * 6s already
//! exceeds n at every runnable size). Presets therefore keep the structural
//! ratios (key = 2 * tag, halving V widths, sum of V widths below the MAC
//! key, nm output above every V width) and shrink absolute widths to what
//! the extractors can serve; each deviation is recorded in `relaxations`
//! and printed by the harness. `paper_widths` evaluates the verbatim
//! formulas for reports and bound tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nmext::NmExtractor;

/// The verbatim width formulas, for reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperWidths {
    pub y1: usize,
    pub y2: usize,
    pub y3: usize,
    pub z: usize,
    pub tag: usize,
    pub m_prime: usize,
    pub v_widths: Vec<usize>,
}

pub fn paper_widths(s: usize, c: usize, d: usize, d_nm: usize) -> PaperWidths {
    let mx = d.max(d_nm);
    PaperWidths {
        y1: mx,
        y2: 4 * c * d + 31 * mx + 4 * s,
        y3: 30 * mx + 3 * s,
        z: (1 << c) * 6 * s,
        tag: (1 << c) * 3 * s,
        m_prime: 6 * (1 << c) * s,
        v_widths: (1..=c).map(|i| (1 << (c - i)) * 2 * s).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub name: String,
    /// Secret length.
    pub n: usize,
    /// Default promised min-entropy of the secret.
    pub k: u32,
    /// Auxiliary security parameter.
    pub s: usize,
    /// Condenser row count.
    pub c: usize,
    /// Seed width of the seeded extractor (widths of S_i, R_i, W).
    pub d: usize,
    /// Bits of each condensed row fed to the non-malleable extractor.
    pub nm_window: usize,
    /// Non-malleable extractor seed width, nm_window/2 - 1.
    pub d_nm: usize,
    /// Non-malleable extractor output width.
    pub m_prime: usize,
    /// MAC tag width v; the key Z has 2v bits.
    pub tag_bits: usize,
    pub z_bits: usize,
    pub v_widths: Vec<usize>,
    pub y1_bits: usize,
    pub y2_bits: usize,
    pub y3_bits: usize,
    /// Width of W / W'; equals d.
    pub w_bits: usize,
    /// Final key width.
    pub key_bits: usize,
    pub relaxations: Vec<String>,
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParam(m));
        if self.c == 0 || !self.n.is_multiple_of(self.c) {
            return fail(format!("{} rows do not divide n = {}", self.c, self.n));
        }
        let row = self.n / self.c;
        if self.nm_window > row || !self.nm_window.is_multiple_of(2) || self.nm_window / 2 > 64 {
            return fail(format!("nm window {} invalid for row width {row}", self.nm_window));
        }
        if self.d_nm != self.nm_window / 2 - 1 {
            return fail("d_nm must be nm_window/2 - 1".into());
        }
        if self.d == 0 || self.d > 64 {
            return fail(format!("seed width d = {} not in 1..=64", self.d));
        }
        if self.y1_bits != self.d.max(self.d_nm) {
            return fail("|Y1| must be max(d, d_nm)".into());
        }
        if self.z_bits != 2 * self.tag_bits {
            return fail("MAC key must be twice the tag width".into());
        }
        if self.z_bits > self.y1_bits || self.z_bits > self.n {
            return fail("|Z| exceeds what Ext(X; Y1) can output".into());
        }
        if self.v_widths.len() != self.c {
            return fail("one V width per condenser row".into());
        }
        let vsum: usize = self.v_widths.iter().sum();
        if vsum >= self.z_bits {
            return fail("sum of V widths must stay below |Z|".into());
        }
        for w in 0..self.c {
            let vi = self.v_widths[w];
            if vi == 0 || vi > self.d || vi > self.m_prime {
                return fail(format!("V width {vi} outside extractor budget"));
            }
            if w + 1 < self.c && vi != 2 * self.v_widths[w + 1] {
                return fail("V widths must halve".into());
            }
        }
        if self.m_prime == 0 || self.m_prime > self.nm_window / 2 {
            return fail(format!("nm output {} above field width", self.m_prime));
        }
        if self.w_bits != self.d {
            return fail("W must be a fresh d-bit seed".into());
        }
        if self.key_bits == 0 || self.key_bits > self.d || self.key_bits > self.n {
            return fail(format!("key width {} outside extractor budget", self.key_bits));
        }
        if self.tag_bits == 0 || self.tag_bits > 64 {
            return fail("tag width must be in 1..=64".into());
        }
        Ok(())
    }

    pub fn randomness_bits_alice(&self) -> usize {
        self.y1_bits + self.y2_bits + self.y3_bits
    }

    pub fn randomness_bits_bob(&self) -> usize {
        self.w_bits
    }

    /// n = 12: every structural check runs exhaustively (17 bits of party
    /// randomness in total).
    pub fn micro() -> Self {
        ProtocolParams {
            name: "micro".into(),
            n: 12,
            k: 8,
            s: 1,
            c: 1,
            d: 4,
            nm_window: 12,
            d_nm: 5,
            m_prime: 6,
            tag_bits: 2,
            z_bits: 4,
            v_widths: vec![2],
            y1_bits: 5,
            y2_bits: 4,
            y3_bits: 4,
            w_bits: 4,
            key_bits: 4,
            relaxations: vec![
                "|Y2|, |Y3| cut to d bits so the full randomness space enumerates".into(),
                "|Z| = 4 and tag = 2 in place of 2^C*6s / 2^C*3s, which exceed |Y1|".into(),
                "m' = 6 capped by the nm field width n/(2C)".into(),
            ],
        }
    }

    /// n = 64: the Monte-Carlo robustness preset.
    pub fn small() -> Self {
        ProtocolParams {
            name: "small".into(),
            n: 64,
            k: 48,
            s: 4,
            c: 2,
            d: 24,
            nm_window: 32,
            d_nm: 15,
            m_prime: 12,
            tag_bits: 12,
            z_bits: 24,
            v_widths: vec![4, 2],
            y1_bits: 24,
            y2_bits: 952,
            y3_bits: 732,
            w_bits: 24,
            key_bits: 16,
            relaxations: vec![
                "|Z| = 24 and tag = 12 in place of 96/48, which exceed |Y1| and n".into(),
                "V widths use unit 2 in place of 2s = 8 so their sum stays below the tag".into(),
                "m' = 12 capped by the nm field width".into(),
            ],
        }
    }

    /// n = 1024: exercises the wide-row path (rows truncated to a 128-bit
    /// nm window).
    pub fn demo() -> Self {
        ProtocolParams {
            name: "demo".into(),
            n: 1024,
            k: 768,
            s: 16,
            c: 4,
            d: 64,
            nm_window: 128,
            d_nm: 63,
            m_prime: 48,
            tag_bits: 24,
            z_bits: 48,
            v_widths: vec![8, 4, 2, 1],
            y1_bits: 64,
            y2_bits: 3072,
            y3_bits: 1968,
            w_bits: 64,
            key_bits: 32,
            relaxations: vec![
                "nm window 128 < row width 256: rows truncated to the field cap".into(),
                "|Z| = 48 and tag = 24 in place of 1536/768, which exceed |Y1|".into(),
                "V widths use unit 1 in place of 2s = 32".into(),
                "m' = 48 in place of 6*2^C*s = 1536".into(),
            ],
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "micro" => Ok(Self::micro()),
            "small" => Ok(Self::small()),
            "demo" => Ok(Self::demo()),
            other => Err(Error::InvalidParam(format!("unknown preset {other:?}"))),
        }
    }
}

/// Validated parameters plus the instantiated non-malleable extractor slot
/// (multibit over the rate->1/2 construction; pluggable by swapping here).
#[derive(Debug, Clone)]
pub struct ProtocolInstance {
    pub params: ProtocolParams,
    pub nm: NmExtractor,
}

impl ProtocolInstance {
    pub fn new(params: ProtocolParams) -> Result<Self> {
        params.validate()?;
        let base = NmExtractor::half(params.nm_window)?;
        let nm = NmExtractor::multibit(base, params.m_prime)?;
        Ok(ProtocolInstance { params, nm })
    }
}
