//! Non-malleable extractor constructions and the reduction from
//! non-malleable to two-source extractors.
//!
//! Every GF(2) construction here is the inner product of an encoded source
//! against a BCH parity-check seed column, possibly scaled by basis elements
//! for multi-bit output or widened to higher-degree columns for shorter
//! seeds. The F_p variant pairs quadratic encodings with range reduction.
//! Seeds are dense indices into the encoding's embedded domain.

use crate::bits::Bits;
use crate::codes::{enc_source_exp, EmbedMode, SeedEncoding};
use crate::error::{Error, Result};
use crate::extractors::{ip_f2, reduce_mod, somewhere_condense, CondenserPlan};
use crate::fields::{fp_find_prime, FpCtx, Gf2Ctx};

/// Pluggable source encoding f(X) for the IP(f(X), Enc(Y)) shape.
#[derive(Debug, Clone)]
pub enum SourceEnc {
    /// f(x) = x.
    Identity,
    /// f(x) = (x, g^x) over the given field.
    Exp { ctx: Gf2Ctx, g: u64 },
}

impl SourceEnc {
    pub fn apply(&self, x: &Bits) -> Result<Bits> {
        match self {
            SourceEnc::Identity => Ok(x.clone()),
            SourceEnc::Exp { ctx, g } => {
                if x.len() > ctx.ell() as usize {
                    return Err(Error::WidthMismatch {
                        what: "exponential source encoding input",
                        expected: ctx.ell() as usize,
                        got: x.len(),
                    });
                }
                enc_source_exp(x.to_u64(), ctx, *g)
            }
        }
    }

    pub fn out_width(&self, in_width: usize) -> usize {
        match self {
            SourceEnc::Identity => in_width,
            SourceEnc::Exp { ctx, .. } => 2 * ctx.ell() as usize,
        }
    }
}

/// ceil(n^0.525) + 1 window for the prime used by the exponential encoding.
fn prime_near(n: usize) -> Result<u64> {
    let hi = n as f64 + (n as f64).powf(0.525).ceil() + 1.0;
    fp_find_prime(n as u64, hi as u64)
}

#[derive(Debug, Clone)]
pub enum NmExtractor {
    /// IP(x, (z, z^3)) over GF(2^(n/2)); for sources with entropy rate
    /// above one half.
    Half { n: usize, enc: SeedEncoding },
    /// IP((x, g^x), (z, z^3)) over GF(2^p) with p the prime just above n;
    /// the below-half-rate construction.
    Below {
        n: usize,
        ctx: Gf2Ctx,
        g: u64,
        enc: SeedEncoding,
    },
    /// ((x*y + x^2*y^2) mod p) mod M over F_p with 2^n < p < 2^(n+1).
    FpQuad { n: usize, fp: FpCtx, m_bits: usize },
    /// Bit i = IP(f(x), (b_i z, b_i z^3)) over the monomial basis.
    Multibit { base: Box<NmExtractor>, m: usize },
    /// IP((x, g^x), (z, z^3, ..., z^(4t-1)) zero-padded to 2p bits), over
    /// the width-(p/t) field: the short-seed construction.
    ReducedSeed {
        n: usize,
        ctx: Gf2Ctx,
        g: u64,
        t: u32,
        enc: SeedEncoding,
    },
    /// IP(f(x), Enc_r(y)): the generic r-adversary shape.
    GenericR {
        n: usize,
        f: SourceEnc,
        enc: SeedEncoding,
    },
}

impl NmExtractor {
    pub fn half(n: usize) -> Result<Self> {
        Self::half_with_embed(n, EmbedMode::TopBit)
    }

    pub fn half_with_embed(n: usize, embed: EmbedMode) -> Result<Self> {
        if !n.is_multiple_of(2) || n < 4 {
            return Err(Error::InvalidParam(format!("half construction needs even n >= 4, got {n}")));
        }
        let ell = (n / 2) as u32;
        if ell > 64 {
            return Err(Error::InvalidParam(format!("field width {ell} above the 64-bit cap")));
        }
        let enc = SeedEncoding::new(Gf2Ctx::new(ell), 1, embed)?;
        Ok(NmExtractor::Half { n, enc })
    }

    pub fn below(n: usize) -> Result<Self> {
        let p = prime_near(n)?;
        if p > 64 {
            return Err(Error::InvalidParam(format!("prime {p} above the 64-bit field cap")));
        }
        let ctx = Gf2Ctx::new(p as u32);
        let g = ctx.find_generator()?;
        let enc = SeedEncoding::new(ctx, 1, EmbedMode::TopBit)?;
        Ok(NmExtractor::Below { n, ctx, g, enc })
    }

    pub fn fp_quad(n: usize, m_bits: usize) -> Result<Self> {
        if n >= 63 {
            return Err(Error::InvalidParam(format!("fp-quad needs n < 63, got {n}")));
        }
        let p = fp_find_prime(1 << n, 1 << (n + 1))?;
        let fp = FpCtx::new(p)?;
        if (1u64 << m_bits) > p {
            return Err(Error::InvalidParam(format!("modulus 2^{m_bits} exceeds p = {p}")));
        }
        Ok(NmExtractor::FpQuad { n, fp, m_bits })
    }

    pub fn multibit(base: NmExtractor, m: usize) -> Result<Self> {
        let ell = match &base {
            NmExtractor::Half { enc, .. } | NmExtractor::Below { enc, .. } => {
                enc.ctx().ell() as usize
            }
            _ => {
                return Err(Error::InvalidParam(
                    "multibit extends the half or below-half base constructions".into(),
                ))
            }
        };
        if m == 0 || m > ell {
            return Err(Error::OutputTooWide { m, max: ell });
        }
        Ok(NmExtractor::Multibit { base: Box::new(base), m })
    }

    pub fn reduced_seed(n: usize, t: u32) -> Result<Self> {
        let p = prime_near(n)?;
        if p > 64 {
            return Err(Error::InvalidParam(format!("prime {p} above the 64-bit field cap")));
        }
        let ell = (p / t as u64) as u32;
        if ell < 2 || t as u64 * ell as u64 > p {
            return Err(Error::InvalidParam(format!("t = {t} incompatible with p = {p}")));
        }
        let ctx = Gf2Ctx::new(p as u32);
        let g = ctx.find_generator()?;
        let enc = SeedEncoding::new(Gf2Ctx::new(ell), 2 * t - 1, EmbedMode::TopBit)?;
        Ok(NmExtractor::ReducedSeed { n, ctx, g, t, enc })
    }

    pub fn generic_r(n: usize, ell: u32, r: u32, f: SourceEnc) -> Result<Self> {
        let enc = SeedEncoding::new(Gf2Ctx::new(ell), r, EmbedMode::TopBit)?;
        let want = enc.enc_width();
        let got = f.out_width(n);
        if want != got {
            return Err(Error::WidthMismatch {
                what: "generic-r source encoding width",
                expected: want,
                got,
            });
        }
        Ok(NmExtractor::GenericR { n, f, enc })
    }

    pub fn name(&self) -> &'static str {
        match self {
            NmExtractor::Half { .. } => "half",
            NmExtractor::Below { .. } => "below-half",
            NmExtractor::FpQuad { .. } => "fp-quad",
            NmExtractor::Multibit { .. } => "multibit",
            NmExtractor::ReducedSeed { .. } => "reduced-seed",
            NmExtractor::GenericR { .. } => "generic-r",
        }
    }

    pub fn source_bits(&self) -> usize {
        match self {
            NmExtractor::Half { n, .. }
            | NmExtractor::Below { n, .. }
            | NmExtractor::FpQuad { n, .. }
            | NmExtractor::ReducedSeed { n, .. }
            | NmExtractor::GenericR { n, .. } => *n,
            NmExtractor::Multibit { base, .. } => base.source_bits(),
        }
    }

    /// Number of seed indices the construction accepts.
    pub fn seed_count(&self) -> u64 {
        match self {
            NmExtractor::Half { enc, .. }
            | NmExtractor::Below { enc, .. }
            | NmExtractor::ReducedSeed { enc, .. }
            | NmExtractor::GenericR { enc, .. } => enc.seed_count(),
            NmExtractor::FpQuad { n, .. } => 1u64 << n,
            NmExtractor::Multibit { base, .. } => base.seed_count(),
        }
    }

    /// Seed width in bits when the domain is a power of two.
    pub fn seed_bits(&self) -> Option<usize> {
        let c = self.seed_count();
        c.is_power_of_two().then(|| c.trailing_zeros() as usize)
    }

    pub fn output_bits(&self) -> usize {
        match self {
            NmExtractor::Half { .. }
            | NmExtractor::Below { .. }
            | NmExtractor::ReducedSeed { .. }
            | NmExtractor::GenericR { .. } => 1,
            NmExtractor::FpQuad { m_bits, .. } => *m_bits,
            NmExtractor::Multibit { m, .. } => *m,
        }
    }

    /// Whether x = 0 is a legal source value (the exponential encodings
    /// reject it).
    pub fn accepts_zero_source(&self) -> bool {
        match self {
            NmExtractor::Half { .. } | NmExtractor::FpQuad { .. } => true,
            NmExtractor::Below { .. } | NmExtractor::ReducedSeed { .. } => false,
            NmExtractor::GenericR { f, .. } => matches!(f, SourceEnc::Identity),
            NmExtractor::Multibit { base, .. } => base.accepts_zero_source(),
        }
    }

    fn seed_column_bits(&self, y: u64) -> Result<Bits> {
        match self {
            NmExtractor::Half { enc, .. }
            | NmExtractor::Below { enc, .. }
            | NmExtractor::GenericR { enc, .. } => Ok(enc.enc(y)),
            NmExtractor::ReducedSeed { ctx, enc, .. } => {
                Ok(enc.enc(y).zero_extend(2 * ctx.ell() as usize))
            }
            _ => unreachable!(),
        }
    }

    fn encode_source(&self, x: &Bits) -> Result<Bits> {
        match self {
            NmExtractor::Half { .. } => Ok(x.clone()),
            NmExtractor::Below { ctx, g, .. } | NmExtractor::ReducedSeed { ctx, g, .. } => {
                if x.len() > ctx.ell() as usize {
                    return Err(Error::WidthMismatch {
                        what: "source wider than the encoding field",
                        expected: ctx.ell() as usize,
                        got: x.len(),
                    });
                }
                enc_source_exp(x.to_u64(), ctx, *g)
            }
            NmExtractor::GenericR { f, .. } => f.apply(x),
            _ => unreachable!(),
        }
    }

    /// Evaluate on an n-bit source and a seed index; the output occupies the
    /// low `output_bits()` bits.
    pub fn eval(&self, x: &Bits, y: u64) -> Result<u64> {
        if y >= self.seed_count() {
            return Err(Error::InvalidParam(format!("seed index {y} out of range")));
        }
        match self {
            NmExtractor::Half { n, .. }
            | NmExtractor::Below { n, .. }
            | NmExtractor::ReducedSeed { n, .. }
            | NmExtractor::GenericR { n, .. } => {
                if x.len() != *n {
                    return Err(Error::WidthMismatch {
                        what: "nm source",
                        expected: *n,
                        got: x.len(),
                    });
                }
                let fx = self.encode_source(x)?;
                let col = self.seed_column_bits(y)?;
                Ok(ip_f2(&fx, &col)? as u64)
            }
            NmExtractor::FpQuad { n, fp, m_bits } => {
                if x.len() != *n {
                    return Err(Error::WidthMismatch {
                        what: "nm source",
                        expected: *n,
                        got: x.len(),
                    });
                }
                let xv = x.to_u64();
                let xy = fp.mul(xv, y);
                let x2y2 = fp.mul(fp.mul(xv, xv), fp.mul(y, y));
                Ok(reduce_mod(fp.add(xy, x2y2), 1 << m_bits))
            }
            NmExtractor::Multibit { base, m } => {
                let (enc, fx) = match base.as_ref() {
                    NmExtractor::Half { enc, .. } => (enc, base.encode_source(x)?),
                    NmExtractor::Below { enc, .. } => (enc, base.encode_source(x)?),
                    _ => unreachable!(),
                };
                let ctx = enc.ctx();
                let ell = ctx.ell() as usize;
                let z = enc.embed(y);
                let z3 = ctx.pow(z, 3);
                let mut out = 0u64;
                for (i, b) in ctx.basis().iter().take(*m).enumerate() {
                    let col = Bits::from_u64(ctx.mul(*b, z), ell)
                        .concat(&Bits::from_u64(ctx.mul(*b, z3), ell));
                    if ip_f2(&fx, &col)? {
                        out |= 1 << i;
                    }
                }
                Ok(out)
            }
        }
    }

    /// Closure suitable for exact joint enumeration: source values as u64,
    /// seed columns precomputed. Sources must fit in 64 bits and, for the
    /// exponential encodings, exclude zero.
    pub fn dense_fn(&self) -> Result<Box<dyn Fn(u64, u64) -> u64 + Send + Sync + 'static>> {
        let n = self.source_bits();
        if n > 64 {
            return Err(Error::InvalidParam("dense evaluation needs n <= 64".into()));
        }
        if self.seed_count() > 1 << 20 {
            return Err(Error::EnumerationBudgetExceeded {
                needed: self.seed_count() as u128,
                cap: 1 << 20,
            });
        }
        match self {
            NmExtractor::FpQuad { fp, m_bits, .. } => {
                let fp = *fp;
                let mask = (1u64 << m_bits) - 1;
                Ok(Box::new(move |x, y| {
                    let xy = fp.mul(x, y);
                    let x2y2 = fp.mul(fp.mul(x, x), fp.mul(y, y));
                    fp.add(xy, x2y2) & mask
                }))
            }
            NmExtractor::Multibit { base, m } => {
                let (enc, ell) = match base.as_ref() {
                    NmExtractor::Half { enc, .. } | NmExtractor::Below { enc, .. } => {
                        (enc, enc.ctx().ell() as usize)
                    }
                    _ => unreachable!(),
                };
                let ctx = *enc.ctx();
                let m = *m;
                // per-bit column tables
                let mut tables: Vec<Vec<u128>> = Vec::with_capacity(m);
                for i in 0..m {
                    let b = 1u64 << i;
                    let table = (0..enc.seed_count())
                        .map(|y| {
                            let z = enc.embed(y);
                            let z3 = ctx.pow(z, 3);
                            ctx.mul(b, z) as u128 | (ctx.mul(b, z3) as u128) << ell
                        })
                        .collect();
                    tables.push(table);
                }
                let base = base.clone();
                Ok(Box::new(move |x, y| {
                    let fx = base.packed_source(x);
                    let mut out = 0u64;
                    for (i, t) in tables.iter().enumerate() {
                        out |= (((fx & t[y as usize]).count_ones() & 1) as u64) << i;
                    }
                    out
                }))
            }
            _ => {
                let cols: Vec<u128> = (0..self.seed_count())
                    .map(|y| self.packed_column(y))
                    .collect();
                let this = self.clone();
                Ok(Box::new(move |x, y| {
                    let fx = this.packed_source(x);
                    ((fx & cols[y as usize]).count_ones() & 1) as u64
                }))
            }
        }
    }

    fn packed_column(&self, y: u64) -> u128 {
        match self {
            NmExtractor::Half { enc, .. }
            | NmExtractor::Below { enc, .. }
            | NmExtractor::GenericR { enc, .. }
            | NmExtractor::ReducedSeed { enc, .. } => enc.column_of(enc.embed(y)),
            _ => unreachable!(),
        }
    }

    fn packed_source(&self, x: u64) -> u128 {
        match self {
            NmExtractor::Half { .. } | NmExtractor::FpQuad { .. } => x as u128,
            NmExtractor::Below { ctx, g, .. } | NmExtractor::ReducedSeed { ctx, g, .. } => {
                debug_assert!(x != 0, "zero source in exponential encoding");
                x as u128 | (ctx.pow(*g, x) as u128) << ctx.ell()
            }
            NmExtractor::GenericR { f, .. } => match f {
                SourceEnc::Identity => x as u128,
                SourceEnc::Exp { ctx, g } => {
                    x as u128 | (ctx.pow(*g, x) as u128) << ctx.ell()
                }
            },
            NmExtractor::Multibit { base, .. } => base.packed_source(x),
        }
    }
}

/// Two-source extractor from a non-malleable extractor: condense y into
/// rows, tag each row with its index, and XOR the nm outputs across rows.
pub fn nm_to_two_source(
    x: &Bits,
    y: &Bits,
    nm: &NmExtractor,
    plan: &CondenserPlan,
) -> Result<u64> {
    let out = somewhere_condense(y, plan)?;
    let s = nm.seed_bits().ok_or_else(|| {
        Error::InvalidParam("two-source reduction needs a power-of-two seed domain".into())
    })?;
    if out.row_width > s {
        return Err(Error::SeedWidthMismatch {
            expected: s,
            got: out.row_width,
        });
    }
    let tag_bits = s - out.row_width;
    if plan.rows > 1 && (tag_bits >= 64 || plan.rows as u64 > 1u64 << tag_bits) {
        return Err(Error::SeedWidthMismatch {
            expected: s,
            got: out.row_width,
        });
    }
    let mut acc = 0u64;
    for (j, row) in out.rows.iter().enumerate() {
        let tag = Bits::from_u64(j as u64, tag_bits);
        let seed = row.concat(&tag).to_u64();
        acc ^= nm.eval(x, seed)?;
    }
    Ok(acc)
}
