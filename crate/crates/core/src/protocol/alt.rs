//! Alternating extraction and the look-ahead extractor.
//!
//! Quentin holds (Q, S_0) = (Y2, Y3), Wendy holds X and the nm-extracted
//! rows. Step 0 seeds the exchange through the two-source slot (S_0 has
//! entropy rate above one half after conditioning); each later step i
//! produces V_i from row i and refreshes the shuttle values R_i, S_(i+1).

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::extractors::{strong_seeded_ext, two_source_ip_padded};

use super::params::ProtocolParams;

#[derive(Debug, Clone, PartialEq)]
pub struct AltTranscript {
    /// S_0..S_C (S_0 is the raw Y3 string, the rest are d bits).
    pub s: Vec<Bits>,
    /// R_0..R_C, d bits each.
    pub r: Vec<Bits>,
    /// V_1..V_C with the halving widths from the params.
    pub v: Vec<Bits>,
}

/// Run the alternating extraction sequence.
pub fn alt_extract(
    x: &Bits,
    xbar: &[Bits],
    q: &Bits,
    s0: &Bits,
    params: &ProtocolParams,
) -> Result<AltTranscript> {
    if xbar.len() != params.c {
        return Err(Error::WidthMismatch {
            what: "nm-extracted row count",
            expected: params.c,
            got: xbar.len(),
        });
    }
    for row in xbar {
        if row.len() != params.m_prime {
            return Err(Error::WidthMismatch {
                what: "nm-extracted row",
                expected: params.m_prime,
                got: row.len(),
            });
        }
    }
    if q.len() != params.y2_bits {
        return Err(Error::WidthMismatch {
            what: "Q source",
            expected: params.y2_bits,
            got: q.len(),
        });
    }
    if s0.len() != params.y3_bits {
        return Err(Error::WidthMismatch {
            what: "S0 source",
            expected: params.y3_bits,
            got: s0.len(),
        });
    }
    let d = params.d;
    let mut s = vec![s0.clone()];
    let r0 = two_source_ip_padded(s0, x, d)?;
    let mut r = vec![r0];
    let mut v = Vec::with_capacity(params.c);
    s.push(strong_seeded_ext(q, &r[0], d)?);
    for i in 1..=params.c {
        let si = &s[i];
        v.push(strong_seeded_ext(&xbar[i - 1], si, params.v_widths[i - 1])?);
        r.push(strong_seeded_ext(x, si, d)?);
        if i < params.c {
            let next = strong_seeded_ext(q, &r[i], d)?;
            s.push(next);
        }
    }
    Ok(AltTranscript { s, r, v })
}

/// Projection of the alternating extraction onto the V sequence.
pub fn look_ahead_ext(
    x: &Bits,
    xbar: &[Bits],
    q: &Bits,
    s0: &Bits,
    params: &ProtocolParams,
) -> Result<Vec<Bits>> {
    Ok(alt_extract(x, xbar, q, s0, params)?.v)
}
