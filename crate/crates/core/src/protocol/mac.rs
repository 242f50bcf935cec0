//! Information-theoretic one-time MAC: polynomial evaluation over GF(2^v)
//! with a 2v-bit key, plus exact exhaustive forgery analysis at micro tag
//! widths, with and without key leakage.

use num_traits::Zero;
use rayon::prelude::*;

use crate::bits::Bits;
use crate::dist::{q_u128, Q};
use crate::error::{Error, Result};
use crate::fields::Gf2Ctx;

/// Split the key into (k1, k2) in GF(2^v)^2 (k1 low), the message into
/// ceil(d/v) zero-padded v-bit blocks w_1..w_c (low block first), and return
/// tag = k2 + sum_i w_i * k1^i.
pub fn mac_tag(key: &Bits, msg: &Bits, v: usize) -> Result<Bits> {
    if v == 0 || v > 64 {
        return Err(Error::InvalidParam(format!("tag width {v} not in 1..=64")));
    }
    if key.len() != 2 * v {
        return Err(Error::WidthMismatch {
            what: "MAC key",
            expected: 2 * v,
            got: key.len(),
        });
    }
    let ctx = Gf2Ctx::new(v as u32);
    let k1 = key.slice(0, v).to_u64();
    let k2 = key.slice(v, v).to_u64();
    let d = msg.len();
    let c = d.div_ceil(v).max(1);
    let mut acc = k2;
    let mut kpow = 1u64;
    for i in 0..c {
        let lo = i * v;
        let width = v.min(d.saturating_sub(lo));
        let w = if width == 0 {
            0
        } else {
            msg.slice(lo, width).zero_extend(v).to_u64()
        };
        kpow = ctx.mul(kpow, k1);
        acc ^= ctx.mul(w, kpow);
    }
    Ok(Bits::from_u64(acc, v))
}

fn tag_table(v: usize, d: usize) -> Vec<Vec<u8>> {
    // tags[msg][key], v <= 7 so tags fit u8
    let keys = 1usize << (2 * v);
    (0..1u64 << d)
        .map(|w| {
            let msg = Bits::from_u64(w, d);
            (0..keys as u64)
                .map(|k| {
                    mac_tag(&Bits::from_u64(k, 2 * v), &msg, v).unwrap().to_u64() as u8
                })
                .collect()
        })
        .collect()
}

/// Exact best single-query forgery probability over uniform keys, maximized
/// over the observed message and the (unbounded) forger.
pub fn mac_forgery_advantage(v: usize, d: usize, cap: u128) -> Result<Q> {
    mac_leakage_advantage(v, d, &[], cap)
}

/// Exact forgery probability when the adversary additionally sees the key
/// bits selected by `leak` before choosing the message. Returns the exact
/// advantage; the theorem bound for comparison is
/// ceil(d/v) * 2^(v - (2v - |leak|)).
pub fn mac_leakage_advantage(v: usize, d: usize, leak: &[usize], cap: u128) -> Result<Q> {
    if v > 7 || d > 16 {
        return Err(Error::InvalidParam("exhaustive MAC analysis capped at v <= 7, d <= 16".into()));
    }
    for &b in leak {
        if b >= 2 * v {
            return Err(Error::InvalidCoordinate(b));
        }
    }
    let needed = 1u128 << (2 * d + 2 * v);
    if needed > cap {
        return Err(Error::EnumerationBudgetExceeded { needed, cap });
    }

    let keys = 1u64 << (2 * v);
    let tags = tag_table(v, d);
    let msgs = 1u64 << d;
    let tag_space = 1usize << v;
    let leak_mask: u64 = leak.iter().fold(0, |m, &b| m | 1 << b);

    // keys grouped by leak value
    let mut groups: std::collections::HashMap<u64, Vec<u64>> = std::collections::HashMap::new();
    for k in 0..keys {
        groups.entry(k & leak_mask).or_default().push(k);
    }

    // For each leak value and observed message w, the forger sees tag t and
    // plays the (w', t') maximizing the conditional key count; sum the best
    // counts over t, then take the best w. Total over leak values divided by
    // the key-space size is the exact advantage.
    let groups: Vec<Vec<u64>> = groups.into_values().collect();
    let total: u128 = groups
        .par_iter()
        .map(|ks| {
            let mut best_for_group = 0u64;
            for w in 0..msgs {
                let tw = &tags[w as usize];
                // best[t] = max over (w' != w, t') of |{k in ks: tag(k,w)=t, tag(k,w')=t'}|
                let mut best = vec![0u64; tag_space];
                let mut cnt = vec![0u64; tag_space * tag_space];
                for wp in 0..msgs {
                    if wp == w {
                        continue;
                    }
                    let twp = &tags[wp as usize];
                    for c in cnt.iter_mut() {
                        *c = 0;
                    }
                    for &k in ks {
                        let t = tw[k as usize] as usize;
                        let tp = twp[k as usize] as usize;
                        cnt[t << v | tp] += 1;
                    }
                    for t in 0..tag_space {
                        for tp in 0..tag_space {
                            let c = cnt[t << v | tp];
                            if c > best[t] {
                                best[t] = c;
                            }
                        }
                    }
                }
                let adv: u64 = best.iter().sum();
                if adv > best_for_group {
                    best_for_group = adv;
                }
            }
            best_for_group as u128
        })
        .sum();

    Ok(q_u128(total, keys as u128))
}

/// The security bound of the polynomial MAC: ceil(d/v) * 2^(v - h) where h
/// is the (average conditional) min-entropy of the key.
pub fn mac_bound(v: usize, d: usize, key_entropy_bits: usize) -> Q {
    let blocks = d.div_ceil(v) as u128;
    if key_entropy_bits >= v {
        Q::new(blocks.into(), (1u128 << (key_entropy_bits - v)).into())
    } else {
        Q::new((blocks << (v - key_entropy_bits)).into(), 1.into())
    }
}

/// Convenience: the advantage is zero only in degenerate cases, so expose a
/// checked comparison for reports.
pub fn advantage_within_bound(adv: &Q, bound: &Q) -> bool {
    !adv.is_zero() && adv <= bound || adv.is_zero()
}
