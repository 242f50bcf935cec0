//! The active adversary: side information plus per-round tamper functions.
//!
//! Messages cross the channel as fixed-width payloads (round 1: Y1||Y2||Y3,
//! round 2: W||T||V1..VC). A strategy rewrites the payload bits as a
//! deterministic function of the payload itself, the leaked side
//! information E(x), and the round-1 traffic it already saw; widths never
//! change. This operationalizes "insert, delete, reorder or modify" for a
//! bit-exact channel.

use serde::{Deserialize, Serialize};

use crate::bits::Bits;

use super::params::ProtocolParams;
use super::party::{Msg1, Msg2};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EveStrategy {
    Passive,
    /// Flip one payload bit of the given round (1 or 2).
    FlipBit { round: u8, bit: usize },
    /// Replace the round's payload with a fixed pseudorandom constant.
    ReplaceConst { round: u8, seed: u64 },
    /// Keep the low `keep` payload bits, zero the rest (truncate and pad).
    TruncatePad { round: u8, keep: usize },
    /// XOR the round-2 payload with a table lookup keyed by the round-1
    /// transcript.
    Adaptive { seed: u64 },
    /// Leakage-assisted: read `leak_bits` bits of the secret and flip the
    /// W' bit they select.
    LeakFlip { leak_bits: usize },
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn fold_bits(b: &Bits) -> u64 {
    let mut acc = 0xcbf29ce484222325u64;
    for i in 0..b.len().div_ceil(64) {
        let w = b.slice(i * 64, 64.min(b.len() - i * 64)).zero_extend(64).to_u64();
        acc = splitmix(acc ^ w);
    }
    acc
}

fn pseudorandom_payload(seed: u64, len: usize) -> Bits {
    let mut out = Bits::zero(len);
    let mut state = seed;
    for i in 0..len.div_ceil(64) {
        state = splitmix(state);
        for b in 0..64.min(len - i * 64) {
            if state >> b & 1 == 1 {
                out.set(i * 64 + b, true);
            }
        }
    }
    out
}

fn flatten1(m: &Msg1) -> Bits {
    m.y1.concat(&m.y2).concat(&m.y3)
}

fn unflatten1(b: &Bits, p: &ProtocolParams) -> Msg1 {
    Msg1 {
        y1: b.slice(0, p.y1_bits),
        y2: b.slice(p.y1_bits, p.y2_bits),
        y3: b.slice(p.y1_bits + p.y2_bits, p.y3_bits),
    }
}

fn flatten2(m: &Msg2) -> Bits {
    let mut acc = m.w.concat(&m.t);
    for v in &m.v {
        acc = acc.concat(v);
    }
    acc
}

fn unflatten2(b: &Bits, p: &ProtocolParams) -> Msg2 {
    let w = b.slice(0, p.w_bits);
    let t = b.slice(p.w_bits, p.tag_bits);
    let mut off = p.w_bits + p.tag_bits;
    let mut v = Vec::with_capacity(p.c);
    for &width in &p.v_widths {
        v.push(b.slice(off, width));
        off += width;
    }
    Msg2 { w, t, v }
}

fn tamper_payload(payload: &Bits, round: u8, strategy: &EveStrategy, e: &Bits, seen1: Option<&Bits>) -> Bits {
    match strategy {
        EveStrategy::Passive => payload.clone(),
        EveStrategy::FlipBit { round: r, bit } if *r == round => {
            let mut out = payload.clone();
            out.flip(bit % payload.len());
            out
        }
        EveStrategy::ReplaceConst { round: r, seed } if *r == round => {
            pseudorandom_payload(*seed, payload.len())
        }
        EveStrategy::TruncatePad { round: r, keep } if *r == round => {
            let mut out = Bits::zero(payload.len());
            for i in 0..(*keep).min(payload.len()) {
                if payload.get(i) {
                    out.set(i, true);
                }
            }
            out
        }
        EveStrategy::Adaptive { seed } if round == 2 => {
            let key = splitmix(*seed ^ fold_bits(payload) ^ seen1.map(fold_bits).unwrap_or(0));
            payload.xor(&pseudorandom_payload(key, payload.len())).unwrap()
        }
        EveStrategy::LeakFlip { .. } if round == 2 => {
            let mut idx = 0usize;
            for i in 0..e.len() {
                idx = (idx << 1) | e.get(i) as usize;
            }
            let mut out = payload.clone();
            out.flip(idx % out.len());
            out
        }
        _ => payload.clone(),
    }
}

impl EveStrategy {
    /// Width of the side information E(x) this strategy reads.
    pub fn side_info_bits(&self) -> usize {
        match self {
            EveStrategy::LeakFlip { leak_bits } => *leak_bits,
            _ => 0,
        }
    }

    /// Fixed projection of the secret: its low `side_info_bits()` bits.
    pub fn side_info(&self, x: &Bits) -> Bits {
        x.low(self.side_info_bits().min(x.len()))
    }

    pub fn tamper_round1(&self, m: &Msg1, e: &Bits, p: &ProtocolParams) -> Msg1 {
        let payload = flatten1(m);
        unflatten1(&tamper_payload(&payload, 1, self, e, None), p)
    }

    pub fn tamper_round2(&self, m: &Msg2, e: &Bits, seen1: &Msg1, p: &ProtocolParams) -> Msg2 {
        let payload = flatten2(m);
        let seen = flatten1(seen1);
        unflatten2(&tamper_payload(&payload, 2, self, e, Some(&seen)), p)
    }

    pub fn is_passive(&self) -> bool {
        matches!(self, EveStrategy::Passive)
    }

    pub fn name(&self) -> String {
        match self {
            EveStrategy::Passive => "passive".into(),
            EveStrategy::FlipBit { round, bit } => format!("flip-r{round}-b{bit}"),
            EveStrategy::ReplaceConst { round, .. } => format!("replace-r{round}"),
            EveStrategy::TruncatePad { round, keep } => format!("truncate-r{round}-keep{keep}"),
            EveStrategy::Adaptive { .. } => "adaptive".into(),
            EveStrategy::LeakFlip { leak_bits } => format!("leak{leak_bits}-flip"),
        }
    }

    /// Parse a strategy name as used by the CLI.
    pub fn by_name(name: &str, p: &ProtocolParams) -> Option<EveStrategy> {
        let all = Self::shipped(p);
        all.into_iter().find(|s| s.name() == name).or(match name {
            "passive" => Some(EveStrategy::Passive),
            _ => None,
        })
    }

    /// The shipped tampering library; every robustness sweep runs all of
    /// these.
    pub fn shipped(p: &ProtocolParams) -> Vec<EveStrategy> {
        vec![
            EveStrategy::Passive,
            EveStrategy::FlipBit { round: 1, bit: 0 },
            EveStrategy::FlipBit { round: 1, bit: p.y1_bits - 1 },
            EveStrategy::FlipBit { round: 2, bit: 0 },
            EveStrategy::FlipBit { round: 2, bit: p.w_bits },
            EveStrategy::FlipBit { round: 2, bit: p.w_bits + p.tag_bits },
            EveStrategy::ReplaceConst { round: 2, seed: 0xE0E },
            EveStrategy::TruncatePad { round: 1, keep: p.y1_bits / 2 },
            EveStrategy::TruncatePad { round: 2, keep: p.w_bits / 2 },
            EveStrategy::Adaptive { seed: 0xADA },
            EveStrategy::LeakFlip { leak_bits: 4.min(p.n / 2) },
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::params::ProtocolParams;
    use rand::SeedableRng;

    #[test]
    fn round_payloads_flatten_and_unflatten() {
        let p = ProtocolParams::small();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let m1 = Msg1 {
            y1: Bits::random(&mut rng, p.y1_bits),
            y2: Bits::random(&mut rng, p.y2_bits),
            y3: Bits::random(&mut rng, p.y3_bits),
        };
        assert_eq!(unflatten1(&flatten1(&m1), &p), m1);
        let m2 = Msg2 {
            w: Bits::random(&mut rng, p.w_bits),
            t: Bits::random(&mut rng, p.tag_bits),
            v: p.v_widths.iter().map(|&w| Bits::random(&mut rng, w)).collect(),
        };
        assert_eq!(unflatten2(&flatten2(&m2), &p), m2);
    }

    #[test]
    fn passive_and_wrong_round_leave_messages_alone() {
        let p = ProtocolParams::micro();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(6);
        let m1 = Msg1 {
            y1: Bits::random(&mut rng, p.y1_bits),
            y2: Bits::random(&mut rng, p.y2_bits),
            y3: Bits::random(&mut rng, p.y3_bits),
        };
        let e = Bits::zero(0);
        assert_eq!(EveStrategy::Passive.tamper_round1(&m1, &e, &p), m1);
        let flip2 = EveStrategy::FlipBit { round: 2, bit: 0 };
        assert_eq!(flip2.tamper_round1(&m1, &e, &p), m1);
        let flip1 = EveStrategy::FlipBit { round: 1, bit: 0 };
        let tampered = flip1.tamper_round1(&m1, &e, &p);
        assert_ne!(tampered, m1);
        assert_eq!(tampered.y2, m1.y2);
    }

    #[test]
    fn strategies_are_deterministic() {
        let p = ProtocolParams::micro();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(8);
        let m1 = Msg1 {
            y1: Bits::random(&mut rng, p.y1_bits),
            y2: Bits::random(&mut rng, p.y2_bits),
            y3: Bits::random(&mut rng, p.y3_bits),
        };
        let m2 = Msg2 {
            w: Bits::random(&mut rng, p.w_bits),
            t: Bits::random(&mut rng, p.tag_bits),
            v: vec![Bits::random(&mut rng, 2)],
        };
        let e = Bits::from_u64(0b1011, 4);
        for s in EveStrategy::shipped(&p) {
            let a = s.tamper_round2(&m2, &e, &m1, &p);
            let b = s.tamper_round2(&m2, &e, &m1, &p);
            assert_eq!(a, b, "{} not deterministic", s.name());
        }
    }

    #[test]
    fn names_round_trip() {
        let p = ProtocolParams::small();
        for s in EveStrategy::shipped(&p) {
            let back = EveStrategy::by_name(&s.name(), &p).unwrap();
            assert_eq!(back, s);
        }
    }
}
