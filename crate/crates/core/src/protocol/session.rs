//! Session simulation: Monte-Carlo sweeps with an interposed adversary, and
//! the exact micro-scale analysis that enumerates the entire randomness
//! space of the protocol.

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::dist::{FlatSource, Q};
use crate::error::{Error, Result};
use crate::extractors::strong_seeded_ext;
use crate::protocol::eve::EveStrategy;
use crate::protocol::mac::mac_tag;
use crate::protocol::params::ProtocolInstance;
use crate::protocol::party::{
    alice_finalize, alice_round1, bob_round, derive, ExactRand, PartyOutcome, RngRand,
};

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Shared-secret families for protocol experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceSpec {
    /// Pseudorandom flat source with 2^k support points (Monte-Carlo
    /// scale; exact modes use a materialized support instead).
    Flat { k: u32 },
    /// One condenser row fresh-uniform per trial, the others pinned to
    /// fixed constants: the engineered somewhere-rate-promise source.
    BlockUniformRow { row: usize },
    /// Top `zeros` bits zero, the rest uniform per trial.
    PrefixZero { zeros: usize },
}

pub struct SourceSampler {
    n: usize,
    c: usize,
    spec: SourceSpec,
    base: u64,
    row_consts: Vec<Bits>,
}

impl SourceSpec {
    pub fn sampler(&self, inst: &ProtocolInstance, seed: u64) -> Result<SourceSampler> {
        let n = inst.params.n;
        let c = inst.params.c;
        let mut rng = ChaCha12Rng::seed_from_u64(splitmix(seed ^ 0x50c0));
        let row_consts = match self {
            SourceSpec::BlockUniformRow { row } => {
                if *row >= c {
                    return Err(Error::InvalidCoordinate(*row));
                }
                (0..c).map(|_| Bits::random(&mut rng, n / c)).collect()
            }
            SourceSpec::Flat { k } => {
                if *k as usize > n {
                    return Err(Error::InvalidParam(format!("k = {k} above n = {n}")));
                }
                Vec::new()
            }
            SourceSpec::PrefixZero { zeros } => {
                if *zeros >= n {
                    return Err(Error::InvalidParam(format!("{zeros} zeros at n = {n}")));
                }
                Vec::new()
            }
        };
        Ok(SourceSampler {
            n,
            c,
            spec: *self,
            base: rng.gen(),
            row_consts,
        })
    }
}

impl SourceSampler {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Bits {
        match self.spec {
            SourceSpec::Flat { k } => {
                // pseudorandom injection of a 2^k index set into n bits
                let i: u64 = if k == 64 { rng.gen() } else { rng.gen_range(0..1u64 << k) };
                let mut out = Bits::zero(self.n);
                let mut state = splitmix(self.base ^ i);
                for j in 0..self.n {
                    if j % 64 == 0 && j > 0 {
                        state = splitmix(state);
                    }
                    if state >> (j % 64) & 1 == 1 {
                        out.set(j, true);
                    }
                }
                out
            }
            SourceSpec::BlockUniformRow { row } => {
                // row j occupies the (c-1-j)'th low block, matching the
                // most-significant-first condenser split
                let w = self.n / self.c;
                let mut out = Bits::zero(self.n);
                for j in 0..self.c {
                    let block = if j == row {
                        Bits::random(rng, w)
                    } else {
                        self.row_consts[j].clone()
                    };
                    let lo = (self.c - 1 - j) * w;
                    for b in 0..w {
                        if block.get(b) {
                            out.set(lo + b, true);
                        }
                    }
                }
                out
            }
            SourceSpec::PrefixZero { zeros } => {
                let mut x = Bits::random(rng, self.n);
                for i in self.n - zeros..self.n {
                    x.set(i, false);
                }
                x
            }
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SessionStats {
    pub trials: u64,
    pub alice_accepts: u64,
    pub bob_accepts: u64,
    pub both_accept: u64,
    pub both_accept_keys_equal: u64,
    /// Both accepted with different keys: the robustness-violation event.
    pub robustness_violations: u64,
}

impl SessionStats {
    fn merge(mut self, other: SessionStats) -> SessionStats {
        self.trials += other.trials;
        self.alice_accepts += other.alice_accepts;
        self.bob_accepts += other.bob_accepts;
        self.both_accept += other.both_accept;
        self.both_accept_keys_equal += other.both_accept_keys_equal;
        self.robustness_violations += other.robustness_violations;
        self
    }

    pub fn correctness_rate(&self) -> f64 {
        self.both_accept_keys_equal as f64 / self.trials as f64
    }

    pub fn robustness_rate(&self) -> f64 {
        self.robustness_violations as f64 / self.trials as f64
    }

    pub fn alice_acceptance_rate(&self) -> f64 {
        self.alice_accepts as f64 / self.trials as f64
    }
}

/// Wilson score interval for a binomial rate at `z` standard errors.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub trial: u64,
    pub sent1: super::party::Msg1,
    pub recv1: super::party::Msg1,
    pub sent2: super::party::Msg2,
    pub recv2: super::party::Msg2,
    pub outcome_a: PartyOutcome,
    pub outcome_b: PartyOutcome,
}

fn one_session<R: Rng>(
    inst: &ProtocolInstance,
    sampler: &SourceSampler,
    eve: &EveStrategy,
    rng: &mut R,
    trial: u64,
) -> Result<SessionTranscript> {
    let x = sampler.sample(rng);
    let e = eve.side_info(&x);
    let mut arand = RngRand(ChaCha12Rng::seed_from_u64(splitmix(rng.gen())));
    let mut brand = RngRand(ChaCha12Rng::seed_from_u64(splitmix(rng.gen())));
    let (sent1, state) = alice_round1(&x, &mut arand, inst)?;
    let recv1 = eve.tamper_round1(&sent1, &e, &inst.params);
    let (sent2, outcome_b) = bob_round(&x, &recv1, &mut brand, inst)?;
    let recv2 = eve.tamper_round2(&sent2, &e, &sent1, &inst.params);
    let outcome_a = alice_finalize(&state, &recv2, inst)?;
    Ok(SessionTranscript {
        trial,
        sent1,
        recv1,
        sent2,
        recv2,
        outcome_a,
        outcome_b,
    })
}

/// Monte-Carlo session sweep; reproducible from the experiment seed, with
/// trials distributed over parallel workers.
pub fn run_sessions(
    inst: &ProtocolInstance,
    spec: &SourceSpec,
    eve: &EveStrategy,
    trials: u64,
    seed: u64,
) -> Result<SessionStats> {
    if trials == 0 {
        return Err(Error::InvalidParam("at least one trial".into()));
    }
    let sampler = spec.sampler(inst, seed)?;
    let stats = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha12Rng::seed_from_u64(splitmix(seed.wrapping_add(t * 0x9e37 + 1)));
            let tr = one_session(inst, &sampler, eve, &mut rng, t)?;
            let mut s = SessionStats { trials: 1, ..Default::default() };
            let ka = tr.outcome_a.key();
            let kb = tr.outcome_b.key();
            if ka.is_some() {
                s.alice_accepts = 1;
            }
            if kb.is_some() {
                s.bob_accepts = 1;
            }
            if let (Some(a), Some(b)) = (ka, kb) {
                s.both_accept = 1;
                if a == b {
                    s.both_accept_keys_equal = 1;
                } else {
                    s.robustness_violations = 1;
                }
            }
            Ok(s)
        })
        .try_reduce(SessionStats::default, |a, b| Ok(a.merge(b)));
    stats
}

/// Sequential transcript dump for the JSON-lines interface.
pub fn run_transcripts(
    inst: &ProtocolInstance,
    spec: &SourceSpec,
    eve: &EveStrategy,
    trials: u64,
    seed: u64,
) -> Result<Vec<SessionTranscript>> {
    let sampler = spec.sampler(inst, seed)?;
    (0..trials)
        .map(|t| {
            let mut rng = ChaCha12Rng::seed_from_u64(splitmix(seed.wrapping_add(t * 0x9e37 + 1)));
            one_session(inst, &sampler, eve, &mut rng, t)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ExactPassiveStats {
    /// (randomness assignments) x (support points) enumerated.
    pub cells: u128,
    /// Full party-function sessions replayed on the verification lattice.
    pub end_to_end_sessions: u64,
    pub all_correct: bool,
    /// Exact TV of (R_A, Eve's passive view) from (U, view).
    pub key_tv: Q,
}

/// Exhaustive passive-Eve analysis at the micro shape (C = 1, nm window =
/// n): enumerate every (Y1, Y2, Y3, W') assignment against a materialized
/// flat support.
///
/// The protocol derivation is pure, so each distinct sub-computation is
/// evaluated once through the real extractor/MAC code and reused across the
/// enumeration; a deterministic lattice of cells is additionally replayed
/// through the full Alice/Bob state machines and compared.
pub fn micro_exhaustive_passive(
    inst: &ProtocolInstance,
    k_source: u32,
    seed: u64,
) -> Result<ExactPassiveStats> {
    let p = &inst.params;
    if p.c != 1 || p.nm_window != p.n {
        return Err(Error::InvalidParam(
            "exhaustive mode requires the micro shape (C = 1, full-width nm window)".into(),
        ));
    }
    let rand_bits = p.y1_bits + p.y2_bits + p.y3_bits + p.w_bits;
    if rand_bits > 26 {
        return Err(Error::EnumerationBudgetExceeded {
            needed: 1u128 << rand_bits,
            cap: 1 << 26,
        });
    }
    let vsum: usize = p.v_widths.iter().sum();
    let tuple_bits = p.key_bits + p.tag_bits + vsum;
    if tuple_bits > 20 {
        return Err(Error::InvalidParam("tuple histogram above 2^20 cells".into()));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(splitmix(seed ^ 0xE15A));
    let source = FlatSource::random(p.n, k_source, &mut rng);
    let xs: Vec<Bits> = source
        .support()
        .iter()
        .map(|&v| Bits::from_u64(v, p.n))
        .collect();
    let nx = xs.len();

    let y1s = 1u64 << p.y1_bits;
    let y2s = 1u64 << p.y2_bits;
    let y3s = 1u64 << p.y3_bits;
    let ws = 1u64 << p.w_bits;

    // memo tables, each entry produced by the real component code
    let mut z_tab = vec![vec![0u64; y1s as usize]; nx];
    let mut xbar_tab = vec![vec![0u64; y1s as usize]; nx];
    for (i, x) in xs.iter().enumerate() {
        for y1 in 0..y1s {
            let y1b = Bits::from_u64(y1, p.y1_bits);
            z_tab[i][y1 as usize] = strong_seeded_ext(x, &y1b, p.z_bits)?.to_u64();
            let windowed = x.low(p.nm_window);
            xbar_tab[i][y1 as usize] =
                inst.nm.eval(&windowed, y1b.slice(0, p.d_nm).to_u64())?;
        }
    }
    let mut r0_tab = vec![vec![0u64; y3s as usize]; nx];
    for (i, x) in xs.iter().enumerate() {
        for y3 in 0..y3s {
            let s0 = Bits::from_u64(y3, p.y3_bits);
            r0_tab[i][y3 as usize] =
                crate::extractors::two_source_ip_padded(&s0, x, p.d)?.to_u64();
        }
    }
    let mut s1_tab = vec![vec![0u64; 1 << p.d]; y2s as usize];
    for y2 in 0..y2s {
        let q = Bits::from_u64(y2, p.y2_bits);
        for r0 in 0..1u64 << p.d {
            s1_tab[y2 as usize][r0 as usize] =
                strong_seeded_ext(&q, &Bits::from_u64(r0, p.d), p.d)?.to_u64();
        }
    }
    let v_width = p.v_widths[0];
    let mut v_tab = vec![vec![0u64; 1 << p.d]; 1 << p.m_prime];
    for xb in 0..1u64 << p.m_prime {
        let xbb = Bits::from_u64(xb, p.m_prime);
        for s1 in 0..1u64 << p.d {
            v_tab[xb as usize][s1 as usize] =
                strong_seeded_ext(&xbb, &Bits::from_u64(s1, p.d), v_width)?.to_u64();
        }
    }
    let mut ra_tab = vec![vec![0u64; ws as usize]; nx];
    for (i, x) in xs.iter().enumerate() {
        for w in 0..ws {
            ra_tab[i][w as usize] =
                strong_seeded_ext(x, &Bits::from_u64(w, p.w_bits), p.key_bits)?.to_u64();
        }
    }
    let mut mac_tab = vec![vec![0u64; ws as usize]; 1 << p.z_bits];
    for z in 0..1u64 << p.z_bits {
        let zb = Bits::from_u64(z, p.z_bits);
        for w in 0..ws {
            mac_tab[z as usize][w as usize] =
                mac_tag(&zb, &Bits::from_u64(w, p.w_bits), p.tag_bits)?.to_u64();
        }
    }

    // TV of (R_A, T', V') from (U_key, T', V') per (y, w), averaged exactly.
    // All numerators live over the denominator 2 * nx * 2^key_bits.
    let hist_size = 1usize << tuple_bits;
    let key_space = 1u64 << p.key_bits;
    let numer: u128 = (0..y1s)
        .into_par_iter()
        .map(|y1| {
            let mut hist = vec![0u32; hist_size];
            let mut touched: Vec<u32> = Vec::with_capacity(nx);
            let mut local: u128 = 0;
            let zs: Vec<u64> = (0..nx).map(|i| z_tab[i][y1 as usize]).collect();
            let xbars: Vec<u64> = (0..nx).map(|i| xbar_tab[i][y1 as usize]).collect();
            let mut vs = vec![0u64; nx];
            for y3 in 0..y3s {
                for y2 in 0..y2s {
                    for (i, v) in vs.iter_mut().enumerate() {
                        let r0 = r0_tab[i][y3 as usize];
                        let s1 = s1_tab[y2 as usize][r0 as usize];
                        *v = v_tab[xbars[i] as usize][s1 as usize];
                    }
                    for w in 0..ws {
                        touched.clear();
                        for i in 0..nx {
                            let tuple = ra_tab[i][w as usize]
                                | mac_tab[zs[i] as usize][w as usize] << p.key_bits
                                | vs[i] << (p.key_bits + p.tag_bits);
                            if hist[tuple as usize] == 0 {
                                touched.push(tuple as u32);
                            }
                            hist[tuple as usize] += 1;
                        }
                        // group touched cells by their (T', V') suffix
                        touched.sort_unstable_by_key(|&t| t >> p.key_bits);
                        let mut idx = 0;
                        while idx < touched.len() {
                            let suffix = touched[idx] >> p.key_bits;
                            let mut marg = 0u64;
                            let mut distinct = 0u64;
                            let mut j = idx;
                            while j < touched.len() && touched[j] >> p.key_bits == suffix {
                                marg += hist[touched[j] as usize] as u64;
                                distinct += 1;
                                j += 1;
                            }
                            for &t in &touched[idx..j] {
                                let h = hist[t as usize] as u64;
                                local += (h * key_space).abs_diff(marg) as u128;
                            }
                            local += ((key_space - distinct) * marg) as u128;
                            idx = j;
                        }
                        for &t in &touched {
                            hist[t as usize] = 0;
                        }
                    }
                }
            }
            local
        })
        .sum();

    let rand_space = BigInt::one() << rand_bits;
    let den: BigInt =
        BigInt::from(2u8) * BigInt::from(nx) * BigInt::from(key_space) * rand_space;
    let key_tv = Q::new(BigInt::from(numer), den);

    // end-to-end verification lattice through the real state machines
    let mut end_to_end = 0u64;
    let mut all_correct = true;
    let step = ((y1s * y2s * y3s * ws) / 64).max(1);
    let mut cell = 0u64;
    while cell < y1s * y2s * y3s * ws {
        let w = cell % ws;
        let y = cell / ws;
        let y1 = y % y1s;
        let y2 = (y / y1s) % y2s;
        let y3 = y / (y1s * y2s);
        for i in (0..nx).step_by((nx / 4).max(1)) {
            let x = &xs[i];
            let alice_bits = Bits::from_u64(y1, p.y1_bits)
                .concat(&Bits::from_u64(y2, p.y2_bits))
                .concat(&Bits::from_u64(y3, p.y3_bits));
            let mut ar = ExactRand::new(alice_bits);
            let mut br = ExactRand::new(Bits::from_u64(w, p.w_bits));
            let (m1, st) = alice_round1(x, &mut ar, inst)?;
            let (m2, ob) = bob_round(x, &m1, &mut br, inst)?;
            let oa = alice_finalize(&st, &m2, inst)?;
            end_to_end += 1;
            match (oa.key(), ob.key()) {
                (Some(a), Some(b)) if a == b => {}
                _ => all_correct = false,
            }
            // the key must agree with the table pipeline
            let table_key = ra_tab[i][w as usize];
            if oa.key().map(Bits::to_u64) != Some(table_key) {
                all_correct = false;
            }
            // and the derivation feeding the tables must match Bob's view
            let der = derive(inst, x, &m1.y1, &m1.y2, &m1.y3)?;
            if der.z.to_u64() != z_tab[i][y1 as usize] {
                all_correct = false;
            }
        }
        cell += step;
    }

    Ok(ExactPassiveStats {
        cells: (y1s * y2s * y3s * ws) as u128 * nx as u128,
        end_to_end_sessions: end_to_end,
        all_correct,
        key_tv,
    })
}
