//! Non-malleability error sweeps over (source, adversary) families.
//!
//! Exhaustive mode computes the exact joint distribution and its distance
//! for every cell; Monte-Carlo mode estimates the same statistic by
//! sampling and carries an error envelope so the two modes can be compared.

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::TableAdversary;
use crate::dist::{nm_error, nm_joint, q_u128, ExplicitDist, FlatSource, Q, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};
use crate::extractors::ip_f2_u64;
use crate::nmext::{NmExtractor, SourceEnc};

use super::adversaries::{gen_adversaries, AdversaryDomain, AdversaryFamily};
use super::report::q_string;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstructionSpec {
    /// Plain inner product with an n-bit seed and no encoding: the negative
    /// control.
    RawIp { n: usize },
    Half { n: usize },
    Below { n: usize },
    FpQuad { n: usize, m: usize },
    Multibit { n: usize, m: usize },
    ReducedSeed { n: usize, t: u32 },
    GenericR { n: usize, ell: u32, r: u32 },
}

pub struct BuiltConstruction {
    pub name: String,
    pub n: usize,
    pub m_bits: usize,
    pub seed_domain: AdversaryDomain,
    pub accepts_zero: bool,
    pub ext: Box<dyn Fn(u64, u64) -> u64 + Send + Sync>,
}

impl ConstructionSpec {
    pub fn n(&self) -> usize {
        match self {
            ConstructionSpec::RawIp { n }
            | ConstructionSpec::Half { n }
            | ConstructionSpec::Below { n }
            | ConstructionSpec::FpQuad { n, .. }
            | ConstructionSpec::Multibit { n, .. }
            | ConstructionSpec::ReducedSeed { n, .. }
            | ConstructionSpec::GenericR { n, .. } => *n,
        }
    }

    pub fn by_name(name: &str, n: usize, m: usize, t: u32, ell: u32, r: u32) -> Result<Self> {
        Ok(match name {
            "raw-ip" => ConstructionSpec::RawIp { n },
            "half" => ConstructionSpec::Half { n },
            "below-half" => ConstructionSpec::Below { n },
            "fp-quad" => ConstructionSpec::FpQuad { n, m },
            "multibit" => ConstructionSpec::Multibit { n, m },
            "reduced-seed" => ConstructionSpec::ReducedSeed { n, t },
            "generic-r" => ConstructionSpec::GenericR { n, ell, r },
            other => return Err(Error::InvalidParam(format!("unknown construction {other:?}"))),
        })
    }

    pub fn build(&self) -> Result<BuiltConstruction> {
        let nm = match self {
            ConstructionSpec::RawIp { n } => {
                if *n > 24 {
                    return Err(Error::InvalidParam("raw-ip sweep capped at n <= 24".into()));
                }
                return Ok(BuiltConstruction {
                    name: "raw-ip".into(),
                    n: *n,
                    m_bits: 1,
                    seed_domain: AdversaryDomain::Pow2 { bits: *n as u32 },
                    accepts_zero: true,
                    ext: Box::new(|x, y| ip_f2_u64(x, y) as u64),
                });
            }
            ConstructionSpec::Half { n } => NmExtractor::half(*n)?,
            ConstructionSpec::Below { n } => NmExtractor::below(*n)?,
            ConstructionSpec::FpQuad { n, m } => NmExtractor::fp_quad(*n, *m)?,
            ConstructionSpec::Multibit { n, m } => {
                NmExtractor::multibit(NmExtractor::half(*n)?, *m)?
            }
            ConstructionSpec::ReducedSeed { n, t } => NmExtractor::reduced_seed(*n, *t)?,
            ConstructionSpec::GenericR { n, ell, r } => {
                NmExtractor::generic_r(*n, *ell, *r, SourceEnc::Identity)?
            }
        };
        let bits = nm
            .seed_bits()
            .ok_or_else(|| Error::InvalidParam("sweep needs a power-of-two seed domain".into()))?;
        Ok(BuiltConstruction {
            name: nm.name().into(),
            n: nm.source_bits(),
            m_bits: nm.output_bits(),
            seed_domain: AdversaryDomain::Pow2 { bits: bits as u32 },
            accepts_zero: nm.accepts_zero_source(),
            ext: nm.dense_fn()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceFamily {
    FlatRandom { k: u32, count: usize },
    /// Strings with the stated number of leading zero bits.
    PrefixZero { zeros: usize },
    FullCube,
    /// PrefixZero(n - k) plus `count` random flat k-sources, the pairing
    /// used for the negative-control comparison.
    NegativeControl { k: u32, count: usize },
}

impl SourceFamily {
    pub fn materialize(&self, n: usize, seed: u64, accepts_zero: bool) -> Result<Vec<FlatSource>> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xF1A7);
        let mut out = match self {
            SourceFamily::FlatRandom { k, count } => (0..*count)
                .map(|_| FlatSource::random(n, *k, &mut rng))
                .collect(),
            SourceFamily::PrefixZero { zeros } => vec![FlatSource::prefix_zero(n, *zeros)],
            SourceFamily::FullCube => vec![FlatSource::full_cube(n)],
            SourceFamily::NegativeControl { k, count } => {
                let mut v = vec![FlatSource::prefix_zero(n, n - *k as usize)];
                v.extend((0..*count).map(|_| FlatSource::random(n, *k, &mut rng)));
                v
            }
        };
        if !accepts_zero {
            for s in &mut out {
                if s.support().contains(&0) {
                    let kept: Vec<u64> = s.support().iter().copied().filter(|&v| v != 0).collect();
                    *s = FlatSource::new(s.n_bits(), kept)?;
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepMode {
    Exhaustive,
    MonteCarlo { trials: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NmSweepConfig {
    pub construction: ConstructionSpec,
    pub sources: SourceFamily,
    pub adversaries: AdversaryFamily,
    pub mode: SweepMode,
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub cap: u128,
}

fn default_cap() -> u128 {
    DEFAULT_ENUM_CAP
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NmSweepReport {
    pub construction: String,
    pub adversary_family: String,
    pub coverage: String,
    pub exhaustive: bool,
    pub sources: usize,
    pub adversaries: u64,
    pub cells: u64,
    /// Exact rational (exhaustive) or point estimate (Monte Carlo).
    pub max_error: String,
    pub max_error_f64: f64,
    /// Envelope on |estimate - truth| in Monte-Carlo mode.
    pub mc_envelope: Option<f64>,
    pub argmax_source: usize,
    pub argmax_adversary: u64,
    pub histogram: Vec<(String, u64)>,
}

fn uniform_seed_dist(domain: AdversaryDomain) -> ExplicitDist {
    let size = domain.size();
    let bits = 64 - (size - 1).leading_zeros() as usize;
    let p = q_u128(1, size as u128);
    let pmf = (0..size).map(|y| (y, p.clone())).collect();
    ExplicitDist::new(bits.max(1), pmf).expect("uniform pmf sums to one")
}

fn mc_estimate<F>(
    ext: &F,
    m_bits: usize,
    src: &FlatSource,
    domain: AdversaryDomain,
    adv: &TableAdversary,
    trials: u64,
    seed: u64,
) -> (Q, f64)
where
    F: Fn(u64, u64) -> u64 + Sync + ?Sized,
{
    let size = domain.size();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut counts: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
    for _ in 0..trials {
        let x = src.support()[rng.gen_range(0..src.support().len())];
        let y = rng.gen_range(0..size);
        let key = ext(x, y) | ext(x, adv.apply(y)) << m_bits | y << (2 * m_bits);
        *counts.entry(key).or_insert(0) += 1;
    }
    // plug-in TV against the first coordinate replaced by uniform
    let mut rest: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
    for (&k, &c) in &counts {
        *rest.entry(k >> m_bits).or_insert(0) += c;
    }
    let cells = 1u64 << m_bits;
    let mut tv = Q::zero();
    for (&r, &rc) in &rest {
        for z in 0..cells {
            let actual = counts.get(&(r << m_bits | z)).copied().unwrap_or(0);
            tv += (q_u128(actual as u128, trials as u128)
                - q_u128(rc as u128, trials as u128) / q_u128(cells as u128, 1))
            .abs();
        }
    }
    tv /= q_u128(2, 1);
    // normal-approximation envelope: per-cell sampling error accumulated
    // over the occupied cells
    let occupied = (rest.len() as u64 * cells) as f64;
    let envelope = 3.0 * (occupied / (4.0 * trials as f64)).sqrt();
    (tv, envelope)
}

/// Run a sweep; exhaustive cells compute the exact joint and distance.
pub fn run_nm_sweep(cfg: &NmSweepConfig) -> Result<NmSweepReport> {
    let built = cfg.construction.build()?;
    let sources = cfg.sources.materialize(built.n, cfg.seed, built.accepts_zero)?;
    let seed_dist = uniform_seed_dist(built.seed_domain);
    let coverage = if cfg.adversaries.is_complete() {
        "worst-case (all fixed-point-free functions enumerated)".to_string()
    } else {
        format!("family-max over `{}`; not a worst-case bound", cfg.adversaries.label())
    };

    let mut max_err = Q::zero();
    let mut argmax = (0usize, 0u64);
    let mut n_advs = 0u64;
    let mut cells = 0u64;
    let mut hist = vec![0u64; 11];
    let mut envelope = None;

    for (si, src) in sources.iter().enumerate() {
        let advs = gen_adversaries(&cfg.adversaries, built.seed_domain, cfg.seed)?;
        let mut results: Vec<(u64, Q)> = advs
            .enumerate()
            .par_bridge()
            .map(|(ai, adv)| {
                let err = match cfg.mode {
                    SweepMode::Exhaustive => {
                        let j = nm_joint(&built.ext, built.m_bits, src, &seed_dist, &[&adv], cfg.cap)?;
                        nm_error(&j)?
                    }
                    SweepMode::MonteCarlo { trials } => {
                        mc_estimate(
                            built.ext.as_ref(),
                            built.m_bits,
                            src,
                            built.seed_domain,
                            &adv,
                            trials,
                            cfg.seed ^ (ai as u64).wrapping_mul(0x9e3779b97f4a7c15),
                        )
                        .0
                    }
                };
                Ok((ai as u64, err))
            })
            .collect::<Result<_>>()?;
        if results.is_empty() {
            // no tamper functions: the experiment degenerates to the plain
            // strong-extractor error of the construction
            let j = nm_joint(&built.ext, built.m_bits, src, &seed_dist, &[], cfg.cap)?;
            results.push((0, nm_error(&j)?));
        }
        if si == 0 {
            n_advs = results.len() as u64;
        }
        cells += results.len() as u64;
        for (ai, err) in results {
            let f = err.to_f64().unwrap_or(1.0);
            let bucket = ((f * 20.0).floor() as usize).min(10);
            hist[bucket] += 1;
            if err > max_err {
                max_err = err;
                argmax = (si, ai);
            }
        }
    }
    if let SweepMode::MonteCarlo { trials } = cfg.mode {
        let cells_per = (1u64 << (2 * built.m_bits)) * built.seed_domain.size();
        envelope = Some(3.0 * (cells_per as f64 / (4.0 * trials as f64)).sqrt());
    }

    Ok(NmSweepReport {
        construction: built.name,
        adversary_family: cfg.adversaries.label().into(),
        coverage,
        exhaustive: matches!(cfg.mode, SweepMode::Exhaustive),
        sources: sources.len(),
        adversaries: n_advs,
        cells,
        max_error: q_string(&max_err),
        max_error_f64: max_err.to_f64().unwrap_or(f64::NAN),
        mc_envelope: envelope,
        argmax_source: argmax.0,
        argmax_adversary: argmax.1,
        histogram: hist
            .into_iter()
            .enumerate()
            .map(|(i, c)| (format!("[{:.2},{:.2})", i as f64 / 20.0, (i + 1) as f64 / 20.0), c))
            .collect(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NegativeControlReport {
    pub n: usize,
    pub k: u32,
    pub raw_ip_max: String,
    pub raw_ip_max_f64: f64,
    pub nm_half_max: String,
    pub nm_half_max_f64: f64,
    /// raw-ip family max at least twice the encoded construction's.
    pub separation_factor_2: bool,
}

/// The negative-control experiment: identical source and adversary families,
/// plain IP against the encoded construction.
pub fn negative_control_comparison(n: usize, k: u32, seed: u64) -> Result<NegativeControlReport> {
    let sources = SourceFamily::NegativeControl { k, count: 8 };
    let raw = run_nm_sweep(&NmSweepConfig {
        construction: ConstructionSpec::RawIp { n },
        sources: sources.clone(),
        adversaries: AdversaryFamily::Offset,
        mode: SweepMode::Exhaustive,
        seed,
        cap: DEFAULT_ENUM_CAP,
    })?;
    let half = run_nm_sweep(&NmSweepConfig {
        construction: ConstructionSpec::Half { n },
        sources,
        adversaries: AdversaryFamily::Offset,
        mode: SweepMode::Exhaustive,
        seed,
        cap: DEFAULT_ENUM_CAP,
    })?;
    Ok(NegativeControlReport {
        n,
        k,
        separation_factor_2: raw.max_error_f64 >= 2.0 * half.max_error_f64
            && half.max_error_f64 > 0.0
            || (half.max_error_f64 == 0.0 && raw.max_error_f64 > 0.0),
        raw_ip_max: raw.max_error,
        raw_ip_max_f64: raw.max_error_f64,
        nm_half_max: half.max_error,
        nm_half_max_f64: half.max_error_f64,
    })
}
