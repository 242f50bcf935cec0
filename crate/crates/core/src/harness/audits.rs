//! Orchestration of the preimage and column-independence audits over
//! adversary families, exhaustively where the function space allows and by
//! seeded sampling above that.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::TableAdversary;
use crate::codes::{
    audit_linear_independence, audit_preimages_fp, audit_preimages_linear, audit_preimages_sum,
    EmbedMode, SeedEncoding,
};
use crate::error::Result;
use crate::fields::{FpCtx, Gf2Ctx};

use super::adversaries::{gen_adversaries, AdversaryDomain, AdversaryFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuditClaim {
    /// Every w-subset of BCH parity-check columns is independent.
    BchIndependence { ell: u32, r: u32, w: usize },
    /// enc(y) xor enc(A(y)) has at most 2 preimages.
    PreimageSum { ell: u32, embed: EmbedMode },
    /// t1*(z,z^3) + t2*(z',z'^3) has at most 3 preimages.
    PreimageLinear { ell: u32, embed: EmbedMode },
    /// (y,y^2) + r*(y',y'^2) over F_p has at most 2 preimages.
    PreimageFp { p: u64 },
}

impl AuditClaim {
    pub fn bound(&self) -> u32 {
        match self {
            AuditClaim::BchIndependence { .. } => 0, // ok/witness, not a count
            AuditClaim::PreimageSum { .. } => 2,
            AuditClaim::PreimageLinear { .. } => 3,
            AuditClaim::PreimageFp { .. } => 2,
        }
    }

    pub fn label(&self) -> String {
        match self {
            AuditClaim::BchIndependence { ell, r, w } => {
                format!("bch-independence ell={ell} r={r} w={w}")
            }
            AuditClaim::PreimageSum { ell, .. } => format!("preimage-sum ell={ell}"),
            AuditClaim::PreimageLinear { ell, .. } => format!("preimage-linear ell={ell}"),
            AuditClaim::PreimageFp { p } => format!("preimage-fp p={p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuditMode {
    /// All fixed-point-free functions (and all coefficient choices).
    Exhaustive,
    /// Seeded random (adversary, coefficient) samples.
    Sample { count: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditConfig {
    pub claim: AuditClaim,
    pub mode: AuditMode,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u128,
}

fn default_budget() -> u128 {
    1 << 31
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReport {
    pub claim: String,
    pub params: serde_json::Value,
    pub functions_checked: u64,
    pub coefficient_choices: u64,
    pub max_preimages: u32,
    pub bound: u32,
    pub ok: bool,
    pub witness: Option<serde_json::Value>,
    pub coverage: String,
}

fn domain_for(ell: u32, embed: EmbedMode) -> AdversaryDomain {
    match embed {
        EmbedMode::TopBit => AdversaryDomain::Pow2 { bits: ell - 1 },
        EmbedMode::Identity => AdversaryDomain::Dense { size: (1u64 << ell) - 1 },
    }
}

struct SweepOutcome {
    functions: u64,
    coefficients: u64,
    max: u32,
    witness: Option<serde_json::Value>,
}

fn sweep_sum(enc: &SeedEncoding, advs: Vec<TableAdversary>) -> Result<SweepOutcome> {
    let results: Vec<(u32, u128, usize)> = advs
        .par_iter()
        .enumerate()
        .map(|(i, adv)| {
            let out = audit_preimages_sum(enc, adv)?;
            Ok((out.max, out.at_value, i))
        })
        .collect::<Result<_>>()?;
    let functions = results.len() as u64;
    let (max, at, idx) = results.into_iter().max_by_key(|&(m, _, _)| m).unwrap();
    Ok(SweepOutcome {
        functions,
        coefficients: 1,
        max,
        witness: Some(serde_json::json!({
            "adversary_table": advs[idx].table(),
            "value": at.to_string(),
        })),
    })
}

fn sweep_linear_exhaustive(enc: &SeedEncoding, advs: Vec<TableAdversary>) -> Result<SweepOutcome> {
    let ctx = *enc.ctx();
    let size = ctx.size() as u64;
    let coefficients = (size - 1) * size;
    let results: Vec<(u32, usize)> = advs
        .par_iter()
        .enumerate()
        .map(|(i, adv)| {
            let mut worst = 0u32;
            for t1 in 1..size {
                for t2 in 0..size {
                    let out = audit_preimages_linear(enc, adv, t1, t2)?;
                    worst = worst.max(out.max);
                }
            }
            Ok((worst, i))
        })
        .collect::<Result<_>>()?;
    let functions = results.len() as u64;
    let (max, idx) = results.into_iter().max_by_key(|&(m, _)| m).unwrap();
    Ok(SweepOutcome {
        functions,
        coefficients,
        max,
        witness: Some(serde_json::json!({ "adversary_table": advs[idx].table() })),
    })
}

fn sweep_linear_sampled(enc: &SeedEncoding, count: u64, seed: u64) -> Result<SweepOutcome> {
    let ctx = *enc.ctx();
    let size = ctx.size() as u64;
    let domain = enc.seed_count();
    let worst = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9e3779b97f4a7c15));
            let table: Vec<u32> = (0..domain)
                .map(|y| {
                    let mut v = rng.gen_range(0..domain - 1);
                    if v >= y {
                        v += 1;
                    }
                    v as u32
                })
                .collect();
            let adv = TableAdversary::new(table).unwrap();
            let t1 = rng.gen_range(1..size);
            let t2 = rng.gen_range(0..size);
            audit_preimages_linear(enc, &adv, t1, t2).map(|o| o.max)
        })
        .try_reduce(|| 0, |a, b| Ok(a.max(b)))?;
    Ok(SweepOutcome {
        functions: count,
        coefficients: count,
        max: worst,
        witness: None,
    })
}

fn sweep_fp(p: u64, advs: Vec<TableAdversary>) -> Result<SweepOutcome> {
    let fp = FpCtx::new(p)?;
    let coefficients = p - 1;
    let results: Vec<(u32, usize)> = advs
        .par_iter()
        .enumerate()
        .map(|(i, adv)| {
            let mut worst = 0u32;
            for r in 1..p {
                let out = audit_preimages_fp(&fp, adv, r)?;
                worst = worst.max(out.max);
            }
            Ok((worst, i))
        })
        .collect::<Result<_>>()?;
    let functions = results.len() as u64;
    let (max, idx) = results.into_iter().max_by_key(|&(m, _)| m).unwrap();
    Ok(SweepOutcome {
        functions,
        coefficients,
        max,
        witness: Some(serde_json::json!({ "adversary_table": advs[idx].table() })),
    })
}

/// Drive the configured audit and assemble its report.
pub fn run_preimage_audits(cfg: &AuditConfig) -> Result<AuditReport> {
    let params = serde_json::to_value(cfg.claim).unwrap_or(serde_json::Value::Null);
    match cfg.claim {
        AuditClaim::BchIndependence { ell, r, w } => {
            let enc = SeedEncoding::new(Gf2Ctx::new(ell), r, EmbedMode::Identity)?;
            let out = audit_linear_independence(&enc, w, cfg.budget)?;
            Ok(AuditReport {
                claim: cfg.claim.label(),
                params,
                functions_checked: 0,
                coefficient_choices: out.subsets_checked.min(u64::MAX as u128) as u64,
                max_preimages: 0,
                bound: 0,
                ok: out.ok,
                witness: out.witness.map(|w| serde_json::json!({ "columns": w })),
                coverage: "full column set, every subset enumerated".into(),
            })
        }
        AuditClaim::PreimageSum { ell, embed } => {
            let enc = SeedEncoding::new(Gf2Ctx::new(ell), 1, embed)?;
            let domain = domain_for(ell, embed);
            let out = match cfg.mode {
                AuditMode::Exhaustive => {
                    let advs: Vec<_> =
                        gen_adversaries(&AdversaryFamily::AllFunctions, domain, cfg.seed)?
                            .collect();
                    sweep_sum(&enc, advs)?
                }
                AuditMode::Sample { count } => {
                    let advs: Vec<_> = gen_adversaries(
                        &AdversaryFamily::RandomSample { count },
                        domain,
                        cfg.seed,
                    )?
                    .collect();
                    sweep_sum(&enc, advs)?
                }
            };
            finish(cfg, params, out)
        }
        AuditClaim::PreimageLinear { ell, embed } => {
            let enc = SeedEncoding::new(Gf2Ctx::new(ell), 1, embed)?;
            let domain = domain_for(ell, embed);
            let out = match cfg.mode {
                AuditMode::Exhaustive => {
                    let advs: Vec<_> =
                        gen_adversaries(&AdversaryFamily::AllFunctions, domain, cfg.seed)?
                            .collect();
                    sweep_linear_exhaustive(&enc, advs)?
                }
                AuditMode::Sample { count } => sweep_linear_sampled(&enc, count, cfg.seed)?,
            };
            finish(cfg, params, out)
        }
        AuditClaim::PreimageFp { p } => {
            let domain = AdversaryDomain::Dense { size: p };
            let out = match cfg.mode {
                AuditMode::Exhaustive => {
                    let advs: Vec<_> =
                        gen_adversaries(&AdversaryFamily::AllFunctions, domain, cfg.seed)?
                            .collect();
                    sweep_fp(p, advs)?
                }
                AuditMode::Sample { count } => {
                    let advs: Vec<_> = gen_adversaries(
                        &AdversaryFamily::RandomSample { count },
                        domain,
                        cfg.seed,
                    )?
                    .collect();
                    sweep_fp(p, advs)?
                }
            };
            finish(cfg, params, out)
        }
    }
}

fn finish(cfg: &AuditConfig, params: serde_json::Value, out: SweepOutcome) -> Result<AuditReport> {
    let bound = cfg.claim.bound();
    Ok(AuditReport {
        claim: cfg.claim.label(),
        params,
        functions_checked: out.functions,
        coefficient_choices: out.coefficients,
        max_preimages: out.max,
        bound,
        ok: out.max <= bound,
        witness: out.witness,
        coverage: match cfg.mode {
            AuditMode::Exhaustive => "all fixed-point-free functions".into(),
            AuditMode::Sample { count } => format!("{count} seeded samples; family-max only"),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_audit_exhaustive_identity_ell3() {
        let cfg = AuditConfig {
            claim: AuditClaim::PreimageSum { ell: 3, embed: EmbedMode::Identity },
            mode: AuditMode::Exhaustive,
            seed: 0,
            budget: 1 << 31,
        };
        let rep = run_preimage_audits(&cfg).unwrap();
        assert!(rep.ok, "max {}", rep.max_preimages);
        assert_eq!(rep.functions_checked, 279_936);
        assert_eq!(rep.max_preimages, 2);
    }

    #[test]
    fn sum_audit_exhaustive_topbit_ell3() {
        let cfg = AuditConfig {
            claim: AuditClaim::PreimageSum { ell: 3, embed: EmbedMode::TopBit },
            mode: AuditMode::Exhaustive,
            seed: 0,
            budget: 1 << 31,
        };
        let rep = run_preimage_audits(&cfg).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.functions_checked, 81); // 3^4 over the 4-seed domain
    }

    #[test]
    fn fp_audit_exhaustive_p5() {
        let cfg = AuditConfig {
            claim: AuditClaim::PreimageFp { p: 5 },
            mode: AuditMode::Exhaustive,
            seed: 0,
            budget: 1 << 31,
        };
        let rep = run_preimage_audits(&cfg).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.functions_checked, 1024); // 4^5
        assert_eq!(rep.coefficient_choices, 4);
    }

    #[test]
    fn sampled_linear_audit_runs() {
        let cfg = AuditConfig {
            claim: AuditClaim::PreimageLinear { ell: 5, embed: EmbedMode::TopBit },
            mode: AuditMode::Sample { count: 2000 },
            seed: 3,
            budget: 1 << 31,
        };
        let rep = run_preimage_audits(&cfg).unwrap();
        assert!(rep.ok, "sampled max {}", rep.max_preimages);
    }
}
