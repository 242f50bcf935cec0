//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured numbers and its runtime (visible with --nocapture).
//!
//! Every tolerance is pinned here; golden rationals were frozen from the
//! first exhaustive runs and are compared exactly.

use std::time::{Duration, Instant};

use nmx_core::adversary::TableAdversary;
use nmx_core::codes::{audit_linear_independence, EmbedMode, SeedEncoding};
use nmx_core::dist::{
    nm_error, nm_error_per_seed, nm_joint, q, q_u128, ExplicitDist, FlatSource, Q,
    DEFAULT_ENUM_CAP,
};
use nmx_core::extractors::ip_f2_u64;
use nmx_core::fields::Gf2Ctx;
use nmx_core::harness::report::q_f64;
use nmx_core::harness::{
    negative_control_comparison, q_string, run_preimage_audits, AuditClaim, AuditConfig,
    AuditMode,
};
use nmx_core::nmext::NmExtractor;
use nmx_core::protocol::{
    mac_forgery_advantage, mac_leakage_advantage, micro_exhaustive_passive, run_sessions,
    wilson_interval, EveStrategy, ProtocolInstance, ProtocolParams, SourceSpec,
};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn finish(n: u32, desc: &str, detail: &str, start: Instant, budget: Duration, pass: bool) {
    let elapsed = start.elapsed();
    let verdict = if pass && elapsed <= budget { "PASS" } else { "FAIL" };
    println!("[{verdict}] criterion {n:02}: {desc} — {detail} ({elapsed:.2?})");
    assert!(pass, "criterion {n}: {desc}: {detail}");
    assert!(
        elapsed <= budget,
        "criterion {n} over budget: {elapsed:?} > {budget:?}"
    );
}

#[test]
fn criterion_01_bch_column_independence() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    for ell in [3u32, 4, 5, 6] {
        let enc = SeedEncoding::new(Gf2Ctx::new(ell), 1, EmbedMode::Identity).unwrap();
        let out = audit_linear_independence(&enc, 4, 1 << 31).unwrap();
        ok &= out.ok && out.witness.is_none();
        detail.push_str(&format!("ell={ell}: {} subsets ok; ", out.subsets_checked));
    }
    finish(
        1,
        "4-wise column independence at ell in 3..=6",
        &detail,
        start,
        Duration::from_secs(10),
        ok,
    );
}

#[test]
fn criterion_02_raw_ip_counterexample_exactness() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    for n in [4usize, 8, 12] {
        let x = FlatSource::prefix_zero(n, 1);
        let yd = ExplicitDist::uniform(n);
        let adv = TableAdversary::flip_top_bit(n as u32);
        let ext = |xv: u64, yv: u64| ip_f2_u64(xv, yv) as u64;
        let j = nm_joint(&ext, 1, &x, &yd, &[&adv], DEFAULT_ENUM_CAP).unwrap();
        let err = nm_error(&j).unwrap();
        ok &= err == q(1, 2);
        detail.push_str(&format!("n={n}: error {}; ", q_string(&err)));
    }
    finish(
        2,
        "raw-IP error is exactly 1/2 under the flip-bit adversary",
        &detail,
        start,
        Duration::from_secs(5),
        ok,
    );
}

#[test]
fn criterion_03_two_preimage_bound_exhaustive() {
    let start = Instant::now();
    let full = run_preimage_audits(&AuditConfig {
        claim: AuditClaim::PreimageSum { ell: 3, embed: EmbedMode::Identity },
        mode: AuditMode::Exhaustive,
        seed: 0,
        budget: 1 << 31,
    })
    .unwrap();
    let embedded = run_preimage_audits(&AuditConfig {
        claim: AuditClaim::PreimageSum { ell: 3, embed: EmbedMode::TopBit },
        mode: AuditMode::Exhaustive,
        seed: 0,
        budget: 1 << 31,
    })
    .unwrap();
    let ok = full.ok
        && embedded.ok
        && full.functions_checked == 279_936
        && embedded.functions_checked == 81;
    finish(
        3,
        "enc(y) xor enc(A(y)) has at most 2 preimages for every function at ell = 3",
        &format!(
            "full column set: {} functions, max {}; embedded: {} functions, max {}",
            full.functions_checked, full.max_preimages, embedded.functions_checked,
            embedded.max_preimages
        ),
        start,
        Duration::from_secs(600),
        ok,
    );
}

#[test]
fn criterion_04_three_preimage_bound() {
    let start = Instant::now();
    let exhaustive = run_preimage_audits(&AuditConfig {
        claim: AuditClaim::PreimageLinear { ell: 3, embed: EmbedMode::Identity },
        mode: AuditMode::Exhaustive,
        seed: 0,
        budget: 1 << 31,
    })
    .unwrap();
    let sampled = run_preimage_audits(&AuditConfig {
        claim: AuditClaim::PreimageLinear { ell: 5, embed: EmbedMode::TopBit },
        mode: AuditMode::Sample { count: 1_000_000 },
        seed: 0x11EA4,
        budget: 1 << 31,
    })
    .unwrap();
    let ok = exhaustive.ok && sampled.ok;
    finish(
        4,
        "t1*col + t2*col' has at most 3 preimages",
        &format!(
            "ell=3 exhaustive: {} functions x {} coefficient pairs, max {}; ell=5 sampled: {} samples, max {}",
            exhaustive.functions_checked,
            exhaustive.coefficient_choices,
            exhaustive.max_preimages,
            sampled.functions_checked,
            sampled.max_preimages
        ),
        start,
        Duration::from_secs(1800),
        ok,
    );
}

#[test]
fn criterion_05_fp_quadratic_preimage_bound() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    for p in [5u64, 7] {
        let rep = run_preimage_audits(&AuditConfig {
            claim: AuditClaim::PreimageFp { p },
            mode: AuditMode::Exhaustive,
            seed: 0,
            budget: 1 << 31,
        })
        .unwrap();
        ok &= rep.ok;
        detail.push_str(&format!(
            "p={p}: {} functions x {} coefficients, max {}; ",
            rep.functions_checked, rep.coefficient_choices, rep.max_preimages
        ));
    }
    finish(
        5,
        "(y,y^2) + r*(y',y'^2) has at most 2 preimages over all functions",
        &detail,
        start,
        Duration::from_secs(900),
        ok,
    );
}

#[test]
fn criterion_06_weak_seed_aggregation() {
    let start = Instant::now();
    let nm = NmExtractor::half(8).unwrap();
    let ext = nm.dense_fn().unwrap();
    let d = 3usize;
    let yd = ExplicitDist::uniform(d);
    let mut rng = ChaCha12Rng::seed_from_u64(0x6011);
    let src = FlatSource::random(8, 6, &mut rng);

    let mut violations = 0u64;
    let mut family = 0u64;
    for c in 1..(1u64 << d) {
        let adv = TableAdversary::offset(d as u32, c).unwrap();
        let j = nm_joint(&ext, 1, &src, &yd, &[&adv], DEFAULT_ENUM_CAP).unwrap();
        let per_seed = nm_error_per_seed(&j).unwrap();
        let eps: Vec<Q> = (0..1u64 << d)
            .map(|y| per_seed.get(&y).map(|(e, _)| e.clone()).unwrap_or_else(Q::zero))
            .collect();
        let uniform_err: Q = eps.iter().sum::<Q>() / q(1 << d, 1);
        // 1000 flat seed distributions: random non-empty supports
        let mut sub_rng = ChaCha12Rng::seed_from_u64(0x5eed ^ c);
        for _ in 0..1000 {
            use rand::Rng;
            let mask = sub_rng.gen_range(1u64..(1 << (1 << d)));
            let support: Vec<u64> = (0..1u64 << d).filter(|y| mask >> y & 1 == 1).collect();
            let t = support.len() as u128;
            let weak_err: Q =
                support.iter().map(|y| eps[*y as usize].clone()).sum::<Q>() / q_u128(t, 1);
            // 2^(d-k') * eps with 2^k' = |support|
            let bound = q_u128(1 << d, t) * &uniform_err;
            family += 1;
            if weak_err > bound {
                violations += 1;
            }
        }
    }
    finish(
        6,
        "weak-seed error aggregation for every sampled flat seed distribution",
        &format!("{family} flat seed distributions across 7 adversaries, {violations} violations"),
        start,
        Duration::from_secs(300),
        violations == 0,
    );
}

#[test]
fn criterion_07_mac_security_exact() {
    let start = Instant::now();
    let v = 4usize;
    // exact exhaustive forgery advantages, frozen from the first run
    let adv8 = mac_forgery_advantage(v, 8, 1 << 32).unwrap();
    let adv4 = mac_forgery_advantage(v, 4, 1 << 32).unwrap();
    let mut ok = adv8 <= q(2, 16) && adv4 <= q(1, 16);
    ok &= adv8 == q(1, 8) && adv4 == q(1, 16);

    // leakage resilience: every pattern of at most half the key bits at
    // d = 4 (162 patterns), plus a d = 8 selection including half-key ones
    let mut patterns: Vec<Vec<usize>> = Vec::new();
    for mask in 1u32..(1 << (2 * v)) {
        let b = mask.count_ones() as usize;
        if b <= v {
            patterns.push((0..2 * v).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    assert!(patterns.len() >= 50, "need at least 50 leakage patterns");
    let mut worst_slack = f64::INFINITY;
    for pat in &patterns {
        let adv = mac_leakage_advantage(v, 4, pat, 1 << 32).unwrap();
        let bound = nmx_core::protocol::mac::mac_bound(v, 4, 2 * v - pat.len());
        if adv > bound {
            ok = false;
        }
        worst_slack = worst_slack.min(q_f64(&bound) - q_f64(&adv));
    }
    let d8_patterns: Vec<Vec<usize>> = vec![
        vec![0],
        vec![0, 4],
        vec![1, 3, 5],
        vec![0, 1, 2, 3],
        vec![4, 5, 6, 7],
        vec![0, 2, 4, 6],
        vec![1, 3, 5, 7],
        vec![0, 1, 6, 7],
    ];
    for pat in &d8_patterns {
        let adv = mac_leakage_advantage(v, 8, pat, 1 << 32).unwrap();
        let bound = nmx_core::protocol::mac::mac_bound(v, 8, 2 * v - pat.len());
        if adv > bound {
            ok = false;
        }
    }
    finish(
        7,
        "polynomial MAC meets its exact forgery and leakage bounds",
        &format!(
            "adv(d=8) = {} <= 2/16, adv(d=4) = {} <= 1/16; {} d=4 leakage patterns (min slack {:.4}), {} d=8 patterns",
            q_string(&adv8),
            q_string(&adv4),
            patterns.len(),
            worst_slack,
            d8_patterns.len()
        ),
        start,
        Duration::from_secs(600),
        ok,
    );
}

#[test]
fn criterion_08_protocol_correctness() {
    let start = Instant::now();
    let small = ProtocolInstance::new(ProtocolParams::small()).unwrap();
    let stats = run_sessions(
        &small,
        &SourceSpec::Flat { k: small.params.k },
        &EveStrategy::Passive,
        100_000,
        0xC0211EC7,
    )
    .unwrap();
    let micro = ProtocolInstance::new(ProtocolParams::micro()).unwrap();
    let exact = micro_exhaustive_passive(&micro, micro.params.k, 0xE15A).unwrap();
    let ok = stats.both_accept_keys_equal == 100_000 && exact.all_correct;
    finish(
        8,
        "passive sessions always accept with equal keys",
        &format!(
            "small preset: {}/100000 Monte Carlo; micro: {} exhaustive cells all correct ({} end-to-end replays)",
            stats.both_accept_keys_equal, exact.cells, exact.end_to_end_sessions
        ),
        start,
        Duration::from_secs(300),
        ok,
    );
}

#[test]
fn criterion_09_protocol_robustness() {
    let start = Instant::now();
    let inst = ProtocolInstance::new(ProtocolParams::small()).unwrap();
    let eps_nominal = 2f64.powi(-(inst.params.s as i32));
    let mut detail = format!("epsilon(s) = {eps_nominal}; ");
    let mut ok = true;
    for eve in EveStrategy::shipped(&inst.params) {
        let stats = run_sessions(
            &inst,
            &SourceSpec::BlockUniformRow { row: 0 },
            &eve,
            100_000,
            0x0B57,
        )
        .unwrap();
        let rate = stats.robustness_rate();
        let (_, hi) = wilson_interval(stats.robustness_violations, stats.trials, 3.0);
        if rate > 0.05 {
            ok = false;
        }
        detail.push_str(&format!("{}: {:.5} (wilson<={:.5}); ", eve.name(), rate, hi));
    }
    finish(
        9,
        "robustness-violation rate at most 0.05 for every shipped strategy",
        &detail,
        start,
        Duration::from_secs(900),
        ok,
    );
}

#[test]
fn criterion_10_extraction_micro_exact() {
    let start = Instant::now();
    let inst = ProtocolInstance::new(ProtocolParams::micro()).unwrap();
    // frozen exact values from the first exhaustive runs at seed 0xE15A
    let frozen = [
        (6u32, "93445441/134217728"),
        (8, "104120359/268435456"),
        (10, "477211903/2147483648"),
    ];
    let mut tvs = Vec::new();
    let mut detail = String::new();
    let mut ok = true;
    for (k, golden) in frozen {
        let ex = micro_exhaustive_passive(&inst, k, 0xE15A).unwrap();
        ok &= q_string(&ex.key_tv) == golden;
        detail.push_str(&format!("k={k}: TV = {}; ", q_string(&ex.key_tv)));
        tvs.push(ex.key_tv);
    }
    // at the preset's promised entropy the distance is at most 1/2, and it
    // strictly decreases with each 2 extra bits of source entropy
    ok &= tvs[1] <= q(1, 2);
    ok &= tvs[0] > tvs[1] && tvs[1] > tvs[2];
    finish(
        10,
        "exact passive-view key distance at most 1/2 and strictly decreasing in k",
        &detail,
        start,
        Duration::from_secs(600),
        ok,
    );
}

#[test]
fn criterion_11_negative_control_separation() {
    let start = Instant::now();
    let rep = negative_control_comparison(8, 6, 0xC0FFEE).unwrap();
    // frozen golden values from the first exhaustive run
    let ok = rep.raw_ip_max == "1/2"
        && rep.nm_half_max == "43/512"
        && rep.separation_factor_2
        && rep.raw_ip_max_f64 >= 2.0 * rep.nm_half_max_f64;
    finish(
        11,
        "encoded construction beats raw IP by at least a factor of 2",
        &format!(
            "raw-IP family max {} vs encoded {} (factor {:.2})",
            rep.raw_ip_max,
            rep.nm_half_max,
            rep.raw_ip_max_f64 / rep.nm_half_max_f64
        ),
        start,
        Duration::from_secs(300),
        ok,
    );
}
