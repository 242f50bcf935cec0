//! `nmx`: sweeps, audits, protocol experiments and bound tables from the
//! command line.
//!
//! Exit codes: 0 when every asserted bound holds, 1 when a violation was
//! found, 2 on usage errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nmx_core::codes::EmbedMode;
use nmx_core::harness::{
    existence_bound_check, run_nm_sweep, run_preimage_audits, run_protocol_suite, AuditClaim,
    AuditConfig, AuditMode, NmSweepConfig, ProtocolSuiteConfig,
};
use nmx_core::harness::report::Envelope;
use nmx_core::protocol::run_transcripts;
use nmx_core::protocol::{EveStrategy, ProtocolInstance, ProtocolParams, SourceSpec};

#[derive(Parser)]
#[command(name = "nmx", version, about = "non-malleable extractor toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a non-malleability error sweep from a JSON config.
    Sweep(SweepArgs),
    /// Run a structural audit (column independence / preimage counts).
    Audit(AuditArgs),
    /// Run protocol sessions against a tampering strategy library.
    Protocol(ProtocolArgs),
    /// Evaluate the existence bounds for given parameters.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Path to an NmSweepConfig JSON document.
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fail (exit 1) if the measured max error exceeds this value.
    #[arg(long)]
    assert_max: Option<f64>,
}

#[derive(Args)]
struct AuditArgs {
    /// bch-independence | preimage-sum | preimage-linear | preimage-fp
    #[arg(long)]
    claim: String,
    /// Field width for the GF(2^ell) claims.
    #[arg(long, default_value_t = 3)]
    ell: u32,
    /// Encoding degree parameter for bch-independence.
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Subset size for bch-independence.
    #[arg(long, default_value_t = 4)]
    w: usize,
    /// Prime modulus for preimage-fp.
    #[arg(long, default_value_t = 7)]
    p: u64,
    /// topbit | identity
    #[arg(long, default_value = "identity")]
    embed: String,
    /// exhaustive | sample
    #[arg(long, default_value = "exhaustive")]
    mode: String,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProtocolArgs {
    /// micro | small | demo
    #[arg(long)]
    preset: String,
    /// Strategy name; omit to run the whole shipped library.
    #[arg(long)]
    eve: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also emit a robustness CSV table to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Dump this many session transcripts as JSON lines to the given path.
    #[arg(long)]
    transcripts: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    transcript_count: u64,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    d: u64,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long, default_value_t = 10.0)]
    c1: f64,
    #[arg(long, default_value_t = 10.0)]
    c2: f64,
}

fn emit(text: &str, out: &Option<PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run_sweep(args: &SweepArgs) -> ExitCode {
    let raw = match fs::read_to_string(&args.config) {
        Ok(s) => s,
        Err(e) => return fail(&format!("reading {}: {e}", args.config.display())),
    };
    let cfg: NmSweepConfig = match serde_json::from_str(&raw) {
        Ok(c) => c,
        Err(e) => return fail(&format!("parsing config: {e}")),
    };
    let report = match run_nm_sweep(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e.to_string()),
    };
    let violation = args
        .assert_max
        .map(|bound| report.max_error_f64 > bound)
        .unwrap_or(false);
    let env = Envelope::new("nm-sweep", Some(cfg.seed), Some(report.coverage.clone()), &report);
    if emit(&env.to_json().unwrap(), &args.out).is_err() {
        return fail("writing report");
    }
    if violation {
        eprintln!(
            "violation: max error {} above asserted bound {}",
            report.max_error_f64,
            args.assert_max.unwrap()
        );
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn run_audit(args: &AuditArgs) -> ExitCode {
    let embed = match args.embed.as_str() {
        "topbit" => EmbedMode::TopBit,
        "identity" => EmbedMode::Identity,
        other => return fail(&format!("unknown embed mode {other:?}")),
    };
    let claim = match args.claim.as_str() {
        "bch-independence" => AuditClaim::BchIndependence { ell: args.ell, r: args.r, w: args.w },
        "preimage-sum" => AuditClaim::PreimageSum { ell: args.ell, embed },
        "preimage-linear" => AuditClaim::PreimageLinear { ell: args.ell, embed },
        "preimage-fp" => AuditClaim::PreimageFp { p: args.p },
        other => return fail(&format!("unknown claim {other:?}")),
    };
    let mode = match args.mode.as_str() {
        "exhaustive" => AuditMode::Exhaustive,
        "sample" => AuditMode::Sample { count: args.samples },
        other => return fail(&format!("unknown mode {other:?}")),
    };
    let cfg = AuditConfig { claim, mode, seed: args.seed, budget: 1 << 31 };
    let report = match run_preimage_audits(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e.to_string()),
    };
    let ok = report.ok;
    let env = Envelope::new("audit", Some(args.seed), Some(report.coverage.clone()), &report);
    if emit(&env.to_json().unwrap(), &args.out).is_err() {
        return fail("writing report");
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("violation: audit failed, see witness in the report");
        ExitCode::from(1)
    }
}

fn run_protocol(args: &ProtocolArgs) -> ExitCode {
    let cfg = ProtocolSuiteConfig {
        preset: args.preset.clone(),
        trials: args.trials,
        seed: args.seed,
        eve: args.eve.clone(),
    };
    let report = match run_protocol_suite(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e.to_string()),
    };
    if let Some(path) = &args.transcripts {
        let params = match ProtocolParams::preset(&args.preset) {
            Ok(p) => p,
            Err(e) => return fail(&e.to_string()),
        };
        let eve = match &args.eve {
            Some(name) => match EveStrategy::by_name(name, &params) {
                Some(s) => s,
                None => return fail(&format!("unknown strategy {name:?}")),
            },
            None => EveStrategy::Passive,
        };
        let inst = match ProtocolInstance::new(params) {
            Ok(i) => i,
            Err(e) => return fail(&e.to_string()),
        };
        let spec = SourceSpec::Flat { k: inst.params.k };
        match run_transcripts(&inst, &spec, &eve, args.transcript_count, args.seed) {
            Ok(trs) => {
                let lines: Vec<String> = trs
                    .iter()
                    .map(|t| serde_json::to_string(t).expect("transcripts serialize"))
                    .collect();
                if fs::write(path, lines.join("\n") + "\n").is_err() {
                    return fail("writing transcripts");
                }
            }
            Err(e) => return fail(&e.to_string()),
        }
    }
    let note = format!(
        "relaxed widths: {}",
        if report.relaxations.is_empty() { "none".into() } else { report.relaxations.join("; ") }
    );
    let violation = report.correctness_failures > 0
        || report.robustness.iter().any(|r| !r.strategy.contains("passive") && !r.within_target);
    if let Some(path) = &args.csv {
        if fs::write(path, report.robustness_csv()).is_err() {
            return fail("writing csv");
        }
    }
    let env = Envelope::new("protocol-suite", Some(args.seed), Some(note), &report);
    if emit(&env.to_json().unwrap(), &args.out).is_err() {
        return fail("writing report");
    }
    if violation {
        eprintln!("violation: correctness or robustness target missed");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn run_bounds(args: &BoundsArgs) -> ExitCode {
    if args.k >= args.n || args.eps <= 0.0 || args.eps >= 1.0 {
        return fail("need k < n and 0 < eps < 1");
    }
    let report = existence_bound_check(
        args.n, args.k, args.d, args.m, args.eps, args.r, args.c1, args.c2,
    );
    let feasible = report.feasible;
    let env = Envelope::new("bounds", None, None, &report);
    println!("{}", env.to_json().unwrap());
    if feasible {
        ExitCode::SUCCESS
    } else {
        eprintln!("violation: parameters infeasible (negative margin)");
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Sweep(a) => run_sweep(a),
        Command::Audit(a) => run_audit(a),
        Command::Protocol(a) => run_protocol(a),
        Command::Bounds(a) => run_bounds(a),
    }
}
