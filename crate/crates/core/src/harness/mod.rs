//! Experiment driver: adversary-family generation, exhaustive and
//! Monte-Carlo sweeps, preimage and independence audits, the protocol
//! suite, the existence-bound calculator, and report emission.

pub mod adversaries;
pub mod audits;
pub mod bounds;
pub mod protocol_suite;
pub mod report;
pub mod sweeps;

pub use adversaries::{gen_adversaries, AdversaryDomain, AdversaryFamily};
pub use audits::{run_preimage_audits, AuditClaim, AuditConfig, AuditMode, AuditReport};
pub use bounds::{existence_bound_check, BoundsReport};
pub use protocol_suite::{run_protocol_suite, ProtocolSuiteConfig, ProtocolSuiteReport};
pub use report::q_string;
pub use sweeps::{
    negative_control_comparison, run_nm_sweep, ConstructionSpec, NmSweepConfig, NmSweepReport,
    SourceFamily, SweepMode,
};
