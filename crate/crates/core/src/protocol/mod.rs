//! The 2-round privacy amplification protocol: polynomial MAC, alternating
//! extraction / look-ahead extractor, Alice and Bob state machines, the
//! adversarial channel, and session simulation with exact micro-scale
//! analysis.

pub mod alt;
pub mod eve;
pub mod mac;
pub mod params;
pub mod party;
pub mod session;

pub use alt::{alt_extract, look_ahead_ext, AltTranscript};
pub use eve::EveStrategy;
pub use mac::{mac_forgery_advantage, mac_leakage_advantage, mac_tag};
pub use params::{ProtocolInstance, ProtocolParams};
pub use party::{alice_finalize, alice_round1, bob_round, Msg1, Msg2, PartyOutcome};
pub use session::{
    micro_exhaustive_passive, run_sessions, run_transcripts, wilson_interval, ExactPassiveStats,
    SessionStats, SessionTranscript, SourceSpec,
};
