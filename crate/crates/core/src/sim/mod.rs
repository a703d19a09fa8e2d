//! Deterministic discrete-event network simulator.
//!
//! Wired channels connect the twin to gNBs and AMFs and AMFs to each other;
//! every link touching an MD is wireless and tapped by the adversary. One
//! ChaCha20 stream seeded from the run seed drives all randomness, and events
//! are ordered by `(time, insertion)`, so a run is reproducible bit for bit.

mod adversary;
mod engine;
mod ledger;
mod scenario;
mod world;

pub use adversary::{Adversary, CorruptError, Intercept, Knowledge, SecretClass, Tamper};
pub use engine::{handover_step, run_scenario, SimError, SimResult};
pub use ledger::{is_wireless, CostLedger, FlowStats, RejectionRecord, StepCost, Transcript, TranscriptRecord};
pub use scenario::{
    parse_kind, AdversaryAction, ConfigError, ExpectedRejection, Expectation, GnbSpec, Latency, MdSpec,
    Outcome, Roster, ScenarioScript, ScriptEvent, TapConfig, TimedEvent, UnknownAttack, HANDOVER_STEPS,
};
pub use world::{Node, World};

/// Cumulative wireless cost `Com_i` of one MD's handover when an unknown
/// attack destroys message `i`, for `i = 1..=N`. Each entry comes from its own run.
pub fn unknown_attack_profile(script: &ScenarioScript, seed: u64, md: usize) -> Result<Vec<u64>, SimError> {
    (1..=HANDOVER_STEPS)
        .map(|step| {
            let mut s = script.clone();
            s.unknown_attack = Some(UnknownAttack {
                step: Some(step),
                p_fail: None,
            });
            let r = run_scenario(&s, seed)?;
            Ok(r.ledger.step_profile(md).last().copied().unwrap_or(0))
        })
        .collect()
}
