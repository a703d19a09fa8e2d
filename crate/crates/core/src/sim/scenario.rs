//! Declarative scenario scripts (TOML).
//!
//! ```toml
//! seed = 7
//! delta_t_ms = 5000
//!
//! [roster]
//! amfs = ["amf1"]
//! gnbs = [{ name = "gnb1", amf = "amf1" }]
//! mds = [{ name = "md1", amf = "amf1" }]
//!
//! [[events]]
//! at_ms = 0
//! kind = "delegate"
//! md = "md1"
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::protocol::wire::MessageKind;
use crate::protocol::{Rejection, Role, DEFAULT_DELTA_T_MS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GnbSpec {
    pub name: String,
    pub amf: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdSpec {
    pub name: String,
    /// Serving AMF after the initial attach; defaults to the first AMF.
    #[serde(default)]
    pub amf: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Roster {
    #[serde(default = "default_ausf")]
    pub ausf: String,
    pub amfs: Vec<String>,
    pub gnbs: Vec<GnbSpec>,
    pub mds: Vec<MdSpec>,
}

fn default_ausf() -> String {
    "ausf".into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Latency {
    #[serde(default = "default_wired")]
    pub wired_ms: u64,
    #[serde(default = "default_wireless")]
    pub wireless_ms: u64,
}

fn default_wired() -> u64 {
    1
}

fn default_wireless() -> u64 {
    5
}

impl Default for Latency {
    fn default() -> Self {
        Latency {
            wired_ms: default_wired(),
            wireless_ms: default_wireless(),
        }
    }
}

/// Which channels the adversary sees. Wireless channels are always tapped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TapConfig {
    #[serde(default)]
    pub wired: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScriptEvent {
    /// MD hands its authorized token to the twin, which obtains a delegation.
    Delegate { md: String },
    /// The twin's trajectory prediction fires for `gnb`.
    Handover { md: String, gnb: String },
    /// The MD reaches the cell of `gnb` and confirms the keys.
    EnterCell { md: String, gnb: String },
    LeaveCell { md: String, gnb: String },
    /// The MD moves into the domain of `amf`.
    InterAmf { md: String, amf: String },
}

impl ScriptEvent {
    pub fn md(&self) -> &str {
        match self {
            ScriptEvent::Delegate { md }
            | ScriptEvent::Handover { md, .. }
            | ScriptEvent::EnterCell { md, .. }
            | ScriptEvent::LeaveCell { md, .. }
            | ScriptEvent::InterAmf { md, .. } => md,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedEvent {
    pub at_ms: u64,
    #[serde(flatten)]
    pub event: ScriptEvent,
}

/// Adversary actions. Eavesdropping on tapped channels is always on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AdversaryAction {
    /// Re-deliver a copy of the `occurrence`-th tapped frame of `message` after `delay_ms`.
    Replay {
        message: String,
        #[serde(default)]
        occurrence: usize,
        delay_ms: u64,
    },
    /// XOR `xor` into byte `byte` of `field` of the matching frame in flight.
    Modify {
        message: String,
        #[serde(default)]
        occurrence: usize,
        field: String,
        #[serde(default)]
        byte: usize,
        #[serde(default = "default_xor")]
        xor: u8,
    },
    Drop {
        message: String,
        #[serde(default)]
        occurrence: usize,
    },
    /// Deliver a crafted frame (hex, tag byte first) at `at_ms`.
    Inject {
        at_ms: u64,
        from: String,
        to: String,
        frame: String,
    },
}

fn default_xor() -> u8 {
    1
}

impl AdversaryAction {
    pub fn message_kind(&self) -> Option<Result<MessageKind, ConfigError>> {
        let name = match self {
            AdversaryAction::Replay { message, .. }
            | AdversaryAction::Modify { message, .. }
            | AdversaryAction::Drop { message, .. } => message,
            AdversaryAction::Inject { .. } => return None,
        };
        Some(parse_kind(name))
    }
}

pub fn parse_kind(name: &str) -> Result<MessageKind, ConfigError> {
    MessageKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| ConfigError::Invalid(format!("unknown message kind `{name}`")))
}

/// Unknown-attack injection on intra-AMF handover exchanges. A step is one
/// of the four handover messages (request, response, notification, ack);
/// the message at that step is destroyed in transit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnknownAttack {
    #[serde(default)]
    pub step: Option<usize>,
    /// Each handover is attacked with this probability at a uniformly chosen step.
    #[serde(default)]
    pub p_fail: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    SessionEstablished,
    /// The MD rejected the prepared keys or had none and fell back to the standard procedure.
    Fallback,
    Rejected,
    Incomplete,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::SessionEstablished => "session-established",
            Outcome::Fallback => "fallback",
            Outcome::Rejected => "rejected",
            Outcome::Incomplete => "incomplete",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedRejection {
    pub by: Role,
    pub reason: Rejection,
}

/// Declared expected results; when present, the run is judged against it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    #[serde(default)]
    pub outcomes: BTreeMap<String, Outcome>,
    #[serde(default)]
    pub rejections: Vec<ExpectedRejection>,
}

/// Number of messages in one intra-AMF handover exchange.
pub const HANDOVER_STEPS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioScript {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_delta_t")]
    pub delta_t_ms: u64,
    pub roster: Roster,
    #[serde(default)]
    pub latency: Latency,
    #[serde(default)]
    pub tap: TapConfig,
    #[serde(default)]
    pub events: Vec<TimedEvent>,
    #[serde(default)]
    pub adversary: Vec<AdversaryAction>,
    #[serde(default)]
    pub unknown_attack: Option<UnknownAttack>,
    #[serde(default)]
    pub expect: Option<Expectation>,
}

fn default_delta_t() -> u64 {
    DEFAULT_DELTA_T_MS
}

impl ScenarioScript {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let s: ScenarioScript = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Fails for integers outside the signed 64-bit range TOML can hold.
    pub fn to_toml(&self) -> Result<String, ConfigError> {
        toml::to_string(self).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Happy-path intra-AMF handover for `n` devices toward one target gNB.
    pub fn intra_handover(n: usize, seed: u64) -> Self {
        let mds: Vec<MdSpec> = (1..=n)
            .map(|i| MdSpec {
                name: format!("md{i}"),
                amf: None,
            })
            .collect();
        let mut events = Vec::new();
        for md in &mds {
            events.push(TimedEvent {
                at_ms: 0,
                event: ScriptEvent::Delegate { md: md.name.clone() },
            });
            events.push(TimedEvent {
                at_ms: 100,
                event: ScriptEvent::Handover {
                    md: md.name.clone(),
                    gnb: "gnb2".into(),
                },
            });
            events.push(TimedEvent {
                at_ms: 200,
                event: ScriptEvent::EnterCell {
                    md: md.name.clone(),
                    gnb: "gnb2".into(),
                },
            });
        }
        ScenarioScript {
            seed,
            delta_t_ms: DEFAULT_DELTA_T_MS,
            roster: Roster {
                ausf: default_ausf(),
                amfs: vec!["amf1".into()],
                gnbs: vec![
                    GnbSpec {
                        name: "gnb1".into(),
                        amf: "amf1".into(),
                    },
                    GnbSpec {
                        name: "gnb2".into(),
                        amf: "amf1".into(),
                    },
                ],
                mds,
            },
            latency: Latency::default(),
            tap: TapConfig::default(),
            events,
            adversary: Vec::new(),
            unknown_attack: None,
            expect: None,
        }
    }

    /// Delegation under AMF1, move to AMF2, then a handover to a gNB of AMF2.
    pub fn inter_amf(n: usize, seed: u64) -> Self {
        let mut s = ScenarioScript::intra_handover(n, seed);
        s.roster.amfs.push("amf2".into());
        s.roster.gnbs.push(GnbSpec {
            name: "gnb3".into(),
            amf: "amf2".into(),
        });
        let mut events = Vec::new();
        for md in &s.roster.mds {
            let md = md.name.clone();
            events.push(TimedEvent {
                at_ms: 0,
                event: ScriptEvent::Delegate { md: md.clone() },
            });
            events.push(TimedEvent {
                at_ms: 100,
                event: ScriptEvent::InterAmf {
                    md: md.clone(),
                    amf: "amf2".into(),
                },
            });
            events.push(TimedEvent {
                at_ms: 200,
                event: ScriptEvent::Handover {
                    md: md.clone(),
                    gnb: "gnb3".into(),
                },
            });
            events.push(TimedEvent {
                at_ms: 300,
                event: ScriptEvent::EnterCell {
                    md,
                    gnb: "gnb3".into(),
                },
            });
        }
        s.events = events;
        s
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let r = &self.roster;
        if r.amfs.is_empty() || r.gnbs.is_empty() || r.mds.is_empty() {
            return invalid("roster needs at least one AMF, gNB and MD");
        }
        if self.delta_t_ms == 0 {
            return invalid("delta_t_ms must be positive");
        }
        let mut names = BTreeSet::new();
        let all = std::iter::once(&r.ausf)
            .chain(r.amfs.iter())
            .chain(r.gnbs.iter().map(|g| &g.name))
            .chain(r.mds.iter().map(|m| &m.name));
        for name in all {
            if name.is_empty() || name.contains('/') {
                return invalid(format!("bad entity name `{name}`"));
            }
            if !names.insert(name.as_str()) {
                return invalid(format!("duplicate entity name `{name}`"));
            }
        }
        let amfs: BTreeSet<&str> = r.amfs.iter().map(String::as_str).collect();
        let gnbs: BTreeSet<&str> = r.gnbs.iter().map(|g| g.name.as_str()).collect();
        let mds: BTreeSet<&str> = r.mds.iter().map(|m| m.name.as_str()).collect();
        for g in &r.gnbs {
            if !amfs.contains(g.amf.as_str()) {
                return invalid(format!("gNB `{}` refers to unknown AMF `{}`", g.name, g.amf));
            }
        }
        for m in &r.mds {
            if let Some(a) = &m.amf {
                if !amfs.contains(a.as_str()) {
                    return invalid(format!("MD `{}` refers to unknown AMF `{a}`", m.name));
                }
            }
        }
        for e in &self.events {
            if !mds.contains(e.event.md()) {
                return invalid(format!("event refers to unknown MD `{}`", e.event.md()));
            }
            match &e.event {
                ScriptEvent::Handover { gnb, .. }
                | ScriptEvent::EnterCell { gnb, .. }
                | ScriptEvent::LeaveCell { gnb, .. } => {
                    if !gnbs.contains(gnb.as_str()) {
                        return invalid(format!("event refers to unknown gNB `{gnb}`"));
                    }
                }
                ScriptEvent::InterAmf { amf, .. } => {
                    if !amfs.contains(amf.as_str()) {
                        return invalid(format!("event refers to unknown AMF `{amf}`"));
                    }
                }
                ScriptEvent::Delegate { .. } => {}
            }
        }
        for a in &self.adversary {
            if let Some(kind) = a.message_kind() {
                kind?;
            }
            if let AdversaryAction::Inject { from, to, frame, .. } = a {
                for name in [from, to] {
                    let base = name.strip_suffix("/dt").unwrap_or(name);
                    if !names.contains(base) {
                        return invalid(format!("inject refers to unknown entity `{name}`"));
                    }
                }
                if hex::decode(frame).map(|b| b.is_empty()).unwrap_or(true) {
                    return invalid("inject frame must be non-empty hex");
                }
            }
        }
        if let Some(u) = &self.unknown_attack {
            match (u.step, u.p_fail) {
                (Some(s), None) if (1..=HANDOVER_STEPS).contains(&s) => {}
                (None, Some(p)) if (0.0..1.0).contains(&p) => {}
                _ => return invalid("unknown_attack needs exactly one of step (1..=4) or p_fail in [0, 1)"),
            }
        }
        if let Some(x) = &self.expect {
            for md in x.outcomes.keys() {
                if !mds.contains(md.as_str()) {
                    return invalid(format!("expectation refers to unknown MD `{md}`"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_scenarios_validate() {
        ScenarioScript::intra_handover(3, 1).validate().unwrap();
        ScenarioScript::inter_amf(2, 1).validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let s = ScenarioScript::inter_amf(2, 9);
        assert_eq!(ScenarioScript::from_toml(&s.to_toml().unwrap()).unwrap(), s);
    }

    #[test]
    fn parses_documented_example() {
        let s = ScenarioScript::from_toml(
            r#"
            seed = 7
            [roster]
            amfs = ["amf1"]
            gnbs = [{ name = "gnb1", amf = "amf1" }]
            mds = [{ name = "md1" }]
            [[events]]
            at_ms = 0
            kind = "delegate"
            md = "md1"
            [[adversary]]
            action = "replay"
            message = "handover-request"
            delay_ms = 6000
            [expect]
            outcomes = { md1 = "incomplete" }
            rejections = [{ by = "gnb", reason = "freshness" }]
            "#,
        )
        .unwrap();
        assert_eq!(s.delta_t_ms, DEFAULT_DELTA_T_MS);
        assert_eq!(s.latency, Latency::default());
    }

    #[test]
    fn rejects_bad_rosters() {
        let mut s = ScenarioScript::intra_handover(1, 0);
        s.roster.gnbs[0].amf = "nowhere".into();
        assert!(s.validate().is_err());

        let mut s = ScenarioScript::intra_handover(1, 0);
        s.roster.mds.clear();
        assert!(s.validate().is_err());

        let mut s = ScenarioScript::intra_handover(1, 0);
        s.unknown_attack = Some(UnknownAttack {
            step: Some(5),
            p_fail: None,
        });
        assert!(s.validate().is_err());

        assert!(matches!(ScenarioScript::from_toml("seed = "), Err(ConfigError::Parse(_))));
    }
}
