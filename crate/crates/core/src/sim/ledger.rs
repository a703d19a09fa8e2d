use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest as _, Sha256};

use crate::protocol::wire::MessageKind;
use crate::protocol::{OpCounts, Phase, Rejection, Role};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FlowStats {
    pub messages: u64,
    pub bits: u64,
}

/// One handover message as it left its sender.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StepCost {
    pub md: usize,
    pub step: usize,
    pub kind: &'static str,
    pub bits: u64,
    pub wireless: bool,
}

/// Costs accrued during a run: traffic per directed link and primitive ops per role.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CostLedger {
    pub flows: BTreeMap<(Role, Role), FlowStats>,
    pub ops: BTreeMap<(Role, Phase), OpCounts>,
    pub steps: Vec<StepCost>,
}

pub fn is_wireless(a: Role, b: Role) -> bool {
    a == Role::Md || b == Role::Md
}

impl CostLedger {
    pub fn record_send(&mut self, from: Role, to: Role, bits: u64) {
        let f = self.flows.entry((from, to)).or_default();
        f.messages += 1;
        f.bits += bits;
    }

    pub fn flow(&self, from: Role, to: Role) -> FlowStats {
        self.flows.get(&(from, to)).copied().unwrap_or_default()
    }

    /// MD→gNB payload bits.
    pub fn uplink_bits(&self) -> u64 {
        self.flow(Role::Md, Role::Gnb).bits
    }

    /// gNB→MD payload bits.
    pub fn downlink_bits(&self) -> u64 {
        self.flow(Role::Gnb, Role::Md).bits
    }

    /// Messages exchanged between MDs and gNBs over the air.
    pub fn access_messages(&self) -> u64 {
        self.flow(Role::Md, Role::Gnb).messages + self.flow(Role::Gnb, Role::Md).messages
    }

    pub fn wireless_bits(&self) -> u64 {
        self.flows
            .iter()
            .filter(|((a, b), _)| is_wireless(*a, *b))
            .map(|(_, f)| f.bits)
            .sum()
    }

    pub fn wireless_messages(&self) -> u64 {
        self.flows
            .iter()
            .filter(|((a, b), _)| is_wireless(*a, *b))
            .map(|(_, f)| f.messages)
            .sum()
    }

    pub fn ops(&self, role: Role, phase: Phase) -> OpCounts {
        self.ops.get(&(role, phase)).copied().unwrap_or_default()
    }

    /// Ops of `role` summed over the given phases.
    pub fn ops_in(&self, role: Role, phases: &[Phase]) -> OpCounts {
        let mut t = OpCounts::default();
        for p in phases {
            t += self.ops(role, *p);
        }
        t
    }

    /// Cumulative wireless bits after each handover step for one MD:
    /// entry `i` is the cost accrued up to and including message `i + 1`.
    pub fn step_profile(&self, md: usize) -> Vec<u64> {
        let mut acc = 0;
        self.steps
            .iter()
            .filter(|s| s.md == md)
            .map(|s| {
                if s.wireless {
                    acc += s.bits;
                }
                acc
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let flows: Vec<_> = self
            .flows
            .iter()
            .map(|((a, b), f)| {
                serde_json::json!({
                    "from": a.as_str(), "to": b.as_str(),
                    "wireless": is_wireless(*a, *b),
                    "messages": f.messages, "bits": f.bits,
                })
            })
            .collect();
        let ops: Vec<_> = self
            .ops
            .iter()
            .map(|((r, p), c)| serde_json::json!({ "role": r.as_str(), "phase": p, "counts": c }))
            .collect();
        serde_json::json!({
            "flows": flows,
            "ops": ops,
            "steps": self.steps,
            "uplink_bits": self.uplink_bits(),
            "downlink_bits": self.downlink_bits(),
            "access_messages": self.access_messages(),
        })
    }
}

/// A protocol rejection observed during a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectionRecord {
    pub at_ms: u64,
    pub by: Role,
    pub entity: String,
    pub message: Option<&'static str>,
    pub reason: Rejection,
    pub md: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranscriptRecord {
    pub seq: u64,
    pub t_ms: u64,
    pub event: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub records: Vec<TranscriptRecord>,
}

impl Transcript {
    pub fn push(&mut self, t_ms: u64, event: &'static str) -> &mut TranscriptRecord {
        let seq = self.records.len() as u64;
        self.records.push(TranscriptRecord {
            seq,
            t_ms,
            event,
            from: None,
            to: None,
            message: None,
            bits: None,
            frame: None,
            detail: None,
        });
        self.records.last_mut().expect("just pushed")
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn hash(&self) -> [u8; 32] {
        Sha256::digest(self.to_jsonl().as_bytes()).into()
    }

    pub fn count(&self, event: &str) -> usize {
        self.records.iter().filter(|r| r.event == event).count()
    }
}

impl TranscriptRecord {
    pub fn route(&mut self, from: &str, to: &str) -> &mut Self {
        self.from = Some(from.to_string());
        self.to = Some(to.to_string());
        self
    }

    pub fn message(&mut self, kind: Option<MessageKind>) -> &mut Self {
        self.message = kind.map(MessageKind::name);
        self
    }

    pub fn frame(&mut self, bytes: &[u8]) -> &mut Self {
        self.bits = Some((bytes.len().saturating_sub(1) * 8) as u64);
        self.frame = Some(hex::encode(bytes));
        self
    }

    pub fn detail(&mut self, d: impl Into<String>) -> &mut Self {
        self.detail = Some(d.into());
        self
    }
}
