//! Dolev-Yao adversary: sees every frame on tapped channels and may replay,
//! modify, drop or inject frames. Secret leakage is modeled by [`Adversary::corrupt`].

use std::collections::BTreeMap;

use super::scenario::{parse_kind, AdversaryAction};
use super::world::{Node, World};
use crate::crypto::{PointG1, Scalar};
use crate::protocol::wire::{Frame, MessageKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intercept {
    pub at_ms: u64,
    pub from: Node,
    pub to: Node,
    pub kind: Option<MessageKind>,
    pub bytes: Vec<u8>,
}

/// What the adversary does to a frame in flight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tamper {
    Drop,
    Modify { field: String, bytes: Vec<u8> },
    Replay { delay_ms: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SecretClass {
    LongTerm,
    Ephemeral,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorruptError {
    #[error("session {0} already leaked the other secret class")]
    BothClasses(usize),
    #[error("entity has no secret of that class for session {0}")]
    NothingToLeak(usize),
}

/// Values the adversary has learned, labeled for diagnostics.
#[derive(Clone, Debug, Default)]
pub struct Knowledge {
    pub scalars: Vec<(String, Scalar)>,
    pub points: Vec<(String, PointG1)>,
}

#[derive(Default)]
pub struct Adversary {
    pub log: Vec<Intercept>,
    plan: Vec<(MessageKind, usize, AdversaryAction)>,
    seen: BTreeMap<MessageKind, usize>,
    pub knowledge: Knowledge,
    leaked: BTreeMap<usize, SecretClass>,
}

impl Adversary {
    pub fn new(actions: &[AdversaryAction]) -> Self {
        let plan = actions
            .iter()
            .filter_map(|a| {
                let kind = parse_kind(match a {
                    AdversaryAction::Replay { message, .. }
                    | AdversaryAction::Modify { message, .. }
                    | AdversaryAction::Drop { message, .. } => message,
                    AdversaryAction::Inject { .. } => return None,
                })
                .ok()?;
                let occ = match a {
                    AdversaryAction::Replay { occurrence, .. }
                    | AdversaryAction::Modify { occurrence, .. }
                    | AdversaryAction::Drop { occurrence, .. } => *occurrence,
                    AdversaryAction::Inject { .. } => 0,
                };
                Some((kind, occ, a.clone()))
            })
            .collect();
        Adversary {
            plan,
            ..Default::default()
        }
    }

    /// Logs a tapped frame and returns the scripted interference for it.
    pub fn observe(&mut self, at_ms: u64, from: Node, to: Node, frame: &Frame) -> Vec<Tamper> {
        let kind = frame.kind();
        self.log.push(Intercept {
            at_ms,
            from,
            to,
            kind,
            bytes: frame.bytes.clone(),
        });
        let Some(kind) = kind else { return Vec::new() };
        let occ = {
            let c = self.seen.entry(kind).or_default();
            *c += 1;
            *c - 1
        };
        let mut out = Vec::new();
        for (k, o, action) in &self.plan {
            if *k != kind || *o != occ {
                continue;
            }
            match action {
                AdversaryAction::Drop { .. } => out.push(Tamper::Drop),
                AdversaryAction::Replay { delay_ms, .. } => out.push(Tamper::Replay { delay_ms: *delay_ms }),
                AdversaryAction::Modify { field, byte, xor, .. } => {
                    let mut bytes = frame.bytes.clone();
                    let pos = frame
                        .spans
                        .iter()
                        .find(|s| s.name == field)
                        .map(|s| s.offset + byte.min(&(s.len.saturating_sub(1))));
                    if let Some(p) = pos {
                        bytes[p] ^= *xor;
                    }
                    out.push(Tamper::Modify {
                        field: field.clone(),
                        bytes,
                    });
                }
                AdversaryAction::Inject { .. } => {}
            }
        }
        out
    }

    /// Leaks one class of secrets of `target` for the handover session of MD `session`.
    /// Leaking both classes for the same session is refused.
    pub fn corrupt(
        &mut self,
        world: &World,
        target: Node,
        class: SecretClass,
        session: usize,
    ) -> Result<(), CorruptError> {
        if let Some(prev) = self.leaked.get(&session) {
            if *prev != class {
                return Err(CorruptError::BothClasses(session));
            }
        }
        let tid = world.mds.get(session).and_then(|m| m.established().last()).map(|k| k.tid);
        let mut leaked: Vec<(String, Scalar)> = Vec::new();
        let name = world.name(target);
        match (target, class) {
            (Node::Md(i), SecretClass::LongTerm) => leaked.push((format!("{name}.sk"), world.mds[i].long_term())),
            (Node::Md(i), SecretClass::Ephemeral) => {
                leaked.extend(world.mds[i].ephemeral().map(|a| (format!("{name}.a"), a)))
            }
            (Node::Gnb(g), SecretClass::LongTerm) => leaked.push((format!("{name}.sk"), world.gnbs[g].long_term())),
            (Node::Gnb(g), SecretClass::Ephemeral) => {
                leaked.extend(tid.and_then(|t| world.gnbs[g].ephemeral(&t)).map(|c| (format!("{name}.c"), c)))
            }
            (Node::Dt(j), SecretClass::LongTerm) => {
                leaked.push((format!("{name}.sk"), world.dts[j].long_term()));
                leaked.extend(world.dts[j].delegation().map(|d| (format!("{name}.delta"), d.delta)));
            }
            (Node::Dt(j), SecretClass::Ephemeral) => {
                leaked.extend(world.dts[j].ephemerals().into_iter().map(|b| (format!("{name}.b"), b)));
            }
            (Node::Amf(a), SecretClass::LongTerm) => {
                let (sk, x) = world.amfs[a].long_term();
                leaked.push((format!("{name}.sk"), sk));
                leaked.push((format!("{name}.x"), x));
            }
            (Node::Ausf, SecretClass::LongTerm) => leaked.push((format!("{name}.s"), world.ausf.master().expose())),
            (Node::Amf(_) | Node::Ausf, SecretClass::Ephemeral) => {}
        }
        if leaked.is_empty() {
            return Err(CorruptError::NothingToLeak(session));
        }
        self.leaked.insert(session, class);
        self.knowledge.scalars.extend(leaked);
        Ok(())
    }

    /// Adds public keys and every group element visible in tapped frames.
    pub fn learn_public(&mut self, world: &World) {
        for (i, g) in world.gnbs.iter().enumerate() {
            self.knowledge.points.push((format!("{}.pk", world.name(Node::Gnb(i))), g.published_key().pk));
        }
        for (i, m) in world.mds.iter().enumerate() {
            self.knowledge.points.push((format!("{}.pk", world.name(Node::Md(i))), m.public_key().g1));
        }
        for (i, d) in world.dts.iter().enumerate() {
            self.knowledge.points.push((format!("{}.pk", world.name(Node::Dt(i))), d.public_key().g1));
        }
        self.knowledge.points.push(("P".into(), PointG1::generator()));
        let mut seen = Vec::new();
        for ic in &self.log {
            let frame = Frame::from_bytes(ic.bytes.clone());
            let Some(kind) = frame.kind() else { continue };
            for p in crate::protocol::messages::group_elements(kind, &frame.bytes) {
                if !seen.contains(&p) {
                    seen.push(p);
                    self.knowledge.points.push((format!("wire:{}", kind.name()), p));
                }
            }
        }
    }
}
