use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::adversary::{Adversary, Tamper};
use super::ledger::{is_wireless, CostLedger, RejectionRecord, StepCost, Transcript};
use super::scenario::{ConfigError, Expectation, Outcome, ScenarioScript, ScriptEvent, HANDOVER_STEPS};
use super::world::{Node, World};
use crate::protocol::messages::{
    AnchorUpdate, AuthorizedToken, ContextTransfer, DelegationRequest, DelegationResponse, HandoverAck,
    HandoverNotification, HandoverRequest, HandoverResponse, InterDelegationRequest,
    InterDelegationResponse,
};
use crate::protocol::wire::{Frame, MessageKind, WireMessage};
use crate::protocol::{Clock, OpTally, ProtocolError, Rejection, Role};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("network setup failed: {0}")]
    Setup(#[from] ProtocolError),
}

/// Position of a message within an intra-AMF handover exchange.
pub fn handover_step(kind: MessageKind) -> Option<usize> {
    match kind {
        MessageKind::HandoverRequest => Some(1),
        MessageKind::HandoverResponse => Some(2),
        MessageKind::HandoverNotification => Some(3),
        MessageKind::HandoverAck => Some(4),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Origin {
    Honest,
    Replay,
    Inject,
}

enum Ev {
    Script(ScriptEvent),
    Deliver {
        from: Node,
        to: Node,
        bytes: Vec<u8>,
        origin: Origin,
    },
    Flush(usize),
}

pub struct SimResult {
    pub transcript: Transcript,
    pub ledger: CostLedger,
    pub outcomes: BTreeMap<String, Outcome>,
    pub rejections: Vec<RejectionRecord>,
    pub world: World,
    pub adversary: Adversary,
}

impl SimResult {
    pub fn transcript_hash(&self) -> [u8; 32] {
        self.transcript.hash()
    }

    /// Differences between this run and a declared expectation; empty when it matches.
    pub fn mismatches(&self, expect: &Expectation) -> Vec<String> {
        let mut out = Vec::new();
        for (md, want) in &expect.outcomes {
            let got = self.outcomes.get(md).copied();
            if got != Some(*want) {
                out.push(format!(
                    "{md}: expected {}, got {}",
                    want.as_str(),
                    got.map(Outcome::as_str).unwrap_or("nothing")
                ));
            }
        }
        for r in &self.rejections {
            if !expect.rejections.iter().any(|e| e.by == r.by && e.reason == r.reason) {
                out.push(format!("unexpected rejection by {} ({}): {}", r.entity, r.by.as_str(), r.reason));
            }
        }
        for e in &expect.rejections {
            if !self.rejections.iter().any(|r| e.by == r.by && e.reason == r.reason) {
                out.push(format!("missing rejection by {}: {}", e.by.as_str(), e.reason));
            }
        }
        out
    }

    /// Problems that make the run a failure: expectation mismatches when the
    /// script declares an expectation, otherwise any protocol rejection.
    pub fn failures(&self, script: &ScenarioScript) -> Vec<String> {
        match &script.expect {
            Some(x) => self.mismatches(x),
            None => self
                .rejections
                .iter()
                .map(|r| format!("rejection by {}: {}", r.entity, r.reason))
                .collect(),
        }
    }
}

struct Engine<'a> {
    script: &'a ScenarioScript,
    world: World,
    rng: ChaCha20Rng,
    now: u64,
    seq: u64,
    queue: BTreeMap<(u64, u64), Ev>,
    tr: Transcript,
    ledger: CostLedger,
    adv: Adversary,
    rejections: Vec<RejectionRecord>,
    batches: BTreeMap<usize, Vec<(Node, HandoverRequest)>>,
    attack: Vec<Option<usize>>,
    inter_target: Vec<Option<usize>>,
    established: Vec<bool>,
    fallback: Vec<bool>,
}

/// Runs a scenario to completion. The same `(script, seed)` always yields
/// the same transcript.
pub fn run_scenario(script: &ScenarioScript, seed: u64) -> Result<SimResult, SimError> {
    script.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let world = World::build(&script.roster, &mut rng)?;
    let n = world.mds.len();
    let mut e = Engine {
        script,
        world,
        rng,
        now: 0,
        seq: 0,
        queue: BTreeMap::new(),
        tr: Transcript::default(),
        ledger: CostLedger::default(),
        adv: Adversary::new(&script.adversary),
        rejections: Vec::new(),
        batches: BTreeMap::new(),
        attack: vec![None; n],
        inter_target: vec![None; n],
        established: vec![false; n],
        fallback: vec![false; n],
    };
    for ev in &script.events {
        e.schedule(ev.at_ms, Ev::Script(ev.event.clone()));
    }
    for a in &script.adversary {
        if let super::scenario::AdversaryAction::Inject { at_ms, from, to, frame } = a {
            let (Some(from), Some(to)) = (e.world.node(from), e.world.node(to)) else {
                return Err(ConfigError::Invalid(format!("cannot route injected frame {from} -> {to}")).into());
            };
            let bytes = hex::decode(frame).map_err(|err| ConfigError::Invalid(err.to_string()))?;
            e.schedule(
                *at_ms,
                Ev::Deliver {
                    from,
                    to,
                    bytes,
                    origin: Origin::Inject,
                },
            );
        }
    }
    while let Some(((at, _), ev)) = e.queue.pop_first() {
        e.now = at;
        e.handle(ev);
    }
    Ok(e.finish())
}

fn decode<M: WireMessage>(bytes: &[u8]) -> Result<M, Rejection> {
    M::decode(bytes)
}

impl Engine<'_> {
    fn schedule(&mut self, at: u64, ev: Ev) {
        self.queue.insert((at, self.seq), ev);
        self.seq += 1;
    }

    fn clock(&self) -> Clock {
        Clock::new(self.now, self.script.delta_t_ms)
    }

    fn latency(&self, a: Node, b: Node) -> u64 {
        if is_wireless(a.role(), b.role()) {
            self.script.latency.wireless_ms
        } else {
            self.script.latency.wired_ms
        }
    }

    fn tapped(&self, a: Node, b: Node) -> bool {
        is_wireless(a.role(), b.role()) || self.script.tap.wired
    }

    fn md_of(a: Node, b: Node) -> Option<usize> {
        a.md().or(b.md())
    }

    fn reject(&mut self, by: Node, peer: Node, kind: Option<MessageKind>, reason: Rejection) {
        let entity = self.world.name(by);
        let md = Self::md_of(by, peer);
        self.tr
            .push(self.now, "reject")
            .route(&self.world.name(peer), &entity)
            .message(kind)
            .detail(reason.as_str());
        self.rejections.push(RejectionRecord {
            at_ms: self.now,
            by: by.role(),
            entity,
            message: kind.map(MessageKind::name),
            reason,
            md,
        });
    }

    fn note(&mut self, event: &'static str, node: Node, detail: impl Into<String>) {
        let name = self.world.name(node);
        self.tr.push(self.now, event).route(&name, &name).detail(detail);
    }

    fn send<M: WireMessage>(&mut self, from: Node, to: Node, msg: &M) {
        let frame = msg.encode();
        let bits = frame.payload_bits();
        self.ledger.record_send(from.role(), to.role(), bits);
        let (fname, tname) = (self.world.name(from), self.world.name(to));
        self.tr
            .push(self.now, "send")
            .route(&fname, &tname)
            .message(Some(M::KIND))
            .frame(&frame.bytes);

        if let (Some(step), Some(md)) = (handover_step(M::KIND), Self::md_of(from, to)) {
            self.ledger.steps.push(StepCost {
                md,
                step,
                kind: M::KIND.name(),
                bits,
                wireless: is_wireless(from.role(), to.role()),
            });
            if self.attack[md] == Some(step) {
                self.attack[md] = None;
                self.tr
                    .push(self.now, "unknown-attack")
                    .route(&fname, &tname)
                    .message(Some(M::KIND))
                    .detail(format!("step {step}"));
                return;
            }
        }

        let at = self.now + self.latency(from, to);
        let mut bytes = frame.bytes.clone();
        if self.tapped(from, to) {
            for t in self.adv.observe(self.now, from, to, &frame) {
                match t {
                    Tamper::Drop => {
                        self.tr.push(self.now, "drop").route(&fname, &tname).message(Some(M::KIND));
                        return;
                    }
                    Tamper::Modify { field, bytes: b } => {
                        self.tr
                            .push(self.now, "modify")
                            .route(&fname, &tname)
                            .message(Some(M::KIND))
                            .frame(&b)
                            .detail(field);
                        bytes = b;
                    }
                    Tamper::Replay { delay_ms } => {
                        self.tr
                            .push(self.now, "replay-scheduled")
                            .route(&fname, &tname)
                            .message(Some(M::KIND))
                            .detail(format!("delay {delay_ms} ms"));
                        self.schedule(
                            at + delay_ms,
                            Ev::Deliver {
                                from,
                                to,
                                bytes: frame.bytes.clone(),
                                origin: Origin::Replay,
                            },
                        );
                    }
                }
            }
        }
        self.schedule(
            at,
            Ev::Deliver {
                from,
                to,
                bytes,
                origin: Origin::Honest,
            },
        );
    }

    fn handle(&mut self, ev: Ev) {
        match ev {
            Ev::Script(s) => self.script_event(s),
            Ev::Deliver {
                from,
                to,
                bytes,
                origin,
            } => {
                let event = match origin {
                    Origin::Honest => "deliver",
                    Origin::Replay => "replay",
                    Origin::Inject => "inject",
                };
                let kind = Frame::from_bytes(bytes.clone()).kind();
                self.tr
                    .push(self.now, event)
                    .route(&self.world.name(from), &self.world.name(to))
                    .message(kind)
                    .frame(&bytes);
                match kind {
                    Some(k) => {
                        if let Err(r) = self.deliver(from, to, k, &bytes) {
                            self.reject(to, from, Some(k), r);
                        }
                    }
                    None => self.reject(to, from, None, Rejection::Malformed),
                }
            }
            Ev::Flush(g) => self.flush(g),
        }
    }

    fn script_event(&mut self, s: ScriptEvent) {
        let i = self
            .world
            .md_names()
            .iter()
            .position(|m| m == s.md())
            .expect("validated script");
        let clock = self.clock();
        let md = Node::Md(i);
        let dt = Node::Dt(i);
        self.tr
            .push(self.now, "script")
            .route(&self.world.name(md), &self.world.name(md))
            .detail(format!("{s:?}"));
        match s {
            ScriptEvent::Delegate { .. } => match self.world.mds[i].make_token(&mut self.rng) {
                Ok(tok) => self.send(md, dt, &tok),
                Err(r) => self.reject(md, md, None, r),
            },
            ScriptEvent::Handover { gnb, .. } => {
                let g = self.gnb(&gnb);
                self.attack[i] = match self.script.unknown_attack {
                    Some(u) => match (u.step, u.p_fail) {
                        (Some(step), _) => Some(step),
                        (None, Some(p)) if self.rng.gen::<f64>() < p => {
                            Some(self.rng.gen_range(1..=HANDOVER_STEPS))
                        }
                        _ => None,
                    },
                    None => None,
                };
                let target = self.world.gnbs[g].id();
                let w = &mut self.world;
                match w.dts[i].make_handover_request(&target, &w.dir, &clock, &mut self.rng) {
                    Ok(req) => self.send(dt, Node::Gnb(g), &req),
                    Err(r) => self.reject(dt, Node::Gnb(g), Some(MessageKind::HandoverRequest), r),
                }
            }
            ScriptEvent::EnterCell { gnb, .. } => {
                let g = self.gnb(&gnb);
                let id = self.world.gnbs[g].id();
                match self.world.mds[i].acknowledge(&id, &clock) {
                    Some(ack) => self.send(md, Node::Gnb(g), &ack),
                    None => {
                        self.fallback[i] = true;
                        self.note("fallback", md, "no prepared keys for this cell");
                    }
                }
            }
            ScriptEvent::LeaveCell { gnb, .. } => self.note("leave-cell", md, gnb),
            ScriptEvent::InterAmf { amf, .. } => {
                let t = self.world.node(&amf).and_then(|n| match n {
                    Node::Amf(a) => Some(a),
                    _ => None,
                });
                let t = t.expect("validated script");
                let src = self.world.serving[i];
                let id_j = self.world.dts[i].id();
                match self.world.amfs[src].transfer_context(&id_j) {
                    Some(ctx) => self.send(Node::Amf(src), Node::Amf(t), &ctx),
                    None => self.reject(Node::Amf(src), dt, Some(MessageKind::ContextTransfer), Rejection::Unexpected),
                }
                self.inter_target[i] = Some(t);
                let target_id = self.world.amfs[t].id();
                match self.world.mds[i].update_anchor(&target_id, &clock, &mut self.rng) {
                    Ok(upd) => self.send(md, dt, &upd),
                    Err(r) => self.reject(md, md, Some(MessageKind::AnchorUpdate), r),
                }
            }
        }
    }

    fn gnb(&self, name: &str) -> usize {
        match self.world.node(name) {
            Some(Node::Gnb(g)) => g,
            _ => unreachable!("validated script"),
        }
    }

    fn deliver(&mut self, from: Node, to: Node, kind: MessageKind, bytes: &[u8]) -> Result<(), Rejection> {
        let clock = self.clock();
        let w = &mut self.world;
        match (to, kind) {
            (Node::Dt(j), MessageKind::AuthorizedToken) => {
                let tok: AuthorizedToken = decode(bytes)?;
                let a = w.serving[j];
                let amf = w.amfs[a].id();
                let req = w.dts[j].handle_token(&tok, &amf, &w.dir, &mut self.rng)?;
                self.send(to, Node::Amf(a), &req);
            }
            (Node::Amf(a), MessageKind::DelegationRequest) => {
                let req: DelegationRequest = decode(bytes)?;
                let resp = w.amfs[a].issue_delegation(&req, &w.dir, &mut self.rng)?;
                self.send(to, from, &resp);
            }
            (Node::Dt(j), MessageKind::DelegationResponse) => {
                let resp: DelegationResponse = decode(bytes)?;
                w.dts[j].unwrap_delegation(&resp, &w.dir)?;
                self.note("delegated", to, "access delegation verified");
            }
            (Node::Gnb(g), MessageKind::HandoverRequest) => {
                let req: HandoverRequest = decode(bytes)?;
                let batch = self.batches.entry(g).or_default();
                batch.push((from, req));
                if batch.len() == 1 {
                    self.schedule(self.now, Ev::Flush(g));
                }
            }
            (Node::Dt(j), MessageKind::HandoverResponse) => {
                let resp: HandoverResponse = decode(bytes)?;
                let n = w.dts[j].handle_handover_response(&resp, &w.dir, &clock)?;
                self.send(to, Node::Md(j), &n);
            }
            (Node::Md(i), MessageKind::HandoverNotification) => {
                let n: HandoverNotification = decode(bytes)?;
                match w.mds[i].process_notification(&n, &clock) {
                    Ok(_) => self.note("keys-prepared", to, format!("{}", n.id_g2)),
                    Err(r) => {
                        self.fallback[i] = true;
                        return Err(r);
                    }
                }
            }
            (Node::Gnb(g), MessageKind::HandoverAck) => {
                let ack: HandoverAck = decode(bytes)?;
                w.gnbs[g].verify_ack(&ack, &clock)?;
                if let Node::Md(i) = from {
                    self.established[i] = true;
                }
                self.note("established", to, format!("{}", ack.tid));
            }
            (Node::Amf(a), MessageKind::ContextTransfer) => {
                let ctx: ContextTransfer = decode(bytes)?;
                w.amfs[a].accept_context(&ctx, &w.dir)?;
                self.note("context-accepted", to, format!("{}", ctx.id_j));
            }
            (Node::Dt(j), MessageKind::AnchorUpdate) => {
                let upd: AnchorUpdate = decode(bytes)?;
                let t = self.inter_target[j].ok_or(Rejection::Unexpected)?;
                let amf = w.amfs[t].id();
                let req = w.dts[j].handle_anchor_update(&upd, &amf, &clock, &mut self.rng)?;
                self.send(to, Node::Amf(t), &req);
            }
            (Node::Amf(a), MessageKind::InterDelegationRequest) => {
                let req: InterDelegationRequest = decode(bytes)?;
                let resp = w.amfs[a].issue_inter_delegation(&req, &w.dir, &clock, &mut self.rng)?;
                self.send(to, from, &resp);
            }
            (Node::Dt(j), MessageKind::InterDelegationResponse) => {
                let resp: InterDelegationResponse = decode(bytes)?;
                let d = w.dts[j].unwrap_inter_delegation(&resp, &w.dir, &clock)?;
                if let Some(a) = w.amf_index(&d.amf) {
                    w.serving[j] = a;
                }
                self.inter_target[j] = None;
                self.note("delegated", to, "inter-AMF delegation verified");
            }
            _ => return Err(Rejection::Unexpected),
        }
        Ok(())
    }

    /// Verifies every request that reached gNB `g` in this tick as one batch.
    fn flush(&mut self, g: usize) {
        let batch = self.batches.remove(&g).unwrap_or_default();
        let clock = self.clock();
        let reqs: Vec<HandoverRequest> = batch.iter().map(|(_, r)| r.clone()).collect();
        let w = &mut self.world;
        let results = w.gnbs[g].verify_many(&reqs, &w.dir, &clock);
        for ((from, _), res) in batch.into_iter().zip(results) {
            match res {
                Ok(v) => {
                    let resp = self.world.gnbs[g].make_response(&v, &clock, &mut self.rng);
                    self.send(Node::Gnb(g), from, &resp);
                }
                Err(r) => self.reject(Node::Gnb(g), from, Some(MessageKind::HandoverRequest), r),
            }
        }
    }

    fn finish(mut self) -> SimResult {
        let mut add = |role: Role, t: &OpTally| {
            for (phase, c) in t.iter() {
                *self.ledger.ops.entry((role, phase)).or_default() += c;
            }
        };
        add(Role::Ausf, &self.world.ausf.tally);
        for a in &self.world.amfs {
            add(Role::Amf, &a.tally);
        }
        for g in &self.world.gnbs {
            add(Role::Gnb, &g.tally);
        }
        for m in &self.world.mds {
            add(Role::Md, &m.tally);
        }
        for d in &self.world.dts {
            add(Role::Dt, &d.tally);
        }
        let mut outcomes = BTreeMap::new();
        for (i, name) in self.world.md_names().iter().enumerate() {
            let o = if self.established[i] {
                Outcome::SessionEstablished
            } else if self.fallback[i] {
                Outcome::Fallback
            } else if self.rejections.iter().any(|r| r.md == Some(i)) {
                Outcome::Rejected
            } else {
                Outcome::Incomplete
            };
            outcomes.insert(name.clone(), o);
        }
        for (name, o) in &outcomes {
            self.tr.push(self.now, "outcome").route(name, name).detail(o.as_str());
        }
        SimResult {
            transcript: self.tr,
            ledger: self.ledger,
            outcomes,
            rejections: self.rejections,
            world: self.world,
            adversary: self.adv,
        }
    }
}
