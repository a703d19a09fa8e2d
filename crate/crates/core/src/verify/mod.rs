//! Executable acceptance checks with machine-readable reports.
//!
//! Every check is deterministic in the configured seed. A check can be
//! targeted by fault injection, which corrupts one observation the check
//! makes (the position is derived from the seed) so that the check must
//! report a failure.

pub mod security;

use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::crypto::{Digest, PointG1, Scalar};
use crate::overhead::{
    analytic_communication, analytic_computation, analytic_signaling, scheme_unknown_attack, step_profile,
    tables::default_sweep, CostConstants, Scenario, SchemeId,
};
use crate::protocol::messages::HandoverRequest;
use crate::protocol::wire::{MessageKind, WireMessage};
use crate::protocol::{delegation_holds, Clock, OpCounts, OpTally, Phase, Role, DEFAULT_DELTA_T_MS};
use crate::sim::{
    run_scenario, AdversaryAction, Knowledge, Node, Outcome, ScenarioScript, ScriptEvent, SecretClass, SimResult,
    UnknownAttack, World, HANDOVER_STEPS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckId {
    KeyAgreement,
    Delegation,
    HandoverRequest,
    BatchEquivalence,
    Communication,
    Computation,
    Signaling,
    UnknownAttack,
    Security,
    InterAmf,
}

impl CheckId {
    pub const ALL: [CheckId; 10] = [
        CheckId::KeyAgreement,
        CheckId::Delegation,
        CheckId::HandoverRequest,
        CheckId::BatchEquivalence,
        CheckId::Communication,
        CheckId::Computation,
        CheckId::Signaling,
        CheckId::UnknownAttack,
        CheckId::Security,
        CheckId::InterAmf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::KeyAgreement => "key-agreement",
            CheckId::Delegation => "delegation",
            CheckId::HandoverRequest => "handover-request",
            CheckId::BatchEquivalence => "batch-equivalence",
            CheckId::Communication => "communication",
            CheckId::Computation => "computation",
            CheckId::Signaling => "signaling",
            CheckId::UnknownAttack => "unknown-attack",
            CheckId::Security => "security",
            CheckId::InterAmf => "inter-amf",
        }
    }

    /// Criterion number, 1-based.
    pub fn number(self) -> u8 {
        CheckId::ALL.iter().position(|c| *c == self).expect("listed") as u8 + 1
    }

    /// Accepts a name or a criterion number.
    pub fn parse(s: &str) -> Option<Self> {
        if let Ok(n) = s.parse::<usize>() {
            return n.checked_sub(1).and_then(|i| CheckId::ALL.get(i).copied());
        }
        CheckId::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn summary(self) -> &'static str {
        match self {
            CheckId::KeyAgreement => "MD and gNB derive identical session keys, n = 1..20",
            CheckId::Delegation => "honest delegations verify and forgeries are rejected",
            CheckId::HandoverRequest => "honest handover requests verify and every field mutation is rejected",
            CheckId::BatchEquivalence => "batch verification equals the conjunction of individual checks",
            CheckId::Communication => "uplink bits are 288n and the communication table matches",
            CheckId::Computation => "computation totals and simulated operation counts match the model",
            CheckId::Signaling => "access signaling is n messages; 5G-AKA is 5n",
            CheckId::UnknownAttack => "unknown-attack averages and per-step costs are consistent",
            CheckId::Security => "replay, leakage, traceability and TID uniformity",
            CheckId::InterAmf => "anchors agree between MD and target AMF after an inter-AMF move",
        }
    }
}

impl std::fmt::Display for CheckId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub id: &'static str,
    pub criterion: u8,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub fault: Option<CheckId>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 1, fault: None }
    }
}

/// Where the injected fault lands in the current check, if it is targeted.
#[derive(Clone, Copy)]
struct Fault(Option<u64>);

impl Fault {
    fn new(cfg: &VerifyConfig, id: CheckId) -> Self {
        Fault((cfg.fault == Some(id)).then(|| ChaCha20Rng::seed_from_u64(cfg.seed ^ 0xfa01_7000).next_u64()))
    }

    fn at(self, len: usize) -> Option<usize> {
        self.0.map(|p| (p % len.max(1) as u64) as usize)
    }
}

type CheckResult = Result<String, String>;

pub fn run(ids: &[CheckId], cfg: &VerifyConfig) -> Vec<CheckReport> {
    ids.iter().map(|id| run_check(*id, cfg)).collect()
}

pub fn run_check(id: CheckId, cfg: &VerifyConfig) -> CheckReport {
    let fault = Fault::new(cfg, id);
    let seed = cfg.seed.wrapping_mul(1000).wrapping_add(id.number() as u64);
    let start = Instant::now();
    let result = match id {
        CheckId::KeyAgreement => key_agreement(seed, fault),
        CheckId::Delegation => delegation(seed, fault),
        CheckId::HandoverRequest => handover_request(seed, fault),
        CheckId::BatchEquivalence => batch_equivalence(seed, fault),
        CheckId::Communication => communication(seed, fault),
        CheckId::Computation => computation(seed, fault),
        CheckId::Signaling => signaling(seed, fault),
        CheckId::UnknownAttack => unknown_attack(seed, fault),
        CheckId::Security => security_suite(seed, fault),
        CheckId::InterAmf => inter_amf(seed, fault),
    };
    let elapsed_ms = start.elapsed().as_millis();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckReport {
        id: id.name(),
        criterion: id.number(),
        passed,
        detail,
        elapsed_ms,
    }
}

fn sim(script: &ScenarioScript, seed: u64) -> Result<SimResult, String> {
    run_scenario(script, seed).map_err(|e| e.to_string())
}

/// Runs only the delegation events of an intra-AMF script, leaving every
/// twin ready to request a handover to `gnb2`.
pub fn delegated(n: usize, seed: u64) -> Result<World, String> {
    let mut s = ScenarioScript::intra_handover(n, seed);
    s.events.retain(|e| matches!(e.event, ScriptEvent::Delegate { .. }));
    Ok(sim(&s, seed)?.world)
}

fn established(r: &SimResult) -> Result<(), String> {
    match r.outcomes.iter().find(|(_, o)| **o != Outcome::SessionEstablished) {
        Some((md, o)) => Err(format!("{md} ended {}", o.as_str())),
        None => Ok(()),
    }
}

fn key_agreement(seed: u64, fault: Fault) -> CheckResult {
    let corrupt_run = fault.at(20).map(|i| i + 1);
    let mut slowest = 0u128;
    for n in 1..=20usize {
        let t = Instant::now();
        let r = sim(&ScenarioScript::intra_handover(n, seed + n as u64), seed + n as u64)?;
        let ms = t.elapsed().as_millis();
        slowest = slowest.max(ms);
        if ms >= 1000 {
            return Err(format!("n={n} took {ms} ms"));
        }
        established(&r)?;
        let w = &r.world;
        let gnb = &w.gnbs[1];
        for (i, md) in w.mds.iter().enumerate() {
            let mut keys = md.established().last().cloned().ok_or(format!("n={n} md{i}: no session"))?;
            if corrupt_run == Some(n) && i == 0 {
                keys.k_gnb.0[0] ^= 1;
            }
            let s = gnb.session(&keys.tid).ok_or(format!("n={n} md{i}: gNB has no session for TID"))?;
            if (s.k_gnb, s.tck, s.tik, s.tid) != (keys.k_gnb, keys.tck, keys.tik, keys.tid) {
                return Err(format!("n={n} md{i}: key material differs"));
            }
            let a = md.ephemeral().ok_or("missing a_i")?;
            let c = gnb.ephemeral(&keys.tid).ok_or("missing c")?;
            let (sk_i, sk_g) = (md.long_term(), gnb.long_term());
            let c_g2 = PointG1::generator().mul(&(c * sk_g));
            let a_i = md.public_key().g1.mul(&a);
            let from_md = c_g2.mul(&(a * sk_i));
            let from_gnb = a_i.mul(&(c * sk_g));
            if from_md != from_gnb || from_md != keys.k_i || s.k_i != keys.k_i {
                return Err(format!("n={n} md{i}: K_i differs"));
            }
        }
    }
    Ok(format!("210 sessions agree; slowest run {slowest} ms"))
}

fn delegation(seed: u64, fault: Fault) -> CheckResult {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let roster = ScenarioScript::intra_handover(1, seed).roster;
    let mut w = World::build(&roster, &mut rng).map_err(|e| e.to_string())?;
    let amf = &mut w.amfs[0];
    let key = amf.published_key();
    let mut scratch = OpTally::default();
    let mut m = scratch.meter(Phase::Delegation);
    let bad_honest = fault.at(100);
    let random_digest = |rng: &mut ChaCha20Rng| Digest(rng.gen());
    let mut issued = Vec::new();
    for k in 0..100 {
        let (guti, id_j) = (random_digest(&mut rng), random_digest(&mut rng));
        let pk_j = PointG1::generator().mul(&Scalar::random(&mut rng));
        let (mut delta, r_j) = amf.issue_delegation_direct(&guti, &id_j, &pk_j, &mut rng);
        if bad_honest == Some(k) {
            delta += Scalar::ONE;
        }
        if !delegation_holds(&delta, &r_j, &guti, &id_j, &pk_j, &key, &mut m) {
            return Err(format!("honest issuance {k} rejected"));
        }
        issued.push((delta, r_j, guti, id_j, pk_j));
    }
    for f in 0..1000 {
        let (mut delta, mut r_j, mut guti, id_j, pk_j) = issued[f % issued.len()];
        match f % 4 {
            0 => delta = Scalar::random(&mut rng),
            1 => delta += Scalar::ONE,
            2 => r_j = PointG1::generator().mul(&Scalar::random(&mut rng)),
            _ => guti = random_digest(&mut rng),
        }
        if delegation_holds(&delta, &r_j, &guti, &id_j, &pk_j, &key, &mut m) {
            return Err(format!("forgery {f} accepted"));
        }
    }
    Ok("100 honest accepted, 1000 forgeries rejected".into())
}

fn handover_requests(w: &mut World, clock: &Clock, rng: &mut ChaCha20Rng) -> Result<Vec<HandoverRequest>, String> {
    let target = w.gnbs[1].id();
    let dir = &w.dir;
    w.dts
        .iter_mut()
        .map(|dt| {
            dt.make_handover_request(&target, dir, clock, rng)
                .map_err(|e| format!("request not built: {e}"))
        })
        .collect()
}

/// Corrupted copies of an encoded request: three per field.
pub fn field_mutants(frame: &crate::protocol::wire::Frame, rng: &mut impl RngCore) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for span in &frame.spans {
        let (lo, hi) = (span.offset, span.offset + span.len - 1);
        let mut low_bit = frame.bytes.clone();
        low_bit[lo] ^= 0x01;
        let mut high_bit = frame.bytes.clone();
        high_bit[hi] ^= 0x80;
        let mut random = frame.bytes.clone();
        loop {
            rng.fill_bytes(&mut random[lo..=hi]);
            if random != frame.bytes {
                break;
            }
        }
        out.push((format!("{}:first-bit", span.name), low_bit));
        out.push((format!("{}:last-bit", span.name), high_bit));
        out.push((format!("{}:random", span.name), random));
    }
    out
}

fn handover_request(seed: u64, fault: Fault) -> CheckResult {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut w = delegated(4, seed)?;
    let clock = Clock::new(1_000, DEFAULT_DELTA_T_MS);
    let reqs = handover_requests(&mut w, &clock, &mut rng)?;
    let mut mutants = 0;
    let skip = fault.at(reqs.len() * 21);
    for req in &reqs {
        w.gnbs[1]
            .verify_handover_request(req, &w.dir, &clock)
            .map_err(|e| format!("honest request rejected: {e}"))?;
        let frame = req.encode();
        for (label, bytes) in field_mutants(&frame, &mut rng) {
            let bytes = if skip == Some(mutants) { frame.bytes.clone() } else { bytes };
            mutants += 1;
            let accepted = HandoverRequest::decode(&bytes)
                .ok()
                .is_some_and(|m| w.gnbs[1].verify_handover_request(&m, &w.dir, &clock).is_ok());
            if accepted {
                return Err(format!("mutant {label} accepted"));
            }
        }
    }
    Ok(format!("{} honest accepted, {mutants} mutants rejected", reqs.len()))
}

fn batch_equivalence(seed: u64, fault: Fault) -> CheckResult {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut w = delegated(32, seed)?;
    let clock = Clock::new(1_000, DEFAULT_DELTA_T_MS);
    let pool = handover_requests(&mut w, &clock, &mut rng)?;
    let mislabel = fault.at(200);
    let mut forged_batches = 0;
    for b in 0..200 {
        let size = rng.gen_range(1..=32usize);
        let mut idx: Vec<usize> = (0..pool.len()).collect();
        for i in 0..size {
            let j = rng.gen_range(i..idx.len());
            idx.swap(i, j);
        }
        let mut batch: Vec<HandoverRequest> = idx[..size].iter().map(|i| pool[*i].clone()).collect();
        let mut forgeries = rng.gen_range(0..=3usize).min(size);
        if mislabel == Some(b) {
            forgeries = 0;
        }
        for (k, req) in batch.iter_mut().take(forgeries).enumerate() {
            match (k + b) % 3 {
                0 => req.lambda = Scalar::random(&mut rng),
                1 => req.b_j = PointG1::generator().mul(&Scalar::random(&mut rng)),
                _ => req.r_j = PointG1::generator().mul(&Scalar::random(&mut rng)),
            }
        }
        let forged = forgeries > 0 || mislabel == Some(b);
        let gnb = &mut w.gnbs[1];
        let individual: Vec<bool> = batch
            .iter()
            .map(|r| gnb.verify_handover_request(r, &w.dir, &clock).is_ok())
            .collect();
        let prepared = batch
            .iter()
            .map(|r| gnb.precheck(r, &w.dir, &clock))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("batch {b}: precheck failed: {e}"))?;
        let together = gnb.batch_verify(&prepared, &w.dir).map_err(|e| e.to_string())?;
        let all = individual.iter().all(|x| *x);
        if together != all {
            return Err(format!("batch {b}: batch={together}, individual={all}"));
        }
        if forged && together {
            return Err(format!("batch {b}: accepted with forgeries"));
        }
        if !forged && !together {
            return Err(format!("batch {b}: honest batch rejected"));
        }
        forged_batches += usize::from(forged);
    }
    Ok(format!("200 batches agree ({forged_batches} with forgeries)"))
}

/// `"288n+512"`, `"6400"`, `"-"` → (per-n, constant).
fn parse_linear(s: &str) -> (f64, f64) {
    if s == "-" {
        return (0.0, 0.0);
    }
    let mut out = (0.0, 0.0);
    for term in s.split('+') {
        match term.strip_suffix('n') {
            Some(c) => out.0 = c.parse().expect("golden coefficient"),
            None => out.1 = term.parse().expect("golden constant"),
        }
    }
    out
}

/// Uplink, downlink and total bits of each scheme as printed.
const COMMUNICATION_GOLDEN: [(&str, &str, &str, &str); 12] = [
    ("5G-AKA", "256n", "256n", "512n"),
    ("Lai", "3328n+3328", "6400", "3328n+9728"),
    ("Ma-I", "128n+384", "384", "128n+768"),
    ("Ma-II", "384n+464", "512", "384n+976"),
    ("Cao", "640n", "424n", "1184n"),
    ("Zhang", "928n", "928n", "1856n"),
    ("Yan", "288n+512", "32n+512", "320n+1024"),
    ("Gupta", "1104n", "1104n", "2208n"),
    ("He", "1128n", "384n", "1512n"),
    ("Wang", "672n", "832n", "1504n"),
    ("Li", "1712n", "1008n", "2720n"),
    ("Ours", "288n", "-", "288n"),
];

fn communication(seed: u64, fault: Fault) -> CheckResult {
    let bump = fault.at(3);
    for (k, n) in [1usize, 5, 20].into_iter().enumerate() {
        let r = sim(&ScenarioScript::intra_handover(n, seed), seed)?;
        established(&r)?;
        let up = r.ledger.uplink_bits() + u64::from(bump == Some(k));
        let down = r.ledger.downlink_bits();
        if up != 288 * n as u64 || down != 0 {
            return Err(format!("n={n}: uplink {up}, downlink {down}"));
        }
    }
    for (name, up, down, total) in COMMUNICATION_GOLDEN {
        let id = SchemeId::from_name(name).ok_or(format!("unknown scheme {name}"))?;
        for n in [1u64, 20] {
            let c = analytic_communication(id, n);
            let want = [up, down, total].map(|s| {
                let (a, b) = parse_linear(s);
                a * n as f64 + b
            });
            if [c.uplink, c.downlink, c.total] != want {
                return Err(format!("{name} n={n}: {:?} vs {:?}", [c.uplink, c.downlink, c.total], want));
            }
        }
    }
    Ok("uplink 288n and downlink 0 for n in {1,5,20}; 12 rows match at n in {1,20}".into())
}

fn counts(mul: u64, hash: u64) -> OpCounts {
    OpCounts {
        mul,
        hash,
        ..OpCounts::default()
    }
}

fn computation(seed: u64, fault: Fault) -> CheckResult {
    let k = CostConstants::default();
    let bump = fault.at(3);
    let mut problems = Vec::new();
    for (i, n) in [1u64, 10, 50].into_iter().enumerate() {
        let nf = n as f64;
        let normal = analytic_computation(SchemeId::Ours, n, Scenario::Normal, &k) + f64::from(u8::from(bump == Some(i)));
        if (normal - (0.372 * nf + 0.09)).abs() > 0.01 * nf {
            problems.push(format!("normal n={n}: {normal:.4}"));
        }
        let opt = analytic_computation(SchemeId::Ours, n, Scenario::Optimized, &k);
        if (opt - 0.002 * nf).abs() > 0.0005 * nf {
            problems.push(format!("optimized n={n}: {opt:.4}"));
        }
    }
    let both = [Phase::HandoverPrep, Phase::HandoverAccess];
    for n in [1u64, 5] {
        let r = sim(&ScenarioScript::intra_handover(n as usize, seed), seed)?;
        established(&r)?;
        let l = &r.ledger;
        let observed = [
            ("MD normal", l.ops_in(Role::Md, &both), counts(n, 7 * n)),
            ("gNB normal", l.ops_in(Role::Gnb, &both), counts(5 * n + 3, 11 * n)),
            ("MD optimized", l.ops(Role::Md, Phase::HandoverAccess), counts(0, n)),
            ("gNB optimized", l.ops(Role::Gnb, Phase::HandoverAccess), counts(0, n)),
        ];
        for (what, got, want) in observed {
            if got != want {
                problems.push(format!(
                    "{what} n={n}: simulated {}T_m+{}T_h, table {}T_m+{}T_h",
                    got.mul, got.hash, want.mul, want.hash
                ));
            }
        }
    }
    if problems.is_empty() {
        Ok("analytic totals within tolerance; simulated counts equal the table".into())
    } else {
        Err(problems.join("; "))
    }
}

fn signaling(seed: u64, fault: Fault) -> CheckResult {
    let bump = fault.at(3);
    for (k, n) in [1usize, 5, 20].into_iter().enumerate() {
        let r = sim(&ScenarioScript::intra_handover(n, seed), seed)?;
        established(&r)?;
        let msgs = r.ledger.access_messages() + u64::from(bump == Some(k));
        if msgs != n as u64 {
            return Err(format!("n={n}: {msgs} access messages"));
        }
        let nf = n as f64;
        if analytic_signaling(SchemeId::Ours, n as u64) != nf || analytic_signaling(SchemeId::FiveGAka, n as u64) != 5.0 * nf {
            return Err(format!("n={n}: model signaling differs"));
        }
    }
    Ok("access messages = n for n in {1,5,20}; 5G-AKA model = 5n".into())
}

fn unknown_attack(seed: u64, fault: Fault) -> CheckResult {
    for id in SchemeId::ALL {
        for n in [1u64, 10, 20] {
            let succ = *step_profile(id, n).last().ok_or("empty profile")?;
            let avg = scheme_unknown_attack(id, n, 0.0).map_err(|e| e.to_string())?;
            if avg != succ {
                return Err(format!("{} n={n}: Com_avg(0)={avg}, Com_succ={succ}", id.name()));
            }
        }
    }
    let sweep: Vec<f64> = default_sweep()
        .into_iter()
        .map(|p| scheme_unknown_attack(SchemeId::Ours, 20, p))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    if !sweep.windows(2).all(|w| w[0] < w[1]) {
        return Err(format!("Ours sweep not increasing: {sweep:?}"));
    }
    let script = ScenarioScript::intra_handover(1, seed);
    let clean = sim(&script, seed)?.ledger.step_profile(0);
    if clean.len() != HANDOVER_STEPS {
        return Err(format!("clean run has {} handover steps", clean.len()));
    }
    let skew = fault.at(HANDOVER_STEPS);
    for step in 1..=HANDOVER_STEPS {
        let mut s = script.clone();
        s.unknown_attack = Some(UnknownAttack {
            step: Some(step),
            p_fail: None,
        });
        let mut got = sim(&s, seed)?.ledger.step_profile(0);
        if skew == Some(step - 1) {
            if let Some(last) = got.last_mut() {
                *last += 8;
            }
        }
        if got[..] != clean[..step] {
            return Err(format!("attack at step {step}: {got:?} is not a prefix of {clean:?}"));
        }
    }
    let analytic: Vec<u64> = step_profile(SchemeId::Ours, 1).iter().map(|v| *v as u64).collect();
    if analytic != clean {
        return Err(format!("simulated {clean:?} vs analytic {analytic:?}"));
    }
    Ok(format!("Com_avg(0)=Com_succ for all schemes; sweep increasing; per-step {clean:?}"))
}

/// Replays the first occurrence of `kind` after the freshness window and
/// returns the rejection reasons recorded for it.
pub fn replay_rejections(kind: MessageKind, seed: u64) -> Result<(Vec<String>, bool), String> {
    let mut s = ScenarioScript::inter_amf(1, seed);
    s.tap.wired = true;
    s.adversary.push(AdversaryAction::Replay {
        message: kind.name().into(),
        occurrence: 0,
        delay_ms: s.delta_t_ms + 1000,
    });
    let r = sim(&s, seed)?;
    let reasons = r
        .rejections
        .iter()
        .filter(|x| x.message == Some(kind.name()))
        .map(|x| format!("{}:{}", x.by.as_str(), x.reason))
        .collect();
    let ok = r.outcomes.values().all(|o| *o == Outcome::SessionEstablished);
    Ok((reasons, ok))
}

fn leak_search(seed: u64, class: SecretClass, extra: &[(&str, Scalar)]) -> Result<(Option<String>, usize), String> {
    let mut s = ScenarioScript::intra_handover(1, seed);
    s.tap.wired = true;
    let r = sim(&s, seed)?;
    established(&r)?;
    let SimResult { world, mut adversary, .. } = r;
    let targets: &[Node] = match class {
        SecretClass::Ephemeral => &[Node::Md(0), Node::Gnb(1), Node::Dt(0)],
        SecretClass::LongTerm => &[Node::Md(0), Node::Gnb(1), Node::Dt(0), Node::Amf(0), Node::Ausf],
    };
    for t in targets {
        adversary.corrupt(&world, *t, class, 0).map_err(|e| e.to_string())?;
    }
    adversary.learn_public(&world);
    let mut k: Knowledge = adversary.knowledge.clone();
    k.scalars.extend(extra.iter().map(|(l, v)| (l.to_string(), *v)));
    let keys = world.mds[0].established().last().cloned().ok_or("no session")?;
    let hit = security::search_session_key(&k, &keys.guti, &keys.gnb, &keys.k_gnb, 3);
    Ok((hit, k.scalars.len()))
}

fn security_suite(seed: u64, fault: Fault) -> CheckResult {
    let mut notes = Vec::new();
    let miss = fault.at(5);

    let mut unrejected = Vec::new();
    for kind in MessageKind::ALL {
        let (reasons, ok) = replay_rejections(kind, seed)?;
        if reasons.is_empty() || !ok {
            unrejected.push(kind.name());
        }
    }
    if miss == Some(0) {
        unrejected.push("fault");
    }
    if !unrejected.is_empty() {
        return Err(format!("replay not rejected for {unrejected:?}"));
    }
    notes.push(format!("{} replays rejected", MessageKind::ALL.len()));

    let (hit, leaked) = leak_search(seed, SecretClass::Ephemeral, &[])?;
    if let Some(h) = hit.or((miss == Some(1)).then(|| "fault".into())) {
        return Err(format!("ephemeral leakage recovered k_gNB* via {h}"));
    }
    let (hit, leaked_lt) = leak_search(seed, SecretClass::LongTerm, &[])?;
    if let Some(h) = hit {
        return Err(format!("long-term leakage recovered k_gNB* via {h}"));
    }
    notes.push(format!("ESL ({leaked} scalars) and PFS ({leaked_lt} scalars) searches found nothing"));

    let control = {
        let s = ScenarioScript::intra_handover(1, seed);
        let w = sim(&s, seed)?.world;
        let md = &w.mds[0];
        [md.ephemeral().ok_or("no a_i")?, md.long_term()]
    };
    let (hit, _) = leak_search(seed, SecretClass::Ephemeral, &[("a_i", control[0]), ("sk_i", control[1])])?;
    if hit.is_none() {
        return Err("positive control: search missed the key given a_i and sk_i".into());
    }

    {
        let s = ScenarioScript::intra_handover(1, seed);
        let SimResult { world, mut adversary, .. } = sim(&s, seed)?;
        adversary.corrupt(&world, Node::Md(0), SecretClass::LongTerm, 0).map_err(|e| e.to_string())?;
        if adversary.corrupt(&world, Node::Gnb(1), SecretClass::Ephemeral, 0).is_ok() {
            return Err("corrupting both secret classes of one session was allowed".into());
        }
    }

    let mut w = delegated(20, seed)?;
    let mut traced = 0;
    for (i, dt) in w.dts.iter().enumerate() {
        let mut got = w.ausf.trace(&dt.id());
        if miss == Some(2) && i == 0 {
            got = None;
        }
        if got == Some(w.mds[i].supi()) {
            traced += 1;
        }
    }
    if traced != w.dts.len() {
        return Err(format!("traced {traced}/{} twins", w.dts.len()));
    }
    notes.push(format!("traced {traced}/{traced}"));

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let clock = Clock::new(1_000, DEFAULT_DELTA_T_MS);
    let req = handover_requests(&mut w, &clock, &mut rng)?.remove(0);
    let gnb = &mut w.gnbs[1];
    let v = gnb.verify_handover_request(&req, &w.dir, &clock).map_err(|e| e.to_string())?;
    for _ in 0..10_000 {
        gnb.make_response(&v, &clock, &mut rng);
    }
    let mut tids: Vec<Digest> = gnb.sessions().map(|s| s.tid).collect();
    if tids.len() != 10_000 {
        return Err(format!("{} distinct TIDs from 10000 responses", tids.len()));
    }
    if let Some(bit) = miss.filter(|m| *m >= 3).map(|_| fault.0.unwrap_or(0) as usize % 128) {
        for t in &mut tids {
            t.0[bit / 8] |= 0x80 >> (bit % 8);
        }
    }
    let (stat, p) = security::bit_uniformity(&tids);
    if p.is_nan() || p <= 0.01 {
        return Err(format!("TID chi-square {stat:.1}, p={p:.4}"));
    }
    notes.push(format!("TID chi-square {stat:.1}, p={p:.3}"));
    Ok(notes.join("; "))
}

fn inter_amf(seed: u64, fault: Fault) -> CheckResult {
    let n = 3;
    let r = sim(&ScenarioScript::inter_amf(n, seed), seed)?;
    established(&r)?;
    let w = &r.world;
    let amf2 = &w.amfs[1];
    let flip = fault.at(n);
    for (i, md) in w.mds.iter().enumerate() {
        let mut k = md.k_seaf().ok_or("MD has no anchor")?;
        if flip == Some(i) {
            k.0[0] ^= 1;
        }
        let guti = md.guti().ok_or("MD has no GUTI")?;
        let ctx = amf2.context(&w.dts[i].id()).ok_or(format!("md{i}: AMF2 has no context"))?;
        let sub = amf2.subscriber(&guti).ok_or(format!("md{i}: AMF2 does not know GUTI*"))?;
        if ctx.k_seaf != k || ctx.guti != guti || sub.k_seaf != k || sub.supi != md.supi() {
            return Err(format!("md{i}: anchors differ between MD and AMF2"));
        }
        if md.established().last().map(|s| s.gnb) != Some(w.gnbs[2].id()) {
            return Err(format!("md{i}: no session with the AMF2 gNB"));
        }
    }
    Ok(format!("{n} devices: k_SEAF* and GUTI* equal on MD and AMF2"))
}
