use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use twinauth::sim::{
    run_scenario, AdversaryAction, ConfigError, CorruptError, Node, Outcome, ScenarioScript, SecretClass,
    UnknownAttack,
};

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn same_seed_same_transcript() {
    for s in [ScenarioScript::intra_handover(3, 11), ScenarioScript::inter_amf(2, 11)] {
        let a = run_scenario(&s, 11).unwrap();
        let b = run_scenario(&s, 11).unwrap();
        assert_eq!(a.transcript.to_jsonl(), b.transcript.to_jsonl());
        assert_eq!(a.transcript_hash(), b.transcript_hash());
        assert_eq!(a.ledger.to_json(), b.ledger.to_json());
        assert_ne!(a.transcript_hash(), run_scenario(&s, 12).unwrap().transcript_hash());
    }
}

#[test]
fn transcript_lines_are_json_with_increasing_sequence() {
    let r = run_scenario(&ScenarioScript::intra_handover(2, 13), 13).unwrap();
    let mut last = None;
    for line in r.transcript.to_jsonl().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let seq = v["seq"].as_u64().unwrap();
        assert!(last.is_none_or(|l| seq > l));
        last = Some(seq);
    }
    assert!(last.is_some());
}

#[test]
fn example_scenarios_meet_their_expectations() {
    let mut count = 0;
    for entry in fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let s = ScenarioScript::from_toml(&fs::read_to_string(&path).unwrap()).unwrap();
        let r = run_scenario(&s, s.seed).unwrap();
        assert!(r.failures(&s).is_empty(), "{}: {:?}", path.display(), r.failures(&s));
        count += 1;
    }
    assert!(count >= 4);
}

#[test]
fn late_replay_of_the_ack_is_rejected_without_harm() {
    let mut s = ScenarioScript::intra_handover(1, 14);
    s.adversary.push(AdversaryAction::Replay {
        message: "handover-ack".into(),
        occurrence: 0,
        delay_ms: s.delta_t_ms + 1,
    });
    let r = run_scenario(&s, 14).unwrap();
    assert_eq!(r.outcomes["md1"], Outcome::SessionEstablished);
    assert_eq!(r.rejections.len(), 1);
}

#[test]
fn bad_configurations_are_refused() {
    let mut s = ScenarioScript::intra_handover(1, 1);
    s.delta_t_ms = 0;
    assert!(matches!(s.validate(), Err(ConfigError::Invalid(_))));
    let mut s = ScenarioScript::intra_handover(2, 1);
    s.roster.mds[1].name = "md1".into();
    assert!(s.validate().is_err());
    let mut s = ScenarioScript::intra_handover(1, 1);
    s.unknown_attack = Some(UnknownAttack {
        step: None,
        p_fail: Some(1.0),
    });
    assert!(s.validate().is_err());
    assert!(matches!(ScenarioScript::from_toml("seed = 1"), Err(ConfigError::Parse(_))));
    assert!(ScenarioScript::from_toml("not toml at all [").is_err());
}

#[test]
fn one_session_cannot_leak_both_secret_classes() {
    let r = run_scenario(&ScenarioScript::intra_handover(2, 15), 15).unwrap();
    let mut adv = r.adversary;
    adv.corrupt(&r.world, Node::Md(0), SecretClass::Ephemeral, 0).unwrap();
    adv.corrupt(&r.world, Node::Gnb(1), SecretClass::Ephemeral, 0).unwrap();
    assert!(matches!(
        adv.corrupt(&r.world, Node::Md(0), SecretClass::LongTerm, 0),
        Err(CorruptError::BothClasses(0))
    ));
    adv.corrupt(&r.world, Node::Md(1), SecretClass::LongTerm, 1).unwrap();
    assert!(matches!(
        adv.corrupt(&r.world, Node::Amf(0), SecretClass::Ephemeral, 1),
        Err(CorruptError::BothClasses(1))
    ));
}

#[test]
fn access_traffic_scales_with_devices() {
    for n in [1u64, 3, 8] {
        let r = run_scenario(&ScenarioScript::intra_handover(n as usize, 16), 16).unwrap();
        assert_eq!(r.ledger.access_messages(), n);
        assert_eq!(r.ledger.uplink_bits(), 288 * n);
        assert_eq!(r.ledger.downlink_bits(), 0);
    }
}

#[test]
fn seeds_beyond_toml_range_are_reported() {
    assert!(ScenarioScript::intra_handover(1, u64::MAX).to_toml().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scenarios_survive_toml(n in 1usize..6, seed in 0..=i64::MAX as u64, inter in any::<bool>(), dt in 1u64..20_000) {
        let mut s = if inter { ScenarioScript::inter_amf(n, seed) } else { ScenarioScript::intra_handover(n, seed) };
        s.delta_t_ms = dt;
        prop_assert_eq!(ScenarioScript::from_toml(&s.to_toml().unwrap()).unwrap(), s);
    }

    #[test]
    fn honest_runs_always_establish(n in 1usize..4, seed in any::<u64>()) {
        let r = run_scenario(&ScenarioScript::intra_handover(n, seed), seed).unwrap();
        prop_assert!(r.rejections.is_empty());
        prop_assert!(r.outcomes.values().all(|o| *o == Outcome::SessionEstablished));
    }
}
