//! Classifier/simulator agreement: the brute-force observed rates must be
//! consistent with the declared class on every fixture actor.
//!
//! The alternating-actor expectation was enumerated by hand: from schedule
//! state s0 the firings go pair(2;1), single(1;1), pair, single, ... so the
//! observed vector sequence has period 2 starting at (2;1).

use actorforge_core::dataflow::{
    classify_actor, simulate_rates, ActorClass, RateSignature, RateVector, ScriptToken,
    TokenValue,
};
use actorforge_core::frontend::{parse_actor_source, resolve, ResolvedActor};
use actorforge_core::value::{Address, Uint};

fn resolved(src: &str, file: &str) -> ResolvedActor {
    resolve(&parse_actor_source(src, file).unwrap()).unwrap()
}

fn uint_tokens(port: &str, count: usize) -> Vec<ScriptToken> {
    (0..count)
        .map(|i| ScriptToken {
            port: port.into(),
            token: TokenValue::Uint(Uint::from_u64(i as u64)),
        })
        .collect()
}

fn deposit(sender: u64, ether: u64) -> ScriptToken {
    ScriptToken {
        port: "req".into(),
        token: TokenValue::Request {
            method: "deposit".into(),
            sender: Address::wallet(sender),
            value: Uint::ether(ether),
        },
    }
}

fn withdraw(sender: u64) -> ScriptToken {
    ScriptToken {
        port: "req".into(),
        token: TokenValue::Request {
            method: "withdraw".into(),
            sender: Address::wallet(sender),
            value: Uint::zero(),
        },
    }
}

/// Observed sequence consistent with the classification?
fn consistent(
    class: ActorClass,
    signature: &RateSignature,
    observed: &[(String, RateVector)],
) -> bool {
    match (class, signature) {
        (ActorClass::Static, RateSignature::Constant(expected)) => {
            observed.iter().all(|(_, v)| v == expected)
        }
        (ActorClass::CycloStatic, RateSignature::Cyclic(cycle)) => observed
            .iter()
            .enumerate()
            .all(|(i, (_, v))| *v == cycle[i % cycle.len()]),
        (ActorClass::Dynamic, RateSignature::Unknown) => true,
        _ => false,
    }
}

#[test]
fn static_actor_produces_identical_vectors() {
    let actor = resolved(include_str!("../../../fixtures/copy.actor"), "copy.actor");
    let (class, signature) = classify_actor(&actor);
    assert_eq!(class, ActorClass::Static);
    let observed =
        simulate_rates(&actor, &uint_tokens("src", 25), 20, Uint::zero()).unwrap();
    assert_eq!(observed.len(), 20);
    let first = observed[0].1.clone();
    assert!(observed.iter().all(|(_, v)| *v == first), "vectors differ");
    assert!(consistent(class, &signature, &observed));
}

#[test]
fn cyclo_static_actor_observes_its_period() {
    let actor = resolved(include_str!("../../../fixtures/alt.actor"), "alt.actor");
    let (class, signature) = classify_actor(&actor);
    assert_eq!(class, ActorClass::CycloStatic);
    let RateSignature::Cyclic(cycle) = &signature else { panic!("expected cyclic") };
    assert_eq!(cycle.len(), 2);
    assert_eq!(cycle[0].consumed, vec![2]);
    assert_eq!(cycle[0].produced, vec![1]);
    assert_eq!(cycle[1].consumed, vec![1]);
    assert_eq!(cycle[1].produced, vec![1]);

    // 31 tokens admit 10 whole pair/single cycles plus one pair.
    let observed = simulate_rates(&actor, &uint_tokens("src", 31), 21, Uint::zero()).unwrap();
    assert!(observed.len() >= 20);
    assert!(consistent(class, &signature, &observed));
    // Observed period divides 2: the sequence repeats every other firing.
    for window in observed.windows(2) {
        assert_ne!(window[0].1, window[1].1, "alternation broke");
    }
}

#[test]
fn dao_actor_is_dynamic_with_script_dependent_rates() {
    let actor = resolved(include_str!("../../../fixtures/dao.actor"), "dao.actor");
    let (class, signature) = classify_actor(&actor);
    assert_eq!(class, ActorClass::Dynamic);
    assert_eq!(signature, RateSignature::Unknown);

    // Script 1: deposits only. Script 2: alternating deposit/withdraw.
    let deposits: Vec<ScriptToken> = (0..25).map(|i| deposit(i + 1, 1)).collect();
    let mut mixed = Vec::new();
    for i in 0..13 {
        mixed.push(deposit(i + 1, 1));
        mixed.push(withdraw(i + 1));
    }
    let a = simulate_rates(&actor, &deposits, 25, Uint::zero()).unwrap();
    let b = simulate_rates(&actor, &mixed, 25, Uint::ether(100)).unwrap();
    assert!(a.len() >= 20 && b.len() >= 20);
    let vectors_a: Vec<&RateVector> = a.iter().map(|(_, v)| v).collect();
    let vectors_b: Vec<&RateVector> = b.iter().map(|(_, v)| v).collect();
    assert_ne!(vectors_a, vectors_b, "scripts should induce different rate sequences");
    // Deposits never produce; withdraws produce one transfer.
    assert!(a.iter().all(|(action, v)| action == "deposit" && v.produced == vec![0]));
    assert!(b.iter().any(|(action, v)| action == "withdraw" && v.produced == vec![1]));
}

#[test]
fn attacker_actor_is_dynamic_and_simulable() {
    let actor =
        resolved(include_str!("../../../fixtures/attacker.actor"), "attacker.actor");
    let (class, _) = classify_actor(&actor);
    assert_eq!(class, ActorClass::Dynamic);
    let transfers: Vec<ScriptToken> = (0..24)
        .map(|_| ScriptToken {
            port: "recv".into(),
            token: TokenValue::Transfer {
                to: Address::contract(1),
                amount: Uint::ether(1),
            },
        })
        .collect();
    let observed = simulate_rates(&actor, &transfers, 25, Uint::ether(5)).unwrap();
    assert_eq!(observed.len(), 25);
    assert_eq!(observed[0].0, "attack");
    assert!(observed[1..].iter().all(|(action, _)| action == "reenter"));
}

#[test]
fn every_fixture_actor_agrees_with_its_classification() {
    // The scripted corpus: actor source, script, firings, initial balance.
    let cases: Vec<(&str, &str, Vec<ScriptToken>, usize, Uint)> = vec![
        (
            include_str!("../../../fixtures/copy.actor"),
            "copy.actor",
            uint_tokens("src", 25),
            20,
            Uint::zero(),
        ),
        (
            include_str!("../../../fixtures/alt.actor"),
            "alt.actor",
            uint_tokens("src", 40),
            26,
            Uint::zero(),
        ),
        (
            include_str!("../../../fixtures/dao.actor"),
            "dao.actor",
            (0..25).map(|i| deposit(i + 1, 2)).collect(),
            25,
            Uint::zero(),
        ),
        (
            include_str!("../../../fixtures/attacker.actor"),
            "attacker.actor",
            (0..24)
                .map(|_| ScriptToken {
                    port: "recv".into(),
                    token: TokenValue::Transfer {
                        to: Address::contract(1),
                        amount: Uint::ether(1),
                    },
                })
                .collect(),
            25,
            Uint::ether(5),
        ),
    ];
    for (src, file, script, firings, balance) in cases {
        let actor = resolved(src, file);
        let (class, signature) = classify_actor(&actor);
        let observed = simulate_rates(&actor, &script, firings, balance).unwrap();
        assert!(observed.len() >= 20, "{file}: only {} firings", observed.len());
        assert!(
            consistent(class, &signature, &observed),
            "{file}: observation inconsistent with {class:?} {signature:?}"
        );
    }
    // The empty actor classifies but has nothing to observe.
    let empty = resolved(include_str!("../../../fixtures/empty.actor"), "empty.actor");
    let (class, _) = classify_actor(&empty);
    assert_eq!(class, ActorClass::Static);
    assert!(simulate_rates(&empty, &[], 20, Uint::zero()).unwrap().is_empty());
}
