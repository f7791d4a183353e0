//! Dataflow engine behaviour on the bundled fixtures.
//!
//! Expected firing orders and totals below were derived by hand from the
//! fixture sources before the engine was written: round-robin starts at
//! `dao` (declared first), which has nothing to do, so `attacker.attack`
//! fires first, enqueueing deposit and withdraw requests; the cursor then
//! sits on `dao`, which serves them in FIFO order.

use std::collections::BTreeMap;

use actorforge_core::dataflow::{
    can_fire, classify_actor, link_network, run_until_quiescent, step_network, ActorClass,
    Network, SchedulerPolicy, Termination, TokenValue,
};
use actorforge_core::frontend::{parse_actor_source, parse_network_source, resolve, ResolvedActor};
use actorforge_core::value::{Address, Uint};

const DAO_ACTOR: &str = include_str!("../../../fixtures/dao.actor");
const ATTACKER_ACTOR: &str = include_str!("../../../fixtures/attacker.actor");
const NETWORK: &str = include_str!("../../../fixtures/dao_attacker.network");

fn resolved(src: &str, file: &str) -> ResolvedActor {
    let decl = parse_actor_source(src, file).expect("fixture parses");
    resolve(&decl).expect("fixture resolves")
}

fn dao_attacker_network(buffer_cap: Option<usize>) -> Network {
    let decl = parse_network_source(NETWORK, "dao_attacker.network").expect("network parses");
    let mut actors = BTreeMap::new();
    for (src, file) in [(DAO_ACTOR, "dao.actor"), (ATTACKER_ACTOR, "attacker.actor")] {
        let actor = resolved(src, file);
        actors.insert(actor.decl.name.clone(), actor);
    }
    link_network(&decl, &actors, buffer_cap).expect("network links")
}

/// Net value received by the attacker from the victim, per trace prefix.
fn attacker_flows(network: &Network, trace: &[actorforge_core::dataflow::FiringRecord]) -> Vec<(Uint, Uint)> {
    let mut received = Uint::zero();
    let mut deposited = Uint::zero();
    let mut prefix = Vec::new();
    for record in trace {
        for bt in &record.consumed {
            let buffer = network.buffers.iter().find(|b| b.id == bt.buffer).unwrap();
            let (Some((from, _)), Some((to, _))) = (buffer.from, buffer.to) else { continue };
            let from = &network.instances[from].name;
            let to = &network.instances[to].name;
            let carried = bt.token.native_value();
            if from == "dao" && to == "attacker" {
                received = received.checked_add(&carried).unwrap();
            }
            if from == "attacker" && to == "dao" {
                deposited = deposited.checked_add(&carried).unwrap();
            }
        }
        prefix.push((received.clone(), deposited.clone()));
    }
    prefix
}

#[test]
fn network_links_with_two_instances_and_two_buffers() {
    let network = dao_attacker_network(None);
    assert_eq!(network.instances.len(), 2);
    assert_eq!(network.buffers.len(), 2);
    assert_eq!(network.victims.len(), 1);
    assert_eq!(network.instances[network.victims[0]].name, "dao");
}

#[test]
fn deposit_fires_right_after_attackers_request_is_enqueued() {
    let mut network = dao_attacker_network(None);
    let first = step_network(&mut network, SchedulerPolicy::RoundRobin).expect("fires");
    assert_eq!((first.actor.as_str(), first.action.as_str()), ("attacker", "attack"));
    let second = step_network(&mut network, SchedulerPolicy::RoundRobin).expect("fires");
    assert_eq!((second.actor.as_str(), second.action.as_str()), ("dao", "deposit"));
}

#[test]
fn attack_trace_runs_to_quiescence_with_no_drain() {
    let mut network = dao_attacker_network(None);
    let initial_total = network.total_value();
    let (trace, termination) =
        run_until_quiescent(&mut network, SchedulerPolicy::RoundRobin, 10_000);
    assert_eq!(termination, Termination::Quiescent);
    let names: Vec<_> =
        trace.iter().map(|r| format!("{}.{}", r.actor, r.action)).collect();
    assert_eq!(
        names,
        vec!["attacker.attack", "dao.deposit", "dao.withdraw", "attacker.reenter"]
    );

    // The attacker got back exactly its own deposit, at every prefix.
    let flows = attacker_flows(&network, &trace);
    for (received, deposited) in &flows {
        assert!(received <= deposited, "drain: received {received} > deposited {deposited}");
    }
    let (received, deposited) = flows.last().unwrap().clone();
    assert_eq!(received, Uint::ether(1));
    assert_eq!(deposited, Uint::ether(1));

    // Conservation: native custody plus in-flight value is unchanged.
    assert_eq!(network.total_value(), initial_total);
    assert_eq!(initial_total, Uint::ether(7));

    // The stranded second withdraw request leaves the DAO quiescent but its
    // pot intact.
    let dao = &network.instances[0];
    assert_eq!(dao.native_balance, Uint::ether(6));
}

#[test]
fn conservation_holds_at_every_step() {
    let mut network = dao_attacker_network(None);
    let expected = network.total_value();
    while step_network(&mut network, SchedulerPolicy::RoundRobin).is_some() {
        assert_eq!(network.total_value(), expected);
    }
}

#[test]
fn traces_are_deterministic() {
    let run = || {
        let mut network = dao_attacker_network(None);
        let (trace, _) = run_until_quiescent(&mut network, SchedulerPolicy::RoundRobin, 10_000);
        trace
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
    let json_a: Vec<String> = a.iter().map(|r| serde_json::to_string(r).unwrap()).collect();
    let json_b: Vec<String> = b.iter().map(|r| serde_json::to_string(r).unwrap()).collect();
    assert_eq!(json_a, json_b);
}

#[test]
fn firing_record_fields_are_stable() {
    let mut network = dao_attacker_network(None);
    let record = step_network(&mut network, SchedulerPolicy::RoundRobin).unwrap();
    let json = serde_json::to_string(&record).unwrap();
    let keys =
        ["step", "actor", "action", "consumed", "produced", "state_before", "state_after"];
    // Field order in the serialized text follows the struct declaration.
    let positions: Vec<usize> = keys
        .iter()
        .map(|k| json.find(&format!("\"{k}\":")).unwrap_or_else(|| panic!("missing key {k}")))
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "keys out of order in {json}");
}

#[test]
fn max_steps_zero_yields_empty_trace() {
    let mut network = dao_attacker_network(None);
    let (trace, _) = run_until_quiescent(&mut network, SchedulerPolicy::RoundRobin, 0);
    assert!(trace.is_empty());
}

#[test]
fn self_looping_actor_hits_the_step_limit() {
    let actor = resolved(
        "actor Spin\n  state n: uint = 0\n  action tick do n = n + 1; end\nend",
        "spin.actor",
    );
    let decl = parse_network_source(
        "network N\n  instance spin: Spin\nend",
        "spin.network",
    )
    .unwrap();
    let mut actors = BTreeMap::new();
    actors.insert("Spin".to_string(), actor);
    let mut network = link_network(&decl, &actors, None).unwrap();
    let (trace, termination) =
        run_until_quiescent(&mut network, SchedulerPolicy::RoundRobin, 5);
    assert_eq!(trace.len(), 5);
    assert_eq!(termination, Termination::StepLimitExceeded);
}

#[test]
fn quiescent_network_steps_to_none() {
    let actor = resolved("actor Idle\n  in src: uint\n  out dst: uint\n  action f on src(x) do emit dst(x); end\nend", "idle.actor");
    let decl = parse_network_source("network N\n  instance idle: Idle\nend", "n.network").unwrap();
    let mut actors = BTreeMap::new();
    actors.insert("Idle".to_string(), actor);
    let mut network = link_network(&decl, &actors, None).unwrap();
    assert!(step_network(&mut network, SchedulerPolicy::RoundRobin).is_none());
}

#[test]
fn textual_order_breaks_ties_between_eligible_actions() {
    let actor = resolved(
        "actor Two\n  state n: uint = 0\n  action first do n = n + 1; end\n  action second do n = n + 1; end\nend",
        "two.actor",
    );
    let decl = parse_network_source("network N\n  instance two: Two\nend", "n.network").unwrap();
    let mut actors = BTreeMap::new();
    actors.insert("Two".to_string(), actor);
    let mut network = link_network(&decl, &actors, None).unwrap();
    let record = step_network(&mut network, SchedulerPolicy::RoundRobin).unwrap();
    assert_eq!(record.action, "first");
}

#[test]
fn transactional_abort_leaves_state_and_buffers_untouched() {
    // Division by zero in the body: the firing aborts with no consumption.
    let actor = resolved(
        "actor Bad\n  in src: uint\n  state x: uint = 0\n  action f on src(v) do x = v / x; end\nend",
        "bad.actor",
    );
    let decl = parse_network_source("network N\n  instance bad: Bad\nend", "n.network").unwrap();
    let mut actors = BTreeMap::new();
    actors.insert("Bad".to_string(), actor);
    let mut network = link_network(&decl, &actors, None).unwrap();
    // Inject a token directly; the port is otherwise unconnected.
    use std::collections::VecDeque;
    network.buffers.push(actorforge_core::dataflow::Buffer {
        id: "inject".to_string(),
        token_type: actorforge_core::frontend::ast::TokenType::Uint,
        from: None,
        to: Some((0, 0)),
        contents: VecDeque::from([TokenValue::Uint(Uint::from_u64(7))]),
        capacity: None,
    });
    network.in_buffers[0][0] = Some(network.buffers.len() - 1);

    let before_state = network.instances[0].state.clone();
    let result = step_network(&mut network, SchedulerPolicy::RoundRobin);
    assert!(result.is_none(), "firing should abort and nothing else is eligible");
    assert_eq!(network.instances[0].state, before_state);
    assert_eq!(network.buffers.last().unwrap().contents.len(), 1);
    assert_eq!(network.incidents.len(), 1);
    assert!(network.incidents[0].contains("division by zero"));
}

#[test]
fn noop_action_keeps_state_hash() {
    let actor = resolved(
        "actor Noop\n  in src: uint\n  state x: uint = 1\n  action f on src(v) do end\nend",
        "noop.actor",
    );
    let decl = parse_network_source("network N\n  instance a: Noop\nend", "n.network").unwrap();
    let mut actors = BTreeMap::new();
    actors.insert("Noop".to_string(), actor);
    let mut network = link_network(&decl, &actors, None).unwrap();
    use std::collections::VecDeque;
    network.buffers.push(actorforge_core::dataflow::Buffer {
        id: "inject".to_string(),
        token_type: actorforge_core::frontend::ast::TokenType::Uint,
        from: None,
        to: Some((0, 0)),
        contents: VecDeque::from([TokenValue::Uint(Uint::from_u64(3))]),
        capacity: None,
    });
    network.in_buffers[0][0] = Some(network.buffers.len() - 1);
    let record = step_network(&mut network, SchedulerPolicy::RoundRobin).unwrap();
    assert_eq!(record.state_before_hash, record.state_after_hash);
    assert_eq!(record.produced.len(), 0);
}

#[test]
fn bounded_buffers_block_the_producer() {
    // attack emits two request tokens; with capacity 1 it can never fire.
    let mut network = dao_attacker_network(Some(1));
    let (trace, termination) =
        run_until_quiescent(&mut network, SchedulerPolicy::RoundRobin, 100);
    assert_eq!(termination, Termination::Quiescent);
    assert!(trace.is_empty());
    for buffer in &network.buffers {
        assert!(buffer.contents.len() <= 1);
    }
    // Capacity 2 admits the attack; every intermediate length stays within
    // bounds (checked inside the engine via remaining_capacity).
    let mut network = dao_attacker_network(Some(2));
    let (trace, termination) =
        run_until_quiescent(&mut network, SchedulerPolicy::RoundRobin, 100);
    assert_eq!(termination, Termination::Quiescent);
    assert_eq!(trace.len(), 4);
}

#[test]
fn emission_order_matches_body_order() {
    let mut network = dao_attacker_network(None);
    let record = step_network(&mut network, SchedulerPolicy::RoundRobin).unwrap();
    assert_eq!(record.action, "attack");
    let methods: Vec<_> = record
        .produced
        .iter()
        .map(|bt| match &bt.token {
            TokenValue::Request { method, .. } => method.clone(),
            other => panic!("unexpected token {other:?}"),
        })
        .collect();
    assert_eq!(methods, vec!["deposit", "withdraw"]);
    // And the buffer holds them in the same order.
    let buffer = network.buffers.iter().find(|b| b.id == record.produced[0].buffer).unwrap();
    match (&buffer.contents[0], &buffer.contents[1]) {
        (TokenValue::Request { method: a, .. }, TokenValue::Request { method: b, .. }) => {
            assert_eq!((a.as_str(), b.as_str()), ("deposit", "withdraw"));
        }
        other => panic!("unexpected buffer contents {other:?}"),
    }
}

#[test]
fn can_fire_respects_deposit_minimum() {
    // A deposit request below 1 ether is not fireable; the paper's minimum
    // is 1 ETH.
    let dao = resolved(DAO_ACTOR, "dao.actor");
    let decl = parse_network_source(
        "network N\n  instance dao: Dao\nend",
        "n.network",
    )
    .unwrap();
    let mut actors = BTreeMap::new();
    actors.insert("Dao".to_string(), dao);
    let mut network = link_network(&decl, &actors, None).unwrap();
    use std::collections::VecDeque;
    let below = TokenValue::Request {
        method: "deposit".to_string(),
        sender: Address::wallet(9),
        value: Uint::from_decimal("500000000000000000").unwrap(),
    };
    let exact = TokenValue::Request {
        method: "deposit".to_string(),
        sender: Address::wallet(9),
        value: Uint::ether(1),
    };
    network.buffers.push(actorforge_core::dataflow::Buffer {
        id: "inject".to_string(),
        token_type: actorforge_core::frontend::ast::TokenType::Request,
        from: None,
        to: Some((0, 0)),
        contents: VecDeque::from([below]),
        capacity: None,
    });
    network.in_buffers[0][0] = Some(network.buffers.len() - 1);
    assert_eq!(can_fire(&network, 0, 0), Ok(false));
    assert_eq!(can_fire(&network, 0, 1), Ok(false), "withdraw needs a positive balance");
    network.buffers.last_mut().unwrap().contents[0] = exact;
    assert_eq!(can_fire(&network, 0, 0), Ok(true));
    // Peeking twice must not consume.
    assert_eq!(network.buffers.last().unwrap().contents.len(), 1);
    assert_eq!(can_fire(&network, 0, 0), Ok(true));
}

#[test]
fn fixture_actors_classify_as_documented() {
    let dao = resolved(DAO_ACTOR, "dao.actor");
    let attacker = resolved(ATTACKER_ACTOR, "attacker.actor");
    assert_eq!(classify_actor(&dao).0, ActorClass::Dynamic);
    assert_eq!(classify_actor(&attacker).0, ActorClass::Dynamic);
}

#[test]
fn guard_arithmetic_error_is_reported_and_not_fireable() {
    // The guard divides by a zero state variable; the action must be
    // treated as not fireable and the incident recorded.
    let actor = resolved(
        "actor G\n  in src: uint\n  state n: uint = 0\n  action f on src(x) guard x / n > 0 do end\nend",
        "g.actor",
    );
    let decl = parse_network_source("network N\n  instance g: G\nend", "n.network").unwrap();
    let mut actors = BTreeMap::new();
    actors.insert("G".to_string(), actor);
    let mut network = link_network(&decl, &actors, None).unwrap();
    use std::collections::VecDeque;
    network.buffers.push(actorforge_core::dataflow::Buffer {
        id: "inject".to_string(),
        token_type: actorforge_core::frontend::ast::TokenType::Uint,
        from: None,
        to: Some((0, 0)),
        contents: VecDeque::from([TokenValue::Uint(Uint::from_u64(4))]),
        capacity: None,
    });
    network.in_buffers[0][0] = Some(network.buffers.len() - 1);
    assert!(matches!(can_fire(&network, 0, 0), Err(_)));
    assert!(step_network(&mut network, SchedulerPolicy::RoundRobin).is_none());
    assert_eq!(network.incidents.len(), 1);
    assert!(network.incidents[0].contains("division by zero"));
    // The token is still there: nothing was consumed.
    assert_eq!(network.buffers.last().unwrap().contents.len(), 1);
}
