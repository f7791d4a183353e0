//! Network linking: the point-to-point connection rules.

use std::collections::BTreeMap;

use actorforge_core::diag::DiagCode;
use actorforge_core::dataflow::link_network;
use actorforge_core::frontend::{parse_actor_source, parse_network_source, resolve, ResolvedActor};

fn actors() -> BTreeMap<String, ResolvedActor> {
    let mut map = BTreeMap::new();
    for src in [
        "actor Producer\n  out dst: uint\n  state n: uint = 0\n  action tick do n = n + 1; emit dst(n); end\nend",
        "actor Consumer\n  in src: uint\n  state total: uint = 0\n  action take on src(x) do total = total + x; end\nend",
        "actor BoolSink\n  in flag: bool\n  state seen: bool = false\n  action take on flag(b) do seen = b; end\nend",
    ] {
        let actor = resolve(&parse_actor_source(src, "inline.actor").unwrap()).unwrap();
        map.insert(actor.decl.name.clone(), actor);
    }
    map
}

fn link(src: &str) -> Result<(), Vec<DiagCode>> {
    let decl = parse_network_source(src, "n.network").unwrap();
    link_network(&decl, &actors(), None)
        .map(|_| ())
        .map_err(|diags| diags.into_iter().map(|d| d.code).collect())
}

#[test]
fn single_actor_with_no_connections_is_valid() {
    assert!(link("network N\n  instance p: Producer\nend").is_ok());
}

#[test]
fn point_to_point_connection_links() {
    assert!(link(
        "network N\n  instance p: Producer\n  instance c: Consumer\n  connect p.dst -> c.src\nend"
    )
    .is_ok());
}

#[test]
fn fan_out_to_two_inputs_is_a_connect_error() {
    let codes = link(
        "network N\n  instance p: Producer\n  instance c1: Consumer\n  instance c2: Consumer\n  connect p.dst -> c1.src\n  connect p.dst -> c2.src\nend",
    )
    .unwrap_err();
    assert!(codes.contains(&DiagCode::Connect));
}

#[test]
fn fan_in_to_one_input_is_a_connect_error() {
    let codes = link(
        "network N\n  instance p1: Producer\n  instance p2: Producer\n  instance c: Consumer\n  connect p1.dst -> c.src\n  connect p2.dst -> c.src\nend",
    )
    .unwrap_err();
    assert!(codes.contains(&DiagCode::Connect));
}

#[test]
fn dangling_port_is_a_connect_error() {
    let codes = link(
        "network N\n  instance p: Producer\n  instance c: Consumer\n  connect p.nosuch -> c.src\nend",
    )
    .unwrap_err();
    assert!(codes.contains(&DiagCode::Connect));
}

#[test]
fn token_type_mismatch_is_a_connect_error() {
    let codes = link(
        "network N\n  instance p: Producer\n  instance b: BoolSink\n  connect p.dst -> b.flag\nend",
    )
    .unwrap_err();
    assert!(codes.contains(&DiagCode::Connect));
}

#[test]
fn unknown_actor_or_victim_is_a_name_error() {
    let codes = link("network N\n  instance x: NoSuchActor\nend").unwrap_err();
    assert!(codes.contains(&DiagCode::Name));
    let codes = link("network N\n  instance p: Producer\n  victim ghost\nend").unwrap_err();
    assert!(codes.contains(&DiagCode::Name));
}
