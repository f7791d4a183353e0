//! Frontend invariants: round-trips, totality, determinism, resolution
//! soundness.

use actorforge_core::diag::DiagCode;
use actorforge_core::frontend::{
    parse_actor_source, parse_network_source, resolve, unparse_actor, unparse_network,
};
use proptest::prelude::*;

const ACTOR_FIXTURES: &[(&str, &str)] = &[
    ("dao.actor", include_str!("../../../fixtures/dao.actor")),
    ("attacker.actor", include_str!("../../../fixtures/attacker.actor")),
    ("copy.actor", include_str!("../../../fixtures/copy.actor")),
    ("alt.actor", include_str!("../../../fixtures/alt.actor")),
    ("empty.actor", include_str!("../../../fixtures/empty.actor")),
    ("ambiguous_emit.actor", include_str!("../../../fixtures/ambiguous_emit.actor")),
];

const NETWORK_FIXTURE: &str = include_str!("../../../fixtures/dao_attacker.network");

#[test]
fn dao_fixture_parses_to_the_documented_shape() {
    let decl = parse_actor_source(ACTOR_FIXTURES[0].1, "dao.actor").unwrap();
    assert_eq!(decl.name, "Dao");
    assert_eq!(decl.inputs.len(), 1);
    assert_eq!(decl.outputs.len(), 1);
    assert_eq!(decl.state_vars.len(), 1);
    assert_eq!(decl.actions.len(), 2);
    assert!(decl.schedule.is_none());
}

#[test]
fn every_actor_fixture_round_trips() {
    for (file, src) in ACTOR_FIXTURES {
        let first = parse_actor_source(src, file).unwrap_or_else(|e| panic!("{file}: {e}"));
        let rendered = unparse_actor(&first);
        let second = parse_actor_source(&rendered, file)
            .unwrap_or_else(|e| panic!("{file} reparse: {e}\n{rendered}"));
        assert_eq!(first.normalized(), second.normalized(), "{file} round trip");
    }
}

#[test]
fn network_fixture_round_trips() {
    let first = parse_network_source(NETWORK_FIXTURE, "dao_attacker.network").unwrap();
    assert_eq!(first.instances.len(), 2);
    assert_eq!(first.connections.len(), 2);
    let rendered = unparse_network(&first);
    let second = parse_network_source(&rendered, "dao_attacker.network").unwrap();

    // Compare modulo spans.
    let strip = |decl: &actorforge_core::frontend::NetworkDecl| {
        let span = actorforge_core::span::SourceSpan::synthetic();
        let mut copy = decl.clone();
        copy.span = span.clone();
        for (_, s) in copy.imports.iter_mut() {
            *s = span.clone();
        }
        for inst in copy.instances.iter_mut() {
            inst.span = span.clone();
            if let Some(balance) = inst.balance.as_mut() {
                *balance = actorforge_core::frontend::Expr::Uint(
                    actorforge_core::frontend::resolver::const_eval_uint(balance).unwrap(),
                    span.clone(),
                );
            }
        }
        for conn in copy.connections.iter_mut() {
            conn.span = span.clone();
        }
        for (_, s) in copy.victims.iter_mut() {
            *s = span.clone();
        }
        copy
    };
    assert_eq!(strip(&first), strip(&second));
}

#[test]
fn clean_fixtures_resolve_without_diagnostics() {
    for (file, src) in ACTOR_FIXTURES {
        let decl = parse_actor_source(src, file).unwrap();
        resolve(&decl).unwrap_or_else(|d| panic!("{file}: {d:?}"));
    }
}

#[test]
fn bad_syntax_fixture_reports_a_span() {
    let err = parse_actor_source(
        include_str!("../../../fixtures/bad_syntax.actor"),
        "bad_syntax.actor",
    )
    .unwrap_err();
    assert_eq!(err.code, DiagCode::Parse);
    assert!(err.span.line >= 1 && err.span.column >= 1);
}

#[test]
fn parsing_is_deterministic_on_fixtures() {
    for (file, src) in ACTOR_FIXTURES {
        let a = parse_actor_source(src, file).unwrap();
        let b = parse_actor_source(src, file).unwrap();
        assert_eq!(a, b, "{file}: identical bytes must give identical ASTs");
    }
}

proptest! {
    /// Totality: arbitrary input never panics; it parses or reports a
    /// spanned diagnostic.
    #[test]
    fn parser_is_total_on_arbitrary_input(input in ".{0,200}") {
        match parse_actor_source(&input, "fuzz.actor") {
            Ok(_) => {}
            Err(diag) => {
                prop_assert!(diag.span.line >= 1);
                prop_assert!(diag.span.column >= 1);
            }
        }
        match parse_network_source(&input, "fuzz.network") {
            Ok(_) => {}
            Err(diag) => {
                prop_assert!(diag.span.line >= 1);
                prop_assert!(diag.span.column >= 1);
            }
        }
    }

    /// Identifier-heavy soup exercises the keyword/ident boundary.
    #[test]
    fn parser_is_total_on_token_soup(
        words in proptest::collection::vec("(actor|in|out|state|action|guard|do|emit|end|on|let|[a-z]{1,6}|[0-9]{1,4}|ether|\\(|\\)|;|:|,|=|\\+)", 0..60)
    ) {
        let input = words.join(" ");
        let _ = parse_actor_source(&input, "fuzz.actor");
    }

    /// Round-trip on generated well-formed actors: unparse(parse(x))
    /// reparses to a structurally equal AST.
    #[test]
    fn generated_actors_round_trip(
        n_state in 0usize..3,
        n_actions in 0usize..3,
        guard_value in 0u64..1000,
    ) {
        let mut src = String::from("actor Gen\n  in src: uint\n  out dst: uint\n");
        for i in 0..n_state {
            src.push_str(&format!("  state s{i}: uint = {i}\n"));
        }
        for i in 0..n_actions {
            src.push_str(&format!(
                "  action a{i} on src(x) guard x > {guard_value} do emit dst(x + {i}); end\n"
            ));
        }
        src.push_str("end\n");
        let first = parse_actor_source(&src, "gen.actor").unwrap();
        let second = parse_actor_source(&unparse_actor(&first), "gen.actor").unwrap();
        prop_assert_eq!(first.normalized(), second.normalized());
    }
}
