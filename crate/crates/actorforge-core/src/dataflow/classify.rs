//! Token-rate classification: static, cyclo-static or dynamic.
//!
//! Rates are syntactic in this DSL (bodies have no control flow), so the
//! taxonomy is decidable: an actor is static when every action moves the
//! same constant token counts and nothing inspects data; cyclo-static when
//! a deterministic FSM cycle yields a repeating rate sequence; dynamic
//! otherwise. Request-port consumption counts as data inspection — firing
//! dispatches on the token's method tag.

use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::frontend::resolver::{ConsumeKind, ResolvedActor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorClass {
    Static,
    CycloStatic,
    Dynamic,
}

impl core::fmt::Display for ActorClass {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ActorClass::Static => write!(f, "Static"),
            ActorClass::CycloStatic => write!(f, "CycloStatic"),
            ActorClass::Dynamic => write!(f, "Dynamic"),
        }
    }
}

/// Per-port token counts for one firing, ports in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RateVector {
    pub consumed: Vec<u32>,
    pub produced: Vec<u32>,
}

impl RateVector {
    pub fn render(&self) -> String {
        let c: Vec<String> = self.consumed.iter().map(|v| alloc::format!("{v}")).collect();
        let p: Vec<String> = self.produced.iter().map(|v| alloc::format!("{v}")).collect();
        alloc::format!("({};{})", c.join(","), p.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateSignature {
    Constant(RateVector),
    /// Non-empty, minimal period: no shorter prefix generates the sequence.
    Cyclic(Vec<RateVector>),
    Unknown,
}

impl RateSignature {
    pub fn render(&self) -> String {
        match self {
            RateSignature::Constant(v) => v.render(),
            RateSignature::Cyclic(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| v.render()).collect();
                alloc::format!("period={} [{}]", vs.len(), parts.join(" "))
            }
            RateSignature::Unknown => String::from("unknown"),
        }
    }
}

fn action_rate(actor: &ResolvedActor, action_idx: usize) -> RateVector {
    let info = &actor.actions[action_idx];
    RateVector { consumed: info.consumption.clone(), produced: info.production.clone() }
}

fn action_inspects_data(actor: &ResolvedActor, action_idx: usize) -> bool {
    let info = &actor.actions[action_idx];
    info.data_dependent_guards
        || info.consumes.iter().any(|c| matches!(c.kind, ConsumeKind::Request))
}

/// Smallest period that generates the sequence by repetition.
fn minimize_period(seq: &[RateVector]) -> Vec<RateVector> {
    let n = seq.len();
    for period in 1..=n {
        if n % period != 0 {
            continue;
        }
        if seq.iter().enumerate().all(|(i, v)| *v == seq[i % period]) {
            return seq[..period].to_vec();
        }
    }
    seq.to_vec()
}

/// Classify an actor and report the rate signature consistent with the
/// class.
pub fn classify_actor(actor: &ResolvedActor) -> (ActorClass, RateSignature) {
    let decl = &actor.decl;

    if decl.actions.iter().enumerate().any(|(i, _)| action_inspects_data(actor, i)) {
        return (ActorClass::Dynamic, RateSignature::Unknown);
    }

    if let Some(fsm) = &decl.schedule {
        // A deterministic single cycle through the initial state with one
        // permitted action per state yields a cyclo-static signature.
        let mut sequence: Vec<RateVector> = Vec::new();
        let initial = fsm.initial_state();
        let mut current = initial;
        loop {
            let outgoing: Vec<_> =
                fsm.transitions.iter().filter(|t| t.from == *current).collect();
            if outgoing.len() != 1 {
                return (ActorClass::Dynamic, RateSignature::Unknown);
            }
            let t = outgoing[0];
            let Some(action_idx) = decl.actions.iter().position(|a| a.name == t.action) else {
                return (ActorClass::Dynamic, RateSignature::Unknown);
            };
            sequence.push(action_rate(actor, action_idx));
            if sequence.len() > fsm.transitions.len() {
                // Walk left the initial state's orbit without closing.
                return (ActorClass::Dynamic, RateSignature::Unknown);
            }
            if t.to == *initial {
                break;
            }
            current = &t.to;
        }
        let minimal = minimize_period(&sequence);
        if minimal.len() == 1 {
            return (ActorClass::Static, RateSignature::Constant(minimal[0].clone()));
        }
        return (ActorClass::CycloStatic, RateSignature::Cyclic(minimal));
    }

    // No schedule: static iff all actions share one constant vector.
    let mut rates = (0..decl.actions.len()).map(|i| action_rate(actor, i));
    match rates.next() {
        None => (
            ActorClass::Static,
            RateSignature::Constant(RateVector {
                consumed: alloc::vec![0; decl.inputs.len()],
                produced: alloc::vec![0; decl.outputs.len()],
            }),
        ),
        Some(first) => {
            if rates.all(|r| r == first) {
                (ActorClass::Static, RateSignature::Constant(first))
            } else {
                (ActorClass::Dynamic, RateSignature::Unknown)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parser::parse_actor_source;
    use crate::frontend::resolver::resolve;

    fn classify_src(src: &str) -> (ActorClass, RateSignature) {
        let decl = parse_actor_source(src, "t.actor").unwrap();
        classify_actor(&resolve(&decl).unwrap())
    }

    #[test]
    fn single_guard_free_action_is_static() {
        let (class, sig) = classify_src(
            "actor Copy\n  in src: uint\n  out dst: uint\n  action copy on src(x) do emit dst(x); end\nend",
        );
        assert_eq!(class, ActorClass::Static);
        assert_eq!(sig.render(), "(1;1)");
    }

    #[test]
    fn fsm_alternation_is_cyclo_static_with_period_two() {
        let (class, sig) = classify_src(
            "actor Alt\n  in src: uint\n  out dst: uint\n  action pair on src(a, b) do emit dst(a + b); end\n  action single on src(x) do emit dst(x); end\n  schedule\n    s0: pair -> s1;\n    s1: single -> s0;\n  end\nend",
        );
        assert_eq!(class, ActorClass::CycloStatic);
        match sig {
            RateSignature::Cyclic(seq) => assert_eq!(seq.len(), 2),
            other => panic!("expected cyclic signature, got {other:?}"),
        }
    }

    #[test]
    fn fsm_cycle_with_equal_rates_collapses_to_static() {
        let (class, _) = classify_src(
            "actor A\n  in src: uint\n  out dst: uint\n  action f on src(x) do emit dst(x); end\n  action g on src(x) do emit dst(x); end\n  schedule\n    s0: f -> s1;\n    s1: g -> s0;\n  end\nend",
        );
        assert_eq!(class, ActorClass::Static);
    }

    #[test]
    fn state_guard_makes_dynamic() {
        let (class, sig) = classify_src(
            "actor A\n  in src: uint\n  out dst: uint\n  state n: uint = 0\n  action f on src(x) guard n == 0 do emit dst(x); end\nend",
        );
        assert_eq!(class, ActorClass::Dynamic);
        assert_eq!(sig, RateSignature::Unknown);
    }

    #[test]
    fn request_port_makes_dynamic() {
        let (class, _) = classify_src(
            "actor A\n  in req: request\n  state total: uint = 0\n  action f on req do total = total + value; end\nend",
        );
        assert_eq!(class, ActorClass::Dynamic);
    }

    #[test]
    fn differing_unscheduled_rates_are_dynamic() {
        let (class, _) = classify_src(
            "actor A\n  in src: uint\n  out dst: uint\n  action one on src(x) do emit dst(x); end\n  action two on src(a, b) do emit dst(a); end\nend",
        );
        assert_eq!(class, ActorClass::Dynamic);
    }

    #[test]
    fn empty_actor_is_trivially_static() {
        let (class, sig) = classify_src("actor Empty end");
        assert_eq!(class, ActorClass::Static);
        assert_eq!(sig.render(), "(;)");
    }
}
