//! The four-way attack demonstration: the same drain attempt against the
//! vulnerable contract, the reordered fix, the generated mutex contract and
//! the dataflow network.

use std::sync::Arc;

use anyhow::{anyhow, Result};
use serde::Serialize;

use actorforge_core::codegen::generate_contract;
use actorforge_core::dataflow;
use actorforge_core::seqvm::vm::{Deployment, VmConfig};
use actorforge_core::seqvm::{parse_contract_source, run_scenario, victim_loss, ContractDef};
use actorforge_core::value::Uint;

use crate::fixtures;
use crate::formats::load_scenario;
use crate::pipeline::{link_network_text, load_actor_text, run_dataflow, scenario_victims};

/// Fixture sources the demo runs against; swapping one in tests must flip
/// the demo's verdict.
#[derive(Debug, Clone)]
pub struct DemoSources {
    pub dao_vulnerable: String,
    pub dao_fixed: String,
    pub attacker_contract: String,
    pub dao_actor: String,
    pub attacker_actor: String,
    pub network: String,
    pub scenario: String,
}

impl Default for DemoSources {
    fn default() -> Self {
        DemoSources {
            dao_vulnerable: fixtures::DAO_VULNERABLE.into(),
            dao_fixed: fixtures::DAO_FIXED.into(),
            attacker_contract: fixtures::ATTACKER_CONTRACT.into(),
            dao_actor: fixtures::DAO_ACTOR.into(),
            attacker_actor: fixtures::ATTACKER_ACTOR.into(),
            network: fixtures::DAO_ATTACKER_NETWORK.into(),
            scenario: fixtures::DAO_ATTACK_SCENARIO.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoRow {
    pub configuration: &'static str,
    /// Wei extracted from the victim beyond the attacker's own deposit.
    pub victim_loss_wei: Uint,
    pub expected_wei: Uint,
}

impl DemoRow {
    pub fn ok(&self) -> bool {
        self.victim_loss_wei == self.expected_wei
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub rows: Vec<DemoRow>,
}

impl DemoReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(DemoRow::ok)
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str("configuration        victim_loss\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{}: {} drained{}\n",
                row.configuration,
                row.victim_loss_wei.render_ether(),
                if row.ok() { "" } else { "  [MISMATCH]" }
            ));
        }
        out.push_str(if self.pass() {
            "sequential semantics drain the pool; reordering, the generated mutex and dataflow semantics do not\n"
        } else {
            "unexpected result: at least one configuration deviates\n"
        });
        out
    }
}

/// Run the bundled scenario with the DAO deployment's contract swapped in.
fn sequential_loss(sources: &DemoSources, dao_contract: Arc<ContractDef>) -> Result<Uint> {
    let attacker = &sources.attacker_contract;
    let vulnerable = &sources.dao_vulnerable;
    let scenario_json = &sources.scenario;
    let mut scenario = load_scenario(scenario_json, |path| match path {
        "contracts/dao_vulnerable.sol.txt" => Ok(vulnerable.clone()),
        "contracts/attacker.sol.txt" => Ok(attacker.clone()),
        other => fixtures::embedded(other)
            .map(str::to_string)
            .ok_or_else(|| anyhow!("no embedded source `{other}`")),
    })?;
    for deployment in scenario.deployments.iter_mut() {
        if deployment.name == "dao" {
            *deployment = Deployment { def: dao_contract.clone(), ..deployment.clone() };
        }
    }
    let outcome = run_scenario(&scenario, VmConfig::default()).map_err(|e| anyhow!("{e}"))?;
    let victims = scenario_victims(&scenario, &outcome);
    Ok(victim_loss(&outcome.trace, &victims))
}

pub fn run_attack_demo(sources: &DemoSources, max_steps: u64) -> Result<DemoReport> {
    let vulnerable =
        Arc::new(parse_contract_source(&sources.dao_vulnerable, "dao_vulnerable.sol.txt")
            .map_err(|d| anyhow!("{}", d.render()))?);
    let fixed = Arc::new(
        parse_contract_source(&sources.dao_fixed, "dao_fixed.sol.txt")
            .map_err(|d| anyhow!("{}", d.render()))?,
    );
    let dao_actor = load_actor_text(&sources.dao_actor, "dao.actor")
        .map_err(|d| anyhow!("dao.actor: {d}"))?;
    let generated_src =
        generate_contract(&dao_actor).map_err(|e| anyhow!("codegen: {e}"))?;
    let generated = Arc::new(
        parse_contract_source(&generated_src, "<generated>")
            .map_err(|d| anyhow!("{}", d.render()))?,
    );

    let dataflow_loss = {
        let dao = sources.dao_actor.clone();
        let attacker = sources.attacker_actor.clone();
        let linked = link_network_text(
            &sources.network,
            "dao_attacker.network",
            None,
            move |import| match import {
                "dao.actor" => Ok(dao.clone()),
                "attacker.actor" => Ok(attacker.clone()),
                other => Err(anyhow!("no embedded import `{other}`")),
            },
        )?
        .map_err(|d| anyhow!("dao_attacker.network: {d}"))?;
        let run = run_dataflow(linked.1, max_steps);
        if run.termination != actorforge_core::dataflow::Termination::Quiescent {
            return Err(anyhow!("dataflow run did not reach quiescence in {max_steps} steps"));
        }
        dataflow::victim_loss(&run.network, &run.trace)
    };

    let rows = vec![
        DemoRow {
            configuration: "vulnerable",
            victim_loss_wei: sequential_loss(sources, vulnerable)?,
            expected_wei: Uint::ether(6),
        },
        DemoRow {
            configuration: "reordered-fix",
            victim_loss_wei: sequential_loss(sources, fixed)?,
            expected_wei: Uint::zero(),
        },
        DemoRow {
            configuration: "generated-mutex",
            victim_loss_wei: sequential_loss(sources, generated)?,
            expected_wei: Uint::zero(),
        },
        DemoRow {
            configuration: "dataflow",
            victim_loss_wei: dataflow_loss,
            expected_wei: Uint::zero(),
        },
    ];
    Ok(DemoReport { rows })
}
