//! Glue between files and the core: loading, linking and running both
//! execution models.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};

use actorforge_core::dataflow::{
    link_network, run_until_quiescent, FiringRecord, Network, SchedulerPolicy, Termination,
};
use actorforge_core::diag::Diagnostic;
use actorforge_core::frontend::{
    parse_actor_source, parse_network_source, resolve, NetworkDecl, ResolvedActor,
};
use actorforge_core::seqvm::vm::{Scenario, VmConfig};
use actorforge_core::seqvm::{run_scenario, ScenarioOutcome};

/// Parse + resolve failure carrying renderable diagnostics.
#[derive(Debug)]
pub struct Diagnosed(pub Vec<Diagnostic>);

impl std::fmt::Display for Diagnosed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for d in &self.0 {
            writeln!(f, "{}", d.render())?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnosed {}

pub fn load_actor_text(text: &str, file: &str) -> Result<ResolvedActor, Diagnosed> {
    let decl = parse_actor_source(text, file).map_err(|d| Diagnosed(vec![d]))?;
    resolve(&decl).map_err(Diagnosed)
}

pub fn load_actor_file(path: &Path) -> Result<Result<ResolvedActor, Diagnosed>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(load_actor_text(&text, &path.display().to_string()))
}

/// Parse a network file and link it against its imports, resolved through
/// `load_import` (filesystem for the CLI, embedded sources for the demo).
pub fn link_network_text<F>(
    text: &str,
    file: &str,
    buffer_cap: Option<usize>,
    load_import: F,
) -> Result<Result<(NetworkDecl, Network), Diagnosed>>
where
    F: Fn(&str) -> Result<String>,
{
    let decl = match parse_network_source(text, file) {
        Ok(decl) => decl,
        Err(d) => return Ok(Err(Diagnosed(vec![d]))),
    };
    let mut actors: BTreeMap<String, ResolvedActor> = BTreeMap::new();
    for (import, _) in &decl.imports {
        let source =
            load_import(import).with_context(|| format!("import `{import}` of {file}"))?;
        match load_actor_text(&source, import) {
            Ok(actor) => {
                actors.insert(actor.decl.name.clone(), actor);
            }
            Err(diagnosed) => return Ok(Err(diagnosed)),
        }
    }
    match link_network(&decl, &actors, buffer_cap) {
        Ok(network) => Ok(Ok((decl, network))),
        Err(diags) => Ok(Err(Diagnosed(diags))),
    }
}

pub fn link_network_file(
    path: &Path,
    buffer_cap: Option<usize>,
) -> Result<Result<(NetworkDecl, Network), Diagnosed>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let dir: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    link_network_text(&text, &path.display().to_string(), buffer_cap, |import| {
        let target = dir.join(import);
        std::fs::read_to_string(&target)
            .with_context(|| format!("reading {}", target.display()))
    })
}

pub struct DataflowRun {
    pub network: Network,
    pub trace: Vec<FiringRecord>,
    pub termination: Termination,
}

pub fn run_dataflow(mut network: Network, max_steps: u64) -> DataflowRun {
    let (trace, termination) =
        run_until_quiescent(&mut network, SchedulerPolicy::RoundRobin, max_steps);
    DataflowRun { network, trace, termination }
}

pub fn run_sequential(scenario: &Scenario, config: VmConfig) -> Result<ScenarioOutcome> {
    run_scenario(scenario, config).map_err(|e| anyhow!("{e}"))
}

/// Victim addresses declared by a scenario, resolved post-run.
pub fn scenario_victims(
    scenario: &Scenario,
    outcome: &ScenarioOutcome,
) -> std::collections::BTreeSet<actorforge_core::value::Address> {
    scenario.victims.iter().filter_map(|v| outcome.address_of(v)).collect()
}
