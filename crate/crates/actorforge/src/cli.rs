//! Command-line surface: parse, check, classify, compile, simulate,
//! attack-demo. Exit codes: 0 success, 1 diagnostics or failed check,
//! 2 usage error, 3 internal error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use actorforge_core::analyzer::verify_generated;
use actorforge_core::codegen::generate_contract;
use actorforge_core::dataflow::{self, classify_actor, RateSignature, Termination};
use actorforge_core::diag::Diagnostic;
use actorforge_core::seqvm::vm::VmConfig;
use actorforge_core::seqvm::{parse_contract_source, victim_loss};
use actorforge_core::value::Uint;

use crate::demo::{run_attack_demo, DemoSources};
use crate::formats;
use crate::pipeline::{
    self, link_network_file, load_actor_file, run_dataflow, run_sequential, Diagnosed,
};

pub const DEFAULT_MAX_STEPS: u64 = 10_000;
pub const MAX_STEPS_ENV: &str = "ACTORFORGE_MAX_STEPS";

#[derive(Debug, Parser)]
#[command(name = "actorforge", version, about = "Dataflow smart-contract toolchain: parse, classify, compile and simulate guarded-action actors")]
pub struct Cli {
    /// Emit machine-readable JSON instead of human-readable text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Sequential,
    Dataflow,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an .actor or .network file and print a summary.
    Parse { path: PathBuf },
    /// Parse and resolve (actors) or link (networks), reporting diagnostics.
    Check { path: PathBuf },
    /// Report an actor's rate class and signature.
    Classify {
        path: PathBuf,
        /// Also run the actor against a JSON token script and print the
        /// observed per-firing rate vectors.
        #[arg(long)]
        observe: Option<PathBuf>,
        /// Firing budget for --observe.
        #[arg(long, default_value_t = 20)]
        firings: usize,
    },
    /// Generate the lock-protected contract for an actor and verify it.
    Compile {
        path: PathBuf,
        /// Directory receiving `<actor>_generated.sol.txt`.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a .scenario (sequential) or .network (dataflow) simulation.
    Simulate {
        path: PathBuf,
        #[arg(long)]
        model: Option<Model>,
        /// Firing/step budget; defaults to ACTORFORGE_MAX_STEPS or 10000.
        #[arg(long)]
        max_steps: Option<u64>,
        /// Write the JSONL trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Bound every buffer; a full buffer blocks its producer.
        #[arg(long)]
        buffer_cap: Option<usize>,
    },
    /// Run the four-way drain comparison on the bundled fixtures.
    AttackDemo,
}

enum Failure {
    Usage(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

type CmdResult = Result<u8, Failure>;

pub fn run(cli: &Cli) -> u8 {
    let result = match &cli.command {
        Command::Parse { path } => cmd_parse(path, cli.json),
        Command::Check { path } => cmd_check(path, cli.json),
        Command::Classify { path, observe, firings } => {
            cmd_classify(path, observe.as_deref(), *firings, cli.json)
        }
        Command::Compile { path, out } => cmd_compile(path, out, cli.json),
        Command::Simulate { path, model, max_steps, trace, buffer_cap } => {
            cmd_simulate(path, *model, *max_steps, trace.as_deref(), *buffer_cap, cli.json)
        }
        Command::AttackDemo => cmd_attack_demo(cli.json),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            2
        }
        Err(Failure::Internal(error)) => {
            eprintln!("internal error: {error:#}");
            3
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InputKind {
    Actor,
    Network,
    Scenario,
}

fn input_kind(path: &Path) -> Result<InputKind, Failure> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("actor") => Ok(InputKind::Actor),
        Some("network") => Ok(InputKind::Network),
        Some("scenario") => Ok(InputKind::Scenario),
        _ => Err(usage(format!(
            "{}: expected a .actor, .network or .scenario file",
            path.display()
        ))),
    }
}

fn diagnostics_json(diags: &[Diagnostic]) -> serde_json::Value {
    json!(diags
        .iter()
        .map(|d| {
            json!({
                "file": d.span.file.as_ref(),
                "line": d.span.line,
                "column": d.span.column,
                "severity": format!("{}", d.severity),
                "code": format!("{}", d.code),
                "message": d.message,
            })
        })
        .collect::<Vec<_>>())
}

fn report_diagnostics(diags: &[Diagnostic], as_json: bool) -> u8 {
    if as_json {
        let payload = json!({
            "version": actorforge_core::VERSION,
            "diagnostics": diagnostics_json(diags),
        });
        println!("{payload}");
    } else {
        for d in diags {
            eprintln!("{}", d.render());
        }
    }
    1
}

fn cmd_parse(path: &Path, as_json: bool) -> CmdResult {
    let text = read_file(path)?;
    let file = path.display().to_string();
    match input_kind(path)? {
        InputKind::Actor => {
            match actorforge_core::frontend::parse_actor_source(&text, &file) {
                Ok(decl) => {
                    if as_json {
                        println!(
                            "{}",
                            json!({
                                "version": actorforge_core::VERSION,
                                "kind": "actor",
                                "name": decl.name,
                                "inputs": decl.inputs.len(),
                                "outputs": decl.outputs.len(),
                                "state_vars": decl.state_vars.len(),
                                "actions": decl.actions.iter().map(|a| a.name.clone()).collect::<Vec<_>>(),
                                "schedule": decl.schedule.is_some(),
                            })
                        );
                    } else {
                        println!(
                            "actor {}: {} input(s), {} output(s), {} state var(s), {} action(s){}",
                            decl.name,
                            decl.inputs.len(),
                            decl.outputs.len(),
                            decl.state_vars.len(),
                            decl.actions.len(),
                            if decl.schedule.is_some() { ", scheduled" } else { "" }
                        );
                    }
                    Ok(0)
                }
                Err(d) => Ok(report_diagnostics(&[d], as_json)),
            }
        }
        InputKind::Network => {
            match actorforge_core::frontend::parse_network_source(&text, &file) {
                Ok(decl) => {
                    if as_json {
                        println!(
                            "{}",
                            json!({
                                "version": actorforge_core::VERSION,
                                "kind": "network",
                                "name": decl.name,
                                "imports": decl.imports.len(),
                                "instances": decl.instances.len(),
                                "connections": decl.connections.len(),
                            })
                        );
                    } else {
                        println!(
                            "network {}: {} instance(s), {} connection(s), {} import(s)",
                            decl.name,
                            decl.instances.len(),
                            decl.connections.len(),
                            decl.imports.len()
                        );
                    }
                    Ok(0)
                }
                Err(d) => Ok(report_diagnostics(&[d], as_json)),
            }
        }
        InputKind::Scenario => {
            Err(usage(format!("{}: `parse` handles .actor and .network files", path.display())))
        }
    }
}

fn cmd_check(path: &Path, as_json: bool) -> CmdResult {
    match input_kind(path)? {
        InputKind::Actor => match load_actor_file(path).map_err(Failure::Internal)? {
            Ok(actor) => {
                if as_json {
                    println!(
                        "{}",
                        json!({
                            "version": actorforge_core::VERSION,
                            "diagnostics": [],
                            "actor": actor.decl.name,
                        })
                    );
                } else {
                    println!("{}: ok", path.display());
                }
                Ok(0)
            }
            Err(Diagnosed(diags)) => Ok(report_diagnostics(&diags, as_json)),
        },
        InputKind::Network => {
            match link_network_file(path, None).map_err(Failure::Internal)? {
                Ok((decl, network)) => {
                    if as_json {
                        println!(
                            "{}",
                            json!({
                                "version": actorforge_core::VERSION,
                                "diagnostics": [],
                                "network": decl.name,
                                "buffers": network.buffers.len(),
                            })
                        );
                    } else {
                        println!("{}: ok ({} buffers)", path.display(), network.buffers.len());
                    }
                    Ok(0)
                }
                Err(Diagnosed(diags)) => Ok(report_diagnostics(&diags, as_json)),
            }
        }
        InputKind::Scenario => {
            Err(usage(format!("{}: `check` handles .actor and .network files", path.display())))
        }
    }
}

fn signature_text(signature: &RateSignature) -> String {
    match signature {
        RateSignature::Constant(v) => v.render(),
        RateSignature::Cyclic(_) => signature.render(),
        RateSignature::Unknown => String::new(),
    }
}

fn cmd_classify(
    path: &Path,
    observe: Option<&Path>,
    firings: usize,
    as_json: bool,
) -> CmdResult {
    if input_kind(path)? != InputKind::Actor {
        return Err(usage(format!("{}: `classify` takes an .actor file", path.display())));
    }
    let actor = match load_actor_file(path).map_err(Failure::Internal)? {
        Ok(actor) => actor,
        Err(Diagnosed(diags)) => return Ok(report_diagnostics(&diags, as_json)),
    };
    let (class, signature) = classify_actor(&actor);
    let observed = match observe {
        Some(script_path) => {
            let script = formats::load_script(&read_file(script_path)?)
                .map_err(|e| usage(format!("{}: {e:#}", script_path.display())))?;
            match dataflow::simulate_rates(&actor, &script, firings, Uint::ether(1_000_000)) {
                Ok(observed) => Some(observed),
                Err(e) => {
                    eprintln!("{}: {e}", script_path.display());
                    return Ok(1);
                }
            }
        }
        None => None,
    };
    if as_json {
        println!(
            "{}",
            json!({
                "version": actorforge_core::VERSION,
                "actor": actor.decl.name,
                "class": format!("{class}"),
                "signature": signature,
                "observed": observed.as_ref().map(|obs| obs
                    .iter()
                    .map(|(action, v)| json!({"action": action, "rates": v.render()}))
                    .collect::<Vec<_>>()),
            })
        );
    } else {
        let suffix = signature_text(&signature);
        if suffix.is_empty() {
            println!("{}: {class}", actor.decl.name);
        } else {
            println!("{}: {class} {suffix}", actor.decl.name);
        }
        if let Some(observed) = &observed {
            for (action, vector) in observed {
                println!("observed {action} {}", vector.render());
            }
        }
    }
    Ok(0)
}

fn cmd_compile(path: &Path, out_dir: &Path, as_json: bool) -> CmdResult {
    if input_kind(path)? != InputKind::Actor {
        return Err(usage(format!("{}: `compile` takes an .actor file", path.display())));
    }
    if !out_dir.is_dir() {
        return Err(usage(format!("output directory {} does not exist", out_dir.display())));
    }
    let actor = match load_actor_file(path).map_err(Failure::Internal)? {
        Ok(actor) => actor,
        Err(Diagnosed(diags)) => return Ok(report_diagnostics(&diags, as_json)),
    };
    let source = match generate_contract(&actor) {
        Ok(source) => source,
        Err(plan_error) => {
            if as_json {
                println!(
                    "{}",
                    json!({
                        "version": actorforge_core::VERSION,
                        "error": format!("{plan_error}"),
                    })
                );
            } else {
                eprintln!("{plan_error}");
            }
            return Ok(1);
        }
    };
    let out_path = out_dir.join(format!("{}_generated.sol.txt", actor.decl.name.to_lowercase()));
    std::fs::write(&out_path, &source)
        .map_err(|e| usage(format!("cannot write {}: {e}", out_path.display())))?;

    let def = parse_contract_source(&source, &out_path.display().to_string())
        .map_err(|d| Failure::Internal(anyhow!("generated source failed to parse: {}", d.render())))?;
    let findings = match verify_generated(&actor, &def) {
        Ok(()) => Vec::new(),
        Err(findings) => findings,
    };
    if as_json {
        println!(
            "{}",
            json!({
                "version": actorforge_core::VERSION,
                "output": out_path.display().to_string(),
                "verified": findings.is_empty(),
                "findings": findings.iter().map(|f| f.render()).collect::<Vec<_>>(),
            })
        );
    } else {
        println!("wrote {}", out_path.display());
        for finding in &findings {
            eprintln!("{}", finding.render());
        }
        if findings.is_empty() {
            println!("verified: structure matches the actor");
        }
    }
    Ok(if findings.is_empty() { 0 } else { 1 })
}

fn effective_max_steps(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(steps) = flag {
        return Ok(steps);
    }
    match std::env::var(MAX_STEPS_ENV) {
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| usage(format!("{MAX_STEPS_ENV}=`{text}` is not a step count"))),
        Err(_) => Ok(DEFAULT_MAX_STEPS),
    }
}

fn cmd_simulate(
    path: &Path,
    model: Option<Model>,
    max_steps: Option<u64>,
    trace_path: Option<&Path>,
    buffer_cap: Option<usize>,
    as_json: bool,
) -> CmdResult {
    let kind = input_kind(path)?;
    let max_steps = effective_max_steps(max_steps)?;
    match (kind, model) {
        (InputKind::Scenario, None | Some(Model::Sequential)) => {
            simulate_sequential(path, trace_path, as_json)
        }
        (InputKind::Network, None | Some(Model::Dataflow)) => {
            simulate_dataflow(path, max_steps, trace_path, buffer_cap, as_json)
        }
        (InputKind::Scenario, Some(Model::Dataflow)) => {
            Err(usage("scenario files run under the sequential model"))
        }
        (InputKind::Network, Some(Model::Sequential)) => {
            Err(usage("network files run under the dataflow model"))
        }
        (InputKind::Actor, _) => {
            Err(usage(format!("{}: simulate takes a .scenario or .network file", path.display())))
        }
    }
}

fn write_trace(path: Option<&Path>, contents: &str) -> Result<(), Failure> {
    if let Some(path) = path {
        std::fs::write(path, contents)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn simulate_sequential(path: &Path, trace_path: Option<&Path>, as_json: bool) -> CmdResult {
    let text = read_file(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let scenario = formats::load_scenario(&text, |source| {
        let target = dir.join(source);
        std::fs::read_to_string(&target)
            .map_err(|e| anyhow!("cannot read {}: {e}", target.display()))
    });
    let scenario = match scenario {
        Ok(scenario) => scenario,
        Err(error) => {
            eprintln!("{}: {error:#}", path.display());
            return Ok(1);
        }
    };
    let outcome = match run_sequential(&scenario, VmConfig::default()) {
        Ok(outcome) => outcome,
        Err(error) => {
            eprintln!("{}: {error:#}", path.display());
            return Ok(1);
        }
    };
    write_trace(trace_path, &formats::sequential_trace_jsonl(&outcome.trace))?;

    let victims = pipeline::scenario_victims(&scenario, &outcome);
    let loss = victim_loss(&outcome.trace, &victims);
    let mut balances: Vec<(String, String, Uint)> = Vec::new();
    for (alias, address) in &outcome.aliases {
        balances.push((alias.clone(), address.to_hex(), outcome.world.balance_of(*address)));
    }
    if as_json {
        println!(
            "{}",
            json!({
                "version": actorforge_core::VERSION,
                "model": "sequential",
                "balances": balances
                    .iter()
                    .map(|(alias, addr, wei)| json!({"alias": alias, "address": addr, "wei": wei}))
                    .collect::<Vec<_>>(),
                "victim_loss_wei": loss,
                "events": outcome.trace.len(),
            })
        );
    } else {
        for (alias, addr, wei) in &balances {
            println!("{alias} ({addr}): {}", wei.render_ether());
        }
        if !scenario.victims.is_empty() {
            println!("victim_loss={}", loss.render_ether());
        }
    }
    Ok(0)
}

fn simulate_dataflow(
    path: &Path,
    max_steps: u64,
    trace_path: Option<&Path>,
    buffer_cap: Option<usize>,
    as_json: bool,
) -> CmdResult {
    let linked = match link_network_file(path, buffer_cap).map_err(Failure::Internal)? {
        Ok(linked) => linked,
        Err(Diagnosed(diags)) => return Ok(report_diagnostics(&diags, as_json)),
    };
    let run = run_dataflow(linked.1, max_steps);
    write_trace(trace_path, &formats::dataflow_trace_jsonl(&run.trace, run.termination))?;
    let loss = dataflow::victim_loss(&run.network, &run.trace);
    if as_json {
        println!(
            "{}",
            json!({
                "version": actorforge_core::VERSION,
                "model": "dataflow",
                "balances": run.network.instances.iter()
                    .map(|i| json!({"instance": i.name, "wei": i.native_balance}))
                    .collect::<Vec<_>>(),
                "steps": run.trace.len(),
                "terminated": run.termination,
                "victim_loss_wei": loss,
            })
        );
    } else {
        for instance in &run.network.instances {
            println!("{}: {}", instance.name, instance.native_balance.render_ether());
        }
        match run.termination {
            Termination::Quiescent => {
                println!("quiescent after {} step(s)", run.trace.len());
            }
            Termination::StepLimitExceeded => {
                println!(
                    "step limit exceeded after {} step(s); the network is still active",
                    run.trace.len()
                );
            }
        }
        if !run.network.victims.is_empty() {
            println!("victim_loss={}", loss.render_ether());
        }
    }
    Ok(0)
}

fn cmd_attack_demo(as_json: bool) -> CmdResult {
    let max_steps = effective_max_steps(None)?;
    let report = run_attack_demo(&DemoSources::default(), max_steps)?;
    if as_json {
        let mut rows = BTreeMap::new();
        for row in &report.rows {
            rows.insert(
                row.configuration,
                json!({
                    "victim_loss_wei": row.victim_loss_wei,
                    "expected_wei": row.expected_wei,
                    "ok": row.ok(),
                }),
            );
        }
        println!(
            "{}",
            json!({
                "version": actorforge_core::VERSION,
                "rows": rows,
                "pass": report.pass(),
            })
        );
    } else {
        print!("{}", report.render_table());
    }
    Ok(if report.pass() { 0 } else { 1 })
}
