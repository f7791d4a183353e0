//! On-disk formats: scenario JSON, rate-script JSON and JSON Lines traces.
//!
//! Amounts are decimal wei strings everywhere, so nothing is lost to
//! floating point. Scenario files reference contract sources by path;
//! resolution goes through a caller-supplied loader so the same code serves
//! the CLI (filesystem) and the bundled demo (embedded sources).

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use actorforge_core::dataflow::{FiringRecord, Termination, TokenValue};
use actorforge_core::seqvm::vm::{AccountInit, Deployment, Scenario, ScenarioValue, StepCall};
use actorforge_core::seqvm::{parse_contracts, resolve_contract, ContractDef, TraceEvent};
use actorforge_core::value::{Address, Uint};

fn parse_wei(text: &str, what: &str) -> Result<Uint> {
    Uint::from_decimal(text)
        .ok_or_else(|| anyhow!("{what}: `{text}` is not a decimal wei amount"))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    accounts: Vec<AccountEntry>,
    #[serde(default)]
    deployments: Vec<DeploymentEntry>,
    #[serde(default)]
    steps: Vec<StepEntry>,
    #[serde(default)]
    victims: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AccountEntry {
    name: String,
    balance: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeploymentEntry {
    name: String,
    source: String,
    contract: String,
    deployer: String,
    #[serde(default)]
    args: Vec<serde_json::Value>,
    #[serde(default)]
    endowment: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepEntry {
    caller: String,
    callee: String,
    function: String,
    #[serde(default)]
    args: Vec<serde_json::Value>,
    #[serde(default)]
    value: Option<String>,
}

fn scenario_arg(value: &serde_json::Value) -> Result<ScenarioValue> {
    match value {
        serde_json::Value::Bool(b) => Ok(ScenarioValue::Bool(*b)),
        serde_json::Value::Number(n) => {
            let n = n.as_u64().ok_or_else(|| anyhow!("numeric arg must be a u64: {n}"))?;
            Ok(ScenarioValue::Uint(Uint::from_u64(n)))
        }
        serde_json::Value::String(s) => {
            if let Some(alias) = s.strip_prefix('@') {
                return Ok(ScenarioValue::Ref(alias.to_string()));
            }
            if s.starts_with("0x") || s.starts_with("0X") {
                let addr = Address::from_hex(s)
                    .ok_or_else(|| anyhow!("`{s}` is not a 40-hex-digit address"))?;
                return Ok(ScenarioValue::Addr(addr));
            }
            Ok(ScenarioValue::Uint(parse_wei(s, "argument")?))
        }
        other => bail!("unsupported argument {other}"),
    }
}

/// Parse and resolve one named contract out of a source file's text.
pub fn contract_from_source(text: &str, file: &str, name: &str) -> Result<Arc<ContractDef>> {
    let contracts =
        parse_contracts(text, file).map_err(|d| anyhow!("{}", d.render()))?;
    let def = contracts
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| anyhow!("{file}: no contract named `{name}`"))?;
    resolve_contract(&def).map_err(|diags| {
        anyhow!(
            "{file}: {}",
            diags.iter().map(|d| d.render()).collect::<Vec<_>>().join("; ")
        )
    })?;
    Ok(Arc::new(def))
}

/// Load a scenario from JSON text. `load_source` maps each deployment's
/// `source` path to contract text.
pub fn load_scenario<F>(json: &str, load_source: F) -> Result<Scenario>
where
    F: Fn(&str) -> Result<String>,
{
    let file: ScenarioFile = serde_json::from_str(json).context("scenario JSON")?;
    let mut scenario = Scenario::default();
    for account in file.accounts {
        scenario.accounts.push(AccountInit {
            name: account.name,
            balance: parse_wei(&account.balance, "account balance")?,
        });
    }
    // Parsed sources are shared across deployments of the same file.
    let mut cache: BTreeMap<String, String> = BTreeMap::new();
    for entry in file.deployments {
        let text = match cache.get(&entry.source) {
            Some(text) => text.clone(),
            None => {
                let text = load_source(&entry.source)
                    .with_context(|| format!("loading contract source `{}`", entry.source))?;
                cache.insert(entry.source.clone(), text.clone());
                text
            }
        };
        let def = contract_from_source(&text, &entry.source, &entry.contract)?;
        let args =
            entry.args.iter().map(scenario_arg).collect::<Result<Vec<_>>>()?;
        scenario.deployments.push(Deployment {
            name: entry.name,
            def,
            deployer: entry.deployer,
            args,
            endowment: match entry.endowment {
                Some(text) => parse_wei(&text, "endowment")?,
                None => Uint::zero(),
            },
        });
    }
    for entry in file.steps {
        let args =
            entry.args.iter().map(scenario_arg).collect::<Result<Vec<_>>>()?;
        scenario.steps.push(StepCall {
            caller: entry.caller,
            callee: entry.callee,
            function: entry.function,
            args,
            value: match entry.value {
                Some(text) => parse_wei(&text, "step value")?,
                None => Uint::zero(),
            },
        });
    }
    scenario.victims = file.victims;
    Ok(scenario)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptEntry {
    port: String,
    #[serde(default)]
    method: Option<String>,
    #[serde(default)]
    sender: Option<String>,
    #[serde(default)]
    to: Option<String>,
    #[serde(default)]
    value: Option<String>,
    #[serde(default)]
    amount: Option<String>,
    #[serde(default)]
    uint: Option<String>,
    #[serde(default)]
    bool: Option<bool>,
    #[serde(default)]
    address: Option<String>,
}

/// Input scripts for rate simulation: a JSON array of token descriptors.
/// Request tokens carry `method`/`sender`/`value`, transfers `to`/`amount`,
/// plain tokens one of `uint`/`bool`/`address`.
pub fn load_script(json: &str) -> Result<Vec<actorforge_core::dataflow::ScriptToken>> {
    let entries: Vec<ScriptEntry> = serde_json::from_str(json).context("script JSON")?;
    let mut script = Vec::new();
    for entry in entries {
        let addr = |text: &Option<String>, what: &str| -> Result<Address> {
            let text = text.as_ref().ok_or_else(|| anyhow!("token needs `{what}`"))?;
            Address::from_hex(text).ok_or_else(|| anyhow!("`{text}` is not an address"))
        };
        let token = if let Some(method) = &entry.method {
            TokenValue::Request {
                method: method.clone(),
                sender: addr(&entry.sender, "sender")?,
                value: match &entry.value {
                    Some(v) => parse_wei(v, "token value")?,
                    None => Uint::zero(),
                },
            }
        } else if entry.to.is_some() || entry.amount.is_some() {
            TokenValue::Transfer {
                to: addr(&entry.to, "to")?,
                amount: parse_wei(
                    entry.amount.as_deref().ok_or_else(|| anyhow!("transfer needs `amount`"))?,
                    "amount",
                )?,
            }
        } else if let Some(v) = &entry.uint {
            TokenValue::Uint(parse_wei(v, "uint token")?)
        } else if let Some(b) = entry.bool {
            TokenValue::Bool(b)
        } else if entry.address.is_some() {
            TokenValue::Address(addr(&entry.address, "address")?)
        } else {
            bail!("token descriptor for port `{}` carries no value", entry.port);
        };
        script.push(actorforge_core::dataflow::ScriptToken { port: entry.port, token });
    }
    Ok(script)
}

/// Render a sequential trace as JSON Lines.
pub fn sequential_trace_jsonl(trace: &[TraceEvent]) -> String {
    let mut out = String::new();
    for event in trace {
        out.push_str(&serde_json::to_string(event).expect("trace serializes"));
        out.push('\n');
    }
    out
}

/// Render a dataflow trace as JSON Lines, with a distinguished terminator
/// line when the step limit cut the run short.
pub fn dataflow_trace_jsonl(trace: &[FiringRecord], termination: Termination) -> String {
    let mut out = String::new();
    for record in trace {
        out.push_str(&serde_json::to_string(record).expect("record serializes"));
        out.push('\n');
    }
    if termination == Termination::StepLimitExceeded {
        out.push_str("{\"terminated\":\"step_limit_exceeded\"}\n");
    }
    out
}
