//! Bundled fixture sources, embedded so `attack-demo` and the test suites
//! run from any working directory. The same files ship under `fixtures/`
//! at the repository root for command-line use.

pub const DAO_ACTOR: &str = include_str!("../../../fixtures/dao.actor");
pub const ATTACKER_ACTOR: &str = include_str!("../../../fixtures/attacker.actor");
pub const COPY_ACTOR: &str = include_str!("../../../fixtures/copy.actor");
pub const ALT_ACTOR: &str = include_str!("../../../fixtures/alt.actor");
pub const EMPTY_ACTOR: &str = include_str!("../../../fixtures/empty.actor");
pub const AMBIGUOUS_EMIT_ACTOR: &str = include_str!("../../../fixtures/ambiguous_emit.actor");
pub const DAO_ATTACKER_NETWORK: &str = include_str!("../../../fixtures/dao_attacker.network");
pub const DAO_ATTACK_SCENARIO: &str = include_str!("../../../fixtures/dao_attack.scenario");
pub const EMPTY_SCENARIO: &str = include_str!("../../../fixtures/empty.scenario");
pub const DAO_VULNERABLE: &str =
    include_str!("../../../fixtures/contracts/dao_vulnerable.sol.txt");
pub const DAO_FIXED: &str = include_str!("../../../fixtures/contracts/dao_fixed.sol.txt");
pub const ATTACKER_CONTRACT: &str = include_str!("../../../fixtures/contracts/attacker.sol.txt");
pub const DAO_GENERATED_GOLDEN: &str =
    include_str!("../../../fixtures/golden/dao_generated.sol.txt");

/// Resolve a fixture-relative path to its embedded contents; used when the
/// demo replays the bundled scenario without touching the filesystem.
pub fn embedded(path: &str) -> Option<&'static str> {
    match path {
        "dao.actor" => Some(DAO_ACTOR),
        "attacker.actor" => Some(ATTACKER_ACTOR),
        "copy.actor" => Some(COPY_ACTOR),
        "alt.actor" => Some(ALT_ACTOR),
        "empty.actor" => Some(EMPTY_ACTOR),
        "ambiguous_emit.actor" => Some(AMBIGUOUS_EMIT_ACTOR),
        "dao_attacker.network" => Some(DAO_ATTACKER_NETWORK),
        "dao_attack.scenario" => Some(DAO_ATTACK_SCENARIO),
        "empty.scenario" => Some(EMPTY_SCENARIO),
        "contracts/dao_vulnerable.sol.txt" => Some(DAO_VULNERABLE),
        "contracts/dao_fixed.sol.txt" => Some(DAO_FIXED),
        "contracts/attacker.sol.txt" => Some(ATTACKER_CONTRACT),
        "golden/dao_generated.sol.txt" => Some(DAO_GENERATED_GOLDEN),
        _ => None,
    }
}
