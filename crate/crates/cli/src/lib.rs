//! Manifest-driven checks over the prequantization engine.

pub mod checks;
pub mod manifest;
pub mod report;
pub mod workspace;

use report::{Report, CheckResult};
pub use workspace::LoadError;

/// Loads and binds a manifest. `only` keeps a single check by id.
pub fn prepare(text: &str, only: Option<&str>) -> Result<(workspace::Workspace, Vec<checks::BoundCheck>), LoadError> {
    let (ws, specs) = workspace::load(text)?;
    let mut bound = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        bound.push(checks::bind(&ws, s, i)?);
    }
    if let Some(id) = only {
        bound.retain(|b| b.id == id);
        if bound.is_empty() {
            return Err(LoadError::UnknownReference { kind: "check", name: id.to_string(), at: "--only".into() });
        }
    }
    Ok((ws, bound))
}

pub fn run_checks(ws: &workspace::Workspace, checks: &[checks::BoundCheck], seed: Option<u64>, timing: bool) -> Report {
    let seed = seed.unwrap_or(ws.seed);
    let results: Vec<CheckResult> = checks.iter().map(|c| checks::run(c, seed, timing)).collect();
    let asserted = ws
        .preqs
        .iter()
        .filter_map(|(id, p)| p.integrality.as_ref().map(|s| format!("{id}: {s}")))
        .collect();
    Report::new(ws.name.clone(), seed, asserted, results)
}
