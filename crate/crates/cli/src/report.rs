//! JSON reports for the batch commands.

use std::collections::BTreeSet;

use itree_core::combinators::{execute, ExecResult, ExplorationBudget};
use itree_core::semantics::{failures_divergences, transitions, FdReport};
use itree_core::zmachine::CheckMode;
use itree_core::{Comm, Store, Value};
use itree_dsl::{Definitions, ModelError};
use serde::Serialize;

use crate::animation::ApiError;

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ExecView {
    Terminated { state: Store, taus: usize },
    Menu { events: Vec<String>, taus: usize },
    Deadlock { taus: usize },
    Timeout { taus: usize },
}

fn target_error(e: itree_dsl::ElabError) -> ApiError {
    ModelError::Elab(e).into()
}

/// Runs a target until it terminates, offers a choice or spends `fuel`
/// silent steps.
pub fn run(defs: &Definitions, target: &str, args: &[Value], fuel: usize) -> Result<ExecView, ApiError> {
    let tree = defs.target(target, args).map_err(target_error)?;
    Ok(match execute(&tree, fuel) {
        ExecResult::Terminated { value, taus } => ExecView::Terminated { state: value, taus },
        ExecResult::Menu { events, taus } => ExecView::Menu {
            events: events.iter().map(Comm::label).collect(),
            taus,
        },
        ExecResult::Deadlock { taus } => ExecView::Deadlock { taus },
        ExecResult::Timeout { taus, .. } => ExecView::Timeout { taus },
    })
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckEntry {
    /// Machine or assertion name.
    pub subject: String,
    pub name: String,
    pub holds: bool,
    pub message: Option<String>,
    pub verdict: serde_json::Value,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub mode: CheckMode,
    pub results: Vec<CheckEntry>,
    pub all_hold: bool,
}

/// Checks every machine's proof obligations and every `assert` item.
pub fn check(defs: &Definitions, mode: CheckMode, budget: &ExplorationBudget) -> Result<CheckReport, ApiError> {
    let mut results = Vec::new();
    for m in defs.machines() {
        let obligations = m.check(mode, budget).map_err(|e| ApiError::new("check_error", format!("{}: {e}", m.name)))?;
        for r in obligations {
            let mut message = r.verdict.counterexample().map(|c| c.message());
            if !r.space_complete {
                message = Some("state space was cut short by the node budget".into());
            }
            results.push(CheckEntry {
                subject: m.name.clone(),
                name: r.obligation.name.clone(),
                holds: r.verdict.holds() && r.space_complete,
                message,
                verdict: serde_json::to_value(&r.verdict).expect("verdicts serialise"),
            });
        }
    }
    for a in defs.assertions() {
        let verdict = defs
            .check_assertion(a, budget)
            .map_err(|e| ApiError::new("check_error", format!("{}: {e}", a.name)))?;
        results.push(CheckEntry {
            subject: a.target.clone(),
            name: a.name.clone(),
            holds: verdict.holds(),
            message: verdict.counterexample().map(|c| c.message()),
            verdict: serde_json::to_value(&verdict).expect("verdicts serialise"),
        });
    }
    let all_hold = results.iter().all(|r| r.holds);
    Ok(CheckReport { mode, results, all_hold })
}

/// The alphabet used for refusals: every event of the declared channels
/// with finite types, plus whatever else the bounded exploration saw.
pub fn alphabet(defs: &Definitions, tree: &itree_core::ITree<Comm, Store>, budget: &ExplorationBudget) -> BTreeSet<Comm> {
    let mut out = BTreeSet::new();
    for c in defs.channels() {
        if let Some(events) = defs.channel(c.name()).and_then(|info| info.events()) {
            out.extend(events);
        }
    }
    for (trace, residual) in transitions(tree, budget).items {
        out.extend(trace);
        out.extend(residual.menu().unwrap_or_default());
    }
    out
}

pub fn fd(defs: &Definitions, target: &str, args: &[Value], budget: &ExplorationBudget) -> Result<FdReport<Comm, Store>, ApiError> {
    let tree = defs.target(target, args).map_err(target_error)?;
    let sigma = alphabet(defs, &tree, budget);
    failures_divergences(&tree, &sigma, budget).map_err(|e| ApiError::new("fd_error", e.to_string()))
}
