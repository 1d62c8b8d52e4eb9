//! Animation sessions over elaborated models, and the JSON views shared by
//! the stdio and HTTP protocols.

use std::collections::BTreeMap;

use itree_core::animate::{Prompt, Session, DEFAULT_TAU_BUDGET};
use itree_core::error::SessionError;
use itree_core::zmachine::ZMachine;
use itree_core::{Comm, Store, Value};
use itree_dsl::{load, ModelError, TargetKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::source::{arguments, binding, model_text};

#[derive(Serialize)]
pub struct ErrorBody<'a> {
    pub status: &'static str,
    pub message: &'a str,
    pub code: &'a str,
}

/// A failed request, rendered as `{"status":"error","message":…,"code":…}`.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{message}")]
pub struct ApiError {
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
        }
    }

    /// The response body, with `status` first.
    pub fn body(&self) -> ErrorBody<'_> {
        ErrorBody {
            status: "error",
            message: &self.message,
            code: self.code,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(&self.body()).expect("errors serialise")
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Parse(p) => ApiError::new("parse_error", format!("syntax error at {p}")),
            ModelError::Elab(e) => ApiError::new("elab_error", e.to_string()),
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let code = match e {
            SessionError::UnknownChoice(_) => "rejected",
            SessionError::Finished => "finished",
            SessionError::NotRunning => "not_running",
        };
        ApiError::new(code, e.to_string())
    }
}

/// What to animate: a built-in model (or a file, where files are allowed)
/// or inline source, a target, its arguments and constant bindings.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StartRequest {
    pub model: Option<String>,
    pub source: Option<String>,
    pub target: String,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default)]
    pub consts: BTreeMap<String, String>,
    pub tau_budget: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MenuEntry {
    pub id: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum PromptView {
    Menu {
        events: Vec<MenuEntry>,
        trace: Vec<String>,
        /// The current store, for targets whose state is observable
        /// between events (Z-Machines).
        state: Option<Store>,
    },
    Terminated {
        value: Store,
        trace: Vec<String>,
    },
    Deadlock {
        trace: Vec<String>,
    },
    #[serde(rename = "taulimit")]
    TauLimit {
        taus: usize,
        trace: Vec<String>,
    },
}

pub struct Animation {
    session: Session<Comm, Store>,
    target: String,
    /// For machines, the state is replayed from the operations taken.
    machine: Option<(ZMachine, Store)>,
}

impl Animation {
    pub fn start(req: &StartRequest, allow_files: bool) -> Result<Animation, ApiError> {
        let text = match (&req.source, &req.model) {
            (Some(src), _) => src.clone(),
            (None, Some(m)) => model_text(m, allow_files)?,
            (None, None) => return Err(ApiError::new("bad_request", "give either `model` or `source`")),
        };
        let bindings = req
            .consts
            .iter()
            .map(|(k, v)| Ok((k.clone(), binding(k, v)?)))
            .collect::<Result<BTreeMap<String, Value>, ApiError>>()?;
        let args = arguments(req.args.iter().map(String::as_str))?;
        let defs = load(&text, &bindings)?;
        let tree = defs.target(&req.target, &args).map_err(|e| ApiError::from(ModelError::Elab(e)))?;
        let machine = defs
            .targets()
            .iter()
            .any(|(n, k)| *n == req.target && *k == TargetKind::Zmachine)
            .then(|| {
                let m = defs.machine(&req.target).unwrap().clone();
                let s = m.initial_state();
                (m, s)
            });
        Ok(Animation {
            session: Session::new(tree, req.tau_budget.unwrap_or(DEFAULT_TAU_BUDGET)),
            target: req.target.clone(),
            machine,
        })
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn trace(&self) -> Vec<String> {
        self.session.trace().iter().map(Comm::label).collect()
    }

    fn render(&self, p: Prompt<Comm, Store>) -> PromptView {
        let trace = self.trace();
        match p {
            Prompt::Menu { events } => PromptView::Menu {
                events: events
                    .iter()
                    .enumerate()
                    .map(|(id, e)| MenuEntry { id, label: e.label() })
                    .collect(),
                trace,
                state: self.machine.as_ref().map(|(_, s)| s.clone()),
            },
            Prompt::Terminated { value } => PromptView::Terminated { value, trace },
            Prompt::Deadlock => PromptView::Deadlock { trace },
            Prompt::TauLimit { taus } => PromptView::TauLimit { taus, trace },
        }
    }

    pub fn prompt(&mut self) -> PromptView {
        let p = self.session.prompt();
        self.render(p)
    }

    fn replay(&mut self, event: &Comm) {
        if let Some((m, s)) = &mut self.machine {
            if let Some(op) = m.operations.iter().find(|op| op.channel == event.channel) {
                let params = match (op.params.len(), &event.value) {
                    (0, _) => Vec::new(),
                    (1, v) => vec![v.clone()],
                    (_, Value::Tuple(vs)) => vs.clone(),
                    (_, v) => vec![v.clone()],
                };
                *s = (op.update)(s, &params);
            }
        }
    }

    /// Takes menu entry `id`. A choice that is not on the menu is rejected
    /// and leaves the session as it was.
    pub fn choose(&mut self, id: usize) -> Result<PromptView, ApiError> {
        let event = match self.session.prompt() {
            Prompt::Menu { events } => events.get(id).cloned(),
            _ => None,
        };
        let p = self.session.choose(id)?;
        if let Some(e) = event {
            self.replay(&e);
        }
        Ok(self.render(p))
    }

    /// Takes the menu entry with the given label.
    pub fn choose_label(&mut self, label: &str) -> Result<PromptView, ApiError> {
        match self.session.prompt() {
            Prompt::Menu { events } => match events.iter().position(|e| e.label() == label) {
                Some(id) => self.choose(id),
                None => Err(ApiError::new("rejected", format!("`{label}` is not enabled"))),
            },
            Prompt::TauLimit { .. } => Err(ApiError::new("rejected", "the process is still taking silent steps")),
            _ => Err(SessionError::Finished.into()),
        }
    }

    pub fn resume(&mut self) -> Result<PromptView, ApiError> {
        let p = self.session.resume()?;
        Ok(self.render(p))
    }
}
