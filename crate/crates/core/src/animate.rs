//! Step-by-step animation of a process, with the user resolving each
//! choice.

use serde::Serialize;

use crate::error::SessionError;
use crate::itree::{settle, Data, Event, ITree};

/// Silent steps taken before the user is asked whether to keep going.
pub const DEFAULT_TAU_BUDGET: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Prompt<E, R> {
    Menu { events: Vec<E> },
    Terminated { value: R },
    Deadlock,
    /// The budget ran out on silent steps; the session can be continued.
    #[serde(rename = "taulimit")]
    TauLimit { taus: usize },
}

pub struct Session<E, R> {
    current: ITree<E, R>,
    trace: Vec<E>,
    tau_budget: usize,
    taus_since_prompt: usize,
    last: Option<Prompt<E, R>>,
}

impl<E: Event, R: Data> Session<E, R> {
    pub fn new(process: ITree<E, R>, tau_budget: usize) -> Self {
        Session {
            current: process,
            trace: Vec::new(),
            tau_budget,
            taus_since_prompt: 0,
            last: None,
        }
    }

    pub fn trace(&self) -> &[E] {
        &self.trace
    }

    pub fn tau_budget(&self) -> usize {
        self.tau_budget
    }

    pub fn taus_since_prompt(&self) -> usize {
        self.taus_since_prompt
    }

    /// The most recent prompt, computing it on first use.
    pub fn prompt(&mut self) -> Prompt<E, R> {
        match &self.last {
            Some(p) => p.clone(),
            None => self.advance(),
        }
    }

    fn advance(&mut self) -> Prompt<E, R> {
        let settled = settle(&self.current, self.tau_budget);
        self.taus_since_prompt = settled.taus;
        let stable = settled.is_stable();
        self.current = settled.tree;
        let prompt = if !stable {
            Prompt::TauLimit { taus: settled.taus }
        } else {
            match &self.current {
                ITree::Ret(v) => Prompt::Terminated { value: v.clone() },
                ITree::Vis(m) if m.is_empty() => Prompt::Deadlock,
                ITree::Vis(m) => Prompt::Menu {
                    events: m.keys().cloned().collect(),
                },
                ITree::Sil(_) => unreachable!("settled"),
            }
        };
        self.last = Some(prompt.clone());
        prompt
    }

    /// Takes the menu entry at `index` (zero-based). Invalid choices leave
    /// the session unchanged.
    pub fn choose(&mut self, index: usize) -> Result<Prompt<E, R>, SessionError> {
        let event = match self.prompt() {
            Prompt::Menu { events } => events.get(index).cloned().ok_or(SessionError::UnknownChoice(index))?,
            Prompt::TauLimit { .. } => return Err(SessionError::UnknownChoice(index)),
            _ => return Err(SessionError::Finished),
        };
        self.choose_event(&event)
    }

    pub fn choose_event(&mut self, event: &E) -> Result<Prompt<E, R>, SessionError> {
        self.prompt();
        let next = self.current.after(event).ok_or(SessionError::UnknownChoice(usize::MAX))?;
        self.current = next;
        self.trace.push(event.clone());
        Ok(self.advance())
    }

    /// Grants another budget of silent steps after a `TauLimit` prompt.
    pub fn resume(&mut self) -> Result<Prompt<E, R>, SessionError> {
        match self.prompt() {
            Prompt::TauLimit { .. } => Ok(self.advance()),
            _ => Err(SessionError::NotRunning),
        }
    }
}
