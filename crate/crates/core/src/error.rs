use thiserror::Error;

/// Rejected attempts to build a tree, state update or machine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("event {0} appears twice in one choice")]
    DuplicateEvent(String),
    #[error("lenses {0} and {1} are not independent")]
    DependentLenses(String, String),
    #[error("variable {0} is assigned twice in one substitution")]
    OverlappingAssignment(String),
    #[error("nondeterministic choice needs an `nd` channel, none is declared")]
    MissingNdChannel,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("event {0} is outside the declared alphabet")]
    OutsideAlphabet(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("final state {0} lies outside the state space")]
    OutsideDomain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("constant {0} has no value; bind it before checking")]
    UnboundConstant(String),
    #[error("state variable {0} has no finite domain for exhaustive checking")]
    UnboundedVariable(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("no event with id {0} on the current menu")]
    UnknownChoice(usize),
    #[error("the session has finished")]
    Finished,
    #[error("the process is not waiting on silent steps")]
    NotRunning,
}
