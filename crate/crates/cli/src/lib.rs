//! Front ends for `.itm` models: the interactive animator, the JSON session
//! protocol over stdio and HTTP, and the execute, check and fd reports.

pub mod animation;
pub mod http;
pub mod repl;
pub mod report;
pub mod source;
pub mod stdio;

pub use animation::{Animation, ApiError, MenuEntry, PromptView, StartRequest};
