//! A small textual language for interaction-tree models.
//!
//! A model declares channels, constants, state-rich processes, Z-Machines
//! and Hoare-logic assertions. [`parse_model`] reads the text,
//! [`print_model`] writes it back, and [`elaborate`] turns the syntax into
//! executable trees and machines.
//!
//! ```
//! use itree_dsl::load;
//! use itree_core::combinators::{execute, ExecResult};
//!
//! let defs = load("channel a, b\nprocess P = a -> b -> P", &Default::default()).unwrap();
//! let tree = defs.target("P", &[]).unwrap();
//! match execute(&tree, 100) {
//!     ExecResult::Menu { events, .. } => assert_eq!(events[0].label(), "a"),
//!     other => panic!("{other:?}"),
//! }
//! ```

pub mod ast;
pub mod builtin;
pub mod elab;
pub mod error;
pub mod expr;
pub mod lexer;
pub mod parser;
pub mod printer;

use std::collections::BTreeMap;

use itree_core::Value;

pub use elab::{elaborate, parse_binding, Assertion, ChanInfo, Definitions, ProcInfo, TargetKind};
pub use error::{ElabError, ModelError, ParseError};
pub use parser::{parse_expr, parse_model, parse_proc};
pub use printer::{print_expr, print_model, print_proc};

/// Parses and elaborates in one step.
pub fn load(src: &str, bindings: &BTreeMap<String, Value>) -> Result<Definitions, ModelError> {
    let model = parse_model(src)?;
    Ok(elaborate(&model, bindings)?)
}
