//! Interaction trees and the process algebra built on them.
//!
//! Processes are [`ITree`]s: lazily unfolded trees of silent steps, visible
//! event menus and return values. On top of the tree type sit sequencing and
//! iteration ([`combinators`]), CSP operators ([`csp`]), state and the Circus
//! operators ([`circus`]), bounded semantic reports ([`semantics`]),
//! explicit-state Hoare logic ([`verify`]), Z-Machines ([`zmachine`]) and an
//! interactive animator ([`animate`]).
//!
//! ```
//! use itree_core::csp::{event, extchoice, prefix, skip};
//! use itree_core::combinators::{execute, ExecResult};
//!
//! let p = extchoice(prefix('a', skip()), event('b'));
//! match execute(&p, 100) {
//!     ExecResult::Menu { events, .. } => assert_eq!(events, vec!['a', 'b']),
//!     other => panic!("{other:?}"),
//! }
//! ```

pub mod animate;
pub mod bisim;
pub mod circus;
pub mod combinators;
pub mod csp;
pub mod emap;
pub mod error;
pub mod itree;
pub mod par;
pub mod prism;
pub mod program;
pub mod semantics;
pub mod value;
pub mod verify;
pub mod zmachine;

pub use bisim::{bounded_bisim, BisimVerdict};
pub use combinators::{ExecResult, ExplorationBudget, Expr, HTree, KTree};
pub use emap::{EventMap, EventSet};
pub use itree::{Data, Event, ITree, Lazy};
pub use par::Strategy;
pub use prism::Prism;
pub use value::{Channel, Comm, Schema, Store, Value};
