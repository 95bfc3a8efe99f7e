//! Finite algebras for languages of countable words, and a decision procedure for
//! monadic second-order logic over countable linear orderings built on them.

pub mod algebra;
pub mod axioms;
pub mod builtins;
pub mod document;
pub mod error;
pub mod expr;
pub mod minimize;
pub mod mso;
pub mod powerset;
pub mod recognizer;
pub mod rewrite;
pub mod saturate;
pub mod splits;

pub use algebra::{idempotent_power, product_algebra, Algebra, Elem, KappaSpec, Provenance};
pub use error::{Error, LimitKind, Result};
pub use expr::{eval_expr, parse_expr, print_expr, WordExpr};
pub use recognizer::{Letter, Recognizer};
pub use saturate::{is_empty, saturate, trim_reachable, Emptiness, Limits, SaturationResult};
