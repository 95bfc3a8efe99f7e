//! Monadic second-order formulas over countable words and their compilation to recognizers.

mod compile;
mod desugar;
mod formula;
mod parse;

pub use compile::{compile, decide_equiv, decide_sat, decide_valid, distinguishing_word, model_check, CompiledRecognizer, SatResult};
pub use desugar::{desugar, singleton_var};
pub use formula::Formula;
pub use parse::{parse_formula, parse_formula_with_free};
