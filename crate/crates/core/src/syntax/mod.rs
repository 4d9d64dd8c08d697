//! First-order syntax: formulas, the concrete grammar, prenex conversion and
//! rank-bounded sentence pools.

mod formula;
mod parser;
pub mod pool;
mod prenex;

pub use formula::{Formula, Quantifier, Term};
pub use parser::{parse_formula, parse_formula_with_free, ParseError, ParseErrorKind};
pub use prenex::to_prenex;

/// Parses `text` with free variables `free` (convenience over string slices).
pub fn parse_open_formula(text: &str, sig: &crate::structure::Signature, free: &[&str]) -> Result<Formula, ParseError> {
    let free: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    parse_formula_with_free(text, sig, &free)
}
