//! Function-free, quantifier-free two-variable logic: syntax, parsing, worlds and statistics.

mod model;
mod parser;
mod stats;
mod syntax;
mod world;

pub use model::{ModelSpec, Sentence, WeightedFormula};
pub use parser::{parse_database, parse_formula, parse_model, ParseError};
pub use stats::{evaluate, formula_statistic, grounding_count, injective_count, stat_vector, StatVector};
pub use syntax::{Expr, Formula, FormulaDisplay, Interpretation, PredId, Predicate, VarId, Vocabulary};
pub use world::{AtomLayout, GroundAtom, World};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("predicate `{predicate}` has arity {arity}; only unary and binary predicates are supported")]
    UnsupportedArity { predicate: String, arity: usize },
    #[error("predicate `{predicate}` has arity {expected} but is used with {found} arguments")]
    ArityMismatch { predicate: String, expected: usize, found: usize },
    #[error("formula uses {0} variables; at most 2 are allowed")]
    TooManyVariables(usize),
    #[error("variable `{0}` is not bound by the substitution")]
    UnboundVariable(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("constant `{0}` is listed twice in the domain")]
    DuplicateConstant(String),
    #[error("statistic of a {k}-variable formula is undefined on a domain of size {n}")]
    DomainTooSmall { n: usize, k: usize },
    #[error("formula has no free variables")]
    NoVariables,
}
