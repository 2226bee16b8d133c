//! Unification of schematic first-order problems: equations over indexed
//! variables whose instances are generated by a recursive schema.
//!
//! [`solver::u_sch_unif`] decides whether every instance of a uniform
//! problem is unifiable; [`oracle::bounded_check`] checks a finite prefix
//! of instances directly.

pub mod engine;
pub mod io;
pub mod oracle;
pub mod schema;
pub mod solver;
pub mod subst;
pub mod term;

pub use engine::{th_unif, FinalConfiguration, Verdict};
pub use io::{parse_problem, parse_term, ParseError, ProblemFile};
pub use oracle::{bounded_check, OracleReport};
pub use schema::{make_primitive, Schema, SchemaClass, SchemaError};
pub use solver::{u_sch_unif, Cause, Outcome, SchematicProblem, SolveOptions, SolveReport};
pub use subst::{unify, FailureKind, Substitution, UnifyError};
pub use term::{Equation, Symbol, Term, Var};
