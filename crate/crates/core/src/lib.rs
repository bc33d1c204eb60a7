//! Probabilistic deductive databases with non-monotonic negation.
//!
//! Programs are sets of annotated clauses such as
//!
//! ```text
//! bark(X) : [0.95, 1] <- dog(X) : [1, 1] & not(abn(X) : [1, 1]).
//! ```
//!
//! where each annotation bounds the probability of a conjunction or
//! disjunction of atoms. Semantics are computed over possible worlds with
//! exact rational linear programming:
//!
//! - [`Engine::lfp`] for negation-free programs,
//! - [`Engine::enumerate_stable_functions`] for stable formula functions,
//! - [`Engine::minimal_stable_classes`] / [`Engine::alternating_class`] for
//!   stable classes, with [`hoare_minimal`] and [`smyth_minimal`] selection.

pub mod error;
pub mod fixpoint;
pub mod ground;
pub mod interval;
pub mod lp;
pub mod stable;
pub mod syntax;
pub mod worlds;

/// Exact rationals used for every probability and annotation value.
pub type Rational = num_rational::BigRational;

pub use error::{Error, Result};
pub use fixpoint::{sp_step, Engine, Fixpoint, FormulaFunction, StatsSnapshot};
pub use ground::{ground_program, herbrand_base, tracked_formulas, Base, GroundProgram};
pub use interval::{eval_annotation, Binding, Interval};
pub use stable::{
    blocking_of, ff_transform, hoare_leq, hoare_minimal, negation_keys, smyth_leq, smyth_minimal,
    BlockingVector, NegationKey, StableClass,
};
pub use syntax::{
    canonicalize, parse_formula, parse_program, print_program, Atom, BasicFormula, Connective,
    GpClause, GpProgram,
};

/// Size budgets for the exponential parts of evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest Herbrand base; the linear programs have `2^max_atoms` columns.
    pub max_atoms: usize,
    /// Most distinct negated literals; enumeration visits `2^max_neg` transforms.
    pub max_neg: usize,
    /// Cap on fixpoint iterations.
    pub max_iters: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_atoms: 12,
            max_neg: 12,
            max_iters: 1000,
        }
    }
}
