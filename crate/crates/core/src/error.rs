use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Where in the source text something went wrong (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableKind {
    Object,
    Annotation,
}

impl std::fmt::Display for VariableKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VariableKind::Object => f.write_str("object"),
            VariableKind::Annotation => f.write_str("annotation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Position, message: String },

    #[error("{pos}: {kind} variable `{var}` occurs in the head but not in the body")]
    UnboundHeadVariable {
        pos: Position,
        var: String,
        kind: VariableKind,
    },

    #[error("{pos}: predicate `{predicate}` used with arity {found}, previously {expected}")]
    ArityMismatch {
        pos: Position,
        predicate: String,
        expected: usize,
        found: usize,
    },

    #[error("{pos}: annotation constant {value} is outside [0, 1]")]
    ConstantOutOfRange { pos: Position, value: String },

    #[error("{pos}: annotation variable `{var}` inside a negated literal")]
    VariableUnderNegation { pos: Position, var: String },

    #[error("{pos}: annotation variable `{var}` in a body literal must stand alone as an interval endpoint")]
    NonBareBodyVariable { pos: Position, var: String },

    #[error("unbound annotation variable `{0}`")]
    UnboundVariable(String),

    #[error("Herbrand base has {size} atoms, exceeding the limit of {limit}")]
    AtomBudget { size: u128, limit: usize },

    #[error("program has {count} distinct negated literals, exceeding the limit of {limit}")]
    NegationBudget { count: usize, limit: usize },

    #[error("least fixpoint requested for a program containing negation; use stable or class semantics")]
    NegationPresent,

    #[error("fixpoint iteration did not converge within {0} steps")]
    Divergence(usize),

    #[error("fixpoint iteration is not ascending at step {0}; an annotation function in the program is not monotone")]
    NonMonotone(usize),

    #[error("formula functions are defined over different formula sets")]
    DomainMismatch,

    #[error("atom `{0}` is not in the Herbrand base")]
    AtomOutsideBase(String),

    #[error("formula `{0}` is not ground")]
    NonGroundFormula(String),
}
