//! Abstract syntax of gp-programs: annotated basic formulas, clauses with
//! positive and non-monotonically negated body literals.

mod parser;
mod print;

use std::collections::{BTreeMap, BTreeSet};

use crate::Rational;

pub use parser::{parse_annotation, parse_formula, parse_program};
pub use print::print_program;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(String),
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    /// A ground atom over constants only.
    pub fn ground<S: AsRef<str>>(predicate: &str, constants: &[S]) -> Self {
        Atom::new(
            predicate,
            constants
                .iter()
                .map(|c| Term::Const(c.as_ref().to_string()))
                .collect(),
        )
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }

    pub(crate) fn substitute(&self, subst: &BTreeMap<&str, &str>) -> Atom {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => match subst.get(v.as_str()) {
                    Some(c) => Term::Const(c.to_string()),
                    None => t.clone(),
                },
                Term::Const(_) => t.clone(),
            })
            .collect();
        Atom::new(self.predicate.clone(), args)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    Conj,
    Disj,
}

/// A pure conjunction or pure disjunction of distinct atoms, kept in
/// canonical form: atoms sorted and deduplicated, and a single atom always
/// carries [`Connective::Conj`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasicFormula {
    atoms: Vec<Atom>,
    connective: Connective,
}

impl BasicFormula {
    /// Panics on an empty atom list.
    pub fn new(connective: Connective, mut atoms: Vec<Atom>) -> Self {
        assert!(!atoms.is_empty(), "a basic formula needs at least one atom");
        atoms.sort();
        atoms.dedup();
        let connective = if atoms.len() == 1 {
            Connective::Conj
        } else {
            connective
        };
        BasicFormula { atoms, connective }
    }

    pub fn atom(atom: Atom) -> Self {
        BasicFormula::new(Connective::Conj, vec![atom])
    }

    pub fn conj(atoms: Vec<Atom>) -> Self {
        BasicFormula::new(Connective::Conj, atoms)
    }

    pub fn disj(atoms: Vec<Atom>) -> Self {
        BasicFormula::new(Connective::Disj, atoms)
    }

    pub fn connective(&self) -> Connective {
        self.connective
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_ground(&self) -> bool {
        self.atoms.iter().all(Atom::is_ground)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().flat_map(Atom::variables)
    }

    pub(crate) fn substitute(&self, subst: &BTreeMap<&str, &str>) -> BasicFormula {
        BasicFormula::new(
            self.connective,
            self.atoms.iter().map(|a| a.substitute(subst)).collect(),
        )
    }
}

/// Re-establishes canonical form. [`BasicFormula`] values are always
/// canonical already, so this is the identity on them.
pub fn canonicalize(f: &BasicFormula) -> BasicFormula {
    BasicFormula::new(f.connective, f.atoms.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnnotationFn {
    Mul,
    Div,
    Add,
    Sub,
    Min,
    Max,
}

impl AnnotationFn {
    pub fn name(self) -> &'static str {
        match self {
            AnnotationFn::Mul => "mul",
            AnnotationFn::Div => "div",
            AnnotationFn::Add => "add",
            AnnotationFn::Sub => "sub",
            AnnotationFn::Min => "min",
            AnnotationFn::Max => "max",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "mul" => AnnotationFn::Mul,
            "div" => AnnotationFn::Div,
            "add" => AnnotationFn::Add,
            "sub" => AnnotationFn::Sub,
            "min" => AnnotationFn::Min,
            "max" => AnnotationFn::Max,
            _ => return None,
        })
    }

    /// `sub` and `div` are binary; the rest accept one or more arguments.
    pub fn accepts_arity(self, n: usize) -> bool {
        match self {
            AnnotationFn::Sub | AnnotationFn::Div => n == 2,
            _ => n >= 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnnotationItem {
    Const(Rational),
    Var(String),
    Apply(AnnotationFn, Vec<AnnotationItem>),
}

impl AnnotationItem {
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            AnnotationItem::Const(_) => {}
            AnnotationItem::Var(v) => {
                out.insert(v);
            }
            AnnotationItem::Apply(_, args) => args.iter().for_each(|a| a.collect_variables(out)),
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            AnnotationItem::Var(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Annotation {
    pub lo: AnnotationItem,
    pub hi: AnnotationItem,
}

impl Annotation {
    pub fn new(lo: AnnotationItem, hi: AnnotationItem) -> Self {
        Annotation { lo, hi }
    }

    pub fn constant(lo: Rational, hi: Rational) -> Self {
        Annotation::new(AnnotationItem::Const(lo), AnnotationItem::Const(hi))
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        let mut vars = self.lo.variables();
        vars.extend(self.hi.variables());
        vars
    }

    /// True when no annotation variables occur.
    pub fn is_c_annotation(&self) -> bool {
        self.variables().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnnotatedFormula {
    pub formula: BasicFormula,
    pub annotation: Annotation,
}

impl AnnotatedFormula {
    pub fn new(formula: BasicFormula, annotation: Annotation) -> Self {
        AnnotatedFormula {
            formula,
            annotation,
        }
    }
}

/// `head <- positives & not(negatives)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GpClause {
    pub head: AnnotatedFormula,
    pub positives: Vec<AnnotatedFormula>,
    pub negatives: Vec<AnnotatedFormula>,
}

impl GpClause {
    pub fn is_pf(&self) -> bool {
        self.negatives.is_empty()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &BasicFormula> {
        std::iter::once(&self.head)
            .chain(&self.positives)
            .chain(&self.negatives)
            .map(|l| &l.formula)
    }

    /// Object variables in order of first occurrence.
    pub fn object_variables(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for v in self.formulas().flat_map(BasicFormula::variables) {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    }

    pub(crate) fn substitute(&self, subst: &BTreeMap<&str, &str>) -> GpClause {
        let lit = |l: &AnnotatedFormula| {
            AnnotatedFormula::new(l.formula.substitute(subst), l.annotation.clone())
        };
        GpClause {
            head: lit(&self.head),
            positives: self.positives.iter().map(lit).collect(),
            negatives: self.negatives.iter().map(lit).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GpProgram {
    pub clauses: Vec<GpClause>,
}

impl GpProgram {
    pub fn new(clauses: Vec<GpClause>) -> Self {
        GpProgram { clauses }
    }

    /// True iff no clause carries a negated literal.
    pub fn is_pf(&self) -> bool {
        self.clauses.iter().all(GpClause::is_pf)
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.clauses
            .iter()
            .flat_map(GpClause::formulas)
            .flat_map(BasicFormula::atoms)
    }
}
