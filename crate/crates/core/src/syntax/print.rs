use std::fmt::{self, Display, Formatter, Write};

use super::{
    AnnotatedFormula, Annotation, AnnotationItem, Atom, BasicFormula, Connective, GpClause,
    GpProgram, Term,
};

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(s) | Term::Var(s) => f.write_str(s),
        }
    }
}

impl Display for Atom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_char('(')?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{t}")?;
            }
            f.write_char(')')?;
        }
        Ok(())
    }
}

impl Display for BasicFormula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let sep = match self.connective {
            Connective::Conj => " ^ ",
            Connective::Disj => " | ",
        };
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl Display for AnnotationItem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            AnnotationItem::Const(c) => write!(f, "{c}"),
            AnnotationItem::Var(v) => f.write_str(v),
            AnnotationItem::Apply(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_char(')')
            }
        }
    }
}

impl Display for Annotation {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Display for AnnotatedFormula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.formula.atoms().len() > 1 {
            write!(f, "({}) : {}", self.formula, self.annotation)
        } else {
            write!(f, "{} : {}", self.formula, self.annotation)
        }
    }
}

impl Display for GpClause {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.positives.is_empty() || !self.negatives.is_empty() {
            f.write_str(" <- ")?;
            let body = self
                .positives
                .iter()
                .map(ToString::to_string)
                .chain(self.negatives.iter().map(|n| format!("not({n})")));
            for (i, lit) in body.enumerate() {
                if i > 0 {
                    f.write_str(" & ")?;
                }
                f.write_str(&lit)?;
            }
        }
        f.write_char('.')
    }
}

impl Display for GpProgram {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Renders a program in the concrete syntax; the output parses back to an
/// equal program.
pub fn print_program(p: &GpProgram) -> String {
    p.to_string()
}
