//! Recursive-descent parser for the clause language.
//!
//! ```text
//! program    := { clause }
//! clause     := annformula [ "<-" [ body ] ] "."
//! body       := literal { "&" literal }
//! literal    := annformula | "not" "(" annformula ")"
//! annformula := basic ":" annotation
//! basic      := "(" basic ")" | atom { "^" atom } | atom { "|" atom }
//! atom       := ident [ "(" term { "," term } ")" ]
//! annotation := "[" item "," item "]"
//! item       := factor { ("*" | "/") factor }
//! factor     := rational | Var | fname "(" item { "," item } ")" | "(" item ")"
//! rational   := decimal | integer "/" integer
//! ```
//!
//! `%` starts a comment that runs to the end of the line.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{
    AnnotatedFormula, Annotation, AnnotationFn, AnnotationItem, Atom, BasicFormula, Connective,
    GpClause, GpProgram, Term,
};
use crate::error::{Error, Position, Result, VariableKind};
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number { value: Rational, integer: bool, text: String },
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    Arrow,
    Amp,
    Caret,
    Pipe,
    Star,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number { text, .. } => format!("`{text}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, Position)>> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c == '%' {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                } else if c.is_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let pos = self.pos();
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, pos));
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '.' => Tok::Dot,
                '&' => Tok::Amp,
                '^' => Tok::Caret,
                '|' => Tok::Pipe,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '<' => {
                    if self.chars.peek() == Some(&'-') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        return Err(syntax(pos, "expected `<-`"));
                    }
                }
                c if c.is_ascii_digit() => self.number(c),
                c if c.is_alphabetic() || c == '_' => {
                    let mut s = String::from(c);
                    while let Some(&c) = self.chars.peek() {
                        if c.is_alphanumeric() || c == '_' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Ident(s)
                }
                other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
            };
            out.push((tok, pos));
        }
    }

    fn number(&mut self, first: char) -> Tok {
        let mut int_part = String::from(first);
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_digit() {
                int_part.push(c);
                self.bump();
            } else {
                break;
            }
        }
        // A '.' only belongs to the number when a digit follows; otherwise it ends the clause.
        let mut lookahead = self.chars.clone();
        if lookahead.next() == Some('.') && lookahead.peek().is_some_and(char::is_ascii_digit) {
            self.bump();
            let mut frac = String::new();
            while let Some(&c) = self.chars.peek() {
                if c.is_ascii_digit() {
                    frac.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            let numer: BigInt = format!("{int_part}{frac}").parse().expect("digits");
            let denom = BigInt::from(10u32).pow(frac.len() as u32);
            Tok::Number {
                value: Rational::new(numer, denom),
                integer: false,
                text: format!("{int_part}.{frac}"),
            }
        } else {
            let value: BigInt = int_part.parse().expect("digits");
            Tok::Number {
                value: Rational::from_integer(value),
                integer: true,
                text: int_part,
            }
        }
    }
}

fn syntax(pos: Position, message: impl Into<String>) -> Error {
    Error::Syntax {
        pos,
        message: message.into(),
    }
}

struct Parser {
    toks: Vec<(Tok, Position)>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: Lexer::new(text).tokenize()?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_nth(&self, n: usize) -> &Tok {
        let i = (self.at + n).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn pos(&self) -> Position {
        self.toks[self.at].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn unexpected(&self, wanted: &str) -> Error {
        syntax(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn clause(&mut self) -> Result<GpClause> {
        let head = self.annformula()?;
        let mut positives = Vec::new();
        let mut negatives = Vec::new();
        if self.eat(&Tok::Arrow) && !matches!(self.peek(), Tok::Dot) {
            loop {
                if matches!(self.peek(), Tok::Ident(s) if s == "not")
                    && matches!(self.peek_nth(1), Tok::LParen)
                {
                    self.next();
                    self.next();
                    negatives.push(self.annformula()?);
                    self.expect(&Tok::RParen)?;
                } else {
                    positives.push(self.annformula()?);
                }
                if !self.eat(&Tok::Amp) {
                    break;
                }
            }
        }
        self.expect(&Tok::Dot)?;
        Ok(GpClause {
            head,
            positives,
            negatives,
        })
    }

    fn annformula(&mut self) -> Result<AnnotatedFormula> {
        let formula = self.basic()?;
        self.expect(&Tok::Colon)?;
        let annotation = self.annotation()?;
        Ok(AnnotatedFormula::new(formula, annotation))
    }

    fn basic(&mut self) -> Result<BasicFormula> {
        if self.eat(&Tok::LParen) {
            let f = self.basic()?;
            self.expect(&Tok::RParen)?;
            return Ok(f);
        }
        let mut atoms = vec![self.atom()?];
        let mut connective = None;
        loop {
            let c = match self.peek() {
                Tok::Caret => Connective::Conj,
                Tok::Pipe => Connective::Disj,
                _ => break,
            };
            if connective.is_some_and(|prev| prev != c) {
                return Err(syntax(
                    self.pos(),
                    "a basic formula cannot mix `^` and `|`",
                ));
            }
            connective = Some(c);
            self.next();
            atoms.push(self.atom()?);
        }
        Ok(BasicFormula::new(
            connective.unwrap_or(Connective::Conj),
            atoms,
        ))
    }

    fn atom(&mut self) -> Result<Atom> {
        let pos = self.pos();
        let name = match self.next() {
            Tok::Ident(s) if s == "not" => {
                return Err(syntax(pos, "`not` is reserved for negated literals"))
            }
            Tok::Ident(s) if is_lower(&s) => s,
            Tok::Ident(s) => {
                return Err(syntax(
                    pos,
                    format!("predicate `{s}` must start with a lowercase letter"),
                ))
            }
            other => {
                return Err(syntax(
                    pos,
                    format!("expected an atom, found {}", other.describe()),
                ))
            }
        };
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                let pos = self.pos();
                match self.next() {
                    Tok::Ident(s) if is_lower(&s) => args.push(Term::Const(s)),
                    Tok::Ident(s) => args.push(Term::Var(s)),
                    other => {
                        return Err(syntax(
                            pos,
                            format!("expected a term, found {}", other.describe()),
                        ))
                    }
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen)?;
        }
        Ok(Atom::new(name, args))
    }

    fn annotation(&mut self) -> Result<Annotation> {
        self.expect(&Tok::LBracket)?;
        let lo = self.item()?;
        self.expect(&Tok::Comma)?;
        let hi = self.item()?;
        self.expect(&Tok::RBracket)?;
        Ok(Annotation::new(lo, hi))
    }

    fn item(&mut self) -> Result<AnnotationItem> {
        let mut acc = self.factor()?;
        loop {
            let func = match self.peek() {
                Tok::Star => AnnotationFn::Mul,
                Tok::Slash => AnnotationFn::Div,
                _ => return Ok(acc),
            };
            self.next();
            let rhs = self.factor()?;
            acc = AnnotationItem::Apply(func, vec![acc, rhs]);
        }
    }

    fn factor(&mut self) -> Result<AnnotationItem> {
        let pos = self.pos();
        match self.next() {
            Tok::Number {
                value,
                integer,
                text,
            } => {
                let value = if integer
                    && matches!(self.peek(), Tok::Slash)
                    && matches!(self.peek_nth(1), Tok::Number { integer: true, .. })
                {
                    self.next();
                    let Tok::Number {
                        value: den,
                        text: den_text,
                        ..
                    } = self.next()
                    else {
                        unreachable!()
                    };
                    if den.is_zero() {
                        return Err(syntax(pos, format!("zero denominator in `{text}/{den_text}`")));
                    }
                    value / den
                } else {
                    value
                };
                if value < Rational::zero() || value > Rational::one() {
                    return Err(Error::ConstantOutOfRange {
                        pos,
                        value: value.to_string(),
                    });
                }
                Ok(AnnotationItem::Const(value))
            }
            Tok::LParen => {
                let inner = self.item()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) if !is_lower(&name) => Ok(AnnotationItem::Var(name)),
            Tok::Ident(name) => {
                let func = AnnotationFn::from_name(&name).ok_or_else(|| {
                    syntax(pos, format!("unknown annotation function `{name}`"))
                })?;
                self.expect(&Tok::LParen)?;
                let mut args = vec![self.item()?];
                while self.eat(&Tok::Comma) {
                    args.push(self.item()?);
                }
                self.expect(&Tok::RParen)?;
                if !func.accepts_arity(args.len()) {
                    return Err(syntax(
                        pos,
                        format!("`{name}` does not take {} arguments", args.len()),
                    ));
                }
                Ok(AnnotationItem::Apply(func, args))
            }
            other => Err(syntax(
                pos,
                format!("expected an annotation item, found {}", other.describe()),
            )),
        }
    }
}

fn is_lower(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_lowercase)
}

/// Checks the per-clause restrictions the engine relies on.
fn validate_clause(clause: &GpClause, pos: Position) -> Result<()> {
    for neg in &clause.negatives {
        if let Some(var) = neg.annotation.variables().into_iter().next() {
            return Err(Error::VariableUnderNegation {
                pos,
                var: var.to_string(),
            });
        }
    }

    let mut body_vars = BTreeSet::new();
    for lit in &clause.positives {
        for item in [&lit.annotation.lo, &lit.annotation.hi] {
            match item {
                AnnotationItem::Var(v) => {
                    body_vars.insert(v.as_str());
                }
                other => {
                    if let Some(var) = other.variables().into_iter().next() {
                        return Err(Error::NonBareBodyVariable {
                            pos,
                            var: var.to_string(),
                        });
                    }
                }
            }
        }
    }
    if let Some(var) = clause
        .head
        .annotation
        .variables()
        .into_iter()
        .find(|v| !body_vars.contains(v))
    {
        return Err(Error::UnboundHeadVariable {
            pos,
            var: var.to_string(),
            kind: VariableKind::Annotation,
        });
    }

    let body_objects: BTreeSet<&str> = clause
        .positives
        .iter()
        .chain(&clause.negatives)
        .flat_map(|l| l.formula.variables())
        .collect();
    if let Some(var) = clause
        .head
        .formula
        .variables()
        .find(|v| !body_objects.contains(v))
    {
        return Err(Error::UnboundHeadVariable {
            pos,
            var: var.to_string(),
            kind: VariableKind::Object,
        });
    }
    Ok(())
}

/// Parses and validates a whole program.
pub fn parse_program(text: &str) -> Result<GpProgram> {
    let mut parser = Parser::new(text)?;
    let mut clauses = Vec::new();
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    while !parser.at_eof() {
        let pos = parser.pos();
        let clause = parser.clause()?;
        validate_clause(&clause, pos)?;
        for atom in clause.formulas().flat_map(BasicFormula::atoms) {
            let expected = *arities
                .entry(atom.predicate.clone())
                .or_insert(atom.arity());
            if expected != atom.arity() {
                return Err(Error::ArityMismatch {
                    pos,
                    predicate: atom.predicate.clone(),
                    expected,
                    found: atom.arity(),
                });
            }
        }
        clauses.push(clause);
    }
    Ok(GpProgram::new(clauses))
}

/// Parses a bare basic formula such as `a ^ b` (used for queries).
pub fn parse_formula(text: &str) -> Result<BasicFormula> {
    let mut parser = Parser::new(text)?;
    let f = parser.basic()?;
    if !parser.at_eof() {
        return Err(parser.unexpected("end of formula"));
    }
    Ok(f)
}

/// Parses a bracketed annotation such as `[0.5 * V1, 1]`.
pub fn parse_annotation(text: &str) -> Result<Annotation> {
    let mut parser = Parser::new(text)?;
    let ann = parser.annotation()?;
    if !parser.at_eof() {
        return Err(parser.unexpected("end of annotation"));
    }
    Ok(ann)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_negated_clause() {
        let p = parse_program("p : [0.95, 1] <- not(q : [0.49, 0.51]).").unwrap();
        assert_eq!(p.len(), 1);
        assert!(!p.is_pf());
        let c = &p.clauses[0];
        assert!(c.positives.is_empty());
        assert_eq!(c.negatives.len(), 1);
        assert_eq!(
            c.head.annotation,
            Annotation::constant(q(19, 20), q(1, 1))
        );
        assert_eq!(
            c.negatives[0].annotation,
            Annotation::constant(q(49, 100), q(51, 100))
        );
    }

    #[test]
    fn fractions_and_decimals_agree() {
        let a = parse_program("p : [19/20, 1].").unwrap();
        let b = parse_program("p : [0.95, 1] <- .").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infix_and_prefix_functions_agree() {
        let a = parse_annotation("[0.5 * V, V / W]").unwrap();
        let b = parse_annotation("[mul(0.5, V), div(V, W)]").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_out_of_range() {
        let err = parse_program("p : [1.5, 2] <- .").unwrap_err();
        assert!(matches!(err, Error::ConstantOutOfRange { .. }), "{err}");
        let err = parse_program("p : [0, 3/2].").unwrap_err();
        assert!(matches!(err, Error::ConstantOutOfRange { .. }), "{err}");
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_program("p : [0, 1].\nq : [0, 1\n").unwrap_err();
        match err {
            Error::Syntax { pos, .. } => assert_eq!(pos.line, 3),
            other => panic!("unexpected {other}"),
        }
        let err = parse_program("p : [0, 1] <- q : [0, 1] r : [0,1].").unwrap_err();
        match err {
            Error::Syntax { pos, .. } => assert_eq!((pos.line, pos.column), (1, 26)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn head_annotation_variable_must_occur_in_body() {
        let err = parse_program("p : [V, 1] <- q : [0, 1].").unwrap_err();
        assert!(matches!(
            err,
            Error::UnboundHeadVariable {
                kind: VariableKind::Annotation,
                ..
            }
        ));
    }

    #[test]
    fn head_object_variable_must_occur_in_body() {
        let err = parse_program("p(X) : [1, 1].").unwrap_err();
        assert!(matches!(
            err,
            Error::UnboundHeadVariable {
                kind: VariableKind::Object,
                ..
            }
        ));
        // occurring only under negation is enough
        parse_program("u(C) : [0.95, 1] <- not(h(C) : [0.49, 0.51]).").unwrap();
    }

    #[test]
    fn arity_mismatch() {
        let err = parse_program("p(a) : [1, 1].\np(a, b) : [1, 1].").unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { expected: 1, found: 2, .. }));
    }

    #[test]
    fn variable_under_negation() {
        let err = parse_program("p : [V, V] <- q : [V, V] & not(r : [V, 1]).").unwrap_err();
        assert!(matches!(err, Error::VariableUnderNegation { .. }));
    }

    #[test]
    fn non_bare_body_variable() {
        let err = parse_program("p : [V, V] <- q : [0.5 * V, 1].").unwrap_err();
        assert!(matches!(err, Error::NonBareBodyVariable { .. }));
    }

    #[test]
    fn mixed_connectives_rejected() {
        assert!(parse_formula("a ^ b | c").is_err());
        assert!(parse_formula("(a ^ b)").is_ok());
    }

    #[test]
    fn comments_and_clause_dot_after_integer() {
        let p = parse_program("% heading\np : [1, 1]. % trailing\nq : [0, 1] <- p : [1, 1].").unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn function_arity_checked() {
        assert!(parse_annotation("[sub(1), 1]").is_err());
        assert!(parse_annotation("[min(0.2, 0.3, 0.1), 1]").is_ok());
        assert!(parse_annotation("[foo(0.2), 1]").is_err());
    }

    #[test]
    fn empty_program() {
        assert!(parse_program("  % nothing\n").unwrap().is_empty());
    }
}
