//! Closed sub-intervals of [0, 1] with exact rational endpoints, and the
//! evaluation of annotation terms under a binding of annotation variables.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::syntax::{AnnotationFn, AnnotationItem, Annotation};
use crate::Rational;

/// A member of C[0,1]: either the empty interval or `[lo, hi]` with
/// `0 <= lo <= hi <= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Interval {
    Empty,
    Closed { lo: Rational, hi: Rational },
}

impl Interval {
    /// Builds `[lo, hi]`; `lo > hi` yields [`Interval::Empty`].
    ///
    /// Panics if either endpoint lies outside [0, 1].
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(
            in_unit(&lo) && in_unit(&hi),
            "interval endpoints must lie in [0, 1], got [{lo}, {hi}]"
        );
        if lo > hi {
            Interval::Empty
        } else {
            Interval::Closed { lo, hi }
        }
    }

    pub fn unit() -> Self {
        Interval::Closed {
            lo: Rational::zero(),
            hi: Rational::one(),
        }
    }

    pub fn point(value: Rational) -> Self {
        Interval::new(value.clone(), value)
    }

    /// Convenience for small literal endpoints, `Interval::ratio((19, 20), (1, 1))`.
    pub fn ratio(lo: (i64, i64), hi: (i64, i64)) -> Self {
        Interval::new(
            Rational::new(lo.0.into(), lo.1.into()),
            Rational::new(hi.0.into(), hi.1.into()),
        )
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Interval::Empty)
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Interval::Closed { lo, hi } if lo.is_zero() && hi.is_one())
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Interval::Closed { lo, hi } if lo == hi)
    }

    pub fn lo(&self) -> Option<&Rational> {
        match self {
            Interval::Empty => None,
            Interval::Closed { lo, .. } => Some(lo),
        }
    }

    pub fn hi(&self) -> Option<&Rational> {
        match self {
            Interval::Empty => None,
            Interval::Closed { hi, .. } => Some(hi),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        match (self, other) {
            (Interval::Closed { lo: a, hi: b }, Interval::Closed { lo: c, hi: d }) => {
                Interval::new(a.max(c).clone(), b.min(d).clone())
            }
            _ => Interval::Empty,
        }
    }

    /// Set inclusion; the empty interval is a subset of everything.
    pub fn is_subset(&self, other: &Interval) -> bool {
        match (self, other) {
            (Interval::Empty, _) => true,
            (_, Interval::Empty) => false,
            (Interval::Closed { lo: a, hi: b }, Interval::Closed { lo: c, hi: d }) => {
                c <= a && b <= d
            }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Empty => f.write_str("empty"),
            Interval::Closed { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

pub(crate) fn in_unit(x: &Rational) -> bool {
    *x >= Rational::zero() && *x <= Rational::one()
}

/// Values for annotation variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Binding(BTreeMap<String, Rational>);

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, var: impl Into<String>, value: Rational) {
        debug_assert!(in_unit(&value));
        self.0.insert(var.into(), value);
    }

    pub fn get(&self, var: &str) -> Option<&Rational> {
        self.0.get(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }
}

impl<S: Into<String>> FromIterator<(S, Rational)> for Binding {
    fn from_iter<I: IntoIterator<Item = (S, Rational)>>(iter: I) -> Self {
        Binding(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

pub fn eval_item(item: &AnnotationItem, binding: &Binding) -> Result<Rational> {
    match item {
        AnnotationItem::Const(c) => Ok(c.clone()),
        AnnotationItem::Var(v) => binding
            .get(v)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable(v.clone())),
        AnnotationItem::Apply(func, args) => {
            let args = args
                .iter()
                .map(|a| eval_item(a, binding))
                .collect::<Result<Vec<_>>>()?;
            Ok(apply(*func, args))
        }
    }
}

/// The built-in annotation functions, totalized into [0, 1].
pub fn apply(func: AnnotationFn, args: Vec<Rational>) -> Rational {
    let one = Rational::one();
    let zero = Rational::zero();
    let mut it = args.into_iter();
    let first = it.next().expect("annotation functions take at least one argument");
    match func {
        AnnotationFn::Mul => it.fold(first, |acc, x| acc * x),
        AnnotationFn::Add => it.fold(first, |acc, x| acc + x).min(one),
        AnnotationFn::Min => it.fold(first, |acc, x| acc.min(x)),
        AnnotationFn::Max => it.fold(first, |acc, x| acc.max(x)),
        AnnotationFn::Sub => {
            let rest = it.next().expect("sub is binary");
            (first - rest).max(zero)
        }
        AnnotationFn::Div => {
            let den = it.next().expect("div is binary");
            if den.is_zero() {
                one
            } else {
                (first / den).min(one)
            }
        }
    }
}

/// Evaluates both endpoints; a reversed result is the empty interval.
pub fn eval_annotation(ann: &Annotation, binding: &Binding) -> Result<Interval> {
    let lo = eval_item(&ann.lo, binding)?;
    let hi = eval_item(&ann.hi, binding)?;
    Ok(Interval::new(lo, hi))
}
