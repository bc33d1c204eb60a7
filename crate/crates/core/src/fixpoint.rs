//! Formula functions and the consequence operators over them.
//!
//! `sp_step` is the clause-level operator: every applicable ground clause
//! contributes its head annotation, and contributions for the same formula
//! are intersected. `tp_step` then tightens each tracked formula to the
//! exact range its world-probability sum can take under the linear system
//! induced by that result.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ground::GroundProgram;
use crate::interval::{eval_annotation, Binding, Interval};
use crate::lp::{FeasibleRegion, Objective};
use crate::syntax::{AnnotatedFormula, BasicFormula, GpClause};
use crate::worlds::{build_constraints, coefficients};
use crate::Limits;

/// A finite map from tracked basic formulas to intervals; formulas outside
/// the map are implicitly `[0, 1]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaFunction {
    values: BTreeMap<BasicFormula, Interval>,
}

impl FormulaFunction {
    /// Everything `[0, 1]`: the least element.
    pub fn bottom(domain: &[BasicFormula]) -> Self {
        Self::constant(domain, Interval::unit())
    }

    /// Everything empty: the greatest element.
    pub fn top(domain: &[BasicFormula]) -> Self {
        Self::constant(domain, Interval::Empty)
    }

    fn constant(domain: &[BasicFormula], value: Interval) -> Self {
        FormulaFunction {
            values: domain.iter().map(|f| (f.clone(), value.clone())).collect(),
        }
    }

    /// `bottom(domain)` overridden by `assignments`, which must lie in the domain.
    pub fn assign(
        domain: &[BasicFormula],
        assignments: impl IntoIterator<Item = (BasicFormula, Interval)>,
    ) -> Result<Self> {
        let mut h = Self::bottom(domain);
        for (f, v) in assignments {
            match h.values.get_mut(&f) {
                Some(slot) => *slot = v,
                None => return Err(Error::DomainMismatch),
            }
        }
        Ok(h)
    }

    pub fn get(&self, f: &BasicFormula) -> Interval {
        self.values.get(f).cloned().unwrap_or_else(Interval::unit)
    }

    pub fn value(&self, f: &BasicFormula) -> Option<&Interval> {
        self.values.get(f)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasicFormula, &Interval)> {
        self.values.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &BasicFormula> {
        self.values.keys()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn same_domain(&self, other: &FormulaFunction) -> bool {
        self.values.len() == other.values.len()
            && self.values.keys().zip(other.values.keys()).all(|(a, b)| a == b)
    }

    /// The information order: `self <= other` iff every value of `other` is
    /// contained in the corresponding value of `self`.
    pub fn leq(&self, other: &FormulaFunction) -> Result<bool> {
        if !self.same_domain(other) {
            return Err(Error::DomainMismatch);
        }
        Ok(self
            .values
            .values()
            .zip(other.values.values())
            .all(|(mine, theirs)| theirs.is_subset(mine)))
    }
}

impl FromIterator<(BasicFormula, Interval)> for FormulaFunction {
    fn from_iter<I: IntoIterator<Item = (BasicFormula, Interval)>>(iter: I) -> Self {
        FormulaFunction {
            values: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for FormulaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (formula, value)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{formula}: {value}")?;
        }
        f.write_str("}")
    }
}

/// The contribution of one ground clause to its head formula under `h`, or
/// `None` when the clause does not apply.
///
/// A bare annotation variable in a positive body literal binds to the
/// matching endpoint of that literal's current value. Repeated occurrences
/// are checked against the first binding through the containment test, so
/// `[V, V]` applies only to point values.
fn clause_contribution(
    clause: &GpClause,
    h: &FormulaFunction,
    negation_aware: bool,
) -> Result<Option<Interval>> {
    if negation_aware {
        for neg in &clause.negatives {
            let beta = eval_annotation(&neg.annotation, &Binding::new())?;
            if h.get(&neg.formula).is_subset(&beta) {
                return Ok(None);
            }
        }
    }

    let mut binding = Binding::new();
    for AnnotatedFormula {
        formula,
        annotation,
    } in &clause.positives
    {
        let current = h.get(formula);
        let has_vars = !annotation.is_c_annotation();
        if has_vars {
            let Interval::Closed { lo, hi } = &current else {
                return Ok(Some(Interval::Empty));
            };
            for (item, endpoint) in [(&annotation.lo, lo), (&annotation.hi, hi)] {
                if let Some(v) = item.as_var() {
                    if !binding.contains(v) {
                        binding.bind(v, endpoint.clone());
                    }
                }
            }
        }
        let alpha = eval_annotation(annotation, &binding)?;
        if !current.is_subset(&alpha) {
            return Ok(None);
        }
    }

    eval_annotation(&clause.head.annotation, &binding).map(Some)
}

/// One application of the clause-level operator. With `negation_aware`,
/// a clause is blocked when some negated literal `not(G : beta)` has
/// `h(G)` contained in `beta`; otherwise negated literals are ignored.
pub fn sp_step(
    g: &GroundProgram,
    h: &FormulaFunction,
    negation_aware: bool,
) -> Result<FormulaFunction> {
    let mut collected: BTreeMap<&BasicFormula, Interval> = BTreeMap::new();
    for clause in g.clauses() {
        if let Some(contribution) = clause_contribution(clause, h, negation_aware)? {
            collected
                .entry(&clause.head.formula)
                .and_modify(|v| *v = v.intersect(&contribution))
                .or_insert(contribution);
        }
    }
    Ok(g.tracked()
        .iter()
        .map(|f| {
            let v = collected.get(f).cloned().unwrap_or_else(Interval::unit);
            (f.clone(), v)
        })
        .collect())
}

/// Counters surfaced as diagnostics.
#[derive(Debug, Default)]
pub struct Stats {
    tp_steps: AtomicU64,
    lp_solves: AtomicU64,
    infeasible_steps: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StatsSnapshot {
    pub tp_steps: u64,
    /// Phase-one feasibility checks plus objective optimizations.
    pub lp_solves: u64,
    pub infeasible_steps: u64,
}

impl Stats {
    pub fn snapshot(&self) -> StatsSnapshot {
        StatsSnapshot {
            tp_steps: self.tp_steps.load(Ordering::Relaxed),
            lp_solves: self.lp_solves.load(Ordering::Relaxed),
            infeasible_steps: self.infeasible_steps.load(Ordering::Relaxed),
        }
    }

    fn bump(counter: &AtomicU64, n: u64) {
        counter.fetch_add(n, Ordering::Relaxed);
    }
}

/// A least fixpoint and the number of operator applications that reached it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixpoint {
    pub function: FormulaFunction,
    pub iterations: usize,
}

/// Evaluation context: budgets plus shared counters. `Sync`, so it can be
/// used from parallel enumeration.
#[derive(Debug, Default)]
pub struct Engine {
    limits: Limits,
    stats: Stats,
}

impl Engine {
    pub fn new(limits: Limits) -> Self {
        Engine {
            limits,
            stats: Stats::default(),
        }
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn stats(&self) -> StatsSnapshot {
        self.stats.snapshot()
    }

    /// The LP-tightened operator. If the system induced by `sp_step` has no
    /// solution, every tracked formula maps to the empty interval.
    pub fn tp_step(
        &self,
        g: &GroundProgram,
        h: &FormulaFunction,
        negation_aware: bool,
    ) -> Result<FormulaFunction> {
        let s = sp_step(g, h, negation_aware)?;
        Stats::bump(&self.stats.tp_steps, 1);
        let cs = build_constraints(g.base(), &s)?;
        Stats::bump(&self.stats.lp_solves, 1);
        let Some(region) = FeasibleRegion::new(&cs) else {
            Stats::bump(&self.stats.infeasible_steps, 1);
            return Ok(FormulaFunction::top(g.tracked()));
        };

        let values = g
            .tracked()
            .par_iter()
            .map(|f| {
                let current = s.get(f);
                // A point row already pins the sum in every solution.
                if current.is_point() {
                    return Ok((f.clone(), current));
                }
                let obj = Objective::new(coefficients(g.base(), f)?);
                Stats::bump(&self.stats.lp_solves, 2);
                let lo = region.minimize(&obj);
                let hi = region.maximize(&obj);
                let (Some(lo), Some(hi)) = (lo.value(), hi.value()) else {
                    unreachable!("region is feasible");
                };
                Ok((f.clone(), Interval::new(lo.clone(), hi.clone())))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(values.into_iter().collect())
    }

    /// Iterates `tp_step` from the bottom element until it stabilizes.
    /// Only defined for programs without negation.
    pub fn lfp(&self, g: &GroundProgram) -> Result<Fixpoint> {
        if !g.is_pf() {
            return Err(Error::NegationPresent);
        }
        let mut h = FormulaFunction::bottom(g.tracked());
        for step in 1..=self.limits.max_iters {
            let next = self.tp_step(g, &h, false)?;
            if !h.leq(&next)? {
                return Err(Error::NonMonotone(step));
            }
            if next == h {
                return Ok(Fixpoint {
                    function: h,
                    iterations: step,
                });
            }
            h = next;
        }
        Err(Error::Divergence(self.limits.max_iters))
    }

    /// Whether `h` is a fixpoint of the negation-aware operator.
    pub fn is_fixpoint(&self, g: &GroundProgram, h: &FormulaFunction) -> Result<bool> {
        Ok(self.tp_step(g, h, true)? == *h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::ground_program;
    use crate::syntax::{parse_formula, parse_program};

    fn ground(src: &str) -> GroundProgram {
        ground_program(&parse_program(src).unwrap(), &Limits::default()).unwrap()
    }

    fn f(s: &str) -> BasicFormula {
        parse_formula(s).unwrap()
    }

    fn func(g: &GroundProgram, pairs: &[(&str, Interval)]) -> FormulaFunction {
        FormulaFunction::assign(g.tracked(), pairs.iter().map(|(k, v)| (f(k), v.clone()))).unwrap()
    }

    const EX05: &str = "p : [0.95, 1] <- not(q : [0.49, 0.51]).";
    const COND: &str = "(a ^ b) : [0.5 * V1, 0.5 * V1] <- b : [V1, V1].\nb : [0.8, 0.8].";

    #[test]
    fn order_examples() {
        let g = ground(EX05);
        let bottom = FormulaFunction::bottom(g.tracked());
        let top = FormulaFunction::top(g.tracked());
        let h2 = func(&g, &[("q", Interval::ratio((1, 2), (1, 2)))]);
        assert!(bottom.leq(&h2).unwrap());
        assert!(h2.leq(&top).unwrap());
        assert!(!h2.leq(&bottom).unwrap());
        let other = FormulaFunction::bottom(&[f("r")]);
        assert_eq!(bottom.leq(&other), Err(Error::DomainMismatch));
    }

    #[test]
    fn negation_aware_step() {
        let g = ground(EX05);
        let h1 = FormulaFunction::bottom(g.tracked());
        let s = sp_step(&g, &h1, true).unwrap();
        assert_eq!(s.get(&f("p")), Interval::ratio((19, 20), (1, 1)));
        let h2 = func(&g, &[("q", Interval::ratio((1, 2), (1, 2)))]);
        assert_eq!(sp_step(&g, &h2, true).unwrap().get(&f("p")), Interval::unit());
        // negation ignored entirely when not aware
        assert_eq!(
            sp_step(&g, &h2, false).unwrap().get(&f("p")),
            Interval::ratio((19, 20), (1, 1))
        );
    }

    #[test]
    fn variable_binding_from_point_values() {
        let g = ground(COND);
        let h = func(&g, &[("b", Interval::ratio((4, 5), (4, 5)))]);
        let s = sp_step(&g, &h, false).unwrap();
        assert_eq!(s.get(&f("a ^ b")), Interval::ratio((2, 5), (2, 5)));
        // non-point value: [V1, V1] cannot match
        let h = func(&g, &[("b", Interval::ratio((1, 2), (4, 5)))]);
        assert_eq!(sp_step(&g, &h, false).unwrap().get(&f("a ^ b")), Interval::unit());
        // empty value under a variable pattern contributes the empty interval
        let h = func(&g, &[("b", Interval::Empty)]);
        assert_eq!(sp_step(&g, &h, false).unwrap().get(&f("a ^ b")), Interval::Empty);
    }

    #[test]
    fn endpoint_binding_for_distinct_variables() {
        let g = ground("p : [L, H] <- q : [L, H].\nq : [0.2, 0.7].");
        let h = func(&g, &[("q", Interval::ratio((1, 5), (7, 10)))]);
        let s = sp_step(&g, &h, false).unwrap();
        assert_eq!(s.get(&f("p")), Interval::ratio((1, 5), (7, 10)));
    }

    #[test]
    fn inconsistent_facts_collapse_to_top() {
        let g = ground("a : [1, 1].\nb : [1, 1].\n(a | b) : [0, 0].");
        let engine = Engine::default();
        let h = engine
            .tp_step(&g, &FormulaFunction::bottom(g.tracked()), false)
            .unwrap();
        assert_eq!(h, FormulaFunction::top(g.tracked()));
        assert_eq!(engine.stats().infeasible_steps, 1);
    }

    #[test]
    fn conditional_probability_pipeline() {
        let g = ground(COND).with_tracked(&[f("a")]).unwrap();
        let engine = Engine::default();
        let fp = engine.lfp(&g).unwrap();
        assert_eq!(fp.function.get(&f("b")), Interval::ratio((4, 5), (4, 5)));
        assert_eq!(fp.function.get(&f("a ^ b")), Interval::ratio((2, 5), (2, 5)));
        assert_eq!(fp.function.get(&f("a")), Interval::ratio((2, 5), (3, 5)));
        assert_eq!(fp.iterations, 3);

        let h = func(
            &g,
            &[
                ("b", Interval::ratio((4, 5), (4, 5))),
                ("a ^ b", Interval::ratio((2, 5), (2, 5))),
            ],
        );
        let t = engine.tp_step(&g, &h, false).unwrap();
        assert_eq!(t.get(&f("a")), Interval::ratio((2, 5), (3, 5)));
    }

    #[test]
    fn lfp_rejects_negation() {
        let g = ground(EX05);
        assert_eq!(Engine::default().lfp(&g), Err(Error::NegationPresent));
    }

    #[test]
    fn empty_program() {
        let g = ground("");
        let fp = Engine::default().lfp(&g).unwrap();
        assert!(fp.function.is_empty());
        assert_eq!(fp.iterations, 1);
    }

    #[test]
    fn divergence_cap() {
        let g = ground(COND);
        let engine = Engine::new(Limits {
            max_iters: 1,
            ..Limits::default()
        });
        assert_eq!(engine.lfp(&g), Err(Error::Divergence(1)));
    }

    #[test]
    fn fixpoint_checks() {
        let g = ground(EX05);
        let engine = Engine::default();
        let h1 = func(&g, &[("p", Interval::ratio((19, 20), (1, 1)))]);
        assert!(engine.is_fixpoint(&g, &h1).unwrap());
        let bottom = FormulaFunction::bottom(g.tracked());
        assert!(!engine.is_fixpoint(&g, &bottom).unwrap());

        let g9 = ground(
            "p : [0.95, 1] <- not(p : [0.95, 1]).\n\
             p : [0.95, 1] <- q : [1, 1].\n\
             q : [1, 1] <- q : [1, 1].",
        );
        let h = func(
            &g9,
            &[
                ("p", Interval::ratio((19, 20), (1, 1))),
                ("q", Interval::ratio((1, 1), (1, 1))),
            ],
        );
        assert!(engine.is_fixpoint(&g9, &h).unwrap());
    }

    #[test]
    fn non_monotone_negation_witness() {
        let g = ground(EX05);
        let engine = Engine::default();
        let h1 = FormulaFunction::bottom(g.tracked());
        let h2 = func(&g, &[("q", Interval::ratio((1, 2), (1, 2)))]);
        assert!(h1.leq(&h2).unwrap());
        let t1 = engine.tp_step(&g, &h1, true).unwrap();
        let t2 = engine.tp_step(&g, &h2, true).unwrap();
        assert_eq!(t1.get(&f("p")), Interval::ratio((19, 20), (1, 1)));
        assert_eq!(t2.get(&f("p")), Interval::unit());
        assert!(!t1.leq(&t2).unwrap());
    }
}
