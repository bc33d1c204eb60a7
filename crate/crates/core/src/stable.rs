//! Stable formula functions and stable classes.
//!
//! The transform `ff(P, h)` depends on `h` only through which negated
//! literals `not(G : beta)` it blocks (`h(G)` contained in `beta`). With `k`
//! distinct negated literals there are `2^k` possible transforms, and every
//! value of `SF_P(h) = lfp(T_ff(P, h))` is the least fixpoint of one of
//! them. Stable functions are the candidates that reproduce their own
//! blocking vector; stable classes are unions of cycles of `SF_P`
//! restricted to the candidates, and the inclusion-minimal ones are exactly
//! the individual cycles.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fixpoint::{Engine, FormulaFunction};
use crate::ground::GroundProgram;
use crate::interval::{eval_annotation, Binding, Interval};
use crate::syntax::{BasicFormula, GpClause};

/// A distinct negated literal `not(formula : bound)` of a ground program.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NegationKey {
    pub formula: BasicFormula,
    pub bound: Interval,
}

impl std::fmt::Display for NegationKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "not({} : {})", self.formula, self.bound)
    }
}

fn keys_of(clause: &GpClause) -> impl Iterator<Item = Result<NegationKey>> + '_ {
    clause.negatives.iter().map(|neg| {
        Ok(NegationKey {
            formula: neg.formula.clone(),
            bound: eval_annotation(&neg.annotation, &Binding::new())?,
        })
    })
}

/// The distinct negated literals of `g`, in canonical order.
pub fn negation_keys(g: &GroundProgram) -> Result<Vec<NegationKey>> {
    let mut keys = BTreeSet::new();
    for clause in g.clauses() {
        for key in keys_of(clause) {
            keys.insert(key?);
        }
    }
    Ok(keys.into_iter().collect())
}

/// For every negated literal, whether a guess blocks it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockingVector {
    entries: BTreeMap<NegationKey, bool>,
}

impl BlockingVector {
    /// Bit `i` of `mask` blocks `keys[i]`.
    pub fn from_mask(keys: &[NegationKey], mask: usize) -> Self {
        BlockingVector {
            entries: keys
                .iter()
                .enumerate()
                .map(|(i, k)| (k.clone(), mask >> i & 1 == 1))
                .collect(),
        }
    }

    pub fn is_blocked(&self, key: &NegationKey) -> Option<bool> {
        self.entries.get(key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NegationKey, bool)> {
        self.entries.iter().map(|(k, b)| (k, *b))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn is_blocked_by(key: &NegationKey, h: &FormulaFunction) -> bool {
    h.get(&key.formula).is_subset(&key.bound)
}

pub fn blocking_of(g: &GroundProgram, h: &FormulaFunction) -> Result<BlockingVector> {
    Ok(BlockingVector {
        entries: negation_keys(g)?
            .into_iter()
            .map(|k| {
                let blocked = is_blocked_by(&k, h);
                (k, blocked)
            })
            .collect(),
    })
}

fn blocking_mask(keys: &[NegationKey], h: &FormulaFunction) -> usize {
    keys.iter()
        .enumerate()
        .filter(|(_, k)| is_blocked_by(k, h))
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Deletes every clause with a blocked negated literal and strips the
/// negated literals from the rest. The tracked set is unchanged.
pub fn ff_transform(g: &GroundProgram, bv: &BlockingVector) -> Result<GroundProgram> {
    let mut kept = Vec::new();
    'clauses: for clause in g.clauses() {
        for key in keys_of(clause) {
            let key = key?;
            match bv.is_blocked(&key) {
                Some(false) => {}
                Some(true) => continue 'clauses,
                None => return Err(Error::DomainMismatch),
            }
        }
        kept.push(GpClause {
            head: clause.head.clone(),
            positives: clause.positives.clone(),
            negatives: Vec::new(),
        });
    }
    Ok(g.with_clauses(kept))
}

/// A finite set of formula functions, kept sorted and duplicate free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StableClass {
    members: Vec<FormulaFunction>,
}

impl StableClass {
    pub fn new(mut members: Vec<FormulaFunction>) -> Self {
        members.sort();
        members.dedup();
        StableClass { members }
    }

    pub fn members(&self) -> &[FormulaFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, h: &FormulaFunction) -> bool {
        self.members.binary_search(h).is_ok()
    }
}

fn fn_leq(a: &FormulaFunction, b: &FormulaFunction) -> bool {
    a.leq(b).unwrap_or(false)
}

/// Every member of `a` lies below some member of `b`.
pub fn smyth_leq(a: &StableClass, b: &StableClass) -> bool {
    a.members.iter().all(|x| b.members.iter().any(|y| fn_leq(x, y)))
}

/// Every member of `b` lies above some member of `a`.
pub fn hoare_leq(a: &StableClass, b: &StableClass) -> bool {
    b.members.iter().all(|y| a.members.iter().any(|x| fn_leq(x, y)))
}

fn minimal_under(
    classes: &[StableClass],
    leq: impl Fn(&StableClass, &StableClass) -> bool,
) -> Vec<StableClass> {
    classes
        .iter()
        .filter(|c| classes.iter().all(|other| other == *c || !leq(other, c)))
        .cloned()
        .collect()
}

/// Classes `C` such that no other class `C'` has `C' <=_hoare C`.
pub fn hoare_minimal(classes: &[StableClass]) -> Vec<StableClass> {
    minimal_under(classes, hoare_leq)
}

/// Classes `C` such that no other class `C'` has `C' <=_smyth C`.
pub fn smyth_minimal(classes: &[StableClass]) -> Vec<StableClass> {
    minimal_under(classes, smyth_leq)
}

impl Engine {
    /// `lfp(T_ff(g, h))`.
    pub fn sfp(&self, g: &GroundProgram, h: &FormulaFunction) -> Result<FormulaFunction> {
        let transformed = ff_transform(g, &blocking_of(g, h)?)?;
        Ok(self.lfp(&transformed)?.function)
    }

    pub fn is_stable(&self, g: &GroundProgram, h: &FormulaFunction) -> Result<bool> {
        Ok(self.sfp(g, h)? == *h)
    }

    /// `{sfp(h) : h in members} = members` as sets.
    pub fn is_stable_class(&self, g: &GroundProgram, members: &[FormulaFunction]) -> Result<bool> {
        let image = members
            .iter()
            .map(|h| self.sfp(g, h))
            .collect::<Result<BTreeSet<_>>>()?;
        let members: BTreeSet<&FormulaFunction> = members.iter().collect();
        Ok(image.len() == members.len() && image.iter().all(|h| members.contains(h)))
    }

    /// The negation keys and, indexed by blocking mask, the least fixpoint of
    /// each of the `2^k` transforms.
    fn candidates(&self, g: &GroundProgram) -> Result<(Vec<NegationKey>, Vec<FormulaFunction>)> {
        let keys = negation_keys(g)?;
        if keys.len() > self.limits().max_neg {
            return Err(Error::NegationBudget {
                count: keys.len(),
                limit: self.limits().max_neg,
            });
        }
        let lfps = (0..1usize << keys.len())
            .into_par_iter()
            .map(|mask| {
                let transformed = ff_transform(g, &BlockingVector::from_mask(&keys, mask))?;
                Ok(self.lfp(&transformed)?.function)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((keys, lfps))
    }

    /// All stable formula functions, in canonical order.
    pub fn enumerate_stable_functions(&self, g: &GroundProgram) -> Result<Vec<FormulaFunction>> {
        let (keys, lfps) = self.candidates(g)?;
        let mut stable: Vec<FormulaFunction> = lfps
            .into_iter()
            .enumerate()
            .filter(|(mask, h)| blocking_mask(&keys, h) == *mask)
            .map(|(_, h)| h)
            .collect();
        stable.sort();
        Ok(stable)
    }

    /// Iterates `sfp` from the bottom element and returns the first cycle.
    pub fn alternating_class(&self, g: &GroundProgram) -> Result<StableClass> {
        let keys = negation_keys(g)?;
        // every iterate after the first is one of at most 2^k candidates
        let bound = 1usize.checked_shl(keys.len() as u32).unwrap_or(usize::MAX).saturating_add(2);
        let mut seen: Vec<FormulaFunction> = vec![FormulaFunction::bottom(g.tracked())];
        while seen.len() <= bound {
            let next = self.sfp(g, seen.last().expect("non-empty"))?;
            if let Some(start) = seen.iter().position(|h| *h == next) {
                return Ok(StableClass::new(seen.split_off(start)));
            }
            seen.push(next);
        }
        Err(Error::Divergence(bound))
    }

    /// The inclusion-minimal stable classes: the cycles of `sfp` on the
    /// candidate functions, in canonical order.
    pub fn minimal_stable_classes(&self, g: &GroundProgram) -> Result<Vec<StableClass>> {
        let (keys, lfps) = self.candidates(g)?;
        let nodes: Vec<FormulaFunction> = lfps
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index_of = |h: &FormulaFunction| nodes.binary_search(h).expect("candidate");
        let succ: Vec<usize> = nodes
            .iter()
            .map(|h| index_of(&lfps[blocking_mask(&keys, h)]))
            .collect();

        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Fresh,
            OnPath,
            Done,
        }
        let mut mark = vec![Mark::Fresh; nodes.len()];
        let mut classes = Vec::new();
        for start in 0..nodes.len() {
            let mut path = Vec::new();
            let mut at = start;
            while mark[at] == Mark::Fresh {
                mark[at] = Mark::OnPath;
                path.push(at);
                at = succ[at];
            }
            if mark[at] == Mark::OnPath {
                let from = path.iter().position(|&n| n == at).expect("on path");
                classes.push(StableClass::new(
                    path[from..].iter().map(|&n| nodes[n].clone()).collect(),
                ));
            }
            for n in path {
                mark[n] = Mark::Done;
            }
        }
        classes.sort();
        Ok(classes)
    }
}
