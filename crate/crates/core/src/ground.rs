//! Herbrand base construction and grounding of object variables.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::syntax::{Atom, BasicFormula, GpClause, GpProgram, Term};
use crate::Limits;

/// The ordered Herbrand base. Atom `i` corresponds to bit `i` of a world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Base {
    atoms: Vec<Atom>,
    index: BTreeMap<Atom, usize>,
}

impl Base {
    pub fn new(mut atoms: Vec<Atom>) -> Self {
        atoms.sort();
        atoms.dedup();
        let index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Base { atoms, index }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn position(&self, atom: &Atom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn contains_formula(&self, f: &BasicFormula) -> Result<()> {
        for atom in f.atoms() {
            if !atom.is_ground() {
                return Err(Error::NonGroundFormula(f.to_string()));
            }
            if self.position(atom).is_none() {
                return Err(Error::AtomOutsideBase(atom.to_string()));
            }
        }
        Ok(())
    }
}

/// A program with every object variable instantiated, together with its
/// Herbrand base and the basic formulas whose intervals are tracked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundProgram {
    clauses: Vec<GpClause>,
    base: Base,
    tracked: Vec<BasicFormula>,
}

impl GroundProgram {
    pub fn clauses(&self) -> &[GpClause] {
        &self.clauses
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    /// Canonically ordered, duplicate free.
    pub fn tracked(&self) -> &[BasicFormula] {
        &self.tracked
    }

    pub fn is_pf(&self) -> bool {
        self.clauses.iter().all(GpClause::is_pf)
    }

    /// The same program with `extra` formulas added to the tracked set.
    pub fn with_tracked(&self, extra: &[BasicFormula]) -> Result<GroundProgram> {
        Ok(GroundProgram {
            clauses: self.clauses.clone(),
            base: self.base.clone(),
            tracked: tracked_formulas(self, extra)?,
        })
    }

    /// Replaces the clauses, keeping base and tracked set.
    pub(crate) fn with_clauses(&self, clauses: Vec<GpClause>) -> GroundProgram {
        debug_assert!(clauses
            .iter()
            .flat_map(GpClause::formulas)
            .all(|f| self.tracked.binary_search(f).is_ok()));
        GroundProgram {
            clauses,
            base: self.base.clone(),
            tracked: self.tracked.clone(),
        }
    }
}

fn vocabulary(p: &GpProgram) -> (BTreeMap<&str, usize>, BTreeSet<&str>) {
    let mut predicates = BTreeMap::new();
    let mut constants = BTreeSet::new();
    for atom in p.atoms() {
        predicates.insert(atom.predicate.as_str(), atom.arity());
        for t in &atom.args {
            if let Term::Const(c) = t {
                constants.insert(c.as_str());
            }
        }
    }
    (predicates, constants)
}

/// All ground atoms over the program's predicates and constants, in
/// lexicographic order.
pub fn herbrand_base(p: &GpProgram, max_atoms: usize) -> Result<Vec<Atom>> {
    let (predicates, constants) = vocabulary(p);
    let constants: Vec<&str> = constants.into_iter().collect();

    let size = predicates
        .values()
        .map(|&arity| (constants.len() as u128).saturating_pow(arity as u32))
        .fold(0u128, u128::saturating_add);
    if size > max_atoms as u128 {
        return Err(Error::AtomBudget {
            size,
            limit: max_atoms,
        });
    }

    let mut atoms = Vec::with_capacity(size as usize);
    for (&predicate, &arity) in &predicates {
        for tuple in tuples(&constants, arity) {
            atoms.push(Atom::ground(predicate, &tuple));
        }
    }
    atoms.sort();
    Ok(atoms)
}

/// Every length-`n` tuple over `values`, in lexicographic order.
fn tuples<'a>(values: &[&'a str], n: usize) -> Vec<Vec<&'a str>> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut t = prefix.clone();
                    t.push(*v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Instantiates every clause with every substitution of its object
/// variables by program constants.
pub fn ground_program(p: &GpProgram, limits: &Limits) -> Result<GroundProgram> {
    let base = Base::new(herbrand_base(p, limits.max_atoms)?);
    let (_, constants) = vocabulary(p);
    let constants: Vec<&str> = constants.into_iter().collect();

    let mut clauses = Vec::new();
    for clause in &p.clauses {
        let vars = clause.object_variables();
        for tuple in tuples(&constants, vars.len()) {
            let subst: BTreeMap<&str, &str> = vars.iter().copied().zip(tuple).collect();
            clauses.push(clause.substitute(&subst));
        }
    }

    let tracked: BTreeSet<BasicFormula> = clauses
        .iter()
        .flat_map(GpClause::formulas)
        .cloned()
        .collect();
    Ok(GroundProgram {
        clauses,
        base,
        tracked: tracked.into_iter().collect(),
    })
}

/// The program's formulas plus `extra`, canonically ordered.
pub fn tracked_formulas(g: &GroundProgram, extra: &[BasicFormula]) -> Result<Vec<BasicFormula>> {
    let mut set: BTreeSet<BasicFormula> = g.tracked.iter().cloned().collect();
    for f in extra {
        g.base.contains_formula(f)?;
        set.insert(f.clone());
    }
    Ok(set.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_program};

    const DOGS: &str = "bark(X) : [0.95, 1] <- dog(X) : [1, 1] & not(abn(X) : [1, 1]).
        dog(fido) : [1, 1] <- .
        dog(benjy) : [1, 1] <- .
        bark(benjy) : [0, 0] <- .
        abn(X) : [1, 1] <- bark(X) : [0, 0].";

    #[test]
    fn dogs_base_and_grounding() {
        let p = parse_program(DOGS).unwrap();
        let base = herbrand_base(&p, 12).unwrap();
        assert_eq!(base.len(), 6);
        let g = ground_program(&p, &Limits::default()).unwrap();
        // two rules over two constants plus three facts
        assert_eq!(g.clauses().len(), 7);
        let names: Vec<String> = g.tracked().iter().map(ToString::to_string).collect();
        assert_eq!(
            names,
            [
                "abn(benjy)",
                "abn(fido)",
                "bark(benjy)",
                "bark(fido)",
                "dog(benjy)",
                "dog(fido)"
            ]
        );
    }

    #[test]
    fn propositional_base() {
        let p = parse_program("p : [0.95, 1] <- not(q : [0.49, 0.51]).").unwrap();
        assert_eq!(herbrand_base(&p, 12).unwrap().len(), 2);
        let g = ground_program(&p, &Limits::default()).unwrap();
        assert_eq!(g.clauses().len(), 1);
        assert_eq!(g.clauses()[0], p.clauses[0]);
    }

    #[test]
    fn binary_predicate_combinations() {
        let p = parse_program("r(a, b) : [1, 1].").unwrap();
        let base = herbrand_base(&p, 12).unwrap();
        assert_eq!(base.len(), 4);
        assert_eq!(base[0].to_string(), "r(a, a)");
        assert_eq!(base[3].to_string(), "r(b, b)");
    }

    #[test]
    fn atom_budget() {
        let p = parse_program("r(a, b, c) : [1, 1].").unwrap();
        assert_eq!(
            herbrand_base(&p, 12),
            Err(Error::AtomBudget { size: 27, limit: 12 })
        );
    }

    #[test]
    fn extra_tracked_formulas() {
        let p = parse_program("p : [0.95, 1] <- not(q : [0.49, 0.51]).").unwrap();
        let g = ground_program(&p, &Limits::default()).unwrap();
        let pq = parse_formula("p ^ q").unwrap();
        let t = tracked_formulas(&g, std::slice::from_ref(&pq)).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.contains(&pq));
        assert_eq!(
            tracked_formulas(&g, &[parse_formula("r").unwrap()]),
            Err(Error::AtomOutsideBase("r".into()))
        );
        assert!(matches!(
            tracked_formulas(&g, &[parse_formula("p(X)").unwrap()]),
            Err(Error::NonGroundFormula(_))
        ));
    }

    #[test]
    fn substitution_can_merge_atoms() {
        let p = parse_program("s(X) : [1, 1] <- (t(X) ^ t(Y)) : [1, 1].\nt(a) : [1, 1].\nt(b) : [1, 1].").unwrap();
        let g = ground_program(&p, &Limits::default()).unwrap();
        assert_eq!(g.clauses().len(), 6);
        assert!(g.tracked().contains(&parse_formula("t(a)").unwrap()));
    }
}
