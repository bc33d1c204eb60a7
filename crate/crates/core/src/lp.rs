//! Exact rational linear programming over world probabilities.
//!
//! Dense two-phase primal simplex with Bland's rule. Phase one runs once per
//! constraint system; every objective is then optimized from a copy of the
//! resulting feasible basis.

use num_traits::{One, Signed, Zero};

use crate::worlds::ConstraintSystem;
use crate::Rational;

/// Sum of the probabilities of the marked worlds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub coeffs: Vec<bool>,
}

impl Objective {
    pub fn new(coeffs: Vec<bool>) -> Self {
        Objective { coeffs }
    }

    pub fn evaluate(&self, witness: &[Rational]) -> Rational {
        weighted_sum(&self.coeffs, witness)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Optimal {
        value: Rational,
        /// One probability per world.
        witness: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Infeasible => None,
            LpOutcome::Optimal { value, .. } => Some(value),
        }
    }
}

pub fn feasible(cs: &ConstraintSystem) -> bool {
    FeasibleRegion::new(cs).is_some()
}

pub fn minimize(cs: &ConstraintSystem, obj: &Objective) -> LpOutcome {
    match FeasibleRegion::new(cs) {
        None => LpOutcome::Infeasible,
        Some(region) => region.minimize(obj),
    }
}

pub fn maximize(cs: &ConstraintSystem, obj: &Objective) -> LpOutcome {
    match FeasibleRegion::new(cs) {
        None => LpOutcome::Infeasible,
        Some(region) => region.maximize(obj),
    }
}

/// True iff `witness` is a probability distribution meeting every row.
pub fn verify_witness(cs: &ConstraintSystem, witness: &[Rational]) -> bool {
    if witness.len() != cs.nvars() || witness.iter().any(Signed::is_negative) {
        return false;
    }
    cs.rows().iter().all(|row| {
        let s = weighted_sum(&row.coeffs, witness);
        row.lower.as_ref().is_none_or(|l| *l <= s) && row.upper.as_ref().is_none_or(|u| s <= *u)
    })
}

fn weighted_sum(coeffs: &[bool], xs: &[Rational]) -> Rational {
    coeffs
        .iter()
        .zip(xs)
        .filter(|(c, _)| **c)
        .fold(Rational::zero(), |acc, (_, x)| acc + x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sense {
    Le,
    Ge,
    Eq,
}

/// A constraint system for which a feasible basis has been found.
#[derive(Debug, Clone)]
pub struct FeasibleRegion {
    tableau: Tableau,
    #[cfg(debug_assertions)]
    system: ConstraintSystem,
}

impl FeasibleRegion {
    /// Runs phase one; `None` when the system has no solution.
    pub fn new(cs: &ConstraintSystem) -> Option<Self> {
        let tableau = Tableau::phase_one(cs)?;
        Some(FeasibleRegion {
            tableau,
            #[cfg(debug_assertions)]
            system: cs.clone(),
        })
    }

    pub fn minimize(&self, obj: &Objective) -> LpOutcome {
        let cost: Vec<Rational> = obj
            .coeffs
            .iter()
            .map(|&c| if c { Rational::one() } else { Rational::zero() })
            .collect();
        let (value, witness) = self.optimize(&cost);
        self.check(obj, &value, &witness);
        LpOutcome::Optimal { value, witness }
    }

    pub fn maximize(&self, obj: &Objective) -> LpOutcome {
        let cost: Vec<Rational> = obj
            .coeffs
            .iter()
            .map(|&c| if c { -Rational::one() } else { Rational::zero() })
            .collect();
        let (value, witness) = self.optimize(&cost);
        let value = -value;
        self.check(obj, &value, &witness);
        LpOutcome::Optimal { value, witness }
    }

    fn optimize(&self, cost: &[Rational]) -> (Rational, Vec<Rational>) {
        assert_eq!(cost.len(), self.tableau.nstruct, "objective width must match nvars");
        let mut t = self.tableau.clone();
        t.set_cost(cost);
        assert!(
            t.run(),
            "objective over the probability simplex cannot be unbounded"
        );
        let value = t.obj_value.clone();
        (value, t.solution())
    }

    #[cfg(debug_assertions)]
    fn check(&self, obj: &Objective, value: &Rational, witness: &[Rational]) {
        assert!(verify_witness(&self.system, witness), "LP witness violates the system");
        assert_eq!(&obj.evaluate(witness), value, "LP witness does not attain the optimum");
    }

    #[cfg(not(debug_assertions))]
    fn check(&self, _: &Objective, _: &Rational, _: &[Rational]) {}
}

#[derive(Debug, Clone)]
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs.
    obj: Vec<Rational>,
    obj_value: Rational,
    nstruct: usize,
    /// Columns at or beyond this index may not enter the basis.
    enterable: usize,
}

impl Tableau {
    fn phase_one(cs: &ConstraintSystem) -> Option<Tableau> {
        let nstruct = cs.nvars();
        let mut constraints: Vec<(Vec<Rational>, Sense, Rational)> = Vec::new();
        for row in cs.rows() {
            let coeffs: Vec<Rational> = row
                .coeffs
                .iter()
                .map(|&c| if c { Rational::one() } else { Rational::zero() })
                .collect();
            match (&row.lower, &row.upper) {
                (Some(l), Some(u)) if l == u => constraints.push((coeffs, Sense::Eq, l.clone())),
                (lower, upper) => {
                    if let Some(l) = lower.as_ref().filter(|l| l.is_positive()) {
                        constraints.push((coeffs.clone(), Sense::Ge, l.clone()));
                    }
                    if let Some(u) = upper {
                        constraints.push((coeffs, Sense::Le, u.clone()));
                    }
                }
            }
        }
        for (coeffs, sense, b) in &mut constraints {
            if b.is_negative() {
                coeffs.iter_mut().for_each(|c| *c = -c.clone());
                *b = -b.clone();
                *sense = match *sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
            }
        }

        let nslack = constraints.iter().filter(|c| c.1 != Sense::Eq).count();
        let nart = constraints.iter().filter(|c| c.1 != Sense::Le).count();
        let ncols = nstruct + nslack + nart;
        let art_start = nstruct + nslack;

        let mut rows = Vec::with_capacity(constraints.len());
        let mut rhs = Vec::with_capacity(constraints.len());
        let mut basis = Vec::with_capacity(constraints.len());
        let (mut next_slack, mut next_art) = (nstruct, art_start);
        for (coeffs, sense, b) in constraints {
            let mut row = coeffs;
            row.resize(ncols, Rational::zero());
            match sense {
                Sense::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Sense::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Sense::Eq => {
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }

        let mut t = Tableau {
            rows,
            rhs,
            basis,
            obj: Vec::new(),
            obj_value: Rational::zero(),
            nstruct,
            enterable: ncols,
        };
        let mut cost = vec![Rational::zero(); ncols];
        cost[art_start..].iter_mut().for_each(|c| *c = Rational::one());
        t.set_cost(&cost);
        assert!(t.run(), "phase one is bounded below by zero");
        if t.obj_value.is_positive() {
            return None;
        }

        // Drive zero-valued artificials out of the basis; rows where that is
        // impossible are linearly dependent on the others and are dropped.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art_start {
                match (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for row in &mut t.rows {
            row.truncate(art_start);
        }
        t.enterable = art_start;
        Some(t)
    }

    /// Installs a cost vector (indexed by column; missing entries are zero)
    /// and prices out the current basis.
    fn set_cost(&mut self, cost: &[Rational]) {
        let ncols = self.rows.first().map_or(self.nstruct, Vec::len);
        let mut obj = vec![Rational::zero(); ncols];
        for (o, c) in obj.iter_mut().zip(cost) {
            *o = c.clone();
        }
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let Some(cb) = cost.get(b).filter(|c| !c.is_zero()) else {
                continue;
            };
            for (o, a) in obj.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *o -= cb * a;
                }
            }
            value += cb * &self.rhs[i];
        }
        self.obj = obj;
        self.obj_value = value;
    }

    /// Minimizes with Bland's rule. Returns false if unbounded.
    fn run(&mut self) -> bool {
        loop {
            let Some(enter) = (0..self.enterable).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.rows[r][e].clone();
        debug_assert!(!piv.is_zero());
        let mut pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        if !piv.is_one() {
            for &j in &nz {
                pivot_row[j] = &pivot_row[j] / &piv;
            }
            self.rhs[r] = &self.rhs[r] / &piv;
        }
        let pivot_rhs = self.rhs[r].clone();

        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][e].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }

        let f = self.obj[e].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.obj[j] -= &f * &pivot_row[j];
            }
            self.obj_value += &f * &pivot_rhs;
        }

        self.rows[r] = pivot_row;
        self.basis[r] = e;
    }

    fn solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.nstruct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.nstruct {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    // Worlds over {A, B}: index bit 0 = A, bit 1 = B.
    const A: [bool; 4] = [false, true, false, true];
    const B: [bool; 4] = [false, false, true, true];
    const A_AND_B: [bool; 4] = [false, false, false, true];
    const A_OR_B: [bool; 4] = [false, true, true, true];

    fn ab_system() -> ConstraintSystem {
        let mut cs = ConstraintSystem::normalized(4);
        cs.push_interval(A.to_vec(), &Interval::ratio((1, 2), (7, 10)));
        cs.push_interval(B.to_vec(), &Interval::ratio((3, 5), (4, 5)));
        cs
    }

    #[test]
    fn inconsistent_ranges_are_infeasible() {
        let mut cs = ConstraintSystem::normalized(4);
        cs.push_interval(A.to_vec(), &Interval::ratio((1, 1), (1, 1)));
        cs.push_interval(B.to_vec(), &Interval::ratio((1, 1), (1, 1)));
        cs.push_interval(A_OR_B.to_vec(), &Interval::ratio((0, 1), (0, 1)));
        assert!(!feasible(&cs));
        assert_eq!(minimize(&cs, &Objective::new(A.to_vec())), LpOutcome::Infeasible);
    }

    #[test]
    fn empty_row_is_infeasible() {
        let mut cs = ConstraintSystem::normalized(4);
        cs.push_interval(A.to_vec(), &Interval::Empty);
        assert!(!feasible(&cs));
    }

    #[test]
    fn normalization_only() {
        let cs = ConstraintSystem::normalized(4);
        assert!(feasible(&cs));
        let obj = Objective::new(A.to_vec());
        assert_eq!(minimize(&cs, &obj).value(), Some(&q(0, 1)));
        assert_eq!(maximize(&cs, &obj).value(), Some(&q(1, 1)));
    }

    #[test]
    fn frechet_bounds_for_conjunction() {
        let cs = ab_system();
        assert!(feasible(&cs));
        let obj = Objective::new(A_AND_B.to_vec());
        // max(0, a + b - 1) over the box is 1/2 + 3/5 - 1; min(a, b) peaks at 7/10
        assert_eq!(minimize(&cs, &obj).value(), Some(&q(1, 10)));
        assert_eq!(maximize(&cs, &obj).value(), Some(&q(7, 10)));
    }

    #[test]
    fn point_bound_forces_objective() {
        let mut cs = ConstraintSystem::normalized(4);
        cs.push_interval(A.to_vec(), &Interval::ratio((1, 1), (1, 1)));
        let obj = Objective::new(A.to_vec());
        assert_eq!(minimize(&cs, &obj).value(), Some(&q(1, 1)));
        assert_eq!(maximize(&cs, &obj).value(), Some(&q(1, 1)));
    }

    #[test]
    fn witness_is_valid() {
        let cs = ab_system();
        let LpOutcome::Optimal { value, witness } = maximize(&cs, &Objective::new(A_OR_B.to_vec())) else {
            panic!("feasible");
        };
        assert!(verify_witness(&cs, &witness));
        assert_eq!(value, q(1, 1));
    }

    #[test]
    fn redundant_equalities_are_handled() {
        let mut cs = ConstraintSystem::normalized(4);
        cs.push_interval(vec![true; 4], &Interval::ratio((1, 1), (1, 1)));
        cs.push_interval(A.to_vec(), &Interval::ratio((1, 3), (1, 3)));
        cs.push_interval(A.to_vec(), &Interval::ratio((1, 3), (1, 3)));
        let obj = Objective::new(B.to_vec());
        assert_eq!(minimize(&cs, &obj).value(), Some(&q(0, 1)));
        assert_eq!(maximize(&cs, &obj).value(), Some(&q(1, 1)));
    }
}
