//! Possible worlds over the Herbrand base and the linear constraint system
//! a formula function induces on world probabilities.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fixpoint::FormulaFunction;
use crate::ground::Base;
use crate::interval::Interval;
use crate::syntax::{BasicFormula, Connective};
use crate::Rational;

/// Hard ceiling on the base size, independent of configured budgets.
pub const MAX_WORLD_BITS: usize = 24;

/// A subset of the base: bit `i` set iff atom `i` is true.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World {
    bits: u32,
    width: u8,
}

impl World {
    pub fn new(bits: u32, width: usize) -> Self {
        debug_assert!(width <= MAX_WORLD_BITS && bits >> width == 0);
        World {
            bits,
            width: width as u8,
        }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn index(self) -> usize {
        self.bits as usize
    }

    pub fn contains(self, atom: usize) -> bool {
        self.bits >> atom & 1 == 1
    }

    pub fn satisfies(self, f: &CompiledFormula) -> bool {
        match f.connective {
            Connective::Conj => self.bits & f.mask == f.mask,
            Connective::Disj => self.bits & f.mask != 0,
        }
    }
}

/// A basic formula resolved against a base: its atoms as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompiledFormula {
    connective: Connective,
    mask: u32,
}

impl CompiledFormula {
    pub fn new(base: &Base, f: &BasicFormula) -> Result<Self> {
        base.contains_formula(f)?;
        let mask = f
            .atoms()
            .iter()
            .map(|a| 1u32 << base.position(a).expect("checked above"))
            .fold(0, |m, b| m | b);
        Ok(CompiledFormula {
            connective: f.connective(),
            mask,
        })
    }
}

/// All `2^base_size` worlds in ascending bit order.
pub fn enumerate_worlds(
    base_size: usize,
    max_atoms: usize,
) -> Result<impl Iterator<Item = World>> {
    if base_size > max_atoms.min(MAX_WORLD_BITS) {
        return Err(Error::AtomBudget {
            size: base_size as u128,
            limit: max_atoms.min(MAX_WORLD_BITS),
        });
    }
    Ok((0u32..1 << base_size).map(move |bits| World::new(bits, base_size)))
}

/// Classical satisfaction of a ground basic formula by a world.
pub fn satisfies(base: &Base, w: World, f: &BasicFormula) -> Result<bool> {
    Ok(w.satisfies(&CompiledFormula::new(base, f)?))
}

/// The worlds satisfying `f`, as a 0/1 coefficient vector.
pub fn coefficients(base: &Base, f: &BasicFormula) -> Result<Vec<bool>> {
    let compiled = CompiledFormula::new(base, f)?;
    Ok((0u32..1 << base.len())
        .map(|bits| World::new(bits, base.len()).satisfies(&compiled))
        .collect())
}

/// `lower <= sum of p_j over marked worlds <= upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<bool>,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

/// LC(h): rows over the world probabilities `p_j >= 0`. Row 0 is always the
/// normalization row `sum p_j = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    nvars: usize,
    rows: Vec<Row>,
}

impl ConstraintSystem {
    /// A system holding only the normalization row.
    pub fn normalized(nvars: usize) -> Self {
        ConstraintSystem {
            nvars,
            rows: vec![Row {
                coeffs: vec![true; nvars],
                lower: Some(Rational::one()),
                upper: Some(Rational::one()),
            }],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn push(&mut self, row: Row) {
        assert_eq!(row.coeffs.len(), self.nvars, "row width must match nvars");
        self.rows.push(row);
    }

    /// Adds `lower <= coeffs . p <= upper` for an interval; the empty
    /// interval becomes the contradictory row `1 <= . <= 0`.
    pub fn push_interval(&mut self, coeffs: Vec<bool>, value: &Interval) {
        let (lower, upper) = match value {
            Interval::Empty => (Rational::one(), Rational::zero()),
            Interval::Closed { lo, hi } => (lo.clone(), hi.clone()),
        };
        self.push(Row {
            coeffs,
            lower: Some(lower),
            upper: Some(upper),
        });
    }
}

/// Builds LC(h) over the worlds of `base`. Formulas valued `[0, 1]` add no row.
pub fn build_constraints(base: &Base, h: &FormulaFunction) -> Result<ConstraintSystem> {
    let mut cs = ConstraintSystem::normalized(1 << base.len());
    for (f, value) in h.iter() {
        if value.is_unit() {
            continue;
        }
        cs.push_interval(coefficients(base, f)?, value);
    }
    Ok(cs)
}
