//! Seeded random inputs. Values are drawn from a coarse grid of rationals so
//! that bounds from different clauses collide often enough to exercise
//! blocking, containment and infeasibility.

use gpdb_core::fixpoint::FormulaFunction;
use gpdb_core::ground::{Base, GroundProgram};
use gpdb_core::worlds::{coefficients, ConstraintSystem};
use gpdb_core::{eval_annotation, Atom, BasicFormula, Binding, Interval, Rational};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

const DENOMINATORS: [i64; 4] = [2, 4, 5, 10];

/// A grid value in `[0, 1]`.
pub fn grid_value<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let d = *DENOMINATORS.choose(rng).unwrap();
    Rational::new(rng.gen_range(0..=d).into(), d.into())
}

/// A non-empty interval; unit and point intervals are over-represented.
pub fn random_interval<R: Rng + ?Sized>(rng: &mut R) -> Interval {
    match rng.gen_range(0..6) {
        0 => Interval::unit(),
        1 => Interval::point(grid_value(rng)),
        _ => {
            let (a, b) = (grid_value(rng), grid_value(rng));
            if a <= b {
                Interval::new(a, b)
            } else {
                Interval::new(b, a)
            }
        }
    }
}

/// A sub-interval of `v`, occasionally empty.
pub fn shrink_interval<R: Rng + ?Sized>(rng: &mut R, v: &Interval) -> Interval {
    let Interval::Closed { lo, hi } = v else {
        return Interval::Empty;
    };
    match rng.gen_range(0..8) {
        0 => Interval::Empty,
        1 | 2 => v.clone(),
        _ => {
            let quarter = || Rational::new(1.into(), 4.into());
            let width = hi - lo;
            let new_lo = lo + &width * quarter() * Rational::from_integer(rng.gen_range(0..=2).into());
            let new_hi = hi - (hi - &new_lo) * quarter() * Rational::from_integer(rng.gen_range(0..=2).into());
            Interval::new(new_lo, new_hi)
        }
    }
}

/// Propositional atoms `p0 .. p{n-1}`.
pub fn atoms(n: usize) -> Vec<Atom> {
    (0..n).map(|i| Atom::new(format!("p{i}"), vec![])).collect()
}

/// A basic formula over one to three of `atoms`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, atoms: &[Atom]) -> BasicFormula {
    let k = match rng.gen_range(0..6) {
        0..=2 => 1,
        3 | 4 => 2,
        _ => 3,
    }
    .min(atoms.len());
    let chosen: Vec<Atom> = atoms.choose_multiple(rng, k).cloned().collect();
    if rng.gen_bool(0.5) {
        BasicFormula::conj(chosen)
    } else {
        BasicFormula::disj(chosen)
    }
}

/// A random constraint system over the worlds of `natoms` atoms, with the
/// coefficient vectors of a few objective formulas.
pub struct RandomSystem {
    pub base: Base,
    pub system: ConstraintSystem,
    pub objectives: Vec<Vec<bool>>,
}

pub fn random_system<R: Rng + ?Sized>(rng: &mut R, natoms: usize) -> RandomSystem {
    let atoms = atoms(natoms);
    let base = Base::new(atoms.clone());
    let mut system = ConstraintSystem::normalized(1 << natoms);
    for _ in 0..rng.gen_range(0..=3) {
        let f = random_formula(rng, &atoms);
        system.push_interval(coefficients(&base, &f).unwrap(), &random_interval(rng));
    }
    let objectives = (0..3)
        .map(|_| coefficients(&base, &random_formula(rng, &atoms)).unwrap())
        .collect();
    RandomSystem {
        base,
        system,
        objectives,
    }
}

/// Size parameters for [`random_program`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub atoms: usize,
    pub clauses: usize,
    /// Whether clauses may carry negated literals.
    pub negation: bool,
}

fn text(v: &Rational) -> String {
    if v.is_zero() || v.is_one() {
        v.to_integer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

fn constant(i: &Interval) -> String {
    match i {
        Interval::Closed { lo, hi } => format!("[{}, {}]", text(lo), text(hi)),
        Interval::Empty => unreachable!("generators never annotate with the empty interval"),
    }
}

fn formula_text(f: &BasicFormula) -> String {
    if f.atoms().len() == 1 {
        f.to_string()
    } else {
        format!("({f})")
    }
}

/// Source text of a random propositional program. Heads are either constant
/// annotations or monotone functions of the first body literal's bounds, so
/// negation-free output always yields a monotone operator. With negation a
/// pair of mutually defeating clauses is sometimes appended.
pub fn random_program<R: Rng + ?Sized>(rng: &mut R, shape: Shape) -> String {
    let atoms = atoms(shape.atoms);
    // a small pool so that literals and negation keys recur
    let pool: Vec<BasicFormula> = (0..shape.atoms + 2)
        .map(|_| random_formula(rng, &atoms))
        .collect();
    let neg_bounds: Vec<Interval> = (0..3)
        .map(|_| match rng.gen_range(0..3) {
            0 => Interval::point(Rational::one()),
            _ => random_interval(rng),
        })
        .collect();

    // constant head claims, drawn up front so negated literals can contest them
    let claims: Vec<(BasicFormula, Interval)> = (0..shape.clauses)
        .map(|_| (pool.choose(rng).unwrap().clone(), random_interval(rng)))
        .collect();

    let mut out = String::new();
    for (head, claim) in &claims {
        let npos = rng.gen_range(0..=2);
        let nneg = if shape.negation { rng.gen_range(0..=2) } else { 0 };
        let mut body: Vec<String> = Vec::new();
        let head_ann = if npos > 0 && rng.gen_bool(0.35) {
            let first = pool.choose(rng).unwrap();
            let c = grid_value(rng);
            if rng.gen_bool(0.5) {
                body.push(format!("{} : [V1, V1]", formula_text(first)));
                format!("[mul({}, V1), V1]", text(&c))
            } else {
                body.push(format!("{} : [V1, V2]", formula_text(first)));
                format!("[mul({}, V1), max(V2, {})]", text(&c), text(&grid_value(rng)))
            }
        } else {
            constant(claim)
        };
        while body.len() < npos {
            let f = pool.choose(rng).unwrap();
            body.push(format!("{} : {}", formula_text(f), constant(&random_interval(rng))));
        }
        for _ in 0..nneg {
            let (f, b) = if rng.gen_bool(0.5) {
                claims.choose(rng).unwrap().clone()
            } else {
                (pool.choose(rng).unwrap().clone(), neg_bounds.choose(rng).unwrap().clone())
            };
            body.push(format!("not({} : {})", formula_text(&f), constant(&b)));
        }
        out.push_str(&formula_text(head));
        out.push_str(" : ");
        out.push_str(&head_ann);
        if !body.is_empty() {
            out.push_str(" <- ");
            out.push_str(&body.join(" & "));
        }
        out.push_str(".\n");
    }
    if shape.negation && shape.atoms > 1 && rng.gen_bool(0.3) {
        // two defaults defeating each other
        let (a, i) = claims.choose(rng).unwrap().clone();
        let (b, j) = (pool.choose(rng).unwrap().clone(), random_interval(rng));
        for ((f, x), (g, y)) in [((&a, &i), (&b, &j)), ((&b, &j), (&a, &i))] {
            out.push_str(&format!(
                "{} : {} <- not({} : {}).\n",
                formula_text(f),
                constant(x),
                formula_text(g),
                constant(y)
            ));
        }
    }
    out
}

/// Source text of a random negation-free program with object variables,
/// for grounding checks. Predicates `r0 .. r2` have arities 0, 1 and 2 and
/// the constants are `c0 .. c{nconst-1}`, each stated in an `r1` fact so the
/// Herbrand universe is exactly those constants.
pub fn random_datalog<R: Rng + ?Sized>(rng: &mut R, nconst: usize, nclauses: usize) -> String {
    let constants: Vec<String> = (0..nconst).map(|i| format!("c{i}")).collect();
    let arity = [0usize, 1, 2];
    let mut out = String::new();
    for c in &constants {
        out.push_str(&format!("r1({c}) : [1, 1].\n"));
    }
    for _ in 0..nclauses {
        let mut body_vars: Vec<&str> = Vec::new();
        let mut body = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            let pred = rng.gen_range(0..3);
            let args: Vec<String> = (0..arity[pred])
                .map(|_| {
                    if rng.gen_bool(0.7) {
                        let v = *["X", "Y", "Z"].choose(rng).unwrap();
                        body_vars.push(v);
                        v.to_string()
                    } else {
                        constants.choose(rng).unwrap().clone()
                    }
                })
                .collect();
            body.push(format!("{} : [1, 1]", render_atom(pred, &args)));
        }
        let pred = rng.gen_range(0..3);
        let head_args: Vec<String> = (0..arity[pred])
            .map(|_| match body_vars.choose(rng) {
                Some(v) if rng.gen_bool(0.8) => v.to_string(),
                _ => constants.choose(rng).unwrap().clone(),
            })
            .collect();
        out.push_str(&format!(
            "{} : [1/2, 1] <- {}.\n",
            render_atom(pred, &head_args),
            body.join(" & ")
        ));
    }
    out
}

fn render_atom(pred: usize, args: &[String]) -> String {
    if args.is_empty() {
        format!("r{pred}")
    } else {
        format!("r{pred}({})", args.join(", "))
    }
}

/// A random formula function over `domain`.
pub fn random_function<R: Rng + ?Sized>(rng: &mut R, domain: &[BasicFormula]) -> FormulaFunction {
    domain
        .iter()
        .map(|f| (f.clone(), random_interval(rng)))
        .collect()
}

/// A function `h2` with `h <= h2`: every value is a sub-interval of `h`'s.
pub fn shrink<R: Rng + ?Sized>(rng: &mut R, h: &FormulaFunction) -> FormulaFunction {
    h.iter()
        .map(|(f, v)| (f.clone(), shrink_interval(rng, v)))
        .collect()
}

/// The constant-annotated body literals of `g`, positive and negated, as
/// `(formula, bound)` pairs.
pub fn body_bounds(g: &GroundProgram) -> Vec<(BasicFormula, Interval)> {
    let mut out: Vec<(BasicFormula, Interval)> = g
        .clauses()
        .iter()
        .flat_map(|c| c.positives.iter().chain(&c.negatives))
        .filter(|lit| lit.annotation.is_c_annotation())
        .map(|lit| {
            let bound = eval_annotation(&lit.annotation, &Binding::new()).expect("constant annotation");
            (lit.formula.clone(), bound)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Like [`shrink`], but also intersects some values with bounds from
/// `targets`, so that body literals and negated literals change status
/// between `h` and the result.
pub fn shrink_toward<R: Rng + ?Sized>(
    rng: &mut R,
    h: &FormulaFunction,
    targets: &[(BasicFormula, Interval)],
) -> FormulaFunction {
    let mut out = shrink(rng, h);
    for (f, bound) in targets {
        if rng.gen_bool(0.5) {
            if let Some(v) = out.value(f) {
                let narrowed = v.intersect(bound);
                out = out
                    .iter()
                    .map(|(g, w)| (g.clone(), if g == f { narrowed.clone() } else { w.clone() }))
                    .collect();
            }
        }
    }
    out
}
