use std::collections::BTreeSet;

use gpdb_core::interval::apply;
use gpdb_core::lp::{self, FeasibleRegion, LpOutcome, Objective};
use gpdb_core::syntax::AnnotationFn;
use gpdb_core::worlds::{coefficients, Row};
use gpdb_core::*;
use gpdb_testkit::{fixture, fixture_names, gen, oracle};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn ground(src: &str) -> GroundProgram {
    ground_program(&parse_program(src).expect("generated program parses"), &Limits::default())
        .expect("generated program grounds")
}

fn pf_program(seed: u64) -> GroundProgram {
    let mut rng = StdRng::seed_from_u64(seed);
    let shape = gen::Shape {
        atoms: rng.gen_range(1..=6),
        clauses: rng.gen_range(1..=6),
        negation: false,
    };
    ground(&gen::random_program(&mut rng, shape))
}

fn gp_program(seed: u64) -> GroundProgram {
    let mut rng = StdRng::seed_from_u64(seed);
    let shape = gen::Shape {
        atoms: rng.gen_range(1..=4),
        clauses: rng.gen_range(1..=5),
        negation: true,
    };
    ground(&gen::random_program(&mut rng, shape))
}


/// Every basic formula over the base: each non-empty atom set, both connectives.
fn all_formulas(base: &Base) -> Vec<BasicFormula> {
    let atoms = base.atoms();
    let mut out = BTreeSet::new();
    for mask in 1u32..1 << atoms.len() {
        let chosen: Vec<Atom> = (0..atoms.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| atoms[i].clone())
            .collect();
        out.insert(BasicFormula::conj(chosen.clone()));
        out.insert(BasicFormula::disj(chosen));
    }
    out.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tp_is_monotone_on_pf_programs(seed in any::<u64>()) {
        let g = pf_program(seed);
        let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
        let engine = Engine::default();
        let h1 = gen::random_function(&mut rng, g.tracked());
        let h2 = gen::shrink_toward(&mut rng, &h1, &gen::body_bounds(&g));
        prop_assert!(h1.leq(&h2).unwrap());
        let t1 = engine.tp_step(&g, &h1, false).unwrap();
        let t2 = engine.tp_step(&g, &h2, false).unwrap();
        prop_assert!(t1.leq(&t2).unwrap(), "{t1} vs {t2}");
    }

    #[test]
    fn tp_tightens_sp(seed in any::<u64>()) {
        let g = gp_program(seed);
        let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
        let h = gen::random_function(&mut rng, g.tracked());
        let s = sp_step(&g, &h, true).unwrap();
        let t = Engine::default().tp_step(&g, &h, true).unwrap();
        for f in g.tracked() {
            prop_assert!(t.get(f).is_subset(&s.get(f)));
        }
    }

    #[test]
    fn lfp_is_a_fixpoint(seed in any::<u64>()) {
        let g = pf_program(seed);
        let engine = Engine::default();
        let fix = engine.lfp(&g).unwrap();
        prop_assert_eq!(engine.tp_step(&g, &fix.function, false).unwrap(), fix.function);
    }

    #[test]
    fn restriction_to_tracked_formulas_is_sound(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let shape = gen::Shape {
            atoms: rng.gen_range(1..=3),
            clauses: rng.gen_range(1..=4),
            negation: false,
        };
        let g = ground(&gen::random_program(&mut rng, shape));
        let full = g.with_tracked(&all_formulas(g.base())).unwrap();
        let engine = Engine::default();
        let small = engine.lfp(&g).unwrap().function;
        let large = engine.lfp(&full).unwrap().function;
        for f in g.tracked() {
            prop_assert_eq!(small.get(f), large.get(f), "{}", f);
        }
    }

    #[test]
    fn lp_matches_vertex_oracle(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let natoms = rng.gen_range(1..=3);
        let sys = gen::random_system(&mut rng, natoms);
        for obj in &sys.objectives {
            let expected = oracle::optima(&sys.system, obj);
            let objective = Objective::new(obj.clone());
            let lo = lp::minimize(&sys.system, &objective);
            let hi = lp::maximize(&sys.system, &objective);
            match expected {
                None => {
                    prop_assert_eq!(lo, LpOutcome::Infeasible);
                    prop_assert_eq!(hi, LpOutcome::Infeasible);
                }
                Some((min, max)) => {
                    for outcome in [&lo, &hi] {
                        let LpOutcome::Optimal { value, witness } = outcome else {
                            return Err(TestCaseError::fail("feasible system reported infeasible"));
                        };
                        prop_assert!(lp::verify_witness(&sys.system, witness));
                        prop_assert_eq!(&objective.evaluate(witness), value);
                    }
                    prop_assert_eq!(lo.value(), Some(&min));
                    prop_assert_eq!(hi.value(), Some(&max));
                    prop_assert!(min <= max);
                }
            }
        }
    }

    #[test]
    fn derived_bounds_do_not_cut_the_polytope(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let natoms = rng.gen_range(1..=3);
        let sys = gen::random_system(&mut rng, natoms);
        let Some(region) = FeasibleRegion::new(&sys.system) else { return Ok(()) };
        let first = Objective::new(sys.objectives[0].clone());
        let mut tightened = sys.system.clone();
        tightened.push(Row {
            coeffs: sys.objectives[0].clone(),
            lower: region.minimize(&first).value().cloned(),
            upper: region.maximize(&first).value().cloned(),
        });
        let tight = FeasibleRegion::new(&tightened).expect("still feasible");
        for obj in &sys.objectives[1..] {
            let obj = Objective::new(obj.clone());
            prop_assert_eq!(region.minimize(&obj).value().cloned(), tight.minimize(&obj).value().cloned());
            prop_assert_eq!(region.maximize(&obj).value().cloned(), tight.maximize(&obj).value().cloned());
        }
    }

    #[test]
    fn sfp_is_anti_monotone(seed in any::<u64>()) {
        let g = gp_program(seed);
        let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
        let engine = Engine::default();
        let h1 = gen::random_function(&mut rng, g.tracked());
        let h2 = gen::shrink_toward(&mut rng, &h1, &gen::body_bounds(&g));
        let s1 = engine.sfp(&g, &h1).unwrap();
        let s2 = engine.sfp(&g, &h2).unwrap();
        prop_assert!(s2.leq(&s1).unwrap(), "{s2} vs {s1}");
    }

    #[test]
    fn alternating_class_is_a_stable_class(seed in any::<u64>()) {
        let g = gp_program(seed);
        let engine = Engine::default();
        let class = engine.alternating_class(&g).unwrap();
        prop_assert!(!class.is_empty());
        prop_assert!(engine.is_stable_class(&g, class.members()).unwrap());
    }

    #[test]
    fn stable_functions_are_singleton_classes(seed in any::<u64>()) {
        let g = gp_program(seed);
        prop_assume!(negation_keys(&g).unwrap().len() <= 8);
        let engine = Engine::default();
        let stable = engine.enumerate_stable_functions(&g).unwrap();
        let classes = engine.minimal_stable_classes(&g).unwrap();
        let singletons: Vec<&FormulaFunction> = classes
            .iter()
            .filter(|c| c.len() == 1)
            .map(|c| &c.members()[0])
            .collect();
        prop_assert_eq!(stable.len(), singletons.len());
        for h in &stable {
            prop_assert!(singletons.contains(&h));
            prop_assert!(engine.is_fixpoint(&g, h).unwrap());
            prop_assert!(engine.is_stable(&g, h).unwrap());
        }
        for c in &classes {
            prop_assert!(engine.is_stable_class(&g, c.members()).unwrap());
        }
    }

    #[test]
    fn class_orders_are_preorders(seed in any::<u64>()) {
        let g = gp_program(seed);
        let classes = Engine::default().minimal_stable_classes(&g).unwrap();
        for a in &classes {
            prop_assert!(smyth_leq(a, a) && hoare_leq(a, a));
            for b in &classes {
                for c in &classes {
                    if smyth_leq(a, b) && smyth_leq(b, c) {
                        prop_assert!(smyth_leq(a, c));
                    }
                    if hoare_leq(a, b) && hoare_leq(b, c) {
                        prop_assert!(hoare_leq(a, c));
                    }
                }
            }
        }
        prop_assert!(!hoare_minimal(&classes).is_empty() || classes.is_empty());
        prop_assert!(!smyth_minimal(&classes).is_empty() || classes.is_empty());
    }

    #[test]
    fn canonical_form_ignores_order(seed in any::<u64>(), disj in any::<bool>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let atoms = gen::atoms(5);
        let mut chosen: Vec<Atom> = (0..rng.gen_range(1..6)).map(|_| atoms[rng.gen_range(0..5)].clone()).collect();
        let make = |a: Vec<Atom>| if disj { BasicFormula::disj(a) } else { BasicFormula::conj(a) };
        let f = make(chosen.clone());
        rand::seq::SliceRandom::shuffle(chosen.as_mut_slice(), &mut rng);
        let g = make(chosen);
        prop_assert_eq!(canonicalize(&f), canonicalize(&g));
        prop_assert_eq!(canonicalize(&canonicalize(&f)), canonicalize(&f));
    }

    #[test]
    fn random_programs_round_trip(seed in any::<u64>(), negation in any::<bool>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let shape = gen::Shape { atoms: 4, clauses: 6, negation };
        let p = parse_program(&gen::random_program(&mut rng, shape)).unwrap();
        prop_assert_eq!(parse_program(&print_program(&p)).unwrap(), p.clone());
        prop_assert_eq!(p.is_pf(), p.clauses.iter().all(|c| c.negatives.is_empty()));
    }

    #[test]
    fn grounding_is_substitution_complete(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let nconst = rng.gen_range(1..=3);
        let p = parse_program(&gen::random_datalog(&mut rng, nconst, 4)).unwrap();
        let g = ground_program(&p, &Limits { max_atoms: 24, ..Limits::default() }).unwrap();
        let expected: usize = p
            .clauses
            .iter()
            .map(|c| nconst.pow(c.object_variables().len() as u32))
            .sum();
        prop_assert_eq!(g.clauses().len(), expected);
        prop_assert!(g.clauses().iter().all(|c| c.formulas().all(|f| f.is_ground())));
        let tracked: BTreeSet<&BasicFormula> = g.tracked().iter().collect();
        prop_assert!(g.clauses().iter().all(|c| c.formulas().all(|f| tracked.contains(f))));
    }

    #[test]
    fn interval_lattice_laws(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = gen::random_interval(&mut rng);
        let wide = gen::random_interval(&mut rng);
        let b = gen::shrink_interval(&mut rng, &wide);
        let c = gen::random_interval(&mut rng);
        prop_assert_eq!(a.intersect(&b), b.intersect(&a));
        prop_assert_eq!(a.intersect(&b).intersect(&c), a.intersect(&b.intersect(&c)));
        prop_assert_eq!(a.intersect(&a), a.clone());
        prop_assert_eq!(a.intersect(&Interval::unit()), a.clone());
        prop_assert!(Interval::Empty.is_subset(&a));
        prop_assert!(a.intersect(&b).is_subset(&a) && a.intersect(&b).is_subset(&b));
        prop_assert_eq!(a.is_subset(&b), a.intersect(&b) == a);
    }

    #[test]
    fn annotation_functions_stay_in_unit_interval(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let x = gen::grid_value(&mut rng);
        let y = gen::grid_value(&mut rng);
        for func in [AnnotationFn::Mul, AnnotationFn::Div, AnnotationFn::Add, AnnotationFn::Sub, AnnotationFn::Min, AnnotationFn::Max] {
            let v = apply(func, vec![x.clone(), y.clone()]);
            prop_assert!(v >= Rational::from_integer(0.into()) && v <= Rational::from_integer(1.into()), "{:?}", func);
        }
    }
}

#[test]
fn fixtures_round_trip() {
    let names = fixture_names();
    assert_eq!(names.len(), 14);
    for name in names {
        let p = parse_program(&fixture(&name)).unwrap();
        let printed = print_program(&p);
        assert_eq!(parse_program(&printed).unwrap(), p, "{name}");
        assert_eq!(printed.lines().count(), p.len(), "{name}");
    }
}

#[test]
fn coefficient_vectors_match_world_count() {
    let base = Base::new(gen::atoms(3));
    for f in all_formulas(&base) {
        let c = coefficients(&base, &f).unwrap();
        assert_eq!(c.len(), 8);
        let marked = c.iter().filter(|b| **b).count();
        let k = f.atoms().len() as u32;
        match f.connective() {
            Connective::Conj => assert_eq!(marked, 1 << (3 - k)),
            Connective::Disj => assert_eq!(marked, 8 - (1 << (3 - k))),
        }
    }
}
