//! Inputs for the criterion benchmarks.

/// `(name, source)` for every shipped fixture.
pub const FIXTURES: &[(&str, &str)] = &[
    ("ex02", include_str!("../../../fixtures/ex02.gp")),
    ("ex03", include_str!("../../../fixtures/ex03.gp")),
    ("ex05", include_str!("../../../fixtures/ex05.gp")),
    ("ex07", include_str!("../../../fixtures/ex07.gp")),
    ("ex08", include_str!("../../../fixtures/ex08.gp")),
    ("ex09", include_str!("../../../fixtures/ex09.gp")),
    ("ex11", include_str!("../../../fixtures/ex11.gp")),
    ("ex12_p1", include_str!("../../../fixtures/ex12_p1.gp")),
    ("ex12_p2", include_str!("../../../fixtures/ex12_p2.gp")),
    ("ex12_p3", include_str!("../../../fixtures/ex12_p3.gp")),
    ("ex13", include_str!("../../../fixtures/ex13.gp")),
    ("cond", include_str!("../../../fixtures/cond.gp")),
    ("bayes", include_str!("../../../fixtures/bayes.gp")),
    ("inconsistent", include_str!("../../../fixtures/inconsistent.gp")),
];

pub fn fixture(name: &str) -> &'static str {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| *src)
        .unwrap_or_else(|| panic!("no fixture {name}"))
}

/// A chain of `n` defaults, each blocked by its successor. It has `n`
/// distinct negated literals and `n` atoms.
pub fn default_chain(n: usize) -> String {
    (0..n)
        .map(|i| format!("p{i} : [0.9, 1] <- not(p{} : [0.9, 1]).\n", (i + 1) % n))
        .collect()
}

/// `n` facts about single atoms plus one conjunction over all of them,
/// so the LP has `2^n` columns.
pub fn wide_conjunction(n: usize) -> String {
    let mut src: String = (0..n)
        .map(|i| format!("a{i} : [0.{}, 1].\n", 5 + i % 5))
        .collect();
    let atoms: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    src.push_str(&format!("({}) : [0, 1] <- a0 : [0.5, 1].\n", atoms.join(" ^ ")));
    src
}
