//! Brute-force vertex enumeration for `min/max c.p` over a constraint system.
//!
//! A vertex of `{p >= 0, sum p = 1, lower_i <= a_i.p <= upper_i}` is fixed by
//! a support `S` (the nonzero coordinates) and `|S| - 1` tight bounds which,
//! together with normalization, have a unique solution on `S`. Degenerate
//! vertices have more tight bounds than needed but some square subset still
//! pins them down, so enumerating square choices finds every vertex. The
//! feasible set is bounded, so when it is non-empty the optimum sits on one.

use gpdb_core::worlds::ConstraintSystem;
use gpdb_core::Rational;
use num_traits::{One, Zero};

/// Exact `(min, max)` of the objective, or `None` when the system is
/// infeasible. Exponential; meant for at most 8 worlds and a handful of rows.
pub fn optima(cs: &ConstraintSystem, objective: &[bool]) -> Option<(Rational, Rational)> {
    let mut best: Option<(Rational, Rational)> = None;
    for p in vertices(cs) {
        let value: Rational = p
            .iter()
            .zip(objective)
            .filter(|(_, c)| **c)
            .map(|(x, _)| x.clone())
            .sum();
        best = Some(match best {
            None => (value.clone(), value),
            Some((lo, hi)) => (lo.min(value.clone()), hi.max(value)),
        });
    }
    best
}

/// Every feasible basic solution (with repetitions).
pub fn vertices(cs: &ConstraintSystem) -> Vec<Vec<Rational>> {
    let n = cs.nvars();
    assert!(n <= 16, "oracle is exponential in the number of worlds");
    // candidate tight hyperplanes, normalization row excluded
    let mut planes: Vec<(&[bool], &Rational)> = Vec::new();
    for row in &cs.rows()[1..] {
        if let Some(l) = &row.lower {
            planes.push((&row.coeffs, l));
        }
        if let Some(u) = &row.upper {
            if row.lower.as_ref() != Some(u) {
                planes.push((&row.coeffs, u));
            }
        }
    }

    let mut found = Vec::new();
    for support in 1u32..1 << n {
        let cols: Vec<usize> = (0..n).filter(|j| support >> j & 1 == 1).collect();
        let need = cols.len() - 1;
        if need > planes.len() {
            continue;
        }
        for chosen in subsets(planes.len(), need) {
            let mut a: Vec<Vec<Rational>> = vec![vec![Rational::one(); cols.len()]];
            let mut b: Vec<Rational> = vec![Rational::one()];
            for &k in &chosen {
                let (coeffs, rhs) = planes[k];
                a.push(cols.iter().map(|&j| indicator(coeffs[j])).collect());
                b.push(rhs.clone());
            }
            let Some(x) = solve_square(a, b) else { continue };
            if x.iter().any(|v| *v < Rational::zero()) {
                continue;
            }
            let mut p = vec![Rational::zero(); n];
            for (&j, v) in cols.iter().zip(x) {
                p[j] = v;
            }
            if satisfies(cs, &p) {
                found.push(p);
            }
        }
    }
    found
}

fn indicator(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

fn satisfies(cs: &ConstraintSystem, p: &[Rational]) -> bool {
    cs.rows().iter().all(|row| {
        let s: Rational = p
            .iter()
            .zip(&row.coeffs)
            .filter(|(_, c)| **c)
            .map(|(x, _)| x.clone())
            .sum();
        row.lower.as_ref().is_none_or(|l| *l <= s) && row.upper.as_ref().is_none_or(|u| s <= *u)
    })
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Gauss-Jordan elimination; `None` if the matrix is singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        b[col] *= &inv;
        let pivot_row = a[col].clone();
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &factor * p;
                }
                let d = &factor * &b[col];
                b[r] -= d;
            }
        }
    }
    Some(b)
}
