//! Fourier–Motzkin elimination of lift variables with LP redundancy pruning.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::{Halfspace, LiftedPolyhedron, Projection};
use crate::lp::{self, Constraint, LinearProgram, LpOutcome, Relation};
use crate::rational::{normalize_leading, Rational};

/// A row `coeffs . z >= rhs`.
#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<Rational>,
    rhs: Rational,
}

impl Row {
    fn normalize(mut self) -> Option<Row> {
        let lead = normalize_leading(&mut self.coeffs)?;
        self.rhs /= lead;
        Some(self)
    }
}

pub(super) fn project(p: &LiftedPolyhedron) -> Projection {
    if p.is_empty() {
        return Projection::Empty;
    }
    let k = p.main_dim();
    let mut halfspaces = Vec::new();
    // The shadow of a product is the product of the shadows.
    for vars in blocks(p) {
        let rows: Vec<Constraint> = p
            .rows()
            .iter()
            .filter(|r| vars.iter().any(|&v| !r.coeffs[v].is_zero()))
            .map(|r| {
                let coeffs = vars.iter().map(|&v| r.coeffs[v].clone()).collect();
                Constraint::new(coeffs, r.relation, r.rhs.clone())
            })
            .collect();
        let main: Vec<usize> = vars.iter().copied().filter(|&v| v < k).collect();
        for (normal, offset) in eliminate_lifts(rows, main.len(), vars.len()) {
            let mut full = vec![Rational::zero(); k];
            for (&v, a) in main.iter().zip(normal) {
                full[v] = a;
            }
            halfspaces.push(Halfspace { normal: full, offset });
        }
    }
    halfspaces.sort();
    Projection::Halfspaces(halfspaces)
}

/// Groups of variables linked by shared rows, each sorted ascending.
fn blocks(p: &LiftedPolyhedron) -> Vec<Vec<usize>> {
    let width = p.width();
    let mut parent: Vec<usize> = (0..width).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for r in p.rows() {
        let mut vars = (0..width).filter(|&v| !r.coeffs[v].is_zero());
        if let Some(first) = vars.next() {
            let root = find(&mut parent, first);
            for v in vars {
                let other = find(&mut parent, v);
                parent[other] = root;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..width {
        let root = find(&mut parent, v);
        groups.entry(root).or_default().push(v);
    }
    let used = |v: usize| p.rows().iter().any(|r| !r.coeffs[v].is_zero());
    groups
        .into_values()
        .filter(|g| g.iter().copied().any(used))
        .collect()
}

/// Project a nonempty system over `width` variables, the first `k` of
/// which are kept.
fn eliminate_lifts(constraints: Vec<Constraint>, k: usize, width: usize) -> Vec<(Vec<Rational>, Rational)> {
    let mut eqs: Vec<Row> = Vec::new();
    let mut ineqs: Vec<Row> = Vec::new();
    for c in constraints {
        let row = Row {
            coeffs: c.coeffs,
            rhs: c.rhs,
        };
        match c.relation {
            Relation::Ge => ineqs.push(row),
            Relation::Le => ineqs.push(negate(row)),
            Relation::Eq => eqs.push(row),
        }
    }

    // Equalities remove lift variables by substitution.
    for var in k..width {
        let Some(pos) = eqs.iter().position(|r| !r.coeffs[var].is_zero()) else {
            continue;
        };
        let pivot = eqs.swap_remove(pos);
        for row in eqs.iter_mut().chain(ineqs.iter_mut()) {
            substitute(row, &pivot, var);
        }
    }
    for eq in eqs {
        debug_assert!(eq.coeffs[k..].iter().all(Zero::is_zero));
        ineqs.push(negate(eq.clone()));
        ineqs.push(eq);
    }
    let mut rows = tidy(ineqs);
    let mut remaining: Vec<usize> = (k..width)
        .filter(|&v| rows.iter().any(|r| !r.coeffs[v].is_zero()))
        .collect();
    rows = prune(rows, width);

    while !remaining.is_empty() {
        // Cheapest variable first: fewest generated pairs.
        let (slot, var) = remaining
            .iter()
            .enumerate()
            .map(|(slot, &v)| {
                let pos = rows.iter().filter(|r| r.coeffs[v].is_positive()).count();
                let neg = rows.iter().filter(|r| r.coeffs[v].is_negative()).count();
                (pos * neg, slot, v)
            })
            .min()
            .map(|(_, slot, v)| (slot, v))
            .expect("remaining is nonempty");
        remaining.remove(slot);
        rows = prune(tidy(eliminate(&rows, var)), width);
        remaining.retain(|&v| rows.iter().any(|r| !r.coeffs[v].is_zero()));
    }

    rows.into_iter()
        .map(|mut r| {
            r.coeffs.truncate(k);
            (r.coeffs, r.rhs)
        })
        .collect()
}

fn negate(row: Row) -> Row {
    Row {
        coeffs: row.coeffs.iter().map(|a| -a).collect(),
        rhs: -row.rhs,
    }
}

/// Eliminate `var` from `row` using the equality `pivot`.
fn substitute(row: &mut Row, pivot: &Row, var: usize) {
    if row.coeffs[var].is_zero() {
        return;
    }
    let f = &row.coeffs[var] / &pivot.coeffs[var];
    for (a, b) in row.coeffs.iter_mut().zip(&pivot.coeffs) {
        if !b.is_zero() {
            *a -= &f * b;
        }
    }
    row.rhs -= &f * &pivot.rhs;
}

fn eliminate(rows: &[Row], var: usize) -> Vec<Row> {
    let mut out = Vec::new();
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for r in rows {
        let a = &r.coeffs[var];
        if a.is_positive() {
            pos.push(r);
        } else if a.is_negative() {
            neg.push(r);
        } else {
            out.push(r.clone());
        }
    }
    for p in &pos {
        for q in &neg {
            let wp = -&q.coeffs[var];
            let wq = p.coeffs[var].clone();
            let coeffs: Vec<Rational> = p
                .coeffs
                .iter()
                .zip(&q.coeffs)
                .map(|(a, b)| &wp * a + &wq * b)
                .collect();
            let rhs = &wp * &p.rhs + &wq * &q.rhs;
            out.push(Row { coeffs, rhs });
        }
    }
    out
}

/// Normalize, drop trivially true rows, and keep the tightest of parallel
/// duplicates.
fn tidy(rows: Vec<Row>) -> Vec<Row> {
    let mut best: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
    for row in rows {
        // A zero row reads 0 >= rhs, which holds since the set is nonempty.
        let Some(row) = row.normalize() else {
            continue;
        };
        best.entry(row.coeffs)
            .and_modify(|b| {
                if row.rhs > *b {
                    *b = row.rhs.clone();
                }
            })
            .or_insert(row.rhs);
    }
    best.into_iter()
        .map(|(coeffs, rhs)| Row { coeffs, rhs })
        .collect()
}

/// Drop rows implied by the others, one at a time in a fixed order.
fn prune(mut rows: Vec<Row>, width: usize) -> Vec<Row> {
    let mut i = 0;
    while i < rows.len() {
        let lp = LinearProgram::minimize(rows[i].coeffs.clone()).with_constraints(
            rows.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, r)| Constraint::ge(r.coeffs.clone(), r.rhs.clone())),
        );
        debug_assert_eq!(lp.num_vars(), width);
        let redundant = match lp::solve(&lp).expect("rows share one width") {
            LpOutcome::Optimal(sol) => sol.value >= rows[i].rhs,
            LpOutcome::Unbounded(_) => false,
            LpOutcome::Infeasible(_) => true,
        };
        if redundant {
            rows.remove(i);
        } else {
            i += 1;
        }
    }
    rows
}
