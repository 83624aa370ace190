use num_traits::{Signed, Zero};
use proptest::prelude::*;
use setrisk::lp::{solve, verify_certificates, Constraint, LinearProgram, LpOutcome, Relation, VarBounds};
use setrisk::rational::{dot, int, Rational};

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
}

fn row(n: usize) -> impl Strategy<Value = Constraint> {
    (
        prop::collection::vec(-4i64..=4, n),
        relation(),
        -6i64..=6,
    )
        .prop_map(|(c, rel, b)| Constraint::new(c.into_iter().map(int).collect(), rel, int(b)))
}

fn program(n: usize) -> impl Strategy<Value = LinearProgram> {
    (
        prop::collection::vec(-3i64..=3, n),
        prop::collection::vec(row(n), 0..5),
        any::<bool>(),
        prop::collection::vec(0u8..4, n),
    )
        .prop_map(move |(c, rows, maximize, kinds)| {
            let obj = c.into_iter().map(int).collect();
            let mut lp = if maximize {
                LinearProgram::maximize(obj)
            } else {
                LinearProgram::minimize(obj)
            };
            lp = lp.with_constraints(rows);
            for (j, k) in kinds.into_iter().enumerate() {
                let b = match k {
                    0 => VarBounds::free(),
                    1 => VarBounds::nonnegative(),
                    2 => VarBounds { lower: None, upper: Some(int(2)) },
                    _ => VarBounds { lower: Some(int(-1)), upper: Some(int(3)) },
                };
                lp = lp.with_bounds(j, b);
            }
            lp
        })
}

/// Brute-force 2-variable oracle: all vertices of a boxed polygon.
fn vertex_minimum(c: &[Rational], rows: &[Constraint]) -> Option<Rational> {
    let mut lines: Vec<(Rational, Rational, Rational)> = rows
        .iter()
        .map(|r| (r.coeffs[0].clone(), r.coeffs[1].clone(), r.rhs.clone()))
        .collect();
    for (a, b) in [(1, 0), (0, 1)] {
        for bound in [-5, 5] {
            lines.push((int(a), int(b), int(bound)));
        }
    }
    let feasible = |x: &[Rational]| {
        rows.iter().all(|r| r.is_satisfied_by(x))
            && x.iter().all(|v| v.abs() <= int(5))
    };
    let mut best: Option<Rational> = None;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, b1, c1) = &lines[i];
            let (a2, b2, c2) = &lines[j];
            let det = a1 * b2 - a2 * b1;
            if det.is_zero() {
                continue;
            }
            let x = vec![(c1 * b2 - c2 * b1) / &det, (a1 * c2 - a2 * c1) / &det];
            if feasible(&x) {
                let val = dot(c, &x);
                if best.as_ref().is_none_or(|b| &val < b) {
                    best = Some(val);
                }
            }
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn every_outcome_carries_a_valid_certificate(lp in program(3)) {
        let out = solve(&lp).unwrap();
        prop_assert!(verify_certificates(&lp, &out), "{:?}\n{:?}", lp, out);
        prop_assert_eq!(solve(&lp).unwrap(), out);
    }

    #[test]
    fn boxed_two_variable_matches_vertex_enumeration(
        c in prop::collection::vec(-3i64..=3, 2),
        rows in prop::collection::vec(row(2), 0..4),
    ) {
        let c: Vec<Rational> = c.into_iter().map(int).collect();
        let mut all = rows.clone();
        for j in 0..2 {
            let mut e = vec![int(0), int(0)];
            e[j] = int(1);
            all.push(Constraint::le(e.clone(), int(5)));
            all.push(Constraint::ge(e, int(-5)));
        }
        let lp = LinearProgram::minimize(c.clone()).with_constraints(all);
        let out = solve(&lp).unwrap();
        match (vertex_minimum(&c, &rows), &out) {
            (Some(best), LpOutcome::Optimal(sol)) => prop_assert_eq!(best, sol.value.clone()),
            (None, LpOutcome::Infeasible(_)) => {}
            (oracle, got) => prop_assert!(false, "oracle {:?} vs {:?}", oracle, got),
        }
    }

    #[test]
    fn positive_row_scaling_preserves_verdict_and_optimizer(
        lp in program(3),
        scales in prop::collection::vec(1i64..5, 6),
        obj_scale in 1i64..5,
    ) {
        let mut scaled = lp.clone();
        for (r, s) in scaled.constraints.iter_mut().zip(scales.iter().cycle()) {
            for a in r.coeffs.iter_mut() {
                *a *= int(*s);
            }
            r.rhs *= int(*s);
        }
        for c in scaled.objective.iter_mut() {
            *c *= int(obj_scale);
        }
        let a = solve(&lp).unwrap();
        let b = solve(&scaled).unwrap();
        match (&a, &b) {
            (LpOutcome::Optimal(x), LpOutcome::Optimal(y)) => {
                prop_assert_eq!(&x.primal, &y.primal);
                prop_assert_eq!(x.value.clone() * int(obj_scale), y.value.clone());
            }
            (LpOutcome::Infeasible(_), LpOutcome::Infeasible(_)) => {}
            (LpOutcome::Unbounded(_), LpOutcome::Unbounded(_)) => {}
            _ => prop_assert!(false, "verdict changed: {:?} vs {:?}", a, b),
        }
        prop_assert!(verify_certificates(&scaled, &b));
    }
}

#[test]
fn farkas_multipliers_have_correct_signs_on_mixed_system() {
    // x + y >= 4, x <= 1, y <= 1
    let lp = LinearProgram::feasibility(2)
        .with_constraint(Constraint::ge(vec![int(1), int(1)], int(4)))
        .with_constraint(Constraint::le(vec![int(1), int(0)], int(1)))
        .with_constraint(Constraint::le(vec![int(0), int(1)], int(1)));
    let out = solve(&lp).unwrap();
    let LpOutcome::Infeasible(cert) = &out else { panic!("{out:?}") };
    assert!(cert.row_multipliers[0].is_positive());
    assert!(cert.row_multipliers[1].is_negative());
    assert!(verify_certificates(&lp, &out));
}
