#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use setrisk::acceptance::AcceptanceSet;
use setrisk::geometry::LiftedPolyhedron;
use setrisk::lp::Constraint;
use setrisk::rational::{int, ratio, Rational};
use setrisk::risk::{Direction, Mask};
use setrisk::scenario::{RandomVector, ScenarioSpace};
use setrisk::systemic::Aggregator;

pub fn v(xs: &[i64]) -> Vec<Rational> {
    xs.iter().copied().map(int).collect()
}

pub fn rv(space: &Arc<ScenarioSpace>, rows: &[&[i64]]) -> RandomVector {
    RandomVector::new(space.clone(), rows.iter().map(|r| v(r)).collect()).unwrap()
}

/// `A = K` for a deterministic space and the cone cut out by `rows >= 0`.
pub fn deterministic_cone(d: usize, rows: &[&[i64]]) -> AcceptanceSet {
    let space = Arc::new(ScenarioSpace::uniform(1).unwrap());
    let rows = rows.iter().map(|r| Constraint::ge(v(r), int(0))).collect();
    let body = LiftedPolyhedron::new(d, 0, rows).unwrap();
    AcceptanceSet::from_body(space, d, body, "fixture").unwrap()
}

/// `K = A = R^3_+` with injections in the first two coordinates.
pub fn incomparable_fixture() -> (AcceptanceSet, Mask) {
    let a = deterministic_cone(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    (a, Mask::new(3, vec![0, 1]).unwrap())
}

/// `K = A = R^2_+ x R` with injections in the last two coordinates.
pub fn complete_fixture() -> (AcceptanceSet, Mask) {
    let a = deterministic_cone(3, &[&[1, 0, 0], &[0, 1, 0]]);
    (a, Mask::new(3, vec![1, 2]).unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    WorstCase,
    Expectation,
    ExpectedShortfall,
    Systemic,
}

pub const FAMILIES: [Family; 4] = [
    Family::WorstCase,
    Family::Expectation,
    Family::ExpectedShortfall,
    Family::Systemic,
];

#[derive(Clone, Debug)]
pub struct Instance {
    pub family: Family,
    pub a: AcceptanceSet,
    pub x: RandomVector,
    pub y: RandomVector,
    pub w: Direction,
}

impl Instance {
    pub fn mask(&self) -> Mask {
        Mask::full(self.a.dim())
    }
}

fn level(i: i64) -> Rational {
    // Spread of small fractions and integers.
    ratio(i, 2)
}

/// A random acceptance set of the given family with two positions and a
/// direction. Scenario counts stay at 2 or 3 to keep projections cheap.
pub fn instance(family: Family) -> impl Strategy<Value = Instance> {
    let d_range = match family {
        Family::Expectation => 1..=1usize,
        _ => 1..=2usize,
    };
    (2..=3usize, d_range)
        .prop_flat_map(move |(n, d)| {
            (
                prop::collection::vec(1i64..=3, n),
                prop::collection::vec(-4i64..=4, 2 * n * d),
                prop::collection::vec(0i64..=3, d),
                prop::collection::vec(1i64..=3, d),
            )
                .prop_map(move |(weights, xs, w, params)| (n, d, weights, xs, w, params))
        })
        .prop_filter("direction must be nonzero", |(_, _, _, _, w, _)| w.iter().any(|&c| c > 0))
        .prop_map(move |(n, d, weights, xs, w, params)| {
            let total: i64 = weights.iter().sum();
            let probs = weights.iter().map(|&k| ratio(k, total)).collect();
            let space = Arc::new(ScenarioSpace::new(probs).unwrap());
            let a = match family {
                Family::WorstCase => AcceptanceSet::worst_case(space.clone(), d).unwrap(),
                Family::Expectation => AcceptanceSet::expectation_set(space.clone()).unwrap(),
                Family::ExpectedShortfall => {
                    let alpha: Vec<Rational> = params.iter().map(|&k| ratio(k, 4)).collect();
                    AcceptanceSet::expected_shortfall_set(space.clone(), &alpha).unwrap()
                }
                Family::Systemic => {
                    let alpha: Vec<Rational> = params.iter().map(|&k| ratio(k + 2, 2)).collect();
                    Aggregator::weighted_losses(alpha)
                        .unwrap()
                        .preimage_of_expectation(space.clone())
                        .unwrap()
                }
            };
            let cut = |k: usize| -> RandomVector {
                let rows = (0..n)
                    .map(|s| (0..d).map(|i| level(xs[k * n * d + s * d + i])).collect())
                    .collect();
                RandomVector::new(space.clone(), rows).unwrap()
            };
            Instance {
                family,
                a,
                x: cut(0),
                y: cut(1),
                w: Direction::new(w.into_iter().map(int).collect()).unwrap(),
            }
        })
}

pub fn any_instance() -> impl Strategy<Value = Instance> {
    prop_oneof![
        instance(Family::WorstCase),
        instance(Family::Expectation),
        instance(Family::ExpectedShortfall),
        instance(Family::Systemic),
    ]
}
