mod common;

use common::*;
use proptest::prelude::*;
use setrisk::rational::{int, ratio, Extended, Rational};
use setrisk::risk::{is_admissible, risk_region, Direction};
use setrisk::preference::{compare, multi_utility_check, probe_grid, scalar_verdict, utility_value, Verdict};
use setrisk::scenario::RandomVector;

#[test]
fn incomparable_fixture_pair_is_incomparable() {
    let (a, mask) = incomparable_fixture();
    let x = rv(a.space(), &[&[0, 0, 0]]);
    let y = rv(a.space(), &[&[1, -1, 0]]);
    let verdict = compare(&a, &x, &y, &mask).unwrap();
    assert_eq!(verdict.verdict, Verdict::Incomparable);
    assert_eq!(verdict.x_region.canonical_text(), "[0, 1] >= 0\n[1, 0] >= 0\n");
    assert_eq!(verdict.y_region.canonical_text(), "[0, 1] >= 1\n[1, 0] >= -1\n");

    let xy = verdict.x_not_preferred.unwrap();
    assert!(verdict.y_region.contains(&xy.witness) && !verdict.x_region.contains(&xy.witness));
    assert_eq!(xy.direction.w(), &v(&[1, 0])[..]);
    let yx = verdict.y_not_preferred.unwrap();
    assert!(verdict.x_region.contains(&yx.witness) && !verdict.y_region.contains(&yx.witness));
    assert_eq!(yx.direction.w(), &v(&[0, 1])[..]);

    let record = multi_utility_check(&a, &x, &y, &mask).unwrap();
    assert!(record.agree);
    assert_eq!(record.scalar, Verdict::Incomparable);
}

#[test]
fn dominance_and_reflexivity() {
    let (a, mask) = incomparable_fixture();
    let x = rv(a.space(), &[&[2, 0, 1]]);
    let y = rv(a.space(), &[&[1, -1, 0]]);
    assert_eq!(compare(&a, &x, &x, &mask).unwrap().verdict, Verdict::Equivalent);
    assert_eq!(compare(&a, &x, &y, &mask).unwrap().verdict, Verdict::XPreferred);
    assert_eq!(compare(&a, &y, &x, &mask).unwrap().verdict, Verdict::YPreferred);
    assert!(multi_utility_check(&a, &x, &y, &mask).unwrap().agree);
}

#[test]
fn utility_is_the_negative_scalarization() {
    let (a, mask) = incomparable_fixture();
    let x = rv(a.space(), &[&[1, -1, 0]]);
    let w = Direction::new(v(&[0, 1])).unwrap();
    assert_eq!(utility_value(&a, &x, &w, &mask, false).unwrap(), Extended::Finite(int(-1)));
    let m = v(&[3, 2, 0]);
    let shifted = x.shifted(&m).unwrap();
    assert_eq!(utility_value(&a, &shifted, &w, &mask, true).unwrap(), Extended::Finite(int(1)));
}

#[test]
fn pruned_directions_never_change_a_verdict() {
    let (a, mask) = complete_fixture();
    let x = rv(a.space(), &[&[1, 2, 0]]);
    let y = rv(a.space(), &[&[0, 1, 5]]);
    let record = multi_utility_check(&a, &x, &y, &mask).unwrap();
    let pruned: Vec<Direction> = probe_grid(2, 4)
        .into_iter()
        .filter(|w| !is_admissible(&a, w, &mask).unwrap())
        .collect();
    assert!(!pruned.is_empty());
    assert!(record.directions.iter().all(|w| !pruned.contains(w)));
    let mut widened = record.directions.clone();
    widened.extend(pruned.iter().cloned());
    // Pruned directions report -inf on both sides, so they never separate.
    assert_eq!(scalar_verdict(&a, &x, &y, &mask, &widened).unwrap(), record.geometric);
}

fn small_position() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-6i64..=6, 1i64..=3), 3).prop_map(|xs| xs.into_iter().map(|(p, q)| ratio(p, q)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn complete_fixture_is_complete(x in small_position(), y in small_position()) {
        let (a, mask) = complete_fixture();
        let x = RandomVector::new(a.space().clone(), vec![x]).unwrap();
        let y = RandomVector::new(a.space().clone(), vec![y]).unwrap();
        let verdict = compare(&a, &x, &y, &mask).unwrap().verdict;
        prop_assert_ne!(verdict, Verdict::Incomparable);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scalar_and_geometric_verdicts_agree(inst in any_instance()) {
        let record = multi_utility_check(&inst.a, &inst.x, &inst.y, &inst.mask()).unwrap();
        prop_assert!(record.agree, "{:?} vs {:?}", record.geometric, record.scalar);
    }

    #[test]
    fn dominance_implies_preference(inst in any_instance()) {
        let mask = inst.mask();
        let n = inst.x.space().len();
        let rows = (0..n)
            .map(|s| inst.x.row(s).iter().zip(inst.y.row(s)).map(|(a, b)| a.max(b).clone()).collect())
            .collect();
        let top = RandomVector::new(inst.x.space().clone(), rows).unwrap();
        prop_assert!(compare(&inst.a, &top, &inst.x, &mask).unwrap().verdict.first_weakly_preferred());
        prop_assert!(compare(&inst.a, &top, &inst.y, &mask).unwrap().verdict.first_weakly_preferred());
    }

    #[test]
    fn mixing_with_a_worse_position_stays_preferred(inst in any_instance(), k in 1i64..=3) {
        let mask = inst.mask();
        prop_assume!(compare(&inst.a, &inst.x, &inst.y, &mask).unwrap().verdict.first_weakly_preferred());
        let lambda = ratio(k, 4);
        let mixed = inst.x.combine(&lambda, &inst.y, &(int(1) - &lambda)).unwrap();
        prop_assert!(compare(&inst.a, &mixed, &inst.y, &mask).unwrap().verdict.first_weakly_preferred());
    }

    #[test]
    fn preference_is_transitive(inst in any_instance(), k in 1i64..=3) {
        let mask = inst.mask();
        let lambda = ratio(k, 4);
        let mid = inst.x.combine(&lambda, &inst.y, &(int(1) - &lambda)).unwrap();
        let regions: Vec<_> = [&inst.x, &mid, &inst.y]
            .iter()
            .map(|p| risk_region(&inst.a, p, &mask).unwrap().to_polyhedron())
            .collect();
        let weak: Vec<Vec<bool>> = regions
            .iter()
            .map(|r| regions.iter().map(|q| r.contains(q).unwrap().holds).collect())
            .collect();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    if weak[a][b] && weak[b][c] {
                        prop_assert!(weak[a][c]);
                    }
                }
            }
        }
        prop_assert_eq!(weak[0][2], compare(&inst.a, &inst.x, &inst.y, &mask).unwrap().verdict.first_weakly_preferred());
    }
}
