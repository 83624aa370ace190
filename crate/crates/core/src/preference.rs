//! The preference `X >= Y  iff  R(X) contains R(Y)` and its scalar
//! multi-utility form.

use std::collections::BTreeSet;

use num_traits::One;

use crate::acceptance::AcceptanceSet;
use crate::error::{Error, Result};
use crate::rational::{Extended, Rational};
use crate::risk::{self, is_admissible, region_system, rho, rho_dual, Direction, Mask, RiskRegion};
use crate::scenario::RandomVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    /// `R(X)` strictly contains `R(Y)`.
    XPreferred,
    /// `R(Y)` strictly contains `R(X)`.
    YPreferred,
    Equivalent,
    Incomparable,
}

impl Verdict {
    fn from_containments(x_over_y: bool, y_over_x: bool) -> Verdict {
        match (x_over_y, y_over_x) {
            (true, true) => Verdict::Equivalent,
            (true, false) => Verdict::XPreferred,
            (false, true) => Verdict::YPreferred,
            (false, false) => Verdict::Incomparable,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::XPreferred => "X_preferred",
            Verdict::YPreferred => "Y_preferred",
            Verdict::Equivalent => "equivalent",
            Verdict::Incomparable => "incomparable",
        }
    }

    /// Whether the first argument is weakly preferred.
    pub fn first_weakly_preferred(self) -> bool {
        matches!(self, Verdict::XPreferred | Verdict::Equivalent)
    }
}

/// Why `R(P)` fails to contain `R(Q)`: an injection `witness` in `R(Q)`
/// but not in `R(P)`, and a direction along which `Q` is strictly cheaper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub witness: Vec<Rational>,
    pub direction: Direction,
    /// `rho_w` of the side whose region is too small.
    pub rho_smaller: Extended,
    /// `rho_w` of the side holding the witness.
    pub rho_larger: Extended,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceVerdict {
    pub verdict: Verdict,
    pub x_region: RiskRegion,
    pub y_region: RiskRegion,
    /// Present when `X >= Y` fails.
    pub x_not_preferred: Option<Separation>,
    /// Present when `Y >= X` fails.
    pub y_not_preferred: Option<Separation>,
}

fn check_pair(a: &AcceptanceSet, x: &RandomVector, y: &RandomVector, mask: &Mask) -> Result<()> {
    region_system(a, x, mask)?;
    region_system(a, y, mask)?;
    Ok(())
}

pub fn compare(a: &AcceptanceSet, x: &RandomVector, y: &RandomVector, mask: &Mask) -> Result<PreferenceVerdict> {
    check_pair(a, x, y, mask)?;
    let x_region = risk::risk_region(a, x, mask)?;
    let y_region = risk::risk_region(a, y, mask)?;
    let x_not_preferred = separation(a, (x, &x_region), y, mask)?;
    let y_not_preferred = separation(a, (y, &y_region), x, mask)?;
    Ok(PreferenceVerdict {
        verdict: Verdict::from_containments(x_not_preferred.is_none(), y_not_preferred.is_none()),
        x_region,
        y_region,
        x_not_preferred,
        y_not_preferred,
    })
}

/// `None` when `R(p)` contains `R(q)`.
fn separation(
    a: &AcceptanceSet,
    (p, p_region): (&RandomVector, &RiskRegion),
    q: &RandomVector,
    mask: &Mask,
) -> Result<Option<Separation>> {
    let p_system = region_system(a, p, mask)?;
    let q_system = region_system(a, q, mask)?;
    let c = p_system.contains_projected(&p_region.projection, &q_system)?;
    if c.holds {
        return Ok(None);
    }
    let witness = c.witness.expect("failed containment carries a witness");
    let direction = match c.violated {
        Some(h) => Direction::new(h.normal)?.canonical(),
        // R(p) is empty: every direction separates.
        None => uniform_direction(mask.len()),
    };
    let rho_smaller = rho(a, p, &direction, mask)?.value;
    let rho_larger = rho(a, q, &direction, mask)?.value;
    if rho_smaller <= rho_larger || !q_system.contains_point(&witness)? || p_region.contains(&witness) {
        return Err(Error::Inconsistent("separation certificate does not verify".into()));
    }
    Ok(Some(Separation {
        witness,
        direction,
        rho_smaller,
        rho_larger,
    }))
}

/// Simplex directions in `R^k` with denominators at most `max_den`, each in
/// canonical form, sorted.
pub fn probe_grid(k: usize, max_den: i64) -> Vec<Direction> {
    fn compositions(k: usize, total: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() + 1 == k {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            compositions(k, total - first, prefix, out);
            prefix.pop();
        }
    }
    let mut seen = BTreeSet::new();
    for q in 1..=max_den {
        let mut parts = Vec::new();
        compositions(k, q, &mut Vec::new(), &mut parts);
        for p in parts {
            let w = p.iter().map(|&a| Rational::new(a.into(), q.into())).collect();
            seen.insert(Direction::new(w).expect("compositions are nonzero"));
        }
    }
    seen.into_iter().collect()
}

/// Verdict obtained from scalar values alone over the family `directions`.
pub fn scalar_verdict(
    a: &AcceptanceSet,
    x: &RandomVector,
    y: &RandomVector,
    mask: &Mask,
    directions: &[Direction],
) -> Result<Verdict> {
    let mut x_over_y = true;
    let mut y_over_x = true;
    for w in directions {
        let rx = rho(a, x, w, mask)?.value;
        let ry = rho(a, y, w, mask)?.value;
        x_over_y &= rx <= ry;
        y_over_x &= ry <= rx;
    }
    Ok(Verdict::from_containments(x_over_y, y_over_x))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiUtilityRecord {
    pub geometric: Verdict,
    pub scalar: Verdict,
    /// The admissible directions used for the scalar verdict.
    pub directions: Vec<Direction>,
    pub agree: bool,
}

/// Recompute the verdict from `rho_w` over facet normals of both regions
/// plus the probe grid, keeping only directions that admit a dual element.
pub fn multi_utility_check(
    a: &AcceptanceSet,
    x: &RandomVector,
    y: &RandomVector,
    mask: &Mask,
) -> Result<MultiUtilityRecord> {
    let geometric = compare(a, x, y, mask)?;
    multi_utility_check_with(a, x, y, mask, &geometric)
}

/// As [`multi_utility_check`] reusing an existing geometric verdict.
pub fn multi_utility_check_with(
    a: &AcceptanceSet,
    x: &RandomVector,
    y: &RandomVector,
    mask: &Mask,
    geometric: &PreferenceVerdict,
) -> Result<MultiUtilityRecord> {
    let mut family: BTreeSet<Direction> = probe_grid(mask.len(), 4).into_iter().collect();
    for h in geometric
        .x_region
        .halfspaces()
        .iter()
        .chain(geometric.y_region.halfspaces())
    {
        family.insert(Direction::new(h.normal.clone())?.canonical());
    }
    let mut directions = Vec::new();
    for w in family {
        if is_admissible(a, &w, mask)? {
            directions.push(w);
        }
    }
    let scalar = scalar_verdict(a, x, y, mask, &directions)?;
    Ok(MultiUtilityRecord {
        geometric: geometric.verdict,
        scalar,
        agree: scalar == geometric.verdict,
        directions,
    })
}

/// `u_w = -rho_w`, or `-rho*_w` when `dual` is set.
pub fn utility_value(a: &AcceptanceSet, x: &RandomVector, w: &Direction, mask: &Mask, dual: bool) -> Result<Extended> {
    let value = if dual {
        rho_dual(a, x, w, mask)?.value
    } else {
        rho(a, x, w, mask)?.value
    };
    Ok(-value)
}

/// Equal weight on every eligible coordinate.
pub fn uniform_direction(k: usize) -> Direction {
    Direction::new(vec![Rational::one(); k])
        .expect("ones are a valid direction")
        .canonical()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::scenario::ScenarioSpace;
    use std::sync::Arc;

    #[test]
    fn grid_sizes() {
        assert_eq!(probe_grid(1, 4).len(), 1);
        // Distinct points of the segment with denominators up to 4.
        assert_eq!(probe_grid(2, 4).len(), 7);
        assert!(probe_grid(3, 4).iter().all(|d| d.w().iter().sum::<Rational>() == int(1)));
        assert!(probe_grid(2, 4).contains(&Direction::new(vec![ratio(1, 4), ratio(3, 4)]).unwrap()));
    }

    #[test]
    fn reflexive_and_monotone() {
        let space = Arc::new(ScenarioSpace::uniform(2).unwrap());
        let a = AcceptanceSet::worst_case(space.clone(), 1).unwrap();
        let mask = Mask::full(1);
        let x = RandomVector::new(space.clone(), vec![vec![int(1)], vec![int(-1)]]).unwrap();
        let y = RandomVector::new(space, vec![vec![int(0)], vec![int(-1)]]).unwrap();
        assert_eq!(compare(&a, &x, &x, &mask).unwrap().verdict, Verdict::Equivalent);
        // Both are governed by the worst atom.
        assert_eq!(compare(&a, &x, &y, &mask).unwrap().verdict, Verdict::Equivalent);
        let z = y.shifted(&[int(-1)]).unwrap();
        let v = compare(&a, &x, &z, &mask).unwrap();
        assert_eq!(v.verdict, Verdict::XPreferred);
        let sep = v.y_not_preferred.unwrap();
        assert!(sep.rho_smaller > sep.rho_larger);
        let w = Direction::new(vec![int(1)]).unwrap();
        assert_eq!(utility_value(&a, &x, &w, &mask, false).unwrap(), Extended::Finite(int(-1)));
        assert_eq!(utility_value(&a, &x, &w, &mask, true).unwrap(), Extended::Finite(int(-1)));
    }
}
