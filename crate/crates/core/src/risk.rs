//! Risk regions `R(X) = { m : X + m in A }`, their scalarizations and duals.
//!
//! Eligible injections are constants supported on a coordinate subset (the
//! mask). Regions, directions and optimizers live in `R^k` with `k` the mask
//! size, coordinates listed in mask order.

use num_traits::{One, Signed, Zero};

use crate::acceptance::AcceptanceSet;
use crate::error::{Error, Result};
use crate::geometry::{Halfspace, LiftedPolyhedron, Projection};
use crate::lp::{self, Constraint, LinearProgram, LpOutcome};
use crate::rational::{dot, Extended, Rational};
use crate::scenario::{expectation, pair, RandomVector};

/// Coordinates of `R^d` that capital may be injected into.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mask {
    d: usize,
    coords: Vec<usize>,
}

impl Mask {
    pub fn full(d: usize) -> Self {
        Mask {
            d,
            coords: (0..d).collect(),
        }
    }

    /// Zero-based coordinates; sorted and deduplicated on construction.
    pub fn new(d: usize, mut coords: Vec<usize>) -> Result<Self> {
        coords.sort_unstable();
        coords.dedup();
        if coords.is_empty() {
            return Err(Error::AssumptionViolated(
                "the eligible space must meet the positive cone: mask is empty".into(),
            ));
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= d) {
            return Err(Error::InvalidInput(format!("mask coordinate {c} is out of range for d = {d}")));
        }
        Ok(Mask { d, coords })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// The constant in `R^d` injected by `m` in `R^k`.
    pub fn embed(&self, m: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.d];
        for (&c, v) in self.coords.iter().zip(m) {
            out[c] = v.clone();
        }
        out
    }

    /// Keep only the masked coordinates of `v` in `R^d`.
    pub fn restrict(&self, v: &[Rational]) -> Vec<Rational> {
        self.coords.iter().map(|&c| v[c].clone()).collect()
    }
}

/// A nonzero nonnegative pricing vector on the eligible coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    w: Vec<Rational>,
}

impl Direction {
    pub fn new(w: Vec<Rational>) -> Result<Self> {
        if w.iter().any(Signed::is_negative) {
            return Err(Error::InvalidInput("direction components must be nonnegative".into()));
        }
        if w.iter().all(Zero::is_zero) {
            return Err(Error::InvalidInput("direction must be nonzero".into()));
        }
        Ok(Direction { w })
    }

    pub fn w(&self) -> &[Rational] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Representative with components summing to one.
    pub fn canonical(&self) -> Direction {
        let total: Rational = self.w.iter().sum();
        Direction {
            w: self.w.iter().map(|v| v / &total).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiskRegion {
    pub projection: Projection,
    pub mask: Mask,
}

impl RiskRegion {
    pub fn is_empty(&self) -> bool {
        self.projection.is_empty()
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        self.projection.halfspaces()
    }

    pub fn contains(&self, m: &[Rational]) -> bool {
        self.projection.contains(m)
    }

    pub fn canonical_text(&self) -> String {
        self.projection.canonical_text()
    }

    pub fn to_polyhedron(&self) -> LiftedPolyhedron {
        self.projection.to_polyhedron(self.mask.len())
    }
}

/// Value of a scalarization with an optimal injection when one exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalarization {
    pub value: Extended,
    pub optimizer: Option<Vec<Rational>>,
}

/// A dual element `Z` with `E[Z] = w` on the eligible coordinates and its
/// support value `sigma_A(Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualElement {
    pub z: RandomVector,
    pub w: Direction,
    pub sigma: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualScalarization {
    pub value: Extended,
    pub certificate: Option<DualElement>,
}

fn check_inputs(a: &AcceptanceSet, x: &RandomVector, mask: &Mask) -> Result<()> {
    a.check_vector(x)?;
    check_mask(a, mask)
}

fn check_mask(a: &AcceptanceSet, mask: &Mask) -> Result<()> {
    if mask.dim() != a.dim() {
        return Err(Error::dims("mask ambient dimension", a.dim(), mask.dim()));
    }
    Ok(())
}

fn check_direction(mask: &Mask, w: &Direction) -> Result<()> {
    if w.len() != mask.len() {
        return Err(Error::dims("direction", mask.len(), w.len()));
    }
    Ok(())
}

/// Substitute `x = X + embed(m)` into the rows of `body`: the main variables
/// become `m`, the lifts stay.
fn substitute(body: &LiftedPolyhedron, x_flat: &[Rational], d: usize, mask: &Mask) -> LiftedPolyhedron {
    let nd = body.main_dim();
    let k = mask.len();
    let rows = body
        .rows()
        .iter()
        .map(|r| {
            let (main, lift) = r.coeffs.split_at(nd);
            let mut coeffs = vec![Rational::zero(); k];
            for (j, &c) in mask.coords().iter().enumerate() {
                for s in 0..nd / d {
                    coeffs[j] += &main[s * d + c];
                }
            }
            coeffs.extend_from_slice(lift);
            Constraint::new(coeffs, r.relation, &r.rhs - dot(main, x_flat))
        })
        .collect();
    LiftedPolyhedron::new(k, body.lift_dim(), rows).expect("substituted rows keep a common width")
}

/// The lifted system of `R(X)` over `m` in `R^k`.
pub fn region_system(a: &AcceptanceSet, x: &RandomVector, mask: &Mask) -> Result<LiftedPolyhedron> {
    check_inputs(a, x, mask)?;
    Ok(substitute(a.body(), &x.flatten(), a.dim(), mask))
}

/// `R(X)` as an explicit list of halfspaces. A region equal to the whole
/// eligible space breaks the standing assumptions and is an error.
pub fn risk_region(a: &AcceptanceSet, x: &RandomVector, mask: &Mask) -> Result<RiskRegion> {
    let projection = region_system(a, x, mask)?.project();
    if projection.is_whole_space() {
        return Err(Error::AssumptionViolated(
            "risk region is the whole eligible space".into(),
        ));
    }
    Ok(RiskRegion {
        projection,
        mask: mask.clone(),
    })
}

/// `rho_w(X) = inf { <w, m> : X + m in A }`.
pub fn rho(a: &AcceptanceSet, x: &RandomVector, w: &Direction, mask: &Mask) -> Result<Scalarization> {
    check_direction(mask, w)?;
    let s = region_system(a, x, mask)?.support_with_point(w.w())?;
    Ok(Scalarization {
        optimizer: if s.value.is_finite() { s.point } else { None },
        value: s.value,
    })
}

/// Whether some `Z` in the barrier cone of `A` extends `w`, i.e. whether the
/// dual program behind `rho_w` is feasible.
pub fn is_admissible(a: &AcceptanceSet, w: &Direction, mask: &Mask) -> Result<bool> {
    check_mask(a, mask)?;
    check_direction(mask, w)?;
    let zero = vec![Rational::zero(); a.body().main_dim()];
    let cone = substitute(&a.body().recession_system(), &zero, a.dim(), mask);
    Ok(!matches!(cone.minimize(w.w())?, LpOutcome::Unbounded(_)))
}

/// `rho*_w(X) = sup { sigma_A(Z) - E[<X, Z>] : Z extends w }` with an
/// optimal `Z` when the value is finite. The certificate is checked by
/// substitution against an independent support computation.
pub fn rho_dual(a: &AcceptanceSet, x: &RandomVector, w: &Direction, mask: &Mask) -> Result<DualScalarization> {
    check_direction(mask, w)?;
    let system = region_system(a, x, mask)?;
    let sol = match system.minimize(w.w())? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Unbounded(_) => {
            return Ok(DualScalarization {
                value: Extended::NegInfinity,
                certificate: None,
            })
        }
        LpOutcome::Infeasible(_) => {
            // The dual is either unbounded or infeasible.
            let value = if is_admissible(a, w, mask)? {
                Extended::PosInfinity
            } else {
                Extended::NegInfinity
            };
            return Ok(DualScalarization {
                value,
                certificate: None,
            });
        }
    };

    let nd = a.body().main_dim();
    let mut psi = vec![Rational::zero(); nd];
    for (row, y) in a.body().rows().iter().zip(&sol.row_duals) {
        if y.is_zero() {
            continue;
        }
        for (p, c) in psi.iter_mut().zip(&row.coeffs[..nd]) {
            *p += y * c;
        }
    }
    let d = a.dim();
    let flat: Vec<Rational> = psi
        .iter()
        .enumerate()
        .map(|(k, v)| v / &a.space().probs()[k / d])
        .collect();
    let z = RandomVector::from_flat(a.space().clone(), d, &flat)?;
    let cert = certify(a, x, w, mask, z, &sol.value)?;
    Ok(DualScalarization {
        value: Extended::Finite(sol.value),
        certificate: Some(cert),
    })
}

fn certify(
    a: &AcceptanceSet,
    x: &RandomVector,
    w: &Direction,
    mask: &Mask,
    z: RandomVector,
    value: &Rational,
) -> Result<DualElement> {
    if z.rows().iter().flatten().any(Signed::is_negative) {
        return Err(Error::Inconsistent("dual element has a negative entry".into()));
    }
    if mask.restrict(&expectation(&z)) != w.w() {
        return Err(Error::Inconsistent("dual element does not extend the direction".into()));
    }
    let sigma = match a.support(&z)? {
        Extended::Finite(v) => v,
        other => {
            return Err(Error::Inconsistent(format!(
                "dual element outside the barrier cone (support {other})"
            )))
        }
    };
    if &sigma - pair(x, &z)? != *value {
        return Err(Error::Inconsistent("primal and dual values differ".into()));
    }
    Ok(DualElement {
        z,
        w: w.clone(),
        sigma,
    })
}

/// Which sufficient conditions for finite scalarizations hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitenessReport {
    /// `A + M` is the whole space.
    pub fills_space: bool,
    /// Some eligible constant lies in the quasi interior of the positive cone.
    pub meets_qint_positive_cone: Option<Vec<Rational>>,
    /// Some eligible constant lies in the quasi interior of `rec(A)`.
    pub meets_qint_recession_cone: Option<Vec<Rational>>,
}

impl FinitenessReport {
    pub fn finite_guaranteed(&self) -> bool {
        self.fills_space
            || self.meets_qint_positive_cone.is_some()
            || self.meets_qint_recession_cone.is_some()
    }
}

pub fn finiteness_report(a: &AcceptanceSet, mask: &Mask) -> Result<FinitenessReport> {
    check_mask(a, mask)?;
    let body = a.body();
    let nd = body.main_dim();
    let k = mask.len();
    let d = a.dim();
    let embed_cols = |main: &[Rational]| -> Vec<Rational> {
        mask.coords()
            .iter()
            .map(|&c| (0..nd / d).map(|s| main[s * d + c].clone()).sum())
            .collect()
    };

    // A + M over (x, lifts of A, m): x - embed(m) in A.
    let rows = body
        .rows()
        .iter()
        .map(|r| {
            let mut coeffs = r.coeffs.clone();
            coeffs.extend(embed_cols(&r.coeffs[..nd]).into_iter().map(|v| -v));
            Constraint::new(coeffs, r.relation, r.rhs.clone())
        })
        .collect();
    let sum = LiftedPolyhedron::new(nd, body.lift_dim() + k, rows)?;
    let fills_space = sum.recession_ray_check(&vec![-Rational::one(); nd])?;

    let orthant = LiftedPolyhedron::orthant(nd);
    let positive = interior_constant(&orthant, mask, d)?;
    if let Some(m) = &positive {
        let x = embed_flat(mask, m, nd / d);
        if !orthant.qint_member(&x)? {
            return Err(Error::Inconsistent("quasi-interior witness fails membership".into()));
        }
    }
    let recession = interior_constant(&body.recession_system(), mask, d)?;
    Ok(FinitenessReport {
        fills_space,
        meets_qint_positive_cone: positive,
        meets_qint_recession_cone: recession,
    })
}

fn embed_flat(mask: &Mask, m: &[Rational], n: usize) -> Vec<Rational> {
    let row = mask.embed(m);
    (0..n).flat_map(|_| row.iter().cloned()).collect()
}

/// An eligible constant in the interior of a cone that contains the
/// positive orthant. For such cones the interior and the quasi interior
/// agree, and `x` is interior iff `x - s 1` stays in the cone for some
/// `s > 0`.
fn interior_constant(cone: &LiftedPolyhedron, mask: &Mask, d: usize) -> Result<Option<Vec<Rational>>> {
    let nd = cone.main_dim();
    let k = mask.len();
    let width = k + 1 + cone.lift_dim();
    // Variables: m, s, lifts.
    let mut rows: Vec<Constraint> = cone
        .rows()
        .iter()
        .map(|r| {
            let (main, lift) = r.coeffs.split_at(nd);
            let mut coeffs: Vec<Rational> = mask
                .coords()
                .iter()
                .map(|&c| (0..nd / d).map(|s| main[s * d + c].clone()).sum())
                .collect();
            coeffs.push(-main.iter().sum::<Rational>());
            coeffs.extend_from_slice(lift);
            Constraint::new(coeffs, r.relation, r.rhs.clone())
        })
        .collect();
    let mut cap = vec![Rational::zero(); width];
    cap[k] = Rational::one();
    rows.push(Constraint::le(cap, Rational::one()));
    let mut objective = vec![Rational::zero(); width];
    objective[k] = Rational::one();
    let lp = LinearProgram::maximize(objective).with_constraints(rows);
    Ok(match lp::solve(&lp)? {
        LpOutcome::Optimal(sol) if sol.value.is_positive() => Some(sol.primal[..k].to_vec()),
        _ => None,
    })
}
