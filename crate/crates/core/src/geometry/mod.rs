//! Polyhedra given by lifted linear systems.
//!
//! A [`LiftedPolyhedron`] stores `{ x : exists y, (x, y) satisfies rows }`.
//! Support functions, barrier-cone membership and recession directions are
//! answered with one LP on the lifted system; an explicit halfspace
//! description is produced on demand by [`LiftedPolyhedron::project`].

mod projection;

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{self, Constraint, LinearProgram, LpOutcome, Relation};
use crate::rational::{dot, normalize_leading, Extended, Rational};

/// `{ x : <normal, x> >= offset }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Result<Self> {
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::InvalidInput("halfspace normal must be nonzero".into()));
        }
        Ok(Halfspace { normal, offset })
    }

    /// Scale so that the first nonzero coefficient is `+1` or `-1`.
    pub fn normalized(mut self) -> Self {
        if let Some(lead) = normalize_leading(&mut self.normal) {
            self.offset /= lead;
        }
        self
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        dot(&self.normal, x) >= self.offset
    }

    pub fn to_constraint(&self) -> Constraint {
        Constraint::ge(self.normal.clone(), self.offset.clone())
    }
}

impl fmt::Display for Halfspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.normal.iter().map(ToString::to_string).collect();
        write!(f, "[{}] >= {}", coeffs.join(", "), self.offset)
    }
}

/// Explicit description of a projected set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Projection {
    Empty,
    /// Irredundant, normalized and sorted; an empty list is the whole space.
    Halfspaces(Vec<Halfspace>),
}

impl Projection {
    pub fn is_empty(&self) -> bool {
        matches!(self, Projection::Empty)
    }

    pub fn is_whole_space(&self) -> bool {
        matches!(self, Projection::Halfspaces(h) if h.is_empty())
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        match self {
            Projection::Empty => &[],
            Projection::Halfspaces(h) => h,
        }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        match self {
            Projection::Empty => false,
            Projection::Halfspaces(h) => h.iter().all(|hs| hs.contains(x)),
        }
    }

    /// Lift-free polyhedron with the same points.
    pub fn to_polyhedron(&self, dim: usize) -> LiftedPolyhedron {
        let rows = match self {
            Projection::Empty => vec![Constraint::ge(
                vec![Rational::zero(); dim],
                Rational::from_integer(1.into()),
            )],
            Projection::Halfspaces(h) => h.iter().map(Halfspace::to_constraint).collect(),
        };
        LiftedPolyhedron {
            main_dim: dim,
            lift_dim: 0,
            rows,
        }
    }

    /// One halfspace per line, in canonical order.
    pub fn canonical_text(&self) -> String {
        match self {
            Projection::Empty => "empty\n".to_string(),
            Projection::Halfspaces(h) => h.iter().map(|hs| format!("{hs}\n")).collect(),
        }
    }
}

/// Result of a containment test `Q ⊆ P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Containment {
    pub holds: bool,
    /// On failure, a point of `Q` outside `P`.
    pub witness: Option<Vec<Rational>>,
    /// On failure, the halfspace of `P` the witness violates (absent when `P`
    /// is empty).
    pub violated: Option<Halfspace>,
}

/// Support value together with a minimizer when one exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportOutcome {
    pub value: Extended,
    /// Main coordinates of a minimizer (finite value) or of a feasible point
    /// (value `-inf`).
    pub point: Option<Vec<Rational>>,
    /// Main coordinates of a descent ray when the value is `-inf`.
    pub ray: Option<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedPolyhedron {
    main_dim: usize,
    lift_dim: usize,
    rows: Vec<Constraint>,
}

impl LiftedPolyhedron {
    pub fn new(main_dim: usize, lift_dim: usize, rows: Vec<Constraint>) -> Result<Self> {
        let width = main_dim + lift_dim;
        if let Some(r) = rows.iter().find(|r| r.coeffs.len() != width) {
            return Err(Error::dims("polyhedron row", width, r.coeffs.len()));
        }
        Ok(LiftedPolyhedron {
            main_dim,
            lift_dim,
            rows,
        })
    }

    /// `R^dim` itself.
    pub fn whole_space(dim: usize) -> Self {
        LiftedPolyhedron {
            main_dim: dim,
            lift_dim: 0,
            rows: Vec::new(),
        }
    }

    /// The nonnegative orthant of `R^dim`.
    pub fn orthant(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|i| Constraint::ge(unit(dim, i), Rational::zero()))
            .collect();
        LiftedPolyhedron {
            main_dim: dim,
            lift_dim: 0,
            rows,
        }
    }

    pub fn main_dim(&self) -> usize {
        self.main_dim
    }

    pub fn lift_dim(&self) -> usize {
        self.lift_dim
    }

    pub fn width(&self) -> usize {
        self.main_dim + self.lift_dim
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn is_cone(&self) -> bool {
        self.rows.iter().all(|r| r.rhs.is_zero())
    }

    /// Homogenized system; its projection is the recession cone of a
    /// nonempty polyhedron.
    pub fn recession_system(&self) -> Self {
        LiftedPolyhedron {
            main_dim: self.main_dim,
            lift_dim: self.lift_dim,
            rows: self.rows.iter().map(Constraint::homogenized).collect(),
        }
    }

    fn check_arity(&self, v: &[Rational], context: &'static str) -> Result<()> {
        if v.len() != self.main_dim {
            return Err(Error::dims(context, self.main_dim, v.len()));
        }
        Ok(())
    }

    fn lift_objective(&self, psi: &[Rational]) -> Vec<Rational> {
        let mut c = psi.to_vec();
        c.resize(self.width(), Rational::zero());
        c
    }

    /// Minimize `<psi, x>` over the lifted system.
    pub fn minimize(&self, psi: &[Rational]) -> Result<LpOutcome> {
        self.check_arity(psi, "support direction")?;
        let lp = LinearProgram::minimize(self.lift_objective(psi)).with_constraints(self.rows.clone());
        lp::solve(&lp)
    }

    /// A point of the lifted system, main and lift coordinates together.
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let lp = LinearProgram::feasibility(self.width()).with_constraints(self.rows.clone());
        match lp::solve(&lp).expect("rows have matching arity") {
            LpOutcome::Optimal(sol) => Some(sol.primal),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.feasible_point().is_none()
    }

    /// Whether `x` lies in the projection onto the main coordinates.
    pub fn contains_point(&self, x: &[Rational]) -> Result<bool> {
        self.check_arity(x, "membership point")?;
        let fixed = self.fix_main(x);
        Ok(!fixed.is_empty())
    }

    /// Substitute `x` for the main coordinates; the result lives on the lift
    /// coordinates alone.
    fn fix_main(&self, x: &[Rational]) -> LiftedPolyhedron {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let (main, lift) = r.coeffs.split_at(self.main_dim);
                Constraint::new(lift.to_vec(), r.relation, &r.rhs - dot(main, x))
            })
            .collect();
        LiftedPolyhedron {
            main_dim: self.lift_dim,
            lift_dim: 0,
            rows,
        }
    }

    /// Lower support function `inf { <psi, x> : x in P }`.
    pub fn support(&self, psi: &[Rational]) -> Result<Extended> {
        Ok(self.support_with_point(psi)?.value)
    }

    pub fn support_with_point(&self, psi: &[Rational]) -> Result<SupportOutcome> {
        let out = self.minimize(psi)?;
        let main = |v: &[Rational]| v[..self.main_dim].to_vec();
        Ok(match out {
            LpOutcome::Optimal(sol) => SupportOutcome {
                value: Extended::Finite(sol.value),
                point: Some(main(&sol.primal)),
                ray: None,
            },
            LpOutcome::Unbounded(r) => SupportOutcome {
                value: Extended::NegInfinity,
                point: Some(main(&r.point)),
                ray: Some(main(&r.ray)),
            },
            LpOutcome::Infeasible(_) => SupportOutcome {
                value: Extended::PosInfinity,
                point: None,
                ray: None,
            },
        })
    }

    /// `psi` belongs to the barrier cone iff the support is not `-inf`.
    pub fn in_barrier(&self, psi: &[Rational]) -> Result<bool> {
        Ok(self.support(psi)? != Extended::NegInfinity)
    }

    /// Whether `v` is a recession direction of the projected set.
    pub fn recession_ray_check(&self, v: &[Rational]) -> Result<bool> {
        self.check_arity(v, "recession direction")?;
        if self.is_empty() {
            return Err(Error::EmptySet("recession cone of an empty polyhedron".into()));
        }
        self.recession_system().contains_point(v)
    }

    /// The barrier cone as a lifted system over functionals on the main
    /// coordinates: `psi = A_main^T y`, `A_lift^T y = 0`, with `y` signed by
    /// row relation. Exact for nonempty polyhedra.
    pub fn barrier_system(&self) -> LiftedPolyhedron {
        let k = self.main_dim;
        let m = self.rows.len();
        let width = k + m;
        let mut rows = Vec::with_capacity(self.width() + m);
        for col in 0..self.width() {
            let mut coeffs = vec![Rational::zero(); width];
            if col < k {
                coeffs[col] = Rational::from_integer(1.into());
            }
            for (r, row) in self.rows.iter().enumerate() {
                coeffs[k + r] = -&row.coeffs[col];
            }
            rows.push(Constraint::eq(coeffs, Rational::zero()));
        }
        for (r, row) in self.rows.iter().enumerate() {
            let relation = match row.relation {
                Relation::Ge => Relation::Ge,
                Relation::Le => Relation::Le,
                Relation::Eq => continue,
            };
            rows.push(Constraint::new(unit(width, k + r), relation, Rational::zero()));
        }
        LiftedPolyhedron {
            main_dim: k,
            lift_dim: m,
            rows,
        }
    }

    /// Lower bound `sum_r y_r rhs_r` on the support, as a linear form over
    /// the lift coordinates of [`Self::barrier_system`].
    pub fn barrier_value_form(&self) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.main_dim];
        c.extend(self.rows.iter().map(|r| r.rhs.clone()));
        c
    }

    /// Minkowski sum of polyhedra of equal main dimension, one lift block
    /// per summand.
    pub fn minkowski_sum(parts: &[&LiftedPolyhedron]) -> Result<LiftedPolyhedron> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidInput("Minkowski sum of no sets".into()));
        };
        let k = first.main_dim;
        if let Some(p) = parts.iter().find(|p| p.main_dim != k) {
            return Err(Error::dims("Minkowski summand", k, p.main_dim));
        }
        let lift: usize = parts.iter().map(|p| p.width()).sum();
        let width = k + lift;
        let mut rows = Vec::new();
        // x - sum of summand main blocks = 0
        for i in 0..k {
            let mut coeffs = vec![Rational::zero(); width];
            coeffs[i] = Rational::from_integer(1.into());
            let mut offset = k;
            for p in parts {
                coeffs[offset + i] = Rational::from_integer((-1).into());
                offset += p.width();
            }
            rows.push(Constraint::eq(coeffs, Rational::zero()));
        }
        let mut offset = k;
        for p in parts {
            for r in &p.rows {
                let mut coeffs = vec![Rational::zero(); width];
                coeffs[offset..offset + p.width()].clone_from_slice(&r.coeffs);
                rows.push(Constraint::new(coeffs, r.relation, r.rhs.clone()));
            }
            offset += p.width();
        }
        Ok(LiftedPolyhedron {
            main_dim: k,
            lift_dim: lift,
            rows,
        })
    }

    /// `{ lambda x : x in P }` for `lambda > 0`.
    pub fn scaled(&self, lambda: &Rational) -> Result<LiftedPolyhedron> {
        if !lambda.is_positive() {
            return Err(Error::InvalidInput("scaling factor must be positive".into()));
        }
        Ok(LiftedPolyhedron {
            main_dim: self.main_dim,
            lift_dim: self.lift_dim,
            rows: self
                .rows
                .iter()
                .map(|r| Constraint::new(r.coeffs.clone(), r.relation, &r.rhs * lambda))
                .collect(),
        })
    }

    /// Explicit irredundant halfspace description of the projection onto the
    /// main coordinates.
    pub fn project(&self) -> Projection {
        projection::project(self)
    }

    /// Decide `Q ⊆ P` for the projected sets (`self` is `P`).
    pub fn contains(&self, q: &LiftedPolyhedron) -> Result<Containment> {
        if q.main_dim != self.main_dim {
            return Err(Error::dims("containment operand", self.main_dim, q.main_dim));
        }
        self.contains_projected(&self.project(), q)
    }

    /// As [`Self::contains`] with the projection of `self` supplied.
    pub fn contains_projected(&self, p: &Projection, q: &LiftedPolyhedron) -> Result<Containment> {
        let halfspaces = match p {
            Projection::Empty => {
                return Ok(match q.feasible_point() {
                    None => Containment {
                        holds: true,
                        witness: None,
                        violated: None,
                    },
                    Some(pt) => Containment {
                        holds: false,
                        witness: Some(pt[..q.main_dim].to_vec()),
                        violated: None,
                    },
                });
            }
            Projection::Halfspaces(h) => h,
        };
        for h in halfspaces {
            let s = q.support_with_point(&h.normal)?;
            let witness = match s.value {
                Extended::PosInfinity => {
                    // Q is empty.
                    return Ok(Containment {
                        holds: true,
                        witness: None,
                        violated: None,
                    });
                }
                Extended::Finite(ref v) if *v >= h.offset => continue,
                Extended::Finite(_) => s.point.expect("finite support has a minimizer"),
                Extended::NegInfinity => {
                    let point = s.point.expect("unbounded LP has a feasible point");
                    let ray = s.ray.expect("unbounded LP has a ray");
                    // Walk along the ray until the halfspace is violated.
                    let slope = dot(&h.normal, &ray);
                    let gap = dot(&h.normal, &point) - &h.offset;
                    let steps = if gap.is_negative() {
                        Rational::zero()
                    } else {
                        (gap / -slope).floor() + Rational::from_integer(1.into())
                    };
                    point.iter().zip(&ray).map(|(p, r)| p + &steps * r).collect()
                }
            };
            return Ok(Containment {
                holds: false,
                witness: Some(witness),
                violated: Some(h.clone()),
            });
        }
        Ok(Containment {
            holds: true,
            witness: None,
            violated: None,
        })
    }

    /// Quasi-interior membership for a polyhedral cone: `v` is in the cone
    /// and pairs strictly positively with every generator of the dual cone.
    pub fn qint_member(&self, v: &[Rational]) -> Result<bool> {
        self.check_arity(v, "quasi-interior candidate")?;
        if !self.is_cone() {
            return Err(Error::NotACone("right-hand sides must all be zero".into()));
        }
        if !self.contains_point(v)? {
            return Ok(false);
        }
        let gens = self.dual_generators();
        Ok(gens.iter().all(|g| dot(g, v).is_positive()))
    }

    /// Generators of the dual cone of a polyhedral cone: the normals of its
    /// irredundant halfspace description.
    pub fn dual_generators(&self) -> Vec<Vec<Rational>> {
        self.project()
            .halfspaces()
            .iter()
            .map(|h| h.normal.clone())
            .collect()
    }
}

pub(crate) fn unit(dim: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[i] = Rational::from_integer(1.into());
    v
}
