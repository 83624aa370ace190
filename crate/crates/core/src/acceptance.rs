//! Polyhedral acceptance sets over scenario coordinates.
//!
//! A position `X` on `n` atoms with `d` coordinates is flattened
//! scenario-major, so the main variable `s * d + i` holds `X_{s,i}`.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{unit, LiftedPolyhedron};
use crate::lp::{self, Constraint, LinearProgram, LpOutcome};
use crate::rational::{Extended, Rational};
use crate::scenario::{RandomVector, ScenarioSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcceptanceSet {
    space: Arc<ScenarioSpace>,
    d: usize,
    body: LiftedPolyhedron,
    is_cone: bool,
    label: String,
}

impl AcceptanceSet {
    /// Build from an explicit body, checking nonemptiness, properness and
    /// absorption of the nonnegative orthant.
    pub fn from_body(
        space: Arc<ScenarioSpace>,
        d: usize,
        body: LiftedPolyhedron,
        label: impl Into<String>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("acceptance sets need d >= 1".into()));
        }
        let nd = space.len() * d;
        if body.main_dim() != nd {
            return Err(Error::dims("acceptance body", nd, body.main_dim()));
        }
        let is_cone = body.is_cone();
        let set = AcceptanceSet {
            space,
            d,
            body,
            is_cone,
            label: label.into(),
        };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        if self.body.is_empty() {
            return Err(Error::EmptySet(format!("acceptance set {} is empty", self.label)));
        }
        let nd = self.body.main_dim();
        for k in 0..nd {
            if !self.body.recession_ray_check(&unit(nd, k))? {
                return Err(Error::AssumptionViolated(format!(
                    "acceptance set {} is not closed under adding positive positions (coordinate {k})",
                    self.label
                )));
            }
        }
        // For an upward-closed nonempty set, being everything is the same as
        // receding along the negative diagonal.
        let down = vec![-Rational::one(); nd];
        if self.body.recession_ray_check(&down)? {
            return Err(Error::AssumptionViolated(format!(
                "acceptance set {} is the whole space",
                self.label
            )));
        }
        Ok(())
    }

    /// `{ X : X >= 0 }`.
    pub fn worst_case(space: Arc<ScenarioSpace>, d: usize) -> Result<Self> {
        let nd = space.len() * d;
        Self::from_body(space, d, LiftedPolyhedron::orthant(nd), "worst_case")
    }

    /// `{ X : E[X] >= 0 }` for scalar positions.
    pub fn expectation_set(space: Arc<ScenarioSpace>) -> Result<Self> {
        let row = Constraint::ge(space.probs().to_vec(), Rational::zero());
        let body = LiftedPolyhedron::new(space.len(), 0, vec![row])?;
        Self::from_body(space, 1, body, "expectation")
    }

    /// `{ X : ES_{alpha_i}(X_i) <= 0 for all i }` in extended form: per
    /// coordinate a threshold `t_i` and shortfalls `u_{s,i} >= (t_i - X_{s,i})^+`
    /// with `(1/alpha_i) E[u_i] <= t_i`.
    pub fn expected_shortfall_set(space: Arc<ScenarioSpace>, alpha: &[Rational]) -> Result<Self> {
        check_levels(alpha)?;
        let n = space.len();
        let d = alpha.len();
        if d == 0 {
            return Err(Error::InvalidInput("expected shortfall needs at least one level".into()));
        }
        let nd = n * d;
        let block = n + 1;
        let width = nd + d * block;
        let t_col = |i: usize| nd + i * block;
        let u_col = |s: usize, i: usize| nd + i * block + 1 + s;
        let mut rows = Vec::with_capacity(d * (2 * n + 1));
        for (i, a) in alpha.iter().enumerate() {
            for s in 0..n {
                rows.push(Constraint::ge(unit(width, u_col(s, i)), Rational::zero()));
                let mut c = vec![Rational::zero(); width];
                c[u_col(s, i)] = Rational::one();
                c[t_col(i)] = -Rational::one();
                c[s * d + i] = Rational::one();
                rows.push(Constraint::ge(c, Rational::zero()));
            }
            let mut c = vec![Rational::zero(); width];
            c[t_col(i)] = Rational::one();
            for (s, p) in space.probs().iter().enumerate() {
                c[u_col(s, i)] = -(p / a);
            }
            rows.push(Constraint::ge(c, Rational::zero()));
        }
        let body = LiftedPolyhedron::new(nd, d * block, rows)?;
        let levels: Vec<String> = alpha.iter().map(ToString::to_string).collect();
        Self::from_body(space, d, body, format!("expected_shortfall[{}]", levels.join(",")))
    }

    /// `A + C_1 + ... + C_k` for cones `C_j` over the same coordinates.
    pub fn minkowski_augment(&self, cones: &[LiftedPolyhedron], label: impl Into<String>) -> Result<Self> {
        if cones.is_empty() {
            return Ok(self.clone());
        }
        for c in cones {
            if c.main_dim() != self.body.main_dim() {
                return Err(Error::dims("augmenting cone", self.body.main_dim(), c.main_dim()));
            }
            if !c.is_cone() {
                return Err(Error::NotACone("augmenting sets must be cones".into()));
            }
        }
        let mut parts = vec![&self.body];
        parts.extend(cones);
        let body = LiftedPolyhedron::minkowski_sum(&parts)?;
        let set = AcceptanceSet {
            space: self.space.clone(),
            d: self.d,
            body,
            is_cone: self.is_cone,
            label: label.into(),
        };
        set.validate()?;
        Ok(set)
    }

    pub fn space(&self) -> &Arc<ScenarioSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn body(&self) -> &LiftedPolyhedron {
        &self.body
    }

    pub fn is_cone(&self) -> bool {
        self.is_cone
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn check_vector(&self, x: &RandomVector) -> Result<()> {
        if x.space().len() != self.space.len() || x.space().probs() != self.space.probs() {
            return Err(Error::InvalidInput("position lives on a different scenario space".into()));
        }
        if x.dim() != self.d {
            return Err(Error::dims("position dimension", self.d, x.dim()));
        }
        Ok(())
    }

    pub fn contains(&self, x: &RandomVector) -> Result<bool> {
        self.check_vector(x)?;
        self.body.contains_point(&x.flatten())
    }

    /// `sigma_A(Z) = inf { E[<X, Z>] : X in A }`.
    pub fn support(&self, z: &RandomVector) -> Result<Extended> {
        self.check_vector(z)?;
        self.body.support(&z.as_functional())
    }
}

fn check_levels(alpha: &[Rational]) -> Result<()> {
    match alpha.iter().find(|a| !a.is_positive() || **a >= Rational::one()) {
        Some(a) => Err(Error::InvalidInput(format!(
            "shortfall level {a} is outside (0, 1)"
        ))),
        None => Ok(()),
    }
}

fn check_scalar(space: &ScenarioSpace, x: &[Rational], alpha: &Rational) -> Result<()> {
    check_levels(std::slice::from_ref(alpha))?;
    if x.len() != space.len() {
        return Err(Error::dims("scalar position", space.len(), x.len()));
    }
    Ok(())
}

/// Expected shortfall `-(1/alpha) * integral_0^alpha q_X(b) db` with the
/// left-continuous lower quantile.
pub fn es_value(space: &ScenarioSpace, x: &[Rational], alpha: &Rational) -> Result<Rational> {
    check_scalar(space, x, alpha)?;
    let mut atoms: Vec<(&Rational, &Rational)> = x.iter().zip(space.probs()).collect();
    atoms.sort_by(|a, b| a.0.cmp(b.0));
    let mut mass = Rational::zero();
    let mut integral = Rational::zero();
    for (value, p) in atoms {
        if mass >= *alpha {
            break;
        }
        let take = (alpha - &mass).min(p.clone());
        integral += value * &take;
        mass += take;
    }
    Ok(-integral / alpha)
}

/// `min_t { -t + (1/alpha) E[(t - X)^+] }` solved as an LP.
pub fn es_value_lp(space: &ScenarioSpace, x: &[Rational], alpha: &Rational) -> Result<Rational> {
    check_scalar(space, x, alpha)?;
    let n = space.len();
    // Variables: t, then u_s.
    let mut objective = vec![-Rational::one()];
    objective.extend(space.probs().iter().map(|p| p / alpha));
    let mut lp = LinearProgram::minimize(objective);
    for (s, xs) in x.iter().enumerate() {
        let mut c = vec![Rational::zero(); n + 1];
        c[0] = -Rational::one();
        c[s + 1] = Rational::one();
        lp = lp
            .with_constraint(Constraint::ge(c, -xs))
            .with_nonnegative(s + 1);
    }
    finite_optimum(lp)
}

/// `max { E[-X Z] : 0 <= Z <= 1/alpha, E[Z] = 1 }`.
pub fn es_value_dual(space: &ScenarioSpace, x: &[Rational], alpha: &Rational) -> Result<Rational> {
    check_scalar(space, x, alpha)?;
    let objective = x.iter().zip(space.probs()).map(|(v, p)| -(v * p)).collect();
    let mut lp = LinearProgram::maximize(objective)
        .with_constraint(Constraint::eq(space.probs().to_vec(), Rational::one()));
    for s in 0..space.len() {
        lp = lp.with_bounds(
            s,
            lp::VarBounds {
                lower: Some(Rational::zero()),
                upper: Some(alpha.recip()),
            },
        );
    }
    finite_optimum(lp)
}

fn finite_optimum(lp: LinearProgram) -> Result<Rational> {
    match lp::solve(&lp)? {
        LpOutcome::Optimal(sol) => Ok(sol.value),
        other => Err(Error::Inconsistent(format!(
            "shortfall program has no finite optimum: {other:?}"
        ))),
    }
}
