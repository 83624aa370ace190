//! Systemic acceptance through a separable concave aggregation function.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::acceptance::AcceptanceSet;
use crate::error::{Error, Result};
use crate::geometry::LiftedPolyhedron;
use crate::lp::{self, Constraint, LinearProgram, LpOutcome};
use crate::rational::{Extended, Rational};
use crate::scenario::{RandomVector, ScenarioSpace};

/// An affine map `x -> slope * x + intercept`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub slope: Rational,
    pub intercept: Rational,
}

/// `Lambda(x) = sum_i min_j (a_ij x_i + b_ij)`, nondecreasing and concave.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aggregator {
    pieces: Vec<Vec<Piece>>,
    /// Loss weights when built by [`Aggregator::weighted_losses`].
    weights: Option<Vec<Rational>>,
}

impl Aggregator {
    /// `sum_i max(x_i, 0) + alpha_i min(x_i, 0)` with every `alpha_i > 1`.
    pub fn weighted_losses(alpha: Vec<Rational>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidInput("aggregator needs at least one coordinate".into()));
        }
        if let Some(a) = alpha.iter().find(|a| **a <= Rational::one()) {
            return Err(Error::InvalidInput(format!("loss weight {a} must exceed 1")));
        }
        let pieces = alpha
            .iter()
            .map(|a| {
                vec![
                    Piece {
                        slope: Rational::one(),
                        intercept: Rational::zero(),
                    },
                    Piece {
                        slope: a.clone(),
                        intercept: Rational::zero(),
                    },
                ]
            })
            .collect();
        Ok(Aggregator {
            pieces,
            weights: Some(alpha),
        })
    }

    pub fn custom(pieces: Vec<Vec<Piece>>) -> Result<Self> {
        if pieces.is_empty() || pieces.iter().any(Vec::is_empty) {
            return Err(Error::InvalidInput("every coordinate needs at least one piece".into()));
        }
        if pieces.iter().flatten().any(|p| p.slope.is_negative()) {
            return Err(Error::InvalidInput("aggregator slopes must be nonnegative".into()));
        }
        Ok(Aggregator {
            pieces,
            weights: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.pieces.len()
    }

    pub fn pieces(&self) -> &[Vec<Piece>] {
        &self.pieces
    }

    pub fn weights(&self) -> Option<&[Rational]> {
        self.weights.as_deref()
    }

    fn check(&self, x: &[Rational], context: &'static str) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::dims(context, self.dim(), x.len()));
        }
        Ok(())
    }

    pub fn aggregate(&self, x: &[Rational]) -> Result<Rational> {
        self.check(x, "aggregated position")?;
        Ok(self
            .pieces
            .iter()
            .zip(x)
            .map(|(ps, v)| {
                ps.iter()
                    .map(|p| &p.slope * v + &p.intercept)
                    .min()
                    .expect("pieces are nonempty")
            })
            .sum())
    }

    /// `Lambda^bullet(z) = inf_x { <x, z> - Lambda(x) }` by LP.
    pub fn conjugate(&self, z: &[Rational]) -> Result<Extended> {
        self.check(z, "conjugate argument")?;
        let d = self.dim();
        // Variables: x, then y with y_i <= each piece of coordinate i.
        let mut objective = z.to_vec();
        objective.extend((0..d).map(|_| -Rational::one()));
        let mut lp = LinearProgram::minimize(objective);
        for (i, ps) in self.pieces.iter().enumerate() {
            for p in ps {
                let mut c = vec![Rational::zero(); 2 * d];
                c[i] = p.slope.clone();
                c[d + i] = -Rational::one();
                lp = lp.with_constraint(Constraint::ge(c, -&p.intercept));
            }
        }
        Ok(lp::solve(&lp)?.extended_value(lp.sense))
    }

    /// Closed form for weighted losses: `0` on the box `[1, alpha]`, `-inf`
    /// elsewhere.
    pub fn conjugate_closed_form(&self, z: &[Rational]) -> Option<Extended> {
        let alpha = self.weights()?;
        let inside = z
            .iter()
            .zip(alpha)
            .all(|(v, a)| *v >= Rational::one() && v <= a);
        Some(if inside {
            Extended::Finite(Rational::zero())
        } else {
            Extended::NegInfinity
        })
    }

    /// `{ X : Lambda(X) in outer }` where `outer` is an upward-closed scalar
    /// acceptance set on the same space. Per atom `y_{s,i}` lies below every
    /// piece and `v_s = sum_i y_{s,i}` enters `outer`.
    pub fn preimage_acceptance(&self, outer: &AcceptanceSet) -> Result<AcceptanceSet> {
        if outer.dim() != 1 {
            return Err(Error::dims("outer acceptance dimension", 1, outer.dim()));
        }
        let space = outer.space().clone();
        let n = space.len();
        let d = self.dim();
        let nd = n * d;
        let ob = outer.body();
        // Variables: x, y, v, outer lifts.
        let y = |s: usize, i: usize| nd + s * d + i;
        let v = |s: usize| 2 * nd + s;
        let lift = 2 * nd + n;
        let width = lift + ob.lift_dim();
        let mut rows = Vec::new();
        for s in 0..n {
            for (i, ps) in self.pieces.iter().enumerate() {
                for p in ps {
                    let mut c = vec![Rational::zero(); width];
                    c[s * d + i] = p.slope.clone();
                    c[y(s, i)] = -Rational::one();
                    rows.push(Constraint::ge(c, -&p.intercept));
                }
            }
            let mut c = vec![Rational::zero(); width];
            c[v(s)] = Rational::one();
            for i in 0..d {
                c[y(s, i)] = -Rational::one();
            }
            rows.push(Constraint::eq(c, Rational::zero()));
        }
        for r in ob.rows() {
            let mut c = vec![Rational::zero(); width];
            c[v(0)..v(0) + n].clone_from_slice(&r.coeffs[..n]);
            c[lift..].clone_from_slice(&r.coeffs[n..]);
            rows.push(Constraint::new(c, r.relation, r.rhs.clone()));
        }
        let body = LiftedPolyhedron::new(nd, width - nd, rows)?;
        AcceptanceSet::from_body(space, d, body, format!("systemic[{}]", outer.label()))
    }

    /// Preimage of `{ E[X] >= 0 }`.
    pub fn preimage_of_expectation(&self, space: Arc<ScenarioSpace>) -> Result<AcceptanceSet> {
        self.preimage_acceptance(&AcceptanceSet::expectation_set(space)?)
    }

    /// Support of the preimage of `{ E[X] >= 0 }` at `Z`, computed by LP and,
    /// for weighted losses, through the test `lambda e <= Z <= lambda alpha`.
    /// The two must agree.
    pub fn aggregated_support(&self, space: Arc<ScenarioSpace>, z: &RandomVector) -> Result<Extended> {
        let set = self.preimage_of_expectation(space)?;
        let by_lp = set.support(z)?;
        if let Some(alpha) = self.weights() {
            let closed = if scale_exists(z, alpha)? {
                Extended::Finite(Rational::zero())
            } else {
                Extended::NegInfinity
            };
            if closed != by_lp {
                return Err(Error::Inconsistent(format!(
                    "aggregated support disagrees: program {by_lp}, closed form {closed}"
                )));
            }
        }
        Ok(by_lp)
    }
}

/// Whether some `lambda >= 0` has `lambda <= Z_{s,i} <= lambda alpha_i`.
pub fn scale_exists(z: &RandomVector, alpha: &[Rational]) -> Result<bool> {
    if z.dim() != alpha.len() {
        return Err(Error::dims("dual element dimension", alpha.len(), z.dim()));
    }
    let mut lp = LinearProgram::feasibility(1).with_nonnegative(0);
    for row in z.rows() {
        for (v, a) in row.iter().zip(alpha) {
            lp = lp
                .with_constraint(Constraint::le(vec![Rational::one()], v.clone()))
                .with_constraint(Constraint::ge(vec![a.clone()], v.clone()));
        }
    }
    Ok(matches!(lp::solve(&lp)?, LpOutcome::Optimal(_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().copied().map(int).collect()
    }

    #[test]
    fn aggregate_examples() {
        let l = Aggregator::weighted_losses(v(&[2, 3])).unwrap();
        assert_eq!(l.aggregate(&v(&[0, 0])).unwrap(), int(0));
        assert_eq!(l.aggregate(&v(&[1, -1])).unwrap(), int(-2));
        assert_eq!(l.aggregate(&v(&[2, 5])).unwrap(), int(7));
        assert!(Aggregator::weighted_losses(v(&[1, 2])).is_err());
    }

    #[test]
    fn conjugate_examples() {
        let l = Aggregator::weighted_losses(v(&[2, 3])).unwrap();
        assert_eq!(l.conjugate(&v(&[1, 1])).unwrap(), Extended::Finite(int(0)));
        assert_eq!(l.conjugate(&[ratio(1, 2), int(1)]).unwrap(), Extended::NegInfinity);
        assert_eq!(l.conjugate(&v(&[2, 3])).unwrap(), Extended::Finite(int(0)));
    }

    #[test]
    fn preimage_membership() {
        let space = Arc::new(ScenarioSpace::uniform(2).unwrap());
        let l = Aggregator::weighted_losses(v(&[2])).unwrap();
        let a = l.preimage_of_expectation(space.clone()).unwrap();
        let x = RandomVector::new(space.clone(), vec![v(&[3]), v(&[-1])]).unwrap();
        assert!(a.contains(&x).unwrap());
        let x = RandomVector::new(space, vec![v(&[1]), v(&[-1])]).unwrap();
        assert!(!a.contains(&x).unwrap());
    }

    #[test]
    fn aggregated_support_examples() {
        let space = Arc::new(ScenarioSpace::uniform(2).unwrap());
        let l = Aggregator::weighted_losses(v(&[2, 2])).unwrap();
        let ones = RandomVector::new(space.clone(), vec![v(&[1, 1]), v(&[1, 1])]).unwrap();
        assert_eq!(l.aggregated_support(space.clone(), &ones).unwrap(), Extended::Finite(int(0)));
        let zero = RandomVector::zeros(space.clone(), 2).unwrap();
        assert_eq!(l.aggregated_support(space.clone(), &zero).unwrap(), Extended::Finite(int(0)));
        let off = RandomVector::new(space.clone(), vec![v(&[1, 3]), v(&[1, 1])]).unwrap();
        assert_eq!(l.aggregated_support(space, &off).unwrap(), Extended::NegInfinity);
    }
}
