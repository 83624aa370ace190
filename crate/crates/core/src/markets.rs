//! Multi-period currency markets with proportional transaction costs.
//!
//! Each tree node carries a solvency cone `K(node)`. The date-`t` trading set
//! `C_t` holds the positions that are constant on the atoms below each
//! date-`t` node and lie in that node's cone. Superreplication regions use
//! the one-shot form `X + m in A + C_0 + ... + C_T`.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::acceptance::AcceptanceSet;
use crate::error::{Error, Result};
use crate::geometry::{unit, LiftedPolyhedron};
use crate::lp::{self, Constraint, LinearProgram, LpOutcome};
use crate::rational::{dot, Extended, Rational};
use crate::risk::{self, Direction, Mask, RiskRegion, Scalarization};
use crate::scenario::{tree_to_terminal_space, AdaptedProcess, EventTree, LeafMap, RandomVector, ScenarioSpace};

/// `{ x : <a, x> >= 0 for every normal a }`, a polyhedral cone containing the
/// nonnegative orthant. The normals generate the dual cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvencyCone {
    d: usize,
    normals: Vec<Vec<Rational>>,
}

impl SolvencyCone {
    pub fn from_inequalities(d: usize, normals: Vec<Vec<Rational>>) -> Result<Self> {
        if let Some(a) = normals.iter().find(|a| a.len() != d) {
            return Err(Error::dims("cone normal", d, a.len()));
        }
        let normals = normals
            .into_iter()
            .filter(|a| a.iter().any(|v| !v.is_zero()))
            .collect();
        let cone = SolvencyCone { d, normals };
        for i in 0..d {
            if !cone.contains(&unit(d, i)) {
                return Err(Error::AssumptionViolated(format!(
                    "solvency cone misses the positive unit vector {i}"
                )));
            }
        }
        Ok(cone)
    }

    /// The cone generated by `gens`, converted to inequalities once.
    pub fn from_generators(d: usize, gens: Vec<Vec<Rational>>) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.len() != d) {
            return Err(Error::dims("cone generator", d, g.len()));
        }
        let k = gens.len();
        let width = d + k;
        let mut rows = Vec::with_capacity(d + k);
        for i in 0..d {
            let mut c = vec![Rational::zero(); width];
            c[i] = Rational::one();
            for (j, g) in gens.iter().enumerate() {
                c[d + j] = -&g[i];
            }
            rows.push(Constraint::eq(c, Rational::zero()));
        }
        for j in 0..k {
            rows.push(Constraint::ge(unit(width, d + j), Rational::zero()));
        }
        let normals = LiftedPolyhedron::new(d, k, rows)?
            .project()
            .halfspaces()
            .iter()
            .map(|h| h.normal.clone())
            .collect();
        Self::from_inequalities(d, normals)
    }

    /// No trading: the orthant itself.
    pub fn no_trading(d: usize) -> Self {
        SolvencyCone {
            d,
            normals: (0..d).map(|i| unit(d, i)).collect(),
        }
    }

    /// Frictionless exchange at `prices` (numeraire units per asset).
    pub fn frictionless(prices: &[Rational]) -> Result<Self> {
        if prices.iter().any(|p| !p.is_positive()) {
            return Err(Error::InvalidInput("prices must be positive".into()));
        }
        Self::from_inequalities(prices.len(), vec![prices.to_vec()])
    }

    /// Cash and one stock with mid price `s`, selling at `bid * s` and
    /// buying at `ask * s`.
    pub fn bid_ask(s: &Rational, bid: &Rational, ask: &Rational) -> Result<Self> {
        if !s.is_positive() || !bid.is_positive() || bid > ask {
            return Err(Error::InvalidInput("need 0 < bid <= ask and a positive price".into()));
        }
        Self::from_inequalities(2, vec![vec![Rational::one(), bid * s], vec![Rational::one(), ask * s]])
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn normals(&self) -> &[Vec<Rational>] {
        &self.normals
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.normals.iter().all(|a| !dot(a, x).is_negative())
    }

    /// Membership in the dual cone, i.e. in the conic hull of the normals.
    pub fn dual_contains(&self, v: &[Rational]) -> Result<bool> {
        if v.len() != self.d {
            return Err(Error::dims("dual vector", self.d, v.len()));
        }
        let k = self.normals.len();
        let mut lp = LinearProgram::feasibility(k);
        for i in 0..self.d {
            let row = self.normals.iter().map(|a| a[i].clone()).collect();
            lp = lp.with_constraint(Constraint::eq(row, v[i].clone()));
        }
        for j in 0..k {
            lp = lp.with_nonnegative(j);
        }
        Ok(!lp::solve(&lp)?.is_infeasible())
    }

    pub fn polyhedron(&self) -> LiftedPolyhedron {
        let rows = self
            .normals
            .iter()
            .map(|a| Constraint::ge(a.clone(), Rational::zero()))
            .collect();
        LiftedPolyhedron::new(self.d, 0, rows).expect("normals have the cone dimension")
    }
}

#[derive(Clone, Debug)]
pub struct MarketModel {
    tree: EventTree,
    leaf_map: LeafMap,
    cones: Vec<SolvencyCone>,
    acceptance: AcceptanceSet,
}

/// Terminal value `Z` of a consistent pricing system and the process of its
/// conditional expectations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PricingSystem {
    pub z: RandomVector,
    pub process: AdaptedProcess,
}

/// The three support values whose sum is the support of the augmented set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaDecomposition {
    pub acceptance: Extended,
    pub initial: Extended,
    pub later: Extended,
    pub total: Extended,
}

impl MarketModel {
    pub fn new(tree: EventTree, cones: Vec<SolvencyCone>, acceptance: AcceptanceSet) -> Result<Self> {
        if cones.len() != tree.len() {
            return Err(Error::dims("solvency cones", tree.len(), cones.len()));
        }
        let d = acceptance.dim();
        if let Some(c) = cones.iter().find(|c| c.dim() != d) {
            return Err(Error::dims("solvency cone dimension", d, c.dim()));
        }
        let (space, leaf_map) = tree_to_terminal_space(&tree);
        if **acceptance.space() != space {
            return Err(Error::InvalidInput(
                "acceptance set must live on the terminal space of the tree".into(),
            ));
        }
        Ok(MarketModel {
            tree,
            leaf_map,
            cones,
            acceptance,
        })
    }

    pub fn tree(&self) -> &EventTree {
        &self.tree
    }

    pub fn leaf_map(&self) -> &LeafMap {
        &self.leaf_map
    }

    pub fn space(&self) -> &Arc<ScenarioSpace> {
        self.acceptance.space()
    }

    pub fn dim(&self) -> usize {
        self.acceptance.dim()
    }

    pub fn cones(&self) -> &[SolvencyCone] {
        &self.cones
    }

    pub fn acceptance(&self) -> &AcceptanceSet {
        &self.acceptance
    }

    fn atoms(&self) -> usize {
        self.leaf_map.leaves.len()
    }

    /// `C_t` over the flattened terminal coordinates, one lift block per
    /// date-`t` node.
    pub fn date_cone(&self, t: usize) -> LiftedPolyhedron {
        let d = self.dim();
        let n = self.atoms();
        let nd = n * d;
        let nodes: Vec<usize> = self.tree.nodes_at(t).collect();
        let width = nd + nodes.len() * d;
        let block = |node: usize| nd + d * nodes.iter().position(|&k| k == node).expect("node at date t");
        let mut rows = Vec::new();
        for (s, &leaf) in self.leaf_map.leaves.iter().enumerate() {
            let b = block(self.tree.ancestor_at(leaf, t));
            for i in 0..d {
                let mut c = vec![Rational::zero(); width];
                c[s * d + i] = Rational::one();
                c[b + i] = -Rational::one();
                rows.push(Constraint::eq(c, Rational::zero()));
            }
        }
        for &k in &nodes {
            let b = block(k);
            for a in self.cones[k].normals() {
                let mut c = vec![Rational::zero(); width];
                c[b..b + d].clone_from_slice(a);
                rows.push(Constraint::ge(c, Rational::zero()));
            }
        }
        LiftedPolyhedron::new(nd, nodes.len() * d, rows).expect("rows share the lifted width")
    }

    fn later_cones(&self) -> Result<LiftedPolyhedron> {
        let cones: Vec<LiftedPolyhedron> = (1..=self.tree.horizon()).map(|t| self.date_cone(t)).collect();
        if cones.is_empty() {
            let nd = self.atoms() * self.dim();
            let rows = (0..nd).map(|k| Constraint::eq(unit(nd, k), Rational::zero())).collect();
            return LiftedPolyhedron::new(nd, 0, rows);
        }
        LiftedPolyhedron::minkowski_sum(&cones.iter().collect::<Vec<_>>())
    }

    /// `A + C_0 + ... + C_T`.
    pub fn augmented(&self) -> Result<AcceptanceSet> {
        let cones: Vec<LiftedPolyhedron> = (0..=self.tree.horizon()).map(|t| self.date_cone(t)).collect();
        self.acceptance
            .minkowski_augment(&cones, format!("market[{}]", self.acceptance.label()))
    }

    fn check_terminal(&self, x: &RandomVector) -> Result<()> {
        if **x.space() != **self.space() {
            return Err(Error::InvalidInput("position must live on the leaves of the tree".into()));
        }
        if x.dim() != self.dim() {
            return Err(Error::dims("position dimension", self.dim(), x.dim()));
        }
        Ok(())
    }

    /// Initial portfolios that superreplicate `X`.
    pub fn superreplication_region(&self, x: &RandomVector) -> Result<RiskRegion> {
        self.check_terminal(x)?;
        risk::risk_region(&self.augmented()?, x, &Mask::full(self.dim()))
    }

    /// Cheapest superreplicating initial portfolio valued at `w`.
    pub fn superreplication_value(&self, x: &RandomVector, w: &Direction) -> Result<Scalarization> {
        self.check_terminal(x)?;
        risk::rho(&self.augmented()?, x, w, &Mask::full(self.dim()))
    }

    pub fn sigma_decomposition(&self, z: &RandomVector) -> Result<SigmaDecomposition> {
        self.check_terminal(z)?;
        let psi = z.as_functional();
        let acceptance = self.acceptance.support(z)?;
        let initial = self.date_cone(0).support(&psi)?;
        let later = self.later_cones()?.support(&psi)?;
        let total = self.augmented()?.support(z)?;
        if acceptance.clone() + initial.clone() + later.clone() != total {
            return Err(Error::Inconsistent("support values are not additive".into()));
        }
        Ok(SigmaDecomposition {
            acceptance,
            initial,
            later,
            total,
        })
    }

    /// The program over pricing systems with `E[Z] = w`. Variables: `Z`
    /// (flat), dual-cone weights per node, then barrier multipliers for `A`.
    /// The objective is `-E[<X, Z>]` plus the lower bound on `sigma_A(Z)`.
    fn pricing_program(&self, w: &Direction, x: Option<&RandomVector>) -> Result<(LinearProgram, usize)> {
        let d = self.dim();
        if w.len() != d {
            return Err(Error::dims("direction", d, w.len()));
        }
        let n = self.atoms();
        let nd = n * d;
        let probs = self.space().probs();
        let weights: usize = self.cones.iter().map(|c| c.normals().len()).sum();
        let barrier = self.acceptance.body().barrier_system();
        let y_count = barrier.lift_dim();
        let width = nd + weights + y_count;

        let mut objective = vec![Rational::zero(); width];
        if let Some(x) = x {
            for (k, v) in x.flatten().iter().enumerate() {
                objective[k] = -(v * &probs[k / d]);
            }
        }
        let form = self.acceptance.body().barrier_value_form();
        objective[nd + weights..].clone_from_slice(&form[nd..]);
        let mut lp = LinearProgram::maximize(objective);

        for i in 0..d {
            let mut c = vec![Rational::zero(); width];
            for s in 0..n {
                c[s * d + i] = probs[s].clone();
            }
            lp = lp.with_constraint(Constraint::eq(c, w.w()[i].clone()));
        }
        // Unnormalized conditional expectations sum_{s below k} p_s Z_s must
        // be nonnegative combinations of the node's normals.
        let mut offset = nd;
        for (k, cone) in self.cones.iter().enumerate() {
            let atoms = self.tree.atoms_below(k, &self.leaf_map);
            for i in 0..d {
                let mut c = vec![Rational::zero(); width];
                for &s in &atoms {
                    c[s * d + i] = probs[s].clone();
                }
                for (j, a) in cone.normals().iter().enumerate() {
                    c[offset + j] = -&a[i];
                }
                lp = lp.with_constraint(Constraint::eq(c, Rational::zero()));
            }
            offset += cone.normals().len();
        }
        // Z in barr(A): the barrier system over psi = p Z.
        for r in barrier.rows() {
            let mut c = vec![Rational::zero(); width];
            for (k, a) in r.coeffs[..nd].iter().enumerate() {
                c[k] = a * &probs[k / d];
            }
            c[nd + weights..].clone_from_slice(&r.coeffs[nd..]);
            lp = lp.with_constraint(Constraint::new(c, r.relation, r.rhs.clone()));
        }
        for j in 0..nd + weights {
            lp = lp.with_nonnegative(j);
        }
        Ok((lp, nd))
    }

    /// A consistent pricing system with `E[Z] = w`, or `None` when the dual
    /// index set excludes `w`.
    pub fn find_pricing_system(&self, w: &Direction) -> Result<Option<PricingSystem>> {
        let (mut lp, nd) = self.pricing_program(w, None)?;
        lp.objective = vec![Rational::zero(); lp.num_vars()];
        match lp::solve(&lp)? {
            LpOutcome::Optimal(sol) => {
                let z = RandomVector::from_flat(self.space().clone(), self.dim(), &sol.primal[..nd])?;
                Ok(Some(self.validate_pricing_system(&z, w)?))
            }
            LpOutcome::Infeasible(_) => Ok(None),
            LpOutcome::Unbounded(_) => unreachable!("zero objective is bounded"),
        }
    }

    /// Check a candidate terminal value by direct substitution and return
    /// the full pricing system.
    pub fn validate_pricing_system(&self, z: &RandomVector, w: &Direction) -> Result<PricingSystem> {
        self.check_terminal(z)?;
        if z.rows().iter().flatten().any(Signed::is_negative) {
            return Err(Error::Inconsistent("pricing system has a negative entry".into()));
        }
        let process = AdaptedProcess::conditional_expectations(&self.tree, &self.leaf_map, z)?;
        if process.values[0] != w.w() {
            return Err(Error::Inconsistent("pricing system does not have mean w".into()));
        }
        for (k, v) in process.values.iter().enumerate() {
            if !self.cones[k].dual_contains(v)? {
                return Err(Error::Inconsistent(format!(
                    "conditional expectation at node {k} leaves the dual cone"
                )));
            }
        }
        if self.acceptance.support(z)? == Extended::NegInfinity {
            return Err(Error::Inconsistent("pricing system outside the barrier cone".into()));
        }
        Ok(PricingSystem { z: z.clone(), process })
    }

    /// `sup { sigma_A(Z) - E[<X, Z>] }` over pricing systems with `E[Z] = w`.
    pub fn pricing_system_value(&self, x: &RandomVector, w: &Direction) -> Result<Extended> {
        self.check_terminal(x)?;
        let (lp, _) = self.pricing_program(w, Some(x))?;
        Ok(lp::solve(&lp)?.extended_value(lp.sense))
    }

    /// The superreplication value through explicit admissible flows: an
    /// initial exchange, one rebalancing per node and a terminal adjustment.
    pub fn flow_value(&self, x: &RandomVector, w: &Direction) -> Result<Extended> {
        self.check_terminal(x)?;
        let d = self.dim();
        if w.len() != d {
            return Err(Error::dims("direction", d, w.len()));
        }
        let n = self.atoms();
        let nodes = self.tree.len();
        let body = self.acceptance.body();
        // Variables: m, node holdings h_k, terminal positions n_s, lifts of A.
        let h = |k: usize| d + k * d;
        let term = |s: usize| d + nodes * d + s * d;
        let lift = d + nodes * d + n * d;
        let width = lift + body.lift_dim();

        let mut objective = vec![Rational::zero(); width];
        objective[..d].clone_from_slice(w.w());
        let mut lp = LinearProgram::minimize(objective);
        let exchange = |lp: LinearProgram, from: usize, to: usize, cone: &SolvencyCone| {
            let mut lp = lp;
            for a in cone.normals() {
                let mut c = vec![Rational::zero(); width];
                for i in 0..d {
                    c[from + i] += &a[i];
                    c[to + i] -= &a[i];
                }
                lp = lp.with_constraint(Constraint::ge(c, Rational::zero()));
            }
            lp
        };
        lp = exchange(lp, 0, h(0), &self.cones[0]);
        for k in 1..nodes {
            let parent = self.tree.node(k).parent.expect("non-root nodes have parents");
            lp = exchange(lp, h(parent), h(k), &self.cones[k]);
        }
        for (s, &leaf) in self.leaf_map.leaves.iter().enumerate() {
            lp = exchange(lp, h(leaf), term(s), &self.cones[leaf]);
        }
        let x_flat = x.flatten();
        let nd = n * d;
        for r in body.rows() {
            let mut c = vec![Rational::zero(); width];
            c[term(0)..term(0) + nd].clone_from_slice(&r.coeffs[..nd]);
            c[lift..].clone_from_slice(&r.coeffs[nd..]);
            lp = lp.with_constraint(Constraint::new(c, r.relation, &r.rhs - dot(&r.coeffs[..nd], &x_flat)));
        }
        Ok(lp::solve(&lp)?.extended_value(lp.sense))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn binomial(cones: impl Fn(usize) -> SolvencyCone) -> MarketModel {
        let tree = EventTree::binary(1);
        let (space, _) = tree_to_terminal_space(&tree);
        let a = AcceptanceSet::worst_case(Arc::new(space), 2).unwrap();
        let cones = (0..tree.len()).map(&cones).collect();
        MarketModel::new(tree, cones, a).unwrap()
    }

    fn price(node: usize) -> Rational {
        match node {
            0 => int(1),
            1 => int(2),
            _ => ratio(1, 2),
        }
    }

    #[test]
    fn bid_ask_from_generators_matches_inequalities() {
        let s = int(2);
        let (b, a) = (ratio(9, 10), ratio(11, 10));
        let direct = SolvencyCone::bid_ask(&s, &b, &a).unwrap();
        let gens = vec![
            vec![int(1), int(0)],
            vec![int(0), int(1)],
            vec![-(&b * &s), int(1)],
            vec![&a * &s, int(-1)],
        ];
        let generated = SolvencyCone::from_generators(2, gens).unwrap();
        let mut x = direct.normals().to_vec();
        let mut y: Vec<Vec<Rational>> = generated.normals().to_vec();
        for v in x.iter_mut().chain(y.iter_mut()) {
            let lead = v[0].clone();
            v.iter_mut().for_each(|c| *c /= &lead);
        }
        x.sort();
        y.sort();
        assert_eq!(x, y);
    }

    #[test]
    fn cone_must_contain_orthant() {
        assert!(SolvencyCone::from_inequalities(2, vec![vec![int(1), int(-1)]]).is_err());
    }

    #[test]
    fn frictionless_binomial_prices_the_call() {
        let model = binomial(|k| SolvencyCone::frictionless(&[int(1), price(k)]).unwrap());
        let space = model.space().clone();
        let x = RandomVector::new(space, vec![vec![int(-1), int(0)], vec![int(0), int(0)]]).unwrap();
        let w = Direction::new(vec![int(1), int(1)]).unwrap();
        let v = model.superreplication_value(&x, &w).unwrap();
        assert_eq!(v.value, Extended::Finite(ratio(1, 3)));
        assert_eq!(model.pricing_system_value(&x, &w).unwrap(), Extended::Finite(ratio(1, 3)));
        assert_eq!(model.flow_value(&x, &w).unwrap(), Extended::Finite(ratio(1, 3)));
        let cps = model.find_pricing_system(&w).unwrap().unwrap();
        assert_eq!(cps.z.row(0), &[ratio(2, 3), ratio(4, 3)]);
        assert_eq!(cps.z.row(1), &[ratio(4, 3), ratio(2, 3)]);
    }
}
