//! Finite probability spaces, event trees and random vectors.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{dot, Rational};

/// A finite space of `n` atoms with strictly positive probabilities summing
/// to one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScenarioSpace {
    probs: Vec<Rational>,
}

impl ScenarioSpace {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidInput("scenario space needs at least one atom".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_positive()) {
            return Err(Error::InvalidInput(format!(
                "atom probabilities must be strictly positive, found {p}"
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidInput(format!(
                "atom probabilities sum to {total}, not 1"
            )));
        }
        Ok(ScenarioSpace { probs })
    }

    /// `n` equally likely atoms.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("scenario space needs at least one atom".into()));
        }
        let p = Rational::new(1.into(), (n as i64).into());
        Self::new(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }
}

/// An `n x d` array of rationals on a scenario space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomVector {
    space: Arc<ScenarioSpace>,
    values: Vec<Vec<Rational>>,
}

impl RandomVector {
    pub fn new(space: Arc<ScenarioSpace>, values: Vec<Vec<Rational>>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::dims("random vector rows", space.len(), values.len()));
        }
        let d = values[0].len();
        if d == 0 {
            return Err(Error::InvalidInput("random vectors need d >= 1".into()));
        }
        if let Some(row) = values.iter().find(|r| r.len() != d) {
            return Err(Error::dims("random vector coordinates", d, row.len()));
        }
        Ok(RandomVector { space, values })
    }

    /// The constant vector `m` on every atom.
    pub fn constant(space: Arc<ScenarioSpace>, m: &[Rational]) -> Result<Self> {
        let rows = vec![m.to_vec(); space.len()];
        Self::new(space, rows)
    }

    pub fn zeros(space: Arc<ScenarioSpace>, d: usize) -> Result<Self> {
        Self::constant(space, &vec![Rational::zero(); d])
    }

    pub fn space(&self) -> &Arc<ScenarioSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn row(&self, s: usize) -> &[Rational] {
        &self.values[s]
    }

    /// Column `i` as a scalar random variable.
    pub fn column(&self, i: usize) -> Vec<Rational> {
        self.values.iter().map(|r| r[i].clone()).collect()
    }

    /// Scenario-major flattening `(s, i) -> s * d + i`.
    pub fn flatten(&self) -> Vec<Rational> {
        self.values.iter().flatten().cloned().collect()
    }

    pub fn from_flat(space: Arc<ScenarioSpace>, d: usize, flat: &[Rational]) -> Result<Self> {
        if flat.len() != space.len() * d {
            return Err(Error::dims("flattened random vector", space.len() * d, flat.len()));
        }
        let rows = flat.chunks(d).map(<[Rational]>::to_vec).collect();
        Self::new(space, rows)
    }

    fn check_compatible(&self, other: &RandomVector) -> Result<()> {
        if self.space != other.space && *self.space != *other.space {
            return Err(Error::InvalidInput("random vectors live on different spaces".into()));
        }
        if self.dim() != other.dim() {
            return Err(Error::dims("random vector dimension", self.dim(), other.dim()));
        }
        Ok(())
    }

    /// `X + m` for a constant `m`.
    pub fn shifted(&self, m: &[Rational]) -> Result<Self> {
        if m.len() != self.dim() {
            return Err(Error::dims("constant shift", self.dim(), m.len()));
        }
        let rows = self
            .values
            .iter()
            .map(|r| r.iter().zip(m).map(|(x, y)| x + y).collect())
            .collect();
        Self::new(self.space.clone(), rows)
    }

    /// `a X + b Y`.
    pub fn combine(&self, a: &Rational, other: &RandomVector, b: &Rational) -> Result<Self> {
        self.check_compatible(other)?;
        let rows = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x.iter().zip(y).map(|(u, v)| a * u + b * v).collect())
            .collect();
        Self::new(self.space.clone(), rows)
    }

    /// Componentwise `X >= Y` on every atom.
    pub fn dominates(&self, other: &RandomVector) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(x, y)| x.iter().zip(y).all(|(u, v)| u >= v))
    }

    /// The functional `x -> E[<x, self>]` written in flat coordinates, i.e.
    /// `p_s * Z_{s,i}`.
    pub fn as_functional(&self) -> Vec<Rational> {
        self.values
            .iter()
            .zip(self.space.probs())
            .flat_map(|(row, p)| row.iter().map(move |z| p * z))
            .collect()
    }
}

/// `E[<X, Z>]`.
pub fn pair(x: &RandomVector, z: &RandomVector) -> Result<Rational> {
    x.check_compatible(z)?;
    Ok(x
        .values
        .iter()
        .zip(&z.values)
        .zip(x.space.probs())
        .map(|((a, b), p)| p * dot(a, b))
        .sum())
}

/// Componentwise expectation.
pub fn expectation(z: &RandomVector) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); z.dim()];
    for (row, p) in z.values.iter().zip(z.space.probs()) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += p * v;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub date: usize,
    pub parent: Option<usize>,
    /// Probability conditional on the parent; `1` for the root.
    pub cond_prob: Rational,
}

/// A finite filtration given as a rooted tree. Nodes are stored parents
/// first; every leaf sits at the final date.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventTree {
    nodes: Vec<TreeNode>,
    children: Vec<Vec<usize>>,
    horizon: usize,
}

impl EventTree {
    /// Build from `(parent, conditional probability)` pairs; node 0 must be
    /// the root.
    pub fn new(spec: Vec<(Option<usize>, Rational)>) -> Result<Self> {
        if spec.is_empty() {
            return Err(Error::InvalidInput("event tree has no nodes".into()));
        }
        let mut nodes: Vec<TreeNode> = Vec::with_capacity(spec.len());
        let mut children = vec![Vec::new(); spec.len()];
        for (k, (parent, prob)) in spec.into_iter().enumerate() {
            let date = match parent {
                None if k == 0 => 0,
                None => return Err(Error::InvalidInput(format!("node {k} has no parent; only node 0 may be the root"))),
                Some(p) if p >= k => {
                    return Err(Error::InvalidInput(format!(
                        "node {k} lists parent {p}; parents must precede children"
                    )))
                }
                Some(p) => {
                    children[p].push(k);
                    nodes[p].date + 1
                }
            };
            if k == 0 && !prob.is_one() {
                return Err(Error::InvalidInput("root probability must be 1".into()));
            }
            if !prob.is_positive() {
                return Err(Error::InvalidInput(format!(
                    "node {k} has non-positive conditional probability {prob}"
                )));
            }
            nodes.push(TreeNode {
                date,
                parent,
                cond_prob: prob,
            });
        }
        let horizon = nodes.iter().map(|n| n.date).max().unwrap_or(0);
        for (k, kids) in children.iter().enumerate() {
            if kids.is_empty() {
                if nodes[k].date != horizon {
                    return Err(Error::InvalidInput(format!(
                        "leaf {k} sits at date {} but the horizon is {horizon}",
                        nodes[k].date
                    )));
                }
                continue;
            }
            let total: Rational = kids.iter().map(|&c| nodes[c].cond_prob.clone()).sum();
            if !total.is_one() {
                return Err(Error::InvalidInput(format!(
                    "children of node {k} have conditional probabilities summing to {total}"
                )));
            }
        }
        Ok(EventTree {
            nodes,
            children,
            horizon,
        })
    }

    /// Uniform recombining-free binary tree of depth `horizon`.
    pub fn binary(horizon: usize) -> Self {
        let half = Rational::new(1.into(), 2.into());
        let mut spec = vec![(None, Rational::one())];
        let mut frontier = vec![0usize];
        for _ in 0..horizon {
            let mut next = Vec::new();
            for &p in &frontier {
                for _ in 0..2 {
                    spec.push((Some(p), half.clone()));
                    next.push(spec.len() - 1);
                }
            }
            frontier = next;
        }
        EventTree::new(spec).expect("binary tree is well formed")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn node(&self, k: usize) -> &TreeNode {
        &self.nodes[k]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn children(&self, k: usize) -> &[usize] {
        &self.children[k]
    }

    pub fn nodes_at(&self, date: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&k| self.nodes[k].date == date)
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&k| self.children[k].is_empty())
            .collect()
    }

    /// Unconditional probability of reaching node `k`.
    pub fn path_prob(&self, k: usize) -> Rational {
        let mut p = Rational::one();
        let mut cur = Some(k);
        while let Some(c) = cur {
            p *= &self.nodes[c].cond_prob;
            cur = self.nodes[c].parent;
        }
        p
    }

    /// Ancestor of `k` at `date` (or `k` itself).
    pub fn ancestor_at(&self, k: usize, date: usize) -> usize {
        let mut cur = k;
        while self.nodes[cur].date > date {
            cur = self.nodes[cur].parent.expect("non-root node has a parent");
        }
        cur
    }

    /// Leaves below node `k`, as atom indices of the terminal space.
    pub fn atoms_below(&self, k: usize, leaf_map: &LeafMap) -> Vec<usize> {
        leaf_map
            .leaves
            .iter()
            .enumerate()
            .filter(|(_, &leaf)| self.ancestor_at(leaf, self.nodes[k].date) == k)
            .map(|(atom, _)| atom)
            .collect()
    }
}

/// Correspondence between leaves of an [`EventTree`] and atoms of its
/// terminal [`ScenarioSpace`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafMap {
    /// `leaves[atom]` is the node id of that atom's leaf.
    pub leaves: Vec<usize>,
}

impl LeafMap {
    pub fn atom_of(&self, node: usize) -> Option<usize> {
        self.leaves.iter().position(|&l| l == node)
    }
}

/// One atom per leaf with the product of conditional probabilities along its
/// path.
pub fn tree_to_terminal_space(tree: &EventTree) -> (ScenarioSpace, LeafMap) {
    let leaves = tree.leaves();
    let probs = leaves.iter().map(|&l| tree.path_prob(l)).collect();
    let space = ScenarioSpace::new(probs).expect("path probabilities of a valid tree sum to one");
    (space, LeafMap { leaves })
}

/// A `d`-vector per tree node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedProcess {
    pub values: Vec<Vec<Rational>>,
}

impl AdaptedProcess {
    pub fn new(tree: &EventTree, values: Vec<Vec<Rational>>) -> Result<Self> {
        if values.len() != tree.len() {
            return Err(Error::dims("adapted process nodes", tree.len(), values.len()));
        }
        Ok(AdaptedProcess { values })
    }

    /// `E[Z | F_t]` at every node, for `Z` living on the tree's leaves.
    pub fn conditional_expectations(
        tree: &EventTree,
        leaf_map: &LeafMap,
        z: &RandomVector,
    ) -> Result<Self> {
        if z.space().len() != leaf_map.leaves.len() {
            return Err(Error::dims("terminal vector atoms", leaf_map.leaves.len(), z.space().len()));
        }
        let d = z.dim();
        let mut values = vec![vec![Rational::zero(); d]; tree.len()];
        // Leaves carry Z itself; interior nodes average their children.
        for (atom, &leaf) in leaf_map.leaves.iter().enumerate() {
            values[leaf] = z.row(atom).to_vec();
        }
        for k in (0..tree.len()).rev() {
            let kids = tree.children(k);
            if kids.is_empty() {
                continue;
            }
            let mut acc = vec![Rational::zero(); d];
            for &c in kids {
                let q = &tree.node(c).cond_prob;
                for (a, v) in acc.iter_mut().zip(&values[c]) {
                    *a += q * v;
                }
            }
            values[k] = acc;
        }
        Ok(AdaptedProcess { values })
    }
}
