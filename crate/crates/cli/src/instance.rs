//! Instance files: the JSON schema and its translation into engine objects.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use setrisk::acceptance::AcceptanceSet;
use setrisk::error::Error;
use setrisk::geometry::LiftedPolyhedron;
use setrisk::lp::Constraint;
use setrisk::markets::{MarketModel, SolvencyCone};
use setrisk::rational::{parse_rational, Rational};
use setrisk::risk::{Direction, Mask};
use setrisk::scenario::{tree_to_terminal_space, EventTree, RandomVector, ScenarioSpace};
use setrisk::systemic::{Aggregator, Piece};

use crate::CliError;

/// An exact rational read from a `"p/q"` string or a JSON integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct QVisitor;

        impl Visitor<'_> for QVisitor {
            type Value = Q;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as a \"p/q\" string or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                parse_rational(v).map(Q).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
        }

        deserializer.deserialize_any(QVisitor)
    }
}

fn unwrap_all(xs: Vec<Q>) -> Vec<Rational> {
    xs.into_iter().map(|q| q.0).collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default)]
    pub space: Option<SpaceSpec>,
    #[serde(default)]
    pub tree: Option<TreeSpec>,
    pub d: usize,
    pub acceptance: AcceptanceSpec,
    #[serde(rename = "M_mask", default)]
    pub m_mask: Option<Vec<usize>>,
    #[serde(default)]
    pub vectors: BTreeMap<String, Vec<Vec<Q>>>,
    #[serde(default)]
    pub directions: BTreeMap<String, Vec<Q>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub probs: Vec<Q>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeSpec {
    pub nodes: Vec<NodeSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub parent: Option<usize>,
    pub prob: Q,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AcceptanceSpec {
    WorstCase,
    Expectation,
    ExpectedShortfall { alpha: Vec<Q> },
    Systemic { aggregator: AggregatorSpec },
    /// Explicit rows `coeffs . X >= rhs` over the scenario-major flattening.
    Polyhedral { rows: Vec<RowSpec> },
    Market { base: Box<AcceptanceSpec>, cones: Vec<ConeSpec> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub coeffs: Vec<Q>,
    pub rhs: Q,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AggregatorSpec {
    WeightedLosses { alpha: Vec<Q> },
    Custom { pieces: Vec<Vec<PieceSpec>> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub slope: Q,
    pub intercept: Q,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConeSpec {
    NoTrading,
    Frictionless { prices: Vec<Q> },
    BidAsk { price: Q, bid: Q, ask: Q },
    Inequalities { normals: Vec<Vec<Q>> },
    Generators { vectors: Vec<Vec<Q>> },
}

/// A validated instance ready for computation.
#[derive(Debug)]
pub struct Instance {
    pub space: Arc<ScenarioSpace>,
    pub d: usize,
    /// The set used for regions and scalarizations; for markets this is the
    /// acceptance set augmented by the trading cones.
    pub acceptance: AcceptanceSet,
    pub market: Option<MarketModel>,
    pub aggregator: Option<Aggregator>,
    pub mask: Mask,
    pub vectors: BTreeMap<String, RandomVector>,
    pub directions: BTreeMap<String, Vec<Rational>>,
}

impl Instance {
    pub fn parse(text: &str) -> Result<Instance, CliError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| CliError::input(format!("schema: {e}")))?;
        Instance::load(file)
    }

    pub fn load(file: InstanceFile) -> Result<Instance, CliError> {
        let d = file.d;
        if d == 0 {
            return Err(CliError::input("d must be at least 1"));
        }
        let (space, tree) = match (file.space, file.tree) {
            (Some(s), None) => (ScenarioSpace::new(unwrap_all(s.probs))?, None),
            (None, Some(t)) => {
                let spec = t.nodes.into_iter().map(|n| (n.parent, n.prob.0)).collect();
                let tree = EventTree::new(spec)?;
                (tree_to_terminal_space(&tree).0, Some(tree))
            }
            _ => return Err(CliError::input("exactly one of \"space\" and \"tree\" is required")),
        };
        let space = Arc::new(space);
        let mut aggregator = None;
        let mut market = None;
        let acceptance = match file.acceptance {
            AcceptanceSpec::Market { base, cones } => {
                let tree = tree.ok_or_else(|| CliError::input("market instances need a \"tree\""))?;
                let base = build_static(&base, &space, d, &mut aggregator)?;
                let cones = cones.into_iter().map(|c| build_cone(c, d)).collect::<Result<Vec<_>, _>>()?;
                let model = MarketModel::new(tree, cones, base)?;
                let augmented = model.augmented()?;
                market = Some(model);
                augmented
            }
            other => build_static(&other, &space, d, &mut aggregator)?,
        };
        let mask = match file.m_mask {
            Some(coords) => Mask::new(d, coords)?,
            None => Mask::full(d),
        };
        let vectors = file
            .vectors
            .into_iter()
            .map(|(name, rows)| {
                let rows: Vec<Vec<Rational>> = rows.into_iter().map(unwrap_all).collect();
                if let Some(r) = rows.iter().find(|r| r.len() != d) {
                    return Err(CliError::input(format!(
                        "vector {name:?} has a row of length {}, expected {d}",
                        r.len()
                    )));
                }
                let v = RandomVector::new(space.clone(), rows)
                    .map_err(|e| CliError::input(format!("vector {name:?}: {e}")))?;
                Ok((name, v))
            })
            .collect::<Result<_, CliError>>()?;
        let directions = file
            .directions
            .into_iter()
            .map(|(name, w)| (name, unwrap_all(w)))
            .collect();
        Ok(Instance {
            space,
            d,
            acceptance,
            market,
            aggregator,
            mask,
            vectors,
            directions,
        })
    }

    pub fn vector(&self, name: &str) -> Result<&RandomVector, CliError> {
        self.vectors
            .get(name)
            .ok_or_else(|| CliError::input(format!("no vector named {name:?}")))
    }

    /// The named direction, which must match the active mask.
    pub fn direction(&self, name: &str, mask: &Mask) -> Result<Direction, CliError> {
        let w = self
            .directions
            .get(name)
            .ok_or_else(|| CliError::input(format!("no direction named {name:?}")))?;
        if w.len() != mask.len() {
            return Err(CliError::input(format!(
                "direction {name:?} has {} entries but the mask has {}",
                w.len(),
                mask.len()
            )));
        }
        Ok(Direction::new(w.clone())?)
    }
}

fn build_static(
    spec: &AcceptanceSpec,
    space: &Arc<ScenarioSpace>,
    d: usize,
    aggregator: &mut Option<Aggregator>,
) -> Result<AcceptanceSet, CliError> {
    let set = match spec {
        AcceptanceSpec::WorstCase => AcceptanceSet::worst_case(space.clone(), d)?,
        AcceptanceSpec::Expectation => {
            if d != 1 {
                return Err(CliError::input("the expectation set needs d = 1"));
            }
            AcceptanceSet::expectation_set(space.clone())?
        }
        AcceptanceSpec::ExpectedShortfall { alpha } => {
            let alpha: Vec<Rational> = alpha.iter().map(|q| q.0.clone()).collect();
            if alpha.len() != d {
                return Err(CliError::input(format!("alpha has {} levels, expected {d}", alpha.len())));
            }
            AcceptanceSet::expected_shortfall_set(space.clone(), &alpha)?
        }
        AcceptanceSpec::Systemic { aggregator: spec } => {
            let l = match spec {
                AggregatorSpec::WeightedLosses { alpha } => {
                    Aggregator::weighted_losses(alpha.iter().map(|q| q.0.clone()).collect())?
                }
                AggregatorSpec::Custom { pieces } => Aggregator::custom(
                    pieces
                        .iter()
                        .map(|ps| {
                            ps.iter()
                                .map(|p| Piece {
                                    slope: p.slope.0.clone(),
                                    intercept: p.intercept.0.clone(),
                                })
                                .collect()
                        })
                        .collect(),
                )?,
            };
            if l.dim() != d {
                return Err(CliError::input(format!("aggregator has {} coordinates, expected {d}", l.dim())));
            }
            let set = l.preimage_of_expectation(space.clone())?;
            *aggregator = Some(l);
            set
        }
        AcceptanceSpec::Polyhedral { rows } => {
            let nd = space.len() * d;
            let rows = rows
                .iter()
                .map(|r| {
                    if r.coeffs.len() != nd {
                        return Err(CliError::input(format!(
                            "polyhedral row has {} coefficients, expected {nd}",
                            r.coeffs.len()
                        )));
                    }
                    let coeffs = r.coeffs.iter().map(|q| q.0.clone()).collect();
                    Ok(Constraint::ge(coeffs, r.rhs.0.clone()))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let body = LiftedPolyhedron::new(nd, 0, rows)?;
            AcceptanceSet::from_body(space.clone(), d, body, "polyhedral")?
        }
        AcceptanceSpec::Market { .. } => {
            return Err(CliError::input("a market cannot be the base of another market"));
        }
    };
    Ok(set)
}

fn build_cone(spec: ConeSpec, d: usize) -> Result<SolvencyCone, Error> {
    let rows = |xs: Vec<Vec<Q>>| xs.into_iter().map(unwrap_all).collect::<Vec<_>>();
    let cone = match spec {
        ConeSpec::NoTrading => SolvencyCone::no_trading(d),
        ConeSpec::Frictionless { prices } => SolvencyCone::frictionless(&unwrap_all(prices))?,
        ConeSpec::BidAsk { price, bid, ask } => SolvencyCone::bid_ask(&price.0, &bid.0, &ask.0)?,
        ConeSpec::Inequalities { normals } => SolvencyCone::from_inequalities(d, rows(normals))?,
        ConeSpec::Generators { vectors } => SolvencyCone::from_generators(d, rows(vectors))?,
    };
    Ok(cone)
}
