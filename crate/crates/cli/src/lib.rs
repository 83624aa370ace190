//! Batch front end: read an instance file, run one computation, emit JSON.
//!
//! Every rational leaves as a string (`"p"` or `"p/q"`), infinite values as
//! `"inf"` / `"-inf"`, and object keys are sorted, so identical inputs give
//! byte-identical output.

pub mod instance;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use setrisk::error::Error;
use setrisk::geometry::Halfspace;
use setrisk::preference::{compare, multi_utility_check_with, Separation};
use setrisk::rational::{parse_rational, Extended, Rational};
use setrisk::risk::{finiteness_report, risk_region, rho, rho_dual, Mask, RiskRegion};
use setrisk::scenario::RandomVector;

pub use instance::Instance;

/// Exit code for malformed input.
pub const EXIT_INPUT: i32 = 2;
/// Exit code when the mathematics refuses the instance.
pub const EXIT_ANOMALY: i32 = 3;
/// Exit code when two independent computations disagree.
pub const EXIT_CONSISTENCY: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn consistency(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONSISTENCY,
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.code {
            EXIT_INPUT => "input",
            EXIT_ANOMALY => "anomaly",
            _ => "consistency",
        }
    }

    /// Machine-readable diagnostic for stderr.
    pub fn to_json(&self) -> String {
        let v = json!({"error": {"code": self.code, "kind": self.kind(), "message": self.message}});
        format!("{v}\n")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. } | Error::InvalidInput(_) | Error::Parse(_) => EXIT_INPUT,
            Error::AssumptionViolated(_) | Error::EmptySet(_) | Error::NotACone(_) => EXIT_ANOMALY,
            Error::Inconsistent(_) => EXIT_CONSISTENCY,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "setrisk", version, about = "Exact set-valued risk measures on finite scenario spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Instance file (JSON).
    #[arg(long)]
    pub instance: PathBuf,
    /// Where to write the result.
    #[arg(long, default_value = "stdout")]
    pub output: String,
    /// Eligible injection coordinates, overriding the instance's M_mask.
    #[arg(long, value_delimiter = ',')]
    pub mask: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Risk region R(X) as sorted halfspaces.
    Region {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vector: String,
    },
    /// Decide the preference between two positions.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Scalarization along a direction, or its dual with a certificate.
    Scalar {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vector: String,
        #[arg(long)]
        direction: String,
        #[arg(long)]
        dual: bool,
    },
    /// A consistent pricing system with the given initial value.
    Cps {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        direction: String,
    },
    /// Concave conjugate of the aggregator at a point, and the support of
    /// the aggregated set at a named vector.
    Conjugate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long)]
        vector: Option<String>,
    },
    /// Sufficient conditions for finite scalarizations.
    Diag {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Region { common, .. }
            | Command::Compare { common, .. }
            | Command::Scalar { common, .. }
            | Command::Cps { common, .. }
            | Command::Conjugate { common, .. }
            | Command::Diag { common } => common,
        }
    }
}

/// Read the instance and run the command.
pub fn run(command: &Command) -> Result<Value, CliError> {
    let path = &command.common().instance;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let instance = Instance::parse(&text)?;
    execute(command, &instance)
}

/// Canonical text of a result.
pub fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values always serialize");
    s.push('\n');
    s
}

pub fn execute(command: &Command, inst: &Instance) -> Result<Value, CliError> {
    let mask = match &command.common().mask {
        Some(coords) => Mask::new(inst.d, coords.clone())?,
        None => inst.mask.clone(),
    };
    let a = &inst.acceptance;
    match command {
        Command::Region { vector, .. } => {
            let region = risk_region(a, inst.vector(vector)?, &mask)?;
            Ok(region_json(&region))
        }
        Command::Compare { x, y, .. } => {
            let (xv, yv) = (inst.vector(x)?, inst.vector(y)?);
            let verdict = compare(a, xv, yv, &mask)?;
            let record = multi_utility_check_with(a, xv, yv, &mask, &verdict)?;
            if !record.agree {
                return Err(CliError::consistency(format!(
                    "geometric verdict {} but scalar verdict {}",
                    verdict.verdict.as_str(),
                    record.scalar.as_str()
                )));
            }
            Ok(json!({
                "verdict": verdict.verdict.as_str(),
                "x": x,
                "y": y,
                "x_region": region_json(&verdict.x_region),
                "y_region": region_json(&verdict.y_region),
                "x_not_preferred": separation_json(verdict.x_not_preferred.as_ref()),
                "y_not_preferred": separation_json(verdict.y_not_preferred.as_ref()),
                "multi_utility": {
                    "agree": record.agree,
                    "scalar_verdict": record.scalar.as_str(),
                    "directions": record.directions.iter().map(|w| vec_json(w.w())).collect::<Vec<_>>(),
                },
            }))
        }
        Command::Scalar {
            vector, direction, dual, ..
        } => {
            let x = inst.vector(vector)?;
            let w = inst.direction(direction, &mask)?;
            if *dual {
                let out = rho_dual(a, x, &w, &mask)?;
                let certificate = match &out.certificate {
                    Some(c) => json!({"z": rows_json(&c.z), "sigma": q(&c.sigma)}),
                    None => Value::Null,
                };
                Ok(json!({"direction": vec_json(w.w()), "value": ext(&out.value), "certificate": certificate}))
            } else {
                let out = rho(a, x, &w, &mask)?;
                let optimizer = out.optimizer.as_deref().map_or(Value::Null, vec_json);
                Ok(json!({"direction": vec_json(w.w()), "value": ext(&out.value), "optimizer": optimizer}))
            }
        }
        Command::Cps { direction, .. } => {
            let model = inst
                .market
                .as_ref()
                .ok_or_else(|| CliError::input("cps needs a market instance"))?;
            let w = inst.direction(direction, &Mask::full(inst.d))?;
            let system = match model.find_pricing_system(&w)? {
                None => json!("none"),
                Some(found) => {
                    let checked = model.validate_pricing_system(&found.z, &w)?;
                    let tree = model.tree();
                    let process: Vec<Value> = checked
                        .process
                        .values
                        .iter()
                        .enumerate()
                        .map(|(k, v)| json!({"node": k, "date": tree.node(k).date, "value": vec_json(v)}))
                        .collect();
                    json!({"z": rows_json(&checked.z), "process": process})
                }
            };
            Ok(json!({"direction": vec_json(w.w()), "pricing_system": system}))
        }
        Command::Conjugate { z, vector, .. } => {
            let l = inst
                .aggregator
                .as_ref()
                .ok_or_else(|| CliError::input("conjugate needs a systemic instance"))?;
            if z.is_none() && vector.is_none() {
                return Err(CliError::input("conjugate needs --z or --vector"));
            }
            let mut out = serde_json::Map::new();
            if let Some(text) = z {
                let point = text
                    .split(',')
                    .map(parse_rational)
                    .collect::<Result<Vec<Rational>, _>>()?;
                let value = l.conjugate(&point)?;
                let closed = l.conjugate_closed_form(&point);
                if let Some(c) = &closed {
                    if *c != value {
                        return Err(CliError::consistency(format!(
                            "conjugate program gives {value}, closed form {c}"
                        )));
                    }
                }
                out.insert("z".into(), vec_json(&point));
                out.insert("conjugate".into(), ext(&value));
                out.insert("closed_form".into(), closed.as_ref().map_or(Value::Null, ext));
            }
            if let Some(name) = vector {
                let value = l.aggregated_support(inst.space.clone(), inst.vector(name)?)?;
                out.insert("aggregated_support".into(), ext(&value));
            }
            Ok(Value::Object(out))
        }
        Command::Diag { .. } => {
            let r = finiteness_report(a, &mask)?;
            let opt = |v: &Option<Vec<Rational>>| v.as_deref().map_or(Value::Null, vec_json);
            Ok(json!({
                "mask": mask.coords(),
                "fills_space": r.fills_space,
                "meets_qint_positive_cone": opt(&r.meets_qint_positive_cone),
                "meets_qint_recession_cone": opt(&r.meets_qint_recession_cone),
                "finite_guaranteed": r.finite_guaranteed(),
            }))
        }
    }
}

fn q(x: &Rational) -> Value {
    Value::String(x.to_string())
}

fn ext(x: &Extended) -> Value {
    Value::String(x.to_string())
}

fn vec_json(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(q).collect())
}

fn rows_json(z: &RandomVector) -> Value {
    Value::Array(z.rows().iter().map(|r| vec_json(r)).collect())
}

fn halfspace_json(h: &Halfspace) -> Value {
    json!({"normal": vec_json(&h.normal), "offset": q(&h.offset)})
}

pub fn region_json(region: &RiskRegion) -> Value {
    if region.is_empty() {
        return json!({"empty": true});
    }
    json!({
        "empty": false,
        "halfspaces": region.halfspaces().iter().map(halfspace_json).collect::<Vec<_>>(),
    })
}

fn separation_json(sep: Option<&Separation>) -> Value {
    match sep {
        None => Value::Null,
        Some(s) => json!({
            "witness": vec_json(&s.witness),
            "direction": vec_json(s.direction.w()),
            "rho_smaller": ext(&s.rho_smaller),
            "rho_larger": ext(&s.rho_larger),
        }),
    }
}
