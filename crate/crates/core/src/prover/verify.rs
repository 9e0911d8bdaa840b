//! Independent certificate checking.
//!
//! The verifier never searches for proofs. For every node it re-parses the
//! claimed system, re-expands the named rule from the system and the
//! parameters, compares the recorded side conditions with the recomputed
//! ones, checks that they hold and that the children are exactly the
//! systems the rule asks for, and recomputes the value. Oracle leaves are
//! re-run first, in parallel.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::certificate::{Assertion, Certificate, Child, OracleStamp, ProofNode, Rule, VERSION};
use super::rules::{self, Conclusion};
use crate::error::{Error, Result};
use crate::oracle::{self, FieldConfig};
use crate::systems::LinearSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    /// `path` locates the failing node, e.g. `/children/1/children/0`; the
    /// root is `/`.
    Reject { path: String, reason: String },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept => f.write_str("Accept"),
            Verdict::Reject { path, reason } => write!(f, "Reject at {path}: {reason}"),
        }
    }
}

struct Rejection {
    path: String,
    reason: String,
}

type Check<T> = std::result::Result<T, Rejection>;

fn reject<T>(path: &str, reason: impl Into<String>) -> Check<T> {
    Err(Rejection {
        path: if path.is_empty() { "/".into() } else { path.to_string() },
        reason: reason.into(),
    })
}

type OracleKey = (String, OracleStamp);

/// Checks `cert`. `cfg` supplies the column budget and subspace sampling
/// path for oracle leaves; prime, seed and trials come from each leaf.
///
/// Budget overruns are errors rather than rejections: they say nothing
/// about the certificate.
pub fn verify(cert: &Certificate, cfg: &FieldConfig) -> Result<Verdict> {
    if cert.version != VERSION {
        return Ok(Verdict::Reject {
            path: "/".into(),
            reason: format!("unsupported certificate version {}", cert.version),
        });
    }
    let oracle_dims = run_oracles(cert, cfg)?;
    let mut done = HashMap::new();
    Ok(match check(&cert.root, "", &oracle_dims, &mut done) {
        Ok(_) => Verdict::Accept,
        Err(r) => Verdict::Reject {
            path: r.path,
            reason: r.reason,
        },
    })
}

fn run_oracles(cert: &Certificate, cfg: &FieldConfig) -> Result<HashMap<OracleKey, BigInt>> {
    let mut keys: Vec<OracleKey> = cert
        .nodes()
        .into_iter()
        .filter(|(_, n)| n.rule == Rule::Oracle)
        .filter_map(|(_, n)| n.oracle.map(|s| (n.claim.system.clone(), s)))
        .collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.seed.cmp(&b.1.seed)));
    keys.dedup();
    let dims: Vec<Result<Option<BigInt>>> = keys
        .par_iter()
        .map(|(text, stamp)| {
            // unparsable systems are rejected in the main pass
            let Ok(sys) = text.parse::<LinearSystem>() else {
                return Ok(None);
            };
            let field = FieldConfig {
                prime: stamp.prime,
                seed: stamp.seed,
                trials: stamp.trials,
                cross_check_prime: None,
                ..cfg.clone()
            };
            match oracle::dimension(&sys, &field) {
                Ok(report) => Ok(Some(report.dim)),
                Err(Error::Budget { columns, max }) => Err(Error::Budget { columns, max }),
                // a bad prime or trial count is the certificate's fault
                Err(_) => Ok(None),
            }
        })
        .collect();
    let mut out = HashMap::new();
    for (k, d) in keys.into_iter().zip(dims) {
        if let Some(d) = d? {
            out.insert(k, d);
        }
    }
    Ok(out)
}

fn check(
    node: &ProofNode,
    path: &str,
    oracle_dims: &HashMap<OracleKey, BigInt>,
    done: &mut HashMap<String, BigInt>,
) -> Check<BigInt> {
    let text = &node.claim.system;
    let sys: LinearSystem = match text.parse() {
        Ok(s) => s,
        Err(e) => return reject(path, format!("unparsable system {text:?}: {e}")),
    };
    if sys.to_string() != *text {
        return reject(path, format!("system {text:?} is not in canonical form {sys}"));
    }
    let value = &node.claim.value;
    if *value < BigInt::from(-1) {
        return reject(path, format!("claimed dimension {value} is below -1"));
    }
    let label = Assertion::for_value(&sys, value);
    if node.claim.assert != label {
        return reject(
            path,
            format!(
                "claim says {} but dimension {value} of {text} means {}",
                node.claim.assert.name(),
                label.name()
            ),
        );
    }

    if node.rule == Rule::Oracle {
        if !node.params.is_empty() || !node.side_conditions.is_empty() || !node.children.is_empty() {
            return reject(path, "ORACLE leaves carry no parameters, side conditions or children");
        }
        let Some(stamp) = node.oracle else {
            return reject(path, "ORACLE leaf without prime, seed and trials");
        };
        let Some(dim) = oracle_dims.get(&(text.clone(), stamp)) else {
            return reject(path, format!("oracle cannot run with {stamp:?}"));
        };
        if dim != value {
            return reject(path, format!("oracle finds dimension {dim} for {text}, claim is {value}"));
        }
        done.insert(text.clone(), value.clone());
        return Ok(value.clone());
    }
    if node.oracle.is_some() {
        return reject(path, format!("{} node carries an oracle stamp", node.rule));
    }

    let exp = match rules::expand(node.rule, &node.params, &sys) {
        Ok(e) => e,
        Err(e) => return reject(path, format!("{} does not apply: {e}", node.rule)),
    };
    if exp.side_conditions.len() != node.side_conditions.len() {
        return reject(
            path,
            format!(
                "{} records {} side conditions, recomputation gives {}",
                node.rule,
                node.side_conditions.len(),
                exp.side_conditions.len()
            ),
        );
    }
    for (got, want) in node.side_conditions.iter().zip(&exp.side_conditions) {
        if got != want {
            return reject(
                path,
                format!("side condition {}: recorded {got}, recomputed {want}", want.name),
            );
        }
    }
    match exp.failing_condition() {
        Ok(None) => {}
        Ok(Some(c)) => {
            return reject(path, format!("side condition {} = {} violates {}", c.name, c.value, c.relation))
        }
        Err(e) => return reject(path, e.to_string()),
    }
    if exp.children.len() != node.children.len() {
        return reject(
            path,
            format!(
                "{} needs {} subgoals, certificate has {}",
                node.rule,
                exp.children.len(),
                node.children.len()
            ),
        );
    }
    let mut values = Vec::with_capacity(exp.children.len());
    for (i, (spec, c)) in exp.children.iter().zip(&node.children).enumerate() {
        let cpath = format!("{path}/children/{i}");
        let want = spec.system.to_string();
        if c.system() != want {
            return reject(&cpath, format!("expected subgoal {want}, found {}", c.system()));
        }
        let v = match c {
            Child::Node(n) => check(n, &cpath, oracle_dims, done)?,
            Child::Ref(r) => match done.get(&r.target) {
                Some(v) => v.clone(),
                None => return reject(&cpath, format!("reference to {} before it is proved", r.target)),
            },
        };
        if !spec.req.accepts(&spec.system, &v) {
            return reject(&cpath, format!("{want} has dimension {v}, {} needs {}", node.rule, spec.req));
        }
        values.push(v);
    }
    let concluded = match exp.value {
        Conclusion::Oracle => unreachable!("only ORACLE concludes by rank"),
        _ => exp.value(&values).expect("children checked"),
    };
    if concluded != *value {
        return reject(path, format!("{} concludes dimension {concluded}, claim is {value}", node.rule));
    }
    if let Some(prev) = done.get(text) {
        if prev != value {
            return reject(path, format!("{text} proved with two different dimensions"));
        }
    }
    done.insert(text.clone(), value.clone());
    Ok(concluded)
}
