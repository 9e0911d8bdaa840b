//! Certificate data model and its JSON form.
//!
//! A certificate is a proof tree. Each node claims the exact dimension of one
//! system, names the rule that justifies it, and records the rule's
//! parameters and arithmetic side conditions. A subgoal that occurs more
//! than once is written out in full at its first occurrence (depth-first)
//! and as `{"ref": "<system>"}` afterwards.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::LinearSystem;

pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    Table,
    ClosedForm,
    Oracle,
    MonotoneDown,
    EmptyUp,
    AddSimple,
    Cone,
    Castelnuovo,
    LfP2,
    LfP3,
    LfQuartic,
    LfGeneral,
    Deg1,
    Deg2,
    QuarticR3,
    QuarticR4,
    QuarticGen,
    CubicBase,
    CubicStep,
}

impl Rule {
    pub const ALL: [Rule; 19] = [
        Rule::Table,
        Rule::ClosedForm,
        Rule::Oracle,
        Rule::MonotoneDown,
        Rule::EmptyUp,
        Rule::AddSimple,
        Rule::Cone,
        Rule::Castelnuovo,
        Rule::LfP2,
        Rule::LfP3,
        Rule::LfQuartic,
        Rule::LfGeneral,
        Rule::Deg1,
        Rule::Deg2,
        Rule::QuarticR3,
        Rule::QuarticR4,
        Rule::QuarticGen,
        Rule::CubicBase,
        Rule::CubicStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Table => "TABLE",
            Rule::ClosedForm => "CLOSED_FORM",
            Rule::Oracle => "ORACLE",
            Rule::MonotoneDown => "MONOTONE_DOWN",
            Rule::EmptyUp => "EMPTY_UP",
            Rule::AddSimple => "ADD_SIMPLE",
            Rule::Cone => "CONE",
            Rule::Castelnuovo => "CASTELNUOVO",
            Rule::LfP2 => "LF_P2",
            Rule::LfP3 => "LF_P3",
            Rule::LfQuartic => "LF_QUARTIC",
            Rule::LfGeneral => "LF_GENERAL",
            Rule::Deg1 => "DEG1",
            Rule::Deg2 => "DEG2",
            Rule::QuarticR3 => "QUARTIC_R3",
            Rule::QuarticR4 => "QUARTIC_R4",
            Rule::QuarticGen => "QUARTIC_GEN",
            Rule::CubicBase => "CUBIC_BASE",
            Rule::CubicStep => "CUBIC_STEP",
        }
    }

    /// Leaves carry no children.
    pub fn is_leaf(self) -> bool {
        matches!(self, Rule::Table | Rule::ClosedForm | Rule::Oracle)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown rule {s:?}")))
    }
}

/// What a claim says, derived from its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assertion {
    /// The value is `-1`.
    Empty,
    /// A system of fat points whose value is its expected dimension.
    NonSpecial,
    /// Any other exact dimension.
    Dim,
}

impl Assertion {
    pub fn for_value(sys: &LinearSystem, value: &BigInt) -> Assertion {
        if *value == BigInt::from(-1) {
            Assertion::Empty
        } else if sys.is_points_only() && *value == sys.expected_dim() {
            Assertion::NonSpecial
        } else {
            Assertion::Dim
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Assertion::Empty => "empty",
            Assertion::NonSpecial => "non_special",
            Assertion::Dim => "dim",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub system: String,
    pub assert: Assertion,
    #[serde(with = "crate::bigjson")]
    pub value: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Int(i64),
    Text(String),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Int(v) => write!(f, "{v}"),
            Param::Text(s) => f.write_str(s),
        }
    }
}

pub type Params = BTreeMap<String, Param>;

/// Builds a parameter map from `(name, value)` pairs.
pub fn params<const N: usize>(items: [(&str, Param); N]) -> Params {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn int_param(p: &Params, key: &str) -> Result<i64> {
    match p.get(key) {
        Some(Param::Int(v)) => Ok(*v),
        Some(Param::Text(_)) => Err(Error::invalid(format!("parameter {key} must be an integer"))),
        None => Err(Error::invalid(format!("missing parameter {key}"))),
    }
}

pub fn count_param(p: &Params, key: &str) -> Result<u64> {
    u64::try_from(int_param(p, key)?)
        .map_err(|_| Error::invalid(format!("parameter {key} must be non-negative")))
}

pub fn text_param<'a>(p: &'a Params, key: &str) -> Result<&'a str> {
    match p.get(key) {
        Some(Param::Text(s)) => Ok(s),
        Some(Param::Int(_)) => Err(Error::invalid(format!("parameter {key} must be text"))),
        None => Err(Error::invalid(format!("missing parameter {key}"))),
    }
}

/// A named integer and the relation it must satisfy, e.g. `"<= 12"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideCondition {
    pub name: String,
    #[serde(with = "crate::bigjson")]
    pub value: BigInt,
    pub relation: String,
}

impl SideCondition {
    pub fn new(name: &str, value: impl Into<BigInt>, op: &str, bound: impl Into<BigInt>) -> Self {
        SideCondition {
            name: name.to_string(),
            value: value.into(),
            relation: format!("{op} {}", bound.into()),
        }
    }

    /// Whether `value` satisfies `relation`.
    pub fn holds(&self) -> Result<bool> {
        let (op, bound) = self
            .relation
            .split_once(' ')
            .ok_or_else(|| Error::invalid(format!("malformed relation {:?}", self.relation)))?;
        let bound: BigInt = bound
            .parse()
            .map_err(|_| Error::invalid(format!("malformed bound in {:?}", self.relation)))?;
        let v = &self.value;
        Ok(match op {
            "=" => *v == bound,
            "<=" => *v <= bound,
            ">=" => *v >= bound,
            "<" => *v < bound,
            ">" => *v > bound,
            _ => return Err(Error::invalid(format!("unknown relation {op:?}"))),
        })
    }
}

impl fmt::Display for SideCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} ({})", self.name, self.value, self.relation)
    }
}

/// Parameters of an oracle run, enough to repeat it exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OracleStamp {
    pub prime: u64,
    pub seed: u64,
    pub trials: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofNode {
    pub claim: Claim,
    pub rule: Rule,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub side_conditions: Vec<SideCondition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleStamp>,
    #[serde(default)]
    pub children: Vec<Child>,
}

/// A back-reference to a subgoal proved earlier in the same certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRef {
    #[serde(rename = "ref")]
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Child {
    Ref(NodeRef),
    Node(Box<ProofNode>),
}

impl Child {
    /// Text of the system this child stands for.
    pub fn system(&self) -> &str {
        match self {
            Child::Ref(r) => &r.target,
            Child::Node(n) => &n.claim.system,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    #[serde(flatten)]
    pub root: ProofNode,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Full nodes in depth-first order, with their paths.
    pub fn nodes(&self) -> Vec<(String, &ProofNode)> {
        let mut out = Vec::new();
        walk(&self.root, String::new(), &mut out);
        out
    }
}

fn walk<'a>(node: &'a ProofNode, path: String, out: &mut Vec<(String, &'a ProofNode)>) {
    out.push((path.clone(), node));
    for (i, c) in node.children.iter().enumerate() {
        if let Child::Node(n) = c {
            walk(n, format!("{path}/children/{i}"), out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_names_roundtrip() {
        for r in Rule::ALL {
            assert_eq!(r.name().parse::<Rule>().unwrap(), r);
            assert_eq!(serde_json::to_value(r).unwrap(), r.name());
        }
        assert!("DEG3".parse::<Rule>().is_err());
    }

    #[test]
    fn relations() {
        assert!(SideCondition::new("b", 7, "<=", 12).holds().unwrap());
        assert!(!SideCondition::new("v", -2, ">=", -1).holds().unwrap());
        assert!(SideCondition::new("beta", 0, "=", 0).holds().unwrap());
        assert_eq!(SideCondition::new("x", 3, "<", -1).relation, "< -1");
        let bad = SideCondition {
            name: "x".into(),
            value: 1.into(),
            relation: "~ 2".into(),
        };
        assert!(bad.holds().is_err());
    }

    #[test]
    fn assertion_labels() {
        let s: LinearSystem = "L(r=2,d=4; 2^5)".parse().unwrap();
        assert_eq!(Assertion::for_value(&s, &BigInt::from(0)), Assertion::Dim);
        assert_eq!(Assertion::for_value(&s, &BigInt::from(-1)), Assertion::Empty);
        let s: LinearSystem = "L(r=2,d=4; 2^4)".parse().unwrap();
        assert_eq!(Assertion::for_value(&s, &BigInt::from(2)), Assertion::NonSpecial);
    }

    #[test]
    fn json_shape() {
        let leaf = ProofNode {
            claim: Claim {
                system: "L(r=2,d=4; 2^5)".into(),
                assert: Assertion::Dim,
                value: BigInt::from(0),
            },
            rule: Rule::Table,
            params: params([("row", Param::Text("Quartic2".into()))]),
            side_conditions: vec![],
            oracle: None,
            children: vec![],
        };
        let mut root = leaf.clone();
        root.rule = Rule::EmptyUp;
        root.children = vec![
            Child::Node(Box::new(leaf)),
            Child::Ref(NodeRef {
                target: "L(r=2,d=4; 2^5)".into(),
            }),
        ];
        let cert = Certificate {
            version: VERSION,
            root,
        };
        let v: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["claim"]["assert"], "dim");
        assert_eq!(v["children"][0]["params"]["row"], "Quartic2");
        assert_eq!(v["children"][1]["ref"], "L(r=2,d=4; 2^5)");
        assert!(v.get("oracle").is_none());
        assert_eq!(Certificate::from_json(&cert.to_json()).unwrap(), cert);
        assert_eq!(cert.nodes().len(), 2);
    }
}
