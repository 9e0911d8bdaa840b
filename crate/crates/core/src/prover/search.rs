//! Rule dispatch and the memoized proof search.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use super::certificate::{
    params, Assertion, Certificate, Child, Claim, NodeRef, OracleStamp, Param, Params,
    ProofNode, Rule, SideCondition, VERSION,
};
use super::rules::{self, closed_form, cubic_rule, lf_nodes, lf_rule, split_params};
use crate::combinatorics::{b0_decompose, gamma_r, lf_bound, n_bounds, second_b, to_count};
use crate::error::{Error, Result};
use crate::oracle::{self, FieldConfig};
use crate::systems::classify::{classify, table_dim};
use crate::systems::{cubic, LinearSystem};

/// Limits for [`Prover`].
#[derive(Clone, Debug)]
pub struct ProverConfig {
    /// Field settings for oracle leaves; `max_columns` is the oracle budget.
    pub field: FieldConfig,
    pub max_depth: usize,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig {
            field: FieldConfig::default(),
            max_depth: 200,
        }
    }
}

/// A rule together with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub params: Params,
}

impl Step {
    fn new(rule: Rule, params: Params) -> Self {
        Step { rule, params }
    }

    fn bare(rule: Rule) -> Self {
        Step::new(rule, Params::new())
    }
}

fn int(v: impl TryInto<i64>) -> Param {
    Param::Int(v.try_into().unwrap_or(i64::MAX))
}

fn text(s: &str) -> Param {
    Param::Text(s.to_string())
}

fn points_step(rule: Rule, mult: u32, count: u64) -> Step {
    Step::new(rule, params([("mult", int(mult)), ("count", int(count))]))
}

fn stage(r: u32, name: &str) -> Step {
    Step::new(cubic_rule(r), params([("stage", text(name))]))
}

/// The rule the prover tries first for `sys`. Pure: no oracle, no recursion.
pub fn plan(sys: &LinearSystem) -> Step {
    if let Some((form, _)) = closed_form(sys) {
        return Step::new(Rule::ClosedForm, params([("form", text(form))]));
    }
    let (r, d) = (sys.r(), sys.d());
    if !sys.is_points_only() {
        return plan_subspace(sys);
    }
    if r >= 2 && sys.count(d) == 1 {
        return Step::bare(Rule::Cone);
    }
    if r >= 5 && d == 3 && cubic::theorem_system(r).is_ok_and(|t| t == *sys) {
        return stage(r, if r == 7 { "p7" } else { "theorem" });
    }
    if sys.count(1) > 0 {
        return Step::new(Rule::AddSimple, params([("count", int(sys.count(1)))]));
    }
    if sys.is_double_points_only() {
        return plan_doubles(r, d, sys.count(2));
    }
    if let Some(k) = lf_nodes(sys) {
        return plan_lf(r, d, k);
    }
    Step::bare(Rule::Oracle)
}

fn plan_subspace(sys: &LinearSystem) -> Step {
    let r = sys.r();
    let is = |f: &dyn Fn(u32) -> Result<LinearSystem>| f(r).is_ok_and(|t| t == *sys);
    if r >= 5 && is(&cubic::matching) {
        return if r >= 8 { stage(r, "matching") } else { Step::bare(Rule::Oracle) };
    }
    if is(&cubic::k1) {
        return if r == 6 || r >= 8 { stage(r, "k1") } else { Step::bare(Rule::Oracle) };
    }
    if is(&cubic::k2) {
        return if r >= 7 { stage(r, "k2") } else { Step::bare(Rule::Oracle) };
    }
    if r >= 4 && cubic::double_subspace(r, 0).is_ok_and(|t| t == *sys) {
        return stage(r, "double_subspace");
    }
    if r == 7 && cubic::p7_matching().is_ok_and(|t| t == *sys) {
        return stage(7, "p7_matching");
    }
    if r == 7 && cubic::p7_k1().is_ok_and(|t| t == *sys) {
        return stage(7, "p7_k1");
    }
    if sys.count(1) > 0 {
        return Step::new(Rule::AddSimple, params([("count", int(sys.count(1)))]));
    }
    Step::bare(Rule::Oracle)
}

/// The range of node counts handled directly, widened by one past an
/// exceptional endpoint so that `MONOTONE_DOWN` and `EMPTY_UP` never start
/// from a special system.
pub fn core_range(r: u32, d: u32) -> (u64, u64) {
    let (lo, hi) = n_bounds(r, d);
    let (mut lo, mut hi) = (to_count(&lo).unwrap_or(0), to_count(&hi).unwrap_or(0));
    if classify(r, d, lo).is_exception {
        lo = lo.saturating_sub(1);
    }
    if classify(r, d, hi).is_exception {
        hi += 1;
    }
    (lo, hi)
}

fn plan_doubles(r: u32, d: u32, n: u64) -> Step {
    if let Some((entry, _)) = table_dim(r, d, n) {
        return Step::new(Rule::Table, params([("row", text(entry.name()))]));
    }
    let (lo, hi) = core_range(r, d);
    if n < lo {
        return points_step(Rule::MonotoneDown, 2, lo - n);
    }
    if n > hi {
        return points_step(Rule::EmptyUp, 2, n - hi);
    }
    let (n_minus, _) = n_bounds(r, d);
    match d {
        3 if r == 3 => stage(3, "p3"),
        3 if r >= 5 && BigInt::from(n) == n_minus => {
            // theorem_system itself is caught before this point
            let g = to_count(&gamma_r(r)).unwrap_or(0);
            points_step(Rule::MonotoneDown, 1, g)
        }
        4 if (r, n) == (3, 8) => Step::new(Rule::QuarticR3, params([("b", int(4))])),
        4 if (r, n) == (4, 13) => Step::new(Rule::QuarticR4, params([("b", int(8))])),
        4 if r >= 5 => Step::new(
            Rule::QuarticGen,
            params([("b", int(n.saturating_sub(r as u64 + 1)))]),
        ),
        5.. if r >= 3 => {
            let (b0, beta) = b0_decompose(r, d);
            if beta == BigInt::from(0) {
                Step::new(Rule::Deg1, params([("b", int(to_count(&b0).unwrap_or(0)))]))
            } else {
                let b = to_count(&second_b(r, d)).unwrap_or(0);
                let beta = to_count(&beta).unwrap_or(0);
                Step::new(Rule::Deg2, params([("b", int(b)), ("beta", int(beta))]))
            }
        }
        _ => Step::bare(Rule::Oracle),
    }
}

fn plan_lf(r: u32, d: u32, k: u64) -> Step {
    let (Some(rule), Some(bound)) = (lf_rule(r, d), lf_bound(r, d)) else {
        return Step::bare(Rule::Oracle);
    };
    let bound = to_count(&bound).unwrap_or(0);
    match k.cmp(&bound) {
        std::cmp::Ordering::Equal => Step::bare(rule),
        std::cmp::Ordering::Less => points_step(Rule::MonotoneDown, 2, bound - k),
        std::cmp::Ordering::Greater => Step::bare(Rule::Oracle),
    }
}

/// Hyperplane splits worth trying when the planned rule fails: for double
/// points, the split whose trace sits at the edge of its own range.
fn castelnuovo_candidates(sys: &LinearSystem) -> Vec<Step> {
    let (r, d) = (sys.r(), sys.d());
    if !sys.is_double_points_only() || r < 3 || d < 3 {
        return vec![];
    }
    let n = sys.count(2);
    let (lo, hi) = n_bounds(r - 1, d);
    let empty = sys.expected_dim() == BigInt::from(-1);
    let h = to_count(if empty { &hi } else { &lo }).unwrap_or(0).min(n);
    if h == 0 {
        return vec![];
    }
    let mut p = split_params(&[(2, h)]);
    p.insert("variant".into(), text(if empty { "empty" } else { "independent" }));
    vec![Step::new(Rule::Castelnuovo, p)]
}

/// Seed of the oracle leaf for `system` under a global seed.
pub fn leaf_seed(global: u64, system: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(global.to_le_bytes());
    h.update(system.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 is 32 bytes"))
}

/// A proved subgoal.
#[derive(Debug)]
struct Proved {
    system: LinearSystem,
    text: String,
    value: BigInt,
    step: Step,
    side_conditions: Vec<SideCondition>,
    oracle: Option<OracleStamp>,
    children: Vec<Arc<Proved>>,
}

/// Why a subgoal could not be proved. Kept clonable for the memo table.
#[derive(Clone, Debug)]
enum Failure {
    Unprovable { system: String, reason: String },
    Budget { columns: String, max: usize },
    Other(String),
}

impl Failure {
    fn from_error(e: Error, system: &str) -> Self {
        match e {
            Error::Budget { columns, max } => Failure::Budget { columns, max },
            Error::Unprovable { system, reason } => Failure::Unprovable { system, reason },
            Error::InvalidInput(reason) => Failure::Unprovable {
                system: system.to_string(),
                reason,
            },
            other => Failure::Other(other.to_string()),
        }
    }

    fn unprovable(system: &str, reason: String) -> Self {
        Failure::Unprovable {
            system: system.to_string(),
            reason,
        }
    }

    fn into_error(self) -> Error {
        match self {
            Failure::Unprovable { system, reason } => Error::Unprovable { system, reason },
            Failure::Budget { columns, max } => Error::Budget { columns, max },
            Failure::Other(msg) => Error::InvalidInput(msg),
        }
    }
}

type Outcome = std::result::Result<Arc<Proved>, Failure>;

/// Memoized proof search. One prover can serve many queries and shares
/// subgoals between them.
pub struct Prover {
    cfg: ProverConfig,
    memo: HashMap<String, Outcome>,
    in_progress: HashSet<String>,
    fallbacks: Vec<(String, String)>,
}

impl Prover {
    pub fn new(cfg: ProverConfig) -> Self {
        Prover {
            cfg,
            memo: HashMap::new(),
            in_progress: HashSet::new(),
            fallbacks: Vec::new(),
        }
    }

    pub fn config(&self) -> &ProverConfig {
        &self.cfg
    }

    /// Subgoals whose planned rule failed, with the reason, in the order met.
    pub fn fallbacks(&self) -> &[(String, String)] {
        &self.fallbacks
    }

    /// Certificate for the dimension of `L_{r,d}(2^n)`.
    pub fn prove(&mut self, r: u32, d: u32, n: u64) -> Result<Certificate> {
        if r < 2 || d < 2 {
            return Err(Error::invalid(format!(
                "prove needs r >= 2 and d >= 2, got r = {r}, d = {d}"
            )));
        }
        let sys = LinearSystem::nodes(r, d, n)?;
        let cert = self.prove_system(&sys)?;
        let verdict = classify(r, d, n);
        let want = verdict.closed_form_dim.unwrap_or_else(|| sys.expected_dim());
        if cert.root.claim.value != want {
            return Err(Error::Unprovable {
                system: sys.to_string(),
                reason: format!(
                    "proof concludes dimension {} but the classification gives {want}",
                    cert.root.claim.value
                ),
            });
        }
        Ok(cert)
    }

    /// Certificate for the dimension of any system the rules reach.
    pub fn prove_system(&mut self, sys: &LinearSystem) -> Result<Certificate> {
        let root = self.node(sys, 0).map_err(Failure::into_error)?;
        Ok(Certificate {
            version: VERSION,
            root: emit(&root, &mut HashSet::new()),
        })
    }

    fn node(&mut self, sys: &LinearSystem, depth: usize) -> Outcome {
        let text = sys.to_string();
        if let Some(hit) = self.memo.get(&text) {
            return hit.clone();
        }
        if depth > self.cfg.max_depth {
            return Err(Failure::unprovable(
                &text,
                format!("depth limit {} reached", self.cfg.max_depth),
            ));
        }
        if !self.in_progress.insert(text.clone()) {
            return Err(Failure::unprovable(&text, "subgoal depends on itself".into()));
        }
        let step = plan(sys);
        let mut out = self.apply(sys, &text, &step, depth);
        if let Err(first) = &out {
            if step.rule != Rule::Oracle {
                let first = first.clone();
                out = self.fallback(sys, &text, depth, first);
            }
        }
        self.in_progress.remove(&text);
        self.memo.insert(text, out.clone());
        out
    }

    fn fallback(&mut self, sys: &LinearSystem, text: &str, depth: usize, first: Failure) -> Outcome {
        let reason = match &first {
            Failure::Unprovable { system, reason } => format!("{system}: {reason}"),
            Failure::Budget { columns, max } => format!("budget: {columns} > {max}"),
            Failure::Other(m) => m.clone(),
        };
        for cand in castelnuovo_candidates(sys) {
            if let Ok(p) = self.apply(sys, text, &cand, depth) {
                self.fallbacks.push((text.to_string(), reason));
                return Ok(p);
            }
        }
        if oracle::columns_within(sys, self.cfg.field.max_columns).is_ok() {
            let p = self.apply(sys, text, &Step::bare(Rule::Oracle), depth)?;
            self.fallbacks.push((text.to_string(), reason));
            return Ok(p);
        }
        Err(first)
    }

    fn apply(&mut self, sys: &LinearSystem, text: &str, step: &Step, depth: usize) -> Outcome {
        if step.rule == Rule::Oracle {
            return self.oracle_leaf(sys, text);
        }
        let exp = rules::expand(step.rule, &step.params, sys)
            .map_err(|e| Failure::from_error(e, text))?;
        if let Some(c) = exp.failing_condition().map_err(|e| Failure::from_error(e, text))? {
            return Err(Failure::unprovable(
                text,
                format!("{}: side condition {} = {} violates {}", step.rule, c.name, c.value, c.relation),
            ));
        }
        let mut children = Vec::with_capacity(exp.children.len());
        for spec in &exp.children {
            let c = self.node(&spec.system, depth + 1)?;
            if !spec.req.accepts(&spec.system, &c.value) {
                return Err(Failure::unprovable(
                    text,
                    format!(
                        "{}: subgoal {} has dimension {}, the rule needs {}",
                        step.rule, c.text, c.value, spec.req
                    ),
                ));
            }
            children.push(c);
        }
        let values: Vec<BigInt> = children.iter().map(|c| c.value.clone()).collect();
        let value = exp.value(&values).expect("non-oracle rules conclude a value");
        Ok(Arc::new(Proved {
            system: sys.clone(),
            text: text.to_string(),
            value,
            step: step.clone(),
            side_conditions: exp.side_conditions,
            oracle: None,
            children,
        }))
    }

    fn oracle_leaf(&mut self, sys: &LinearSystem, text: &str) -> Outcome {
        let mut field = self.cfg.field.clone();
        field.seed = leaf_seed(self.cfg.field.seed, text);
        field.cross_check_prime = None;
        let report = oracle::dimension(sys, &field).map_err(|e| Failure::from_error(e, text))?;
        Ok(Arc::new(Proved {
            system: sys.clone(),
            text: text.to_string(),
            value: report.dim,
            step: Step::bare(Rule::Oracle),
            side_conditions: vec![],
            oracle: Some(OracleStamp {
                prime: field.prime,
                seed: field.seed,
                trials: field.trials,
            }),
            children: vec![],
        }))
    }
}

/// Writes the proof DAG as a tree, replacing repeats by references.
fn emit(p: &Proved, done: &mut HashSet<String>) -> ProofNode {
    let children = p
        .children
        .iter()
        .map(|c| {
            if done.contains(&c.text) {
                Child::Ref(NodeRef {
                    target: c.text.clone(),
                })
            } else {
                Child::Node(Box::new(emit(c, done)))
            }
        })
        .collect();
    done.insert(p.text.clone());
    ProofNode {
        claim: Claim {
            system: p.text.clone(),
            assert: Assertion::for_value(&p.system, &p.value),
            value: p.value.clone(),
        },
        rule: p.step.rule,
        params: p.step.params.clone(),
        side_conditions: p.side_conditions.clone(),
        oracle: p.oracle,
        children,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(s: &str) -> LinearSystem {
        s.parse().unwrap()
    }

    fn rule_of(s: &str) -> Rule {
        plan(&sys(s)).rule
    }

    #[test]
    fn dispatch() {
        assert_eq!(rule_of("L(r=2,d=4; 2^5)"), Rule::Table);
        assert_eq!(rule_of("L(r=4,d=3; 2^7)"), Rule::Table);
        assert_eq!(rule_of("L(r=3,d=5; 2^14)"), Rule::Deg1);
        assert_eq!(rule_of("L(r=3,d=6; 2^21)"), Rule::Deg2);
        assert_eq!(rule_of("L(r=3,d=4; 2^7)"), Rule::MonotoneDown);
        assert_eq!(rule_of("L(r=3,d=3; 2^7)"), Rule::EmptyUp);
        assert_eq!(rule_of("L(r=3,d=3; 2^5)"), Rule::CubicBase);
        assert_eq!(rule_of("L(r=5,d=3; 2^9, 1^2)"), Rule::CubicBase);
        assert_eq!(rule_of("L(r=8,d=3; 2^18)"), Rule::MonotoneDown);
        assert_eq!(rule_of("L(r=8,d=3; 2^18, 1^3)"), Rule::CubicStep);
        assert_eq!(rule_of("L(r=7,d=3; 2^15)"), Rule::CubicBase);
        assert_eq!(rule_of("L(r=3,d=4; 3, 2^5)"), Rule::LfQuartic);
        assert_eq!(rule_of("L(r=3,d=4; 4, 2^5)"), Rule::Cone);
        assert_eq!(rule_of("L(r=4,d=3; 2^6)"), Rule::Oracle);
        assert_eq!(rule_of("L(r=4,d=4; 2^15)"), Rule::Oracle);
        assert_eq!(rule_of("L(r=3,d=3; 2^4, 1^2)"), Rule::AddSimple);
        assert_eq!(rule_of("L(r=3,d=3; 1^2)"), Rule::ClosedForm);
        let m = cubic::matching(5).unwrap();
        assert_eq!(plan(&m).rule, Rule::Oracle);
        assert_eq!(plan(&cubic::matching(8).unwrap()).rule, Rule::CubicStep);
    }

    #[test]
    fn core_range_widens_at_exceptions() {
        assert_eq!(core_range(4, 3), (6, 8));
        assert_eq!(core_range(4, 4), (13, 15));
        assert_eq!(core_range(3, 4), (8, 10));
        assert_eq!(core_range(3, 5), (14, 14));
    }

    #[test]
    fn leaf_seeds_are_stable() {
        assert_eq!(leaf_seed(0, "L(r=3,d=3; 2^5)"), leaf_seed(0, "L(r=3,d=3; 2^5)"));
        assert_ne!(leaf_seed(0, "L(r=3,d=3; 2^5)"), leaf_seed(1, "L(r=3,d=3; 2^5)"));
    }

    #[test]
    fn prove_examples() {
        let mut p = Prover::new(ProverConfig::default());
        let c = p.prove(3, 5, 14).unwrap();
        assert_eq!(c.root.rule, Rule::Deg1);
        assert_eq!(c.root.params["b"], Param::Int(7));
        assert_eq!(c.root.claim.value, BigInt::from(-1));
        assert_eq!(c.root.claim.assert, Assertion::Empty);
        let kids: Vec<&str> = c.root.children.iter().map(|c| c.system()).collect();
        assert_eq!(kids[..3], ["L(r=2,d=5; 2^7)", "L(r=3,d=4; 2^7)", "L(r=3,d=3; 2^7)"]);

        for (r, d, n) in [(2, 4, 5), (4, 3, 7)] {
            let c = p.prove(r, d, n).unwrap();
            assert_eq!(c.root.rule, Rule::Table);
            assert_eq!(c.root.claim.value, BigInt::from(0));
            assert!(c.root.children.is_empty());
        }
        assert!(p.prove(1, 3, 2).is_err());
        assert!(p.fallbacks().is_empty(), "{:?}", p.fallbacks());
    }

    #[test]
    fn cubic_theorem_r5() {
        let mut p = Prover::new(ProverConfig::default());
        let c = p.prove(5, 3, 9).unwrap();
        assert_eq!(c.root.rule, Rule::MonotoneDown);
        assert_eq!(c.root.params["mult"], Param::Int(1));
        assert_eq!(c.root.params["count"], Param::Int(2));
        let Child::Node(t) = &c.root.children[0] else { panic!() };
        assert_eq!(t.rule, Rule::CubicBase);
        assert!(c.nodes().iter().any(|(_, n)| n.rule == Rule::Oracle));
    }

    #[test]
    fn repeated_subgoals_become_refs() {
        let mut p = Prover::new(ProverConfig::default());
        let c = p.prove(7, 3, 15).unwrap();
        let json = c.to_json();
        assert!(json.contains("\"ref\""));
        // each system is written out in full at most once
        let mut seen = HashSet::new();
        for (_, n) in c.nodes() {
            assert!(seen.insert(n.claim.system.clone()), "{}", n.claim.system);
        }
    }

    #[test]
    fn budget_failure_is_reported() {
        let cfg = ProverConfig {
            field: FieldConfig {
                max_columns: 10,
                ..FieldConfig::default()
            },
            ..ProverConfig::default()
        };
        let mut p = Prover::new(cfg);
        assert!(matches!(p.prove(4, 3, 6), Err(Error::Budget { .. })));
    }
}
