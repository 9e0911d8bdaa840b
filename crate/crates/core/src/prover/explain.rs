//! Plain-text narration of a certificate.

use std::fmt::Write;

use super::certificate::{text_param, Certificate, Child, Param, ProofNode, Rule};
use crate::systems::classify::ExceptionTag;

/// One paragraph per node, indented by depth. References to subgoals
/// proved earlier are one line.
pub fn explain(cert: &Certificate) -> String {
    let mut out = String::new();
    node(&cert.root, 0, &mut out);
    out
}

fn param(n: &ProofNode, key: &str) -> String {
    n.params.get(key).map(Param::to_string).unwrap_or_else(|| "?".into())
}

fn kids(n: &ProofNode) -> String {
    n.children
        .iter()
        .map(Child::system)
        .collect::<Vec<_>>()
        .join(", ")
}

fn sentence(n: &ProofNode) -> String {
    let v = &n.claim.value;
    match n.rule {
        Rule::Table => {
            let row = param(n, "row");
            match ExceptionTag::from_name(&row) {
                Some(t) => format!("Exception row {row} ({}): dimension {v}.", t.description()),
                None => format!("Classified {row} system: dimension {v}, as expected."),
            }
        }
        Rule::ClosedForm => format!("Closed form ({}): dimension {v}.", param(n, "form")),
        Rule::Oracle => match n.oracle {
            Some(s) => format!(
                "Rank of the interpolation matrix over F_{} with seed {}, minimum over {} trials: dimension {v}.",
                s.prime, s.seed, s.trials
            ),
            None => format!("Rank check: dimension {v}."),
        },
        Rule::MonotoneDown => format!(
            "Add {} points of multiplicity {}; the larger system is non-special with v >= -1, so this one is non-special too.",
            param(n, "count"),
            param(n, "mult")
        ),
        Rule::EmptyUp => format!(
            "Drop {} points of multiplicity {}; the smaller system is already empty.",
            param(n, "count"),
            param(n, "mult")
        ),
        Rule::AddSimple => format!(
            "Remove {} simple points; each general simple point lowers the dimension by one until the system is empty.",
            param(n, "count")
        ),
        Rule::Cone => format!(
            "The d-fold point makes every member a cone; project from it to {}.",
            kids(n)
        ),
        Rule::Castelnuovo => {
            let h: Vec<String> = n
                .params
                .iter()
                .filter(|(k, _)| k.starts_with('h'))
                .map(|(k, v)| format!("{v} points of multiplicity {}", &k[1..]))
                .collect();
            format!(
                "Restrict to a hyperplane through {} ({} variant); kernel and trace: {}.",
                h.join(" and "),
                param(n, "variant"),
                kids(n)
            )
        }
        Rule::LfP2 | Rule::LfP3 | Rule::LfQuartic | Rule::LfGeneral => format!(
            "Restrict to a hyperplane through the (d-1)-fold point and some of the nodes; kernel and trace are non-special with v >= -1: {}.",
            kids(n)
        ),
        Rule::Deg1 => format!(
            "Specialize b={} nodes to the exceptional component of a (1,{})-degeneration; the limit dimension equals the expected dimension {v}.",
            param(n, "b"),
            param(n, "b")
        ),
        Rule::Deg2 => format!(
            "Specialize b={} nodes to the exceptional component and let beta={} of them move onto the intersection; the matching system has the expected dimension {v}.",
            param(n, "b"),
            param(n, "beta")
        ),
        Rule::QuarticR3 | Rule::QuarticR4 | Rule::QuarticGen => format!(
            "Quartic (1,{})-degeneration: the limit dimension equals the expected dimension {v}.",
            param(n, "b")
        ),
        Rule::CubicBase | Rule::CubicStep => {
            let stage = text_param(&n.params, "stage").unwrap_or("?");
            let what = match stage {
                "k1" => "K1 is empty because K2 and the previous K1 are",
                "k2" => "K2 is empty because its kernel and the previous K2 are",
                "matching" => "the matching system is empty because K1 and the previous matching system are",
                "theorem" => "the cubic system is empty because the smaller cubic system, the double-subspace system and the matching system are",
                "double_subspace" => "the system singular along a subspace is empty because its kernel and the previous one are",
                "p3" => "the five nodes in P^3 leave no cubic",
                "p7" | "p7_matching" | "p7_k1" => "the P^7 track blows up a codimension-4 subspace",
                _ => "stage",
            };
            format!("Cubic induction, stage {stage}: {what}. Subgoals: {}.", kids(n))
        }
    }
}

fn node(n: &ProofNode, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let _ = writeln!(
        out,
        "{pad}{} is {} (dimension {}) by {}.",
        n.claim.system,
        n.claim.assert.name().replace('_', "-"),
        n.claim.value,
        n.rule
    );
    let _ = writeln!(out, "{pad}  {}", sentence(n));
    for c in &n.side_conditions {
        let _ = writeln!(out, "{pad}  - {} = {} (needs {})", c.name, c.value, c.relation);
    }
    for c in &n.children {
        match c {
            Child::Node(m) => node(m, depth + 1, out),
            Child::Ref(r) => {
                let _ = writeln!(out, "{pad}  {} (proved above)", r.target);
            }
        }
    }
}
