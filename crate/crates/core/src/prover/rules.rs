//! The rule catalog.
//!
//! [`expand`] turns a rule, its parameters and the claimed system into the
//! child systems it needs, the side conditions it records and the value it
//! concludes. Prover and verifier both call it, so a certificate is checked
//! against exactly the arithmetic that produced it.
//!
//! Soundness of each rule, in short:
//!
//! * `TABLE`, `CLOSED_FORM`: the classification of double points in the
//!   plane and for quadrics with its five exceptional families, and systems
//!   whose dimension is elementary (no conditions, one point, simple points,
//!   the line, multiplicity above the degree).
//! * `MONOTONE_DOWN`: if a system is non-special with `v >= -1`, removing
//!   points keeps it non-special.
//! * `EMPTY_UP`: adding conditions to an empty system keeps it empty.
//! * `ADD_SIMPLE`: a general simple point lowers the dimension by one until
//!   the system is empty.
//! * `CONE`: forms with a `d`-fold point are cones over a hyperplane section.
//! * `CASTELNUOVO` and the `LF_*` rules: restriction to a hyperplane gives
//!   `dim L <= dim kernel + dim trace + 1`, and the virtual dimensions add up
//!   the same way.
//! * `DEG1`, `DEG2`, `QUARTIC_*`: the limit dimension
//!   `l0 = dim R + l̂_P + l̂_F + 2` of a `(1, b)`-degeneration bounds the
//!   dimension from above; the side conditions record the transversality
//!   hypotheses and the arithmetic showing `l0 = e`.
//! * `CUBIC_BASE`, `CUBIC_STEP`: the cubic induction, each stage concluding
//!   emptiness from the emptiness of a kernel and of a restricted system.

use num_bigint::BigInt;

use super::certificate::{count_param, text_param, Param, Params, Rule, SideCondition};
use crate::combinatorics::{
    b0_decompose, binom, forms, k_general, k_quartic, lf_bound, n_bounds, second_b, to_count, h,
};
use crate::error::{Error, Result};
use crate::systems::classify::table_dim;
use crate::systems::cubic;
use crate::systems::{castelnuovo_split, cone_reduce, deg1_components, deg2_components};
use crate::systems::{limit_dim, transversal_intersection_dim, LinearSystem};

/// What a rule needs to know about a child.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Req {
    /// A fat-point system whose dimension is its expected dimension.
    NonSpecial,
    Empty,
    /// Whatever the dimension is; the rule uses the value.
    Any,
    Exact(BigInt),
}

impl Req {
    pub fn accepts(&self, sys: &LinearSystem, value: &BigInt) -> bool {
        match self {
            Req::NonSpecial => sys.is_points_only() && *value == sys.expected_dim(),
            Req::Empty => *value == BigInt::from(-1),
            Req::Any => true,
            Req::Exact(v) => value == v,
        }
    }
}

impl std::fmt::Display for Req {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Req::NonSpecial => f.write_str("non-special"),
            Req::Empty => f.write_str("empty"),
            Req::Any => f.write_str("any dimension"),
            Req::Exact(v) => write!(f, "dimension {v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChildSpec {
    pub system: LinearSystem,
    pub req: Req,
}

/// How the node's value follows from its children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conclusion {
    Fixed(BigInt),
    /// `max(child - minus, -1)`.
    Child { index: usize, minus: u64 },
    /// Given by a rank computation.
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub children: Vec<ChildSpec>,
    pub side_conditions: Vec<SideCondition>,
    pub value: Conclusion,
}

impl Expansion {
    fn leaf(value: BigInt) -> Self {
        Expansion {
            children: vec![],
            side_conditions: vec![],
            value: Conclusion::Fixed(value),
        }
    }

    /// The first side condition that does not hold.
    pub fn failing_condition(&self) -> Result<Option<&SideCondition>> {
        for c in &self.side_conditions {
            if !c.holds()? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }

    /// The concluded value given the children's values; `None` for oracle leaves.
    pub fn value(&self, children: &[BigInt]) -> Option<BigInt> {
        match &self.value {
            Conclusion::Fixed(v) => Some(v.clone()),
            Conclusion::Child { index, minus } => {
                let v = children.get(*index)? - BigInt::from(*minus);
                Some(v.max(BigInt::from(-1)))
            }
            Conclusion::Oracle => None,
        }
    }
}

fn child(system: LinearSystem, req: Req) -> ChildSpec {
    ChildSpec { system, req }
}

fn fail<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::invalid(msg))
}

fn minus_one() -> BigInt {
    BigInt::from(-1)
}

/// Number of double points of a system that has nothing else.
fn nodes_of(sys: &LinearSystem) -> Result<u64> {
    if !sys.is_double_points_only() {
        return fail(format!("{sys} is not a system of double points"));
    }
    Ok(sys.count(2))
}

pub fn expand(rule: Rule, params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    match rule {
        Rule::Table => table(params, sys),
        Rule::ClosedForm => closed(params, sys),
        Rule::Oracle => {
            if !params.is_empty() {
                return fail("ORACLE takes no parameters");
            }
            Ok(Expansion {
                children: vec![],
                side_conditions: vec![],
                value: Conclusion::Oracle,
            })
        }
        Rule::MonotoneDown => monotone_down(params, sys),
        Rule::EmptyUp => empty_up(params, sys),
        Rule::AddSimple => add_simple(params, sys),
        Rule::Cone => cone(sys),
        Rule::Castelnuovo => castelnuovo(params, sys),
        Rule::LfP2 | Rule::LfP3 | Rule::LfQuartic | Rule::LfGeneral => lf(rule, sys),
        Rule::Deg1 => deg1(params, sys),
        Rule::Deg2 => deg2(params, sys),
        Rule::QuarticR3 | Rule::QuarticR4 => quartic_small(rule, params, sys),
        Rule::QuarticGen => quartic_gen(params, sys),
        Rule::CubicBase | Rule::CubicStep => cubic_stage(rule, params, sys),
    }
}

fn table(params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    let n = nodes_of(sys)?;
    let row = text_param(params, "row")?;
    match table_dim(sys.r(), sys.d(), n) {
        Some((entry, dim)) if entry.name() == row => Ok(Expansion::leaf(dim)),
        Some((entry, _)) => fail(format!("{sys} is table row {}, not {row}", entry.name())),
        None => fail(format!("{sys} is not a table row")),
    }
}

/// Systems whose dimension needs no argument, with the name of the form.
pub fn closed_form(sys: &LinearSystem) -> Option<(&'static str, BigInt)> {
    if !sys.is_points_only() {
        return None;
    }
    let (r, d) = (sys.r(), sys.d());
    let pts = sys.points();
    if pts.is_empty() {
        return Some(("complete", forms(r, d) - 1));
    }
    if pts.iter().any(|p| p.0 > d) {
        return Some(("too_singular", minus_one()));
    }
    if r == 1 {
        return Some(("line", sys.expected_dim()));
    }
    if pts.iter().all(|p| p.0 == 1) {
        return Some(("simple", sys.expected_dim()));
    }
    if sys.point_total() == 1 {
        return Some(("one_point", sys.expected_dim()));
    }
    None
}

fn closed(params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    let form = text_param(params, "form")?;
    match closed_form(sys) {
        Some((name, dim)) if name == form => Ok(Expansion::leaf(dim)),
        Some((name, _)) => fail(format!("{sys} has closed form {name}, not {form}")),
        None => fail(format!("{sys} has no closed form")),
    }
}

fn positive(params: &Params, key: &str) -> Result<u64> {
    let c = count_param(params, key)?;
    if c == 0 {
        return fail(format!("parameter {key} must be positive"));
    }
    Ok(c)
}

fn mult_param(params: &Params) -> Result<u32> {
    u32::try_from(positive(params, "mult")?).map_err(|_| Error::invalid("multiplicity too large"))
}

fn monotone_down(params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    if !sys.is_points_only() {
        return fail("MONOTONE_DOWN applies to fat points only");
    }
    let (m, c) = (mult_param(params)?, positive(params, "count")?);
    let bigger = sys.add_points(m, c)?;
    Ok(Expansion {
        side_conditions: vec![
            SideCondition::new("v", sys.virtual_dim(), ">=", -1),
            SideCondition::new("v_child", bigger.virtual_dim(), ">=", -1),
        ],
        children: vec![child(bigger, Req::NonSpecial)],
        value: Conclusion::Fixed(sys.virtual_dim()),
    })
}

fn empty_up(params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    let (m, c) = (mult_param(params)?, positive(params, "count")?);
    let smaller = sys.remove_points(m, c)?;
    Ok(Expansion {
        children: vec![child(smaller, Req::Empty)],
        side_conditions: vec![],
        value: Conclusion::Fixed(minus_one()),
    })
}

fn add_simple(params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    let c = positive(params, "count")?;
    let rest = sys.remove_points(1, c)?;
    Ok(Expansion {
        children: vec![child(rest, Req::Any)],
        side_conditions: vec![],
        value: Conclusion::Child { index: 0, minus: c },
    })
}

fn cone(sys: &LinearSystem) -> Result<Expansion> {
    Ok(Expansion {
        children: vec![child(cone_reduce(sys)?, Req::Any)],
        side_conditions: vec![],
        value: Conclusion::Child { index: 0, minus: 0 },
    })
}

/// Parameters `h<m>` of a hyperplane split: how many points of multiplicity
/// `m` lie on the hyperplane.
pub fn split_params(on_h: &[(u32, u64)]) -> Params {
    on_h.iter()
        .map(|&(m, c)| (format!("h{m}"), Param::Int(c as i64)))
        .collect()
}

fn on_h_from(params: &Params) -> Result<Vec<(u32, u64)>> {
    let mut out = Vec::new();
    for (k, _) in params.iter().filter(|(k, _)| k.starts_with('h')) {
        let m: u32 = k[1..]
            .parse()
            .map_err(|_| Error::invalid(format!("bad split parameter {k}")))?;
        out.push((m, count_param(params, k)?));
    }
    Ok(out)
}

fn castelnuovo(params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    let variant = text_param(params, "variant")?;
    let on_h = on_h_from(params)?;
    if on_h.is_empty() || params.len() != on_h.len() + 1 {
        return fail("CASTELNUOVO needs a variant and at least one h<m> parameter");
    }
    let (kernel, trace) = castelnuovo_split(sys, &on_h)?;
    match variant {
        "independent" => Ok(Expansion {
            side_conditions: vec![
                SideCondition::new("v_kernel", kernel.virtual_dim(), ">=", -1),
                SideCondition::new("v_trace", trace.virtual_dim(), ">=", -1),
            ],
            children: vec![child(kernel, Req::NonSpecial), child(trace, Req::NonSpecial)],
            value: Conclusion::Fixed(sys.virtual_dim()),
        }),
        "empty" => Ok(Expansion {
            side_conditions: vec![],
            children: vec![child(kernel, Req::Empty), child(trace, Req::Empty)],
            value: Conclusion::Fixed(minus_one()),
        }),
        _ => fail(format!("unknown CASTELNUOVO variant {variant:?}")),
    }
}

/// Which `LF_*` rule covers `L_{r,d}(d-1, 2^k)`.
pub fn lf_rule(r: u32, d: u32) -> Option<Rule> {
    match (r, d) {
        (0 | 1, _) | (_, 0..=3) => None,
        (2, _) => Some(Rule::LfP2),
        (_, 4) => Some(Rule::LfQuartic),
        (3, _) => Some(Rule::LfP3),
        _ => Some(Rule::LfGeneral),
    }
}

/// Node count of `L_{r,d}(d-1, 2^k)`, if the system has that shape.
pub fn lf_nodes(sys: &LinearSystem) -> Option<u64> {
    let d = sys.d();
    if !sys.is_points_only() || d < 4 || sys.count(d - 1) != 1 {
        return None;
    }
    let others_double = sys.points().iter().all(|p| p.0 == 2 || p.0 == d - 1);
    others_double.then(|| sys.count(2))
}

fn lf(rule: Rule, sys: &LinearSystem) -> Result<Expansion> {
    let (r, d) = (sys.r(), sys.d());
    let k = lf_nodes(sys).ok_or_else(|| {
        Error::invalid(format!("{sys} is not of the form L(d-1, 2^k)"))
    })?;
    if lf_rule(r, d) != Some(rule) {
        return fail(format!("{rule} does not cover r = {r}, d = {d}"));
    }
    let bound = lf_bound(r, d).expect("lf_rule implies a bound");
    let on_trace = match rule {
        Rule::LfP2 => BigInt::from(1),
        Rule::LfP3 => h(d),
        Rule::LfQuartic => k_quartic(r - 1),
        _ => k_general(r - 1, d),
    };
    let on_trace = to_count(&on_trace)?;
    if on_trace > k {
        return fail(format!("{sys} has fewer than {on_trace} nodes"));
    }
    let (kernel, trace) = castelnuovo_split(sys, &[(d - 1, 1), (2, on_trace)])?;
    let mut side_conditions = vec![
        SideCondition::new("k", k, "=", bound),
        SideCondition::new("v_kernel", kernel.virtual_dim(), ">=", -1),
        SideCondition::new("v_trace", trace.virtual_dim(), ">=", -1),
    ];
    if rule != Rule::LfQuartic {
        if let Some(kb) = lf_bound(r, d - 1) {
            side_conditions.push(SideCondition::new("kernel_nodes", kernel.count(2), "<=", kb));
        }
    }
    Ok(Expansion {
        children: vec![child(kernel, Req::NonSpecial), child(trace, Req::NonSpecial)],
        side_conditions,
        value: Conclusion::Fixed(sys.virtual_dim()),
    })
}

fn deg1(params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    let (r, d) = (sys.r(), sys.d());
    let n = nodes_of(sys)?;
    if r < 3 || d < 5 {
        return fail("DEG1 needs r >= 3 and d >= 5");
    }
    let b = count_param(params, "b")?;
    let (b0, beta) = b0_decompose(r, d);
    let c = deg1_components(r, d, n, b)?;
    let hat_f = LinearSystem::nodes(r - 1, d, b)?;
    let e = sys.expected_dim();
    // L_F cuts the complete series of degree d-1 forms through b points on R
    let l_hat_f = minus_one();
    let l_hat_p = minus_one();
    let r_f = c.l_f.virtual_dim() - &l_hat_f - 1;
    let dim_r = transversal_intersection_dim(&c.l_p.virtual_dim(), &r_f, &c.r_ambient);
    let l0 = limit_dim(&dim_r, &l_hat_p, &l_hat_f);
    Ok(Expansion {
        side_conditions: vec![
            SideCondition::new("beta", beta, "=", 0),
            SideCondition::new("b", b, "=", b0),
            SideCondition::new("n_minus_b", n - b, ">=", 0),
            SideCondition::new("b_vs_lf_bound", b, "<=", lf_bound(r, d).expect("d >= 5")),
            SideCondition::new("v_hat_f", hat_f.virtual_dim(), "<=", -1),
            SideCondition::new("v_p", c.l_p.virtual_dim(), ">=", 0),
            SideCondition::new("v_hat_p", c.hat_l_p.virtual_dim(), "<=", -1),
            SideCondition::new("v_f", c.l_f.virtual_dim(), ">=", -1),
            SideCondition::new("r_f", r_f, "=", &c.r_ambient - 1 - b),
            SideCondition::new("l0", l0, "=", e.clone()),
        ],
        children: vec![
            child(hat_f, Req::NonSpecial),
            child(c.l_p, Req::NonSpecial),
            child(c.hat_l_p, Req::NonSpecial),
            child(c.l_f, Req::NonSpecial),
        ],
        value: Conclusion::Fixed(e),
    })
}

fn deg2(params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    let (r, d) = (sys.r(), sys.d());
    let n = nodes_of(sys)?;
    if r < 3 || d < 5 {
        return fail("DEG2 needs r >= 3 and d >= 5");
    }
    let b = count_param(params, "b")?;
    let beta = count_param(params, "beta")?;
    let (_, computed_beta) = b0_decompose(r, d);
    if BigInt::from(beta) != computed_beta {
        return fail(format!("beta = {beta} but C(r+d-1, r-1) mod r = {computed_beta}"));
    }
    let c = deg2_components(r, d, n, b, beta)?;
    let kernel_f = LinearSystem::nodes(r - 1, d, b - beta)?;
    let hat_f0_base = kernel_f.add_points(1, beta)?;
    let e = sys.expected_dim();
    let l_p0 = c.l_p0.virtual_dim();
    let dim_r = (l_p0 - BigInt::from(r) * beta - (b - beta)).max(minus_one());
    let l0 = limit_dim(&dim_r, &minus_one(), &minus_one());
    Ok(Expansion {
        side_conditions: vec![
            SideCondition::new("beta", beta, ">", 0),
            SideCondition::new("beta_below_r", beta, "<", r),
            SideCondition::new("b", b, "=", second_b(r, d)),
            SideCondition::new("n_minus_b", n - b, ">=", 0),
            SideCondition::new("b_vs_lf_bound", b, "<=", lf_bound(r, d).expect("d >= 5")),
            SideCondition::new("v_hat_f0", hat_f0_base.virtual_dim(), "<=", -1),
            SideCondition::new("v_hat_p0", c.hat_l_p0.virtual_dim(), "<=", -1),
            SideCondition::new("v_bar_p0", c.bar_l_p0.virtual_dim(), ">=", -1),
            SideCondition::new("v_f0", c.l_f0.virtual_dim(), ">=", -1),
            SideCondition::new("dim_r", dim_r, "=", e.clone()),
            SideCondition::new("l0", l0, "=", e.clone()),
        ],
        children: vec![
            child(kernel_f, Req::NonSpecial),
            child(c.bar_l_p0, Req::NonSpecial),
            child(c.hat_l_p0, Req::NonSpecial),
            child(c.l_f0, Req::NonSpecial),
        ],
        value: Conclusion::Fixed(e),
    })
}

/// The `(1, b)`-degenerations of `L_{3,4}(2^8)` and `L_{4,4}(2^13)`, where
/// the kernel on `F` is not empty.
fn quartic_small(rule: Rule, params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    let (r, want_n, want_b) = match rule {
        Rule::QuarticR3 => (3, 8, 4),
        _ => (4, 13, 8),
    };
    if sys.r() != r || sys.d() != 4 || nodes_of(sys)? != want_n {
        return fail(format!("{rule} applies to L(r={r},d=4; 2^{want_n}) only"));
    }
    let b = count_param(params, "b")?;
    if b > want_n {
        return fail(format!("b = {b} exceeds n = {want_n}"));
    }
    let l_f = LinearSystem::with_points(r, 4, &[(3, 1), (2, b)])?;
    let hat_f = LinearSystem::with_points(r, 4, &[(4, 1), (2, b)])?;
    let l_p = LinearSystem::nodes(r, 3, want_n - b)?;
    let hat_p = LinearSystem::nodes(r, 2, want_n - b)?;
    let l_hat_f = LinearSystem::nodes(r - 1, 4, b)?.expected_dim();
    let ambient = binom(r as u64 + 2, r as i64 - 1);
    let r_f = l_f.virtual_dim() - &l_hat_f - 1;
    let dim_r = transversal_intersection_dim(&l_p.virtual_dim(), &r_f, &ambient);
    let l0 = limit_dim(&dim_r, &minus_one(), &l_hat_f);
    let e = sys.expected_dim();
    Ok(Expansion {
        side_conditions: vec![
            SideCondition::new("b", b, "=", want_b),
            SideCondition::new("v_p", l_p.virtual_dim(), ">=", 0),
            SideCondition::new("v_hat_p", hat_p.virtual_dim(), "<=", -1),
            SideCondition::new("v_f", l_f.virtual_dim(), ">=", -1),
            SideCondition::new("r_f", r_f, "=", &ambient - 1 - b),
            SideCondition::new("l0", l0, "=", e.clone()),
        ],
        children: vec![
            child(l_f, Req::NonSpecial),
            child(hat_f, Req::Exact(l_hat_f)),
            child(l_p, Req::NonSpecial),
            child(hat_p, Req::Empty),
        ],
        value: Conclusion::Fixed(e),
    })
}

fn quartic_gen(params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    let r = sys.r();
    let n = nodes_of(sys)?;
    if r < 5 || sys.d() != 4 {
        return fail("QUARTIC_GEN needs d = 4 and r >= 5");
    }
    let b = count_param(params, "b")?;
    if b > n {
        return fail(format!("b = {b} exceeds n = {n}"));
    }
    let (n_minus, n_plus) = n_bounds(r, 4);
    let l_f = LinearSystem::with_points(r, 4, &[(3, 1), (2, b)])?;
    let hat_f = LinearSystem::with_points(r, 4, &[(4, 1), (2, b)])?;
    let l_p = LinearSystem::nodes(r, 3, n - b)?;
    let hat_p = LinearSystem::nodes(r, 2, n - b)?;
    let trace_f = LinearSystem::nodes(r - 1, 4, b)?;
    // base points of the series cut on R by L_P
    let base = binom(r as u64 + 1, 2);
    let l0 = (l_f.virtual_dim() - &base).max(minus_one());
    let e = sys.expected_dim();
    Ok(Expansion {
        side_conditions: vec![
            SideCondition::new("n_above_n_minus", BigInt::from(n) - n_minus, ">=", 0),
            SideCondition::new("n_below_n_plus", n_plus - n, ">=", 0),
            SideCondition::new("b", b, "=", BigInt::from(n) - r - 1),
            SideCondition::new("b_vs_k_r", b, "<=", k_quartic(r)),
            SideCondition::new("v_hat_f", trace_f.virtual_dim(), "<=", -1),
            SideCondition::new("v_f", l_f.virtual_dim(), ">=", -1),
            SideCondition::new(
                "r_p",
                l_p.virtual_dim(),
                "=",
                binom(r as u64 + 2, 3) - 1 - &base,
            ),
            SideCondition::new("l0", l0, "=", e.clone()),
        ],
        children: vec![
            child(l_f, Req::NonSpecial),
            child(hat_f, Req::Empty),
            child(l_p, Req::NonSpecial),
            child(hat_p, Req::Empty),
        ],
        value: Conclusion::Fixed(e),
    })
}

/// Stages of the cubic induction, named by the system they prove empty.
pub const CUBIC_STAGES: [&str; 9] = [
    "p3",
    "theorem",
    "p7",
    "p7_matching",
    "p7_k1",
    "double_subspace",
    "matching",
    "k1",
    "k2",
];

/// The rule a cubic stage uses in `P^r`: the base rule through `r = 7`.
pub fn cubic_rule(r: u32) -> Rule {
    if r <= 7 {
        Rule::CubicBase
    } else {
        Rule::CubicStep
    }
}

/// The system a stage proves empty, and whether the stage exists for `r`.
pub fn cubic_stage_system(stage: &str, r: u32) -> Result<LinearSystem> {
    let ok = match stage {
        "p3" => r == 3,
        "theorem" => r >= 5 && r != 7,
        "p7" | "p7_matching" | "p7_k1" => r == 7,
        "double_subspace" => r >= 4,
        "matching" => r >= 8,
        "k1" => r == 6 || r >= 8,
        "k2" => r >= 7,
        _ => return fail(format!("unknown cubic stage {stage:?}")),
    };
    if !ok {
        return fail(format!("cubic stage {stage} does not apply for r = {r}"));
    }
    match stage {
        "p3" | "p7" | "theorem" => cubic::theorem_system(r),
        "p7_matching" => cubic::p7_matching(),
        "p7_k1" => cubic::p7_k1(),
        "double_subspace" => cubic::double_subspace(r, 0),
        "matching" => cubic::matching(r),
        "k1" => cubic::k1(r),
        _ => cubic::k2(r),
    }
}

fn cubic_stage(rule: Rule, params: &Params, sys: &LinearSystem) -> Result<Expansion> {
    let stage = text_param(params, "stage")?;
    let r = sys.r();
    if cubic_rule(r) != rule {
        return fail(format!("{rule} does not apply for r = {r}"));
    }
    let target = cubic_stage_system(stage, r)?;
    if *sys != target {
        return fail(format!("cubic stage {stage} for r = {r} proves {target}, not {sys}"));
    }
    let p3 = || LinearSystem::nodes(3, 3, 5);
    let (children, side_conditions) = match stage {
        "p3" => (
            vec![cubic::p3_kernel()?, cubic::p3_trace()?],
            vec![SideCondition::new("v", sys.virtual_dim(), "=", -1)],
        ),
        "theorem" => (
            vec![
                cubic::theorem_system(r - 3)?,
                cubic::double_subspace(r, cubic::gamma_step(r)?)?,
                cubic::matching(r)?,
            ],
            vec![
                SideCondition::new("v", sys.virtual_dim(), "=", -1),
                SideCondition::new("gamma_step", cubic::gamma_step(r)?, "<=", 1),
            ],
        ),
        "p7" => (
            vec![p3()?, cubic::p7_matching()?],
            vec![SideCondition::new("v", sys.virtual_dim(), "=", -1)],
        ),
        "p7_matching" => (vec![cubic::p7_k1()?, p3()?], vec![]),
        "p7_k1" => (vec![cubic::p7_k2()?, p3()?], vec![]),
        "double_subspace" => (
            vec![cubic::double_subspace_kernel(r)?, cubic::double_subspace(r - 1, 0)?],
            vec![],
        ),
        "matching" => (vec![cubic::k1(r)?, cubic::matching(r - 3)?], vec![]),
        "k1" => (vec![cubic::k2(r)?, cubic::k1(r - 3)?], vec![]),
        _ => (vec![cubic::k2_kernel(r)?, cubic::k2(r - 1)?], vec![]),
    };
    Ok(Expansion {
        children: children.into_iter().map(|s| child(s, Req::Empty)).collect(),
        side_conditions,
        value: Conclusion::Fixed(minus_one()),
    })
}
