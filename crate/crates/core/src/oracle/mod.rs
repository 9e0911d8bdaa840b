//! Dimension of a linear system by rank of its interpolation matrix over
//! `F_p` at randomly placed base conditions.
//!
//! Each trial places the points (and subspaces) at random, builds the
//! condition rows lazily and eliminates them incrementally, stopping as soon
//! as the rank reaches the number of monomials. Special position can only
//! drop the rank, so every trial gives an upper bound on the dimension for
//! general position and the report keeps the minimum.
//!
//! How likely is a wrong answer? Take a `k x k` minor that is nonzero for
//! general points, `k` the generic rank. It is a polynomial in the point
//! coordinates of degree at most `k*d`, so a uniform draw from `F_p` kills
//! it with probability at most `k*d/p` (Schwartz–Zippel). With `k <= 5000`,
//! `d <= 30` and `p = 2^31-1` one trial is wrong with probability below
//! `7e-5`, and all trials together below that to the power `trials`. This
//! assumes the generic rank in characteristic `p` equals the one over `C`,
//! the usual large-prime assumption; `cross_check_prime` repeats the run
//! with a second prime.

mod field;
mod rows;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::binom;
use crate::error::{Error, Result};
use crate::systems::LinearSystem;

pub use field::{check_prime, is_prime, Echelon, Field, Generic, Mersenne31, Reduce, MERSENNE_31};
pub use rows::{rows_for_axis_subspace, rows_for_point, Monomials, SubspaceSample};

/// Where the fat subspace conditions come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspacePath {
    /// Monomial filter for a single coordinate subspace, sampling otherwise.
    #[default]
    Auto,
    /// Always sample points on random subspaces.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldConfig {
    pub prime: u64,
    pub trials: u32,
    pub seed: u64,
    pub max_columns: usize,
    pub subspace_path: SubspacePath,
    /// Repeat every trial over this prime as well and keep the smaller dimension.
    pub cross_check_prime: Option<u64>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            prime: MERSENNE_31,
            trials: 3,
            seed: 0,
            max_columns: 5000,
            subspace_path: SubspacePath::Auto,
            cross_check_prime: None,
        }
    }
}

impl FieldConfig {
    pub fn with_seed(seed: u64) -> Self {
        FieldConfig {
            seed,
            ..Self::default()
        }
    }

    /// Checks the primes, the trial count and the column budget for `sys`.
    pub fn check(&self, sys: &LinearSystem) -> Result<usize> {
        if self.trials == 0 {
            return Err(Error::invalid("at least one trial is needed"));
        }
        let need = 2 * sys.d() as u64 * sys.max_mult().max(1) as u64;
        for p in std::iter::once(self.prime).chain(self.cross_check_prime) {
            check_prime(p)?;
            if p <= need {
                return Err(Error::invalid(format!(
                    "prime {p} must exceed 2*d*(largest multiplicity) = {need}"
                )));
            }
        }
        columns_within(sys, self.max_columns)
    }
}

/// Column count of `sys` if it fits in the budget.
pub fn columns_within(sys: &LinearSystem, max: usize) -> Result<usize> {
    let cols = sys.columns();
    match usize::try_from(&cols) {
        Ok(c) if c <= max => Ok(c),
        _ => Err(Error::Budget {
            columns: cols.to_string(),
            max,
        }),
    }
}

/// Second-prime run recorded alongside the main one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub prime: u64,
    pub per_trial_rank: Vec<u64>,
    #[serde(with = "crate::bigjson")]
    pub dim: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub system: String,
    pub prime: u64,
    pub seed: u64,
    pub trials: u32,
    pub per_trial_rank: Vec<u64>,
    #[serde(with = "crate::bigjson")]
    pub dim: BigInt,
    #[serde(with = "crate::bigjson")]
    pub r#virtual: BigInt,
    #[serde(with = "crate::bigjson")]
    pub expected: BigInt,
    /// `dim > expected`; `None` for systems with subspaces, whose virtual
    /// dimension is only a naive count.
    pub special: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
}

/// A fully built condition matrix, for inspection and tests. The oracle
/// itself never materializes one.
#[derive(Clone, Debug)]
pub struct ConditionMatrix {
    pub prime: u64,
    pub columns: usize,
    pub rows: Vec<Vec<u64>>,
}

impl ConditionMatrix {
    /// All condition rows of one random placement of `sys`.
    pub fn build(sys: &LinearSystem, cfg: &FieldConfig, trial: u32) -> Result<Self> {
        let columns = cfg.check(sys)?;
        let mut rows = Vec::new();
        let mut rng = trial_rng(cfg.seed, trial as u64);
        for_each_block(sys, Field(Generic(cfg.prime)), cfg.subspace_path, &mut rng, |b| {
            rows.extend(b.into_iter().map(|r| r.into_iter().map(u64::from).collect::<Vec<_>>()));
            false
        })?;
        Ok(ConditionMatrix {
            prime: cfg.prime,
            columns,
            rows,
        })
    }
}

/// Rank over `F_p` by Gaussian elimination.
pub fn rank_mod_p(m: &ConditionMatrix) -> usize {
    if m.prime == MERSENNE_31 {
        rank_with(Field(Mersenne31), m)
    } else {
        rank_with(Field(Generic(m.prime)), m)
    }
}

fn rank_with<R: Reduce>(f: Field<R>, m: &ConditionMatrix) -> usize {
    let mut ech = Echelon::new(f, m.columns);
    for row in &m.rows {
        if ech.is_full() {
            break;
        }
        ech.insert(row.iter().map(|&x| (x % f.p()) as u32).collect());
    }
    ech.rank()
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generates the row blocks of one random placement, subspaces first. Stops
/// early when `sink` returns true.
fn for_each_block<R: Reduce>(
    sys: &LinearSystem,
    field: Field<R>,
    path: SubspacePath,
    rng: &mut ChaCha8Rng,
    mut sink: impl FnMut(Vec<Vec<u32>>) -> bool,
) -> Result<()> {
    let (r, d) = (sys.r(), sys.d());
    let vars = r as usize + 1;
    let p = field.p();
    let mons = Monomials::new(r, d);
    let axis = path == SubspacePath::Auto && sys.subspaces().len() == 1;
    for s in sys.subspaces() {
        let c = s.codim as usize;
        if axis {
            if sink(rows_for_axis_subspace(&mons, s.codim, s.mult)) {
                return Ok(());
            }
            for &(m, count) in &s.points {
                for _ in 0..count {
                    let q = rows::random_axis_point(rng, p, vars, c)?;
                    if sink(rows_for_point(&mons, field, &q, m)?) {
                        return Ok(());
                    }
                }
            }
        } else {
            let sample = SubspaceSample::new(rng, p, vars, vars - c)?;
            let tangent = (r as usize - c) as u64;
            let n = binom(tangent + d as u64, tangent as i64);
            let n = u64::try_from(n).map_err(|_| Error::invalid("subspace sample too large"))?;
            for _ in 0..n {
                let q = sample.point(rng, field)?;
                if sink(rows_for_point(&mons, field, &q, s.mult)?) {
                    return Ok(());
                }
            }
            for &(m, count) in &s.points {
                for _ in 0..count {
                    let q = sample.point(rng, field)?;
                    if sink(rows_for_point(&mons, field, &q, m)?) {
                        return Ok(());
                    }
                }
            }
        }
    }
    for &(m, count) in sys.points() {
        for _ in 0..count {
            let q = rows::random_vector(rng, p, vars)?;
            if sink(rows_for_point(&mons, field, &q, m)?) {
                return Ok(());
            }
        }
    }
    Ok(())
}

fn trial_rank<R: Reduce>(
    sys: &LinearSystem,
    field: Field<R>,
    columns: usize,
    path: SubspacePath,
    mut rng: ChaCha8Rng,
) -> Result<u64> {
    let mut ech = Echelon::new(field, columns);
    for_each_block(sys, field, path, &mut rng, |block| {
        ech.insert_block(block);
        ech.is_full()
    })?;
    Ok(ech.rank() as u64)
}

fn ranks(
    sys: &LinearSystem,
    prime: u64,
    columns: usize,
    cfg: &FieldConfig,
    stream0: u64,
) -> Result<Vec<u64>> {
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let rng = trial_rng(cfg.seed, stream0 + t);
            if prime == MERSENNE_31 {
                trial_rank(sys, Field(Mersenne31), columns, cfg.subspace_path, rng)
            } else {
                trial_rank(sys, Field(Generic(prime)), columns, cfg.subspace_path, rng)
            }
        })
        .collect()
}

fn dim_from(columns: usize, ranks: &[u64]) -> BigInt {
    let best = ranks.iter().copied().max().unwrap_or(0);
    BigInt::from(columns as u64) - best - 1
}

/// Dimension of `sys` for general position of its base conditions.
pub fn dimension(sys: &LinearSystem, cfg: &FieldConfig) -> Result<DimensionReport> {
    let columns = cfg.check(sys)?;
    let per_trial_rank = ranks(sys, cfg.prime, columns, cfg, 0)?;
    let mut dim = dim_from(columns, &per_trial_rank);
    let cross_check = match cfg.cross_check_prime {
        Some(q) => {
            let ranks = ranks(sys, q, columns, cfg, cfg.trials as u64)?;
            let d2 = dim_from(columns, &ranks);
            dim = dim.min(d2.clone());
            Some(CrossCheck {
                prime: q,
                per_trial_rank: ranks,
                dim: d2,
            })
        }
        None => None,
    };
    let virtual_dim = sys.virtual_dim();
    let expected = sys.expected_dim();
    let special = sys.is_points_only().then(|| dim > expected);
    Ok(DimensionReport {
        system: sys.to_string(),
        prime: cfg.prime,
        seed: cfg.seed,
        trials: cfg.trials,
        per_trial_rank,
        dim,
        r#virtual: virtual_dim,
        expected,
        special,
        cross_check,
    })
}

/// True iff the oracle finds no hypersurface in the system.
pub fn is_empty(sys: &LinearSystem, cfg: &FieldConfig) -> Result<bool> {
    Ok(dimension(sys, cfg)?.dim == BigInt::from(-1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::cubic;

    fn dim(text: &str) -> i64 {
        let sys: LinearSystem = text.parse().unwrap();
        let rep = dimension(&sys, &FieldConfig::with_seed(7)).unwrap();
        i64::try_from(&rep.dim).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(dim("L(r=2,d=2; 2^2)"), 0);
        assert_eq!(dim("L(r=3,d=3; 2^5)"), -1);
        assert_eq!(dim("L(r=2,d=4; 2^5)"), 0);
        assert_eq!(dim("L(r=2,d=3; 2^2)"), 3);
        assert_eq!(dim("L(r=4,d=3)"), 34);
        assert_eq!(dim("L(r=3,d=4; 4, 2^4)"), dim("L(r=2,d=4; 2^4)"));
    }

    #[test]
    fn emptiness() {
        let cfg = FieldConfig::default();
        assert!(is_empty(&"L(r=5,d=3; 2^9, 1^2)".parse().unwrap(), &cfg).unwrap());
        assert!(!is_empty(&"L(r=4,d=0)".parse().unwrap(), &cfg).unwrap());
        assert!(!is_empty(&"L(r=3,d=2)".parse().unwrap(), &cfg).unwrap());
    }

    #[test]
    fn subspace_examples() {
        assert_eq!(dim("L(r=7,d=2; {L1:codim3, 2^3 on L1}, 2)"), 6);
        for r in 4..=7 {
            assert_eq!(dim(&cubic::quadric_double_subspace(r).unwrap().to_string()), 2);
        }
    }

    #[test]
    fn codim_r_subspace_is_a_point() {
        // canonicalized to a simple point; still one evaluation row
        assert_eq!(dim("L(r=3,d=2; {L1:codim3})"), 8);
    }

    #[test]
    fn secant_cubic_rank() {
        let sys: LinearSystem = "L(r=4,d=3; 2^7)".parse().unwrap();
        let m = ConditionMatrix::build(&sys, &FieldConfig::default(), 0).unwrap();
        assert_eq!(m.rows.len(), 35);
        assert_eq!(m.columns, 35);
        assert_eq!(rank_mod_p(&m), 34);
    }

    #[test]
    fn rank_basics() {
        let id = ConditionMatrix {
            prime: 101,
            columns: 4,
            rows: (0..4).map(|i| (0..4).map(|j| (i == j) as u64).collect()).collect(),
        };
        assert_eq!(rank_mod_p(&id), 4);
        let mut dup = id.clone();
        dup.rows.truncate(2);
        dup.rows.push(dup.rows[1].clone());
        assert_eq!(rank_mod_p(&dup), 2);
    }

    #[test]
    fn report_fields_and_json() {
        let sys: LinearSystem = "L(r=2,d=4; 2^5)".parse().unwrap();
        let rep = dimension(&sys, &FieldConfig::with_seed(3)).unwrap();
        assert_eq!(rep.per_trial_rank.len(), 3);
        assert_eq!(rep.r#virtual, BigInt::from(-1));
        assert_eq!(rep.special, Some(true));
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["virtual"], -1);
        assert_eq!(json["dim"], 0);
        let back: DimensionReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn budget_and_config_errors() {
        let sys: LinearSystem = "L(r=10,d=10; 2)".parse().unwrap();
        assert!(matches!(
            dimension(&sys, &FieldConfig::default()),
            Err(Error::Budget { .. })
        ));
        let small: LinearSystem = "L(r=2,d=4; 2)".parse().unwrap();
        let cfg = FieldConfig {
            prime: 13,
            ..FieldConfig::default()
        };
        assert!(dimension(&small, &cfg).is_err());
        let cfg = FieldConfig {
            trials: 0,
            ..FieldConfig::default()
        };
        assert!(dimension(&small, &cfg).is_err());
    }

    #[test]
    fn cross_check_prime_is_recorded() {
        let sys: LinearSystem = "L(r=3,d=4; 2^8)".parse().unwrap();
        let cfg = FieldConfig {
            cross_check_prime: Some(1_000_000_007),
            ..FieldConfig::default()
        };
        let rep = dimension(&sys, &cfg).unwrap();
        assert_eq!(rep.dim, BigInt::from(2));
        assert_eq!(rep.cross_check.unwrap().dim, BigInt::from(2));
    }

    #[test]
    fn subspace_paths_agree() {
        let sampled = FieldConfig {
            subspace_path: SubspacePath::Sampled,
            ..FieldConfig::with_seed(11)
        };
        for text in [
            "L(r=7,d=2; {L1:codim3, 2^3 on L1}, 2)",
            "L(r=5,d=3; {L1:codim3, 2^3 on L1}, 2^6, 1)",
            "L(r=6,d=3; {2L1:codim4}, 2^3)",
        ] {
            let sys: LinearSystem = text.parse().unwrap();
            let a = dimension(&sys, &FieldConfig::with_seed(11)).unwrap().dim;
            let b = dimension(&sys, &sampled).unwrap().dim;
            assert_eq!(a, b, "{text}");
        }
    }

    #[test]
    fn same_seed_same_report() {
        let sys: LinearSystem = "L(r=4,d=4; 2^13)".parse().unwrap();
        let cfg = FieldConfig::with_seed(99);
        assert_eq!(dimension(&sys, &cfg).unwrap(), dimension(&sys, &cfg).unwrap());
    }
}
