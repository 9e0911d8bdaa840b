//! Linear systems `L_{r,d}(...)` of degree-`d` hypersurfaces of `P^r` with
//! prescribed base conditions, and the symbolic operations on them.
//!
//! A system is always stored in canonical form: fat points merged by
//! multiplicity and sorted in decreasing order, subspaces sorted and renamed
//! `L1, L2, ...`. Two systems are equal exactly when their canonical texts
//! agree, which is what the prover's memo table relies on.

pub mod classify;
pub mod cubic;
pub mod syntax;
pub mod transform;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::combinatorics::{self, binom, forms, point_conditions};
use crate::error::{Error, Result};

pub use classify::{classify, classify_system, special_dim, ExceptionTag, SpecialVerdict};
pub use transform::{
    castelnuovo_split, cone_reduce, deg1_components, deg2_components, limit_dim,
    transversal_intersection_dim, Deg1Components, Deg2Components,
};

/// One base condition, in the flattened form used for construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BaseCondition {
    /// `count` general points of multiplicity `mult`.
    FatPoint { mult: u32, count: u64 },
    /// A general linear subspace of codimension `codim` along which the
    /// hypersurfaces vanish to order `mult`.
    FatSubspace { id: String, codim: u32, mult: u32 },
    /// `count` general points of multiplicity `mult` supported on a subspace.
    PointOnSubspace { subspace: String, mult: u32, count: u64 },
}

/// A fat subspace together with the fat points supported on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    pub codim: u32,
    pub mult: u32,
    /// `(multiplicity, count)`, merged and sorted by decreasing multiplicity.
    pub points: Vec<(u32, u64)>,
}

impl Subspace {
    pub fn new(codim: u32, mult: u32, points: &[(u32, u64)]) -> Self {
        Subspace {
            codim,
            mult,
            points: merge_points(points),
        }
    }

    fn sort_key(&self) -> (u32, std::cmp::Reverse<u32>, std::cmp::Reverse<Vec<(u32, u64)>>) {
        (
            self.codim,
            std::cmp::Reverse(self.mult),
            std::cmp::Reverse(self.points.clone()),
        )
    }
}

/// `L_{r,d}` with base conditions, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearSystem {
    r: u32,
    d: u32,
    subspaces: Vec<Subspace>,
    points: Vec<(u32, u64)>,
}

fn merge_points(points: &[(u32, u64)]) -> Vec<(u32, u64)> {
    let mut merged: Vec<(u32, u64)> = Vec::new();
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| b.0.cmp(&a.0));
    for (m, c) in sorted {
        if c == 0 {
            continue;
        }
        match merged.last_mut() {
            Some(last) if last.0 == m => last.1 += c,
            _ => merged.push((m, c)),
        }
    }
    merged
}

impl LinearSystem {
    /// Builds and canonicalizes a system.
    pub fn new(r: u32, d: u32, subspaces: Vec<Subspace>, points: &[(u32, u64)]) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("ambient dimension r must be at least 1"));
        }
        if points.iter().any(|&(m, c)| m == 0 && c > 0) {
            return Err(Error::invalid("point multiplicities must be >= 1"));
        }
        let mut pts = points.to_vec();
        let mut subs = Vec::with_capacity(subspaces.len());
        for mut s in subspaces {
            if s.codim == 0 || s.codim > r {
                return Err(Error::invalid(format!(
                    "subspace codimension {} outside 1..={r}",
                    s.codim
                )));
            }
            if s.mult == 0 {
                return Err(Error::invalid("subspace multiplicity must be >= 1"));
            }
            if s.points.iter().any(|&(m, c)| m == 0 && c > 0) {
                return Err(Error::invalid("point multiplicities must be >= 1"));
            }
            s.points = merge_points(&s.points);
            // a codimension-r subspace is a single point
            if s.codim == r {
                let on: u64 = s.points.iter().map(|p| p.1).sum();
                if on == 0 {
                    pts.push((s.mult, 1));
                    continue;
                }
                if on == 1 {
                    pts.push((s.mult.max(s.points[0].0), 1));
                    continue;
                }
            }
            subs.push(s);
        }
        subs.sort_by_key(Subspace::sort_key);
        Ok(LinearSystem {
            r,
            d,
            subspaces: subs,
            points: merge_points(&pts),
        })
    }

    /// A system with general fat points only.
    pub fn with_points(r: u32, d: u32, points: &[(u32, u64)]) -> Result<Self> {
        Self::new(r, d, Vec::new(), points)
    }

    /// `L_{r,d}(2^n)`.
    pub fn nodes(r: u32, d: u32, n: u64) -> Result<Self> {
        Self::with_points(r, d, &[(2, n)])
    }

    /// Builds a system from flattened conditions. Subspace ids only need to
    /// be consistent within the list; they are renamed canonically.
    pub fn from_conditions(r: u32, d: u32, conditions: &[BaseCondition]) -> Result<Self> {
        let mut ids: Vec<String> = Vec::new();
        let mut subs: Vec<Subspace> = Vec::new();
        let mut points = Vec::new();
        for c in conditions {
            if let BaseCondition::FatSubspace { id, codim, mult } = c {
                if ids.contains(id) {
                    return Err(Error::invalid(format!("duplicate subspace id {id}")));
                }
                ids.push(id.clone());
                subs.push(Subspace::new(*codim, *mult, &[]));
            }
        }
        for c in conditions {
            match c {
                BaseCondition::FatPoint { mult, count } => points.push((*mult, *count)),
                BaseCondition::PointOnSubspace {
                    subspace,
                    mult,
                    count,
                } => {
                    let i = ids.iter().position(|s| s == subspace).ok_or_else(|| {
                        Error::invalid(format!("points reference unknown subspace {subspace}"))
                    })?;
                    subs[i].points.push((*mult, *count));
                }
                BaseCondition::FatSubspace { .. } => {}
            }
        }
        Self::new(r, d, subs, &points)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// General fat points as `(multiplicity, count)`, decreasing multiplicity.
    pub fn points(&self) -> &[(u32, u64)] {
        &self.points
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn is_points_only(&self) -> bool {
        self.subspaces.is_empty()
    }

    /// Canonical subspace id of the `i`-th subspace.
    pub fn subspace_id(i: usize) -> String {
        format!("L{}", i + 1)
    }

    /// Flattened conditions, in canonical order.
    pub fn conditions(&self) -> Vec<BaseCondition> {
        let mut out = Vec::new();
        for (i, s) in self.subspaces.iter().enumerate() {
            let id = Self::subspace_id(i);
            out.push(BaseCondition::FatSubspace {
                id: id.clone(),
                codim: s.codim,
                mult: s.mult,
            });
            for &(mult, count) in &s.points {
                out.push(BaseCondition::PointOnSubspace {
                    subspace: id.clone(),
                    mult,
                    count,
                });
            }
        }
        for &(mult, count) in &self.points {
            out.push(BaseCondition::FatPoint { mult, count });
        }
        out
    }

    /// Number of general points of multiplicity exactly `m`.
    pub fn count(&self, m: u32) -> u64 {
        self.points
            .iter()
            .find(|p| p.0 == m)
            .map(|p| p.1)
            .unwrap_or(0)
    }

    /// Total number of general points.
    pub fn point_total(&self) -> u64 {
        self.points.iter().map(|p| p.1).sum()
    }

    /// Largest multiplicity appearing anywhere (0 for the complete system).
    pub fn max_mult(&self) -> u32 {
        let p = self.points.iter().map(|p| p.0);
        let s = self
            .subspaces
            .iter()
            .flat_map(|s| std::iter::once(s.mult).chain(s.points.iter().map(|p| p.0)));
        p.chain(s).max().unwrap_or(0)
    }

    /// `C(r+d, r)`, the number of columns of the condition matrix.
    pub fn columns(&self) -> BigInt {
        forms(self.r, self.d)
    }

    /// Same conditions plus `count` more general points of multiplicity `m`.
    pub fn add_points(&self, m: u32, count: u64) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.push((m, count));
        Self::new(self.r, self.d, self.subspaces.clone(), &pts)
    }

    /// Same conditions minus `count` general points of multiplicity `m`.
    pub fn remove_points(&self, m: u32, count: u64) -> Result<Self> {
        let have = self.count(m);
        if have < count {
            return Err(Error::invalid(format!(
                "cannot remove {count} points of multiplicity {m}: only {have} present"
            )));
        }
        let pts: Vec<_> = self
            .points
            .iter()
            .map(|&(pm, c)| if pm == m { (pm, c - count) } else { (pm, c) })
            .collect();
        Self::new(self.r, self.d, self.subspaces.clone(), &pts)
    }

    /// Condition count used for the virtual dimension.
    ///
    /// For general fat points this is the usual `sum C(r+m-1, r)`. For a fat
    /// subspace it is the number of degree-`d` monomials of order `< m` in the
    /// normal coordinates, and a point on a subspace is charged only for the
    /// derivatives the subspace does not already kill. Overlaps between
    /// distinct subspaces are not subtracted, so for several subspaces the
    /// count is an upper bound on the number of independent conditions.
    pub fn condition_count(&self) -> BigInt {
        let mut total = BigInt::from(0);
        for &(m, c) in &self.points {
            total += point_conditions(self.r, m) * c;
        }
        for s in &self.subspaces {
            total += subspace_conditions(self.r, self.d, s.codim, s.mult);
            for &(m, c) in &s.points {
                total += point_on_subspace_conditions(self.r, s.codim, s.mult, m) * c;
            }
        }
        total
    }

    /// `C(r+d, r) - 1 - condition_count()`.
    pub fn virtual_dim(&self) -> BigInt {
        self.columns() - 1 - self.condition_count()
    }

    pub fn expected_dim(&self) -> BigInt {
        combinatorics::expected_dim(&self.virtual_dim())
    }

    /// True when every general point has multiplicity 2 and there are no
    /// subspaces.
    pub fn is_double_points_only(&self) -> bool {
        self.is_points_only() && self.points.iter().all(|p| p.0 == 2)
    }
}

/// Monomials of degree `d` in `r+1` variables with degree `< m` in `c` of them.
pub fn subspace_conditions(r: u32, d: u32, c: u32, m: u32) -> BigInt {
    let tangent = (r - c) as u64;
    let mut total = BigInt::from(0);
    for j in 0..m.min(d + 1) {
        let normal = binom(c as u64 - 1 + j as u64, j as i64);
        total += normal * binom(tangent + (d - j) as u64, tangent as i64);
    }
    total
}

/// Extra conditions imposed by a point of multiplicity `mp` lying on a
/// codimension-`c` subspace that already carries multiplicity `ml`.
pub fn point_on_subspace_conditions(r: u32, c: u32, ml: u32, mp: u32) -> BigInt {
    let tangent = (r - c) as u64;
    let mut implied = BigInt::from(0);
    for j in 0..ml.min(mp) {
        let normal = binom(c as u64 - 1 + j as u64, j as i64);
        implied += normal * binom(tangent + (mp - 1 - j) as u64, tangent as i64);
    }
    point_conditions(r, mp) - implied
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&syntax::format(self))
    }
}

impl FromStr for LinearSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        syntax::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(s: &str) -> LinearSystem {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_merge_and_order() {
        let a = LinearSystem::with_points(3, 4, &[(2, 3), (3, 1), (2, 2)]).unwrap();
        assert_eq!(a.points(), &[(3, 1), (2, 5)]);
        assert_eq!(a.to_string(), "L(r=3,d=4; 3, 2^5)");
        let b = LinearSystem::with_points(3, 4, &[(2, 0)]).unwrap();
        assert_eq!(b.to_string(), "L(r=3,d=4)");
    }

    #[test]
    fn point_subspace_collapses() {
        // codim 3 in P^3 is a point
        let s = sys("L(r=3,d=3; {2L1:codim3}, 2^4)");
        assert_eq!(s, LinearSystem::nodes(3, 3, 5).unwrap());
        let k1 = sys("L(r=3,d=3; {L1:codim3, 2 on L1}, {L2:codim3, 2 on L2}, 2^3)");
        assert_eq!(k1, LinearSystem::nodes(3, 3, 5).unwrap());
    }

    #[test]
    fn virtual_dims_points() {
        assert_eq!(sys("L(r=4,d=3; 2^7)").virtual_dim(), BigInt::from(-1));
        assert_eq!(sys("L(r=3,d=4; 2^8)").virtual_dim(), BigInt::from(2));
        assert_eq!(sys("L(r=5,d=6)").virtual_dim(), forms(5, 6) - 1);
    }

    #[test]
    fn subspace_condition_counts() {
        // containing a codim-c subspace kills the forms in r-c+1 variables
        for r in 2..8 {
            for c in 1..=r {
                for d in 0..5 {
                    assert_eq!(
                        subspace_conditions(r, d, c, 1),
                        forms(r - c, d),
                        "r={r} c={c} d={d}"
                    );
                }
            }
        }
        // a node on a contained subspace adds c conditions
        assert_eq!(point_on_subspace_conditions(7, 3, 1, 2), BigInt::from(3));
        // a node on a doubled subspace adds nothing
        assert_eq!(point_on_subspace_conditions(7, 3, 2, 2), BigInt::from(0));
        // quadrics double along a codim-3 subspace: 6 conditions left free
        assert_eq!(subspace_conditions(5, 2, 3, 2), forms(5, 2) - 6);
    }

    #[test]
    fn add_remove() {
        let s = LinearSystem::nodes(3, 5, 14).unwrap();
        assert_eq!(s.remove_points(2, 4).unwrap(), LinearSystem::nodes(3, 5, 10).unwrap());
        assert!(s.remove_points(2, 15).is_err());
        assert_eq!(s.add_points(1, 2).unwrap().to_string(), "L(r=3,d=5; 2^14, 1^2)");
    }

    #[test]
    fn conditions_roundtrip() {
        let s = sys("L(r=7,d=3; {L1:codim3, 2^5 on L1}, 2^10)");
        let again = LinearSystem::from_conditions(7, 3, &s.conditions()).unwrap();
        assert_eq!(s, again);
        assert!(LinearSystem::from_conditions(
            3,
            3,
            &[BaseCondition::PointOnSubspace {
                subspace: "X".into(),
                mult: 2,
                count: 1
            }]
        )
        .is_err());
    }

    #[test]
    fn rejects_bad_codim() {
        assert!(LinearSystem::new(3, 3, vec![Subspace::new(4, 1, &[])], &[]).is_err());
        assert!(LinearSystem::new(3, 3, vec![Subspace::new(0, 1, &[])], &[]).is_err());
        assert!(LinearSystem::with_points(0, 3, &[]).is_err());
    }
}
