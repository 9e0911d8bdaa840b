//! The auxiliary systems of the cubic induction.
//!
//! All subspaces are general of codimension 3 unless the name says `p7`,
//! where codimension 4 is used.

use super::{LinearSystem, Subspace};
use crate::combinatorics::{gamma_r, n_bounds, to_count};
use crate::error::{Error, Result};

fn n_minus3(r: u32) -> Result<u64> {
    to_count(&n_bounds(r, 3).0)
}

fn gamma(r: u32) -> Result<u64> {
    to_count(&gamma_r(r))
}

fn need(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(what.to_string()))
    }
}

/// `L_{r,3}(2^{n⁻(r,3)}, 1^{γ(r)})`, of virtual dimension `-1`.
pub fn theorem_system(r: u32) -> Result<LinearSystem> {
    need(r >= 2, "theorem_system needs r >= 2")?;
    LinearSystem::with_points(r, 3, &[(2, n_minus3(r)?), (1, gamma(r)?)])
}

/// `γ(r) - γ(r-3)`, the simple points left on the strict transform.
pub fn gamma_step(r: u32) -> Result<u64> {
    need(r >= 5, "gamma_step needs r >= 5")?;
    let (a, b) = (gamma(r)?, gamma(r - 3)?);
    a.checked_sub(b)
        .ok_or_else(|| Error::invalid(format!("gamma decreases from r-3 to r = {r}")))
}

/// `L_{r,3}(2L, 2^{r+1}, 1^s)`: singular along a codimension-3 subspace.
pub fn double_subspace(r: u32, s: u64) -> Result<LinearSystem> {
    need(r >= 3, "double_subspace needs r >= 3")?;
    LinearSystem::new(
        r,
        3,
        vec![Subspace::new(3, 2, &[])],
        &[(2, r as u64 + 1), (1, s)],
    )
}

/// `L_{r,2}(2L, 2)`, of dimension 2.
pub fn quadric_double_subspace(r: u32) -> Result<LinearSystem> {
    need(r >= 3, "quadric_double_subspace needs r >= 3")?;
    LinearSystem::new(r, 2, vec![Subspace::new(3, 2, &[])], &[(2, 1)])
}

/// `L_{r,2}(2L, 2, 1^r)`, the kernel in the induction for `double_subspace`.
pub fn double_subspace_kernel(r: u32) -> Result<LinearSystem> {
    quadric_double_subspace(r)?.add_points(1, r as u64)
}

/// The matching system `L_{r,3}({L, 2^{n⁻(r-3,3)}}, 2^{r+1}, 1^{γ(r)-γ(r-3)})`.
pub fn matching(r: u32) -> Result<LinearSystem> {
    need(r >= 5, "matching needs r >= 5")?;
    LinearSystem::new(
        r,
        3,
        vec![Subspace::new(3, 1, &[(2, n_minus3(r - 3)?)])],
        &[(2, r as u64 + 1), (1, gamma_step(r)?)],
    )
}

/// `K₁(r) = L_{r,3}({L1, 2^{r-2}}, {L2, 2^{r-2}}, 2^3)`.
pub fn k1(r: u32) -> Result<LinearSystem> {
    need(r >= 3, "k1 needs r >= 3")?;
    let t = r as u64 - 2;
    LinearSystem::new(
        r,
        3,
        vec![Subspace::new(3, 1, &[(2, t)]), Subspace::new(3, 1, &[(2, t)])],
        &[(2, 3)],
    )
}

/// `K₂(r) = L_{r,3}({L1, 2^3}, {L2, 2^3}, {L3, 2^3})`.
pub fn k2(r: u32) -> Result<LinearSystem> {
    need(r >= 3, "k2 needs r >= 3")?;
    LinearSystem::new(r, 3, vec![Subspace::new(3, 1, &[(2, 3)]); 3], &[])
}

/// `L_{r,2}(L1, L2, L3)`: quadrics through three general codimension-3 subspaces.
pub fn k2_kernel(r: u32) -> Result<LinearSystem> {
    need(r >= 3, "k2_kernel needs r >= 3")?;
    LinearSystem::new(r, 2, vec![Subspace::new(3, 1, &[]); 3], &[])
}

/// `L_{3,2}(2^2, 1^3)`, kernel of the `P^3` base case.
pub fn p3_kernel() -> Result<LinearSystem> {
    LinearSystem::with_points(3, 2, &[(2, 2), (1, 3)])
}

/// `L_{2,3}(2^3, 1)`, containing the trace of the `P^3` base case: the line
/// through the two nodes off the plane meets it in a base point.
pub fn p3_trace() -> Result<LinearSystem> {
    LinearSystem::with_points(2, 3, &[(2, 3), (1, 1)])
}

/// `L_{7,3}({L1, 2^5}, 2^10)` with `L1` of codimension 4.
pub fn p7_matching() -> Result<LinearSystem> {
    LinearSystem::new(7, 3, vec![Subspace::new(4, 1, &[(2, 5)])], &[(2, 10)])
}

/// `L_{7,3}({L1, 2^5}, {L2, 2^5}, 2^5)`, codimension 4.
pub fn p7_k1() -> Result<LinearSystem> {
    LinearSystem::new(7, 3, vec![Subspace::new(4, 1, &[(2, 5)]); 2], &[(2, 5)])
}

/// `L_{7,3}({L1, 2^5}, {L2, 2^5}, {L3, 2^5})`, codimension 4.
pub fn p7_k2() -> Result<LinearSystem> {
    LinearSystem::new(7, 3, vec![Subspace::new(4, 1, &[(2, 5)]); 3], &[])
}

/// `L_{7,2}({L, 2^3}, 2)`, of dimension 6.
pub fn p7_quadric() -> Result<LinearSystem> {
    LinearSystem::new(7, 2, vec![Subspace::new(3, 1, &[(2, 3)])], &[(2, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn theorem_systems_have_virtual_minus_one() {
        for r in 5..40 {
            assert_eq!(theorem_system(r).unwrap().virtual_dim(), BigInt::from(-1), "r={r}");
        }
        assert_eq!(theorem_system(5).unwrap().to_string(), "L(r=5,d=3; 2^9, 1^2)");
        assert_eq!(theorem_system(7).unwrap().to_string(), "L(r=7,d=3; 2^15)");
        assert_eq!(theorem_system(3).unwrap().to_string(), "L(r=3,d=3; 2^5)");
    }

    #[test]
    fn node_split_adds_up() {
        // n⁻(r,3) = n⁻(r-3,3) + r + 1
        for r in 5..40 {
            assert_eq!(n_minus3(r).unwrap(), n_minus3(r - 3).unwrap() + r as u64 + 1);
            assert!(gamma_step(r).unwrap() <= 1);
        }
    }

    #[test]
    fn texts() {
        assert_eq!(
            matching(5).unwrap().to_string(),
            "L(r=5,d=3; {L1:codim3, 2^3 on L1}, 2^6, 1)"
        );
        assert_eq!(matching(6).unwrap().to_string(), "L(r=6,d=3; {L1:codim3, 2^5 on L1}, 2^7)");
        assert_eq!(matching(7).unwrap().to_string(), "L(r=7,d=3; {L1:codim3, 2^7 on L1}, 2^8)");
        assert_eq!(k1(3).unwrap(), LinearSystem::nodes(3, 3, 5).unwrap());
        assert_eq!(double_subspace(3, 0).unwrap(), LinearSystem::nodes(3, 3, 5).unwrap());
        assert_eq!(
            p7_quadric().unwrap().to_string(),
            "L(r=7,d=2; {L1:codim3, 2^3 on L1}, 2)"
        );
        assert_eq!(p7_matching().unwrap().virtual_dim(), BigInt::from(-1));
    }
}
