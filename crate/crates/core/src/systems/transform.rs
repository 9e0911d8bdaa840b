//! Symbolic transformations: restriction to a hyperplane, cones, and the
//! component systems of the two degenerations.

use num_bigint::BigInt;

use super::LinearSystem;
use crate::combinatorics::binom;
use crate::error::{Error, Result};

/// Restriction to a hyperplane `H` containing `on_h[i].1` of the points of
/// multiplicity `on_h[i].0`.
///
/// Returns `(kernel, trace)`: the kernel lives in degree `d-1` with every
/// specialized point losing one order of multiplicity, the trace lives on
/// `H = P^{r-1}` in degree `d` and keeps the specialized points with their
/// multiplicities.
pub fn castelnuovo_split(
    sys: &LinearSystem,
    on_h: &[(u32, u64)],
) -> Result<(LinearSystem, LinearSystem)> {
    if !sys.is_points_only() {
        return Err(Error::invalid("castelnuovo_split handles fat points only"));
    }
    if sys.r() < 2 || sys.d() == 0 {
        return Err(Error::invalid(format!(
            "castelnuovo_split needs r >= 2 and d >= 1, got {sys}"
        )));
    }
    let mut rest = sys.clone();
    let mut kernel_pts = Vec::new();
    for &(m, h) in on_h {
        if h > rest.count(m) {
            return Err(Error::invalid(format!(
                "cannot place {h} points of multiplicity {m} on the hyperplane: {sys} has {}",
                sys.count(m)
            )));
        }
        rest = rest.remove_points(m, h)?;
        kernel_pts.push((m - 1, h));
    }
    let mut kpts = rest.points().to_vec();
    kpts.extend(kernel_pts.into_iter().filter(|p| p.0 > 0));
    let kernel = LinearSystem::with_points(sys.r(), sys.d() - 1, &kpts)?;
    let trace = LinearSystem::with_points(sys.r() - 1, sys.d(), on_h)?;
    Ok((kernel, trace))
}

/// A degree-`d` hypersurface with a `d`-fold point is a cone over a
/// hypersurface of a hyperplane; the remaining points project to general
/// points there. Both systems have the same `h^0`.
pub fn cone_reduce(sys: &LinearSystem) -> Result<LinearSystem> {
    if !sys.is_points_only() {
        return Err(Error::invalid("cone_reduce handles fat points only"));
    }
    if sys.count(sys.d()) != 1 || sys.d() == 0 {
        return Err(Error::invalid(format!(
            "cone_reduce needs exactly one point of multiplicity d = {}, got {sys}",
            sys.d()
        )));
    }
    if sys.r() < 2 {
        return Err(Error::invalid("cone_reduce needs r >= 2"));
    }
    let rest = sys.remove_points(sys.d(), 1)?;
    LinearSystem::with_points(sys.r() - 1, sys.d(), rest.points())
}

/// Systems of a `(1, b)`-degeneration of `L_{r,d}(2^n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deg1Components {
    /// `L_{r,d-1}(2^{n-b})` on the component `P`.
    pub l_p: LinearSystem,
    /// `L_{r,d-2}(2^{n-b})`, kernel of restriction to `R`.
    pub hat_l_p: LinearSystem,
    /// `L_{r,d}(d-1, 2^b)` on the blown-up component `F`.
    pub l_f: LinearSystem,
    /// `L_{r,d}(d, 2^b)`, kernel on `F`; a cone over `L_{r-1,d}(2^b)`.
    pub hat_l_f: LinearSystem,
    /// `C(d+r-2, r-1)`, the number of degree-`(d-1)` forms on `R`.
    pub r_ambient: BigInt,
}

pub fn deg1_components(r: u32, d: u32, n: u64, b: u64) -> Result<Deg1Components> {
    if b > n {
        return Err(Error::invalid(format!("b = {b} exceeds n = {n}")));
    }
    if r < 2 || d < 2 {
        return Err(Error::invalid("degeneration needs r >= 2 and d >= 2"));
    }
    Ok(Deg1Components {
        l_p: LinearSystem::nodes(r, d - 1, n - b)?,
        hat_l_p: LinearSystem::nodes(r, d - 2, n - b)?,
        l_f: LinearSystem::with_points(r, d, &[(d - 1, 1), (2, b)])?,
        hat_l_f: LinearSystem::with_points(r, d, &[(d, 1), (2, b)])?,
        r_ambient: binom((d + r - 2) as u64, r as i64 - 1),
    })
}

/// Systems of the second degeneration, where `beta` of the `b` nodes on `F`
/// move onto `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deg2Components {
    /// `L_{r,d-1}(2^{n-b})`.
    pub l_p0: LinearSystem,
    /// `L_{r,d-2}(2^{n-b})`.
    pub hat_l_p0: LinearSystem,
    /// `L_{r,d-1}(2^{n-b+beta})`.
    pub bar_l_p0: LinearSystem,
    /// `L_{r,d}(d-1, 2^b)`.
    pub l_f0: LinearSystem,
    /// `L_{r,d}(d, 2^{b-beta}, 1^beta)`, a cone over `L_{r-1,d}(2^{b-beta}, 1^beta)`.
    pub hat_l_f0: LinearSystem,
    /// `L_{r-1,d-1}(2^beta, 1^{b-beta})`, the series cut on `R`.
    pub r_f0: LinearSystem,
}

pub fn deg2_components(r: u32, d: u32, n: u64, b: u64, beta: u64) -> Result<Deg2Components> {
    if b > n {
        return Err(Error::invalid(format!("b = {b} exceeds n = {n}")));
    }
    if beta > b {
        return Err(Error::invalid(format!("beta = {beta} exceeds b = {b}")));
    }
    if beta >= r as u64 {
        return Err(Error::invalid(format!(
            "beta = {beta} must be below r = {r} for the nodes on R to stay general"
        )));
    }
    if r < 2 || d < 2 {
        return Err(Error::invalid("degeneration needs r >= 2 and d >= 2"));
    }
    Ok(Deg2Components {
        l_p0: LinearSystem::nodes(r, d - 1, n - b)?,
        hat_l_p0: LinearSystem::nodes(r, d - 2, n - b)?,
        bar_l_p0: LinearSystem::nodes(r, d - 1, n - b + beta)?,
        l_f0: LinearSystem::with_points(r, d, &[(d - 1, 1), (2, b)])?,
        hat_l_f0: LinearSystem::with_points(r, d, &[(d, 1), (2, b - beta), (1, beta)])?,
        r_f0: LinearSystem::with_points(r - 1, d - 1, &[(2, beta), (1, b - beta)])?,
    })
}

/// `l_0 = dim(R) + l̂_P + l̂_F + 2`.
pub fn limit_dim(dim_r: &BigInt, l_hat_p: &BigInt, l_hat_f: &BigInt) -> BigInt {
    dim_r + l_hat_p + l_hat_f + 2
}

/// Dimension of the intersection of two restricted systems meeting properly
/// inside the complete series of `ambient` forms:
/// `max(r_P + r_F - ambient + 1, -1)`.
pub fn transversal_intersection_dim(r_p: &BigInt, r_f: &BigInt, ambient: &BigInt) -> BigInt {
    let minus_one = BigInt::from(-1);
    if *r_p == minus_one || *r_f == minus_one {
        return minus_one;
    }
    let v: BigInt = r_p + r_f - ambient + 1;
    v.max(minus_one)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(s: &str) -> LinearSystem {
        s.parse().unwrap()
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn castelnuovo_examples() {
        let (k, t) = castelnuovo_split(&sys("L(r=3,d=4; 2^8)"), &[(2, 4)]).unwrap();
        assert_eq!(k, sys("L(r=3,d=3; 2^4, 1^4)"));
        assert_eq!(t, sys("L(r=2,d=4; 2^4)"));

        // quartic L_F step for r = 3: k(3) = 5, k(2) = 2
        let (k, t) = castelnuovo_split(&sys("L(r=3,d=4; 3, 2^5)"), &[(3, 1), (2, 2)]).unwrap();
        assert_eq!(k, sys("L(r=3,d=3; 2^4, 1^2)"));
        assert_eq!(t, sys("L(r=2,d=4; 3, 2^2)"));

        // P^3 step with d = 6: k0(6) = 11, h(6) = 4
        let (k, t) = castelnuovo_split(&sys("L(r=3,d=6; 5, 2^11)"), &[(5, 1), (2, 4)]).unwrap();
        assert_eq!(k, sys("L(r=3,d=5; 4, 2^7, 1^4)"));
        assert_eq!(t, sys("L(r=2,d=6; 5, 2^4)"));

        assert!(castelnuovo_split(&sys("L(r=3,d=4; 2^3)"), &[(2, 4)]).is_err());
    }

    #[test]
    fn castelnuovo_conserves_conditions() {
        let s = sys("L(r=4,d=5; 4, 3^2, 2^6, 1^3)");
        let (k, t) = castelnuovo_split(&s, &[(4, 1), (3, 1), (2, 2), (1, 1)]).unwrap();
        assert_eq!(s.columns(), k.columns() + t.columns());
        assert_eq!(
            s.condition_count(),
            k.condition_count() + t.condition_count()
        );
    }

    #[test]
    fn cone_examples() {
        assert_eq!(cone_reduce(&sys("L(r=3,d=4; 4, 2^4)")).unwrap(), sys("L(r=2,d=4; 2^4)"));
        assert_eq!(cone_reduce(&sys("L(r=5,d=3; 3)")).unwrap(), sys("L(r=4,d=3)"));
        assert_eq!(cone_reduce(&sys("L(r=3,d=5; 5, 2^7)")).unwrap(), sys("L(r=2,d=5; 2^7)"));
        assert!(cone_reduce(&sys("L(r=3,d=5; 4, 2^7)")).is_err());
    }

    #[test]
    fn deg1_example() {
        let c = deg1_components(3, 5, 14, 7).unwrap();
        assert_eq!(c.l_p, sys("L(r=3,d=4; 2^7)"));
        assert_eq!(c.l_f, sys("L(r=3,d=5; 4, 2^7)"));
        assert_eq!(c.hat_l_p, sys("L(r=3,d=3; 2^7)"));
        assert_eq!(c.hat_l_f, sys("L(r=3,d=5; 5, 2^7)"));
        assert_eq!(c.r_ambient, b(15));

        let c = deg1_components(4, 6, 10, 0).unwrap();
        assert_eq!(c.l_p, LinearSystem::nodes(4, 5, 10).unwrap());
        assert_eq!(c.l_f, sys("L(r=4,d=6; 5)"));
        assert!(deg1_components(3, 5, 3, 4).is_err());
    }

    #[test]
    fn deg2_example() {
        let c = deg2_components(3, 6, 21, 10, 1).unwrap();
        assert_eq!(c.bar_l_p0, sys("L(r=3,d=5; 2^12)"));
        assert_eq!(cone_reduce(&c.hat_l_f0).unwrap(), sys("L(r=2,d=6; 2^9, 1)"));
        assert_eq!(c.r_f0, sys("L(r=2,d=5; 2, 1^9)"));

        // beta = 0 collapses to the first degeneration
        let c2 = deg2_components(3, 5, 14, 7, 0).unwrap();
        let c1 = deg1_components(3, 5, 14, 7).unwrap();
        assert_eq!(c2.l_p0, c1.l_p);
        assert_eq!(c2.bar_l_p0, c1.l_p);
        assert_eq!(c2.l_f0, c1.l_f);
        assert_eq!(c2.hat_l_f0, c1.hat_l_f);

        assert!(deg2_components(5, 5, 21, 26, 1).is_err());
        assert!(deg2_components(5, 5, 42, 26, 1).is_ok());
        assert!(deg2_components(3, 6, 21, 10, 3).is_err());
    }

    #[test]
    fn limit_and_intersection() {
        assert_eq!(limit_dim(&b(-1), &b(-1), &b(-1)), b(-1));
        assert_eq!(limit_dim(&b(2), &b(-1), &b(-1)), b(2));
        assert_eq!(limit_dim(&b(0), &b(1), &b(-1)), b(2));
        assert_eq!(transversal_intersection_dim(&b(-1), &b(9), &b(10)), b(-1));
        // complete series with b base points: max(r_P - b, -1)
        let amb = binom(7, 2);
        for rp in -1..25 {
            for bb in 0..21 {
                let rf = &amb - 1 - bb;
                assert_eq!(
                    transversal_intersection_dim(&b(rp), &rf, &amb),
                    b((rp - bb).max(-1)),
                );
            }
        }
    }
}
