//! Exact integer arithmetic for dimension counts and degeneration thresholds.
//!
//! Everything here is arbitrary precision: `C(r+d, r)` leaves the 64-bit
//! range around `r = d = 33`, and none of the callers should have to care.
//!
//! Notation used in the docs below: `C(a, b)` is a binomial coefficient,
//! `N(r, d) = C(r+d, r)` is the number of degree-`d` monomials in `r+1`
//! variables.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Binomial coefficient `C(a, b)`, zero when `b < 0` or `b > a`.
pub fn binom(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::zero();
    }
    let b = (b as u64).min(a - b as u64);
    let mut acc = BigInt::one();
    for i in 1..=b {
        acc *= a - b + i;
        acc /= i;
    }
    acc
}

/// `C(r+d, r)`: dimension of the space of degree-`d` forms on `P^r`.
pub fn forms(r: u32, d: u32) -> BigInt {
    binom(r as u64 + d as u64, r as i64)
}

/// Number of linear conditions a general point of multiplicity `m` imposes
/// in `P^r`, `C(r+m-1, r)`.
pub fn point_conditions(r: u32, m: u32) -> BigInt {
    if m == 0 {
        return BigInt::zero();
    }
    binom(r as u64 + m as u64 - 1, r as i64)
}

/// Virtual dimension `C(r+d, r) - 1 - sum C(r+m_i-1, r)`.
///
/// `mults` is a compressed multiset of `(multiplicity, count)` pairs, so
/// `{2 x 7}` is `&[(2, 7)]`.
pub fn virtual_dim(r: u32, d: u32, mults: &[(u32, u64)]) -> Result<BigInt> {
    if r == 0 {
        return Err(Error::invalid("virtual_dim needs r >= 1"));
    }
    let mut v = forms(r, d) - 1;
    for &(m, count) in mults {
        if m == 0 {
            return Err(Error::invalid("multiplicities must be >= 1"));
        }
        v -= point_conditions(r, m) * count;
    }
    Ok(v)
}

/// Expected dimension `max(v, -1)`.
pub fn expected_dim(v: &BigInt) -> BigInt {
    if *v < BigInt::from(-1) {
        BigInt::from(-1)
    } else {
        v.clone()
    }
}

/// `(n⁻, n⁺) = (floor, ceil)` of `C(r+d, r) / (r+1)`.
pub fn n_bounds(r: u32, d: u32) -> (BigInt, BigInt) {
    let (q, rem) = forms(r, d).div_rem(&BigInt::from(r + 1));
    let up = if rem.is_zero() { q.clone() } else { &q + 1 };
    (q, up)
}

/// Quartic bound `k(r) = ceil(C(r+4, 4)/(r+1)) - r - 1`.
pub fn k_quartic(r: u32) -> BigInt {
    n_bounds(r, 4).1 - (r + 1)
}

/// `k₀(d) = floor((d² + 2d - 3)/4)`, the node bound for `L_{3,d}(d-1, 2^k)`.
pub fn k0(d: u32) -> BigInt {
    let d = BigInt::from(d);
    let top: BigInt = &d * &d + &d * 2 - 3;
    top.div_floor(&BigInt::from(4))
}

/// `h(d) = floor((2d + 1)/3)`, the node bound for `L_{2,d}(d-1, 2^k)`.
pub fn h(d: u32) -> BigInt {
    BigInt::from(2 * d as u64 + 1).div_floor(&BigInt::from(3))
}

/// General bound `k(r, d) = floor((C(r+d, r) - C(r+d-2, r))/(r+1)) - (r - 2)`.
///
/// For `r = 3` this coincides with [`k0`]: the numerator collapses to
/// `(d+1)²`, and `k₀(d) = floor((d+1)²/4) - 1`.
pub fn k_general(r: u32, d: u32) -> BigInt {
    let top = forms(r, d) - forms(r, d.saturating_sub(2));
    top.div_floor(&BigInt::from(r + 1)) - (BigInt::from(r) - 2)
}

/// The four node bounds attached to systems with a `(d-1)`-fold point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LfBounds {
    pub k_r: BigInt,
    pub k0_d: BigInt,
    pub h_d: BigInt,
    pub k_rd: BigInt,
}

pub fn lf_bounds(r: u32, d: u32) -> LfBounds {
    LfBounds {
        k_r: k_quartic(r),
        k0_d: k0(d),
        h_d: h(d),
        k_rd: k_general(r, d),
    }
}

/// Largest node count `k` for which `L_{r,d}(d-1, 2^k)` is known non-special
/// by the inductive lemmas: `h(d)` in the plane, `k(r)` for quartics,
/// `k₀(d)` in `P³` and `k(r, d)` otherwise. Returns `None` outside their
/// range (`r < 2` or `d < 4`).
pub fn lf_bound(r: u32, d: u32) -> Option<BigInt> {
    match (r, d) {
        (0 | 1, _) | (_, 0..=3) => None,
        (2, _) => Some(h(d)),
        (_, 4) => Some(k_quartic(r)),
        (3, _) => Some(k0(d)),
        _ => Some(k_general(r, d)),
    }
}

/// Splits `C(r+d-1, r-1) = r * floor + beta` with `0 <= beta < r`.
pub fn b0_decompose(r: u32, d: u32) -> (BigInt, BigInt) {
    let total = binom(r as u64 + d as u64 - 1, r as i64 - 1);
    total.div_rem(&BigInt::from(r))
}

/// Node count placed on the blown-up component by the second degeneration:
/// `floor(C(r+d-1, r-1)/r) + beta`.
pub fn second_b(r: u32, d: u32) -> BigInt {
    let (floor, beta) = b0_decompose(r, d);
    floor + beta
}

/// Number of simple points that pads `L_{r,3}(2^{n⁻(r,3)})` to virtual
/// dimension exactly `-1`.
///
/// By definition this is `C(r+3, 3) - (r+1)·n⁻(r,3) = C(r+3, 3) mod (r+1)`.
/// Closed form: writing `r + 1 = 3m` when `r ≡ 2 (mod 3)`,
/// `C(r+3, 3) = m(9m² + 9m + 2)/2 = 3m·(3m(m+1)/2) + m`, so the residue is
/// `m = (r+1)/3`. When `r ≡ 0, 1 (mod 3)` the quotient `(r+3)(r+2)/6` is an
/// integer and the residue is `0`.
pub fn gamma_r(r: u32) -> BigInt {
    forms(r, 3).mod_floor(&BigInt::from(r + 1))
}

/// Every threshold the degeneration arguments use, for one `(r, d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdBundle {
    pub n_minus: BigInt,
    pub n_plus: BigInt,
    pub k_r: BigInt,
    pub k0_d: BigInt,
    pub h_d: BigInt,
    pub k_rd: BigInt,
    pub b0_floor: BigInt,
    pub beta: BigInt,
    pub b_second: BigInt,
    pub gamma_r: BigInt,
}

impl ThresholdBundle {
    pub fn new(r: u32, d: u32) -> Result<Self> {
        if r < 2 || d < 2 {
            return Err(Error::invalid(format!(
                "thresholds need r >= 2 and d >= 2, got r={r}, d={d}"
            )));
        }
        let (n_minus, n_plus) = n_bounds(r, d);
        let lf = lf_bounds(r, d);
        let (b0_floor, beta) = b0_decompose(r, d);
        Ok(ThresholdBundle {
            n_minus,
            n_plus,
            k_r: lf.k_r,
            k0_d: lf.k0_d,
            h_d: lf.h_d,
            k_rd: lf.k_rd,
            b_second: &b0_floor + &beta,
            b0_floor,
            beta,
            gamma_r: gamma_r(r),
        })
    }
}

/// Converts a non-negative count to `u64`, failing on overflow or sign.
pub fn to_count(x: &BigInt) -> Result<u64> {
    if x.is_negative() {
        return Err(Error::invalid(format!("negative count {x}")));
    }
    u64::try_from(x).map_err(|_| Error::invalid(format!("count {x} exceeds 64 bits")))
}
