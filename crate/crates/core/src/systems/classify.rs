//! The Alexander–Hirschowitz table of special systems `L_{r,d}(2^n)`.
//!
//! The exceptional rows are stored as data so that reports can cite them.

use num_bigint::BigInt;
use serde::Serialize;

use super::LinearSystem;
use crate::combinatorics::{binom, expected_dim, virtual_dim};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ExceptionTag {
    /// `d = 2`, `2 <= n <= r`: quadric cones with vertex through the points.
    Quadric,
    /// `L_{2,4}(2^5)`: the double conic through five points.
    Quartic2,
    /// `L_{3,4}(2^9)`: the double quadric through nine points.
    Quartic3,
    /// `L_{4,4}(2^14)`: the double quadric through fourteen points.
    Quartic4,
    /// `L_{4,3}(2^7)`: the secant cubic of the rational normal quartic.
    Cubic4,
}

impl ExceptionTag {
    pub fn name(self) -> &'static str {
        match self {
            ExceptionTag::Quadric => "Quadric",
            ExceptionTag::Quartic2 => "Quartic2",
            ExceptionTag::Quartic3 => "Quartic3",
            ExceptionTag::Quartic4 => "Quartic4",
            ExceptionTag::Cubic4 => "Cubic4",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExceptionTag::Quadric => "quadric cones whose vertex contains the span of the points",
            ExceptionTag::Quartic2 => "the double conic through five general points of the plane",
            ExceptionTag::Quartic3 => "the double quadric through nine general points of P^3",
            ExceptionTag::Quartic4 => "the double quadric through fourteen general points of P^4",
            ExceptionTag::Cubic4 => {
                "the secant variety of the rational normal quartic through seven points of P^4"
            }
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        EXCEPTIONS.iter().map(|e| e.tag).find(|t| t.name() == s)
    }
}

/// Which `(r, d, n)` a table row covers.
#[derive(Clone, Copy, Debug)]
pub enum RowShape {
    /// `d = 2` and `2 <= n <= r`; dimension `C(r-n+2, 2) - 1`.
    Quadric,
    /// A single sporadic triple of dimension 0.
    Sporadic { r: u32, d: u32, n: u64 },
}

#[derive(Clone, Copy, Debug)]
pub struct ExceptionRow {
    pub tag: ExceptionTag,
    pub shape: RowShape,
}

pub static EXCEPTIONS: &[ExceptionRow] = &[
    ExceptionRow {
        tag: ExceptionTag::Quadric,
        shape: RowShape::Quadric,
    },
    ExceptionRow {
        tag: ExceptionTag::Quartic2,
        shape: RowShape::Sporadic { r: 2, d: 4, n: 5 },
    },
    ExceptionRow {
        tag: ExceptionTag::Quartic3,
        shape: RowShape::Sporadic { r: 3, d: 4, n: 9 },
    },
    ExceptionRow {
        tag: ExceptionTag::Quartic4,
        shape: RowShape::Sporadic { r: 4, d: 4, n: 14 },
    },
    ExceptionRow {
        tag: ExceptionTag::Cubic4,
        shape: RowShape::Sporadic { r: 4, d: 3, n: 7 },
    },
];

impl ExceptionRow {
    fn matches(&self, r: u32, d: u32, n: u64) -> bool {
        match self.shape {
            RowShape::Quadric => d == 2 && n >= 2 && n <= r as u64,
            RowShape::Sporadic { r: rr, d: dd, n: nn } => (r, d, n) == (rr, dd, nn),
        }
    }

    fn dim(&self, r: u32, n: u64) -> BigInt {
        match self.shape {
            RowShape::Quadric => binom(r as u64 - n + 2, 2) - 1,
            RowShape::Sporadic { .. } => BigInt::from(0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialVerdict {
    pub is_exception: bool,
    #[serde(with = "opt_big")]
    pub closed_form_dim: Option<BigInt>,
    pub exception_tag: Option<ExceptionTag>,
    /// Known empty by the quadric row: `d = 2` and `n >= r + 1`.
    pub empty_row: bool,
}

mod opt_big {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => crate::bigjson::serialize(v, s),
            None => s.serialize_none(),
        }
    }
}

/// Classifies `L_{r,d}(2^n)` against the table.
pub fn classify(r: u32, d: u32, n: u64) -> SpecialVerdict {
    match EXCEPTIONS.iter().find(|e| e.matches(r, d, n)) {
        Some(row) => SpecialVerdict {
            is_exception: true,
            closed_form_dim: Some(row.dim(r, n)),
            exception_tag: Some(row.tag),
            empty_row: false,
        },
        None => SpecialVerdict {
            is_exception: false,
            closed_form_dim: None,
            exception_tag: None,
            empty_row: d == 2 && n > r as u64,
        },
    }
}

/// Classifies a system, which must consist of double points only.
pub fn classify_system(sys: &LinearSystem) -> Result<SpecialVerdict> {
    if !sys.is_double_points_only() {
        return Err(Error::invalid(format!(
            "classification needs double points only, got {sys}"
        )));
    }
    Ok(classify(sys.r(), sys.d(), sys.count(2)))
}

/// Actual dimension of an exceptional `L_{r,d}(2^n)`.
pub fn special_dim(r: u32, d: u32, n: u64) -> Result<BigInt> {
    classify(r, d, n).closed_form_dim.ok_or_else(|| {
        Error::invalid(format!("L_{{{r},{d}}}(2^{n}) is not in the exception table"))
    })
}

/// Which table entry fixes the dimension of `L_{r,d}(2^n)`, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableEntry {
    Exception(ExceptionTag),
    /// Quadrics outside the exceptional range.
    Quadric,
    /// Plane curves: every non-exceptional case is non-special.
    Plane,
}

impl TableEntry {
    pub fn name(self) -> &'static str {
        match self {
            TableEntry::Exception(t) => t.name(),
            TableEntry::Quadric => "quadric",
            TableEntry::Plane => "plane",
        }
    }
}

/// Dimension of `L_{r,d}(2^n)` when the table settles it without induction:
/// every exception, every quadric system, and every plane system.
pub fn table_dim(r: u32, d: u32, n: u64) -> Option<(TableEntry, BigInt)> {
    let v = classify(r, d, n);
    if let (Some(tag), Some(dim)) = (v.exception_tag, v.closed_form_dim) {
        return Some((TableEntry::Exception(tag), dim));
    }
    let e = expected_dim(&virtual_dim(r, d, &[(2, n)]).ok()?);
    if d == 2 {
        Some((TableEntry::Quadric, e))
    } else if r == 2 {
        Some((TableEntry::Plane, e))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let v = classify(2, 4, 5);
        assert!(v.is_exception);
        assert_eq!(v.closed_form_dim, Some(BigInt::from(0)));
        assert_eq!(v.exception_tag, Some(ExceptionTag::Quartic2));

        let v = classify(6, 2, 4);
        assert_eq!(v.closed_form_dim, Some(BigInt::from(5)));
        assert_eq!(v.exception_tag, Some(ExceptionTag::Quadric));

        assert!(!classify(3, 5, 14).is_exception);
        assert!(classify(3, 2, 4).empty_row);
    }

    #[test]
    fn special_dims() {
        assert_eq!(special_dim(3, 2, 2).unwrap(), BigInt::from(2));
        assert_eq!(special_dim(4, 3, 7).unwrap(), BigInt::from(0));
        assert_eq!(special_dim(3, 4, 9).unwrap(), BigInt::from(0));
        assert!(special_dim(3, 5, 14).is_err());
    }

    #[test]
    fn exceptions_exceed_expected() {
        for r in 2..=12 {
            for d in 2..=6 {
                for n in 0..40 {
                    let v = classify(r, d, n);
                    if let Some(dim) = v.closed_form_dim {
                        let e = expected_dim(&virtual_dim(r, d, &[(2, n)]).unwrap());
                        assert!(dim > e, "({r},{d},{n})");
                    }
                }
            }
        }
    }

    #[test]
    fn classify_system_rejects_other_mults() {
        let s: LinearSystem = "L(r=3,d=4; 3, 2^5)".parse().unwrap();
        assert!(classify_system(&s).is_err());
        let s: LinearSystem = "L(r=2,d=4; 2^5)".parse().unwrap();
        assert!(classify_system(&s).unwrap().is_exception);
    }

    #[test]
    fn table_dim_rows() {
        assert_eq!(table_dim(5, 2, 9).unwrap().1, BigInt::from(-1));
        assert_eq!(table_dim(5, 2, 1).unwrap().1, binom(6, 2) - 1);
        assert_eq!(table_dim(2, 6, 5).unwrap(), (TableEntry::Plane, BigInt::from(12)));
        assert!(table_dim(3, 5, 14).is_none());
    }
}
