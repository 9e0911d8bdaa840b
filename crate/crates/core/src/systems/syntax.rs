//! Text syntax for linear systems.
//!
//! ```text
//! system  := "L(" "r=" INT "," "d=" INT [ ";" [ item { "," item } ] ] ")"
//! item    := point | group
//! point   := INT [ "^" INT ]                  multiplicity ^ count
//! group   := "{" [INT] IDENT ":codim" INT { "," point "on" IDENT } "}"
//! ```
//!
//! Whitespace is allowed between tokens. A group is a fat subspace of the
//! given codimension and multiplicity (default 1) together with the points
//! supported on it, e.g. `L(r=7,d=3; {L1:codim3, 2^5 on L1}, 2^10)` or
//! `L(r=5,d=2; {2L1:codim3}, 2)`. Formatting always produces the canonical
//! form, and `parse(format(s)) == s`.

use super::{LinearSystem, Subspace};
use crate::error::{Error, Result};

/// Canonical text of a system.
pub fn format(sys: &LinearSystem) -> String {
    let mut items = Vec::new();
    for (i, s) in sys.subspaces().iter().enumerate() {
        let id = LinearSystem::subspace_id(i);
        let mut inner = vec![format!(
            "{}{}:codim{}",
            if s.mult == 1 { String::new() } else { s.mult.to_string() },
            id,
            s.codim
        )];
        for &(m, c) in &s.points {
            inner.push(format!("{} on {}", point(m, c), id));
        }
        items.push(format!("{{{}}}", inner.join(", ")));
    }
    for &(m, c) in sys.points() {
        items.push(point(m, c));
    }
    if items.is_empty() {
        format!("L(r={},d={})", sys.r(), sys.d())
    } else {
        format!("L(r={},d={}; {})", sys.r(), sys.d(), items.join(", "))
    }
}

fn point(m: u32, c: u64) -> String {
    if c == 1 {
        m.to_string()
    } else {
        format!("{m}^{c}")
    }
}

/// Parses a system; the result is canonicalized.
pub fn parse(text: &str) -> Result<LinearSystem> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let sys = p.system()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(sys)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

struct Group {
    id: String,
    sub: Subspace,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        self.ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            Ok(())
        } else {
            Err(self.err(&format!("expected {tok:?}")))
        }
    }

    fn int(&mut self) -> Result<u64> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse {
                pos: start,
                msg: "integer out of range".into(),
            })
    }

    fn small(&mut self, what: &str) -> Result<u32> {
        let at = self.pos;
        let v = self.int()?;
        u32::try_from(v).map_err(|_| Error::Parse {
            pos: at,
            msg: format!("{what} too large"),
        })
    }

    fn ident(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        if self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
            while self.pos < self.s.len()
                && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
            {
                self.pos += 1;
            }
        }
        if start == self.pos {
            return Err(self.err("expected a subspace name"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn system(&mut self) -> Result<LinearSystem> {
        self.expect("L")?;
        self.expect("(")?;
        self.expect("r")?;
        self.expect("=")?;
        let r = self.small("r")?;
        self.expect(",")?;
        self.expect("d")?;
        self.expect("=")?;
        let d = self.small("d")?;
        let mut groups: Vec<Group> = Vec::new();
        let mut points = Vec::new();
        if self.peek() == Some(b';') {
            self.pos += 1;
            if self.peek() != Some(b')') {
                loop {
                    if self.peek() == Some(b'{') {
                        let at = self.pos;
                        let g = self.group()?;
                        if groups.iter().any(|h| h.id == g.id) {
                            return Err(Error::Parse {
                                pos: at,
                                msg: format!("duplicate subspace {}", g.id),
                            });
                        }
                        groups.push(g);
                    } else {
                        points.push(self.point()?);
                    }
                    if self.peek() == Some(b',') {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
            }
        }
        self.expect(")")?;
        let at = self.pos;
        LinearSystem::new(r, d, groups.into_iter().map(|g| g.sub).collect(), &points).map_err(
            |e| Error::Parse {
                pos: at,
                msg: e.to_string(),
            },
        )
    }

    fn point(&mut self) -> Result<(u32, u64)> {
        let at = self.pos;
        let m = self.small("multiplicity")?;
        if m == 0 {
            return Err(Error::Parse {
                pos: at,
                msg: "multiplicity must be >= 1".into(),
            });
        }
        let mut c = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            c = self.int()?;
            if c == 0 {
                return Err(Error::Parse {
                    pos: at,
                    msg: "count must be >= 1".into(),
                });
            }
        }
        Ok((m, c))
    }

    fn group(&mut self) -> Result<Group> {
        self.expect("{")?;
        let mut mult = 1;
        if matches!(self.peek(), Some(b'0'..=b'9')) {
            let at = self.pos;
            mult = self.small("multiplicity")?;
            if mult == 0 {
                return Err(Error::Parse {
                    pos: at,
                    msg: "multiplicity must be >= 1".into(),
                });
            }
        }
        let id = self.ident()?;
        self.expect(":")?;
        self.expect("codim")?;
        let codim = self.small("codimension")?;
        let mut pts = Vec::new();
        while self.peek() == Some(b',') {
            self.pos += 1;
            let p = self.point()?;
            self.expect("on")?;
            self.ws();
            let at = self.pos;
            let on = self.ident()?;
            if on != id {
                return Err(Error::Parse {
                    pos: at,
                    msg: format!("points inside {{{id}...}} must lie on {id}, not {on}"),
                });
            }
            pts.push(p);
        }
        self.expect("}")?;
        Ok(Group {
            id,
            sub: Subspace::new(codim, mult, &pts),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_roundtrip() {
        for s in [
            "L(r=3,d=5; 2^14)",
            "L(r=7,d=3; {L1:codim3, 2^5 on L1}, 2^10)",
            "L(r=3,d=4; 3, 2^5)",
            "L(r=5,d=2; {2L1:codim3}, 2)",
            "L(r=6,d=3; {L1:codim3, 2^3 on L1}, {L2:codim3, 2^3 on L2}, {L3:codim3, 2^3 on L3})",
            "L(r=2,d=4)",
        ] {
            let sys = parse(s).unwrap();
            assert_eq!(format(&sys), s);
        }
    }

    #[test]
    fn whitespace_and_normalization() {
        let a = parse(" L ( r = 3 , d = 4 ; 2^3 , 3 , 2 ^ 2 ) ").unwrap();
        assert_eq!(format(&a), "L(r=3,d=4; 3, 2^5)");
        assert_eq!(format(&parse("L(r=3,d=4;)").unwrap()), "L(r=3,d=4)");
        assert_eq!(format(&parse("L(r=3,d=4; 2^1)").unwrap()), "L(r=3,d=4; 2)");
        let b = parse("L(r=7,d=2; 2, {A:codim3, 2^3 on A})").unwrap();
        assert_eq!(format(&b), "L(r=7,d=2; {L1:codim3, 2^3 on L1}, 2)");
    }

    #[test]
    fn subspaces_sorted_canonically() {
        let a = parse("L(r=7,d=3; {X:codim4}, {Y:codim3, 2^2 on Y})").unwrap();
        let b = parse("L(r=7,d=3; {Y:codim3, 2^2 on Y}, {X:codim4})").unwrap();
        assert_eq!(a, b);
        assert_eq!(format(&a), "L(r=7,d=3; {L1:codim3, 2^2 on L1}, {L2:codim4})");
    }

    #[test]
    fn errors_carry_position() {
        let cases = [
            ("L(r=3,d=4; 0)", 11),
            ("L(r=3,d=4; 2^0)", 13),
            ("L(r=3 d=4)", 6),
            ("L(r=3,d=4; 2) x", 14),
            ("L(r=3,d=4; {A:codim3, 2 on B})", 27),
        ];
        for (s, pos) in cases {
            match parse(s) {
                Err(Error::Parse { pos: p, .. }) => assert_eq!(p, pos, "{s}"),
                other => panic!("{s}: {other:?}"),
            }
        }
        assert!(matches!(parse("L(r=3,d=4; {A:codim5})"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse("L(r=3,d=4; {A:codim1}, {A:codim2})"),
            Err(Error::Parse { .. })
        ));
    }
}
