//! Interpolation conditions as rows over the degree-`d` monomial basis.

use rand::Rng;

use super::field::{Echelon, Field, Generic, Reduce};
use crate::error::{Error, Result};

/// How often a random draw may be degenerate before giving up.
pub(crate) const MAX_RETRIES: u32 = 16;

/// Degree-`d` monomials in `r+1` variables, in lexicographically decreasing
/// order starting from `x_0^d`.
#[derive(Clone, Debug)]
pub struct Monomials {
    vars: usize,
    d: u32,
    exps: Vec<u16>,
}

impl Monomials {
    pub fn new(r: u32, d: u32) -> Self {
        let vars = r as usize + 1;
        let mut exps = Vec::new();
        let mut cur = vec![0u16; vars];
        fill(&mut exps, &mut cur, 0, d);
        Monomials { vars, d, exps }
    }

    pub fn len(&self) -> usize {
        self.exps.len() / self.vars
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self, k: usize) -> &[u16] {
        &self.exps[k * self.vars..(k + 1) * self.vars]
    }

    fn iter(&self) -> impl Iterator<Item = &[u16]> {
        self.exps.chunks_exact(self.vars)
    }
}

fn fill(out: &mut Vec<u16>, cur: &mut [u16], i: usize, left: u32) {
    if i + 1 == cur.len() {
        cur[i] = left as u16;
        out.extend_from_slice(cur);
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e as u16;
        fill(out, cur, i + 1, left - e);
    }
}

/// Multi-indices in `vars` variables of total degree at most `max`.
fn multi_indices(vars: usize, max: u32) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; vars];
    fn go(out: &mut Vec<Vec<u16>>, cur: &mut [u16], i: usize, left: u32) {
        if i == cur.len() {
            out.push(cur.to_vec());
            return;
        }
        for e in 0..=left {
            cur[i] = e as u16;
            go(out, cur, i + 1, left - e);
        }
        cur[i] = 0;
    }
    go(&mut out, &mut cur, 0, max);
    out
}

/// Derivative rows of order `<= m-1` at a projective point.
///
/// The point is moved to the affine chart of its largest coordinate (as an
/// integer in `0..p`) and the rows are the affine partial derivatives of each
/// monomial evaluated there. Orders above `d` give zero rows and are skipped.
pub fn rows_for_point<R: Reduce>(
    mons: &Monomials,
    field: Field<R>,
    point: &[u64],
    m: u32,
) -> Result<Vec<Vec<u32>>> {
    if point.len() != mons.vars {
        return Err(Error::invalid(format!(
            "point has {} coordinates, expected {}",
            point.len(),
            mons.vars
        )));
    }
    let chart = (0..point.len())
        .max_by_key(|&i| (point[i] % field.p(), std::cmp::Reverse(i)))
        .unwrap();
    if point[chart] % field.p() == 0 {
        return Err(Error::invalid("the zero vector is not a projective point"));
    }
    let scale = field.inv(point[chart] % field.p());
    let q: Vec<u64> = point.iter().map(|&x| field.mul(x % field.p(), scale)).collect();

    let d = mons.d as usize;
    // pow[i][k] = q_i^k
    let pow: Vec<Vec<u64>> = q
        .iter()
        .map(|&x| {
            let mut v = vec![1u64; d + 1];
            for k in 1..=d {
                v[k] = field.mul(v[k - 1], x);
            }
            v
        })
        .collect();
    // ff[a][t] = a (a-1) ... (a-t+1)
    let mut ff = vec![vec![0u64; d + 1]; d + 1];
    for (a, row) in ff.iter_mut().enumerate() {
        row[0] = 1;
        for t in 1..=a {
            row[t] = field.mul(row[t - 1], (a - t + 1) as u64);
        }
    }

    let others: Vec<usize> = (0..mons.vars).filter(|&i| i != chart).collect();
    let order = (m.saturating_sub(1)).min(mons.d);
    let mut rows = Vec::new();
    for alpha in multi_indices(others.len(), order) {
        let row = mons
            .iter()
            .map(|a| {
                let mut v = 1u64;
                for (k, &i) in others.iter().enumerate() {
                    let (e, t) = (a[i] as usize, alpha[k] as usize);
                    if e < t {
                        return 0;
                    }
                    v = field.mul(v, field.mul(ff[e][t], pow[i][e - t]));
                }
                v as u32
            })
            .collect();
        rows.push(row);
    }
    Ok(rows)
}

/// Vanishing to order `m` along the coordinate subspace `x_0 = ... = x_{c-1} = 0`:
/// one unit row for every monomial of degree `< m` in the first `c` variables.
pub fn rows_for_axis_subspace(mons: &Monomials, c: u32, m: u32) -> Vec<Vec<u32>> {
    let n = mons.len();
    mons.iter()
        .enumerate()
        .filter(|(_, a)| a[..c as usize].iter().map(|&e| e as u32).sum::<u32>() < m)
        .map(|(k, _)| {
            let mut row = vec![0u32; n];
            row[k] = 1;
            row
        })
        .collect()
}

/// A random nonzero vector of length `len`.
pub(crate) fn random_vector<G: Rng>(rng: &mut G, p: u64, len: usize) -> Result<Vec<u64>> {
    for _ in 0..MAX_RETRIES {
        let v: Vec<u64> = (0..len).map(|_| rng.random_range(0..p)).collect();
        if v.iter().any(|&x| x != 0) {
            return Ok(v);
        }
    }
    Err(Error::DegenerateSampling(MAX_RETRIES))
}

/// A random point of the coordinate subspace where the first `c` coordinates vanish.
pub(crate) fn random_axis_point<G: Rng>(
    rng: &mut G,
    p: u64,
    len: usize,
    c: usize,
) -> Result<Vec<u64>> {
    let mut v = vec![0u64; c];
    v.extend(random_vector(rng, p, len - c)?);
    Ok(v)
}

/// A random linear subspace of `F_p^len` of dimension `k`, given by a basis.
#[derive(Clone, Debug)]
pub struct SubspaceSample {
    basis: Vec<Vec<u64>>,
}

impl SubspaceSample {
    pub fn new<G: Rng>(rng: &mut G, p: u64, len: usize, k: usize) -> Result<Self> {
        let field = Field(Generic(p));
        for _ in 0..MAX_RETRIES {
            let basis: Vec<Vec<u64>> = (0..k)
                .map(|_| (0..len).map(|_| rng.random_range(0..p)).collect())
                .collect();
            let mut ech = Echelon::new(field, len);
            let independent = basis
                .iter()
                .all(|v| ech.insert(v.iter().map(|&x| x as u32).collect()));
            if independent {
                return Ok(SubspaceSample { basis });
            }
        }
        Err(Error::DegenerateSampling(MAX_RETRIES))
    }

    /// A random point of the subspace.
    pub fn point<G: Rng, R: Reduce>(&self, rng: &mut G, field: Field<R>) -> Result<Vec<u64>> {
        let len = self.basis[0].len();
        for _ in 0..MAX_RETRIES {
            let mut v = vec![0u64; len];
            for b in &self.basis {
                let l = rng.random_range(0..field.p());
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = field.add(*x, field.mul(l, y));
                }
            }
            if v.iter().any(|&x| x != 0) {
                return Ok(v);
            }
        }
        Err(Error::DegenerateSampling(MAX_RETRIES))
    }
}
